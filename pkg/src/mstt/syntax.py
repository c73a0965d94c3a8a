"""Extrinsically typed syntax of MSTT.

Types and terms carry no mode of their own: ``Nat`` is a type at every
mode, and a term's mode is the mode of the context it is checked in.
Contexts do carry a mode, fixed by the empty context at their root.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Union

from .mode_theory import ID_CELL, UNIT, Compose, ModalityExpr, Unit, render_modality

# ---------------------------------------------------------------------------
# Types


@dataclass(frozen=True)
class NatTy:
    pass


@dataclass(frozen=True)
class BoolTy:
    pass


@dataclass(frozen=True)
class Arrow:
    dom: "TyExpr"
    cod: "TyExpr"


@dataclass(frozen=True)
class Prod:
    fst: "TyExpr"
    snd: "TyExpr"


@dataclass(frozen=True)
class Modal:
    mu: ModalityExpr
    ty: "TyExpr"


@dataclass(frozen=True)
class TyExt:
    code: str
    args: tuple = ()


TyExpr = Union[NatTy, BoolTy, Arrow, Prod, Modal, TyExt]
Nat = NatTy()
Bool = BoolTy()


def arrows(*tys: TyExpr) -> TyExpr:
    """``arrows(A, B, C) == A ⇛ (B ⇛ C)``."""
    out = tys[-1]
    for t in reversed(tys[:-1]):
        out = Arrow(t, out)
    return out


def render_ty(ty: TyExpr, unicode: bool = False) -> str:
    arrow, times = (" ⇛ ", " ⊠ ") if unicode else (" -> ", " * ")
    if isinstance(ty, NatTy):
        return "Nat"
    if isinstance(ty, BoolTy):
        return "Bool"
    if isinstance(ty, Arrow):
        left = render_ty(ty.dom, unicode)
        if isinstance(ty.dom, Arrow):
            left = f"({left})"
        return left + arrow + render_ty(ty.cod, unicode)
    if isinstance(ty, Prod):
        left = render_ty(ty.fst, unicode)
        right = render_ty(ty.snd, unicode)
        if isinstance(ty.fst, Arrow):
            left = f"({left})"
        if isinstance(ty.snd, (Arrow, Prod)):
            right = f"({right})"
        return left + times + right
    if isinstance(ty, Modal):
        if unicode:
            return f"⟨ {render_modality(ty.mu, True)} ∣ {render_ty(ty.ty, True)} ⟩"
        return f"<{render_modality(ty.mu)} | {render_ty(ty.ty)}>"
    if isinstance(ty, TyExt):
        parts = [ty.code]
        for a in ty.args:
            s = render_ty(a, unicode)
            if isinstance(a, (Arrow, Prod)) or (isinstance(a, TyExt) and a.args):
                s = f"({s})"
            parts.append(s)
        return " ".join(parts)
    raise TypeError(f"not a type expression: {ty!r}")


# ---------------------------------------------------------------------------
# Contexts


@dataclass(frozen=True)
class Empty:
    mode: str


@dataclass(frozen=True)
class Bind:
    """``ctx , mu ∣ name ∈ ty``"""

    ctx: "CtxExpr"
    mu: ModalityExpr
    name: str
    ty: TyExpr


@dataclass(frozen=True)
class Lock:
    """``ctx ,lock⟨ mu ⟩``"""

    ctx: "CtxExpr"
    mu: ModalityExpr


CtxExpr = Union[Empty, Bind, Lock]


# ---------------------------------------------------------------------------
# Terms


@dataclass(frozen=True)
class Ann:
    tm: "TmExpr"
    ty: TyExpr


@dataclass(frozen=True)
class Var:
    name: str
    cell: str = ID_CELL


@dataclass(frozen=True)
class Lam:
    name: str
    ty: TyExpr
    body: "TmExpr"


@dataclass(frozen=True)
class App:
    fn: "TmExpr"
    arg: "TmExpr"


@dataclass(frozen=True)
class Lit:
    n: int


@dataclass(frozen=True)
class Suc:
    pass


@dataclass(frozen=True)
class Plus:
    pass


@dataclass(frozen=True)
class NatElim:
    zero: "TmExpr"
    step: "TmExpr"


@dataclass(frozen=True)
class TrueTm:
    pass


@dataclass(frozen=True)
class FalseTm:
    pass


@dataclass(frozen=True)
class If:
    cond: "TmExpr"
    then: "TmExpr"
    orelse: "TmExpr"


@dataclass(frozen=True)
class Pair:
    fst: "TmExpr"
    snd: "TmExpr"


@dataclass(frozen=True)
class Fst:
    tm: "TmExpr"


@dataclass(frozen=True)
class Snd:
    tm: "TmExpr"


@dataclass(frozen=True)
class ModIntro:
    mu: ModalityExpr
    tm: "TmExpr"


@dataclass(frozen=True)
class ModElim:
    """``let⟨ outer ⟩ mod⟨ mu ⟩ name ← tm in' body``; only ``outer ≃ 𝟙`` is checked."""

    mu: ModalityExpr
    name: str
    tm: "TmExpr"
    body: "TmExpr"
    outer: ModalityExpr = UNIT


@dataclass(frozen=True)
class TmExt:
    """Application-specific term former, dispatched on ``code``.

    ``tys`` are type arguments, ``args`` subterms, ``name`` an optional bound
    variable (scoping over every subterm) and ``data`` an opaque payload.
    """

    code: str
    tys: tuple = ()
    args: tuple = ()
    name: str | None = None
    data: Any = None


TmExpr = Union[
    Ann, Var, Lam, App, Lit, Suc, Plus, NatElim, TrueTm, FalseTm, If, Pair, Fst, Snd, ModIntro, ModElim, TmExt
]


# ---------------------------------------------------------------------------
# Sugar


def svar(name: str) -> Var:
    return Var(name, ID_CELL)


def sugar_modal_lam(mu: ModalityExpr, name: str, ty: TyExpr, body: TmExpr) -> Lam:
    """``lam[ mu ∣ name ∈ ty ] body``: the argument is bound under ``mu``."""
    return Lam(name, Modal(mu, ty), ModElim(mu, name, Var(name, ID_CELL), body))


def sugar_modal_app(fn: TmExpr, mu: ModalityExpr, arg: TmExpr) -> App:
    """``fn ∙⟨ mu ⟩ arg``"""
    return App(fn, ModIntro(mu, arg))


lam_modal = sugar_modal_lam
app_modal = sugar_modal_app


def let_mod(mu: ModalityExpr, name: str, tm: TmExpr, body: TmExpr) -> ModElim:
    return ModElim(mu, name, tm, body)


def apps(fn: TmExpr, *args: TmExpr) -> TmExpr:
    for a in args:
        fn = App(fn, a)
    return fn


def lift_modal(mu: ModalityExpr, arg_tys: tuple, result_ty: TyExpr) -> TmExpr:
    """Applicative lifting through ``mu`` for functions of 1 to 3 arguments.

    Produces a term of type
    ``⟨mu | A1 ⇛ … ⇛ R⟩ ⇛ ⟨mu | A1⟩ ⇛ … ⇛ ⟨mu | R⟩``.
    """
    if not 1 <= len(arg_tys) <= 3:
        raise ValueError("lift_modal supports 1 to 3 arguments")
    names = [f"lift-arg{i}" for i in range(len(arg_tys))]
    inner: TmExpr = ModIntro(mu, apps(svar("lift-g"), *(svar(n) for n in names)))
    inner = let_mod(mu, "lift-g", svar("lift-f"), inner)
    for n, ty in reversed(list(zip(names, arg_tys))):
        inner = sugar_modal_lam(mu, n, ty, inner)
    return Lam("lift-f", Modal(mu, arrows(*arg_tys, result_ty)), inner)


def liftA2(mu: ModalityExpr, a: TyExpr, b: TyExpr, c: TyExpr) -> TmExpr:
    return lift_modal(mu, (a, b), c)


def is_unit(mu: ModalityExpr) -> bool:
    if isinstance(mu, Unit):
        return True
    return isinstance(mu, Compose) and is_unit(mu.outer) and is_unit(mu.inner)
