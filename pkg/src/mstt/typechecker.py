"""Elaborator: infers the type of a term and builds its presheaf denotation.

Type errors are raised as ``TypeCheckError`` and short-circuit like the
error monad they stand for; ``TCM`` offers the same thing as a value for
callers that prefer results over exceptions.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Callable

from .errors import TypeCheckError
from .mode_theory import UNIT, Compose, ModalityExpr, ModeTheory, Unit, render_modality
from .presheaf import (
    DRA,
    BaseCategory,
    BoolV,
    FunTy,
    FunV,
    NatV,
    ProdTy,
    SemCtx,
    SemTm,
    SemTy,
    SemTyIso,
    ctx_empty,
    ctx_extend,
    curried,
    discrete_ty,
    eval_builtin,
    expect,
    fst_tm,
    fun_app,
    fun_lam,
    iso_fun,
    iso_id,
    iso_mod,
    iso_prod,
    iso_transport,
    pair_tm,
    snd_tm,
    subst_top,
    var_top,
)
from .syntax import (
    Ann,
    App,
    Arrow,
    Bind,
    Bool,
    BoolTy,
    CtxExpr,
    Empty,
    FalseTm,
    Fst,
    If,
    Lam,
    Lit,
    Lock,
    Modal,
    ModElim,
    ModIntro,
    Nat,
    NatElim,
    NatTy,
    Pair,
    Plus,
    Prod,
    Snd,
    Suc,
    TmExpr,
    TmExt,
    TrueTm,
    TyExpr,
    TyExt,
    Var,
    lift_modal,
    render_ty,
)

# ---------------------------------------------------------------------------
# The type-checking monad as a value


@dataclass(frozen=True)
class TCM:
    """``ok(value)`` or ``type_error(message)``."""

    value: Any = None
    error: str | None = None

    @property
    def is_ok(self) -> bool:
        return self.error is None

    def bind(self, k: Callable[[Any], "TCM"]) -> "TCM":
        return k(self.value) if self.error is None else self

    def unwrap(self):
        if self.error is not None:
            raise TypeCheckError(self.error)
        return self.value


def ok(value) -> TCM:
    return TCM(value=value)


def type_error(message: str) -> TCM:
    return TCM(error=message)


def run_tcm(thunk: Callable[[], Any]) -> TCM:
    """Run a raising computation and capture its outcome."""
    try:
        return ok(thunk())
    except TypeCheckError as e:
        return type_error(str(e))


# ---------------------------------------------------------------------------
# Extension registries


@dataclass(frozen=True)
class TyExtension:
    """A type former ``code A1 … Ak``: arguments live at ``arg_modes``, result at ``mode``."""

    code: str
    arg_modes: tuple
    mode: str
    interpret: Callable  # (*semantic args) -> SemTy
    congruence: Callable | None = None  # (*arg isos) -> SemTyIso


@dataclass(frozen=True)
class TmExtension:
    """A term former dispatched on ``TmExt.code``.

    ``surface`` picks the concrete syntax: ``types`` (``code[A, …]``),
    ``op`` (``code[opname]``), ``binder`` (``code[x : T] t``) or
    ``literal`` (``code[Ty: left, right]``). ``ops`` maps surface names to
    payloads for the last two kinds. A ``macro`` (``code<mu>[A, …]``) only
    exists in the text syntax: the parser replaces it by ``expand(mu, tys)``.
    """

    code: str
    infer: Callable  # (checker, tm, ctx) -> InferInterpretResult
    surface: str = "types"
    ops: dict = field(default_factory=dict)
    expand: Callable | None = None


def lift_macro(arity: int) -> TmExtension:
    """Applicative lifting through any modality, for functions of ``arity`` arguments."""
    code = {1: "lift1", 2: "liftA2", 3: "liftA3"}[arity]

    def expand(mu, tys):
        if len(tys) != arity + 1:
            raise TypeCheckError(f"{code} takes {arity + 1} types", "macro")
        return lift_modal(mu, tuple(tys[:-1]), tys[-1])

    def infer(checker, t, ctx):
        raise TypeCheckError(f"{code} is surface sugar, not a term former", "macro")

    return TmExtension(code, infer, "macro", expand=expand)


@dataclass(frozen=True)
class InferInterpretResult:
    type: TyExpr
    denotation: SemTm


# ---------------------------------------------------------------------------


def _short(text: str, limit: int = 100) -> str:
    return text if len(text) <= limit else text[: limit - 3] + "..."


class Checker:
    """A mode theory plus type/term extensions; checks and interprets terms."""

    def __init__(
        self,
        mode_theory: ModeTheory,
        ty_exts: dict | None = None,
        tm_exts: dict | None = None,
        extractables: list | None = None,
        default_mode: str | None = None,
    ):
        self.mt = mode_theory
        self.ty_exts = dict(ty_exts or {})
        self.tm_exts = dict(tm_exts or {})
        self.extractables = list(extractables or [])
        self.default_mode = default_mode or next(iter(mode_theory.modes))
        self._ty_cache: dict = {}
        self._ctx_cache: dict = {}

    # -- rendering ----------------------------------------------------------

    def show_tm(self, t: TmExpr) -> str:
        from .surface import pretty_tm

        try:
            return _short(pretty_tm(t, self))
        except Exception:  # printing must never mask the real error
            return _short(repr(t))

    # -- modes and modalities ------------------------------------------------

    def interpret_mode(self, m: str) -> BaseCategory:
        return self.mt.interpret_mode(m)

    def interpret_modality(self, mu: ModalityExpr, cod: str) -> DRA:
        return self.mt.interpret_modality(mu, cod)

    # -- types ---------------------------------------------------------------

    def interpret_ty(self, ty: TyExpr, mode: str) -> SemTy:
        """Check that ``ty`` is a well-formed type at ``mode`` and interpret it."""
        key = (ty, mode)
        hit = self._ty_cache.get(key)
        if hit is None:
            hit = self._interpret_ty(ty, mode)
            self._ty_cache[key] = hit
        return hit

    def _interpret_ty(self, ty, mode):
        base = self.interpret_mode(mode)
        if isinstance(ty, NatTy):
            return discrete_ty(base, "Nat")
        if isinstance(ty, BoolTy):
            return discrete_ty(base, "Bool")
        if isinstance(ty, Arrow):
            return FunTy(self.interpret_ty(ty.dom, mode), self.interpret_ty(ty.cod, mode))
        if isinstance(ty, Prod):
            return ProdTy(self.interpret_ty(ty.fst, mode), self.interpret_ty(ty.snd, mode))
        if isinstance(ty, Modal):
            dom = self.mt.dom_of(ty.mu, mode)
            return self.interpret_modality(ty.mu, mode).mod(self.interpret_ty(ty.ty, dom))
        if isinstance(ty, TyExt):
            ext = self._ty_ext(ty, mode)
            args = [self.interpret_ty(a, m) for a, m in zip(ty.args, ext.arg_modes)]
            return ext.interpret(*args)
        raise TypeCheckError(f"not a type expression: {ty!r}", "type")

    def _ty_ext(self, ty: TyExt, mode: str) -> TyExtension:
        ext = self.ty_exts.get(ty.code)
        if ext is None:
            raise TypeCheckError(f"unknown type extension {ty.code!r}", "type")
        if len(ty.args) != len(ext.arg_modes):
            raise TypeCheckError(
                f"{ty.code} expects {len(ext.arg_modes)} type arguments, got {len(ty.args)}", "type"
            )
        if ext.mode != mode:
            raise TypeCheckError(f"type {render_ty(ty)} lives at mode {ext.mode}, not {mode}", "type")
        return ext

    def check_ty(self, ty: TyExpr, mode: str) -> None:
        self.interpret_ty(ty, mode)

    def ty_equiv(self, t: TyExpr, s: TyExpr, mode: str) -> SemTyIso:
        """``⟦t⟧ ≅ ⟦s⟧`` when the types agree up to modality equivalence."""
        if t == s:
            return iso_id(self.interpret_ty(t, mode))
        try:
            return self._ty_equiv(t, s, mode)
        except TypeCheckError as e:
            if e.rule == "ty-equiv":
                raise
            raise TypeCheckError(
                f"types {render_ty(t)} and {render_ty(s)} are not equivalent: {e.message}", "ty-equiv"
            ) from None

    def _ty_equiv(self, t, s, mode) -> SemTyIso:
        if t == s:
            return iso_id(self.interpret_ty(t, mode))
        if isinstance(t, Arrow) and isinstance(s, Arrow):
            return iso_fun(self._ty_equiv(t.dom, s.dom, mode), self._ty_equiv(t.cod, s.cod, mode))
        if isinstance(t, Prod) and isinstance(s, Prod):
            return iso_prod(self._ty_equiv(t.fst, s.fst, mode), self._ty_equiv(t.snd, s.snd, mode))
        if isinstance(t, Modal) and isinstance(s, Modal):
            d1 = self.mt.dom_of(t.mu, mode)
            d2 = self.mt.dom_of(s.mu, mode)
            self.mt.modes_equal(d1, d2)
            inner = self._ty_equiv(t.ty, s.ty, d1)
            miso = self.mt.modalities_equivalent(t.mu, s.mu, mode)
            dra = self.interpret_modality(t.mu, mode)
            return iso_mod(dra, inner).then(miso.closed_iso(inner.target))
        if isinstance(t, TyExt) and isinstance(s, TyExt) and t.code == s.code and len(t.args) == len(s.args):
            ext = self._ty_ext(t, mode)
            isos = [self._ty_equiv(a, b, m) for a, b, m in zip(t.args, s.args, ext.arg_modes)]
            if ext.congruence is None:
                raise TypeCheckError(f"{t.code} has no congruence rule", "ty-equiv")
            return ext.congruence(*isos)
        raise TypeCheckError(f"types {render_ty(t)} and {render_ty(s)} are not equivalent", "ty-equiv")

    # -- contexts ------------------------------------------------------------

    def ctx_mode(self, ctx: CtxExpr) -> str:
        while isinstance(ctx, Bind):
            ctx = ctx.ctx
        if isinstance(ctx, Empty):
            return self.mt.check_mode(ctx.mode)
        return self.mt.dom_of(ctx.mu, self.ctx_mode(ctx.ctx))

    def interpret_ctx(self, ctx: CtxExpr) -> SemCtx:
        hit = self._ctx_cache.get(ctx)
        if hit is None:
            hit = self._interpret_ctx(ctx)
            self._ctx_cache[ctx] = hit
        return hit

    def _interpret_ctx(self, ctx):
        if isinstance(ctx, Empty):
            return ctx_empty(self.interpret_mode(ctx.mode))
        if isinstance(ctx, Bind):
            mode = self.ctx_mode(ctx.ctx)
            ty = self.interpret_ty(Modal(ctx.mu, ctx.ty), mode)
            return ctx_extend(self.interpret_ctx(ctx.ctx), ty)
        if isinstance(ctx, Lock):
            mode = self.ctx_mode(ctx.ctx)
            return self.interpret_modality(ctx.mu, mode).lock(self.interpret_ctx(ctx.ctx))
        raise TypeCheckError(f"not a context: {ctx!r}", "ctx")

    # -- variables -----------------------------------------------------------

    def lookup_var(self, name: str, cell: str, ctx: CtxExpr) -> InferInterpretResult:
        locks: ModalityExpr = UNIT
        cur = ctx
        while True:
            if isinstance(cur, Empty):
                raise TypeCheckError(f"variable {name!r} is not in scope", "Tm-Var")
            if isinstance(cur, Lock):
                locks = cur.mu if isinstance(locks, Unit) else Compose(cur.mu, locks)
                cur = cur.ctx
                continue
            if cur.name == name:
                break
            cur = cur.ctx
        binder = cur
        bmode = self.ctx_mode(binder.ctx)
        try:
            transport = self.mt.check_two_cell(cell, binder.mu, locks, bmode)
        except TypeCheckError as e:
            raise TypeCheckError(
                f"variable {name!r} bound under {render_modality(binder.mu)} is not accessible "
                f"behind locks {render_modality(locks)}: {e.message}",
                "Tm-Var",
            ) from None
        vmode = self.mt.dom_of(binder.mu, bmode)
        bctx = self.interpret_ctx(binder)
        k = bctx.size()
        dra = self.interpret_modality(binder.mu, bmode)
        elim = dra.mod_elim(bctx, var_top(bctx))
        move = transport.transport

        def at(x, env):
            return elim.at(x, move(bctx, x, env[:k]))

        sem_ty = self.interpret_ty(binder.ty, vmode)
        return InferInterpretResult(binder.ty, SemTm(self.interpret_ctx(ctx), sem_ty, at))

    # -- terms ---------------------------------------------------------------

    def infer_interpret(self, t: TmExpr, ctx: CtxExpr) -> InferInterpretResult:
        mode = self.ctx_mode(ctx)
        sctx = self.interpret_ctx(ctx)
        base = sctx.base

        if isinstance(t, Var):
            return self.lookup_var(t.name, t.cell, ctx)

        if isinstance(t, Ann):
            self._check_ty_in(t.ty, mode, t, "Tm-Ann")
            r = self.infer_interpret(t.tm, ctx)
            e = self._equiv_in(t.ty, r.type, mode, t, "Tm-Ann")
            return InferInterpretResult(t.ty, iso_transport(e, r.denotation))

        if isinstance(t, Lam):
            dom = self._check_ty_in(t.ty, mode, t, "Tm-Lam")
            r = self.infer_interpret(t.body, Bind(ctx, UNIT, t.name, t.ty))
            return InferInterpretResult(Arrow(t.ty, r.type), fun_lam(sctx, dom, r.denotation))

        if isinstance(t, App):
            f = self.infer_interpret(t.fn, ctx)
            if not isinstance(f.type, Arrow):
                raise TypeCheckError(
                    f"{self.show_tm(t.fn)} has type {render_ty(f.type)}, which is not a function type",
                    "Tm-App",
                )
            a = self.infer_interpret(t.arg, ctx)
            e = self._equiv_in(f.type.dom, a.type, mode, t, "Tm-App")
            return InferInterpretResult(f.type.cod, fun_app(f.denotation, iso_transport(e, a.denotation)))

        if isinstance(t, Lit):
            if not isinstance(t.n, int) or isinstance(t.n, bool) or t.n < 0:
                raise TypeCheckError(f"literal {t.n!r} is not a natural number", "Tm-Lit")
            v = NatV(t.n)
            return InferInterpretResult(Nat, SemTm(sctx, self.interpret_ty(Nat, mode), lambda x, env: v))

        if isinstance(t, Suc):
            fn = lambda a: eval_builtin("suc", a)
            ty = Arrow(Nat, Nat)
            return InferInterpretResult(ty, SemTm(sctx, self.interpret_ty(ty, mode), lambda x, env: curried(base, x, 1, fn)))

        if isinstance(t, Plus):
            fn = lambda a, b: eval_builtin("plus", a, b)
            ty = Arrow(Nat, Arrow(Nat, Nat))
            return InferInterpretResult(ty, SemTm(sctx, self.interpret_ty(ty, mode), lambda x, env: curried(base, x, 2, fn)))

        if isinstance(t, (TrueTm, FalseTm)):
            v = BoolV(isinstance(t, TrueTm))
            return InferInterpretResult(Bool, SemTm(sctx, self.interpret_ty(Bool, mode), lambda x, env: v))

        if isinstance(t, If):
            c = self.infer_interpret(t.cond, ctx)
            self._equiv_in(Bool, c.type, mode, t, "Tm-If")
            a = self.infer_interpret(t.then, ctx)
            b = self.infer_interpret(t.orelse, ctx)
            e = self._equiv_in(a.type, b.type, mode, t, "Tm-If")
            dc, da, db = c.denotation, a.denotation, iso_transport(e, b.denotation)

            def at_if(x, env):
                cond = expect(dc.at(x, env), BoolV, "if").b
                return da.at(x, env) if cond else db.at(x, env)

            return InferInterpretResult(a.type, SemTm(sctx, da.ty, at_if))

        if isinstance(t, NatElim):
            return self._nat_elim(t, ctx, sctx, mode)

        if isinstance(t, Pair):
            a = self.infer_interpret(t.fst, ctx)
            b = self.infer_interpret(t.snd, ctx)
            return InferInterpretResult(Prod(a.type, b.type), pair_tm(a.denotation, b.denotation))

        if isinstance(t, (Fst, Snd)):
            rule = "Tm-Fst" if isinstance(t, Fst) else "Tm-Snd"
            p = self.infer_interpret(t.tm, ctx)
            if not isinstance(p.type, Prod):
                raise TypeCheckError(
                    f"{self.show_tm(t.tm)} has type {render_ty(p.type)}, which is not a product", rule
                )
            if isinstance(t, Fst):
                return InferInterpretResult(p.type.fst, fst_tm(p.denotation))
            return InferInterpretResult(p.type.snd, snd_tm(p.denotation))

        if isinstance(t, ModIntro):
            self._dom_in(t.mu, mode, t, "Tm-ModIntro")
            r = self.infer_interpret(t.tm, Lock(ctx, t.mu))
            dra = self.interpret_modality(t.mu, mode)
            return InferInterpretResult(Modal(t.mu, r.type), dra.mod_intro(sctx, r.denotation))

        if isinstance(t, ModElim):
            return self._mod_elim(t, ctx, mode)

        if isinstance(t, TmExt):
            ext = self.tm_exts.get(t.code)
            if ext is None:
                raise TypeCheckError(f"unknown term extension {t.code!r}", "Tm-Ext")
            return ext.infer(self, t, ctx)

        raise TypeCheckError(f"not a term: {t!r}", "term")

    def _check_ty_in(self, ty, mode, t, rule) -> SemTy:
        try:
            return self.interpret_ty(ty, mode)
        except TypeCheckError as e:
            raise TypeCheckError(f"ill-formed type in {self.show_tm(t)}: {e.message}", rule) from None

    def _equiv_in(self, expected, actual, mode, t, rule) -> SemTyIso:
        try:
            return self.ty_equiv(expected, actual, mode)
        except TypeCheckError as e:
            raise TypeCheckError(
                f"in {self.show_tm(t)}: expected {render_ty(expected)}, got {render_ty(actual)} ({e.message})",
                rule,
            ) from None

    def _dom_in(self, mu, mode, t, rule) -> str:
        try:
            return self.mt.dom_of(mu, mode)
        except TypeCheckError as e:
            raise TypeCheckError(f"in {self.show_tm(t)}: {e.message}", rule) from None

    def _nat_elim(self, t: NatElim, ctx, sctx, mode) -> InferInterpretResult:
        z = self.infer_interpret(t.zero, ctx)
        s = self.infer_interpret(t.step, ctx)
        if not isinstance(s.type, Arrow):
            raise TypeCheckError(
                f"step {self.show_tm(t.step)} has type {render_ty(s.type)}, expected a function",
                "Tm-NatElim",
            )
        into = self._equiv_in(s.type.dom, z.type, mode, t, "Tm-NatElim")
        out = self._equiv_in(z.type, s.type.cod, mode, t, "Tm-NatElim")
        base = sctx.base
        dz, ds = z.denotation, s.denotation
        into_back, out_back = into.backward, out.backward

        def at(x, env):
            def fn(y, rho, n):
                env_y = sctx.restrict(rho, env)
                acc = dz.at(y, env_y)
                step = expect(ds.at(y, env_y), FunV, "nat-elim")
                idy = base.hom_id(y)
                for _ in range(expect(n, NatV, "nat-elim").n):
                    acc = out_back(y, step.apply(y, idy, into_back(y, acc)))
                return acc

            return FunV(x, fn)

        ty = Arrow(Nat, z.type)
        return InferInterpretResult(ty, SemTm(sctx, self.interpret_ty(ty, mode), at))

    def _mod_elim(self, t: ModElim, ctx, mode) -> InferInterpretResult:
        try:
            self.mt.modalities_equivalent(t.outer, UNIT)
        except TypeCheckError:
            raise TypeCheckError(
                f"let<{render_modality(t.outer)}> mod<...> is not supported; only a trivial outer "
                "modality is accepted",
                "Tm-ModElim",
            ) from None
        dom = self._dom_in(t.mu, mode, t, "Tm-ModElim")
        r = self.infer_interpret(t.tm, ctx)
        if not isinstance(r.type, Modal):
            raise TypeCheckError(
                f"{self.show_tm(t.tm)} has type {render_ty(r.type)}, which is not a modal type",
                "Tm-ModElim",
            )
        rho = r.type.mu
        try:
            self.mt.modes_equal(self.mt.dom_of(rho, mode), dom)
            miso = self.mt.modalities_equivalent(t.mu, rho, mode)
        except TypeCheckError as e:
            raise TypeCheckError(
                f"cannot eliminate {self.show_tm(t.tm)} : {render_ty(r.type)} "
                f"with mod<{render_modality(t.mu)}>: {e.message}",
                "Tm-ModElim",
            ) from None
        inner = self.interpret_ty(r.type.ty, dom)
        scrut = iso_transport(miso.closed_iso(inner), r.denotation)
        body = self.infer_interpret(t.body, Bind(ctx, t.mu, t.name, r.type.ty))
        return InferInterpretResult(body.type, subst_top(body.denotation, scrut))

    # -- entry points --------------------------------------------------------

    def infer(self, t: TmExpr, ctx: CtxExpr | None = None) -> InferInterpretResult:
        return self.infer_interpret(t, ctx if ctx is not None else Empty(self.default_mode))

    def infer_type(self, t: TmExpr, ctx: CtxExpr | None = None) -> TyExpr:
        return self.infer(t, ctx).type

    def try_infer(self, t: TmExpr, ctx: CtxExpr | None = None) -> TCM:
        return run_tcm(lambda: self.infer(t, ctx))

    def tm_in(self, t: TmExpr, ctx: CtxExpr | None = None):
        """The denotation of ``t``, or ``None`` when it does not check."""
        res = self.try_infer(t, ctx)
        return res.value.denotation if res.is_ok else None
