"""Extraction: closed mode-★ denotations to host values and back."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Callable

from .errors import TypeCheckError
from .presheaf import STAR, TT, BoolV, EmptyCtx, FamV, FunV, NatV, PairV, SemTm, SemTy, VecV, expect
from .syntax import Arrow, BoolTy, Modal, NatTy, Prod, TyExpr, TyExt, render_ty
from .mode_theory import Atom


@dataclass(frozen=True)
class HostStream:
    """An infinite stream given by its elements."""

    element: Callable[[int], Any]

    def at(self, index: int):
        if index < 0:
            raise IndexError("stream index must be non-negative")
        return self.element(index)

    def take(self, k: int) -> list:
        return [self.at(i) for i in range(k)]


@dataclass(frozen=True)
class Extractable:
    ty: TyExpr
    sem_ty: SemTy
    translated_type: str
    to_host: Callable
    from_host: Callable

    def extract(self, tm: SemTm):
        """Host value of a term in the empty ★-context."""
        return self.to_host(tm.at(TT, ()))

    def embed(self, value) -> SemTm:
        cell = self.from_host(value)
        return SemTm(EmptyCtx(STAR), self.sem_ty, lambda x, env: cell)


def extract(ex: Extractable, tm: SemTm):
    return ex.extract(tm)


def embed(ex: Extractable, value) -> SemTm:
    return ex.embed(value)


def extractable_for(checker, ty: TyExpr) -> Extractable:
    """The structural extraction instance for a ★-type, or a type error."""
    try:
        sem = checker.interpret_ty(ty, "star")
    except TypeCheckError as e:
        raise TypeCheckError(f"{render_ty(ty)} is not a type at mode star: {e.message}", "extract") from None
    if isinstance(ty, NatTy):
        return Extractable(ty, sem, "int", lambda v: expect(v, NatV, "extract").n, NatV)
    if isinstance(ty, BoolTy):
        return Extractable(ty, sem, "bool", lambda v: expect(v, BoolV, "extract").b, BoolV)
    if isinstance(ty, Prod):
        a = extractable_for(checker, ty.fst)
        b = extractable_for(checker, ty.snd)
        return Extractable(
            ty,
            sem,
            f"tuple[{a.translated_type}, {b.translated_type}]",
            lambda v: (a.to_host(v.fst), b.to_host(v.snd)),
            lambda h: PairV(a.from_host(h[0]), b.from_host(h[1])),
        )
    if isinstance(ty, Arrow):
        a = extractable_for(checker, ty.dom)
        b = extractable_for(checker, ty.cod)
        idtt = (TT, TT)

        def to_host(v):
            F = expect(v, FunV, "extract")
            return lambda h: b.to_host(F.apply(TT, idtt, a.from_host(h)))

        def from_host(h):
            return FunV(TT, lambda y, rho, v: b.from_host(h(a.to_host(v))))

        return Extractable(ty, sem, f"Callable[[{a.translated_type}], {b.translated_type}]", to_host, from_host)
    for hook in checker.extractables:
        found = hook(checker, ty)
        if found is not None:
            return found
    raise TypeCheckError(f"no extraction instance for {render_ty(ty)}", "extract")


def stream_extractable(checker, ty: TyExpr):
    """⟨forever ∣ GStream A⟩ becomes a host stream of A's translation."""
    if not (
        isinstance(ty, Modal)
        and ty.mu == Atom("forever")
        and isinstance(ty.ty, TyExt)
        and ty.ty.code == "GStream"
    ):
        return None
    elem = extractable_for(checker, ty.ty.args[0])
    sem = checker.interpret_ty(ty, "star")

    def to_host(v):
        fam = expect(v, FamV, "stream extraction")
        # element k first appears as the last entry of the stage-k vector
        return HostStream(lambda k: elem.to_host(expect(fam.at(k), VecV, "stream").items[k]))

    def from_host(h: HostStream):
        return FamV(lambda n: VecV(tuple(elem.from_host(h.at(i)) for i in range(n + 1))))

    return Extractable(ty, sem, f"Stream[{elem.translated_type}]", to_host, from_host)
