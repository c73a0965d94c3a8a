"""Random well-typed terms for the guarded mode theory.

Terms are built top-down from a goal type, tracking which variables are
accessible through the locks crossed so far. The generator aims at
well-typed output; callers still run the checker and keep what it accepts.
"""

from __future__ import annotations

import random
from dataclasses import dataclass

from .guarded import GStream, constantly, forever, g_cons, g_head, g_map, g_tail, later, loeb
from .mode_theory import flatten, from_atoms
from .syntax import (
    App,
    Arrow,
    Bool,
    FalseTm,
    Fst,
    If,
    Lam,
    Lit,
    Modal,
    ModElim,
    ModIntro,
    Nat,
    NatElim,
    Pair,
    Plus,
    Prod,
    Snd,
    Suc,
    TrueTm,
    Var,
    app_modal,
    apps,
    svar,
)

OMEGA_TYPES = [
    Nat,
    Bool,
    Arrow(Nat, Nat),
    Prod(Nat, Bool),
    GStream(Nat),
    Modal(later, Nat),
    Modal(constantly, Nat),
    Modal(later, GStream(Nat)),
]
STAR_TYPES = [Nat, Bool, Arrow(Nat, Nat), Prod(Bool, Nat), Modal(forever, GStream(Nat))]


@dataclass(frozen=True)
class Entry:
    name: str
    ty: object
    mu: tuple  # binder modality as atom names
    locks: tuple  # atoms of locks crossed since the binder, outermost first


class TermFuzzer:
    def __init__(self, checker, rng: random.Random, max_depth: int = 4):
        self.mt = checker.mt
        self.rng = rng
        self.max_depth = max_depth
        self.fresh = 0

    def _name(self) -> str:
        self.fresh += 1
        return f"v{self.fresh}"

    # -- scope bookkeeping ---------------------------------------------------

    def _bind(self, scope, name, ty, mu=()):
        return [e for e in scope if e.name != name] + [Entry(name, ty, mu, ())]

    def _lock(self, scope, atom: str):
        return [Entry(e.name, e.ty, e.mu, e.locks + (atom,)) for e in scope]

    def _usable(self, scope, ty):
        out = []
        for e in scope:
            if e.ty != ty:
                continue
            nf_mu = self.mt.normalize(from_atoms(e.mu))
            nf_locks = self.mt.normalize(from_atoms(e.locks))
            if nf_mu == nf_locks:
                out.append(svar(e.name))
            elif nf_mu == () and nf_locks == ("later",):
                out.append(Var(e.name, "1-to-later"))
        return out

    # -- generation ----------------------------------------------------------

    def types(self, mode):
        return OMEGA_TYPES if mode == "omega" else STAR_TYPES

    def term(self, ty, mode: str, scope=None, depth: int = 0):
        scope = scope or []
        rng = self.rng
        vars_ = self._usable(scope, ty)
        if vars_ and rng.random() < 0.35:
            return rng.choice(vars_)
        if depth >= self.max_depth:
            return self._leaf(ty, mode, scope, depth)
        r = rng.random()
        if r < 0.12:
            return self._elim_app(ty, mode, scope, depth)
        if r < 0.20:
            return self._elim_modal(ty, mode, scope, depth)
        if r < 0.26:
            return self._elim_pair(ty, mode, scope, depth)
        if r < 0.31 and mode == "omega":
            name = self._name()
            return loeb(name, ty, self.term(ty, mode, self._bind(scope, name, ty, ("later",)), depth + 1))
        return self._intro(ty, mode, scope, depth)

    def _leaf(self, ty, mode, scope, depth):
        vars_ = self._usable(scope, ty)
        if vars_:
            return self.rng.choice(vars_)
        if ty == GStream(Nat):
            # constant stream; the recursive occurrence sits under one later lock
            name = self._name()
            head = ModIntro(constantly, Lit(self.rng.randrange(0, 5)))
            return loeb(name, ty, app_modal(App(g_cons(Nat), head), later, svar(name)))
        return self._intro(ty, mode, scope, depth)

    def _intro(self, ty, mode, scope, depth):
        rng = self.rng
        d = depth + 1
        if ty == Nat:
            k = rng.random()
            if k < 0.4 or depth >= self.max_depth + 2:
                return Lit(rng.randrange(0, 5))
            if k < 0.6:
                return App(Suc(), self.term(Nat, mode, scope, d))
            if k < 0.75:
                return apps(Plus(), self.term(Nat, mode, scope, d), self.term(Nat, mode, scope, d))
            if k < 0.87:
                return If(self.term(Bool, mode, scope, d), self.term(Nat, mode, scope, d), self.term(Nat, mode, scope, d))
            step = self.term(Arrow(Nat, Nat), mode, scope, d)
            return App(NatElim(self.term(Nat, mode, scope, d), step), Lit(rng.randrange(0, 4)))
        if ty == Bool:
            if rng.random() < 0.7 or depth >= self.max_depth + 2:
                return TrueTm() if rng.random() < 0.5 else FalseTm()
            return If(self.term(Bool, mode, scope, d), self.term(Bool, mode, scope, d), self.term(Bool, mode, scope, d))
        if isinstance(ty, Arrow):
            name = self._name()
            return Lam(name, ty.dom, self.term(ty.cod, mode, self._bind(scope, name, ty.dom), d))
        if isinstance(ty, Prod):
            return Pair(self.term(ty.fst, mode, scope, d), self.term(ty.snd, mode, scope, d))
        if isinstance(ty, Modal):
            (atom,) = flatten(ty.mu)
            inner_mode = self.mt.dom_of(ty.mu, mode)
            return ModIntro(ty.mu, self.term(ty.ty, inner_mode, self._lock(scope, atom), d))
        if ty == GStream(Nat):
            if rng.random() < 0.3 and depth < self.max_depth:
                f = self.term(Arrow(Nat, Nat), "star", self._lock(scope, "constantly"), d)
                return apps(app_modal(g_map(Nat, Nat), constantly, f), self.term(ty, mode, scope, d))
            head = self.term(Nat, "star", self._lock(scope, "constantly"), d)
            tail = self.term(ty, mode, self._lock(scope, "later"), d)
            return app_modal(app_modal(g_cons(Nat), constantly, head), later, tail)
        raise ValueError(f"no introduction template for {ty!r}")

    def _elim_app(self, ty, mode, scope, depth):
        dom = self.rng.choice([Nat, Bool])
        return App(self.term(Arrow(dom, ty), mode, scope, depth + 1), self.term(dom, mode, scope, depth + 1))

    def _elim_pair(self, ty, mode, scope, depth):
        other = self.rng.choice([Nat, Bool])
        if self.rng.random() < 0.5:
            return Fst(self.term(Prod(ty, other), mode, scope, depth + 1))
        return Snd(self.term(Prod(other, ty), mode, scope, depth + 1))

    def _elim_modal(self, ty, mode, scope, depth):
        rng = self.rng
        d = depth + 1
        if mode == "omega":
            if rng.random() < 0.3:
                # project out of a stream
                s = self.term(GStream(Nat), mode, scope, d)
                name = self._name()
                if rng.random() < 0.5:
                    body_scope = self._bind(scope, name, Nat, ("constantly",))
                    return ModElim(constantly, name, App(g_head(Nat), s), self.term(ty, mode, body_scope, d))
                body_scope = self._bind(scope, name, GStream(Nat), ("later",))
                return ModElim(later, name, App(g_tail(Nat), s), self.term(ty, mode, body_scope, d))
            mu, inner_ty = rng.choice([(later, Nat), (later, GStream(Nat)), (constantly, Nat), (constantly, Bool)])
        else:
            mu, inner_ty = forever, GStream(Nat)
        name = self._name()
        scrut = self.term(Modal(mu, inner_ty), mode, scope, d)
        body_scope = self._bind(scope, name, inner_ty, flatten(mu))
        return ModElim(mu, name, scrut, self.term(ty, mode, body_scope, d))


def fuzz_terms(checker, count: int, seed: int = 0, max_depth: int = 4):
    """``count`` (term, mode, result) triples accepted by the checker."""
    from .syntax import Empty

    rng = random.Random(seed)
    out = []
    attempts = 0
    while len(out) < count:
        attempts += 1
        if attempts > 50 * count:
            raise RuntimeError("fuzzer acceptance rate collapsed")
        fz = TermFuzzer(checker, rng, max_depth)
        mode = "omega" if rng.random() < 0.7 else "star"
        ty = rng.choice(fz.types(mode))
        t = fz.term(ty, mode)
        res = checker.try_infer(t, Empty(mode))
        if res.is_ok:
            out.append((t, mode, res.value))
    return out


def exercise(checker, result, mode: str, rng: random.Random, stages: int = 5) -> None:
    """Evaluate a closed denotation at every object and probe its value."""
    sem_ty = checker.interpret_ty(result.type, mode)
    objects = range(stages + 1) if mode == "omega" else checker.interpret_mode(mode).objects()
    for x in objects:
        v = result.denotation.at(x, ())
        if not sem_ty.member(x, v):
            from .errors import EvaluationPanic

            raise EvaluationPanic(f"value {v!r} at {x!r} is not in {sem_ty!r}")
        sem_ty.force(x, v, rng, stages)


