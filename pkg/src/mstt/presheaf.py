"""Executable presheaf semantics.

Base categories are thin (every shipped one is a preorder), so a morphism
is just a validated ``(source, target)`` pair. Semantic contexts hold
environments as flat tuples of values, rightmost slot = most recent
binder. Locks add no slots; they only change which object of the parent
context an environment lives at.

All MSTT types are closed, so a semantic type's cells never depend on the
environment. ``SemTy`` methods therefore take only the object; the
environment is threaded by terms, never inspected by types.
"""

from __future__ import annotations

import functools
import random
from dataclasses import dataclass, field
from typing import Any, Callable, Iterable

from .errors import EvaluationPanic

Hom = tuple  # (source, target)


# ---------------------------------------------------------------------------
# Base categories


class BaseCategory:
    """A small thin category. Subclasses define objects and the order."""

    name = "?"

    def is_object(self, x) -> bool:
        raise NotImplementedError

    def leq(self, x, y) -> bool:
        """Whether a morphism x -> y exists."""
        raise NotImplementedError

    def objects(self, limit: int = 5) -> list:
        """Objects used for probing; all of them when the category is finite."""
        raise NotImplementedError

    def hom(self, x, y) -> Hom:
        if not (self.is_object(x) and self.is_object(y) and self.leq(x, y)):
            raise EvaluationPanic(f"no morphism {x!r} -> {y!r} in {self.name}")
        return (x, y)

    def hom_check(self, f, x, y) -> bool:
        return f == (x, y) and self.is_object(x) and self.is_object(y) and self.leq(x, y)

    def hom_id(self, x) -> Hom:
        return self.hom(x, x)

    def compose(self, g: Hom, f: Hom) -> Hom:
        """g after f, for f : x -> y and g : y -> z."""
        if f[1] != g[0]:
            raise EvaluationPanic(f"cannot compose {g!r} after {f!r}")
        return self.hom(f[0], g[1])

    def sources(self, x, limit: int = 5) -> list:
        return [y for y in self.objects(max(limit, self._rank(x))) if self.leq(y, x)]

    def homs(self, limit: int = 5) -> list:
        obs = self.objects(limit)
        return [(x, y) for x in obs for y in obs if self.leq(x, y)]

    def _rank(self, x) -> int:
        return 0

    def __repr__(self) -> str:
        return self.name


class StarCategory(BaseCategory):
    """One object, one morphism."""

    name = "★"

    def is_object(self, x) -> bool:
        return x == TT

    def leq(self, x, y) -> bool:
        return True

    def objects(self, limit: int = 5) -> list:
        return [TT]


TT = "tt"
STAR = StarCategory()


# ---------------------------------------------------------------------------
# Values


@dataclass(frozen=True)
class NatV:
    n: int


@dataclass(frozen=True)
class BoolV:
    b: bool


@dataclass(frozen=True)
class UnitV:
    pass


UNIT = UnitV()


@dataclass(frozen=True)
class PairV:
    fst: Any
    snd: Any


@dataclass(frozen=True, eq=False)
class FunV:
    """A presheaf function cell at ``obj``.

    ``fn(y, rho, v)`` accepts any morphism ``rho : y -> obj`` and an input at y.
    """

    obj: Any
    fn: Callable

    def apply(self, y, rho, v):
        if rho[1] != self.obj or rho[0] != y:
            raise EvaluationPanic(f"function at {self.obj!r} applied along {rho!r}")
        return self.fn(y, rho, v)


@dataclass(frozen=True)
class VecV:
    items: tuple


@dataclass(frozen=True, eq=False)
class FamV:
    """A stage-indexed compatible family; element lookups are cached."""

    fn: Callable

    def __post_init__(self):
        object.__setattr__(self, "_at", functools.lru_cache(maxsize=None)(self.fn))

    def at(self, n: int):
        return self._at(n)


@dataclass(frozen=True)
class RelV:
    left: Any
    right: Any


@dataclass(frozen=True)
class HostV:
    payload: Any
    tag: str


def expect(v, cls, where: str):
    if not isinstance(v, cls):
        raise EvaluationPanic(f"{where}: expected {cls.__name__}, got {v!r}")
    return v


def render_value(v) -> str:
    if isinstance(v, NatV):
        return str(v.n)
    if isinstance(v, BoolV):
        return "true" if v.b else "false"
    if isinstance(v, UnitV):
        return "tt"
    if isinstance(v, PairV):
        return f"({render_value(v.fst)}, {render_value(v.snd)})"
    if isinstance(v, VecV):
        return "[" + ",".join(render_value(x) for x in v.items) + "]"
    if isinstance(v, FunV):
        return f"<function at {v.obj}>"
    if isinstance(v, FamV):
        return "<family>"
    if isinstance(v, RelV):
        return f"{render_value(v.left)} ~ {render_value(v.right)}"
    if isinstance(v, HostV):
        return render_host(v.payload)
    raise EvaluationPanic(f"not a semantic value: {v!r}")


def render_host(h) -> str:
    if isinstance(h, bool):
        return "true" if h else "false"
    if isinstance(h, tuple):
        return "(" + ",".join(render_host(x) for x in h) + ")"
    return str(h)


# ---------------------------------------------------------------------------
# Semantic types


class SemTy:
    """A closed presheaf over ``base``.

    ``member`` is a checking oracle, not an enumeration: omega has infinitely
    many objects, and only pointwise queries are ever needed.
    """

    base: BaseCategory

    def member(self, x, v) -> bool:
        raise NotImplementedError

    def restrict(self, f: Hom, v):
        raise NotImplementedError

    def sample(self, x, rng: random.Random):
        raise NotImplementedError

    def probe_equal(self, x, v, w, rng: random.Random) -> bool:
        return v == w

    def force(self, x, v, rng: random.Random, limit: int = 5) -> None:
        """Evaluate every lazy part of ``v`` reachable by probing."""

    def __call__(self, ctx: "SemCtx") -> "SemTy":
        # ClosedTy: the same presheaf lives in every context.
        return self


class DiscreteTy(SemTy):
    def __init__(self, base: BaseCategory, kind: str):
        self.base = base
        self.kind = kind
        self._cls = NatV if kind == "Nat" else BoolV

    def member(self, x, v) -> bool:
        return self.base.is_object(x) and isinstance(v, self._cls)

    def restrict(self, f, v):
        return expect(v, self._cls, self.kind)

    def sample(self, x, rng):
        if self.kind == "Nat":
            return NatV(rng.randrange(0, 7))
        return BoolV(rng.random() < 0.5)

    def __repr__(self):
        return self.kind


def discrete_ty(base: BaseCategory, kind: str) -> DiscreteTy:
    if kind not in ("Nat", "Bool"):
        raise ValueError(f"unknown discrete type {kind}")
    return DiscreteTy(base, kind)


class FunTy(SemTy):
    """Presheaf exponential: a cell at x answers at every y with y -> x."""

    def __init__(self, dom: SemTy, cod: SemTy):
        if dom.base is not cod.base:
            raise ValueError("function type over mismatched base categories")
        self.base = dom.base
        self.dom = dom
        self.cod = cod

    def member(self, x, v) -> bool:
        return isinstance(v, FunV) and v.obj == x

    def restrict(self, f, v):
        F = expect(v, FunV, "function restriction")
        if f[1] != F.obj:
            raise EvaluationPanic(f"restricting function at {F.obj!r} along {f!r}")
        base = self.base
        return FunV(f[0], lambda y, rho, a: F.apply(y, base.compose(f, rho), a))

    def sample(self, x, rng):
        out = self.cod.sample(x, rng)
        cod, base = self.cod, self.base
        if isinstance(self.dom, DiscreteTy) and isinstance(cod, DiscreteTy) and self.dom.kind == cod.kind == "Nat":
            k = rng.randrange(0, 3)
            return FunV(x, lambda y, rho, a: NatV(expect(a, NatV, "sample").n + k))
        return FunV(x, lambda y, rho, a: cod.restrict(base.hom(y, x), out))

    def probe_equal(self, x, v, w, rng):
        for y in self.base.sources(x):
            rho = self.base.hom(y, x)
            a = self.dom.sample(y, rng)
            if not self.cod.probe_equal(y, v.apply(y, rho, a), w.apply(y, rho, a), rng):
                return False
        return True

    def force(self, x, v, rng, limit=5):
        expect(v, FunV, "force")
        for y in self.base.sources(x, limit):
            out = v.apply(y, self.base.hom(y, x), self.dom.sample(y, rng))
            if not self.cod.member(y, out):
                raise EvaluationPanic(f"function output {out!r} not in {self.cod!r} at {y!r}")
            self.cod.force(y, out, rng, limit)

    def __repr__(self):
        return f"({self.dom!r} ⇛ {self.cod!r})"


def fun_ty(dom: SemTy, cod: SemTy) -> FunTy:
    return FunTy(dom, cod)


class ProdTy(SemTy):
    def __init__(self, a: SemTy, b: SemTy):
        if a.base is not b.base:
            raise ValueError("product over mismatched base categories")
        self.base = a.base
        self.a = a
        self.b = b

    def member(self, x, v) -> bool:
        return isinstance(v, PairV) and self.a.member(x, v.fst) and self.b.member(x, v.snd)

    def restrict(self, f, v):
        p = expect(v, PairV, "pair restriction")
        return PairV(self.a.restrict(f, p.fst), self.b.restrict(f, p.snd))

    def sample(self, x, rng):
        return PairV(self.a.sample(x, rng), self.b.sample(x, rng))

    def probe_equal(self, x, v, w, rng):
        return self.a.probe_equal(x, v.fst, w.fst, rng) and self.b.probe_equal(x, v.snd, w.snd, rng)

    def force(self, x, v, rng, limit=5):
        self.a.force(x, v.fst, rng, limit)
        self.b.force(x, v.snd, rng, limit)

    def __repr__(self):
        return f"({self.a!r} ⊠ {self.b!r})"


def prod_ty(a: SemTy, b: SemTy) -> ProdTy:
    return ProdTy(a, b)


# ---------------------------------------------------------------------------
# Semantic contexts


class SemCtx:
    base: BaseCategory

    def restrict(self, f: Hom, env: tuple) -> tuple:
        raise NotImplementedError

    def has_cell(self, x) -> bool:
        return self.base.is_object(x)

    def member(self, x, env: tuple) -> bool:
        raise NotImplementedError

    def sample(self, x, rng: random.Random) -> tuple:
        raise NotImplementedError

    def size(self) -> int:
        raise NotImplementedError


class EmptyCtx(SemCtx):
    def __init__(self, base: BaseCategory):
        self.base = base

    def restrict(self, f, env):
        return ()

    def member(self, x, env):
        return env == ()

    def sample(self, x, rng):
        return ()

    def size(self):
        return 0

    def __repr__(self):
        return "◇"


def ctx_empty(base: BaseCategory) -> EmptyCtx:
    return EmptyCtx(base)


class ExtCtx(SemCtx):
    def __init__(self, parent: SemCtx, ty: SemTy):
        if parent.base is not ty.base:
            raise ValueError("context extension over mismatched base categories")
        self.base = parent.base
        self.parent = parent
        self.ty = ty

    def restrict(self, f, env):
        return self.parent.restrict(f, env[:-1]) + (self.ty.restrict(f, env[-1]),)

    def member(self, x, env):
        return len(env) == self.size() and self.parent.member(x, env[:-1]) and self.ty.member(x, env[-1])

    def sample(self, x, rng):
        return self.parent.sample(x, rng) + (self.ty.sample(x, rng),)

    def size(self):
        return self.parent.size() + 1

    def __repr__(self):
        return f"{self.parent!r} ,, {self.ty!r}"


def ctx_extend(ctx: SemCtx, ty: SemTy) -> ExtCtx:
    return ExtCtx(ctx, ty)


class LockedCtx(SemCtx):
    """``lock`` of a DRA applied to a context over the DRA's codomain.

    The environment at x is the parent's environment at ``dra.lock_obj(x)``.
    """

    def __init__(self, parent: SemCtx, dra: "DRA"):
        if parent.base is not dra.cod:
            raise ValueError(f"lock of {dra.name} applied to context over {parent.base}")
        self.base = dra.dom
        self.parent = parent
        self.dra = dra

    def has_cell(self, x):
        return self.dra.lock_obj(x) is not None

    def restrict(self, f, env):
        return self.parent.restrict(self.dra.lock_hom(f), env)

    def member(self, x, env):
        y = self.dra.lock_obj(x)
        return y is not None and self.parent.member(y, env)

    def sample(self, x, rng):
        y = self.dra.lock_obj(x)
        if y is None:
            raise EvaluationPanic(f"lock {self.dra.name} has no cell at {x!r}")
        return self.parent.sample(y, rng)

    def size(self):
        return self.parent.size()

    def __repr__(self):
        return f"lock {self.dra.name} ({self.parent!r})"


# ---------------------------------------------------------------------------
# Semantic terms


class SemTm:
    """A term of ``ty`` in ``ctx``: a value for every object and environment."""

    __slots__ = ("ctx", "ty", "fn")

    def __init__(self, ctx: SemCtx, ty: SemTy, fn: Callable):
        self.ctx = ctx
        self.ty = ty
        self.fn = fn

    def at(self, x, env: tuple = ()):
        return self.fn(x, env)

    def __repr__(self):
        return f"SemTm({self.ty!r})"


def const_tm(ctx: SemCtx, ty: SemTy, value) -> SemTm:
    return SemTm(ctx, ty, lambda x, env: value)


def var_top(ctx: ExtCtx) -> SemTm:
    return SemTm(ctx, ctx.ty, lambda x, env: env[-1])


def fun_lam(ctx: SemCtx, dom: SemTy, body: SemTm) -> SemTm:
    """``body`` lives over ``ctx ,, dom``."""
    ty = FunTy(dom, body.ty)

    def at(x, env):
        def fn(y, rho, v):
            return body.at(y, ctx.restrict(rho, env) + (v,))

        return FunV(x, fn)

    return SemTm(ctx, ty, at)


def fun_app(f: SemTm, t: SemTm) -> SemTm:
    fty = f.ty
    if not isinstance(fty, FunTy):
        raise EvaluationPanic("application of a non-function term")
    base = fty.base

    def at(x, env):
        F = expect(f.at(x, env), FunV, "application")
        return F.apply(x, base.hom_id(x), t.at(x, env))

    return SemTm(f.ctx, fty.cod, at)


def pair_tm(a: SemTm, b: SemTm) -> SemTm:
    return SemTm(a.ctx, ProdTy(a.ty, b.ty), lambda x, env: PairV(a.at(x, env), b.at(x, env)))


def fst_tm(p: SemTm) -> SemTm:
    return SemTm(p.ctx, p.ty.a, lambda x, env: expect(p.at(x, env), PairV, "fst").fst)


def snd_tm(p: SemTm) -> SemTm:
    return SemTm(p.ctx, p.ty.b, lambda x, env: expect(p.at(x, env), PairV, "snd").snd)


def subst_top(body: SemTm, arg: SemTm) -> SemTm:
    """Instantiate the most recent slot of ``body``'s context with ``arg``."""
    return SemTm(arg.ctx, body.ty, lambda x, env: body.at(x, env + (arg.at(x, env),)))


# ---------------------------------------------------------------------------
# Builtins on discrete types


def eval_builtin(op: str, *args):
    """Pointwise meaning of the discrete-type primitives."""
    if op == "suc":
        (a,) = args
        return NatV(expect(a, NatV, "suc").n + 1)
    if op == "plus":
        a, b = args
        return NatV(expect(a, NatV, "plus").n + expect(b, NatV, "plus").n)
    if op == "if":
        c, t, e = args
        return t if expect(c, BoolV, "if").b else e
    if op == "nat-elim":
        z, step, n = args
        # step is a one-argument callable on values
        acc = z
        for _ in range(expect(n, NatV, "nat-elim").n):
            acc = step(acc)
        return acc
    raise EvaluationPanic(f"unknown builtin {op}")


def curried(base: BaseCategory, x, arity: int, fn: Callable) -> FunV:
    """A FunV cell at x for a pointwise function of ``arity`` discrete arguments.

    Discrete inputs are stable under restriction, so partial applications can
    simply capture the earlier arguments.
    """

    def build(obj, got):
        def step(y, rho, v):
            args = got + (v,)
            if len(args) == arity:
                return fn(*args)
            return build(y, args)

        return FunV(obj, step)

    return build(x, ())


# ---------------------------------------------------------------------------
# Type isomorphisms


@dataclass(frozen=True)
class SemTyIso:
    """``source ≅ target``; ``forward`` maps source cells to target cells."""

    source: SemTy
    target: SemTy
    forward: Callable  # (x, v) -> v
    backward: Callable

    def inverse(self) -> "SemTyIso":
        return SemTyIso(self.target, self.source, self.backward, self.forward)

    def then(self, other: "SemTyIso") -> "SemTyIso":
        f1, f2, b1, b2 = self.forward, other.forward, self.backward, other.backward
        return SemTyIso(
            self.source,
            other.target,
            lambda x, v: f2(x, f1(x, v)),
            lambda x, v: b1(x, b2(x, v)),
        )


def iso_id(ty: SemTy) -> SemTyIso:
    return SemTyIso(ty, ty, lambda x, v: v, lambda x, v: v)


def iso_transport(e: SemTyIso, t: SemTm) -> SemTm:
    """For ``e : T ≅ S`` and a term of S, the corresponding term of T."""
    back = e.backward
    return SemTm(t.ctx, e.source, lambda x, env: back(x, t.at(x, env)))


def iso_fun(dom: SemTyIso, cod: SemTyIso) -> SemTyIso:
    def fwd_with(d_back, c_fwd):
        def f(x, v):
            F = expect(v, FunV, "iso")
            return FunV(x, lambda y, rho, a: c_fwd(y, F.apply(y, rho, d_back(y, a))))

        return f

    return SemTyIso(
        FunTy(dom.source, cod.source),
        FunTy(dom.target, cod.target),
        fwd_with(dom.backward, cod.forward),
        fwd_with(dom.forward, cod.backward),
    )


def iso_prod(a: SemTyIso, b: SemTyIso) -> SemTyIso:
    return SemTyIso(
        ProdTy(a.source, b.source),
        ProdTy(a.target, b.target),
        lambda x, v: PairV(a.forward(x, v.fst), b.forward(x, v.snd)),
        lambda x, v: PairV(a.backward(x, v.fst), b.backward(x, v.snd)),
    )


# ---------------------------------------------------------------------------
# Dependent right adjoints


class DRA:
    """A dependent right adjoint from ``dom`` to ``cod``.

    Every shipped DRA has a lock given by an object map: the locked context
    at x is the original context at ``lock_obj(x)`` (``None`` = empty cell).
    ``mod`` acts on closed types; ``mod_map`` is its action on cellwise maps.
    """

    name = "?"
    dom: BaseCategory
    cod: BaseCategory

    def lock_obj(self, x):
        raise NotImplementedError

    def lock_hom(self, f: Hom) -> Hom:
        raise NotImplementedError

    def lock(self, ctx: SemCtx) -> SemCtx:
        return LockedCtx(ctx, self)

    def mod(self, ty: SemTy) -> SemTy:
        raise NotImplementedError

    def mod_intro(self, ctx: SemCtx, t: SemTm) -> SemTm:
        raise NotImplementedError

    def mod_elim(self, ctx: SemCtx, s: SemTm) -> SemTm:
        raise NotImplementedError

    def mod_map(self, x, f: Callable, v):
        raise NotImplementedError

    def atoms(self) -> tuple:
        return (self.name,)

    def __repr__(self):
        return self.name


class UnitDRA(DRA):
    def __init__(self, base: BaseCategory):
        self.dom = self.cod = base
        self.name = "𝟙"

    def lock_obj(self, x):
        return x

    def lock_hom(self, f):
        return f

    def lock(self, ctx):
        return ctx

    def mod(self, ty):
        return ty

    def mod_intro(self, ctx, t):
        return t

    def mod_elim(self, ctx, s):
        return s

    def mod_map(self, x, f, v):
        return f(x, v)

    def atoms(self):
        return ()


def dra_unit(base: BaseCategory) -> UnitDRA:
    return UnitDRA(base)


class ComposedDRA(DRA):
    """``outer ⓜ inner``: lock with ``outer`` first, then ``inner``."""

    def __init__(self, outer: DRA, inner: DRA):
        if outer.dom is not inner.cod:
            raise ValueError(f"cannot compose {outer.name} after {inner.name}: base mismatch")
        self.outer = outer
        self.inner = inner
        self.dom = inner.dom
        self.cod = outer.cod
        self.name = f"({outer.name} ⓜ {inner.name})"

    def lock_obj(self, x):
        y = self.inner.lock_obj(x)
        return None if y is None else self.outer.lock_obj(y)

    def lock_hom(self, f):
        return self.outer.lock_hom(self.inner.lock_hom(f))

    def lock(self, ctx):
        return self.inner.lock(self.outer.lock(ctx))

    def mod(self, ty):
        return self.outer.mod(self.inner.mod(ty))

    def mod_intro(self, ctx, t):
        return self.outer.mod_intro(ctx, self.inner.mod_intro(self.outer.lock(ctx), t))

    def mod_elim(self, ctx, s):
        return self.inner.mod_elim(self.outer.lock(ctx), self.outer.mod_elim(ctx, s))

    def mod_map(self, x, f, v):
        inner = self.inner
        return self.outer.mod_map(x, lambda y, w: inner.mod_map(y, f, w), v)

    def atoms(self):
        return self.outer.atoms() + self.inner.atoms()


def dra_compose(outer: DRA, inner: DRA) -> DRA:
    if isinstance(outer, UnitDRA) and outer.dom is inner.cod:
        return inner
    if isinstance(inner, UnitDRA) and inner.cod is outer.dom:
        return outer
    return ComposedDRA(outer, inner)


def dra_from_atoms(atoms: Iterable[DRA], base: BaseCategory) -> DRA:
    """Right-nested composite of a list of DRAs; the unit at ``base`` if empty."""
    atoms = list(atoms)
    if not atoms:
        return UnitDRA(base)
    out = atoms[-1]
    for d in reversed(atoms[:-1]):
        out = ComposedDRA(d, out)
    return out


def iso_mod(dra: DRA, e: SemTyIso) -> SemTyIso:
    """Functorial action of a DRA's type former on an isomorphism."""
    return SemTyIso(
        dra.mod(e.source),
        dra.mod(e.target),
        lambda x, v: dra.mod_map(x, e.forward, v),
        lambda x, v: dra.mod_map(x, e.backward, v),
    )


@dataclass(frozen=True)
class SemTwoCell:
    """Natural transformation between lock functors, from ``lock ρ`` to ``lock μ``.

    ``transport(ctx, x, env)`` takes an environment of ``lock ρ ctx`` at x to
    one of ``lock μ ctx`` at x.
    """

    transport: Callable
    label: str = "id-cell"


ID_TWO_CELL = SemTwoCell(lambda ctx, x, env: env)


@dataclass(frozen=True)
class ModalityIso:
    """Evidence that two modalities have isomorphic type formers.

    ``closed_iso(A)`` gives ``⟨μ | A⟩ ≅ ⟨ρ | A⟩``. Locks of equivalent
    modalities always send objects to the same place, so environments
    transport unchanged.
    """

    closed_iso: Callable[[SemTy], SemTyIso]
    lock_transport: SemTwoCell = field(default=ID_TWO_CELL)
