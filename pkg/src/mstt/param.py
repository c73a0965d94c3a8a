"""Parametricity: the walking cospan ⋀, forget modalities and FromRel types.

A presheaf over ⋀ is a left set, a right set and a set of related pairs
projecting onto both. ``FromRel`` builds such a type from two host
representations and a relation; functions between them come from host
functions that preserve the relations, which is checked whenever a related
pair is produced.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Any, Callable

from .errors import EvaluationPanic, TypeCheckError
from .extraction import Extractable
from .mode_theory import Atom, ModeTheory
from .presheaf import DRA, STAR, TT, BaseCategory, FunV, HostV, RelV, SemTm, SemTy, expect
from .syntax import Lam, Modal, ModIntro, TmExt, TyExpr, TyExt, apps, arrows, lam_modal, liftA2, svar
from .typechecker import Checker, InferInterpretResult, TmExtension, TyExtension, lift_macro

LEFT, RIGHT, RELATION = "left", "right", "relation"


class WedgeCategory(BaseCategory):
    """left → relation ← right"""

    name = "⋀"

    def is_object(self, x) -> bool:
        return x in (LEFT, RIGHT, RELATION)

    def leq(self, x, y) -> bool:
        return x == y or (y == RELATION and x in (LEFT, RIGHT))

    def objects(self, limit: int = 5) -> list:
        return [LEFT, RIGHT, RELATION]


WEDGE = WedgeCategory()


class RelationViolation(EvaluationPanic):
    """A related pair was requested for two values that are not related."""


# ---------------------------------------------------------------------------
# Relation-carrying types


@dataclass(frozen=True)
class RelCode:
    """Two host representations and the relation between them.

    ``left_values``/``right_values`` are small enumerations used for
    sampling and exhaustive checks.
    """

    name: str
    left_tag: str
    right_tag: str
    rel: Callable[[Any, Any], bool]
    left_values: tuple = ()
    right_values: tuple = ()

    def related_pairs(self) -> list:
        return [(a, b) for a in self.left_values for b in self.right_values if self.rel(a, b)]


def make_rel(code: RelCode, left, right) -> RelV:
    if not code.rel(left, right):
        raise RelationViolation(f"{code.name}: {left!r} and {right!r} are not related")
    return RelV(HostV(left, code.left_tag), HostV(right, code.right_tag))


class FromRelTy(SemTy):
    def __init__(self, code: RelCode):
        self.base = WEDGE
        self.code = code

    def member(self, x, v):
        c = self.code
        if x == LEFT:
            return isinstance(v, HostV) and v.tag == c.left_tag
        if x == RIGHT:
            return isinstance(v, HostV) and v.tag == c.right_tag
        return (
            isinstance(v, RelV)
            and self.member(LEFT, v.left)
            and self.member(RIGHT, v.right)
            and c.rel(v.left.payload, v.right.payload)
        )

    def restrict(self, f, v):
        src, tgt = f
        if src == tgt:
            return v
        pair = expect(v, RelV, self.code.name)
        return pair.left if src == LEFT else pair.right

    def sample(self, x, rng):
        c = self.code
        if x == LEFT:
            return HostV(rng.choice(c.left_values), c.left_tag)
        if x == RIGHT:
            return HostV(rng.choice(c.right_values), c.right_tag)
        a, b = rng.choice(c.related_pairs())
        return make_rel(c, a, b)

    def __repr__(self):
        return self.code.name


def from_rel_ty(code: RelCode) -> FromRelTy:
    return FromRelTy(code)


def _host_at(code: RelCode, x, left_fn, right_fn, args: list, check: Callable | None):
    """Apply the host functions to the cells ``args`` of their input types at x."""
    if x == LEFT:
        return HostV(left_fn(*(a.payload for a in args)), code.left_tag)
    if x == RIGHT:
        return HostV(right_fn(*(a.payload for a in args)), code.right_tag)
    lefts = [expect(a, RelV, "from-rel").left.payload for a in args]
    rights = [a.right.payload for a in args]
    out_l, out_r = left_fn(*lefts), right_fn(*rights)
    if check is not None and not check(*lefts, *rights):
        raise RelationViolation(f"preservation check failed on {lefts!r} ~ {rights!r}")
    try:
        return make_rel(code, out_l, out_r)
    except RelationViolation:
        raise RelationViolation(
            f"{code.name}: inputs {lefts!r} ~ {rights!r} map to unrelated {out_l!r}, {out_r!r}"
        ) from None


@dataclass(frozen=True)
class HostOp:
    """A host function pair usable by ``from-rel1``/``from-rel2``.

    ``codes`` lists the argument codes followed by the result code.
    ``preserves``, when given, is an extra predicate over the related inputs.
    """

    name: str
    codes: tuple
    left_fn: Callable
    right_fn: Callable
    preserves: Callable | None = None

    @property
    def arity(self) -> int:
        return len(self.codes) - 1


def from_rel1(a: RelCode, b: RelCode, f_left, f_right, preserves=None, name: str = "op") -> TmExt:
    return TmExt("from-rel1", data=HostOp(name, (a, b), f_left, f_right, preserves))


def from_rel2(a: RelCode, b: RelCode, c: RelCode, f_left, f_right, preserves=None, name: str = "op") -> TmExt:
    return TmExt("from-rel2", data=HostOp(name, (a, b, c), f_left, f_right, preserves))


def _require_wedge(checker, ctx, rule):
    mode = checker.ctx_mode(ctx)
    if mode != "wedge":
        raise TypeCheckError(f"only available at mode wedge, not {mode}", rule)


def _from_rel_infer(arity: int):
    rule = f"Tm-FromRel{arity}"

    def infer(checker: Checker, t: TmExt, ctx) -> InferInterpretResult:
        _require_wedge(checker, ctx, rule)
        op = t.data
        if not isinstance(op, HostOp) or op.arity != arity:
            raise TypeCheckError(f"from-rel{arity} needs a host operation of arity {arity}", rule)
        for code in op.codes:
            if checker.ty_exts.get(code.name) is None:
                raise TypeCheckError(f"relation type {code.name} is not registered", rule)
        ty = arrows(*(TyExt(c.name) for c in op.codes))
        sem = checker.interpret_ty(ty, "wedge")
        ins = [FromRelTy(c) for c in op.codes[:-1]]
        out = op.codes[-1]
        sctx = checker.interpret_ctx(ctx)

        def collect(x, got):
            # a function cell at x still waiting for the remaining arguments
            def step(y, rho, v):
                args = [ins[i].restrict((y, x), g) for i, g in enumerate(got)] + [v]
                if len(args) == arity:
                    return _host_at(out, y, op.left_fn, op.right_fn, args, op.preserves)
                return collect(y, args)

            return FunV(x, step)

        return InferInterpretResult(ty, SemTm(sctx, sem, lambda x, env: collect(x, [])))

    return infer


def _rel_lit_infer(checker: Checker, t: TmExt, ctx) -> InferInterpretResult:
    _require_wedge(checker, ctx, "Tm-RelLit")
    tycode, left, right = t.data
    code = REL_CODES.get(tycode)
    if code is None or tycode not in checker.ty_exts:
        raise TypeCheckError(f"unknown relation type {tycode!r}", "Tm-RelLit")
    if not code.rel(left, right):
        raise TypeCheckError(f"{left!r} and {right!r} are not related by {tycode}", "Tm-RelLit")
    cells = {LEFT: HostV(left, code.left_tag), RIGHT: HostV(right, code.right_tag), RELATION: make_rel(code, left, right)}
    ty = TyExt(tycode)
    return InferInterpretResult(ty, SemTm(checker.interpret_ctx(ctx), checker.interpret_ty(ty, "wedge"), lambda x, env: cells[x]))


# ---------------------------------------------------------------------------
# Forget modalities


class ForgetTy(SemTy):
    """⟨forget-right ∣ T⟩ keeps T's left set (and symmetrically)."""

    def __init__(self, ty: SemTy, side: str):
        self.base = STAR
        self.ty = ty
        self.side = side

    def member(self, x, v):
        return self.ty.member(self.side, v)

    def restrict(self, f, v):
        return self.ty.restrict((self.side, self.side), v)

    def sample(self, x, rng):
        return self.ty.sample(self.side, rng)

    def probe_equal(self, x, v, w, rng):
        return self.ty.probe_equal(self.side, v, w, rng)

    def force(self, x, v, rng, limit=5):
        self.ty.force(self.side, v, rng, limit)

    def __repr__(self):
        kept = "right" if self.side == LEFT else "left"
        return f"⟨forget-{kept} ∣ {self.ty!r}⟩"


class ForgetDRA(DRA):
    """From ⋀ to ★, keeping only ``side``.

    Its lock puts a ★-context at ``side`` and leaves the other two objects
    empty, so locked terms are only ever evaluated at ``side``.
    """

    dom = WEDGE
    cod = STAR

    def __init__(self, side: str):
        self.side = side
        self.name = "forget-right" if side == LEFT else "forget-left"

    def lock_obj(self, x):
        return TT if x == self.side else None

    def lock_hom(self, f):
        if f != (self.side, self.side):
            raise EvaluationPanic(f"lock of {self.name} has no cell along {f!r}")
        return (TT, TT)

    def mod(self, ty):
        return ForgetTy(ty, self.side)

    def mod_intro(self, ctx, t):
        side = self.side
        return SemTm(ctx, ForgetTy(t.ty, side), lambda x, env: t.at(side, env))

    def mod_elim(self, ctx, s):
        side = self.side

        def at(x, env):
            if x != side:
                raise EvaluationPanic(f"{self.name} eliminated at {x!r}")
            return s.at(TT, env)

        return SemTm(self.lock(ctx), s.ty.ty, at)

    def mod_map(self, x, f, v):
        return f(self.side, v)


FORGET_RIGHT = ForgetDRA(LEFT)
FORGET_LEFT = ForgetDRA(RIGHT)
forget_right = Atom("forget-right")
forget_left = Atom("forget-left")


def forget_right_dra() -> DRA:
    return FORGET_RIGHT


def forget_left_dra() -> DRA:
    return FORGET_LEFT


PARAM_MODE_THEORY = ModeTheory(
    name="param",
    modes={"star": STAR, "wedge": WEDGE},
    atoms={
        "forget-right": ("wedge", "star", FORGET_RIGHT),
        "forget-left": ("wedge", "star", FORGET_LEFT),
    },
)


# ---------------------------------------------------------------------------
# Integers as differences of naturals and as signed naturals


def diff_value(d) -> int:
    a, b = d
    return a - b


def sign_value(s) -> int:
    sign, n = s
    return n if sign == "pos" else -n


def int_related(d, s) -> bool:
    """``d ∼ s``: both denote the same integer."""
    return diff_value(d) == sign_value(s)


def add_diff(d, e):
    return (d[0] + e[0], d[1] + e[1])


def negate_diff(d):
    return (d[1], d[0])


def add_sign(s, t):
    (s1, n1), (s2, n2) = s, t
    if s1 == s2:
        return (s1, n1 + n2)
    if n1 >= n2:
        return (s1, n1 - n2)
    return (s2, n2 - n1)


def negate_sign(s):
    return ("neg" if s[0] == "pos" else "pos", s[1])


SMALL = 6
Z_CODE = RelCode(
    "Z",
    "DiffNat",
    "SignNat",
    int_related,
    tuple((a, b) for a in range(SMALL + 1) for b in range(SMALL + 1)),
    tuple((s, n) for s in ("pos", "neg") for n in range(SMALL + 1)),
)
REL_CODES = {"Z": Z_CODE}
Z = TyExt("Z")

Z_ADD = HostOp("add", (Z_CODE, Z_CODE, Z_CODE), add_diff, add_sign)
Z_NEGATE = HostOp("negate", (Z_CODE, Z_CODE), negate_diff, negate_sign)


@dataclass(frozen=True)
class IntStructure:
    ty: TyExpr
    add: Any
    negate: Any

    def check(self, checker: Checker, mode: str = "wedge") -> None:
        """The inferred types of ``add``/``negate`` must be A ⇛ A ⇛ A and A ⇛ A."""
        from .syntax import Empty

        for tm, want in ((self.add, arrows(self.ty, self.ty, self.ty)), (self.negate, arrows(self.ty, self.ty))):
            got = checker.infer_type(tm, Empty(mode))
            checker.ty_equiv(want, got, mode)


Z_INT = IntStructure(Z, TmExt("from-rel2", data=Z_ADD), TmExt("from-rel1", data=Z_NEGATE))


def subtract(s: IntStructure):
    return Lam("a", s.ty, Lam("b", s.ty, apps(s.add, svar("a"), apps(s.negate, svar("b")))))


subtract_z = subtract(Z_INT)

subtract_star_left = lam_modal(
    forget_right,
    "x",
    Z,
    lam_modal(forget_right, "y", Z, ModIntro(forget_right, apps(subtract_z, svar("x"), svar("y")))),
)

subtract_star_right = apps(liftA2(forget_left, Z, Z, Z), ModIntro(forget_left, subtract_z))


def integer_example():
    return Z, Z_INT, subtract_z, subtract_star_left, subtract_star_right


def rel_lit(tycode: str, left, right) -> TmExt:
    return TmExt("rel-lit", data=(tycode, left, right))


# ---------------------------------------------------------------------------
# Checker


def rel_extractable(checker, ty):
    """⟨forget-right ∣ R⟩ and ⟨forget-left ∣ R⟩ extract to R's host values."""
    if not (isinstance(ty, Modal) and isinstance(ty.ty, TyExt) and ty.ty.code in REL_CODES):
        return None
    if ty.mu not in (forget_right, forget_left):
        return None
    code = REL_CODES[ty.ty.code]
    tag = code.left_tag if ty.mu == forget_right else code.right_tag
    sem = checker.interpret_ty(ty, "star")
    return Extractable(ty, sem, tag, lambda v: expect(v, HostV, "extract").payload, lambda h: HostV(h, tag))


def make_checker() -> Checker:
    ty_exts = {
        name: TyExtension(name, (), "wedge", (lambda c=code: FromRelTy(c)), None)
        for name, code in REL_CODES.items()
    }
    tm_exts = {
        "from-rel1": TmExtension("from-rel1", _from_rel_infer(1), "op", {"negate": Z_NEGATE}),
        "from-rel2": TmExtension("from-rel2", _from_rel_infer(2), "op", {"add": Z_ADD}),
        "rel-lit": TmExtension("rel-lit", _rel_lit_infer, "literal", dict(REL_CODES)),
        "liftA2": lift_macro(2),
        "lift1": lift_macro(1),
        "liftA3": lift_macro(3),
    }
    return Checker(PARAM_MODE_THEORY, ty_exts, tm_exts, extractables=[rel_extractable], default_mode="wedge")


def related_inputs(code: RelCode = Z_CODE):
    """All pairs of ∼-related inputs drawn from the code's small enumerations."""
    pairs = code.related_pairs()
    return list(itertools.product(pairs, pairs))
