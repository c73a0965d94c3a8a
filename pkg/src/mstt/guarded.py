"""Guarded recursion: the ω/★ mode theory, guarded streams and Löb induction.

Presheaves over ω are stage-indexed; the later modality delays a type by
one stage, constantly embeds a ★-type as a constant presheaf and forever
takes the compatible families (the "fully unfolded" values).
"""

from __future__ import annotations

from .errors import EvaluationPanic, TypeCheckError
from .mode_theory import Atom, CellRule, ModeTheory, RewriteRule, from_atoms
from .presheaf import (
    DRA,
    STAR,
    TT,
    UNIT,
    BaseCategory,
    FamV,
    FunV,
    SemCtx,
    SemTm,
    SemTy,
    SemTyIso,
    UnitV,
    VecV,
    expect,
    iso_transport,
)
from .syntax import (
    Ann,
    Arrow,
    Bind,
    Lit,
    Modal,
    ModIntro,
    Nat,
    Suc,
    TmExt,
    TyExt,
    app_modal,
    apps,
    arrows,
    lam_modal,
    let_mod,
    svar,
    Lam,
)
from .typechecker import Checker, InferInterpretResult, TmExtension, TyExtension, lift_macro

# ---------------------------------------------------------------------------
# The base category ω


class OmegaCategory(BaseCategory):
    """Natural numbers ordered by ≤."""

    name = "ω"

    def is_object(self, x) -> bool:
        return isinstance(x, int) and not isinstance(x, bool) and x >= 0

    def leq(self, x, y) -> bool:
        return x <= y

    def objects(self, limit: int = 5) -> list:
        return list(range(limit + 1))

    def sources(self, x, limit: int = 5) -> list:
        return list(range(x + 1))

    def _rank(self, x) -> int:
        return x


OMEGA = OmegaCategory()


# ---------------------------------------------------------------------------
# Semantic types


class LaterTy(SemTy):
    """▻T: trivial at stage 0, T one stage earlier otherwise."""

    def __init__(self, ty: SemTy):
        if ty.base is not OMEGA:
            raise ValueError("▻ needs a type over ω")
        self.base = OMEGA
        self.ty = ty

    def member(self, n, v):
        if n == 0:
            return isinstance(v, UnitV)
        return self.ty.member(n - 1, v)

    def restrict(self, f, v):
        m, n = f
        if m == 0:
            return UNIT
        return self.ty.restrict((m - 1, n - 1), v)

    def sample(self, n, rng):
        return UNIT if n == 0 else self.ty.sample(n - 1, rng)

    def probe_equal(self, n, v, w, rng):
        return n == 0 or self.ty.probe_equal(n - 1, v, w, rng)

    def force(self, n, v, rng, limit=5):
        if n > 0:
            self.ty.force(n - 1, v, rng, limit)

    def __repr__(self):
        return f"▻{self.ty!r}"


class ConstantlyTy(SemTy):
    """⟨constantly | A⟩: the ★-type A, the same at every stage."""

    def __init__(self, ty: SemTy):
        if ty.base is not STAR:
            raise ValueError("constantly needs a type over ★")
        self.base = OMEGA
        self.ty = ty

    def member(self, n, v):
        return self.ty.member(TT, v)

    def restrict(self, f, v):
        return self.ty.restrict((TT, TT), v)

    def sample(self, n, rng):
        return self.ty.sample(TT, rng)

    def probe_equal(self, n, v, w, rng):
        return self.ty.probe_equal(TT, v, w, rng)

    def force(self, n, v, rng, limit=5):
        self.ty.force(TT, v, rng, limit)

    def __repr__(self):
        return f"⟨constantly ∣ {self.ty!r}⟩"


PROBE_STAGES = 6


class ForeverTy(SemTy):
    """⟨forever | T⟩: families of T-values compatible under restriction."""

    def __init__(self, ty: SemTy):
        if ty.base is not OMEGA:
            raise ValueError("forever needs a type over ω")
        self.base = STAR
        self.ty = ty

    def member(self, x, v):
        if not isinstance(v, FamV):
            return False
        return all(self.ty.member(n, v.at(n)) for n in range(PROBE_STAGES))

    def restrict(self, f, v):
        return v

    def sample(self, x, rng):
        top = 2 * PROBE_STAGES
        w = self.ty.sample(top, rng)
        ty = self.ty
        return FamV(lambda n: ty.restrict((n, top), w) if n <= top else ty.sample(n, rng))

    def probe_equal(self, x, v, w, rng):
        return all(self.ty.probe_equal(n, v.at(n), w.at(n), rng) for n in range(PROBE_STAGES))

    def force(self, x, v, rng, limit=5):
        expect(v, FamV, "forever")
        for n in range(limit + 1):
            self.ty.force(n, v.at(n), rng, limit)

    def __repr__(self):
        return f"⟨forever ∣ {self.ty!r}⟩"


class GStreamTy(SemTy):
    """Guarded streams: at stage n, the first n + 1 elements."""

    def __init__(self, elem: SemTy):
        if elem.base is not STAR:
            raise ValueError("GStream needs an element type over ★")
        self.base = OMEGA
        self.elem = elem

    def member(self, n, v):
        return (
            isinstance(v, VecV)
            and len(v.items) == n + 1
            and all(self.elem.member(TT, a) for a in v.items)
        )

    def restrict(self, f, v):
        m, n = f
        items = expect(v, VecV, "GStream restriction").items
        if len(items) != n + 1:
            raise EvaluationPanic(f"GStream cell of length {len(items)} at stage {n}")
        return VecV(tuple(self.elem.restrict((TT, TT), a) for a in items[: m + 1]))

    def sample(self, n, rng):
        return VecV(tuple(self.elem.sample(TT, rng) for _ in range(n + 1)))

    def probe_equal(self, n, v, w, rng):
        return len(v.items) == len(w.items) and all(
            self.elem.probe_equal(TT, a, b, rng) for a, b in zip(v.items, w.items)
        )

    def force(self, n, v, rng, limit=5):
        for a in expect(v, VecV, "GStream").items:
            self.elem.force(TT, a, rng, limit)

    def __repr__(self):
        return f"GStream {self.elem!r}"


def later_ty(ty: SemTy) -> LaterTy:
    return LaterTy(ty)


def gstream_ty(elem: SemTy) -> GStreamTy:
    return GStreamTy(elem)


def gstream_congruence(e: SemTyIso) -> SemTyIso:
    def lift(f):
        return lambda n, v: VecV(tuple(f(TT, a) for a in v.items))

    return SemTyIso(GStreamTy(e.source), GStreamTy(e.target), lift(e.forward), lift(e.backward))


# ---------------------------------------------------------------------------
# Modalities


class LaterDRA(DRA):
    name = "later"
    dom = OMEGA
    cod = OMEGA

    def lock_obj(self, n):
        return n + 1

    def lock_hom(self, f):
        return (f[0] + 1, f[1] + 1)

    def mod(self, ty):
        return LaterTy(ty)

    def mod_intro(self, ctx, t):
        return SemTm(ctx, LaterTy(t.ty), lambda n, env: UNIT if n == 0 else t.at(n - 1, env))

    def mod_elim(self, ctx, s):
        return SemTm(self.lock(ctx), s.ty.ty, lambda n, env: s.at(n + 1, env))

    def mod_map(self, n, f, v):
        return v if n == 0 else f(n - 1, v)


class ConstantlyDRA(DRA):
    name = "constantly"
    dom = STAR
    cod = OMEGA

    def lock_obj(self, x):
        return 0

    def lock_hom(self, f):
        return (0, 0)

    def mod(self, ty):
        return ConstantlyTy(ty)

    def mod_intro(self, ctx, t):
        return SemTm(ctx, ConstantlyTy(t.ty), lambda n, env: t.at(TT, ctx.restrict((0, n), env)))

    def mod_elim(self, ctx, s):
        return SemTm(self.lock(ctx), s.ty.ty, lambda x, env: s.at(0, env))

    def mod_map(self, n, f, v):
        return f(TT, v)


class ForeverDRA(DRA):
    name = "forever"
    dom = OMEGA
    cod = STAR

    def lock_obj(self, n):
        return TT

    def lock_hom(self, f):
        return (TT, TT)

    def mod(self, ty):
        return ForeverTy(ty)

    def mod_intro(self, ctx, t):
        return SemTm(ctx, ForeverTy(t.ty), lambda x, env: FamV(lambda n: t.at(n, env)))

    def mod_elim(self, ctx, s):
        return SemTm(self.lock(ctx), s.ty.ty, lambda n, env: expect(s.at(TT, env), FamV, "forever").at(n))

    def mod_map(self, x, f, v):
        fam = expect(v, FamV, "forever")
        return FamV(lambda n: f(n, fam.at(n)))


LATER = LaterDRA()
CONSTANTLY = ConstantlyDRA()
FOREVER = ForeverDRA()


def earlier(ctx: SemCtx) -> SemCtx:
    """◄Γ: the context one stage later, i.e. the lock of ``later``."""
    return LATER.lock(ctx)


def later_dra() -> DRA:
    return LATER


def constantly_dra() -> DRA:
    return CONSTANTLY


def forever_dra() -> DRA:
    return FOREVER


# forever ⓜ later ≃ forever: drop the trivial stage-0 entry of the family.
def _fl_forward(x, v):
    fam = expect(v, FamV, "forever ⓜ later")
    return FamV(lambda n: fam.at(n + 1))


def _fl_backward(x, v):
    fam = expect(v, FamV, "forever")
    return FamV(lambda n: UNIT if n == 0 else fam.at(n - 1))


# forever ⓜ constantly ≃ 𝟙: a compatible family of constants is one constant.
def _fc_forward(x, v):
    return expect(v, FamV, "forever ⓜ constantly").at(0)


def _fc_backward(x, v):
    return FamV(lambda n: v)


def _to_later(ctx, n, env):
    return ctx.restrict((n, n + 1), env)


def _const_forev_to_unit(ctx, n, env):
    return ctx.restrict((0, n), env)


GUARDED_MODE_THEORY = ModeTheory(
    name="guarded",
    modes={"star": STAR, "omega": OMEGA},
    atoms={
        "later": ("omega", "omega", LATER),
        "constantly": ("star", "omega", CONSTANTLY),
        "forever": ("omega", "star", FOREVER),
    },
    rewrites=[
        RewriteRule(("forever", "later"), ("forever",), _fl_forward, _fl_backward),
        RewriteRule(("forever", "constantly"), (), _fc_forward, _fc_backward),
    ],
    cells={
        "1-to-later": CellRule("1-to-later", (), ("later",), _to_later),
        "const-forev-to-1": CellRule(
            "const-forev-to-1", ("constantly", "forever"), (), _const_forev_to_unit
        ),
    },
)

later = Atom("later")
constantly = Atom("constantly")
forever = Atom("forever")


# ---------------------------------------------------------------------------
# Types and term formers


def GStream(elem) -> TyExt:
    return TyExt("GStream", (elem,))


def Later(ty) -> Modal:
    """▻T"""
    return Modal(later, ty)


def g_head_ty(a):
    return Arrow(GStream(a), Modal(constantly, a))


def g_tail_ty(a):
    return Arrow(GStream(a), Later(GStream(a)))


def g_cons_ty(a):
    return arrows(Modal(constantly, a), Later(GStream(a)), GStream(a))


def g_head(a) -> TmExt:
    return TmExt("g-head", (a,))


def g_tail(a) -> TmExt:
    return TmExt("g-tail", (a,))


def g_cons(a) -> TmExt:
    return TmExt("g-cons", (a,))


def g_flipfst(a) -> TmExt:
    return TmExt("g-flipFst", (a,))


def loeb(name: str, ty, body) -> TmExt:
    """``löb[later ∣ name ∈ ty] body``"""
    return TmExt("lob", (ty,), (body,), name)


def _require_omega(checker: Checker, ctx, t) -> None:
    mode = checker.ctx_mode(ctx)
    if mode != "omega":
        raise TypeCheckError(f"{t.code} is only available at mode omega, not {mode}", f"Tm-{t.code}")


def _elem_ty(checker: Checker, t: TmExt):
    if len(t.tys) != 1 or t.args:
        raise TypeCheckError(f"{t.code} takes exactly one type argument", f"Tm-{t.code}")
    try:
        return checker.interpret_ty(t.tys[0], "star")
    except TypeCheckError as e:
        raise TypeCheckError(f"bad element type for {t.code}: {e.message}", f"Tm-{t.code}") from None


def _primitive(type_of, cell):
    """A closed stream primitive; ``cell(y, v)`` gives the result at stage y."""

    def infer(checker: Checker, t: TmExt, ctx) -> InferInterpretResult:
        _require_omega(checker, ctx, t)
        _elem_ty(checker, t)
        ty = type_of(t.tys[0])
        sem = checker.interpret_ty(ty, "omega")
        sctx = checker.interpret_ctx(ctx)
        return InferInterpretResult(ty, SemTm(sctx, sem, lambda n, env: FunV(n, lambda y, rho, v: cell(y, v))))

    return infer


def _head_cell(y, v):
    return expect(v, VecV, "g-head").items[0]


def _tail_cell(y, v):
    items = expect(v, VecV, "g-tail").items
    return UNIT if y == 0 else VecV(items[1:])


def _flipfst_cell(y, v):
    # the result lives one stage behind: its head is the argument's second element
    items = expect(v, VecV, "g-flipFst").items
    if y == 0:
        return UNIT
    flipped = (items[1], items[0]) + items[2:]
    return VecV(flipped[:y])


def _cons_cell(y, head):
    def with_tail(z, rho, tail):
        if z == 0:
            return VecV((head,))
        return VecV((head,) + expect(tail, VecV, "g-cons").items)

    return FunV(y, with_tail)


def _infer_lob(checker: Checker, t: TmExt, ctx) -> InferInterpretResult:
    _require_omega(checker, ctx, t)
    if len(t.tys) != 1 or len(t.args) != 1 or t.name is None:
        raise TypeCheckError("löb takes a binder, its type and a body", "Tm-Löb")
    ty = t.tys[0]
    sem_ty = checker._check_ty_in(ty, "omega", t, "Tm-Löb")
    body = checker.infer_interpret(t.args[0], Bind(ctx, later, t.name, ty))
    e = checker._equiv_in(ty, body.type, "omega", t, "Tm-Löb")
    step = iso_transport(e, body.denotation)
    sctx = checker.interpret_ctx(ctx)

    def at(n, env):
        # stage induction: the ▻T slot at stage k holds the stage k-1 value
        v = step.at(0, sctx.restrict((0, n), env) + (UNIT,))
        for k in range(1, n + 1):
            v = step.at(k, sctx.restrict((k, n), env) + (v,))
        return v

    return InferInterpretResult(ty, SemTm(sctx, sem_ty, at))


GUARDED_TY_EXTS = {
    "GStream": TyExtension("GStream", ("star",), "omega", gstream_ty, gstream_congruence),
}

GUARDED_TM_EXTS = {
    "g-head": TmExtension("g-head", _primitive(g_head_ty, _head_cell)),
    "g-tail": TmExtension("g-tail", _primitive(g_tail_ty, _tail_cell)),
    "g-cons": TmExtension("g-cons", _primitive(g_cons_ty, _cons_cell)),
    "g-flipFst": TmExtension("g-flipFst", _primitive(g_tail_ty, _flipfst_cell)),
    "lob": TmExtension("lob", _infer_lob, surface="binder"),
    "lift1": lift_macro(1),
    "liftA2": lift_macro(2),
    "liftA3": lift_macro(3),
}


def make_checker() -> Checker:
    from .extraction import stream_extractable

    return Checker(
        GUARDED_MODE_THEORY,
        GUARDED_TY_EXTS,
        GUARDED_TM_EXTS,
        extractables=[stream_extractable],
        default_mode="omega",
    )


# ---------------------------------------------------------------------------
# Example corpus


def g_map(a, b):
    body = lam_modal(
        constantly,
        "f",
        Arrow(a, b),
        loeb(
            "m",
            Arrow(GStream(a), GStream(b)),
            Lam(
                "s",
                GStream(a),
                let_mod(
                    constantly,
                    "head-s",
                    apps(g_head(a), svar("s")),
                    let_mod(
                        later,
                        "tail-s",
                        apps(g_tail(a), svar("s")),
                        app_modal(
                            app_modal(g_cons(b), constantly, apps(svar("f"), svar("head-s"))),
                            later,
                            apps(svar("m"), svar("tail-s")),
                        ),
                    ),
                ),
            ),
        ),
    )
    return Ann(body, arrows(Modal(constantly, Arrow(a, b)), GStream(a), GStream(b)))


def g_map_ty(a, b):
    return arrows(Modal(constantly, Arrow(a, b)), GStream(a), GStream(b))


def _g_nats_with(step):
    return loeb(
        "s",
        GStream(Nat),
        app_modal(app_modal(g_cons(Nat), constantly, Lit(0)), later, apps(step, svar("s"))),
    )


g_nats = _g_nats_with(app_modal(g_map(Nat, Nat), constantly, Suc()))

# the unproductive variant: the tail is built with g-flipFst instead of g-map
g_nats_flipfst = _g_nats_with(g_flipfst(Nat))


def stream_prime(a) -> Modal:
    """Stream′ A = ⟨forever ∣ GStream A⟩"""
    return Modal(forever, GStream(a))


def cons_prime(a):
    return Lam(
        "a",
        a,
        Lam(
            "as",
            stream_prime(a),
            let_mod(
                forever,
                "g-as",
                svar("as"),
                ModIntro(
                    forever,
                    app_modal(app_modal(g_cons(a), constantly, svar("a")), later, svar("g-as")),
                ),
            ),
        ),
    )


nats = ModIntro(forever, g_nats)

CORPUS_TYPES = {
    "g-map": (g_map(Nat, Nat), "omega", g_map_ty(Nat, Nat)),
    "g-nats": (g_nats, "omega", GStream(Nat)),
    "cons'": (cons_prime(Nat), "star", arrows(Nat, stream_prime(Nat), stream_prime(Nat))),
    "nats": (nats, "star", stream_prime(Nat)),
}

# keep the composite symbol importable for callers building modal types
forever_later = from_atoms(["forever", "later"])
forever_constantly = from_atoms(["forever", "constantly"])
