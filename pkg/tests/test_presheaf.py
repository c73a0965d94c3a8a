"""Category, presheaf and DRA laws for the shipped base categories."""

import itertools
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mstt.errors import EvaluationPanic
from mstt.guarded import CONSTANTLY, FOREVER, LATER, OMEGA, GStreamTy, LaterTy
from mstt.param import FORGET_LEFT, FORGET_RIGHT, WEDGE, Z_CODE, FromRelTy
from mstt.presheaf import (
    STAR,
    TT,
    EmptyCtx,
    ExtCtx,
    FunTy,
    FunV,
    NatV,
    PairV,
    ProdTy,
    SemTm,
    UnitDRA,
    VecV,
    discrete_ty,
    dra_compose,
    fun_app,
    fun_lam,
    iso_fun,
    iso_id,
    iso_prod,
    iso_transport,
    render_value,
    subst_top,
    var_top,
)

from conftest import stage_pairs

CATEGORIES = [STAR, WEDGE, OMEGA]


def all_homs(cat):
    return cat.homs(5)


@pytest.mark.parametrize("cat", CATEGORIES, ids=repr)
def test_identity_and_associativity(cat):
    homs = all_homs(cat)
    for f in homs:
        x, y = f
        assert cat.compose(cat.hom_id(y), f) == f
        assert cat.compose(f, cat.hom_id(x)) == f
    for f, g, h in itertools.product(homs, repeat=3):
        if f[1] == g[0] and g[1] == h[0]:
            assert cat.compose(h, cat.compose(g, f)) == cat.compose(cat.compose(h, g), f)


def test_wedge_has_five_morphisms():
    # walking cospan: three identities plus left -> relation <- right
    homs = set(WEDGE.homs())
    assert len(homs) == 5
    assert ("left", "relation") in homs and ("right", "relation") in homs
    for bad in (("left", "right"), ("relation", "left")):
        with pytest.raises(EvaluationPanic):
            WEDGE.hom(*bad)


def test_omega_rejects_decreasing_morphism():
    with pytest.raises(EvaluationPanic):
        OMEGA.hom(3, 2)
    with pytest.raises(EvaluationPanic):
        OMEGA.compose((1, 2), (0, 3))


def _omega_types():
    nat = discrete_ty(STAR, "Nat")
    onat = discrete_ty(OMEGA, "Nat")
    return [
        onat,
        discrete_ty(OMEGA, "Bool"),
        GStreamTy(nat),
        LaterTy(onat),
        LaterTy(GStreamTy(nat)),
        ProdTy(onat, GStreamTy(nat)),
        FunTy(onat, onat),
        CONSTANTLY.mod(nat),
    ]


def _functor_laws(ty, cat, pairs, rng):
    for x, y in pairs:
        v = ty.sample(y, rng)
        assert ty.member(y, v)
        assert ty.probe_equal(y, ty.restrict(cat.hom_id(y), v), v, rng)
        for z in cat.sources(x):
            f, g = cat.hom(z, x), cat.hom(x, y)
            lhs = ty.restrict(cat.compose(g, f), v)
            rhs = ty.restrict(f, ty.restrict(g, v))
            assert ty.member(z, lhs)
            assert ty.probe_equal(z, lhs, rhs, rng)


@pytest.mark.parametrize("ty", _omega_types(), ids=repr)
def test_presheaf_laws_omega(ty, rng):
    _functor_laws(ty, OMEGA, stage_pairs(5), rng)


@pytest.mark.parametrize(
    "ty",
    [FromRelTy(Z_CODE), discrete_ty(WEDGE, "Nat"), FunTy(FromRelTy(Z_CODE), FromRelTy(Z_CODE))],
    ids=repr,
)
def test_presheaf_laws_wedge(ty, rng):
    _functor_laws(ty, WEDGE, all_homs(WEDGE), rng)


def test_presheaf_laws_star(rng):
    for ty in (
        discrete_ty(STAR, "Nat"),
        FOREVER.mod(GStreamTy(discrete_ty(STAR, "Nat"))),
        FORGET_RIGHT.mod(FromRelTy(Z_CODE)),
        FORGET_LEFT.mod(FromRelTy(Z_CODE)),
    ):
        _functor_laws(ty, STAR, [(TT, TT)], rng)


def test_context_functor_laws(rng):
    onat = discrete_ty(OMEGA, "Nat")
    stream = GStreamTy(discrete_ty(STAR, "Nat"))
    rel = FromRelTy(Z_CODE)
    ctxs = [
        EmptyCtx(OMEGA),
        ExtCtx(ExtCtx(EmptyCtx(OMEGA), onat), stream),
        LATER.lock(ExtCtx(EmptyCtx(OMEGA), stream)),
        CONSTANTLY.lock(ExtCtx(EmptyCtx(OMEGA), stream)),
        FOREVER.lock(ExtCtx(EmptyCtx(STAR), FOREVER.mod(stream))),
        ExtCtx(EmptyCtx(WEDGE), rel),
        FORGET_RIGHT.lock(ExtCtx(EmptyCtx(STAR), FORGET_RIGHT.mod(rel))),
    ]
    for ctx in ctxs:
        cat = ctx.base
        homs = cat.homs(5)
        for x, y in homs:
            if not ctx.has_cell(y):
                continue
            env = ctx.sample(y, rng)
            assert ctx.member(y, env)
            assert ctx.restrict(cat.hom_id(y), env) == env
            for f in homs:
                if f[1] == x and ctx.has_cell(f[0]):
                    g = (x, y)
                    assert ctx.restrict(cat.compose(g, f), env) == ctx.restrict(f, ctx.restrict(g, env))


def test_locked_context_adds_no_slots():
    ctx = ExtCtx(EmptyCtx(OMEGA), discrete_ty(OMEGA, "Nat"))
    assert LATER.lock(ctx).size() == ctx.size() == 1


@settings(max_examples=40, deadline=None)
@given(k=st.integers(0, 5), seed=st.integers(0, 10_000))
def test_function_restriction_law(k, seed):
    # (restrict f F) at (y, ρ) equals F at (y, f ∘ ρ)
    rng = random.Random(seed)
    onat = discrete_ty(OMEGA, "Nat")
    ty = FunTy(GStreamTy(discrete_ty(STAR, "Nat")), onat)
    F = FunV(5, lambda y, rho, s: NatV(sum(a.n for a in s.items) + k * y))
    for x in range(6):
        g = ty.restrict((x, 5), F)
        for y in range(x + 1):
            s = ty.dom.sample(y, rng)
            assert g.apply(y, (y, x), s) == F.apply(y, (y, 5), s)


def test_lambda_and_application_beta(rng):
    onat = discrete_ty(OMEGA, "Nat")
    ctx = EmptyCtx(OMEGA)
    ext = ExtCtx(ctx, onat)
    body = SemTm(ext, onat, lambda x, env: NatV(env[-1].n * 2))
    arg = SemTm(ctx, onat, lambda x, env: NatV(x + 1))
    lam = fun_lam(ctx, onat, body)
    for n in range(6):
        assert fun_app(lam, arg).at(n, ()) == subst_top(body, arg).at(n, ()) == NatV(2 * n + 2)
    assert var_top(ext).at(3, (NatV(9),)) == NatV(9)


@pytest.mark.parametrize(
    "dra,stages",
    [(LATER, range(6)), (CONSTANTLY, range(6)), (FOREVER, [TT]), (FORGET_RIGHT, [TT]), (FORGET_LEFT, [TT])],
    ids=lambda d: getattr(d, "name", ""),
)
def test_dra_round_trip(dra, stages, rng):
    """mod_elim(mod_intro(t)) agrees with t, and mod_intro(mod_elim(s)) with s."""
    inner = _sample_ty(dra.dom)
    ctx = EmptyCtx(dra.cod)
    locked = dra.lock(ctx)
    cells = {}

    def t_fn(x, env):
        if x not in cells:
            cells[x] = inner.restrict((x, _top(dra.dom)), top_val)
        return cells[x]

    top_val = inner.sample(_top(dra.dom), rng)
    t = SemTm(locked, inner, t_fn)
    back = dra.mod_elim(ctx, dra.mod_intro(ctx, t))
    for x in dra.dom.objects(5):
        if locked.has_cell(x):
            assert inner.probe_equal(x, back.at(x, ()), t.at(x, ()), rng)

    modded = dra.mod(inner)
    s_val = modded.sample(_top(dra.cod), rng)
    s = SemTm(ctx, modded, lambda x, env: modded.restrict((x, _top(dra.cod)), s_val))
    again = dra.mod_intro(ctx, dra.mod_elim(ctx, s))
    for x in stages:
        assert modded.probe_equal(x, again.at(x, ()), s.at(x, ()), rng)


def _top(cat):
    return {STAR: TT, WEDGE: "relation"}.get(cat, 7)


def _sample_ty(cat):
    if cat is WEDGE:
        return FromRelTy(Z_CODE)
    if cat is STAR:
        return discrete_ty(STAR, "Nat")
    return GStreamTy(discrete_ty(STAR, "Nat"))


def test_unit_dra_is_identity():
    ctx = ExtCtx(EmptyCtx(OMEGA), discrete_ty(OMEGA, "Nat"))
    u = UnitDRA(OMEGA)
    assert u.lock(ctx) is ctx
    assert dra_compose(u, LATER) is LATER and dra_compose(LATER, u) is LATER


def test_composed_lock_order():
    # forever ⓜ later: the later lock lands first on a ★-context
    comp = dra_compose(FOREVER, LATER)
    assert comp.lock_obj(3) == TT
    assert comp.atoms() == ("forever", "later")
    assert comp.dom is OMEGA and comp.cod is STAR


def test_iso_laws(rng):
    onat = discrete_ty(OMEGA, "Nat")
    swap = iso_prod(iso_id(onat), iso_id(onat))
    p = PairV(NatV(1), NatV(2))
    assert swap.forward(0, p) == p
    fwd = type(swap)(onat, onat, lambda x, v: NatV(v.n + 1), lambda x, v: NatV(v.n - 1))
    for n in range(5):
        v = NatV(n)
        assert fwd.backward(0, fwd.forward(0, v)) == v
        assert fwd.then(fwd.inverse()).forward(0, v) == v
    f_iso = iso_fun(fwd, fwd)
    F = FunV(3, lambda y, rho, a: NatV(a.n * 3))
    G = f_iso.backward(3, f_iso.forward(3, F))
    assert f_iso.source.probe_equal(3, F, G, rng)
    tm = SemTm(EmptyCtx(OMEGA), onat, lambda x, env: NatV(10))
    assert iso_transport(fwd, tm).at(0, ()) == NatV(9)


def test_render_values():
    assert render_value(VecV((NatV(0), NatV(1)))) == "[0,1]"
    assert render_value(PairV(NatV(1), NatV(0))) != ""
