"""Guarded streams: corpus typing, Löb guardedness and naturality."""

import pytest

from mstt.errors import TypeCheckError
from mstt.guarded import (
    CORPUS_TYPES,
    GStream,
    Later,
    constantly,
    cons_prime,
    g_cons,
    g_head,
    g_map,
    g_nats,
    g_nats_flipfst,
    g_tail,
    later,
    loeb,
    nats,
    stream_prime,
)
from mstt.presheaf import NatV, VecV
from mstt.syntax import App, Empty, Lam, Lit, ModElim, ModIntro, Nat, Suc, apps, app_modal, render_ty, svar

from conftest import natural_at, stage_pairs

EXPECTED_TYPES = {
    "g-map": "<constantly | Nat -> Nat> -> GStream Nat -> GStream Nat",
    "g-nats": "GStream Nat",
    "cons'": "Nat -> <forever | GStream Nat> -> <forever | GStream Nat>",
    "nats": "<forever | GStream Nat>",
}


def vec(*ns):
    return VecV(tuple(NatV(n) for n in ns))


@pytest.mark.parametrize("name", sorted(CORPUS_TYPES))
def test_corpus_types(gchk, name):
    term, mode, expected = CORPUS_TYPES[name]
    got = gchk.infer_type(term, Empty(mode))
    assert got == expected
    assert render_ty(got) == EXPECTED_TYPES[name]


def test_stream_prime_is_a_star_type(gchk):
    gchk.check_ty(stream_prime(Nat), "star")
    with pytest.raises(TypeCheckError):
        gchk.check_ty(stream_prime(Nat), "omega")


def test_flipfst_variant_rejected(gchk):
    with pytest.raises(TypeCheckError) as info:
        gchk.infer(g_nats_flipfst)
    assert info.value.rule == "Tm-App"


def test_g_nats_values(gchk):
    d = gchk.infer(g_nats).denotation
    for n in range(9):
        assert d.at(n, ()) == vec(*range(n + 1))


def test_primitives(gchk):
    s = loeb("s", GStream(Nat), app_modal(app_modal(g_cons(Nat), constantly, Lit(5)), later, svar("s")))
    head = gchk.infer(App(g_head(Nat), s))
    assert head.type.mu == constantly and head.denotation.at(3, ()) == NatV(5)
    tail = gchk.infer(App(g_tail(Nat), g_nats))
    assert tail.type == Later(GStream(Nat))
    # ▻ at stage 0 carries no information; at n+1 it is the stage-n tail
    assert tail.denotation.at(3, ()) == vec(1, 2, 3)


def test_g_map_suc(gchk):
    mapped = apps(app_modal(g_map(Nat, Nat), constantly, Suc()), g_nats)
    d = gchk.infer(mapped).denotation
    for n in range(6):
        assert d.at(n, ()) == vec(*range(1, n + 2))


def test_cons_prime_and_nats(gchk):
    r = gchk.infer(apps(cons_prime(Nat), Lit(9), nats), Empty("star"))
    fam = r.denotation.at("tt", ())
    assert fam.at(0) == vec(9)
    assert fam.at(3) == vec(9, 0, 1, 2)


LOB_TERMS = {
    "g-nats": g_nats,
    "g-map suc g-nats": apps(app_modal(g_map(Nat, Nat), constantly, Suc()), g_nats),
    "ones": loeb("s", GStream(Nat), app_modal(app_modal(g_cons(Nat), constantly, Lit(1)), later, svar("s"))),
    "g-map as a value": g_map(Nat, Nat),
}


@pytest.mark.parametrize("name", sorted(LOB_TERMS))
def test_loeb_guardedness(gchk, name, rng):
    r = gchk.infer(LOB_TERMS[name])
    sem = gchk.interpret_ty(r.type, "omega")
    for n in range(9):
        hi, lo = r.denotation.at(n + 1, ()), r.denotation.at(n, ())
        assert sem.probe_equal(n, sem.restrict((n, n + 1), hi), lo, rng)


@pytest.mark.parametrize("name", ["g-map", "g-nats"])
def test_corpus_naturality_omega(gchk, name, rng):
    term, mode, _ = CORPUS_TYPES[name]
    r = gchk.infer(term, Empty(mode))
    sem = gchk.interpret_ty(r.type, mode)
    for f in stage_pairs(5):
        assert natural_at(sem, r.denotation, f, (), (), rng)


def test_open_term_naturality(gchk, rng):
    """A löb body under a binder stays natural in its environment."""
    from mstt.syntax import Bind
    from mstt.mode_theory import UNIT

    ctx = Bind(Empty("omega"), UNIT, "xs", GStream(Nat))
    t = ModElim(later, "t", App(g_tail(Nat), svar("xs")), ModIntro(later, svar("t")))
    r = gchk.infer(t, ctx)
    sem = gchk.interpret_ty(r.type, "omega")
    sctx = gchk.interpret_ctx(ctx)
    for x, y in stage_pairs(5):
        env = sctx.sample(y, rng)
        assert natural_at(sem, r.denotation, (x, y), env, sctx.restrict((x, y), env), rng)


def test_loeb_requires_later_binding(gchk):
    # using the recursive variable now instead of later is rejected
    bad = loeb("s", GStream(Nat), svar("s"))
    with pytest.raises(TypeCheckError):
        gchk.infer(bad)


def test_loeb_outside_omega_rejected(gchk):
    with pytest.raises(TypeCheckError):
        gchk.infer(loeb("n", Nat, Lit(0)), Empty("star"))


def test_lambda_over_stream(gchk):
    t = Lam("s", GStream(Nat), App(g_head(Nat), svar("s")))
    assert render_ty(gchk.infer_type(t)) == "GStream Nat -> <constantly | Nat>"
