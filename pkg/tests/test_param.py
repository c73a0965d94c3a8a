"""Parametricity: relations on the walking cospan and the integer example."""

import itertools

import pytest
from hypothesis import given
from hypothesis import strategies as st

from mstt.errors import TypeCheckError
from mstt.extraction import extractable_for
from mstt.param import (
    FORGET_LEFT,
    FORGET_RIGHT,
    LEFT,
    RELATION,
    RIGHT,
    SMALL,
    WEDGE,
    Z,
    Z_ADD,
    Z_CODE,
    Z_INT,
    Z_NEGATE,
    RelationViolation,
    add_diff,
    add_sign,
    diff_value,
    from_rel_ty,
    int_related,
    make_rel,
    negate_diff,
    negate_sign,
    rel_lit,
    related_inputs,
    sign_value,
    subtract_star_left,
    subtract_star_right,
    subtract_z,
)
from mstt.presheaf import HostV, RelV
from mstt.syntax import App, Empty, Modal, apps, arrows
from mstt.mode_theory import Atom

diffs = st.tuples(st.integers(0, SMALL), st.integers(0, SMALL))
signs = st.tuples(st.sampled_from(["pos", "neg"]), st.integers(0, SMALL))


def test_relation_is_integer_equality():
    # the two representations of zero are both related to every (n, n)
    for n in range(SMALL + 1):
        assert int_related((n, n), ("pos", 0)) and int_related((n, n), ("neg", 0))
    assert int_related((5, 2), ("pos", 3))
    assert not int_related((5, 2), ("neg", 3))


@given(diffs, diffs)
def test_diff_ops_match_integers(d, e):
    assert diff_value(add_diff(d, e)) == diff_value(d) + diff_value(e)
    assert diff_value(negate_diff(d)) == -diff_value(d)


@given(signs, signs)
def test_sign_ops_match_integers(s, t):
    assert sign_value(add_sign(s, t)) == sign_value(s) + sign_value(t)
    assert sign_value(negate_sign(s)) == -sign_value(s)


def test_ops_preserve_relation_exhaustively():
    pairs = Z_CODE.related_pairs()
    assert pairs and all(int_related(d, s) for d, s in pairs)
    for (d, s), (e, t) in itertools.product(pairs, pairs):
        assert int_related(add_diff(d, e), add_sign(s, t))
    for d, s in pairs:
        assert int_related(negate_diff(d), negate_sign(s))


def test_make_rel_checks():
    assert make_rel(Z_CODE, (5, 2), ("pos", 3)) == RelV(HostV((5, 2), "DiffNat"), HostV(("pos", 3), "SignNat"))
    with pytest.raises(RelationViolation):
        make_rel(Z_CODE, (5, 2), ("pos", 4))


def test_from_rel_type_cells(rng):
    ty = from_rel_ty(Z_CODE)
    v = ty.sample(RELATION, rng)
    assert ty.member(RELATION, v)
    left = ty.restrict((LEFT, RELATION), v)
    right = ty.restrict((RIGHT, RELATION), v)
    assert ty.member(LEFT, left) and ty.member(RIGHT, right)
    assert int_related(left.payload, right.payload)


def test_add_and_negate_types(pchk):
    Z_INT.check(pchk)
    assert pchk.infer_type(Z_INT.add) == arrows(Z, Z, Z)
    assert pchk.infer_type(Z_INT.negate) == arrows(Z, Z)


def test_negate_on_relation(pchk):
    lit = rel_lit("Z", (5, 2), ("pos", 3))
    r = pchk.infer(App(Z_INT.negate, lit))
    assert r.denotation.at(RELATION, ()) == make_rel(Z_CODE, (2, 5), ("neg", 3))
    assert r.denotation.at(LEFT, ()) == HostV((2, 5), "DiffNat")
    assert r.denotation.at(RIGHT, ()) == HostV(("neg", 3), "SignNat")


def test_unrelated_literal_rejected(pchk):
    with pytest.raises(TypeCheckError):
        pchk.infer(rel_lit("Z", (5, 2), ("neg", 3)))


def test_subtract_types(pchk):
    assert pchk.infer_type(subtract_z) == arrows(Z, Z, Z)
    fr = Modal(Atom("forget-right"), Z)
    fl = Modal(Atom("forget-left"), Z)
    assert pchk.infer_type(subtract_star_left, Empty("star")) == arrows(fr, fr, fr)
    assert pchk.infer_type(subtract_star_right, Empty("star")) == arrows(fl, fl, fl)


def test_subtract_relation_cells(pchk):
    d = pchk.infer(subtract_z).denotation
    fn = d.at(RELATION, ())
    for (a, b) in related_inputs()[:200]:
        out = fn.apply(RELATION, (RELATION, RELATION), make_rel(Z_CODE, *a))
        out = out.apply(RELATION, (RELATION, RELATION), make_rel(Z_CODE, *b))
        assert int_related(out.left.payload, out.right.payload)


def _extract(pchk, term):
    r = pchk.infer(term, Empty("star"))
    return extractable_for(pchk, r.type).extract(r.denotation)


def test_subtract_related_exhaustively(pchk):
    sub_l = _extract(pchk, subtract_star_left)
    sub_r = _extract(pchk, subtract_star_right)
    count = 0
    for (d1, s1), (d2, s2) in related_inputs():
        x, y = sub_l(d1)(d2), sub_r(s1)(s2)
        assert int_related(x, y)
        # independent oracle: plain integer subtraction
        assert diff_value(x) == diff_value(d1) - diff_value(d2)
        count += 1
    assert count == len(Z_CODE.related_pairs()) ** 2


def test_forget_projections_agree_with_cells(pchk):
    """The left/right cells of a ⋀-term are what forget-right/left extract."""
    lit = rel_lit("Z", (4, 1), ("pos", 3))
    from mstt.syntax import ModIntro

    d = pchk.infer(App(Z_INT.negate, lit)).denotation
    left = _extract(pchk, ModIntro(Atom("forget-right"), App(Z_INT.negate, lit)))
    right = _extract(pchk, ModIntro(Atom("forget-left"), App(Z_INT.negate, lit)))
    assert d.at(LEFT, ()).payload == left == (1, 4)
    assert d.at(RIGHT, ()).payload == right == ("neg", 3)


def test_forget_locks():
    assert FORGET_RIGHT.lock_obj(LEFT) == "tt" and FORGET_RIGHT.lock_obj(RIGHT) is None
    assert FORGET_LEFT.lock_obj(RIGHT) == "tt" and FORGET_LEFT.lock_obj(RELATION) is None
    assert FORGET_RIGHT.dom is WEDGE


def test_ops_registry():
    assert Z_ADD.name == "add" and Z_NEGATE.name == "negate"
    assert apps is not None
