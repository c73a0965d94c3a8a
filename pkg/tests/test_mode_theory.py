import itertools
import random

import pytest

from mstt.errors import TypeCheckError
from mstt.guarded import GUARDED_MODE_THEORY as MT
from mstt.guarded import GStreamTy
from mstt.mode_theory import ID_CELL, UNIT, Atom, Compose, flatten, from_atoms, render_modality
from mstt.param import PARAM_MODE_THEORY
from mstt.presheaf import STAR, FamV, NatV, discrete_ty

ATOMS = ["later", "constantly", "forever"]


def well_formed(names):
    """Atom lists whose composite lines up, with its (dom, cod)."""
    try:
        d, c = MT.endpoints(from_atoms(names))
    except ValueError:
        return None
    return (d, c)


def lists_up_to(k):
    for n in range(1, k + 1):
        for names in itertools.product(ATOMS, repeat=n):
            if well_formed(names):
                yield names


def test_render():
    mu = Compose(Atom("forever"), Atom("later"))
    assert render_modality(mu) == "forever o later"
    assert render_modality(UNIT) == "1"
    assert flatten(Compose(UNIT, mu)) == ("forever", "later")


def test_dom_of_checks_codomain():
    assert MT.dom_of(Atom("constantly"), "omega") == "star"
    assert MT.dom_of(Compose(Atom("forever"), Atom("later")), "star") == "omega"
    with pytest.raises(TypeCheckError):
        MT.dom_of(Atom("forever"), "omega")
    with pytest.raises(ValueError):
        MT.compose(Atom("later"), Atom("forever"))


def test_normalize_idempotent_depth5():
    count = 0
    for names in lists_up_to(5):
        nf = MT.normalize(from_atoms(names))
        assert MT.normalize(from_atoms(nf)) == nf
        count += 1
    assert count > 20


def test_guarded_equations():
    # forever ⓜ later = forever, forever ⓜ constantly = 𝟙
    assert MT.normalize(from_atoms(["forever", "later"])) == ("forever",)
    assert MT.normalize(from_atoms(["forever", "constantly"])) == ()
    assert MT.normalize(from_atoms(["forever", "later", "later", "constantly"])) == ()
    assert MT.normalize(from_atoms(["constantly", "forever"])) == ("constantly", "forever")
    assert MT.normalize(from_atoms(["later", "later"])) == ("later", "later")


def _equiv(mu, rho):
    try:
        MT.modalities_equivalent(mu, rho)
        return True
    except TypeCheckError:
        return False


def test_equivalence_relation_depth3():
    groups = {}
    for names in lists_up_to(3):
        groups.setdefault(well_formed(names), []).append(from_atoms(names))
    for exprs in groups.values():
        for a in exprs:
            assert _equiv(a, a)
        for a, b in itertools.product(exprs, repeat=2):
            assert _equiv(a, b) == _equiv(b, a)
        for a, b, c in itertools.product(exprs, repeat=3):
            if _equiv(a, b) and _equiv(b, c):
                assert _equiv(a, c)


def test_unit_laws_semantically():
    nat = discrete_ty(STAR, "Nat")
    stream = GStreamTy(nat)
    rng = random.Random(0)
    for names in lists_up_to(2):
        mu = from_atoms(names)
        _, cod = well_formed(names)
        dom = MT.dom_of(mu, cod)
        inner = stream if dom == "omega" else nat
        tys = [
            MT.interpret_modality(m, cod).mod(inner)
            for m in (mu, Compose(UNIT, mu), Compose(mu, UNIT))
        ]
        objs = range(6) if cod == "omega" else ["tt"]
        for x in objs:
            v = tys[0].sample(x, rng)
            for t in tys[1:]:
                assert t.member(x, v)
                assert t.probe_equal(x, v, v, rng)


def test_closed_iso_round_trip():
    nat = discrete_ty(STAR, "Nat")
    rng = random.Random(3)
    iso = MT.modalities_equivalent(from_atoms(["forever", "constantly"]), UNIT, "star").closed_iso(nat)
    fam = FamV(lambda n: NatV(4))
    assert iso.source.member("tt", fam)
    assert iso.forward("tt", fam) == NatV(4)
    assert iso.source.probe_equal("tt", iso.backward("tt", NatV(4)), fam, rng)
    stream = GStreamTy(nat)
    iso = MT.modalities_equivalent(from_atoms(["forever", "later"]), Atom("forever")).closed_iso(stream)
    fam = iso.source.sample("tt", rng)
    there = iso.forward("tt", fam)
    assert iso.target.member("tt", there)
    assert iso.source.probe_equal("tt", iso.backward("tt", there), fam, rng)


def test_two_cells():
    MT.check_two_cell(ID_CELL, Atom("later"), Atom("later"))
    MT.check_two_cell("1-to-later", UNIT, Atom("later"))
    MT.check_two_cell("const-forev-to-1", from_atoms(["constantly", "forever"]), UNIT)
    with pytest.raises(TypeCheckError):
        MT.check_two_cell("1-to-later", Atom("later"), UNIT)
    with pytest.raises(TypeCheckError):
        MT.check_two_cell(ID_CELL, Atom("later"), UNIT)
    with pytest.raises(TypeCheckError):
        MT.check_two_cell("no-such-cell", UNIT, UNIT)


@pytest.mark.parametrize(
    "alpha,mu,rho",
    [
        ("1-to-later", UNIT, Atom("later")),
        ("const-forev-to-1", from_atoms(["constantly", "forever"]), UNIT),
        (ID_CELL, from_atoms(["later", "later"]), from_atoms(["later", "later"])),
    ],
)
def test_two_cell_naturality(alpha, mu, rho):
    """transport then restrict equals restrict then transport."""
    from mstt.presheaf import EmptyCtx, ExtCtx
    from mstt.guarded import OMEGA

    cell = MT.check_two_cell(alpha, mu, rho, "omega")
    ctx = ExtCtx(EmptyCtx(OMEGA), GStreamTy(discrete_ty(STAR, "Nat")))
    lock_rho = MT.interpret_modality(rho, "omega").lock(ctx)
    lock_mu = MT.interpret_modality(mu, "omega").lock(ctx)
    rng = random.Random(5)
    for y in range(6):
        env = lock_rho.sample(y, rng)
        moved = cell.transport(ctx, y, env)
        assert lock_mu.member(y, moved)
        for x in range(y + 1):
            lhs = lock_mu.restrict((x, y), moved)
            rhs = cell.transport(ctx, x, lock_rho.restrict((x, y), env))
            assert lhs == rhs


def test_param_theory_has_no_equations():
    fr, fl = Atom("forget-right"), Atom("forget-left")
    PARAM_MODE_THEORY.modalities_equivalent(fr, fr)
    with pytest.raises(TypeCheckError):
        PARAM_MODE_THEORY.modalities_equivalent(fr, fl)
    assert PARAM_MODE_THEORY.dom_of(fr, "star") == "wedge"
