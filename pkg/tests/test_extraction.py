import pytest
from hypothesis import given
from hypothesis import strategies as st

from mstt.errors import TypeCheckError
from mstt.extraction import HostStream, embed, extract, extractable_for
from mstt.guarded import GStream, g_nats, nats, stream_prime
from mstt.presheaf import NatV, VecV, expect
from mstt.syntax import Arrow, Bool, Empty, Lam, Nat, Prod, apps, svar, Plus


def test_nats_extracts_to_naturals(gchk):
    ex = extractable_for(gchk, stream_prime(Nat))
    s = ex.extract(gchk.infer(nats, Empty("star")).denotation)
    assert isinstance(s, HostStream)
    assert s.take(10) == list(range(10))
    assert ex.translated_type == "Stream[int]"


def test_stream_agrees_with_stage_reads(gchk):
    ex = extractable_for(gchk, stream_prime(Nat))
    s = extract(ex, gchk.infer(nats, Empty("star")).denotation)
    stages = gchk.infer(g_nats).denotation
    for k in range(1, 9):
        assert s.take(k) == [stages.at(i, ()).items[i].n for i in range(k)]


def test_stream_compatibility(gchk):
    fam = gchk.infer(nats, Empty("star")).denotation.at("tt", ())
    for n in range(9):
        assert expect(fam.at(n + 1), VecV, "t").items[:-1] == fam.at(n).items


@given(st.integers(0, 1000))
def test_nat_round_trip(gchk, n):
    ex = extractable_for(gchk, Nat)
    assert ex.extract(ex.embed(n)) == n


@given(st.tuples(st.integers(0, 50), st.booleans()))
def test_product_round_trip(gchk, pair):
    ex = extractable_for(gchk, Prod(Nat, Bool))
    assert extract(ex, embed(ex, pair)) == pair
    assert ex.translated_type == "tuple[int, bool]"


def test_function_round_trip(gchk):
    ex = extractable_for(gchk, Arrow(Nat, Nat))
    f = ex.extract(ex.embed(lambda n: n * 3))
    assert [f(i) for i in range(5)] == [0, 3, 6, 9, 12]
    add = gchk.infer(Lam("a", Nat, Lam("b", Nat, apps(Plus(), svar("a"), svar("b")))), Empty("star"))
    g = extractable_for(gchk, Arrow(Nat, Arrow(Nat, Nat))).extract(add.denotation)
    assert g(2)(5) == 7


def test_stream_round_trip(gchk):
    ex = extractable_for(gchk, stream_prime(Nat))
    host = HostStream(lambda i: i * i)
    again = ex.extract(ex.embed(host))
    assert again.take(6) == host.take(6)
    fam = ex.from_host(host)
    assert ex.sem_ty.member("tt", fam)


def test_embed_then_extract_cells(gchk, rng):
    ex = extractable_for(gchk, stream_prime(Nat))
    fam = gchk.infer(nats, Empty("star")).denotation.at("tt", ())
    back = ex.from_host(ex.to_host(fam))
    assert ex.sem_ty.probe_equal("tt", back, fam, rng)


def test_omega_types_do_not_extract(gchk):
    with pytest.raises(TypeCheckError) as info:
        extractable_for(gchk, GStream(Nat))
    assert info.value.rule == "extract"


def test_host_stream_rejects_negative_index():
    with pytest.raises(IndexError):
        HostStream(lambda i: i).at(-1)
    assert NatV(1) != NatV(2)
