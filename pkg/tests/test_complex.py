from __future__ import annotations

import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import brute_distance, brute_h1, brute_mwd, complexes, mat_vec, random_complex
from spacetime_forge.complex import (
    ChainComplex2,
    ChainConditionError,
    ComplexError,
    EnumerationOverflow,
    InfeasibleSyndrome,
    cohomology,
    components,
    default_cap,
    distance,
    dual_bases,
    dumps,
    homology,
    intersection_form,
    is_boundary,
    loads,
    mwd,
    summary,
    to_dot,
    validate,
)
from spacetime_forge.gf2 import BitMatrix, BitVector, multiply
from spacetime_forge.pauli import css_complex


def repetition(n: int) -> ChainComplex2:
    h = BitMatrix.from_ints([(1 << i) | (1 << (i + 1)) for i in range(n - 1)], n)
    return ChainComplex2(BitMatrix.zeros(n, 0), h)


@given(complexes())
def test_chain_condition_holds_for_generated_complexes(c):
    assert validate(c).ok
    assert multiply(c.d1, c.d2).is_zero()


@given(complexes())
def test_homology_dimension_matches_enumeration(c):
    assert homology(c).dimension == brute_h1(c) == cohomology(c).dimension


@given(complexes())
def test_distance_matches_enumeration(c):
    want = brute_distance(c)
    if want is None:
        with pytest.raises(ComplexError):
            distance(c)
    else:
        assert distance(c) == want
        assert distance(c, method="search") == want


@settings(max_examples=50)
@given(complexes(max_n1=9), st.integers(0, 2**32 - 1))
def test_mwd_matches_enumeration(c, seed):
    rng = random.Random(seed)
    x = rng.getrandbits(c.n1)
    s = mat_vec(c.d1.rows, x)
    want = brute_mwd(c, s)
    for method in ("auto", "enumerate", "search"):
        got = mwd(c, s, method=method)
        assert (got.min_weight, got.witness.data) == want


@given(complexes())
def test_dual_bases_pair_to_identity(c):
    e, f = dual_bases(c)
    for i, x in enumerate(e.rows):
        for j, y in enumerate(f.rows):
            assert intersection_form(c, BitVector(c.n1, y), BitVector(c.n1, x)) == (i == j)


@given(complexes())
def test_dual_complex_swaps_homology(c):
    d = c.dual()
    assert homology(d).dimension == homology(c).dimension
    assert (d.n2, d.n1, d.n0) == (c.n0, c.n1, c.n2)


@given(complexes())
def test_json_round_trip(c):
    assert loads(dumps(c)) == c


@given(complexes())
def test_components_partition_the_complex(c):
    parts = components(c)
    assert sum(p.n1 for p in parts) == c.n1
    assert sum(p.n2 for p in parts) == c.n2
    assert sum(homology(p).dimension for p in parts) == homology(c).dimension


def test_repetition_code_distance():
    c = repetition(3)
    assert distance(c) == 3
    assert homology(c).dimension == 1
    assert summary(c) == {"dim_c2": 0, "dim_c1": 3, "dim_c0": 2, "rank_d2": 0, "rank_d1": 2, "dim_h1": 1}


def test_mwd_on_repetition_code():
    c = repetition(5)
    r = mwd(c, 0b0001)
    assert r.min_weight == 1 and r.witness.support() == [0]
    assert mwd(c, 0b0110).witness.support() == [2]
    r = mwd(c, 0b0101)
    assert r.min_weight == 2 and r.witness.support() == [1, 2]


def test_infeasible_syndrome():
    c = ChainComplex2(BitMatrix.zeros(2, 0), BitMatrix.from_strings(["11", "11"]))
    with pytest.raises(InfeasibleSyndrome):
        mwd(c, 0b01)


def test_chain_violation_detected():
    with pytest.raises(ChainConditionError):
        ChainComplex2(BitMatrix.from_strings(["1", "0"]), BitMatrix.from_strings(["10"]))


def test_enumeration_overflow():
    c = ChainComplex2(BitMatrix.zeros(6, 0), BitMatrix.zeros(0, 6))
    with pytest.raises(EnumerationOverflow):
        distance(c, cap=3, method="enumerate")
    assert distance(c, cap=3) == 1


def test_cap_environment_override(monkeypatch):
    assert default_cap() == 24
    monkeypatch.setenv("SPACETIME_FORGE_CAP", "7")
    assert default_cap() == 7


def test_boundaries_are_trivial():
    c = css_complex(BitMatrix.from_strings(["1111"]), BitMatrix.from_strings(["1111"]))
    for col in c.d2.columns():
        assert is_boundary(c, col)


def test_dot_export_lists_every_node():
    c = random_complex(random.Random(3), 6)
    dot = to_dot(c)
    assert dot.count("[label=") == c.n2 + c.n1 + c.n0
    assert dot.startswith("graph complex {")
