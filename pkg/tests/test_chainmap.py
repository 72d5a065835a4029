from __future__ import annotations

import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import brute_distance, brute_h1, complexes, random_reducible_complex
from spacetime_forge.chainmap import (
    ChainMapError,
    WeakChainMap,
    apply_rule_a,
    apply_rule_b,
    certify_fault_tolerant,
    check_weak_chain_map,
    first_reducible,
    induced_homology_map,
    reduce_to_fixpoint,
)
from spacetime_forge.complex import ChainComplex2, components, homology
from spacetime_forge.gf2 import BitMatrix
from spacetime_forge.pauli import bacon_shor, subsystem_complex

reducible = st.builds(
    lambda seed, n1, rule: (rule, *random_reducible_complex(random.Random(seed), n1, rule)),
    st.integers(0, 2**32 - 1),
    st.integers(2, 10),
    st.sampled_from("AB"),
)


@settings(max_examples=60)
@given(reducible)
def test_rules_are_fault_tolerant(case):
    rule, c, g = case
    dst, app = (apply_rule_a if rule == "A" else apply_rule_b)(c, g)
    assert (dst.n1, dst.n2, dst.n0) == (c.n1 - 1, c.n2 - 1, c.n0)
    cert = certify_fault_tolerant(app.forward, app.backward, c, dst)
    assert cert.ok, cert.failures
    assert cert.exhaustive
    assert brute_h1(dst) == brute_h1(c)
    assert brute_distance(dst) == brute_distance(c)
    assert induced_homology_map(app.forward, c, dst).isomorphism


@given(complexes())
def test_identity_map_is_a_strict_chain_map(c):
    ident = WeakChainMap.identity(c)
    chk = check_weak_chain_map(ident, c, c)
    assert chk.ok and chk.strict
    assert certify_fault_tolerant(ident, ident, c, c).ok


@given(complexes(max_n1=9))
def test_reduction_reaches_a_fixpoint(c):
    red = reduce_to_fixpoint(c)
    assert all(bin(col).count("1") >= 3 for col in red.complex.d2.columns())
    assert first_reducible(red.complex) is None
    assert homology(red.complex).dimension == homology(c).dimension
    assert brute_distance(red.complex) == brute_distance(c)
    assert check_weak_chain_map(red.forward, c, red.complex).ok
    assert check_weak_chain_map(red.backward, red.complex, c).ok


@settings(max_examples=30)
@given(complexes(max_n1=9))
def test_reduction_maps_are_certified(c):
    red = reduce_to_fixpoint(c)
    assert certify_fault_tolerant(red.forward, red.backward, c, red.complex).ok


def test_zero_map_is_not_a_quasi_isomorphism():
    c = ChainComplex2(BitMatrix.zeros(3, 0), BitMatrix.from_strings(["110", "011"]))
    zero = WeakChainMap(BitMatrix.zeros(2, 2), BitMatrix.zeros(3, 3), BitMatrix.zeros(0, 0))
    cert = certify_fault_tolerant(zero, zero, c, c)
    assert not cert.ok
    assert cert.kind == "failure"


def test_broken_commuting_square_reported():
    c = ChainComplex2(BitMatrix.zeros(3, 0), BitMatrix.from_strings(["110", "011"]))
    m = WeakChainMap(BitMatrix.identity(2), BitMatrix.from_strings(["010", "100", "001"]), BitMatrix.zeros(0, 0))
    chk = check_weak_chain_map(m, c, c)
    assert not chk.ok
    assert "commuting square" in chk.failures[0]


def test_rules_reject_wrong_weights():
    c = ChainComplex2(BitMatrix.from_strings(["1", "1", "1"]), BitMatrix.zeros(0, 3))
    with pytest.raises(ChainMapError):
        apply_rule_a(c, 0)
    with pytest.raises(ChainMapError):
        apply_rule_b(c, 0)
    c = ChainComplex2(BitMatrix.from_strings(["1", "0"]), BitMatrix.from_strings(["00"]))
    apply_rule_b(c, 0)
    c = ChainComplex2(BitMatrix.from_strings(["1", "0"]), BitMatrix.from_strings(["10"]), check=False)
    with pytest.raises(ChainMapError):
        apply_rule_b(c, 0)


def test_bacon_shor_3x3_reduces_to_two_repetition_codes():
    c = subsystem_complex(bacon_shor(3))
    red = reduce_to_fixpoint(c)
    parts = components(red.complex)
    assert len(parts) == 2
    for p in parts:
        assert (p.n2, p.n1, p.n0) == (0, 3, 2)
        assert homology(p).dimension == 1
    assert [t.rule for t in red.trace].count("A") + [t.rule for t in red.trace].count("B") == len(red.trace)
