from __future__ import annotations

import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import brute_distance, random_commuting
from spacetime_forge.circuit import spacetime_complex
from spacetime_forge.complex import homology, validate
from spacetime_forge.gf2 import multiply
from spacetime_forge.mbqc import (
    MbqcPattern,
    PatternError,
    PatternParseError,
    augmented,
    cluster_state_complex,
    co_representation,
    compare_complexes,
    compressed_representation,
    graph_to_dot,
    parse_pattern,
    realize_circuit,
    verify_equivalence_to_spacetime,
)


def random_pattern(rng: random.Random, max_nodes: int = 10) -> MbqcPattern:
    n = rng.randint(1, max_nodes)
    edges = [(a, b) for a in range(n) for b in range(a + 1, n) if rng.random() < 0.3]
    ins = [v for v in range(n) if rng.random() < 0.3]
    outs = [v for v in range(n) if rng.random() < 0.3]
    ys = [v for v in range(n) if v not in outs and rng.random() < 0.3]
    stabs = random_commuting(rng, len(ins), rng.randint(0, len(ins))) if ins else []
    return MbqcPattern.from_edges(n, edges, ins, outs, ys, stabs)


patterns = st.builds(lambda seed: random_pattern(random.Random(seed)), st.integers(0, 2**32 - 1))


@settings(max_examples=30, deadline=None)
@given(patterns)
def test_cluster_complex_matches_realization(p):
    rep = verify_equivalence_to_spacetime(p)
    assert rep.ok, rep.failures


@settings(max_examples=50, deadline=None)
@given(patterns)
def test_cluster_complex_structure(p):
    csc = cluster_state_complex(p)
    assert validate(csc.complex).ok
    assert csc.detector_dimension == csc.H.nrows == csc.complex.n0
    Gt, Ht, names, roles = augmented(csc)
    assert Gt.nrows == Gt.ncols == Ht.ncols
    assert multiply(Ht, Gt.transpose()).is_zero()
    rep = compressed_representation(csc)
    assert roles.count("detector") == Ht.nrows
    assert rep.B.nrows == len(rep.names) == Gt.nrows + Ht.nrows
    co = co_representation(csc)
    assert co.B == rep.B.transpose() and co.inverted


@given(patterns)
def test_text_round_trip(p):
    assert parse_pattern(p.to_text()) == p


def test_single_edge_teleports_a_hadamard():
    p = MbqcPattern.from_edges(2, [(0, 1)], [0], [1])
    rep = verify_equivalence_to_spacetime(p)
    assert str(rep) == "equivalent: dim H1=2 d=1"
    c = cluster_state_complex(p).complex
    assert brute_distance(c) == 1


def test_two_y_measured_nodes():
    p = MbqcPattern.from_edges(2, [(0, 1)], [], [], [0, 1])
    csc = cluster_state_complex(p)
    # Y0 Y1 is the product of the graph-state stabilizers X0 Z1 and Z0 X1
    assert homology(csc.complex).dimension == 0
    assert csc.H.nrows == 1


def test_compare_reports_differences():
    a = cluster_state_complex(MbqcPattern.from_edges(2, [(0, 1)], [0], [1])).complex
    b = cluster_state_complex(MbqcPattern.from_edges(1, [], [0], [0])).complex
    rep = compare_complexes(a, b)
    assert rep.ok == (homology(a).dimension == homology(b).dimension and a.n0 == b.n0)
    c = cluster_state_complex(MbqcPattern.from_edges(2, [(0, 1)], [], [])).complex
    bad = compare_complexes(a, c)
    assert not bad.ok and bad.failures


def test_realization_shape():
    p = MbqcPattern.from_edges(3, [(0, 1), (1, 2)], [0], [2], [1])
    c = realize_circuit(p)
    sc = spacetime_complex(c)
    assert sc.T == 3
    assert dict(sc.circuit.finals) == {0: "X", 1: "Y"}
    assert "->" not in graph_to_dot(p)


@pytest.mark.parametrize(
    "text",
    ["EDGE 0 1\n", "NODES 2\nEDGE 0 5\n", "NODES 2\nEDGE 0 0\n", "NODES 2\nFOO\n", "NODES 2\nOUTPUT 1\nYMEAS 1\n", ""],
)
def test_pattern_parse_errors(text):
    with pytest.raises(PatternParseError):
        parse_pattern(text)


def test_pattern_validation():
    with pytest.raises(PatternError):
        MbqcPattern.from_edges(2, [], [0, 1], [], [], ["X", "ZZ"])
    with pytest.raises(PatternError):
        MbqcPattern.from_edges(1, [], [0], [], [], ["X", "Z"])
