from __future__ import annotations

import random
from pathlib import Path

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import (
    brute_distance,
    brute_h1,
    conjugate_to_pauli,
    controlled_pauli_unitary,
    cz_unitary,
    random_circuit_text,
    random_commuting,
    single_unitary,
)
from spacetime_forge.circuit import (
    SINGLE,
    CircuitError,
    CircuitParseError,
    CliffordCircuit,
    Element,
    back_propagate,
    backle,
    elementary_propagation_operators,
    identity_circuit,
    normalize,
    parse_circuit,
    propagate,
    record_backle,
    record_spackle,
    records,
    spackle,
    spacetime_complex,
)
from spacetime_forge.complex import distance, homology, validate
from spacetime_forge.gf2 import Span, rank
from spacetime_forge.pauli import PauliOp, StabilizerCode, parse_pauli

DATA = Path(__file__).parent / "data"


def unitary(el: Element, n: int) -> np.ndarray:
    if el.kind in SINGLE:
        return single_unitary(el.kind, n, el.wires[0])
    if el.kind == "CZ":
        return cz_unitary(n, *el.wires)
    if el.kind == "CZBOX":
        u = np.eye(1 << n, dtype=complex)
        for a, b in el.edges:
            u = cz_unitary(n, a, b) @ u
        return u
    if el.kind == "SWAP":
        a, b = el.wires
        return controlled_pauli_unitary(n, a, PauliOp.single(n, b, "X")) @ controlled_pauli_unitary(
            n, b, PauliOp.single(n, a, "X")
        ) @ controlled_pauli_unitary(n, a, PauliOp.single(n, b, "X"))
    if el.kind == "CP":
        return controlled_pauli_unitary(n, el.wires[0], el.pauli)
    if el.kind == "BOX":
        u = np.eye(1 << n, dtype=complex)
        for part in el.parts:
            u = unitary(part, n) @ u
        return u
    raise AssertionError(el.kind)


def passes_commuting(r, c: CliffordCircuit, forward: bool) -> bool:
    """Whether the propagated record commutes with every measurement it crosses."""
    c = normalize(c)
    v = r.op.vector
    if forward:
        order = range(r.t - 1, len(c.columns))
    else:
        start = r.t - 1 if r.kind == "measure" else r.t
        order = range(start - 2, -1, -1)
    for k in order:
        for el in c.columns[k]:
            if el.is_measurement and not PauliOp.from_vector(v, c.n).commutes(el.measured(c.n)):
                return False
        v = c.column_map(k, v, backward=not forward)
    return True


@st.composite
def unitary_elements(draw, n=3):
    kind = draw(st.sampled_from(["1q", "CZ", "SWAP", "CP", "CZBOX", "BOX"]))
    wires = draw(st.permutations(range(n)))
    if kind == "1q":
        return Element.gate(draw(st.sampled_from(SINGLE)), wires[0])
    if kind in ("CZ", "SWAP"):
        return Element.gate(kind, wires[0], wires[1])
    if kind == "CP":
        target = PauliOp.single(n, wires[1], draw(st.sampled_from("XYZ")))
        if draw(st.booleans()):
            target = target * PauliOp.single(n, wires[2], draw(st.sampled_from("XYZ")))
        return Element.cp(wires[0], target)
    if kind == "CZBOX":
        return Element.cz_box([(wires[0], wires[1]), (wires[1], wires[2])][: draw(st.integers(1, 2))])
    parts = [Element.gate("H", wires[0]), Element.cz_box([(wires[0], wires[1])]), Element.gate("S", wires[2])]
    return Element.box(draw(st.permutations(parts))[: draw(st.integers(1, 3))])


@given(unitary_elements())
def test_element_images_match_conjugation(el):
    n = 3
    u = unitary(el, n)
    for q in el.wires:
        (xx, xz), (zx, zz) = el.images(n)[q]
        assert conjugate_to_pauli(u, PauliOp.single(n, q, "X")) == PauliOp(n, xx, xz)
        assert conjugate_to_pauli(u, PauliOp.single(n, q, "Z")) == PauliOp(n, zx, zz)


@settings(max_examples=40)
@given(st.lists(unitary_elements(), min_size=1, max_size=3), st.integers(0, 63))
def test_propagation_matches_matrices(els, v):
    n = 3
    c = CliffordCircuit(n, tuple((el,) for el in els))
    p = PauliOp.from_vector(v, n)
    T = normalize(c).T
    u = np.eye(1 << n, dtype=complex)
    for el in els:
        u = unitary(el, n) @ u
    fwd = propagate(p, 1, T, c)
    assert fwd == conjugate_to_pauli(u, p)
    assert back_propagate(fwd, T, 1, c) == p


@settings(max_examples=40)
@given(st.integers(0, 2**32 - 1), st.integers(1, 4), st.integers(1, 6))
def test_text_round_trip(seed, n, T):
    c = parse_circuit(random_circuit_text(random.Random(seed), n, T))
    assert parse_circuit(c.to_text()) == c
    assert normalize(parse_circuit(normalize(c).to_text())) == normalize(c)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(1, 3), st.integers(1, 5))
def test_spacetime_complex_invariants(seed, n, T):
    c = parse_circuit(random_circuit_text(random.Random(seed), n, T))
    sc = spacetime_complex(c)
    assert validate(sc.complex).ok
    cnt = sc.counting()
    assert cnt["rank_gauge"] + cnt["rank_stabilizers"] + homology(sc.complex).dimension == cnt["total"]
    gauge = Span(sc.H_G.rows)
    nq = sc.n * sc.T
    for r in records(c):
        if r.kind != "final" and passes_commuting(r, c, True):
            assert record_spackle(r, c).vector in gauge
        if r.kind in ("measure", "final") and passes_commuting(r, c, False):
            assert record_backle(r, c).vector in gauge
    for s in sc.classification:
        for g in elementary_propagation_operators(c):
            assert s.operator.commutes(g.op)
        assert s.operator.n == nq


@pytest.mark.parametrize("n, T", [(n, T) for n in range(1, 4) for T in (1, 3, 5)])
def test_counting_identity_on_bare_wires(n, T):
    rng = random.Random(100 * n + T)
    stabs = random_commuting(rng, n, rng.randint(0, n))
    k = StabilizerCode.from_paulis(stabs, n).k if stabs else n
    sc = spacetime_complex(identity_circuit(n, T, stabs))
    cnt = sc.counting()
    assert cnt["total"] == 2 * n * T
    assert homology(sc.complex).dimension == cnt["dim_H1"] == 2 * k


def test_spackle_and_backle_of_a_hadamard():
    c = parse_circuit("WIRES 1\nH 0\n")
    assert normalize(c).T == 3
    x = parse_pauli("X")
    assert str(spackle(x, 1, c)) == "XZZ"
    assert str(backle(parse_pauli("Z"), 3, c)) == "XZZ"


@pytest.mark.parametrize("name, h1, d", [("h", 2, 1), ("hs", 2, 1), ("cx", 4, 1), ("swap", 4, 1), ("zz_memory", 0, None)])
def test_corpus_homology_against_enumeration(name, h1, d):
    sc = spacetime_complex(parse_circuit((DATA / f"{name}.circ").read_text()))
    c = sc.complex
    assert homology(c).dimension == h1
    if c.n1 <= 16:
        assert brute_h1(c) == h1
        assert brute_distance(c) == d
    if d is not None:
        assert distance(c) == d


def test_zz_memory_has_one_detector():
    sc = spacetime_complex(parse_circuit((DATA / "zz_memory.circ").read_text()))
    assert [s.kind for s in sc.classification] == ["detector", "incomplete-backward"]
    assert sorted(sc.classification[0].check) == ["MX0", "MX1", "s0"]


def test_spackle_through_an_anticommuting_measurement_is_not_gauge():
    c = parse_circuit("WIRES 1\nMPP Z\nTICK\nMPP X\n")
    rz = records(c)[0]
    assert not passes_commuting(rz, c, True)
    assert str(record_spackle(rz, c)) == "IZZ"
    assert record_spackle(rz, c).vector not in Span(spacetime_complex(c).H_G.rows)


def test_box_matches_sequential_columns():
    box = Element.box([Element.gate("H", 0), Element.cz_box([(0, 1)]), Element.gate("H", 0)])
    assert box.to_text() == "BOX { H 0 ; CZ 0 1 ; H 0 }"
    a = CliffordCircuit(2, ((box,),))
    b = CliffordCircuit(2, tuple((el,) for el in box.parts))
    for v in range(16):
        p = PauliOp.from_vector(v, 2)
        assert propagate(p, 1, normalize(a).T, a) == propagate(p, 1, normalize(b).T, b)


@pytest.mark.parametrize(
    "text, line",
    [
        ("H 0\n", 1),
        ("WIRES 1\nFOO 0\n", 2),
        ("WIRES 1\nH 3\n", 2),
        ("WIRES 2\nCZ 0 0\n", 2),
        ("WIRES 2\nCP 0 X_\n", 2),
        ("WIRES 2\nMPP XYZ\n", 2),
        ("WIRES 2\nBOX { H 0 ; MX 1 }\n", 2),
        ("WIRES 2\nTICK 3\n", 2),
        ("WIRES 1\nWIRES 1\n", 2),
        ("", None),
    ],
)
def test_parse_errors_carry_line_numbers(text, line):
    with pytest.raises(CircuitParseError) as e:
        parse_circuit(text)
    assert e.value.line == line


def test_structural_errors():
    with pytest.raises(CircuitError):
        normalize(parse_circuit("WIRES 2\nH 0\nCZ 0 1\n"))
    with pytest.raises(CircuitError):
        normalize(parse_circuit("WIRES 1\nH 0\nTICK\nPLUS 0\n"))
    with pytest.raises(CircuitError):
        identity_circuit(1, 2)
    with pytest.raises(CircuitError):
        parse_circuit("WIRES 1\nINPUT X\nINPUT Z\n").T
