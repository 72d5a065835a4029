from __future__ import annotations

import json
import random
from pathlib import Path

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from spacetime_forge.circuit import CliffordCircuit, Element, normalize, parse_circuit, spacetime_complex
from spacetime_forge.compile import (
    TAGS,
    CompileError,
    Program,
    compile,
    compile_program,
    controlled_pauli_ops,
    hadamard_separate,
    is_hadamard_separated,
    lower_controlled_pauli,
    lower_single_qubit,
    relabel_swaps,
)
from spacetime_forge.complex import distance, homology
from spacetime_forge.pauli import PauliOp

DATA = Path(__file__).parent / "data"
CORPUS = ["h", "hs", "cx", "cy", "swap", "swap_cnot", "zz_memory", "transversal_s"]


def random_circuit(rng: random.Random, n: int, ncols: int) -> CliffordCircuit:
    """Random circuit in the compiler grammar, including BOX elements."""
    cols = []
    for _ in range(ncols):
        free = list(range(n))
        rng.shuffle(free)
        col = []
        while free:
            r = rng.random()
            if r < 0.12 and len(free) >= 2:
                ws = [free.pop() for _ in range(min(len(free), rng.randint(2, 3)))]
                parts = []
                for _ in range(rng.randint(1, 5)):
                    if rng.random() < 0.5:
                        parts.append(Element.gate("H", rng.choice(ws)))
                    else:
                        a, b = rng.sample(ws, 2)
                        parts.append(Element.gate("CZ", a, b))
                col.append(Element.box(parts))
            elif r < 0.35 and len(free) >= 2:
                a, b = free.pop(), free.pop()
                kind = rng.choice(["CZ", "SWAP", "CP"])
                if kind == "CP":
                    col.append(Element.cp(a, PauliOp.single(n, b, rng.choice("XYZ"))))
                else:
                    col.append(Element.gate(kind, a, b))
            elif r < 0.7:
                col.append(Element.gate(rng.choice(["H", "S", "HS", "X", "Z"]), free.pop()))
            else:
                free.pop()
        if col:
            cols.append(tuple(col))
    inits = tuple(q for q in range(n) if rng.random() < 0.4)
    finals = tuple((q, rng.choice("XY")) for q in range(n) if rng.random() < 0.4)
    rest = [q for q in range(n) if q not in inits]
    ins = []
    if rest and rng.random() < 0.5:
        ins.append(PauliOp.single(n, rng.choice(rest), rng.choice("XZ")))
    return CliffordCircuit(n, tuple(cols), tuple(ins), inits, finals)


def invariants(c: CliffordCircuit) -> tuple[int, int | None, int]:
    cx = spacetime_complex(c).complex
    h = homology(cx).dimension
    return h, distance(cx) if h else None, cx.n0


circuits = st.builds(
    lambda seed: (lambda rng: random_circuit(rng, rng.randint(1, 4), rng.randint(1, 5)))(random.Random(seed)),
    st.integers(0, 2**32 - 1),
)


@pytest.mark.parametrize("name", CORPUS)
def test_corpus_compiles_and_verifies(name):
    res = compile(parse_circuit((DATA / f"{name}.circ").read_text()), verify=True)
    assert res.report.ok
    assert set(s.tag for s in res.trace) <= set(TAGS)
    assert res.detectors[0] == res.detectors[1]


def test_transversal_s_has_two_complete_detectors():
    res = compile(parse_circuit((DATA / "transversal_s.circ").read_text()), verify=True)
    assert res.detectors == (2, 2)


def test_hadamard_compiles_to_one_edge():
    res = compile(parse_circuit((DATA / "h.circ").read_text()), verify=True)
    assert res.pattern.edges == [(0, 1)]
    assert str(res.report) == "equivalent: dim H1=2 d=1"
    assert [s.tag for s in res.trace] == ["MbqcH", "MergeLeft"]


@settings(max_examples=25, deadline=None)
@given(circuits)
def test_every_rewrite_step_preserves_the_complex(c):
    ref = invariants(c)
    seen = []

    def hook(step, prog):
        seen.append(step.tag)
        assert invariants(prog.to_circuit()) == ref, step

    compile_program(Program.from_circuit(c), hook)
    res = compile(c, verify=True)
    assert res.report.ok
    assert set(seen) <= set(TAGS)


@settings(max_examples=40, deadline=None)
@given(circuits)
def test_hadamard_separation_postcondition(c):
    c = relabel_swaps(Program.from_circuit(c))[0].to_circuit()
    sep = hadamard_separate(lower_single_qubit(lower_controlled_pauli(c)))
    assert is_hadamard_separated(Program.from_circuit(sep))


@given(st.integers(2, 5).flatmap(lambda n: st.tuples(st.just(n), st.integers(0, n - 1), st.integers(1, 4**n - 1))))
def test_controlled_pauli_lowering_preserves_the_map(args):
    n, c, v = args
    x, z = v & ((1 << n) - 1) & ~(1 << c), (v >> n) & ~(1 << c)
    if not x | z:
        return
    el = Element.cp(c, PauliOp(n, x, z))
    ops = controlled_pauli_ops(el)
    assert all(o.kind in ("H", "CZ", "CZBOX", "S", "HS", "X", "Y", "Z") for o in ops)
    a = CliffordCircuit(n, ((el,),))
    b = CliffordCircuit(n, tuple((o,) for o in ops))
    na, nb = normalize(a), normalize(b)
    for i in range(2 * n):
        va, vb = 1 << i, 1 << i
        for k in range(len(na.columns)):
            va = na.column_map(k, va)
        for k in range(len(nb.columns)):
            vb = nb.column_map(k, vb)
        assert va == vb


def test_compile_output_is_deterministic():
    c = parse_circuit((DATA / "transversal_s.circ").read_text())
    a = json.dumps(compile(c, verify=True).to_json(), sort_keys=True)
    b = json.dumps(compile(c, verify=True).to_json(), sort_keys=True)
    assert a == b


@pytest.mark.parametrize(
    "text",
    [
        "WIRES 1\nMPP X\nTICK\nH 0\n",
        "WIRES 2\nBOX { S 0 ; CZ 0 1 }\n",
    ],
)
def test_grammar_violations(text):
    with pytest.raises(CompileError):
        compile(parse_circuit(text))
