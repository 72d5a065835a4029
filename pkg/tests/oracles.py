"""Brute-force reference implementations and random instance generators for the tests.

Everything here is written directly from definitions and shares no code with
the package beyond its data types.
"""

from __future__ import annotations

import itertools
import random

import numpy as np
from hypothesis import strategies as st

from spacetime_forge.complex import ChainComplex2
from spacetime_forge.gf2 import BitMatrix
from spacetime_forge.pauli import PauliOp

# linear algebra by enumeration


def span_of(vectors) -> set[int]:
    out = {0}
    for v in vectors:
        out |= {u ^ v for u in out}
    return out


def brute_rank(rows) -> int:
    return len(span_of(rows)).bit_length() - 1


def mat_vec(rows, x: int) -> int:
    out = 0
    for i, r in enumerate(rows):
        if bin(r & x).count("1") & 1:
            out |= 1 << i
    return out


def columns(m: BitMatrix) -> list[int]:
    return [sum(((r >> j) & 1) << i for i, r in enumerate(m.rows)) for j in range(m.ncols)]


# chain complexes by enumeration


def cycles(c: ChainComplex2) -> list[int]:
    return [x for x in range(1 << c.n1) if mat_vec(c.d1.rows, x) == 0]


def brute_distance(c: ChainComplex2) -> int | None:
    bnd = span_of(columns(c.d2))
    ws = [bin(x).count("1") for x in cycles(c) if x not in bnd]
    return min(ws) if ws else None


def brute_h1(c: ChainComplex2) -> int:
    return (len(cycles(c)) // len(span_of(columns(c.d2)))).bit_length() - 1


def brute_mwd(c: ChainComplex2, s: int) -> tuple[int, int] | None:
    """(weight, minimiser that is lexicographically first as the tuple (x_0, x_1, ...))."""
    best = None
    for x in range(1 << c.n1):
        if mat_vec(c.d1.rows, x) != s:
            continue
        key = (bin(x).count("1"), [(x >> j) & 1 for j in range(c.n1)])
        if best is None or key < best[0]:
            best = (key, x)
    return None if best is None else (best[0][0], best[1])


def random_complex(rng: random.Random, n1: int, n2: int | None = None, n0: int | None = None, density=0.35) -> ChainComplex2:
    """A random complex: d1 random, d2 random columns of ker d1."""
    n0 = rng.randint(1, n1) if n0 is None else n0
    n2 = rng.randint(1, n1) if n2 is None else n2
    d1 = [sum(1 << j for j in range(n1) if rng.random() < density) for _ in range(n0)]
    ker = cycles(ChainComplex2(BitMatrix.zeros(n1, 0), BitMatrix.from_ints(d1, n1)))
    cols = [rng.choice(ker) for _ in range(n2)]
    d2 = BitMatrix.from_columns(cols, n1) if cols else BitMatrix.zeros(n1, 0)
    return ChainComplex2(d2, BitMatrix.from_ints(d1, n1))


def complexes(max_n1: int = 10):
    return st.builds(
        lambda seed, n1: random_complex(random.Random(seed), n1),
        st.integers(0, 2**32 - 1),
        st.integers(1, max_n1),
    )


# Paulis by matrices

_I = np.eye(2, dtype=complex)
_X = np.array([[0, 1], [1, 0]], dtype=complex)
_Z = np.array([[1, 0], [0, -1]], dtype=complex)
_Y = 1j * _X @ _Z
_H = np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2)
_S = np.diag([1, 1j])
LETTER = {"I": _I, "_": _I, "X": _X, "Y": _Y, "Z": _Z}


def kron_all(mats):
    out = np.eye(1, dtype=complex)
    for m in reversed(mats):  # qubit 0 is the least significant tensor factor
        out = np.kron(out, m)
    return out


def pauli_matrix(p: PauliOp) -> np.ndarray:
    return kron_all([LETTER[p.letter(q)] for q in range(p.n)])


def single_unitary(kind: str, n: int, q: int) -> np.ndarray:
    u = {"H": _H, "S": _S, "HS": _H @ _S, "X": _X, "Y": _Y, "Z": _Z, "I": _I}[kind]
    return kron_all([u if i == q else _I for i in range(n)])


def cz_unitary(n: int, a: int, b: int) -> np.ndarray:
    d = [(-1) ** (((k >> a) & 1) & ((k >> b) & 1)) for k in range(1 << n)]
    return np.diag(d).astype(complex)


def controlled_pauli_unitary(n: int, control: int, target: PauliOp) -> np.ndarray:
    p0 = kron_all([np.diag([1, 0]) if i == control else _I for i in range(n)])
    p1 = kron_all([np.diag([0, 1]) if i == control else _I for i in range(n)])
    return p0 + p1 @ pauli_matrix(target)


def conjugate_to_pauli(u: np.ndarray, p: PauliOp) -> PauliOp | None:
    """The Pauli proportional to u p u^dagger, found by trace overlaps."""
    m = u @ pauli_matrix(p) @ u.conj().T
    for x, z in itertools.product(range(1 << p.n), repeat=2):
        q = PauliOp(p.n, x, z)
        if abs(abs(np.trace(pauli_matrix(q).conj().T @ m)) - 2**p.n) < 1e-9:
            return q
    return None


def symplectic_commutes(p: PauliOp, q: PauliOp) -> bool:
    a, b = pauli_matrix(p), pauli_matrix(q)
    return np.allclose(a @ b, b @ a)


# random stabilizer groups and circuits


def random_commuting(rng: random.Random, n: int, count: int) -> list[PauliOp]:
    out: list[PauliOp] = []
    for _ in range(count):
        for _ in range(30):
            p = PauliOp(n, rng.getrandbits(n), rng.getrandbits(n))
            if not p.is_identity() and all(p.commutes(q) for q in out):
                out.append(p)
                break
    return out


def random_circuit_text(rng: random.Random, n: int, T: int, measure: bool = True) -> str:
    """A random circuit in the text format with ``T - 1`` gate columns."""
    lines = [f"WIRES {n}"]
    lines += [f"INPUT {p}" for p in random_commuting(rng, n, rng.randint(0, n))]
    for k in range(max(T - 1, 1)):
        if k:
            lines.append("TICK")
        free = list(range(n))
        rng.shuffle(free)
        while free:
            w = free.pop()
            r = rng.random()
            if r < 0.35:
                lines.append(f"{rng.choice(['H', 'S', 'HS', 'X', 'Z'])} {w}")
            elif r < 0.55 and free:
                lines.append(f"CZ {w} {free.pop()}")
            elif r < 0.7 and free:
                t = free.pop()
                lines.append(f"CP {w} {''.join(rng.choice('XYZ') if i == t else '_' for i in range(n))}")
            elif r < 0.85 and measure:
                ops = [w] + [free.pop() for _ in range(min(len(free), rng.randint(0, 1)))]
                lines.append(f"MPP {''.join(rng.choice('XYZ') if i in ops else '_' for i in range(n))}")
    return "\n".join(lines) + "\n"


def random_reducible_complex(rng: random.Random, n1: int, rule: str, density=0.35) -> tuple[ChainComplex2, int]:
    """A random complex with a gauge node to which rule A (or B) applies; returns it and its index."""
    n0 = rng.randint(1, n1)
    a, b = rng.sample(range(n1), 2)
    cols = [sum(1 << i for i in range(n0) if rng.random() < density) for _ in range(n1)]
    if rule == "A":
        cols[b] = cols[a]
        special = (1 << a) | (1 << b)
    else:
        cols[b] = 0
        special = 1 << b
    d1 = BitMatrix.from_columns(cols, n0)
    ker = cycles(ChainComplex2(BitMatrix.zeros(n1, 0), d1))
    gauge = [rng.choice(ker) for _ in range(rng.randint(0, n1 - 1))]
    pos = rng.randint(0, len(gauge))
    gauge.insert(pos, special)
    return ChainComplex2(BitMatrix.from_columns(gauge, n1), d1), pos
