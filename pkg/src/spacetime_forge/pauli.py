"""Pauli operators in binary symplectic form and the code complexes built from them."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

from .complex import ChainComplex2, ComplexError, Node, NodeKind
from .gf2 import BitMatrix, BitVector, Span, bits_of, kernel_basis, popcount, rank, rowspace_basis


class PauliError(ValueError):
    pass


_LETTERS = {"I": (0, 0), "_": (0, 0), "X": (1, 0), "Y": (1, 1), "Z": (0, 1)}


@dataclass(frozen=True)
class PauliOp:
    """An n-qubit Pauli with phases dropped; ``x`` and ``z`` are bitmasks over qubits."""

    n: int
    x: int = 0
    z: int = 0

    def __post_init__(self) -> None:
        mask = (1 << self.n) - 1
        if self.x & ~mask or self.z & ~mask:
            raise PauliError("Pauli bits outside the qubit range")

    @classmethod
    def from_string(cls, text: str) -> PauliOp:
        return parse_pauli(text)

    @classmethod
    def single(cls, n: int, qubit: int, letter: str) -> PauliOp:
        bx, bz = _LETTERS[letter]
        return cls(n, bx << qubit, bz << qubit)

    @classmethod
    def from_vector(cls, v: BitVector | int, n: int) -> PauliOp:
        data = v.data if isinstance(v, BitVector) else v
        mask = (1 << n) - 1
        return cls(n, data & mask, (data >> n) & mask)

    @property
    def vector(self) -> int:
        """(x|z) packed as x in the low n bits, z in the high n bits."""
        return self.x | (self.z << self.n)

    def to_bitvector(self) -> BitVector:
        return BitVector(2 * self.n, self.vector)

    @property
    def x_part(self) -> BitVector:
        return BitVector(self.n, self.x)

    @property
    def z_part(self) -> BitVector:
        return BitVector(self.n, self.z)

    @property
    def weight(self) -> int:
        return popcount(self.x | self.z)

    @property
    def symplectic_weight(self) -> int:
        return popcount(self.x) + popcount(self.z)

    @property
    def support(self) -> list[int]:
        return bits_of(self.x | self.z)

    def letter(self, q: int) -> str:
        return "IXZY"[((self.x >> q) & 1) | (((self.z >> q) & 1) << 1)]

    def __mul__(self, other: PauliOp) -> PauliOp:
        if self.n != other.n:
            raise PauliError("qubit count mismatch")
        return PauliOp(self.n, self.x ^ other.x, self.z ^ other.z)

    def commutes(self, other: PauliOp) -> bool:
        return commutes(self, other)

    def is_identity(self) -> bool:
        return not (self.x or self.z)

    def count_y(self) -> int:
        return popcount(self.x & self.z)

    def restrict(self, qubits: Sequence[int]) -> PauliOp:
        x = z = 0
        for k, q in enumerate(qubits):
            x |= ((self.x >> q) & 1) << k
            z |= ((self.z >> q) & 1) << k
        return PauliOp(len(qubits), x, z)

    def embed(self, n: int, qubits: Sequence[int]) -> PauliOp:
        x = z = 0
        for k, q in enumerate(qubits):
            x |= ((self.x >> k) & 1) << q
            z |= ((self.z >> k) & 1) << q
        return PauliOp(n, x, z)

    def __str__(self) -> str:
        return "".join(self.letter(q) for q in range(self.n))


def parse_pauli(text: str) -> PauliOp:
    text = text.strip()
    x = z = 0
    for q, ch in enumerate(text):
        try:
            bx, bz = _LETTERS[ch.upper()]
        except KeyError:
            raise PauliError(f"bad Pauli character {ch!r}") from None
        x |= bx << q
        z |= bz << q
    return PauliOp(len(text), x, z)


def symplectic_product(u: int, v: int, n: int) -> int:
    mask = (1 << n) - 1
    return popcount(((u & mask) & (v >> n)) ^ ((u >> n) & (v & mask))) & 1


def commutes(p: PauliOp, q: PauliOp) -> bool:
    if p.n != q.n:
        raise PauliError("qubit count mismatch")
    return (popcount(p.x & q.z) + popcount(p.z & q.x)) % 2 == 0


def omega_int(v: int, n: int) -> int:
    """Apply the block swap Ω to a packed (x|z) vector."""
    mask = (1 << n) - 1
    return ((v & mask) << n) | (v >> n)


def omega(n: int) -> BitMatrix:
    rows = [1 << (n + i) for i in range(n)] + [1 << i for i in range(n)]
    return BitMatrix.from_ints(rows, 2 * n)


def symplectic_matrix(ops: Sequence[PauliOp], n: int | None = None) -> BitMatrix:
    if n is None:
        if not ops:
            raise PauliError("qubit count needed for an empty operator list")
        n = ops[0].n
    for p in ops:
        if p.n != n:
            raise PauliError("qubit count mismatch")
    return BitMatrix.from_ints([p.vector for p in ops], 2 * n)


def _apply_omega_columns(m: BitMatrix, n: int) -> BitMatrix:
    """M·Ω, which swaps the X and Z column blocks."""
    return BitMatrix.from_ints([omega_int(r, n) for r in m.rows], 2 * n)


def _commutation_failures(a: BitMatrix, b: BitMatrix, n: int) -> list[tuple[int, int]]:
    out = []
    for i, r in enumerate(a.rows):
        w = omega_int(r, n)
        for j, s in enumerate(b.rows):
            if popcount(w & s) & 1:
                out.append((i, j))
    return out


@dataclass(frozen=True)
class StabilizerCode:
    n: int
    H: BitMatrix

    def __post_init__(self) -> None:
        if self.H.ncols != 2 * self.n:
            raise PauliError("stabilizer matrix must have 2n columns")
        bad = _commutation_failures(self.H, self.H, self.n)
        if bad:
            raise PauliError(f"stabilizers {bad[0]} anticommute")

    @classmethod
    def from_paulis(cls, ops: Iterable[PauliOp | str], n: int | None = None) -> StabilizerCode:
        ops = [parse_pauli(p) if isinstance(p, str) else p for p in ops]
        if n is None:
            n = ops[0].n
        return cls(n, symplectic_matrix(ops, n))

    @property
    def generators(self) -> list[PauliOp]:
        return [PauliOp.from_vector(r, self.n) for r in self.H.rows]

    @property
    def k(self) -> int:
        return self.n - rank(self.H)

    def is_css(self) -> bool:
        mask = (1 << self.n) - 1
        return all(not (r & mask) or not (r >> self.n) for r in self.H.rows)


@dataclass(frozen=True)
class SubsystemCode:
    n: int
    H_G: BitMatrix
    H_S: BitMatrix

    def __post_init__(self) -> None:
        if self.H_G.ncols != 2 * self.n or self.H_S.ncols != 2 * self.n:
            raise PauliError("gauge and stabilizer matrices must have 2n columns")
        gauge = Span(self.H_G.rows)
        for i, r in enumerate(self.H_S.rows):
            if r not in gauge:
                raise PauliError(f"stabilizer {i} is not a gauge operator")
        bad = _commutation_failures(self.H_S, self.H_G, self.n)
        if bad:
            raise PauliError(f"stabilizer {bad[0][0]} anticommutes with gauge {bad[0][1]}")

    @classmethod
    def from_paulis(
        cls, gauge: Iterable[PauliOp | str], stabilizers: Iterable[PauliOp | str] | None = None, n: int | None = None
    ) -> SubsystemCode:
        g = [parse_pauli(p) if isinstance(p, str) else p for p in gauge]
        if n is None:
            n = g[0].n
        hg = symplectic_matrix(g, n)
        if stabilizers is None:
            hs = center(hg, n)
        else:
            hs = symplectic_matrix([parse_pauli(p) if isinstance(p, str) else p for p in stabilizers], n)
        return cls(n, hg, hs)

    @property
    def gauge_ops(self) -> list[PauliOp]:
        return [PauliOp.from_vector(r, self.n) for r in self.H_G.rows]

    @property
    def stabilizers(self) -> list[PauliOp]:
        return [PauliOp.from_vector(r, self.n) for r in self.H_S.rows]


def center(h_g: BitMatrix, n: int) -> BitMatrix:
    """Basis of the elements of rowspace(H_G) commuting with every row of H_G."""
    if h_g.nrows == 0:
        return BitMatrix.zeros(0, 2 * n)
    # y H_G is central iff H_G Ω H_G^T y^T = 0
    gram = _apply_omega_columns(h_g, n) @ h_g.transpose()
    ys = kernel_basis(gram)
    vecs = []
    for y in ys.rows:
        v = 0
        for i in bits_of(y):
            v ^= h_g.rows[i]
        vecs.append(v)
    return rowspace_basis(BitMatrix.from_ints(vecs, 2 * n))


def _error_labels(n: int) -> tuple[Node, ...]:
    return tuple(Node(f"x{q}", NodeKind.ERROR_X) for q in range(n)) + tuple(
        Node(f"z{q}", NodeKind.ERROR_Z) for q in range(n)
    )


def css_complex(h_x: BitMatrix, h_z: BitMatrix) -> ChainComplex2:
    """X-stabilizers -> qubits -> Z-stabilizers with d2 = H_X^T and d1 = H_Z."""
    if h_x.ncols != h_z.ncols:
        raise PauliError("H_X and H_Z have different widths")
    n = h_x.ncols
    if not (h_z @ h_x.transpose()).is_zero():
        raise PauliError("H_Z H_X^T != 0: X and Z stabilizers anticommute")
    return ChainComplex2(
        h_x.transpose(),
        h_z,
        tuple(Node(f"sx{i}", NodeKind.GAUGE) for i in range(h_x.nrows)),
        tuple(Node(f"q{q}", NodeKind.ERROR) for q in range(n)),
        tuple(Node(f"sz{i}", NodeKind.DETECTOR) for i in range(h_z.nrows)),
    )


def stabilizer_complex(code: StabilizerCode) -> ChainComplex2:
    """Stabilizers -> errors -> stabilizers with d2 = H^T and d1 = H Ω."""
    n = code.n
    return ChainComplex2(
        code.H.transpose(),
        _apply_omega_columns(code.H, n),
        tuple(Node(f"g{i}", NodeKind.GAUGE) for i in range(code.H.nrows)),
        _error_labels(n),
        tuple(Node(f"s{i}", NodeKind.DETECTOR) for i in range(code.H.nrows)),
    )


def subsystem_complex(code: SubsystemCode) -> ChainComplex2:
    """Gauge -> errors -> stabilizers with d2 = H_G^T and d1 = H_S Ω."""
    n = code.n
    return ChainComplex2(
        code.H_G.transpose(),
        _apply_omega_columns(code.H_S, n),
        tuple(Node(f"g{i}", NodeKind.GAUGE) for i in range(code.H_G.nrows)),
        _error_labels(n),
        tuple(Node(f"s{i}", NodeKind.DETECTOR) for i in range(code.H_S.nrows)),
    )


def bacon_shor(rows: int, cols: int | None = None) -> SubsystemCode:
    """Bacon-Shor code on a grid: XX gauge on vertical neighbours, ZZ on horizontal ones.

    Stabilizers are the X products of adjacent row pairs and the Z products of
    adjacent column pairs.
    """
    cols = rows if cols is None else cols
    n = rows * cols

    def q(r: int, c: int) -> int:
        return r * cols + c

    gauge = []
    for r in range(rows - 1):
        for c in range(cols):
            gauge.append(PauliOp(n, (1 << q(r, c)) | (1 << q(r + 1, c)), 0))
    for r in range(rows):
        for c in range(cols - 1):
            gauge.append(PauliOp(n, 0, (1 << q(r, c)) | (1 << q(r, c + 1))))
    stabs = []
    for r in range(rows - 1):
        stabs.append(PauliOp(n, sum(1 << q(rr, c) for rr in (r, r + 1) for c in range(cols)), 0))
    for c in range(cols - 1):
        stabs.append(PauliOp(n, 0, sum(1 << q(r, cc) for cc in (c, c + 1) for r in range(rows))))
    return SubsystemCode(n, symplectic_matrix(gauge, n), symplectic_matrix(stabs, n))


# text format


@dataclass(frozen=True)
class CodeFile:
    n: int
    gauge: tuple[PauliOp, ...]
    stabilizers: tuple[PauliOp, ...]
    sx: tuple[int, ...]
    sz: tuple[int, ...]

    @property
    def is_css_shortcut(self) -> bool:
        return bool(self.sx or self.sz) and not self.gauge and not self.stabilizers

    def to_complex(self) -> ChainComplex2:
        if self.is_css_shortcut:
            return css_complex(
                BitMatrix.from_ints(list(self.sx), self.n), BitMatrix.from_ints(list(self.sz), self.n)
            )
        stabs = list(self.stabilizers) + [PauliOp(self.n, x, 0) for x in self.sx] + [
            PauliOp(self.n, 0, z) for z in self.sz
        ]
        if self.gauge:
            code = SubsystemCode.from_paulis(self.gauge, stabs or None, self.n)
            return subsystem_complex(code)
        return stabilizer_complex(StabilizerCode.from_paulis(stabs, self.n))

    def stabilizer_code(self) -> StabilizerCode:
        stabs = list(self.stabilizers) + [PauliOp(self.n, x, 0) for x in self.sx] + [
            PauliOp(self.n, 0, z) for z in self.sz
        ]
        return StabilizerCode.from_paulis(stabs, self.n) if stabs else StabilizerCode(
            self.n, BitMatrix.zeros(0, 2 * self.n)
        )


class ParseError(ValueError):
    def __init__(self, message: str, line: int | None = None):
        super().__init__(message if line is None else f"line {line}: {message}")
        self.line = line


def _bits(text: str, n: int, lineno: int) -> int:
    if len(text) != n or set(text) - {"0", "1"}:
        raise ParseError(f"expected a {n}-bit string, got {text!r}", lineno)
    return int(text[::-1], 2)


def parse_code(text: str) -> CodeFile:
    n = None
    gauge, stabs, sx, sz = [], [], [], []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        key = parts[0].upper()
        if len(parts) != 2:
            raise ParseError(f"expected '<KEY> <value>', got {line!r}", lineno)
        if key == "N":
            try:
                n = int(parts[1])
            except ValueError:
                raise ParseError("qubit count must be an integer", lineno) from None
            continue
        if n is None:
            raise ParseError("N line must come first", lineno)
        if key in ("G", "S"):
            try:
                p = parse_pauli(parts[1])
            except PauliError as e:
                raise ParseError(str(e), lineno) from None
            if p.n != n:
                raise ParseError(f"Pauli string has {p.n} qubits, expected {n}", lineno)
            (gauge if key == "G" else stabs).append(p)
        elif key == "SX":
            sx.append(_bits(parts[1], n, lineno))
        elif key == "SZ":
            sz.append(_bits(parts[1], n, lineno))
        else:
            raise ParseError(f"unknown keyword {parts[0]!r}", lineno)
    if n is None:
        raise ParseError("missing N line")
    return CodeFile(n, tuple(gauge), tuple(stabs), tuple(sx), tuple(sz))


def format_code(code: StabilizerCode | SubsystemCode) -> str:
    lines = [f"N {code.n}"]
    if isinstance(code, SubsystemCode):
        lines += [f"G {p}" for p in code.gauge_ops]
        lines += [f"S {p}" for p in code.stabilizers]
    else:
        lines += [f"S {p}" for p in code.generators]
    return "\n".join(lines) + "\n"


__all__ = [
    "PauliError",
    "PauliOp",
    "parse_pauli",
    "commutes",
    "symplectic_product",
    "omega",
    "omega_int",
    "symplectic_matrix",
    "StabilizerCode",
    "SubsystemCode",
    "center",
    "css_complex",
    "stabilizer_complex",
    "subsystem_complex",
    "bacon_shor",
    "CodeFile",
    "ParseError",
    "parse_code",
    "format_code",
    "ComplexError",
]
