"""Clifford circuits, Pauli propagation and the spacetime complex of a circuit.

A circuit is a list of columns; column ``c`` (1-based) acts between timesteps
``t = c`` and ``t = c + 1``.  |+> preparations at the start and single-qubit X/Y
measurements at the end are boundary elements: they do not occupy a column and
contribute X at ``t = 1`` and X or Y at ``t = T`` respectively.

Spacetime operators are :class:`PauliOp` values on ``n * T`` qubits, where wire
``i`` at time ``t`` is qubit ``(t - 1) * n + i``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Sequence

from .complex import ChainComplex2, Node, NodeKind
from .gf2 import BitMatrix, Span, bits_of, inverse, kernel_basis, rank, rowspace_basis, subspace_intersection
from .pauli import PauliError, PauliOp, omega_int, parse_pauli


class CircuitError(ValueError):
    pass


class CircuitParseError(CircuitError):
    def __init__(self, message: str, line: int | None = None):
        super().__init__(message if line is None else f"line {line}: {message}")
        self.line = line


SINGLE = ("H", "S", "HS", "X", "Y", "Z", "I")
MEASURE = ("MPP", "MX", "MY")

# images of X and Z under single-qubit Cliffords, as (x, z) bit pairs; phases dropped
_SINGLE_MAPS = {
    "H": ((0, 1), (1, 0)),
    "S": ((1, 1), (0, 1)),
    "HS": ((1, 1), (1, 0)),
    "X": ((1, 0), (0, 1)),
    "Y": ((1, 0), (0, 1)),
    "Z": ((1, 0), (0, 1)),
    "I": ((1, 0), (0, 1)),
}


@dataclass(frozen=True)
class Element:
    """One circuit element.

    ``wires`` is the support.  ``pauli`` holds the n-qubit target of ``CP`` (with
    the control in ``wires[0]``) or the measured operator of ``MPP``.  ``edges``
    lists the CZ pairs of a ``CZBOX``.  A ``BOX`` applies the unitary elements in
    ``parts`` in order as one gate, with no fault locations in between.
    """

    kind: str
    wires: tuple[int, ...]
    pauli: PauliOp | None = None
    edges: tuple[tuple[int, int], ...] = ()
    parts: tuple[Element, ...] = ()

    @classmethod
    def gate(cls, kind: str, *wires: int) -> Element:
        return cls(kind, tuple(wires))

    @classmethod
    def cp(cls, control: int, target: PauliOp) -> Element:
        if (target.x | target.z) >> control & 1:
            raise CircuitError("controlled-Pauli target acts on its control")
        if target.is_identity():
            raise CircuitError("controlled-Pauli with identity target")
        return cls("CP", (control, *target.support), target)

    @classmethod
    def cz_box(cls, edges: Iterable[tuple[int, int]], wires: Iterable[int] = ()) -> Element:
        es = tuple(sorted({(min(a, b), max(a, b)) for a, b in edges}))
        for a, b in es:
            if a == b:
                raise CircuitError("CZ on a single wire")
        members = sorted(set(wires) | {w for e in es for w in e})
        return cls("CZBOX", tuple(members), None, es)

    @classmethod
    def box(cls, parts: Iterable[Element]) -> Element:
        parts = tuple(parts)
        if not parts:
            raise CircuitError("empty BOX")
        for el in parts:
            if el.kind in MEASURE or el.kind == "PLUS":
                raise CircuitError(f"{el.kind} cannot appear inside a BOX")
        return cls("BOX", tuple(sorted({w for el in parts for w in el.wires})), None, (), parts)

    @classmethod
    def mpp(cls, op: PauliOp) -> Element:
        if op.is_identity():
            raise CircuitError("measurement of the identity")
        return cls("MPP", tuple(op.support), op)

    @property
    def is_measurement(self) -> bool:
        return self.kind in MEASURE

    def measured(self, n: int) -> PauliOp:
        if self.kind == "MPP":
            return self.pauli
        if self.kind == "MX":
            return PauliOp.single(n, self.wires[0], "X")
        if self.kind == "MY":
            return PauliOp.single(n, self.wires[0], "Y")
        raise CircuitError(f"{self.kind} is not a measurement")

    def images(self, n: int) -> dict[int, tuple[int, int]]:
        """Images (x, z) of X_q and Z_q for every wire q in the support."""
        out: dict[int, tuple[int, int]] = {}
        k = self.kind
        if k in _SINGLE_MAPS:
            (q,) = self.wires
            (ax, az), (bx, bz) = _SINGLE_MAPS[k]
            return {q: ((ax << q, az << q), (bx << q, bz << q))}
        if k in MEASURE:
            return {q: ((1 << q, 0), (0, 1 << q)) for q in self.wires}
        if k == "SWAP":
            a, b = self.wires
            return {a: ((1 << b, 0), (0, 1 << b)), b: ((1 << a, 0), (0, 1 << a))}
        if k in ("CZ", "CZBOX"):
            edges = self.edges if k == "CZBOX" else ((self.wires[0], self.wires[1]),)
            nbr = {q: 0 for q in self.wires}
            for a, b in edges:
                nbr[a] |= 1 << b
                nbr[b] |= 1 << a
            for q in self.wires:
                out[q] = ((1 << q, nbr[q]), (0, 1 << q))
            return out
        if k == "BOX":
            out = {q: ((1 << q, 0), (0, 1 << q)) for q in self.wires}
            for el in self.parts:
                img = el.images(n)
                out = {q: (_apply_images(img, *xq), _apply_images(img, *zq)) for q, (xq, zq) in out.items()}
            return out
        if k == "CP":
            c = self.wires[0]
            p = self.pauli
            out[c] = ((1 << c | p.x, p.z), (0, 1 << c))
            for q in self.wires[1:]:
                px, pz = (p.x >> q) & 1, (p.z >> q) & 1
                # X_q anticommutes with P_q iff P_q has a Z part, Z_q iff it has an X part
                out[q] = (
                    (1 << q, (1 << c) if pz else 0),
                    (0, (1 << q) | ((1 << c) if px else 0)),
                )
            return out
        raise CircuitError(f"unknown element kind {k!r}")

    def to_text(self) -> str:
        k = self.kind
        if k in ("CZ", "SWAP"):
            return f"{k} {self.wires[0]} {self.wires[1]}"
        if k == "CP":
            return f"CP {self.wires[0]} {self.pauli}"
        if k == "MPP":
            return f"MPP {self.pauli}"
        if k == "CZBOX":
            return "CZBOX { " + " ; ".join(f"CZ {a} {b}" for a, b in self.edges) + " }"
        if k == "BOX":
            inner = []
            for el in self.parts:
                if el.kind == "CZBOX":
                    inner += [f"CZ {a} {b}" for a, b in el.edges]
                else:
                    inner.append(el.to_text())
            return "BOX { " + " ; ".join(inner) + " }"
        return f"{k} {self.wires[0]}"


def _apply_images(img: dict[int, tuple[tuple[int, int], tuple[int, int]]], x: int, z: int) -> tuple[int, int]:
    """Image of the Pauli (x, z) under an element given by its per-wire images."""
    mask = 0
    for q in img:
        mask |= 1 << q
    ox, oz = x & ~mask, z & ~mask
    for q, ((xx, xz), (zx, zz)) in img.items():
        bx, bz = (x >> q) & 1, (z >> q) & 1
        if bx:
            ox ^= xx
            oz ^= xz
        if bz:
            ox ^= zx
            oz ^= zz
    return ox, oz


def _pack(x: int, z: int, n: int) -> int:
    return x | (z << n)


@dataclass(frozen=True)
class CliffordCircuit:
    n: int
    columns: tuple[tuple[Element, ...], ...] = ()
    inputs: tuple[PauliOp, ...] = ()
    inits: tuple[int, ...] = ()
    finals: tuple[tuple[int, str], ...] = ()
    normalized: bool = field(default=False, compare=False)

    @property
    def T(self) -> int:
        if not self.normalized:
            return normalize(self).T
        return len(self.columns) + 1

    @cached_property
    def _maps(self) -> tuple[tuple[int, ...], ...]:
        """Per column, the images of the 2n symplectic basis vectors."""
        n = self.n
        out = []
        for col in self.columns:
            img = [1 << i for i in range(2 * n)]
            for el in col:
                for q, ((xx, xz), (zx, zz)) in el.images(n).items():
                    img[q] = _pack(xx, xz, n)
                    img[n + q] = _pack(zx, zz, n)
            out.append(tuple(img))
        return tuple(out)

    @cached_property
    def _inverse_maps(self) -> tuple[tuple[int, ...], ...]:
        out = []
        for img in self._maps:
            m = BitMatrix.from_columns(list(img), 2 * self.n)
            out.append(inverse(m).columns())
        return tuple(out)

    def column_map(self, c: int, v: int, backward: bool = False) -> int:
        """Apply column ``c`` (0-based) to a packed n-qubit vector."""
        img = (self._inverse_maps if backward else self._maps)[c]
        out = 0
        while v:
            low = v & -v
            out ^= img[low.bit_length() - 1]
            v ^= low
        return out

    def to_text(self) -> str:
        lines = [f"WIRES {self.n}"]
        lines += [f"INPUT {p}" for p in self.inputs]
        lines += [f"PLUS {q}" for q in self.inits]
        for k, col in enumerate(self.columns):
            if k:
                lines.append("TICK")
            lines += [el.to_text() for el in col]
        if self.finals:
            if self.columns:
                lines.append("TICK")
            lines += [f"M{b} {q}" for q, b in self.finals]
        return "\n".join(lines) + "\n"


# parsing

_CZBOX = re.compile(r"^CZBOX\s*\{(.*)\}\s*$", re.IGNORECASE)
_BOX = re.compile(r"^BOX\s*\{(.*)\}\s*$", re.IGNORECASE)


def _ints(parts: Sequence[str], count: int, lineno: int) -> list[int]:
    if len(parts) != count:
        raise CircuitParseError(f"expected {count} wire indices", lineno)
    try:
        vals = [int(p) for p in parts]
    except ValueError:
        raise CircuitParseError("wire indices must be integers", lineno) from None
    if any(v < 0 for v in vals):
        raise CircuitParseError("wire indices must be non-negative", lineno)
    return vals


def parse_circuit(text: str) -> CliffordCircuit:
    n: int | None = None
    inputs: list[PauliOp] = []
    columns: list[list[Element]] = [[]]

    def pauli(s: str, lineno: int) -> PauliOp:
        try:
            p = parse_pauli(s)
        except PauliError as e:
            raise CircuitParseError(str(e), lineno) from None
        if p.n != n:
            raise CircuitParseError(f"Pauli string has {p.n} qubits, expected {n}", lineno)
        return p

    def instruction(parts: list[str], lineno: int) -> Element:
        key = parts[0].upper()
        if key in SINGLE or key in ("MX", "MY", "PLUS"):
            return Element.gate(key, *_ints(parts[1:], 1, lineno))
        if key in ("CZ", "SWAP"):
            a, b = _ints(parts[1:], 2, lineno)
            if a == b:
                raise CircuitParseError(f"{key} needs two distinct wires", lineno)
            return Element.gate(key, a, b)
        if key == "CP":
            if len(parts) != 3:
                raise CircuitParseError("CP takes a control and a Pauli string", lineno)
            (c,) = _ints(parts[1:2], 1, lineno)
            return Element.cp(c, pauli(parts[2], lineno))
        if key == "MPP":
            if len(parts) != 2:
                raise CircuitParseError("MPP takes one Pauli string", lineno)
            return Element.mpp(pauli(parts[1], lineno))
        raise CircuitParseError(f"unknown instruction {parts[0]!r}", lineno)

    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        m = _CZBOX.match(line)
        mb = _BOX.match(line)
        parts = line.split()
        key = "CZBOX" if m else "BOX" if mb else parts[0].upper()
        if key == "WIRES":
            if n is not None:
                raise CircuitParseError("duplicate WIRES line", lineno)
            (n,) = _ints(parts[1:], 1, lineno)
            continue
        if n is None:
            raise CircuitParseError("WIRES must come first", lineno)
        try:
            if key == "TICK":
                if len(parts) != 1:
                    raise CircuitParseError("TICK takes no arguments", lineno)
                columns.append([])
                continue
            if key == "INPUT":
                if len(parts) != 2:
                    raise CircuitParseError("INPUT takes one Pauli string", lineno)
                inputs.append(pauli(parts[1], lineno))
                continue
            if key == "CZBOX":
                edges = []
                for item in m.group(1).split(";"):
                    sub = item.split()
                    if not sub:
                        continue
                    if sub[0].upper() != "CZ":
                        raise CircuitParseError("CZBOX may only contain CZ gates", lineno)
                    edges.append(tuple(_ints(sub[1:], 2, lineno)))
                el = Element.cz_box(edges)
            elif key == "BOX":
                inner = [item.split() for item in mb.group(1).split(";")]
                el = Element.box(instruction(sub, lineno) for sub in inner if sub)
            else:
                el = instruction(parts, lineno)
        except CircuitParseError:
            raise
        except CircuitError as e:
            raise CircuitParseError(str(e), lineno) from None
        if any(w >= n for w in el.wires):
            raise CircuitParseError(f"wire index out of range for {n} wires", lineno)
        columns[-1].append(el)
    if n is None:
        raise CircuitParseError("missing WIRES line")
    return CliffordCircuit(n, tuple(tuple(c) for c in columns if c), tuple(inputs))


# normalization


def normalize(c: CliffordCircuit) -> CliffordCircuit:
    """Move boundary preparations/measurements out of the columns, drop columns that
    become empty, and pad with an identity column so that T is odd."""
    if c.normalized:
        return c
    n = c.n
    for col in c.columns:
        seen: set[int] = set()
        for el in col:
            if seen & set(el.wires):
                raise CircuitError("two elements act on the same wire in one column")
            seen |= set(el.wires)
    for p in c.inputs:
        if p.n != n:
            raise CircuitError("input stabilizer has the wrong qubit count")
    for i, p in enumerate(c.inputs):
        for q in c.inputs[i + 1 :]:
            if not p.commutes(q):
                raise CircuitError("input stabilizers do not commute")

    first: dict[int, int] = {}
    last: dict[int, int] = {}
    for k, col in enumerate(c.columns):
        for el in col:
            for w in el.wires:
                first.setdefault(w, k)
                last[w] = k
    inits = set(c.inits)
    finals = dict(c.finals)
    cols = []
    for k, col in enumerate(c.columns):
        kept = []
        for el in col:
            w = el.wires[0]
            if el.kind == "PLUS":
                if first[w] != k or w in inits:
                    raise CircuitError(f"|+> preparation on wire {w} is not at the start of the wire")
                inits.add(w)
            elif el.kind in ("MX", "MY") and last[w] == k:
                finals[w] = el.kind[1]
            else:
                kept.append(el)
        if kept:
            cols.append(tuple(kept))
    if len(cols) % 2:
        cols.append(())
    return CliffordCircuit(n, tuple(cols), c.inputs, tuple(sorted(inits)), tuple(sorted(finals.items())), True)


# propagation


def _placed(v: int, n: int, T: int, t: int) -> PauliOp:
    mask = (1 << n) - 1
    shift = (t - 1) * n
    return PauliOp(n * T, (v & mask) << shift, ((v >> n) & mask) << shift)


def propagate(p: PauliOp, t: int, t2: int, c: CliffordCircuit) -> PauliOp:
    """Conjugate ``p`` through the unitary columns between timesteps t and t2."""
    c = normalize(c)
    if t2 < t:
        raise CircuitError("propagation goes forward in time")
    v = p.vector
    for col in range(t - 1, t2 - 1):
        v = c.column_map(col, v)
    return PauliOp.from_vector(v, c.n)


def back_propagate(p: PauliOp, t2: int, t: int, c: CliffordCircuit) -> PauliOp:
    c = normalize(c)
    v = p.vector
    for col in range(t2 - 2, t - 2, -1):
        v = c.column_map(col, v, backward=True)
    return PauliOp.from_vector(v, c.n)


def spackle(p: PauliOp, t: int, c: CliffordCircuit) -> PauliOp:
    c = normalize(c)
    n, T = c.n, c.T
    if not 1 <= t <= T:
        raise CircuitError(f"timestep {t} outside 1..{T}")
    v = p.vector
    x = z = 0
    for s in range(t, T + 1):
        op = _placed(v, n, T, s)
        x, z = x ^ op.x, z ^ op.z
        if s < T:
            v = c.column_map(s - 1, v)
    return PauliOp(n * T, x, z)


def backle(p: PauliOp, t: int, c: CliffordCircuit) -> PauliOp:
    c = normalize(c)
    n, T = c.n, c.T
    if not 1 <= t <= T:
        raise CircuitError(f"timestep {t} outside 1..{T}")
    v = p.vector
    x = z = 0
    for s in range(t, 0, -1):
        op = _placed(v, n, T, s)
        x, z = x ^ op.x, z ^ op.z
        if s > 1:
            v = c.column_map(s - 2, v, backward=True)
    return PauliOp(n * T, x, z)


# measurement records and gauge generators


@dataclass(frozen=True)
class Record:
    """A measurement in the broad sense: input stabilizer, |+> preparation,
    mid-circuit measurement, or final single-qubit measurement."""

    kind: str  # "input", "plus", "measure", "final"
    label: str
    op: PauliOp
    t: int  # timestep at which its spackle starts

    @property
    def spackle_start(self) -> int:
        return self.t


def records(c: CliffordCircuit) -> list[Record]:
    c = normalize(c)
    n, T = c.n, c.T
    out = [Record("input", f"s{i}", p, 1) for i, p in enumerate(c.inputs)]
    out += [Record("plus", f"plus{q}", PauliOp.single(n, q, "X"), 1) for q in c.inits]
    k = 0
    for col_i, col in enumerate(c.columns):
        for el in col:
            if el.is_measurement:
                out.append(Record("measure", f"m{k}", el.measured(n), col_i + 2))
                k += 1
    out += [Record("final", f"M{b}{q}", PauliOp.single(n, q, b), T) for q, b in c.finals]
    return out


def record_spackle(r: Record, c: CliffordCircuit) -> PauliOp:
    return spackle(r.op, r.t, c)


def record_backle(r: Record, c: CliffordCircuit) -> PauliOp:
    # a measurement in column k acts between t = k + 1 and k + 2; its backle starts at k + 1
    t = r.t - 1 if r.kind == "measure" else r.t
    return backle(r.op, t, c)


@dataclass(frozen=True)
class Generator:
    label: str
    op: PauliOp


def _centralizer(m: PauliOp) -> list[PauliOp]:
    """Basis of the Paulis on supp(m) that commute with m (2|supp| - 1 elements)."""
    sup = m.support
    k = len(sup)
    local = m.restrict(sup)
    row = omega_int(local.vector, k)
    ker = kernel_basis(BitMatrix.from_ints([row], 2 * k))
    return [PauliOp.from_vector(v, k).embed(m.n, sup) for v in ker.rows]


def elementary_propagation_operators(c: CliffordCircuit) -> list[Generator]:
    """Gauge generators of the spacetime subsystem code of ``c``."""
    c = normalize(c)
    n, T = c.n, c.T
    gens: list[Generator] = []
    for i, p in enumerate(c.inputs):
        gens.append(Generator(f"input s{i}", _placed(p.vector, n, T, 1)))
    for q in c.inits:
        gens.append(Generator(f"plus w{q}", _placed(1 << q, n, T, 1)))
    for k, col in enumerate(c.columns):
        t = k + 1
        covered: set[int] = set()
        for el in col:
            covered |= set(el.wires)
            where = f"{el.kind} c{t}"
            if el.is_measurement:
                m = el.measured(n)
                gens.append(Generator(f"{where} M", _placed(m.vector, n, T, t + 1)))
                for j, r in enumerate(_centralizer(m)):
                    a, b = _placed(r.vector, n, T, t), _placed(r.vector, n, T, t + 1)
                    gens.append(Generator(f"{where} R{j}", a * b))
                continue
            imgs = el.images(n)
            for q in el.wires:
                (xx, xz), (zx, zz) = imgs[q]
                for letter, bit, img in (("X", 1 << q, _pack(xx, xz, n)), ("Z", 1 << (n + q), _pack(zx, zz, n))):
                    a = _placed(bit, n, T, t)
                    b = _placed(img, n, T, t + 1)
                    gens.append(Generator(f"{where} {letter}{q}", a * b))
        for q in range(n):
            if q in covered:
                continue
            for letter, bit in (("X", 1 << q), ("Z", 1 << (n + q))):
                gens.append(Generator(f"wire c{t} {letter}{q}", _placed(bit, n, T, t) * _placed(bit, n, T, t + 1)))
    for q, b in c.finals:
        gens.append(Generator(f"M{b} w{q}", _placed(PauliOp.single(n, q, b).vector, n, T, T)))
    return gens


def center_basis(h_g: BitMatrix, nq: int) -> BitMatrix:
    """Basis (RREF) of the elements of rowspace(H_G) commuting with all of H_G."""
    if h_g.nrows == 0:
        return BitMatrix.zeros(0, 2 * nq)
    swapped = BitMatrix.from_ints([omega_int(r, nq) for r in h_g.rows], 2 * nq)
    gram = swapped @ h_g.transpose()
    vecs = []
    for y in kernel_basis(gram).rows:
        v = 0
        for i in bits_of(y):
            v ^= h_g.rows[i]
        vecs.append(v)
    return rowspace_basis(BitMatrix.from_ints(vecs, 2 * nq))


# classification


@dataclass(frozen=True)
class StabilizerClass:
    kind: str  # "detector", "incomplete-forward", "incomplete-backward", "unclassified"
    operator: PauliOp
    check: tuple[str, ...] = ()
    ambiguous: bool = False

    def to_json(self) -> dict:
        out = {"kind": self.kind, "check": list(self.check)}
        if self.ambiguous:
            out["also_backle"] = True
        return out


def _solve_combination(target: int, vectors: Sequence[int]) -> int | None:
    """Bitmask of ``vectors`` summing to ``target``, or None."""
    basis: dict[int, tuple[int, int]] = {}
    for i, v in enumerate(vectors):
        tag = 1 << i
        while v:
            lead = v.bit_length() - 1
            if lead in basis:
                bv, bt = basis[lead]
                v ^= bv
                tag ^= bt
            else:
                basis[lead] = (v, tag)
                break
    tag = 0
    while target:
        lead = target.bit_length() - 1
        if lead not in basis:
            return None
        bv, bt = basis[lead]
        target ^= bv
        tag ^= bt
    return tag


def _classify(center: BitMatrix, c: CliffordCircuit) -> list[StabilizerClass]:
    n, T = c.n, c.T
    nq = n * T
    recs = records(c)
    fwd = [r for r in recs if r.kind != "final"]
    fin = [r for r in recs if r.kind == "final"]
    sp = [record_spackle(r, c).vector for r in fwd]
    fin_ops = [_placed(r.op.vector, n, T, T).vector for r in fin]
    bk = [record_backle(r, c).vector for r in recs if r.kind in ("measure", "final")]

    last_mask = 0
    for i in range((T - 1) * n, nq):
        last_mask |= (1 << i) | (1 << (nq + i))

    # detectors: spackle combinations whose last-timestep part is explained by final measurements
    k1, k2 = len(sp), len(fin_ops)
    constraint = [(v & last_mask) for v in sp] + fin_ops
    det_vecs = []
    if k1 + k2:
        rows_t = BitMatrix.from_columns(constraint, 2 * nq)
        for y in kernel_basis(rows_t).rows:
            v = 0
            for i in bits_of(y & ((1 << k1) - 1)):
                v ^= sp[i]
            if v:
                det_vecs.append(v)
    cspan = center.rows
    det_space = _intersect(det_vecs, cspan, 2 * nq)
    fwd_space = _intersect(sp, cspan, 2 * nq)
    bk_space = _intersect(bk, cspan, 2 * nq)
    bk_span = Span(bk)

    out: list[StabilizerClass] = []
    span = Span()
    for v in det_space:
        if span.add(v):
            tag = _solve_combination(v, sp)
            used = [fwd[i].label for i in bits_of(tag)]
            tail = v & last_mask
            ftag = _solve_combination(tail, fin_ops) or 0
            used += [fin[j].label for j in bits_of(ftag)]
            out.append(StabilizerClass("detector", PauliOp.from_vector(v, nq), tuple(used)))
    for v in fwd_space:
        if span.add(v):
            tag = _solve_combination(v, sp)
            used = tuple(fwd[i].label for i in bits_of(tag))
            out.append(StabilizerClass("incomplete-forward", PauliOp.from_vector(v, nq), used, v in bk_span))
    bk_recs = [r for r in recs if r.kind in ("measure", "final")]
    for v in bk_space:
        if span.add(v):
            tag = _solve_combination(v, bk)
            used = tuple(bk_recs[i].label for i in bits_of(tag))
            out.append(StabilizerClass("incomplete-backward", PauliOp.from_vector(v, nq), used))
    for v in cspan:
        if span.add(v):
            out.append(StabilizerClass("unclassified", PauliOp.from_vector(v, nq)))
    return out


def _intersect(vectors: Sequence[int], center_rows: Sequence[int], width: int) -> list[int]:
    if not vectors or not center_rows:
        return []
    a = BitMatrix.from_ints(list(vectors), width)
    b = BitMatrix.from_ints(list(center_rows), width)
    return list(subspace_intersection(a, b).rows)


# spacetime complex


@dataclass(frozen=True)
class SpacetimeComplex:
    complex: ChainComplex2
    circuit: CliffordCircuit
    gauge: tuple[Generator, ...]
    H_G: BitMatrix
    H_S: BitMatrix
    classification: tuple[StabilizerClass, ...]

    @property
    def n(self) -> int:
        return self.circuit.n

    @property
    def T(self) -> int:
        return self.circuit.T

    def coordinate(self, index: int) -> tuple[int, int, str]:
        """(wire, timestep, 'X' | 'Z') of a C1 basis element."""
        nq = self.n * self.T
        letter = "X" if index < nq else "Z"
        q = index % nq
        return q % self.n, q // self.n + 1, letter

    @property
    def detectors(self) -> list[StabilizerClass]:
        return [s for s in self.classification if s.kind == "detector"]

    def counting(self) -> dict[str, int]:
        """Ranks of gauge and stabilizer groups against 2nT."""
        rg = rank(self.H_G)
        rs = rank(self.H_S)
        return {
            "rank_gauge": rg,
            "rank_stabilizers": rs,
            "dim_H1": 2 * self.n * self.T - rg - rs,
            "total": 2 * self.n * self.T,
        }


def spacetime_complex(c: CliffordCircuit) -> SpacetimeComplex:
    """Gauge complex G -> E -> S of the spacetime subsystem code.

    Stabilizer rows are ordered as full detectors, then incomplete forward
    detectors, then incomplete backward detectors.
    """
    c = normalize(c)
    n, T = c.n, c.T
    nq = n * T
    gens = elementary_propagation_operators(c)
    h_g = BitMatrix.from_ints([g.op.vector for g in gens], 2 * nq)
    center = center_basis(h_g, nq)
    classes = _classify(center, c)
    h_s = BitMatrix.from_ints([s.operator.vector for s in classes], 2 * nq)
    labels1 = tuple(
        Node(f"X[{q % n},{q // n + 1}]", NodeKind.ERROR_X) for q in range(nq)
    ) + tuple(Node(f"Z[{q % n},{q // n + 1}]", NodeKind.ERROR_Z) for q in range(nq))
    labels2 = tuple(Node(g.label, NodeKind.GAUGE) for g in gens)
    labels0 = tuple(Node(f"d{i}:{s.kind}", NodeKind.DETECTOR) for i, s in enumerate(classes))
    d1 = BitMatrix.from_ints([omega_int(r, nq) for r in h_s.rows], 2 * nq)
    cx = ChainComplex2(h_g.transpose(), d1, labels2, labels1, labels0)
    return SpacetimeComplex(cx, c, tuple(gens), h_g, h_s, tuple(classes))


def classify_stabilizers(sc: SpacetimeComplex, c: CliffordCircuit | None = None) -> tuple[StabilizerClass, ...]:
    if c is not None and normalize(c) != sc.circuit:
        return spacetime_complex(c).classification
    return sc.classification


def identity_circuit(n: int, T: int, inputs: Sequence[PauliOp] = ()) -> CliffordCircuit:
    """Bare wires over T timesteps (T odd)."""
    if T % 2 == 0:
        raise CircuitError("T must be odd")
    cols = tuple(tuple(Element.gate("I", q) for q in range(n)) for _ in range(T - 1))
    return CliffordCircuit(n, cols, tuple(inputs), (), (), True)


__all__ = [
    "CircuitError",
    "CircuitParseError",
    "Element",
    "CliffordCircuit",
    "parse_circuit",
    "normalize",
    "propagate",
    "back_propagate",
    "spackle",
    "backle",
    "Record",
    "records",
    "record_spackle",
    "record_backle",
    "Generator",
    "elementary_propagation_operators",
    "center_basis",
    "StabilizerClass",
    "SpacetimeComplex",
    "spacetime_complex",
    "classify_stabilizers",
    "identity_circuit",
]
