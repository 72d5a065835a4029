"""Length-2 chain complexes over GF(2): homology, distance and minimum-weight decoding.

Complexes are stored as C2 --d2--> C1 --d1--> C0.  In code and spacetime
complexes C2 holds gauge (or stabilizer) generators, C1 holds single-qubit
error nodes and C0 holds detectors.
"""

from __future__ import annotations

import enum
import functools
import itertools
import json
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Any, Iterable, Sequence

import networkx as nx
import numpy as np

from .gf2 import (
    BitMatrix,
    BitVector,
    ShapeError,
    Span,
    bits_of,
    complement_basis,
    in_rowspace,
    inverse,
    kernel_basis,
    multiply,
    pack_words,
    popcount,
    rank,
    rowspace_basis,
    solve,
)

DEFAULT_CAP = 24


def default_cap() -> int:
    """Enumeration cap, overridable through ``SPACETIME_FORGE_CAP``."""
    env = os.environ.get("SPACETIME_FORGE_CAP")
    return int(env) if env else DEFAULT_CAP


class ComplexError(ValueError):
    """Domain error raised by complex operations."""


class ChainConditionError(ComplexError):
    def __init__(self, violations: list[tuple[int, int]]):
        self.violations = violations
        super().__init__(f"d1 * d2 != 0 at (C2, C0) pairs {violations[:10]}")


class InfeasibleSyndrome(ComplexError):
    pass


class EnumerationOverflow(ComplexError):
    pass


class NodeKind(str, enum.Enum):
    GAUGE = "Gauge"
    ERROR_X = "ErrorX"
    ERROR_Z = "ErrorZ"
    ERROR = "ErrorGeneric"
    DETECTOR = "Detector"


@dataclass(frozen=True)
class Node:
    name: str
    kind: NodeKind


def _default_labels(prefix: str, n: int, kind: NodeKind) -> tuple[Node, ...]:
    return tuple(Node(f"{prefix}{i}", kind) for i in range(n))


def chain_violations(d2: BitMatrix, d1: BitMatrix) -> list[tuple[int, int]]:
    """(C2 index, C0 index) pairs whose neighbourhoods overlap oddly."""
    prod = multiply(d1, d2)
    return [(j, i) for i, row in enumerate(prod.rows) for j in bits_of(row)]


@dataclass(frozen=True)
class ChainComplex2:
    d2: BitMatrix
    d1: BitMatrix
    labels2: tuple[Node, ...] = ()
    labels1: tuple[Node, ...] = ()
    labels0: tuple[Node, ...] = ()
    check: bool = field(default=True, compare=False, repr=False)

    def __post_init__(self) -> None:
        if self.d1.ncols != self.d2.nrows:
            raise ShapeError(f"d1 {self.d1.shape} and d2 {self.d2.shape} do not compose")
        if not self.labels2:
            object.__setattr__(self, "labels2", _default_labels("g", self.d2.ncols, NodeKind.GAUGE))
        if not self.labels1:
            object.__setattr__(self, "labels1", _default_labels("e", self.d2.nrows, NodeKind.ERROR))
        if not self.labels0:
            object.__setattr__(self, "labels0", _default_labels("s", self.d1.nrows, NodeKind.DETECTOR))
        for labels, n in ((self.labels2, self.n2), (self.labels1, self.n1), (self.labels0, self.n0)):
            if len(labels) != n:
                raise ShapeError("label count does not match dimension")
        if self.check:
            bad = chain_violations(self.d2, self.d1)
            if bad:
                raise ChainConditionError(bad)

    @classmethod
    def from_lists(cls, d2: Sequence[Sequence[int]], d1: Sequence[Sequence[int]], **kw: Any) -> ChainComplex2:
        m2 = BitMatrix.from_lists(d2)
        m1 = BitMatrix.from_lists(d1, m2.nrows if not d1 else None)
        return cls(m2, m1, **kw)

    @property
    def n2(self) -> int:
        return self.d2.ncols

    @property
    def n1(self) -> int:
        return self.d2.nrows

    @property
    def n0(self) -> int:
        return self.d1.nrows

    def d2_columns(self) -> tuple[int, ...]:
        return self.d2.columns()

    def boundary(self, x: BitVector) -> BitVector:
        return self.d1.apply(x)

    def syndrome(self, x: BitVector) -> BitVector:
        return self.d1.apply(x)

    def dual(self) -> ChainComplex2:
        """The transposed complex C0 --d1ᵀ--> C1 --d2ᵀ--> C2."""
        return ChainComplex2(
            self.d1.transpose(), self.d2.transpose(), self.labels0, self.labels1, self.labels2
        )

    def relabel(self, labels2=None, labels1=None, labels0=None) -> ChainComplex2:
        return ChainComplex2(
            self.d2,
            self.d1,
            tuple(labels2) if labels2 is not None else self.labels2,
            tuple(labels1) if labels1 is not None else self.labels1,
            tuple(labels0) if labels0 is not None else self.labels0,
            check=False,
        )


@dataclass(frozen=True)
class ValidationReport:
    ok: bool
    violations: tuple[tuple[int, int], ...]

    def __bool__(self) -> bool:
        return self.ok


def validate(c: ChainComplex2) -> ValidationReport:
    bad = chain_violations(c.d2, c.d1)
    return ValidationReport(not bad, tuple(bad))


@dataclass(frozen=True)
class HomologyResult:
    dimension: int
    representatives: BitMatrix
    boundary_basis: BitMatrix
    cycle_basis: BitMatrix


CohomologyResult = HomologyResult


@functools.lru_cache(maxsize=256)
def _homology(d2: BitMatrix, d1: BitMatrix) -> HomologyResult:
    cycles = kernel_basis(d1)
    boundaries = rowspace_basis(d2.transpose())
    reps = complement_basis(boundaries, cycles)
    return HomologyResult(reps.nrows, reps, boundaries, cycles)


def homology(c: ChainComplex2) -> HomologyResult:
    """ker d1 / im d2."""
    return _homology(c.d2, c.d1)


def cohomology(c: ChainComplex2) -> CohomologyResult:
    """ker d2ᵀ / im d1ᵀ; the fields mirror :class:`HomologyResult`."""
    return _homology(c.d1.transpose(), c.d2.transpose())


def is_cycle(c: ChainComplex2, x: BitVector) -> bool:
    return c.d1.apply(x).is_zero()


def is_cocycle(c: ChainComplex2, f: BitVector) -> bool:
    return c.d2.transpose().apply(f).is_zero()


def is_boundary(c: ChainComplex2, x: BitVector | int) -> bool:
    return in_rowspace(homology(c).boundary_basis, x)


def intersection_form(c: ChainComplex2, f: BitVector, x: BitVector) -> int:
    if not is_cocycle(c, f):
        raise ComplexError("f is not a cocycle")
    if not is_cycle(c, x):
        raise ComplexError("x is not a cycle")
    return f.dot(x)


def dual_bases(c: ChainComplex2) -> tuple[BitMatrix, BitMatrix]:
    """Homology and cohomology bases whose pairing matrix is the identity."""
    e = homology(c).representatives
    f = cohomology(c).representatives
    if e.nrows != f.nrows:
        raise ComplexError("homology and cohomology dimensions differ")
    if e.nrows == 0:
        return e, f
    pairing = multiply(f, e.transpose())
    return e, multiply(inverse(pairing), f)


# enumeration helpers


def _span_table(vectors: Sequence[int], nbits: int) -> np.ndarray:
    """All 2^k XOR combinations; row ``i`` combines the vectors at the set bits of ``i``."""
    table = pack_words([0], nbits)
    for v in vectors:
        vw = pack_words([v], nbits)
        table = np.concatenate([table, table ^ vw], axis=0)
    return table


def _weights(table: np.ndarray) -> np.ndarray:
    return np.bitwise_count(table).sum(axis=1, dtype=np.int64)


def _lex_key(x: int, n: int) -> int:
    """Integer whose order matches the lexicographic order of (x_0, x_1, ...)."""
    return int(format(x, f"0{n}b")[::-1], 2) if n else 0


def _rows_to_ints(table: np.ndarray, idx: Iterable[int]) -> list[int]:
    out = []
    for i in idx:
        x = 0
        for w, word in enumerate(table[i].tolist()):
            x |= int(word) << (64 * w)
        out.append(x)
    return out


_LOW_BITS = 16


def _enumerate_min(
    offset: int,
    vectors: Sequence[int],
    nbits: int,
    free_mask: int,
    jobs: int = 1,
    collect: bool = False,
) -> tuple[int, list[int]]:
    """Minimum weight over offset + span(vectors), skipping combinations that use only
    vectors outside ``free_mask`` when ``offset`` is zero (used to require a nontrivial
    logical component).  With ``collect`` also return every minimiser.
    """
    low = list(vectors[:_LOW_BITS])
    high = list(vectors[_LOW_BITS:])
    table = _span_table(low, nbits)
    low_idx = np.arange(len(table), dtype=np.int64)
    low_free = (low_idx & (free_mask & ((1 << len(low)) - 1))) != 0
    high_free_mask = free_mask >> len(low)
    nhigh = len(high)

    def chunk(hs: range) -> tuple[int, list[int]]:
        best, found = 1 << 62, []
        for h in hs:
            hv = offset
            for j in bits_of(h):
                hv ^= high[j]
            cur = table ^ pack_words([hv], nbits)
            w = _weights(cur)
            if free_mask and not (h & high_free_mask):
                w = np.where(low_free, w, 1 << 62)
            m = int(w.min())
            if m < best:
                best = m
                found = _rows_to_ints(cur, np.nonzero(w == m)[0]) if collect else []
            elif collect and m == best:
                found += _rows_to_ints(cur, np.nonzero(w == m)[0])
        return best, found

    total = 1 << nhigh
    jobs = max(1, min(jobs, total))
    if jobs == 1:
        return chunk(range(total))
    step = (total + jobs - 1) // jobs
    with ThreadPoolExecutor(jobs) as pool:
        parts = list(pool.map(chunk, [range(s, min(s + step, total)) for s in range(0, total, step)]))
    best = min(p[0] for p in parts)
    found = [x for p in parts if p[0] == best for x in p[1]]
    return best, found


def _subsets(n: int, size: int) -> Iterable[tuple[int, ...]]:
    return itertools.combinations(range(n), size)


def _distance_by_weight(c: ChainComplex2, budget: int) -> int:
    """Exact weight-ordered meet-in-the-middle search for a nontrivial cycle.

    Column j carries the signature (d1 column, L column) with L the cohomology
    representatives.  A subset is a nontrivial logical exactly when its d1 part
    vanishes and its L part does not.  Subsets of size a and w - a are matched
    on the d1 part; overlapping matches would expose a lighter logical, which
    the increasing order of w has already excluded.
    """
    cols = c.d1.columns()
    lrows = cohomology(c).representatives
    lcols = lrows.columns() if lrows.nrows else (0,) * c.n1
    n = c.n1
    tables: dict[int, dict[int, set[int]]] = {}
    spent = 0

    def table(size: int) -> dict[int, set[int]]:
        nonlocal spent
        if size not in tables:
            t: dict[int, set[int]] = {}
            for sub in _subsets(n, size):
                s = lv = 0
                for j in sub:
                    s ^= cols[j]
                    lv ^= lcols[j]
                t.setdefault(s, set()).add(lv)
                spent += 1
                if spent > budget:
                    raise EnumerationOverflow("distance search exceeded enumeration budget")
            tables[size] = t
        return tables[size]

    for w in range(1, n + 1):
        a = w // 2
        ta = table(a)
        for sub in _subsets(n, w - a):
            s = lv = 0
            for j in sub:
                s ^= cols[j]
                lv ^= lcols[j]
            spent += 1
            if spent > budget:
                raise EnumerationOverflow("distance search exceeded enumeration budget")
            vals = ta.get(s)
            if vals and any(v != lv for v in vals):
                return w
    raise ComplexError("no nontrivial cycle found")


SEARCH_BUDGET = 1 << 24


def distance(c: ChainComplex2, cap: int | None = None, jobs: int = 1, method: str = "auto") -> int:
    """Minimum weight of a cycle outside im d2.

    The cycle space is enumerated exhaustively when its dimension is at most
    ``cap``; larger spaces fall back to an exact weight-ordered search limited
    to ``SEARCH_BUDGET`` subset evaluations.
    """
    cap = default_cap() if cap is None else cap
    hom = homology(c)
    if hom.dimension == 0:
        raise ComplexError("no nontrivial logical error: dim H1 = 0")
    k = hom.cycle_basis.nrows
    if method == "enumerate" and k > cap:
        raise EnumerationOverflow(f"cycle space dimension {k} exceeds cap {cap}")
    if method == "enumerate" or (method == "auto" and k <= cap):
        vectors = list(hom.representatives.rows) + list(hom.boundary_basis.rows)
        free = (1 << hom.dimension) - 1
        best, _ = _enumerate_min(0, vectors, c.n1, free, jobs=jobs)
        return best
    return _distance_by_weight(c, SEARCH_BUDGET)


@dataclass(frozen=True)
class MwdResult:
    min_weight: int
    witness: BitVector


@functools.lru_cache(maxsize=64)
def _decoding_table(d1: BitMatrix) -> dict[int, tuple[int, int]]:
    """syndrome -> (minimum weight, lexicographically smallest minimiser)."""
    n = d1.ncols
    cols = d1.columns()
    syn = _span_table(cols, d1.nrows)
    xs = np.arange(1 << n, dtype=np.int64)
    weights = np.bitwise_count(xs.astype(np.uint64)).astype(np.int64)
    rev = np.zeros_like(xs)
    for j in range(n):
        rev |= ((xs >> j) & 1) << (n - 1 - j)
    order = np.lexsort((rev, weights))
    syn_sorted = syn[order]
    _, first = np.unique(syn_sorted, axis=0, return_index=True)
    out: dict[int, tuple[int, int]] = {}
    for f in first.tolist():
        x = int(order[f])
        s = _rows_to_ints(syn_sorted, [f])[0]
        out[s] = (int(weights[x]), x)
    return out


_TABLE_MAX_N1 = 16


def _mwd_by_weight(c: ChainComplex2, s: int, budget: int) -> tuple[int, int]:
    cols = c.d1.columns()
    n = c.n1
    if s == 0:
        return 0, 0
    tables: dict[int, dict[int, list[int]]] = {}
    spent = 0

    def table(size: int) -> dict[int, list[int]]:
        nonlocal spent
        if size not in tables:
            t: dict[int, list[int]] = {}
            for sub in _subsets(n, size):
                syn = 0
                mask = 0
                for j in sub:
                    syn ^= cols[j]
                    mask |= 1 << j
                t.setdefault(syn, []).append(mask)
                spent += 1
                if spent > budget:
                    raise EnumerationOverflow("decoding search exceeded enumeration budget")
            tables[size] = t
        return tables[size]

    for w in range(1, n + 1):
        a = w // 2
        ta = table(a)
        found = []
        for sub in _subsets(n, w - a):
            syn = s
            mask = 0
            for j in sub:
                syn ^= cols[j]
                mask |= 1 << j
            spent += 1
            if spent > budget:
                raise EnumerationOverflow("decoding search exceeded enumeration budget")
            for other in ta.get(syn, ()):
                if not other & mask:
                    found.append(other | mask)
        if found:
            return w, min(found, key=lambda x: _lex_key(x, n))
    raise InfeasibleSyndrome("syndrome outside im d1")


def mwd(
    c: ChainComplex2, s: BitVector | int, cap: int | None = None, jobs: int = 1, method: str = "auto"
) -> MwdResult:
    """Minimum-weight solution of d1 x = s, ties broken lexicographically on (x_0, x_1, ...)."""
    cap = default_cap() if cap is None else cap
    sdata = s.data if isinstance(s, BitVector) else s
    if isinstance(s, BitVector) and s.length != c.n0:
        raise ShapeError("syndrome length differs from dim C0")
    x0 = solve(c.d1, BitVector(c.n0, sdata))
    if x0 is None:
        raise InfeasibleSyndrome("syndrome outside im d1")
    if method == "auto" and c.n1 <= _TABLE_MAX_N1:
        w, x = _decoding_table(c.d1)[sdata]
        return MwdResult(w, BitVector(c.n1, x))
    kernel = homology(c).cycle_basis
    if method == "enumerate" and kernel.nrows > cap:
        raise EnumerationOverflow(f"cycle space dimension {kernel.nrows} exceeds cap {cap}")
    if method == "enumerate" or (method == "auto" and kernel.nrows <= cap):
        w, found = _enumerate_min(x0.data, list(kernel.rows), c.n1, 0, jobs=jobs, collect=True)
        x = min(found, key=lambda v: _lex_key(v, c.n1))
        return MwdResult(w, BitVector(c.n1, x))
    w, x = _mwd_by_weight(c, sdata, SEARCH_BUDGET)
    return MwdResult(w, BitVector(c.n1, x))


def brute_force_distance(c: ChainComplex2) -> int:
    """Reference oracle: scan every vector of C1."""
    best = None
    bspan = Span(homology(c).boundary_basis.rows)
    cols = c.d1.columns()
    for x in range(1, 1 << c.n1):
        syn = 0
        for j in bits_of(x):
            syn ^= cols[j]
        if syn == 0 and x not in bspan:
            w = popcount(x)
            if best is None or w < best:
                best = w
    if best is None:
        raise ComplexError("no nontrivial logical error: dim H1 = 0")
    return best


def brute_force_mwd(c: ChainComplex2, s: int) -> tuple[int, int]:
    """Reference oracle: scan every vector of C1 for the lexicographic minimiser."""
    cols = c.d1.columns()
    best = None
    for x in range(1 << c.n1):
        syn = 0
        for j in bits_of(x):
            syn ^= cols[j]
        if syn == s:
            key = (popcount(x), tuple((x >> i) & 1 for i in range(c.n1)))
            if best is None or key < best[0]:
                best = (key, x)
    if best is None:
        raise InfeasibleSyndrome("syndrome outside im d1")
    return best[0][0], best[1]


# graphs and serialisation


def to_networkx(c: ChainComplex2) -> nx.Graph:
    """Tanner-style graph: C2 and C0 nodes attach to the C1 nodes they touch."""
    g = nx.Graph()
    for i, lab in enumerate(c.labels2):
        g.add_node(("c2", i), name=lab.name, kind=lab.kind.value)
    for i, lab in enumerate(c.labels1):
        g.add_node(("c1", i), name=lab.name, kind=lab.kind.value)
    for i, lab in enumerate(c.labels0):
        g.add_node(("c0", i), name=lab.name, kind=lab.kind.value)
    for j, col in enumerate(c.d2.columns()):
        for i in bits_of(col):
            g.add_edge(("c2", j), ("c1", i))
    for k, row in enumerate(c.d1.rows):
        for i in bits_of(row):
            g.add_edge(("c0", k), ("c1", i))
    return g


def restrict(c: ChainComplex2, keep2: Sequence[int], keep1: Sequence[int], keep0: Sequence[int]) -> ChainComplex2:
    d2 = c.d2.select_rows(keep1).select_columns(keep2)
    d1 = c.d1.select_rows(keep0).select_columns(keep1)
    return ChainComplex2(
        d2,
        d1,
        tuple(c.labels2[i] for i in keep2),
        tuple(c.labels1[i] for i in keep1),
        tuple(c.labels0[i] for i in keep0),
    )


def components(c: ChainComplex2) -> list[ChainComplex2]:
    """Connected components of the graph of ``c`` as sub-complexes, ordered by first node."""
    g = to_networkx(c)
    comps = []
    for nodes in nx.connected_components(g):
        k2 = sorted(i for t, i in nodes if t == "c2")
        k1 = sorted(i for t, i in nodes if t == "c1")
        k0 = sorted(i for t, i in nodes if t == "c0")
        comps.append((min(nodes, key=lambda n: ({"c1": 0, "c2": 1, "c0": 2}[n[0]], n[1])), k2, k1, k0))
    comps.sort(key=lambda item: ({"c1": 0, "c2": 1, "c0": 2}[item[0][0]], item[0][1]))
    return [restrict(c, k2, k1, k0) for _, k2, k1, k0 in comps]


def to_json_dict(c: ChainComplex2) -> dict[str, Any]:
    return {
        "d2": [bits_of(col) for col in c.d2.columns()],
        "d1": [bits_of(row) for row in c.d1.rows],
        "dims": [c.n2, c.n1, c.n0],
        "labels": {
            "c2": [[n.name, n.kind.value] for n in c.labels2],
            "c1": [[n.name, n.kind.value] for n in c.labels1],
            "c0": [[n.name, n.kind.value] for n in c.labels0],
        },
    }


def from_json_dict(data: dict[str, Any]) -> ChainComplex2:
    labels = data.get("labels", {})
    if "dims" in data:
        n2, n1, n0 = data["dims"]
    else:
        n2, n0 = len(data["d2"]), len(data["d1"])
        n1 = len(labels.get("c1", ())) or 1 + max(
            [i for s in data["d2"] + data["d1"] for i in s], default=-1
        )
    d2 = BitMatrix.from_supports(data["d2"], n1).transpose() if n2 else BitMatrix.zeros(n1, 0)
    d1 = BitMatrix.from_supports(data["d1"], n1) if n0 else BitMatrix.zeros(0, n1)

    def labs(key: str) -> tuple[Node, ...]:
        return tuple(Node(name, NodeKind(kind)) for name, kind in labels.get(key, ()))

    return ChainComplex2(d2, d1, labs("c2"), labs("c1"), labs("c0"))


def dumps(c: ChainComplex2) -> str:
    return json.dumps(to_json_dict(c), indent=1, sort_keys=True)


def loads(text: str) -> ChainComplex2:
    return from_json_dict(json.loads(text))


_SHAPES = {
    NodeKind.GAUGE: 'shape=circle',
    NodeKind.ERROR_X: 'shape=box',
    NodeKind.ERROR_Z: 'shape=box, style=filled, fillcolor=black, fontcolor=white',
    NodeKind.ERROR: 'shape=box',
    NodeKind.DETECTOR: 'shape=triangle',
}


def _dot_id(text: str) -> str:
    return '"' + text.replace('"', r"\"") + '"'


def to_dot(c: ChainComplex2, name: str = "complex") -> str:
    lines = [f"graph {name} {{"]
    for prefix, labels in (("c2", c.labels2), ("c1", c.labels1), ("c0", c.labels0)):
        for i, lab in enumerate(labels):
            lines.append(f"  {prefix}_{i} [label={_dot_id(lab.name)}, {_SHAPES[lab.kind]}];")
    for j, col in enumerate(c.d2.columns()):
        for i in bits_of(col):
            lines.append(f"  c2_{j} -- c1_{i};")
    for k, row in enumerate(c.d1.rows):
        for i in bits_of(row):
            lines.append(f"  c0_{k} -- c1_{i};")
    lines.append("}")
    return "\n".join(lines) + "\n"


def summary(c: ChainComplex2) -> dict[str, int]:
    return {
        "dim_c2": c.n2,
        "dim_c1": c.n1,
        "dim_c0": c.n0,
        "rank_d2": rank(c.d2),
        "rank_d1": rank(c.d1),
        "dim_h1": homology(c).dimension,
    }
