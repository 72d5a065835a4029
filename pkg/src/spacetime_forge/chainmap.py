"""Weak chain maps, fault-tolerance certificates and the reduction rules A and B."""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Any, Sequence

from .complex import (
    ChainComplex2,
    ComplexError,
    EnumerationOverflow,
    cohomology,
    default_cap,
    distance,
    homology,
    mwd,
)
from .gf2 import BitMatrix, ShapeError, Span, bits_of, multiply, popcount, rank


class ChainMapError(ComplexError):
    pass


@dataclass(frozen=True)
class WeakChainMap:
    """Linear maps f_i : C_i -> C'_i stored as (dim C'_i) x (dim C_i) matrices."""

    f0: BitMatrix
    f1: BitMatrix
    f2: BitMatrix

    @classmethod
    def identity(cls, c: ChainComplex2) -> WeakChainMap:
        return cls(BitMatrix.identity(c.n0), BitMatrix.identity(c.n1), BitMatrix.identity(c.n2))

    def compose(self, first: WeakChainMap) -> WeakChainMap:
        """The map ``self ∘ first``."""
        return WeakChainMap(self.f0 @ first.f0, self.f1 @ first.f1, self.f2 @ first.f2)


@dataclass(frozen=True)
class MapCheck:
    ok: bool
    strict: bool
    failures: tuple[str, ...] = ()

    def __bool__(self) -> bool:
        return self.ok


def _check_shapes(m: WeakChainMap, src: ChainComplex2, dst: ChainComplex2) -> None:
    for f, a, b in ((m.f0, src.n0, dst.n0), (m.f1, src.n1, dst.n1), (m.f2, src.n2, dst.n2)):
        if f.shape != (b, a):
            raise ShapeError(f"map of shape {f.shape} expected {(b, a)}")


def check_weak_chain_map(m: WeakChainMap, src: ChainComplex2, dst: ChainComplex2) -> MapCheck:
    """Test im(f1 d2) ⊆ im(d2') and f0 d1 = d1' f1; flag strict chain maps."""
    _check_shapes(m, src, dst)
    failures = []
    img = multiply(m.f1, src.d2)
    bspan = Span(dst.d2.transpose().rows)
    if any(col not in bspan for col in img.columns()):
        failures.append("image condition: im(f1 d2) not inside im(d2')")
    if multiply(m.f0, src.d1) != multiply(dst.d1, m.f1):
        failures.append("commuting square: f0 d1 != d1' f1")
    strict = img == multiply(dst.d2, m.f2)
    return MapCheck(not failures, strict, tuple(failures))


@dataclass(frozen=True)
class HomologyMap:
    matrix: BitMatrix
    isomorphism: bool


def _coordinates(c: ChainComplex2, x: int) -> int:
    """Coordinates of the class of cycle ``x`` on the homology representatives."""
    hom = homology(c)
    # echelon basis with bookkeeping of which representatives were used
    rows = [(b, 0) for b in hom.boundary_basis.rows] + [
        (r, 1 << i) for i, r in enumerate(hom.representatives.rows)
    ]
    basis: dict[int, tuple[int, int]] = {}
    for v, tag in rows:
        while v:
            lead = (v & -v).bit_length() - 1
            if lead in basis:
                bv, bt = basis[lead]
                v ^= bv
                tag ^= bt
            else:
                basis[lead] = (v, tag)
                break
    coords = 0
    while x:
        lead = (x & -x).bit_length() - 1
        if lead not in basis:
            raise ChainMapError("vector is not a cycle")
        bv, bt = basis[lead]
        x ^= bv
        coords ^= bt
    return coords


def induced_homology_map(m: WeakChainMap, src: ChainComplex2, dst: ChainComplex2) -> HomologyMap:
    check = check_weak_chain_map(m, src, dst)
    if not check.ok:
        raise ChainMapError("; ".join(check.failures))
    hs, hd = homology(src), homology(dst)
    cols = []
    for rep in hs.representatives.rows:
        cols.append(_coordinates(dst, m.f1.apply_int(rep)))
    mat = BitMatrix.from_columns(cols, hd.dimension) if cols else BitMatrix.zeros(hd.dimension, 0)
    iso = hs.dimension == hd.dimension and rank(mat) == hd.dimension
    return HomologyMap(mat, iso)


@dataclass(frozen=True)
class Certificate:
    ok: bool
    exhaustive: bool
    checked_syndromes: int
    distance: int | None
    failures: tuple[str, ...] = ()

    @property
    def kind(self) -> str:
        if not self.ok:
            return "failure"
        return "certificate" if self.exhaustive else "sampled certificate"

    def __bool__(self) -> bool:
        return self.ok


def _image_elements(m: BitMatrix, limit: int, rng: random.Random, samples: int) -> tuple[list[int], bool]:
    """Every element of the column space when its rank is at most ``limit``, else a sample."""
    basis = Span()
    gens = []
    for col in m.columns():
        if basis.add(col):
            gens.append(col)
    r = len(gens)
    if r <= limit:
        out = []
        for idx in range(1 << r):
            v = 0
            for j in bits_of(idx):
                v ^= gens[j]
            out.append(v)
        return out, True
    out = []
    for _ in range(samples):
        v = 0
        for g in gens:
            if rng.getrandbits(1):
                v ^= g
        out.append(v)
    return out, False


def certify_fault_tolerant(
    f: WeakChainMap,
    h: WeakChainMap,
    src: ChainComplex2,
    dst: ChainComplex2,
    cap: int | None = None,
    samples: int = 256,
    seed: int = 0,
) -> Certificate:
    """Certify that ``f`` is a distance- and decoding-preserving weak quasi-isomorphism
    with quasi-inverse ``h``.

    Decoding preservation is checked on every syndrome of im d1 when its rank is at
    most ``cap``; otherwise ``samples`` random syndromes are used.
    """
    cap = default_cap() if cap is None else cap
    failures: list[str] = []
    for name, m, a, b in (("f", f, src, dst), ("h", h, dst, src)):
        chk = check_weak_chain_map(m, a, b)
        failures += [f"{name}: {msg}" for msg in chk.failures]
    if failures:
        return Certificate(False, False, 0, None, tuple(failures))

    bsrc = Span(homology(src).boundary_basis.rows)
    bdst = Span(homology(dst).boundary_basis.rows)
    for x in homology(dst).cycle_basis.rows:
        if (f.f1.apply_int(h.f1.apply_int(x)) ^ x) not in bdst:
            failures.append("quasi-isomorphism: [f1 h1 x] != [x]")
            break
    for x in homology(src).cycle_basis.rows:
        if (h.f1.apply_int(f.f1.apply_int(x)) ^ x) not in bsrc:
            failures.append("quasi-isomorphism: [h1 f1 x] != [x]")
            break
    if homology(src).dimension != homology(dst).dimension:
        failures.append("homology dimensions differ")

    dist = None
    if not failures and homology(src).dimension:
        ds, dd = distance(src, cap), distance(dst, cap)
        dist = ds
        if ds != dd:
            failures.append(f"distance: {ds} != {dd}")

    rng = random.Random(seed)
    syndromes, exhaustive = _image_elements(src.d1, min(cap, 16), rng, samples)
    checked = 0
    if not failures:
        for s in syndromes:
            res = mwd(src, s, cap)
            image = f.f1.apply_int(res.witness.data)
            target = f.f0.apply_int(s)
            if dst.d1.apply_int(image) != target:
                failures.append(f"decoding: f1 of the witness misses the syndrome {s:#x}")
                break
            best = mwd(dst, target, cap).min_weight
            if best != popcount(image):
                failures.append(f"decoding: weight {best} != |f1 w| = {popcount(image)} at {s:#x}")
                break
            checked += 1
    return Certificate(not failures, exhaustive, checked, dist, tuple(failures))


# reduction rules


@dataclass(frozen=True)
class RuleApplication:
    rule: str
    gauge_index: int
    gauge_label: str
    affected: tuple[int, ...]
    affected_labels: tuple[str, ...]
    forward: WeakChainMap
    backward: WeakChainMap

    def to_json(self) -> dict[str, Any]:
        return {
            "rule": self.rule,
            "gauge_label": self.gauge_label,
            "affected_labels": list(self.affected_labels),
        }


def _drop(n: int, removed: int) -> list[int | None]:
    return [None if i == removed else (i if i < removed else i - 1) for i in range(n)]


def _index_map_matrix(mapping: Sequence[int | None], n_out: int) -> BitMatrix:
    """Matrix sending basis vector i to basis vector mapping[i] (or 0)."""
    cols = [0 if t is None else 1 << t for t in mapping]
    return BitMatrix.from_columns(cols, n_out) if cols else BitMatrix.zeros(n_out, 0)


def _embed_matrix(inverse_map: Sequence[int], n_out: int) -> BitMatrix:
    cols = [1 << t for t in inverse_map]
    return BitMatrix.from_columns(cols, n_out) if cols else BitMatrix.zeros(n_out, 0)


def apply_rule_a(c: ChainComplex2, gauge: int) -> tuple[ChainComplex2, RuleApplication]:
    """Remove a weight-2 gauge node and merge its two error neighbours."""
    col = c.d2.column(gauge)
    support = bits_of(col)
    if len(support) != 2:
        raise ChainMapError(f"rule A needs a weight-2 gauge node, got weight {len(support)}")
    a, b = support
    new_d2, new_d1, map1, map2 = _merge(c, gauge, a, b)
    n1p = c.n1 - 1
    f1 = _index_map_matrix(map1, n1p)
    f2 = _index_map_matrix(map2, c.n2 - 1)
    h1 = _embed_matrix([i for i in range(c.n1) if i != b], c.n1)
    h2 = _embed_matrix([j for j in range(c.n2) if j != gauge], c.n2)
    labels1 = tuple(lab for i, lab in enumerate(c.labels1) if i != b)
    labels2 = tuple(lab for j, lab in enumerate(c.labels2) if j != gauge)
    dst = ChainComplex2(new_d2, new_d1, labels2, labels1, c.labels0)
    app = RuleApplication(
        "A",
        gauge,
        c.labels2[gauge].name,
        (a, b),
        (c.labels1[a].name, c.labels1[b].name),
        WeakChainMap(BitMatrix.identity(c.n0), f1, f2),
        WeakChainMap(BitMatrix.identity(c.n0), h1, h2),
    )
    return dst, app


def _merge(c: ChainComplex2, gauge: int, a: int, b: int):
    map1 = _drop(c.n1, b)
    map1[b] = map1[a]
    map2 = _drop(c.n2, gauge)
    cols = []
    for j, col in enumerate(c.d2.columns()):
        if j == gauge:
            continue
        if (col >> b) & 1:
            col ^= (1 << a) | (1 << b)
        cols.append(_remove_bit(col, b))
    new_d2 = BitMatrix.from_columns(cols, c.n1 - 1) if cols else BitMatrix.zeros(c.n1 - 1, 0)
    new_d1 = c.d1.select_columns([i for i in range(c.n1) if i != b])
    return new_d2, new_d1, map1, map2


def _remove_bit(x: int, b: int) -> int:
    return (x & ((1 << b) - 1)) | ((x >> (b + 1)) << b)


def apply_rule_b(c: ChainComplex2, gauge: int) -> tuple[ChainComplex2, RuleApplication]:
    """Remove a weight-1 gauge node together with its error neighbour."""
    col = c.d2.column(gauge)
    support = bits_of(col)
    if len(support) != 1:
        raise ChainMapError(f"rule B needs a weight-1 gauge node, got weight {len(support)}")
    (b,) = support
    if c.d1.column(b):
        raise ChainMapError("error node of a weight-1 gauge touches a detector")
    map1 = _drop(c.n1, b)
    map2 = _drop(c.n2, gauge)
    cols = [_remove_bit(cc, b) for j, cc in enumerate(c.d2.columns()) if j != gauge]
    n1p = c.n1 - 1
    new_d2 = BitMatrix.from_columns(cols, n1p) if cols else BitMatrix.zeros(n1p, 0)
    new_d1 = c.d1.select_columns([i for i in range(c.n1) if i != b])
    labels1 = tuple(lab for i, lab in enumerate(c.labels1) if i != b)
    labels2 = tuple(lab for j, lab in enumerate(c.labels2) if j != gauge)
    dst = ChainComplex2(new_d2, new_d1, labels2, labels1, c.labels0)
    app = RuleApplication(
        "B",
        gauge,
        c.labels2[gauge].name,
        (b,),
        (c.labels1[b].name,),
        WeakChainMap(BitMatrix.identity(c.n0), _index_map_matrix(map1, n1p), _index_map_matrix(map2, c.n2 - 1)),
        WeakChainMap(
            BitMatrix.identity(c.n0),
            _embed_matrix([i for i in range(c.n1) if i != b], c.n1),
            _embed_matrix([j for j in range(c.n2) if j != gauge], c.n2),
        ),
    )
    return dst, app


@dataclass(frozen=True)
class TraceEntry:
    rule: str
    gauge_label: str
    affected_labels: tuple[str, ...]

    def to_json(self) -> dict[str, Any]:
        return {"rule": self.rule, "gauge_label": self.gauge_label, "affected_labels": list(self.affected_labels)}


@dataclass(frozen=True)
class Reduction:
    complex: ChainComplex2
    forward: WeakChainMap
    backward: WeakChainMap
    trace: tuple[TraceEntry, ...] = field(default=())


def reduce_to_fixpoint(c: ChainComplex2) -> Reduction:
    """Apply rules A and B until every gauge column has weight at least 3.

    Columns are scanned in ascending order and the first applicable rule is
    applied.  Gauge columns that become zero are dropped.  The composed maps
    are tracked as index maps, which is what rules A and B produce.
    """
    cols = list(c.d2.columns())
    alive2 = [True] * c.n2
    alive1 = [True] * c.n1
    parent = list(range(c.n1))  # where each original error node was merged to (None when deleted)
    gone: set[int] = set()
    d1cols = list(c.d1.columns())
    trace: list[TraceEntry] = []

    def find(i: int) -> int | None:
        path = []
        while i not in gone and parent[i] != i:
            path.append(i)
            i = parent[i]
        root = None if i in gone else i
        for p in path:
            if root is None:
                gone.add(p)
            else:
                parent[p] = root
        return root

    j = 0
    while j < len(cols):
        if not alive2[j]:
            j += 1
            continue
        col = cols[j]
        w = popcount(col)
        if w == 0:
            alive2[j] = False
            trace.append(TraceEntry("drop", c.labels2[j].name, ()))
            j = 0
            continue
        if w == 1:
            (b,) = bits_of(col)
            if d1cols[b]:
                raise ChainMapError("error node of a weight-1 gauge touches a detector")
            alive2[j] = False
            alive1[b] = False
            gone.add(b)
            bit = 1 << b
            for k in range(len(cols)):
                if alive2[k] and cols[k] & bit:
                    cols[k] ^= bit
            trace.append(TraceEntry("B", c.labels2[j].name, (c.labels1[b].name,)))
            j = 0
            continue
        if w == 2:
            a, b = bits_of(col)
            alive2[j] = False
            alive1[b] = False
            parent[b] = a
            pair = (1 << a) | (1 << b)
            bit = 1 << b
            for k in range(len(cols)):
                if alive2[k] and cols[k] & bit:
                    cols[k] ^= pair
            trace.append(TraceEntry("A", c.labels2[j].name, (c.labels1[a].name, c.labels1[b].name)))
            j = 0
            continue
        j += 1

    keep1 = [i for i in range(c.n1) if alive1[i]]
    keep2 = [k for k in range(c.n2) if alive2[k]]
    new_index1 = {old: new for new, old in enumerate(keep1)}
    new_index2 = {old: new for new, old in enumerate(keep2)}
    new_cols = []
    for k in keep2:
        x = 0
        for i in bits_of(cols[k]):
            x |= 1 << new_index1[i]
        new_cols.append(x)
    n1p, n2p = len(keep1), len(keep2)
    d2 = BitMatrix.from_columns(new_cols, n1p) if new_cols else BitMatrix.zeros(n1p, 0)
    d1 = c.d1.select_columns(keep1)
    dst = ChainComplex2(
        d2,
        d1,
        tuple(c.labels2[k] for k in keep2),
        tuple(c.labels1[i] for i in keep1),
        c.labels0,
    )
    map1 = []
    for i in range(c.n1):
        r = find(i)
        map1.append(None if r is None else new_index1[r])
    map2 = [new_index2.get(k) for k in range(c.n2)]
    forward = WeakChainMap(
        BitMatrix.identity(c.n0), _index_map_matrix(map1, n1p), _index_map_matrix(map2, n2p)
    )
    backward = WeakChainMap(
        BitMatrix.identity(c.n0), _embed_matrix(keep1, c.n1), _embed_matrix(keep2, c.n2)
    )
    return Reduction(dst, forward, backward, tuple(trace))


def first_reducible(c: ChainComplex2) -> int | None:
    for j, col in enumerate(c.d2.columns()):
        if popcount(col) <= 2:
            return j
    return None


__all__ = [
    "ChainMapError",
    "WeakChainMap",
    "MapCheck",
    "HomologyMap",
    "Certificate",
    "RuleApplication",
    "TraceEntry",
    "Reduction",
    "check_weak_chain_map",
    "induced_homology_map",
    "certify_fault_tolerant",
    "apply_rule_a",
    "apply_rule_b",
    "reduce_to_fixpoint",
    "first_reducible",
    "EnumerationOverflow",
    "cohomology",
]
