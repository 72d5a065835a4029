"""Clifford MBQC patterns and their cluster-state complexes."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .circuit import CliffordCircuit, Element, spacetime_complex
from .complex import ChainComplex2, Node, NodeKind, distance, homology
from .gf2 import (
    BitMatrix,
    Span,
    bits_of,
    kernel_basis,
    rowspace_basis,
    subspace_intersection,
)
from .pauli import PauliError, PauliOp, parse_pauli


class PatternError(ValueError):
    pass


class PatternParseError(PatternError):
    def __init__(self, message: str, line: int | None = None):
        super().__init__(message if line is None else f"line {line}: {message}")
        self.line = line


@dataclass(frozen=True)
class MbqcPattern:
    """Graph state on ``n`` nodes with inputs, outputs and X/Y measurement bases.

    ``b`` is a bitmask: bit v set means node v is measured in the Y basis.
    ``stabilizers`` act on the inputs, in increasing node order.
    """

    n: int
    A: BitMatrix
    inputs: tuple[int, ...] = ()
    outputs: tuple[int, ...] = ()
    b: int = 0
    stabilizers: tuple[PauliOp, ...] = ()

    def __post_init__(self) -> None:
        object.__setattr__(self, "inputs", tuple(sorted(set(self.inputs))))
        object.__setattr__(self, "outputs", tuple(sorted(set(self.outputs))))
        if self.A.shape != (self.n, self.n):
            raise PatternError("adjacency matrix has the wrong shape")
        if self.A != self.A.transpose():
            raise PatternError("adjacency matrix is not symmetric")
        if any((self.A.rows[v] >> v) & 1 for v in range(self.n)):
            raise PatternError("adjacency matrix has a nonzero diagonal")
        if any(not 0 <= v < self.n for v in self.inputs + self.outputs):
            raise PatternError("input/output node out of range")
        if self.b >> self.n:
            raise PatternError("measurement basis vector out of range")
        if any((self.b >> v) & 1 for v in self.outputs):
            raise PatternError("output nodes are not measured")
        for s in self.stabilizers:
            if s.n != len(self.inputs):
                raise PatternError("input stabilizers must act on the inputs only")
        for i, s in enumerate(self.stabilizers):
            for t in self.stabilizers[i + 1 :]:
                if not s.commutes(t):
                    raise PatternError("input stabilizers do not commute")

    @classmethod
    def from_edges(
        cls,
        n: int,
        edges: Iterable[tuple[int, int]],
        inputs: Iterable[int] = (),
        outputs: Iterable[int] = (),
        ymeas: Iterable[int] = (),
        stabilizers: Iterable[PauliOp | str] = (),
    ) -> MbqcPattern:
        rows = [0] * n
        for a, b in edges:
            if a == b:
                raise PatternError("self-loop in cluster-state graph")
            rows[a] |= 1 << b
            rows[b] |= 1 << a
        bvec = 0
        for v in ymeas:
            bvec |= 1 << v
        stabs = tuple(parse_pauli(s) if isinstance(s, str) else s for s in stabilizers)
        return cls(n, BitMatrix.from_ints(rows, n), tuple(inputs), tuple(outputs), bvec, stabs)

    @property
    def edges(self) -> list[tuple[int, int]]:
        return [(a, b) for a in range(self.n) for b in bits_of(self.A.rows[a]) if a < b]

    @property
    def measured(self) -> list[int]:
        outs = set(self.outputs)
        return [v for v in range(self.n) if v not in outs]

    def ymeasured(self) -> list[int]:
        return bits_of(self.b)

    def to_text(self) -> str:
        lines = [f"NODES {self.n}"]
        lines += [f"EDGE {a} {b}" for a, b in self.edges]
        lines += [f"INPUT {v}" for v in self.inputs]
        lines += [f"OUTPUT {v}" for v in self.outputs]
        lines += [f"YMEAS {v}" for v in self.ymeasured()]
        lines += [f"STAB {s}" for s in self.stabilizers]
        return "\n".join(lines) + "\n"

    def to_json(self) -> dict:
        return {
            "nodes": self.n,
            "edges": [list(e) for e in self.edges],
            "inputs": list(self.inputs),
            "outputs": list(self.outputs),
            "ymeas": self.ymeasured(),
            "stabilizers": [str(s) for s in self.stabilizers],
        }


def parse_pattern(text: str) -> MbqcPattern:
    n = None
    edges, ins, outs, ys, stabs = [], [], [], [], []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        key = parts[0].upper()
        try:
            if key == "NODES":
                (n,) = (int(x) for x in parts[1:])
                continue
            if n is None:
                raise PatternParseError("NODES must come first", lineno)
            if key == "EDGE":
                a, b = (int(x) for x in parts[1:])
                edges.append((a, b))
            elif key in ("INPUT", "OUTPUT", "YMEAS"):
                (v,) = (int(x) for x in parts[1:])
                {"INPUT": ins, "OUTPUT": outs, "YMEAS": ys}[key].append(v)
            elif key == "STAB":
                (s,) = parts[1:]
                stabs.append(parse_pauli(s))
            else:
                raise PatternParseError(f"unknown keyword {parts[0]!r}", lineno)
        except PatternParseError:
            raise
        except (ValueError, PauliError) as e:
            raise PatternParseError(f"malformed line {line!r}: {e}", lineno) from None
        for v in (edges[-1] if key == "EDGE" else ()):
            if not 0 <= v < n:
                raise PatternParseError("node index out of range", lineno)
    if n is None:
        raise PatternParseError("missing NODES line")
    try:
        return MbqcPattern.from_edges(n, edges, ins, outs, ys, stabs)
    except PatternError as e:
        raise PatternParseError(str(e)) from None


def realize_circuit(p: MbqcPattern) -> CliffordCircuit:
    """|+> on non-inputs, one CZ-network column, one identity column, X/Y measurements."""
    n = p.n
    box = Element.cz_box(p.edges, range(n))
    ident = tuple(Element.gate("I", q) for q in range(n))
    inputs = tuple(s.embed(n, p.inputs) for s in p.stabilizers)
    ins = set(p.inputs)
    inits = tuple(v for v in range(n) if v not in ins)
    finals = tuple((v, "Y" if (p.b >> v) & 1 else "X") for v in p.measured)
    cols = ((box,), ident) if n else ()
    return CliffordCircuit(n, cols, inputs, inits, finals, True)


# cluster-state complex


@dataclass(frozen=True)
class ClusterStateComplex:
    """Gauge nodes -> error nodes -> detectors.

    ``G`` is gauge x error, ``H`` is detector x error.  ``complex`` stores the same
    data with gauge nodes in C2 and detectors in C0.
    """

    pattern: MbqcPattern
    G: BitMatrix
    H: BitMatrix
    gauge_parts: dict[str, tuple[int, ...]]
    error_parts: dict[str, tuple[int, ...]]
    z_node: tuple[int, ...]
    x_in: dict[int, int]
    x_out: dict[int, int]
    stabilizer_rows: tuple[int, ...]
    n_output_free: int
    complex: ChainComplex2 = field(repr=False, compare=False, default=None)

    @property
    def n_S(self) -> int:
        return len(self.stabilizer_rows)

    @property
    def detector_dimension(self) -> int:
        return self.H.nrows


def _independent(rows: Sequence[int]) -> list[int]:
    span = Span()
    return [i for i, r in enumerate(rows) if r and span.add(r)]


def _error_layout(p: MbqcPattern) -> tuple[list[tuple[str, str, int]], dict[str, tuple[int, ...]]]:
    ins, outs = set(p.inputs), set(p.outputs)
    blocks = [
        ("X_IObar", [v for v in p.inputs if v not in outs], "xin"),
        ("X_IO", [v for v in p.inputs if v in outs], "xin"),
        ("X_IbarO", [v for v in p.outputs if v not in ins], "xout"),
        ("X'_IO", [v for v in p.inputs if v in outs], "xout"),
        ("Z_I", list(p.inputs), "z"),
        ("Z_Ibar", [v for v in range(p.n) if v not in ins], "z"),
    ]
    layout: list[tuple[str, str, int]] = []
    parts: dict[str, tuple[int, ...]] = {}
    for name, verts, role in blocks:
        start = len(layout)
        layout += [(name, role, v) for v in verts]
        parts[name] = tuple(range(start, len(layout)))
    return layout, parts


def cluster_state_complex(p: MbqcPattern) -> ClusterStateComplex:
    ins, outs = set(p.inputs), set(p.outputs)
    layout, eparts = _error_layout(p)
    ne = len(layout)
    z_node = [0] * p.n
    x_in: dict[int, int] = {}
    x_out: dict[int, int] = {}
    for k, (_, role, v) in enumerate(layout):
        if role == "z":
            z_node[v] = k
        elif role == "xin":
            x_in[v] = k
        else:
            x_out[v] = k

    def zmask(verts: Iterable[int]) -> int:
        m = 0
        for v in verts:
            m |= 1 << z_node[v]
        return m

    # input stabilizers: S^X on virtual input X nodes, S^Z on physical input Z nodes
    stab_vecs = []
    for s in p.stabilizers:
        r = 0
        for j in bits_of(s.x):
            r |= 1 << x_in[p.inputs[j]]
        for j in bits_of(s.z):
            r |= 1 << z_node[p.inputs[j]]
        stab_vecs.append(r)
    keep = _independent(stab_vecs)

    gauge_rows: list[int] = [stab_vecs[i] for i in keep]
    gauge_labels = [Node(f"gS{i}", NodeKind.GAUGE) for i in keep]
    gparts = {"G_S": tuple(range(len(gauge_rows)))}
    groups = [
        ("G_IObar", [v for v in p.inputs if v not in outs]),
        ("G_IbarO", [v for v in p.outputs if v not in ins]),
        ("G_IO", [v for v in p.inputs if v in outs]),
        ("G_IbarObar", [v for v in range(p.n) if v not in ins and v not in outs]),
    ]
    for name, verts in groups:
        start = len(gauge_rows)
        for v in verts:
            row = zmask(bits_of(p.A.rows[v] | (p.b & (1 << v))))
            if v in x_in:
                row |= 1 << x_in[v]
            if v in x_out:
                row |= 1 << x_out[v]
            gauge_rows.append(row)
            gauge_labels.append(Node(f"g{v}", NodeKind.GAUGE))
        gparts[name] = tuple(range(start, len(gauge_rows)))
    G = BitMatrix.from_ints(gauge_rows, ne)

    # detectors
    kerG = kernel_basis(G)
    out_coords = [z_node[v] for v in p.outputs] + [x_out[v] for v in p.outputs]
    proj_out = BitMatrix.from_ints([1 << k for k in out_coords], ne)
    cond2 = kernel_basis(G.vstack(proj_out))

    in_coords = {z_node[v] for v in p.inputs} | {x_in[v] for v in p.inputs}
    w1 = [1 << k for k in range(ne) if k not in in_coords]
    for s in (p.stabilizers[i] for i in keep):
        # X and Z exchange: S^X lands on Z nodes, S^Z on virtual X nodes
        r = 0
        for j in bits_of(s.x):
            r |= 1 << z_node[p.inputs[j]]
        for j in bits_of(s.z):
            r |= 1 << x_in[p.inputs[j]]
        w1.append(r)
    cond1 = subspace_intersection(kerG, BitMatrix.from_ints(w1, ne)) if kerG.nrows and w1 else BitMatrix.zeros(0, ne)

    base = rowspace_basis(cond2)
    span = Span(base.rows)
    rows = list(base.rows) + [r for r in rowspace_basis(cond1).rows if span.add(r)]
    H = BitMatrix.from_ints(rows, ne)

    labels1 = []
    for name, role, v in layout:
        if role == "z":
            labels1.append(Node(f"z{v}", NodeKind.ERROR_Z))
        elif role == "xin":
            labels1.append(Node(f"xin{v}", NodeKind.ERROR_X))
        else:
            labels1.append(Node(f"xout{v}", NodeKind.ERROR_X))
    labels0 = tuple(Node(f"d{i}", NodeKind.DETECTOR) for i in range(H.nrows))
    cx = ChainComplex2(G.transpose(), H, tuple(gauge_labels), tuple(labels1), labels0)
    return ClusterStateComplex(
        p, G, H, gparts, eparts, tuple(z_node), x_in, x_out, tuple(keep), base.nrows, cx
    )


# compressed representations


@dataclass(frozen=True)
class CompressedRepresentation:
    """Directed graph with adjacency ``B``; ``B[i][j] = 1`` is an edge j -> i."""

    names: tuple[str, ...]
    roles: tuple[str, ...]
    B: BitMatrix
    inverted: bool = False

    @property
    def edges(self) -> list[tuple[int, int]]:
        return [(j, i) for i in range(self.B.nrows) for j in bits_of(self.B.rows[i])]

    def to_json(self) -> dict:
        return {
            "nodes": [{"name": n, "role": r} for n, r in zip(self.names, self.roles)],
            "edges": [[self.names[a], self.names[b]] for a, b in self.edges],
            "orientation": "co-representation" if self.inverted else "representation",
        }

    def to_dot(self, name: str = "compressed") -> str:
        shape = {
            "Z": "box, style=filled, fillcolor=black, fontcolor=white",
            "X": "box",
            "stabilizer": "circle",
            "detector": "triangle",
        }
        lines = [f'digraph "{name}" {{']
        for n, r in zip(self.names, self.roles):
            lines.append(f'  "{n}" [shape={shape[r]}];')
        for a, b in self.edges:
            lines.append(f'  "{self.names[a]}" -> "{self.names[b]}";')
        lines.append("}")
        return "\n".join(lines) + "\n"


def augmented(csc: ClusterStateComplex) -> tuple[BitMatrix, BitMatrix, list[str], list[str]]:
    """Square G~ and H~ of the augmented complex in paired (gauge_k, error_k) order."""
    p = csc.pattern
    # error columns: Z nodes by vertex, padded stabilizer columns, virtual X nodes
    xs = [(f"xin{v}", k) for v, k in sorted(csc.x_in.items())] + [
        (f"xout{v}", k) for v, k in sorted(csc.x_out.items())
    ]
    nS = csc.n_S
    N = p.n + nS + len(xs)
    col_of = {}
    for v in range(p.n):
        col_of[csc.z_node[v]] = v
    for k, (_, idx) in enumerate(xs):
        col_of[idx] = p.n + nS + k

    def remap(row: int) -> int:
        out = 0
        for k in bits_of(row):
            out |= 1 << col_of[k]
        return out

    vertex_row = {}
    for i, lab in enumerate(csc.complex.labels2):
        if lab.name.startswith("g") and not lab.name.startswith("gS"):
            vertex_row[int(lab.name[1:])] = i
    rows = [remap(csc.G.rows[vertex_row[v]]) for v in range(p.n)]
    rows += [remap(csc.G.rows[i]) for i in csc.gauge_parts["G_S"]]
    rows += [0] * len(xs)
    Gt = BitMatrix.from_ints(rows, N)
    hrows = [remap(r) for r in csc.H.rows] + [1 << (p.n + k) for k in range(nS)]
    Ht = BitMatrix.from_ints(hrows, N)
    names = [f"v{v}" for v in range(p.n)] + [f"s{k}" for k in range(nS)] + [x for x, _ in xs]
    roles = ["Z"] * p.n + ["stabilizer"] * nS + ["X"] * len(xs)
    det_names = [f"d{i}" for i in range(csc.H.nrows)] + [f"dS{k}" for k in range(nS)]
    return Gt, Ht, names + det_names, roles + ["detector"] * len(det_names)


def _block(Gt: BitMatrix, Ht: BitMatrix, top_left: BitMatrix) -> BitMatrix:
    N, m = Gt.nrows, Ht.nrows
    rows = []
    htT = Ht.transpose()
    for i in range(N):
        rows.append(top_left.rows[i] | (htT.rows[i] << N))
    for i in range(m):
        rows.append(Ht.rows[i])
    return BitMatrix.from_ints(rows, N + m)


def compressed_representation(csc: ClusterStateComplex) -> CompressedRepresentation:
    Gt, Ht, names, roles = augmented(csc)
    B = _block(Gt, Ht, Gt.transpose())
    return CompressedRepresentation(tuple(names), tuple(roles), B)


def co_representation(csc: ClusterStateComplex) -> CompressedRepresentation:
    rep = compressed_representation(csc)
    return CompressedRepresentation(rep.names, rep.roles, rep.B.transpose(), True)


# equivalence with the spacetime complex


@dataclass(frozen=True)
class EquivalenceReport:
    ok: bool
    dim_h1: tuple[int, int]
    distance: tuple[int | None, int | None]
    detectors: tuple[int, int]
    failures: tuple[str, ...] = ()

    def __bool__(self) -> bool:
        return self.ok

    def __str__(self) -> str:
        if self.ok:
            d = self.distance[0]
            return f"equivalent: dim H1={self.dim_h1[0]} d={'-' if d is None else d}"
        return "not equivalent: " + "; ".join(self.failures)

    def to_json(self) -> dict:
        return {
            "equivalent": self.ok,
            "dim_H1": list(self.dim_h1),
            "distance": list(self.distance),
            "detectors": list(self.detectors),
            "failures": list(self.failures),
        }


def _restricted_stabilizer_ok(sc, p: MbqcPattern) -> list[str]:
    """Every spacetime stabilizer restricts to an input stabilizer at t=1 or
    vanishes on the outputs at t=2 and t=3."""
    n = p.n
    stab = Span([s.embed(n, p.inputs).vector for s in p.stabilizers])
    bad = []
    for k, s in enumerate(sc.classification):
        op = s.operator
        x1 = op.x & ((1 << n) - 1)
        z1 = op.z & ((1 << n) - 1)
        inmask = sum(1 << v for v in p.inputs)
        restricted = (x1 & inmask) | ((z1 & inmask) << n)
        cond1 = restricted in stab
        outmask = sum(1 << v for v in p.outputs)
        later = (outmask << n) | (outmask << 2 * n)
        cond2 = not (op.x & later) and not (op.z & later)
        if not (cond1 or cond2):
            bad.append(f"spacetime stabilizer {k} violates both boundary conditions")
    return bad


def compare_complexes(a: ChainComplex2, b: ChainComplex2, cap: int | None = None, jobs: int = 1) -> EquivalenceReport:
    ha, hb = homology(a).dimension, homology(b).dimension
    failures = []
    if ha != hb:
        failures.append(f"dim H1 differs: {ha} != {hb}")
    da = distance(a, cap, jobs) if ha else None
    db = distance(b, cap, jobs) if hb else None
    if da != db:
        failures.append(f"distance differs: {da} != {db}")
    ra, rb = a.n0, b.n0
    if ra != rb:
        failures.append(f"detector-space dimension differs: {ra} != {rb}")
    return EquivalenceReport(not failures, (ha, hb), (da, db), (ra, rb), tuple(failures))


def verify_equivalence_to_spacetime(p: MbqcPattern, cap: int | None = None, jobs: int = 1) -> EquivalenceReport:
    sc = spacetime_complex(realize_circuit(p))
    csc = cluster_state_complex(p)
    pre = _restricted_stabilizer_ok(sc, p)
    rep = compare_complexes(sc.complex, csc.complex, cap, jobs)
    if pre:
        return EquivalenceReport(False, rep.dim_h1, rep.distance, rep.detectors, tuple(pre) + rep.failures)
    return rep


def cluster_to_dot(csc: ClusterStateComplex, name: str = "cluster") -> str:
    from .complex import to_dot

    return to_dot(csc.complex, name)


def graph_to_dot(p: MbqcPattern, name: str = "pattern") -> str:
    lines = [f'graph "{name}" {{']
    ins, outs = set(p.inputs), set(p.outputs)
    for v in range(p.n):
        attrs = ["shape=circle"]
        if v in ins:
            attrs.append("peripheries=2")
        if v in outs:
            attrs.append("style=filled, fillcolor=lightblue")
        label = f"{v}" + (" Y" if (p.b >> v) & 1 else "")
        attrs.append(f'label="{label}"')
        lines.append(f"  {v} [{', '.join(attrs)}];")
    for a, b in p.edges:
        lines.append(f"  {a} -- {b};")
    lines.append("}")
    return "\n".join(lines) + "\n"


__all__ = [
    "PatternError",
    "PatternParseError",
    "MbqcPattern",
    "parse_pattern",
    "realize_circuit",
    "ClusterStateComplex",
    "cluster_state_complex",
    "CompressedRepresentation",
    "augmented",
    "compressed_representation",
    "co_representation",
    "EquivalenceReport",
    "compare_complexes",
    "verify_equivalence_to_spacetime",
    "cluster_to_dot",
    "graph_to_dot",
]
