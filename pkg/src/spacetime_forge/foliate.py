"""Layered cluster-state complexes for repeated stabilizer measurement."""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .circuit import CliffordCircuit, Element, normalize, spacetime_complex
from .complex import ChainComplex2, Node, NodeKind
from .gf2 import BitMatrix, Span, bits_of
from .mbqc import (
    ClusterStateComplex,
    CompressedRepresentation,
    MbqcPattern,
    cluster_state_complex,
    compressed_representation,
)
from .pauli import PauliError, PauliOp, StabilizerCode, parse_pauli


class FoliationError(ValueError):
    pass


class ScheduleParseError(FoliationError):
    def __init__(self, message: str, line: int | None = None):
        super().__init__(message if line is None else f"line {line}: {message}")
        self.line = line


class RoundType(str, enum.Enum):
    X = "X"
    Z = "Z"
    XZ = "XZ"
    ZX = "ZX"

    def __str__(self) -> str:
        return self.value


# schedules


@dataclass(frozen=True)
class DynamicalSchedule:
    """Rounds of commuting measurements on ``n`` qubits after optional input stabilizers."""

    n: int
    rounds: tuple[tuple[PauliOp, ...], ...]
    inputs: tuple[PauliOp, ...] = ()

    def __post_init__(self) -> None:
        object.__setattr__(self, "rounds", tuple(tuple(r) for r in self.rounds))
        object.__setattr__(self, "inputs", tuple(self.inputs))
        for t, ops in enumerate(self.rounds, 1):
            if not ops:
                raise FoliationError(f"round {t} is empty")
            for op in ops:
                if op.n != self.n:
                    raise FoliationError(f"round {t}: {op} acts on {op.n} qubits, expected {self.n}")
                if op.is_identity():
                    raise FoliationError(f"round {t}: identity measurement")
            for i, a in enumerate(ops):
                for j in range(i + 1, len(ops)):
                    if not a.commutes(ops[j]):
                        raise FoliationError(f"round {t}: measurements {i} and {j} anticommute")
        for i, a in enumerate(self.inputs):
            if a.n != self.n:
                raise FoliationError(f"input stabilizer {a} acts on {a.n} qubits, expected {self.n}")
            for b in self.inputs[i + 1 :]:
                if not a.commutes(b):
                    raise FoliationError("input stabilizers do not commute")

    @classmethod
    def from_strings(cls, rounds: Iterable[Iterable[str]], inputs: Iterable[str] = ()) -> DynamicalSchedule:
        rs = [[parse_pauli(p) for p in r] for r in rounds]
        ins = [parse_pauli(p) for p in inputs]
        first = next((ops[0] for ops in rs if ops), ins[0] if ins else None)
        if first is None:
            raise FoliationError("schedule has no operators")
        return cls(first.n, tuple(tuple(r) for r in rs), tuple(ins))

    @property
    def T(self) -> int:
        return len(self.rounds)

    def to_text(self) -> str:
        lines = [f"INPUT {p}" for p in self.inputs]
        for t, ops in enumerate(self.rounds):
            if t:
                lines.append("ROUND")
            lines += [f"M {p}" for p in ops]
        return "\n".join(lines) + "\n"


def parse_schedule(text: str) -> DynamicalSchedule:
    inputs: list[PauliOp] = []
    rounds: list[list[PauliOp]] = [[]]
    n = None
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        key = parts[0].upper()
        if key == "ROUND" and len(parts) == 1:
            if rounds[-1]:
                rounds.append([])
            continue
        if key not in ("INPUT", "M") or len(parts) != 2:
            raise ScheduleParseError(f"expected 'INPUT <pauli>', 'M <pauli>' or 'ROUND', got {line!r}", lineno)
        try:
            p = parse_pauli(parts[1])
        except PauliError as e:
            raise ScheduleParseError(str(e), lineno) from None
        if n is None:
            n = p.n
        elif p.n != n:
            raise ScheduleParseError(f"Pauli string has {p.n} qubits, expected {n}", lineno)
        if key == "INPUT":
            if any(rounds):
                raise ScheduleParseError("INPUT lines must precede the measurements", lineno)
            inputs.append(p)
        else:
            rounds[-1].append(p)
    if not rounds[-1]:
        rounds.pop()
    if n is None or not rounds:
        raise ScheduleParseError("schedule has no measurements")
    try:
        return DynamicalSchedule(n, tuple(tuple(r) for r in rounds), tuple(inputs))
    except FoliationError as e:
        raise ScheduleParseError(str(e)) from None


def type_rounds(s: DynamicalSchedule) -> list[RoundType]:
    """Round types: pure X rounds are X; pure Z rounds are Z unless they follow a
    Z or XZ round; mixed rounds are ZX unless they follow a Z or XZ round."""
    out: list[RoundType] = []
    for ops in s.rounds:
        fresh = not out or out[-1] in (RoundType.X, RoundType.ZX)
        if all(not op.z for op in ops):
            out.append(RoundType.X)
        elif all(not op.x for op in ops):
            out.append(RoundType.Z if fresh else RoundType.XZ)
        else:
            out.append(RoundType.ZX if fresh else RoundType.XZ)
    return out


def odd_intersections(ops: Sequence[PauliOp]) -> list[tuple[int, int]]:
    """Pairs i <= j with |X part of i & Z part of j| odd; (i, i) marks an odd Y count."""
    out = []
    for i, a in enumerate(ops):
        for j in range(i, len(ops)):
            if bin(a.x & ops[j].z).count("1") & 1:
                out.append((i, j))
    return out


# layered construction


@dataclass(frozen=True)
class LayerNode:
    name: str
    layer: int
    role: str  # "data" or "ancilla"
    virtual: bool = False


@dataclass(frozen=True)
class LayeredDetector:
    """Detector node: symmetric difference of the spackles or backles of ``sources``."""

    kind: str  # "spackle", "backle" or "virtual"
    sources: tuple[str, ...]
    nodes: frozenset[str]

    def to_json(self) -> dict:
        return {"kind": self.kind, "sources": list(self.sources), "nodes": sorted(self.nodes)}


@dataclass
class _Ancilla:
    name: str
    vertex: int
    op: PauliOp
    z_layer: int
    x_layer: int


class _Builder:
    def __init__(self, n: int):
        self.n = n
        self.nodes: list[LayerNode] = []
        self.edges: set[tuple[int, int]] = set()
        self.ymeas: list[int] = []
        self.data: dict[int, list[int]] = {}
        self.ancillas: list[_Ancilla] = []
        self.last = 0
        self.add_layer()

    def vertex(self, node: LayerNode) -> int:
        self.nodes.append(node)
        return len(self.nodes) - 1

    def add_layer(self) -> None:
        ell = self.last + 1
        self.data[ell] = [self.vertex(LayerNode(f"q{ell}_{j}", ell, "data")) for j in range(self.n)]
        if ell > 1:
            for a, b in zip(self.data[ell - 1], self.data[ell]):
                self.edges.add((a, b))
        self.last = ell

    def add_round(self, t: int, ops: Sequence[PauliOp], z_layer: int, x_layer: int, labels: Sequence[int]) -> None:
        verts = []
        for i, (op, lab) in enumerate(zip(ops, labels)):
            v = self.vertex(LayerNode(f"a{t}_{i}", lab, "ancilla"))
            verts.append(v)
            for j in bits_of(op.z):
                self.edges.add((self.data[z_layer][j], v))
            for j in bits_of(op.x):
                self.edges.add((self.data[x_layer][j], v))
            self.ancillas.append(_Ancilla(self.nodes[v].name, v, op, z_layer, x_layer))
        for i, j in odd_intersections(ops):
            if i == j:
                self.ymeas.append(verts[i])
            else:
                self.edges.add((verts[i], verts[j]))


def _round_layers(b: _Builder, t: int, ops: Sequence[PauliOp], kind: RoundType, css: bool) -> None:
    ell = b.last
    if kind is RoundType.Z:
        b.add_round(t, ops, ell, ell, [ell] * len(ops))
        return
    b.add_layer()
    b.add_layer()
    if kind is RoundType.X:
        b.add_round(t, ops, ell + 1, ell + 1, [ell + 1] * len(ops))
    elif kind is RoundType.ZX:
        labels = [ell + 1 if css and not op.z else ell for op in ops]
        b.add_round(t, ops, ell, ell + 1, labels)
    else:
        b.add_round(t, ops, ell + 2, ell + 1, [ell + 2] * len(ops))


def gadget_circuit(s: DynamicalSchedule, kinds: Sequence[RoundType] | None = None) -> CliffordCircuit:
    """Ancilla-measurement circuit realizing the schedule.

    Every measurement gets a |+> ancilla, measured in X (Y for an odd Y count) at
    the end.  Each round is a single BOX: CZ networks to the Z and X parts with
    data Hadamards in between, ordered by the round type.
    """
    kinds = list(kinds) if kinds is not None else type_rounds(s)
    n = s.n
    N = n + sum(len(r) for r in s.rounds)
    hadamards = [Element.gate("H", q) for q in range(n)]
    cols: list[tuple[Element, ...]] = []
    finals = []
    base = n
    for ops, kind in zip(s.rounds, kinds):
        anc = [base + i for i in range(len(ops))]
        odd = odd_intersections(ops)
        zpart = [(a, j) for a, op in zip(anc, ops) for j in bits_of(op.z)]
        zpart += [(anc[i], anc[j]) for i, j in odd if i != j]
        xpart = [(a, j) for a, op in zip(anc, ops) for j in bits_of(op.x)]
        parts: list[Element] = []
        if kind in (RoundType.Z, RoundType.ZX) and zpart:
            parts.append(Element.cz_box(zpart))
        if kind is not RoundType.Z:
            parts += hadamards
            if xpart:
                parts.append(Element.cz_box(xpart))
            parts += hadamards
        if kind is RoundType.XZ and zpart:
            parts.append(Element.cz_box(zpart))
        cols.append((parts[0],) if len(parts) == 1 else (Element.box(parts),))
        ymeas = {i for i, j in odd if i == j}
        finals += [(a, "Y" if i in ymeas else "X") for i, a in enumerate(anc)]
        base += len(ops)
    inputs = tuple(p.embed(N, range(n)) for p in s.inputs)
    return normalize(CliffordCircuit(N, tuple(cols), inputs, tuple(range(n, N)), tuple(finals)))


@dataclass(frozen=True)
class LayeredComplex:
    """Cluster-state complex of a layered pattern, with layer and role per node.

    ``nodes`` lists the physical nodes in pattern order, then the kept input
    stabilizer nodes, then the virtual data layers at both ends.
    """

    schedule: DynamicalSchedule
    round_types: tuple[RoundType, ...]
    pattern: MbqcPattern
    cluster: ClusterStateComplex
    nodes: tuple[LayerNode, ...]
    detectors: tuple[LayeredDetector, ...]
    graph: CompressedRepresentation = field(repr=False)

    @property
    def complex(self) -> ChainComplex2:
        return self.cluster.complex

    @property
    def n_layers(self) -> int:
        return max(v.layer for v in self.nodes) + 1

    def layer(self, name: str) -> int:
        return self._by_name()[name].layer

    def _by_name(self) -> dict[str, LayerNode]:
        return {v.name: v for v in self.nodes}

    def layers(self) -> dict[int, list[str]]:
        out: dict[int, list[str]] = {}
        for v in self.nodes:
            out.setdefault(v.layer, []).append(v.name)
        return out

    @property
    def undirected_edges(self) -> set[frozenset[str]]:
        """Two-way edges between non-detector nodes; a self-loop is a one-element set."""
        arcs = self._arcs()
        return {frozenset((a, b)) for a, b in arcs if (b, a) in arcs}

    @property
    def directed_edges(self) -> set[tuple[str, str]]:
        arcs = self._arcs()
        return {(a, b) for a, b in arcs if (b, a) not in arcs}

    def _arcs(self) -> set[tuple[str, str]]:
        g = self.graph
        dets = {i for i, r in enumerate(g.roles) if r == "detector"}
        return {(g.names[a], g.names[b]) for a, b in g.edges if a not in dets and b not in dets}

    def to_json(self) -> dict:
        return {
            "rounds": [str(k) for k in self.round_types],
            "layers": self.n_layers,
            "nodes": [
                {"name": v.name, "layer": v.layer, "role": v.role, "virtual": v.virtual} for v in self.nodes
            ],
            "edges": sorted(sorted(e) for e in self.undirected_edges),
            "directed": sorted(list(e) for e in self.directed_edges),
            "ymeas": [self.nodes[v].name for v in self.pattern.ymeasured()],
            "detectors": [d.to_json() for d in self.detectors],
            "pattern": self.pattern.to_json(),
        }

    def to_dot(self, name: str = "layered") -> str:
        by = self._by_name()
        lines = [f'digraph "{name}" {{', "  rankdir=LR;"]
        for ell, names in sorted(self.layers().items()):
            lines.append(f"  subgraph cluster_{ell} {{ label=\"layer {ell}\";")
            for nm in names:
                v = by[nm]
                shape = "box" if v.role == "data" else "circle"
                style = ", style=dashed" if v.virtual else ""
                lines.append(f'    "{nm}" [shape={shape}{style}];')
            lines.append("  }")
        for e in sorted(sorted(e) for e in self.undirected_edges):
            a, b = (e[0], e[0]) if len(e) == 1 else e
            lines.append(f'  "{a}" -> "{b}" [dir=none];')
        for a, b in sorted(self.directed_edges):
            lines.append(f'  "{a}" -> "{b}";')
        for i, d in enumerate(self.detectors):
            lines.append(f'  "d{i}" [shape=triangle];')
            for nm in sorted(d.nodes):
                lines.append(f'  "d{i}" -> "{nm}" [dir=both, style=dotted];')
        lines.append("}")
        return "\n".join(lines) + "\n"


def _closed_form(
    s: DynamicalSchedule,
    kinds: Sequence[RoundType],
    css: bool,
    spackle_sets: Sequence[Sequence[str]] | None,
    backle_sets: Sequence[Sequence[str]] | None,
) -> LayeredComplex:
    n = s.n
    b = _Builder(n)
    for t, (ops, kind) in enumerate(zip(s.rounds, kinds), 1):
        _round_layers(b, t, ops, kind, css)
    L = b.last
    inputs, outputs = b.data[1], b.data[L]
    pattern = MbqcPattern.from_edges(len(b.nodes), sorted(b.edges), inputs, outputs, b.ymeas, s.inputs)
    generic = cluster_state_complex(pattern)
    ne = generic.G.ncols

    # error coordinate of every named node
    col: dict[str, int] = {b.nodes[v].name: generic.z_node[v] for v in range(pattern.n)}
    for j in range(n):
        col[f"q0_{j}"] = generic.x_in[inputs[j]]
        col[f"q{L + 1}_{j}"] = generic.x_out[outputs[j]]

    def layered(ell: int, j: int) -> str:
        return f"q{ell}_{j}"

    def node_spackle(z_layer: int, x_layer: int, op: PauliOp) -> set[str]:
        out: set[str] = set()
        for start, part in ((z_layer, op.z), (x_layer, op.x)):
            for j in bits_of(part):
                out ^= {layered(ell, j) for ell in range(start + 1, L + 2, 2)}
        return out

    def node_backle(z_layer: int, x_layer: int, op: PauliOp) -> set[str]:
        out: set[str] = set()
        for start, part in ((z_layer, op.z), (x_layer, op.x)):
            for j in bits_of(part):
                out ^= {layered(ell, j) for ell in range(start - 1, -1, -2)}
        return out

    spackles: dict[str, set[str]] = {}
    backles: dict[str, set[str]] = {}
    for a in b.ancillas:
        spackles[a.name] = {a.name} ^ node_spackle(a.z_layer, a.x_layer, a.op)
        backles[a.name] = {a.name} ^ node_backle(a.z_layer, a.x_layer, a.op)
    # an input stabilizer's spackle covers layers 0, 2, ... on its Z part and 1, 3, ... on its X part
    for i, p in enumerate(s.inputs):
        spackles[f"s{i}"] = node_spackle(-1, 0, p)

    if spackle_sets is None or backle_sets is None:
        found_s, found_b = _discover(s, kinds)
        spackle_sets = found_s if spackle_sets is None else spackle_sets
        backle_sets = found_b if backle_sets is None else backle_sets

    # valid detector space of the pattern: kernel of G with either boundary condition
    valid = Span(generic.H.rows)
    rows: list[int] = []
    dets: list[LayeredDetector] = []
    span = Span()
    for kind, sets, table in (("spackle", spackle_sets, spackles), ("backle", backle_sets, backles)):
        for srcs in sets:
            nodes: set[str] = set()
            for nm in srcs:
                if nm not in table:
                    raise FoliationError(f"unknown {kind} source {nm!r}")
                nodes ^= table[nm]
            r = 0
            for nm in nodes:
                r |= 1 << col[nm]
            if r not in valid:
                raise FoliationError(f"{kind} combination {list(srcs)} fails the kernel test")
            if r and span.add(r):
                rows.append(r)
                dets.append(LayeredDetector(kind, tuple(srcs), frozenset(nodes)))
    if len(rows) != generic.H.nrows:
        raise FoliationError(
            f"detector sets span {len(rows)} dimensions, the pattern has {generic.H.nrows}"
        )

    # input stabilizers become virtual ancilla nodes unless their gauge row repeats a node's row
    gs = set(generic.gauge_parts["G_S"])
    node_rows = {r for i, r in enumerate(generic.G.rows) if i not in gs}
    pairs = [(i, si) for i, si in zip(generic.gauge_parts["G_S"], generic.stabilizer_rows)]
    kept = [i for i, _ in pairs if generic.G.rows[i] not in node_rows]
    kept_stabs = [si for i, si in pairs if generic.G.rows[i] not in node_rows]
    g_rows = [generic.G.rows[i] for i in kept] + [r for i, r in enumerate(generic.G.rows) if i not in gs]
    g_labels = [Node(f"gS{k}", NodeKind.GAUGE) for k in kept_stabs] + [
        lab for i, lab in enumerate(generic.complex.labels2) if i not in gs
    ]
    shift = len(gs) - len(kept)
    gparts = {"G_S": tuple(range(len(kept)))}
    for name, idx in generic.gauge_parts.items():
        if name != "G_S":
            gparts[name] = tuple(i - shift for i in idx)

    out_cols = [col[layered(L, j)] for j in range(n)] + [col[layered(L + 1, j)] for j in range(n)]
    out_mask = sum(1 << c for c in out_cols)
    order = sorted(range(len(rows)), key=lambda k: bool(rows[k] & out_mask))
    rows = [rows[k] for k in order]
    dets = [dets[k] for k in order]
    n_free = sum(1 for r in rows if not r & out_mask)

    G = BitMatrix.from_ints(g_rows, ne)
    H = BitMatrix.from_ints(rows, ne)
    labels0 = tuple(Node(f"d{i}", NodeKind.DETECTOR) for i in range(H.nrows))
    cx = ChainComplex2(G.transpose(), H, tuple(g_labels), generic.complex.labels1, labels0)
    cluster = ClusterStateComplex(
        pattern, G, H, gparts, generic.error_parts, generic.z_node, generic.x_in, generic.x_out,
        tuple(kept_stabs), n_free, cx,
    )

    # layered names for the compressed graph
    rep = compressed_representation(cluster)
    rename = {f"v{v}": b.nodes[v].name for v in range(pattern.n)}
    for k, si in enumerate(kept_stabs):
        rename[f"s{k}"] = f"s{si}"
        rename[f"dS{k}"] = f"dS{si}"
    for j in range(n):
        rename[f"xin{inputs[j]}"] = layered(0, j)
        rename[f"xout{outputs[j]}"] = layered(L + 1, j)
    graph = CompressedRepresentation(tuple(rename.get(nm, nm) for nm in rep.names), rep.roles, rep.B)

    nodes = list(b.nodes)
    nodes += [LayerNode(f"s{si}", 0, "ancilla", True) for si in kept_stabs]
    nodes += [LayerNode(layered(0, j), 0, "data", True) for j in range(n)]
    nodes += [LayerNode(layered(L + 1, j), L + 1, "data", True) for j in range(n)]
    dets += [LayeredDetector("virtual", (f"s{si}",), frozenset({f"s{si}"})) for si in kept_stabs]
    return LayeredComplex(s, tuple(kinds), pattern, cluster, tuple(nodes), tuple(dets), graph)


def _discover(s: DynamicalSchedule, kinds: Sequence[RoundType]) -> tuple[list[list[str]], list[list[str]]]:
    """Spackle and backle measurement sets from the stabilizers of the gadget circuit."""
    names = [f"a{t}_{i}" for t, ops in enumerate(s.rounds, 1) for i in range(len(ops))]
    c = gadget_circuit(s, kinds)
    n = s.n
    sp: list[list[str]] = []
    bk: list[list[str]] = []
    for cls in spacetime_complex(c).classification:
        if cls.kind in ("detector", "incomplete-forward"):
            srcs = []
            for lab in cls.check:
                if lab.startswith("plus"):
                    srcs.append(names[int(lab[4:]) - n])
                elif lab.startswith("s"):
                    srcs.append(lab)
            sp.append(srcs)
        elif cls.kind == "incomplete-backward":
            bk.append([names[int(lab[2:]) - n] for lab in cls.check])
        else:
            raise FoliationError("gadget circuit has a stabilizer that is neither spackle nor backle")
    return sp, bk


def foliate_dynamical(
    s: DynamicalSchedule,
    spackle_sets: Sequence[Sequence[str]] | None = None,
    backle_sets: Sequence[Sequence[str]] | None = None,
) -> LayeredComplex:
    """Layered complex of a measurement schedule.

    Detector sets name ancillas ``a{round}_{index}`` (and ``s{i}`` for input
    stabilizers in spackle sets); by default they are read off the gadget circuit.
    """
    return _closed_form(s, type_rounds(s), False, spackle_sets, backle_sets)


def _repeated(n: int, ops: Sequence[PauliOp], T: int, css: bool) -> LayeredComplex:
    if T < 1:
        raise FoliationError("at least one round is required")
    if not ops:
        raise FoliationError("code has no stabilizers")
    s = DynamicalSchedule(n, tuple(tuple(ops) for _ in range(T)), tuple(ops))
    m = len(ops)
    # consecutive repetitions, the unmatched last round, and the first round against the input
    spackles = [[f"a{t}_{i}", f"a{t + 1}_{i}"] for t in range(1, T) for i in range(m)]
    spackles += [[f"a{T}_{i}"] for i in range(m)]
    backles = [[f"a1_{i}"] for i in range(m)]
    return _closed_form(s, [RoundType.ZX] * T, css, spackles, backles)


def foliate_css(h_x: BitMatrix, h_z: BitMatrix, T: int) -> LayeredComplex:
    """Repeated measurement of a CSS code: Z checks on odd layers, X checks on even layers."""
    n = max(h_x.ncols, h_z.ncols)
    if any(_commutes_fail(x, z) for x in h_x.rows for z in h_z.rows):
        raise FoliationError("X and Z checks do not commute")
    ops = [PauliOp(n, 0, r) for r in h_z.rows if r] + [PauliOp(n, r, 0) for r in h_x.rows if r]
    return _repeated(n, ops, T, True)


def _commutes_fail(x: int, z: int) -> bool:
    return bool(bin(x & z).count("1") & 1)


def foliate_stabilizer(code: StabilizerCode, T: int) -> LayeredComplex:
    """Repeated measurement of a stabilizer code: one ancilla per generator on each odd layer."""
    ops = [g for g in code.generators if not g.is_identity()]
    return _repeated(code.n, ops, T, False)


__all__ = [
    "FoliationError",
    "ScheduleParseError",
    "RoundType",
    "DynamicalSchedule",
    "parse_schedule",
    "type_rounds",
    "odd_intersections",
    "LayerNode",
    "LayeredDetector",
    "LayeredComplex",
    "gadget_circuit",
    "foliate_css",
    "foliate_stabilizer",
    "foliate_dynamical",
]
