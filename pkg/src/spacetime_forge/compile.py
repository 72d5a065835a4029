"""Compilation of Clifford circuits into a single MBQC pattern.

The pipeline is a sequence of local rewrites, each preserving the equivalence
class of the circuit's spacetime complex:

1. SWAP gates become wire relabelings.
2. Controlled-Pauli gates become Hadamard layers around CZ networks.
3. Single-qubit gates become H and HS (Paulis are dropped, S is merged with a
   following H or expanded into HS then H); adjacent H pairs cancel.
4. Hadamard separation inserts H pairs between networks sharing a wire and
   before every HS that directly follows a network.
5. A left-to-right sweep teleports every H/HS onto a fresh |+> node and merges
   all CZ networks into one cluster-state graph.  A BOX of CZ gates and
   Hadamards is merged as a whole, without separating its inner networks.

Passes work on a :class:`Program`, a time-ordered element list with boundary
data.  Only the per-wire order of elements matters, so a program converts to a
:class:`CliffordCircuit` by as-soon-as-possible layering.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Callable, Sequence

from .circuit import CircuitError, CliffordCircuit, Element, normalize, spacetime_complex
from .complex import default_cap
from .mbqc import EquivalenceReport, MbqcPattern, cluster_state_complex, compare_complexes, realize_circuit
from .pauli import PauliOp

TAGS = (
    "HadamardSquare",
    "PushHAway",
    "HCzSandwich",
    "SMerge",
    "CtrlPauliLower",
    "MbqcH",
    "MbqcHS",
    "HadamardSeparate",
    "MergeRight",
    "CzCzMerge",
    "MergeLeft",
    "PauliDrop",
    "WireRelabel",
)

_PAULIS = ("X", "Y", "Z", "I")


class CompileError(CircuitError):
    pass


class VerificationError(CompileError):
    def __init__(self, report: EquivalenceReport):
        super().__init__(str(report))
        self.report = report


@dataclass(frozen=True)
class RewriteStep:
    """One applied rewrite: rewrite tag, op index, touched wires, wire renaming."""

    tag: str
    location: int
    wires: tuple[int, ...]
    wire_map: tuple[tuple[int, int], ...] = ()

    def to_json(self) -> dict:
        return {
            "tag": self.tag,
            "location": self.location,
            "wires": list(self.wires),
            "wire_map": {str(a): b for a, b in self.wire_map},
        }


@dataclass(frozen=True)
class Program:
    """Time-ordered elements plus inputs, |+> wires and final X/Y measurements.

    ``outmap[w]`` is the wire that carries source wire ``w`` at the end.
    """

    n: int
    ops: tuple[Element, ...]
    inputs: tuple[PauliOp, ...] = ()
    inits: tuple[int, ...] = ()
    finals: tuple[tuple[int, str], ...] = ()
    outmap: tuple[int, ...] = ()

    def __post_init__(self) -> None:
        if not self.outmap:
            object.__setattr__(self, "outmap", tuple(range(self.n)))

    @classmethod
    def from_circuit(cls, c: CliffordCircuit) -> Program:
        c = normalize(c)
        ops = tuple(el for col in c.columns for el in col)
        return cls(c.n, ops, c.inputs, c.inits, c.finals)

    def replace(self, ops: Sequence[Element], **kw) -> Program:
        base = dict(
            n=self.n, ops=tuple(ops), inputs=self.inputs, inits=self.inits, finals=self.finals, outmap=self.outmap
        )
        base.update(kw)
        return Program(**base)

    def to_circuit(self) -> CliffordCircuit:
        depth = [0] * self.n
        cols: list[list[Element]] = []
        for el in self.ops:
            k = max(depth[w] for w in el.wires)
            if k == len(cols):
                cols.append([])
            cols[k].append(el)
            for w in el.wires:
                depth[w] = k + 1
        c = CliffordCircuit(self.n, tuple(tuple(col) for col in cols), self.inputs, self.inits, self.finals)
        return normalize(c)


StepHook = Callable[[RewriteStep, Program], None]


def _emit(hook: StepHook | None, steps: list[RewriteStep], step: RewriteStep, snap: Callable[[], Program]) -> None:
    steps.append(step)
    if hook is not None:
        hook(step, snap())


def _check_grammar(p: Program) -> None:
    for el in p.ops:
        if el.kind == "MPP" or el.is_measurement:
            raise CompileError(f"{el.kind} on wire {el.wires[0]} is not a final single-qubit X/Y measurement")
        if el.kind == "PLUS":
            raise CompileError(f"|+> preparation on wire {el.wires[0]} is not at the start of the wire")
        if el.kind == "BOX" and any(e.kind not in ("CZ", "CZBOX", "H") for e in el.parts):
            raise CompileError("a BOX may only contain CZ gates and Hadamards")
    init = sum(1 << q for q in p.inits)
    for s in p.inputs:
        if (s.x | s.z) & init:
            raise CompileError("input stabilizer acts on a |+> wire")


# pass 1: SWAP elimination


def relabel_swaps(p: Program, hook: StepHook | None = None) -> tuple[Program, list[RewriteStep]]:
    phys = list(range(p.n))
    out: list[Element] = []
    steps: list[RewriteStep] = []
    for i, el in enumerate(p.ops):
        if el.kind == "SWAP":
            a, b = el.wires
            phys[a], phys[b] = phys[b], phys[a]
            rest = [_remap(e, phys) for e in p.ops[i + 1 :]]
            _emit(
                hook,
                steps,
                RewriteStep("WireRelabel", i, (a, b), ((a, phys[a]), (b, phys[b]))),
                lambda: p.replace(out + rest, finals=_remap_finals(p.finals, phys), outmap=tuple(phys)),
            )
        else:
            out.append(_remap(el, phys))
    return p.replace(out, finals=_remap_finals(p.finals, phys), outmap=tuple(phys)), steps


def _remap(el: Element, phys: Sequence[int]) -> Element:
    if el.kind in ("CZ", "CZBOX"):
        edges = el.edges if el.kind == "CZBOX" else (el.wires,)
        es = [(phys[a], phys[b]) for a, b in edges]
        if el.kind == "CZ":
            return Element.gate("CZ", *es[0])
        return Element.cz_box(es, [phys[w] for w in el.wires])
    if el.kind == "CP":
        return Element.cp(phys[el.wires[0]], _move(el.pauli, phys))
    if el.kind == "BOX":
        return Element.box(_remap(e, phys) for e in el.parts)
    return Element.gate(el.kind, *(phys[w] for w in el.wires))


def _move(p: PauliOp, phys: Sequence[int]) -> PauliOp:
    x = z = 0
    for q in range(p.n):
        x |= ((p.x >> q) & 1) << phys[q]
        z |= ((p.z >> q) & 1) << phys[q]
    return PauliOp(p.n, x, z)


def _remap_finals(finals, phys) -> tuple[tuple[int, str], ...]:
    return tuple(sorted((phys[w], b) for w, b in finals))


# pass 2: controlled-Pauli lowering


def controlled_pauli_ops(el: Element) -> list[Element]:
    """H on X/Y targets, CZ network from the control to every target, H on X/Y
    targets, CZ network to the Y targets, and S on the control when the target
    has an odd number of Y factors (fixing the phase of controlled-(ZX))."""
    c = el.wires[0]
    p = el.pauli
    targets = list(el.wires[1:])
    flip = [q for q in targets if (p.x >> q) & 1]
    ys = [q for q in flip if (p.z >> q) & 1]
    ops = [Element.gate("H", q) for q in flip]
    ops.append(Element.cz_box([(c, q) for q in targets]))
    ops += [Element.gate("H", q) for q in flip]
    if ys:
        ops.append(Element.cz_box([(c, q) for q in ys]))
    if len(ys) % 2:
        ops.append(Element.gate("S", c))
    return ops


def _lower_cp(p: Program, hook: StepHook | None = None) -> tuple[Program, list[RewriteStep]]:
    out: list[Element] = []
    steps: list[RewriteStep] = []
    for i, el in enumerate(p.ops):
        if el.kind == "CZ":
            out.append(Element.cz_box([el.wires]))
        elif el.kind == "CP":
            out += controlled_pauli_ops(el)
            rest = list(p.ops[i + 1 :])
            _emit(hook, steps, RewriteStep("CtrlPauliLower", i, el.wires), lambda: p.replace(out + rest))
        else:
            out.append(el)
    return p.replace(out), steps


# pass 3: single-qubit lowering


def _next_on_wire(ops: Sequence[Element | None], i: int, w: int) -> int | None:
    for j in range(i + 1, len(ops)):
        if ops[j] is not None and w in ops[j].wires:
            return j
    return None


def _lower_single(p: Program, hook: StepHook | None = None) -> tuple[Program, list[RewriteStep]]:
    ops: list[Element | None] = list(p.ops)
    steps: list[RewriteStep] = []

    def snap() -> Program:
        return p.replace([e for e in ops if e is not None])

    i = 0
    while i < len(ops):
        el = ops[i]
        if el is None:
            i += 1
            continue
        if el.kind in _PAULIS:
            ops[i] = None
            _emit(hook, steps, RewriteStep("PauliDrop", i, el.wires), snap)
        elif el.kind == "S":
            (w,) = el.wires
            j = _next_on_wire(ops, i, w)
            if j is None or ops[j].kind != "H":
                ops[i + 1 : i + 1] = [Element.gate("H", w), Element.gate("H", w)]
                _emit(hook, steps, RewriteStep("HadamardSquare", i, (w,)), snap)
                j = i + 1
            ops[i] = Element.gate("HS", w)
            ops[j] = None
            _emit(hook, steps, RewriteStep("SMerge", i, (w,)), snap)
        elif el.kind not in ("H", "HS", "CZBOX", "BOX"):
            raise CompileError(f"unsupported element {el.kind}")
        i += 1
    return snap(), steps


def _cancel_hadamards(p: Program, hook: StepHook | None = None) -> tuple[Program, list[RewriteStep]]:
    ops: list[Element | None] = list(p.ops)
    steps: list[RewriteStep] = []
    last: dict[int, int] = {}
    for i, el in enumerate(p.ops):
        if el.kind == "H":
            (w,) = el.wires
            j = last.get(w)
            if j is not None and ops[j] is not None and ops[j].kind == "H":
                ops[i] = ops[j] = None
                last.pop(w)
                _emit(
                    hook, steps, RewriteStep("HadamardSquare", j, (w,)), lambda: p.replace([e for e in ops if e is not None])
                )
                continue
        for w in el.wires:
            last[w] = i
    return p.replace([e for e in ops if e is not None]), steps


# pass 4: Hadamard separation


def _ends(el: Element, w: int) -> tuple[str, str]:
    """Kinds of the first and last action of ``el`` on wire ``w``; CZ counts as a network."""
    if el.kind != "BOX":
        return el.kind, el.kind
    kinds = ["CZBOX" if e.kind == "CZ" else e.kind for e in el.parts if w in e.wires]
    return kinds[0], kinds[-1]


def _separate(p: Program, hook: StepHook | None = None) -> tuple[Program, list[RewriteStep]]:
    out: list[Element] = []
    steps: list[RewriteStep] = []
    last: dict[int, str] = {}
    for i, el in enumerate(p.ops):
        need = [w for w in el.wires if _ends(el, w)[0] in ("CZBOX", "HS") and last.get(w) == "CZBOX"]
        if need:
            for w in need:
                out += [Element.gate("H", w), Element.gate("H", w)]
            rest = list(p.ops[i:])
            _emit(hook, steps, RewriteStep("HadamardSeparate", i, tuple(need)), lambda: p.replace(out + rest))
        out.append(el)
        for w in el.wires:
            last[w] = _ends(el, w)[1]
    return p.replace(out), steps


def is_hadamard_separated(p: Program) -> bool:
    last: dict[int, str] = {}
    for el in p.ops:
        if any(_ends(el, w)[0] in ("CZBOX", "HS") and last.get(w) == "CZBOX" for w in el.wires):
            return False
        for w in el.wires:
            last[w] = _ends(el, w)[1]
    return True


# pass 5: merge into one cluster state


@dataclass
class _MergeState:
    n: int
    cur: list[int]
    inputs: tuple[int, ...]
    edges: set[tuple[int, int]] = field(default_factory=set)
    measured: dict[int, str] = field(default_factory=dict)

    def toggle(self, a: int, b: int) -> bool:
        e = (min(a, b), max(a, b))
        if e in self.edges:
            self.edges.remove(e)
            return False
        self.edges.add(e)
        return True

    def snapshot(self, p: Program, rest: Sequence[Element]) -> Program:
        """The intermediate circuit: |+> nodes, one network, the remaining gates
        on the current nodes, measurements of retired nodes."""
        box = Element.cz_box(sorted(self.edges), range(self.n))
        ops = [box] + [_remap(el, self.cur) for el in rest]
        ins = set(self.inputs)
        finals = dict(self.measured)
        finals.update({self.cur[w]: b for w, b in p.finals})
        stabs = tuple(s.embed(self.n, range(s.n)) for s in p.inputs)
        return Program(
            self.n,
            tuple(ops),
            stabs,
            tuple(v for v in range(self.n) if v not in ins),
            tuple(sorted(finals.items())),
            tuple(self.cur[w] for w in p.outmap),
        )


def _merge(p: Program, hook: StepHook | None = None) -> tuple[MbqcPattern, list[RewriteStep], dict]:
    if not is_hadamard_separated(p):
        raise CompileError("circuit is not Hadamard-separated")
    init = set(p.inits)
    st = _MergeState(p.n, list(range(p.n)), tuple(w for w in range(p.n) if w not in init))
    steps: list[RewriteStep] = []
    seen_net: set[int] = set()
    for i, el in enumerate(p.ops):
        rest = p.ops[i + 1 :]
        if el.kind in ("H", "HS"):
            (w,) = el.wires
            u, v = st.cur[w], st.n
            st.n += 1
            st.cur[w] = v
            st.toggle(u, v)
            st.measured[u] = "X" if el.kind == "H" else "Y"
            tag = "MergeRight" if w in seen_net else "MergeLeft"
            _emit(hook, steps, RewriteStep("Mbqc" + el.kind, i, (w,), ((u, v),)), lambda: st.snapshot(p, rest))
            _emit(hook, steps, RewriteStep(tag, i, (w,), ((u, v),)), lambda: st.snapshot(p, rest))
        elif el.kind == "CZBOX":
            for a, b in el.edges:
                if not st.toggle(st.cur[a], st.cur[b]):
                    raise CompileError("internal error: CZ networks cancel after Hadamard separation")
            seen_net |= set(el.wires)
            _emit(hook, steps, RewriteStep("CzCzMerge", i, el.wires), lambda: st.snapshot(p, rest))
        elif el.kind == "BOX":
            # one gate: inner networks merge directly, and may cancel edges
            moves = []
            for part in el.parts:
                if part.kind == "H":
                    (w,) = part.wires
                    u, v = st.cur[w], st.n
                    st.n += 1
                    st.cur[w] = v
                    st.toggle(u, v)
                    st.measured[u] = "X"
                    moves.append((u, v))
                else:
                    for a, b in part.edges if part.kind == "CZBOX" else (part.wires,):
                        st.toggle(st.cur[a], st.cur[b])
            seen_net |= set(el.wires)
            _emit(hook, steps, RewriteStep("HCzSandwich", i, el.wires, tuple(moves)), lambda: st.snapshot(p, rest))
        else:
            raise CompileError(f"internal error: residual non-MBQC element {el.kind}")
    finals = dict(p.finals)
    ymeas = [v for v, b in st.measured.items() if b == "Y"]
    ymeas += [st.cur[w] for w, b in finals.items() if b == "Y"]
    outputs = [st.cur[w] for w in range(p.n) if w not in finals]
    stabs = tuple(s.restrict(st.inputs) for s in p.inputs)
    pattern = MbqcPattern.from_edges(st.n, sorted(st.edges), st.inputs, outputs, ymeas, stabs)
    wire_map = {
        "inputs": {w: w for w in st.inputs},
        "outputs": {w: st.cur[p.outmap[w]] for w in range(p.n) if p.outmap[w] not in finals},
        "measured": {w: st.cur[p.outmap[w]] for w in range(p.n) if p.outmap[w] in finals},
    }
    return pattern, steps, wire_map


# public passes on circuits


def _run(pass_, c: CliffordCircuit) -> CliffordCircuit:
    return pass_(Program.from_circuit(c))[0].to_circuit()


def lower_controlled_pauli(c: CliffordCircuit) -> CliffordCircuit:
    return _run(_lower_cp, c)


def lower_single_qubit(c: CliffordCircuit) -> CliffordCircuit:
    p, _ = _lower_single(Program.from_circuit(c))
    return _cancel_hadamards(p)[0].to_circuit()


def hadamard_separate(c: CliffordCircuit) -> CliffordCircuit:
    return _run(_separate, c)


def merge_all(c: CliffordCircuit) -> MbqcPattern:
    return _merge(Program.from_circuit(c))[0]


PASSES = (relabel_swaps, _lower_cp, _lower_single, _cancel_hadamards, _separate)


def complete_detectors(c: CliffordCircuit) -> int:
    """Number of spacetime stabilizers that are parity checks among measurements."""
    return sum(s.kind == "detector" for s in spacetime_complex(c).classification)


@dataclass(frozen=True)
class CompilationResult:
    """``detectors`` holds the complete-detector counts of source and pattern."""

    pattern: MbqcPattern
    trace: tuple[RewriteStep, ...]
    wire_map: dict
    report: EquivalenceReport | None = None
    detectors: tuple[int, int] | None = None

    def to_json(self) -> dict:
        out = {
            "pattern": self.pattern.to_json(),
            "trace": [s.to_json() for s in self.trace],
            "wire_map": {k: {str(a): b for a, b in sorted(v.items())} for k, v in self.wire_map.items()},
        }
        if self.report is not None:
            out["verification"] = self.report.to_json()
            out["verification"]["complete_detectors"] = list(self.detectors)
        return out


def compile_program(p: Program, hook: StepHook | None = None) -> tuple[MbqcPattern, list[RewriteStep], dict]:
    _check_grammar(p)
    trace: list[RewriteStep] = []
    for pass_ in PASSES:
        p, steps = pass_(p, hook)
        trace += steps
    pattern, steps, wire_map = _merge(p, hook)
    return pattern, trace + steps, wire_map


def compile(c: CliffordCircuit, verify: bool = False, cap: int | None = None, jobs: int = 1) -> CompilationResult:
    """Lower ``c`` to one MBQC pattern; with ``verify`` compare the source's
    spacetime complex with the pattern's cluster-state complex."""
    try:
        prog = Program.from_circuit(c)
    except CircuitError as e:
        raise CompileError(str(e)) from None
    pattern, trace, wire_map = compile_program(prog)
    report = dets = None
    if verify:
        cap = default_cap() if cap is None else cap
        src = normalize(c)
        report = compare_complexes(spacetime_complex(src).complex, cluster_state_complex(pattern).complex, cap, jobs)
        dets = (complete_detectors(src), complete_detectors(realize_circuit(pattern)))
        if dets[0] != dets[1]:
            failures = report.failures + (f"complete detector count differs: {dets[0]} != {dets[1]}",)
            report = replace(report, ok=False, failures=failures)
        if not report.ok:
            raise VerificationError(report)
    return CompilationResult(pattern, tuple(trace), wire_map, report, dets)


__all__ = [
    "TAGS",
    "CompileError",
    "VerificationError",
    "RewriteStep",
    "Program",
    "controlled_pauli_ops",
    "relabel_swaps",
    "lower_controlled_pauli",
    "lower_single_qubit",
    "hadamard_separate",
    "is_hadamard_separated",
    "merge_all",
    "complete_detectors",
    "CompilationResult",
    "compile_program",
    "compile",
]
