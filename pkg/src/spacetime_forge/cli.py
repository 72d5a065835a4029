"""Command-line interface: ``spacetime-forge <command> [options]``.

Input files are recognised by their first keyword: ``{`` (complex JSON),
``WIRES`` (circuit), ``NODES`` (MBQC pattern), ``N`` (code) and anything else
(measurement schedule).  Exit status is 0 on success, 1 on domain errors and
2 on parse or usage errors.
"""

from __future__ import annotations

import argparse
import json
import sys
from typing import Any, Sequence

from . import complex as cx
from .chainmap import reduce_to_fixpoint
from .circuit import CircuitParseError, parse_circuit, spacetime_complex
from .compile import VerificationError, compile
from .complex import ChainComplex2, components, default_cap, distance, mwd, summary
from .foliate import ScheduleParseError, foliate_css, foliate_dynamical, foliate_stabilizer, parse_schedule
from .gf2 import BitMatrix, BitVector
from .mbqc import PatternParseError, cluster_state_complex, compare_complexes, graph_to_dot, parse_pattern
from .pauli import ParseError, parse_code


class UsageError(Exception):
    """Bad command-line input (exit status 2)."""


PARSE_ERRORS = (ParseError, CircuitParseError, PatternParseError, ScheduleParseError, json.JSONDecodeError, UsageError)


def _kind(text: str) -> str:
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("{"):
            return "json"
        return {"WIRES": "circuit", "NODES": "pattern", "N": "code"}.get(line.split()[0].upper(), "schedule")
    raise UsageError("input file is empty")


def _read(path: str) -> str:
    try:
        with open(path, encoding="utf-8") as f:
            return f.read()
    except OSError as e:
        raise UsageError(f"cannot read {path}: {e.strerror}") from None


def _foliated(text: str, kind: str, rounds: int | None):
    if kind == "schedule":
        return foliate_dynamical(parse_schedule(text))
    if rounds is None:
        raise UsageError("--rounds is required to foliate a code")
    code = parse_code(text)
    if code.gauge:
        raise UsageError("foliation takes a stabilizer code, not a subsystem code")
    if code.is_css_shortcut:
        return foliate_css(BitMatrix.from_ints(list(code.sx), code.n), BitMatrix.from_ints(list(code.sz), code.n), rounds)
    return foliate_stabilizer(code.stabilizer_code(), rounds)


def load_complex(path: str, rounds: int | None = None) -> ChainComplex2:
    """Chain complex of any supported artifact file."""
    text = _read(path)
    kind = _kind(text)
    if kind == "json":
        data = json.loads(text)
        if "complex" in data:
            data = data["complex"]
        try:
            return cx.from_json_dict(data)
        except (KeyError, TypeError, ValueError) as e:
            raise UsageError(f"{path}: not a complex: {e}") from None
    if kind == "circuit":
        return spacetime_complex(parse_circuit(text)).complex
    if kind == "pattern":
        return cluster_state_complex(parse_pattern(text)).complex
    if kind == "code" and rounds is None:
        return parse_code(text).to_complex()
    return _foliated(text, kind, rounds).complex


def _complex_out(c: ChainComplex2, fmt: str, extra: dict[str, Any] | None = None) -> str:
    if fmt == "dot":
        return cx.to_dot(c)
    out = {"complex": cx.to_json_dict(c), "summary": summary(c)}
    out.update(extra or {})
    return _dumps(out)


def _dumps(obj: Any) -> str:
    return json.dumps(obj, indent=1, sort_keys=True) + "\n"


def cmd_complex(a: argparse.Namespace) -> str:
    return _complex_out(load_complex(a.input), a.format)


def cmd_reduce(a: argparse.Namespace) -> str:
    red = reduce_to_fixpoint(load_complex(a.input))
    parts = components(red.complex)
    if a.format == "dot":
        return cx.to_dot(red.complex, "reduced")
    return _dumps(
        {
            "complex": cx.to_json_dict(red.complex),
            "summary": summary(red.complex),
            "trace": [t.to_json() for t in red.trace],
            "components": [summary(p) for p in parts],
        }
    )


def cmd_spacetime(a: argparse.Namespace) -> str:
    sc = spacetime_complex(parse_circuit(_read(a.input)))
    if a.format == "dot":
        return cx.to_dot(sc.complex, "spacetime")
    return _complex_out(
        sc.complex,
        "json",
        {"detectors": [s.to_json() for s in sc.classification], "counting": sc.counting()},
    )


def cmd_distance(a: argparse.Namespace) -> str:
    return f"{distance(load_complex(a.input, a.rounds), a.cap, a.jobs)}\n"


def cmd_mwd(a: argparse.Namespace) -> str:
    c = load_complex(a.input, a.rounds)
    try:
        s = BitVector.from_str(a.syndrome)
    except ValueError:
        raise UsageError("syndrome must be a 0/1 string") from None
    r = mwd(c, s, a.cap, a.jobs)
    return _dumps({"min_weight": r.min_weight, "witness": "".join(map(str, r.witness.to_list()))})


def cmd_compile(a: argparse.Namespace) -> str:
    res = compile(parse_circuit(_read(a.input)), a.verify, a.cap, a.jobs)
    if a.format == "dot":
        return graph_to_dot(res.pattern)
    if a.format == "text":
        return f"{res.report}\n"
    return _dumps(res.to_json())


def cmd_foliate(a: argparse.Namespace) -> str:
    text = _read(a.input)
    lc = _foliated(text, _kind(text), a.rounds)
    return lc.to_dot() if a.format == "dot" else _dumps(lc.to_json())


def cmd_equiv(a: argparse.Namespace) -> str:
    rep = compare_complexes(load_complex(a.first, a.rounds), load_complex(a.second, a.rounds), a.cap, a.jobs)
    if a.format == "json":
        return _dumps(rep.to_json())
    return f"{rep}\n"


COMMANDS = {
    "complex": (cmd_complex, "code or artifact file -> chain complex"),
    "reduce": (cmd_reduce, "apply rules A and B to a fixpoint"),
    "spacetime": (cmd_spacetime, "circuit -> spacetime complex and detector report"),
    "distance": (cmd_distance, "minimum weight of a nontrivial logical error"),
    "mwd": (cmd_mwd, "minimum-weight decoding of a syndrome"),
    "compile": (cmd_compile, "circuit -> MBQC pattern"),
    "foliate": (cmd_foliate, "code or schedule -> layered cluster-state complex"),
    "equiv": (cmd_equiv, "compare two artifacts"),
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", metavar="PATH", help="write output to PATH instead of stdout")
    common.add_argument("--format", choices=("json", "dot"), default=None)
    common.add_argument("--cap", type=int, default=None, help="enumeration cap (default 24)")
    common.add_argument("--rounds", type=int, default=None, metavar="T")
    common.add_argument("--jobs", type=int, default=1, metavar="N")
    p = argparse.ArgumentParser(prog="spacetime-forge", description="Spacetime codes as GF(2) chain complexes.")
    sub = p.add_subparsers(dest="command", required=True)
    for name, (_, help_) in COMMANDS.items():
        s = sub.add_parser(name, parents=[common], help=help_)
        if name == "equiv":
            s.add_argument("first")
            s.add_argument("second")
        else:
            s.add_argument("input")
        if name == "mwd":
            s.add_argument("syndrome", help="0/1 string, one bit per detector")
        if name == "compile":
            s.add_argument("--verify", action="store_true")
    return p


def run(argv: Sequence[str] | None = None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    parser = build_parser()
    try:
        a = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)
    if a.cap is None:
        a.cap = default_cap()
    try:
        if a.format is None:
            a.format = "json"
            if a.command in ("distance", "equiv") or (a.command == "compile" and a.verify):
                a.format = "text"
        text = COMMANDS[a.command][0](a)
    except PARSE_ERRORS as e:
        print(f"error: {e}", file=stderr)
        return 2
    except VerificationError as e:
        print(f"error: {e.args[0] if e.args else e}", file=stderr)
        return 1
    except (ValueError, ArithmeticError) as e:
        print(f"error: {e}", file=stderr)
        return 1
    if a.out:
        with open(a.out, "w", encoding="utf-8") as f:
            f.write(text)
    else:
        stdout.write(text)
    return 0


def main() -> None:
    sys.exit(run())


__all__ = ["COMMANDS", "UsageError", "build_parser", "load_complex", "main", "run"]
