"""Stabilizer codes, Clifford circuits and MBQC patterns as GF(2) chain complexes."""

from __future__ import annotations

from . import chainmap, circuit, cli, complex, foliate, gf2, mbqc, pauli
from . import compile as compile_
from .chainmap import apply_rule_a, apply_rule_b, certify_fault_tolerant, reduce_to_fixpoint
from .circuit import CliffordCircuit, Element, parse_circuit, spacetime_complex
from .compile import CompilationResult
from .complex import ChainComplex2, distance, homology, mwd
from .foliate import DynamicalSchedule, foliate_css, foliate_dynamical, foliate_stabilizer, parse_schedule
from .gf2 import BitMatrix, BitVector
from .mbqc import MbqcPattern, cluster_state_complex, compare_complexes, compressed_representation
from .pauli import PauliOp, StabilizerCode, SubsystemCode, parse_code

compile_circuit = compile_.compile

__version__ = "0.1.0"

__all__ = [
    "BitMatrix",
    "BitVector",
    "ChainComplex2",
    "CliffordCircuit",
    "CompilationResult",
    "DynamicalSchedule",
    "Element",
    "MbqcPattern",
    "PauliOp",
    "StabilizerCode",
    "SubsystemCode",
    "apply_rule_a",
    "apply_rule_b",
    "certify_fault_tolerant",
    "chainmap",
    "circuit",
    "cli",
    "cluster_state_complex",
    "compare_complexes",
    "compile_",
    "compile_circuit",
    "complex",
    "compressed_representation",
    "distance",
    "foliate",
    "foliate_css",
    "foliate_dynamical",
    "foliate_stabilizer",
    "gf2",
    "homology",
    "mbqc",
    "mwd",
    "parse_circuit",
    "parse_code",
    "parse_schedule",
    "reduce_to_fixpoint",
    "spacetime_complex",
]
