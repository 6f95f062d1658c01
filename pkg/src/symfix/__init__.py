"""Static symmetry breaking for CNF formulas by unit fixing, with checkable proofs."""

from .checker import Verdict, check_proof
from .cnf import Formula, find_ulcs, parse_dimacs, simplify, write_dimacs
from .fixing import FixConfig, FixingResult, run_pipeline
from .proof import emit_proof, format_proof
from .symmetry import LiteralPermutation, find_symmetries, parse_generators, validate_symmetry

__all__ = [
    "FixConfig", "FixingResult", "Formula", "LiteralPermutation", "Verdict", "check_proof",
    "emit_proof", "find_symmetries", "find_ulcs", "format_proof", "parse_dimacs",
    "parse_generators", "run_pipeline", "simplify", "validate_symmetry", "write_dimacs",
]
