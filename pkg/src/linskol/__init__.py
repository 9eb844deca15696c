"""Skolemised proof search for first-order focused intuitionistic linear logic."""

from .ljf import LProofTree, check_ljf, prove_ljf
from .parser import parse_formula, parse_sequent, parse_sequent_file
from .reconstruct import reconstruct, reconstruct_result
from .search import BUDGET_EXHAUSTED, PROVED, UNPROVABLE, Budget
from .skolemiser import skolemise_left, skolemise_right, skolemise_sequent
from .sljf import SProofTree, check_sljf, prove
from .substitution import Substitution, admissible, dependency_order, typecheck

__all__ = [
    "BUDGET_EXHAUSTED",
    "PROVED",
    "UNPROVABLE",
    "Budget",
    "LProofTree",
    "SProofTree",
    "Substitution",
    "admissible",
    "check_ljf",
    "check_sljf",
    "dependency_order",
    "parse_formula",
    "parse_sequent",
    "parse_sequent_file",
    "prove",
    "prove_ljf",
    "reconstruct",
    "reconstruct_result",
    "skolemise_left",
    "skolemise_right",
    "skolemise_sequent",
    "typecheck",
]
