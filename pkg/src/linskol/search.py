"""Bits shared by the two provers: budgets, counters, verdicts."""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field

PROVED = "proved"
UNPROVABLE = "unprovable"
BUDGET_EXHAUSTED = "budget_exhausted"


@dataclass(frozen=True)
class Budget:
    copy_bound: int = 2
    depth: int = 40
    max_nodes: int = 500_000


@dataclass
class Stats:
    nodes: int = 0
    unifications: int = 0
    admissibility_checks: int = 0
    admissibility_failures: Counter = field(default_factory=Counter)
    focus_backtracks: int = 0
    term_backtracks: int = 0
    copies: int = 0
    copy_refusals: int = 0
    depth_refusals: int = 0

    @property
    def refused(self) -> bool:
        return bool(self.copy_refusals or self.depth_refusals)

    def as_dict(self) -> dict:
        return {
            "nodes": self.nodes,
            "unifications": self.unifications,
            "admissibility_checks": self.admissibility_checks,
            "admissibility_failures": {f"condition{k}": v for k, v in sorted(self.admissibility_failures.items())},
            "focus_backtracks": self.focus_backtracks,
            "term_backtracks": self.term_backtracks,
            "copies": self.copies,
            "copy_refusals": self.copy_refusals,
            "depth_refusals": self.depth_refusals,
        }


class NodeLimit(Exception):
    """Search gave up after ``Budget.max_nodes`` expansions."""


def count_node(stats: Stats, budget: Budget) -> None:
    stats.nodes += 1
    if stats.nodes > budget.max_nodes:
        raise NodeLimit()


def multiset_eq(a, b) -> bool:
    return Counter(a) == Counter(b)


def multiset_minus(a, b):
    """``a - b`` as a tuple, or None when ``b`` is not contained in ``a``."""
    rest = list(a)
    for x in b:
        try:
            rest.remove(x)
        except ValueError:
            return None
    return tuple(rest)
