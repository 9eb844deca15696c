"""From an SLJF proof and its substitution back to an LJF proof.

The LJF prover is rerun with every choice that matters fixed in advance:
witnesses are read off σ (Skolem applications collapse to their head) and
each copy reuses the renaming of a copy in the SLJF proof.  What is left to
search is rule placement, which is what the dependency order constrains.
The emitted schedule is then checked against that order.
"""

from __future__ import annotations

from dataclasses import dataclass

from .ljf import FAIL, Guide, LJFProver, LProofTree, check_ljf
from .search import Budget, Stats
from .sljf import ProveResult, SProofTree
from .substitution import CycleError, Substitution, apply_fix, dependency_order
from .syntax import App, EigenApp, Sequent, Tup, Var, VarKind, alpha_equiv


class ReconstructionError(RuntimeError):
    pass


@dataclass(frozen=True)
class Event:
    kind: str  # "instantiate" | "introduce_eigen" | "structural"
    var: Var
    term: object = None


@dataclass(frozen=True)
class EventSchedule:
    events: tuple[Event, ...]

    def position(self) -> dict[Var, int]:
        return {e.var: i for i, e in enumerate(self.events)}

    def violations(self, sigma: Substitution) -> list[tuple[Var, Var]]:
        """Edges v -> w (w occurs in vσ) whose w-event does not come first.

        From an existential source, chains through other existentials are
        followed to their end: witnesses are fully resolved, so only the
        variables a witness finally mentions constrain its placement."""
        pos = self.position()
        graph = dependency_order(sigma)
        bad = []
        for v in graph.nodes:
            for w in self._targets(graph, v):
                if v in pos and w in pos and not pos[w] < pos[v]:
                    bad.append((v, w))
        return bad

    @staticmethod
    def _targets(graph, v: Var) -> set[Var]:
        if v.kind != VarKind.EXISTENTIAL:
            return set(graph.successors(v))
        out, seen, stack = set(), {v}, [v]
        while stack:
            for w in graph.successors(stack.pop()):
                if w.kind == VarKind.EXISTENTIAL:
                    if w not in seen:
                        seen.add(w)
                        stack.append(w)
                else:
                    out.add(w)
        return out


@dataclass(frozen=True)
class Reconstruction:
    tree: LProofTree
    schedule: EventSchedule
    fallback: bool
    stats: Stats


def collapse(t, default: App):
    """LJF witness for an SLJF term: Skolem heads only, leftovers to ``default``."""
    if isinstance(t, EigenApp):
        return t.head
    if isinstance(t, Var):
        return t if t.kind == VarKind.EIGEN else default
    if isinstance(t, App):
        return App(t.symbol, tuple(collapse(a, default) for a in t.args)) if t.args else t
    if isinstance(t, Tup):
        raise ReconstructionError("a tuple cannot be a witness")
    return t


class SigmaGuide(Guide):
    def __init__(self, sp: SProofTree, sigma: Substitution, default: App):
        self.sigma = sigma
        self.default = default
        self.instances: dict[Var, list[tuple[int, dict]]] = {}
        for k, node in enumerate(sp.walk()):
            if node.rule != "copy":
                continue
            c = node.conclusion.gamma[node.info["closure"]]
            self.instances.setdefault(c.a, []).append((k, dict(node.info["renaming"])))

    def witness(self, binder: Var, eigens: frozenset):
        try:
            t = collapse(apply_fix(self.sigma, binder), self.default)
        except CycleError as e:
            raise ReconstructionError(str(e)) from e
        from .syntax import term_vars

        if any(v not in eigens for v in term_vars(t)):
            return FAIL
        return t

    def copy_instances(self, world):
        return self.instances.get(world, [])


def schedule_of(tree: LProofTree) -> EventSchedule:
    events: list[Event] = []
    for t in tree.walk():
        if t.rule in ("forallL", "existsR"):
            q = t.conclusion.lfocus if t.rule == "forallL" else t.conclusion.goal
            events.append(Event("instantiate", q.var, t.witness))
        elif t.rule in ("forallR", "existsL"):
            events.append(Event("introduce_eigen", t.eigen))
        elif t.rule in ("*R", "-oL") and isinstance(t.tag, tuple):
            events.extend(Event("structural", a) for a in t.tag)
        elif t.rule == "!R" and isinstance(t.tag, Var):
            events.append(Event("structural", t.tag))
    return EventSchedule(tuple(events))


def _same_sequent(a: Sequent, b: Sequent) -> bool:
    def eq(xs, ys):
        return len(xs) == len(ys) and all(alpha_equiv(x, y) for x, y in zip(xs, ys))

    return eq(a.gamma, b.gamma) and eq(a.delta, b.delta) and alpha_equiv(a.goal, b.goal)


def reconstruct(
    sp: SProofTree,
    sigma: Substitution,
    original: Sequent,
    *,
    source: Sequent | None = None,
    default_constant: str = "t0",
) -> Reconstruction:
    """``source`` is the tagged, renamed-apart sequent the SLJF proof was built
    from; when omitted ``original`` must already be that sequent."""
    src = source or original
    if not _same_sequent(src, original):
        raise ReconstructionError("source sequent is not a renaming of the original")
    default = App(default_constant, ())
    guide = SigmaGuide(sp, sigma, default)
    n_copies = sum(len(v) for v in guide.instances.values())
    budget = Budget(copy_bound=max(n_copies, 1), depth=4 * sp.height() + 4 * len(sigma) + 40)
    worlds = tuple(c.a for c in sp.conclusion.gamma)
    prover = LJFProver(budget, guide=guide, default_constant=default_constant)
    res = prover.prove(src, worlds)
    fallback = False
    if not res.proved:
        # not expected for a valid SLJF proof; the unguided search keeps callers going
        fallback = True
        res = LJFProver(Budget(), default_constant=default_constant).prove(src)
        if not res.proved:
            raise ReconstructionError(f"no LJF proof found ({res.verdict})")
    tree = res.tree
    check_ljf(tree, src)
    schedule = schedule_of(tree)
    if not fallback:
        bad = schedule.violations(sigma)
        if bad:
            v, w = bad[0]
            raise ReconstructionError(f"schedule places {v!r} before {w!r}")
    return Reconstruction(tree, schedule, fallback, res.stats)


def reconstruct_result(result: ProveResult, original: Sequent | None = None) -> Reconstruction:
    if not result.proved:
        raise ReconstructionError("nothing to reconstruct: the SLJF search did not succeed")
    src = result.sequent.source
    return reconstruct(result.tree, result.sigma, original or src, source=src)
