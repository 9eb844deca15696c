"""Parallel substitutions over existential, Eigen and special variables."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Iterator, Mapping

from .syntax import EigenApp, Namer, Term, Tup, Var, subst_term, term_str, term_vars


class CycleError(ValueError):
    """Raised when iterating a substitution does not reach a fixpoint."""


class Substitution(Mapping):
    """Immutable, insertion-ordered map ``Var -> Term``.

    Eigen-variable entries always have the Skolem shape ``u -> u(t1..tn)``.
    """

    __slots__ = ("_map", "_hash")

    def __init__(self, entries: Iterable[tuple[Var, Term]] | Mapping = ()):
        items = entries.items() if isinstance(entries, Mapping) else entries
        m: dict[Var, Term] = {}
        for v, t in items:
            if v in m and m[v] != t:
                raise ValueError(f"{v!r} bound twice")
            if v.is_eigen and not (isinstance(t, EigenApp) and t.head == v):
                raise ValueError(f"Eigen-variable {v!r} must map to a Skolem term")
            m[v] = t
        self._map = m
        self._hash = None

    def __getitem__(self, v):
        return self._map[v]

    def __iter__(self) -> Iterator[Var]:
        return iter(self._map)

    def __len__(self):
        return len(self._map)

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(frozenset(self._map.items()))
        return self._hash

    def __eq__(self, other):
        if isinstance(other, Substitution):
            return self._map == other._map
        return NotImplemented

    def __repr__(self):
        return f"Substitution({self.to_text()})"

    def extend(self, *entries: tuple[Var, Term]) -> "Substitution":
        return Substitution(list(self._map.items()) + list(entries))

    def union(self, *others: "Substitution") -> "Substitution":
        items = list(self._map.items())
        for o in others:
            items.extend(o.items())
        return Substitution(items)

    def to_text(self, nm: Namer | None = None) -> str:
        if not self._map:
            return "."
        nm = nm or Namer(list(self._map.items()))
        return ", ".join(f"{term_str(t, nm)}/{nm(v)}" for v, t in self._map.items())

    def to_json(self, nm: Namer | None = None) -> list[dict]:
        nm = nm or Namer(list(self._map.items()))
        return [{"var": nm(v), "kind": v.kind.value, "term": term_str(t, nm)} for v, t in self._map.items()]


EMPTY = Substitution()


def skolem(u: Var, args: Iterable[Term]) -> tuple[Var, EigenApp]:
    return u, EigenApp(u, tuple(args))


def rename_substitution(sigma: Substitution, mapping: Mapping[Var, Var]) -> Substitution:
    return Substitution((mapping.get(v, v), subst_term(t, mapping)) for v, t in sigma.items())


# ----------------------------------------------------------------------------
# typing
# ----------------------------------------------------------------------------


def first_type_error(sigma: Substitution, domain: Iterable[Var], codomain: Iterable[Var]) -> str | None:
    dom = set(domain)
    cod = set(codomain)
    for v, t in sigma.items():
        if v not in cod:
            return f"{v!r} is bound but not declared in the co-domain"
        if v.is_eigen:
            if not (isinstance(t, EigenApp) and t.head == v):
                return f"{v!r} is not bound to a Skolem term"
        stray = [w for w in term_vars(t) if w not in dom]
        if stray:
            return f"term for {v!r} mentions {stray[0]!r} outside the domain"
    return None


def typecheck(sigma: Substitution, domain: Iterable[Var], codomain: Iterable[Var]) -> bool:
    """``sigma : domain -> codomain``: terms are built over ``domain`` and every
    bound variable is declared in ``codomain``."""
    return first_type_error(sigma, domain, codomain) is None


# ----------------------------------------------------------------------------
# application
# ----------------------------------------------------------------------------


def apply(sigma: Mapping[Var, Term], t: Term) -> Term:
    """One parallel pass.  Skolem heads are never substituted."""
    if isinstance(t, Var):
        return sigma.get(t, t)
    if isinstance(t, EigenApp):
        return EigenApp(t.head, tuple(apply(sigma, a) for a in t.args))
    if isinstance(t, Tup):
        return Tup(tuple(apply(sigma, a) for a in t.items))
    if not t.args:
        return t
    return type(t)(t.symbol, tuple(apply(sigma, a) for a in t.args))


def apply_fix(sigma: Mapping[Var, Term], t: Term) -> Term:
    """Iterate ``apply`` until the term is stable."""
    for _ in range(len(sigma) + 2):
        nxt = apply(sigma, t)
        if nxt == t:
            return t
        t = nxt
    raise CycleError("substitution is cyclic")


def restrict(sigma: Substitution, phi: Iterable[Var]) -> Substitution:
    keep = set(phi)
    return Substitution((v, t) for v, t in sigma.items() if v in keep)


def remove(sigma: Substitution, phi: Iterable[Var]) -> Substitution:
    drop = set(phi)
    return Substitution((v, t) for v, t in sigma.items() if v not in drop)


# ----------------------------------------------------------------------------
# dependency order and admissibility
# ----------------------------------------------------------------------------


@dataclass(frozen=True)
class DependencyGraph:
    """Edge ``v -> w`` iff ``w`` occurs in ``v sigma``; ``w`` must be available before ``v``."""

    edges: frozenset[tuple[Var, Var]]

    def successors(self, v: Var) -> list[Var]:
        return [w for (s, w) in self.edges if s == v]

    @property
    def nodes(self) -> set[Var]:
        return {v for e in self.edges for v in e}

    def adjacency(self) -> dict[Var, list[Var]]:
        adj: dict[Var, list[Var]] = {}
        for s, w in sorted(self.edges, key=lambda e: (e[0].uid, e[1].uid)):
            adj.setdefault(s, []).append(w)
            adj.setdefault(w, [])
        return adj

    def reach(self, v: Var) -> set[Var]:
        """Reflexive-transitive successors of ``v``."""
        adj = self.adjacency()
        seen = {v}
        stack = [v]
        while stack:
            for w in adj.get(stack.pop(), ()):
                if w not in seen:
                    seen.add(w)
                    stack.append(w)
        return seen

    def cyclic_components(self) -> list[list[Var]]:
        return [c for c in _sccs(self.adjacency()) if len(c) > 1 or (c[0], c[0]) in self.edges]


def dependency_order(sigma: Mapping[Var, Term]) -> DependencyGraph:
    return DependencyGraph(frozenset((v, w) for v, t in sigma.items() for w in term_vars(t)))


def _sccs(adj: dict[Var, list[Var]]) -> list[list[Var]]:
    index: dict[Var, int] = {}
    low: dict[Var, int] = {}
    on_stack: set[Var] = set()
    stack: list[Var] = []
    out: list[list[Var]] = []
    counter = 0
    for root in adj:
        if root in index:
            continue
        # iterative Tarjan
        work = [(root, iter(adj[root]))]
        index[root] = low[root] = counter
        counter += 1
        stack.append(root)
        on_stack.add(root)
        while work:
            v, it = work[-1]
            advanced = False
            for w in it:
                if w not in index:
                    index[w] = low[w] = counter
                    counter += 1
                    stack.append(w)
                    on_stack.add(w)
                    work.append((w, iter(adj[w])))
                    advanced = True
                    break
                if w in on_stack:
                    low[v] = min(low[v], index[w])
            if advanced:
                continue
            work.pop()
            if work:
                low[work[-1][0]] = min(low[work[-1][0]], low[v])
            if low[v] == index[v]:
                comp = []
                while True:
                    w = stack.pop()
                    on_stack.discard(w)
                    comp.append(w)
                    if w == v:
                        break
                out.append(sorted(comp, key=lambda x: x.uid))
    return out


@dataclass(frozen=True)
class AdmissibilityVerdict:
    ok: bool
    condition: int | None = None
    witnesses: tuple[Var, ...] = field(default=())

    def __bool__(self):
        return self.ok

    def describe(self, nm: Namer | None = None) -> str:
        if self.ok:
            return "admissible"
        nm = nm or Namer(self.witnesses)
        names = ", ".join(nm(v) for v in self.witnesses)
        if self.condition == 1:
            return f"condition 1 violated: cycle through {names}"
        return f"condition 2 violated: {names}"


OK = AdmissibilityVerdict(True)


def check_condition1(sigma: Mapping[Var, Term]) -> AdmissibilityVerdict:
    graph = dependency_order(sigma)
    for comp in graph.cyclic_components():
        if any(not v.is_eigen for v in comp):
            return AdmissibilityVerdict(False, 1, tuple(comp))
    return OK


def check_condition2(sigma: Mapping[Var, Term], phi: Iterable[Var]) -> AdmissibilityVerdict:
    phi = tuple(phi)
    in_phi = set(phi)
    graph = dependency_order(sigma)
    adj = graph.adjacency()
    for v in phi:
        # reached in one or more steps: a special in Φ does not count against itself
        seen: set[Var] = set()
        stack = [v]
        while stack:
            for w in adj.get(stack.pop(), ()):
                if w not in seen:
                    seen.add(w)
                    stack.append(w)
        for a in seen:
            if not (a.is_special and a.pair is not None):
                continue
            for b in in_phi:
                if b.is_special and b.pair == a.pair and b.side != a.side:
                    return AdmissibilityVerdict(False, 2, (v, a, b))
    return OK


def admissible(sigma: Mapping[Var, Term], phi: Iterable[Var]) -> AdmissibilityVerdict:
    """Both admissibility conditions; the verdict names the witnesses of a failure."""
    v1 = check_condition1(sigma)
    if not v1:
        return v1
    return check_condition2(sigma, phi)


def merge_links(sigma: Mapping[Var, Term], links: Mapping[Var, Iterable[Var]]) -> dict[Var, Term]:
    """``sigma`` with extra structural dependencies appended to the images of linked variables."""
    out: dict[Var, Term] = dict(sigma)
    for v, deps in links.items():
        deps = tuple(deps)
        if not deps:
            continue
        old = out.get(v)
        if old is None:
            out[v] = Tup(deps)
        elif isinstance(old, Tup):
            out[v] = Tup(old.items + deps)
        else:
            out[v] = Tup((old,) + deps)
    return out
