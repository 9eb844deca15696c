"""Focused proof search for the skolemised calculus SLJF.

Quantifier instantiation never appears as a choice point: existential
variables are bound only by unification at axioms, and each axiom is
accepted only if the accumulated substitution stays admissible.  The search
backtracks over focus choices, context splits and copies.

Linear contexts are split lazily: every search function receives the pool of
available resources and yields the pool left over.
"""

from __future__ import annotations

import dataclasses
import itertools
from dataclasses import dataclass, field
from typing import Iterator

from .search import (
    BUDGET_EXHAUSTED,
    PROVED,
    UNPROVABLE,
    Budget,
    NodeLimit,
    Stats,
    count_node,
    multiset_eq,
    multiset_minus,
)
from .substitution import (
    AdmissibilityVerdict,
    Substitution,
    apply_fix,
    check_condition1,
    check_condition2,
    merge_links,
    rename_substitution,
)
from .syntax import (
    FRESH,
    App,
    Closure,
    Namer,
    SBang,
    SDown,
    SFormula,
    SLolli,
    SNAtom,
    SPAtom,
    SSequent,
    STensor,
    SUp,
    Term,
    Tup,
    UidSource,
    Var,
    all_vars,
    iter_contexts,
    rename_sformula,
    term_vars,
)


@dataclass(frozen=True)
class SProofTree:
    rule: str
    conclusion: SSequent
    premises: tuple["SProofTree", ...] = ()
    sigma_before: Substitution = field(default_factory=Substitution, compare=False)
    info: dict = field(default_factory=dict, compare=False)

    def walk(self) -> Iterator["SProofTree"]:
        yield self
        for p in self.premises:
            yield from p.walk()

    def size(self) -> int:
        return sum(1 for _ in self.walk())

    def height(self) -> int:
        return 1 + max((p.height() for p in self.premises), default=0)


@dataclass
class ProveResult:
    verdict: str
    tree: SProofTree | None
    sigma: Substitution | None
    stats: Stats
    trace: list[dict]
    links: dict[Var, tuple[Var, ...]] = field(default_factory=dict)
    sequent: SSequent | None = None

    @property
    def proved(self) -> bool:
        return self.verdict == PROVED


# ----------------------------------------------------------------------------
# unification
# ----------------------------------------------------------------------------


def _resolve(b, t):
    while isinstance(t, Var) and t.is_existential and t in b:
        t = b[t]
    return t


def _occurs(b, x: Var, t) -> bool:
    t = _resolve(b, t)
    if isinstance(t, Var):
        return t == x
    if isinstance(t, App):
        return any(_occurs(b, x, a) for a in t.args)
    return False


def unify_terms(sigma: Substitution, pairs) -> Substitution | None:
    """Syntactic unification binding existential variables only.

    An unbound existential is bound to the other side as written, so chains
    such as ``x3 -> x1 -> u`` are kept rather than collapsed.
    """
    b = dict(sigma)
    new: list[tuple[Var, Term]] = []
    work = list(pairs)
    while work:
        s, t = work.pop()
        s0, t0 = _resolve(b, s), _resolve(b, t)
        if s0 == t0:
            continue
        if isinstance(s0, Var) and s0.is_existential:
            if _occurs(b, s0, t):
                return None
            b[s0] = t
            new.append((s0, t))
            continue
        if isinstance(t0, Var) and t0.is_existential:
            if _occurs(b, t0, s):
                return None
            b[t0] = s
            new.append((t0, s))
            continue
        if isinstance(s0, App) and isinstance(t0, App) and s0.symbol == t0.symbol and len(s0.args) == len(t0.args):
            work.extend(reversed(list(zip(s0.args, t0.args))))
            continue
        return None
    return sigma.extend(*new) if new else sigma


def unify_atoms(a, b, sigma: Substitution) -> Substitution | None:
    if type(a) is not type(b) or a.pred != b.pred or len(a.args) != len(b.args):
        return None
    return unify_terms(sigma, zip(a.args, b.args))


# ----------------------------------------------------------------------------
# store
# ----------------------------------------------------------------------------


@dataclass(frozen=True)
class Store:
    """Search state threaded through a derivation: the global substitution,
    structural dependency links, and the effective contexts of axioms so far."""

    sigma: Substitution
    links: tuple[tuple[Var, tuple[Var, ...]], ...] = ()
    axioms: tuple[tuple[Var, ...], ...] = ()

    def link_map(self) -> dict[Var, tuple[Var, ...]]:
        out: dict[Var, tuple[Var, ...]] = {}
        for v, deps in self.links:
            out[v] = iter_contexts(out.get(v, ()), deps)
        return out

    def with_links(self, *entries) -> "Store":
        entries = tuple((v, tuple(d)) for v, d in entries if d)
        if not entries:
            return self
        return dataclasses.replace(self, links=self.links + entries)

    def dependency_map(self) -> dict:
        return merge_links(self.sigma, self.link_map())


def check_store(store: Store, phis) -> AdmissibilityVerdict:
    deps = store.dependency_map()
    v = check_condition1(deps)
    if not v:
        return v
    for phi in phis:
        v = check_condition2(deps, phi)
        if not v:
            return v
    return v


@dataclass(frozen=True)
class Ctx:
    gamma: tuple[Closure, ...]
    copies: tuple[int, ...]
    path: tuple[Var, ...] = ()

    def down(self, *specials: Var) -> "Ctx":
        return dataclasses.replace(self, path=self.path + tuple(specials))


def bang_right_entries(closures, target: SBang) -> list[tuple[Var, Term]]:
    """The !R extension: ``(Φ1..Φn)/a`` for the target and ``(Φ)/a_i`` per closure.
    The target is always bound, if need be to ``()``; closure entries with an
    empty Φ carry no dependency and are left out."""
    out: list[tuple[Var, Term]] = [(target.a, Tup(iter_contexts(*(c.phi for c in closures))))]
    if target.phi:
        for c in closures:
            out.append((c.a, Tup(tuple(target.phi))))
    return out


def extend_sigma(sigma: Substitution, entries) -> Substitution:
    """Add entries, merging a repeated tuple binding into one tuple."""
    m = dict(sigma)
    for v, t in entries:
        old = m.get(v)
        if old is None or old == t:
            m[v] = t
        elif isinstance(old, Tup) and isinstance(t, Tup):
            m[v] = Tup(iter_contexts(old.items, t.items))
        else:
            raise ValueError(f"{v!r} bound twice")
    return Substitution(m.items())


def copy_renaming(c: Closure, fresh: UidSource) -> dict[Var, Var]:
    """Fresh names for every variable of the closure except its context Φ."""
    keep = set(c.phi)
    pairs: dict[int, int] = {}
    mapping: dict[Var, Var] = {}
    for v in all_vars(c.body, c.sigma, c.a):
        if v in keep or v in mapping:
            continue
        pid = None
        if v.pair is not None:
            pid = pairs.setdefault(v.pair, fresh())
        mapping[v] = Var(v.name, v.kind, fresh(), pair=pid, side=v.side)
    return mapping


# ----------------------------------------------------------------------------
# engine
# ----------------------------------------------------------------------------


def _stable_goal(g) -> bool:
    return isinstance(g, (SNAtom, SUp))


class SLJFProver:
    def __init__(self, budget: Budget = Budget(), *, trace: bool = False, fresh: UidSource = FRESH):
        self.budget = budget
        self.stats = Stats()
        self.tracing = trace
        self.trace: list[dict] = []
        self.fresh = fresh
        self._rid = itertools.count()
        self._namer: Namer | None = None

    # trace helpers -------------------------------------------------------------

    def _event(self, **kw):
        if self.tracing:
            self.trace.append(kw)

    def _names(self, vs) -> list[str]:
        return [self._namer(v) if self._namer else v.name for v in vs]

    # entry point -----------------------------------------------------------

    def prove(self, s: SSequent) -> ProveResult:
        self._namer = Namer(s)
        ctx = Ctx(tuple(s.gamma), tuple(0 for _ in s.gamma))
        pool = tuple((next(self._rid), d) for d in s.delta)
        store = Store(s.sigma)
        found = None
        try:
            for node, out, st in self._inv(ctx, pool, s.goal, store, 0):
                if out:
                    continue
                final = check_store(st, st.axioms)
                self.stats.admissibility_checks += 1
                if not final:
                    self.stats.admissibility_failures[final.condition] += 1
                    self._event(event="final_check", verdict=f"cond{final.condition}",
                                witnesses=self._names(final.witnesses))
                    continue
                found = (node, st)
                break
        except NodeLimit:
            return ProveResult(BUDGET_EXHAUSTED, None, None, self.stats, self.trace, sequent=s)
        if found is None:
            verdict = BUDGET_EXHAUSTED if self.stats.refused else UNPROVABLE
            return ProveResult(verdict, None, None, self.stats, self.trace, sequent=s)
        node, st = found
        tree = _finalise(node, st.sigma)
        return ProveResult(PROVED, tree, st.sigma, self.stats, self.trace, st.link_map(), s)

    # helpers ---------------------------------------------------------------

    def _new(self, f) -> tuple[int, SFormula]:
        return (next(self._rid), f)

    def _node(self, rule, ctx, pool, out, goal, st, premises, *, lfocus=None, rfocus=False, **info):
        used = {rid for rid, _ in out}
        delta = tuple(f for rid, f in pool if rid not in used)
        concl = SSequent(ctx.gamma, delta, goal, st.sigma, lfocus=lfocus, rfocus=rfocus)
        return SProofTree(rule, concl, tuple(premises), st.sigma, info)

    def _depth_ok(self, d: int) -> bool:
        if d > self.budget.depth:
            self.stats.depth_refusals += 1
            return False
        count_node(self.stats, self.budget)
        return True

    # inversion -------------------------------------------------------------

    def _inv(self, ctx: Ctx, pool, goal, st: Store, d: int):
        if not self._depth_ok(d):
            return
        if isinstance(goal, SLolli):
            r = self._new(goal.ante)
            for n, out, st2 in self._inv(ctx, pool + (r,), goal.cons, st, d + 1):
                if r in out:
                    continue
                yield self._node("-oR", ctx, pool, out, goal, st, [n]), out, st2
            return
        for i, (rid, f) in enumerate(pool):
            if isinstance(f, STensor):
                r1, r2 = self._new(f.left), self._new(f.right)
                pool2 = pool[:i] + (r1, r2) + pool[i + 1:]
                for n, out, st2 in self._inv(ctx, pool2, goal, st, d + 1):
                    if r1 in out or r2 in out:
                        continue
                    yield self._node("*L", ctx, pool, out, goal, st, [n]), out, st2
                return
            if isinstance(f, SBang):
                c = Closure(f.a, f.phi, f.sigma, f.body)
                ctx2 = dataclasses.replace(ctx, gamma=ctx.gamma + (c,), copies=ctx.copies + (0,))
                pool2 = pool[:i] + pool[i + 1:]
                for n, out, st2 in self._inv(ctx2, pool2, goal, st, d + 1):
                    yield self._node("!L", ctx, pool, out, goal, st, [n]), out, st2
                return
        yield from self._focus(ctx, pool, goal, st, d)

    def _focus(self, ctx: Ctx, pool, goal, st: Store, d: int):
        # right focus first
        if isinstance(goal, SUp):
            ok = False
            for n, out, st2 in self._rfocus(ctx, pool, goal.body, st, d + 1):
                ok = True
                yield self._node("focusR", ctx, pool, out, goal, st, [n]), out, st2
            if not ok:
                self.stats.focus_backtracks += 1
        for i, r in enumerate(pool):
            rid, f = r
            if not isinstance(f, SDown):
                continue
            ok = False
            pool2 = pool[:i] + pool[i + 1:]
            for n, out, st2 in self._lfocus(ctx, pool2, f.body, goal, st, d + 1):
                ok = True
                yield self._node("focusL", ctx, pool, out, goal, st, [n]), out, st2
            if not ok:
                self.stats.focus_backtracks += 1
        for i, c in enumerate(ctx.gamma):
            if ctx.copies[i] >= self.budget.copy_bound:
                self.stats.copy_refusals += 1
                continue
            ren = copy_renaming(c, self.fresh)
            body = rename_sformula(c.body, ren)
            try:
                sigma = extend_sigma(st.sigma, rename_substitution(c.sigma, ren).items())
            except ValueError:
                continue
            a2 = ren.get(c.a, c.a)
            st2 = dataclasses.replace(st, sigma=sigma).with_links((a2, iter_contexts(c.phi, ctx.path)))
            if not check_condition1(st2.dependency_map()):
                continue
            self.stats.copies += 1
            copies = ctx.copies[:i] + (ctx.copies[i] + 1,) + ctx.copies[i + 1:]
            ctx2 = dataclasses.replace(ctx, copies=copies)
            ok = False
            for n, out, st3 in self._lfocus(ctx2, pool, body, goal, st2, d + 1):
                ok = True
                yield (
                    self._node("copy", ctx, pool, out, goal, st, [n], closure=i, renaming=tuple(ren.items())),
                    out,
                    st3,
                )
            if not ok:
                self.stats.focus_backtracks += 1

    # left focus ------------------------------------------------------------

    def _lfocus(self, ctx: Ctx, pool, n: SFormula, goal, st: Store, d: int):
        if not self._depth_ok(d):
            return
        if isinstance(n, SNAtom):
            if not isinstance(goal, SNAtom):
                return
            for st2 in self._axiom(n, goal, ctx, st, "ax-"):
                yield self._node("ax-", ctx, pool, pool, goal, st, [], lfocus=n), pool, st2
            return
        if isinstance(n, SLolli):
            st1 = st
            left_ctx, right_ctx = ctx, ctx
            if n.pair is not None:
                al, ar = n.pair
                st1 = st.with_links((al, iter_contexts(n.scope, ctx.path)), (ar, iter_contexts(n.scope, ctx.path)))
                left_ctx, right_ctx = ctx.down(al), ctx.down(ar)
            for n1, out1, st2 in self._rfocus(left_ctx, pool, n.ante, st1, d + 1):
                for n2, out2, st3 in self._lfocus(right_ctx, out1, n.cons, goal, st2, d + 1):
                    yield self._node("-oL", ctx, pool, out2, goal, st, [n1, n2], lfocus=n), out2, st3
            return
        if isinstance(n, SUp):
            r = self._new(n.body)
            for p, out, st2 in self._inv(ctx, pool + (r,), goal, st, d + 1):
                if r in out:
                    continue
                yield self._node("blurL", ctx, pool, out, goal, st, [p], lfocus=n), out, st2
            return
        raise TypeError(f"cannot focus on {type(n).__name__} on the left")

    # right focus -----------------------------------------------------------

    def _rfocus(self, ctx: Ctx, pool, p: SFormula, st: Store, d: int):
        if not self._depth_ok(d):
            return
        if isinstance(p, SPAtom):
            for i, (rid, f) in enumerate(pool):
                if not isinstance(f, SPAtom):
                    continue
                out = pool[:i] + pool[i + 1:]
                for st2 in self._axiom(f, p, ctx, st, "ax+"):
                    yield self._node("ax+", ctx, pool, out, p, st, [], rfocus=True), out, st2
            return
        if isinstance(p, STensor):
            st1 = st
            left_ctx, right_ctx = ctx, ctx
            if p.pair is not None:
                al, ar = p.pair
                st1 = st.with_links((al, iter_contexts(p.scope, ctx.path)), (ar, iter_contexts(p.scope, ctx.path)))
                left_ctx, right_ctx = ctx.down(al), ctx.down(ar)
            for n1, out1, st2 in self._rfocus(left_ctx, pool, p.left, st1, d + 1):
                for n2, out2, st3 in self._rfocus(right_ctx, out1, p.right, st2, d + 1):
                    yield self._node("*R", ctx, pool, out2, p, st, [n1, n2], rfocus=True), out2, st3
            return
        if isinstance(p, SBang):
            entries = [*p.sigma.items(), *bang_right_entries(ctx.gamma, p)]
            try:
                sigma = extend_sigma(st.sigma, entries)
            except ValueError:
                return
            st1 = dataclasses.replace(st, sigma=sigma).with_links((p.a, iter_contexts(p.phi, ctx.path)))
            verdict = check_condition1(st1.dependency_map())
            if not verdict:
                self.stats.admissibility_failures[1] += 1
                self._event(event="bang_right", verdict="cond1", witnesses=self._names(verdict.witnesses))
                return
            for n, out, st2 in self._inv(ctx.down(p.a), (), p.body, st1, d + 1):
                yield self._node("!R", ctx, pool, pool, p, st, [n], rfocus=True, entries=tuple(entries)), pool, st2
            return
        if isinstance(p, SDown):
            for n, out, st2 in self._inv(ctx, pool, p.body, st, d + 1):
                yield self._node("blurR", ctx, pool, out, p, st, [n], rfocus=True), out, st2
            return
        raise TypeError(f"cannot focus on {type(p).__name__} on the right")

    # axioms ----------------------------------------------------------------

    def _axiom(self, a, b, ctx: Ctx, st: Store, rule: str):
        self.stats.unifications += 1
        names = Namer(a, b) if self._namer is None else self._namer
        from .syntax import formula_str

        desc = {"left": formula_str(a, names), "right": formula_str(b, names)}
        sigma = unify_atoms(a, b, st.sigma)
        if sigma is None:
            self._event(event="axiom", rule=rule, verdict="clash", **desc)
            return
        phi = iter_contexts(a.phi, b.phi, ctx.path)
        st2 = dataclasses.replace(st, sigma=sigma, axioms=st.axioms + (phi,))
        self.stats.admissibility_checks += 1
        verdict = check_store(st2, st2.axioms)
        if not verdict:
            self.stats.admissibility_failures[verdict.condition] += 1
            self._event(event="axiom", rule=rule, verdict=f"cond{verdict.condition}",
                        witnesses=self._names(verdict.witnesses), **desc)
            return
        self._event(event="axiom", rule=rule, verdict="ok", **desc)
        yield st2


def _finalise(t: SProofTree, sigma: Substitution) -> SProofTree:
    concl = dataclasses.replace(t.conclusion, sigma=sigma)
    return dataclasses.replace(t, conclusion=concl, premises=tuple(_finalise(p, sigma) for p in t.premises))


def prove(s: SSequent, budget: Budget = Budget(), *, trace: bool = False, fresh: UidSource = FRESH) -> ProveResult:
    return SLJFProver(budget, trace=trace, fresh=fresh).prove(s)


# ----------------------------------------------------------------------------
# checker
# ----------------------------------------------------------------------------


class CheckError(ValueError):
    def __init__(self, msg: str, path: tuple[int, ...] = ()):
        super().__init__(f"{msg} (at node {'/'.join(map(str, path)) or 'root'})")
        self.path = path


def _stable(seq: SSequent) -> bool:
    return all(isinstance(f, (SPAtom, SDown)) for f in seq.delta) and _stable_goal(seq.goal)


def _atoms_equal(a, b, sigma) -> bool:
    if type(a) is not type(b) or a.pred != b.pred or len(a.args) != len(b.args):
        return False
    return all(apply_fix(sigma, x) == apply_fix(sigma, y) for x, y in zip(a.args, b.args))


def check_sljf(tree: SProofTree, root: SSequent | None = None) -> bool:
    """Validate every node against its rule schema, linearity, the copy and !R
    side conditions, and admissibility of every axiom under the final σ.
    Raises ``CheckError`` with the path of the first bad node."""
    sigma = tree.conclusion.sigma
    if root is not None:
        c = tree.conclusion
        if c.gamma != root.gamma or not multiset_eq(c.delta, root.delta) or c.goal != root.goal:
            raise CheckError("root conclusion differs from the sequent", ())
        missing = [v for v in root.sigma if root.sigma[v] != sigma.get(v)]
        if missing:
            raise CheckError("final substitution drops skolem entries", ())
    v = check_condition1(sigma)
    if not v:
        raise CheckError(f"final substitution not admissible: {v.describe()}")
    links: dict[Var, tuple[Var, ...]] = {}
    axioms: list[tuple[Var, ...]] = []

    def link(v, deps):
        if deps:
            links[v] = iter_contexts(links.get(v, ()), deps)

    def go(t: SProofTree, path: tuple[Var, ...], at: tuple[int, ...]):
        c = t.conclusion
        ps = [p.conclusion for p in t.premises]
        if c.sigma != sigma or any(p.sigma != sigma for p in ps):
            raise CheckError("substitution differs between nodes", at)
        fail = lambda msg: CheckError(f"{t.rule}: {msg}", at)  # noqa: E731
        nprem = {"ax-": 0, "ax+": 0, "-oL": 2, "*R": 2}.get(t.rule, 1)
        if len(ps) != nprem:
            raise fail("wrong number of premises")
        sub = [path] * nprem
        r = t.rule
        if r == "ax-":
            if not (isinstance(c.lfocus, SNAtom) and isinstance(c.goal, SNAtom) and not c.delta and not c.rfocus):
                raise fail("shape")
            if not _atoms_equal(c.lfocus, c.goal, sigma):
                raise fail("atoms do not unify under the final substitution")
            axioms.append(iter_contexts(c.lfocus.phi, c.goal.phi, path))
        elif r == "ax+":
            if not (c.rfocus and isinstance(c.goal, SPAtom) and len(c.delta) == 1 and c.lfocus is None):
                raise fail("shape")
            if not _atoms_equal(c.delta[0], c.goal, sigma):
                raise fail("atoms do not unify under the final substitution")
            axioms.append(iter_contexts(c.delta[0].phi, c.goal.phi, path))
        elif r == "-oL":
            n = c.lfocus
            p1, p2 = ps
            if not isinstance(n, SLolli):
                raise fail("focus is not a lolli")
            if not (p1.rfocus and p1.goal == n.ante and p1.lfocus is None):
                raise fail("left premise")
            if not (p2.lfocus == n.cons and p2.goal == c.goal and not p2.rfocus):
                raise fail("right premise")
            if not multiset_eq(p1.delta + p2.delta, c.delta):
                raise fail("linear context is not split exactly")
            if n.pair:
                link(n.pair[0], iter_contexts(n.scope, path))
                link(n.pair[1], iter_contexts(n.scope, path))
                sub = [path + (n.pair[0],), path + (n.pair[1],)]
        elif r == "*R":
            p = c.goal
            p1, p2 = ps
            if not (c.rfocus and isinstance(p, STensor)):
                raise fail("shape")
            if not (p1.rfocus and p1.goal == p.left and p2.rfocus and p2.goal == p.right):
                raise fail("premises")
            if not multiset_eq(p1.delta + p2.delta, c.delta):
                raise fail("linear context is not split exactly")
            if p.pair:
                link(p.pair[0], iter_contexts(p.scope, path))
                link(p.pair[1], iter_contexts(p.scope, path))
                sub = [path + (p.pair[0],), path + (p.pair[1],)]
        elif r == "-oR":
            (p,) = ps
            if not (isinstance(c.goal, SLolli) and c.lfocus is None and not c.rfocus):
                raise fail("shape")
            if not (p.goal == c.goal.cons and multiset_eq(p.delta, c.delta + (c.goal.ante,)) and p.lfocus is None):
                raise fail("premise")
        elif r == "*L":
            (p,) = ps
            tens = [f for f in c.delta if isinstance(f, STensor)]
            ok = any(
                multiset_eq(p.delta, multiset_minus(c.delta, (f,)) + (f.left, f.right)) for f in tens
            )
            if not ok or p.goal != c.goal or c.lfocus or c.rfocus or p.lfocus or p.rfocus:
                raise fail("premise")
        elif r == "!L":
            (p,) = ps
            if len(p.gamma) != len(c.gamma) + 1 or p.gamma[:-1] != c.gamma:
                raise fail("unrestricted context")
            cl = p.gamma[-1]
            bang = SBang(cl.a, cl.phi, cl.sigma, cl.body)
            rest = multiset_minus(c.delta, (bang,))
            if rest is None or not multiset_eq(p.delta, rest) or p.goal != c.goal or c.lfocus or c.rfocus:
                raise fail("premise")
        elif r == "!R":
            (p,) = ps
            b = c.goal
            if not (c.rfocus and isinstance(b, SBang) and not c.delta):
                raise fail("shape")
            if not (p.goal == b.body and not p.delta and p.gamma == c.gamma and p.lfocus is None and not p.rfocus):
                raise fail("premise")
            for v, term in [*b.sigma.items(), *bang_right_entries(c.gamma, b)]:
                have = sigma.get(v)
                if have is None:
                    raise fail(f"missing entry for {v!r}")
                if have != term and not (
                    isinstance(have, Tup) and isinstance(term, Tup) and set(term.items) <= set(have.items)
                ):
                    raise fail(f"entry for {v!r} differs")
            link(b.a, iter_contexts(b.phi, path))
            sub = [path + (b.a,)]
        elif r == "copy":
            (p,) = ps
            if not _stable(c) or c.lfocus is not None or c.rfocus:
                raise fail("copy needs a stable sequent")
            i = t.info.get("closure")
            ren = dict(t.info.get("renaming", ()))
            if i is None or not (0 <= i < len(c.gamma)):
                raise fail("unknown closure")
            cl = c.gamma[i]
            expected_dom = {v for v in all_vars(cl.body, cl.sigma, cl.a) if v not in set(cl.phi)}
            if set(ren) != expected_dom:
                raise fail("renaming does not cover exactly the closure's own variables")
            if len(set(ren.values())) != len(ren):
                raise fail("renaming is not injective")
            concl_vars = set(all_vars(c.gamma, c.delta, c.goal))
            if any(w in concl_vars for w in ren.values()):
                raise fail("renamed variables are not fresh")
            if p.lfocus != rename_sformula(cl.body, ren) or not multiset_eq(p.delta, c.delta) or p.goal != c.goal:
                raise fail("premise")
            for v, term in rename_substitution(cl.sigma, ren).items():
                if sigma.get(v) != term:
                    raise fail("copied substitution missing")
            a2 = ren.get(cl.a, cl.a)
            link(a2, iter_contexts(cl.phi, path))
        elif r == "focusL":
            (p,) = ps
            if not _stable(c) or c.lfocus is not None or c.rfocus:
                raise fail("focus needs a stable sequent")
            if p.lfocus is None:
                raise fail("premise has no focus")
            rest = multiset_minus(c.delta, (SDown(p.lfocus),))
            if rest is None or not multiset_eq(p.delta, rest) or p.goal != c.goal:
                raise fail("premise")
        elif r == "focusR":
            (p,) = ps
            if not _stable(c) or c.lfocus is not None or c.rfocus or not isinstance(c.goal, SUp):
                raise fail("focus needs a stable sequent with an up-shifted goal")
            if not (p.rfocus and p.goal == c.goal.body and multiset_eq(p.delta, c.delta)):
                raise fail("premise")
        elif r == "blurL":
            (p,) = ps
            if not isinstance(c.lfocus, SUp):
                raise fail("shape")
            if not (p.lfocus is None and not p.rfocus and multiset_eq(p.delta, c.delta + (c.lfocus.body,))):
                raise fail("premise")
            if p.goal != c.goal:
                raise fail("goal changed")
        elif r == "blurR":
            (p,) = ps
            if not (c.rfocus and isinstance(c.goal, SDown)):
                raise fail("shape")
            if not (p.goal == c.goal.body and not p.rfocus and p.lfocus is None and multiset_eq(p.delta, c.delta)):
                raise fail("premise")
        else:
            raise fail("unknown rule")
        for j, q in enumerate(t.premises):
            if r not in ("!L",) and q.conclusion.gamma != c.gamma:
                raise CheckError(f"{r}: unrestricted context changed", at)
            go(q, sub[j], at + (j,))

    go(tree, (), ())
    deps = merge_links(sigma, links)
    v = check_condition1(deps)
    if not v:
        raise CheckError(f"final substitution not admissible: {v.describe()}")
    for phi in axioms:
        v = check_condition2(deps, phi)
        if not v:
            raise CheckError(f"axiom context not admissible: {v.describe()}")
    return True


def free_term_vars(sigma: Substitution) -> set[Var]:
    return {w for t in sigma.values() for w in term_vars(t)}
