"""Reference prover for focused first-order linear logic (LJF) and its checker.

Quantifier instantiation uses metavariables solved by unification.  Each
metavariable remembers which Eigen-variables were in scope when it was
created and may only be bound to terms over those, which keeps ∀R/∃L
freshness intact.  The search backtracks over everything, including the
point at which a quantifier is instantiated; ``term_backtracks`` counts the
instantiation nodes that had to be abandoned.
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
from .syntax import (
    FRESH,
    App,
    Bang,
    Down,
    Exists,
    Forall,
    Formula,
    Lolli,
    NAtom,
    PAtom,
    Sequent,
    Tensor,
    Term,
    UidSource,
    Up,
    Var,
    VarKind,
    alpha_equiv,
    alpha_rename,
    formula_free_vars,
    instantiate,
    subst_formula,
    term_vars,
)


@dataclass(frozen=True)
class LProofTree:
    rule: str
    conclusion: Sequent
    premises: tuple["LProofTree", ...] = ()
    witness: Term | None = None
    eigen: Var | None = None
    tag: object = field(default=None, compare=False)

    def walk(self) -> Iterator["LProofTree"]:
        yield self
        for p in self.premises:
            yield from p.walk()

    def size(self) -> int:
        return sum(1 for _ in self.walk())

    def height(self) -> int:
        return 1 + max((p.height() for p in self.premises), default=0)


@dataclass
class LJFResult:
    verdict: str
    tree: LProofTree | None
    stats: Stats

    @property
    def proved(self) -> bool:
        return self.verdict == PROVED


# ----------------------------------------------------------------------------
# metavariable state
# ----------------------------------------------------------------------------


@dataclass(frozen=True)
class MState:
    bind: dict = field(default_factory=dict)
    scope: dict = field(default_factory=dict)  # metavariable -> frozenset of allowed Eigen-variables
    used: frozenset = frozenset()  # guided copy instances already spent

    def is_meta(self, v) -> bool:
        return isinstance(v, Var) and v in self.scope

    def resolve(self, t):
        while isinstance(t, Var) and t in self.bind:
            t = self.bind[t]
        return t

    def deep(self, t):
        t = self.resolve(t)
        if isinstance(t, App) and t.args:
            return App(t.symbol, tuple(self.deep(a) for a in t.args))
        return t


def _unify(st: MState, pairs) -> MState | None:
    bind = dict(st.bind)
    scope = dict(st.scope)
    view = MState(bind, scope)
    work = list(pairs)
    while work:
        s, t = work.pop()
        s0, t0 = view.resolve(s), view.resolve(t)
        if s0 == t0:
            continue
        if not view.is_meta(s0) and view.is_meta(t0):
            s0, t0 = t0, s0
        if view.is_meta(s0):
            full = view.deep(t0)
            vs = list(term_vars(full))
            if s0 in vs:
                return None
            allowed = scope[s0]
            for w in vs:
                if view.is_meta(w):
                    scope[w] = scope[w] & allowed
                elif w not in allowed:
                    return None
            bind[s0] = t0
            continue
        if isinstance(s0, App) and isinstance(t0, App) and s0.symbol == t0.symbol and len(s0.args) == len(t0.args):
            work.extend(zip(s0.args, t0.args))
            continue
        return None
    return MState(bind, scope, st.used)


def unify_atoms(a, b, st: MState) -> MState | None:
    if type(a) is not type(b) or a.pred != b.pred or len(a.args) != len(b.args):
        return None
    return _unify(st, zip(a.args, b.args))


# ----------------------------------------------------------------------------
# search
# ----------------------------------------------------------------------------


@dataclass(frozen=True)
class LCtx:
    gamma: tuple[Formula, ...]
    worlds: tuple[object, ...]  # the special variable naming each Γ entry, if known
    copies: tuple[int, ...]
    eigens: frozenset = frozenset()

    def add_gamma(self, f, world) -> "LCtx":
        return dataclasses.replace(
            self, gamma=self.gamma + (f,), worlds=self.worlds + (world,), copies=self.copies + (0,)
        )


def _stable_left(f) -> bool:
    return isinstance(f, (PAtom, Down))


def _stable_goal(g) -> bool:
    return isinstance(g, (NAtom, Up))


class Guide:
    """Hooks that turn the prover into a replay of a known skolemised proof."""

    def witness(self, binder: Var, eigens: frozenset) -> Term | None:
        raise NotImplementedError

    def copy_instances(self, world) -> list[tuple[object, dict]]:
        raise NotImplementedError


class _Fail:
    pass


FAIL = _Fail()


class LJFProver:
    def __init__(
        self,
        budget: Budget = Budget(),
        *,
        guide: Guide | None = None,
        default_constant: str = "t0",
        fresh: UidSource = FRESH,
    ):
        self.budget = budget
        self.guide = guide
        self.stats = Stats()
        self.const = App(default_constant, ())
        self.fresh = fresh
        self._rid = itertools.count()

    def prove(self, s: Sequent, worlds: tuple | None = None) -> LJFResult:
        ctx = LCtx(tuple(s.gamma), tuple(worlds or (None,) * len(s.gamma)), tuple(0 for _ in s.gamma))
        pool = tuple((next(self._rid), d) for d in s.delta)
        try:
            for node, out, st in self._inv(ctx, pool, s.goal, MState(), 0):
                if out:
                    continue
                return LJFResult(PROVED, self._ground(node, st), self.stats)
        except NodeLimit:
            return LJFResult(BUDGET_EXHAUSTED, None, self.stats)
        verdict = BUDGET_EXHAUSTED if self.stats.refused else UNPROVABLE
        return LJFResult(verdict, None, self.stats)

    # grounding -------------------------------------------------------------

    def _ground(self, tree: LProofTree, st: MState) -> LProofTree:
        g = {}
        for m in st.scope:
            t = st.deep(m)
            g[m] = t
        for m in list(g):
            g[m] = _replace_metas(g[m], st, self.const)

        def gf(f):
            return None if f is None else subst_formula(f, g)

        def gt(t: LProofTree) -> LProofTree:
            c = t.conclusion
            concl = Sequent(
                tuple(gf(x) for x in c.gamma), tuple(gf(x) for x in c.delta), gf(c.goal), gf(c.lfocus), c.rfocus
            )
            w = None if t.witness is None else _replace_metas(st.deep(t.witness), st, self.const)
            return dataclasses.replace(t, conclusion=concl, premises=tuple(gt(p) for p in t.premises), witness=w)

        return gt(tree)

    # helpers ---------------------------------------------------------------

    def _new(self, f):
        return (next(self._rid), f)

    def _node(self, rule, ctx, pool, out, goal, premises, *, lfocus=None, rfocus=False, **kw):
        used = {rid for rid, _ in out}
        delta = tuple(f for rid, f in pool if rid not in used)
        return LProofTree(rule, Sequent(ctx.gamma, delta, goal, lfocus, rfocus), tuple(premises), **kw)

    def _depth_ok(self, d):
        if d > self.budget.depth:
            self.stats.depth_refusals += 1
            return False
        count_node(self.stats, self.budget)
        return True

    def _instance(self, q, ctx: LCtx, st: MState):
        """Term for a ∀L/∃R binder: guided witness or a fresh metavariable."""
        if self.guide is not None:
            t = self.guide.witness(q.var, ctx.eigens)
            if t is FAIL:
                return None, st
            if t is not None:
                return t, st
        m = Var(q.var.name, VarKind.EXISTENTIAL, self.fresh())
        scope = dict(st.scope)
        scope[m] = ctx.eigens
        return m, MState(st.bind, scope, st.used)

    # inversion -------------------------------------------------------------

    def _inv(self, ctx: LCtx, pool, goal, st: MState, d: int):
        if not self._depth_ok(d):
            return
        if isinstance(goal, Lolli):
            r = self._new(goal.ante)
            for n, out, st2 in self._inv(ctx, pool + (r,), goal.cons, st, d + 1):
                if r in out:
                    continue
                yield self._node("-oR", ctx, pool, out, goal, [n]), out, st2
            return
        if isinstance(goal, Forall):
            u = goal.var.with_kind(VarKind.EIGEN)
            body = instantiate(goal, u)
            ctx2 = dataclasses.replace(ctx, eigens=ctx.eigens | {u})
            for n, out, st2 in self._inv(ctx2, pool, body, st, d + 1):
                yield self._node("forallR", ctx, pool, out, goal, [n], eigen=u), out, st2
            return
        for i, (rid, f) in enumerate(pool):
            if isinstance(f, Tensor):
                r1, r2 = self._new(f.left), self._new(f.right)
                pool2 = pool[:i] + (r1, r2) + pool[i + 1:]
                for n, out, st2 in self._inv(ctx, pool2, goal, st, d + 1):
                    if r1 in out or r2 in out:
                        continue
                    yield self._node("*L", ctx, pool, out, goal, [n], tag=f.tag), out, st2
                return
            if isinstance(f, Bang):
                pool2 = pool[:i] + pool[i + 1:]
                for n, out, st2 in self._inv(ctx.add_gamma(f.body, f.tag), pool2, goal, st, d + 1):
                    yield self._node("!L", ctx, pool, out, goal, [n], tag=f.tag), out, st2
                return
            if isinstance(f, Exists):
                u = f.var.with_kind(VarKind.EIGEN)
                r = self._new(instantiate(f, u))
                pool2 = pool[:i] + (r,) + pool[i + 1:]
                ctx2 = dataclasses.replace(ctx, eigens=ctx.eigens | {u})
                for n, out, st2 in self._inv(ctx2, pool2, goal, st, d + 1):
                    if r in out:
                        continue
                    yield self._node("existsL", ctx, pool, out, goal, [n], eigen=u), out, st2
                return
        yield from self._focus(ctx, pool, goal, st, d)

    def _focus(self, ctx: LCtx, pool, goal, st: MState, d: int):
        # left foci in context order, then the right, then copies
        for i, (rid, f) in enumerate(pool):
            if not isinstance(f, Down):
                continue
            ok = False
            pool2 = pool[:i] + pool[i + 1:]
            for n, out, st2 in self._lfocus(ctx, pool2, f.body, goal, st, d + 1):
                ok = True
                yield self._node("focusL", ctx, pool, out, goal, [n]), out, st2
            if not ok:
                self.stats.focus_backtracks += 1
        if isinstance(goal, Up):
            ok = False
            for n, out, st2 in self._rfocus(ctx, pool, goal.body, st, d + 1):
                ok = True
                yield self._node("focusR", ctx, pool, out, goal, [n]), out, st2
            if not ok:
                self.stats.focus_backtracks += 1
        for i, g in enumerate(ctx.gamma):
            if ctx.copies[i] >= self.budget.copy_bound:
                self.stats.copy_refusals += 1
                continue
            copies = ctx.copies[:i] + (ctx.copies[i] + 1,) + ctx.copies[i + 1:]
            ctx2 = dataclasses.replace(ctx, copies=copies)
            for inst, key, st1 in self._copies(g, ctx.worlds[i], st):
                self.stats.copies += 1
                ok = False
                for n, out, st2 in self._lfocus(ctx2, pool, inst, goal, st1, d + 1):
                    ok = True
                    yield self._node("copy", ctx, pool, out, goal, [n], tag=key), out, st2
                if not ok:
                    self.stats.focus_backtracks += 1

    def _copies(self, g, world, st: MState):
        if self.guide is None:
            yield alpha_rename(g, self.fresh), None, st
            return
        for key, ren in self.guide.copy_instances(world):
            if key in st.used:
                continue
            yield subst_formula(g, ren), key, MState(st.bind, st.scope, st.used | {key})

    # left focus ------------------------------------------------------------

    def _lfocus(self, ctx: LCtx, pool, n, goal, st: MState, d: int):
        if not self._depth_ok(d):
            return
        if isinstance(n, NAtom):
            if not isinstance(goal, NAtom):
                return
            self.stats.unifications += 1
            st2 = unify_atoms(n, goal, st)
            if st2 is not None:
                yield self._node("ax-", ctx, pool, pool, goal, [], lfocus=n), pool, st2
            return
        if isinstance(n, Lolli):
            for n1, out1, st2 in self._rfocus(ctx, pool, n.ante, st, d + 1):
                for n2, out2, st3 in self._lfocus(ctx, out1, n.cons, goal, st2, d + 1):
                    yield self._node("-oL", ctx, pool, out2, goal, [n1, n2], lfocus=n, tag=n.tag), out2, st3
            return
        if isinstance(n, Forall):
            t, st1 = self._instance(n, ctx, st)
            if t is None:
                return
            for p, out, st2 in self._lfocus(ctx, pool, instantiate(n, t), goal, st1, d + 1):
                yield self._node("forallL", ctx, pool, out, goal, [p], lfocus=n, witness=t), out, st2
            self.stats.term_backtracks += 1
            return
        if isinstance(n, Up):
            r = self._new(n.body)
            for p, out, st2 in self._inv(ctx, pool + (r,), goal, st, d + 1):
                if r in out:
                    continue
                yield self._node("blurL", ctx, pool, out, goal, [p], lfocus=n), out, st2
            return
        raise TypeError(f"cannot focus on {type(n).__name__} on the left")

    # right focus -----------------------------------------------------------

    def _rfocus(self, ctx: LCtx, pool, p, st: MState, d: int):
        if not self._depth_ok(d):
            return
        if isinstance(p, PAtom):
            for i, (rid, f) in enumerate(pool):
                if not isinstance(f, PAtom):
                    continue
                self.stats.unifications += 1
                st2 = unify_atoms(f, p, st)
                if st2 is None:
                    continue
                out = pool[:i] + pool[i + 1:]
                yield self._node("ax+", ctx, pool, out, p, [], rfocus=True), out, st2
            return
        if isinstance(p, Tensor):
            for n1, out1, st2 in self._rfocus(ctx, pool, p.left, st, d + 1):
                for n2, out2, st3 in self._rfocus(ctx, out1, p.right, st2, d + 1):
                    yield self._node("*R", ctx, pool, out2, p, [n1, n2], rfocus=True, tag=p.tag), out2, st3
            return
        if isinstance(p, Bang):
            for n, out, st2 in self._inv(ctx, (), p.body, st, d + 1):
                yield self._node("!R", ctx, pool, pool, p, [n], rfocus=True, tag=p.tag), pool, st2
            return
        if isinstance(p, Exists):
            t, st1 = self._instance(p, ctx, st)
            if t is None:
                return
            for n, out, st2 in self._rfocus(ctx, pool, instantiate(p, t), st1, d + 1):
                yield self._node("existsR", ctx, pool, out, p, [n], rfocus=True, witness=t), out, st2
            self.stats.term_backtracks += 1
            return
        if isinstance(p, Down):
            for n, out, st2 in self._inv(ctx, pool, p.body, st, d + 1):
                yield self._node("blurR", ctx, pool, out, p, [n], rfocus=True), out, st2
            return
        raise TypeError(f"cannot focus on {type(p).__name__} on the right")


def _replace_metas(t, st: MState, const: App):
    t = st.resolve(t)
    if isinstance(t, Var) and st.is_meta(t):
        return const
    if isinstance(t, App) and t.args:
        return App(t.symbol, tuple(_replace_metas(a, st, const) for a in t.args))
    return t


def prove_ljf(
    s: Sequent, budget: Budget = Budget(), *, default_constant: str = "t0", fresh: UidSource = FRESH
) -> LJFResult:
    return LJFProver(budget, default_constant=default_constant, fresh=fresh).prove(s)


# ----------------------------------------------------------------------------
# checker
# ----------------------------------------------------------------------------


class LCheckError(ValueError):
    def __init__(self, msg: str, path: tuple[int, ...] = ()):
        super().__init__(f"{msg} (at node {'/'.join(map(str, path)) or 'root'})")
        self.path = path


def sequent_free_vars(s: Sequent) -> set[Var]:
    out: set[Var] = set()
    for f in (*s.gamma, *s.delta, s.goal, s.lfocus):
        if f is not None:
            out |= formula_free_vars(f)
    return out


def _stable(s: Sequent) -> bool:
    return all(_stable_left(f) for f in s.delta) and _stable_goal(s.goal)


def check_ljf(tree: LProofTree, root: Sequent | None = None) -> bool:
    """Validate each node against its LJF rule schema.  Raises ``LCheckError``
    naming the first offending node."""
    if root is not None:
        c = tree.conclusion
        if (
            c.gamma != root.gamma
            or not multiset_eq(c.delta, root.delta)
            or c.goal != root.goal
            or c.lfocus is not None
            or c.rfocus
        ):
            raise LCheckError("root conclusion differs from the sequent")
    allowed_free = sequent_free_vars(tree.conclusion)

    def go(t: LProofTree, scope: frozenset, at: tuple[int, ...]):
        c = t.conclusion
        ps = [p.conclusion for p in t.premises]
        fail = lambda msg: LCheckError(f"{t.rule}: {msg}", at)  # noqa: E731
        stray = sequent_free_vars(c) - scope - allowed_free
        if stray:
            raise fail(f"variable {sorted(stray, key=lambda v: v.uid)[0]!r} used outside its scope")
        nprem = {"ax-": 0, "ax+": 0, "-oL": 2, "*R": 2}.get(t.rule, 1)
        if len(ps) != nprem:
            raise fail("wrong number of premises")
        r = t.rule
        sub_scope = scope
        same_gamma = True
        if r == "ax-":
            if not (isinstance(c.lfocus, NAtom) and c.goal == c.lfocus and not c.delta and not c.rfocus):
                raise fail("shape")
        elif r == "ax+":
            if not (c.rfocus and isinstance(c.goal, PAtom) and c.delta == (c.goal,) and c.lfocus is None):
                raise fail("shape")
        elif r == "forallL":
            (p,) = ps
            if not isinstance(c.lfocus, Forall) or t.witness is None:
                raise fail("shape")
            if p.lfocus != instantiate(c.lfocus, t.witness) or p.goal != c.goal or not multiset_eq(p.delta, c.delta):
                raise fail("premise")
        elif r == "existsR":
            (p,) = ps
            if not (c.rfocus and isinstance(c.goal, Exists)) or t.witness is None:
                raise fail("shape")
            if not (p.rfocus and p.goal == instantiate(c.goal, t.witness) and multiset_eq(p.delta, c.delta)):
                raise fail("premise")
        elif r in ("forallR", "existsL"):
            (p,) = ps
            u = t.eigen
            if u is None or u in sequent_free_vars(c):
                raise fail("Eigen-variable is not fresh")
            if r == "forallR":
                if not (isinstance(c.goal, Forall) and c.lfocus is None and not c.rfocus):
                    raise fail("shape")
                if p.goal != instantiate(c.goal, u) or not multiset_eq(p.delta, c.delta):
                    raise fail("premise")
            else:
                ok = any(
                    isinstance(f, Exists)
                    and multiset_eq(p.delta, multiset_minus(c.delta, (f,)) + (instantiate(f, u),))
                    for f in c.delta
                )
                if not ok or p.goal != c.goal or c.lfocus is not None or c.rfocus:
                    raise fail("premise")
            sub_scope = scope | {u}
        elif r == "-oL":
            n = c.lfocus
            p1, p2 = ps
            if not isinstance(n, Lolli):
                raise fail("focus is not a lolli")
            if not (p1.rfocus and p1.goal == n.ante and p1.lfocus is None):
                raise fail("left premise")
            if not (p2.lfocus == n.cons and p2.goal == c.goal and not p2.rfocus):
                raise fail("right premise")
            if not multiset_eq(p1.delta + p2.delta, c.delta):
                raise fail("linear context is not split exactly")
        elif r == "-oR":
            (p,) = ps
            if not (isinstance(c.goal, Lolli) and c.lfocus is None and not c.rfocus):
                raise fail("shape")
            if p.goal != c.goal.cons or not multiset_eq(p.delta, c.delta + (c.goal.ante,)):
                raise fail("premise")
        elif r == "*L":
            (p,) = ps
            ok = any(
                isinstance(f, Tensor) and multiset_eq(p.delta, multiset_minus(c.delta, (f,)) + (f.left, f.right))
                for f in c.delta
            )
            if not ok or p.goal != c.goal or c.lfocus is not None or c.rfocus:
                raise fail("premise")
        elif r == "*R":
            p1, p2 = ps
            if not (c.rfocus and isinstance(c.goal, Tensor)):
                raise fail("shape")
            if not (p1.rfocus and p1.goal == c.goal.left and p2.rfocus and p2.goal == c.goal.right):
                raise fail("premises")
            if not multiset_eq(p1.delta + p2.delta, c.delta):
                raise fail("linear context is not split exactly")
        elif r == "!L":
            (p,) = ps
            same_gamma = False
            if p.gamma[:-1] != c.gamma or len(p.gamma) != len(c.gamma) + 1:
                raise fail("unrestricted context")
            rest = multiset_minus(c.delta, (Bang(p.gamma[-1]),))
            if rest is None or not multiset_eq(p.delta, rest) or p.goal != c.goal or c.lfocus is not None:
                raise fail("premise")
        elif r == "!R":
            (p,) = ps
            if not (c.rfocus and isinstance(c.goal, Bang) and not c.delta):
                raise fail("!R needs an empty linear context")
            if not (p.goal == c.goal.body and not p.delta and p.lfocus is None and not p.rfocus):
                raise fail("premise")
        elif r == "copy":
            (p,) = ps
            if not _stable(c) or c.lfocus is not None or c.rfocus:
                raise fail("copy needs a stable sequent")
            if p.lfocus is None or not any(alpha_equiv(p.lfocus, g) for g in c.gamma):
                raise fail("copied formula is not in the unrestricted context")
            if not multiset_eq(p.delta, c.delta) or p.goal != c.goal:
                raise fail("premise")
        elif r == "focusL":
            (p,) = ps
            if not _stable(c) or c.lfocus is not None or c.rfocus:
                raise fail("focus needs a stable sequent")
            rest = None if p.lfocus is None else multiset_minus(c.delta, (Down(p.lfocus),))
            if rest is None or not multiset_eq(p.delta, rest) or p.goal != c.goal:
                raise fail("premise")
        elif r == "focusR":
            (p,) = ps
            if not _stable(c) or c.lfocus is not None or c.rfocus or not isinstance(c.goal, Up):
                raise fail("focus needs a stable sequent with an up-shifted goal")
            if not (p.rfocus and p.goal == c.goal.body and multiset_eq(p.delta, c.delta)):
                raise fail("premise")
        elif r == "blurL":
            (p,) = ps
            if not isinstance(c.lfocus, Up):
                raise fail("shape")
            if not (p.lfocus is None and not p.rfocus and multiset_eq(p.delta, c.delta + (c.lfocus.body,))):
                raise fail("premise")
            if p.goal != c.goal:
                raise fail("goal changed")
        elif r == "blurR":
            (p,) = ps
            if not (c.rfocus and isinstance(c.goal, Down)):
                raise fail("shape")
            if not (p.goal == c.goal.body and not p.rfocus and p.lfocus is None and multiset_eq(p.delta, c.delta)):
                raise fail("premise")
        else:
            raise fail("unknown rule")
        for j, q in enumerate(t.premises):
            if same_gamma and q.conclusion.gamma != c.gamma:
                raise LCheckError(f"{r}: unrestricted context changed", at)
            go(q, sub_scope, at + (j,))

    go(tree, frozenset(), ())
    return True
