"""Skolemisation of polarised first-order formulas into SLJF.

Quantifiers disappear: atoms are indexed by the variables in scope, and every
Eigen-variable ``u`` gets a Skolem entry ``u(x..., a...)/u`` listing the
existential and special variables it may depend on.
"""

from __future__ import annotations

from dataclasses import dataclass

from .substitution import EMPTY, Substitution, remove, restrict, skolem
from .syntax import (
    FRESH,
    Bang,
    Closure,
    Down,
    Exists,
    Forall,
    Formula,
    Lolli,
    NAtom,
    PAtom,
    SBang,
    SDown,
    Sequent,
    SFormula,
    SLolli,
    SNAtom,
    SPAtom,
    SSequent,
    STensor,
    SUp,
    Tensor,
    UidSource,
    Up,
    Var,
    VarKind,
    alpha_rename,
    extend_context,
)


@dataclass(frozen=True)
class SkolemResult:
    formula: SFormula
    sigma: Substitution


def pos_adjust(k: SFormula) -> SFormula:
    if isinstance(k, (SNAtom, SLolli)):
        return SDown(k)
    if isinstance(k, SUp):
        return k.body
    return k


def neg_adjust(k: SFormula) -> SFormula:
    if isinstance(k, (SPAtom, STensor, SBang)):
        return SUp(k)
    if isinstance(k, SDown):
        return k.body
    return k


def _aux(phi) -> tuple:
    """Existential and special variables of ``phi``, in order."""
    return tuple(v for v in phi if not v.is_eigen)


class Skolemiser:
    """The mutual judgments sk_L / sk_R.  Special variables come from the LJF
    node's ``tag`` when present, so the SLJF and LJF sides share names."""

    def __init__(self, fresh: UidSource = FRESH):
        self.fresh = fresh

    def left(self, phi: tuple, f: Formula) -> SkolemResult:
        k, sigma = self._sk(phi, f, left=True)
        return SkolemResult(k, sigma)

    def right(self, phi: tuple, f: Formula) -> SkolemResult:
        k, sigma = self._sk(phi, f, left=False)
        return SkolemResult(k, sigma)

    def _sk(self, phi, f, left: bool):
        if isinstance(f, NAtom):
            k = SNAtom(f.pred, f.args, phi)
            return (pos_adjust(k) if left else neg_adjust(k)), EMPTY
        if isinstance(f, PAtom):
            k = SPAtom(f.pred, f.args, phi)
            return (pos_adjust(k) if left else neg_adjust(k)), EMPTY
        if isinstance(f, (Forall, Exists)):
            # left forall / right exists bind an existential; the other two an Eigen-variable
            existential = isinstance(f, Forall) == left
            if existential:
                x = f.var.with_kind(VarKind.EXISTENTIAL)
                return self._sk(extend_context(phi, x), _rebind(f, x), left)
            u = f.var.with_kind(VarKind.EIGEN)
            k, sigma = self._sk(extend_context(phi, u), _rebind(f, u), left)
            return k, sigma.extend(skolem(u, _aux(phi)))
        if isinstance(f, Tensor):
            if left:
                k1, s1 = self._sk(phi, f.left, True)
                k2, s2 = self._sk(phi, f.right, True)
                return STensor(pos_adjust(k1), pos_adjust(k2)), s1.union(s2)
            al, ar = self._pair(f)
            k1, s1 = self._sk(extend_context(phi, al), f.left, False)
            k2, s2 = self._sk(extend_context(phi, ar), f.right, False)
            return STensor(pos_adjust(k1), pos_adjust(k2), (al, ar), tuple(phi)), s1.union(s2)
        if isinstance(f, Lolli):
            if left:
                al, ar = self._pair(f)
                k1, s1 = self._sk(extend_context(phi, al), f.ante, False)
                k2, s2 = self._sk(extend_context(phi, ar), f.cons, True)
                return SLolli(pos_adjust(k1), neg_adjust(k2), (al, ar), tuple(phi)), s1.union(s2)
            k1, s1 = self._sk(phi, f.ante, True)
            k2, s2 = self._sk(phi, f.cons, False)
            return SLolli(pos_adjust(k1), neg_adjust(k2)), s1.union(s2)
        if isinstance(f, Bang):
            a = f.tag if f.tag is not None else self.fresh.var("a", VarKind.SPECIAL)
            k, sigma = self._sk(extend_context(phi, a), f.body, left)
            return SBang(a, tuple(phi), remove(sigma, phi), neg_adjust(k)), restrict(sigma, phi)
        if isinstance(f, Down):
            k, sigma = self._sk(phi, f.body, left)
            return neg_adjust(k), sigma
        if isinstance(f, Up):
            k, sigma = self._sk(phi, f.body, left)
            return pos_adjust(k), sigma
        raise TypeError(f"not a formula: {f!r}")

    def _pair(self, f):
        if f.tag is not None:
            return f.tag
        return self.fresh.pair("a")


def _rebind(f, v: Var):
    from .syntax import subst_formula

    return subst_formula(f.body, {f.var: v})


def skolemise_left(phi, f: Formula, fresh: UidSource = FRESH) -> SkolemResult:
    return Skolemiser(fresh).left(tuple(phi), f)


def skolemise_right(phi, f: Formula, fresh: UidSource = FRESH) -> SkolemResult:
    return Skolemiser(fresh).right(tuple(phi), f)


def tag_formula(f: Formula, fresh: UidSource = FRESH, right: bool = False) -> Formula:
    """Attach fresh special variables to every ⊗, ⊸ and ! node.  Bangs met on
    the right of the turnstile are named ``b``, those on the left ``a``."""
    if isinstance(f, (NAtom, PAtom)):
        return f
    if isinstance(f, (Forall, Exists)):
        return type(f)(f.var, tag_formula(f.body, fresh, right))
    if isinstance(f, Tensor):
        return Tensor(tag_formula(f.left, fresh, right), tag_formula(f.right, fresh, right), fresh.pair("a"))
    if isinstance(f, Lolli):
        return Lolli(tag_formula(f.ante, fresh, not right), tag_formula(f.cons, fresh, right), fresh.pair("a"))
    if isinstance(f, Bang):
        return Bang(tag_formula(f.body, fresh, right), fresh.var("b" if right else "a", VarKind.SPECIAL))
    return type(f)(tag_formula(f.body, fresh, right))


def prepare_sequent(s: Sequent, fresh: UidSource = FRESH) -> Sequent:
    """α-rename every binder apart and tag connectives; the result is the
    ``source`` that an SSequent and its reconstructed LJF proof refer to."""
    return Sequent(
        tuple(tag_formula(alpha_rename(g, fresh), fresh) for g in s.gamma),
        tuple(tag_formula(alpha_rename(d, fresh), fresh) for d in s.delta),
        tag_formula(alpha_rename(s.goal, fresh), fresh, right=True),
    )


def gamma_world(fresh: UidSource = FRESH) -> Var:
    return fresh.var("a", VarKind.SPECIAL)


def skolemise_sequent(s: Sequent, fresh: UidSource = FRESH) -> SSequent:
    """Γ formulas become closures ``(a;·;σ):N`` (as if introduced by !L);
    Δ formulas go through sk_L and the goal through sk_R."""
    src = prepare_sequent(s, fresh)
    sk = Skolemiser(fresh)
    sigma = EMPTY
    gamma = []
    for g in src.gamma:
        # a Γ formula N behaves like an already discharged !N
        res = sk.left((), Bang(g, gamma_world(fresh)))
        assert isinstance(res.formula, SBang)
        b = res.formula
        gamma.append(Closure(b.a, b.phi, b.sigma, b.body))
        sigma = sigma.union(res.sigma)
    delta = []
    for d in src.delta:
        res = sk.left((), d)
        delta.append(pos_adjust(res.formula))
        sigma = sigma.union(res.sigma)
    res = sk.right((), src.goal)
    sigma = sigma.union(res.sigma)
    return SSequent(tuple(gamma), tuple(delta), neg_adjust(res.formula), sigma, source=src)
