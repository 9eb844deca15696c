"""Terms, variables, and formulas for LJF and its skolemised form SLJF.

Everything here is an immutable value.  Variables are identified by ``uid``;
the ``name`` is only used for display.
"""

from __future__ import annotations

import dataclasses
import itertools
from dataclasses import dataclass, field
from enum import Enum
from typing import TYPE_CHECKING, Iterable, Iterator, Union

if TYPE_CHECKING:
    from .substitution import Substitution


class VarKind(str, Enum):
    EXISTENTIAL = "existential"
    EIGEN = "eigen"
    SPECIAL = "special"


class UidSource:
    """Hands out globally fresh integers."""

    def __init__(self, start: int = 1):
        self._counter = itertools.count(start)

    def __call__(self) -> int:
        return next(self._counter)

    def var(self, name: str, kind: VarKind, **extra) -> "Var":
        return Var(name, kind, self(), **extra)

    def pair(self, name: str = "a") -> tuple["Var", "Var"]:
        """Fresh left/right special variables sharing one pair id."""
        pid = self()
        left = Var(f"{name}L", VarKind.SPECIAL, self(), pair=pid, side="L")
        right = Var(f"{name}R", VarKind.SPECIAL, self(), pair=pid, side="R")
        return left, right


FRESH = UidSource(1_000_000)


@dataclass(frozen=True, eq=False)
class Var:
    name: str
    kind: VarKind
    uid: int
    pair: int | None = None
    side: str | None = None

    def __eq__(self, other):
        return isinstance(other, Var) and other.uid == self.uid

    def __hash__(self):
        return hash(("var", self.uid))

    def __repr__(self):
        return f"{self.name}#{self.uid}"

    @property
    def is_existential(self) -> bool:
        return self.kind is VarKind.EXISTENTIAL

    @property
    def is_eigen(self) -> bool:
        return self.kind is VarKind.EIGEN

    @property
    def is_special(self) -> bool:
        return self.kind is VarKind.SPECIAL

    def with_kind(self, kind: VarKind) -> "Var":
        return dataclasses.replace(self, kind=kind)


@dataclass(frozen=True)
class App:
    symbol: str
    args: tuple["Term", ...] = ()


@dataclass(frozen=True)
class Tup:
    items: tuple["Term", ...]


@dataclass(frozen=True)
class EigenApp:
    """Skolem term ``u(t1, ..., tn)``; the head is the Eigen-variable itself."""

    head: Var
    args: tuple["Term", ...]


Term = Union[Var, App, Tup, EigenApp]


def const(name: str) -> App:
    return App(name, ())


def term_vars(t: Term) -> Iterator[Var]:
    """Variable occurrences of ``t``.  Skolem heads are function symbols, not occurrences."""
    if isinstance(t, Var):
        yield t
    elif isinstance(t, App):
        for a in t.args:
            yield from term_vars(a)
    elif isinstance(t, Tup):
        for a in t.items:
            yield from term_vars(a)
    elif isinstance(t, EigenApp):
        for a in t.args:
            yield from term_vars(a)


def subst_term(t: Term, mapping) -> Term:
    """One parallel pass.  Skolem heads are renamed when mapped to a variable."""
    if isinstance(t, Var):
        return mapping.get(t, t)
    if isinstance(t, App):
        if not t.args:
            return t
        return App(t.symbol, tuple(subst_term(a, mapping) for a in t.args))
    if isinstance(t, Tup):
        return Tup(tuple(subst_term(a, mapping) for a in t.items))
    head = mapping.get(t.head, t.head)
    if not isinstance(head, Var):
        head = t.head
    return EigenApp(head, tuple(subst_term(a, mapping) for a in t.args))


@dataclass
class Signature:
    functions: dict[str, int] = field(default_factory=lambda: {"t0": 0})

    @property
    def default_constant(self) -> str:
        for name, arity in self.functions.items():
            if arity == 0:
                return name
        raise ValueError("signature has no constant symbol")

    def declare(self, name: str, arity: int) -> None:
        known = self.functions.get(name)
        if known is not None and known != arity:
            raise ValueError(f"symbol {name} used with arities {known} and {arity}")
        self.functions[name] = arity


# ----------------------------------------------------------------------------
# LJF formulas
# ----------------------------------------------------------------------------
# ``tag`` fields are bookkeeping attached by the skolemiser (the special
# variable naming the rule occurrence); they do not take part in equality.


@dataclass(frozen=True)
class NAtom:
    pred: str
    args: tuple[Term, ...] = ()


@dataclass(frozen=True)
class PAtom:
    pred: str
    args: tuple[Term, ...] = ()


@dataclass(frozen=True)
class Lolli:
    ante: "Formula"
    cons: "Formula"
    tag: tuple[Var, Var] | None = field(default=None, compare=False)


@dataclass(frozen=True)
class Forall:
    var: Var
    body: "Formula"


@dataclass(frozen=True)
class Up:
    body: "Formula"


@dataclass(frozen=True)
class Tensor:
    left: "Formula"
    right: "Formula"
    tag: tuple[Var, Var] | None = field(default=None, compare=False)


@dataclass(frozen=True)
class Bang:
    body: "Formula"
    tag: Var | None = field(default=None, compare=False)


@dataclass(frozen=True)
class Exists:
    var: Var
    body: "Formula"


@dataclass(frozen=True)
class Down:
    body: "Formula"


Formula = Union[NAtom, PAtom, Lolli, Forall, Up, Tensor, Bang, Exists, Down]
NEGATIVE = (NAtom, Lolli, Forall, Up)
POSITIVE = (PAtom, Tensor, Bang, Exists, Down)


def is_negative(f) -> bool:
    return isinstance(f, (NAtom, Lolli, Forall, Up, SNAtom, SLolli, SUp))


def is_positive(f) -> bool:
    return isinstance(f, (PAtom, Tensor, Bang, Exists, Down, SPAtom, STensor, SBang, SDown))


def check_polarity(f: Formula) -> None:
    """Raise ``ValueError`` when a node's children sit at the wrong polarity."""

    def want(sub, negative: bool, where: str):
        ok = is_negative(sub) if negative else is_positive(sub)
        if not ok:
            pol = "negative" if negative else "positive"
            raise ValueError(f"{where} expects a {pol} formula, got {type(sub).__name__}")
        check_polarity(sub)

    if isinstance(f, Lolli):
        want(f.ante, False, "-o (antecedent)")
        want(f.cons, True, "-o (consequent)")
    elif isinstance(f, Tensor):
        want(f.left, False, "*")
        want(f.right, False, "*")
    elif isinstance(f, Forall):
        want(f.body, True, "fa")
    elif isinstance(f, Exists):
        want(f.body, False, "ex")
    elif isinstance(f, Bang):
        want(f.body, True, "!")
    elif isinstance(f, Up):
        want(f.body, False, "^")
    elif isinstance(f, Down):
        want(f.body, True, "v")


def subst_formula(f: Formula, mapping) -> Formula:
    """Substitute terms for free variables; binders in ``mapping`` are renamed when mapped to a Var."""
    if isinstance(f, (NAtom, PAtom)):
        return type(f)(f.pred, tuple(subst_term(a, mapping) for a in f.args))
    if isinstance(f, (Forall, Exists)):
        new_var = mapping.get(f.var, f.var)
        if not isinstance(new_var, Var):
            # a bound occurrence shadows the substitution
            inner = {k: v for k, v in mapping.items() if k != f.var}
            return type(f)(f.var, subst_formula(f.body, inner))
        return type(f)(new_var, subst_formula(f.body, mapping))
    if isinstance(f, Lolli):
        return Lolli(subst_formula(f.ante, mapping), subst_formula(f.cons, mapping), _rename_tag(f.tag, mapping))
    if isinstance(f, Tensor):
        return Tensor(subst_formula(f.left, mapping), subst_formula(f.right, mapping), _rename_tag(f.tag, mapping))
    if isinstance(f, Bang):
        return Bang(subst_formula(f.body, mapping), _rename_tag(f.tag, mapping))
    return type(f)(subst_formula(f.body, mapping))


def _rename_tag(tag, mapping):
    if tag is None:
        return None
    if isinstance(tag, Var):
        new = mapping.get(tag, tag)
        return new if isinstance(new, Var) else tag
    return tuple(_rename_tag(t, mapping) for t in tag)


def instantiate(f: Forall | Exists, t: Term) -> Formula:
    return subst_formula(f.body, {f.var: t})


def bound_vars(f: Formula) -> Iterator[Var]:
    if isinstance(f, (Forall, Exists)):
        yield f.var
        yield from bound_vars(f.body)
    elif isinstance(f, (Lolli,)):
        yield from bound_vars(f.ante)
        yield from bound_vars(f.cons)
    elif isinstance(f, Tensor):
        yield from bound_vars(f.left)
        yield from bound_vars(f.right)
    elif isinstance(f, (Bang, Up, Down)):
        yield from bound_vars(f.body)


def formula_free_vars(f: Formula) -> set[Var]:
    if isinstance(f, (NAtom, PAtom)):
        return {v for a in f.args for v in term_vars(a)}
    if isinstance(f, (Forall, Exists)):
        return formula_free_vars(f.body) - {f.var}
    if isinstance(f, Lolli):
        return formula_free_vars(f.ante) | formula_free_vars(f.cons)
    if isinstance(f, Tensor):
        return formula_free_vars(f.left) | formula_free_vars(f.right)
    return formula_free_vars(f.body)


def alpha_rename(f: Formula, fresh: UidSource = FRESH) -> Formula:
    """Give every binder of ``f`` a fresh uid (names are kept)."""
    if isinstance(f, (NAtom, PAtom)):
        return f
    if isinstance(f, (Forall, Exists)):
        new = Var(f.var.name, f.var.kind, fresh())
        return type(f)(new, alpha_rename(subst_formula(f.body, {f.var: new}), fresh))
    if isinstance(f, Lolli):
        return Lolli(alpha_rename(f.ante, fresh), alpha_rename(f.cons, fresh), f.tag)
    if isinstance(f, Tensor):
        return Tensor(alpha_rename(f.left, fresh), alpha_rename(f.right, fresh), f.tag)
    if isinstance(f, Bang):
        return Bang(alpha_rename(f.body, fresh), f.tag)
    return type(f)(alpha_rename(f.body, fresh))


def alpha_equiv(f: Formula, g: Formula) -> bool:
    def go(a, b, env_a, env_b, depth):
        if type(a) is not type(b):
            return False
        if isinstance(a, (NAtom, PAtom)):
            if a.pred != b.pred or len(a.args) != len(b.args):
                return False
            return all(_term_alpha(s, t, env_a, env_b) for s, t in zip(a.args, b.args))
        if isinstance(a, (Forall, Exists)):
            return go(a.body, b.body, {**env_a, a.var: depth}, {**env_b, b.var: depth}, depth + 1)
        if isinstance(a, Lolli):
            return go(a.ante, b.ante, env_a, env_b, depth) and go(a.cons, b.cons, env_a, env_b, depth)
        if isinstance(a, Tensor):
            return go(a.left, b.left, env_a, env_b, depth) and go(a.right, b.right, env_a, env_b, depth)
        return go(a.body, b.body, env_a, env_b, depth)

    return go(f, g, {}, {}, 0)


def _term_alpha(s, t, env_a, env_b) -> bool:
    if isinstance(s, Var) and isinstance(t, Var):
        if s in env_a or t in env_b:
            return env_a.get(s) == env_b.get(t)
        return s == t
    if type(s) is not type(t):
        return False
    if isinstance(s, App):
        return s.symbol == t.symbol and len(s.args) == len(t.args) and all(
            _term_alpha(x, y, env_a, env_b) for x, y in zip(s.args, t.args)
        )
    if isinstance(s, Tup):
        return len(s.items) == len(t.items) and all(
            _term_alpha(x, y, env_a, env_b) for x, y in zip(s.items, t.items)
        )
    return (
        _term_alpha(s.head, t.head, env_a, env_b)
        and len(s.args) == len(t.args)
        and all(_term_alpha(x, y, env_a, env_b) for x, y in zip(s.args, t.args))
    )


def connective_count(f: Formula) -> int:
    """Connectives other than shifts."""
    if isinstance(f, (NAtom, PAtom)):
        return 0
    if isinstance(f, (Up, Down)):
        return connective_count(f.body)
    if isinstance(f, Lolli):
        return 1 + connective_count(f.ante) + connective_count(f.cons)
    if isinstance(f, Tensor):
        return 1 + connective_count(f.left) + connective_count(f.right)
    return 1 + connective_count(f.body)


# ----------------------------------------------------------------------------
# SLJF formulas
# ----------------------------------------------------------------------------

VarContext = tuple  # tuple[Var, ...], duplicates forbidden


def extend_context(phi: VarContext, *vs: Var) -> VarContext:
    out = list(phi)
    for v in vs:
        if v not in out:
            out.append(v)
    return tuple(out)


@dataclass(frozen=True)
class SNAtom:
    pred: str
    args: tuple[Term, ...]
    phi: VarContext


@dataclass(frozen=True)
class SPAtom:
    pred: str
    args: tuple[Term, ...]
    phi: VarContext


@dataclass(frozen=True)
class SLolli:
    """``pair`` names the two premises of the left rule; ``scope`` is the variable
    context the connective sat in when it was skolemised."""

    ante: "SFormula"
    cons: "SFormula"
    pair: tuple[Var, Var] | None = None
    scope: VarContext = ()


@dataclass(frozen=True)
class SUp:
    body: "SFormula"


@dataclass(frozen=True)
class STensor:
    left: "SFormula"
    right: "SFormula"
    pair: tuple[Var, Var] | None = None
    scope: VarContext = ()


@dataclass(frozen=True)
class SBang:
    a: Var
    phi: VarContext
    sigma: "Substitution"
    body: "SFormula"


@dataclass(frozen=True)
class SDown:
    body: "SFormula"


SFormula = Union[SNAtom, SPAtom, SLolli, SUp, STensor, SBang, SDown]


@dataclass(frozen=True)
class Closure:
    a: Var
    phi: VarContext
    sigma: "Substitution"
    body: SFormula


def free_vars(f: SFormula) -> VarContext:
    if isinstance(f, (SNAtom, SPAtom)):
        return tuple(f.phi)
    if isinstance(f, SBang):
        return tuple(f.phi)
    if isinstance(f, SLolli):
        return extend_context(free_vars(f.ante), *free_vars(f.cons))
    if isinstance(f, STensor):
        return extend_context(free_vars(f.left), *free_vars(f.right))
    # shifts are transparent
    return free_vars(f.body)


def has_quantifier(obj) -> bool:
    return any(isinstance(x, (Forall, Exists)) for x in walk(obj))


def walk(obj) -> Iterator:
    """Pre-order traversal over nested dataclasses, tuples and substitutions."""
    stack = [obj]
    while stack:
        cur = stack.pop()
        yield cur
        if isinstance(cur, Var):
            continue
        if dataclasses.is_dataclass(cur) and not isinstance(cur, type):
            # compare=False fields are bookkeeping, not content
            for fld in reversed(dataclasses.fields(cur)):
                if fld.compare:
                    stack.append(getattr(cur, fld.name))
        elif isinstance(cur, (tuple, list)):
            stack.extend(reversed(cur))
        elif hasattr(cur, "items") and callable(cur.items):
            for k, v in reversed(list(cur.items())):
                stack.append(v)
                stack.append(k)


def all_vars(*objs) -> list[Var]:
    seen: dict[Var, None] = {}
    for obj in objs:
        for x in walk(obj):
            if isinstance(x, Var) and x not in seen:
                seen[x] = None
    return list(seen)


def rename_sformula(f: SFormula, mapping: dict[Var, Var]) -> SFormula:
    """Rename variables everywhere, including contexts and closure components."""
    from .substitution import rename_substitution

    def ctx(phi):
        return tuple(mapping.get(v, v) for v in phi)

    def pair(p):
        return None if p is None else (mapping.get(p[0], p[0]), mapping.get(p[1], p[1]))

    if isinstance(f, (SNAtom, SPAtom)):
        return type(f)(f.pred, tuple(subst_term(a, mapping) for a in f.args), ctx(f.phi))
    if isinstance(f, SLolli):
        return SLolli(rename_sformula(f.ante, mapping), rename_sformula(f.cons, mapping), pair(f.pair), ctx(f.scope))
    if isinstance(f, STensor):
        return STensor(rename_sformula(f.left, mapping), rename_sformula(f.right, mapping), pair(f.pair), ctx(f.scope))
    if isinstance(f, SBang):
        return SBang(
            mapping.get(f.a, f.a),
            ctx(f.phi),
            rename_substitution(f.sigma, mapping),
            rename_sformula(f.body, mapping),
        )
    return type(f)(rename_sformula(f.body, mapping))


# ----------------------------------------------------------------------------
# Sequents
# ----------------------------------------------------------------------------


@dataclass(frozen=True)
class Sequent:
    """``gamma; delta |- goal``.  With ``lfocus`` set, that formula is ``[N]`` in
    the linear zone; with ``rfocus`` the goal is the positive formula ``[P]``."""

    gamma: tuple[Formula, ...]
    delta: tuple[Formula, ...]
    goal: Formula
    lfocus: Formula | None = None
    rfocus: bool = False


@dataclass(frozen=True)
class SSequent:
    gamma: tuple[Closure, ...]
    delta: tuple[SFormula, ...]
    goal: SFormula
    sigma: "Substitution"
    lfocus: SFormula | None = None
    rfocus: bool = False
    source: Sequent | None = field(default=None, compare=False)


# ----------------------------------------------------------------------------
# Display
# ----------------------------------------------------------------------------


class Namer:
    """Display names for variables; names that collide get numeric suffixes."""

    def __init__(self, *objs):
        self._names: dict[Var, str] = {}
        groups: dict[str, list[Var]] = {}
        for v in all_vars(*objs):
            groups.setdefault(v.name, []).append(v)
        taken = set(groups)
        for name, vs in groups.items():
            if len(vs) == 1:
                self._names[vs[0]] = name
                continue
            i = 1
            for v in vs:
                while f"{name}{i}" in taken:
                    i += 1
                self._names[v] = f"{name}{i}"
                taken.add(f"{name}{i}")
                i += 1
        self._taken = taken

    def __call__(self, v: Var) -> str:
        if v not in self._names:
            # met after construction (e.g. a copy's renamed variable)
            name, i = v.name, 1
            while name in self._taken:
                name = f"{v.name}{i}"
                i += 1
            self._taken.add(name)
            self._names[v] = name
        return self._names[v]


def term_str(t: Term, nm: Namer | None = None) -> str:
    nm = nm or Namer(t)
    if isinstance(t, Var):
        return nm(t)
    if isinstance(t, App):
        if not t.args:
            return t.symbol
        return f"{t.symbol}({', '.join(term_str(a, nm) for a in t.args)})"
    if isinstance(t, Tup):
        return f"({', '.join(term_str(a, nm) for a in t.items)})"
    return f"{nm(t.head)}({', '.join(term_str(a, nm) for a in t.args)})"


def _atomic(f) -> bool:
    return isinstance(f, (NAtom, PAtom, Bang, Up, Down, SNAtom, SPAtom, SBang, SUp, SDown))


def formula_str(f, nm: Namer | None = None) -> str:
    """Concrete ASCII syntax; re-parses to the same formula.  SLJF formulas print
    in the usual notation ``A(x)_{x,aL}`` / ``!_{(a;x;sigma)}N``."""
    nm = nm or Namer(f)
    if isinstance(f, (NAtom, PAtom)):
        if not f.args:
            return f.pred
        return f"{f.pred}({', '.join(term_str(a, nm) for a in f.args)})"
    if isinstance(f, (SNAtom, SPAtom)):
        head = f.pred if not f.args else f"{f.pred}({', '.join(term_str(a, nm) for a in f.args)})"
        return f"{head}_{{{','.join(nm(v) for v in f.phi)}}}"
    if isinstance(f, (Forall, Exists)):
        q = "fa" if isinstance(f, Forall) else "ex"
        return f"{q} {nm(f.var)}. {formula_str(f.body, nm)}"
    if isinstance(f, (Lolli, SLolli)):
        ante = formula_str(f.ante, nm)
        if not (_atomic(f.ante) or isinstance(f.ante, (Tensor, STensor))):
            ante = f"({ante})"
        return f"{ante} -o {formula_str(f.cons, nm)}"
    if isinstance(f, (Tensor, STensor)):
        left = formula_str(f.left, nm)
        if not (_atomic(f.left) or isinstance(f.left, (Tensor, STensor))):
            left = f"({left})"
        right = formula_str(f.right, nm)
        if not _atomic(f.right):
            right = f"({right})"
        return f"{left} * {right}"
    if isinstance(f, SBang):
        body = formula_str(f.body, nm)
        if not _atomic(f.body):
            body = f"({body})"
        ctx = ",".join(nm(v) for v in f.phi)
        return f"!_{{({nm(f.a)};{ctx};{f.sigma.to_text(nm)})}}{body}"
    prefix = {Bang: "!", Up: "^", Down: "v ", SUp: "^", SDown: "v "}[type(f)]
    body = formula_str(f.body, nm)
    if not _atomic(f.body):
        body = f"({body})"
    return f"{prefix}{body}"


def closure_str(c: Closure, nm: Namer | None = None) -> str:
    nm = nm or Namer(c)
    ctx = ",".join(nm(v) for v in c.phi)
    return f"({nm(c.a)};{ctx};{c.sigma.to_text(nm)}):{formula_str(c.body, nm)}"


def sequent_str(s: Sequent | SSequent, nm: Namer | None = None) -> str:
    nm = nm or Namer(s)
    if isinstance(s, SSequent):
        gamma = ", ".join(closure_str(c, nm) for c in s.gamma)
    else:
        gamma = ", ".join(formula_str(g, nm) for g in s.gamma)
    delta = [formula_str(d, nm) for d in s.delta]
    if s.lfocus is not None:
        delta.append(f"[{formula_str(s.lfocus, nm)}]")
    goal = formula_str(s.goal, nm)
    if s.rfocus:
        goal = f"[{goal}]"
    lhs = ", ".join(delta)
    if gamma:
        lhs = f"{gamma} ; {lhs}"
    text = f"{lhs} |- {goal}".strip()
    if isinstance(s, SSequent):
        text += f" ; {s.sigma.to_text(nm)}"
    return text


def iter_contexts(*phis: Iterable[Var]) -> VarContext:
    out: list[Var] = []
    for phi in phis:
        for v in phi:
            if v not in out:
                out.append(v)
    return tuple(out)
