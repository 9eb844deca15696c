"""Concrete syntax for polarised first-order sequents.

    %pos p            declare predicate p positive (default: negative)
    %const t0         declare a constant
    G1, G2 ; D1, D2 |- F

Formulas: ``fa x. F``, ``ex x. F``, ``F -o F`` (right assoc), ``F * F``
(left assoc), prefix ``!``, ``^`` (up-shift), ``v`` (down-shift, must be
followed by a space), atoms ``p(t1, ..., tn)``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

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
    Signature,
    Tensor,
    UidSource,
    Up,
    Var,
    VarKind,
    check_polarity,
    is_negative,
    is_positive,
)


class ParseError(ValueError):
    def __init__(self, msg: str, pos: int | None = None, text: str = ""):
        where = ""
        if pos is not None and text:
            line = text.count("\n", 0, pos) + 1
            col = pos - (text.rfind("\n", 0, pos) + 1) + 1
            where = f" at line {line}, column {col}"
        super().__init__(msg + where)
        self.pos = pos


class PolarityError(ParseError):
    pass


_TOKEN = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<turnstile>\|-)
  | (?P<lolli>-o\b)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_']*)
  | (?P<punct>[(),.;*!^])
    """,
    re.VERBOSE,
)


@dataclass(frozen=True)
class Tok:
    kind: str
    text: str
    pos: int
    space_after: bool


def tokenize(text: str) -> list[Tok]:
    out: list[Tok] = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            raise ParseError(f"unexpected character {text[pos]!r}", pos, text)
        if m.lastgroup != "ws":
            end = m.end()
            space = end < len(text) and text[end].isspace()
            kind = m.lastgroup if m.lastgroup != "punct" else m.group()
            out.append(Tok(kind, m.group(), pos, space))
        pos = m.end()
    out.append(Tok("eof", "", len(text), False))
    return out


@dataclass
class Header:
    positive: set[str] = field(default_factory=set)
    negative: set[str] = field(default_factory=set)
    signature: Signature = field(default_factory=Signature)


def parse_header(text: str) -> tuple[Header, str]:
    """Strip ``%`` declaration lines and ``#`` comments."""
    header = Header()
    body = []
    for line in text.splitlines():
        stripped = line.strip()
        if stripped.startswith("#"):
            body.append("")
            continue
        if stripped.startswith("%"):
            parts = stripped[1:].split()
            if not parts:
                raise ParseError(f"empty declaration: {line!r}")
            kw, names = parts[0], parts[1:]
            if kw == "pos":
                header.positive.update(names)
            elif kw == "neg":
                header.negative.update(names)
            elif kw == "const":
                for n in names:
                    header.signature.declare(n, 0)
            else:
                raise ParseError(f"unknown declaration %{kw}")
            body.append("")
            continue
        body.append(line)
    clash = header.positive & header.negative
    if clash:
        raise ParseError(f"predicates declared both positive and negative: {sorted(clash)}")
    return header, "\n".join(body)


class _Parser:
    def __init__(self, text: str, header: Header, fresh: UidSource, auto_shift: bool):
        self.text = text
        self.toks = tokenize(text)
        self.i = 0
        self.header = header
        self.fresh = fresh
        self.auto_shift = auto_shift
        self.scope: list[dict[str, Var]] = [{}]
        self.shadowed: list[str] = []

    @property
    def tok(self) -> Tok:
        return self.toks[min(self.i, len(self.toks) - 1)]

    def advance(self) -> Tok:
        t = self.toks[self.i]
        self.i += 1
        return t

    def expect(self, kind: str) -> Tok:
        if self.tok.kind != kind:
            got = self.tok.text or "end of input"
            raise ParseError(f"expected {kind!r}, got {got!r}", self.tok.pos, self.text)
        return self.advance()

    def lookup(self, name: str) -> Var | None:
        for frame in reversed(self.scope):
            if name in frame:
                return frame[name]
        return None

    # formulas ---------------------------------------------------------------

    def formula(self):
        t = self.tok
        if t.kind == "ident" and t.text in ("fa", "ex") and self.toks[self.i + 1].kind == "ident":
            self.advance()
            name = self.expect("ident").text
            self.expect(".")
            if self.lookup(name) is not None:
                self.shadowed.append(name)
            v = self.fresh.var(name, VarKind.EXISTENTIAL)
            self.scope.append({name: v})
            body = self.formula()
            self.scope.pop()
            if t.text == "fa":
                return Forall(v, self.neg(body, "fa"))
            return Exists(v, self.pos(body, "ex"))
        left = self.tensor()
        if self.tok.kind == "lolli":
            self.advance()
            right = self.formula()
            return Lolli(self.pos(left, "-o (antecedent)"), self.neg(right, "-o (consequent)"))
        return left

    def tensor(self):
        left = self.prefix()
        while self.tok.kind == "*":
            self.advance()
            right = self.prefix()
            left = Tensor(self.pos(left, "*"), self.pos(right, "*"))
        return left

    def prefix(self):
        t = self.tok
        if t.kind == "!":
            self.advance()
            return Bang(self.neg(self.prefix(), "!"))
        if t.kind == "^":
            self.advance()
            return Up(self.pos(self.prefix(), "^"))
        if t.kind == "ident" and t.text == "v" and t.space_after:
            self.advance()
            return Down(self.neg(self.prefix(), "v"))
        return self.atomic()

    def atomic(self):
        t = self.tok
        if t.kind == "(":
            self.advance()
            f = self.formula()
            self.expect(")")
            return f
        if t.kind == "ident" and t.text in ("fa", "ex"):
            return self.formula()
        if t.kind != "ident":
            raise ParseError(f"expected a formula, got {t.text or 'end of input'!r}", t.pos, self.text)
        self.advance()
        args: tuple = ()
        if self.tok.kind == "(":
            args = self.term_args()
        if t.text in self.header.positive:
            return PAtom(t.text, args)
        return NAtom(t.text, args)

    def term_args(self) -> tuple:
        self.expect("(")
        args = [self.term()]
        while self.tok.kind == ",":
            self.advance()
            args.append(self.term())
        self.expect(")")
        return tuple(args)

    def term(self):
        t = self.expect("ident")
        if self.tok.kind == "(":
            args = self.term_args()
            self.header.signature.declare(t.text, len(args))
            return App(t.text, args)
        v = self.lookup(t.text)
        if v is not None:
            return v
        self.header.signature.declare(t.text, 0)
        return App(t.text, ())

    # polarity ---------------------------------------------------------------

    def pos(self, f, where: str):
        if is_positive(f):
            return f
        if self.auto_shift:
            return Down(f)
        raise PolarityError(f"{where} expects a positive formula, got {type(f).__name__}", self.tok.pos, self.text)

    def neg(self, f, where: str):
        if is_negative(f):
            return f
        if self.auto_shift:
            return Up(f)
        raise PolarityError(f"{where} expects a negative formula, got {type(f).__name__}", self.tok.pos, self.text)

    # sequents ---------------------------------------------------------------

    def formula_list(self, stop: set[str]) -> list:
        out = []
        if self.tok.kind in stop:
            return out
        out.append(self.formula())
        while self.tok.kind == ",":
            self.advance()
            out.append(self.formula())
        return out

    def sequent(self) -> Sequent:
        first = self.formula_list({";", "turnstile"})
        gamma: list = []
        if self.tok.kind == ";":
            self.advance()
            gamma = first
            delta = self.formula_list({"turnstile"})
        else:
            delta = first
        self.expect("turnstile")
        goal = self.formula()
        self.expect("eof")
        gamma = [self.neg(g, "unrestricted context") for g in gamma]
        delta = [self.pos(d, "linear context") for d in delta]
        goal = self.neg(goal, "goal")
        return Sequent(tuple(gamma), tuple(delta), goal)


def parse_formula(
    text: str, header: Header | None = None, *, auto_shift: bool = False, fresh: UidSource = FRESH
) -> Formula:
    p = _Parser(text, header or Header(), fresh, auto_shift)
    f = p.formula()
    p.expect("eof")
    check_polarity(f)
    return f


@dataclass(frozen=True)
class ParsedFile:
    sequent: Sequent
    header: Header
    warnings: tuple[str, ...] = ()


def parse_sequent_file(text: str, *, auto_shift: bool = False, fresh: UidSource = FRESH) -> ParsedFile:
    header, body = parse_header(text)
    p = _Parser(body, header, fresh, auto_shift)
    s = p.sequent()
    for f in (*s.gamma, *s.delta, s.goal):
        check_polarity(f)
    warnings = tuple(f"binder {n} shadows an enclosing binder; renamed apart" for n in p.shadowed)
    return ParsedFile(s, header, warnings)


def parse_sequent(text: str, *, auto_shift: bool = False, fresh: UidSource = FRESH) -> Sequent:
    return parse_sequent_file(text, auto_shift=auto_shift, fresh=fresh).sequent


def sequent_text(s: Sequent) -> str:
    """Print a sequent with the header needed to parse it back."""
    from .syntax import Namer, formula_str, walk

    pos = sorted({x.pred for x in walk(s) if isinstance(x, PAtom)})
    nm = Namer(s)
    lines = [f"%pos {' '.join(pos)}"] if pos else []
    gamma = ", ".join(formula_str(g, nm) for g in s.gamma)
    delta = ", ".join(formula_str(d, nm) for d in s.delta)
    lhs = f"{gamma} ; {delta}" if s.gamma else delta
    lines.append(f"{lhs} |- {formula_str(s.goal, nm)}".strip())
    return "\n".join(lines) + "\n"
