"""Random small sequents for differential testing of the two provers.

Half of the instances are "mirrors": the goal repeats the shape of the
hypotheses with quantifiers possibly flipped and terms possibly changed.
Those are provable far more often than independent draws and exercise the
quantifier orderings the two engines treat so differently.
"""

from __future__ import annotations

import random
from dataclasses import dataclass

from .parser import parse_sequent
from .syntax import Bang, Exists, Forall, Sequent, connective_count, walk

HEADER = "%pos P C\n"
PREDICATES = (("A", 1), ("B", 1), ("P", 1), ("C", 0))


@dataclass(frozen=True)
class GenConfig:
    max_connectives: int = 6  # per side of the turnstile
    max_quantifiers: int = 3
    max_bangs: int = 1
    bang_rate: float = 0.05
    mirror_rate: float = 0.5
    constants: tuple[str, ...] = ("c",)


# skeletons: ("atom", pred, term|None) | (op, left, right) | (q, var, body) | ("!", body)


class _Gen:
    def __init__(self, rng: random.Random, cfg: GenConfig):
        self.rng = rng
        self.cfg = cfg
        self.quants = cfg.max_quantifiers
        self.bangs = cfg.max_bangs
        self.names = iter(f"x{i}" for i in range(1000))

    def term(self, scope):
        if scope and self.rng.random() < 0.8:
            return self.rng.choice(scope)
        return self.rng.choice(self.cfg.constants)

    def atom(self, scope):
        p, n = self.rng.choice(PREDICATES)
        return ("atom", p, None if n == 0 else self.term(scope))

    def skeleton(self, size: int, scope: list[str]):
        if size <= 0:
            return self.atom(scope)
        choices = ["-o", "*", "*"]
        if self.quants > 0:
            choices += ["fa", "ex"] * 2
        if self.bangs > 0 and self.rng.random() < self.cfg.bang_rate * 4:
            choices.append("!")
        op = self.rng.choice(choices)
        if op in ("fa", "ex"):
            self.quants -= 1
            v = next(self.names)
            return (op, v, self.skeleton(size - 1, scope + [v]))
        if op == "!":
            self.bangs -= 1
            return ("!", self.skeleton(size - 1, scope))
        k = self.rng.randint(0, size - 1)
        return (op, self.skeleton(k, scope), self.skeleton(size - 1 - k, scope))

    def mirror(self, sk, scope: list[str]):
        """Same shape; quantifiers flip and terms change now and then."""
        tag = sk[0]
        if tag == "atom":
            t = sk[2]
            if t is not None and self.rng.random() < 0.25:
                t = self.term(scope)
            return ("atom", sk[1], t)
        if tag in ("fa", "ex"):
            q = tag if self.rng.random() < 0.6 else {"fa": "ex", "ex": "fa"}[tag]
            return (q, sk[1], self.mirror(sk[2], scope + [sk[1]]))
        if tag == "!":
            return ("!", self.mirror(sk[1], scope))
        return (tag, self.mirror(sk[1], scope), self.mirror(sk[2], scope))


def render(sk) -> str:
    tag = sk[0]
    if tag == "atom":
        return sk[1] if sk[2] is None else f"{sk[1]}({sk[2]})"
    if tag in ("fa", "ex"):
        return f"({tag} {sk[1]}. {render(sk[2])})"
    if tag == "!":
        return f"! ({render(sk[1])})"
    return f"({render(sk[1])} {tag} {render(sk[2])})"


def _size(sk) -> int:
    if sk[0] == "atom":
        return 0
    return 1 + sum(_size(c) for c in sk[1:] if isinstance(c, tuple))


def random_sequent_text(rng: random.Random, cfg: GenConfig = GenConfig()) -> str:
    g = _Gen(rng, cfg)
    left_size = rng.randint(1, cfg.max_connectives)
    if rng.random() < 0.5:
        left = [g.skeleton(left_size, [])]
    else:
        k = rng.randint(0, left_size)
        left = [g.skeleton(k, []), g.skeleton(left_size - k, [])]
    if rng.random() < cfg.mirror_rate:
        parts = [g.mirror(sk, []) for sk in left]
        rng.shuffle(parts)
        goal = parts[0] if len(parts) == 1 else ("*", parts[0], parts[1])
        if _size(goal) > cfg.max_connectives:
            goal = parts[0]
    else:
        goal = g.skeleton(rng.randint(0, cfg.max_connectives), [])
    gamma = ""
    if g.bangs > 0 and len(left) == 2 and rng.random() < cfg.bang_rate:
        # a formula in the unrestricted context spends the bang quota
        gamma = render(left.pop()) + " ; "
        g.bangs -= 1
    return f"{HEADER}{gamma}{', '.join(render(f) for f in left)} |- {render(goal)}\n"


def within_limits(s: Sequent, cfg: GenConfig = GenConfig()) -> bool:
    left = sum(connective_count(f) for f in (*s.gamma, *s.delta))
    quants = sum(isinstance(x, (Forall, Exists)) for x in walk(s))
    bangs = sum(isinstance(x, Bang) for x in walk(s)) + len(s.gamma)
    return (
        left <= cfg.max_connectives
        and connective_count(s.goal) <= cfg.max_connectives
        and quants <= cfg.max_quantifiers
        and bangs <= cfg.max_bangs
    )


def random_sequents(n: int, seed: int = 0, cfg: GenConfig = GenConfig()):
    """Yield ``(text, sequent)`` pairs; polarity is fixed by inserting shifts."""
    rng = random.Random(seed)
    made = 0
    while made < n:
        text = random_sequent_text(rng, cfg)
        s = parse_sequent(text, auto_shift=True)
        if not within_limits(s, cfg):
            continue
        made += 1
        yield text, s
