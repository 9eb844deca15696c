"""Hypothesis strategies shared by the property suites."""

from hypothesis import strategies as st

from linskol.substitution import Substitution
from linskol.syntax import App, EigenApp, Tup, UidSource, VarKind

_src = UidSource(50)
EXISTENTIALS = tuple(_src.var(f"x{i}", VarKind.EXISTENTIAL) for i in range(4))
EIGENS = tuple(_src.var(f"u{i}", VarKind.EIGEN) for i in range(2))
PAIR = _src.pair("a")
SPECIALS = PAIR + (_src.var("b", VarKind.SPECIAL),)
NON_EIGEN = EXISTENTIALS + SPECIALS
POOL = NON_EIGEN + EIGENS


def terms(pool=POOL):
    var = st.sampled_from(pool)
    return st.one_of(
        var,
        st.just(App("c")),
        st.tuples(var, var).map(lambda a: App("f", a)),
        st.lists(var, min_size=1, max_size=3).map(lambda xs: Tup(tuple(xs))),
    )


@st.composite
def substitutions(draw, max_size=8, skolem_args=POOL):
    """Random σ; ``skolem_args`` restricts what a Skolem term may mention
    (the skolemiser only ever uses existential and special variables)."""
    keys = draw(st.lists(st.sampled_from(POOL), unique=True, max_size=max_size))
    entries = []
    for v in keys:
        if v.is_eigen:
            args = draw(st.lists(st.sampled_from(skolem_args), max_size=3))
            entries.append((v, EigenApp(v, tuple(args))))
        else:
            entries.append((v, draw(terms())))
    return Substitution(entries)


contexts = st.lists(st.sampled_from(POOL), unique=True, max_size=6).map(tuple)
