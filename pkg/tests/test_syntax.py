import pytest
from hypothesis import given
from hypothesis import strategies as st

from linskol.generate import HEADER, render
from linskol.parser import ParseError, parse_header, PolarityError, parse_formula, parse_sequent, parse_sequent_file, sequent_text
from linskol.substitution import EMPTY
from linskol.syntax import (
    FRESH,
    App,
    Bang,
    Closure,
    Down,
    Exists,
    Forall,
    Lolli,
    NAtom,
    Namer,
    PAtom,
    SBang,
    SNAtom,
    STensor,
    Tensor,
    UidSource,
    Up,
    Var,
    VarKind,
    alpha_equiv,
    alpha_rename,
    bound_vars,
    connective_count,
    formula_free_vars,
    formula_str,
    free_vars,
)


def ex(name):
    return FRESH.var(name, VarKind.EXISTENTIAL)


# variables ----------------------------------------------------------------


def test_var_identity_is_uid():
    a = Var("x", VarKind.EXISTENTIAL, 7)
    b = Var("y", VarKind.EIGEN, 7)
    assert a == b and hash(a) == hash(b)
    assert a != Var("x", VarKind.EXISTENTIAL, 8)


def test_var_is_frozen():
    v = ex("x")
    with pytest.raises(AttributeError):
        v.kind = VarKind.EIGEN


def test_pair_shares_id():
    left, right = UidSource(10).pair("a")
    assert left.pair == right.pair and (left.side, right.side) == ("L", "R")
    assert left.is_special and right.is_special and left != right


# free variables -------------------------------------------------------------


def test_free_vars_atom_is_its_index():
    x, u = ex("x"), FRESH.var("u", VarKind.EIGEN)
    assert free_vars(SNAtom("A", (), (x, u))) == (x, u)


def test_free_vars_tensor_idempotent():
    x = ex("x")
    p = SNAtom("A", (x,), (x,))
    assert free_vars(STensor(p, p)) == free_vars(p)


def test_free_vars_bang_is_phi():
    x, y, a = ex("x"), ex("y"), FRESH.var("a", VarKind.SPECIAL)
    body = SNAtom("A", (y,), (x, y, a))
    assert free_vars(SBang(a, (x,), EMPTY, body)) == (x,)


# α-renaming -----------------------------------------------------------------


def test_alpha_rename_forall():
    f = parse_formula("fa x. A(x)")
    g = alpha_rename(f)
    assert isinstance(g, Forall) and g.var != f.var and g.var.name == "x"
    assert g.body == NAtom("A", (g.var,))
    assert alpha_equiv(f, g)


def test_alpha_rename_closed_atom():
    f = parse_formula("A")
    assert alpha_rename(f) == f


def test_alpha_rename_nested():
    f = parse_formula("fa x. ^ ex u. v A(x, u)")
    g = alpha_rename(f)
    assert set(bound_vars(f)).isdisjoint(bound_vars(g))
    assert isinstance(g.body.body, Exists)
    assert g.body.body.body.body == NAtom("A", (g.var, g.body.body.var))
    assert alpha_equiv(f, g)


def test_alpha_equiv_distinguishes_binding():
    assert not alpha_equiv(parse_formula("fa x. fa y. A(x, y)"), parse_formula("fa x. fa y. A(y, x)"))


# parsing --------------------------------------------------------------------


def test_parse_forall_lolli():
    f = parse_formula("fa x. (A(x) -o B(x))", auto_shift=True)
    assert isinstance(f, Forall) and isinstance(f.body, Lolli)
    assert f.body.ante == Down(NAtom("A", (f.var,)))


def test_parse_auto_shift_tensor():
    f = parse_formula("A * fa u. B(u)", auto_shift=True)
    assert isinstance(f, Tensor)
    assert f.left == Down(NAtom("A"))
    assert isinstance(f.right, Down) and isinstance(f.right.body, Forall)


def test_parse_empty_contexts():
    s = parse_sequent("|- ex z. B(z)", auto_shift=True)
    assert s.gamma == () and s.delta == ()
    assert isinstance(s.goal, Up) and isinstance(s.goal.body, Exists)


def test_parse_polarity_error_names_connective():
    with pytest.raises(PolarityError, match=r"\*"):
        parse_formula("A * B")


def test_parse_syntax_error_position():
    with pytest.raises(ParseError, match="line 1, column 8"):
        parse_formula("A -o (B")


def test_parse_header_polarity_and_gamma():
    parsed = parse_sequent_file("%pos P\n%const k\nfa x. P(x) -o A(x) ; P(k) |- A(k)\n")
    s = parsed.sequent
    assert len(s.gamma) == 1 and s.delta == (PAtom("P", (App("k"),)),)
    assert "k" in parsed.header.signature.functions


def test_shadowed_binder_warns():
    parsed = parse_sequent_file("v (fa x. fa x. A(x)) |- A(c)")
    assert parsed.warnings
    f = parsed.sequent.delta[0].body
    assert f.var != f.body.var and f.body.body == NAtom("A", (f.body.var,))


def test_connective_count_ignores_shifts():
    assert connective_count(parse_formula("fa x. ^ (v A(x) * ! B)")) == 3


# printing round trip ----------------------------------------------------------


atoms = st.sampled_from(["A", "B", "P", "C"]).flatmap(
    lambda p: st.just(("atom", p, None)) if p == "C" else st.sampled_from(["x", "y", "c"]).map(lambda t: ("atom", p, t))
)


def _close(sk, bound=()):
    """Bind free variable names so the rendered formula is closed."""
    tag = sk[0]
    if tag == "atom":
        return sk if sk[2] in (None, "c") or sk[2] in bound else ("atom", sk[1], "c")
    if tag in ("fa", "ex"):
        return (tag, sk[1], _close(sk[2], bound + (sk[1],)))
    if tag == "!":
        return ("!", _close(sk[1], bound))
    return (tag, _close(sk[1], bound), _close(sk[2], bound))


skeletons = st.recursive(
    atoms,
    lambda inner: st.one_of(
        st.tuples(st.sampled_from(["-o", "*"]), inner, inner),
        st.tuples(st.sampled_from(["fa", "ex"]), st.sampled_from(["x", "y"]), inner),
        st.tuples(st.just("!"), inner),
    ),
    max_leaves=6,
).map(_close)


@given(skeletons, skeletons)
def test_print_parse_round_trip(left, right):
    text = f"{HEADER}{render(left)} |- {render(right)}"
    s = parse_sequent(text, auto_shift=True)
    back = parse_sequent(sequent_text(s))
    assert len(back.delta) == len(s.delta)
    assert all(alpha_equiv(a, b) for a, b in zip(s.delta, back.delta))
    assert alpha_equiv(s.goal, back.goal)


@given(skeletons)
def test_alpha_rename_preserves_shape_and_free_vars(sk):
    f = parse_formula(render(sk), parse_header(HEADER)[0], auto_shift=True)
    g = alpha_rename(f)
    assert alpha_equiv(f, g)
    assert formula_free_vars(f) == formula_free_vars(g)
    assert connective_count(f) == connective_count(g)


def test_printer_notation():
    x = ex("x")
    a = FRESH.var("a", VarKind.SPECIAL)
    body = SNAtom("A", (x,), (x, a))
    text = formula_str(SBang(a, (x,), EMPTY, body))
    assert text == "!_{(a;x;.)}A(x)_{x,a}"


def test_namer_suffixes_collisions():
    x1, x2 = ex("x"), ex("x")
    nm = Namer((x1, x2))
    assert {nm(x1), nm(x2)} == {"x1", "x2"}
    late = ex("x")
    assert nm(late) not in {"x1", "x2"}


def test_closure_is_value():
    a = FRESH.var("a", VarKind.SPECIAL)
    c = Closure(a, (), EMPTY, SNAtom("A", (), (a,)))
    assert c == Closure(a, (), EMPTY, SNAtom("A", (), (a,)))
    assert Bang(NAtom("A")) == Bang(NAtom("A"), a)  # tags are bookkeeping
