import dataclasses

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from linskol.generate import random_sequents
from linskol.search import Budget
from linskol.skolemiser import skolemise_sequent
from linskol.sljf import (
    CheckError,
    bang_right_entries,
    check_sljf,
    copy_renaming,
    extend_sigma,
    prove,
    unify_atoms,
)
from linskol.substitution import EMPTY, Substitution, admissible, rename_substitution, skolem, typecheck
from linskol.syntax import (
    App,
    Closure,
    EigenApp,
    SBang,
    SNAtom,
    Tup,
    UidSource,
    VarKind,
    rename_sformula,
)

src = UidSource(7000)
x, x1, x2 = (src.var(n, VarKind.EXISTENTIAL) for n in ("x", "x1", "x2"))
u = src.var("u", VarKind.EIGEN)
aL, aR = src.pair("a")
a, a1, a2, b = (src.var(n, VarKind.SPECIAL) for n in ("a", "a1", "a2", "b"))


def solve(corpus_sequent, name, **kw):
    ss = skolemise_sequent(corpus_sequent(name))
    return ss, prove(ss, **kw)


# the worked examples ------------------------------------------------------------


def test_ex1_skolemised_proof_and_substitution(corpus_sequent):
    ss, res = solve(corpus_sequent, "ex1.seq")
    assert res.proved and check_sljf(res.tree, ss)
    lolli, atom = ss.delta
    xl = lolli.body.ante.body.phi[0]
    x_goal = ss.goal.phi[0]
    (u0,) = [v for v in res.sigma if v.is_eigen]
    x_atom = atom.body.phi[0]
    assert dict(res.sigma) == {xl: u0, x_goal: xl, u0: EigenApp(u0, (x_atom,))}


def test_ex2_skolemised_single_condition2_rejection(corpus_sequent):
    _, res = solve(corpus_sequent, "ex2.seq", trace=True)
    assert res.verdict == "unprovable"
    rejected = [e for e in res.trace if e["event"] == "axiom" and e["verdict"].startswith("cond")]
    assert [e["verdict"] for e in rejected] == ["cond2"]


def test_ex3_skolemised_cycle_through_b(corpus_sequent):
    _, res = solve(corpus_sequent, "ex3.seq", trace=True)
    assert res.verdict == "unprovable"
    cycles = [e for e in res.trace if e.get("verdict") == "cond1"]
    assert cycles and all("b" in e["witnesses"] for e in cycles)


@pytest.mark.parametrize(
    "name, verdict",
    [
        ("ex5_tensor_ok.seq", "proved"),
        ("ex6_bang_ok.seq", "proved"),
        ("ex7_copy_twice.seq", "proved"),
        ("ex8_exists_swap.seq", "proved"),
        ("ex9_forall_exists_bad.seq", "unprovable"),
        ("ex10_lolli_split.seq", "proved"),
        ("ex11_mixed.seq", "proved"),
    ],
)
def test_corpus_verdicts(corpus_sequent, name, verdict):
    ss, res = solve(corpus_sequent, name)
    assert res.verdict == verdict
    assert res.stats.term_backtracks == 0
    if res.proved:
        assert check_sljf(res.tree, ss)


# unification -------------------------------------------------------------------


def test_unify_binds_existential_to_eigen():
    sigma = Substitution([skolem(u, (x2,))])
    left = SNAtom("A", (u,), (x2, u))
    right = SNAtom("A", (x1,), (x1, aL))
    out = unify_atoms(left, right, sigma)
    assert out[x1] == u
    assert admissible(out, left.phi + right.phi)


def test_unify_then_condition2():
    sigma = Substitution([skolem(u, (aR,))])
    out = unify_atoms(SNAtom("B", (x,), (x,)), SNAtom("B", (u,), (aR, u)), sigma)
    assert out[x] == u
    v = admissible(out, (x, aL))
    assert not v and v.condition == 2


def test_unify_constant_clash():
    assert unify_atoms(SNAtom("p", (App("c"),), ()), SNAtom("p", (App("d"),), ()), EMPTY) is None


def test_unify_never_binds_specials_or_eigens():
    assert unify_atoms(SNAtom("p", (a,), ()), SNAtom("p", (App("c"),), ()), EMPTY) is None
    assert unify_atoms(SNAtom("p", (u,), ()), SNAtom("p", (App("c"),), ()), EMPTY) is None


# !R entries ----------------------------------------------------------------------


def body():
    return SNAtom("A", (), ())


def test_bang_right_no_closures():
    target = SBang(b, (), EMPTY, body())
    assert bang_right_entries((), target) == [(b, Tup(()))]


def test_bang_right_two_closures():
    c1 = Closure(a1, (x1,), EMPTY, body())
    c2 = Closure(a2, (x2,), EMPTY, body())
    target = SBang(a, (x,), EMPTY, body())
    entries = bang_right_entries((c1, c2), target)
    assert dict(entries) == {a: Tup((x1, x2)), a1: Tup((x,)), a2: Tup((x,))}
    sigma = extend_sigma(EMPTY, entries)
    assert typecheck(sigma, (x, x1, x2), (a, a1, a2))


def test_bang_right_merges_rebinding():
    sigma = extend_sigma(Substitution([(a1, Tup((x,)))]), [(a1, Tup((x2,)))])
    assert sigma[a1] == Tup((x, x2))


# copy -------------------------------------------------------------------------------


def test_copy_keeps_context_variables():
    c = Closure(a, (x,), Substitution([skolem(u, (x,))]), SNAtom("A", (u,), (x, u)))
    ren = copy_renaming(c, src)
    assert set(ren) == {u, a}
    u2 = ren[u]
    assert rename_sformula(c.body, ren) == SNAtom("A", (u2,), (x, u2))
    assert dict(rename_substitution(c.sigma, ren)) == {u2: EigenApp(u2, (x,))}


def test_copy_of_closed_body_only_renames_world():
    c = Closure(a, (x,), EMPTY, SNAtom("A", (x,), (x,)))
    ren = copy_renaming(c, src)
    assert set(ren) == {a}
    assert rename_sformula(c.body, ren) == c.body


def test_successive_copies_disjoint():
    c = Closure(a, (x,), Substitution([skolem(u, (x,))]), SNAtom("A", (u,), (x, u)))
    r1, r2 = copy_renaming(c, src), copy_renaming(c, src)
    assert set(r1.values()).isdisjoint(r2.values())


def test_copy_twice_in_proof(corpus_sequent):
    _, res = solve(corpus_sequent, "ex7_copy_twice.seq")
    copies = [t for t in res.tree.walk() if t.rule == "copy"]
    assert len(copies) == 2
    fresh = [{w for _, w in t.info["renaming"]} for t in copies]
    assert fresh[0].isdisjoint(fresh[1])


# checker negatives ------------------------------------------------------------------


def rewrite(tree, path, fn):
    if not path:
        return fn(tree)
    i, rest = path[0], path[1:]
    ps = list(tree.premises)
    ps[i] = rewrite(ps[i], rest, fn)
    return dataclasses.replace(tree, premises=tuple(ps))


def with_sigma(tree, sigma):
    concl = dataclasses.replace(tree.conclusion, sigma=sigma)
    return dataclasses.replace(tree, conclusion=concl, premises=tuple(with_sigma(p, sigma) for p in tree.premises))


def find(tree, rule, path=()):
    if tree.rule == rule:
        return path
    for i, p in enumerate(tree.premises):
        hit = find(p, rule, path + (i,))
        if hit is not None:
            return hit
    return None


def test_checker_rejects_duplicated_assumption(corpus_sequent):
    _, res = solve(corpus_sequent, "ex5_tensor_ok.seq")
    at = find(res.tree, "*R")

    def dup(t):
        left, right = t.premises
        rc = dataclasses.replace(right.conclusion, delta=right.conclusion.delta + left.conclusion.delta)
        return dataclasses.replace(t, premises=(left, dataclasses.replace(right, conclusion=rc)))

    with pytest.raises(CheckError, match="split"):
        check_sljf(rewrite(res.tree, at, dup))


def test_checker_rejects_cyclic_sigma(corpus_sequent):
    _, res = solve(corpus_sequent, "ex1.seq")
    (u0,) = [v for v in res.sigma if v.is_eigen]
    x_arg = res.sigma[u0].args[0]
    bad = Substitution([*res.sigma.items(), (x_arg, u0)])
    with pytest.raises(CheckError, match="not admissible"):
        check_sljf(with_sigma(res.tree, bad))


def test_checker_rejects_condition2(corpus_sequent):
    ss, res = solve(corpus_sequent, "ex5_tensor_ok.seq")
    (u0,) = [v for v in res.sigma if v.is_eigen]
    al, _ = ss.goal.body.pair
    # u now depends on the left half while the B axiom sits in the right half
    bad = Substitution([(v, EigenApp(u0, (al,)) if v == u0 else t) for v, t in res.sigma.items()])
    with pytest.raises(CheckError, match="axiom context not admissible: condition 2"):
        check_sljf(with_sigma(res.tree, bad))


def test_checker_rejects_other_root(corpus_sequent):
    ss, res = solve(corpus_sequent, "ex1.seq")
    other = skolemise_sequent(corpus_sequent("ex11_mixed.seq"))
    with pytest.raises(CheckError, match="root"):
        check_sljf(res.tree, other)


# properties ---------------------------------------------------------------------------


def extends(big, small):
    return all(big.get(v) == t or isinstance(t, Tup) for v, t in small.items())


@settings(max_examples=150)
@given(st.integers(min_value=0, max_value=10**6))
def test_random_runs_no_term_backtracking_and_checked(seed):
    (_, s), = random_sequents(1, seed)
    ss = skolemise_sequent(s)
    res = prove(ss, Budget(max_nodes=50_000))
    assert res.stats.term_backtracks == 0
    if res.proved:
        assert check_sljf(res.tree, ss)
        for t in res.tree.walk():
            for p in t.premises:
                assert extends(p.sigma_before, t.sigma_before)
