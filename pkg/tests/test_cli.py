import json

import pytest
from click.testing import CliRunner

from linskol.cli import main

from conftest import CORPUS


@pytest.fixture
def run():
    runner = CliRunner()

    def go(*args):
        return runner.invoke(main, [str(a) for a in args])

    return go


def seq(name):
    return CORPUS / name


def test_skolemise_ex1(run):
    r = run("skolemise", seq("ex1.seq"))
    assert r.exit_code == 0
    assert "v (v A(x1)_{x1,aL} -o B(x1)_{x1,aR})" in r.output
    assert "A(u)_{x2,u}" in r.output and "B(x3)_{x3}" in r.output
    assert "sigma: u(x2)/u" in r.output


def test_skolemise_empty_contexts(run, tmp_path):
    f = tmp_path / "e.seq"
    f.write_text("%pos P\n|- ^ P\n")
    r = run("skolemise", f)
    assert r.exit_code == 0 and "P_{}" in r.output


def test_skolemise_shadow_warning(run, tmp_path):
    f = tmp_path / "s.seq"
    f.write_text("v (fa x. fa x. A(x)) |- A(c)\n")
    r = run("skolemise", f)
    assert r.exit_code == 0 and "warning" in r.output


def test_parse_error_exit_code(run, tmp_path):
    f = tmp_path / "bad.seq"
    f.write_text("A -o (B\n")
    r = run("prove", f)
    assert r.exit_code == 3 and "line 1" in r.output


@pytest.mark.parametrize(
    "name, code, agreement",
    [("ex1.seq", 0, "true"), ("ex2.seq", 1, "true"), ("ex3.seq", 1, "true")],
)
def test_compare(run, name, code, agreement):
    r = run("compare", seq(name))
    assert r.exit_code == code
    assert f"agreement: {agreement}" in r.output


def test_compare_json(run):
    r = run("compare", "--json", seq("ex1.seq"))
    doc = json.loads(r.output)
    assert doc["agreement"] is True
    assert doc["sljf"]["stats"]["term_backtracks"] == 0
    assert doc["ljf"]["stats"]["term_backtracks"] >= 1


def test_budget_exit_code(run):
    r = run("prove", "--copy-bound", 0, seq("ex7_copy_twice.seq"))
    assert r.exit_code == 2 and "budget_exhausted" in r.output


def test_prove_text_and_stats(run):
    r = run("prove", "--reconstruct", "--stats", seq("ex1.seq"))
    assert r.exit_code == 0
    sigma = next(line for line in r.output.splitlines() if line.startswith("sigma: "))
    assert set(sigma[len("sigma: "):].split(", ")) == {"u/x1", "x1/x3", "u(x2)/u"}
    assert "reconstructed LJF proof:" in r.output


@pytest.mark.parametrize("engine", ["sljf", "ljf"])
def test_json_roundtrips_through_check(run, tmp_path, engine):
    r = run("prove", "--engine", engine, "--json", seq("ex6_bang_ok.seq"))
    assert r.exit_code == 0
    report = tmp_path / "r.json"
    report.write_text(r.output)
    assert run("check", report).exit_code == 0
    proof = tmp_path / "p.json"
    proof.write_text(json.dumps(json.loads(r.output)["proof"]))
    c = run("check", proof)
    assert c.exit_code == 0 and "valid" in c.output


def test_reconstruction_in_json_checks(run, tmp_path):
    r = run("prove", "--json", "--reconstruct", seq("ex1.seq"))
    rec = json.loads(r.output)["reconstruction"]
    assert rec["fallback"] is False
    f = tmp_path / "rec.json"
    f.write_text(json.dumps(rec))
    assert run("check", f).exit_code == 0


def test_corrupted_proof_reports_node_path(run, tmp_path):
    r = run("prove", "--json", seq("ex1.seq"))
    doc = json.loads(r.output)["proof"]
    leaf = doc["proof"]["premises"][0]["premises"][1]  # the B axiom
    leaf["conclusion"]["lfocus"]["pred"] = "C"
    f = tmp_path / "bad.json"
    f.write_text(json.dumps(doc))
    c = run("check", f)
    assert c.exit_code == 1
    assert "at node 0" in c.output


def test_malformed_json(run, tmp_path):
    f = tmp_path / "x.json"
    f.write_text("{not json")
    assert run("check", f).exit_code == 3


def test_trace_file(run, tmp_path):
    out = tmp_path / "t.json"
    r = run("prove", "--trace", out, seq("ex2.seq"))
    assert r.exit_code == 1
    doc = json.loads(out.read_text())
    axioms = [e for e in doc["events"] if e["event"] == "axiom"]
    assert [e["verdict"] for e in axioms if e["verdict"].startswith("cond")] == ["cond2"]


def test_bench_csv(run):
    r = run("bench", "--dir", CORPUS)
    lines = r.output.strip().splitlines()
    assert lines[0].startswith("sequent,sljf_verdict,ljf_verdict")
    assert len(lines) == 1 + len(list(CORPUS.glob("*.seq")))
    assert r.exit_code == 0
