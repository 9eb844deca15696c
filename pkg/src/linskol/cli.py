"""Command-line front end.

Exit codes: 0 proved / valid, 1 unprovable / invalid proof, 2 budget
exhausted, 3 input error, 4 the engines disagree (``compare`` only).
"""

from __future__ import annotations

import csv
import json
import sys
import time
from dataclasses import dataclass, field
from pathlib import Path

import click

from .generate import random_sequents
from .ljf import LCheckError, LProofTree, prove_ljf
from .parser import ParseError, parse_sequent_file
from .reconstruct import ReconstructionError, reconstruct_result
from .search import BUDGET_EXHAUSTED, PROVED, UNPROVABLE, Budget
from .serialize import SCHEMA, SchemaError, check_proof, proof_from_json, proof_to_json
from .skolemiser import skolemise_sequent
from .sljf import CheckError, SProofTree, prove
from .syntax import Namer, Sequent, closure_str, formula_str, sequent_str

EXIT = {PROVED: 0, UNPROVABLE: 1, BUDGET_EXHAUSTED: 2}
EXIT_INPUT = 3
EXIT_DISAGREE = 4


@dataclass
class RunReport:
    verdict: str
    engine: str
    wall_time_ms: float
    stats: dict
    sigma: str | None = None
    proof: dict | None = None
    reconstruction: dict | None = None
    extra: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        out = {
            "schema": SCHEMA,
            "engine": self.engine,
            "verdict": self.verdict,
            "wall_time_ms": round(self.wall_time_ms, 3),
            "stats": self.stats,
        }
        if self.sigma is not None:
            out["sigma"] = self.sigma
        if self.proof is not None:
            out["proof"] = self.proof
        if self.reconstruction is not None:
            out["reconstruction"] = self.reconstruction
        out.update(self.extra)
        return out


def load(path: str, auto_shift: bool = False):
    try:
        text = Path(path).read_text()
    except OSError as e:
        raise click.ClickException(str(e)) from e
    parsed = parse_sequent_file(text, auto_shift=auto_shift)
    for w in parsed.warnings:
        click.echo(f"warning: {w}", err=True)
    return parsed.sequent


def tree_lines(tree, nm: Namer, indent: int = 0) -> list[str]:
    label = tree.rule
    if isinstance(tree, LProofTree):
        from .syntax import term_str

        if tree.witness is not None:
            label += f" [{term_str(tree.witness, nm)}]"
        if tree.eigen is not None:
            label += f" [{nm(tree.eigen)}]"
    concl = tree.conclusion
    if isinstance(concl, Sequent):
        text = sequent_str(concl, nm)
    else:
        # σ is printed once for the whole proof
        text = sequent_str(concl, nm).rsplit(" ; ", 1)[0]
    lines = [f"{'  ' * indent}{label}: {text}"]
    for p in tree.premises:
        lines.extend(tree_lines(p, nm, indent + 1))
    return lines


def tree_namer(tree) -> Namer:
    return Namer(*(t.conclusion for t in tree.walk()))


def run_sljf(s: Sequent, budget: Budget, *, trace: bool = False, reconstruct: bool = False):
    t0 = time.perf_counter()
    ss = skolemise_sequent(s)
    res = prove(ss, budget, trace=trace)
    rec = None
    if reconstruct and res.proved:
        rec = reconstruct_result(res, s)
    ms = (time.perf_counter() - t0) * 1000
    nm = Namer(ss)
    report = RunReport(res.verdict, "sljf", ms, res.stats.as_dict())
    if res.proved:
        report.sigma = res.sigma.to_text(nm)
        report.proof = proof_to_json(res.tree)
    if rec is not None:
        report.reconstruction = {**proof_to_json(rec.tree), "fallback": rec.fallback}
    return report, res, rec


def run_ljf(s: Sequent, budget: Budget):
    t0 = time.perf_counter()
    from .skolemiser import prepare_sequent

    res = prove_ljf(prepare_sequent(s), budget)
    ms = (time.perf_counter() - t0) * 1000
    report = RunReport(res.verdict, "ljf", ms, res.stats.as_dict())
    if res.proved:
        report.proof = proof_to_json(res.tree)
    return report, res


def trace_document(res, nm: Namer) -> dict:
    """Rule applications of the proof with the σ entries each one added, plus
    every axiom verdict met during search."""
    steps = []
    if res.tree is not None:
        nodes = list(res.tree.walk())
        for i, t in enumerate(nodes):
            after = nodes[i + 1].sigma_before if i + 1 < len(nodes) else res.sigma
            added = [(v, after[v]) for v in after if v not in t.sigma_before]
            from .syntax import term_str

            steps.append(
                {
                    "rule": t.rule,
                    "sequent": sequent_str(t.conclusion, nm).rsplit(" ; ", 1)[0],
                    "store_delta": [f"{term_str(tm, nm)}/{nm(v)}" for v, tm in added],
                }
            )
    return {
        "schema": SCHEMA,
        "verdict": res.verdict,
        "stats": res.stats.as_dict(),
        "rules": steps,
        "events": res.trace,
    }


def _budget(copy_bound: int, depth: int) -> Budget:
    return Budget(copy_bound=copy_bound, depth=depth)


def _fail_input(e: Exception):
    click.echo(f"error: {e}", err=True)
    sys.exit(EXIT_INPUT)


common = [
    click.option("--copy-bound", default=2, show_default=True, help="Copies allowed per closure on a branch."),
    click.option("--depth", default=40, show_default=True, help="Maximum proof depth."),
    click.option("--auto-shift", is_flag=True, help="Insert missing polarity shifts instead of rejecting."),
]


def with_common(f):
    for opt in reversed(common):
        f = opt(f)
    return f


@click.group()
def main():
    """Skolemised proof search for first-order focused linear logic."""


@main.command()
@click.argument("file")
@click.option("--json", "as_json", is_flag=True)
@click.option("--auto-shift", is_flag=True)
def skolemise(file, as_json, auto_shift):
    """Print the skolemised form of a sequent."""
    try:
        s = load(file, auto_shift)
    except ParseError as e:
        _fail_input(e)
    ss = skolemise_sequent(s)
    nm = Namer(ss)
    gamma = [closure_str(c, nm) for c in ss.gamma]
    delta = [formula_str(d, nm) for d in ss.delta]
    goal = formula_str(ss.goal, nm)
    if as_json:
        doc = {"schema": SCHEMA, "gamma": gamma, "delta": delta, "goal": goal, "sigma": ss.sigma.to_json(nm)}
        click.echo(json.dumps(doc, indent=2))
        return
    for c in gamma:
        click.echo(f"gamma: {c}")
    for d in delta:
        click.echo(f"delta: {d}")
    click.echo(f"goal:  {goal}")
    click.echo(f"sigma: {ss.sigma.to_text(nm)}")


@main.command("prove")
@click.argument("file")
@click.option("--engine", type=click.Choice(["sljf", "ljf"]), default="sljf", show_default=True)
@with_common
@click.option("--json", "as_json", is_flag=True, help="Shorthand for --format json.")
@click.option("--format", "fmt", type=click.Choice(["text", "json"]), default="text", show_default=True)
@click.option("--trace", "trace_path", type=click.Path(dir_okay=False), help="Write an SLJF search trace here.")
@click.option("--reconstruct", is_flag=True, help="Also rebuild an LJF proof from the SLJF proof.")
@click.option("--stats", is_flag=True, help="Print search counters.")
def prove_cmd(file, engine, copy_bound, depth, auto_shift, as_json, fmt, trace_path, reconstruct, stats):
    """Search for a proof with one engine."""
    try:
        s = load(file, auto_shift)
    except ParseError as e:
        _fail_input(e)
    budget = _budget(copy_bound, depth)
    if engine == "sljf":
        try:
            report, res, rec = run_sljf(s, budget, trace=bool(trace_path), reconstruct=reconstruct)
        except ReconstructionError as e:
            click.echo(f"error: reconstruction failed: {e}", err=True)
            sys.exit(1)
        if trace_path:
            nm = Namer(res.sequent)
            Path(trace_path).write_text(json.dumps(trace_document(res, nm), indent=2))
    else:
        report, res = run_ljf(s, budget)
        rec = None
    if as_json or fmt == "json":
        click.echo(json.dumps(report.to_json(), indent=2))
    else:
        click.echo(f"{engine}: {report.verdict} ({report.wall_time_ms:.1f} ms)")
        if res.proved:
            if engine == "sljf":
                click.echo(f"sigma: {report.sigma}")
            click.echo("\n".join(tree_lines(res.tree, tree_namer(res.tree))))
        if rec is not None:
            click.echo("reconstructed LJF proof:")
            click.echo("\n".join(tree_lines(rec.tree, tree_namer(rec.tree))))
        if stats:
            click.echo(json.dumps(report.stats))
    sys.exit(EXIT[report.verdict])


@main.command()
@click.argument("file")
@with_common
@click.option("--json", "as_json", is_flag=True)
def compare(file, copy_bound, depth, auto_shift, as_json):
    """Run both engines with the same budget and compare verdicts."""
    try:
        s = load(file, auto_shift)
    except ParseError as e:
        _fail_input(e)
    budget = _budget(copy_bound, depth)
    a, res, _ = run_sljf(s, budget)
    b, _ = run_ljf(s, budget)
    decided = BUDGET_EXHAUSTED not in (a.verdict, b.verdict)
    agree = a.verdict == b.verdict if decided else None
    if as_json:
        doc = {"schema": SCHEMA, "sljf": a.to_json(), "ljf": b.to_json(), "agreement": agree}
        click.echo(json.dumps(doc, indent=2))
    else:
        click.echo(f"sljf: {a.verdict} ({a.wall_time_ms:.1f} ms)")
        if res.proved:
            click.echo(f"sigma: {a.sigma}")
        click.echo(f"ljf:  {b.verdict} ({b.wall_time_ms:.1f} ms)")
        click.echo(f"agreement: {'n/a' if agree is None else str(agree).lower()}")
    if agree is False:
        sys.exit(EXIT_DISAGREE)
    if not decided:
        sys.exit(EXIT[BUDGET_EXHAUSTED])
    sys.exit(EXIT[a.verdict])


@main.command()
@click.argument("proof_file")
def check(proof_file):
    """Validate a proof written by ``prove --json``."""
    try:
        doc = json.loads(Path(proof_file).read_text())
        if isinstance(doc, dict) and "proof" in doc and doc.get("schema") == SCHEMA and "kind" not in doc:
            doc = doc["proof"]  # a whole run report
        tree = proof_from_json(doc)
    except (OSError, json.JSONDecodeError, SchemaError) as e:
        _fail_input(e)
    try:
        check_proof(tree)
    except (CheckError, LCheckError) as e:
        click.echo(f"invalid: {e}")
        sys.exit(1)
    kind = "LJF" if isinstance(tree, LProofTree) else "SLJF"
    assert isinstance(tree, (LProofTree, SProofTree))
    click.echo(f"valid {kind} proof ({tree.size()} nodes)")


@main.command()
@click.option("--dir", "directory", type=click.Path(file_okay=False, exists=True), help="Run every *.seq file.")
@click.option("--random", "n_random", type=int, default=0, help="Run this many generated sequents.")
@click.option("--seed", default=0, show_default=True)
@with_common
@click.option("--out", type=click.File("w"), default="-", help="CSV destination.")
def bench(directory, n_random, seed, copy_bound, depth, auto_shift, out):
    """Both engines over a corpus; one CSV row per sequent."""
    budget = _budget(copy_bound, depth)
    jobs = []
    if directory:
        for p in sorted(Path(directory).glob("*.seq")):
            try:
                jobs.append((p.name, load(str(p), auto_shift)))
            except ParseError as e:
                click.echo(f"skipping {p.name}: {e}", err=True)
    if n_random:
        jobs.extend((f"random-{seed}-{i}", s) for i, (_, s) in enumerate(random_sequents(n_random, seed)))
    if not jobs:
        raise click.UsageError("give --dir or --random")
    w = csv.writer(out)
    w.writerow(
        [
            "sequent",
            "sljf_verdict",
            "ljf_verdict",
            "sljf_term_backtracks",
            "ljf_term_backtracks",
            "sljf_focus_backtracks",
            "ljf_focus_backtracks",
            "sljf_nodes",
            "ljf_nodes",
            "sljf_ms",
            "ljf_ms",
        ]
    )
    disagreements = 0
    for name, s in jobs:
        a, _, _ = run_sljf(s, budget)
        b, _ = run_ljf(s, budget)
        if BUDGET_EXHAUSTED not in (a.verdict, b.verdict) and a.verdict != b.verdict:
            disagreements += 1
        w.writerow(
            [
                name,
                a.verdict,
                b.verdict,
                a.stats["term_backtracks"],
                b.stats["term_backtracks"],
                a.stats["focus_backtracks"],
                b.stats["focus_backtracks"],
                a.stats["nodes"],
                b.stats["nodes"],
                f"{a.wall_time_ms:.2f}",
                f"{b.wall_time_ms:.2f}",
            ]
        )
    if disagreements:
        click.echo(f"{disagreements} disagreement(s)", err=True)
        sys.exit(EXIT_DISAGREE)


if __name__ == "__main__":
    main()
