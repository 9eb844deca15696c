"""Differential run of the two provers over generated sequents.

    python3 scripts/oracle_equivalence.py --n 2000 --seed 1
"""

import argparse
import sys
import time
from collections import Counter

from linskol.generate import GenConfig, random_sequents
from linskol.ljf import check_ljf, prove_ljf
from linskol.reconstruct import reconstruct_result
from linskol.search import BUDGET_EXHAUSTED, Budget
from linskol.skolemiser import prepare_sequent, skolemise_sequent
from linskol.sljf import prove


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, default=1000)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--connectives", type=int, default=6)
    ap.add_argument("--quantifiers", type=int, default=3)
    ap.add_argument("--bangs", type=int, default=1)
    ap.add_argument("--copy-bound", type=int, default=2)
    ap.add_argument("--depth", type=int, default=40)
    ap.add_argument("--max-nodes", type=int, default=500_000)
    args = ap.parse_args()

    cfg = GenConfig(max_connectives=args.connectives, max_quantifiers=args.quantifiers, max_bangs=args.bangs)
    budget = Budget(args.copy_bound, args.depth, args.max_nodes)
    verdicts: Counter = Counter()
    disagreements, bad_reconstructions = [], []
    t0 = time.perf_counter()
    for text, s in random_sequents(args.n, args.seed, cfg):
        res = prove(skolemise_sequent(s), budget)
        oracle = prove_ljf(prepare_sequent(s), budget)
        verdicts[(res.verdict, oracle.verdict)] += 1
        if BUDGET_EXHAUSTED not in (res.verdict, oracle.verdict) and res.verdict != oracle.verdict:
            disagreements.append(text)
        if res.proved:
            try:
                rec = reconstruct_result(res, s)
                check_ljf(rec.tree)
                if rec.fallback:
                    bad_reconstructions.append(("fallback", text))
            except Exception as e:  # report and keep going
                bad_reconstructions.append((repr(e), text))
    secs = time.perf_counter() - t0

    for (a, b), k in sorted(verdicts.items()):
        print(f"sljf={a:17} ljf={b:17} {k}")
    print(f"{args.n} sequents in {secs:.1f} s; {len(disagreements)} disagreements; "
          f"{len(bad_reconstructions)} reconstruction problems")
    for text in disagreements[:5]:
        print("DISAGREE", text.strip().splitlines()[-1])
    for why, text in bad_reconstructions[:5]:
        print("RECONSTRUCT", why, text.strip().splitlines()[-1])
    return 1 if disagreements or bad_reconstructions else 0


if __name__ == "__main__":
    sys.exit(main())
