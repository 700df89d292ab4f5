"""Run the MMP over a seeded surface corpus and tabulate outcomes.

    python3 scripts/mmp_corpus_stats.py --seed 0 --count 100
"""

import argparse
import collections
import json

from toricmmp.corpus import surface_corpus
from toricmmp.mmp import run_mmp
from toricmmp.pairs import ToricPair


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--count", type=int, default=100)
    ap.add_argument("--tie-break", choices=("lex", "revlex"), default="lex")
    args = ap.parse_args()
    by_rays = collections.defaultdict(collections.Counter)
    for fan in surface_corpus(args.seed, args.count):
        trace = run_mmp(ToricPair.trivial(fan), tie_break=args.tie_break)
        by_rays[fan.nrays][(len(trace.steps), trace.verdict)] += 1
    rows = [
        {"rays": n, "steps": s, "verdict": v, "count": c}
        for n in sorted(by_rays)
        for (s, v), c in sorted(by_rays[n].items())
    ]
    print(json.dumps(rows, indent=2))


if __name__ == "__main__":
    main()
