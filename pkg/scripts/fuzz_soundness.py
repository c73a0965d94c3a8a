"""Fuzz the guarded checker: every accepted term must evaluate without panicking.

    python3 scripts/fuzz_soundness.py --count 1000 --seed 0
"""

import argparse
import random
from collections import Counter

from mstt.errors import EvaluationPanic
from mstt.fuzz import exercise, fuzz_terms
from mstt.guarded import make_checker


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--count", type=int, default=1000)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--stages", type=int, default=5)
    args = ap.parse_args()

    chk = make_checker()
    rng = random.Random(args.seed)
    modes, panics = Counter(), []
    for t, mode, res in fuzz_terms(chk, args.count, seed=args.seed):
        modes[mode] += 1
        try:
            exercise(chk, res, mode, rng, args.stages)
        except EvaluationPanic as e:
            panics.append((t, e))
    print(f"terms: {sum(modes.values())} ({dict(modes)})")
    print(f"panics: {len(panics)}")
    for t, e in panics[:5]:
        print(f"  {t!r}: {e}")
    raise SystemExit(1 if panics else 0)


if __name__ == "__main__":
    main()
