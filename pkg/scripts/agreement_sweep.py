"""How often beta(k) agrees with plurality and approval as k grows.

Writes a TSV with one row per k (fixed rationals plus the regime
expressions n+1, 1+1/(2n), c-1 and c) for plotting.
"""

import argparse
import sys

from betavote.simulate import SimConfig, run_agreement

DEFAULT_GRID = ["1", "1+1/(2n)", "5/4", "3/2", "2", "3", "c-1", "c", "5", "n", "n+1", "20"]


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--samples", type=int, default=5000)
    ap.add_argument("--n", type=int, nargs=2, default=(3, 30), metavar=("LO", "HI"))
    ap.add_argument("--c", type=int, nargs=2, default=(2, 6), metavar=("LO", "HI"))
    ap.add_argument("--seed", type=int, required=True)
    ap.add_argument("--workers", type=int, default=None)
    args = ap.parse_args()
    cfg = SimConfig(tuple(args.n), tuple(args.c), args.samples, tuple(DEFAULT_GRID), args.seed)
    stats = run_agreement(cfg, args.workers)
    sys.stdout.write(stats.to_tsv())
    print(f"# mean potential winners: {float(stats.mean_potential_winners):.4f}", file=sys.stderr)


if __name__ == "__main__":
    main()
