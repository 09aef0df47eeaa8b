"""Distribution of the number of candidates that can win for some k >= 1,
by candidate count, over random honest elections."""

import argparse
import random
from collections import Counter

from betavote.ballots import honest_ballots
from betavote.kanalysis import potential_winners
from betavote.simulate import random_profile, sample_seed


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--samples", type=int, default=2000)
    ap.add_argument("--n", type=int, default=15)
    ap.add_argument("--max-c", type=int, default=7)
    ap.add_argument("--seed", type=int, required=True)
    args = ap.parse_args()
    print("c\tgroups\tcount\tshare")
    for c in range(2, args.max_c + 1):
        sizes = Counter()
        for i in range(args.samples):
            rng = random.Random(sample_seed(args.seed, c * 10**9 + i))
            rep = potential_winners(honest_ballots(random_profile(args.n, c, rng.getrandbits(64))))
            sizes[len(rep.groups)] += 1
        for size in sorted(sizes):
            print(f"{c}\t{size}\t{sizes[size]}\t{sizes[size] / args.samples:.4f}")


if __name__ == "__main__":
    main()
