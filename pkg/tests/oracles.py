"""Independent reference computations used by the tests."""

from fractions import Fraction
from itertools import combinations

from betavote.ballots import Election


def column_counts(election: Election):
    """Plurality and approval scores counted column by column from the matrices."""
    P, A = election.plurality_matrix(), election.approval_matrix()
    p = [sum(row[j] for row in P) for j in range(election.c)]
    a = [sum(row[j] for row in A) for j in range(election.c)]
    return p, a


def brute_beta(election: Election, k):
    """Beta scores by summing every ballot entry directly."""
    k = Fraction(k)
    totals = [Fraction(0)] * election.c
    for b in election.ballots:
        for j in b.approvals:
            totals[j] += k if j == b.first_choice else 1
    return totals


def argmax(values):
    top = max(values)
    return frozenset(j for j, v in enumerate(values) if v == top)


def critical_points(p, a):
    """k = 1 plus every pairwise crossing of score lines inside [1, inf)."""
    pts = {Fraction(1)}
    for i, j in combinations(range(len(p)), 2):
        if p[i] != p[j]:
            k = 1 + Fraction(a[i] - a[j], p[j] - p[i])
            if k >= 1:
                pts.add(k)
    return sorted(pts)


def probe_points(p, a):
    """Critical points, midpoints between them, and one point past the last."""
    crit = critical_points(p, a)
    probes = list(crit)
    probes += [(x + y) / 2 for x, y in zip(crit, crit[1:])]
    probes.append(crit[-1] + 1)
    return sorted(probes), crit[-1] + 1


def brute_intervals(election: Election):
    """Winning range of every candidate from argmax at the probe points.

    Returns ``{j: None}`` for candidates that never win, else ``(lo, hi)``
    with ``hi = None`` for an unbounded range.
    """
    p, a = column_counts(election)
    probes, beyond = probe_points(p, a)
    wins = {j: [] for j in range(election.c)}
    for k in probes:
        vals = [a[j] + (k - 1) * p[j] for j in range(election.c)]
        for j in argmax(vals):
            wins[j].append(k)
    out = {}
    for j, pts in wins.items():
        if not pts:
            out[j] = None
        else:
            out[j] = (min(pts), None if max(pts) == beyond else max(pts))
    return out
