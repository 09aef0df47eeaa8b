"""Winning ranges of the first-choice weight ``k``.

Every candidate's beta score is an affine function of ``k``.  The set of
candidates that can win for some ``k >= 1`` is exactly the set of lines that
reach the upper envelope on ``[1, inf)``, and each one wins on a closed
interval whose endpoints are crossings with its envelope neighbours.

Two independent routes compute these intervals:

* :func:`upper_envelope` sweeps the lines sorted by slope with a stack.
* :func:`winning_interval` prunes dominated candidates, repairs the chain of
  crossing ratios and reads the interval off the neighbour formula.

Winning is weak (``>=``) throughout, so neighbours share their breakpoint and
a line that only touches the envelope gets a single-point interval.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

from betavote.ballots import Election, UnknownCandidate, as_rational
from betavote.tally import ScoreLine, _counts, score_lines


@dataclass(frozen=True)
class KInterval:
    lo: Fraction
    hi: Fraction | None  # None is +inf
    lo_closed: bool = True
    hi_closed: bool = True

    def __post_init__(self):
        object.__setattr__(self, "lo", Fraction(self.lo))
        if self.hi is None:
            object.__setattr__(self, "hi_closed", False)
        else:
            object.__setattr__(self, "hi", Fraction(self.hi))
            if self.hi < self.lo:
                raise ValueError(f"empty interval [{self.lo}, {self.hi}]")
        if self.lo < 1:
            raise ValueError("intervals live in [1, inf)")

    @property
    def is_point(self) -> bool:
        return self.hi == self.lo

    def __contains__(self, k) -> bool:
        k = as_rational(k)
        if k < self.lo or (k == self.lo and not self.lo_closed):
            return False
        if self.hi is None:
            return True
        return k < self.hi or (k == self.hi and self.hi_closed)

    def __str__(self):
        hi = "inf)" if self.hi is None else f"{self.hi}{']' if self.hi_closed else ')'}"
        return f"{'[' if self.lo_closed else '('}{self.lo}, {hi}"


@dataclass(frozen=True)
class KIntervalSet:
    intervals: tuple[KInterval, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "intervals", tuple(sorted(self.intervals, key=lambda iv: iv.lo)))

    def __contains__(self, k) -> bool:
        return any(k in iv for iv in self.intervals)

    def __bool__(self):
        return bool(self.intervals)

    def __iter__(self):
        return iter(self.intervals)

    def __len__(self):
        return len(self.intervals)

    def endpoints(self) -> tuple:
        return tuple((iv.lo, iv.hi, iv.lo_closed, iv.hi_closed) for iv in self.intervals)

    def __str__(self):
        return " u ".join(map(str, self.intervals)) or "{}"


EMPTY = KIntervalSet()


def crossing(left: ScoreLine, right: ScoreLine) -> Fraction:
    """The ``k`` where two lines of different slope meet."""
    return 1 + (left.intercept - right.intercept) / (right.slope - left.slope)


@dataclass(frozen=True)
class PotentialWinnerReport:
    """Candidates that can win for some ``k >= 1`` and where they win.

    ``groups`` holds candidates with identical lines together, ordered by
    ascending plurality score; ``members`` flattens them.  ``chain_ratios``
    has one entry per consecutive pair of groups.
    """

    members: tuple[int, ...]
    groups: tuple[tuple[int, ...], ...]
    intervals: dict[int, KIntervalSet]
    chain_ratios: tuple[Fraction, ...]
    lines: tuple[ScoreLine, ...] = field(repr=False, default=())

    @property
    def breakpoints(self) -> tuple[Fraction, ...]:
        return tuple(sorted({1 + r for r in self.chain_ratios}))

    @property
    def point_groups(self) -> tuple[tuple[int, ...], ...]:
        """Groups that win at a single ``k`` only (three or more lines concurrent, or a tie at ``k = 1``)."""
        return tuple(g for g in self.groups if self.intervals[g[0]].intervals[0].is_point)

    @property
    def coincident(self) -> bool:
        return bool(self.point_groups)

    def interval(self, candidate: int) -> KIntervalSet:
        return self.intervals.get(candidate, EMPTY)

    def winners_at(self, k) -> frozenset[int]:
        return frozenset(j for j in self.members if k in self.intervals[j])


def _group_lines(lines: Sequence[ScoreLine]) -> dict[tuple, list[int]]:
    groups: dict[tuple, list[int]] = {}
    for ln in lines:
        groups.setdefault(ln.key, []).append(ln.candidate)
    return groups


def upper_envelope(lines: Sequence[ScoreLine]) -> PotentialWinnerReport:
    """Upper envelope of score lines over ``k in [1, inf)``."""
    if not lines:
        raise ValueError("need at least one line")
    grouped = _group_lines(lines)
    best: dict[Fraction, ScoreLine] = {}
    for slope, intercept in grouped:
        if slope not in best or intercept > best[slope].intercept:
            best[slope] = ScoreLine(-1, intercept, slope)
    hull: list[ScoreLine] = []
    for ln in (best[s] for s in sorted(best)):
        # drop the top line when its region is empty; concurrent lines stay as point regions
        while len(hull) >= 2 and crossing(hull[-2], ln) < crossing(hull[-2], hull[-1]):
            hull.pop()
        hull.append(ln)
    bps = [crossing(hull[i], hull[i + 1]) for i in range(len(hull) - 1)]

    kept: list[tuple[ScoreLine, KInterval]] = []
    for i, ln in enumerate(hull):
        hi = bps[i] if i < len(bps) else None
        if hi is not None and hi < 1:
            continue
        lo = max(bps[i - 1], Fraction(1)) if i > 0 else Fraction(1)
        kept.append((ln, KInterval(lo, hi)))

    groups, intervals, ratios = [], {}, []
    for ln, iv in kept:
        g = tuple(sorted(grouped[ln.key]))
        groups.append(g)
        for j in g:
            intervals[j] = KIntervalSet((iv,))
    for (l1, _), (l2, _) in zip(kept, kept[1:]):
        ratios.append((l1.intercept - l2.intercept) / (l2.slope - l1.slope))
    for ln in lines:
        intervals.setdefault(ln.candidate, EMPTY)
    members = tuple(j for g in groups for j in g)
    return PotentialWinnerReport(members, tuple(groups), intervals, tuple(ratios), tuple(lines))


def potential_winners(election: Election) -> PotentialWinnerReport:
    return upper_envelope(score_lines(election))


def _closed_form_chain(p: Sequence[int], a: Sequence[int]) -> list[tuple[int, int]]:
    """Distinct ``(p, a)`` points of the potential winners, ascending in ``p``."""
    pts = set(zip(p, a))
    # strictly beaten on both scores, or same plurality with fewer approvals
    pts = {(pi, ai) for pi, ai in pts
           if not any((pj > pi and aj > ai) or (pj == pi and aj > ai) for pj, aj in pts)}
    chain = sorted(pts)

    def ratio(i):
        return Fraction(chain[i - 1][1] - chain[i][1], chain[i][0] - chain[i - 1][0])

    changed = True
    while changed:
        changed = False
        for w in range(1, len(chain) - 1):
            if ratio(w) > ratio(w + 1):
                del chain[w]
                changed = True
                break
    return chain


def winning_interval(election: Election, w: int | str) -> KIntervalSet:
    """Closed-form winning range of candidate ``w``.

    Among potential winners sorted by plurality score, candidate ``w`` wins
    exactly for ``1 + (a[w-1] - a[w]) / (p[w] - p[w-1]) <= k <=
    1 + (a[w] - a[w+1]) / (p[w+1] - p[w])``, dropping the bound that has no
    neighbour.
    """
    if isinstance(w, str):
        w = election.candidates.index(w)
    if not 0 <= w < election.c:
        raise UnknownCandidate(f"no candidate with index {w}")
    p, a = _counts(election)
    chain = _closed_form_chain(p, a)
    pt = (p[w], a[w])
    if pt not in chain:
        return EMPTY
    i = chain.index(pt)
    lo, hi = Fraction(1), None
    if i > 0:
        lo = 1 + Fraction(chain[i - 1][1] - a[w], p[w] - chain[i - 1][0])
    if i < len(chain) - 1:
        hi = 1 + Fraction(a[w] - chain[i + 1][1], chain[i + 1][0] - p[w])
    return KIntervalSet((KInterval(lo, hi),))


def all_winning_intervals(election: Election) -> dict[int, KIntervalSet]:
    return {j: winning_interval(election, j) for j in range(election.c)}


def check_chain(report_or_ratios: PotentialWinnerReport | Iterable[Fraction]) -> bool:
    """True iff the crossing ratios never decrease."""
    ratios = (report_or_ratios.chain_ratios if isinstance(report_or_ratios, PotentialWinnerReport)
              else tuple(report_or_ratios))
    return all(x <= y for x, y in zip(ratios, ratios[1:]))


def check_order_reversal(report: PotentialWinnerReport) -> bool:
    """Plurality and approval scores of the groups run in opposite orders.

    Plurality scores must strictly increase along the groups and approval
    scores strictly decrease.  The one allowed equality is a leading group
    that only ties at ``k = 1``: it shares its approval score with the next
    group and wins at that single point.
    """
    by_cand = {ln.candidate: ln for ln in report.lines}
    pts = [(by_cand[g[0]].slope, by_cand[g[0]].intercept) for g in report.groups]
    for i, ((p1, a1), (p2, a2)) in enumerate(zip(pts, pts[1:])):
        if not p1 < p2:
            return False
        if a1 > a2:
            continue
        point_at_one = report.intervals[report.groups[i][0]].intervals[0]
        if not (a1 == a2 and point_at_one.lo == point_at_one.hi == 1):
            return False
    return True


def plurality_regime_bound(election: Election) -> Fraction:
    """For every ``k`` above this value, beta winners are plurality winners."""
    return Fraction(election.n)


def approval_regime_bound(election: Election) -> Fraction:
    """For ``1 <= k`` below this value, beta winners are approval winners."""
    return 1 + Fraction(1, election.n)
