"""Scores, winner sets and the affine beta(k) score lines."""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from betavote.ballots import Election, check_k

RULES = ("plurality", "approval", "beta")


@dataclass(frozen=True)
class ScoreVector:
    values: tuple[Fraction, ...]
    kind: str
    k: Fraction | None = None

    def __post_init__(self):
        object.__setattr__(self, "values", tuple(Fraction(v) for v in self.values))
        if self.kind not in RULES:
            raise ValueError(f"unknown score kind {self.kind!r}")

    def __len__(self):
        return len(self.values)

    def __getitem__(self, j):
        return self.values[j]


@dataclass(frozen=True)
class ScoreLine:
    """Beta score of one candidate as a function of ``k``.

    ``intercept`` is the value at ``k = 1`` (the approval score) and
    ``slope`` is the plurality score, so the line is
    ``intercept + (k - 1) * slope``.
    """

    candidate: int
    intercept: Fraction
    slope: Fraction

    def __call__(self, k) -> Fraction:
        return self.intercept + (Fraction(k) - 1) * self.slope

    @property
    def key(self) -> tuple[Fraction, Fraction]:
        return (self.slope, self.intercept)


@dataclass(frozen=True)
class WinnerSet:
    indices: frozenset[int]
    score_value: Fraction

    def __post_init__(self):
        object.__setattr__(self, "indices", frozenset(self.indices))
        if not self.indices:
            raise ValueError("a winner set is never empty")

    def __contains__(self, j):
        return j in self.indices

    def __iter__(self):
        return iter(sorted(self.indices))

    def __len__(self):
        return len(self.indices)

    @property
    def is_tie(self) -> bool:
        return len(self.indices) > 1


def _counts(election: Election) -> tuple[list[int], list[int]]:
    p = [0] * election.c
    a = [0] * election.c
    for b in election.ballots:
        p[b.first_choice] += 1
        for j in b.approvals:
            a[j] += 1
    return p, a


def score(election: Election, rule: str) -> ScoreVector:
    p, a = _counts(election)
    if rule == "plurality":
        return ScoreVector(tuple(p), "plurality")
    if rule == "approval":
        return ScoreVector(tuple(a), "approval")
    raise ValueError(f"score() takes 'plurality' or 'approval', got {rule!r}; use beta_score for beta")


def beta_score(election: Election, k) -> ScoreVector:
    k = check_k(k)
    p, a = _counts(election)
    return ScoreVector(tuple(aj + (k - 1) * pj for pj, aj in zip(p, a)), "beta", k)


def score_lines(election: Election) -> list[ScoreLine]:
    p, a = _counts(election)
    return [ScoreLine(j, Fraction(a[j]), Fraction(p[j])) for j in range(election.c)]


def winners(sv: ScoreVector | Sequence) -> WinnerSet:
    values = sv.values if isinstance(sv, ScoreVector) else tuple(sv)
    top = max(values)
    return WinnerSet(frozenset(j for j, v in enumerate(values) if v == top), Fraction(top))


def select_winner(ws: WinnerSet, seed) -> int:
    """Pick one winner uniformly at random, reproducibly for a given seed."""
    members = sorted(ws.indices)
    if len(members) == 1:
        return members[0]
    return random.Random(seed).choice(members)


def rule_winners(election: Election, rule: str, k=None) -> WinnerSet:
    if rule == "beta":
        return winners(beta_score(election, k))
    return winners(score(election, rule))
