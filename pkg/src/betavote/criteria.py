"""Voting-criteria checks: non-dictatorship, monotonicity, unanimity, Pareto.

Each check returns a :class:`CriterionVerdict`.  A failing verdict carries a
witness that :func:`recheck` can replay without trusting the check that
produced it.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Optional

from betavote.ballots import (BallotPair, BetaMatrix, CandidateSet, Election,
                              PreferenceProfile, check_k, compose_beta,
                              honest_ballots, parse_election, parse_profile)
from betavote.tally import beta_score, score, winners

CRITERIA = ("non_dictatorship", "monotonicity", "unanimous_winner", "pareto")

EXHAUSTIVE_LIMIT = 20  # n * c at or below this is checked exhaustively


class InsufficientVoters(ValueError):
    pass


@dataclass(frozen=True)
class CriterionVerdict:
    criterion: str
    holds: bool
    witness: Optional[dict] = None
    details: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.criterion not in CRITERIA:
            raise ValueError(f"unknown criterion {self.criterion!r}")
        if not self.holds and self.witness is None:
            raise ValueError("a failing verdict needs a witness")

    def to_json_obj(self) -> dict:
        return {"criterion": self.criterion, "holds": self.holds,
                "witness": self.witness, "details": self.details}


def _fmt(q: Fraction) -> str:
    return str(Fraction(q))


# -- unanimity --------------------------------------------------------------

def unanimous_candidates(obj: Election | BetaMatrix, k=None) -> frozenset[int]:
    """Candidates holding the maximum entry of every row.

    For an :class:`Election`, ``k`` defaults to any value above 1, where the
    row maximum is the first choice.
    """
    if isinstance(obj, Election):
        obj = compose_beta(obj, 2 if k is None else k)
    common = None
    for row in obj.rows:
        top = max(row)
        here = {j for j, v in enumerate(row) if v == top}
        common = here if common is None else common & here
    return frozenset(common or ())


def unanimous_winner(obj: Election | BetaMatrix, k=None) -> Optional[int]:
    """The unanimous winner, or ``None``.  Ties at ``k = 1`` return the lowest index."""
    cands = unanimous_candidates(obj, k)
    return min(cands) if cands else None


# -- monotonicity -----------------------------------------------------------

RAISE, DROP = "raise", "drop"


def _levels(election: Election) -> list[list[int]]:
    # 0: not approved, 1: approved only, 2: first choice
    return [[2 if j == b.first_choice else 1 if j in b.approvals else 0
             for j in range(election.c)] for b in election.ballots]


def _tally_levels(levels, weights) -> list[int]:
    return [sum(weights[row[j]] for row in levels) for j in range(len(levels[0]))]


def _winner_idx(scores) -> set[int]:
    top = max(scores)
    return {j for j, s in enumerate(scores) if s == top}


def _perturb_ok(levels, weights, row, cand, kind) -> bool:
    old = levels[row][cand]
    levels[row][cand] = old + 1 if kind == RAISE else old - 1
    try:
        after = _winner_idx(_tally_levels(levels, weights))
    finally:
        levels[row][cand] = old
    if kind == RAISE:
        return cand in after
    return cand not in after


def _witness(election, k, row, cand, kind, old) -> dict:
    names = ("0", "1", "k")
    return {"election": election.to_json_obj(), "k": _fmt(k),
            "perturbation": {"kind": kind, "voter": row,
                             "candidate": election.candidates[cand],
                             "from": names[old], "to": names[old + 1 if kind == RAISE else old - 1]}}


def check_monotonicity(election: Election, k, trials: int = 1000, seed=0) -> CriterionVerdict:
    """Raise a winner's entry or lower a loser's entry and re-tally.

    A raise moves one ballot entry 0 -> 1 or 1 -> k for a current winner; a
    drop moves k -> 1 or 1 -> 0 for a current loser.  Winners must stay
    winners and losers must stay losers.  Elections with
    ``n * c <= EXHAUSTIVE_LIMIT`` are enumerated in full and ``trials`` is
    ignored.
    """
    k = check_k(k)
    # integer weights: scale every entry by the denominator of k
    weights = (0, k.denominator, k.numerator)
    levels = _levels(election)
    base = _winner_idx(_tally_levels(levels, weights))

    def candidates_moves():
        for i, row in enumerate(levels):
            for j, lv in enumerate(row):
                if j in base and lv < 2:
                    yield i, j, RAISE
                elif j not in base and lv > 0:
                    yield i, j, DROP

    if election.n * election.c <= EXHAUSTIVE_LIMIT:
        moves, mode = list(candidates_moves()), "exhaustive"
    else:
        rng = random.Random(seed)
        pool = list(candidates_moves())
        moves = [rng.choice(pool) for _ in range(trials)] if pool else []
        mode = "random"
    for i, j, kind in moves:
        if not _perturb_ok(levels, weights, i, j, kind):
            return CriterionVerdict("monotonicity", False,
                                    _witness(election, k, i, j, kind, levels[i][j]),
                                    {"mode": mode, "checked": len(moves)})
    return CriterionVerdict("monotonicity", True, None, {"mode": mode, "checked": len(moves)})


# -- Pareto -----------------------------------------------------------------

def pareto_dominators(profile: PreferenceProfile, j: int) -> list[int]:
    """Rivals that every voter ranks above ``j``."""
    return [l for l in range(profile.c)
            if l != j and all(profile.prefers(i, l, j) for i in range(profile.n))]


def pareto_winners(profile: PreferenceProfile) -> frozenset[int]:
    return frozenset(j for j in range(profile.c) if not pareto_dominators(profile, j))


def check_pareto(profile: PreferenceProfile, k) -> CriterionVerdict:
    """Every beta(k) winner under honest ballots must be Pareto.

    When ``k > c - 1`` each winner must also hold at least one first-choice
    vote, which is the sufficient condition behind Pareto efficiency there.
    """
    k = check_k(k)
    election = honest_ballots(profile)
    ws = winners(beta_score(election, k))
    plur = score(election, "plurality")
    ids = profile.candidates
    problems = []
    for w in sorted(ws):
        dom = pareto_dominators(profile, w)
        if dom:
            problems.append({"candidate": ids[w], "reason": "dominated",
                             "dominated_by": [ids[l] for l in dom]})
        elif k > profile.c - 1 and plur[w] == 0:
            problems.append({"candidate": ids[w], "reason": "no first-choice vote"})
    details = {"winners": [ids[w] for w in sorted(ws)],
               "pareto": [ids[j] for j in sorted(pareto_winners(profile))],
               "above_bound": k > profile.c - 1}
    if problems:
        witness = {"profile": profile.to_json_obj(), "election": election.to_json_obj(),
                   "k": _fmt(k), "violations": problems}
        return CriterionVerdict("pareto", False, witness, details)
    return CriterionVerdict("pareto", True, None, details)


# -- non-dictatorship -------------------------------------------------------

WinnerFn = Callable[[Election, Fraction], frozenset]


def beta_winner_fn(election: Election, k) -> frozenset:
    return winners(beta_score(election, k)).indices


def dictatorship_probe(c: int, n: int, candidate_fn: WinnerFn | None = None,
                       ks=None) -> CriterionVerdict:
    """Try to defeat each voter's favourite in turn.

    The probed voter puts ``k`` on candidate 0 and approves nothing else;
    every other voter puts ``k`` on candidate 1 and nothing on candidate 0.
    ``candidate_fn(election, k)`` returns the winner set of the system under
    test (beta(k) by default).  Holds when every probe at every sampled ``k``
    leaves the favourite out of the winner set.  A passing verdict refutes
    each voter as a dictator; it is not a proof over all elections.
    """
    if n < 3:
        raise InsufficientVoters(f"the probe needs at least 3 voters, got {n}")
    if c < 2:
        raise ValueError("the probe needs at least 2 candidates")
    fn = candidate_fn or beta_winner_fn
    if ks is None:
        ks = sorted({Fraction(1), Fraction(3, 2), Fraction(2), Fraction(c), Fraction(n), Fraction(n + 1)})
    ids = CandidateSet.default(c)
    outcomes = []
    witness = None
    for v in range(n):
        ballots = tuple(BallotPair(0, {0}) if i == v else BallotPair(1, {1}) for i in range(n))
        election = Election(ids, ballots)
        for k in ks:
            won = fn(election, Fraction(k))
            defeated = 0 not in won
            outcomes.append({"voter": v, "k": _fmt(k), "winners": [ids[j] for j in sorted(won)],
                             "defeated": defeated})
            if not defeated and witness is None:
                witness = {"election": election.to_json_obj(), "k": _fmt(k), "voter": v}
    details = {"probes": outcomes, "scope": "refutation by construction only"}
    return CriterionVerdict("non_dictatorship", witness is None, witness, details)


# -- replay -----------------------------------------------------------------

def recheck(verdict: CriterionVerdict) -> bool:
    """Replay a failing verdict's witness from scratch; True if it still fails."""
    w = verdict.witness
    if w is None:
        return False
    k = Fraction(w["k"])
    if verdict.criterion == "pareto":
        profile = parse_profile(json.dumps(w["profile"]))
        election = honest_ballots(profile)
        ws = winners(beta_score(election, k)).indices
        plur = score(election, "plurality")
        return any(any(all(profile.prefers(i, l, j) for i in range(profile.n))
                       for l in range(profile.c) if l != j)
                   or (k > profile.c - 1 and plur[j] == 0) for j in ws)
    election = parse_election(json.dumps(w["election"]), "json")
    if verdict.criterion == "monotonicity":
        pert = w["perturbation"]
        value = {"0": Fraction(0), "1": Fraction(1), "k": k}
        rows = [list(r) for r in compose_beta(election, k).rows]
        j = election.candidates.index(pert["candidate"])
        rows[pert["voter"]][j] = value[pert["to"]]
        after = winners([sum(col) for col in zip(*rows)]).indices
        return (j not in after) if pert["kind"] == RAISE else (j in after)
    if verdict.criterion == "non_dictatorship":
        return 0 in winners(beta_score(election, k)).indices
    return False
