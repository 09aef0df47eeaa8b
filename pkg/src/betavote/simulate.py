"""Monte Carlo harness: random profiles, rule agreement across k, and
counterexample search with greedy shrinking."""

from __future__ import annotations

import ast
import hashlib
import operator
import os
import random
import re
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from typing import Optional

from betavote.ballots import (BallotPair, CandidateSet, Election, PreferenceProfile,
                              honest_ballots)
from betavote.criteria import (check_monotonicity, check_pareto, pareto_dominators,
                               unanimous_candidates)
from betavote.kanalysis import potential_winners
from betavote.tally import beta_score, score, winners

SEARCH_CRITERIA = ("approval_non_pareto", "beta_non_pareto_below_bound", "conjecture_probe")

# -- k expressions ----------------------------------------------------------

_OPS = {ast.Add: operator.add, ast.Sub: operator.sub, ast.Mult: operator.mul, ast.Div: operator.truediv}


def resolve_k(expr, n: int, c: int) -> Fraction:
    """Evaluate a k expression such as ``"n+1"``, ``"1+1/(2n)"`` or ``"5/2"``.

    Names ``n`` and ``c`` refer to the sample's voter and candidate counts;
    a digit directly before a name multiplies it.
    """
    if isinstance(expr, (int, Fraction)):
        return Fraction(expr)
    text = re.sub(r"(\d)\s*([nc(])", r"\1*\2", str(expr).replace(" ", ""))
    env = {"n": Fraction(n), "c": Fraction(c)}

    def ev(node):
        if isinstance(node, ast.Expression):
            return ev(node.body)
        if isinstance(node, ast.Constant) and isinstance(node.value, int):
            return Fraction(node.value)
        if isinstance(node, ast.Name) and node.id in env:
            return env[node.id]
        if isinstance(node, ast.BinOp) and type(node.op) in _OPS:
            return _OPS[type(node.op)](ev(node.left), ev(node.right))
        if isinstance(node, ast.UnaryOp) and isinstance(node.op, ast.USub):
            return -ev(node.operand)
        raise ValueError(f"unsupported k expression {expr!r}")

    try:
        return ev(ast.parse(text, mode="eval"))
    except SyntaxError:
        raise ValueError(f"unsupported k expression {expr!r}") from None


# -- configuration ----------------------------------------------------------

@dataclass(frozen=True)
class SimConfig:
    n_range: tuple[int, int] = (1, 10)
    c_range: tuple[int, int] = (2, 6)
    samples: int = 1000
    k_grid: tuple[str, ...] = ("1", "n+1", "1+1/(2n)")
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "n_range", tuple(self.n_range))
        object.__setattr__(self, "c_range", tuple(self.c_range))
        object.__setattr__(self, "k_grid", tuple(str(k) for k in self.k_grid))
        for name, (lo, hi) in (("n_range", self.n_range), ("c_range", self.c_range)):
            if not 1 <= lo <= hi:
                raise ValueError(f"{name} must satisfy 1 <= lo <= hi, got {(lo, hi)}")
        if self.samples < 1:
            raise ValueError("samples must be >= 1")
        if not self.k_grid:
            raise ValueError("k_grid is empty")
        for expr in self.k_grid:
            resolve_k(expr, self.n_range[0], self.c_range[0])  # syntax check
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must be a 64-bit unsigned integer")

    @classmethod
    def from_json_obj(cls, obj: dict) -> "SimConfig":
        known = {"n_range", "c_range", "samples", "k_grid", "seed"}
        extra = set(obj) - known
        if extra:
            raise ValueError(f"unknown config keys {sorted(extra)}")
        return cls(**obj)

    def to_json_obj(self) -> dict:
        d = asdict(self)
        d["n_range"], d["c_range"], d["k_grid"] = list(self.n_range), list(self.c_range), list(self.k_grid)
        return d


def sample_seed(seed: int, index: int) -> int:
    """Counter-based per-sample seed, independent of execution order."""
    h = hashlib.blake2b(f"{seed}:{index}".encode(), digest_size=8)
    return int.from_bytes(h.digest(), "big")


def _sample_shape(rng: random.Random, config: SimConfig) -> tuple[int, int]:
    return rng.randint(*config.n_range), rng.randint(*config.c_range)


def random_profile(n: int, c: int, seed) -> PreferenceProfile:
    """Uniform random rankings with approval cutoffs uniform on ``1..c``."""
    if n < 1 or c < 1:
        raise ValueError("n and c must be >= 1")
    rng = random.Random(seed)
    rankings, cutoffs = [], []
    for _ in range(n):
        rankings.append(tuple(rng.sample(range(c), c)))
        cutoffs.append(rng.randint(1, c))
    return PreferenceProfile(tuple(rankings), tuple(cutoffs))


def random_election(n: int, c: int, seed) -> Election:
    """Consistent ballots: a uniform first choice plus each other candidate
    approved with probability 1/2."""
    rng = random.Random(seed)
    ballots = []
    for _ in range(n):
        first = rng.randrange(c)
        ballots.append(BallotPair(first, {first} | {j for j in range(c) if rng.random() < 0.5}))
    return Election(CandidateSet.default(c), tuple(ballots))


# -- agreement statistics ---------------------------------------------------

@dataclass
class KStats:
    evaluated: int = 0
    skipped: int = 0  # samples where the expression resolved below 1
    beta_sub_plurality: int = 0
    beta_eq_plurality: int = 0
    beta_sub_approval: int = 0
    beta_eq_approval: int = 0
    beta_ties: int = 0

    def merge(self, other: "KStats") -> "KStats":
        return KStats(*(getattr(self, f) + getattr(other, f) for f in self.__dataclass_fields__))

    def fraction(self, name: str) -> Fraction:
        return Fraction(getattr(self, name), self.evaluated) if self.evaluated else Fraction(0)


@dataclass
class AgreementStats:
    k_grid: tuple[str, ...]
    per_k: dict[str, KStats] = field(default_factory=dict)
    samples: int = 0
    potential_winner_total: int = 0

    def merge(self, other: "AgreementStats") -> "AgreementStats":
        if self.k_grid != other.k_grid:
            raise ValueError("cannot merge stats over different k grids")
        per_k = {e: self.per_k.get(e, KStats()).merge(other.per_k.get(e, KStats())) for e in self.k_grid}
        return AgreementStats(self.k_grid, per_k, self.samples + other.samples,
                              self.potential_winner_total + other.potential_winner_total)

    @property
    def mean_potential_winners(self) -> Fraction:
        return Fraction(self.potential_winner_total, self.samples) if self.samples else Fraction(0)

    RATES = ("beta_sub_plurality", "beta_eq_plurality", "beta_sub_approval",
             "beta_eq_approval", "beta_ties")

    def to_json_obj(self) -> dict:
        rows = {}
        for e in self.k_grid:
            ks = self.per_k.get(e, KStats())
            row = {"evaluated": ks.evaluated, "skipped": ks.skipped}
            for r in self.RATES:
                q = ks.fraction(r)
                row[r] = str(q)
                row[r + "_decimal"] = float(q)
            rows[e] = row
        m = self.mean_potential_winners
        return {"samples": self.samples, "k_grid": list(self.k_grid), "per_k": rows,
                "mean_potential_winners": str(m), "mean_potential_winners_decimal": float(m)}

    def to_tsv(self) -> str:
        head = ["k", "evaluated", "skipped", *self.RATES]
        lines = ["\t".join(head)]
        for e in self.k_grid:
            ks = self.per_k.get(e, KStats())
            lines.append("\t".join([e, str(ks.evaluated), str(ks.skipped),
                                    *(f"{float(ks.fraction(r)):.6f}" for r in self.RATES)]))
        return "\n".join(lines) + "\n"


def _tally_sample(config: SimConfig, index: int) -> AgreementStats:
    rng = random.Random(sample_seed(config.seed, index))
    n, c = _sample_shape(rng, config)
    election = honest_ballots(random_profile(n, c, rng.getrandbits(64)))
    plur = winners(score(election, "plurality")).indices
    appr = winners(score(election, "approval")).indices
    per_k = {}
    for expr in config.k_grid:
        k = resolve_k(expr, n, c)
        ks = KStats()
        if k < 1:
            ks.skipped = 1
        else:
            beta = winners(beta_score(election, k)).indices
            ks.evaluated = 1
            ks.beta_sub_plurality = int(beta <= plur)
            ks.beta_eq_plurality = int(beta == plur)
            ks.beta_sub_approval = int(beta <= appr)
            ks.beta_eq_approval = int(beta == appr)
            ks.beta_ties = int(len(beta) > 1)
        per_k[expr] = ks
    return AgreementStats(config.k_grid, per_k, 1, len(potential_winners(election).members))


def _run_chunk(config: SimConfig, start: int, stop: int) -> AgreementStats:
    acc = AgreementStats(config.k_grid, {e: KStats() for e in config.k_grid})
    for i in range(start, stop):
        acc = acc.merge(_tally_sample(config, i))
    return acc


def default_workers() -> int:
    try:
        return max(1, int(os.environ.get("BETAVOTE_THREADS", "1")))
    except ValueError:
        return 1


def run_agreement(config: SimConfig, workers: int | None = None) -> AgreementStats:
    """Tally plurality, approval and beta(k) on every sample and every k.

    Results do not depend on ``workers``: each sample draws from its own
    counter-derived seed and merging only adds counts.
    """
    workers = default_workers() if workers is None else max(1, workers)
    if workers == 1 or config.samples < 2 * workers:
        return _run_chunk(config, 0, config.samples)
    step = -(-config.samples // workers)
    bounds = [(s, min(s + step, config.samples)) for s in range(0, config.samples, step)]
    acc = AgreementStats(config.k_grid, {e: KStats() for e in config.k_grid})
    with ProcessPoolExecutor(max_workers=workers) as pool:
        for part in pool.map(_run_chunk, *zip(*[(config, s, t) for s, t in bounds])):
            acc = acc.merge(part)
    return acc


# -- counterexample search --------------------------------------------------

@dataclass(frozen=True)
class Witness:
    criterion: str
    profile: PreferenceProfile
    k: Fraction
    k_expr: str
    sample: int
    details: dict = field(default_factory=dict)

    @property
    def election(self) -> Election:
        return honest_ballots(self.profile)

    def to_json_obj(self) -> dict:
        return {"criterion": self.criterion, "k": str(self.k), "k_expr": self.k_expr,
                "sample": self.sample, "profile": self.profile.to_json_obj(),
                "election": self.election.to_json_obj(), "details": self.details}


def _non_pareto_winner(profile: PreferenceProfile, k: Fraction) -> Optional[dict]:
    election = honest_ballots(profile)
    for w in sorted(winners(beta_score(election, k)).indices):
        dom = pareto_dominators(profile, w)
        if dom:
            ids = profile.candidates
            return {"candidate": ids[w], "dominated_by": [ids[l] for l in dom]}
    return None


def _conjecture_failure(profile: PreferenceProfile, k: Fraction) -> Optional[dict]:
    election = honest_ballots(profile)
    if k <= 1:
        return None
    mono = check_monotonicity(election, k, trials=200, seed=0)
    if not mono.holds:
        return {"criterion": "monotonicity", "witness": mono.witness}
    una = unanimous_candidates(election, k)
    if una and not una <= winners(beta_score(election, k)).indices:
        return {"criterion": "unanimous_winner", "candidates": sorted(una)}
    return None


def _falsifier(criterion: str):
    if criterion in ("approval_non_pareto", "beta_non_pareto_below_bound"):
        return _non_pareto_winner
    if criterion == "conjecture_probe":
        return _conjecture_failure
    raise ValueError(f"unknown search criterion {criterion!r}; choose from {SEARCH_CRITERIA}")


def drop_voter(profile: PreferenceProfile, i: int) -> PreferenceProfile:
    return PreferenceProfile(profile.rankings[:i] + profile.rankings[i + 1:],
                             profile.cutoffs[:i] + profile.cutoffs[i + 1:], profile.candidates)


def drop_candidate(profile: PreferenceProfile, x: int) -> PreferenceProfile:
    rankings, cutoffs = [], []
    for r, t in zip(profile.rankings, profile.cutoffs):
        pos = r.index(x)
        rankings.append(tuple(j - (j > x) for j in r if j != x))
        cutoffs.append(max(1, t - (pos < t)))
    ids = profile.candidates.ids
    return PreferenceProfile(tuple(rankings), tuple(cutoffs), CandidateSet(ids[:x] + ids[x + 1:]))


def shrink(profile: PreferenceProfile, k_expr: str, falsifies) -> PreferenceProfile:
    """Greedily delete voters, then candidates, while the profile still falsifies."""

    def still_fails(p):
        k = resolve_k(k_expr, p.n, p.c)
        return k >= 1 and falsifies(p, k) is not None

    changed = True
    while changed:
        changed = False
        for i in range(profile.n):
            if profile.n > 1 and still_fails(cand := drop_voter(profile, i)):
                profile, changed = cand, True
                break
        if changed:
            continue
        for x in range(profile.c):
            if profile.c > 1 and still_fails(cand := drop_candidate(profile, x)):
                profile, changed = cand, True
                break
    return profile


def search_counterexample(criterion: str, config: SimConfig, k=None) -> Optional[Witness]:
    """Look for a profile that falsifies ``criterion`` within ``config.samples`` draws.

    ``k`` is a k expression; it defaults to ``"1"`` for approval_non_pareto and
    to each entry of ``config.k_grid`` otherwise.  The first witness found is
    shrunk and re-verified before it is returned.
    """
    falsifies = _falsifier(criterion)
    if criterion == "approval_non_pareto":
        exprs = ("1",)
    else:
        exprs = (str(k),) if k is not None else config.k_grid
    for index in range(config.samples):
        rng = random.Random(sample_seed(config.seed, index))
        n, c = _sample_shape(rng, config)
        profile = random_profile(n, c, rng.getrandbits(64))
        for expr in exprs:
            kval = resolve_k(expr, n, c)
            if kval < 1 or falsifies(profile, kval) is None:
                continue
            small = shrink(profile, expr, falsifies)
            kval = resolve_k(expr, small.n, small.c)
            details = falsifies(small, kval)
            witness = Witness(criterion, small, kval, expr, index, details)
            if not verify_witness(witness):
                raise AssertionError(f"shrunk witness no longer falsifies {criterion}")
            return witness
    return None


def verify_witness(w: Witness) -> bool:
    """Re-check a witness with the criteria module's own predicates."""
    if w.criterion in ("approval_non_pareto", "beta_non_pareto_below_bound"):
        return not check_pareto(w.profile, w.k).holds
    if w.criterion == "conjecture_probe":
        election = w.election
        if not check_monotonicity(election, w.k, trials=200, seed=0).holds:
            return True
        una = unanimous_candidates(election, w.k)
        return bool(una) and not una <= winners(beta_score(election, w.k)).indices
    return False
