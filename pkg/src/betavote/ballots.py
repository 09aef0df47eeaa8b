"""Candidates, ballots, elections and the beta(k) vote matrix.

A ballot pairs a single first choice with a set of approved candidates.
The first choice is always approved, so the plurality row of a voter never
has a 1 where the approval row has a 0.  A beta(k) matrix is composed from
the two rows as ``P * (k - 1) + A``: first choices score ``k``, other
approvals score ``1``.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence


class BallotError(ValueError):
    """Base class for malformed ballot data."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class UnknownCandidate(BallotError):
    pass


class InconsistentBallot(BallotError):
    """The first choice of a ballot is not among its approvals."""


class FirstChoiceError(BallotError):
    """A ballot names zero or several first choices."""


class EmptyElection(BallotError):
    pass


class DomainError(ValueError):
    """A weight ``k`` outside ``[1, inf)``."""


def as_rational(k) -> Fraction:
    """Convert ``k`` to an exact :class:`Fraction`, refusing floats."""
    if isinstance(k, float):
        raise TypeError("k must be an exact rational, not a float")
    return Fraction(k)


def check_k(k) -> Fraction:
    k = as_rational(k)
    if k < 1:
        raise DomainError(f"k must be >= 1, got {k}")
    return k


@dataclass(frozen=True)
class CandidateSet:
    ids: tuple[str, ...]

    def __post_init__(self):
        object.__setattr__(self, "ids", tuple(self.ids))
        if not self.ids:
            raise BallotError("at least one candidate is required")
        if len(set(self.ids)) != len(self.ids):
            raise BallotError(f"duplicate candidate ids in {list(self.ids)}")

    @classmethod
    def default(cls, c: int) -> "CandidateSet":
        return cls(tuple(f"C{j + 1}" for j in range(c)))

    @property
    def c(self) -> int:
        return len(self.ids)

    def index(self, cid: str) -> int:
        try:
            return self.ids.index(cid)
        except ValueError:
            raise UnknownCandidate(f"unknown candidate {cid!r}") from None

    def __len__(self):
        return len(self.ids)

    def __iter__(self):
        return iter(self.ids)

    def __getitem__(self, j: int) -> str:
        return self.ids[j]


@dataclass(frozen=True)
class BallotPair:
    first_choice: int
    approvals: frozenset[int]

    def __post_init__(self):
        object.__setattr__(self, "approvals", frozenset(self.approvals))
        if self.first_choice not in self.approvals:
            raise InconsistentBallot(
                f"first choice {self.first_choice} is not approved")


@dataclass(frozen=True)
class Election:
    candidates: CandidateSet
    ballots: tuple[BallotPair, ...]

    def __post_init__(self):
        object.__setattr__(self, "ballots", tuple(self.ballots))
        if not self.ballots:
            raise EmptyElection("an election needs at least one ballot")
        c = self.candidates.c
        for i, b in enumerate(self.ballots):
            if not all(0 <= j < c for j in b.approvals):
                raise UnknownCandidate(f"ballot {i} references a candidate outside 0..{c - 1}")

    @property
    def n(self) -> int:
        return len(self.ballots)

    @property
    def c(self) -> int:
        return self.candidates.c

    def plurality_matrix(self) -> list[list[int]]:
        return [[int(j == b.first_choice) for j in range(self.c)] for b in self.ballots]

    def approval_matrix(self) -> list[list[int]]:
        return [[int(j in b.approvals) for j in range(self.c)] for b in self.ballots]

    @classmethod
    def from_matrices(cls, P: Sequence[Sequence[int]], A: Sequence[Sequence[int]],
                      candidates: CandidateSet | Sequence[str] | None = None) -> "Election":
        """Build an election from a plurality and an approval matrix."""
        if len(P) != len(A):
            raise BallotError("P and A must have the same number of rows")
        c = len(P[0]) if P else 0
        if candidates is None:
            candidates = CandidateSet.default(c)
        elif not isinstance(candidates, CandidateSet):
            candidates = CandidateSet(tuple(candidates))
        ballots = []
        for i, (prow, arow) in enumerate(zip(P, A)):
            if len(prow) != candidates.c or len(arow) != candidates.c:
                raise BallotError(f"row {i} has the wrong number of columns")
            firsts = [j for j, v in enumerate(prow) if v == 1]
            if len(firsts) != 1 or any(v not in (0, 1) for v in prow):
                raise FirstChoiceError(f"plurality row {i} is not a plurality vote")
            approvals = frozenset(j for j, v in enumerate(arow) if v == 1)
            ballots.append(BallotPair(firsts[0], approvals))
        return cls(candidates, tuple(ballots))

    def to_json_obj(self) -> dict:
        ids = self.candidates.ids
        return {
            "candidates": list(ids),
            "ballots": [
                {"first": ids[b.first_choice], "approve": [ids[j] for j in sorted(b.approvals)]}
                for b in self.ballots
            ],
        }

    def to_csv(self) -> str:
        ids = self.candidates.ids
        lines = ["#candidates:" + ",".join(ids)]
        for b in self.ballots:
            lines.append(ids[b.first_choice] + ";" + ",".join(ids[j] for j in sorted(b.approvals)))
        return "\n".join(lines) + "\n"


@dataclass(frozen=True)
class BetaMatrix:
    """An ``n x c`` grid with entries in ``{0, 1, k}``.

    Each row carries at least one ``k``; for ``k > 1`` it must be exactly one.
    At ``k = 1`` the values ``1`` and ``k`` coincide, so a composed matrix
    equals the approval matrix there.
    """

    rows: tuple[tuple[Fraction, ...], ...]
    k: Fraction

    def __post_init__(self):
        k = check_k(self.k)
        rows = tuple(tuple(Fraction(v) for v in row) for row in self.rows)
        object.__setattr__(self, "k", k)
        object.__setattr__(self, "rows", rows)
        if rows and len({len(r) for r in rows}) != 1:
            raise BallotError("ragged beta matrix")
        for i, row in enumerate(rows):
            if any(v not in (0, 1, k) for v in row):
                raise BallotError(f"row {i} has an entry outside {{0, 1, k}}")
            nk = sum(v == k for v in row)
            if nk == 0 or (k > 1 and nk != 1):
                raise BallotError(f"row {i} must contain exactly one k entry")

    @property
    def shape(self) -> tuple[int, int]:
        return len(self.rows), (len(self.rows[0]) if self.rows else 0)

    def column_sums(self) -> tuple[Fraction, ...]:
        return tuple(sum(col, Fraction(0)) for col in zip(*self.rows))


@dataclass(frozen=True)
class PreferenceProfile:
    """Strict rankings per voter plus an approval cutoff.

    Voter ``i`` approves the top ``cutoffs[i]`` candidates of ``rankings[i]``.
    """

    rankings: tuple[tuple[int, ...], ...]
    cutoffs: tuple[int, ...]
    candidates: CandidateSet | None = field(default=None)

    def __post_init__(self):
        rankings = tuple(tuple(r) for r in self.rankings)
        cutoffs = tuple(self.cutoffs)
        object.__setattr__(self, "rankings", rankings)
        object.__setattr__(self, "cutoffs", cutoffs)
        if not rankings:
            raise EmptyElection("a profile needs at least one voter")
        if len(cutoffs) != len(rankings):
            raise BallotError("one cutoff per voter is required")
        c = len(rankings[0])
        if self.candidates is None:
            object.__setattr__(self, "candidates", CandidateSet.default(c))
        elif self.candidates.c != c:
            raise BallotError("rankings do not cover the candidate roster")
        for i, (r, t) in enumerate(zip(rankings, cutoffs)):
            if sorted(r) != list(range(c)):
                raise BallotError(f"voter {i} ranking is not a permutation of 0..{c - 1}")
            if not 1 <= t <= c:
                raise BallotError(f"voter {i} cutoff {t} outside [1, {c}]")

    @property
    def n(self) -> int:
        return len(self.rankings)

    @property
    def c(self) -> int:
        return self.candidates.c

    def prefers(self, i: int, x: int, y: int) -> bool:
        r = self.rankings[i]
        return r.index(x) < r.index(y)

    def to_json_obj(self) -> dict:
        ids = self.candidates.ids
        return {
            "candidates": list(ids),
            "voters": [
                {"ranking": [ids[j] for j in r], "approve_top": t}
                for r, t in zip(self.rankings, self.cutoffs)
            ],
        }


def compose_beta(election: Election, k) -> BetaMatrix:
    k = check_k(k)
    rows = []
    for b in election.ballots:
        rows.append(tuple(
            k if j == b.first_choice else Fraction(1) if j in b.approvals else Fraction(0)
            for j in range(election.c)))
    return BetaMatrix(tuple(rows), k)


def honest_ballots(profile: PreferenceProfile) -> Election:
    ballots = tuple(BallotPair(r[0], frozenset(r[:t]))
                    for r, t in zip(profile.rankings, profile.cutoffs))
    return Election(profile.candidates, ballots)


def _check_shape(B: BetaMatrix, M: Sequence[Sequence[int]]):
    if len(M) != len(B.rows) or any(len(r) != len(br) for r, br in zip(M, B.rows)):
        raise ValueError("matrix dimensions do not match the beta matrix")


def validate_regime_plurality(B: BetaMatrix, P: Sequence[Sequence[int]]) -> bool:
    """True iff the ``k`` entries of ``B`` sit exactly on the 1s of ``P``."""
    _check_shape(B, P)
    return all((b == B.k) == (p == 1) for brow, prow in zip(B.rows, P) for b, p in zip(brow, prow))


def validate_regime_approval(B: BetaMatrix, A: Sequence[Sequence[int]]) -> bool:
    """True iff the non-zero entries of ``B`` sit exactly on the 1s of ``A``."""
    _check_shape(B, A)
    return all((b != 0) == (a == 1) for brow, arow in zip(B.rows, A) for b, a in zip(brow, arow))


# -- file ingestion ---------------------------------------------------------

CANDIDATES_HEADER = "#candidates:"


def _split_ids(text: str) -> list[str]:
    if not text.strip():
        return []
    return [s.strip() for s in next(csv.reader([text]))]


def _parse_csv(text: str) -> Election:
    ids: list[str] | None = None
    rows: list[tuple[int, str, list[str]]] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith(CANDIDATES_HEADER):
            if ids is not None or rows:
                raise BallotError("candidate header must come first and only once", lineno)
            ids = _split_ids(line[len(CANDIDATES_HEADER):])
            continue
        if line.startswith("#"):
            continue
        if line.count(";") != 1:
            raise BallotError("expected 'first;approved,...'", lineno)
        first, approve = line.split(";")
        firsts = _split_ids(first)
        if len(firsts) != 1 or not firsts[0]:
            raise FirstChoiceError(f"expected exactly one first choice, got {len(firsts)}", lineno)
        rows.append((lineno, firsts[0], _split_ids(approve)))
    if not rows:
        raise EmptyElection("no ballots found")
    if ids is None:
        ids = []
        for _, first, approve in rows:
            for cid in [first, *approve]:
                if cid not in ids:
                    ids.append(cid)
    candidates = CandidateSet(tuple(ids))
    return _build(candidates, rows)


def _build(candidates: CandidateSet, rows) -> Election:
    ballots = []
    for lineno, first, approve in rows:
        try:
            fi = candidates.index(first)
            ap = frozenset(candidates.index(a) for a in approve)
            if fi not in ap:
                raise InconsistentBallot(f"first choice {first!r} is not among the approvals")
            ballots.append(BallotPair(fi, ap))
        except BallotError as e:
            raise type(e)(str(e), lineno) from None
    return Election(candidates, tuple(ballots))


def _parse_json(text: str) -> Election:
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as e:
        raise BallotError(f"invalid JSON: {e}") from None
    if not isinstance(obj, dict) or "candidates" not in obj or "ballots" not in obj:
        raise BallotError("expected an object with 'candidates' and 'ballots'")
    candidates = CandidateSet(tuple(obj["candidates"]))
    if not obj["ballots"]:
        raise EmptyElection("no ballots found")
    rows = []
    for i, b in enumerate(obj["ballots"]):
        first = b.get("first")
        if not isinstance(first, str):
            raise FirstChoiceError("expected exactly one first choice", i + 1)
        rows.append((i + 1, first, list(b.get("approve", []))))
    return _build(candidates, rows)


def parse_election(data: bytes | str, format: str = "csv") -> Election:
    """Parse a ballot file.  ``format`` is ``"csv"`` or ``"json"``.

    Errors carry the 1-based line (CSV) or ballot number (JSON) that failed.
    """
    if isinstance(data, bytes):
        data = data.decode("utf-8")
    if not data.strip():
        raise EmptyElection("empty input")
    if format == "csv":
        return _parse_csv(data)
    if format == "json":
        return _parse_json(data)
    raise ValueError(f"unknown ballot format {format!r}")


def parse_profile(data: bytes | str) -> PreferenceProfile:
    """Parse a preference-profile JSON document."""
    if isinstance(data, bytes):
        data = data.decode("utf-8")
    try:
        obj = json.loads(data)
    except json.JSONDecodeError as e:
        raise BallotError(f"invalid JSON: {e}") from None
    candidates = CandidateSet(tuple(obj["candidates"]))
    rankings, cutoffs = [], []
    for i, v in enumerate(obj["voters"]):
        try:
            rankings.append(tuple(candidates.index(x) for x in v["ranking"]))
        except BallotError as e:
            raise type(e)(str(e), i + 1) from None
        cutoffs.append(int(v.get("approve_top", 1)))
    return PreferenceProfile(tuple(rankings), tuple(cutoffs), candidates)


def election_from_rows(ids: Iterable[str], rows: Iterable[tuple[str, Iterable[str]]]) -> Election:
    """Convenience constructor from ``(first, approvals)`` id pairs."""
    candidates = CandidateSet(tuple(ids))
    return Election(candidates, tuple(
        BallotPair(candidates.index(f), frozenset(candidates.index(a) for a in ap))
        for f, ap in rows))

