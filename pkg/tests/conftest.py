from pathlib import Path

import pytest
from hypothesis import settings, strategies as st

from betavote.ballots import BallotPair, CandidateSet, Election, election_from_rows

settings.register_profile("ci", max_examples=200, deadline=None)
settings.register_profile("fast", max_examples=25, deadline=None)
settings.load_profile("ci")

GOLDEN = Path(__file__).resolve().parent.parent / "data" / "golden"


@pytest.fixture
def golden():
    return GOLDEN


@pytest.fixture
def e1():
    return election_from_rows("ABC", [("A", "AB"), ("B", "BA"), ("B", "BA"),
                                      ("C", "CAB"), ("C", "CAB"), ("C", "CA")])


@pytest.fixture
def e2():
    return election_from_rows("ABC", [("A", "AB"), ("B", "BA"), ("B", "BA"),
                                      ("C", "CAB"), ("C", "CA"), ("C", "CA")])


@pytest.fixture
def remark_plurality():
    # B = [[k, 1], [0, k]], P = identity
    return Election.from_matrices([[1, 0], [0, 1]], [[1, 1], [0, 1]])


@pytest.fixture
def remark_approval():
    # B = [[k, 1], [k, 1]], A all ones
    return Election.from_matrices([[1, 0], [1, 0]], [[1, 1], [1, 1]])


@st.composite
def elections(draw, max_n=8, max_c=5, min_c=1):
    c = draw(st.integers(min_c, max_c))
    n = draw(st.integers(1, max_n))
    ballots = []
    for _ in range(n):
        first = draw(st.integers(0, c - 1))
        others = draw(st.sets(st.integers(0, c - 1), max_size=c))
        ballots.append(BallotPair(first, others | {first}))
    return Election(CandidateSet.default(c), tuple(ballots))


ks = st.fractions(min_value=1, max_value=50, max_denominator=24)

# -- acceptance summary -----------------------------------------------------

ACCEPTANCE: dict[int, tuple[str, bool]] = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for num in sorted(ACCEPTANCE):
        desc, ok = ACCEPTANCE[num]
        terminalreporter.write_line(f"[{'PASS' if ok else 'FAIL'}] {num:>2}. {desc}")
