"""Plurality, approval and beta(k) elections.

beta(k) scores a voter's first choice ``k`` and every other approved
candidate ``1``.  The package tallies all three rules, finds the exact
ranges of ``k`` on which each candidate wins, and checks voting criteria.
"""

__version__ = "0.1.0"
