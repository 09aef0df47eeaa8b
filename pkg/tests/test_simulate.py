import math
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from betavote.ballots import PreferenceProfile
from betavote.criteria import check_pareto
from betavote.simulate import (AgreementStats, KStats, SimConfig, drop_candidate, random_profile,
                               resolve_k, run_agreement, sample_seed, search_counterexample,
                               shrink, verify_witness)


@pytest.mark.parametrize("expr, n, c, expected", [
    ("1", 4, 3, Fraction(1)),
    ("n+1", 4, 3, Fraction(5)),
    ("1+1/(2n)", 4, 3, Fraction(9, 8)),
    ("c-1", 4, 3, Fraction(2)),
    ("c", 4, 3, Fraction(3)),
    ("5/2", 4, 3, Fraction(5, 2)),
    ("2c+n/3", 3, 2, Fraction(5)),
])
def test_resolve_k(expr, n, c, expected):
    assert resolve_k(expr, n, c) == expected


@pytest.mark.parametrize("expr", ["__import__('os')", "n**2", "x+1", "1.5", "n+"])
def test_resolve_k_rejects(expr):
    with pytest.raises(ValueError):
        resolve_k(expr, 2, 2)


def test_config_validation():
    with pytest.raises(ValueError):
        SimConfig(n_range=(3, 2))
    with pytest.raises(ValueError):
        SimConfig(samples=0)
    with pytest.raises(ValueError):
        SimConfig(k_grid=())
    with pytest.raises(ValueError):
        SimConfig.from_json_obj({"samples": 3, "bogus": 1})
    cfg = SimConfig.from_json_obj({"n_range": [1, 3], "k_grid": ["c"], "seed": 5})
    assert SimConfig.from_json_obj(cfg.to_json_obj()) == cfg


def test_random_profile_basic():
    prof = random_profile(1, 1, 123)
    assert prof.rankings == ((0,),) and prof.cutoffs == (1,)
    assert random_profile(5, 4, 99) == random_profile(5, 4, 99)
    assert random_profile(5, 4, 99) != random_profile(5, 4, 100)


def test_random_profile_top_rank_uniform():
    draws = 5000
    counts = [0, 0, 0]
    for s in range(draws):
        prof = random_profile(6, 3, sample_seed(11, s))
        counts[prof.rankings[0][0]] += 1
    sigma = math.sqrt(draws * (1 / 3) * (2 / 3))
    assert all(abs(x - draws / 3) <= 3 * sigma for x in counts)


def test_k1_approval_equality():
    stats = run_agreement(SimConfig(samples=300, k_grid=("1",), seed=1))
    assert stats.per_k["1"].fraction("beta_eq_approval") == 1


def test_regime_fractions():
    stats = run_agreement(SimConfig(samples=400, k_grid=("n+1", "1+1/(2n)"), seed=2))
    assert stats.per_k["n+1"].fraction("beta_sub_plurality") == 1
    assert stats.per_k["1+1/(2n)"].fraction("beta_sub_approval") == 1
    for ks in stats.per_k.values():
        for r in AgreementStats.RATES:
            assert 0 <= ks.fraction(r) <= 1


def test_skipped_when_k_below_one():
    stats = run_agreement(SimConfig(c_range=(1, 1), samples=20, k_grid=("c-1",), seed=0))
    assert stats.per_k["c-1"].skipped == 20 and stats.per_k["c-1"].evaluated == 0


def test_determinism_and_parallel():
    cfg = SimConfig(samples=120, k_grid=("1", "n+1", "c"), seed=77)
    a = run_agreement(cfg, workers=1)
    assert run_agreement(cfg, workers=1) == a
    assert run_agreement(cfg, workers=3) == a
    assert a.to_json_obj() == run_agreement(cfg, workers=2).to_json_obj()


def test_merge_associative_commutative():
    grid = ("1",)
    x = AgreementStats(grid, {"1": KStats(1, 0, 1, 0, 1, 1, 0)}, 1, 2)
    y = AgreementStats(grid, {"1": KStats(1, 0, 0, 0, 1, 0, 1)}, 1, 1)
    z = AgreementStats(grid, {"1": KStats(2, 1, 2, 1, 2, 2, 2)}, 3, 4)
    assert x.merge(y) == y.merge(x)
    assert x.merge(y).merge(z) == x.merge(y.merge(z))


def test_search_approval_non_pareto():
    w = search_counterexample("approval_non_pareto", SimConfig(n_range=(1, 6), c_range=(2, 4),
                                                               samples=1000, seed=3))
    assert w is not None
    assert w.profile.c == 2 and w.profile.n <= 2
    assert verify_witness(w)
    assert not check_pareto(w.profile, 1).holds


def test_search_above_bound_finds_nothing():
    cfg = SimConfig(n_range=(1, 6), c_range=(2, 4), samples=500, seed=4)
    assert search_counterexample("beta_non_pareto_below_bound", cfg, k="c") is None


def test_search_beta_k1_three_candidates():
    cfg = SimConfig(n_range=(1, 6), c_range=(3, 5), samples=1000, seed=5)
    w = search_counterexample("beta_non_pareto_below_bound", cfg, k="1")
    assert w is not None and verify_witness(w)


def test_conjecture_probe_reports_nothing():
    cfg = SimConfig(n_range=(1, 5), c_range=(2, 4), samples=150, k_grid=("3/2", "c", "n+1"), seed=6)
    assert search_counterexample("conjecture_probe", cfg) is None


def test_unknown_search_criterion():
    with pytest.raises(ValueError):
        search_counterexample("condorcet", SimConfig(samples=1))


def test_drop_candidate_adjusts_cutoffs():
    prof = PreferenceProfile(((2, 0, 1), (0, 1, 2)), (2, 1))
    smaller = drop_candidate(prof, 0)
    assert smaller.rankings == ((1, 0), (0, 1))
    assert smaller.cutoffs == (1, 1)
    assert smaller.candidates.ids == ("C2", "C3")


@given(st.integers(1, 6), st.integers(2, 4), st.integers(0, 2**32))
def test_shrinker_soundness(n, c, seed):
    from betavote.simulate import _non_pareto_winner
    prof = random_profile(n, c, seed)
    if _non_pareto_winner(prof, Fraction(1)) is None:
        return
    small = shrink(prof, "1", _non_pareto_winner)
    assert small.n <= prof.n and small.c <= prof.c
    assert not check_pareto(small, 1).holds
