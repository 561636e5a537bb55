import math

import numpy as np
import pytest

from treelcs import (EmpiricalDistribution, big_jumps_check, errors,
                     estimate_c, estimate_p_eps, ks_distance, lcs_unrooted,
                     make_standard_law, many_to_one_check, sample_bgw,
                     star_lower_bound, survival_curve, wasserstein1)
from treelcs.estimators import (EstimateResult, exact_height_survival_curve,
                                exceedance_closed_form,
                                star_heights_to_bound)
from treelcs.offspring import expected_truncated_height
from treelcs.samplers import _graft

from conftest import rng, three_sigma_binomial


def test_distance_examples():
    d = EmpiricalDistribution
    assert ks_distance(d([1, 2, 3]), d([1, 2, 3])) == 0.0
    assert wasserstein1(d([1, 2, 3]), d([1, 2, 3])) == 0.0
    assert ks_distance(d([0]), d([1])) == 1.0
    assert wasserstein1(d([0]), d([1])) == 1.0
    assert ks_distance(d([0, 1]), d([0, 2])) == 0.5
    assert wasserstein1(d([0, 1]), d([0, 2])) == 0.5
    with pytest.raises(errors.Empty):
        d([])


def test_estimate_result_invariants():
    with pytest.raises(errors.TreeLcsError):
        EstimateResult(1.0, 2.0, 3.0, 10, 0, "mean", 0)
    with pytest.raises(errors.TreeLcsError):
        EstimateResult(1.0, 0.0, 2.0, 10, 11, "mean", 0)


def test_estimate_c(binary):
    r = rng("c")
    a = estimate_c(binary, binary, 4000, r)
    b = estimate_c(binary, binary, 4000, r)
    assert a == b  # determinism
    # binary root-biased pairs satisfy LCS = 1 + LCS(plain pair) >= 2
    assert a.point > 2.0
    assert a.method == "median_of_means"
    assert a.ci_low <= a.point <= a.ci_high
    with pytest.raises(errors.TreeLcsError):
        estimate_c(binary, binary, 0, r)


def test_estimate_c_ci_shrinks(binary):
    small = estimate_c(binary, binary, 1000, rng("ci"))
    big = estimate_c(binary, binary, 10000, rng("ci"))
    assert (big.ci_high - big.ci_low) < (small.ci_high - small.ci_low)


def test_height_survival_matches_recursion(binary, geometric):
    grid = np.array([2.0, 5.0, 10.0, 25.0, 50.0])
    for law in (binary, geometric):
        sc = survival_curve("height", law, None, grid, 2 * 10 ** 5,
                            rng("hs", law.name))
        exact = exact_height_survival_curve(law, grid)
        for p_hat, p in zip(sc.survival, exact):
            assert three_sigma_binomial(p_hat, p, sc.n_samples) < 3


def test_survival_curve_flags():
    law = make_standard_law("binary_half")
    sc = survival_curve("height", law, None, np.array([10.0]), 2000,
                        rng("one"))
    assert not sc.slope_defined and math.isnan(sc.slope)
    with pytest.raises(errors.TreeLcsError):
        survival_curve("height", law, None, np.array([5.0, 2.0]), 100,
                       rng("bad"))
    with pytest.raises(errors.TreeLcsError):
        survival_curve("nope", law, None, np.array([5.0]), 100, rng("bad2"))


def test_biased_pair_matches_plain_shift(binary):
    # binary root-biased trees are a root with one plain subtree, so
    # LCS(biased pair) = 1 + LCS(plain pair) in distribution
    grid = np.array([5.0, 10.0, 20.0])
    plain = survival_curve("lcs_rooted_pair", binary, binary, grid,
                           150000, rng("pl"))
    biased = survival_curve("lcs_rooted_biased_pair", binary, binary,
                            grid + 1.0, 150000, rng("bi"))
    for p, q in zip(plain.survival, biased.survival):
        se = math.sqrt(max(p * (1 - p), 1e-12) / 150000)
        assert abs(p - q) < 4 * se + 1e-4


def test_p_eps_edges(binary):
    pe = estimate_p_eps(binary, binary, 10.0, np.array([2.0, 5.0]),
                        20000, rng("pe1"))
    assert np.all(pe.p_hat == 0.0)
    pe = estimate_p_eps(binary, binary, 0.5, np.array([0.5, 2.0]),
                        20000, rng("pe2"))
    assert np.all(pe.p_hat <= 1.0)
    with pytest.raises(errors.TreeLcsError):
        estimate_p_eps(binary, binary, 0.0, np.array([2.0]), 10, rng("pe3"))


def test_many_to_one_trivial(binary):
    lhs, rhs, rel = many_to_one_check(binary, 1, ("one",), ("one",),
                                      10 ** 5, rng("m1"))
    assert rhs == 1.0
    assert rel < 0.02
    lhs, rhs, rel = many_to_one_check(binary, 3, ("one",), ("one",),
                                      10 ** 6, rng("m3"))
    assert rhs == 1.0 and rel < 0.02


def test_many_to_one_height_factor_is_exact(binary):
    # the G side of the rhs comes from the height recursion
    lhs, rhs, rel = many_to_one_check(binary, 2, ("one",), ("height", 5),
                                      2 * 10 ** 5, rng("m2"))
    assert rhs == pytest.approx(expected_truncated_height(binary, 5))
    assert rel < 0.02


def test_big_jumps_m1_closed_form(binary):
    grid = np.array([0.0, 0.3, 0.7, 1.0])
    bj = big_jumps_check(0.5, 1.0, 1, grid, {"kind": "tree_size",
                                             "law": binary},
                         10 ** 5, rng("bj1"))
    cf = exceedance_closed_form({"kind": "tree_size", "law": binary},
                                1.0, grid)
    for p_hat, p in zip(bj.exceedance, cf):
        assert three_sigma_binomial(p_hat, p, bj.n_samples) < 3.5
    assert np.all(bj.exceedance <= 1.0)


def test_big_jumps_pareto_m1(binary):
    grid = np.array([-2.0, 0.0, 1.1, 2.0, 3.0])
    cutoff = 4.0
    bj = big_jumps_check(1.5, 4.0, 1, grid / 4.0 * cutoff
                         / (1.0 ** (1 / 1.5)), {"kind": "pareto"},
                         10 ** 5, rng("bj2"))
    assert np.all(np.diff(bj.exceedance) <= 0)


def test_big_jumps_errors(binary):
    with pytest.raises(errors.InvalidAlpha):
        big_jumps_check(1.0, 1.0, 10, [1.0], {"kind": "pareto"}, 10,
                        rng("e1"))
    with pytest.raises(errors.InvalidAlpha):
        big_jumps_check(0.7, 1.0, 10, [1.0],
                        {"kind": "tree_size", "law": binary}, 10, rng("e2"))
    with pytest.raises(errors.TreeLcsError):
        big_jumps_check(0.5, 0.5, 10, [1.0], {"kind": "pareto"}, 10,
                        rng("e3"))


def test_star_trivial_cases(geometric):
    degenerate = make_standard_law("custom", pmf=[1.0])
    res = star_lower_bound(degenerate, 8, 20, rng("s0"))
    assert res.point == 0.0
    res = star_lower_bound(geometric, 1, 200, rng("s1"))
    assert res.point >= 0.0


def test_star_bound_below_true_lcs(geometric):
    # Eq-style certificate: the rearranged-minimum of subtree heights
    # never exceeds the true unrooted LCS of the two assembled stars
    for i in range(25):
        delta = 4 + (i % 5)
        subs_a = [sample_bgw(geometric, rng("sa", i, j), cap=12)
                  for j in range(delta)]
        subs_b = [sample_bgw(geometric, rng("sb", i, j), cap=12)
                  for j in range(delta)]
        if any(t.censored for t in subs_a + subs_b):
            continue
        star_a = _graft(subs_a)
        star_b = _graft(subs_b)
        if star_a.size * star_b.size > 3600:
            continue
        bound = star_heights_to_bound([t.height for t in subs_a],
                                      [t.height for t in subs_b])
        assert bound <= lcs_unrooted(star_a, star_b)
