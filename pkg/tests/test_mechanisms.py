import itertools
import math

import mpmath
import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from oracles import empirical, total_variation
from privebc.mechanisms import (
    BudgetTriple,
    MechanismError,
    exact_subset_pmf,
    inverse_transform_sample,
    laplace_sample,
    pick_and_flip,
    pick_and_flip_mask,
    quality,
    quality_level_log_pmf,
    subset_release,
    subset_release_mask,
)

# Frozen with mpmath at 50 digits: C(12, i) e^{i} / (1 + e)^12.
PMF_12_EPS2 = [1.43183294146e-7, 4.67055055938e-6, 6.98272999296e-5, 0.000632700935097,
               0.00386968377312, 0.0168302257318, 0.0533741795715, 0.12435948209,
               0.211277575226, 0.255249774888, 0.208152247439, 0.102875722139,
               0.0233037671734]


def subsets(universe):
    return [frozenset(c) for r in range(len(universe) + 1)
            for c in itertools.combinations(sorted(universe), r)]


def test_budget_triple():
    b = BudgetTriple.split(3.0)
    assert b.total == pytest.approx(3.0)
    assert BudgetTriple.split(1.0, (0.2, 0.3, 0.5)).eps3 == pytest.approx(0.5)
    for bad in [(0.5, 0.5, 0.0), (0.5, 0.6, 0.1), (1.0,)]:
        with pytest.raises(MechanismError):
            BudgetTriple.split(1.0, bad)
    with pytest.raises(MechanismError):
        BudgetTriple(1.0, float("inf"), 1.0)


def test_laplace_moments():
    x = laplace_sample(2.5, np.random.default_rng(1), size=400_000)
    # sd of the mean is 2.5*sqrt(2)/sqrt(4e5) ~ 0.0056
    assert abs(x.mean()) < 0.03
    assert x.var() == pytest.approx(2 * 2.5**2, rel=0.02)


def test_laplace_determinism_and_errors():
    a = laplace_sample(1.0, np.random.default_rng(5), size=10)
    b = laplace_sample(1.0, np.random.default_rng(5), size=10)
    assert np.array_equal(a, b)
    with pytest.raises(MechanismError):
        laplace_sample(0.0, np.random.default_rng(0))


def test_quality_examples():
    assert quality({1, 2, 3}, {1, 2}, {1, 2}) == 3
    assert quality({1, 2, 3}, {1, 2}, {3}) == 0
    assert quality({1, 2, 3}, {1, 2}, set()) == 1
    with pytest.raises(MechanismError):
        quality({1, 2}, {1, 5}, set())
    with pytest.raises(MechanismError):
        quality({1, 2}, {1}, {9})


def test_quality_is_size_minus_symmetric_difference():
    uni = frozenset(range(5))
    for truth in subsets(uni):
        for cand in subsets(uni):
            assert quality(uni, truth, cand) == len(uni) - len(truth ^ cand)


def test_quality_sensitivity_exhaustive():
    # neighbouring inputs: the true set gains or loses one element
    uni = frozenset(range(6))
    worst = 0
    for truth in subsets(uni):
        for v in uni:
            other = truth ^ {v}
            for cand in subsets(uni):
                worst = max(worst, abs(quality(uni, truth, cand) - quality(uni, other, cand)))
    assert worst == 1


@pytest.mark.parametrize("n", [0, 1, 7, 100, 5_000, 100_000])
@pytest.mark.parametrize("eps", [0.01, 0.5, 1.0, 10.0])
def test_log_pmf_normalized(n, eps):
    lp = quality_level_log_pmf(n, eps)
    assert np.all(np.isfinite(lp))
    assert math.fsum(np.exp(lp)) == pytest.approx(1.0, abs=1e-9)


def test_log_pmf_closed_form_matches_recurrence():
    n, eps = 60, 1.7
    lp = quality_level_log_pmf(n, eps)
    with mpmath.workdps(40):
        z = (1 + mpmath.e ** (mpmath.mpf(eps) / 2)) ** n
        ref = [mpmath.log(mpmath.binomial(n, i) * mpmath.e ** (eps * i / 2) / z) for i in range(n + 1)]
    assert np.allclose(lp, [float(r) for r in ref], rtol=0, atol=1e-10)


def test_log_pmf_single_element():
    p = np.exp(quality_level_log_pmf(1, 1.0))
    assert p[0] == pytest.approx(0.37754066879814543536, rel=1e-12)
    assert p[1] == pytest.approx(1 - 0.37754066879814543536, rel=1e-12)


def test_log_pmf_frozen_values():
    assert np.allclose(np.exp(quality_level_log_pmf(12, 2.0)), PMF_12_EPS2, rtol=1e-10)


def test_log_pmf_small_eps_is_binomial_half():
    p = np.exp(quality_level_log_pmf(10, 1e-9))
    ref = [math.comb(10, i) / 2**10 for i in range(11)]
    assert np.allclose(p, ref, atol=1e-9)


def test_literal_variant_leftover_mass():
    n, eps = 10, 2.0
    lit = np.exp(quality_level_log_pmf(n, eps, "literal"))
    assert lit.sum() == pytest.approx((2 / (1 + math.e)) ** n, rel=1e-12)
    rng = np.random.default_rng(3)
    draws = np.array([inverse_transform_sample(n, eps, rng, "literal") for _ in range(20_000)])
    expected_top = lit[n] + 1 - lit.sum()
    assert np.mean(draws == n) == pytest.approx(expected_top, abs=0.01)


def test_sampler_matches_pmf():
    n, eps = 12, 2.0
    rng = np.random.default_rng(11)
    draws = [inverse_transform_sample(n, eps, rng) for _ in range(100_000)]
    emp = empirical(draws)
    assert total_variation(emp, dict(enumerate(PMF_12_EPS2))) < 0.01


def test_mpmath_precision_agrees_with_double():
    for seed in range(50):
        a = inverse_transform_sample(40, 1.3, np.random.default_rng(seed))
        b = inverse_transform_sample(40, 1.3, np.random.default_rng(seed), precision="mpmath")
        assert a == b
    with pytest.raises(MechanismError):
        inverse_transform_sample(4, 1.0, np.random.default_rng(0), precision="quad")


def test_pick_and_flip_hits_level():
    rng = np.random.default_rng(2)
    uni, truth = range(20), {1, 4, 9}
    for level in range(21):
        out = pick_and_flip(uni, truth, level, rng)
        assert quality(uni, truth, out) == level
    assert pick_and_flip(uni, truth, 20, rng) == frozenset(truth)
    assert pick_and_flip(uni, truth, 0, rng) == frozenset(uni) - frozenset(truth)
    with pytest.raises(MechanismError):
        pick_and_flip_mask(np.zeros(3, bool), 4, rng)


@given(st.integers(1, 30), st.integers(0, 2**30), st.integers(0, 2**32))
def test_pick_and_flip_mask_property(n, bits, seed):
    truth = np.array([(bits >> i) & 1 for i in range(n)], dtype=bool)
    rng = np.random.default_rng(seed)
    level = int(rng.integers(0, n + 1))
    out = pick_and_flip_mask(truth, level, rng)
    assert n - int(np.sum(out ^ truth)) == level


@pytest.mark.parametrize("eps", [0.5, 2.0])
def test_subset_release_matches_enumeration(eps):
    uni, truth = range(4), {0, 2}
    exact = exact_subset_pmf(uni, truth, eps)
    rng = np.random.default_rng(17)
    emp = empirical([subset_release(uni, truth, eps, rng) for _ in range(60_000)])
    assert total_variation(emp, exact) < 0.015


def test_subset_release_concentrates_for_large_eps():
    rng = np.random.default_rng(0)
    truth = np.array([1, 0, 1, 1, 0, 0, 1, 0], dtype=bool)
    hits = sum(np.array_equal(subset_release_mask(truth, 50.0, rng), truth) for _ in range(2000))
    assert hits == 2000
    p = exact_subset_pmf(range(8), {0, 2, 3, 6}, 50.0)[frozenset({0, 2, 3, 6})]
    assert p == pytest.approx(0.99999999988889644909, rel=1e-12)


def test_subset_release_edge_cases():
    rng = np.random.default_rng(0)
    assert subset_release([], [], 1.0, rng) == frozenset()
    with pytest.raises(MechanismError):
        subset_release([1, 2], [3], 1.0, rng)
    with pytest.raises(MechanismError):
        subset_release([1, 2], [1], 0.0, rng)


def test_exact_subset_pmf():
    p = exact_subset_pmf([7], [7], 1.0)
    assert p[frozenset({7})] == pytest.approx(1 - 0.37754066879814543536, rel=1e-12)
    assert sum(exact_subset_pmf(range(6), {1}, 0.3).values()) == pytest.approx(1.0)
    with pytest.raises(MechanismError):
        exact_subset_pmf(range(21), set(), 1.0)
