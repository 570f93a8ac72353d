import math
import warnings

import numpy as np
import pytest
from hypothesis import assume, given
from hypothesis import strategies as st

from greenlink.outage import (
    HighSnrDomainWarning,
    decoding_state_probs,
    outage_internetwork_user,
    outage_single_link,
    outage_sum_two_exponentials,
    outage_theta1_exact_midform,
    outage_theta1_highsnr_approx,
    outage_theta2_highsnr_approx,
    scheme_outages,
)
from greenlink.power import PowerAllocation, solve_powers
from greenlink.scenario import QosSpec, Scheme

MC_TRIALS = 10_000_000


def mc_sum_cdf(m1, m2, t, seed):
    """Brute-force Pr(X1 + X2 < t) for exponentials with means m1, m2."""
    rng = np.random.default_rng(seed)
    x = rng.exponential(m1, MC_TRIALS) + rng.exponential(m2, MC_TRIALS)
    p = float(np.mean(x < t))
    return p, math.sqrt(p * (1 - p) / MC_TRIALS)


def test_single_link_examples():
    assert outage_single_link(5.0, 0.0) == 0.0
    assert outage_single_link(1e300, 1.0) == pytest.approx(0.0, abs=1e-299)
    assert outage_single_link(0.0, 1.0) == 1.0
    assert outage_single_link(1.0, 1.0) == pytest.approx(0.632121, abs=1e-6)


def test_single_link_matches_monte_carlo():
    rng = np.random.default_rng(11)
    p = float(np.mean(rng.exponential(1.0, MC_TRIALS) < 1.0))
    se = math.sqrt(p * (1 - p) / MC_TRIALS)
    assert abs(outage_single_link(1.0, 1.0) - p) <= 3 * se


def test_sum_of_exponentials_examples():
    assert outage_sum_two_exponentials(1.0, 1.0, 1.0) == pytest.approx(0.264241, abs=1e-6)
    assert outage_sum_two_exponentials(1.0, 2.0, 1.0) == pytest.approx(0.154818, abs=1e-6)
    assert outage_sum_two_exponentials(1.0, 2.0, 0.0) == 0.0


@pytest.mark.parametrize("m1, m2, seed", [(1.0, 1.0, 1), (1.0, 2.0, 2)])
def test_sum_of_exponentials_matches_monte_carlo(m1, m2, seed):
    p, se = mc_sum_cdf(m1, m2, 1.0, seed)
    assert abs(outage_sum_two_exponentials(m1, m2, 1.0) - p) <= 3 * se


def test_sum_of_exponentials_high_snr_precision():
    # Reference values from 50-digit arithmetic; the textbook form loses all
    # digits here.
    assert outage_sum_two_exponentials(1e6, 2e6, 1.0) == pytest.approx(2.49999916666687500e-13, rel=1e-12)
    assert outage_sum_two_exponentials(1e4, 1e4 * (1 + 1e-7), 1.0) == pytest.approx(4.99933339999e-9, rel=1e-9)


def test_saturation_above_exp_range():
    assert outage_sum_two_exponentials(1.0, 1.0, 1e4) == 1.0
    assert outage_single_link(1.0, 1e4) == 1.0


def test_decoding_state_examples():
    p1, p2 = decoding_state_probs(1e-4, 1e-4)
    assert p1 == pytest.approx(0.99980001, rel=1e-15)
    assert p1 + p2 == 1.0
    assert decoding_state_probs(0, 0) == (1.0, 0.0)
    assert decoding_state_probs(1, 0.3) == (0.0, 1.0)
    with pytest.raises(ValueError):
        decoding_state_probs(1.2, 0.0)


def test_internetwork_mixture_limits(scenario):
    alloc = solve_powers(scenario, Scheme.INTER)
    # infinite exchange power: theta = 1 surely, outage is the combined CDF
    sure = PowerAllocation(math.inf, math.inf, alloc.p1_cellular, alloc.p2_cellular)
    b = outage_internetwork_user(1, scenario, sure)
    m1 = scenario.cellular_mean_snr(1, alloc.p1_cellular)
    m2 = scenario.cellular_mean_snr(2, alloc.p2_cellular)
    thr = scenario.cellular_threshold(1)
    assert b.p_theta1 == 1.0
    assert b.total == outage_sum_two_exponentials(m1, m2, thr)
    # zero exchange power: theta = 2 surely, outage is the user's own link
    never = PowerAllocation(0.0, 0.0, alloc.p1_cellular, alloc.p2_cellular)
    b = outage_internetwork_user(2, scenario, never)
    assert b.p_theta1 == 0.0
    assert b.total == outage_single_link(m2, scenario.cellular_threshold(2))


def test_internetwork_user2_uses_own_threshold(base_cfg):
    sc = base_cfg.scenario.with_qos(rate2=2e6)
    alloc = PowerAllocation(0.05, 0.05, 1.0, 1.0)
    u1 = outage_internetwork_user(1, sc, alloc)
    u2 = outage_internetwork_user(2, sc, alloc)
    assert u1.p_theta1 == u2.p_theta1  # theta = 1 is a joint event
    assert u2.p_cond_theta1 < u1.p_cond_theta1


def test_breakdown_invariants(scenario):
    alloc = PowerAllocation(0.01, 0.02, 0.7, 1.3)
    for user in (1, 2):
        b = outage_internetwork_user(user, scenario, alloc)
        assert b.p_theta1 + b.p_theta2 == 1.0
        assert b.total == pytest.approx(b.p_theta1 * b.p_cond_theta1 + b.p_theta2 * b.p_cond_theta2, abs=1e-12)
        for v in (b.p_theta1, b.p_theta2, b.p_cond_theta1, b.p_cond_theta2, b.total):
            assert 0.0 <= v <= 1.0


def test_no_coop_scheme_needs_no_exchange(scenario):
    alloc = PowerAllocation(p1_cellular=1.0, p2_cellular=2.0)
    o1, o2 = scheme_outages(scenario, Scheme.NO_COOP, alloc)
    assert o2 < o1
    with pytest.raises(ValueError):
        outage_internetwork_user(1, scenario, alloc, Scheme.NO_COOP)


def test_highsnr_examples():
    assert outage_theta1_highsnr_approx(100, 100) == pytest.approx(5.0e-5, rel=1e-15)
    mid = outage_theta1_exact_midform(100, 100)
    assert mid == pytest.approx(4.9667e-5, rel=1e-4)
    assert abs(mid - 5e-5) / mid < 0.007
    assert outage_theta1_highsnr_approx(30, 70, beta=1.0, user=2) == outage_theta1_highsnr_approx(30, 70, user=1)
    assert outage_theta2_highsnr_approx(100) == 0.01
    assert abs(0.01 - outage_single_link(100, 1)) / outage_single_link(100, 1) < 0.0051
    assert outage_theta2_highsnr_approx(10) == pytest.approx(0.1)
    assert outage_single_link(10, 1) == pytest.approx(0.09516, abs=1e-5)


def test_highsnr_domain_warning():
    with pytest.warns(HighSnrDomainWarning):
        v = outage_theta1_highsnr_approx(2.0, 3.0, delta=0.005)
    assert v == pytest.approx(1 / 12)
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        outage_theta1_highsnr_approx(100.0, 100.0, delta=0.005)
    # for user 2 the bound is scaled by beta
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        outage_theta1_highsnr_approx(15.0, 15.0, beta=2.0, user=2, delta=0.005)


@pytest.mark.parametrize("z", [0.0, -1.0])
def test_highsnr_rejects_non_positive(z):
    with pytest.raises(ValueError):
        outage_theta1_highsnr_approx(z, 1.0)
    with pytest.raises(ValueError):
        outage_theta2_highsnr_approx(z)


# -- properties ---------------------------------------------------------------

means = st.floats(min_value=1e-3, max_value=1e6)
thresholds = st.floats(min_value=0.0, max_value=1e3)
factors = st.floats(min_value=1.0, max_value=10.0)


@given(m1=means, m2=means, t=thresholds, k=factors)
def test_monotone_in_means_and_threshold(m1, m2, t, k):
    f = outage_sum_two_exponentials(m1, m2, t)
    assert outage_sum_two_exponentials(m1 * k, m2, t) <= f + 1e-15
    assert outage_sum_two_exponentials(m1, m2 * k, t) <= f + 1e-15
    assert outage_sum_two_exponentials(m1, m2, t * k) >= f - 1e-15
    g = outage_single_link(m1, t)
    assert outage_single_link(m1 * k, t) <= g
    assert outage_single_link(m1, t * k) >= g


@given(m1=means, m2=means, t=thresholds)
def test_diversity_never_hurts(m1, m2, t):
    assert outage_sum_two_exponentials(m1, m2, t) <= outage_single_link(max(m1, m2), t) + 1e-15


@pytest.mark.parametrize("eps", [1e-6, 1e-9, 1e-12])
@given(m=st.floats(min_value=1e-2, max_value=1e5), t=st.floats(min_value=1e-3, max_value=50.0))
def test_continuity_at_equal_means(eps, m, t):
    equal = outage_sum_two_exponentials(m, m, t)
    near = outage_sum_two_exponentials(m, m * (1 + eps), t)
    assert near == pytest.approx(equal, rel=max(10 * eps, 1e-12), abs=1e-300)


@given(z1=st.floats(min_value=20.0, max_value=1e6), z2=st.floats(min_value=20.0, max_value=1e6))
def test_approximation_within_one_percent_below_tenth(z1, z2):
    # Claimed accuracy regime: relative error < 1% whenever 1/z1 + 1/z2 < 0.1.
    assume(1 / z1 + 1 / z2 < 0.1)
    exact = outage_sum_two_exponentials(z1, z2, 1.0)
    assert abs(outage_theta1_highsnr_approx(z1, z2) - exact) / exact < 0.01


@given(z1=st.floats(min_value=20.0, max_value=1e6), z2=st.floats(min_value=20.0, max_value=1e6))
def test_approximation_error_tracks_first_order_term(z1, z2):
    # The leading relative error of 1/(2 z1 z2) is (1/z1 + 1/z2) / 3.
    s = 1 / z1 + 1 / z2
    assume(s < 0.1)
    exact = outage_sum_two_exponentials(z1, z2, 1.0)
    rel = abs(outage_theta1_highsnr_approx(z1, z2) - exact) / exact
    assert rel <= s / 3 * 1.05
    if s < 0.03:
        assert rel < 0.01


@given(m1=means, m2=means, t=thresholds)
def test_values_are_probabilities(m1, m2, t):
    assert 0.0 <= outage_sum_two_exponentials(m1, m2, t) <= 1.0


@given(target=st.floats(min_value=1e-6, max_value=0.3), rate=st.floats(min_value=1e5, max_value=2e7))
def test_solved_powers_balance_means(scenario, target, rate):
    sc = scenario.with_topology(d_2b=2 * scenario.topology.d_1b).replace(qos=QosSpec.uniform(target, rate))
    a = solve_powers(sc, Scheme.INTER)
    m1 = sc.cellular_mean_snr(1, a.p1_cellular)
    m2 = sc.cellular_mean_snr(2, a.p2_cellular)
    assert m1 == pytest.approx(m2, rel=1e-12)
