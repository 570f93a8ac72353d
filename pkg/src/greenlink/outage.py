"""Closed-form outage probabilities under Rayleigh fading.

All CDFs are written in terms of ``x = threshold / mean`` and evaluated
with series expansions where the textbook forms cancel catastrophically
(high SNR, i.e. small ``x``).
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

from greenlink.scenario import Scenario, Scheme

# exp(-700) is ~1e-304; beyond this the outage is saturated at 1.
EXP_SATURATION = 700.0
# Relative mean separation below which the equal-means CDF is used.
EQUAL_MEANS_RTOL = 1e-9
# Up to this separation a midpoint expansion replaces the distinct-means form.
NEAR_EQUAL_RTOL = 1e-4
_SERIES_CUTOFF = 0.5


class HighSnrDomainWarning(UserWarning):
    """A high-SNR approximation was evaluated outside its accuracy domain."""


def _one_minus_exp(x):
    """1 - exp(-x) for x >= 0."""
    if x > EXP_SATURATION:
        return 1.0
    return -math.expm1(-x)


def _psi(x):
    """x - (1 - exp(-x)), accurate for small x."""
    if x < _SERIES_CUTOFF:
        # sum_{k>=2} (-x)^k / k!
        total, term, k = 0.0, -x, 1
        while True:
            k += 1
            term *= -x / k
            total += term
            if abs(term) <= 1e-17 * abs(total):
                return total
    return x + math.expm1(-x)


def _erlang2_cdf(x):
    """1 - (1 + x) exp(-x): CDF at x of the sum of two unit-mean exponentials."""
    if x > EXP_SATURATION:
        return 1.0
    if x < _SERIES_CUTOFF:
        # sum_{k>=2} (-1)^k (k - 1) x^k / k!
        total, power_over_fact, k = 0.0, x, 1
        while True:
            k += 1
            power_over_fact *= x / k
            term = (k - 1) * power_over_fact * (1 if k % 2 == 0 else -1)
            total += term
            if abs(term) <= 1e-17 * abs(total):
                return total
    return 1.0 - (1.0 + x) * math.exp(-x)


@dataclass(frozen=True)
class OutageBreakdown:
    """Outage of one user split by the exchange decoding state."""

    p_theta1: float
    p_theta2: float
    p_cond_theta1: float
    p_cond_theta2: float
    total: float


def outage_single_link(mean_snr: float, threshold: float) -> float:
    """Pr(mean_snr * E < threshold) with E ~ Exp(1)."""
    if threshold < 0 or mean_snr < 0:
        raise ValueError("mean_snr and threshold must be >= 0")
    if threshold == 0:
        return 0.0
    if mean_snr == 0:
        return 1.0
    return _one_minus_exp(threshold / mean_snr)


def outage_sum_two_exponentials(mean1: float, mean2: float, threshold: float) -> float:
    """Pr(X1 + X2 < threshold) for independent exponentials with the given means."""
    if not (mean1 > 0 and mean2 > 0):
        raise ValueError("means must be > 0")
    if threshold < 0:
        raise ValueError("threshold must be >= 0")
    if threshold == 0:
        return 0.0
    t = threshold
    hi, lo = max(mean1, mean2), min(mean1, mean2)
    if t / hi > EXP_SATURATION:
        return 1.0
    sep = (hi - lo) / hi
    if sep <= EQUAL_MEANS_RTOL:
        return _erlang2_cdf(t / (0.5 * (hi + lo)))
    if sep < NEAR_EQUAL_RTOL:
        # F = 1 - [u(m1) - u(m2)] / (m1 - m2) with u(m) = m exp(-t/m),
        # expanded about the midpoint c with half-gap h.
        c = 0.5 * (hi + lo)
        h = 0.5 * (hi - lo)
        s = t / c
        u3 = math.exp(-s) * s * s * (s - 3.0) / (c * c)
        return _erlang2_cdf(s) - u3 * h * h / 6.0
    x_hi, x_lo = t / hi, t / lo
    if x_hi < 1.0:
        value = (lo * _psi(x_lo) - hi * _psi(x_hi)) / (hi - lo)
    else:
        e_lo = 0.0 if x_lo > EXP_SATURATION else math.exp(-x_lo)
        value = 1.0 - (hi * math.exp(-x_hi) - lo * e_lo) / (hi - lo)
    return min(max(value, 0.0), 1.0)


def decoding_state_probs(pout_12: float, pout_21: float) -> tuple[float, float]:
    """Probabilities that both exchange transmissions succeed (theta=1) or not."""
    for p in (pout_12, pout_21):
        if not 0.0 <= p <= 1.0:
            raise ValueError(f"exchange outage must lie in [0, 1], got {p!r}")
    p_theta1 = (1.0 - pout_12) * (1.0 - pout_21)
    return p_theta1, 1.0 - p_theta1


def exchange_outages(scenario: Scenario, allocation, scheme: Scheme = Scheme.INTER) -> tuple[float, float]:
    """Outage of the U1->U2 and U2->U1 exchange links at the allocated powers."""
    out = []
    for direction, power in ((12, allocation.p1_shortrange), (21, allocation.p2_shortrange)):
        if power is None:
            raise ValueError(f"allocation lacks the exchange power for direction {direction}")
        if power == math.inf:
            out.append(0.0)
            continue
        out.append(
            outage_single_link(
                scenario.exchange_mean_snr(direction, power, scheme),
                scenario.exchange_threshold(direction, scheme),
            )
        )
    return out[0], out[1]


def outage_internetwork_user(
    user: int,
    scenario: Scenario,
    allocation,
    scheme: Scheme = Scheme.INTER,
) -> OutageBreakdown:
    """Outage of ``user`` under a cooperation scheme (inter or intra).

    When both exchanges succeed the users transmit jointly with Alamouti
    coding and both packets see the combined SNR; otherwise each user falls
    back to its own uplink.  Each user is judged against its own threshold.
    """
    scheme = Scheme(scheme)
    if scheme is Scheme.NO_COOP:
        raise ValueError("use outage_no_cooperation for the no_coop scheme")
    if allocation.p1_cellular is None or allocation.p2_cellular is None:
        raise ValueError("both cellular powers must be set")
    pout_12, pout_21 = exchange_outages(scenario, allocation, scheme)
    p1, p2 = decoding_state_probs(pout_12, pout_21)
    m1 = scenario.cellular_mean_snr(1, allocation.p1_cellular)
    m2 = scenario.cellular_mean_snr(2, allocation.p2_cellular)
    thr = scenario.cellular_threshold(user, scheme)
    own = m1 if user == 1 else m2
    if m1 > 0 and m2 > 0:
        cond1 = outage_sum_two_exponentials(m1, m2, thr)
    else:
        cond1 = outage_single_link(max(m1, m2), thr)
    cond2 = outage_single_link(own, thr)
    return OutageBreakdown(p1, p2, cond1, cond2, p1 * cond1 + p2 * cond2)


def outage_no_cooperation(user: int, scenario: Scenario, allocation) -> float:
    power = allocation.p1_cellular if user == 1 else allocation.p2_cellular
    if power is None:
        raise ValueError(f"allocation lacks the cellular power of user {user}")
    return outage_single_link(
        scenario.cellular_mean_snr(user, power),
        scenario.cellular_threshold(user, Scheme.NO_COOP),
    )


def scheme_outages(scenario: Scenario, scheme: Scheme, allocation) -> tuple[float, float]:
    """Closed-form outage of (user 1, user 2) under ``scheme``."""
    scheme = Scheme(scheme)
    if scheme is Scheme.NO_COOP:
        return outage_no_cooperation(1, scenario, allocation), outage_no_cooperation(2, scenario, allocation)
    return (
        outage_internetwork_user(1, scenario, allocation, scheme).total,
        outage_internetwork_user(2, scenario, allocation, scheme).total,
    )


# -- high-SNR approximations -------------------------------------------------


def highsnr_domain_ok(z1: float, z2: float, delta: float, beta: float = 1.0) -> bool:
    """True when 0 < 1/z1 + 1/z2 < sqrt(2 delta) * beta."""
    s = 1.0 / z1 + 1.0 / z2
    return 0.0 < s < math.sqrt(2.0 * delta) * beta


def outage_theta1_highsnr_approx(
    z1: float,
    z2: float,
    beta: float = 1.0,
    user: int = 1,
    delta: float | None = None,
) -> float:
    """Joint-transmission outage at high normalised SNR.

    ``1 / (2 z1 z2)`` for user 1 and ``1 / (2 beta^2 z1 z2)`` for user 2.
    If ``delta`` is given, a :class:`HighSnrDomainWarning` is raised when the
    point lies outside the accuracy domain; the value is returned regardless.
    """
    if not (z1 > 0 and z2 > 0):
        raise ValueError("z1 and z2 must be > 0")
    if not beta > 0:
        raise ValueError("beta must be > 0")
    scale = 1.0 if user == 1 else beta
    if delta is not None and not highsnr_domain_ok(z1, z2, delta, scale):
        warnings.warn(
            f"1/z1 + 1/z2 = {1 / z1 + 1 / z2:.4g} outside the high-SNR domain "
            f"(bound {math.sqrt(2 * delta) * scale:.4g})",
            HighSnrDomainWarning,
            stacklevel=2,
        )
    return 1.0 / (2.0 * scale * scale * z1 * z2)


def outage_theta1_exact_midform(z1: float, z2: float) -> float:
    """Linearised-exponential integral (3 - 1/z1 - 1/z2) / (6 z1 z2)."""
    return (3.0 - 1.0 / z1 - 1.0 / z2) / (6.0 * z1 * z2)


def outage_theta2_highsnr_approx(z: float) -> float:
    """Separate-transmission outage at high normalised SNR, ``1 / z``."""
    if not z > 0:
        raise ValueError("z must be > 0")
    return 1.0 / z
