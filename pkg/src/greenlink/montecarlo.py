"""Monte Carlo outage estimation by replaying each scheme's decision logic.

Randomness is counter based: trial block ``b`` of a run with seed ``s`` is
drawn from a Philox generator keyed by ``(s, b)``.  Each trial consumes four
64-bit words (|h_12|^2, |h_21|^2, |h_1b|^2, |h_2b|^2 in that order), so a
block's draws depend only on (seed, block index) and outcome counts are
integer sums.  Any split of the blocks across workers therefore gives
bit-identical estimates.
"""

from __future__ import annotations

import math
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from greenlink.scenario import Scenario, Scheme

BLOCK_SIZE = 1 << 20
DRAWS_PER_TRIAL = 4
_TWO_POW_M53 = 2.0**-53
_SEED_LIMIT = 1 << 64


class OutageResolutionWarning(UserWarning):
    """No outage observed: the target lies below the run's resolution."""


@dataclass(frozen=True)
class SimConfig:
    trials: int
    seed: int
    scheme: Scheme
    scenario: Scenario
    block_size: int = BLOCK_SIZE

    def __post_init__(self):
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        if not 0 <= self.seed < _SEED_LIMIT:
            raise ValueError("seed must be a 64-bit unsigned integer")
        if self.block_size < 1:
            raise ValueError("block_size must be >= 1")
        object.__setattr__(self, "scheme", Scheme(self.scheme))


@dataclass(frozen=True)
class OutageEstimate:
    p_hat: float
    stderr: float
    trials: int
    theta1_frequency: float

    @classmethod
    def from_counts(cls, outages: int, trials: int, theta1: int) -> "OutageEstimate":
        p = outages / trials
        return cls(p, math.sqrt(p * (1.0 - p) / trials), trials, theta1 / trials)


@dataclass(frozen=True)
class MonteCarloResult:
    scheme: Scheme
    seed: int
    user1: OutageEstimate
    user2: OutageEstimate
    theta1_frequency: float
    mean_cellular_transmissions: float

    CSV_FIELDS = ("scheme", "user", "p_hat", "stderr", "trials", "seed", "theta1_frequency")

    def csv_rows(self) -> list[dict]:
        rows = []
        for user, est in ((1, self.user1), (2, self.user2)):
            rows.append(
                {
                    "scheme": str(self.scheme),
                    "user": user,
                    "p_hat": est.p_hat,
                    "stderr": est.stderr,
                    "trials": est.trials,
                    "seed": self.seed,
                    "theta1_frequency": est.theta1_frequency,
                }
            )
        return rows


def counter_generator(seed: int, block: int = 0) -> np.random.Generator:
    """Generator for block ``block`` of stream ``seed`` (Philox keyed by both)."""
    if not 0 <= seed < _SEED_LIMIT:
        raise ValueError("seed must be a 64-bit unsigned integer")
    if block < 0:
        raise ValueError("block must be >= 0")
    return np.random.Generator(np.random.Philox(key=seed + (block << 64)))


def _unit_exponentials(raw: np.ndarray) -> np.ndarray:
    # 53-bit uniforms strictly inside (0, 1), then the inverse exponential CDF
    u = ((raw >> np.uint64(11)).astype(np.float64) + 0.5) * _TWO_POW_M53
    return -np.log1p(-u)


def sample_fading(variance: float, rng: np.random.Generator, size=None):
    """|h|^2 draws: exponential with mean ``variance`` by inverse-CDF transform."""
    if not variance > 0:
        raise ValueError("variance must be > 0")
    n = 1 if size is None else int(np.prod(size))
    raw = rng.bit_generator.random_raw(n)
    out = variance * _unit_exponentials(np.asarray(raw, dtype=np.uint64))
    if size is None:
        return float(out[0])
    return out.reshape(size)


def draw_block(seed: int, block: int, n: int, topology) -> tuple[np.ndarray, ...]:
    """Fading powers (h12, h21, h1b, h2b) for the first ``n`` trials of a block."""
    raw = counter_generator(seed, block).bit_generator.random_raw(DRAWS_PER_TRIAL * n)
    e = _unit_exponentials(np.asarray(raw, dtype=np.uint64)).reshape(n, DRAWS_PER_TRIAL)
    t = topology
    return (
        e[:, 0] * t.sigma2_12,
        e[:, 1] * t.sigma2_21,
        e[:, 2] * t.sigma2_1b,
        e[:, 3] * t.sigma2_2b,
    )


@dataclass(frozen=True)
class _LinkMeans:
    """Per-unit-fading SNRs (mean SNR divided by sigma^2) and thresholds."""

    m12: float
    m21: float
    m1b: float
    m2b: float
    thr12: float
    thr21: float
    thr1: float
    thr2: float


def _snr_per_fade(mean, sigma2):
    return mean / sigma2 if math.isfinite(mean) else math.inf


def _link_means(scenario: Scenario, scheme: Scheme, allocation) -> _LinkMeans:
    t = scenario.topology
    if allocation.p1_cellular is None or allocation.p2_cellular is None:
        raise ValueError("allocation lacks cellular powers")
    m1b = _snr_per_fade(scenario.cellular_mean_snr(1, allocation.p1_cellular), t.sigma2_1b)
    m2b = _snr_per_fade(scenario.cellular_mean_snr(2, allocation.p2_cellular), t.sigma2_2b)
    thr1 = scenario.cellular_threshold(1, scheme)
    thr2 = scenario.cellular_threshold(2, scheme)
    if scheme is Scheme.NO_COOP:
        return _LinkMeans(0.0, 0.0, m1b, m2b, 0.0, 0.0, thr1, thr2)
    if allocation.p1_shortrange is None or allocation.p2_shortrange is None:
        raise ValueError("allocation lacks exchange powers")
    m12 = _snr_per_fade(scenario.exchange_mean_snr(12, allocation.p1_shortrange, scheme), t.sigma2_12)
    m21 = _snr_per_fade(scenario.exchange_mean_snr(21, allocation.p2_shortrange, scheme), t.sigma2_21)
    return _LinkMeans(
        m12, m21, m1b, m2b,
        scenario.exchange_threshold(12, scheme),
        scenario.exchange_threshold(21, scheme),
        thr1, thr2,
    )


def trial_no_cooperation(means: _LinkMeans, h1b, h2b):
    """Outage flags when each user transmits alone."""
    return means.m1b * h1b < means.thr1, means.m2b * h2b < means.thr2


def trial_inter_network(means: _LinkMeans, h12, h21, h1b, h2b):
    """Outage flags and theta = 1 indicator for a two-phase cooperation round.

    theta = 1 when both exchange SNRs reach their thresholds; both users
    then see the Alamouti-combined SNR.  Otherwise each user is on its own.
    The same logic serves intra-network cooperation, whose means and
    thresholds are built on the cellular band at twice the rate.
    """
    theta1 = (means.m12 * h12 >= means.thr12) & (means.m21 * h21 >= means.thr21)
    s1 = means.m1b * h1b
    s2 = means.m2b * h2b
    combined = s1 + s2
    out1 = np.where(theta1, combined < means.thr1, s1 < means.thr1)
    out2 = np.where(theta1, combined < means.thr2, s2 < means.thr2)
    return out1, out2, theta1


def _run_block(scheme, means, seed, topology, block, n):
    h12, h21, h1b, h2b = draw_block(seed, block, n, topology)
    if scheme is Scheme.NO_COOP:
        o1, o2 = trial_no_cooperation(means, h1b, h2b)
        return int(o1.sum()), int(o2.sum()), 0
    o1, o2, th = trial_inter_network(means, h12, h21, h1b, h2b)
    return int(o1.sum()), int(o2.sum()), int(th.sum())


def estimate_outage(config: SimConfig, allocation, workers: int = 1) -> MonteCarloResult:
    """Per-user outage estimates for ``config.scheme`` at ``allocation``."""
    scheme = config.scheme
    means = _link_means(config.scenario, scheme, allocation)
    topo = config.scenario.topology
    bs = config.block_size
    jobs = []
    remaining, block = config.trials, 0
    while remaining > 0:
        n = min(bs, remaining)
        jobs.append((block, n))
        remaining -= n
        block += 1

    def run(job):
        return _run_block(scheme, means, config.seed, topo, *job)

    if workers > 1 and len(jobs) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            counts = list(pool.map(run, jobs))
    else:
        counts = [run(j) for j in jobs]
    out1 = sum(c[0] for c in counts)
    out2 = sum(c[1] for c in counts)
    theta = sum(c[2] for c in counts)
    n = config.trials
    if out1 == 0 or out2 == 0:
        warnings.warn(
            f"{scheme}: no outage in {n} trials; estimate is below the run's resolution",
            OutageResolutionWarning,
            stacklevel=2,
        )
    est1 = OutageEstimate.from_counts(out1, n, theta)
    est2 = OutageEstimate.from_counts(out2, n, theta)
    # the cellular phase runs once, and again with Alamouti when theta = 1
    cellular = (n + theta) / n if scheme is not Scheme.NO_COOP else 1.0
    return MonteCarloResult(scheme, config.seed, est1, est2, theta / n, cellular)
