"""Outage-target power inversion, battery energy and per-scheme totals."""

from __future__ import annotations

import math
from dataclasses import dataclass, fields

from greenlink.lambertw import lambert_w, lambert_w_plus_one
from greenlink.outage import decoding_state_probs
from greenlink.scenario import Scenario, Scheme


class ContractError(ValueError):
    """An input bundle is missing something the requested scheme needs."""


@dataclass(frozen=True)
class BatteryModel:
    """Nonlinear battery discharge model.

    epsilon: power-amplifier loss factor; xi: squared-pulse integral (1/s);
    omega: battery efficiency factor; voltage: V; eta: DC-DC efficiency;
    p_circuit: circuit power (W); t_pulse: pulse duration (s).
    """

    epsilon: float
    xi: float
    omega: float
    voltage: float
    eta: float
    p_circuit: float
    t_pulse: float
    label: str = "custom"

    def __post_init__(self):
        if not 0.0 < self.eta <= 1.0:
            raise ValueError(f"eta must lie in (0, 1], got {self.eta!r}")
        if not self.t_pulse > 0:
            raise ValueError("t_pulse must be > 0")
        if not self.voltage > 0:
            raise ValueError("voltage must be > 0")
        for name in ("epsilon", "xi", "omega", "p_circuit"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be >= 0")

    @property
    def quadratic_coeff(self) -> float:
        return (1.0 + self.epsilon) ** 2 * self.xi * self.omega / (self.voltage * self.eta**2)

    @property
    def linear_coeff(self) -> float:
        return (1.0 + self.epsilon) / self.eta

    @property
    def circuit_energy(self) -> float:
        return self.p_circuit * self.t_pulse / self.eta

    def describe(self) -> str:
        return (
            f"{self.label}: epsilon={self.epsilon:g} xi={self.xi:g} omega={self.omega:g} "
            f"V={self.voltage:g} eta={self.eta:g} P_c={self.p_circuit:g} T_p={self.t_pulse:g}"
        )


def placeholder_battery() -> BatteryModel:
    t_p = 1e-7
    return BatteryModel(
        epsilon=0.33,
        xi=2.0 / (3.0 * t_p),
        omega=1e-5,
        voltage=3.7,
        eta=0.9,
        p_circuit=0.1,
        t_pulse=t_p,
        label="placeholder",
    )


def linear_battery() -> BatteryModel:
    b = placeholder_battery()
    return BatteryModel(b.epsilon, b.xi, 0.0, b.voltage, b.eta, b.p_circuit, b.t_pulse, label="linear")


BATTERY_PROFILES = {
    "placeholder": placeholder_battery,
    "linear": linear_battery,
}


def battery_profile(name: str) -> BatteryModel:
    try:
        return BATTERY_PROFILES[name]()
    except KeyError:
        known = ", ".join(sorted(BATTERY_PROFILES))
        raise ValueError(f"unknown battery profile {name!r} (known: {known})") from None


def battery_energy(power: float, battery: BatteryModel) -> float:
    """Battery energy (J) drawn by one pulse transmitted at ``power`` W."""
    if power < 0:
        raise ValueError("power must be >= 0")
    pt = power * battery.t_pulse
    return battery.quadratic_coeff * pt * pt + battery.linear_coeff * pt + battery.circuit_energy


@dataclass(frozen=True)
class PowerAllocation:
    """Transmit powers (W).  ``*_shortrange`` hold the exchange-phase powers,
    which for intra-network cooperation are spent on the cellular band."""

    p1_shortrange: float | None = None
    p2_shortrange: float | None = None
    p1_cellular: float | None = None
    p2_cellular: float | None = None

    def __post_init__(self):
        for f in fields(self):
            value = getattr(self, f.name)
            if value is not None and not value >= 0:
                raise ValueError(f"{f.name} must be >= 0, got {value!r}")


@dataclass(frozen=True)
class EnergyReport:
    scheme: Scheme
    allocation: PowerAllocation
    e1_shortrange: float
    e2_shortrange: float
    e1_cellular: float
    e2_cellular: float
    cellular_multiplier: float
    total: float

    CSV_FIELDS = (
        "scheme",
        "p1_shortrange_w",
        "p2_shortrange_w",
        "p1_cellular_w",
        "p2_cellular_w",
        "e1_shortrange_j",
        "e2_shortrange_j",
        "e1_cellular_j",
        "e2_cellular_j",
        "cellular_multiplier",
        "total_j",
    )

    def csv_row(self) -> dict:
        a = self.allocation
        return {
            "scheme": str(self.scheme),
            "p1_shortrange_w": a.p1_shortrange,
            "p2_shortrange_w": a.p2_shortrange,
            "p1_cellular_w": a.p1_cellular,
            "p2_cellular_w": a.p2_cellular,
            "e1_shortrange_j": self.e1_shortrange,
            "e2_shortrange_j": self.e2_shortrange,
            "e1_cellular_j": self.e1_cellular,
            "e2_cellular_j": self.e2_cellular,
            "cellular_multiplier": self.cellular_multiplier,
            "total_j": self.total,
        }


# -- power inversion ----------------------------------------------------------


def solve_power_single_link(target_pout: float, threshold_coeff: float) -> float:
    """Power that puts a Rayleigh link with coefficient ``threshold_coeff`` at ``target_pout``.

    Inverts ``pout = 1 - exp(-coeff / P)``.
    """
    if not 0.0 < target_pout < 1.0:
        raise ValueError(f"target_pout must lie in (0, 1), got {target_pout!r}")
    if threshold_coeff < 0:
        raise ValueError("threshold_coeff must be >= 0")
    return -threshold_coeff / math.log1p(-target_pout)


def _lower_branch_from_log(log_neg_x):
    # W_{-1}(x) for x = -exp(log_neg_x) too small to represent: Newton on
    # w + log(-w) = log_neg_x, started from the asymptotic w ~ L - log(-L).
    w = log_neg_x - math.log(-log_neg_x)
    for _ in range(50):
        step = (w + math.log(-w) - log_neg_x) / (1.0 + 1.0 / w)
        w -= step
        if abs(step) <= 1e-16 * abs(w):
            break
    return w


def joint_outage_root(target_pout: float) -> float:
    """Normalised threshold a = coeff / P solving (1 + (1-p)^2 a) exp(-a) = 1 - p.

    This is the uniform-QoS cooperative outage equation once the two
    cellular powers are balanced.  With q = (1-p)^2 and
    x = -1/q - a, it becomes x exp(x) = exp(-1/q) / (p - 1), whose
    solution with a > 0 lies on the W_{-1} branch.
    """
    p = target_pout
    if not 0.0 < p < 1.0:
        raise ValueError(f"target_pout must lie in (0, 1), got {p!r}")
    one_minus = 1.0 - p
    inv_q_minus_1 = p * (2.0 - p) / (one_minus * one_minus)  # 1/q - 1
    # x = exp(-1/q) / (p - 1) = -exp(t - 1); r = 1 + e x = 1 - exp(t)
    t = -inv_q_minus_1 - math.log1p(-p)
    r = -math.expm1(t)
    log_neg_x = t - 1.0
    if r < 0.5:
        # near the branch point the offset carries the precision
        w_plus_one = lambert_w_plus_one(-1, r)
    elif log_neg_x > -700.0:
        w_plus_one = 1.0 + lambert_w(-1, -math.exp(log_neg_x))
    else:
        w_plus_one = 1.0 + _lower_branch_from_log(log_neg_x)
    a = -w_plus_one - inv_q_minus_1
    assert a > 0.0, "non-positive normalised threshold"
    # One Newton step on log(1 + q a) - a = log(1 - p) removes the error
    # amplified by W's steepness near the branch point.  For small a the
    # terms cancel to O(a^2) and the step would hurt, but there the series
    # value is already exact.
    q = one_minus * one_minus
    g = math.log1p(q * a) - a - math.log1p(-p)
    dg = q / (1.0 + q * a) - 1.0
    if a > 0.01 and dg != 0.0 and math.isfinite(g):
        polished = a - g / dg
        if polished > 0.0:
            a = polished
    return a


def solve_power_internetwork_cellular(
    target_pout: float,
    scenario: Scenario,
    scheme: Scheme = Scheme.INTER,
) -> tuple[float, float]:
    """Cellular powers (P1, P2) meeting a common outage target under cooperation.

    Assumes the exchange powers were solved for the same target, so that
    both exchanges succeed with probability (1 - target)^2.  The powers are
    balanced so that both users' uplinks have the same normalised mean.
    """
    a = joint_outage_root(target_pout)
    c1 = scenario.cellular_coefficient(1, scheme)
    c2 = scenario.cellular_coefficient(2, scheme)
    return c1 / a, c2 / a


def _require_uniform(scenario):
    if not scenario.qos.is_uniform:
        raise ContractError("cooperative power solving needs uniform outage and rate targets")


def solve_powers(scenario: Scenario, scheme: Scheme) -> PowerAllocation:
    """Powers meeting the scenario's outage targets under ``scheme``."""
    scheme = Scheme(scheme)
    qos = scenario.qos
    if scheme is Scheme.NO_COOP:
        return PowerAllocation(
            p1_cellular=solve_power_single_link(qos.pout1, scenario.cellular_coefficient(1, scheme)),
            p2_cellular=solve_power_single_link(qos.pout2, scenario.cellular_coefficient(2, scheme)),
        )
    _require_uniform(scenario)
    p1c, p2c = solve_power_internetwork_cellular(qos.pout1, scenario, scheme)
    return PowerAllocation(
        p1_shortrange=solve_power_single_link(qos.pout12, scenario.exchange_coefficient(12, scheme)),
        p2_shortrange=solve_power_single_link(qos.pout21, scenario.exchange_coefficient(21, scheme)),
        p1_cellular=p1c,
        p2_cellular=p2c,
    )


def solve_powers_intra_network(scenario: Scenario) -> PowerAllocation:
    """Intra-network cooperation: exchange on the cellular band, both phases at twice the rate."""
    return solve_powers(scenario, Scheme.INTRA)


def exchange_powers(scenario: Scenario, scheme: Scheme = Scheme.INTER) -> tuple[float, float]:
    """Exchange powers for per-direction targets pout12 / pout21 (uniform or not)."""
    qos = scenario.qos
    return (
        solve_power_single_link(qos.pout12, scenario.exchange_coefficient(12, scheme)),
        solve_power_single_link(qos.pout21, scenario.exchange_coefficient(21, scheme)),
    )


# -- energy -------------------------------------------------------------------


def scheme_total_energy(
    scheme: Scheme,
    allocation: PowerAllocation,
    battery: BatteryModel,
    decoding_probs: tuple[float, float] | None = None,
) -> EnergyReport:
    """Per-phase and total battery energy of ``scheme`` at ``allocation``.

    Cooperation runs the exchange once and the cellular phase once more
    when both exchanges succeed, so the cellular energies are weighted by
    1 + Pr(theta = 1).
    """
    scheme = Scheme(scheme)
    if allocation.p1_cellular is None or allocation.p2_cellular is None:
        raise ContractError(f"{scheme}: allocation lacks cellular powers")
    e1c = battery_energy(allocation.p1_cellular, battery)
    e2c = battery_energy(allocation.p2_cellular, battery)
    if scheme is Scheme.NO_COOP:
        return EnergyReport(scheme, allocation, 0.0, 0.0, e1c, e2c, 1.0, e1c + e2c)
    if allocation.p1_shortrange is None or allocation.p2_shortrange is None:
        raise ContractError(f"{scheme}: allocation lacks exchange powers")
    if decoding_probs is None:
        raise ContractError(f"{scheme}: decoding-state probabilities are required")
    p_theta1 = decoding_probs[0]
    e1s = battery_energy(allocation.p1_shortrange, battery)
    e2s = battery_energy(allocation.p2_shortrange, battery)
    multiplier = 1.0 + p_theta1
    total = e1s + e2s + multiplier * (e1c + e2c)
    return EnergyReport(scheme, allocation, e1s, e2s, e1c, e2c, multiplier, total)


def uniform_decoding_probs(target_pout: float) -> tuple[float, float]:
    return decoding_state_probs(target_pout, target_pout)


def scheme_energy(scenario: Scenario, scheme: Scheme, battery: BatteryModel) -> EnergyReport:
    """Solve powers for the scenario's targets and report the scheme's energy."""
    scheme = Scheme(scheme)
    allocation = solve_powers(scenario, scheme)
    probs = None
    if scheme is not Scheme.NO_COOP:
        probs = decoding_state_probs(scenario.qos.pout12, scenario.qos.pout21)
    return scheme_total_energy(scheme, allocation, battery, probs)
