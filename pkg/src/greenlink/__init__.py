"""Outage, power and battery-energy analysis of cooperative two-user cellular uplinks."""

__version__ = "0.1.0"

from greenlink.config import ExperimentConfig, load_config
from greenlink.lambertw import lambert_w
from greenlink.outage import (
    OutageBreakdown,
    decoding_state_probs,
    outage_internetwork_user,
    outage_single_link,
    outage_sum_two_exponentials,
    outage_theta1_highsnr_approx,
    outage_theta2_highsnr_approx,
)
from greenlink.power import (
    BatteryModel,
    EnergyReport,
    PowerAllocation,
    battery_energy,
    scheme_energy,
    scheme_total_energy,
    solve_power_internetwork_cellular,
    solve_power_single_link,
    solve_powers,
    solve_powers_intra_network,
)
from greenlink.radio import (
    NoiseModel,
    PacketSpec,
    RadioInterface,
    Topology,
    effective_data_ratio,
    free_space_gain,
    mean_snr,
    phy_rate,
)
from greenlink.scenario import QosSpec, Scenario, Scheme

__all__ = [
    "BatteryModel",
    "EnergyReport",
    "ExperimentConfig",
    "NoiseModel",
    "OutageBreakdown",
    "PacketSpec",
    "PowerAllocation",
    "QosSpec",
    "RadioInterface",
    "Scenario",
    "Scheme",
    "Topology",
    "battery_energy",
    "decoding_state_probs",
    "effective_data_ratio",
    "free_space_gain",
    "lambert_w",
    "load_config",
    "mean_snr",
    "outage_internetwork_user",
    "outage_single_link",
    "outage_sum_two_exponentials",
    "outage_theta1_highsnr_approx",
    "outage_theta2_highsnr_approx",
    "phy_rate",
    "scheme_energy",
    "scheme_total_energy",
    "solve_power_internetwork_cellular",
    "solve_power_single_link",
    "solve_powers",
    "solve_powers_intra_network",
]
