"""Radio interfaces, link budget and per-link SNR helpers.

Everything here is stored in linear units (W, W/Hz, linear gains, linear
capacity gaps).  dB conversions live in :mod:`greenlink.config` and the CLI.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

SPEED_OF_LIGHT = 2.99792458e8  # m/s


def db_to_linear(value_db: float) -> float:
    return 10.0 ** (value_db / 10.0)


def linear_to_db(value: float) -> float:
    return 10.0 * math.log10(value)


def dbm_to_watt(value_dbm: float) -> float:
    return 10.0 ** (value_dbm / 10.0) / 1000.0


def watt_to_dbm(value_w: float) -> float:
    return 10.0 * math.log10(value_w * 1000.0)


@dataclass(frozen=True)
class RadioInterface:
    """One network access interface (short-range or cellular)."""

    name: str
    carrier_frequency: float
    bandwidth: float
    capacity_gap: float
    overhead_bits: int

    def __post_init__(self):
        if not self.carrier_frequency > 0:
            raise ValueError(f"{self.name}: carrier_frequency must be > 0")
        if not self.bandwidth > 0:
            raise ValueError(f"{self.name}: bandwidth must be > 0")
        if not self.capacity_gap >= 1.0:
            raise ValueError(
                f"{self.name}: capacity_gap must be >= 1 (got {self.capacity_gap!r})"
            )
        if self.overhead_bits < 0:
            raise ValueError(f"{self.name}: overhead_bits must be >= 0")

    @property
    def wavelength(self) -> float:
        return SPEED_OF_LIGHT / self.carrier_frequency


@dataclass(frozen=True)
class PacketSpec:
    effective_bits: int

    def __post_init__(self):
        if not self.effective_bits > 0:
            raise ValueError("effective_bits must be > 0")


@dataclass(frozen=True)
class Topology:
    """Link distances (m), mean fading powers and linear antenna gains."""

    d_1b: float
    d_2b: float
    d_12: float
    d_21: float
    sigma2_1b: float = 1.0
    sigma2_2b: float = 1.0
    sigma2_12: float = 1.0
    sigma2_21: float = 1.0
    g_u1: float = 1.0
    g_u2: float = 1.0
    g_bs: float = 1.0

    def __post_init__(self):
        for name in ("d_1b", "d_2b", "d_12", "d_21"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name}: distance must be > 0")
        for name in ("sigma2_1b", "sigma2_2b", "sigma2_12", "sigma2_21"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name}: fading variance must be > 0")
        for name in ("g_u1", "g_u2", "g_bs"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name}: antenna gain must be > 0")


@dataclass(frozen=True)
class NoiseModel:
    n0: float  # W/Hz

    def __post_init__(self):
        if not self.n0 > 0:
            raise ValueError("n0 must be > 0")

    def power(self, bandwidth: float) -> float:
        return self.n0 * bandwidth


def effective_data_ratio(packet: PacketSpec, iface: RadioInterface) -> float:
    """Payload share of a packet, N / (N + overhead)."""
    n = packet.effective_bits
    return n / (n + iface.overhead_bits)


def phy_rate(effective_rate: float, kappa: float) -> float:
    """Rate the physical layer must carry to deliver ``effective_rate``."""
    if not 0.0 < kappa <= 1.0:
        raise ValueError(f"kappa must lie in (0, 1], got {kappa!r}")
    if effective_rate < 0:
        raise ValueError("effective_rate must be >= 0")
    return effective_rate / kappa


def free_space_gain(iface: RadioInterface, distance: float, g_tx: float, g_rx: float) -> float:
    """Far-field power gain (lambda / (4 pi d))^2 * G_tx * G_rx."""
    if not distance > 0:
        raise ValueError(f"distance must be > 0, got {distance!r}")
    ratio = iface.wavelength / (4.0 * math.pi * distance)
    return ratio * ratio * g_tx * g_rx


def mean_snr(
    power: float,
    iface: RadioInterface,
    distance: float,
    g_tx: float,
    g_rx: float,
    sigma2: float,
    noise: NoiseModel,
) -> float:
    """Received SNR with |h|^2 replaced by its mean ``sigma2``.

    The instantaneous SNR is ``mean_snr * |h|^2 / sigma2``.
    """
    gain = free_space_gain(iface, distance, g_tx, g_rx)
    return power * gain * sigma2 / noise.power(iface.bandwidth)


def snr_threshold(effective_rate: float, iface: RadioInterface, kappa: float) -> float:
    """Linear SNR a link needs so that B log2(1 + SNR / gap) reaches the PHY rate.

    Equals ``(2**(R / (B kappa)) - 1) * gap``; zero iff the rate is zero.
    """
    spectral = phy_rate(effective_rate, kappa) / iface.bandwidth
    return math.expm1(spectral * math.log(2.0)) * iface.capacity_gap


def link_coefficient(
    iface: RadioInterface,
    distance: float,
    g_tx: float,
    g_rx: float,
    sigma2: float,
    noise: NoiseModel,
    threshold: float,
) -> float:
    """Transmit power (W) at which the mean SNR equals ``threshold``.

    With Rayleigh fading a link driven at power P is in outage with
    probability ``1 - exp(-coefficient / P)``.  The coefficient is
    ``16 pi^2 gap N0 B d^2 (2^(R/(B kappa)) - 1) / (sigma2 G_tx G_rx lambda^2)``.
    """
    per_watt = mean_snr(1.0, iface, distance, g_tx, g_rx, sigma2, noise)
    return threshold / per_watt
