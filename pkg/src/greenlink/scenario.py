"""Scenario bundle and per-scheme link semantics.

A :class:`Scenario` holds everything the closed-form and Monte Carlo paths
need except the battery model.  The three transmission schemes differ only
in which interface carries the packet exchange and in the effective rate
multiplier:

========  ===================  ===========
scheme    exchange interface   rate factor
========  ===================  ===========
no_coop   (none)               1
inter     short-range          1
intra     cellular             2
========  ===================  ===========
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass
from enum import Enum

from greenlink.radio import (
    NoiseModel,
    PacketSpec,
    RadioInterface,
    Topology,
    effective_data_ratio,
    link_coefficient,
    mean_snr,
    snr_threshold,
)


class Scheme(str, Enum):
    NO_COOP = "no_coop"
    INTRA = "intra"
    INTER = "inter"

    def __str__(self):
        return self.value


ALL_SCHEMES = (Scheme.NO_COOP, Scheme.INTRA, Scheme.INTER)


@dataclass(frozen=True)
class QosSpec:
    """Per-user outage targets and effective rates (bit/s).

    ``pout12`` / ``pout21`` are the exchange-link targets (U1->U2, U2->U1).
    """

    pout1: float
    pout2: float
    pout12: float
    pout21: float
    rate1: float
    rate2: float

    def __post_init__(self):
        for name in ("pout1", "pout2", "pout12", "pout21"):
            value = getattr(self, name)
            if not 0.0 < value < 1.0:
                raise ValueError(f"{name}: outage target must lie in (0, 1), got {value!r}")
        for name in ("rate1", "rate2"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name}: rate must be >= 0")

    @classmethod
    def uniform(cls, pout: float, rate: float) -> "QosSpec":
        return cls(pout, pout, pout, pout, rate, rate)

    @property
    def is_uniform(self) -> bool:
        return (
            self.pout1 == self.pout2 == self.pout12 == self.pout21
            and self.rate1 == self.rate2
        )

    def rate(self, user: int) -> float:
        return self.rate1 if user == 1 else self.rate2

    def pout(self, user: int) -> float:
        return self.pout1 if user == 1 else self.pout2


def _check_user(user):
    if user not in (1, 2):
        raise ValueError(f"user must be 1 or 2, got {user!r}")


@dataclass(frozen=True)
class Scenario:
    short_range: RadioInterface
    cellular: RadioInterface
    topology: Topology
    noise: NoiseModel
    packet: PacketSpec
    qos: QosSpec

    def replace(self, **changes) -> "Scenario":
        return dataclasses.replace(self, **changes)

    def with_topology(self, **changes) -> "Scenario":
        return dataclasses.replace(self, topology=dataclasses.replace(self.topology, **changes))

    def with_qos(self, **changes) -> "Scenario":
        return dataclasses.replace(self, qos=dataclasses.replace(self.qos, **changes))

    def with_packet(self, effective_bits: int) -> "Scenario":
        return dataclasses.replace(self, packet=PacketSpec(effective_bits))

    # -- scheme semantics ---------------------------------------------------

    @staticmethod
    def rate_factor(scheme: Scheme) -> float:
        return 2.0 if Scheme(scheme) is Scheme.INTRA else 1.0

    def exchange_interface(self, scheme: Scheme) -> RadioInterface:
        scheme = Scheme(scheme)
        if scheme is Scheme.NO_COOP:
            raise ValueError("no_coop has no exchange phase")
        return self.cellular if scheme is Scheme.INTRA else self.short_range

    def kappa(self, iface: RadioInterface) -> float:
        return effective_data_ratio(self.packet, iface)

    # -- cellular uplink links (Ui -> BS) ------------------------------------

    def _uplink(self, user):
        _check_user(user)
        t = self.topology
        if user == 1:
            return t.d_1b, t.g_u1, t.sigma2_1b
        return t.d_2b, t.g_u2, t.sigma2_2b

    def cellular_threshold(self, user: int, scheme: Scheme = Scheme.INTER, rate: float | None = None) -> float:
        """Linear SNR threshold of user ``user`` on the cellular uplink.

        ``rate`` overrides the user's own effective rate (used by the
        non-uniform problem, whose normalisation is tied to user 1's rate).
        """
        _check_user(user)
        rate = self.qos.rate(user) if rate is None else rate
        iface = self.cellular
        return snr_threshold(rate * self.rate_factor(scheme), iface, self.kappa(iface))

    def cellular_mean_snr(self, user: int, power: float) -> float:
        d, g, s2 = self._uplink(user)
        return mean_snr(power, self.cellular, d, g, self.topology.g_bs, s2, self.noise)

    def cellular_coefficient(self, user: int, scheme: Scheme = Scheme.INTER, rate: float | None = None) -> float:
        d, g, s2 = self._uplink(user)
        thr = self.cellular_threshold(user, scheme, rate)
        return link_coefficient(self.cellular, d, g, self.topology.g_bs, s2, self.noise, thr)

    # -- exchange links (U1 -> U2 is direction 12) ---------------------------

    def _exchange(self, direction):
        t = self.topology
        if direction == 12:
            return t.d_12, t.sigma2_12, 1
        if direction == 21:
            return t.d_21, t.sigma2_21, 2
        raise ValueError(f"direction must be 12 or 21, got {direction!r}")

    def exchange_threshold(self, direction: int, scheme: Scheme = Scheme.INTER) -> float:
        _, _, sender = self._exchange(direction)
        iface = self.exchange_interface(scheme)
        rate = self.qos.rate(sender) * self.rate_factor(scheme)
        return snr_threshold(rate, iface, self.kappa(iface))

    def exchange_mean_snr(self, direction: int, power: float, scheme: Scheme = Scheme.INTER) -> float:
        d, s2, _ = self._exchange(direction)
        t = self.topology
        return mean_snr(power, self.exchange_interface(scheme), d, t.g_u1, t.g_u2, s2, self.noise)

    def exchange_coefficient(self, direction: int, scheme: Scheme = Scheme.INTER) -> float:
        d, s2, _ = self._exchange(direction)
        t = self.topology
        thr = self.exchange_threshold(direction, scheme)
        return link_coefficient(self.exchange_interface(scheme), d, t.g_u1, t.g_u2, s2, self.noise, thr)
