import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from greenlink.radio import (
    SPEED_OF_LIGHT,
    NoiseModel,
    PacketSpec,
    RadioInterface,
    Topology,
    db_to_linear,
    dbm_to_watt,
    effective_data_ratio,
    free_space_gain,
    linear_to_db,
    mean_snr,
    phy_rate,
    snr_threshold,
    watt_to_dbm,
)

SHORT = RadioInterface("short_range", 2.4e9, 2e6, db_to_linear(4), 126)
CELL = RadioInterface("cellular", 2.1e9, 5e6, db_to_linear(2), 376)
N0 = NoiseModel(dbm_to_watt(-174))

# Reference values computed independently in 30-digit arithmetic (mpmath),
# the mean SNR through a dB-domain link budget rather than the linear chain.
FSG_2100MHZ_1KM = 1.29057452542935384812e-10
MEAN_SNR_1W_1KM = 20502.7956912885197949  # 30 dBm + 5 dBi - FSPL - (N0 + 10 log10 B)


def iface(overhead=0, gap=1.0, f=2.1e9, b=5e6):
    return RadioInterface("x", f, b, gap, overhead)


def test_effective_data_ratio_examples():
    assert effective_data_ratio(PacketSpec(2000), SHORT) == pytest.approx(0.940734, abs=1e-6)
    assert effective_data_ratio(PacketSpec(1000), CELL) == pytest.approx(0.726744, abs=1e-6)
    assert effective_data_ratio(PacketSpec(777), iface(overhead=0)) == 1.0


def test_phy_rate_examples():
    assert phy_rate(10e6, 1.0) == 10e6
    assert phy_rate(10e6, 2000 / 2126) == pytest.approx(10.63e6, rel=1e-12)
    assert phy_rate(5e6, 1000 / 1376) == pytest.approx(6.88e6, rel=1e-12)


@pytest.mark.parametrize("kappa", [0.0, -0.1, 1.5])
def test_phy_rate_rejects_bad_kappa(kappa):
    with pytest.raises(ValueError):
        phy_rate(1e6, kappa)


def test_free_space_gain_examples():
    unit_d = CELL.wavelength / (4 * math.pi)
    assert free_space_gain(CELL, unit_d, 1, 1) == pytest.approx(1.0, rel=1e-15)
    assert free_space_gain(CELL, 500.0, 1, 1) == 4 * free_space_gain(CELL, 1000.0, 1, 1)
    assert CELL.wavelength == pytest.approx(0.142758, abs=1e-6)
    assert free_space_gain(CELL, 1000.0, 1, 1) == pytest.approx(FSG_2100MHZ_1KM, rel=1e-13)
    # the usual 5-digit approximation 1.2904e-10 is good to 2e-4
    assert free_space_gain(CELL, 1000.0, 1, 1) == pytest.approx(1.2904e-10, rel=2e-4)


@pytest.mark.parametrize("d", [0.0, -3.0])
def test_free_space_gain_rejects_non_positive_distance(d):
    with pytest.raises(ValueError):
        free_space_gain(CELL, d, 1, 1)


def test_mean_snr_examples():
    assert mean_snr(0.0, CELL, 1000, 1, 1, 1, N0) == 0.0
    p = 0.37
    assert mean_snr(2 * p, CELL, 1000, 1, 1, 1, N0) == pytest.approx(2 * mean_snr(p, CELL, 1000, 1, 1, 1, N0), rel=1e-15)
    assert mean_snr(1.0, CELL, 1000, 1.0, db_to_linear(5), 1.0, N0) == pytest.approx(MEAN_SNR_1W_1KM, rel=1e-12)


def test_snr_threshold_zero_iff_zero_rate():
    assert snr_threshold(0.0, CELL, 0.8) == 0.0
    assert snr_threshold(1.0, CELL, 0.8) > 0.0
    # (2^(10e6 / (5e6 * 2000/2376)) - 1) * 10^0.2, recomputed in high precision
    assert snr_threshold(10e6, CELL, 2000 / 2376) == pytest.approx(6.64221615679805123, rel=1e-13)


def test_unit_conversions_round_trip():
    assert dbm_to_watt(30) == pytest.approx(1.0)
    assert watt_to_dbm(0.01) == pytest.approx(10.0)
    assert linear_to_db(db_to_linear(-3.7)) == pytest.approx(-3.7)
    assert SPEED_OF_LIGHT == 299792458.0


@pytest.mark.parametrize(
    "kwargs",
    [
        dict(carrier_frequency=0),
        dict(bandwidth=-1),
        dict(capacity_gap=0.99),
        dict(overhead_bits=-1),
    ],
)
def test_radio_interface_invariants(kwargs):
    base = dict(name="x", carrier_frequency=1e9, bandwidth=1e6, capacity_gap=1.0, overhead_bits=0)
    with pytest.raises(ValueError):
        RadioInterface(**{**base, **kwargs})


@pytest.mark.parametrize("field", ["d_1b", "sigma2_12", "g_bs"])
def test_topology_invariants(field):
    base = dict(d_1b=1, d_2b=1, d_12=1, d_21=1)
    with pytest.raises(ValueError):
        Topology(**{**base, field: 0.0})


def test_packet_and_noise_invariants():
    with pytest.raises(ValueError):
        PacketSpec(0)
    with pytest.raises(ValueError):
        NoiseModel(0.0)


# -- properties ---------------------------------------------------------------

bits = st.integers(min_value=1, max_value=100_000)
overheads = st.integers(min_value=0, max_value=10_000)


@given(n=bits, oh=overheads)
def test_ratio_increasing_in_n_decreasing_in_overhead(n, oh):
    r = effective_data_ratio(PacketSpec(n), iface(oh))
    if oh > 0:
        assert effective_data_ratio(PacketSpec(n + 1), iface(oh)) > r
        assert r < 1.0
    assert effective_data_ratio(PacketSpec(n), iface(oh + 1)) < r


@given(n=bits)
def test_short_range_ratio_exceeds_cellular(n):
    assert effective_data_ratio(PacketSpec(n), SHORT) > effective_data_ratio(PacketSpec(n), CELL)


@given(d=st.floats(min_value=1e-3, max_value=1e6), k=st.floats(min_value=0.01, max_value=100))
def test_inverse_square_law(d, k):
    a = free_space_gain(CELL, d, 2.0, 3.0) * d * d
    b = free_space_gain(CELL, d * k, 2.0, 3.0) * (d * k) ** 2
    assert b == pytest.approx(a, rel=1e-12)


@given(
    p=st.floats(min_value=1e-6, max_value=1e3),
    s2=st.floats(min_value=1e-3, max_value=1e3),
    k=st.floats(min_value=0.01, max_value=100),
)
def test_mean_snr_homogeneity(p, s2, k):
    base = mean_snr(p, CELL, 700.0, 1.0, 3.0, s2, N0)
    assert mean_snr(k * p, CELL, 700.0, 1.0, 3.0, s2, N0) == pytest.approx(k * base, rel=1e-12)
    assert mean_snr(p, CELL, 700.0, 1.0, 3.0, k * s2, N0) == pytest.approx(k * base, rel=1e-12)
    wide = iface(b=CELL.bandwidth * k, f=CELL.carrier_frequency, gap=CELL.capacity_gap)
    assert mean_snr(p, wide, 700.0, 1.0, 3.0, s2, N0) == pytest.approx(base / k, rel=1e-12)
