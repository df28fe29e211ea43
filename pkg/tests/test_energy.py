import math

import pytest
from hypothesis import given, strategies as st

from sleepguard.config import PowerProfile, RadioParams
from sleepguard.energy import (
    Category,
    EnergyLedger,
    Mode,
    aggregation_energy,
    crossover_distance,
    mode_drain,
    rx_energy,
    tx_energy,
)

DEFAULTS = RadioParams()
POWER = PowerProfile()


def test_crossover_distance_defaults():
    assert crossover_distance(DEFAULTS) == pytest.approx(math.sqrt(20e-12 / 0.0015e-12), abs=1e-9)
    assert crossover_distance(DEFAULTS) == pytest.approx(115.470, abs=1e-3)


def test_crossover_distance_simple_cases():
    assert crossover_distance(RadioParams(eps_fs=1.0, eps_mp=1.0)) == 1.0
    assert crossover_distance(RadioParams(eps_fs=4.0, eps_mp=1.0)) == 2.0


def test_tx_energy_free_space():
    # 4096 bits at 50 m: 4096*100nJ + 4096*20pJ*2500
    expected = 4096 * 100e-9 + 4096 * 20e-12 * 50.0**2
    assert tx_energy(4096, 50.0, DEFAULTS) == pytest.approx(expected, rel=1e-12)
    assert expected == pytest.approx(614.4e-6, rel=1e-9)


def test_tx_energy_multipath():
    # 200 m is past the 115.47 m crossover: d^4 law applies
    expected = 4096 * 100e-9 + 4096 * 0.0015e-12 * 200.0**4
    assert tx_energy(4096, 200.0, DEFAULTS) == pytest.approx(expected, rel=1e-12)
    assert expected == pytest.approx(10.24e-3, rel=1e-9)


def test_tx_energy_zero_bits():
    assert tx_energy(0, 123.0, DEFAULTS) == 0.0


def test_tx_energy_boundary_uses_multipath_branch():
    d0 = crossover_distance(DEFAULTS)
    bits = 1000
    assert tx_energy(bits, d0, DEFAULTS) == bits * (DEFAULTS.e_elec + DEFAULTS.eps_mp * d0**4)


def test_rx_energy():
    assert rx_energy(4096, DEFAULTS) == pytest.approx(409.6e-6, rel=1e-12)
    assert rx_energy(0, DEFAULTS) == 0.0
    assert rx_energy(1, DEFAULTS) == pytest.approx(100e-9, rel=1e-12)


def test_aggregation_energy():
    assert aggregation_energy(0, 4096, DEFAULTS) == 0.0
    assert aggregation_energy(10, 4096, RadioParams(eda=5e-9)) == pytest.approx(204.8e-6, rel=1e-12)
    assert aggregation_energy(1, 1, RadioParams(eda=5e-9)) == pytest.approx(5e-9, rel=1e-12)


def test_mode_drain():
    assert mode_drain(Mode.IDLE, 1.0, POWER) == pytest.approx(41e-3, rel=1e-12)
    assert mode_drain(Mode.SLEEP, 1.0, POWER) == pytest.approx(25e-6, rel=1e-12)
    assert mode_drain(Mode.TRANSMIT, 0.0, POWER) == 0.0


def test_negative_inputs_rejected():
    with pytest.raises(ValueError):
        tx_energy(-1, 10.0, DEFAULTS)
    with pytest.raises(ValueError):
        tx_energy(1, -1.0, DEFAULTS)
    with pytest.raises(ValueError):
        rx_energy(-5, DEFAULTS)
    with pytest.raises(ValueError):
        mode_drain(Mode.IDLE, -0.1, POWER)


@given(bits=st.integers(1, 10**6), more=st.integers(1, 10**6), d=st.floats(0, 300))
def test_tx_strictly_increasing_in_bits(bits, more, d):
    assert tx_energy(bits + more, d, DEFAULTS) > tx_energy(bits, d, DEFAULTS)


@given(bits=st.integers(0, 10**6), d1=st.floats(0, 300), d2=st.floats(0, 300))
def test_tx_nondecreasing_in_distance_within_regime(bits, d1, d2):
    d0 = crossover_distance(DEFAULTS)
    lo, hi = sorted((d1, d2))
    if (lo < d0) == (hi < d0):
        assert tx_energy(bits, lo, DEFAULTS) <= tx_energy(bits, hi, DEFAULTS)


@given(bits=st.integers(0, 10**6), d=st.floats(0, 500))
def test_rx_never_exceeds_tx(bits, d):
    assert rx_energy(bits, DEFAULTS) <= tx_energy(bits, d, DEFAULTS)


@given(duration=st.floats(1e-6, 1e4))
def test_sleep_cheaper_than_idle(duration):
    assert mode_drain(Mode.SLEEP, duration, POWER) < mode_drain(Mode.IDLE, duration, POWER)


def test_ledger_accumulates_and_rejects_negatives():
    ledger = EnergyLedger()
    ledger.add(Category.TX, 1.5)
    ledger.add(Category.TX, 0.5)
    ledger.add(Category.SLEEP, 0.25)
    assert ledger[Category.TX] == 2.0
    assert ledger.total() == 2.25
    with pytest.raises(ValueError):
        ledger.add(Category.RX, -1.0)
