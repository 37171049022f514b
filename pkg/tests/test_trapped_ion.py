import math
import warnings

import numpy as np
import pytest

from qdecoherence.core import NumberDistribution, coherent_distribution, fock_distribution
from qdecoherence.liouville import (Milburn, QExponential, QShortTime, Unitary, ValidityWarning,
                                    diagonalize, evolve_unitary, integrate_milburn,
                                    validity_horizon)
from qdecoherence.trapped_ion import (Coherent, EmpiricalDecay, Fock, IonConfig,
                                      blue_sideband_block, envelope_qmodel, pg_empirical,
                                      pg_from_propagator, pg_qmodel, rabi_frequencies,
                                      rabi_frequency)

CFG = IonConfig()
OMEGA0 = 621785.7520054592  # rad/s, mpmath evaluation of the n = 0 Rabi frequency
T_MAX = validity_horizon(1.001, CFG.omega, 0.17)


@pytest.fixture
def times():
    return np.linspace(0, T_MAX, 500)


def test_ion_config_validation():
    with pytest.raises(ValueError):
        IonConfig(eta=1.2)
    with pytest.raises(ValueError):
        IonConfig(omega_over_2pi=0)
    with pytest.raises(ValueError):
        EmpiricalDecay(gamma0=-1)
    with pytest.raises(ValueError):
        Fock(-1)


# --- Rabi frequencies -----------------------------------------------------------

def test_rabi_frequency_vacuum():
    assert rabi_frequency(0, CFG) == pytest.approx(OMEGA0, rel=1e-14)
    assert rabi_frequency(0, CFG) / (2 * math.pi) == pytest.approx(98960.27597578021, rel=1e-14)


def test_rabi_frequency_vanishes_with_eta():
    cfg = IonConfig(eta=1e-9)
    assert all(abs(w) < 1e-2 for w in rabi_frequencies(cfg, 10))


def test_rabi_ratio_independent_of_coupling():
    a = rabi_frequencies(IonConfig(omega_over_2pi=5e5), 8)
    b = rabi_frequencies(IonConfig(omega_over_2pi=1.7e3), 8)
    assert np.allclose(a / a[0], b / b[0], rtol=1e-13)


# --- empirical and q-model curves -------------------------------------------------

def test_pg_empirical_examples(times):
    dist = fock_distribution(0, 30)
    assert pg_empirical(dist, CFG, EmpiricalDecay(), 0.0) == 1.0
    undamped = pg_empirical(dist, CFG, EmpiricalDecay(gamma0=0), times)
    assert np.allclose(undamped, 0.5 * (1 + np.cos(2 * OMEGA0 * times)), atol=1e-12)
    # envelope at 54 us: mpmath exp(-0.6426)
    t = 54e-6
    env = (2 * pg_empirical(dist, CFG, EmpiricalDecay(), t) - 1) / math.cos(2 * OMEGA0 * t)
    assert env == pytest.approx(0.5259232444453181, rel=1e-9)


def test_pg_qmodel_examples(times):
    dist = fock_distribution(0, 30)
    assert pg_qmodel(dist, CFG, 1.001, 0.0) == 1.0
    assert np.allclose(pg_qmodel(dist, CFG, 1.0, times),
                       pg_empirical(dist, CFG, EmpiricalDecay(gamma0=0), times), atol=1e-14, rtol=0)
    t = 54e-6
    env = (2 * pg_qmodel(dist, CFG, 1.001, t) - 1) / math.cos(2 * OMEGA0 * t)
    # mpmath exp(-0.0005 * Omega_0^2 * t^2)
    assert env == pytest.approx(0.5691061276329873, rel=1e-9)


def test_pg_qmodel_validity_warning():
    dist = fock_distribution(0, 30)
    with pytest.warns(ValidityWarning):
        pg_qmodel(dist, CFG, 1.001, 2 * T_MAX)
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        pg_qmodel(dist, CFG, 1.001, T_MAX)


def test_pg_qmodel_weights_levels():
    # two equally occupied levels must still give a probability
    dist = NumberDistribution([0.5, 0.5])
    t = np.linspace(0, T_MAX, 200)
    pg = pg_qmodel(dist, IonConfig(dim=2), 1.001, t)
    assert pg.min() >= 0 and pg.max() <= 1


@pytest.mark.parametrize("dist", [fock_distribution(0, 30), fock_distribution(4, 30),
                                  coherent_distribution(3, 30)], ids=["fock0", "fock4", "coh3"])
def test_probabilities_bounded_and_damped(dist, times):
    undamped = pg_qmodel(dist, CFG, 1.0, times)
    for pg in (pg_empirical(dist, CFG, EmpiricalDecay(), times),
               pg_qmodel(dist, CFG, 1.001, times)):
        assert np.all((pg >= 0) & (pg <= 1))
    if dist.support().size == 1:
        damped = pg_qmodel(dist, CFG, 1.001, times)
        assert np.all(np.abs(damped - 0.5) <= np.abs(undamped - 0.5) + 1e-15)


def test_increasing_q_damps_more(times):
    dist = coherent_distribution(3, 30)
    envs = [envelope_qmodel(fock_distribution(n, 30), CFG, q, times[1:])
            for n in (0, 5) for q in (1.0005, 1.001, 1.002)]
    for lo, hi in ((0, 1), (1, 2), (3, 4), (4, 5)):
        assert np.all(envs[hi] < envs[lo])
    assert envelope_qmodel(dist, CFG, 1.001, 0.0) == pytest.approx(1.0)


# --- sideband blocks and the propagator route --------------------------------------

def test_blue_sideband_block():
    for n in (0, 3):
        h = blue_sideband_block(n, CFG)
        w = rabi_frequency(n, CFG)
        assert np.allclose(diagonalize(h).energies, [-w, w], rtol=1e-14)
    gap = np.ptp(diagonalize(blue_sideband_block(0, CFG)).energies)
    assert gap / (2 * math.pi) == pytest.approx(197920.5519515604, rel=1e-12)


def test_block_unitary_rabi_formula():
    n = 2
    h = blue_sideband_block(n, CFG)
    w = rabi_frequency(n, CFG)
    rho = np.diag([1.0, 0.0])
    for t in np.linspace(0, 2e-5, 7):
        pg = evolve_unitary(rho, h, t).matrix[0, 0].real
        assert pg == pytest.approx(0.5 * (1 + math.cos(2 * w * t)), abs=1e-12)


def test_propagator_unitary_matches_rabi_sum(times):
    s = pg_from_propagator(Fock(0), CFG, Unitary(), times)
    assert np.max(np.abs(s["pg"] - 0.5 * (1 + np.cos(2 * OMEGA0 * times)))) < 1e-12
    d = coherent_distribution(3, 30)
    s = pg_from_propagator(Coherent(3), CFG, Unitary(), times)
    assert np.max(np.abs(s["pg"] - pg_qmodel(d, CFG, 1.0, times))) < 1e-12


@pytest.mark.parametrize("n", [0, 3])
def test_propagator_qshort_gaussian(n, times):
    q = 1.001
    w = rabi_frequency(n, CFG)
    s = pg_from_propagator(Fock(n), CFG, QShortTime(q), times)
    expected = 0.5 * (1 + np.cos(2 * w * times) * np.exp(-(q - 1) * (2 * w) ** 2 * times**2 / 2))
    assert np.max(np.abs(s["pg"] - expected)) < 1e-12
    assert np.allclose(s["envelope"], np.exp(-2 * (q - 1) * w**2 * times**2), rtol=1e-12)


def test_propagator_milburn_against_rk4():
    tau = 2e-8
    w = rabi_frequency(0, CFG)
    t = np.linspace(0, 4e-5, 9)
    s = pg_from_propagator(Fock(0), CFG, Milburn(tau), t)
    assert np.allclose(s["envelope"], np.exp(-tau * (2 * w) ** 2 * t / 2), rtol=1e-12)
    oracle = integrate_milburn(np.diag([1.0, 0.0]), blue_sideband_block(0, CFG), tau, t,
                               dt_max=2e-9)
    pg_rk4 = np.array([m.matrix[0, 0].real for m in oracle.states])
    assert np.max(np.abs(pg_rk4 - s["pg"])) < 1e-8


def test_propagator_qexp_bounded(times):
    s = pg_from_propagator(Coherent(3), CFG, QExponential(1.001), times)
    assert np.all((s["pg"] >= 0) & (s["pg"] <= 1))
    assert s.metadata["kind"] == "qexp"
