import cmath
import math
import warnings

import mpmath as mp
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from qdecoherence.core import (DensityMatrix, NumberDistribution, PositivityWarning,
                               coherent_dim, coherent_distribution, fock_distribution,
                               laguerre_assoc, q_exp, q_exp_array, random_density,
                               tsallis_entropy)
from qdecoherence.errors import BranchCutError, NotHermitian, PoleError, TruncationError


# --- q-exponential -----------------------------------------------------------

@pytest.mark.parametrize("x, q, expected", [
    (0, 1.7, 1),
    (1, 1, math.e),
    (1, 0.5, 2.25),
    (-1j, 2, 0.5 - 0.5j),
])
def test_q_exp_examples(x, q, expected):
    assert q_exp(x, q) == pytest.approx(expected, abs=1e-15)


def test_q_exp_unit_q_is_exact_exp():
    for x in (0.3, -2.0, 1 + 2j):
        assert q_exp(x, 1) == cmath.exp(x)


def test_q_exp_pole_and_branch_cut():
    with pytest.raises(PoleError):
        q_exp(1.0, 2.0)  # base 0, exponent -1
    assert q_exp(-2.0, 0.5) == 0  # base 0, exponent +2
    with pytest.raises(BranchCutError):
        q_exp(-5.0, 0.6)  # base -1, exponent 2.5
    with pytest.raises(BranchCutError):
        q_exp_array(np.array([-5.0]), 0.6)
    with pytest.raises(PoleError):
        q_exp_array(np.array([0.5, 1.0]), 2.0)


def test_q_exp_branch_cut_integer_exponent_allowed():
    # q = 0.5: exponent 2, base 1 + 0.5 * (-6) = -2
    assert q_exp(-6.0, 0.5) == pytest.approx(4.0)


@settings(max_examples=200, deadline=None)
@given(x_re=st.floats(-5, 5), x_im=st.floats(-5, 5), q=st.floats(0.2, 3.0))
def test_q_exp_array_matches_scalar(x_re, x_im, q):
    x = complex(x_re, x_im)
    base = 1 + (1 - q) * x
    if abs(base) < 1e-3 or (abs(base.imag) < 1e-9 and base.real < 0):
        return
    try:
        expected = q_exp(x, q)
    except (BranchCutError, PoleError):
        return
    got = complex(q_exp_array(np.array([x]), q)[0])
    assert abs(got - expected) <= 1e-9 * max(1.0, abs(expected))


def test_q_exp_continuity_at_unit_q():
    for x in (-5.0, -1.3, 0.7, 5.0, 2 - 3j):
        for sign in (1, -1):
            errs = [abs(q_exp(x, 1 + sign * eps) - cmath.exp(x)) for eps in (1e-4, 5e-5)]
            assert errs[0] / errs[1] == pytest.approx(2.0, rel=0.1)


def test_q_exp_nonextensive():
    q = 2.0
    assert abs(q_exp(0.1, q) * q_exp(0.1, q) - q_exp(0.2, q)) > 1e-12


# --- distributions -------------------------------------------------------------

def test_fock_distribution():
    assert list(fock_distribution(0, 4).probs) == [1, 0, 0, 0]
    assert list(fock_distribution(2, 3).probs) == [0, 0, 1]
    with pytest.raises(IndexError):
        fock_distribution(5, 3)


def test_coherent_distribution_values():
    assert list(coherent_distribution(0, 4).probs) == [1, 0, 0, 0]
    d = coherent_distribution(3, 30)
    assert d.probs[0] == pytest.approx(math.exp(-3), rel=1e-14)
    # mpmath: e^-3 * 27/6
    assert d.probs[2] == pytest.approx(0.22404180765538774, rel=1e-13)
    assert d.probs[3] == pytest.approx(0.22404180765538774, rel=1e-13)
    assert int(np.argmax(d.probs)) in (2, 3)
    assert d.total() >= 1 - 1e-6


def test_coherent_distribution_truncation():
    assert coherent_dim(3) <= 30
    with pytest.raises(TruncationError, match=f"dim >= {coherent_dim(3)}"):
        coherent_distribution(3, 8)


def test_number_distribution_rejects_bad_input():
    with pytest.raises(ValueError):
        NumberDistribution([0.5, -0.1, 0.6])
    with pytest.raises(ValueError):
        NumberDistribution([0.5, 0.4])


# --- Laguerre ----------------------------------------------------------------

def _laguerre_series(n, alpha, x):
    return sum((-1) ** k * mp.binomial(n + alpha, n - k) * mp.mpf(x) ** k / mp.factorial(k)
               for k in range(n + 1))


def test_laguerre_examples():
    assert laguerre_assoc(0, 1, 0.040804) == 1
    for x in (0.0, 0.3, 1.7):
        assert laguerre_assoc(1, 1, x) == pytest.approx(2 - x, abs=1e-15)
    # power series in extended precision
    assert laguerre_assoc(2, 1, 0.040804) == pytest.approx(2.878420483208, rel=1e-12)


@pytest.mark.parametrize("n", [0, 1, 2, 5, 10, 15, 20])
@pytest.mark.parametrize("alpha", [0, 1, 2.5])
def test_laguerre_recurrence_matches_series(n, alpha):
    mp.mp.dps = 40
    for x in np.linspace(0, 1, 7):
        ref = float(_laguerre_series(n, alpha, x))
        assert laguerre_assoc(n, alpha, x) == pytest.approx(ref, rel=1e-10, abs=1e-300)


def test_laguerre_vectorised_and_limits():
    xs = np.linspace(0, 1, 5)
    assert np.allclose(laguerre_assoc(3, 1, xs), [laguerre_assoc(3, 1, x) for x in xs])
    with pytest.raises(ValueError):
        laguerre_assoc(10**6 + 1, 1, 0.1)
    with pytest.raises(ValueError):
        laguerre_assoc(-1, 1, 0.1)


# --- density matrices and entropy ----------------------------------------------

def test_density_matrix_validation():
    with pytest.raises(NotHermitian):
        DensityMatrix([[0.5, 1], [0, 0.5]])
    with pytest.raises(ValueError, match="trace"):
        DensityMatrix(np.eye(2))
    with pytest.warns(PositivityWarning):
        DensityMatrix([[1.5, 0], [0, -0.5]])


def test_density_matrix_is_immutable():
    m = np.eye(2) / 2
    rho = DensityMatrix(m)
    m[0, 0] = 7
    assert rho.matrix[0, 0] == 0.5
    with pytest.raises(ValueError):
        rho.matrix[0, 0] = 1


def test_tsallis_examples():
    pure = DensityMatrix.pure([1, 1j])
    for q in (0.5, 2, 3):
        assert tsallis_entropy(pure, q) == pytest.approx(0, abs=1e-12)
    assert tsallis_entropy(DensityMatrix.maximally_mixed(2), 2) == pytest.approx(0.5)
    assert tsallis_entropy(DensityMatrix.maximally_mixed(5), 2) == pytest.approx(0.8)
    assert tsallis_entropy(DensityMatrix.maximally_mixed(2), 1) == pytest.approx(math.log(2))


def test_tsallis_q_to_one_limit():
    rho = random_density(3, np.random.default_rng(1))
    s1 = tsallis_entropy(rho, 1)
    assert tsallis_entropy(rho, 1 + 1e-6) == pytest.approx(s1, rel=1e-5)


@pytest.mark.parametrize("q", [0.5, 2, 3])
def test_tsallis_pseudo_additive(q):
    rng = np.random.default_rng(7)
    for _ in range(20):
        a, b = random_density(2, rng), random_density(2, rng)
        ab = DensityMatrix(np.kron(a.matrix, b.matrix))
        sa, sb = tsallis_entropy(a, q), tsallis_entropy(b, q)
        assert abs(tsallis_entropy(ab, q) - (sa + sb + (1 - q) * sa * sb)) < 1e-10


@pytest.mark.parametrize("q", [0.5, 2, 3])
def test_tsallis_concavity(q):
    rng = np.random.default_rng(11)
    for _ in range(20):
        r1, r2 = random_density(2, rng), random_density(2, rng, rank=1)
        for lam in (0.25, 0.5, 0.75):
            mix = DensityMatrix(lam * r1.matrix + (1 - lam) * r2.matrix)
            with warnings.catch_warnings():
                warnings.simplefilter("ignore", PositivityWarning)
                rhs = lam * tsallis_entropy(r1, q) + (1 - lam) * tsallis_entropy(r2, q)
            assert tsallis_entropy(mix, q) >= rhs - 1e-12
