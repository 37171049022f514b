"""Blue-sideband Rabi dynamics of a single trapped ion.

With the lasers tuned to the first blue sideband and a small Lamb-Dicke
parameter, the ion only flops between ``|g,n>`` and ``|e,n+1>``. Each such
pair is a resonant two-level block ``H_n = Omega_n sigma_x`` whose dressed
states are split by ``2 Omega_n``, so the ground-state population oscillates
as ``cos(2 Omega_n t)``.

Three routes to the ground-state probability are provided:

* :func:`pg_empirical`: exponential damping ``exp(-gamma_n t)`` with the
  empirical ``gamma_n = gamma_0 (n+1)**0.7``;
* :func:`pg_qmodel`: Gaussian damping ``exp(-(q-1) Omega_n**2 t**2 / 2)``;
* :func:`pg_from_propagator`: evolves every block with a density-matrix
  propagator and sums the populations.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Union

import numpy as np

from .core import NumberDistribution, coherent_distribution, fock_distribution, laguerre_assoc
from .liouville import (VALIDITY_THRESHOLD, PropagatorKind, ValidityWarning, diagonalize,
                        kind_q, propagate_many)
from .series import TimeSeries

SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)


@dataclass(frozen=True)
class IonConfig:
    """Trapped-ion parameters; defaults are those of the 9Be+ experiment."""

    omega_over_2pi: float = 5e5  # Hz
    eta: float = 0.202
    dim: int = 30

    def __post_init__(self):
        if not self.omega_over_2pi > 0:
            raise ValueError("omega_over_2pi must be positive")
        if not 0 < self.eta < 1:
            raise ValueError("eta must lie in (0, 1)")
        if self.dim < 1:
            raise ValueError("dim must be at least 1")

    @property
    def omega(self) -> float:
        """Coupling constant in rad/s."""
        return 2 * math.pi * self.omega_over_2pi


@dataclass(frozen=True)
class EmpiricalDecay:
    gamma0: float = 11.9e3  # 1/s
    exponent: float = 0.7

    def __post_init__(self):
        if not self.gamma0 >= 0:
            raise ValueError("gamma0 must be non-negative")

    def rates(self, n) -> np.ndarray:
        return self.gamma0 * (np.asarray(n, dtype=float) + 1) ** self.exponent


@dataclass(frozen=True)
class Fock:
    n0: int = 0

    def __post_init__(self):
        if self.n0 < 0:
            raise ValueError("n0 must be non-negative")

    def distribution(self, dim: int) -> NumberDistribution:
        return fock_distribution(self.n0, dim)


@dataclass(frozen=True)
class Coherent:
    nbar: float = 3.0

    def __post_init__(self):
        if not self.nbar >= 0:
            raise ValueError("nbar must be non-negative")

    def distribution(self, dim: int) -> NumberDistribution:
        return coherent_distribution(self.nbar, dim)


InitialVibrationalState = Union[Fock, Coherent]


def rabi_frequency(n: int, cfg: IonConfig) -> float:
    """Blue-sideband Rabi frequency ``Omega_n`` in rad/s."""
    if n < 0:
        raise ValueError("n must be non-negative")
    eta2 = cfg.eta**2
    return cfg.omega * math.exp(-eta2 / 2) * cfg.eta * laguerre_assoc(n, 1, eta2) / math.sqrt(n + 1)


def rabi_frequencies(cfg: IonConfig, levels: int | None = None) -> np.ndarray:
    return np.array([rabi_frequency(n, cfg) for n in range(levels or cfg.dim)])


def _probs(dist: NumberDistribution) -> np.ndarray:
    return np.asarray(dist.probs)


def _rabi_sum(dist, cfg, t, damping):
    """``0.5 * (1 + sum_n P_n cos(2 Omega_n t) D_n(t))`` vectorised over ``t``."""
    t = np.asarray(t, dtype=float)
    if np.any(t < 0):
        raise ValueError("times must be non-negative")
    p = _probs(dist)
    omega_n = rabi_frequencies(cfg, p.size)
    tt = t[..., None]
    terms = p * np.cos(2 * omega_n * tt) * damping(omega_n, tt)
    out = 0.5 * (1 + terms.sum(axis=-1))
    return out if out.ndim else float(out)


def pg_empirical(dist: NumberDistribution, cfg: IonConfig, decay: EmpiricalDecay, t):
    """Ground-state probability with empirical exponential damping."""
    gamma = decay.rates(np.arange(dist.dim))
    return _rabi_sum(dist, cfg, t, lambda w, tt: np.exp(-gamma * tt))


def qmodel_rates(cfg: IonConfig, q: float, levels: int) -> np.ndarray:
    """Gaussian damping rates ``(q-1) Omega_n**2 / 2`` (1/s**2)."""
    return (q - 1) * rabi_frequencies(cfg, levels) ** 2 / 2


def _warn_validity(q, cfg, t):
    t = np.asarray(t, dtype=float)
    if q != 1 and t.size and abs(1 - q) * cfg.omega * float(np.max(t)) > VALIDITY_THRESHOLD:
        warnings.warn(f"|1-q| Omega t exceeds {VALIDITY_THRESHOLD} within the requested times",
                      ValidityWarning, stacklevel=3)


def pg_qmodel(dist: NumberDistribution, cfg: IonConfig, q: float, t):
    """Ground-state probability under the short-time q-dynamics.

    Each level's Rabi term is damped by ``exp(-gamma_nq t**2)`` with
    ``gamma_nq = (q-1) Omega_n**2 / 2``. The ``P_n`` weights are included in
    the sum so that the result is a probability for mixed distributions.
    """
    if not q >= 1:
        raise ValueError("q must be >= 1")
    _warn_validity(q, cfg, t)
    g = qmodel_rates(cfg, q, dist.dim)
    return _rabi_sum(dist, cfg, t, lambda w, tt: np.exp(-g * tt**2))


def envelope_empirical(dist, decay: EmpiricalDecay, t):
    t = np.asarray(t, dtype=float)[..., None]
    return (_probs(dist) * np.exp(-decay.rates(np.arange(dist.dim)) * t)).sum(axis=-1)


def envelope_qmodel(dist, cfg: IonConfig, q: float, t):
    t = np.asarray(t, dtype=float)[..., None]
    return (_probs(dist) * np.exp(-qmodel_rates(cfg, q, dist.dim) * t**2)).sum(axis=-1)


def blue_sideband_block(n: int, cfg: IonConfig) -> np.ndarray:
    """Resonant block ``Omega_n sigma_x`` on ``span{|g,n>, |e,n+1>}`` (rad/s)."""
    return rabi_frequency(n, cfg) * SIGMA_X


def pg_from_propagator(state: InitialVibrationalState, cfg: IonConfig,
                       kind: PropagatorKind, times) -> TimeSeries:
    """Ground-state probability from evolving each sideband block.

    Every occupied level starts in ``|g,n><g,n|`` and is propagated under
    :func:`blue_sideband_block` with ``kind``. Channel ``pg`` is
    ``sum_n P_n <g,n|rho_n(t)|g,n>``; channel ``envelope`` is the
    ``P_n``-weighted modulus of the dressed-state coherence relative to its
    initial value.
    """
    times = np.asarray(times, dtype=float)
    dist = state.distribution(cfg.dim)
    p = _probs(dist)
    pg = np.zeros_like(times)
    env = np.zeros_like(times)
    rho_g = np.diag([1.0, 0.0]).astype(complex)
    for n in dist.support():  # fixed order keeps the reduction deterministic
        dec = diagonalize(blue_sideband_block(int(n), cfg))
        traj = propagate_many(rho_g, dec, kind, times)
        pg += p[n] * traj[:, 0, 0].real
        c0 = dec.to_energy_basis(rho_g)[0, 1]
        ct = np.einsum("ji,tjk,kl->til", dec.basis.conj(), traj, dec.basis)[:, 0, 1]
        env += p[n] * np.abs(ct) / abs(c0)
    meta = {"kind": kind.name, "q": kind_q(kind), "tau_s": getattr(kind, "tau", None)}
    return TimeSeries(times, {"pg": pg, "envelope": env}, meta)
