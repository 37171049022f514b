"""Density-operator propagators in the Hamiltonian eigenbasis.

Every dynamics here acts on the eigenbasis dyads ``|m><n|`` independently:
the Liouvillian ``L rho = -i [H, rho]`` has eigenvalue ``-i w_mn`` on
``|m><n|`` with ``w_mn = E_m - E_n``, so each propagator is a matrix of
scalar factors applied element-wise to ``U^dagger rho U``.

=================  ==========================================================
Unitary            ``exp(-i w t)``
QExponential(q)    ``e_q(-i w t)``
QShortTime(q)      ``exp(-i w t) exp(-(q-1) w**2 t**2 / 2)``
Milburn(tau)       ``exp(-i w t) exp(-tau w**2 t / 2)``
=================  ==========================================================

Two RK4 integrators serve as independent oracles: one for the generalized
von Neumann equation (element-wise, time-dependent rate) and one for the
Milburn double-commutator equation (in the original basis).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Union

import numpy as np

from .core import DensityMatrix, as_density, check_hermitian, q_exp_array
from .errors import DivergentHorizon, StepSizeError

VALIDITY_THRESHOLD = 0.2


class ValidityWarning(UserWarning):
    """Evaluation extends past the short-time validity horizon."""


@dataclass(frozen=True, eq=False)
class EnergyDecomposition:
    """Eigenvalues (ascending, rad/s) and eigenvector columns of a Hamiltonian."""

    energies: np.ndarray
    basis: np.ndarray
    source: np.ndarray

    @property
    def dim(self) -> int:
        return self.energies.size

    def transition_frequencies(self) -> np.ndarray:
        """Matrix ``w[m, n] = E_m - E_n``."""
        return self.energies[:, None] - self.energies[None, :]

    def max_frequency(self) -> float:
        return float(self.energies[-1] - self.energies[0])

    def to_energy_basis(self, m) -> np.ndarray:
        u = self.basis
        return u.conj().T @ np.asarray(m) @ u

    def from_energy_basis(self, m) -> np.ndarray:
        u = self.basis
        return u @ np.asarray(m) @ u.conj().T


def diagonalize(H) -> EnergyDecomposition:
    """Eigendecomposition of a Hermitian Hamiltonian (raises ``NotHermitian``)."""
    h = check_hermitian(H)
    # symmetrise away roundoff before handing to LAPACK
    h_sym = (h + h.conj().T) / 2
    energies, basis = np.linalg.eigh(h_sym)
    return EnergyDecomposition(energies=energies, basis=basis, source=h)


def _decomposition(H) -> EnergyDecomposition:
    return H if isinstance(H, EnergyDecomposition) else diagonalize(H)


# ---------------------------------------------------------------------------
# propagator kinds
# ---------------------------------------------------------------------------

def _check_q(q: float) -> float:
    q = float(q)
    if not q >= 1:
        raise ValueError(f"evolution requires q >= 1, got q={q}")
    return q


@dataclass(frozen=True)
class Unitary:
    name = "unitary"

    def factors(self, w: np.ndarray, t: float) -> np.ndarray:
        return np.exp(-1j * w * t)


@dataclass(frozen=True)
class QExponential:
    q: float
    name = "qexp"

    def __post_init__(self):
        object.__setattr__(self, "q", _check_q(self.q))

    def factors(self, w, t):
        return q_exp_array(-1j * w * t, self.q)


@dataclass(frozen=True)
class QShortTime:
    q: float
    name = "qshort"

    def __post_init__(self):
        object.__setattr__(self, "q", _check_q(self.q))

    def factors(self, w, t):
        return np.exp(-1j * w * t - 0.5 * (self.q - 1) * w**2 * t**2)


@dataclass(frozen=True)
class Milburn:
    tau: float
    name = "milburn"

    def __post_init__(self):
        if not self.tau >= 0:
            raise ValueError(f"tau must be non-negative, got {self.tau}")

    def factors(self, w, t):
        return np.exp(-1j * w * t - 0.5 * self.tau * w**2 * t)


PropagatorKind = Union[Unitary, QExponential, QShortTime, Milburn]


def kind_q(kind: PropagatorKind) -> float:
    """Extensivity parameter of a kind; 1 for the non-q dynamics."""
    return getattr(kind, "q", 1.0)


# ---------------------------------------------------------------------------
# propagation
# ---------------------------------------------------------------------------

def _check_time(t: float) -> float:
    t = float(t)
    if not t >= 0:
        raise ValueError(f"time must be non-negative, got {t}")
    return t


def propagate(rho0, H, kind: PropagatorKind, t: float) -> DensityMatrix:
    """Evolve ``rho0`` to time ``t`` (seconds) under ``kind``."""
    t = _check_time(t)
    rho0 = as_density(rho0)
    dec = _decomposition(H)
    rho_e = dec.to_energy_basis(rho0.matrix)
    rho_e = kind.factors(dec.transition_frequencies(), t) * rho_e
    return DensityMatrix(dec.from_energy_basis(rho_e))


def propagate_many(rho0, H, kind: PropagatorKind, times) -> np.ndarray:
    """Propagated matrices for every time in ``times``, shape ``(len(times), d, d)``."""
    times = _check_times(times)
    dec = _decomposition(H)
    rho_e = dec.to_energy_basis(as_density(rho0).matrix)
    f = kind.factors(dec.transition_frequencies()[None, :, :], times[:, None, None])
    u = dec.basis
    return np.einsum("ij,tjk,lk->til", u, f * rho_e, u.conj(), optimize=True)


def evolve_unitary(rho0, H, t: float) -> DensityMatrix:
    return propagate(rho0, H, Unitary(), t)


def evolve_qexp(rho0, H, q: float, t: float) -> DensityMatrix:
    """Propagate with the q-exponential of the Liouvillian.

    In the energy basis ``rho_mn(t) = e_q(-i w_mn t) rho_mn(0)``; energy
    populations are untouched and coherences decay for ``q > 1``.
    """
    return propagate(rho0, H, QExponential(q), t)


def evolve_qshort(rho0, H, q: float, t: float) -> DensityMatrix:
    """Short-time q-dynamics: unitary phase times a Gaussian coherence envelope.

    Valid only while ``|1-q| w t`` is small; see :func:`validity_horizon`.
    """
    return propagate(rho0, H, QShortTime(q), t)


def evolve_milburn(rho0, H, tau: float, t: float) -> DensityMatrix:
    return propagate(rho0, H, Milburn(tau), t)


@dataclass
class EvolutionResult:
    times: np.ndarray
    states: list
    kind: PropagatorKind
    validity: np.ndarray = field(default=None)

    def __post_init__(self):
        self.times = np.asarray(self.times, dtype=float)
        if len(self.states) != self.times.size:
            raise ValueError("states and times differ in length")
        if np.any(np.diff(self.times) <= 0):
            raise ValueError("times must be strictly increasing")

    def matrices(self) -> np.ndarray:
        return np.stack([s.matrix for s in self.states])


def validity_flags(kind: PropagatorKind, omega_max: float, times) -> np.ndarray:
    """True where ``|1-q| * omega_max * t <= VALIDITY_THRESHOLD``."""
    times = np.asarray(times, dtype=float)
    return abs(1 - kind_q(kind)) * omega_max * times <= VALIDITY_THRESHOLD


def _check_times(times) -> np.ndarray:
    times = np.asarray(times, dtype=float).ravel()
    if times.size == 0:
        raise ValueError("empty time grid")
    if times[0] < 0:
        raise ValueError("times must be non-negative")
    if np.any(np.diff(times) <= 0):
        raise ValueError("times must be strictly increasing")
    return times


def evolve(rho0, H, kind: PropagatorKind, times) -> EvolutionResult:
    """Evaluate the closed-form propagator on a time grid."""
    times = _check_times(times)
    rho0 = as_density(rho0)
    dec = _decomposition(H)
    states = [DensityMatrix(m) for m in propagate_many(rho0, dec, kind, times)]
    return EvolutionResult(times, states, kind, validity_flags(kind, dec.max_frequency(), times))


# ---------------------------------------------------------------------------
# RK4 oracles
# ---------------------------------------------------------------------------

def _rk4(y0: np.ndarray, rhs: Callable[[float, np.ndarray], np.ndarray],
         times: np.ndarray, dt_max: float) -> list[np.ndarray]:
    """Fixed-step classical RK4 from t = 0, recording ``y`` at each of ``times``."""
    if not dt_max > 0:
        raise StepSizeError(f"dt_max must be positive, got {dt_max}")
    out = []
    y, t = y0.copy(), 0.0
    for target in times:
        span = target - t
        nsteps = max(1, math.ceil(span / dt_max)) if span > 0 else 0
        if nsteps:
            h = span / nsteps
            for i in range(nsteps):
                s = t + i * h
                k1 = rhs(s, y)
                k2 = rhs(s + h / 2, y + h / 2 * k1)
                k3 = rhs(s + h / 2, y + h / 2 * k2)
                k4 = rhs(s + h, y + h * k3)
                y = y + h / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
        t = float(target)
        out.append(y.copy())
    return out


def integrate_generalized_vn(rho0, H, q: float, times, dt_max: float) -> EvolutionResult:
    """RK4 integration of the generalized von Neumann equation.

    Each energy-basis element obeys
    ``d rho_mn/dt = lam / (1 + (1-q) lam t) * rho_mn`` with ``lam = -i w_mn``.
    The initial state ``rho0`` is taken at ``t = 0``.
    """
    kind = QExponential(q)
    times = _check_times(times)
    rho0 = as_density(rho0)
    dec = _decomposition(H)
    lam = -1j * dec.transition_frequencies()
    q = kind.q

    def rhs(t, y):
        return lam / (1 + (1 - q) * lam * t) * y

    traj = _rk4(dec.to_energy_basis(rho0.matrix), rhs, times, dt_max)
    states = [DensityMatrix(dec.from_energy_basis(y)) for y in traj]
    return EvolutionResult(times, states, kind, validity_flags(kind, dec.max_frequency(), times))


def integrate_milburn(rho0, H, tau: float, times, dt_max: float) -> EvolutionResult:
    """RK4 integration of ``d rho/dt = -i[H, rho] - (tau/2)[H, [H, rho]]``.

    Works with commutators in the original basis, so it shares no code with
    the eigenbasis propagators.
    """
    kind = Milburn(tau)
    times = _check_times(times)
    rho0 = as_density(rho0)
    h = check_hermitian(H.source if isinstance(H, EnergyDecomposition) else H)

    def rhs(t, y):
        c = h @ y - y @ h
        return -1j * c - 0.5 * tau * (h @ c - c @ h)

    traj = _rk4(rho0.matrix.copy(), rhs, times, dt_max)
    states = [DensityMatrix(y) for y in traj]
    return EvolutionResult(times, states, kind, np.ones(times.size, dtype=bool))


# ---------------------------------------------------------------------------
# closed forms and validity
# ---------------------------------------------------------------------------

def coherence_envelope(omega, q: float, t):
    """Modulus of ``e_q(-i omega t)``: ``(1 + ((q-1) omega t)**2) ** (-1/(2(q-1)))``."""
    if not q > 1:
        raise ValueError("coherence_envelope requires q > 1")
    a = (q - 1) * np.asarray(omega, dtype=float) * np.asarray(t, dtype=float)
    out = np.exp(-np.log1p(a * a) / (2 * (q - 1)))
    return out if out.ndim else float(out)


def coherence_phase(omega, q: float, t):
    """Argument of ``e_q(-i omega t)``, unwrapped: ``-arctan((q-1) omega t) / (q-1)``."""
    if not q > 1:
        raise ValueError("coherence_phase requires q > 1")
    a = (q - 1) * np.asarray(omega, dtype=float) * np.asarray(t, dtype=float)
    out = -np.arctan(a) / (q - 1)
    return out if out.ndim else float(out)


def validity_horizon(q: float, omega_char: float, threshold: float = VALIDITY_THRESHOLD) -> float:
    """Time at which ``|1-q| * omega_char * t`` reaches ``threshold``."""
    if q == 1:
        raise DivergentHorizon("unitary limit q = 1 has no validity horizon")
    if not omega_char > 0:
        raise ValueError("omega_char must be positive")
    if threshold < 0:
        raise ValueError("threshold must be non-negative")
    return threshold / (abs(1 - q) * omega_char)
