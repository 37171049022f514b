"""Foundational numerics: density matrices, the q-exponential, excitation
distributions, associated Laguerre polynomials and Tsallis entropy.

Conventions
-----------
Operators are dense ``complex128`` numpy arrays. Hamiltonians are stored in
angular-frequency units (rad/s) with hbar = 1.
"""

from __future__ import annotations

import cmath
import math
import warnings
from dataclasses import dataclass

import numpy as np

from .errors import BranchCutError, NotHermitian, PoleError, TruncationError

HERMITIAN_TOL = 1e-12
TRACE_TOL = 1e-12
POSITIVITY_TOL = -1e-10
TRUNCATION_BUDGET = 1e-6
LAGUERRE_MAX_ORDER = 10**6


class PositivityWarning(UserWarning):
    """Density matrix has an eigenvalue below the positivity tolerance."""


def as_matrix(a) -> np.ndarray:
    """Return ``a`` as a finite, square complex matrix."""
    m = np.array(a, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] < 1:
        raise ValueError(f"expected a square matrix, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise ValueError("matrix has non-finite entries")
    return m


def hermiticity_error(m: np.ndarray) -> float:
    return float(np.max(np.abs(m - m.conj().T)))


def check_hermitian(a, tol: float = HERMITIAN_TOL) -> np.ndarray:
    """Coerce ``a`` to a matrix and raise :class:`NotHermitian` if it is not."""
    m = as_matrix(a)
    err = hermiticity_error(m)
    if err > tol:
        raise NotHermitian(f"max |H - H^dagger| = {err:.3e} exceeds {tol:.0e}")
    return m


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    """Hermitian, unit-trace density operator on a truncated Hilbert space.

    Positivity is only a diagnostic: a :class:`PositivityWarning` is issued
    when the smallest eigenvalue falls below ``POSITIVITY_TOL``.
    """

    matrix: np.ndarray

    def __post_init__(self):
        m = check_hermitian(self.matrix)
        tr = np.trace(m)
        if abs(tr - 1.0) > TRACE_TOL:
            raise ValueError(f"trace {tr:.15g} differs from 1 by more than {TRACE_TOL:.0e}")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)
        lmin = float(np.linalg.eigvalsh(m)[0])
        if lmin < POSITIVITY_TOL:
            warnings.warn(f"density matrix eigenvalue {lmin:.3e} < {POSITIVITY_TOL:.0e}",
                          PositivityWarning, stacklevel=3)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    @classmethod
    def pure(cls, psi) -> "DensityMatrix":
        v = np.asarray(psi, dtype=complex).ravel()
        v = v / np.linalg.norm(v)
        return cls(np.outer(v, v.conj()))

    @classmethod
    def maximally_mixed(cls, dim: int) -> "DensityMatrix":
        return cls(np.eye(dim, dtype=complex) / dim)

    def eigenvalues(self) -> np.ndarray:
        return np.linalg.eigvalsh(self.matrix)

    def purity(self) -> float:
        return float(np.real(np.trace(self.matrix @ self.matrix)))

    def __array__(self, dtype=None, copy=None):
        return self.matrix if dtype is None else self.matrix.astype(dtype)


def as_density(rho) -> DensityMatrix:
    return rho if isinstance(rho, DensityMatrix) else DensityMatrix(rho)


def random_hermitian(dim: int, rng: np.random.Generator, scale: float = 1.0) -> np.ndarray:
    a = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    return scale * (a + a.conj().T) / 2


def random_density(dim: int, rng: np.random.Generator, rank: int | None = None) -> DensityMatrix:
    """Random density matrix of the given rank (full rank by default)."""
    k = dim if rank is None else rank
    g = rng.normal(size=(dim, k)) + 1j * rng.normal(size=(dim, k))
    m = g @ g.conj().T
    m = (m + m.conj().T) / 2
    return DensityMatrix(m / np.trace(m).real)


# ---------------------------------------------------------------------------
# q-exponential
# ---------------------------------------------------------------------------

def _is_integer(p: float) -> bool:
    return float(p).is_integer()


def q_exp(x: complex, q: float) -> complex:
    """Tsallis q-exponential ``[1 + (1-q) x]**(1/(1-q))`` on the principal branch.

    ``q == 1`` returns ``exp(x)`` directly.

    Raises
    ------
    PoleError
        If the base is zero and the exponent is negative.
    BranchCutError
        If the base lies on the negative real axis and the exponent is not an
        integer.
    """
    x = complex(x)
    if q == 1:
        return cmath.exp(x)
    base = 1 + (1 - q) * x
    p = 1 / (1 - q)
    if base == 0:
        if p < 0:
            raise PoleError(f"q_exp pole at x={x}, q={q}")
        return 0j
    if base.imag == 0 and base.real < 0 and not _is_integer(p):
        raise BranchCutError(f"base {base.real} on the negative real axis with exponent {p}")
    if _is_integer(p):
        return complex(base ** int(p))
    return complex(cmath.exp(p * cmath.log(base)))


def q_exp_array(x, q: float) -> np.ndarray:
    """Vectorised :func:`q_exp` for arrays of complex arguments.

    The logarithm of the base is evaluated as ``log1p`` of the deviation so
    that ``q`` close to 1 does not lose precision.
    """
    x = np.asarray(x, dtype=complex)
    if q == 1:
        return np.exp(x)
    w = (1 - q) * x
    base = 1 + w
    p = 1 / (1 - q)
    zero = base == 0
    if np.any(zero) and p < 0:
        raise PoleError(f"q_exp pole for q={q}")
    if not _is_integer(p) and np.any((base.imag == 0) & (base.real < 0)):
        raise BranchCutError(f"q_exp argument on the branch cut for q={q}")
    with np.errstate(divide="ignore"):
        log_mod = 0.5 * np.log1p(2 * w.real + (w.real**2 + w.imag**2))
    log_base = log_mod + 1j * np.angle(base)
    out = np.exp(p * log_base)
    out[zero] = 0
    return out


# ---------------------------------------------------------------------------
# excitation distributions
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class NumberDistribution:
    """Vibrational excitation probabilities P_n on a truncated Fock ladder."""

    probs: np.ndarray

    def __post_init__(self):
        p = np.array(self.probs, dtype=float)
        if p.ndim != 1 or p.size == 0:
            raise ValueError("probabilities must be a non-empty 1-d sequence")
        if np.any(p < 0) or not np.all(np.isfinite(p)):
            raise ValueError("probabilities must be finite and non-negative")
        s = math.fsum(p)
        if s < 1 - TRUNCATION_BUDGET or s > 1 + 1e-12:
            raise ValueError(f"probabilities sum to {s!r}, outside [1-{TRUNCATION_BUDGET:g}, 1]")
        p.setflags(write=False)
        object.__setattr__(self, "probs", p)

    @property
    def dim(self) -> int:
        return self.probs.size

    def total(self) -> float:
        return math.fsum(self.probs)

    def support(self) -> np.ndarray:
        return np.flatnonzero(self.probs > 0)


def fock_distribution(n0: int, dim: int) -> NumberDistribution:
    if dim < 1:
        raise ValueError("dim must be positive")
    if not 0 <= n0 < dim:
        raise IndexError(f"Fock level {n0} outside ladder of size {dim}")
    p = np.zeros(dim)
    p[n0] = 1.0
    return NumberDistribution(p)


def _poisson_terms(nbar: float, dim: int) -> list[float]:
    terms = [math.exp(-nbar)]
    for n in range(dim - 1):
        terms.append(terms[-1] * nbar / (n + 1))
    return terms


def coherent_dim(nbar: float, budget: float = TRUNCATION_BUDGET) -> int:
    """Smallest ladder size whose Poisson tail mass is below ``budget``."""
    if nbar < 0:
        raise ValueError("nbar must be non-negative")
    term, acc, n = math.exp(-nbar), 0.0, 0
    while True:
        acc += term
        if 1 - acc < budget:
            return n + 1
        term *= nbar / (n + 1)
        n += 1


def coherent_distribution(nbar: float, dim: int) -> NumberDistribution:
    """Poissonian excitation distribution of a coherent state with mean ``nbar``.

    Raises
    ------
    TruncationError
        If the probability beyond level ``dim - 1`` exceeds the truncation
        budget. The message names the smallest adequate ``dim``.
    """
    if nbar < 0:
        raise ValueError("nbar must be non-negative")
    if dim < 1:
        raise ValueError("dim must be positive")
    terms = _poisson_terms(nbar, dim)
    tail = 1 - math.fsum(terms)
    if tail >= TRUNCATION_BUDGET:
        raise TruncationError(
            f"tail mass {tail:.3e} beyond dim={dim} exceeds {TRUNCATION_BUDGET:g}; "
            f"need dim >= {coherent_dim(nbar)}")
    return NumberDistribution(np.array(terms))


# ---------------------------------------------------------------------------
# special functions and entropy
# ---------------------------------------------------------------------------

def laguerre_assoc(n: int, alpha: float, x):
    """Associated Laguerre polynomial L_n^alpha(x) by upward recurrence.

    ``x`` may be a scalar or an array.
    """
    if n < 0:
        raise ValueError("n must be non-negative")
    if n > LAGUERRE_MAX_ORDER:
        raise ValueError(f"order {n} exceeds {LAGUERRE_MAX_ORDER}")
    x = np.asarray(x, dtype=float)
    prev = np.ones_like(x)
    if n == 0:
        return prev if prev.ndim else float(prev)
    cur = 1 + alpha - x
    for k in range(1, n):
        prev, cur = cur, ((2 * k + 1 + alpha - x) * cur - (k + alpha) * prev) / (k + 1)
    return cur if cur.ndim else float(cur)


def tsallis_entropy(rho, q: float) -> float:
    """Tsallis entropy ``(1 - Tr rho**q) / (q - 1)``; von Neumann entropy at q = 1."""
    lam = np.clip(as_density(rho).eigenvalues(), 0.0, None)
    lam = lam[lam > 0]
    if q == 1:
        return float(-np.sum(lam * np.log(lam)))
    return float((1 - np.sum(lam**q)) / (q - 1))
