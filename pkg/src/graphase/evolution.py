"""Unitary evolution u(t) = exp(-iHt) u0 and sampled intensity traces.

The eigenbasis route (:func:`evolve`) is the production path;
:func:`evolve_direct` exponentiates the dense matrix by scaling and
squaring and never touches the eigendecomposition, so the two can check
each other.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DimensionError
from .graph import Hamiltonian
from .spectral import EigenSystem

OVERSAMPLING = 4


@dataclass(frozen=True, eq=False)
class CoefficientVector:
    a: np.ndarray
    basis: EigenSystem

    @property
    def n(self) -> int:
        return self.a.shape[0]

    def norm(self) -> float:
        return float(np.linalg.norm(self.a))


@dataclass(frozen=True, eq=False)
class IntensityTrace:
    times: np.ndarray
    values: np.ndarray  # values[s, m] = |u(times[s], m)|^2

    @property
    def n(self) -> int:
        return self.values.shape[1]


def as_state(u0, n: int | None = None) -> np.ndarray:
    u0 = np.asarray(u0, dtype=complex).reshape(-1)
    if n is not None and u0.shape[0] != n:
        raise DimensionError(f"state has length {u0.shape[0]}, expected {n}")
    return u0


def to_coefficients(u0, es: EigenSystem) -> CoefficientVector:
    u0 = as_state(u0, es.n)
    return CoefficientVector(es.eigenvectors.T @ u0, es)


def from_coefficients(c: CoefficientVector) -> np.ndarray:
    return c.basis.eigenvectors @ c.a


def coefficients(a, es: EigenSystem) -> CoefficientVector:
    """Wrap raw eigenbasis amplitudes."""
    return CoefficientVector(as_state(a, es.n), es)


def evolve_many(c: CoefficientVector, times) -> np.ndarray:
    """States at each time as a (T, n) array."""
    times = np.asarray(times, dtype=float).reshape(-1)
    phases = np.exp(-1j * np.outer(times, c.basis.eigenvalues))
    return (phases * c.a) @ c.basis.eigenvectors.T


def evolve(c: CoefficientVector, t: float) -> np.ndarray:
    return evolve_many(c, [t])[0]


def sample_intensity(c: CoefficientVector, times) -> IntensityTrace:
    times = np.asarray(times, dtype=float).reshape(-1)
    if not np.all(np.isfinite(times)):
        raise ValueError("sample times must be finite")
    u = evolve_many(c, times)
    values = u.real**2 + u.imag**2
    return IntensityTrace(times.copy(), values)


def frequency_count(n: int) -> int:
    """Size of {lambda_j - lambda_k : j != k} plus the zero frequency."""
    return n * (n - 1) + 1


def default_times(es: EigenSystem) -> np.ndarray:
    """Uniform grid t_s = s * tau with tau = pi / (2 * max(spread, 1)).

    ``spread`` is lambda_n - lambda_1, the largest frequency in the trace.
    T is ``OVERSAMPLING`` times the frequency count.
    """
    lam = es.eigenvalues
    spread = float(lam[-1] - lam[0]) if lam.size else 0.0
    tau = math.pi / (2.0 * max(spread, 1.0))
    return tau * np.arange(OVERSAMPLING * frequency_count(es.n))


def resolving_times(es: EigenSystem, rng=None, cycles: float = 8.0) -> np.ndarray:
    """Random times spread over a window long enough to separate close frequencies.

    The window spans ``cycles`` periods of the smallest gap between
    distinct frequencies, and never less than the uniform default window.
    Sample count matches :func:`default_times`.
    """
    from .spectral import difference_gaps

    rng = np.random.default_rng(rng)
    count = OVERSAMPLING * frequency_count(es.n)
    base = default_times(es)
    window = float(base[-1]) if base.size > 1 else 1.0
    eig_gap, diff_gap = difference_gaps(es.eigenvalues)
    gap = min(diff_gap, 2 * eig_gap)
    if np.isfinite(gap) and gap > 0:
        window = max(window, cycles * 2 * math.pi / gap)
    return np.sort(rng.uniform(0.0, window, size=count))


def expm_taylor(a: np.ndarray) -> np.ndarray:
    """Dense matrix exponential by scaling and squaring with a Taylor core."""
    a = np.asarray(a, dtype=complex)
    n = a.shape[0]
    norm = np.linalg.norm(a, 1)
    squarings = max(0, int(math.ceil(math.log2(norm / 0.5)))) if norm > 0.5 else 0
    scaled = a / (2.0**squarings)
    result = np.eye(n, dtype=complex)
    term = np.eye(n, dtype=complex)
    for k in range(1, 30):
        term = term @ scaled / k
        result = result + term
        if np.linalg.norm(term, 1) <= 1e-18 * np.linalg.norm(result, 1):
            break
    for _ in range(squarings):
        result = result @ result
    return result


def evolve_direct(h: Hamiltonian, u0, t: float) -> np.ndarray:
    u0 = as_state(u0, h.n)
    return expm_taylor(-1j * t * np.asarray(h.matrix, dtype=float)) @ u0
