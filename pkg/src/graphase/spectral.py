"""Eigendecomposition of H and the two uniqueness hypotheses.

A spectrum is *totally dissociated* when the eigenvalues are distinct and
the map (j, k) -> lambda_j - lambda_k is injective on ordered pairs j != k.
The *support graph* links eigenbasis indices j, k whenever some vertex m
carries both phi_j and phi_k; property (S) asks for it to be complete.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import EigensolverError
from .graph import Hamiltonian

SIGN_THRESHOLD = 1e-12


@dataclass(frozen=True, eq=False)
class EigenSystem:
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray  # column j is phi_j

    @property
    def n(self) -> int:
        return self.eigenvalues.shape[0]

    def mode(self, j: int) -> np.ndarray:
        return self.eigenvectors[:, j]


def eigendecompose(h: Hamiltonian) -> EigenSystem:
    """Dense symmetric eigensolve with a fixed sign convention.

    Each eigenvector's first entry exceeding ``SIGN_THRESHOLD`` in absolute
    value is made positive.
    """
    try:
        lam, phi = np.linalg.eigh(np.asarray(h.matrix, dtype=float))
    except np.linalg.LinAlgError as exc:
        raise EigensolverError(f"eigensolver did not converge: {exc}") from exc
    phi = np.array(phi)
    for j in range(phi.shape[1]):
        col = phi[:, j]
        first = np.flatnonzero(np.abs(col) > SIGN_THRESHOLD)
        if first.size and col[first[0]] < 0:
            phi[:, j] = -col
    lam.setflags(write=False)
    phi.setflags(write=False)
    return EigenSystem(lam, phi)


def default_tol_dissoc(eigenvalues) -> float:
    lam = np.asarray(eigenvalues)
    return 1e-9 * max(1.0, float(np.max(np.abs(lam)))) if lam.size else 1e-9


def default_tol_support(es: EigenSystem) -> float:
    return 1e-10 * float(np.max(es.eigenvectors**2))


def difference_gaps(eigenvalues):
    """Return (min eigenvalue gap, min gap within the ordered-pair difference multiset)."""
    lam = np.sort(np.asarray(eigenvalues, dtype=float))
    n = lam.size
    if n < 2:
        return np.inf, np.inf
    eig_gap = float(np.min(np.diff(lam)))
    j, k = np.where(~np.eye(n, dtype=bool))
    diffs = np.sort(lam[j] - lam[k])
    diff_gap = float(np.min(np.diff(diffs))) if diffs.size > 1 else np.inf
    return eig_gap, diff_gap


def check_dissociated(es, tol: float | None = None) -> tuple[bool, float]:
    """Decide total dissociation; ``es`` may be an EigenSystem or raw eigenvalues."""
    lam = es.eigenvalues if isinstance(es, EigenSystem) else np.asarray(es, dtype=float)
    if tol is None:
        tol = default_tol_dissoc(lam)
    if tol <= 0:
        raise ValueError("tol must be positive")
    eig_gap, diff_gap = difference_gaps(lam)
    return bool(eig_gap > tol and diff_gap > tol), diff_gap


@dataclass(frozen=True, eq=False)
class SupportGraph:
    """Co-support graph on eigenbasis indices (0-based internally).

    ``witness[(j, k)]`` (j < k) is the vertex maximising |phi_j[m] phi_k[m]|.
    """

    n: int
    edges: frozenset[tuple[int, int]]
    witness: dict

    def has_edge(self, j: int, k: int) -> bool:
        return (min(j, k), max(j, k)) in self.edges

    def witness_of(self, j: int, k: int) -> int:
        return self.witness[(min(j, k), max(j, k))]

    def neighbors(self, j: int) -> list[int]:
        return [k for k in range(self.n) if k != j and self.has_edge(j, k)]

    def is_universal(self, j: int) -> bool:
        return all(self.has_edge(j, k) for k in range(self.n) if k != j)

    def universal_vertices(self) -> list[int]:
        return [j for j in range(self.n) if self.is_universal(j)]


def support_graph(es: EigenSystem, threshold: float | None = None) -> SupportGraph:
    if threshold is None:
        threshold = default_tol_support(es)
    if threshold <= 0:
        raise ValueError("threshold must be positive")
    phi = es.eigenvectors
    n = es.n
    # prod[j, k, m] = |phi_j[m] phi_k[m]|
    prod = np.abs(phi.T[:, None, :] * phi.T[None, :, :])
    best = prod.max(axis=2)
    arg = prod.argmax(axis=2)
    edges, witness = set(), {}
    for j in range(n):
        for k in range(j + 1, n):
            if best[j, k] > threshold:
                edges.add((j, k))
                witness[(j, k)] = int(arg[j, k])
    return SupportGraph(n, frozenset(edges), witness)


def check_property_s(sg: SupportGraph) -> bool:
    return len(sg.edges) == sg.n * (sg.n - 1) // 2


@dataclass(frozen=True)
class SpectrumReport:
    simple: bool
    totally_dissociated: bool
    min_eigenvalue_gap: float
    min_difference_gap: float
    property_s: bool
    universal_vertices: tuple[int, ...]  # 1-based

    def to_dict(self) -> dict:
        def finite(x):
            return None if not np.isfinite(x) else float(x)

        return {
            "simple": self.simple,
            "totally_dissociated": self.totally_dissociated,
            "min_eigenvalue_gap": finite(self.min_eigenvalue_gap),
            "min_difference_gap": finite(self.min_difference_gap),
            "property_s": self.property_s,
            "universal_vertices": list(self.universal_vertices),
        }


def spectrum_report(h: Hamiltonian, tol_dissoc: float | None = None,
                    tol_support: float | None = None, es: EigenSystem | None = None) -> SpectrumReport:
    if es is None:
        es = eigendecompose(h)
    if tol_dissoc is None:
        tol_dissoc = default_tol_dissoc(es.eigenvalues)
    dissociated, diff_gap = check_dissociated(es, tol_dissoc)
    eig_gap, _ = difference_gaps(es.eigenvalues)
    sg = support_graph(es, tol_support)
    return SpectrumReport(
        simple=bool(eig_gap > tol_dissoc),
        totally_dissociated=dissociated,
        min_eigenvalue_gap=eig_gap,
        min_difference_gap=diff_gap,
        property_s=check_property_s(sg),
        universal_vertices=tuple(j + 1 for j in sg.universal_vertices()),
    )
