"""Constructions of distinct states whose intensity traces coincide."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import CounterexampleError, DimensionError
from .evolution import as_state, evolve_direct
from .graph import Graph, as_potential, build_hamiltonian, connected_components
from .retrieval import phase_aligned_distance
from .spectral import EigenSystem, SupportGraph, check_property_s

MODULUS_TOL = 1e-10


@dataclass(frozen=True, eq=False)
class EqualModulusPair:
    f: np.ndarray
    g: np.ndarray
    subspace_basis: np.ndarray | None = None

    def modulus_deviation(self) -> float:
        return float(np.max(np.abs(np.abs(self.f) - np.abs(self.g)))) if self.f.size else 0.0

    def inner(self) -> complex:
        return complex(np.vdot(self.g, self.f))  # <f, g> = sum f conj(g)


def random_equal_modulus_pair(n: int, rng=None) -> EqualModulusPair:
    rng = np.random.default_rng(rng)
    r = rng.uniform(0.1, 1.0, n)
    f = r * np.exp(2j * np.pi * rng.uniform(size=n))
    g = r * np.exp(2j * np.pi * rng.uniform(size=n))
    return EqualModulusPair(f, g)


def orthogonalize_pair(p: EqualModulusPair) -> tuple[EqualModulusPair, float]:
    """Turn an equal-modulus pair into an orthogonal one inside span{f, g}.

    Returns the new pair and the parameter lambda* used (0.0 when the input
    was already orthogonal).
    """
    f = as_state(p.f)
    g = as_state(p.g, f.size)
    nf, ng = np.linalg.norm(f), np.linalg.norm(g)
    if nf == 0 or phase_aligned_distance(f, g) <= 1e-6 * nf:
        raise CounterexampleError("degenerate pair: f is a unimodular multiple of g")
    inner = np.vdot(g, f)
    if abs(inner) <= 1e-12 * nf * ng:
        return EqualModulusPair(f, g, p.subspace_basis), 0.0
    if np.max(np.abs(np.abs(f) - np.abs(g))) > MODULUS_TOL * float(np.max(np.abs(f))):
        raise CounterexampleError("coordinates of f and g must have equal moduli")

    g = g * (inner / abs(inner))  # now <f, g> is real positive
    a = float(np.vdot(g, f).real)
    h = 0.5 * (f + g)
    b = 0.5 * (nf**2 + ng**2) + a
    c = float(np.vdot(h, h).real)
    # q(lam) = a - b lam + c lam^2; q(0) > 0 > q(1), smaller root in (0, 1)
    lam = 2 * a / (b + np.sqrt(max(b * b - 4 * a * c, 0.0)))
    return EqualModulusPair(f - lam * h, g - lam * h, p.subspace_basis), float(lam)


def complete_graph_pair(n: int) -> EqualModulusPair:
    """Two unimodular, orthogonal eigenvectors of -Laplacian on K_n (eigenvalue n)."""
    if n < 3:
        raise CounterexampleError(f"K_{n} has no equal-modulus eigenpair; need n >= 3")
    omega = np.exp(2j * np.pi / n)
    idx = np.arange(n)
    f = omega**idx
    g = omega ** (2 * idx)
    h = build_hamiltonian(Graph.complete(n)).matrix
    for v in (f, g):
        if np.linalg.norm(h @ v - n * v) > 1e-10 * n:
            raise CounterexampleError("eigenvector verification failed")
    basis = np.column_stack([omega ** (k * idx) / np.sqrt(n) for k in range(1, n)])
    return EqualModulusPair(f, g, basis)


def incomplete_support_counterexample(es: EigenSystem, sg: SupportGraph, anchor: int | None = None,
                                      anchor_weight: float = 1.0):
    """Sign-flip pair for a support graph that is not complete.

    ``anchor`` is a 0-based eigenbasis index with at least one non-neighbour
    (default: the first such). Every non-neighbour S of the anchor gets
    coefficient +1 in u0 and -1 in v0; the anchor gets ``anchor_weight`` in
    both. Returns ``(u0, v0, anchor, S)``.
    """
    if check_property_s(sg):
        raise CounterexampleError("support graph is complete; intensity determines the state")
    if anchor is None:
        anchor = next(j for j in range(sg.n) if not sg.is_universal(j))
    elif sg.is_universal(anchor):
        raise CounterexampleError(f"eigenbasis index {anchor + 1} is adjacent to every other index")
    s = [k for k in range(sg.n) if k != anchor and not sg.has_edge(anchor, k)]
    a = np.zeros(sg.n, dtype=complex)
    b = np.zeros(sg.n, dtype=complex)
    a[anchor] = b[anchor] = anchor_weight
    a[s] = 1.0
    b[s] = -1.0
    phi = es.eigenvectors
    return phi @ a, phi @ b, anchor, s


def support_gap_instance(rng=None, core: int = 4):
    """A connected graph with a dissociated spectrum and an incomplete support graph.

    Two pairs of pendant twins hang off opposite ends of a path. Each twin
    pair carries the antisymmetric eigenvector e_x - e_y, and the two
    such vectors have disjoint supports. Returns ``(graph, potential)``.
    """
    rng = np.random.default_rng(rng)
    n = core + 4
    edges = [(i, i + 1) for i in range(1, core)]
    edges += [(1, core + 1), (1, core + 2), (core, core + 3), (core, core + 4)]
    w = rng.uniform(0.0, 1.0, n)
    w[core + 1] = w[core]
    w[core + 3] = w[core + 2]
    return Graph.from_edges(n, edges), w


def disconnected_phase_family(g: Graph, w, u0, phases) -> np.ndarray:
    """Multiply u0 on each connected component by its own unimodular phase."""
    as_potential(w, g.n)
    u0 = as_state(u0, g.n)
    comps = connected_components(g)
    if len(comps) == 1:
        raise CounterexampleError("graph is connected; only global phases are available")
    phases = np.asarray(phases, dtype=complex).reshape(-1)
    if phases.size != len(comps):
        raise DimensionError(f"{phases.size} phases given for {len(comps)} components")
    if np.any(np.abs(np.abs(phases) - 1) > 1e-12):
        raise CounterexampleError("phases must have unit modulus")
    out = u0.copy()
    for c, comp in zip(phases, comps):
        idx = np.asarray(comp) - 1
        out[idx] = c * u0[idx]
    return out


def intensity_deviation(h, u0, v0, times) -> float:
    """Largest | |u(t,x)| - |v(t,x)| | over the given times, using the direct propagator."""
    dev = 0.0
    for t in np.asarray(times, dtype=float).reshape(-1):
        u = evolve_direct(h, u0, t)
        v = evolve_direct(h, v0, t)
        dev = max(dev, float(np.max(np.abs(np.abs(u) - np.abs(v)))))
    return dev

