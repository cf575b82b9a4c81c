"""Reconstruction of an initial state from its intensity trace.

Pipeline:

1. :func:`recover_cross_terms` fits each vertex's intensity with the
   trigonometric basis of the known frequencies lambda_j - lambda_k. A
   dissociated spectrum makes every off-diagonal coefficient
   ``C[j,k,m] = a_j conj(a_k) phi_j[m] phi_k[m]`` identifiable. The diagonal
   terms all share frequency zero, so a single vertex only reveals their
   sum; the per-mode magnitudes |a_j|^2 are separated afterwards using the
   rank-one structure of a a^* together with the zero-frequency sums of
   every vertex.
2. :func:`reconstruct` fixes the phase on the first active mode (the
   pivot) and chains every other mode to it through a support-graph
   witness vertex.

A result is certified only when the data admit no other state, up to
global phase. Pivot universality alone is not enough: the pivot
magnitude r is tied to the others through r * sum(others) = const, and
the mirrored root can be consistent with the data (two-vertex path, for
instance). Certification checks that mirror explicitly.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import networkx as nx
import numpy as np
from scipy.optimize import nnls

from .errors import DimensionError, IdentifiabilityError, IllConditionedError
from .evolution import IntensityTrace
from .spectral import (
    EigenSystem,
    SupportGraph,
    check_dissociated,
    default_tol_support,
    support_graph,
)

MAX_CONDITION = 1e8
AMPLITUDE_THRESHOLD = 1e-8
ACTIVE_EDGE_THRESHOLD = 1e-9
CONSISTENCY_TOL = 1e-6
AMBIGUITY_TOL = 1e-7
MAX_INDEPENDENT_SETS = 20000


@dataclass(frozen=True, eq=False)
class CrossTermTensor:
    C: np.ndarray  # C[j, k, m], complex
    residual: np.ndarray  # per-vertex least-squares residual norm
    dc: np.ndarray  # zero-frequency coefficient per vertex
    magnitudes: np.ndarray  # |a_j|^2 from the diagonal split
    condition: float

    @property
    def n(self) -> int:
        return self.C.shape[0]

    @property
    def total(self) -> float:
        return float(np.sum(self.dc))


@dataclass(frozen=True, eq=False)
class RetrievalResult:
    u0: np.ndarray
    a: np.ndarray
    pivot: int | None  # 1-based eigenbasis index
    certified: bool
    ambiguous_modes: tuple[int, ...] = ()  # 1-based
    diagnostics: dict = field(default_factory=dict)


def phase_aligned_distance(u, v) -> float:
    """min over |c| = 1 of ||u - c v||.

    The minimiser is the phase of <u, v>; the norm is evaluated directly
    because the expanded form loses half the digits to cancellation.
    """
    u = np.asarray(u, dtype=complex).reshape(-1)
    v = np.asarray(v, dtype=complex).reshape(-1)
    if u.shape != v.shape:
        raise DimensionError(f"length mismatch: {u.shape[0]} vs {v.shape[0]}")
    inner = np.vdot(v, u)
    c = inner / abs(inner) if abs(inner) > 0 else 1.0
    return float(np.linalg.norm(u - c * v))


def _pairs(n):
    # ordered so that lambda_j > lambda_k for sorted eigenvalues
    k, j = np.triu_indices(n, 1)
    return j, k


def design_matrix(eigenvalues, times) -> np.ndarray:
    """Columns: 1, then 2cos(w t), then 2sin(w t) for every w = lambda_j - lambda_k, j > k."""
    lam = np.asarray(eigenvalues, dtype=float)
    j, k = _pairs(lam.size)
    ph = np.outer(np.asarray(times, dtype=float), lam[j] - lam[k])
    return np.hstack([np.ones((ph.shape[0], 1)), 2 * np.cos(ph), 2 * np.sin(ph)])


def fit_trace(trace: IntensityTrace, es: EigenSystem):
    """Least-squares fit of every vertex column. Returns (dc, C_off, residual, cond)."""
    n = es.n
    times = np.asarray(trace.times, dtype=float)
    values = np.asarray(trace.values, dtype=float)
    if values.ndim != 2 or values.shape[1] != n:
        raise DimensionError(f"trace has {values.shape[-1]} vertex columns, expected {n}")
    if values.shape[0] != times.shape[0]:
        raise DimensionError("trace times and rows differ in length")
    if np.unique(times).size != times.size:
        raise ValueError("trace times must be pairwise distinct")
    a = design_matrix(es.eigenvalues, times)
    if times.size < a.shape[1]:
        raise IllConditionedError(
            f"{times.size} samples cannot determine {a.shape[1]} coefficients; sample more times")
    x, _, rank, sv = np.linalg.lstsq(a, values, rcond=None)
    cond = float(sv[0] / sv[-1]) if sv[-1] > 0 else np.inf
    if cond > MAX_CONDITION:
        raise IllConditionedError(
            f"frequency fit condition number {cond:.3g} exceeds {MAX_CONDITION:g}; "
            "sample more densely or over a longer window")
    residual = np.linalg.norm(a @ x - values, axis=0)
    p = n * (n - 1) // 2
    j, k = _pairs(n)
    c = np.zeros((n, n, n), dtype=complex)
    c[j, k, :] = x[1:1 + p] + 1j * x[1 + p:]
    c[k, j, :] = np.conj(c[j, k, :])
    return x[0].copy(), c, residual, cond


def pair_products(c_off, es: EigenSystem, sg: SupportGraph, tol_support: float):
    """G[j,k] ~ a_j conj(a_k), least squares over co-support vertices; NaN off Gamma_V."""
    phi = es.eigenvectors
    n = es.n
    g = np.full((n, n), np.nan, dtype=complex)
    for j, k in sg.edges:
        w = phi[:, j] * phi[:, k]
        mask = np.abs(w) > tol_support
        val = np.sum(c_off[j, k, mask] * w[mask]) / np.sum(w[mask] ** 2)
        g[j, k] = val
        g[k, j] = np.conj(val)
    return g


def _independent_sets(sg: SupportGraph, candidates):
    """Maximal independent sets of the support graph restricted to ``candidates``."""
    candidates = list(candidates)
    if not candidates:
        return [[]]
    comp = nx.Graph()
    comp.add_nodes_from(candidates)
    for a_ in candidates:
        for b in candidates:
            if a_ < b and not sg.has_edge(a_, b):
                comp.add_edge(a_, b)
    out = []
    for clique in nx.find_cliques(comp):
        out.append(sorted(clique))
        if len(out) >= MAX_INDEPENDENT_SETS:
            break
    return sorted(out)


def _best_on_sets(sq, target, sets):
    best, best_res = None, np.inf
    for s in sets:
        if not s:
            p, res = np.zeros(0), float(np.linalg.norm(target))
        else:
            p, res = nnls(sq[:, s], target)
        if best is None or res < best_res - 1e-14 * (1 + best_res):
            best, best_res = (s, p), res
    return best, best_res


def split_diagonal(dc, c_off, es: EigenSystem, sg: SupportGraph, tol_support: float) -> np.ndarray:
    """Estimate p_j = |a_j|^2 from the zero-frequency sums and the pair products."""
    n = es.n
    sq = es.eigenvectors**2  # sq[m, j]
    total = float(np.sum(dc))
    p = np.zeros(n)
    if total <= 0:
        return p
    g = pair_products(c_off, es, sg, tol_support)
    mag = np.where(np.isnan(g), 0.0, np.abs(g))
    active = nx.Graph()
    for j, k in sg.edges:
        if mag[j, k] > ACTIVE_EDGE_THRESHOLD * total:
            active.add_edge(j, k, weight=mag[j, k])

    target = np.asarray(dc, dtype=float).copy()
    bipartite = []
    in_component = set()
    for comp in nx.connected_components(active):
        nodes = sorted(comp)
        in_component.update(nodes)
        idx = {v: i for i, v in enumerate(nodes)}
        rows, rhs, wts = [], [], []
        for j, k, d in active.subgraph(nodes).edges(data=True):
            r = np.zeros(len(nodes))
            r[idx[j]] = r[idx[k]] = 1.0
            rows.append(r)
            rhs.append(2 * np.log(d["weight"]))
            wts.append(d["weight"])
        m = np.array(rows) * np.array(wts)[:, None]
        y, _, rank, _ = np.linalg.lstsq(m, np.array(rhs) * np.array(wts), rcond=None)
        if rank == len(nodes):
            vals = np.exp(y)
            p[nodes] = vals
            target -= sq[:, nodes] @ vals
        else:
            colour = nx.bipartite.color(active.subgraph(nodes))
            sigma = np.array([1.0 if colour[v] == 0 else -1.0 for v in nodes])
            base = np.exp(y)
            plus = [v for v in nodes if colour[v] == 0]
            minus = [v for v in nodes if colour[v] == 1]
            x_col = sq[:, plus] @ base[[idx[v] for v in plus]]
            y_col = sq[:, minus] @ base[[idx[v] for v in minus]]
            bipartite.append((nodes, sigma, base, x_col, y_col))

    # modes adjacent to an active mode would have produced a nonzero pair product
    isolated = [j for j in range(n) if j not in in_component
                and not any(sg.has_edge(j, k) for k in in_component)]

    if not bipartite:
        best, _ = _best_on_sets(sq, target, _independent_sets(sg, isolated))
        if best is not None and best[0]:
            p[best[0]] = best[1]
        return p

    cols = [c for b in bipartite for c in (b[3], b[4])] + [sq[:, j] for j in isolated]
    coef, _ = nnls(np.column_stack(cols), target)
    scales = []
    for i, _ in enumerate(bipartite):
        s_lin, t_lin = coef[2 * i], coef[2 * i + 1]
        if s_lin > 0 and t_lin > 0:
            scales.append(np.sqrt(s_lin / t_lin))
        elif s_lin > 0:
            scales.append(s_lin)
        elif t_lin > 0:
            scales.append(1.0 / t_lin)
        else:
            scales.append(1.0)
    iso_p = coef[2 * len(bipartite):]
    rest = target - (np.column_stack([sq[:, j] for j in isolated]) @ iso_p if isolated else 0.0)

    if len(bipartite) == 1:
        _, _, _, x_col, y_col = bipartite[0]
        sx, sy, sr = x_col.sum(), y_col.sum(), rest.sum()
        cands = [scales[0]]
        disc = sr * sr - 4 * sx * sy
        if disc >= 0:
            root = np.sqrt(disc)
            big = (sr + root) / (2 * sx)
            cands += [big, sy / (sx * big)]
        else:
            cands.append(sr / (2 * sx))
        cands = [s for s in cands if np.isfinite(s) and s > 0]
        scales[0] = min(cands, key=lambda s: np.linalg.norm(rest - s * x_col - y_col / s))

    for (nodes, sigma, base, _, _), s in zip(bipartite, scales):
        p[nodes] = base * s**sigma
    if isolated:
        p[isolated] = iso_p
    return p


def recover_cross_terms(trace: IntensityTrace, es: EigenSystem, tol_dissoc: float | None = None,
                        tol_support: float | None = None) -> CrossTermTensor:
    dissociated, gap = check_dissociated(es, tol_dissoc)
    if not dissociated:
        raise IdentifiabilityError(
            f"spectrum is not totally dissociated (smallest difference gap {gap:.3g}); "
            "frequencies collide and mode pairs cannot be separated")
    if tol_support is None:
        tol_support = default_tol_support(es)
    dc, c, residual, cond = fit_trace(trace, es)
    sg = support_graph(es, tol_support)
    p = split_diagonal(dc, c, es, sg, tol_support)
    sq = es.eigenvectors**2
    idx = np.arange(es.n)
    c[idx, idx, :] = (p[:, None] * sq.T).astype(complex)
    return CrossTermTensor(c, residual, dc, p, cond)


def _misfit(a, ct: CrossTermTensor, es: EigenSystem) -> float:
    phi = es.eigenvectors
    pred_dc = (phi**2) @ (np.abs(a) ** 2)
    amp = phi * a  # amp[m, j] = a_j phi_j[m]
    pred = amp.T[:, None, :] * np.conj(amp.T)[None, :, :]
    off = ~np.eye(es.n, dtype=bool)
    d_off = (pred - ct.C)[off]
    return float(np.sqrt(np.sum((pred_dc - ct.dc) ** 2) + np.sum(np.abs(d_off) ** 2)))


def _mirror_state(a, pivot):
    """The other coefficient vector sharing every pair product with the pivot."""
    r = abs(a[pivot]) ** 2
    others = float(np.sum(np.abs(a) ** 2) - r)
    if others <= 0:
        return None
    b = a * np.sqrt(r / others)
    b[pivot] = np.sqrt(others)
    return b


def reconstruct(ct: CrossTermTensor, es: EigenSystem, sg: SupportGraph | None = None,
                tol_dissoc: float | None = None, tol_support: float | None = None) -> RetrievalResult:
    n = es.n
    phi = es.eigenvectors
    if tol_support is None:
        tol_support = default_tol_support(es)
    if sg is None:
        sg = support_graph(es, tol_support)
    dissociated, _ = check_dissociated(es, tol_dissoc)
    sq = phi**2

    # magnitudes from the diagonal terms, least squares over support vertices
    mags = np.zeros(n)
    for j in range(n):
        mask = sq[:, j] > tol_support
        mags[j] = max(np.sum(ct.C[j, j, mask].real * sq[mask, j]) / np.sum(sq[mask, j] ** 2), 0.0)
    amp = np.sqrt(mags)
    diagnostics = {
        "residual": float(np.linalg.norm(ct.residual)),
        "condition": float(ct.condition),
        "magnitudes": mags.tolist(),
    }
    if amp.max() <= 0:
        return RetrievalResult(np.zeros(n, dtype=complex), np.zeros(n, dtype=complex), None,
                               dissociated, (), diagnostics)

    active = amp > AMPLITUDE_THRESHOLD * amp.max()
    pivot = int(np.flatnonzero(active)[0])
    a = np.zeros(n, dtype=complex)
    a[pivot] = amp[pivot]
    ambiguous = []
    for j in np.flatnonzero(active):
        if j == pivot:
            continue
        if sg.has_edge(j, pivot):
            m = sg.witness_of(j, pivot)
            a[j] = ct.C[j, pivot, m] / (a[pivot] * phi[m, j] * phi[m, pivot])
        else:
            ambiguous.append(int(j))
            a[j] = amp[j]

    total = max(ct.total, np.finfo(float).tiny)
    misfit = _misfit(a, ct, es)
    diagnostics["misfit"] = misfit / total
    universal = sg.is_universal(pivot)
    unique = False
    if dissociated and universal and not ambiguous:
        unique = _magnitudes_unique(a, pivot, ct, es, sg, misfit, total, diagnostics)
    certified = bool(dissociated and universal and not ambiguous and unique
                     and misfit <= CONSISTENCY_TOL * total)
    u0 = phi @ a
    return RetrievalResult(u0, a, pivot + 1, certified, tuple(j + 1 for j in ambiguous), diagnostics)


def _magnitudes_unique(a, pivot, ct, es, sg, misfit, total, diagnostics) -> bool:
    tol = max(AMBIGUITY_TOL * total, 100 * misfit)
    mirror = _mirror_state(a, pivot)
    if mirror is not None:
        alt = _misfit(mirror, ct, es)
        diagnostics["mirror_misfit"] = alt / total
        same = abs(abs(mirror[pivot]) ** 2 - abs(a[pivot]) ** 2) <= 1e-12 * total
        return bool(same or alt > tol)
    # single active mode: any rival must avoid the pivot and be independent in Gamma_V
    sq = es.eigenvectors**2
    rivals = [j for j in range(es.n) if j != pivot]
    sets = _independent_sets(sg, rivals)
    if len(sets) >= MAX_INDEPENDENT_SETS:
        return False
    _, res = _best_on_sets(sq, ct.dc, [s for s in sets if s])
    diagnostics["rival_misfit"] = res / total
    return bool(res > tol)


def retrieve(trace: IntensityTrace, es: EigenSystem, tol_dissoc: float | None = None,
             tol_support: float | None = None) -> RetrievalResult:
    """Fit the trace and reconstruct in one call."""
    if tol_support is None:
        tol_support = default_tol_support(es)
    ct = recover_cross_terms(trace, es, tol_dissoc, tol_support)
    sg = support_graph(es, tol_support)
    return reconstruct(ct, es, sg, tol_dissoc, tol_support)
