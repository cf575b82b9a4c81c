"""Monte Carlo checks of genericity on Erdos-Renyi graphs with random potentials."""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np

from .evolution import resolving_times, sample_intensity, to_coefficients
from .graph import Graph, build_hamiltonian, is_connected
from .retrieval import phase_aligned_distance, retrieve
from .spectral import eigendecompose, spectrum_report
from .errors import GraphaseError

SUCCESS_TOL = 1e-7
FLAGS = ("connected", "simple", "dissociated", "property_s", "attempted", "certified", "success")


@dataclass(frozen=True)
class TrialConfig:
    n: int
    p: float
    trials: int = 100
    seed: int = 0
    potential: str = "uniform"  # "uniform" or "zero"
    scale: float = 1.0
    sparse: bool = False
    tol_dissoc: float | None = None
    tol_support: float | None = None

    def __post_init__(self):
        if not 0.0 <= self.p <= 1.0:
            raise ValueError(f"edge probability must lie in [0, 1], got {self.p}")
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        if self.n < 1:
            raise ValueError("n must be >= 1")
        if self.potential not in ("uniform", "zero"):
            raise ValueError(f"unknown potential law {self.potential!r}")


@dataclass
class TrialStats:
    config: TrialConfig
    counts: dict
    rates: dict
    certified_failures: int
    records: list = field(default_factory=list)

    def to_dict(self, with_records: bool = False) -> dict:
        out = {
            "config": asdict(self.config),
            "trials": self.config.trials,
            "counts": self.counts,
            "rates": self.rates,
            "certified_failures": self.certified_failures,
        }
        if with_records:
            out["records"] = self.records
        return out


def sample_gnp(n: int, p: float, seed=None) -> Graph:
    """G(n, p): each unordered pair present independently with probability p."""
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"edge probability must lie in [0, 1], got {p}")
    rng = np.random.default_rng(seed)
    x, y = np.triu_indices(n, 1)
    keep = rng.random(x.size) < p
    return Graph(n, frozenset(zip(x[keep].tolist(), y[keep].tolist())))


def _random_state(es, rng, sparse: bool) -> np.ndarray:
    n = es.n
    if not sparse:
        u0 = rng.normal(size=n) + 1j * rng.normal(size=n)
        return u0 / np.linalg.norm(u0)
    a = rng.normal(size=n) + 1j * rng.normal(size=n)
    keep = rng.random(n) < 0.5
    keep[rng.integers(n)] = True
    a = np.where(keep, a, 0)
    return es.eigenvectors @ (a / np.linalg.norm(a))


def run_trial(cfg: TrialConfig, index: int) -> dict:
    """One reproducible trial; its random stream depends only on (seed, index)."""
    rng = np.random.default_rng([cfg.seed, index])
    g = sample_gnp(cfg.n, cfg.p, rng)
    if cfg.potential == "uniform":
        w = cfg.scale * rng.uniform(0.0, 1.0, cfg.n)
    else:
        w = np.zeros(cfg.n)
    rec = {"index": index, "seed": [cfg.seed, index], "edges": len(g.edges)}
    rec.update({k: False for k in FLAGS})
    rec["error"] = None
    rec["connected"] = is_connected(g)
    if not rec["connected"]:
        return rec
    h = build_hamiltonian(g, w)
    es = eigendecompose(h)
    rep = spectrum_report(h, cfg.tol_dissoc, cfg.tol_support, es=es)
    rec["simple"] = rep.simple
    rec["dissociated"] = rep.totally_dissociated
    rec["property_s"] = rep.property_s
    if not (rep.totally_dissociated and rep.property_s):
        return rec
    rec["attempted"] = True
    u0 = _random_state(es, rng, cfg.sparse)
    try:
        trace = sample_intensity(to_coefficients(u0, es), resolving_times(es, rng))
        res = retrieve(trace, es, cfg.tol_dissoc, cfg.tol_support)
    except GraphaseError as exc:
        rec["failure"] = str(exc)
        return rec
    err = phase_aligned_distance(res.u0, u0) / np.linalg.norm(u0)
    rec["error"] = err
    rec["certified"] = res.certified
    rec["success"] = bool(res.certified and err <= SUCCESS_TOL)
    return rec


def default_workers() -> int:
    try:
        env = int(os.environ.get("GRAPHASE_THREADS", "1"))
    except ValueError:
        env = 1
    return os.cpu_count() or 1 if env <= 0 else env


def run_trials(cfg: TrialConfig, workers: int | None = None) -> TrialStats:
    workers = default_workers() if workers is None else max(1, workers)
    indices = range(cfg.trials)
    if workers == 1:
        records = [run_trial(cfg, i) for i in indices]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            records = list(pool.map(lambda i: run_trial(cfg, i), indices))
    counts = {k: int(sum(r[k] for r in records)) for k in FLAGS}
    rates = {k: counts[k] / cfg.trials for k in FLAGS}
    bad = sum(1 for r in records if r["certified"] and r["error"] > SUCCESS_TOL)
    return TrialStats(cfg, counts, rates, bad, records)
