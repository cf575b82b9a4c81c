"""Command line entry point: ``graphase <subcommand>``.

Exit codes: 0 success or certified, 1 input/numerical error, 2 hypothesis
check failed, 3 uncertified retrieval.
"""

from __future__ import annotations

import json
import sys

import click
import numpy as np

from . import counterexamples as cx
from .errors import GraphaseError
from .evolution import default_times, resolving_times, sample_intensity, to_coefficients
from .experiments import TrialConfig, run_trials
from .graph import build_hamiltonian, connected_components
from .io import (
    graph_to_dict,
    load_graph,
    load_state,
    load_trace,
    state_from_list,
    state_to_list,
    trace_to_csv,
)
from .retrieval import phase_aligned_distance, reconstruct, recover_cross_terms
from .spectral import eigendecompose, spectrum_report, support_graph

EXIT_OK, EXIT_ERROR, EXIT_HYPOTHESIS, EXIT_UNCERTIFIED = 0, 1, 2, 3


def _emit(obj, output=None):
    text = json.dumps(obj, indent=2)
    if output:
        with open(output, "w") as fh:
            fh.write(text + "\n")
    else:
        click.echo(text)


def _verification(h, u, v, rng, count=100, span=50.0):
    times = np.sort(rng.uniform(0.0, span, count))
    return {
        "sampled_times": count,
        "max_modulus_deviation": cx.intensity_deviation(h, u, v, times),
        "phase_aligned_distance": phase_aligned_distance(u, v),
        "norm": float(np.linalg.norm(u)),
    }


@click.group()
def cli():
    """Phase retrieval for the Schrodinger equation on finite graphs."""


@cli.command()
@click.argument("graph_json", type=click.Path(dir_okay=False))
@click.option("--tol-dissoc", type=float, default=None, help="Dissociation gap tolerance.")
@click.option("--tol-support", type=float, default=None, help="Support-graph product threshold.")
def check(graph_json, tol_dissoc, tol_support):
    """Report spectral hypotheses; exit 0 when both hold, 2 otherwise."""
    g, w = load_graph(graph_json)
    rep = spectrum_report(build_hamiltonian(g, w), tol_dissoc, tol_support)
    _emit(rep.to_dict())
    return EXIT_OK if rep.totally_dissociated and rep.property_s else EXIT_HYPOTHESIS


@cli.command()
@click.argument("graph_json", type=click.Path(dir_okay=False))
@click.argument("state_json", type=click.Path(dir_okay=False))
@click.option("--t0", type=float, default=None, help="First sample time.")
@click.option("--t1", type=float, default=None, help="Last sample time.")
@click.option("--steps", type=int, default=None, help="Number of evenly spaced samples in [t0, t1].")
@click.option("--times", "times_list", default=None, help="Explicit comma-separated sample times.")
@click.option("--grid", type=click.Choice(["resolving", "uniform"]), default="resolving",
              show_default=True, help="Automatic grid used when no times are given.")
@click.option("--seed", type=int, default=0, show_default=True, help="Seed for the resolving grid.")
@click.option("-o", "--output", type=click.Path(dir_okay=False), default=None, help="CSV destination.")
def simulate(graph_json, state_json, t0, t1, steps, times_list, grid, seed, output):
    """Write the intensity trace |u(t,x)|^2 of an initial state as CSV."""
    g, w = load_graph(graph_json)
    u0 = load_state(state_json)
    if u0.size != g.n:
        raise click.ClickException(f"state has length {u0.size} but graph has {g.n} vertices")
    es = eigendecompose(build_hamiltonian(g, w))
    if times_list is not None:
        try:
            times = np.array([float(t) for t in times_list.split(",") if t.strip()])
        except ValueError:
            raise click.ClickException(f"--times must be comma-separated numbers: {times_list!r}")
    elif steps is not None:
        if t0 is None or t1 is None or steps < 1:
            raise click.ClickException("--steps needs --t0, --t1 and a positive count")
        times = np.linspace(t0, t1, steps)
    elif grid == "uniform":
        times = default_times(es)
    else:
        times = resolving_times(es, seed)
    text = trace_to_csv(sample_intensity(to_coefficients(u0, es), times))
    if output:
        with open(output, "w", newline="") as fh:
            fh.write(text)
    else:
        click.echo(text, nl=False)
    return EXIT_OK


@cli.command()
@click.argument("graph_json", type=click.Path(dir_okay=False))
@click.argument("trace_csv", type=click.Path(dir_okay=False))
@click.option("--tol-dissoc", type=float, default=None)
@click.option("--tol-support", type=float, default=None)
@click.option("-o", "--output", type=click.Path(dir_okay=False), default=None, help="JSON destination.")
def retrieve(graph_json, trace_csv, tol_dissoc, tol_support, output):
    """Reconstruct u0 from an intensity trace; exit 0 if certified, 3 if not."""
    g, w = load_graph(graph_json)
    trace = load_trace(trace_csv)
    if trace.n != g.n:
        raise click.ClickException(f"trace has {trace.n} vertex columns but graph has {g.n} vertices")
    es = eigendecompose(build_hamiltonian(g, w))
    ct = recover_cross_terms(trace, es, tol_dissoc, tol_support)
    res = reconstruct(ct, es, support_graph(es, tol_support), tol_dissoc, tol_support)
    _emit({
        "u0": state_to_list(res.u0),
        "pivot": res.pivot,
        "certified": res.certified,
        "residual": float(np.linalg.norm(ct.residual)),
        "condition": float(ct.condition),
        "ambiguous_modes": list(res.ambiguous_modes),
    }, output)
    return EXIT_OK if res.certified else EXIT_UNCERTIFIED


@cli.group()
def counterexample():
    """Emit pairs of distinct states with identical intensity traces."""


@counterexample.command()
@click.option("--n", type=int, default=None, help="Random pair length (default: the 3-vector example).")
@click.option("--seed", type=int, default=0, show_default=True)
def lemma(n, seed):
    """Orthogonalize an equal-modulus pair inside its span."""
    if n is None:
        pair = cx.EqualModulusPair(np.array([1, 1, 1], complex), np.array([1, 1, -1], complex))
    else:
        pair = cx.random_equal_modulus_pair(n, seed)
    out, lam = cx.orthogonalize_pair(pair)
    nf, ng = np.linalg.norm(out.f), np.linalg.norm(out.g)
    _emit({
        "mode": "lemma",
        "input": {"f": state_to_list(pair.f), "g": state_to_list(pair.g)},
        "lambda": lam,
        "f": state_to_list(out.f),
        "g": state_to_list(out.g),
        "verification": {
            "relative_inner_product": abs(out.inner()) / (nf * ng),
            "max_modulus_deviation": out.modulus_deviation(),
        },
    })
    return EXIT_OK


@counterexample.command("complete-graph")
@click.option("--n", type=int, required=True, help="Vertex count (>= 3).")
@click.option("--seed", type=int, default=0, show_default=True)
def complete_graph(n, seed):
    """Equal-modulus eigenvector pair on K_n."""
    from .graph import Graph

    pair = cx.complete_graph_pair(n)
    g = Graph.complete(n)
    h = build_hamiltonian(g)
    _emit({
        "mode": "complete-graph",
        "graph": graph_to_dict(g),
        "f": state_to_list(pair.f),
        "g": state_to_list(pair.g),
        "verification": _verification(h, pair.f, pair.g, np.random.default_rng(seed)),
    })
    return EXIT_OK


@counterexample.command("support-gap")
@click.option("--graph", "graph_json", type=click.Path(dir_okay=False), default=None,
              help="Graph JSON with an incomplete support graph (default: built-in twin construction).")
@click.option("--seed", type=int, default=0, show_default=True)
def support_gap(graph_json, seed):
    """Sign-flip pair on an incomplete support graph."""
    rng = np.random.default_rng(seed)
    if graph_json is None:
        g, w = cx.support_gap_instance(rng)
    else:
        g, w = load_graph(graph_json)
    h = build_hamiltonian(g, w)
    es = eigendecompose(h)
    u0, v0, anchor, s = cx.incomplete_support_counterexample(es, support_graph(es))
    _emit({
        "mode": "support-gap",
        "graph": graph_to_dict(g, w),
        "anchor": anchor + 1,
        "flipped": [j + 1 for j in s],
        "u0": state_to_list(u0),
        "v0": state_to_list(v0),
        "verification": _verification(h, u0, v0, rng),
    })
    return EXIT_OK


@counterexample.command()
@click.option("--graph", "graph_json", type=click.Path(dir_okay=False), required=True)
@click.option("--state", "state_json", type=click.Path(dir_okay=False), required=True)
@click.option("--phases", default=None,
              help="JSON array of [re, im] unit phases, one per component (default: random).")
@click.option("--seed", type=int, default=0, show_default=True)
def disconnected(graph_json, state_json, phases, seed):
    """Independent phases on the components of a disconnected graph."""
    g, w = load_graph(graph_json)
    u0 = load_state(state_json)
    rng = np.random.default_rng(seed)
    comps = connected_components(g)
    if phases is None:
        c = np.exp(2j * np.pi * rng.uniform(size=len(comps)))
    else:
        try:
            c = state_from_list(json.loads(phases), "--phases")
        except json.JSONDecodeError as exc:
            raise click.ClickException(f"--phases: malformed JSON: {exc.msg}")
    uc = cx.disconnected_phase_family(g, w, u0, c)
    _emit({
        "mode": "disconnected",
        "components": comps,
        "phases": state_to_list(c),
        "u0": state_to_list(u0),
        "v0": state_to_list(uc),
        "verification": _verification(build_hamiltonian(g, w), u0, uc, rng),
    })
    return EXIT_OK


@cli.command()
@click.option("--n", type=int, required=True, help="Vertex count.")
@click.option("--p", type=float, required=True, help="Edge probability.")
@click.option("--trials", type=int, default=100, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--potential", type=click.Choice(["uniform", "zero"]), default="uniform", show_default=True)
@click.option("--scale", type=float, default=1.0, show_default=True, help="Potential multiplier.")
@click.option("--sparse", is_flag=True, help="Zero random eigen-coefficients of u0.")
@click.option("--records", type=click.Path(dir_okay=False), default=None, help="Per-trial JSONL output.")
def trials(n, p, trials, seed, potential, scale, sparse, records):
    """Genericity statistics on G(n, p) with random potentials."""
    cfg = TrialConfig(n=n, p=p, trials=trials, seed=seed, potential=potential, scale=scale, sparse=sparse)
    stats = run_trials(cfg)
    if records:
        with open(records, "w") as fh:
            for rec in stats.records:
                fh.write(json.dumps(rec) + "\n")
    _emit(stats.to_dict())
    return EXIT_OK


def main(argv=None) -> int:
    try:
        rv = cli.main(args=argv, prog_name="graphase", standalone_mode=False)
    except click.exceptions.Exit as exc:
        return exc.exit_code
    except click.exceptions.Abort:
        click.echo("aborted", err=True)
        return EXIT_ERROR
    except click.ClickException as exc:
        exc.show()
        return EXIT_ERROR
    except (GraphaseError, ValueError, OSError) as exc:
        click.echo(f"error: {exc}", err=True)
        return EXIT_ERROR
    return rv if isinstance(rv, int) else EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
