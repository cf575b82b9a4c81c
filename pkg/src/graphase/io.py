"""JSON/CSV readers and writers for graphs, states and intensity traces."""

from __future__ import annotations

import csv
import io
import json

import numpy as np

from .errors import DimensionError, GraphaseError, GraphError
from .evolution import IntensityTrace
from .graph import Graph, as_potential


class InputError(GraphaseError, ValueError):
    pass


def fmt(x: float) -> str:
    return format(float(x), ".17g")


def _load_json(path):
    try:
        with open(path) as fh:
            return json.load(fh)
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}:{exc.lineno}:{exc.colno}: malformed JSON: {exc.msg}") from None
    except OSError as exc:
        raise InputError(f"{path}: {exc.strerror}") from None


def graph_from_dict(data, source="graph") -> tuple[Graph, np.ndarray]:
    if not isinstance(data, dict):
        raise InputError(f"{source}: expected a JSON object with 'n' and 'edges'")
    for key in ("n", "edges"):
        if key not in data:
            raise InputError(f"{source}: missing field {key!r}")
    n = data["n"]
    if not isinstance(n, int) or isinstance(n, bool):
        raise InputError(f"{source}: field 'n' must be an integer, got {n!r}")
    if not isinstance(data["edges"], list):
        raise InputError(f"{source}: field 'edges' must be a list of [x, y] pairs")
    try:
        g = Graph.from_edges(n, data["edges"])
        w = as_potential(data.get("potential"), n)
    except (GraphError, DimensionError, TypeError, ValueError) as exc:
        raise InputError(f"{source}: {exc}") from None
    return g, w


def load_graph(path) -> tuple[Graph, np.ndarray]:
    return graph_from_dict(_load_json(path), str(path))


def graph_to_dict(g: Graph, w=None) -> dict:
    out = {"n": g.n, "edges": [list(e) for e in g.edge_list()]}
    if w is not None:
        out["potential"] = [float(x) for x in w]
    return out


def state_from_list(data, source="state") -> np.ndarray:
    if not isinstance(data, list):
        raise InputError(f"{source}: expected a JSON array of [re, im] pairs")
    out = np.zeros(len(data), dtype=complex)
    for i, item in enumerate(data):
        try:
            if isinstance(item, (int, float)) and not isinstance(item, bool):
                out[i] = float(item)
            else:
                re, im = item
                out[i] = complex(float(re), float(im))
        except (TypeError, ValueError):
            raise InputError(f"{source}: entry #{i} is not a number or [re, im] pair: {item!r}") from None
    return out


def load_state(path) -> np.ndarray:
    return state_from_list(_load_json(path), str(path))


def state_to_list(u) -> list:
    return [[float(z.real), float(z.imag)] for z in np.asarray(u, dtype=complex)]


def trace_to_csv(trace: IntensityTrace) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["t"] + [f"x{m + 1}" for m in range(trace.n)])
    for t, row in zip(trace.times, trace.values):
        writer.writerow([fmt(t)] + [fmt(v) for v in row])
    return buf.getvalue()


def parse_trace_csv(text: str, source="trace") -> IntensityTrace:
    rows = list(csv.reader(io.StringIO(text)))
    if not rows:
        raise InputError(f"{source}: empty CSV")
    header = [h.strip() for h in rows[0]]
    n = len(header) - 1
    if n < 1 or header[0] != "t" or header[1:] != [f"x{m + 1}" for m in range(n)]:
        raise InputError(f"{source}:1: header must be t,x1,...,xn")
    times, values = [], []
    for lineno, row in enumerate(rows[1:], start=2):
        if not row:
            continue
        if len(row) != n + 1:
            raise InputError(f"{source}:{lineno}: expected {n + 1} fields, got {len(row)}")
        try:
            nums = [float(v) for v in row]
        except ValueError:
            raise InputError(f"{source}:{lineno}: non-numeric field in {row!r}") from None
        times.append(nums[0])
        values.append(nums[1:])
    if not times:
        raise InputError(f"{source}: no data rows")
    return IntensityTrace(np.array(times), np.array(values))


def load_trace(path) -> IntensityTrace:
    try:
        with open(path, newline="") as fh:
            text = fh.read()
    except OSError as exc:
        raise InputError(f"{path}: {exc.strerror}") from None
    return parse_trace_csv(text, str(path))
