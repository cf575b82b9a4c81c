import json

import numpy as np
import pytest

from graphase.cli import main
from graphase.io import parse_trace_csv, state_from_list


def write(path, obj):
    path.write_text(json.dumps(obj))
    return str(path)


@pytest.fixture
def p3_json(tmp_path):
    return write(tmp_path / "p3.json", {"n": 3, "edges": [[1, 2], [2, 3]]})


def run(capsys, *args):
    code = main(list(args))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_check_p3(capsys, p3_json):
    code, out, _ = run(capsys, "check", p3_json)
    assert code == 0
    rep = json.loads(out)
    assert rep["property_s"] and rep["totally_dissociated"]


def test_check_k3_fails_hypotheses(capsys, tmp_path):
    path = write(tmp_path / "k3.json", {"n": 3, "edges": [[1, 2], [2, 3], [1, 3]]})
    code, out, _ = run(capsys, "check", path)
    assert code == 2
    assert json.loads(out)["simple"] is False


def test_simulate_retrieve_round_trip(capsys, tmp_path, p3_json):
    u0 = [[0.2, 1.0], [-0.7, 0.1], [0.4, -0.3]]
    state = write(tmp_path / "s.json", u0)
    csv_path = tmp_path / "t.csv"
    code, _, _ = run(capsys, "simulate", p3_json, state, "-o", str(csv_path))
    assert code == 0
    trace = parse_trace_csv(csv_path.read_text())
    assert trace.values.shape == (28, 3)
    header = csv_path.read_text().splitlines()[0]
    assert header == "t,x1,x2,x3"
    code, out, _ = run(capsys, "retrieve", p3_json, str(csv_path))
    assert code == 0
    res = json.loads(out)
    assert res["certified"] and res["pivot"] == 1
    got = state_from_list(res["u0"])
    want = state_from_list(u0)
    c = np.vdot(got, want) / abs(np.vdot(got, want))
    assert np.linalg.norm(c * got - want) <= 1e-7 * np.linalg.norm(want)


def test_simulate_explicit_times(capsys, tmp_path, p3_json):
    state = write(tmp_path / "s.json", [[1, 0], [0, 0], [0, 0]])
    code, out, _ = run(capsys, "simulate", p3_json, state, "--times", "0,0.5,1")
    assert code == 0
    trace = parse_trace_csv(out)
    np.testing.assert_allclose(trace.times, [0, 0.5, 1])
    np.testing.assert_allclose(trace.values[0], [1, 0, 0], atol=1e-15)
    code, out, _ = run(capsys, "simulate", p3_json, state, "--t0", "0", "--t1", "2", "--steps", "5")
    assert code == 0 and len(parse_trace_csv(out).times) == 5


def test_csv_has_17_digits(capsys, tmp_path, p3_json):
    state = write(tmp_path / "s.json", [[1, 0], [0, 0], [0, 0]])
    _, out, _ = run(capsys, "simulate", p3_json, state, "--times", "0.3")
    row = out.splitlines()[1].split(",")
    assert row[1] == format(float(row[1]), ".17g")


def test_simulate_dimension_error(capsys, tmp_path, p3_json):
    state = write(tmp_path / "s.json", [[1, 0]])
    code, _, err = run(capsys, "simulate", p3_json, state)
    assert code == 1 and "length" in err


def test_malformed_json_reports_location(capsys, tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text('{"n": 3,\n "edges": [[1, 2],, ]}')
    code, _, err = run(capsys, "check", str(bad))
    assert code == 1 and "bad.json:2:" in err


@pytest.mark.parametrize("graph, fragment", [
    ({"edges": []}, "missing field 'n'"),
    ({"n": 3, "edges": [[1, 1]]}, "self-loop"),
    ({"n": 3, "edges": [], "potential": [1, 2]}, "potential"),
    ({"n": "3", "edges": []}, "integer"),
])
def test_bad_graph_fields(capsys, tmp_path, graph, fragment):
    code, _, err = run(capsys, "check", write(tmp_path / "g.json", graph))
    assert code == 1 and fragment in err


def test_malformed_csv_reports_line(capsys, tmp_path, p3_json):
    csv_path = tmp_path / "t.csv"
    csv_path.write_text("t,x1,x2,x3\n0,1,0,0\n0.5,1,oops,0\n")
    code, _, err = run(capsys, "retrieve", p3_json, str(csv_path))
    assert code == 1 and "t.csv:3" in err


def test_retrieve_non_dissociated_is_error(capsys, tmp_path):
    path = write(tmp_path / "k3.json", {"n": 3, "edges": [[1, 2], [2, 3], [1, 3]]})
    state = write(tmp_path / "s.json", [1, 0, 0])
    csv_path = tmp_path / "t.csv"
    run(capsys, "simulate", path, state, "--t0", "0", "--t1", "5", "--steps", "40", "-o", str(csv_path))
    code, _, err = run(capsys, "retrieve", path, str(csv_path))
    assert code == 1 and "dissociated" in err


def counterexample_files(capsys, tmp_path, *args):
    code, out, _ = run(capsys, "counterexample", *args)
    assert code == 0
    data = json.loads(out)
    return data, write(tmp_path / "g.json", data["graph"])


def test_support_gap_cli_pipeline(capsys, tmp_path):
    data, graph = counterexample_files(capsys, tmp_path, "support-gap", "--seed", "4")
    v = data["verification"]
    assert v["max_modulus_deviation"] <= 1e-10
    assert v["phase_aligned_distance"] > 0.5 * v["norm"]
    for key in ("u0", "v0"):
        state = write(tmp_path / f"{key}.json", data[key])
        csv_path = tmp_path / f"{key}.csv"
        assert run(capsys, "simulate", graph, state, "-o", str(csv_path))[0] == 0
        code, out, _ = run(capsys, "retrieve", graph, str(csv_path))
        assert code == 3
        assert json.loads(out)["certified"] is False


def test_complete_graph_cli(capsys, tmp_path):
    data, _ = counterexample_files(capsys, tmp_path, "complete-graph", "--n", "5")
    assert data["verification"]["max_modulus_deviation"] <= 1e-10
    code, _, _ = run(capsys, "counterexample", "complete-graph", "--n", "2")
    assert code == 1


def test_lemma_cli(capsys):
    code, out, _ = run(capsys, "counterexample", "lemma")
    data = json.loads(out)
    assert code == 0 and data["lambda"] == pytest.approx(1 - 2**-0.5)
    code, out, _ = run(capsys, "counterexample", "lemma", "--n", "20", "--seed", "3")
    ver = json.loads(out)["verification"]
    assert ver["relative_inner_product"] <= 1e-10 and ver["max_modulus_deviation"] <= 1e-10


def test_disconnected_cli(capsys, tmp_path):
    graph = write(tmp_path / "g.json", {"n": 4, "edges": [[1, 2], [3, 4]]})
    state = write(tmp_path / "s.json", [[1, 0], [0, 0.5], [-0.3, 0], [2, 0]])
    code, out, _ = run(capsys, "counterexample", "disconnected", "--graph", graph, "--state", state,
                       "--phases", "[[1, 0], [0, 1]]")
    data = json.loads(out)
    assert code == 0
    assert data["components"] == [[1, 2], [3, 4]]
    assert data["verification"]["max_modulus_deviation"] <= 1e-10
    assert data["verification"]["phase_aligned_distance"] > 0


def test_trials_cli(capsys, tmp_path):
    records = tmp_path / "r.jsonl"
    code, out, _ = run(capsys, "trials", "--n", "6", "--p", "0.6", "--trials", "5", "--seed", "2",
                       "--records", str(records))
    assert code == 0
    stats = json.loads(out)
    assert stats["trials"] == 5 and set(stats["rates"]) >= {"connected", "simple", "dissociated", "property_s"}
    assert len(records.read_text().splitlines()) == 5


def test_help_lists_flags(capsys):
    code, out, _ = run(capsys, "trials", "--help")
    assert code == 0
    for flag in ("--n", "--p", "--trials", "--seed", "--potential", "--scale", "--records"):
        assert flag in out


def test_unknown_command(capsys):
    code, _, err = run(capsys, "bogus")
    assert code == 1 and "bogus" in err
