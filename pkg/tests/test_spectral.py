import itertools

import numpy as np
import pytest
import sympy
from hypothesis import given, settings, strategies as st

from graphase.graph import Graph, build_hamiltonian
from graphase.spectral import (
    SupportGraph,
    check_dissociated,
    check_property_s,
    eigendecompose,
    spectrum_report,
    support_graph,
)

from conftest import random_instance


def charpoly_roots(matrix):
    # exact oracle: roots of det(H - x I) with multiplicity
    lam = sympy.symbols("lam")
    poly = sympy.Matrix(matrix.astype(int)).charpoly(lam)
    roots = sympy.roots(poly.as_expr(), lam)
    return sorted(float(r) for r, mult in roots.items() for _ in range(mult))


def test_k3_eigenvalues(k3):
    h = build_hamiltonian(k3)
    assert charpoly_roots(h.matrix) == [0.0, 3.0, 3.0]
    np.testing.assert_allclose(eigendecompose(h).eigenvalues, [0, 3, 3], atol=1e-12)


def test_p3_eigensystem(p3):
    h = build_hamiltonian(p3)
    assert charpoly_roots(h.matrix) == [0.0, 1.0, 3.0]
    es = eigendecompose(h)
    np.testing.assert_allclose(es.eigenvalues, [0, 1, 3], atol=1e-12)
    expected = np.column_stack([
        np.array([1, 1, 1]) / np.sqrt(3),
        np.array([1, 0, -1]) / np.sqrt(2),
        np.array([1, -2, 1]) / np.sqrt(6),
    ])
    np.testing.assert_allclose(es.eigenvectors, expected, atol=1e-12)


def test_single_vertex_eigensystem():
    es = eigendecompose(build_hamiltonian(Graph(1), [5.0]))
    np.testing.assert_allclose(es.eigenvalues, [5.0])
    np.testing.assert_allclose(es.eigenvectors, [[1.0]])


def brute_force_dissociated(lam, tol):
    n = len(lam)
    if any(abs(lam[i] - lam[j]) <= tol for i, j in itertools.combinations(range(n), 2)):
        return False
    diffs = [lam[j] - lam[k] for j in range(n) for k in range(n) if j != k]
    return all(abs(a - b) > tol for a, b in itertools.combinations(diffs, 2))


@pytest.mark.parametrize("lam, expected, gap", [
    ((0, 1, 3), True, 1.0),
    ((0, 3, 3), False, 0.0),
    ((0, 1, 2), False, 0.0),
])
def test_check_dissociated_examples(lam, expected, gap):
    ok, found = check_dissociated(np.array(lam, float), 1e-9)
    assert ok == expected
    assert found == pytest.approx(gap, abs=1e-12)
    assert brute_force_dissociated(lam, 1e-9) == expected


@settings(max_examples=200, deadline=None)
@given(st.lists(st.integers(-6, 6), min_size=1, max_size=6))
def test_check_dissociated_matches_enumeration(ints):
    lam = np.array(sorted(ints), dtype=float)
    assert check_dissociated(lam, 1e-9)[0] == brute_force_dissociated(list(lam), 1e-9)


@settings(max_examples=100, deadline=None)
@given(st.lists(st.floats(0, 10), min_size=2, max_size=7), st.floats(1e-6, 1.0))
def test_dissociation_monotone_in_tol(values, tol):
    lam = np.sort(np.array(values))
    if check_dissociated(lam, tol)[0]:
        assert check_dissociated(lam, tol / 7)[0]


def test_support_graph_p3(p3_system):
    sg = support_graph(p3_system)
    assert check_property_s(sg)
    phi = p3_system.eigenvectors
    for j, k in itertools.combinations(range(3), 2):
        # vertex 1 carries every mode, and beats any other witness
        assert abs(phi[0, j] * phi[0, k]) > 0
        m = sg.witness_of(j, k)
        assert abs(phi[m, j] * phi[m, k]) == pytest.approx(np.max(np.abs(phi[:, j] * phi[:, k])))


def test_support_graph_single_vertex():
    sg = support_graph(eigendecompose(build_hamiltonian(Graph(1), [5.0])))
    assert sg.n == 1 and not sg.edges and check_property_s(sg)


def test_property_s_missing_edge():
    sg = SupportGraph(3, frozenset({(0, 1), (1, 2)}), {(0, 1): 0, (1, 2): 0})
    assert not check_property_s(sg)
    assert sg.universal_vertices() == [1]


def test_property_s_two_modes():
    sg = SupportGraph(2, frozenset({(0, 1)}), {(0, 1): 0})
    assert check_property_s(sg)


def test_full_support_mode_is_universal(rng):
    _, _, _, es = random_instance(8, rng, potential=False)
    sg = support_graph(es)
    # phi_1 is the constant vector for w = 0
    assert 0 in sg.universal_vertices()


@pytest.mark.parametrize("graph, potential, simple, dissociated, prop_s", [
    (Graph.path(3), None, True, True, True),
    (Graph.complete(3), None, False, False, None),
    (Graph(2), None, False, False, None),
])
def test_spectrum_report_examples(graph, potential, simple, dissociated, prop_s):
    rep = spectrum_report(build_hamiltonian(graph, potential))
    assert rep.simple == simple
    assert rep.totally_dissociated == dissociated
    if prop_s is not None:
        assert rep.property_s == prop_s
    assert not rep.totally_dissociated or rep.simple
    if rep.property_s:
        assert list(rep.universal_vertices) == list(range(1, graph.n + 1))


def test_edgeless_pair_kernel():
    es = eigendecompose(build_hamiltonian(Graph(2)))
    np.testing.assert_allclose(es.eigenvalues, [0, 0], atol=1e-15)


@pytest.mark.parametrize("seed", range(10))
@pytest.mark.parametrize("zero_potential", [False, True])
def test_eigensystem_invariants(seed, zero_potential):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(2, 21))
    g, _, h, es = random_instance(n, rng, potential=not zero_potential)
    hm, lam, phi = h.matrix, es.eigenvalues, es.eigenvectors
    norm_h = np.linalg.norm(hm, 2)
    for j in range(n):
        assert np.linalg.norm(hm @ phi[:, j] - lam[j] * phi[:, j]) <= 1e-10 * (1 + abs(lam[j])) * norm_h
    assert np.max(np.abs(phi.T @ phi - np.eye(n))) <= 1e-12
    assert np.all(np.diff(lam) >= 0)
    recon = (phi * lam) @ phi.T
    assert np.linalg.norm(recon - hm) <= 1e-9 * np.linalg.norm(hm)
    for j in range(n):
        first = np.flatnonzero(np.abs(phi[:, j]) > 1e-12)[0]
        assert phi[first, j] > 0
    if zero_potential:
        assert abs(lam[0]) <= 1e-10
        np.testing.assert_allclose(phi[:, 0], np.ones(n) / np.sqrt(n), atol=1e-10)
        assert support_graph(es).is_universal(0)


def test_eigendecompose_deterministic(rng):
    _, _, h, es = random_instance(12, rng)
    again = eigendecompose(h)
    assert np.array_equal(es.eigenvalues, again.eigenvalues)
    assert np.array_equal(es.eigenvectors, again.eigenvectors)


def test_report_to_dict_single_vertex():
    d = spectrum_report(build_hamiltonian(Graph(1), [5.0])).to_dict()
    assert set(d) == {"simple", "totally_dissociated", "min_eigenvalue_gap",
                      "min_difference_gap", "property_s", "universal_vertices"}
    assert d["min_eigenvalue_gap"] is None and d["totally_dissociated"]
