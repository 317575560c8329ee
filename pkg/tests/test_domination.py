from __future__ import annotations

import pytest

import brute
from zdquat.domination import (
    certificate_shape,
    closed_form_certificate,
    closed_neighborhoods,
    dominates_ring,
    exact_gamma,
    greedy_upper,
    probe_open_problems,
    twin_classes,
    verify_dominating,
)
from zdquat.errors import BudgetExceededError, NoClosedFormError
from zdquat.ring_core import factorize
from zdquat.zdgraph import ZdGraph, build_graph

# exact values from the solver, cross-checked by subset search for n = 2, 3
GAMMA = {2: 1, 3: 4, 4: 1, 5: 6, 6: 5, 8: 1}
CERT_SIZE = {2: 1, 3: 4, 4: 1, 5: 6, 6: 5, 8: 1, 12: 5, 15: 10, 20: 7, 30: 11}


@pytest.mark.parametrize("n", [2, 3])
def test_gamma_matches_subset_search(n):
    _, adj = brute.graph_by_definition(n)
    assert brute.domination_number(adj) == GAMMA[n]


@pytest.mark.parametrize("n", sorted(GAMMA))
def test_exact_gamma(n):
    g = build_graph(n)
    res = exact_gamma(g)
    assert res.exact and res.gamma == GAMMA[n]
    assert res.lo == res.hi == GAMMA[n]
    assert verify_dominating(g, res.certificate)
    assert res.gamma <= greedy_upper(g).hi


@pytest.mark.parametrize("n", [3, 5, 6])
def test_exact_certificate_is_minimal(n):
    g = build_graph(n)
    cert = list(exact_gamma(g).certificate)
    for drop in range(len(cert)):
        assert not verify_dominating(g, cert[:drop] + cert[drop + 1 :])


@pytest.mark.parametrize("n", [2, 3, 4, 5, 6, 8])
def test_greedy_certificate_is_valid(n):
    g = build_graph(n)
    res = greedy_upper(g)
    assert res.method == "certified-upper" and not res.exact
    assert verify_dominating(g, res.certificate) and len(res.certificate) == res.hi


@pytest.mark.parametrize("n", sorted(CERT_SIZE))
def test_closed_form_certificates(n):
    spec = factorize(n)
    cert = closed_form_certificate(spec)
    codes = [z.code for z in cert]
    assert len(set(codes)) == len(codes) == CERT_SIZE[n]
    assert dominates_ring(spec, codes)
    if n <= 8:
        assert verify_dominating(build_graph(n), codes)


def test_power_of_two_certificate_is_the_all_ones_element():
    (z,) = closed_form_certificate(factorize(8))
    assert z.components == (4, 4, 4, 4)


def test_ring_check_rejects_bad_sets():
    spec = factorize(6)
    cert = [z.code for z in closed_form_certificate(spec)]
    assert not dominates_ring(spec, cert[:-1])
    assert not dominates_ring(spec, [])
    assert not dominates_ring(spec, cert + [1])  # 1 is a unit, not a vertex


def test_certificate_shapes():
    assert certificate_shape(factorize(30)) == (1, (3, 5))
    assert certificate_shape(factorize(16)) == (4, ())
    assert certificate_shape(factorize(9)) is None
    assert certificate_shape(factorize(12)) == (2, (3,))
    with pytest.raises(NoClosedFormError):
        closed_form_certificate(factorize(9))


def test_node_budget_returns_bounds():
    g = build_graph(5)
    res = exact_gamma(g, node_budget=5)
    assert res.method == "bounds-only" and res.gamma is None
    assert res.lo <= 6 <= res.hi
    assert verify_dominating(g, res.certificate)


def test_vertex_cap_only_guards_real_searches():
    assert exact_gamma(build_graph(8), max_vertices=10).gamma == 1
    with pytest.raises(BudgetExceededError):
        exact_gamma(build_graph(5), max_vertices=10)


def test_solver_is_deterministic():
    g = build_graph(6)
    first = exact_gamma(g)
    second = exact_gamma(build_graph(6, threads=3, chunk=100))
    assert first.certificate == second.certificate
    assert first.explored_nodes == second.explored_nodes


def test_fixture_graphs_against_subset_search():
    fixtures = [
        ZdGraph.from_edges(6, [(k, (k + 1) % 6) for k in range(6)]),
        ZdGraph.from_edges(7, [(0, k) for k in range(1, 7)]),
        ZdGraph.from_edges(8, [(0, 1), (1, 2), (2, 3), (4, 5), (5, 6), (6, 7), (3, 4)]),
        ZdGraph.from_edges(9, [(a, b) for a in range(9) for b in range(a + 1, 9) if (a * b) % 3 == 1]),
        ZdGraph.from_edges(4, []),
    ]
    for g in fixtures:
        adj = [set(int(j) for j in g.neighbors(i)) for i in range(g.vertex_count)]
        res = exact_gamma(g)
        assert res.gamma == brute.domination_number(adj, limit=g.vertex_count)
        assert verify_dominating(g, res.certificate)


def test_twin_classes():
    # vertices 1 and 2 share the open neighbourhood {0}; 3 and 4 are adjacent true twins
    g = ZdGraph.from_edges(5, [(0, 1), (0, 2), (3, 4), (0, 3), (0, 4)])
    open_ids, closed_ids = twin_classes(closed_neighborhoods(g))
    assert open_ids[1] == open_ids[2]
    assert closed_ids[3] == closed_ids[4]
    assert open_ids[0] != open_ids[1]


def test_directed_graph_is_dominated_through_its_shadow():
    g = build_graph(3, directed=True)
    assert exact_gamma(g).gamma == 4


def test_probe_matrix_ring():
    report = probe_open_problems("matrix", (2, 3))
    assert report.vertex_count == 32 and report.result.gamma == 4
    assert report.to_dict()["gamma"] == 4
    with pytest.raises(ValueError):
        probe_open_problems("matrix", (2, 4))
    with pytest.raises(ValueError):
        probe_open_problems("torus", (1, 1))


def test_probe_prime_power():
    report = probe_open_problems("pt", (3, 2), max_vertices=5000)
    assert report.vertex_count == 2672
    assert report.result.exact and report.result.gamma == 4
