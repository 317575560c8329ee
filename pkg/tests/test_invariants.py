from __future__ import annotations

import json

import pytest
from hypothesis import given
from hypothesis import strategies as st

from zdquat.invariants import (
    SKIPPED,
    UNCOVERED,
    UNSTATED,
    Budgets,
    predict_diameter,
    predict_domination,
    predict_girths,
    predict_unit_count,
    predict_vertex_count,
    predictions,
    verify,
)
from zdquat.ring_core import factorize
from zdquat.schema import validate_report


@pytest.mark.parametrize("n, units", [(2, 8), (3, 48), (6, 384), (4, 128), (9, 3888), (10, 3840)])
def test_unit_count(n, units):
    assert predict_unit_count(factorize(n)) == units


@pytest.mark.parametrize("n, vertices", [(2, 7), (3, 32), (10, 6159), (7, 384), (8, 2047)])
def test_vertex_count(n, vertices):
    assert predict_vertex_count(factorize(n)) == vertices


@given(st.integers(min_value=2, max_value=10**5))
def test_partition_identity(n):
    spec = factorize(n)
    assert predict_vertex_count(spec) + predict_unit_count(spec) + 1 == n**4


def test_diameter_and_girth_predictions():
    assert predict_diameter(factorize(9)) == 2
    assert predict_diameter(factorize(6)) == 3
    assert predict_girths(factorize(9)) == (3, UNSTATED)
    assert predict_girths(factorize(6)) == (3, 2)
    assert predict_girths(factorize(2)) == (3, 2)


@pytest.mark.parametrize(
    "n, gamma", [(8, 1), (2, 1), (3, 4), (7, 8), (15, 10), (30, 11), (6, 5), (9, UNCOVERED), (12, 5), (18, UNCOVERED)]
)
def test_domination_prediction(n, gamma):
    assert predict_domination(factorize(n)) == gamma


def test_predictions_have_every_field():
    pred = predictions(factorize(6))
    assert pred["domination"] == 5 and pred["certificate_valid"] is True
    assert predictions(factorize(9))["certificate_valid"] == UNCOVERED


def test_verify_counts():
    rep = verify(10, "counts")
    assert rep.computed == {"vertex_count": 6159, "unit_count": 3840}
    assert all(rep.match.values())


def test_verify_full_small_case():
    rep = verify(2, "full")
    assert rep.all_match and rep.computed["domination"] == 1
    assert all(v is True for v in rep.match.values())


def test_verify_full_n6():
    rep = verify(6, "full")
    assert rep.computed["domination"] == 5
    assert rep.match["is_symmetric_digraph"] is None  # no closed form for this n
    assert all(v is True for k, v in rep.match.items() if k != "is_symmetric_digraph")
    path = rep.witnesses["diameter_path_undirected"]
    assert len(path) == 4


def test_verify_graph_n7():
    rep = verify(7, "graph")
    assert rep.computed["vertex_count"] == 384
    assert rep.computed["diameter_undirected"] == 2
    assert rep.computed["girth_undirected"] == 3
    assert rep.computed["girth_directed"] == 2 and rep.match["girth_directed"] is None
    assert rep.all_match


def test_budget_exhaustion_degrades_to_skipped():
    rep = verify(6, "full", Budgets(node=3))
    assert rep.budget_exhausted
    assert rep.stable_dict()["computed"]["domination"] == SKIPPED
    assert rep.match["domination"] is None
    assert rep.computed["certificate_valid"] is True
    lo, hi = rep.witnesses["domination_bounds"]
    assert lo <= 5 <= hi
    assert any("node budget" in note for note in rep.notes)

    rep = verify(6, "graph", Budgets(mem=1000))
    assert rep.budget_exhausted and rep.stable_dict()["computed"]["diameter_undirected"] == SKIPPED
    assert rep.computed["vertex_count"] == 911


def test_mismatch_carries_both_values():
    rep = verify(3, "counts")
    rep.predicted["unit_count"] = 47
    assert rep.mismatches == ["unit_count"]
    d = rep.stable_dict()
    assert d["predicted"]["unit_count"] == 47 and d["computed"]["unit_count"] == 48


def test_report_serialization_is_stable():
    a, b = verify(4, "graph"), verify(4, "graph", threads=3)
    assert a.to_json(stable_only=True) == b.to_json(stable_only=True)
    payload = json.loads(a.to_json())
    assert list(payload) == ["spec", "predicted", "computed", "match", "witnesses", "meta"]
    validate_report(payload)
    assert "timing_us" in payload["meta"]
    assert "timing" not in a.to_json(stable_only=True)


def test_verify_rejects_unknown_depth():
    with pytest.raises(ValueError):
        verify(3, "deep")
