"""Smoke tests for the piet_core python module: generate a map, build an
overlay, and check that store-backed answers match the naive join."""

import tempfile

import piet_core
import pytest


@pytest.fixture(scope="module")
def workspace():
    tmp = tempfile.mkdtemp(prefix="piet_py_")
    names = piet_core.generate_map(tmp, seed=11, states=6, rivers=4, points=9)
    assert sorted(names) == ["cities", "rivers", "states", "stores", "volcanoes"]
    info = piet_core.build_overlay(tmp, ["states", "volcanoes"], grid_rows=4, grid_cols=6)
    assert info["cells"] > 0
    piet_core.build_overlay(tmp, ["states", "rivers"], grid_rows=4, grid_cols=6)
    return piet_core.Workspace(tmp)


def test_layers_listed(workspace):
    assert "states" in workspace.layers
    assert "volcanoes" in workspace.layers


def test_contains_matches_naive(workspace):
    piet_core.reset_predicate_evals()
    got = workspace.contains("states", "volcanoes", "Point")
    assert piet_core.predicate_evals() == 0  # association tables only
    naive = workspace.naive_intersection("states", "volcanoes", "Point")
    # containment of points equals point-level intersection here
    assert got == naive
    assert len(got) > 0


def test_intersection_rivers(workspace):
    got = workspace.intersection("states", "rivers", "LineString")
    naive = workspace.naive_intersection("states", "rivers", "LineString")
    assert got == naive


def test_region_aggregate(workspace):
    rows = workspace.region_aggregate(
        "rivers", [(0, 0), (1000, 0), (1000, 600), (0, 600)], agg="length", exact=True
    )
    assert rows, "rivers expected inside the full-map region"
    assert all(r["value"] > 0 for r in rows)


def test_gis_query(workspace):
    result = workspace.query(
        "SELECT layer.states; FROM piet; "
        "WHERE contains(layer.states, layer.volcanoes, subplevel.Point);"
    )
    assert result["columns"] == ["states"]
    assert len(result["rows"]) > 0


def test_parse_full_query():
    out = piet_core.parse_query(
        "SELECT layer.usa_states; FROM PietSchema; "
        "WHERE contains(layer.usa_states, layer.usa_volcanoes, subplevel.Point); "
        "| select {[Measures].[Unit Sales]} ON columns, "
        "{[Store].[All Stores].[USA]} ON rows from [Sales] where [Time].[1997]"
    )
    assert out["has_gis"] and out["has_olap"]
    assert "Unit Sales" in out["olap"]
