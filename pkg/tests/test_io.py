import json

import numpy as np
import pytest

from rslearn.ci import GaussianDataset, OracleTester
from rslearn.errors import (
    DatasetFormatError,
    GraphFormatError,
    ResultFormatError,
    UnknownVertexNameError,
)
from rslearn.io import (
    default_names,
    fixture_path,
    list_fixtures,
    read_dataset,
    read_graph,
    read_result,
    result_to_dict,
    write_dataset,
    write_graph,
    write_result,
)
from rslearn.rsl import DiamondFree, extract_vstructures, learn_structure


def _write(tmp_path, text, name="g.edges"):
    path = tmp_path / name
    path.write_text(text)
    return path


# ---------------------------------------------------------------------------
# Graphs
# ---------------------------------------------------------------------------

def test_read_graph_with_names_and_comments(tmp_path):
    path = _write(tmp_path, "# toy\nn 3\nname 2 smoking\n0 1   # edge\n\nsmoking 1\n")
    dag, names = read_graph(path)
    assert dag.edges == [(0, 1), (2, 1)]
    assert names == ["X0", "X1", "smoking"]


def test_graph_write_then_read_preserves_names(tmp_path, diamond_middle):
    path = tmp_path / "d.edges"
    write_graph(path, diamond_middle, names=["A", "B", "C", "D"])
    dag, names = read_graph(path)
    assert dag == diamond_middle
    assert names == ["A", "B", "C", "D"]


@pytest.mark.parametrize(
    "text, line_no",
    [
        ("0 1\n", 1),
        ("n 3\n0 1 2\n", 2),
        ("n 2\n0 5\n", 2),
        ("n 2\nname 4 x\n", 2),
    ],
)
def test_read_graph_reports_line(tmp_path, text, line_no):
    with pytest.raises(GraphFormatError) as excinfo:
        read_graph(_write(tmp_path, text))
    assert excinfo.value.line_no == line_no
    assert f":{line_no}:" in str(excinfo.value)


def test_read_graph_rejects_cycles_and_self_loops(tmp_path):
    with pytest.raises(GraphFormatError):
        read_graph(_write(tmp_path, "n 3\n0 1\n1 2\n2 0\n"))
    with pytest.raises(GraphFormatError):
        read_graph(_write(tmp_path, "n 2\n1 1\n", name="loop.edges"))


def test_read_graph_rejects_missing_header(tmp_path):
    with pytest.raises(GraphFormatError):
        read_graph(_write(tmp_path, "# nothing here\n"))


def test_read_graph_unknown_name(tmp_path):
    with pytest.raises(UnknownVertexNameError):
        read_graph(_write(tmp_path, "n 2\nname 0 a\na b\n"))


def test_packaged_fixtures(diamond_left, diamond_right, chain3):
    assert {"chain3", "collider3", "diamond_left", "diamond_middle", "diamond_right"} <= set(list_fixtures())
    assert read_graph(fixture_path("diamond_left"))[0] == diamond_left
    assert read_graph(fixture_path("diamond_right"))[0] == diamond_right
    assert read_graph(fixture_path("chain3"))[0] == chain3
    with pytest.raises(FileNotFoundError):
        fixture_path("no_such_graph")


# ---------------------------------------------------------------------------
# Datasets
# ---------------------------------------------------------------------------

def test_dataset_write_then_read(tmp_path):
    values = np.random.default_rng(0).standard_normal((20, 3))
    path = tmp_path / "d.csv"
    write_dataset(path, GaussianDataset(values))
    dataset, names = read_dataset(path)
    assert names == default_names(3)
    assert np.allclose(dataset.values, values)


def test_read_dataset_rejects_bad_files(tmp_path):
    empty = _write(tmp_path, "", name="empty.csv")
    with pytest.raises(DatasetFormatError):
        read_dataset(empty)
    header_only = _write(tmp_path, "a,b\n", name="header.csv")
    with pytest.raises(DatasetFormatError):
        read_dataset(header_only)
    text = _write(tmp_path, "a,b\n1.0,x\n2.0,3.0\n", name="text.csv")
    with pytest.raises(DatasetFormatError):
        read_dataset(text)
    missing = _write(tmp_path, "a,b\n1.0,\n2.0,3.0\n", name="missing.csv")
    with pytest.raises(DatasetFormatError):
        read_dataset(missing)


# ---------------------------------------------------------------------------
# Results
# ---------------------------------------------------------------------------

def test_result_payload(tmp_path, collider3):
    result = learn_structure(OracleTester(collider3), DiamondFree())
    vstructures = extract_vstructures(result.skeleton, result.sepsets)
    payload = result_to_dict(result, algorithm="rsl-d", mode="oracle", seed=3, vstructures=vstructures)
    assert payload["schema"] == 1
    assert payload["edges"] == [[0, 2], [1, 2]]
    assert payload["sepsets"] == [[0, 1, []]]
    assert payload["vstructures"] == [[0, 2, 1]]
    assert payload["names"] == ["X0", "X1", "X2"]
    assert payload["mb_stats"]["total_tests"] == 3
    assert "asc" in payload["ci_stats"]

    path = tmp_path / "r.json"
    write_result(path, payload)
    skeleton, sepsets, loaded = read_result(path)
    assert skeleton == result.skeleton
    assert sepsets == result.sepsets
    assert loaded["algorithm"] == "rsl-d"


def test_read_result_rejects_bad_files(tmp_path):
    with pytest.raises(ResultFormatError):
        read_result(_write(tmp_path, "{not json", name="a.json"))
    with pytest.raises(ResultFormatError):
        read_result(_write(tmp_path, json.dumps({"schema": 99}), name="b.json"))
    with pytest.raises(ResultFormatError):
        read_result(_write(tmp_path, json.dumps({"schema": 1, "n": 2}), name="c.json"))


@pytest.mark.parametrize(
    "entry",
    [[2, 2, []], [0, 9, []], [0, 1, [7]], [0, 2, [0]], [1, 3, [2, 3]], [-1, 2, []]],
)
def test_read_result_rejects_bad_sepset_entries(tmp_path, diamond_left, entry):
    result = learn_structure(OracleTester(diamond_left), DiamondFree())
    payload = result_to_dict(result, algorithm="rsl-d", mode="oracle")
    payload["sepsets"] = [entry]
    path = tmp_path / "r.json"
    write_result(path, payload)
    with pytest.raises(ResultFormatError):
        read_result(path)
