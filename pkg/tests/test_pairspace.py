import numpy as np
import pytest
from hypothesis import given, strategies as st

from sscd.errors import DataError, IncompleteLabels
from sscd.pairspace import (
    DataMatrix,
    Label,
    LabelAssignment,
    PairIndex,
    graph_from_labels,
    labels_from_adjacency,
    pair_count,
    pair_index,
    pair_unindex,
    read_label_csv,
    write_label_csv,
)


def test_index_examples():
    assert pair_count(3) == 6
    assert pair_index(0, 1, 3) == 0
    assert pair_index(0, 2, 3) == 1
    assert pair_index(1, 0, 3) == 2
    assert pair_index(2, 1, 3) == 5
    assert pair_unindex(3, 3) == (1, 2)


@pytest.mark.parametrize("i,j", [(1, 1), (-1, 0), (0, 3)])
def test_index_rejects_diagonal_and_out_of_range(i, j):
    with pytest.raises(IndexError):
        pair_index(i, j, 3)


def test_index_roundtrip_exhaustive():
    for p in range(2, 51):
        idx = PairIndex(p)
        ks = [pair_index(i, j, p) for i in range(p) for j in range(p) if i != j]
        assert ks == list(range(pair_count(p)))
        for k in range(idx.m):
            i, j = pair_unindex(k, p)
            assert (i, j) == (idx.rows[k], idx.cols[k])
            assert pair_index(i, j, p) == k


def test_data_matrix_validation():
    with pytest.raises(DataError):
        DataMatrix(np.ones((1, 3)))
    with pytest.raises(DataError):
        DataMatrix(np.array([[0.0, np.nan], [1.0, 2.0]]))
    with pytest.raises(DataError):
        DataMatrix(np.zeros((3, 2)), ["a", "a"])
    X = DataMatrix(np.arange(6.0).reshape(3, 2))
    assert X.variable_names == ("V0", "V1")
    with pytest.raises(ValueError):
        X.values[0, 0] = 9.0


def test_data_matrix_csv_roundtrip(tmp_path):
    rng = np.random.default_rng(0)
    X = DataMatrix(rng.normal(size=(7, 4)), ["a", "b", "c", "d"])
    X.to_csv(tmp_path / "x.csv")
    Y = DataMatrix.from_csv(tmp_path / "x.csv")
    assert Y.variable_names == X.variable_names
    assert np.array_equal(Y.values, X.values)


def test_csv_error_names_file(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text("a,b\n1,2\n3\n")
    with pytest.raises(DataError, match="bad.csv"):
        DataMatrix.from_csv(path)


def test_labels_and_graph_roundtrip():
    A = np.array([[0, 1, 0], [0, 0, 1], [0, 0, 0]])
    lab = labels_from_adjacency(A, None)
    assert lab.m_L == 6 and lab.m_U == 0
    assert np.array_equal(graph_from_labels(lab), A)
    partial = labels_from_adjacency(A, [(0, 1), (2, 0)])
    assert partial.states[pair_index(0, 1, 3)] == Label.CAUSAL
    assert partial.states[pair_index(2, 0, 3)] == Label.NONCAUSAL
    assert partial.m_L == 2
    with pytest.raises(IncompleteLabels):
        graph_from_labels(partial)


def test_one_hot_and_swap():
    lab = LabelAssignment(np.array([1, 0, -1, 1, 0, -1]), 3)
    Y = lab.one_hot()
    assert np.array_equal(Y, [[0, 1], [1, 0], [0, 0], [0, 1], [1, 0], [0, 0]])
    assert np.array_equal(lab.swapped().one_hot(), Y[:, ::-1])
    assert np.array_equal(lab.swapped().labelled, lab.labelled)


def test_label_csv_roundtrip(tmp_path):
    rng = np.random.default_rng(1)
    states = rng.integers(-1, 2, size=pair_count(5))
    lab = LabelAssignment(states, 5)
    names = ["g1", "g2", "g3", "g4", "g5"]
    write_label_csv(tmp_path / "l.csv", lab, names)
    back = read_label_csv(tmp_path / "l.csv", names)
    assert np.array_equal(back.states, lab.states)


def test_label_csv_rejects_unknown_name(tmp_path):
    (tmp_path / "l.csv").write_text("from,to,label\na,zz,1\n")
    with pytest.raises(DataError, match="unknown variable"):
        read_label_csv(tmp_path / "l.csv", ["a", "b"])


@given(st.integers(2, 40), st.data())
def test_index_bijection_property(p, data):
    k = data.draw(st.integers(0, pair_count(p) - 1))
    i, j = pair_unindex(k, p)
    assert i != j
    assert pair_index(i, j, p) == k
