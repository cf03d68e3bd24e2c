import numpy as np
import pytest

from rcatool.dataset import Dataset
from rcatool.errors import EmptyResult
from rcatool.preprocess import preprocess


def make(cols, matrix, **kw):
    return Dataset(cols, np.array(matrix, dtype=float), **kw)


def test_constant_column_dropped():
    rng = np.random.default_rng(0)
    ds = make(["const", "x"], np.column_stack([np.full(10, 5.0), rng.normal(size=10)]))
    out, report = preprocess(ds)
    assert out.columns == ["x"]
    assert report.dropped_constant == ["const"]


def test_perfectly_correlated_pair_drops_later_column():
    x = np.arange(10, dtype=float)
    noise = np.random.default_rng(1).normal(size=10)
    ds = make(["x", "y", "z"], np.column_stack([x, x.copy(), noise]))
    out, report = preprocess(ds)
    assert out.columns == ["x", "z"]
    assert report.dropped_correlated == [("x", "y")]


def test_corr_090_pair_both_kept():
    rng = np.random.default_rng(2)
    x = rng.normal(size=2000)
    y = 0.9 * x + np.sqrt(1 - 0.81) * rng.normal(size=2000)
    assert abs(np.corrcoef(x, y)[0, 1]) < 0.95
    out, _ = preprocess(make(["x", "y"], np.column_stack([x, y])))
    assert out.columns == ["x", "y"]


def test_anticorrelated_pair_also_dropped():
    rng = np.random.default_rng(3)
    x = rng.normal(size=500)
    y = -x + 0.05 * rng.normal(size=500)
    assert np.corrcoef(x, y)[0, 1] < -0.99
    out, report = preprocess(make(["x", "y"], np.column_stack([x, y])))
    assert out.columns == ["x"]
    assert report.dropped_correlated == [("x", "y")]


def test_mostly_missing_column_dropped_and_mean_imputed():
    # 10-row fixture: "gappy" misses 6/10 cells; "almost" misses exactly one
    rng = np.random.default_rng(4)
    gappy = np.array([1.0, np.nan, np.nan, np.nan, 2.0, np.nan, np.nan, np.nan, 3.0, 4.0])
    # values chosen so "almost" is not pairwise-correlated with "gappy"
    almost = np.array([9.0, 2, 3, 4, np.nan, 6, 7, 8, 1, 10])
    other = rng.normal(size=10)
    ds = make(["gappy", "almost", "other"], np.column_stack([gappy, almost, other]))
    out, report = preprocess(ds)
    assert report.dropped_missing_columns == ["gappy"]
    assert out.columns == ["almost", "other"]
    # hand-computed mean of the 9 present values: 50/9
    assert out.column("almost")[4] == pytest.approx(50.0 / 9.0)
    assert report.imputed_cells == 1


def test_mostly_missing_row_dropped():
    vals = np.random.default_rng(5).normal(size=(6, 3))
    vals[2, :2] = np.nan  # 2 of 3 missing -> dropped
    vals[4, 0] = np.nan  # 1 of 3 missing -> kept, imputed
    ds = make(["a", "b", "c"], vals, timestamps=[f"t{i}" for i in range(6)])
    out, report = preprocess(ds)
    assert report.dropped_missing_rows == [2]
    assert out.n_rows == 5
    assert out.timestamps == ["t0", "t1", "t3", "t4", "t5"]


def test_output_has_no_missing_and_no_constants():
    rng = np.random.default_rng(6)
    vals = rng.normal(size=(50, 5))
    vals[rng.random((50, 5)) < 0.2] = np.nan
    vals[:, 2] = 7.0
    out, _ = preprocess(make([f"c{i}" for i in range(5)], vals))
    assert not np.isnan(out.values).any()
    for j in range(out.n_cols):
        assert len(np.unique(out.values[:, j])) > 1


def test_idempotence():
    rng = np.random.default_rng(7)
    vals = rng.normal(size=(40, 6))
    vals[:, 1] = vals[:, 0] * 2.0  # collinear
    vals[:, 3] = 1.5  # constant
    vals[rng.random((40, 6)) < 0.1] = np.nan
    once, _ = preprocess(make([f"c{i}" for i in range(6)], vals))
    twice, _ = preprocess(once)
    assert twice.columns == once.columns
    assert np.allclose(twice.values, once.values)


def test_empty_result():
    ds = make(["a", "b"], np.full((5, 2), 1.0))
    with pytest.raises(EmptyResult):
        preprocess(ds)
