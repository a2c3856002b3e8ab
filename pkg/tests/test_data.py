import numpy as np
import pytest

from dpmclust.data import FeatureMatrix, ingest_csv
from dpmclust.errors import ParseError, ConstantColumn


def test_feature_matrix_caches_stats():
    fm = FeatureMatrix(np.array([[1.0, 2.0], [3.0, 6.0], [2.0, 4.0]]))
    assert fm.n == 3 and fm.J == 2
    assert np.allclose(fm.col_means, [2.0, 4.0])
    assert np.allclose(fm.col_ranges, [2.0, 4.0])


def test_feature_matrix_rejects_constant_column():
    with pytest.raises(ConstantColumn):
        FeatureMatrix(np.array([[1.0, 5.0], [2.0, 5.0]]))


def test_feature_matrix_rejects_nan():
    with pytest.raises(ValueError):
        FeatureMatrix(np.array([[1.0, np.nan], [2.0, 3.0]]))


def test_ingest_simple(tmp_path):
    path = tmp_path / "m.csv"
    path.write_text("1,2\n3,4\n5,6\n")
    fm = ingest_csv(path)
    assert fm.values.shape == (3, 2)
    assert np.allclose(fm.values, [[1, 2], [3, 4], [5, 6]])


def test_ingest_header_flag(tmp_path):
    path = tmp_path / "m.csv"
    path.write_text("a,b\n1,2\n3,4\n")
    fm = ingest_csv(path, header=True)
    assert fm.values.shape == (2, 2)
    with pytest.raises(ParseError):
        ingest_csv(path, header=False)


def test_ingest_non_numeric_cell_coordinates(tmp_path):
    path = tmp_path / "m.csv"
    path.write_text("1,2\n3,oops\n")
    with pytest.raises(ParseError) as err:
        ingest_csv(path)
    assert err.value.row == 1 and err.value.col == 1


def test_ingest_ragged_row(tmp_path):
    path = tmp_path / "m.csv"
    path.write_text("1,2\n3\n")
    with pytest.raises(ParseError) as err:
        ingest_csv(path)
    assert err.value.row == 1


def test_ingest_constant_column_named(tmp_path):
    path = tmp_path / "m.csv"
    path.write_text("1,7\n2,7\n3,7\n")
    with pytest.raises(ConstantColumn) as err:
        ingest_csv(path)
    assert err.value.col == 1
