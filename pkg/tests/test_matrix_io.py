import numpy as np
import pytest

from graphlearn import matrix_io


@pytest.mark.parametrize("suffix", [".csv", ".json"])
def test_round_trip(tmp_path, rng, suffix):
    mat = rng.normal(size=(4, 7)) * 10.0 ** rng.integers(-8, 8, size=(4, 7))
    path = tmp_path / f"m{suffix}"
    matrix_io.save_matrix(path, mat)
    back = matrix_io.load_matrix(path)
    assert back.shape == mat.shape
    np.testing.assert_allclose(back, mat, rtol=1e-12, atol=0)


def test_csv_has_no_header(tmp_path):
    path = tmp_path / "m.csv"
    matrix_io.write_csv(path, [[1.0, 2.0], [3.0, 4.0]])
    assert path.read_text().splitlines() == ["1,2", "3,4"]


def test_json_layout(tmp_path):
    path = tmp_path / "m.json"
    matrix_io.write_json(path, [[1.0, 2.0, 3.0], [4.0, 5.0, 6.0]])
    import json

    payload = json.loads(path.read_text())
    assert payload == {"rows": 2, "cols": 3, "data": [1.0, 2.0, 3.0, 4.0, 5.0, 6.0]}


def test_json_size_mismatch(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text('{"rows": 2, "cols": 2, "data": [1, 2, 3]}')
    with pytest.raises(ValueError):
        matrix_io.read_json(path)
