import numpy as np
import pytest

from src.errors import DataCorrupt
from src.solver.grid import Field, Grid
from src.solver.snapshot import read_snapshot, write_snapshot


@pytest.fixture
def field():
    grid = Grid((-1.0, 0.0), (1.0, 1.0), (33, 17))
    values = np.random.default_rng(4).normal(size=grid.shape + (2,))
    return Field(grid, values, 0.125)


def test_snapshot_preserves_field(tmp_path, field):
    path = write_snapshot(tmp_path / "snapshots" / "step_00000010.snap", field, 0.05)
    header, loaded = read_snapshot(path)
    assert header["counts"] == [33, 17]
    assert header["n"] == 2
    assert header["eps"] == 0.05
    assert loaded.t == 0.125
    assert loaded.grid.h == pytest.approx(field.grid.h)
    np.testing.assert_array_equal(loaded.values, field.values)


def test_header_is_a_json_line(tmp_path, field):
    path = write_snapshot(tmp_path / "a.snap", field, 0.05)
    first = path.read_bytes().split(b"\n", 1)[0]
    assert first.startswith(b"{") and b'"dims": 2' in first


def test_truncated_snapshot_is_corrupt(tmp_path, field):
    path = write_snapshot(tmp_path / "a.snap", field, 0.05)
    path.write_bytes(path.read_bytes()[:-8])
    with pytest.raises(DataCorrupt):
        read_snapshot(path)


def test_garbage_header_is_corrupt(tmp_path):
    path = tmp_path / "bad.snap"
    path.write_bytes(b"not json\n" + b"\x00" * 16)
    with pytest.raises(DataCorrupt):
        read_snapshot(path)
