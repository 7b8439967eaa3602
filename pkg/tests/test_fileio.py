import numpy as np
import pytest
from hypothesis import given, strategies as st

from vortexpacket.berry import ZeemanParams
from vortexpacket.dynamics import CSV_COLUMNS, IntegratorConfig, PacketState, Trajectory, integrate
from vortexpacket.fileio import (
    GRID_CSV_COLUMNS, GRID_MAGIC, read_grid_binary, read_path_csv, read_trajectory_csv, write_grid_binary,
    write_grid_csv, write_trajectory_csv,
)
from vortexpacket.modes import ModeSpec, probability_current, sample_mode
from vortexpacket.units import make_uniform_B


def test_trajectory_round_trip_is_exact(tmp_path):
    tr = integrate(PacketState.initial([0, 0, 0], [1.0, 0.2, 0.3], 2), make_uniform_B([0, 0, 1.0]),
                   ZeemanParams(2), IntegratorConfig(t_final=3.0))
    path = tmp_path / "t.csv"
    write_trajectory_csv(tr, path)
    back = read_trajectory_csv(path)
    np.testing.assert_array_equal(back, tr.data)
    lines = path.read_text().splitlines()
    assert lines[0].split(",") == list(CSV_COLUMNS)
    assert all(len(line.split(",")) == 16 for line in lines)


def test_empty_trajectory_is_header_only(tmp_path):
    path = tmp_path / "e.csv"
    write_trajectory_csv(Trajectory(np.empty((0, 16))), path)
    assert path.read_text() == ",".join(CSV_COLUMNS) + "\n"
    assert read_trajectory_csv(path).shape == (0, 16)


@given(st.lists(st.floats(allow_nan=False, allow_infinity=False), min_size=16, max_size=16))
def test_seventeen_digits_round_trip(tmp_path_factory, row):
    path = tmp_path_factory.mktemp("rt") / "r.csv"
    write_trajectory_csv(np.array([row]), path)
    np.testing.assert_array_equal(read_trajectory_csv(path), np.array([row]))


def test_grid_binary_layout_and_round_trip(tmp_path):
    g = sample_mode(ModeSpec(l=2), 64, tau=3.0)
    path = tmp_path / "g.bin"
    write_grid_binary(g, path)
    blob = path.read_bytes()
    assert blob[:8] == GRID_MAGIC and len(blob) == 32 + 16 * 64 * 64
    assert int.from_bytes(blob[8:16], "little") == 64
    back = read_grid_binary(path)
    np.testing.assert_array_equal(back.values, g.values)
    assert back.extent == g.extent and back.tau == 3.0


def test_grid_binary_rejects_bad_files(tmp_path):
    path = tmp_path / "bad.bin"
    path.write_bytes(b"NOTAGRID" + bytes(24))
    with pytest.raises(ValueError, match="magic"):
        read_grid_binary(path)
    g = sample_mode(ModeSpec(l=1), 32)
    write_grid_binary(g, path)
    path.write_bytes(path.read_bytes()[:-8])
    with pytest.raises(ValueError, match="expected"):
        read_grid_binary(path)
    with pytest.raises(OSError, match="missing"):
        read_grid_binary(tmp_path / "missing.bin")


def test_grid_csv(tmp_path):
    spec = ModeSpec(l=1)
    g = sample_mode(spec, 32)
    path = tmp_path / "g.csv"
    write_grid_csv(g, path, probability_current(spec, g))
    data = np.loadtxt(path, delimiter=",", skiprows=1)
    assert path.read_text().splitlines()[0] == ",".join(GRID_CSV_COLUMNS)
    assert data.shape == (32 * 32, 8)
    np.testing.assert_allclose(data[:, 4], data[:, 2] ** 2 + data[:, 3] ** 2, rtol=1e-12)


def test_path_csv(tmp_path):
    path = tmp_path / "p.csv"
    path.write_text("p_x,p_y,p_z\n1,0,0\n# comment\n0,1,0\n\n")
    np.testing.assert_array_equal(read_path_csv(path), [[1, 0, 0], [0, 1, 0]])
    path.write_text("1,0\n")
    with pytest.raises(ValueError):
        read_path_csv(path)
    path.write_text("1,0,0\nx,y,z\n")
    with pytest.raises(ValueError):
        read_path_csv(path)


def test_write_error_names_path(tmp_path):
    with pytest.raises(OSError, match="nodir"):
        write_trajectory_csv(Trajectory(np.empty((0, 16))), tmp_path / "nodir" / "x.csv")
