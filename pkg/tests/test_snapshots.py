"""Binary snapshot format: lossless round trips and hard failure modes."""

import struct

import numpy as np
import pytest

from vvvflow.errors import SnapshotError
from vvvflow.models import VvvState, NseState, init_taylor_green
from vvvflow.operators import ModelParams
from vvvflow.snapshots import (
    HEADER_SIZE,
    read_header,
    read_snapshot,
    write_snapshot,
    write_state_snapshot,
)
from vvvflow.spectral import curl, make_grid, random_vector_field


class TestRoundTrip:
    def test_taylor_green_state_bit_exact(self, grid16, tmp_path):
        u = init_taylor_green(grid16)
        w = curl(u)
        path = tmp_path / "state.vvvf"
        write_snapshot(path, u, w=w, t=0.125, alpha=0.1, nu=1.0)
        data = read_snapshot(path, grid16)
        assert np.array_equal(data.u.coeffs, u.coeffs)
        assert np.array_equal(data.w.coeffs, w.coeffs)
        assert data.header.t == 0.125
        assert data.header.alpha == 0.1
        assert data.header.field_count == 6

    def test_velocity_only_round_trip(self, grid16, tmp_path):
        v = random_vector_field(grid16, 8)
        path = tmp_path / "field.vvvf"
        write_snapshot(path, v, t=2.0, nu=0.5)
        data = read_snapshot(path, grid16)
        assert np.array_equal(data.u.coeffs, v.coeffs)
        assert data.w is None
        assert data.header.field_count == 3

    def test_state_helpers(self, grid16, tmp_path):
        u = init_taylor_green(grid16)
        vvv = VvvState(u=u, w=curl(u), t=0.5, params=ModelParams(nu=2.0, alpha=0.3))
        path = tmp_path / "vvv.vvvf"
        write_state_snapshot(vvv, path)
        header = read_header(path)
        assert header.field_count == 6
        assert header.alpha == 0.3 and header.nu == 2.0 and header.t == 0.5

        nse = NseState(u=u, t=0.25, params=ModelParams(nu=1.0))
        path2 = tmp_path / "nse.vvvf"
        write_state_snapshot(nse, path2)
        assert read_header(path2).field_count == 3


class TestFailureModes:
    def _write_valid(self, grid, path):
        write_snapshot(path, init_taylor_green(grid), t=0.0)
        return path

    def test_grid_mismatch(self, grid16, tmp_path):
        path = self._write_valid(grid16, tmp_path / "s.vvvf")
        with pytest.raises(SnapshotError, match="grid mismatch"):
            read_snapshot(path, make_grid(32))

    def test_truncated_payload(self, grid16, tmp_path):
        path = self._write_valid(grid16, tmp_path / "s.vvvf")
        raw = path.read_bytes()
        path.write_bytes(raw[:-16])
        with pytest.raises(SnapshotError, match="truncated"):
            read_snapshot(path, grid16)

    def test_bad_magic(self, grid16, tmp_path):
        path = self._write_valid(grid16, tmp_path / "s.vvvf")
        raw = bytearray(path.read_bytes())
        raw[:4] = b"NOPE"
        path.write_bytes(bytes(raw))
        with pytest.raises(SnapshotError, match="magic"):
            read_header(path)

    def test_unsupported_version(self, grid16, tmp_path):
        path = self._write_valid(grid16, tmp_path / "s.vvvf")
        raw = bytearray(path.read_bytes())
        raw[4:8] = struct.pack("<I", 99)
        path.write_bytes(bytes(raw))
        with pytest.raises(SnapshotError, match="version"):
            read_header(path)

    def test_short_file(self, tmp_path):
        path = tmp_path / "tiny.vvvf"
        path.write_bytes(b"VV")
        with pytest.raises(SnapshotError, match="header"):
            read_header(path)

    def test_header_size_pinned(self):
        assert HEADER_SIZE == 38
