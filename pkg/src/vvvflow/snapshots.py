"""Binary field snapshots.

Layout (little endian, fixed field order):

    offset  size  content
    0       4     magic b"VVVF"
    4       4     u32 format version (currently 1)
    8       4     u32 grid size n
    12      1     u8 field count (scalar coefficient arrays in the payload)
    13      1     u8 payload layout code (1 = retained modes only,
                  lexicographic in array index with DFT wrap-around
                  frequencies per axis, complex128 as re,im doubles)
    14      8     f64 alpha
    22      8     f64 nu
    30      8     f64 t
    38      -     payload, field_count * retained_mode_count * 16 bytes

Vector fields contribute three consecutive scalar arrays (components in
order). A coupled state writes u then w (6 fields); a velocity-only state
writes u (3 fields). The round trip is bit exact.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass

import numpy as np

from .errors import SnapshotError
from .spectral import GridSpec, SpectralVectorField

MAGIC = b"VVVF"
VERSION = 1
LAYOUT_RETAINED_LEX = 1

_HEADER = struct.Struct("<4sIIBBddd")
HEADER_SIZE = _HEADER.size  # 38 bytes


@dataclass(frozen=True)
class SnapshotHeader:
    version: int
    n: int
    field_count: int
    layout: int
    alpha: float
    nu: float
    t: float

    @property
    def retained_mode_count(self) -> int:
        cutoff = self.n // 3
        return (2 * cutoff + 1) ** 3 - 1

    @property
    def payload_bytes(self) -> int:
        return self.field_count * self.retained_mode_count * 16


@dataclass(frozen=True)
class SnapshotData:
    header: SnapshotHeader
    u: SpectralVectorField
    w: SpectralVectorField | None


def write_snapshot(path, u: SpectralVectorField, w: SpectralVectorField | None = None,
                   t: float = 0.0, alpha: float = 0.0, nu: float = 1.0) -> None:
    """Write u (and optionally w) losslessly; see the module docstring."""
    grid = u.grid
    if w is not None and w.grid != grid:
        raise SnapshotError("u and w must share a grid")
    field_count = 3 if w is None else 6
    header = _HEADER.pack(MAGIC, VERSION, grid.n, field_count,
                          LAYOUT_RETAINED_LEX, alpha, nu, t)
    mask = grid.dealias_mask
    payload = [np.ascontiguousarray(u.coeffs[:, mask], dtype="<c16").tobytes()]
    if w is not None:
        payload.append(np.ascontiguousarray(w.coeffs[:, mask], dtype="<c16").tobytes())
    with open(path, "wb") as fh:
        fh.write(header)
        for chunk in payload:
            fh.write(chunk)


def read_header(path) -> SnapshotHeader:
    """Parse and validate the header only; no grid context required."""
    with open(path, "rb") as fh:
        raw = fh.read(HEADER_SIZE)
    if len(raw) < HEADER_SIZE:
        raise SnapshotError(f"{path}: file shorter than the {HEADER_SIZE}-byte header")
    magic, version, n, field_count, layout, alpha, nu, t = _HEADER.unpack(raw)
    if magic != MAGIC:
        raise SnapshotError(f"{path}: bad magic {magic!r}, expected {MAGIC!r}")
    if version != VERSION:
        raise SnapshotError(f"{path}: unsupported format version {version}")
    if layout != LAYOUT_RETAINED_LEX:
        raise SnapshotError(f"{path}: unknown payload layout code {layout}")
    if field_count not in (3, 6):
        raise SnapshotError(f"{path}: unsupported field count {field_count}")
    return SnapshotHeader(version=version, n=n, field_count=field_count,
                          layout=layout, alpha=alpha, nu=nu, t=t)


def read_snapshot(path, grid: GridSpec) -> SnapshotData:
    """Read a snapshot onto a matching grid; every coefficient is exact."""
    header = read_header(path)
    if header.n != grid.n:
        raise SnapshotError(
            f"{path}: grid mismatch, file has n={header.n}, expected n={grid.n}")
    mask = grid.dealias_mask
    m = int(mask.sum())
    if m != header.retained_mode_count:
        raise SnapshotError(f"{path}: inconsistent retained-mode count")
    with open(path, "rb") as fh:
        fh.seek(HEADER_SIZE)
        payload = fh.read()
    if len(payload) != header.payload_bytes:
        raise SnapshotError(
            f"{path}: truncated payload, got {len(payload)} bytes, "
            f"expected {header.payload_bytes}")

    def unpack(offset_fields: int) -> SpectralVectorField:
        start = offset_fields * m * 16
        flat = np.frombuffer(payload, dtype="<c16", count=3 * m,
                             offset=start).reshape(3, m)
        coeffs = np.zeros((3,) + (grid.n,) * 3, dtype=np.complex128)
        coeffs[:, mask] = flat
        return SpectralVectorField(grid, coeffs)

    u = unpack(0)
    w = unpack(3) if header.field_count == 6 else None
    return SnapshotData(header=header, u=u, w=w)


def write_state_snapshot(state, path) -> None:
    """Persist a solver state (coupled states also store w)."""
    w = getattr(state, "w", None)
    write_snapshot(path, state.u, w=w, t=state.t,
                   alpha=getattr(state.params, "alpha", 0.0),
                   nu=state.params.nu)
