"""File emission: CSV tables, compact binary snapshots, heatmap PNGs.

All floating-point text output uses 9 significant digits so repeated runs
diff cleanly.  The binary snapshot layout is little-endian: int64 nx, ny,
float64 dx, dy, t, then the u, v, w payloads as row-major float64.
"""

from __future__ import annotations

import struct
from pathlib import Path

import matplotlib
import numpy as np

matplotlib.use("Agg")
from matplotlib import image as mpimage  # noqa: E402

from .pde import FieldGrid, Snapshot

__all__ = [
    "fmt",
    "write_csv",
    "save_snapshot_csv",
    "save_snapshot_bin",
    "load_snapshot_bin",
    "save_heatmap_png",
    "save_snapshot_pngs",
]

_HEADER = struct.Struct("<qqddd")


def fmt(x) -> str:
    """Canonical 9-significant-digit rendering of one value."""
    if isinstance(x, (bool, np.bool_)):
        return "1" if x else "0"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        return f"{x:.9g}"
    return str(x)


def write_csv(path, header, rows):
    """Write rows of mixed scalars as CSV with canonical float formatting."""
    path = Path(path)
    with open(path, "w") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(fmt(x) for x in row) + "\n")
    return path


def save_snapshot_csv(snap: Snapshot, outdir, tag: str) -> list:
    """One CSV per field with columns x, y, value."""
    outdir = Path(outdir)
    g = snap.grid
    x = g.x
    y = g.y
    paths = []
    for name in ("u", "v", "w"):
        arr = getattr(g, name)
        rows = ((x[i], y[j], arr[i, j])
                for i in range(g.nx) for j in range(g.ny))
        paths.append(write_csv(outdir / f"{tag}_{name}.csv",
                               ("x", "y", "value"), rows))
    return paths


def save_snapshot_bin(snap: Snapshot, path) -> Path:
    """Compact binary snapshot: header then u, v, w float64 payloads."""
    g = snap.grid
    path = Path(path)
    with open(path, "wb") as fh:
        fh.write(_HEADER.pack(g.nx, g.ny, g.dx, g.dy, snap.time))
        for name in ("u", "v", "w"):
            fh.write(np.ascontiguousarray(getattr(g, name), dtype="<f8").tobytes())
    return path


def load_snapshot_bin(path) -> Snapshot:
    """Inverse of save_snapshot_bin."""
    with open(path, "rb") as fh:
        nx, ny, dx, dy, t = _HEADER.unpack(fh.read(_HEADER.size))
        fields = []
        count = nx * ny
        for _ in range(3):
            arr = np.frombuffer(fh.read(8 * count), dtype="<f8").reshape(nx, ny)
            fields.append(arr.astype(float))
    grid = FieldGrid(nx=nx, ny=ny, dx=dx, dy=dy,
                     u=fields[0], v=fields[1], w=fields[2], t=t)
    return Snapshot.of(grid)


def save_heatmap_png(field: np.ndarray, path) -> Path:
    """8-bit PNG heatmap, viridis, min-max normalized per frame.

    Rows of the PNG run along y (origin at the bottom left), so the image
    x axis matches the domain x axis.  1D fields are rendered as a strip.
    """
    field = np.asarray(field, dtype=float)
    if field.ndim == 1:
        field = field[:, None]
    img = field.T
    if img.shape[0] == 1:
        img = np.repeat(img, max(16, img.shape[1] // 16), axis=0)
    path = Path(path)
    mpimage.imsave(path, img, cmap="viridis", origin="lower", format="png")
    return path


def save_snapshot_pngs(snap: Snapshot, outdir, tag: str) -> list:
    outdir = Path(outdir)
    return [save_heatmap_png(getattr(snap.grid, name), outdir / f"{tag}_{name}.png")
            for name in ("u", "v", "w")]
