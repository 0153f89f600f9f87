"""Explicit finite-difference solver for the reaction-diffusion system.

Forward-Euler time stepping on the unit square (or unit interval), with a
5-point Laplacian stencil, zero-flux boundaries via mirrored ghost nodes
(ghost = first interior value), and the cross-diffusion term d32 * Lap(v)
feeding the IL-2 balance.  The grid is node-centered: dx*(nx-1) = 1, so a
spacing of 0.01 gives 101 nodes per side.

Stability guard for the explicit scheme:

    dt <= 0.2 * min(dx^2, dy^2/tau_L) / max(d11, d22, d33 + |d32|)

Fields are expected to stay nonnegative; a drop below -1e-8 is treated as
model breakdown and aborts by default (clamping would hide it).  The hot
update loop is a numba kernel; every cell is computed by the same scalar
expression whatever the row chunking, so results are bit-identical for any
worker count.
"""

from __future__ import annotations

import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
from numba import njit

from .errors import BlowUpError, ConfigError, NegativityError
from .kinetics import ModelParams, _rhs_terms

__all__ = [
    "FieldGrid",
    "SimConfig",
    "Snapshot",
    "initial_condition",
    "laplacian",
    "step",
    "run",
    "simulate",
    "stable_dt_bound",
    "nearest_neumann_mode",
]

NEGATIVITY_TOL = -1e-8
_FIELDS = ("u", "v", "w")

# Gaussian bump widths of the initial perturbations
_SIGMA1_SQ = 0.02   # effector / IL-2 bumps
_SIGMA2_SQ = 0.06   # tumor bump

# variant -> (weights, bump centers x, bump centers y, tumor center)
_IC_VARIANTS = {
    1: ((1.0, 1.0, 1.0, 1.0), (0.0, 0.0, 1.0, 1.0), (0.0, 1.0, 0.0, 1.0), (0.5, 0.5)),
    2: ((1.0, 0.0, 0.0, 0.0), (1.0, 0.0, 0.0, 0.0), (1.0, 0.0, 0.0, 0.0), (1.0, 1.0)),
    3: ((1.0, 0.0, 0.0, 0.0), (0.0, 0.0, 0.0, 0.0), (0.0, 0.0, 0.0, 0.0), (0.0, 0.0)),
}


@dataclass
class FieldGrid:
    """Discretized (u, v, w) fields on the unit domain with spacing metadata.

    Arrays are shaped (nx, ny); 1D problems use ny = 1 (dy is then 0).
    """

    nx: int
    ny: int
    dx: float
    dy: float
    u: np.ndarray
    v: np.ndarray
    w: np.ndarray
    t: float = 0.0

    def __post_init__(self):
        if self.nx < 3:
            raise ValueError("need nx >= 3")
        if abs(self.dx * (self.nx - 1) - 1.0) > 1e-9:
            raise ValueError("dx*(nx-1) must equal 1 (unit domain)")
        if self.ny > 1 and abs(self.dy * (self.ny - 1) - 1.0) > 1e-9:
            raise ValueError("dy*(ny-1) must equal 1 (unit domain)")
        for name in _FIELDS:
            arr = getattr(self, name)
            if arr.shape != (self.nx, self.ny):
                raise ValueError(f"field {name} has shape {arr.shape}, "
                                 f"expected {(self.nx, self.ny)}")

    @property
    def is_1d(self) -> bool:
        return self.ny == 1

    @property
    def x(self) -> np.ndarray:
        return np.arange(self.nx) * self.dx

    @property
    def y(self) -> np.ndarray:
        return np.arange(self.ny) * self.dy

    @classmethod
    def constant(cls, state, dx: float, dims: int = 2) -> "FieldGrid":
        """Spatially uniform grid at the given (u, v, w)."""
        nx = round(1.0 / dx) + 1
        ny = nx if dims == 2 else 1
        dy = dx if dims == 2 else 0.0
        u0, v0, w0 = (float(s) for s in state)
        shape = (nx, ny)
        return cls(nx=nx, ny=ny, dx=dx, dy=dy,
                   u=np.full(shape, u0), v=np.full(shape, v0),
                   w=np.full(shape, w0), t=0.0)

    def copy(self) -> "FieldGrid":
        return FieldGrid(nx=self.nx, ny=self.ny, dx=self.dx, dy=self.dy,
                         u=self.u.copy(), v=self.v.copy(), w=self.w.copy(),
                         t=self.t)

    def mass(self, name: str) -> float:
        """Trapezoidal integral of one field over the unit domain.

        This is the quantity the zero-flux stencil conserves exactly under
        pure diffusion (boundary nodes carry half weight, corners quarter).
        """
        arr = getattr(self, name)
        wx = np.ones(self.nx)
        wx[0] = wx[-1] = 0.5
        if self.is_1d:
            return float(np.sum(arr[:, 0] * wx) * self.dx)
        wy = np.ones(self.ny)
        wy[0] = wy[-1] = 0.5
        return float(np.sum(arr * np.outer(wx, wy)) * self.dx * self.dy)


def initial_condition(variant: int, dx: float = 0.01, dims: int = 2) -> FieldGrid:
    """Gaussian initial perturbations, variants 1-3.

    u and w are a sum of four Gaussian bumps (width sigma^2 = 0.02) whose
    weights and centers depend on the variant; v is a single broader bump
    (sigma^2 = 0.06).  In 1D the y factor of every Gaussian is dropped.
    """
    if variant not in _IC_VARIANTS:
        raise ValueError(f"initial-condition variant must be 1, 2 or 3, got {variant}")
    if dims not in (1, 2):
        raise ValueError("dims must be 1 or 2")
    weights, xs, ys, (xc, yc) = _IC_VARIANTS[variant]
    nx = round(1.0 / dx) + 1
    x = (np.arange(nx) * dx)[:, None]
    if dims == 2:
        y = (np.arange(nx) * dx)[None, :]
        uw = sum(b * np.exp(-((x - x0) ** 2 + (y - y0) ** 2) / _SIGMA1_SQ)
                 for b, x0, y0 in zip(weights, xs, ys))
        v = np.exp(-((x - xc) ** 2 + (y - yc) ** 2) / _SIGMA2_SQ)
        return FieldGrid(nx=nx, ny=nx, dx=dx, dy=dx,
                         u=np.asarray(uw).copy(), v=v, w=np.asarray(uw).copy(), t=0.0)
    uw = sum(b * np.exp(-((x - x0) ** 2) / _SIGMA1_SQ) for b, x0 in zip(weights, xs))
    v = np.exp(-((x - xc) ** 2) / _SIGMA2_SQ)
    return FieldGrid(nx=nx, ny=1, dx=dx, dy=0.0,
                     u=np.asarray(uw).copy(), v=v, w=np.asarray(uw).copy(), t=0.0)


def laplacian(f: np.ndarray, dx: float, dy: float = 0.0,
              tau_L: float = 1.0) -> np.ndarray:
    """(d2/dx2 + tau_L d2/dy2) with mirrored ghost nodes (zero flux).

    The stencil is exact on quadratics; a single interior unit spike with
    dx = dy = 1 maps to -4 at the spike and +1 at its four neighbors.
    """
    f = np.asarray(f, dtype=float)
    squeeze = f.ndim == 1
    if squeeze:
        f = f[:, None]
    nx, ny = f.shape
    if nx < 3:
        raise ValueError("need at least 3 nodes along x")
    if 1 < ny < 3:
        raise ValueError("need at least 3 nodes along y (or exactly 1 for 1D)")
    out = np.empty_like(f)
    out[1:-1, :] = f[2:, :] - 2.0 * f[1:-1, :] + f[:-2, :]
    out[0, :] = 2.0 * (f[1, :] - f[0, :])
    out[-1, :] = 2.0 * (f[-2, :] - f[-1, :])
    out /= dx**2
    if ny >= 3:
        iyy = np.empty_like(f)
        iyy[:, 1:-1] = f[:, 2:] - 2.0 * f[:, 1:-1] + f[:, :-2]
        iyy[:, 0] = 2.0 * (f[:, 1] - f[:, 0])
        iyy[:, -1] = 2.0 * (f[:, -2] - f[:, -1])
        out += (tau_L / dy**2) * iyy
    return out[:, 0] if squeeze else out


def stable_dt_bound(p: ModelParams, dx: float, dy: float = 0.0) -> float:
    """Largest dt the explicit-Euler diffusion guard allows."""
    h2 = dx**2
    if dy > 0.0:
        h2 = min(h2, dy**2 / p.tau_L)
    dmax = max(p.d11, p.d22, p.d33 + abs(p.d32))
    return 0.2 * h2 / dmax


@njit(cache=True, nogil=True)
def _euler_rows(u, v, w, nu, nv, nw, r0, r1,
                c, mu1, mu3, p1, p2, p3, g1, g2, g3, r2, b, s1, s3,
                d11, d22, d33, d32, dt, inv_dx2, inv_dy2, twod):
    nx, ny = u.shape
    for i in range(r0, r1):
        im = 1 if i == 0 else i - 1
        ip = nx - 2 if i == nx - 1 else i + 1
        for j in range(ny):
            uc = u[i, j]
            vc = v[i, j]
            wc = w[i, j]
            lap_u = (u[im, j] - 2.0 * uc + u[ip, j]) * inv_dx2
            lap_v = (v[im, j] - 2.0 * vc + v[ip, j]) * inv_dx2
            lap_w = (w[im, j] - 2.0 * wc + w[ip, j]) * inv_dx2
            if twod:
                jm = 1 if j == 0 else j - 1
                jp = ny - 2 if j == ny - 1 else j + 1
                lap_u += (u[i, jm] - 2.0 * uc + u[i, jp]) * inv_dy2
                lap_v += (v[i, jm] - 2.0 * vc + v[i, jp]) * inv_dy2
                lap_w += (w[i, jm] - 2.0 * wc + w[i, jp]) * inv_dy2
            f1 = c * vc - mu1 * uc + p1 * uc * wc / (g1 + wc) + s1
            f2 = r2 * vc * (1.0 - b * vc) - p2 * uc * vc / (g2 + vc)
            f3 = p3 * uc * vc / (g3 + vc) - mu3 * wc + s3
            nu[i, j] = uc + dt * (f1 + d11 * lap_u)
            nv[i, j] = vc + dt * (f2 + d22 * lap_v)
            nw[i, j] = wc + dt * (f3 + d33 * lap_w + d32 * lap_v)


def _check_field(name: str, arr: np.ndarray, t: float, negativity: str):
    mn = arr.min()
    if not (np.isfinite(mn) and np.isfinite(arr.max())):
        bad = np.argwhere(~np.isfinite(arr))[0]
        raise BlowUpError(
            f"field {name} became non-finite at t = {t:.6g}, cell {tuple(bad)}",
            time=t, index=tuple(int(b) for b in bad))
    if mn < NEGATIVITY_TOL and negativity != "ignore":
        idx = tuple(int(i) for i in np.argwhere(arr == mn)[0])
        msg = (f"field {name} dropped to {mn:.3e} at t = {t:.6g}, cell {idx}; "
               "the model left its biological domain")
        if negativity == "abort":
            raise NegativityError(msg, time=t, index=idx)
        warnings.warn(msg, RuntimeWarning)


def step(g: FieldGrid, p: ModelParams, dt: float, workers: int = 1,
         source=None, negativity: str = "abort") -> FieldGrid:
    """One fully explicit forward-Euler step (double-buffered).

    All Laplacians are evaluated on the incoming fields.  `source`, if
    given, is called as source(x, y, t) and must return three arrays added
    to the right-hand sides (used for manufactured-solution verification
    and external forcing).
    """
    u, v, w = g.u, g.v, g.w
    nu = np.empty_like(u)
    nv = np.empty_like(v)
    nw = np.empty_like(w)
    twod = not g.is_1d
    inv_dx2 = 1.0 / g.dx**2
    inv_dy2 = p.tau_L / g.dy**2 if twod else 0.0
    args = (u, v, w, nu, nv, nw)
    scalars = (p.c, p.mu1, p.mu3, p.p1, p.p2, p.p3, p.g1, p.g2, p.g3,
               p.r2, p.b, p.s1, p.s3, p.d11, p.d22, p.d33, p.d32,
               dt, inv_dx2, inv_dy2, twod)

    if workers <= 1 or g.nx < 4 * workers:
        _euler_rows(*args, 0, g.nx, *scalars)
    else:
        bounds = np.linspace(0, g.nx, workers + 1).astype(int)
        with ThreadPoolExecutor(max_workers=workers) as ex:
            futs = [ex.submit(_euler_rows, *args, int(bounds[i]), int(bounds[i + 1]),
                              *scalars) for i in range(workers)]
            for fut in futs:
                fut.result()

    if source is not None:
        x = g.x[:, None]
        y = g.y[None, :]
        s1, s2, s3 = source(x, y, g.t)
        nu += dt * np.broadcast_to(s1, nu.shape)
        nv += dt * np.broadcast_to(s2, nv.shape)
        nw += dt * np.broadcast_to(s3, nw.shape)

    t_new = g.t + dt
    for name, arr in (("u", nu), ("v", nv), ("w", nw)):
        _check_field(name, arr, t_new, negativity)
    return FieldGrid(nx=g.nx, ny=g.ny, dx=g.dx, dy=g.dy,
                     u=nu, v=nv, w=nw, t=t_new)


@dataclass(frozen=True)
class Snapshot:
    """A recorded grid state with per-field summary statistics."""

    time: float
    grid: FieldGrid
    stats: dict

    @classmethod
    def of(cls, g: FieldGrid) -> "Snapshot":
        stats = {}
        for name in _FIELDS:
            arr = getattr(g, name)
            stats[name] = {
                "min": float(arr.min()), "max": float(arr.max()),
                "mean": float(arr.mean()), "var": float(arr.var()),
            }
        return cls(time=g.t, grid=g.copy(), stats=stats)


@dataclass(frozen=True)
class SimConfig:
    """Everything needed to reproduce one PDE run."""

    params: ModelParams
    ic_variant: int = 1
    dims: int = 2
    dx: float = 0.01
    dt: float = 1e-3
    t_end: float = 200.0
    snapshot_times: tuple = ()
    negativity: str = "abort"   # "abort" | "warn" | "ignore"
    workers: int = 1

    def __post_init__(self):
        if self.dt <= 0.0:
            raise ConfigError("dt must be positive")
        if self.t_end <= 0.0:
            raise ConfigError("t_end must be positive")
        if self.dims not in (1, 2):
            raise ConfigError("dims must be 1 or 2")
        if self.ic_variant not in (1, 2, 3):
            raise ConfigError("ic_variant must be 1, 2 or 3")
        if self.negativity not in ("abort", "warn", "ignore"):
            raise ConfigError("negativity must be abort, warn or ignore")
        ts = tuple(float(t) for t in self.snapshot_times)
        if any(t < 0.0 or t > self.t_end for t in ts):
            raise ConfigError("snapshot times must lie in [0, t_end]")
        if list(ts) != sorted(ts):
            raise ConfigError("snapshot times must be sorted")
        object.__setattr__(self, "snapshot_times", ts)
        dy = self.dx if self.dims == 2 else 0.0
        bound = stable_dt_bound(self.params, self.dx, dy)
        if self.dt > bound * (1.0 + 1e-12):
            raise ConfigError(
                f"dt = {self.dt:g} violates the explicit-scheme stability bound "
                f"{bound:g} for these diffusivities")


def run(grid: FieldGrid, p: ModelParams, dt: float, t_end: float,
        snapshot_times=(), workers: int = 1, negativity: str = "abort",
        source=None) -> list:
    """March a grid to t_end, recording snapshots; the final state is always kept."""
    n_steps = max(1, round(t_end / dt))
    want = sorted({min(n_steps, max(0, round(ts / dt))) for ts in snapshot_times})
    snaps = []
    if want and want[0] == 0:
        snaps.append(Snapshot.of(grid))
        want = want[1:]
    for i in range(1, n_steps + 1):
        grid = step(grid, p, dt, workers=workers, source=source,
                    negativity=negativity)
        if want and i == want[0]:
            snaps.append(Snapshot.of(grid))
            want = want[1:]
    if not snaps or snaps[-1].time != grid.t:
        snaps.append(Snapshot.of(grid))
    return snaps


def simulate(cfg: SimConfig) -> list:
    """Run a configured simulation from its Gaussian initial condition."""
    grid = initial_condition(cfg.ic_variant, dx=cfg.dx, dims=cfg.dims)
    return run(grid, cfg.params, cfg.dt, cfg.t_end,
               snapshot_times=cfg.snapshot_times, workers=cfg.workers,
               negativity=cfg.negativity)


def nearest_neumann_mode(k: float) -> tuple:
    """Nearest admissible zero-flux mode on the unit square.

    Cosine modes cos(m pi x) cos(n pi y) have |k|^2 = pi^2 (m^2 + n^2);
    returns (m, n, k_mode) minimizing |k_mode - k| with m >= n.
    """
    if k < 0.0:
        raise ValueError("k must be nonnegative")
    top = int(np.ceil(k / np.pi)) + 1
    best = (0, 0, 0.0)
    err = abs(k)
    for m in range(top + 1):
        for n in range(m + 1):
            km = np.pi * np.sqrt(m * m + n * n)
            if abs(km - k) < err:
                best = (m, n, float(km))
                err = abs(km - k)
    return best
