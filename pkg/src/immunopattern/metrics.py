"""Quantitative diagnostics for simulated patterns.

Covers the three questions asked of every run: has the field stopped
changing (stationarity), is it spatially structured and how (spot/stripe
classification via level-set components), and does any probe point
oscillate in time (Hopf-type dynamics).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import ndimage
from scipy.signal import find_peaks

from .ode import estimate_period
from .pde import Snapshot

__all__ = [
    "PatternReport",
    "ProbeSeries",
    "stationarity_rate",
    "pattern_class",
    "probe_series",
    "pattern_report",
]

HOMOGENEOUS_VAR = 1e-6
# isoperimetric ratio (perimeter^2/area) calibrated on synthetic geometry:
# rasterized discs sit near 64/pi ~ 20, long bands grow like 4 L/width
SPOT_RATIO_MAX = 25.0
STRIPE_RATIO_MIN = 60.0
# minimum detrended swing that counts as oscillation at a probe
OSCILLATION_AMP = 1e-4


def stationarity_rate(a: Snapshot, b: Snapshot) -> float:
    """Max-norm change per unit time between two snapshots of one run."""
    ga, gb = a.grid, b.grid
    if (ga.nx, ga.ny, ga.dx, ga.dy) != (gb.nx, gb.ny, gb.dx, gb.dy):
        raise ValueError("snapshots live on different grids")
    if b.time <= a.time:
        raise ValueError("need b.time > a.time")
    delta = max(float(np.max(np.abs(getattr(gb, f) - getattr(ga, f))))
                for f in ("u", "v", "w"))
    return delta / (b.time - a.time)


def _component_ratios(mask: np.ndarray) -> np.ndarray:
    """perimeter^2/area for each connected component of a binary mask.

    Perimeter counts interior faces between a component cell and anything
    outside it (domain-edge faces are not counted); the ratio is scale
    invariant, so grid spacing drops out.
    """
    labels, n = ndimage.label(mask)
    if n == 0:
        return np.array([])
    areas = ndimage.sum_labels(mask.astype(float), labels, index=np.arange(1, n + 1))
    perims = np.zeros(n)
    for axis in (0, 1):
        a = np.take(labels, range(labels.shape[axis] - 1), axis=axis)
        b = np.take(labels, range(1, labels.shape[axis]), axis=axis)
        diff = a != b
        for side in (a, b):
            hits = side[diff]
            hits = hits[hits > 0]
            if hits.size:
                perims += np.bincount(hits, minlength=n + 1)[1:]
    return perims**2 / areas


def pattern_class(field: np.ndarray, variance_tol: float = HOMOGENEOUS_VAR) -> str:
    """Classify a 2D field as homogeneous, spots, stripes or mixed.

    Binarizes at the mean, takes the minority phase as the figure, and
    scores its connected components by the isoperimetric ratio
    perimeter^2/area (median over components): below 25 reads as spots,
    above 60 as stripes, in between as mixed.  Invariant under adding a
    constant or scaling by a positive factor.  For 1D fields only the
    homogeneous/mixed distinction is meaningful.
    """
    field = np.asarray(field, dtype=float)
    if not np.all(np.isfinite(field)):
        raise ValueError("field must be finite")
    if field.var() < variance_tol:
        return "homogeneous"
    if field.ndim == 1 or min(field.shape) == 1:
        return "mixed"
    mask = field > field.mean()
    if mask.mean() > 0.5:
        mask = ~mask
    ratios = _component_ratios(mask)
    if ratios.size == 0:
        return "mixed"
    med = float(np.median(ratios))
    if med < SPOT_RATIO_MAX:
        return "spots"
    if med > STRIPE_RATIO_MIN:
        return "stripes"
    return "mixed"


@dataclass(frozen=True)
class ProbeSeries:
    """Nearest-cell time series at a probe point, with oscillation verdict."""

    times: np.ndarray
    u: np.ndarray
    v: np.ndarray
    w: np.ndarray
    point: tuple
    cell: tuple
    oscillating: bool
    period: float | None


def _detect_oscillation(times: np.ndarray, values: np.ndarray,
                        transient_fraction: float = 0.5):
    """(flag, period) for a detrended tail with >= 3 alternating extrema."""
    start = int(len(times) * transient_fraction)
    t = times[start:]
    x = values[start:]
    if len(t) < 4:
        return False, None
    x = x - np.polyval(np.polyfit(t, x, 1), t)
    span = x.max() - x.min()
    if span <= OSCILLATION_AMP:
        return False, None
    peaks, _ = find_peaks(x)
    troughs, _ = find_peaks(-x)
    idx = np.sort(np.concatenate([peaks, troughs]))
    if idx.size < 2:
        return False, None
    # keep extrema taking part in a swing larger than the amplitude floor
    swings = np.abs(np.diff(x[idx]))
    keep = np.zeros(idx.size, dtype=bool)
    keep[:-1] |= swings > OSCILLATION_AMP
    keep[1:] |= swings > OSCILLATION_AMP
    count = int(np.count_nonzero(keep))
    if count < 3:
        return False, None
    return True, estimate_period(t, x)


def probe_series(snapshots, point, transient_fraction: float = 0.5) -> ProbeSeries:
    """Field values at the grid cell nearest `point`, over all snapshots.

    Oscillation is flagged from the tumor (v) series: the detrended
    post-transient tail must show at least 3 alternating extrema with
    swing above 1e-4.  Needs at least 8 snapshots.
    """
    if len(snapshots) < 8:
        raise ValueError("need at least 8 snapshots to assess a probe series")
    g0 = snapshots[0].grid
    point = tuple(float(x) for x in (point if np.iterable(point) else (point,)))
    px = point[0]
    py = point[1] if len(point) > 1 else 0.0
    if not (0.0 <= px <= 1.0) or not (0.0 <= py <= 1.0):
        raise ValueError(f"probe point {point} lies outside the unit domain")
    i = int(round(px / g0.dx)) if g0.nx > 1 else 0
    j = int(round(py / g0.dy)) if g0.ny > 1 else 0
    i = min(max(i, 0), g0.nx - 1)
    j = min(max(j, 0), g0.ny - 1)
    times = np.array([s.time for s in snapshots])
    u = np.array([s.grid.u[i, j] for s in snapshots])
    v = np.array([s.grid.v[i, j] for s in snapshots])
    w = np.array([s.grid.w[i, j] for s in snapshots])
    flag, period = _detect_oscillation(times, v, transient_fraction)
    return ProbeSeries(times=times, u=u, v=v, w=w, point=(px, py),
                       cell=(i, j), oscillating=flag, period=period)


@dataclass(frozen=True)
class PatternReport:
    """Summary diagnostics of one simulation run."""

    field_stats: dict          # per field: min, max, mean, var of the final state
    stationarity: float | None  # max-norm rate between the last two snapshots
    pattern: str               # class of the final tumor field
    oscillating: bool | None   # probe verdict (None if too few snapshots)
    period: float | None
    probe: tuple | None

    def to_kv(self) -> str:
        lines = []
        for f in ("u", "v", "w"):
            st = self.field_stats[f]
            for key in ("min", "max", "mean", "var"):
                lines.append(f"{f}_{key} = {st[key]:.9g}")
        if self.stationarity is not None:
            lines.append(f"stationarity_rate = {self.stationarity:.9g}")
        lines.append(f"pattern_class = {self.pattern}")
        if self.oscillating is not None:
            lines.append(f"oscillating = {str(self.oscillating).lower()}")
            lines.append(f"period = {self.period:.9g}" if self.period
                         else "period = none")
        if self.probe is not None:
            lines.append(f"probe_x = {self.probe[0]:.9g}")
            lines.append(f"probe_y = {self.probe[1]:.9g}")
        return "\n".join(lines) + "\n"


def pattern_report(snapshots, probe=(0.5, 0.5)) -> PatternReport:
    """Build the standard diagnostics from a run's snapshot list."""
    if not snapshots:
        raise ValueError("no snapshots")
    final = snapshots[-1]
    rate = stationarity_rate(snapshots[-2], final) if len(snapshots) > 1 else None
    pattern = pattern_class(final.grid.v[:, 0] if final.grid.is_1d else final.grid.v)
    oscillating = None
    period = None
    if probe is not None and len(snapshots) >= 8:
        ps = probe_series(snapshots, probe)
        oscillating, period = ps.oscillating, ps.period
    return PatternReport(field_stats=final.stats, stationarity=rate,
                         pattern=pattern, oscillating=oscillating,
                         period=period, probe=tuple(probe) if probe else None)
