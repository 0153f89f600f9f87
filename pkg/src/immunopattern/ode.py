"""Time integration of the homogeneous (diffusion-free) system.

Classical fixed-step RK4 on dU/dt = F(U), used for limit-cycle checks and
transient studies.  The default dt of 1e-3 matches the PDE time step so
point dynamics and spatially uniform PDE runs are directly comparable; it
also comfortably resolves the fastest decay rate (mu3 ~ 55.6).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.signal import find_peaks

from .errors import BlowUpError
from .kinetics import ModelParams

__all__ = ["Trajectory", "CycleMetrics", "integrate", "cycle_metrics"]

# relative spread of peak spacings accepted as one period
_SPACING_CV_MAX = 0.05
# swings smaller than this are numerical flatness, not oscillation
_FLAT_TOL = 1e-9


@dataclass(frozen=True)
class Trajectory:
    """Sampled solution of the homogeneous system."""

    t: np.ndarray       # strictly increasing sample times
    states: np.ndarray  # shape (n, 3): columns u, v, w
    params: ModelParams

    @property
    def final(self) -> np.ndarray:
        return self.states[-1]


@dataclass(frozen=True)
class CycleMetrics:
    """Period and per-component geometry of a sustained oscillation."""

    period: float
    amplitude: np.ndarray  # max - min per component over one period
    mean: np.ndarray       # time average per component over one period


def integrate(p: ModelParams, u0, t_end: float, dt: float = 1e-3,
              record_every: int = 1) -> Trajectory:
    """Fixed-step RK4 integration from u0 up to t_end.

    Samples every `record_every` steps (the initial and final states are
    always included).  Raises BlowUpError with the last valid time if the
    state leaves the finite range.
    """
    if dt <= 0.0 or t_end <= 0.0:
        raise ValueError("dt and t_end must be positive")
    u, v, w = (float(x) for x in u0)
    if not all(math.isfinite(x) for x in (u, v, w)):
        raise ValueError("initial state must be finite")
    c, mu1, mu3 = p.c, p.mu1, p.mu3
    p1, p2, p3 = p.p1, p.p2, p.p3
    g1, g2, g3 = p.g1, p.g2, p.g3
    r2, b, s1, s3 = p.r2, p.b, p.s1, p.s3

    def rhs(uu, vv, ww):
        return (c * vv - mu1 * uu + p1 * uu * ww / (g1 + ww) + s1,
                r2 * vv * (1.0 - b * vv) - p2 * uu * vv / (g2 + vv),
                p3 * uu * vv / (g3 + vv) - mu3 * ww + s3)

    n = max(1, round(t_end / dt))
    half = 0.5 * dt
    sixth = dt / 6.0
    times = [0.0]
    states = [(u, v, w)]
    for i in range(1, n + 1):
        k1u, k1v, k1w = rhs(u, v, w)
        k2u, k2v, k2w = rhs(u + half * k1u, v + half * k1v, w + half * k1w)
        k3u, k3v, k3w = rhs(u + half * k2u, v + half * k2v, w + half * k2w)
        k4u, k4v, k4w = rhs(u + dt * k3u, v + dt * k3v, w + dt * k3w)
        u += sixth * (k1u + 2.0 * (k2u + k3u) + k4u)
        v += sixth * (k1v + 2.0 * (k2v + k3v) + k4v)
        w += sixth * (k1w + 2.0 * (k2w + k3w) + k4w)
        if not (math.isfinite(u) and math.isfinite(v) and math.isfinite(w)):
            raise BlowUpError(
                f"trajectory blew up between t = {(i - 1) * dt:.6g} and {i * dt:.6g}",
                time=(i - 1) * dt)
        if i % record_every == 0 or i == n:
            times.append(i * dt)
            states.append((u, v, w))
    return Trajectory(t=np.array(times), states=np.array(states), params=p)


def _tail(tr: Trajectory, transient_fraction: float):
    if not 0.0 <= transient_fraction < 1.0:
        raise ValueError("transient_fraction must be in [0, 1)")
    start = int(len(tr.t) * transient_fraction)
    return tr.t[start:], tr.states[start:]


def estimate_period(t: np.ndarray, x: np.ndarray):
    """Mean spacing of successive maxima, or None when too few/irregular.

    Needs at least 3 maxima whose spacings have a coefficient of variation
    below 5%; swings below the flatness tolerance are ignored.
    """
    if x.max() - x.min() < _FLAT_TOL:
        return None
    peaks, _ = find_peaks(x, prominence=0.05 * (x.max() - x.min()))
    if len(peaks) < 3:
        return None
    gaps = np.diff(t[peaks])
    mean_gap = float(np.mean(gaps))
    if mean_gap <= 0.0 or float(np.std(gaps)) / mean_gap > _SPACING_CV_MAX:
        return None
    return mean_gap


def cycle_metrics(tr: Trajectory, transient_fraction: float = 0.5):
    """Period/amplitude/mean of the limit cycle a trajectory settles on.

    Returns None when the post-transient tail is not a sustained
    oscillation (too few maxima, irregular spacing, or amplitude decaying
    toward a point).  The trajectory must cover several periods after the
    transient cut; fewer than 16 tail samples is an error.
    """
    t, states = _tail(tr, transient_fraction)
    if len(t) < 16:
        raise ValueError("trajectory too short after the transient cut")
    v = states[:, 1]
    span = v.max() - v.min()
    if span < _FLAT_TOL:
        return None
    peaks, _ = find_peaks(v, prominence=0.05 * span)
    if len(peaks) < 3:
        return None
    # a decaying spiral has regularly spaced maxima too; demand that peak
    # heights do not shrink between the first and second half of the tail
    heights = v[peaks] - np.median(v)
    first = heights[: max(1, len(heights) // 2)]
    second = heights[len(heights) // 2:]
    if np.median(second) < 0.5 * np.median(first):
        return None
    gaps = np.diff(t[peaks])
    mean_gap = float(np.mean(gaps))
    if float(np.std(gaps)) / mean_gap > _SPACING_CV_MAX:
        return None
    # geometry over the last full period
    t1 = t[peaks[-1]]
    window = (t >= t1 - mean_gap) & (t <= t1)
    cycle = states[window]
    return CycleMetrics(period=mean_gap,
                        amplitude=cycle.max(axis=0) - cycle.min(axis=0),
                        mean=cycle.mean(axis=0))
