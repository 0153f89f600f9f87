"""Linear stability, Hopf location and diffusion-driven (Turing) analysis.

Spatial perturbations exp(lambda t + i k.x) of a homogeneous steady state
grow according to the eigenvalues of A(k) = J - D|k|^2, where J is the
reaction Jacobian at the steady state and D the diffusion matrix

        [d11  0    0  ]
    D = [0    d22  0  ]
        [0    d32  d33]

A steady state that is stable at k = 0 but has max Re(lambda(A(k))) > 0
for some k > 0 is Turing unstable.  k is treated as a continuous magnitude
here; the PDE module reports the nearest admissible zero-flux box modes.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import BracketError, ConvergenceError
from .kinetics import ModelParams, jacobian, reaction_rhs
from .equilibria import Equilibrium, coexistence_equilibria, make_equilibrium
from .linalg3 import char_coeffs_in_k2, eig3

__all__ = [
    "DispersionResult",
    "HopfResult",
    "SweepRow",
    "SweepResult",
    "diffusion_matrix",
    "classify",
    "dispersion_matrix",
    "dispersion_relation",
    "dispersion_char_coeffs",
    "default_k_grid",
    "critical_d32",
    "hopf_scan",
    "stability_sweep",
]

# residual bound for accepting a state as an equilibrium
_FIXED_POINT_TOL = 1e-8
# imaginary parts above this count as a genuine complex pair
_IMAG_TOL = 1e-9

# Thresholds obtained from the truncated linear-in-k^2 form of the
# determinant coefficient; kept for comparison reports only.  This package
# evaluates the full determinant, which carries k^4 and k^6 terms.
REFERENCE_D32_THRESHOLD = {"untreated": -1.0668, "treated": -1.45136}


def diffusion_matrix(p: ModelParams) -> np.ndarray:
    """Diffusion matrix with the single cross term d32 (tumor -> IL-2)."""
    return np.array([
        [p.d11, 0.0, 0.0],
        [0.0, p.d22, 0.0],
        [0.0, p.d32, p.d33],
    ])


def classify(p: ModelParams, state) -> Equilibrium:
    """Eigenvalue classification of a fixed point.

    Stable means all real parts < -1e-10; real parts within 1e-10 of zero
    give a marginal verdict.  The kind is inferred from the coordinates
    (v = 0 -> CFE, all positive -> CCE).
    """
    state = np.asarray(state, dtype=float)
    residual = float(np.max(np.abs(reaction_rhs(p, state))))
    if residual >= _FIXED_POINT_TOL:
        raise ValueError(
            f"state {tuple(state)} is not a fixed point (residual {residual:.3e})")
    if state[1] == 0.0:
        kind = "CFE"
    elif np.all(state > 0.0):
        kind = "CCE"
    else:
        kind = "OTHER"
    return make_equilibrium(p, state, kind=kind)


def dispersion_matrix(p: ModelParams, state, k: float) -> np.ndarray:
    """A(k) = J(state) - D k^2 for a wavenumber magnitude k >= 0."""
    if k < 0.0:
        raise ValueError("wavenumber magnitude k must be nonnegative")
    return jacobian(p, state) - diffusion_matrix(p) * k**2


def default_k_grid() -> np.ndarray:
    """Default wavenumber scan: 0 to 300 in steps of 0.5."""
    return np.arange(0.0, 300.0 + 0.25, 0.5)


@dataclass(frozen=True)
class DispersionResult:
    """Perturbation growth against wavenumber magnitude."""

    k: np.ndarray          # scanned wavenumber magnitudes
    growth: np.ndarray     # max Re(lambda) of A(k)
    frequency: np.ndarray  # Im(lambda) of the dominant eigenvalue
    k_max: float           # argmax of growth
    growth_max: float      # growth at k_max


def _dominant(eigs: np.ndarray) -> tuple:
    growth = float(np.max(eigs.real))
    close = eigs[np.isclose(eigs.real, growth, rtol=0.0, atol=1e-14)]
    freq = float(np.max(close.imag))
    return growth, freq


def dispersion_relation(p: ModelParams, state, k_grid=None) -> DispersionResult:
    """Growth rate of spatial modes over a wavenumber grid."""
    if k_grid is None:
        k_grid = default_k_grid()
    k_grid = np.asarray(k_grid, dtype=float)
    if k_grid.size == 0:
        raise ValueError("k grid is empty")
    if np.any(k_grid < 0.0):
        raise ValueError("k grid must be nonnegative")
    if k_grid.size > 1 and np.any(np.diff(k_grid) <= 0.0):
        raise ValueError("k grid must be strictly increasing")
    j = jacobian(p, state)
    d = diffusion_matrix(p)
    growth = np.empty_like(k_grid)
    freq = np.empty_like(k_grid)
    for i, k in enumerate(k_grid):
        growth[i], freq[i] = _dominant(eig3(j - d * k * k))
    imax = int(np.argmax(growth))
    return DispersionResult(k=k_grid, growth=growth, frequency=freq,
                            k_max=float(k_grid[imax]), growth_max=float(growth[imax]))


def dispersion_char_coeffs(p: ModelParams, state) -> dict:
    """Characteristic coefficients of A(k) as ascending polynomials in k^2.

    Keys 'a2', 'a1', 'a0' follow det(A - lambda I) = -l^3 + a2 l^2 + a1 l + a0.
    The constant and k^2 parts of a2 and a1 are the quantities usually
    quoted for this model; a1 additionally carries a k^4 term and a0 goes
    up to k^6 because the determinant is cubic in k^2.
    """
    return char_coeffs_in_k2(jacobian(p, state), diffusion_matrix(p))


def critical_d32(p: ModelParams, state, d32_lo: float, d32_hi: float,
                 k_grid=None, tol: float = 1e-3) -> float:
    """Bisect d32 for the sign change of the peak growth rate over k_grid.

    The bracket ends must give growth_max of opposite sign.  Note that a
    base state carrying a homogeneous (k ~ 0) instability never changes
    sign on a grid that includes small k; pass a k_grid starting above the
    homogeneous band to isolate the finite-wavelength threshold.
    """
    if not d32_lo < d32_hi:
        raise ValueError("need d32_lo < d32_hi")

    def g(d32):
        return dispersion_relation(p.replace(d32=d32), state, k_grid).growth_max

    g_lo, g_hi = g(d32_lo), g(d32_hi)
    if np.sign(g_lo) == np.sign(g_hi):
        raise BracketError(
            f"growth_max does not change sign on [{d32_lo}, {d32_hi}] "
            f"(values {g_lo:.3e}, {g_hi:.3e})")
    lo, hi = d32_lo, d32_hi
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if np.sign(g(mid)) == np.sign(g_lo):
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


@dataclass(frozen=True)
class HopfResult:
    """Location of a complex-pair stability crossing along the CCE branch."""

    p2_critical: float
    eigenpair: tuple       # the conjugate pair at the crossing
    bracket: tuple         # final bisection bracket (lo, hi)
    state: np.ndarray      # CCE coordinates at the crossing


def _pair_real_part(eq: Equilibrium) -> float:
    eigs = eq.eigenvalues
    pair = eigs[np.abs(eigs.imag) > _IMAG_TOL]
    if pair.size:
        return float(np.max(pair.real))
    return float(np.max(eigs.real))


def _nearest_cce(p: ModelParams, p2: float, prev_state) -> Equilibrium:
    eqs = coexistence_equilibria(p.replace(p2=p2))
    if not eqs:
        raise ConvergenceError(f"coexistence branch lost at p2 = {p2:.6g}")
    if prev_state is None:
        return eqs[-1]  # largest tumor density: the branch studied here
    return min(eqs, key=lambda e: np.linalg.norm(e.state - prev_state))


def hopf_scan(p: ModelParams, p2_lo: float, p2_hi: float,
              tol: float = 1e-4) -> HopfResult | None:
    """Bisect p2 for the complex-pair real-part sign change on the CCE branch.

    Returns None when the dominant pair keeps one sign across the bracket.
    The branch is followed by re-solving the CCE at each bisection point
    and picking the root nearest the previous one.
    """
    if not p2_lo < p2_hi:
        raise ValueError("need p2_lo < p2_hi")
    eq_lo = _nearest_cce(p, p2_lo, None)
    g_lo = _pair_real_part(eq_lo)
    eq_hi = _nearest_cce(p, p2_hi, eq_lo.state)
    g_hi = _pair_real_part(eq_hi)
    if np.sign(g_lo) == np.sign(g_hi):
        return None
    lo, hi = p2_lo, p2_hi
    state = eq_lo.state
    eq_mid = eq_lo
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        eq_mid = _nearest_cce(p, mid, state)
        state = eq_mid.state
        if np.sign(_pair_real_part(eq_mid)) == np.sign(g_lo):
            lo = mid
        else:
            hi = mid
    p2c = 0.5 * (lo + hi)
    eq_c = _nearest_cce(p, p2c, state)
    eigs = eq_c.eigenvalues
    pair = eigs[np.abs(eigs.imag) > _IMAG_TOL]
    if pair.size < 2:
        pair = np.sort_complex(eigs)[-2:]
    pair = tuple(pair[np.argsort(pair.imag)][-2:])
    return HopfResult(p2_critical=p2c, eigenpair=pair, bracket=(lo, hi),
                      state=eq_c.state)


@dataclass(frozen=True)
class SweepRow:
    p2: float
    found: bool
    state: np.ndarray | None
    eigenvalues: np.ndarray | None
    stability: str | None


@dataclass(frozen=True)
class SweepResult:
    rows: list
    stable_interval: tuple | None  # (alpha, beta) endpoints of the stable run


def stability_sweep(p: ModelParams, p2_values) -> SweepResult:
    """CCE eigenvalues along a p2 range (c and the rest fixed by `p`).

    Samples without a coexistence equilibrium are flagged, not fatal.  The
    reported stable interval is the longest contiguous run of stable
    samples.
    """
    p2_values = np.asarray(p2_values, dtype=float)
    rows = []
    prev = None
    for p2 in p2_values:
        try:
            eq = _nearest_cce(p, float(p2), prev)
        except ConvergenceError:
            rows.append(SweepRow(float(p2), False, None, None, None))
            continue
        prev = eq.state
        rows.append(SweepRow(float(p2), True, eq.state, eq.eigenvalues, eq.stability))
    best, cur = None, None
    for row in rows:
        if row.found and row.stability == "stable":
            cur = (cur[0], row.p2) if cur else (row.p2, row.p2)
            if best is None or cur[1] - cur[0] > best[1] - best[0]:
                best = cur
        else:
            cur = None
    return SweepResult(rows=rows, stable_interval=best)
