"""Steady states of the homogeneous model.

Two equilibrium families matter biologically:

  * the cancer-free equilibrium (CFE), (u1*, 0, w1*), available in closed
    form whenever p1*s3 - mu1*(s3 + g1*mu3) < 0 (origin if no therapy);
  * coexistence equilibria (CCE), whose tumor density v solves a quintic
    polynomial; u2* and w2* then follow in closed form.

The quintic is solved through companion-matrix eigenvalues and each
candidate is polished by a damped Newton iteration on the full 3-species
system.  A Routh array over the quintic coefficients supports the
(p2, c)-plane existence scans.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConvergenceError
from .kinetics import ModelParams, jacobian, reaction_rhs
from .linalg3 import eig3

__all__ = [
    "Equilibrium",
    "RouthColumn",
    "cancer_free_equilibrium",
    "coexistence_equilibria",
    "quintic_coefficients",
    "routh_first_column",
    "existence_region",
]

# eigenvalue real parts within this band count as marginal
STABILITY_TOL = 1e-10

# refinement targets for computed equilibria
_NEWTON_TOL = 1e-12
_NEWTON_MAXIT = 50
_MERGE_TOL = 1e-8


@dataclass(frozen=True)
class Equilibrium:
    """A classified steady state of the homogeneous system."""

    kind: str                # "CFE" | "CCE" | "OTHER"
    state: np.ndarray        # (u, v, w)
    eigenvalues: np.ndarray  # 3 complex eigenvalues of the Jacobian
    stability: str           # "stable" | "unstable" | "marginal"
    residual: float          # max-norm of the reaction terms at `state`

    @property
    def is_stable(self) -> bool:
        return self.stability == "stable"


def _verdict(eigenvalues) -> str:
    re = np.real(eigenvalues)
    if np.any(np.abs(re) <= STABILITY_TOL):
        return "marginal"
    if np.all(re < -STABILITY_TOL):
        return "stable"
    return "unstable"


def make_equilibrium(p: ModelParams, state, kind: str = "OTHER") -> Equilibrium:
    """Attach eigenvalues and a stability verdict to a steady state."""
    state = np.asarray(state, dtype=float)
    eigs = eig3(jacobian(p, state))
    residual = float(np.max(np.abs(reaction_rhs(p, state))))
    return Equilibrium(kind=kind, state=state, eigenvalues=eigs,
                       stability=_verdict(eigs), residual=residual)


def cancer_free_equilibrium(p: ModelParams) -> Equilibrium | None:
    """Closed-form tumor-free steady state, or None when it does not exist.

    Without therapy (s1 = s3 = 0) the CFE degenerates to the origin.  With
    therapy it exists iff p1*s3 - mu1*(s3 + g1*mu3) < 0, in which case
    u1* = -s1*(s3 + g1*mu3) / (p1*s3 - mu1*(s3 + g1*mu3)) and w1* = s3/mu3.
    """
    if p.s1 == 0.0 and p.s3 == 0.0:
        return make_equilibrium(p, (0.0, 0.0, 0.0), kind="CFE")
    den = p.p1 * p.s3 - p.s3 * p.mu1 - p.g1 * p.mu1 * p.mu3
    if den >= 0.0:
        return None
    u1 = -p.s1 * (p.s3 + p.g1 * p.mu3) / den
    w1 = p.s3 / p.mu3
    return make_equilibrium(p, (u1, 0.0, w1), kind="CFE")


def _quintic_values(c, p2, mu1, mu3, p1, p3, g1, g2, g3, r2, b, s1, s3):
    """Ascending coefficients [a0..a5] of the tumor steady-state quintic.

    Obtained by substituting the closed forms for u and w into the effector
    balance and clearing denominators (verified symbolically); a root v in
    (0, 1/b) gives a coexistence tumor density.
    """
    q = p1 - mu1
    sg = s3 + g1 * mu3
    pm = p1 * s3 - mu1 * sg
    a5 = b**2 * p3 * r2**2 * q
    a4 = -b * c * p2 * p3 * r2 - 2 * b * p3 * r2**2 * q + 2 * b**2 * g2 * p3 * r2**2 * q
    a3 = (c * p2 * p3 * r2 - b * c * g2 * p2 * p3 * r2 - b * p2 * p3 * r2 * s1
          - b * p1 * p2 * r2 * s3 + p3 * r2**2 * q - 4 * b * g2 * p3 * r2**2 * q
          + b**2 * g2**2 * p3 * r2**2 * q + b * p2 * r2 * mu1 * sg)
    a2 = (c * g2 * p2 * p3 * r2 + p2 * p3 * r2 * s1 - b * g2 * p2 * p3 * r2 * s1
          + p1 * p2 * r2 * s3 - b * g2 * p1 * p2 * r2 * s3
          + 2 * g2 * p3 * r2**2 * q - 2 * b * g2**2 * p3 * r2**2 * q
          + c * p2**2 * sg - p2 * r2 * mu1 * sg + b * g2 * p2 * r2 * mu1 * sg
          - b * g3 * p2 * r2 * pm)
    a1 = (g2**2 * p3 * r2**2 * q + c * g3 * p2**2 * sg - g2 * p2 * r2 * mu1 * sg
          + g3 * p2 * r2 * pm - b * g2 * g3 * p2 * r2 * pm
          + p2**2 * s1 * sg + g2 * p2 * r2 * (p1 * s3 + p3 * s1))
    a0 = g3 * p2**2 * s1 * sg + g2 * g3 * p2 * r2 * pm
    return np.array([a0, a1, a2, a3, a4, a5])


def quintic_coefficients(p: ModelParams) -> np.ndarray:
    """Coefficients [a0..a5] (ascending) of the quintic satisfied by v at a CCE."""
    return _quintic_values(p.c, p.p2, p.mu1, p.mu3, p.p1, p.p3,
                           p.g1, p.g2, p.g3, p.r2, p.b, p.s1, p.s3)


def cce_candidates(p: ModelParams) -> np.ndarray:
    """Real quintic roots v with 0 < v < 1/b, unrefined and unfiltered by u, w."""
    coeffs = quintic_coefficients(p)
    roots = np.roots(coeffs[::-1])
    real = np.real(roots[np.abs(np.imag(roots)) < 1e-9])
    return np.sort(real[(real > 0.0) & (real < 1.0 / p.b)])


def _cce_uw(p: ModelParams, v: float) -> tuple:
    u = p.r2 * (p.g2 + v) * (1.0 - p.b * v) / p.p2
    w = (p.s3 * p.p2 * (p.g3 + v) + p.p3 * p.r2 * v * (p.g2 + v) * (1.0 - p.b * v)) \
        / (p.p2 * (p.g3 + v) * p.mu3)
    return u, w


def newton_refine(p: ModelParams, state, tol=_NEWTON_TOL, maxit=_NEWTON_MAXIT) -> np.ndarray:
    """Damped Newton polish of a near-steady state on the full system."""
    x = np.asarray(state, dtype=float).copy()
    fx = reaction_rhs(p, x)
    for _ in range(maxit):
        err = np.max(np.abs(fx))
        if err <= tol:
            return x
        try:
            step = np.linalg.solve(jacobian(p, x), -fx)
        except np.linalg.LinAlgError:
            raise ConvergenceError(
                f"singular Jacobian while refining equilibrium near {tuple(x)}") from None
        lam = 1.0
        while lam > 2.0**-30:
            xn = x + lam * step
            try:
                fn = reaction_rhs(p, xn)
            except Exception:
                lam /= 2.0
                continue
            if np.max(np.abs(fn)) < err:
                x, fx = xn, fn
                break
            lam /= 2.0
        else:
            break
    if np.max(np.abs(fx)) <= tol:
        return x
    raise ConvergenceError(
        f"equilibrium refinement stalled near {tuple(x)} "
        f"(residual {np.max(np.abs(fx)):.3e})")


def coexistence_equilibria(p: ModelParams) -> list:
    """All coexistence equilibria (u, v, w > 0), Newton-polished and classified.

    Returned in increasing tumor density v; near-duplicate roots (within
    1e-8 in v) are merged.
    """
    out = []
    for v0 in cce_candidates(p):
        u0, w0 = _cce_uw(p, v0)
        if u0 <= 0.0 or w0 <= 0.0:
            continue
        state = newton_refine(p, (u0, v0, w0))
        if np.any(state <= 0.0):
            continue
        if any(abs(state[1] - e[1]) <= _MERGE_TOL for e in out):
            continue
        out.append(state)
    out.sort(key=lambda s: s[1])
    return [make_equilibrium(p, s, kind="CCE") for s in out]


@dataclass(frozen=True)
class RouthColumn:
    """First column of a Routh array plus zero-pivot bookkeeping.

    `substituted[i]` marks rows whose pivot was replaced by an epsilon
    (or rebuilt from the auxiliary polynomial for an all-zero row); when a
    substitution happened, sign changes are evaluated for both signs of
    epsilon and `consistent` records whether the two counts agree.
    """

    column: np.ndarray
    substituted: np.ndarray
    sign_changes: int
    consistent: bool


def _routh_column(cd: np.ndarray, eps: float) -> tuple:
    """First column for descending coefficients cd, with eps pivot substitution."""
    n = len(cd) - 1
    width = (n + 2) // 2
    row0 = np.zeros(width)
    row1 = np.zeros(width)
    row0[: len(cd[0::2])] = cd[0::2]
    row1[: len(cd[1::2])] = cd[1::2]
    rows = [row0, row1]
    flags = [False, False]
    for r in range(2, n + 1):
        above, above2 = rows[r - 1], rows[r - 2]
        flag = False
        if np.all(above == 0.0):
            # auxiliary-polynomial derivative replaces an all-zero row
            deg = n - (r - 2)
            above = np.array([above2[j] * (deg - 2 * j) for j in range(width)])
            rows[r - 1] = above
            flags[r - 1] = True
            flag = True
        pivot = above[0]
        if pivot == 0.0:
            pivot = eps
            flag = True
        new = np.zeros(width)
        for j in range(width - 1):
            new[j] = (pivot * above2[j + 1] - above2[0] * above[j + 1]) / pivot
        rows.append(new)
        flags.append(flag)
    column = np.array([row[0] for row in rows])
    for i, f in enumerate(flags):
        if f and column[i] == 0.0:
            column[i] = eps
    return column, np.array(flags)


def _count_sign_changes(column: np.ndarray) -> int:
    signs = np.sign(column[column != 0.0])
    return int(np.count_nonzero(np.diff(signs) != 0))


def routh_first_column(coeffs) -> RouthColumn:
    """Routh array first column for a polynomial given by ascending coefficients.

    The number of strict sign changes equals the number of polynomial roots
    with positive real part.  Zero pivots follow the epsilon-substitution
    convention, evaluated for both epsilon signs.
    """
    coeffs = np.asarray(coeffs, dtype=float)
    if coeffs.ndim != 1 or len(coeffs) < 2:
        raise ValueError("need a polynomial of degree >= 1")
    cd = coeffs[::-1]
    if cd[0] == 0.0:
        raise ValueError("leading coefficient is zero (degree degeneracy)")
    eps = 1e-30 * np.max(np.abs(cd))
    col_plus, flags = _routh_column(cd, eps)
    changes_plus = _count_sign_changes(col_plus)
    if np.any(flags):
        col_minus, _ = _routh_column(cd, -eps)
        consistent = changes_plus == _count_sign_changes(col_minus)
    else:
        consistent = True
    return RouthColumn(column=col_plus, substituted=flags,
                       sign_changes=changes_plus, consistent=consistent)


def _region_rule(scenario: str, a: np.ndarray) -> bool:
    rc = routh_first_column(a)
    r4, r5 = rc.column[3], rc.column[4]
    if scenario == "untreated":
        return bool((r4 < 0 and r5 < 0) or (r4 > 0 and r5 > 0))
    return bool(a[0] < 0 and ((r4 < 0 and r5 < 0) or (r4 > 0 and r5 < 0)
                              or (r4 > 0 and r5 > 0)))


def existence_region(p: ModelParams, p2_grid, c_grid, scenario: str) -> np.ndarray:
    """Boolean CCE-existence indicator over a (p2, c) grid.

    Entry [i, j] refers to (p2_grid[i], c_grid[j]).  The untreated rule is
    (R4<0 and R5<0) or (R4>0 and R5>0); the treated rule additionally
    requires a0 < 0 and accepts (R4>0, R5<0) as well.  c = 0 grid lines are
    allowed here (coefficients are evaluated directly) even though
    ModelParams itself requires c > 0.
    """
    p2_grid = np.asarray(p2_grid, dtype=float)
    c_grid = np.asarray(c_grid, dtype=float)
    for name, grid in (("p2", p2_grid), ("c", c_grid)):
        if grid.size == 0:
            raise ValueError(f"{name} grid is empty")
        if grid.size > 1 and np.any(np.diff(grid) <= 0.0):
            raise ValueError(f"{name} grid must be strictly increasing")
    if scenario not in ("untreated", "treated"):
        raise ValueError(f"unknown scenario {scenario!r}")
    out = np.zeros((p2_grid.size, c_grid.size), dtype=bool)
    for i, p2 in enumerate(p2_grid):
        for j, c in enumerate(c_grid):
            a = _quintic_values(c, p2, p.mu1, p.mu3, p.p1, p.p3,
                                p.g1, p.g2, p.g3, p.r2, p.b, p.s1, p.s3)
            out[i, j] = _region_rule(scenario, a)
    return out
