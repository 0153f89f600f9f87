"""Eigenvalue and characteristic-polynomial helpers for 3x3 real matrices.

The characteristic polynomial convention used throughout is

    det(M - lambda*I) = -lambda^3 + a2*lambda^2 + a1*lambda + a0

so a2 = trace(M), a1 = -(sum of principal 2x2 minors), a0 = det(M).
Eigenvalues come from the closed-form cubic solution (trigonometric for
three real roots, Cardano for a complex pair) with a QR-iteration fallback
when the cubic discriminant is too close to zero for the analytic branch
to be trusted.
"""

from __future__ import annotations

import numpy as np

__all__ = ["char_coeffs", "eig3", "char_coeffs_in_k2"]

# relative discriminant size below which eig3 defers to LAPACK
_DISC_RTOL = 1e-12


def char_coeffs(m: np.ndarray) -> tuple:
    """Coefficients (a2, a1, a0) of det(M - lambda I) = -l^3 + a2 l^2 + a1 l + a0."""
    m = np.asarray(m, dtype=float)
    a2 = m[0, 0] + m[1, 1] + m[2, 2]
    minors = (
        m[0, 0] * m[1, 1] - m[0, 1] * m[1, 0]
        + m[0, 0] * m[2, 2] - m[0, 2] * m[2, 0]
        + m[1, 1] * m[2, 2] - m[1, 2] * m[2, 1]
    )
    det = (
        m[0, 0] * (m[1, 1] * m[2, 2] - m[1, 2] * m[2, 1])
        - m[0, 1] * (m[1, 0] * m[2, 2] - m[1, 2] * m[2, 0])
        + m[0, 2] * (m[1, 0] * m[2, 1] - m[1, 1] * m[2, 0])
    )
    return a2, -minors, det


def eig3(m: np.ndarray) -> np.ndarray:
    """Eigenvalues of a real 3x3 matrix as a length-3 complex array.

    Order is unspecified; callers that care should sort.
    """
    m = np.asarray(m, dtype=float)
    a2, a1, a0 = char_coeffs(m)
    # monic form lambda^3 + A l^2 + B l + C
    A, B, C = -a2, -a1, -a0
    # depressed cubic x^3 + p x + q with lambda = x - A/3
    p = B - A * A / 3.0
    q = 2.0 * A**3 / 27.0 - A * B / 3.0 + C
    disc = -4.0 * p**3 - 27.0 * q * q
    scale = 4.0 * abs(p) ** 3 + 27.0 * q * q
    if scale == 0.0 or abs(disc) < _DISC_RTOL * scale:
        return np.linalg.eigvals(m)
    shift = -A / 3.0
    if disc > 0.0:
        # three distinct real roots
        sp = np.sqrt(-p / 3.0)
        arg = np.clip(3.0 * q / (2.0 * p * sp), -1.0, 1.0)
        theta = np.arccos(arg)
        k = np.arange(3)
        x = 2.0 * sp * np.cos((theta - 2.0 * np.pi * k) / 3.0)
        return (x + shift).astype(complex)
    # one real root and a conjugate pair
    r = np.sqrt(q * q / 4.0 + p**3 / 27.0)
    big = -q / 2.0 - r if q >= 0.0 else -q / 2.0 + r
    a = np.cbrt(big)
    bb = 0.0 if a == 0.0 else -p / (3.0 * a)
    x_real = a + bb
    re = -x_real / 2.0
    im = np.sqrt(3.0) / 2.0 * abs(a - bb)
    return np.array([x_real + shift, re + shift + 1j * im, re + shift - 1j * im])


def _pmul(a, b):
    return np.convolve(a, b)


def _padd(*polys):
    n = max(len(p) for p in polys)
    out = np.zeros(n)
    for p in polys:
        out[: len(p)] += p
    return out


def char_coeffs_in_k2(j: np.ndarray, d: np.ndarray) -> dict:
    """Characteristic coefficients of J - D*k^2 as polynomials in k^2.

    Returns {'a2': ..., 'a1': ..., 'a0': ...} where each value is an
    ascending coefficient array in kappa = k^2 (a2 is linear, a1 quadratic,
    a0 cubic) for det(J - D kappa - lambda I) = -l^3 + a2 l^2 + a1 l + a0.
    """
    j = np.asarray(j, dtype=float)
    d = np.asarray(d, dtype=float)
    e = [[np.array([j[r, c], -d[r, c]]) for c in range(3)] for r in range(3)]
    a2 = _padd(e[0][0], e[1][1], e[2][2])
    minors = _padd(
        _pmul(e[0][0], e[1][1]), -_pmul(e[0][1], e[1][0]),
        _pmul(e[0][0], e[2][2]), -_pmul(e[0][2], e[2][0]),
        _pmul(e[1][1], e[2][2]), -_pmul(e[1][2], e[2][1]),
    )
    det = _padd(
        _pmul(e[0][0], _padd(_pmul(e[1][1], e[2][2]), -_pmul(e[1][2], e[2][1]))),
        -_pmul(e[0][1], _padd(_pmul(e[1][0], e[2][2]), -_pmul(e[1][2], e[2][0]))),
        _pmul(e[0][2], _padd(_pmul(e[1][0], e[2][1]), -_pmul(e[1][1], e[2][0]))),
    )
    return {"a2": a2, "a1": -minors, "a0": det}
