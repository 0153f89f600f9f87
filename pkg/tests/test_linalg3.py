"""Closed-form 3x3 eigenvalues and characteristic-coefficient helpers."""

import numpy as np

from immunopattern.linalg3 import char_coeffs, char_coeffs_in_k2, eig3


def _sorted(eigs):
    return np.array(sorted(eigs, key=lambda z: (round(z.real, 9), z.imag)))


def test_eig3_matches_lapack_on_random_matrices():
    rng = np.random.default_rng(5)
    for _ in range(200):
        m = rng.normal(scale=3.0, size=(3, 3))
        ours = _sorted(eig3(m))
        ref = _sorted(np.linalg.eigvals(m))
        scale = max(1.0, np.max(np.abs(ref)))
        assert np.max(np.abs(ours - ref)) < 1e-7 * scale


def test_eig3_three_real_and_complex_pair_branches():
    m = np.diag([1.0, 2.0, 3.0])
    np.testing.assert_allclose(_sorted(eig3(m)), [1, 2, 3], atol=1e-12)
    # block rotation: eigenvalues 2, 1 +/- 2i
    m = np.array([[1.0, -2.0, 0.0], [2.0, 1.0, 0.0], [0.0, 0.0, 2.0]])
    got = _sorted(eig3(m))
    np.testing.assert_allclose(got, [1 - 2j, 1 + 2j, 2], atol=1e-12)


def test_eig3_degenerate_falls_back():
    # triple eigenvalue: discriminant is exactly zero
    np.testing.assert_allclose(_sorted(eig3(np.eye(3))), [1, 1, 1], atol=1e-12)
    m = np.array([[2.0, 1.0, 0.0], [0.0, 2.0, 0.0], [0.0, 0.0, 5.0]])
    got = _sorted(eig3(m))
    np.testing.assert_allclose(got, [2, 2, 5], atol=1e-7)


def test_char_coeffs_against_numpy_poly():
    rng = np.random.default_rng(9)
    for _ in range(50):
        m = rng.normal(size=(3, 3))
        a2, a1, a0 = char_coeffs(m)
        # numpy: det(lambda I - M) = l^3 + c2 l^2 + c1 l + c0
        c = np.poly(m)
        np.testing.assert_allclose([a2, a1, a0], [-c[1], -c[2], -c[3]],
                                   rtol=1e-8, atol=1e-10)


def test_polynomial_reconstruction_from_eigenvalues():
    # coefficients rebuilt from computed eigenvalues match the direct ones
    rng = np.random.default_rng(13)
    for _ in range(50):
        m = rng.normal(scale=2.0, size=(3, 3))
        a2, a1, a0 = char_coeffs(m)
        roots = eig3(m)
        c = np.poly(roots)  # monic in lambda
        np.testing.assert_allclose([-c[1].real, -c[2].real, -c[3].real],
                                   [a2, a1, a0], rtol=1e-8, atol=1e-8)


def test_char_coeffs_in_k2_identity():
    rng = np.random.default_rng(17)
    j = rng.normal(size=(3, 3))
    d = np.zeros((3, 3))
    d[0, 0], d[1, 1], d[2, 2], d[2, 1] = 0.4, 0.02, 0.9, -0.3
    cc = char_coeffs_in_k2(j, d)
    assert len(cc["a2"]) == 2 and len(cc["a1"]) == 3 and len(cc["a0"]) == 4
    for kappa in (0.0, 0.7, 13.0, 400.0):
        direct = char_coeffs(j - d * kappa)
        evald = [np.polyval(cc[key][::-1], kappa) for key in ("a2", "a1", "a0")]
        np.testing.assert_allclose(evald, direct, rtol=1e-10, atol=1e-8)
