"""Classification, Hopf location, dispersion relation and Turing threshold."""

import numpy as np
import pytest

from immunopattern.errors import BracketError
from immunopattern.kinetics import jacobian
from immunopattern.equilibria import (_verdict, cancer_free_equilibrium,
                                      coexistence_equilibria, routh_first_column)
from immunopattern.linalg3 import char_coeffs
from immunopattern.stability import (REFERENCE_D32_THRESHOLD, classify,
                                     critical_d32, diffusion_matrix,
                                     dispersion_char_coeffs, dispersion_matrix,
                                     dispersion_relation, hopf_scan,
                                     stability_sweep)


# ---------------------------------------------------------------- classify

def test_cfe_stability_iff_condition(treated):
    # stable exactly when u1* > r2*g2/p2; u1* does not depend on p2
    eq = cancer_free_equilibrium(treated)
    u1 = eq.state[0]
    for p2 in (0.5, 6.0):
        p = treated.replace(p2=p2)
        verdict = classify(p, cancer_free_equilibrium(p).state).stability
        expected = "stable" if u1 > p.r2 * p.g2 / p2 else "unstable"
        assert verdict == expected, p2


def test_origin_unstable_without_therapy(untreated):
    eq = classify(untreated, (0.0, 0.0, 0.0))
    assert eq.kind == "CFE"
    assert eq.stability == "unstable"
    assert np.any(np.isclose(eq.eigenvalues.real, untreated.r2))


def test_untreated_cce_stable(untreated, cce_untreated):
    eq = classify(untreated, cce_untreated.state)
    assert eq.kind == "CCE"
    assert eq.stability == "stable"


def test_classify_rejects_non_fixed_points(untreated):
    with pytest.raises(ValueError, match="not a fixed point"):
        classify(untreated, (1.0, 1.0, 1.0))


def test_verdict_depends_only_on_sign_pattern():
    eigs = np.array([-1.0 + 2j, -1.0 - 2j, -0.5 + 0j])
    for perm in ([0, 1, 2], [2, 0, 1], [1, 2, 0]):
        assert _verdict(eigs[perm]) == "stable"
    assert _verdict(np.array([-1.0, 1e-12, -2.0])) == "marginal"
    assert _verdict(np.array([-1.0, 2e-9, -2.0])) == "unstable"


# ---------------------------------------------------------------- sweep

def test_sweep_finds_stable_subinterval(untreated):
    sw = stability_sweep(untreated, np.linspace(0.017, 0.58, 30))
    assert sw.stable_interval is not None
    alpha, beta = sw.stable_interval
    assert alpha < beta


def test_sweep_brackets_oscillatory_crossing(untreated):
    rows = stability_sweep(untreated, [0.515, 0.525]).rows
    assert rows[0].stability == "stable"
    assert rows[1].stability == "unstable"
    dominant = rows[1].eigenvalues[np.argmax(rows[1].eigenvalues.real)]
    assert abs(dominant.imag) > 0.1


def test_sweep_empty_range(untreated):
    sw = stability_sweep(untreated, [])
    assert sw.rows == [] and sw.stable_interval is None


def test_sweep_flags_samples_without_cce(treated):
    # past p2 ~ 4.8 the treated quintic has no admissible root
    sw = stability_sweep(treated, [6.0, 0.5])
    assert [r.found for r in sw.rows] == [False, True]


# ---------------------------------------------------------------- Hopf

def test_hopf_untreated_critical_value(untreated):
    res = hopf_scan(untreated, 0.3, 0.58)
    assert res is not None
    assert abs(res.p2_critical - 0.520) < 0.005
    assert abs(res.eigenpair[1].imag) > 0.1
    assert abs(res.eigenpair[1].real) < 1e-3


def test_hopf_treated_critical_value(treated):
    res = hopf_scan(treated, 0.3, 0.58)
    assert res is not None
    assert abs(res.p2_critical - 0.498) < 0.005


def test_hopf_bracketing_property(untreated):
    res = hopf_scan(untreated, 0.3, 0.58)
    lo = coexistence_equilibria(untreated.replace(p2=res.p2_critical - 1e-3))[-1]
    hi = coexistence_equilibria(untreated.replace(p2=res.p2_critical + 1e-3))[-1]

    def pair_re(eq):
        pair = eq.eigenvalues[np.abs(eq.eigenvalues.imag) > 1e-9]
        return np.max(pair.real)

    assert pair_re(lo) < 0.0 < pair_re(hi)


def test_hopf_none_inside_stable_interval(untreated):
    assert hopf_scan(untreated, 0.1, 0.2) is None


# ---------------------------------------------------------------- dispersion

def test_dispersion_matrix_at_zero_wavenumber(untreated, cce_untreated):
    a0 = dispersion_matrix(untreated, cce_untreated.state, 0.0)
    np.testing.assert_array_equal(a0, jacobian(untreated, cce_untreated.state))


def test_diffusion_matrix_pattern(untreated):
    d = diffusion_matrix(untreated)
    assert d[0, 0] == untreated.d11 and d[1, 1] == untreated.d22
    assert d[2, 2] == untreated.d33 and d[2, 1] == untreated.d32
    mask = np.ones((3, 3), dtype=bool)
    mask[[0, 1, 2, 2], [0, 1, 2, 1]] = False
    assert np.all(d[mask] == 0.0)


def test_dispersion_trace_coefficients(untreated, cce_untreated):
    # printed: a2(k) = -55.59 - 0.011 k^2 (trace is exactly linear in k^2)
    cc = dispersion_char_coeffs(untreated, cce_untreated.state)
    assert abs(cc["a2"][0] - (-55.59)) < 0.005
    assert abs(cc["a2"][1] - (-0.011)) < 0.0005
    for k in (0.0, 10.0, 50.0):
        value = np.polyval(cc["a2"][::-1], k * k)
        printed = -55.59 - 0.011 * k * k
        assert abs(value - printed) < 0.005 + 0.0005 * k * k


def test_dispersion_lambda1_coefficients(untreated, cce_untreated):
    # printed: a1(k) = -1.427 - 0.057 k^2.  The printed expression is the
    # k^0/k^2 truncation; the full coefficient also carries a k^4 term
    # (~ -1e-5 k^4), so the comparison is made on the truncated part.
    cc = dispersion_char_coeffs(untreated, cce_untreated.state)
    assert abs(cc["a1"][0] - (-1.427)) < 0.005
    assert abs(cc["a1"][1] - (-0.057)) < 0.0005
    assert cc["a1"][2] < 0.0  # the truncated k^4 term is small but real
    assert abs(cc["a1"][2]) < 1e-4
    for k in (0.0, 10.0, 50.0):
        truncated = cc["a1"][0] + cc["a1"][1] * k * k
        printed = -1.427 - 0.057 * k * k
        assert abs(truncated - printed) < 0.005 + 0.0005 * k * k


def test_dispersion_relation_unstable_at_positive_d32(untreated, cce_untreated):
    dr = dispersion_relation(untreated.replace(d32=0.01), cce_untreated.state,
                             np.arange(0.0, 200.5, 0.5))
    assert dr.growth_max > 0.0
    assert dr.k_max > 0.0


def test_dispersion_zero_mode_matches_ode_stability(untreated, cce_untreated):
    dr = dispersion_relation(untreated, cce_untreated.state, [0.0])
    assert dr.growth[0] < 0.0
    assert np.isclose(dr.growth[0], np.max(cce_untreated.eigenvalues.real))


def test_dispersion_growth_sign_matches_cubic_routh(untreated, cce_untreated):
    # sign of max Re(lambda) of A(k) vs a Routh count on its cubic
    rng = np.random.default_rng(41)
    p = untreated.replace(d32=0.01)
    j = jacobian(p, cce_untreated.state)
    d = diffusion_matrix(p)
    checked = 0
    while checked < 50:
        k = rng.uniform(0.0, 120.0)
        dr = dispersion_relation(p, cce_untreated.state, [k])
        if abs(dr.growth[0]) < 1e-9:
            continue
        a2, a1, a0 = char_coeffs(j - d * k * k)
        # monic cubic l^3 - a2 l^2 - a1 l - a0, ascending coefficients:
        rc = routh_first_column(np.array([-a0, -a1, -a2, 1.0]))
        assert (rc.sign_changes > 0) == (dr.growth[0] > 0.0), k
        checked += 1


def test_uniform_diffusion_shifts_spectrum(untreated, cce_untreated):
    delta = 0.005
    p = untreated.replace(d11=delta, d22=delta, d33=delta, d32=0.0)
    base = np.max(np.linalg.eigvals(jacobian(p, cce_untreated.state)).real)
    for k in (0.0, 3.0, 17.0, 60.0):
        dr = dispersion_relation(p, cce_untreated.state, [k])
        assert abs(dr.growth[0] - (base - delta * k * k)) < 1e-9


def test_dispersion_grid_validation(untreated, cce_untreated):
    with pytest.raises(ValueError, match="empty"):
        dispersion_relation(untreated, cce_untreated.state, [])
    with pytest.raises(ValueError, match="nonnegative"):
        dispersion_relation(untreated, cce_untreated.state, [-1.0, 0.0])
    with pytest.raises(ValueError, match="increasing"):
        dispersion_relation(untreated, cce_untreated.state, [1.0, 0.5])


# ---------------------------------------------------------------- critical d32

def test_critical_d32_bracketing_untreated(untreated, cce_untreated):
    thr = critical_d32(untreated, cce_untreated.state, -2.0, 0.0)
    lo = dispersion_relation(untreated.replace(d32=thr - 0.01),
                             cce_untreated.state).growth_max
    hi = dispersion_relation(untreated.replace(d32=thr + 0.01),
                             cce_untreated.state).growth_max
    assert lo < 0.0 < hi
    ref = REFERENCE_D32_THRESHOLD["untreated"]
    print(f"untreated d32 threshold {thr:.4f} vs truncated-form reference "
          f"{ref} (difference {thr - ref:+.4f})")


def test_critical_d32_bracketing_treated(treated, cce_treated):
    # the treated base state carries a weak homogeneous oscillatory
    # instability (p2 = 0.5 lies past its p2 critical of ~0.498), so the
    # finite-wavelength threshold is isolated on a grid starting at k = 2
    k_grid = np.arange(2.0, 300.1, 0.5)
    thr = critical_d32(treated, cce_treated.state, -2.5, 0.0, k_grid)
    lo = dispersion_relation(treated.replace(d32=thr - 0.01),
                             cce_treated.state, k_grid).growth_max
    hi = dispersion_relation(treated.replace(d32=thr + 0.01),
                             cce_treated.state, k_grid).growth_max
    assert lo < 0.0 < hi
    ref = REFERENCE_D32_THRESHOLD["treated"]
    print(f"treated d32 threshold {thr:.4f} vs truncated-form reference "
          f"{ref} (difference {thr - ref:+.4f})")


def test_critical_d32_requires_sign_change(untreated, cce_untreated):
    with pytest.raises(BracketError):
        critical_d32(untreated, cce_untreated.state, -2.0, -1.5)
