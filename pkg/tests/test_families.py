import math

import numpy as np
import pytest

from qdelaunay import eval_profile, make_params, sph_jet
from qdelaunay.families import (AxisymField, SingularDomainError, TranslationSpec, eval_family,
                                expansion_error, fd_weights, h_rad, h_rad_family, hrad_rows,
                                pde_residual, pos_laplacian_field, radial_slice, family_slice)


@pytest.fixture(scope="module")
def fam(prof05):
    return TranslationSpec(prof05, 0.1)


def test_spec_validation(prof05):
    with pytest.raises(ValueError):
        TranslationSpec(prof05, 0.6)
    with pytest.raises(ValueError):
        TranslationSpec(prof05, 0.1, kind="other")
    assert TranslationSpec(prof05, 0.1).singular_time == pytest.approx(math.log(0.1))
    assert TranslationSpec(prof05, 0.1, "inner").singular_time == pytest.approx(-math.log(0.1))


def test_singular_domain(prof05):
    s = TranslationSpec(prof05, 0.1)
    with pytest.raises(SingularDomainError):
        s.check_domain(-3.0, 1.0)
    with pytest.raises(SingularDomainError):
        eval_family(s, math.log(0.1), 1.0)


def test_identity_limit(prof05):
    t = np.linspace(0, 5, 11)
    for a in (1e-3, 1e-4):
        d = np.max(np.abs(eval_family(TranslationSpec(prof05, a), t, 0.5) - eval_profile(prof05, t)))
        assert d < 2 * a
    np.testing.assert_array_equal(eval_family(TranslationSpec(prof05, 0.0), t, 0.3), eval_profile(prof05, t))


def test_equator_second_order(fam, prof05):
    t = np.array([3.0, 4.0, 5.0, 6.0])
    d = np.abs(eval_family(fam, t, 0.0) - eval_profile(prof05, t))
    assert np.all(d <= 0.5 * np.exp(-2 * t))


def test_sign_relation(fam, prof05):
    t = np.linspace(2, 8, 13)[:, None]
    s = np.array([-0.9, -0.3, 0.3, 0.9])[None, :]
    # sign of the first-order term: -v' + (n-4)/2 v > 0 is checked on the grid
    g = -eval_profile(prof05, t, 1) + eval_profile(prof05, t)
    assert np.all(g > 0)
    diff = eval_family(fam, t, s) - eval_profile(prof05, t)
    assert np.all(np.sign(diff) == np.sign(s))


def test_expansion_rate(fam):
    r = expansion_error(fam)
    assert r.beta >= 1.9
    r2 = expansion_error(TranslationSpec(fam.profile, 0.05))
    ratio = r.E / r2.E
    assert np.all((ratio > 3.5) & (ratio < 4.5))
    assert len(r.csv_rows()) == 61


def test_expansion_zero_translation(prof05):
    r = expansion_error(TranslationSpec(prof05, 0.0))
    assert np.all(r.E == 0) and math.isnan(r.beta)


def test_expansion_inputs(prof05):
    with pytest.raises(ValueError):
        expansion_error(TranslationSpec(prof05, 0.1, "inner"))
    with pytest.raises(ValueError):
        expansion_error(TranslationSpec(prof05, 0.1), (1.0, 8.0))


@pytest.mark.parametrize("order", [2, 4, 6, 8])
@pytest.mark.parametrize("m", [1, 2, 3, 4])
def test_fd_weights_exact_on_polynomials(m, order):
    off, w = fd_weights(m, order)
    x = 0.3
    for deg in range(order + m):
        exact = math.perm(deg, m) * x ** (deg - m) if deg >= m else 0.0
        approx = np.sum(w * (x + off * 1.0) ** deg)
        assert approx == pytest.approx(exact, abs=1e-8 * max(1, abs(exact)))


def _family_residual(fam, h):
    t = np.arange(2.0, 6.0 + 1e-9, 0.4)
    s = np.linspace(-1, 1, 11)
    return pde_residual(AxisymField.from_family(fam, t, s, h, h), fam.params)


def test_residual_fourth_order(fam):
    r1, r2 = _family_residual(fam, 0.1), _family_residual(fam, 0.05)
    assert 8 <= r1 / r2 <= 32


def test_residual_radial(prof05, p6):
    t = np.linspace(1, 4, 7)
    s = np.linspace(-0.9, 0.9, 5)
    res = [pde_residual(AxisymField.from_radial(lambda tt: eval_profile(prof05, tt), t, s, h, h), p6)
           for h in (0.1, 0.05)]
    assert res[1] < 50 * 0.05**4 + 1e-10
    assert 8 <= res[0] / res[1] <= 32


def test_residual_non_solution(prof05, p6):
    t = np.linspace(1, 4, 7)
    s = np.linspace(-0.9, 0.9, 5)
    for h in (0.1, 0.05, 0.025):
        fld = AxisymField.from_radial(lambda tt: eval_profile(prof05, tt) + 0.01, t, s, h, h)
        assert pde_residual(fld, p6) > 0.05


def test_residual_spacing_guard(fam):
    with pytest.raises(ValueError):
        AxisymField.from_family(fam, [3.0], [0.0], 0.5, 0.1)


def test_positive_laplacian(fam):
    t = np.linspace(2, 8, 13)
    s = np.linspace(-1, 1, 9)
    assert np.all(pos_laplacian_field(AxisymField.from_family(fam, t, s, 0.05, 0.05), fam.params))


def test_hrad_radial(profiles, p6):
    for pr in profiles.values():
        for t in (0.0, 1.3):
            assert h_rad(radial_slice(pr, t), p6) == pytest.approx(p6.sphere_area * pr.energy, rel=1e-8)


def test_hrad_cylinder(cyl6, p6):
    val = h_rad(radial_slice(cyl6, 0.0), p6)
    # Gauss-Legendre against the weight (1 - s^2)^(3/2)
    assert val == pytest.approx(math.pi**3 * p6.H_cyl, rel=1e-8)
    assert val == pytest.approx(-56.96169, abs=1e-3)


@pytest.mark.parametrize("n", [5, 6, 8])
def test_hrad_sphere(n):
    p = make_params(n)
    assert abs(h_rad(radial_slice(sph_jet(n, 0.4), 0.4), p)) < 1e-12


def test_hrad_family_constant(fam, prof05, p6):
    vals = np.array([r[1] for r in hrad_rows(fam, [3.0, 5.0, 7.0])])
    assert np.ptp(vals) / abs(vals.mean()) < 1e-4
    assert vals.mean() == pytest.approx(p6.sphere_area * prof05.energy, rel=1e-3)


def test_hrad_needs_laplacian(prof05, p6, fam):
    from qdelaunay.families import slice_jets
    s, _ = np.polynomial.legendre.leggauss(64)
    jets = slice_jets(AxisymField(lambda tt, ss: eval_family(fam, tt, ss), [4.0], s, 0.02, 0.02, 8))
    with pytest.raises(ValueError):
        h_rad(jets, p6)
    assert family_slice(lambda tt, ss: eval_family(fam, tt, ss), 4.0, p6).lap.shape == (64,)


def test_hrad_family_domain(fam):
    with pytest.raises(SingularDomainError):
        h_rad_family(fam, math.log(0.1) + 0.1)
