import math

import mpmath as mp
import numpy as np
import pytest

from qdelaunay import cyl_indicial, cyl_mu_squared, cyl_period
from qdelaunay.cylinder import CylClosedForms

mp.mp.dps = 40


def mp_mu_sq(n, k):
    """Roots of the degree-k biquadratic at the cylinder, by mpmath polyroots."""
    lam = k * (n - 2 + k)
    b = -(mp.mpf(n * (n - 4) + 8) / 2 + 2 * lam)
    c = -mp.mpf(n * n * (n - 4)) / 2 + mp.mpf(n * (n - 4)) / 2 * lam + lam**2
    r = sorted(mp.polyroots([1, b, c], extraprec=60), key=lambda z: mp.re(z))
    return float(mp.re(r[1])), float(mp.re(r[0]))


@pytest.mark.parametrize("n", [5, 6, 8])
@pytest.mark.parametrize("k", range(7))
def test_mu_squared_oracle(n, k):
    mu, mt = cyl_mu_squared(n, k)
    emu, emt = mp_mu_sq(n, k)
    assert mu == pytest.approx(emu, rel=1e-13)
    assert mt == pytest.approx(emt, rel=1e-12, abs=1e-12)


def test_mu_squared_reference():
    mu, mt = cyl_mu_squared(6, 0)
    assert (mu, mt) == (pytest.approx(12.810250, abs=1e-6), pytest.approx(-2.810250, abs=1e-6))
    assert cyl_mu_squared(5, 0)[1] == pytest.approx(-1.552343, abs=1e-6)
    for n in (5, 6, 7, 9):
        mu, mt = cyl_mu_squared(n, 1)
        assert mu == pytest.approx((n * n + 2) / 2, rel=1e-14)
        assert mt == pytest.approx(1.0, rel=1e-14)


def test_period():
    assert cyl_period(6) == pytest.approx(3.748067, abs=1e-6)
    assert cyl_period(5) == pytest.approx(5.0429655297, abs=1e-9)  # mpmath
    assert CylClosedForms(6).T_cyl == cyl_period(6)
    # the literal radical with +8 gives a different value
    assert abs(cyl_period(6, "plus8_radical") - cyl_period(6)) > 0.1
    with pytest.raises(ValueError):
        cyl_period(6, "other")


def test_indicial_roots():
    np.testing.assert_allclose(cyl_indicial(6, 1), [-math.sqrt(19), -1, 1, math.sqrt(19)], rtol=1e-14)
    np.testing.assert_allclose(cyl_indicial(5, 1), [-3.674235, -1, 1, 3.674235], atol=1e-6)
    np.testing.assert_allclose(cyl_indicial(6, 0), [-3.579140, 0, 0, 3.579140], atol=1e-6)
    for k in range(8):
        g = cyl_indicial(6, k)
        np.testing.assert_allclose(g, -g[::-1], atol=1e-14)
        assert np.all(np.diff(g) >= 0)


def test_bad_input():
    with pytest.raises(ValueError):
        cyl_mu_squared(4, 0)
    with pytest.raises(ValueError):
        cyl_mu_squared(6, -1)
