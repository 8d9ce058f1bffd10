import math

import mpmath as mp
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from qdelaunay.fourier_laplace import (DivergentTransformError, FLSample, fl_inverse, fl_roundtrip,
                                       fl_transform, geometric_closed_form, geometric_sample,
                                       transform_norm_sq, transform_on_grid, weighted_norm_sq)


def test_single_period_support():
    w = FLSample(lambda t: np.sin(3 * t) + 2, T=1.0, support=0.999)
    t = np.linspace(0, 0.9, 7)
    for xi in (0.0, 1.3, 2.0 - 0.4j):
        np.testing.assert_allclose(fl_transform(w, t, xi), np.sin(3 * t) + 2, atol=1e-15)


def test_closed_form_mpmath():
    g = geometric_sample()
    xi = mp.mpc(0.7, 0.3)
    ref = complex(mp.nsum(lambda k: mp.exp(-1j * xi * k) * mp.exp(-(0.25 + k)), [0, mp.inf]))
    assert fl_transform(g, 0.25, complex(xi)) == pytest.approx(ref, abs=1e-13)
    assert geometric_closed_form(0.25, complex(xi)) == pytest.approx(ref, abs=1e-13)


@settings(max_examples=30, deadline=None)
@given(st.floats(0, 0.99), st.floats(0, 2 * math.pi), st.floats(-2, 0.8))
def test_holonomy(t, eta, nu):
    g = geometric_sample()
    xi = eta + 1j * nu
    lhs = fl_transform(g, t + 1.0, xi)
    assert abs(lhs - np.exp(1j * xi) * fl_transform(g, t, xi)) < 1e-12 * max(1, abs(lhs))


def test_divergent():
    with pytest.raises(DivergentTransformError):
        fl_transform(geometric_sample(), 0.1, 0.3 + 1.2j)


@pytest.mark.parametrize("nu", [0.0, -0.5, 0.5])
def test_roundtrip_geometric(nu):
    t = np.linspace(0, 4.5, 19)
    got = fl_roundtrip(geometric_sample(), t, nu)
    assert np.max(np.abs(got - np.exp(-t))) < 1e-8


def test_roundtrip_compact_support():
    w = FLSample(lambda t: t * (3 - t), T=1.0, support=3.0)
    t = np.array([0.2, 1.5, 2.7])
    np.testing.assert_allclose(fl_roundtrip(w, t, 0.0, n_eta=16).real, t * (3 - t), atol=1e-13)


def test_inverse_axis():
    vals = transform_on_grid(geometric_sample(), [0.1, 0.6], 0.0, 64)
    assert vals.shape == (2, 64)
    np.testing.assert_allclose(fl_inverse(vals, 0.0, 2).real, np.exp(-np.array([2.1, 2.6])), atol=1e-12)


def test_parseval():
    g = geometric_sample()
    lhs = transform_norm_sq(g, 0.0)
    assert lhs == pytest.approx(2 * math.pi * 0.5, abs=1e-8)
    assert lhs == pytest.approx(2 * math.pi * weighted_norm_sq(g, 0.0), abs=1e-8)


@pytest.mark.parametrize("nu", [-0.5, 0.3])
def test_weighted_parseval(nu):
    g = geometric_sample()
    lhs = transform_norm_sq(g, nu)
    assert lhs == pytest.approx(2 * math.pi * weighted_norm_sq(g, nu, floor_weight=True), rel=1e-10)
    smooth = weighted_norm_sq(g, nu)
    ratio = lhs / (2 * math.pi * smooth)
    assert math.exp(-2 * abs(nu)) <= ratio <= math.exp(2 * abs(nu))
