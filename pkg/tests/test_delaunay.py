import json
import math

import mpmath as mp
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from qdelaunay import (ProfileInvariantError, ProfileSchemaError, eps_derivative, eval_profile,
                       hamiltonian, load_profile, make_params, save_profile, solve_delaunay)
from qdelaunay.delaunay import profile_from_dict, profile_to_dict, verify_profile


def test_invariants(profiles, p6):
    for eps, pr in profiles.items():
        assert verify_profile(pr) == []
        v = pr.samples[:, 1]
        assert v.min() >= eps - 1e-12 and v.max() < 1
        T = pr.period
        t = np.linspace(0, T, 401)
        assert np.max(np.abs(eval_profile(pr, T - t) - eval_profile(pr, t))) < 1e-8
        H = hamiltonian(p6, pr.samples[:, 1:].T)
        assert np.ptp(H) < 1e-8
        assert pr.energy == pytest.approx(H[0], abs=1e-10)


def test_turning_point_mpmath(prof05):
    """Taylor-series integration in 25 digits from the stored initial jet."""
    mp.mp.dps = 25
    f = mp.odefun(lambda t, y: [y[1], y[2], y[3], 10 * y[2] - 9 * y[0] + 24 * y[0] ** 5],
                  0, [mp.mpf(0.5), 0, mp.mpf(prof05.b_star), 0])
    y = [float(c) for c in f(mp.mpf(prof05.period) / 2)]
    assert abs(y[1]) < 1e-8 and abs(y[3]) < 1e-8
    assert y[0] == pytest.approx(prof05.samples[prof05.n_samples // 2, 1], abs=1e-10)


def test_reference_values(profiles, p6):
    # frozen after the mpmath turning-point check above
    assert profiles[0.5].period == pytest.approx(4.2628627914, abs=1e-8)
    assert profiles[0.5].energy == pytest.approx(-0.99877831, abs=1e-7)
    assert p6.H_cyl < profiles[0.5].energy < 0
    assert profiles[0.3].period > profiles[0.5].period > profiles[0.7].period


def test_cylinder(cyl6, p6):
    assert cyl6.is_cylinder and cyl6.b_star == 0
    assert cyl6.period == pytest.approx(3.748067, abs=1e-6)
    assert eval_profile(cyl6, 1.234) == p6.v_cyl
    assert verify_profile(cyl6) == []


@pytest.mark.parametrize("eps", [1.1, 0.01, -0.2])
def test_out_of_range(p6, eps):
    with pytest.raises(ValueError):
        solve_delaunay(p6, eps)


def test_period_decreasing_near_cylinder(p6):
    assert solve_delaunay(p6, 0.70).period > solve_delaunay(p6, 0.77).period


@pytest.mark.parametrize("order", range(6))
def test_eval_periodic(prof05, order):
    t = np.linspace(-1, 5, 37)
    np.testing.assert_allclose(eval_profile(prof05, t + prof05.period, order),
                               eval_profile(prof05, t, order), atol=1e-12)


def test_eval_fourth_derivative_is_ode(prof05, p6):
    t = np.random.default_rng(0).uniform(0, prof05.period, 200)
    v = eval_profile(prof05, t)
    rhs = p6.C2 * eval_profile(prof05, t, 2) - p6.C0 * v + p6.K_nl * v**p6.p
    assert np.max(np.abs(eval_profile(prof05, t, 4) - rhs)) < 100 * prof05.tol


def test_eval_matches_samples(prof05):
    np.testing.assert_array_equal(eval_profile(prof05, prof05.t), prof05.samples[:, 1])


def test_eval_bad_order(prof05):
    with pytest.raises(ValueError):
        eval_profile(prof05, 0.1, 6)


def test_eps_derivative(p6):
    d = eps_derivative(p6, 0.5, 1e-4)
    assert abs(d.w0_minus[0] - 1) < 10 * d.delta
    assert d.dT_deps < 0
    # linear growth: w(t + T) - w(t) = -dT/deps * v'(t)
    t = np.linspace(0, 4, 41)
    pr = solve_delaunay(p6, 0.5)
    lhs = d(t + pr.period) - d(t)
    err = np.max(np.abs(lhs + d.dT_deps * eval_profile(pr, t, 1)))
    assert err < 1e-3 * np.max(np.abs(lhs))


def test_eps_derivative_range(p6):
    with pytest.raises(ValueError):
        eps_derivative(p6, p6.eps_n - 1e-5, 1e-4)


def test_roundtrip(tmp_path, prof05):
    path = tmp_path / "p.json"
    save_profile(prof05, path)
    back = load_profile(path)
    np.testing.assert_array_equal(back.samples, prof05.samples)
    assert (back.period, back.energy, back.b_star, back.epsilon) == \
        (prof05.period, prof05.energy, prof05.b_star, prof05.epsilon)
    assert not list(tmp_path.glob("*.tmp"))


def test_tampered_period(tmp_path, prof05):
    d = profile_to_dict(prof05)
    d["period"] *= 1.01
    with pytest.raises(ProfileInvariantError):
        profile_from_dict(d)


def test_tampered_checksum(prof05):
    d = profile_to_dict(prof05)
    d["meta"] = dict(d["meta"], note="x")
    with pytest.raises(ProfileSchemaError):
        profile_from_dict(d)


@pytest.mark.parametrize("field", ["period", "samples", "schema_version"])
def test_missing_field(tmp_path, prof05, field):
    d = profile_to_dict(prof05)
    del d[field]
    path = tmp_path / "p.json"
    path.write_text(json.dumps(d))
    with pytest.raises(ProfileSchemaError):
        load_profile(path)


def test_garbage_file(tmp_path):
    path = tmp_path / "p.json"
    path.write_text("{not json")
    with pytest.raises(ProfileSchemaError):
        load_profile(path)


@settings(max_examples=6, deadline=None)
@given(st.floats(0.1, 0.77))
def test_property_sweep(eps):
    p = make_params(6)
    pr = solve_delaunay(p, eps)
    assert verify_profile(pr) == []
    assert p.H_cyl <= pr.energy < 0
    assert p.T_cyl <= pr.period
    assert math.isclose(pr.samples[0, 1], eps, abs_tol=1e-12)


@pytest.mark.parametrize("n", [5, 8])
def test_other_dimensions(n):
    p = make_params(n)
    pr = solve_delaunay(p, 0.6 * p.eps_n)
    assert verify_profile(pr) == []
    assert p.H_cyl < pr.energy < 0
