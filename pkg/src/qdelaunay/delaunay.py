"""Periodic Delaunay profiles by symmetric shooting.

A Delaunay solution with necksize ``eps`` starts from the jet
``(eps, 0, b, 0)`` at its minimum.  The shooting parameter ``b = v''(0)`` is
tuned so that ``v'''`` vanishes at the first maximum ``t1``; the solution is
then symmetric about ``t1`` and the period is ``2 t1``.
"""

from __future__ import annotations

import hashlib
import json
import math
import os
import tempfile
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path

import numpy as np
from scipy.optimize import brentq

from .core import CylState, DimensionParams, Event, hamiltonian, integrate, make_params

SCHEMA_VERSION = 1
DEFAULT_TOL = 1e-12
DEFAULT_SAMPLES = 2048
MAX_ORDER = 5

_B_MAX = 10.0
_N_SCAN = 64
_T_MAX = 200.0


class ShootingError(RuntimeError):
    """No admissible shooting bracket, or the root finder left the bracket."""


class ProfileInvariantError(RuntimeError):
    """A constructed or loaded profile violates one of its invariants."""


class ProfileSchemaError(ValueError):
    """A stored profile is missing fields, has the wrong schema or checksum."""


def node_jets(params: DimensionParams, jet4: np.ndarray) -> np.ndarray:
    """Extend 4-jets (shape ``(4, m)``) to derivatives 0..7 using the ODE."""
    v, v1, v2, v3 = np.asarray(jet4, dtype=float)
    p, K, C0, C2 = params.p, params.K_nl, params.C0, params.C2
    lv = np.log(v)
    q0 = np.exp(p * lv)
    q1 = p * np.exp((p - 1) * lv)
    q2 = p * (p - 1) * np.exp((p - 2) * lv)
    q3 = p * (p - 1) * (p - 2) * np.exp((p - 3) * lv)
    P1 = q1 * v1
    P2 = q2 * v1**2 + q1 * v2
    P3 = q3 * v1**3 + 3 * q2 * v1 * v2 + q1 * v3
    v4 = C2 * v2 - C0 * v + K * q0
    v5 = C2 * v3 - C0 * v1 + K * P1
    v6 = C2 * v4 - C0 * v2 + K * P2
    v7 = C2 * v5 - C0 * v3 + K * P3
    return np.array([v, v1, v2, v3, v4, v5, v6, v7])


def _quintic_hermite(f0, d0, s0, f1, d1, s1, u, h):
    u2 = u * u
    u3 = u2 * u
    u4 = u3 * u
    u5 = u4 * u
    H0 = 1 - 10 * u3 + 15 * u4 - 6 * u5
    H1 = u - 6 * u3 + 8 * u4 - 3 * u5
    H2 = 0.5 * u2 - 1.5 * u3 + 1.5 * u4 - 0.5 * u5
    H3 = 10 * u3 - 15 * u4 + 6 * u5
    H4 = -4 * u3 + 7 * u4 - 3 * u5
    H5 = 0.5 * u3 - u4 + 0.5 * u5
    return f0 * H0 + h * d0 * H1 + h * h * s0 * H2 + f1 * H3 + h * d1 * H4 + h * h * s1 * H5


@dataclass
class DelaunayProfile:
    params: DimensionParams
    epsilon: float
    b_star: float
    period: float
    energy: float
    samples: np.ndarray  # (M, 5): t, v, v1, v2, v3 at t_j = j * period / M
    tol: float
    meta: dict = field(default_factory=dict)

    @property
    def n_samples(self) -> int:
        return self.samples.shape[0]

    @property
    def t(self) -> np.ndarray:
        return self.samples[:, 0]

    @property
    def is_cylinder(self) -> bool:
        return bool(self.meta.get("cylinder", False))

    @cached_property
    def jets(self) -> np.ndarray:
        """Derivatives 0..7 at the sample nodes, shape ``(8, M)``."""
        return node_jets(self.params, self.samples[:, 1:].T)

    def states(self) -> list[CylState]:
        return [CylState.from_jet(r[0], r[1:]) for r in self.samples]

    def __call__(self, t, order: int = 0):
        return eval_profile(self, t, order)


def eval_profile(profile: DelaunayProfile, t, order: int = 0):
    """``order``-th derivative of the periodic extension of the profile at ``t``.

    Each derivative order is a separate periodic quintic Hermite interpolant
    through the node values of that derivative and the next two, so order
    ``k`` uses stored/ODE derivatives ``k, k+1, k+2``.
    """
    if not 0 <= order <= MAX_ORDER:
        raise ValueError(f"order must be in 0..{MAX_ORDER}")
    D = profile.jets
    M = profile.n_samples
    T = profile.period
    h = T / M
    scalar = np.ndim(t) == 0
    tt = np.atleast_1d(np.asarray(t, dtype=float))
    x = np.mod(tt, T) / h
    i = np.minimum(np.floor(x).astype(int), M - 1)
    u = x - i
    j = (i + 1) % M
    out = _quintic_hermite(D[order, i], D[order + 1, i], D[order + 2, i],
                           D[order, j], D[order + 1, j], D[order + 2, j], u, h)
    return float(out[0]) if scalar else out


# --------------------------------------------------------------------------
# shooting

def _shoot(params, eps, b, tol):
    """Return ``(t1, jet(t1))`` at the first maximum, or None if the orbit escapes."""
    turn = Event.crossing("max", 1, 0.0, direction=-1.0)
    dip = Event("dip", lambda t, y: y[0] - (eps - 1e-9), -1.0)
    traj = integrate(params, CylState(0.0, eps, 0.0, b, 0.0), _T_MAX, tol, [turn, dip])
    if traj.status != "max":
        return None
    t1 = traj.t_final
    return t1, traj.y[:, -1]


def _shoot_residual(params, eps, b, tol):
    r = _shoot(params, eps, b, tol)
    if r is None:
        return None
    t1, y = r
    if t1 < 1e-6:
        # Turned at once: the max sits at t ~ sqrt(-6b/v4(0)) where v''' ~ -sqrt(-6 b v4(0)).
        v4 = params.C2 * b - params.C0 * eps + params.K_nl * eps**params.p
        return -math.sqrt(max(-6.0 * b * v4, 0.0)) if v4 < 0 else float(y[3])
    return float(y[3])


def _find_brackets(params, eps, tol):
    b_lo = min(1e-6, 0.1 * (params.eps_n - eps))
    grid = np.geomspace(b_lo, _B_MAX, _N_SCAN)
    F = [_shoot_residual(params, eps, b, tol) for b in grid]
    diag = {"grid": [float(grid[0]), float(grid[-1]), len(grid)],
            "valid": int(sum(f is not None for f in F))}
    brackets = []
    for k in range(len(grid) - 1):
        fa, fb = F[k], F[k + 1]
        if fa is not None and fb is not None and fa * fb < 0:
            brackets.append((grid[k], grid[k + 1], fa, fb))
        elif (fa is None) != (fb is None):
            # Admissible/escaping edge: bisect towards it watching for a sign flip.
            if fa is None:
                good, bad, fg = grid[k + 1], grid[k], fb
            else:
                good, bad, fg = grid[k], grid[k + 1], fa
            for _ in range(200):
                mid = 0.5 * (good + bad)
                if mid in (good, bad):
                    break
                fm = _shoot_residual(params, eps, mid, tol)
                if fm is None:
                    bad = mid
                elif fm * fg < 0:
                    lo, hi = sorted((good, mid))
                    f_lo, f_hi = (fg, fm) if good < mid else (fm, fg)
                    brackets.append((lo, hi, f_lo, f_hi))
                    break
                else:
                    good, fg = mid, fm
    diag["brackets"] = len(brackets)
    return brackets, diag


def _cylinder_profile(params: DimensionParams, tol: float, M: int) -> DelaunayProfile:
    T = params.T_cyl
    samples = np.zeros((M, 5))
    samples[:, 0] = np.arange(M) * (T / M)
    samples[:, 1] = params.v_cyl
    H = float(hamiltonian(params, CylState(0.0, params.v_cyl, 0.0, 0.0, 0.0)))
    return DelaunayProfile(params, params.eps_n, 0.0, T, H, samples, tol,
                           {"cylinder": True, "M": M})


def _build_samples(params, eps, b, t1, tol, M):
    T = 2.0 * t1
    start = CylState(0.0, eps, 0.0, b, 0.0)
    fwd = integrate(params, start, t1, tol)
    bwd = integrate(params, CylState(T, eps, 0.0, b, 0.0), t1, tol)
    if fwd.status != "completed" or bwd.status != "completed":
        raise ProfileInvariantError(f"half-period integration stopped: {fwd.status}/{bwd.status}")
    tj = np.arange(M) * (T / M)
    half = M // 2
    jets = np.empty((4, M))
    jets[:, : half + 1] = fwd.jet(tj[: half + 1])
    jets[:, half + 1:] = bwd.jet(tj[half + 1:])
    jets[:, 0] = start.jet
    seam = float(np.max(np.abs(fwd.jet(t1) - bwd.jet(t1))))
    return T, np.column_stack([tj, jets.T]), seam


def verify_profile(profile: DelaunayProfile) -> list[str]:
    """Return a list of violated invariants (empty when the profile is valid)."""
    bad = []
    p = profile.params
    tol = profile.tol
    S = profile.samples
    M = profile.n_samples
    eps = profile.epsilon
    if not (profile.period > 0 and np.all(np.isfinite(S))):
        return ["non-finite samples or non-positive period"]
    if np.max(np.abs(S[:, 0] - np.arange(M) * (profile.period / M))) > 1e-12 * profile.period:
        bad.append("sample times inconsistent with period")
    if abs(S[0, 1] - eps) > 10 * tol or abs(S[0, 2]) > 10 * tol or abs(S[0, 4]) > 10 * tol:
        bad.append("initial jet is not (eps, 0, b, 0)")
    v = S[:, 1]
    if np.min(v) < eps - 10 * tol or np.max(v) >= 1.0:
        bad.append("range eps <= v < 1 violated")
    sym = float(np.max(np.abs(v[1:] - v[1:][::-1])))
    if sym > 10 * tol:
        bad.append(f"symmetry defect {sym:.3e}")
    if np.min(v) > 0:
        H = hamiltonian(p, S[:, 1:].T)
        scale = 1 + abs(profile.energy)
        drift = float(np.max(np.abs(H - H[0])))
        if drift > 100 * tol * scale:
            bad.append(f"first-integral drift {drift:.3e}")
        if abs(H[0] - profile.energy) > 100 * tol * scale:
            bad.append("stored energy does not match the samples")
    if not profile.is_cylinder:
        s = np.sign(S[1:, 2])
        s = s[s != 0]
        if np.count_nonzero(np.diff(s)) != 1 or s[0] < 0:
            bad.append("profile does not have exactly one interior maximum")
    return bad


def solve_delaunay(params: DimensionParams, epsilon: float, tol: float = DEFAULT_TOL,
                   M: int = DEFAULT_SAMPLES) -> DelaunayProfile:
    """Delaunay profile with minimum ``epsilon`` attained at ``t = 0``.

    Parameters
    ----------
    params : DimensionParams
    epsilon : float
        Necksize, in ``[0.05 * eps_n, eps_n]``.
    tol : float
        Integrator tolerance (absolute and relative).
    M : int
        Number of equispaced samples per period (even).

    Raises
    ------
    ValueError
        ``epsilon`` outside the admissible range.
    ShootingError
        No shooting bracket found; the message carries the scan diagnostics.
    ProfileInvariantError
        The constructed profile fails verification.
    """
    eps_n = params.eps_n
    if not (0.05 * eps_n * (1 - 1e-12) <= epsilon <= eps_n * (1 + 1e-12)):
        raise ValueError(f"epsilon={epsilon} outside [0.05 eps_n, eps_n] = [{0.05 * eps_n}, {eps_n}]")
    if M % 2:
        raise ValueError("M must be even")
    if eps_n - epsilon < 1e-9:
        return _cylinder_profile(params, tol, M)

    brackets, diag = _find_brackets(params, epsilon, tol)
    if not brackets:
        raise ShootingError(f"no sign change of the shooting residual: {diag}")
    failures = []
    for lo, hi, flo, fhi in brackets:
        def F(b):
            r = _shoot_residual(params, epsilon, b, tol)
            if r is None:
                raise ShootingError(f"shot at b={b} escaped inside bracket [{lo}, {hi}]")
            return r
        b_star = brentq(F, lo, hi, xtol=1e-16, rtol=4 * np.finfo(float).eps, maxiter=200)
        t1, y1 = _shoot(params, epsilon, b_star, tol)
        T, samples, seam = _build_samples(params, epsilon, b_star, t1, tol, M)
        H = float(hamiltonian(params, CylState(0.0, epsilon, 0.0, b_star, 0.0)))
        meta = dict(diag, bracket=[float(lo), float(hi)], residual=abs(float(y1[3])),
                    seam=seam, M=M, cylinder=False)
        prof = DelaunayProfile(params, float(epsilon), float(b_star), float(T), H, samples, tol, meta)
        bad = verify_profile(prof)
        if not bad:
            return prof
        failures.append((b_star, bad))
    raise ProfileInvariantError(f"all shooting roots failed verification: {failures}")


# --------------------------------------------------------------------------
# derivative in the necksize

@dataclass
class EpsDerivative:
    epsilon: float
    delta: float
    t: np.ndarray
    w0_minus: np.ndarray
    dT_deps: float
    plus: DelaunayProfile = field(repr=False)
    minus: DelaunayProfile = field(repr=False)

    def __call__(self, t, order: int = 0):
        """Central difference of aligned profiles at arbitrary ``t``."""
        return (eval_profile(self.plus, t, order) - eval_profile(self.minus, t, order)) / (2 * self.delta)


def eps_derivative(params: DimensionParams, epsilon: float, delta: float,
                   tol: float = DEFAULT_TOL, M: int = DEFAULT_SAMPLES,
                   solver=None) -> EpsDerivative:
    """Central-difference ``d v_eps / d eps`` and ``dT/d eps``.

    Both neighbouring profiles carry their minimum at ``t = 0``, which is the
    only alignment used.  ``solver`` may replace :func:`solve_delaunay` (e.g. a
    cached lookup) and is called as ``solver(params, eps, tol)``.
    """
    solver = solver or (lambda p, e, tl: solve_delaunay(p, e, tl, M))
    if epsilon + delta > params.eps_n or epsilon - delta < 0.05 * params.eps_n:
        raise ValueError("eps +- delta leaves the admissible necksize range")
    plus = solver(params, epsilon + delta, tol)
    minus = solver(params, epsilon - delta, tol)
    dT = (plus.period - minus.period) / (2 * delta)
    base_T = 0.5 * (plus.period + minus.period)
    t = np.linspace(0.0, base_T, M, endpoint=False)
    w = (eval_profile(plus, t) - eval_profile(minus, t)) / (2 * delta)
    if abs(w[0] - 1.0) > 10 * delta or abs(plus.period - minus.period) > 0.1 * base_T:
        raise ValueError(f"delta={delta} too large: profiles fail the alignment check")
    return EpsDerivative(float(epsilon), float(delta), t, w, float(dT), plus, minus)


# --------------------------------------------------------------------------
# persistence

_FIELDS = ("schema_version", "n", "epsilon", "b_star", "period", "energy", "tol", "samples", "meta")


def _checksum(payload: dict) -> str:
    body = json.dumps({k: payload[k] for k in _FIELDS}, sort_keys=True)
    return hashlib.sha256(body.encode()).hexdigest()


def profile_to_dict(profile: DelaunayProfile) -> dict:
    d = {
        "schema_version": SCHEMA_VERSION,
        "n": profile.params.n,
        "epsilon": profile.epsilon,
        "b_star": profile.b_star,
        "period": profile.period,
        "energy": profile.energy,
        "tol": profile.tol,
        "samples": [dict(zip(("t", "v", "v1", "v2", "v3"), map(float, row)))
                    for row in profile.samples],
        "meta": profile.meta,
    }
    d["checksum"] = _checksum(d)
    return d


def profile_from_dict(d: dict, verify: bool = True) -> DelaunayProfile:
    missing = [k for k in _FIELDS if k not in d]
    if missing:
        raise ProfileSchemaError(f"missing fields {missing}")
    if d["schema_version"] != SCHEMA_VERSION:
        raise ProfileSchemaError(f"schema version {d['schema_version']} != {SCHEMA_VERSION}")
    try:
        samples = np.array([[s["t"], s["v"], s["v1"], s["v2"], s["v3"]] for s in d["samples"]],
                           dtype=float)
    except (KeyError, TypeError) as exc:
        raise ProfileSchemaError(f"malformed samples: {exc}") from exc
    prof = DelaunayProfile(make_params(int(d["n"])), float(d["epsilon"]), float(d["b_star"]),
                           float(d["period"]), float(d["energy"]), samples, float(d["tol"]),
                           dict(d["meta"]))
    if verify:
        bad = verify_profile(prof)
        if bad:
            raise ProfileInvariantError(f"loaded profile fails verification: {bad}")
    if "checksum" in d and d["checksum"] != _checksum(d):
        raise ProfileSchemaError("checksum mismatch")
    return prof


def save_profile(profile: DelaunayProfile, path) -> None:
    """Write the profile as JSON, atomically (temp file + rename)."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=path.name, suffix=".tmp")
    try:
        with os.fdopen(fd, "w") as fh:
            json.dump(profile_to_dict(profile), fh)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def load_profile(path) -> DelaunayProfile:
    with open(path) as fh:
        try:
            d = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ProfileSchemaError(f"not valid JSON: {exc}") from exc
    if not isinstance(d, dict):
        raise ProfileSchemaError("top-level JSON value must be an object")
    return profile_from_dict(d)
