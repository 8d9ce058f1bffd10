"""Fourier-mode Jacobi operators, their monodromy and indicial roots.

Projecting the linearization about ``v_eps`` onto a spherical harmonic of
degree ``k`` (eigenvalue ``lam = k(n-2+k)``) gives

    L w = w'''' + c2 w'' + c0(t) w,
    c2 = -(C2 + 2 lam),
    c0(t) = C0 + n(n-4)/2 lam + lam^2 - K_lin v_eps(t)^(8/(n-4)).

The monodromy ``A`` maps the 4-jet of a solution at ``t = 0`` to its jet at
``t = T``.  Modes with large ``lam`` grow like ``exp(sqrt(lam) T)``, so the
period is split into segments whose propagators stay well conditioned, and
the multipliers come from their product formed in extended precision
rather than from the badly scaled double-precision product.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import mpmath as mp
import numpy as np
from scipy.integrate import solve_ivp

from .core import IntegrationError
from .delaunay import DelaunayProfile, eval_profile

TOL_UNIT = 1e-6
ZERO_ROOT_TOL = 1e-4


@dataclass(frozen=True)
class FourierMode:
    k: int
    lam: float

    @classmethod
    def of_degree(cls, n: int, k: int) -> "FourierMode":
        if k < 0:
            raise ValueError("degree must be >= 0")
        return cls(int(k), float(k * (n - 2 + k)))


def _mode(profile: DelaunayProfile, mode) -> FourierMode:
    return mode if isinstance(mode, FourierMode) else FourierMode.of_degree(profile.params.n, mode)


@dataclass(frozen=True)
class LinearPotential:
    """Coefficients ``(c4, c2, c0(t))`` of the degree-k Jacobi operator."""

    profile: DelaunayProfile
    mode: FourierMode
    c4: float
    c2: float
    c0_const: float

    def c0(self, t):
        p = self.profile.params
        v = eval_profile(self.profile, t)
        return self.c0_const - p.K_lin * np.exp(p.lin_exp * np.log(v))


def linear_potential(profile: DelaunayProfile, mode) -> LinearPotential:
    mode = _mode(profile, mode)
    p = profile.params
    n, lam = p.n, mode.lam
    return LinearPotential(profile, mode, 1.0, -(p.C2 + 2 * lam),
                           p.C0 + n * (n - 4) / 2.0 * lam + lam * lam)


def apply_operator(pot: LinearPotential, t, w0, w2, w4, sigma: float = 0.0):
    """``(L - sigma) w`` at ``t`` from the samples ``w, w'', w''''``."""
    return w4 + pot.c2 * w2 + (pot.c0(t) - sigma) * w0


def _n_segments(pot: LinearPotential, sigma: float) -> int:
    p = pot.profile.params
    c0_max = abs(pot.c0_const) + p.K_lin + abs(sigma)
    rate = math.sqrt(abs(pot.c2)) + c0_max**0.25 + 1.0
    return max(4, int(math.ceil(rate * pot.profile.period / 2.0)))


def segment_propagators(pot: LinearPotential, tol: float, sigma: float = 0.0,
                        n_seg: int | None = None) -> list[np.ndarray]:
    """Fundamental matrices of ``(L - sigma) w = 0`` over equal sub-intervals of one period."""
    T = pot.profile.period
    N = n_seg or _n_segments(pot, sigma)
    c2 = pot.c2

    def f(t, y):
        Y = y.reshape(4, 4)
        out = np.empty_like(Y)
        out[:3] = Y[1:]
        out[3] = -c2 * Y[2] - (pot.c0(t) - sigma) * Y[0]
        return out.ravel()

    edges = np.linspace(0.0, T, N + 1)
    mats = []
    for a, b in zip(edges[:-1], edges[1:]):
        res = solve_ivp(f, (a, b), np.eye(4).ravel(), method="DOP853", rtol=tol, atol=tol)
        if res.status != 0:
            raise IntegrationError(res.message)
        mats.append(res.y[:, -1].reshape(4, 4))
    return mats


def product_eigenvalues(mats: list[np.ndarray]) -> np.ndarray:
    """Eigenvalues of ``mats[-1] @ ... @ mats[0]``.

    The factors are exact binary floats, so their product and its spectrum
    are formed in extended precision; the working precision grows with the
    product norm so the smallest multipliers keep full relative accuracy.
    """
    growth = sum(math.log10(max(np.linalg.norm(M, 2), 1.0)) for M in mats)
    with mp.workdps(int(30 + 2 * math.ceil(growth))):
        A = mp.eye(4)
        for M in mats:
            A = mp.matrix(M.tolist()) * A
        ev = mp.eig(A, left=False, right=False)
    return np.array([complex(z) for z in ev])


def unit_tolerance(mats: list[np.ndarray], tol: float, tol_unit: float = TOL_UNIT) -> float:
    """Unit-circle tolerance: ``tol_unit`` widened to the O(sqrt(error)) split of a Jordan pair."""
    kappa = max(np.linalg.cond(M) for M in mats)
    return max(tol_unit, 10.0 * math.sqrt(len(mats) * tol * kappa))


def _half_maps(mats: list[np.ndarray], jet0: np.ndarray, mult: float = 1.0):
    h = len(mats) // 2
    fwd = np.asarray(jet0, dtype=float)
    for M in mats[:h]:
        fwd = M @ fwd
    bwd = mult * np.asarray(jet0, dtype=float)
    for M in mats[h:][::-1]:
        bwd = np.linalg.solve(M, bwd)
    return fwd, bwd


def periodicity_defect(mats: list[np.ndarray], jet0: np.ndarray, mult: float) -> float:
    """Relative mismatch at mid-period between ``jet0`` propagated forward and
    ``mult * jet0`` propagated backward; zero iff ``jet0`` is an eigenvector
    of the monodromy with eigenvalue ``mult``.  Splitting at mid-period keeps
    the amplification of integration error to half a period."""
    fwd, bwd = _half_maps(mats, jet0, mult)
    return float(np.linalg.norm(fwd - bwd) / np.linalg.norm(fwd))


def split_multiplier(mats: list[np.ndarray], jet0: np.ndarray) -> float:
    """Least-squares ``mult`` with ``forward(jet0) = mult * backward(jet0)`` at mid-period.

    For a known eigenvector this is accurate to the integration error, even
    at a defective eigenvalue whose computed value is only accurate to the
    square root of that error.
    """
    fwd, bwd = _half_maps(mats, jet0)
    return float(fwd @ bwd / (bwd @ bwd))


@dataclass
class MonodromyResult:
    n: int
    epsilon: float
    mode: FourierMode
    period: float
    A: np.ndarray
    det: float
    eigenvalues: np.ndarray
    indicial_roots: np.ndarray
    unit_multiplicity: int
    segments: list = field(repr=False, default_factory=list)

    def to_dict(self) -> dict:
        return {
            "n": self.n, "epsilon": self.epsilon, "k": self.mode.k, "lambda": self.mode.lam,
            "period": self.period, "A": self.A.tolist(), "det": self.det,
            "eigenvalues": [[float(z.real), float(z.imag)] for z in self.eigenvalues],
            "indicial_roots": self.indicial_roots.tolist(),
            "unit_multiplicity": self.unit_multiplicity,
        }

    def dumps(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)


def monodromy(profile: DelaunayProfile, mode, tol: float = 1e-12, sigma: float = 0.0,
              tol_unit: float = TOL_UNIT) -> MonodromyResult:
    """Period map of ``(L_k - sigma) w = 0`` on 4-jets and its multipliers.

    ``det`` is the product of the segment determinants (each equals 1 up to
    integration error since the operator has no third-order term).
    Indicial roots are ``log|lambda| / T`` sorted ascending.
    """
    pot = linear_potential(profile, mode)
    mats = segment_propagators(pot, tol, sigma)
    A = np.linalg.multi_dot(mats[::-1]) if len(mats) > 1 else mats[0]
    det = float(np.prod([np.linalg.det(M) for M in mats]))
    eig = product_eigenvalues(mats)
    eig = eig[np.lexsort((eig.imag, np.abs(eig)))]
    gam = np.sort(np.log(np.abs(eig)) / profile.period)
    tu = unit_tolerance(mats, tol, tol_unit)
    unit = int(np.count_nonzero(np.abs(np.abs(eig) - 1.0) < tu))
    return MonodromyResult(profile.params.n, profile.epsilon, pot.mode, profile.period, A, det,
                           eig, gam, unit, mats)


def propagate_jet(mats: list[np.ndarray], jet0: np.ndarray) -> np.ndarray:
    y = np.asarray(jet0, dtype=float)
    for M in mats:
        y = M @ y
    return y


# --------------------------------------------------------------------------
# exact Jacobi fields

def _residual_grid(profile: DelaunayProfile) -> np.ndarray:
    # Cell midpoints: the interpolant is exercised away from the stored nodes.
    h = profile.period / profile.n_samples
    return (np.arange(profile.n_samples) + 0.5) * h


@dataclass
class JacobiReport:
    name: str
    t: np.ndarray
    w: np.ndarray
    residual: float
    scale: float
    multiplier_expected: complex | None = None
    multiplier_found: complex | None = None
    multiplier_rel_err: float | None = None
    eigvec_residual: float | None = None
    positive: bool | None = None
    degenerate: bool = False
    extra: dict = field(default_factory=dict)

    @property
    def rel_residual(self) -> float:
        return self.residual / self.scale if self.scale > 0 else 0.0


def _nearest(eigs, target):
    i = int(np.argmin(np.abs(eigs - target)))
    return eigs[i]


def jacobi_w0(profile: DelaunayProfile, tol: float = 1e-12,
              mono: MonodromyResult | None = None) -> JacobiReport:
    """Periodic Jacobi field ``w0+ = v'`` of the degree-0 operator."""
    t = _residual_grid(profile)
    w = eval_profile(profile, t, 1)
    scale = float(np.max(np.abs(w)))
    if profile.is_cylinder or scale < 1e-14:
        return JacobiReport("w0+", t, w, 0.0, 0.0, degenerate=True)
    pot = linear_potential(profile, 0)
    res = apply_operator(pot, t, w, eval_profile(profile, t, 3), eval_profile(profile, t, 5))
    mono = mono or monodromy(profile, 0, tol)
    jet0 = np.array([eval_profile(profile, 0.0, k) for k in (1, 2, 3, 4)])
    found = split_multiplier(mono.segments, jet0)
    ev_res = periodicity_defect(mono.segments, jet0, 1.0)
    # Jordan pair: two multipliers close to 1
    near = np.sort(np.abs(mono.eigenvalues - 1.0))
    return JacobiReport("w0+", t, w, float(np.max(np.abs(res))), scale, 1.0, complex(found),
                        float(abs(found - 1.0)), ev_res, None, False,
                        {"jordan_pair_dist": float(near[1])})


def jacobi_wk1(profile: DelaunayProfile, tol: float = 1e-12,
               mono: MonodromyResult | None = None) -> tuple[JacobiReport, JacobiReport]:
    """Jacobi fields ``w± = e^{±t}(±v' + (n-4)/2 v)`` of the degree-1 operator.

    ``w+`` (resp. ``w-``) has Floquet multiplier ``e^{T}`` (resp. ``e^{-T}``).
    """
    p = profile.params
    a = (p.n - 4) / 2.0
    t = _residual_grid(profile)
    D = np.array([eval_profile(profile, t, k) for k in range(6)])
    pot = linear_potential(profile, 1)
    mono = mono or monodromy(profile, 1, tol)
    out = []
    for sgn, name in ((1.0, "w+"), (-1.0, "w-")):
        g = [sgn * D[j + 1] + a * D[j] for j in range(5)]
        # m-th derivative of e^{sgn t} g(t)
        derivs = [sum(math.comb(m, j) * sgn ** (m - j) * g[j] for j in range(m + 1)) for m in range(5)]
        e = np.exp(sgn * t)
        w = e * derivs[0]
        res = e * apply_operator(pot, t, derivs[0], derivs[2], derivs[4])
        scale = float(np.max(np.abs(w)))
        target = math.exp(sgn * profile.period)
        found = _nearest(mono.eigenvalues, target)
        g0 = np.array([sgn * eval_profile(profile, 0.0, j + 1) + a * eval_profile(profile, 0.0, j)
                       for j in range(5)])
        jet0 = np.array([sum(math.comb(m, j) * sgn ** (m - j) * g0[j] for j in range(m + 1))
                         for m in range(4)])
        ev_res = periodicity_defect(mono.segments, jet0, target)
        out.append(JacobiReport(name, t, w, float(np.max(np.abs(res))), scale, target,
                                complex(found), float(abs(found - target) / target), ev_res,
                                bool(np.all(derivs[0] > 0))))
    return out[0], out[1]


# --------------------------------------------------------------------------
# indicial roots

@dataclass
class IndicialSet:
    n: int
    epsilon: float
    gammas: list[tuple[int, float]]
    gap: float
    k_max: int

    def roots(self, k: int | None = None) -> np.ndarray:
        return np.array([g for kk, g in self.gammas if k is None or kk == k])


def gamma_set(profile: DelaunayProfile, k_max: int, tol: float = 1e-12) -> IndicialSet:
    """Union of indicial roots over degrees ``0..k_max`` with the smallest positive one."""
    if not 0 <= k_max <= 12:
        raise ValueError("k_max must be in 0..12")
    gam = []
    for k in range(k_max + 1):
        for g in monodromy(profile, k, tol).indicial_roots:
            gam.append((k, 0.0 if abs(g) < ZERO_ROOT_TOL else float(g)))
    pos = [g for _, g in gam if g > 0]
    return IndicialSet(profile.params.n, profile.epsilon, gam, min(pos) if pos else math.inf, k_max)


def indicial_csv_rows(results: list[MonodromyResult]) -> list[list]:
    """Rows ``(n, epsilon, k, gamma_1..gamma_4, det_err)``."""
    return [[r.n, r.epsilon, r.mode.k, *r.indicial_roots.tolist(), abs(r.det - 1.0)] for r in results]
