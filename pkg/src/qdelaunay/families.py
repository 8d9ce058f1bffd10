"""Translated Delaunay families, PDE residuals and the radial Pohozaev invariant.

Translating the singular point of ``u_eps`` (inner family) or, through two
Kelvin transforms, translating the regular point at infinity (Kelvin family)
gives explicit non-radial solutions.  With ``s = <theta, a/|a|>`` they depend
on ``(t, s)`` only:

    kelvin:  rho = sqrt(1 - 2 s x + x^2),  x = |a| e^{-t},
             v(t, s) = rho^((4-n)/2) v_eps(t + T + log rho)
    inner:   x = |a| e^{t},
             v(t, s) = rho^((4-n)/2) v_eps(t + T - log rho)

For axisymmetric ``f`` the sphere Laplacian is
``(1 - s^2) f_ss - (n - 1) s f_s`` and ``|grad f|^2 = (1 - s^2) f_s^2``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable

import numpy as np
from numpy.polynomial import polynomial as P

from .core import DimensionParams, check_pos_laplacian
from .delaunay import DelaunayProfile, eval_profile

SINGULAR_MARGIN = 0.5
MAX_STEP = 0.25  # coarser stencils are outside the asymptotic regime


class SingularDomainError(ValueError):
    """An evaluation domain touches the singular point of a translated family."""


@dataclass(frozen=True)
class TranslationSpec:
    profile: DelaunayProfile
    a_mag: float
    kind: str = "kelvin"
    T_shift: float = 0.0

    def __post_init__(self):
        if self.kind not in ("kelvin", "inner"):
            raise ValueError(f"kind must be 'kelvin' or 'inner', got {self.kind!r}")
        if not 0.0 <= self.a_mag <= 0.5:
            raise ValueError("|a| must lie in [0, 0.5]")

    @property
    def params(self) -> DimensionParams:
        return self.profile.params

    @property
    def singular_time(self) -> float:
        if self.a_mag == 0:
            return -math.inf if self.kind == "kelvin" else math.inf
        return math.log(self.a_mag) if self.kind == "kelvin" else -math.log(self.a_mag)

    def check_domain(self, t0: float, t1: float, margin: float = SINGULAR_MARGIN) -> None:
        ts = self.singular_time
        if t0 - margin < ts < t1 + margin:
            raise SingularDomainError(f"[{t0}, {t1}] within {margin} of the singular time {ts:.4g}")


def eval_family(fam: TranslationSpec, t, s):
    """Value of the translated solution at ``(t, s)``; broadcasts over arrays."""
    t = np.asarray(t, dtype=float)
    s = np.asarray(s, dtype=float)
    n = fam.params.n
    sign = -1.0 if fam.kind == "kelvin" else 1.0
    x = fam.a_mag * np.exp(sign * t)
    rho2 = 1.0 - 2.0 * s * x + x * x
    if np.any(rho2 <= 1e-24):
        raise SingularDomainError("evaluation at the singular point")
    log_rho = 0.5 * np.log(rho2)
    tau = t + fam.T_shift - sign * log_rho
    out = np.exp((4 - n) / 2.0 * log_rho) * eval_profile(fam.profile, tau)
    return float(out) if out.ndim == 0 else out


def first_order_term(fam: TranslationSpec, t, s):
    """``e^{-t} s |a| (-v' + (n-4)/2 v)`` at ``t + T_shift`` (Kelvin family)."""
    t = np.asarray(t, dtype=float)
    tau = t + fam.T_shift
    a = (fam.params.n - 4) / 2.0
    g = -eval_profile(fam.profile, tau, 1) + a * eval_profile(fam.profile, tau)
    return np.exp(-t) * np.asarray(s) * fam.a_mag * g


@dataclass
class ExpansionResult:
    t: np.ndarray
    E: np.ndarray
    beta: float
    logC: float

    def csv_rows(self) -> list[list]:
        return [[float(t), float(e), self.beta] for t, e in zip(self.t, self.E)]


def expansion_error(fam: TranslationSpec, t_range=(2.0, 8.0), n_t: int = 61,
                    n_s: int = 201) -> ExpansionResult:
    """Sup over ``s`` of the remainder after the first-order expansion, and its decay rate.

    ``beta`` is the least-squares slope of ``-log E(t)``; it is NaN when ``|a| = 0``.
    """
    if fam.kind != "kelvin":
        raise ValueError("the first-order expansion applies to the Kelvin family")
    t0, t1 = t_range
    if t0 < 2 or t1 > 12 or t1 <= t0:
        raise ValueError("need 2 <= t0 < t1 <= 12")
    fam.check_domain(t0, t1)
    t = np.linspace(t0, t1, n_t)
    s = np.linspace(-1.0, 1.0, n_s)
    T, S = np.meshgrid(t, s, indexing="ij")
    R = eval_family(fam, T, S) - eval_profile(fam.profile, T + fam.T_shift) - first_order_term(fam, T, S)
    E = np.max(np.abs(R), axis=1)
    if np.all(E > 0):
        slope, icpt = np.polyfit(t, np.log(E), 1)
        beta, logC = -float(slope), float(icpt)
    else:
        beta, logC = math.nan, -math.inf
    return ExpansionResult(t, E, beta, logC)


# --------------------------------------------------------------------------
# finite differences

@lru_cache(maxsize=None)
def fd_weights(m: int, order: int) -> tuple[np.ndarray, np.ndarray]:
    """Centered stencil (offsets, weights) for the ``m``-th derivative, accuracy ``order``.

    Weights are ``m``-th derivatives at 0 of the Lagrange basis polynomials.
    """
    if order % 2:
        raise ValueError("centered stencils have even order")
    r = (m + 1) // 2 + order // 2 - 1
    offs = np.arange(-r, r + 1)
    w = np.empty(len(offs))
    for i, o in enumerate(offs):
        others = offs[offs != o]
        c = P.polyfromroots(others) / np.prod(o - others)
        w[i] = math.factorial(m) * c[m]
    return offs, w


@dataclass
class AxisymField:
    """Grid ``t x s`` with finite-difference jets of ``func(t, s)``.

    ``func`` must be defined in a stencil-width neighbourhood of the grid
    (the translated families extend smoothly to ``|s|`` slightly above 1).
    """

    func: Callable
    t: np.ndarray
    s: np.ndarray
    h_t: float
    h_s: float
    order: int = 4
    singular_time: float | None = None
    _cache: dict = field(default_factory=dict, repr=False)

    def __post_init__(self):
        self.t = np.atleast_1d(np.asarray(self.t, dtype=float))
        self.s = np.atleast_1d(np.asarray(self.s, dtype=float))
        if not (0 < self.h_t <= MAX_STEP and 0 < self.h_s <= MAX_STEP):
            raise ValueError(f"grid spacing must lie in (0, {MAX_STEP}]")
        if self.singular_time is not None:
            reach = self.h_t * (2 + self.order // 2)
            if np.min(np.abs(self.t - self.singular_time)) < SINGULAR_MARGIN + reach:
                raise SingularDomainError("grid (with stencils) too close to the singular time")

    @classmethod
    def from_family(cls, fam: TranslationSpec, t, s, h_t, h_s, order=4) -> "AxisymField":
        return cls(lambda tt, ss: eval_family(fam, tt, ss), t, s, h_t, h_s, order,
                   fam.singular_time if fam.a_mag > 0 else None)

    @classmethod
    def from_radial(cls, f: Callable, t, s, h_t, h_s, order=4) -> "AxisymField":
        return cls(lambda tt, ss: f(tt) + 0.0 * ss, t, s, h_t, h_s, order)

    def _values(self, i: int, j: int) -> np.ndarray:
        key = (i, j)
        if key not in self._cache:
            self._cache[key] = self.func(self.t[:, None] + i * self.h_t,
                                         self.s[None, :] + j * self.h_s)
        return self._cache[key]

    def d(self, mt: int, ms: int) -> np.ndarray:
        """``d^{mt+ms} f / dt^mt ds^ms`` on the grid, shape ``(len(t), len(s))``."""
        ot, wt = fd_weights(mt, self.order) if mt else (np.array([0]), np.array([1.0]))
        os_, ws = fd_weights(ms, self.order) if ms else (np.array([0]), np.array([1.0]))
        out = 0.0
        for i, a in zip(ot, wt):
            if a == 0:
                continue
            for j, b in zip(os_, ws):
                if b != 0:
                    out = out + a * b * self._values(int(i), int(j))
        return out / (self.h_t**mt * self.h_s**ms)

    @property
    def values(self) -> np.ndarray:
        return self._values(0, 0)


def sphere_laplacian(n: int, s, f_s, f_ss):
    return (1 - s * s) * f_ss - (n - 1) * s * f_s


def sphere_bilaplacian(n: int, s, f_s, f_ss, f_sss, f_ssss):
    g_s = (1 - s * s) * f_sss - (n + 1) * s * f_ss - (n - 1) * f_s
    g_ss = (1 - s * s) * f_ssss - (n + 3) * s * f_sss - 2 * n * f_ss
    return (1 - s * s) * g_ss - (n - 1) * s * g_s


def pde_residual(fld: AxisymField, params: DimensionParams, return_field: bool = False):
    """Sup-norm residual of the constant Q-curvature equation on the cylinder.

    ``v_tttt - C2 v_tt + C0 v + Lap^2 v + 2 Lap v_tt - n(n-4)/2 Lap v - K_nl v^p``.
    """
    n = params.n
    s = fld.s[None, :]
    v = fld.values
    if np.any(v <= 0):
        raise ValueError("field must be positive")
    lap = sphere_laplacian(n, s, fld.d(0, 1), fld.d(0, 2))
    lap_tt = sphere_laplacian(n, s, fld.d(2, 1), fld.d(2, 2))
    bilap = sphere_bilaplacian(n, s, fld.d(0, 1), fld.d(0, 2), fld.d(0, 3), fld.d(0, 4))
    R = (fld.d(4, 0) - params.C2 * fld.d(2, 0) + params.C0 * v + bilap + 2 * lap_tt
         - n * (n - 4) / 2.0 * lap - params.K_nl * np.exp(params.p * np.log(v)))
    res = float(np.max(np.abs(R)))
    return (res, R) if return_field else res


def pos_laplacian_field(fld: AxisymField, params: DimensionParams) -> np.ndarray:
    """Pointwise truth of the positive-Laplacian condition on the grid."""
    lap = sphere_laplacian(params.n, fld.s[None, :], fld.d(0, 1), fld.d(0, 2))
    return check_pos_laplacian(params, fld.values, fld.d(1, 0), fld.d(2, 0), lap)


# --------------------------------------------------------------------------
# Pohozaev invariant

@dataclass
class SliceJets:
    """Jets of an axisymmetric function on one slice ``{t} x S^{n-1}``."""

    s: np.ndarray
    v: np.ndarray
    v1: np.ndarray
    v2: np.ndarray
    v3: np.ndarray
    lap: np.ndarray
    grad2: np.ndarray
    grad_t2: np.ndarray


def slice_jets(fld: AxisymField) -> SliceJets:
    """Slice jets from a single-time field (``len(fld.t) == 1``)."""
    if len(fld.t) != 1:
        raise ValueError("slice_jets expects a field on a single time")
    s = fld.s
    f_s = fld.d(0, 1)[0]
    return SliceJets(s, fld.values[0], fld.d(1, 0)[0], fld.d(2, 0)[0], fld.d(3, 0)[0],
                     np.full_like(s, np.nan), (1 - s * s) * f_s**2,
                     (1 - s * s) * fld.d(1, 1)[0] ** 2)


def family_slice(func: Callable, t: float, params: DimensionParams, N: int = 64,
                 h: float = 0.02, order: int = 8) -> SliceJets:
    """Slice jets of ``func(t, s)`` at Gauss-Legendre nodes by order-``order`` differences."""
    s, _ = np.polynomial.legendre.leggauss(N)
    fld = AxisymField(func, [t], s, h, h, order)
    jets = slice_jets(fld)
    jets.lap = sphere_laplacian(params.n, s, fld.d(0, 1)[0], fld.d(0, 2)[0])
    return jets


def radial_slice(profile_or_jet, t: float, N: int = 64) -> SliceJets:
    """Slice jets of a radial function given as a profile or a 4-jet ``(v, v1, v2, v3)``."""
    if isinstance(profile_or_jet, DelaunayProfile):
        jet = [eval_profile(profile_or_jet, t, k) for k in range(4)]
    else:
        jet = list(profile_or_jet)
    s, _ = np.polynomial.legendre.leggauss(N)
    z = np.zeros_like(s)
    return SliceJets(s, *(z + j for j in jet), z, z, z)


def h_rad(jets: SliceJets, params: DimensionParams) -> float:
    """Radial Pohozaev invariant of one slice.

    The sphere integral is reduced to ``|S^{n-2}| int_{-1}^{1} F(s) (1 - s^2)^((n-3)/2) ds``
    and evaluated by Gauss-Legendre quadrature on the slice nodes.
    """
    n = params.n
    s = jets.s
    N = len(s)
    nodes, wts = np.polynomial.legendre.leggauss(N)
    if not np.allclose(nodes, s, atol=1e-15):
        raise ValueError("slice jets must live on the Gauss-Legendre nodes")
    if np.any(np.isnan(jets.lap)):
        raise ValueError("slice jets lack the sphere Laplacian")
    v = jets.v
    F = (-jets.v1 * jets.v3 + 0.5 * jets.v2**2 + (n * (n - 4) + 8) / 4.0 * jets.v1**2
         - n * n * (n - 4) ** 2 / 32.0 * v**2
         + (n - 4) ** 2 * (n * n - 4) / 32.0 * np.exp(params.energy_exp * np.log(v))
         - 0.5 * jets.lap**2 - n * (n - 4) / 4.0 * jets.grad2 + jets.grad_t2)
    weight = (1 - s * s) ** ((n - 3) / 2.0)
    return float(params.sphere_area_nm2 * np.sum(wts * weight * F))


def h_rad_family(fam: TranslationSpec, t: float, N: int = 64, h: float = 0.02,
                 order: int = 8) -> float:
    fam.check_domain(t, t, SINGULAR_MARGIN + h * (order // 2 + 2))
    return h_rad(family_slice(lambda tt, ss: eval_family(fam, tt, ss), t, fam.params, N, h, order),
                 fam.params)


def hrad_rows(fam: TranslationSpec, times, **kw) -> list[list]:
    return [[float(t), h_rad_family(fam, t, **kw)] for t in times]
