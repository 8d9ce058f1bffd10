"""Closed-form reference values at the cylinder and the sphere.

At the constant solution the Fourier-mode operators have constant
coefficients, so their exponents ``mu`` solve the biquadratic

    mu^4 - (C2 + 2 lam) mu^2 + (-n^2 (n-4)/2 + n(n-4)/2 lam + lam^2) = 0,

with ``lam = k (n - 2 + k)``.  The oscillating root of the ``k = 0`` mode
(``mu_tilde^2 < 0``) sets the period assigned to the cylinder.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import CylState, _mu_squared


def cyl_mu_squared(n: int, k: int) -> tuple[float, float]:
    """Return ``(mu_sq, mu_tilde_sq)`` for spherical-harmonic degree ``k``."""
    if n < 5 or k < 0:
        raise ValueError("need n >= 5 and k >= 0")
    return _mu_squared(n, float(k * (n - 2 + k)))


def cyl_period(n: int, variant: str = "corrected") -> float:
    """Fundamental period of the oscillating k = 0 Jacobi field of the cylinder.

    ``variant="corrected"`` is ``2 pi / sqrt(-mu_tilde_sq(0))``, i.e. the radical
    ``sqrt(sqrt(n^4 - 64n + 64) - n(n-4) - 8) / 2``.  ``variant="plus8_radical"``
    uses ``+ 8`` in place of ``- 8``, which does not match the
    biquadratic above and is kept only for comparison.
    """
    root = math.sqrt(n**4 - 64 * n + 64)
    if variant == "corrected":
        mu = 0.5 * math.sqrt(root - n * (n - 4) - 8)
    elif variant == "plus8_radical":
        mu = 0.5 * math.sqrt(root - n * (n - 4) + 8)
    else:
        raise ValueError(f"unknown variant {variant!r}")
    return 2.0 * math.pi / mu


def cyl_indicial(n: int, k: int) -> np.ndarray:
    """Indicial roots of degree ``k`` at the cylinder, ascending, with multiplicity.

    For ``k = 0`` the oscillating pair contributes the double root 0.
    """
    mu_sq, mt_sq = cyl_mu_squared(n, k)
    mu = math.sqrt(mu_sq)
    if k == 0:
        return np.array([-mu, 0.0, 0.0, mu])
    mt = math.sqrt(mt_sq)
    return np.sort(np.array([-mu, -mt, mt, mu]))


@dataclass(frozen=True)
class CylClosedForms:
    n: int

    def mu_sq(self, k: int) -> float:
        return cyl_mu_squared(self.n, k)[0]

    def mu_tilde_sq(self, k: int) -> float:
        return cyl_mu_squared(self.n, k)[1]

    @property
    def T_cyl(self) -> float:
        return cyl_period(self.n)

    def gamma(self, k: int) -> np.ndarray:
        return cyl_indicial(self.n, k)


def sph_jet(n: int, t):
    """Closed-form 4-jet of ``(cosh t)^((4-n)/2)``; vectorized in ``t``."""
    a = (4 - n) / 2.0
    t = np.asarray(t, dtype=float)
    th = np.tanh(t)
    f = np.cosh(t) ** a
    g2 = a * (a - 1) * th**2 + a
    f1 = a * th * f
    f2 = g2 * f
    f3 = f * (a * th * g2 + 2 * a * (a - 1) * th * (1 - th**2))
    return np.array([f, f1, f2, f3])


def sph_state(n: int, t: float) -> CylState:
    return CylState.from_jet(t, sph_jet(n, t))
