"""Period-indexed Fourier-Laplace transform of scalar functions on a half-line.

For ``w`` supported in ``[0, inf)`` and ``xi = eta + i nu``,

    w_hat(t, xi) = sum_k exp(-i xi k) w(t + k T),

which is ``2 pi``-periodic in ``eta`` and satisfies
``w_hat(t + T, xi) = exp(i xi) w_hat(t, xi)``.  For ``t = tt + l T`` with
``tt`` in ``[0, T)`` the inverse is

    w(t) = (1 / 2 pi) int_0^{2 pi} exp(i l xi) w_hat(tt, xi) d eta.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

TAIL_TOL = 1e-16


class DivergentTransformError(ValueError):
    """The series does not converge for the requested ``Im(xi)``."""


@dataclass(frozen=True)
class FLSample:
    """Function ``w`` on ``[0, inf)`` (zero for ``t < 0``) with ``|w(t)| <= C e^{gamma t}``.

    ``support`` (if finite) is the right end of the support of ``w``.
    """

    w: Callable
    T: float
    gamma: float = 0.0
    C: float = 1.0
    support: float = math.inf

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        out = np.where(t >= 0, self.w(np.maximum(t, 0.0)), 0.0)
        return np.where(t <= self.support, out, 0.0)

    def k_max(self, t: float, nu: float, tail_tol: float = TAIL_TOL) -> int:
        """Largest index so that the dropped tail is below ``tail_tol``."""
        if math.isfinite(self.support):
            return max(0, int(math.ceil((self.support - t) / self.T)))
        r = math.exp(nu + self.gamma * self.T)
        if r >= 1:
            raise DivergentTransformError(
                f"Im(xi) = {nu} must be below -gamma T = {-self.gamma * self.T}")
        # tail: C e^{gamma t} sum_{k > K} r^k = C e^{gamma t} r^{K+1} / (1 - r)
        lead = self.C * math.exp(self.gamma * t) / (1 - r)
        K = math.log(tail_tol / lead) / math.log(r) - 1 if lead > tail_tol else 0
        return max(0, int(math.ceil(K)))


def fl_transform(sample: FLSample, t, xi: complex, tail_tol: float = TAIL_TOL):
    """``w_hat(t, xi)``; ``t`` may be an array (any real values)."""
    t = np.atleast_1d(np.asarray(t, dtype=float))
    nu = complex(xi).imag
    k_lo = int(math.floor(-t.max() / sample.T))
    k_hi = sample.k_max(float(t.min()), nu, tail_tol)
    ks = np.arange(min(k_lo, 0), k_hi + 1)
    terms = np.exp(-1j * xi * ks)[None, :] * sample(t[:, None] + ks[None, :] * sample.T)
    out = terms.sum(axis=1)
    return complex(out[0]) if out.size == 1 else out


def eta_grid(n_eta: int) -> np.ndarray:
    return 2 * math.pi * np.arange(n_eta) / n_eta


def transform_on_grid(sample: FLSample, t_tilde, nu: float, n_eta: int = 512) -> np.ndarray:
    """``w_hat(t_tilde, eta_j + i nu)`` on the periodic trapezoid nodes, shape ``(len(t), n_eta)``."""
    t_tilde = np.atleast_1d(np.asarray(t_tilde, dtype=float))
    return np.stack([np.atleast_1d(fl_transform(sample, t_tilde, eta + 1j * nu))
                     for eta in eta_grid(n_eta)], axis=-1)


def fl_inverse(values: np.ndarray, nu: float, l: int) -> np.ndarray:
    """Recover ``w(tt + l T)`` from ``w_hat(tt, eta_j + i nu)`` on the trapezoid nodes.

    ``values`` has the eta nodes on its last axis.  Returns the complex
    quadrature value; for real ``w`` its imaginary part measures quadrature error.
    """
    values = np.asarray(values)
    N = values.shape[-1]
    xi = eta_grid(N) + 1j * nu
    return np.mean(np.exp(1j * l * xi) * values, axis=-1)


def fl_roundtrip(sample: FLSample, t, nu: float, n_eta: int = 512) -> np.ndarray:
    """Transform then invert at times ``t``; returns the recovered (complex) values."""
    t = np.atleast_1d(np.asarray(t, dtype=float))
    l = np.floor(t / sample.T).astype(int)
    tt = t - l * sample.T
    out = np.empty(len(t), dtype=complex)
    for i, (a, b) in enumerate(zip(tt, l)):
        out[i] = fl_inverse(transform_on_grid(sample, [a], nu, n_eta)[0], nu, int(b))
    return out


def transform_norm_sq(sample: FLSample, nu: float, n_eta: int = 256, n_t: int = 200) -> float:
    """``||w_hat(., . + i nu)||^2`` over ``[0, T] x [0, 2 pi]``.

    Gauss-Legendre in ``t`` and the (spectrally exact) trapezoid rule in ``eta``.
    """
    x, wq = np.polynomial.legendre.leggauss(n_t)
    t = 0.5 * sample.T * (x + 1)
    vals = transform_on_grid(sample, t, nu, n_eta)
    inner = 2 * math.pi * np.mean(np.abs(vals) ** 2, axis=-1)
    return float(0.5 * sample.T * np.sum(wq * inner))


def weighted_norm_sq(sample: FLSample, nu: float, floor_weight: bool = False,
                     n_t: int = 200, n_periods: int | None = None) -> float:
    """``int_0^inf e^{2 nu t/T} |w|^2 dt``, or with ``floor(t/T)`` in place of ``t/T``.

    The floor-weighted version is the exact Parseval partner of the transform;
    the smooth weight differs from it by a factor between ``e^{-2|nu|}`` and ``e^{2|nu|}``.
    """
    T = sample.T
    if n_periods is None:
        n_periods = sample.k_max(0.0, 2 * nu + sample.gamma * T) + 1
    x, wq = np.polynomial.legendre.leggauss(n_t)
    total = 0.0
    for k in range(n_periods):
        t = k * T + 0.5 * T * (x + 1)
        wt = np.exp(2 * nu * (k if floor_weight else t / T))
        total += 0.5 * T * np.sum(wq * wt * np.abs(sample(t)) ** 2)
    return float(total)


def geometric_sample(T: float = 1.0) -> FLSample:
    """``w(t) = e^{-t}`` on ``t >= 0``; transform has the closed form below."""
    return FLSample(lambda t: np.exp(-t), T, gamma=-1.0, C=1.0)


def geometric_closed_form(t, xi: complex, T: float = 1.0):
    """``e^{-t} / (1 - e^{-(i xi + T)})`` for ``t`` in ``[0, T)``, ``Im(xi) < T``."""
    return np.exp(-np.asarray(t, dtype=float)) / (1 - np.exp(-(1j * xi + T)))
