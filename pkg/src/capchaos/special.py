"""Legendre, spherical-harmonic, Hermite and Gaussian primitives.

Everything here is a pure function of its arguments. Arrays are accepted
wherever a scalar is, and results broadcast the usual numpy way.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.special import ndtr, ndtri

from .exceptions import DomainError

_SQRT_2PI = math.sqrt(2.0 * math.pi)
_FOUR_PI = 4.0 * math.pi


@dataclass(frozen=True)
class QuadratureRule:
    """Gauss-Legendre nodes and weights on [-1, 1]."""

    nodes: np.ndarray
    weights: np.ndarray
    order: int

    def scaled(self, a, b):
        """Nodes and weights mapped affinely onto [a, b]."""
        half = 0.5 * (b - a)
        return a + half * (self.nodes + 1.0), half * self.weights

    def integrate(self, f, a=-1.0, b=1.0):
        x, w = self.scaled(a, b)
        return float(np.dot(w, f(x)))


@dataclass(frozen=True)
class SphericalPoint:
    theta: float
    phi: float

    def __post_init__(self):
        if not 0.0 <= self.theta <= math.pi:
            raise DomainError(f"colatitude {self.theta} outside [0, pi]")
        if not 0.0 <= self.phi < 2.0 * math.pi:
            raise DomainError(f"longitude {self.phi} outside [0, 2pi)")

    def unit_vector(self):
        st = math.sin(self.theta)
        return np.array([st * math.cos(self.phi), st * math.sin(self.phi), math.cos(self.theta)])


def geodesic_distance(x: SphericalPoint, y: SphericalPoint) -> float:
    c = float(np.dot(x.unit_vector(), y.unit_vector()))
    return math.acos(min(1.0, max(-1.0, c)))


def _check_unit_interval(x):
    x = np.asarray(x, dtype=float)
    if np.any(np.abs(x) > 1.0 + 1e-12):
        raise DomainError("Legendre argument outside [-1, 1]")
    return np.clip(x, -1.0, 1.0)


def legendre_p(ell, x):
    """P_ell(x) by the three-term recurrence."""
    if ell < 0:
        raise DomainError("degree must be nonnegative")
    x = _check_unit_interval(x)
    p_prev = np.ones_like(x)
    if ell == 0:
        return p_prev if p_prev.ndim else float(p_prev)
    p = x.copy()
    for n in range(1, ell):
        p_prev, p = p, ((2 * n + 1) * x * p - n * p_prev) / (n + 1)
    return p if p.ndim else float(p)


def legendre_table(lmax, x):
    """Rows P_0(x), ..., P_lmax(x); shape (lmax + 1,) + x.shape."""
    x = _check_unit_interval(x)
    out = np.empty((lmax + 1,) + x.shape)
    out[0] = 1.0
    if lmax >= 1:
        out[1] = x
    for n in range(1, lmax):
        out[n + 1] = ((2 * n + 1) * x * out[n] - n * out[n - 1]) / (n + 1)
    return out


def normalized_assoc_legendre(ell, x):
    """Normalized associated Legendre values for every order 0..ell.

    Returns an array of shape ``x.shape + (ell + 1,)`` whose ``[..., m]``
    entry is ``sqrt((2l+1)/4pi) sqrt((l-m)!/(l+m)!) P_lm(x)`` with the
    Condon-Shortley phase, so that ``Y_lm = value * exp(i m phi)``.
    The normalization rides inside the recurrence; no factorial is formed.
    """
    if ell < 0:
        raise DomainError("degree must be nonnegative")
    x = _check_unit_interval(x)
    s = np.sqrt(np.clip(1.0 - x * x, 0.0, None))
    out = np.zeros(x.shape + (ell + 1,))
    pmm = np.full(x.shape, 1.0 / math.sqrt(_FOUR_PI))
    for m in range(ell + 1):
        if m > 0:
            pmm = -math.sqrt((2 * m + 1) / (2.0 * m)) * s * pmm
        if m == ell:
            out[..., m] = pmm
            break
        p_lo = pmm
        p_hi = math.sqrt(2 * m + 3) * x * pmm
        for n in range(m + 2, ell + 1):
            a = math.sqrt((4.0 * n * n - 1.0) / (n * n - m * m))
            b = math.sqrt(((n - 1.0) ** 2 - m * m) / (4.0 * (n - 1.0) ** 2 - 1.0))
            p_lo, p_hi = p_hi, a * (x * p_hi - b * p_lo)
        out[..., m] = p_hi if ell > m else p_lo
    return out


def spherical_harmonic(ell, m, theta, phi=0.0):
    """Complex Y_lm(theta, phi); negative orders via Y_{l,-m} = (-1)^m conj(Y_lm).

    ``theta`` may also be a :class:`SphericalPoint`, in which case ``phi`` is
    ignored.
    """
    if ell < 0 or abs(m) > ell:
        raise DomainError(f"invalid (ell, m) = ({ell}, {m})")
    if isinstance(theta, SphericalPoint):
        theta, phi = theta.theta, theta.phi
    theta = np.asarray(theta, dtype=float)
    phi = np.asarray(phi, dtype=float)
    mm = abs(m)
    plm = normalized_assoc_legendre(ell, np.cos(theta))[..., mm]
    y = plm * np.exp(1j * mm * phi)
    if m < 0:
        y = (-1) ** mm * np.conj(y)
    return y if np.ndim(y) else complex(y)


def hermite(q, x):
    """Probabilists' Hermite polynomial He_q(x)."""
    if q < 0:
        raise DomainError("Hermite order must be nonnegative")
    x = np.asarray(x, dtype=float)
    h_prev = np.ones_like(x)
    if q == 0:
        return h_prev if h_prev.ndim else float(h_prev)
    h = x.copy()
    for n in range(1, q):
        h_prev, h = h, x * h - n * h_prev
    return h if h.ndim else float(h)


def normal_pdf(z):
    z = np.asarray(z, dtype=float)
    out = np.exp(-0.5 * z * z) / _SQRT_2PI
    return out if out.ndim else float(out)


def normal_cdf(z):
    out = ndtr(np.asarray(z, dtype=float))
    return out if np.ndim(out) else float(out)


def normal_ppf(p):
    out = ndtri(np.asarray(p, dtype=float))
    return out if np.ndim(out) else float(out)


@lru_cache(maxsize=256)
def gauss_legendre(order: int, tol: float = 1e-15, max_iter: int = 100) -> QuadratureRule:
    """Gauss-Legendre rule of the given order.

    Newton iteration on P_n from Chebyshev-type initial guesses; weights from
    the derivative at the converged nodes. Rules are cached and immutable.
    """
    n = int(order)
    if n < 1:
        raise DomainError("quadrature order must be >= 1")
    k = np.arange(1, n // 2 + 1)
    # roots in decreasing order for the positive half; symmetry gives the rest
    x = np.cos(np.pi * (k - 0.25) / (n + 0.5))
    for _ in range(max_iter):
        p0 = np.ones_like(x)
        p1 = x.copy()
        for j in range(1, n):
            p0, p1 = p1, ((2 * j + 1) * x * p1 - j * p0) / (j + 1)
        dp = n * (x * p1 - p0) / (x * x - 1.0)
        dx = p1 / dp
        x = x - dx
        if np.max(np.abs(dx), initial=0.0) <= tol:
            break
    p0 = np.ones_like(x)
    p1 = x.copy()
    for j in range(1, n):
        p0, p1 = p1, ((2 * j + 1) * x * p1 - j * p0) / (j + 1)
    dp = n * (x * p1 - p0) / (x * x - 1.0)
    w = 2.0 / ((1.0 - x * x) * dp * dp)

    pos_x, pos_w = x[::-1], w[::-1]
    if n % 2:
        mid_p0, mid_p1 = 1.0, 0.0
        for j in range(1, n):
            mid_p0, mid_p1 = mid_p1, (-j * mid_p0) / (j + 1)
        mid_dp = n * mid_p0  # P_n'(0) = n P_{n-1}(0)
        nodes = np.concatenate([-x, [0.0], pos_x])
        weights = np.concatenate([w, [2.0 / mid_dp**2], pos_w])
    else:
        nodes = np.concatenate([-x, pos_x])
        weights = np.concatenate([w, pos_w])
    nodes.setflags(write=False)
    weights.setflags(write=False)
    return QuadratureRule(nodes=nodes, weights=weights, order=n)
