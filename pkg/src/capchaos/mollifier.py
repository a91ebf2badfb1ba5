"""Smooth spherical-cap indicators built from Bernstein blends.

The cap of colatitude radius ``r`` around the north pole is approximated by
a zonal function equal to one on ``[0, r - eps)``, zero beyond ``r``, and a
degree ``2k+1`` Bernstein blend in between. Its zonal harmonic coefficients

    b_l = int_{S^2} f(x) Y_l0(x) dx = 2 pi sqrt((2l+1)/4pi) int_{-1}^{1} k(mu) P_l(mu) dmu

are what the variance and cumulant formulas consume. ``legendre_moments``
exposes the bare integrals ``int k P_l dmu``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_array, check_is_fitted

from .exceptions import AdmissibilityError, ConfigurationError, DomainError
from .special import gauss_legendre, legendre_table

FOUR_PI = 4.0 * math.pi


@dataclass(frozen=True)
class MollifierSpec:
    r: float
    eps: float
    k: int = 2
    M: int | None = None

    def __post_init__(self):
        if not 0.0 < self.r < math.pi:
            raise DomainError(f"cap radius r={self.r} must lie in (0, pi)")
        if not 0.0 < self.eps < self.r:
            raise DomainError(f"smoothing width eps={self.eps} must lie in (0, r={self.r})")
        if int(self.k) != self.k or self.k < 1:
            raise DomainError(f"half-degree k={self.k} must be a positive integer")
        if self.M is None:
            object.__setattr__(self, "M", int(self.k))
        if int(self.M) != self.M or self.M < 1:
            raise DomainError(f"smoothness M={self.M} must be a positive integer")
        if not self.M < self.k + 0.5:
            raise DomainError(f"a degree-{2 * self.k + 1} blend is not C^{self.M}: need M < k + 1/2")

    @property
    def area(self):
        """Area of the hard cap."""
        return 2.0 * math.pi * (1.0 - math.cos(self.r))


def q_poly(k, t):
    """sum_{i<=k} C(2k+1, i) t^i (1-t)^(2k+1-i): 1 at t=0, 0 at t=1, flat to order k at both ends."""
    t = np.asarray(t, dtype=float)
    if np.any((t < 0.0) | (t > 1.0)):
        raise DomainError("Bernstein blend argument must lie in [0, 1]")
    n = 2 * k + 1
    out = np.zeros_like(t)
    for i in range(k + 1):
        out += math.comb(n, i) * t**i * (1.0 - t) ** (n - i)
    return out if out.ndim else float(out)


def phi_r_eps(spec: MollifierSpec, theta):
    """Smoothed cap indicator as a function of colatitude."""
    theta = np.asarray(theta, dtype=float)
    lo = spec.r - spec.eps
    out = np.where(theta < lo, 1.0, 0.0)
    band = (theta >= lo) & (theta <= spec.r)
    if np.any(band):
        out = out.astype(float)
        out[band] = q_poly(spec.k, np.clip((theta[band] - lo) / spec.eps, 0.0, 1.0))
    return out if out.ndim else float(out)


@dataclass(frozen=True)
class MollifierCoefficients:
    """Zonal harmonic coefficients b_0..b_Lmax of a cap weight.

    ``spec`` is ``None`` for the hard indicator and for the full sphere;
    ``cap_r`` is always set (pi for the full sphere).
    """

    spec: MollifierSpec | None
    b: np.ndarray
    L_max: int
    quad_order: int
    cap_r: float
    label: str = field(default="smooth")

    @property
    def legendre_moments(self):
        ell = np.arange(self.L_max + 1)
        return self.b / np.sqrt(math.pi * (2 * ell + 1))

    @property
    def sum_of_squares(self):
        return float(np.sum(self.b**2))

    def reconstruct(self, theta):
        return reconstruct(self, theta)


def default_quad_order(L_max):
    return max(64, int(math.ceil(L_max / 2)) + 16)


def fourier_coefficients(spec: MollifierSpec, L_max: int, quad_order: int | None = None) -> MollifierCoefficients:
    """b_l for l = 0..L_max by Gauss-Legendre quadrature split at the blend's breakpoints."""
    if L_max < 0:
        raise DomainError("L_max must be nonnegative")
    if quad_order is None:
        quad_order = default_quad_order(L_max)
    if quad_order < L_max / 2 + 16:
        raise ConfigurationError(f"quad_order={quad_order} below L_max/2 + 16 = {L_max / 2 + 16}")
    rule = gauss_legendre(quad_order)
    mu_r, mu_in = math.cos(spec.r), math.cos(spec.r - spec.eps)

    x_in, w_in = rule.scaled(mu_in, 1.0)
    x_band, w_band = rule.scaled(mu_r, mu_in)
    t = np.clip((np.arccos(x_band) - spec.r + spec.eps) / spec.eps, 0.0, 1.0)
    k_band = q_poly(spec.k, t)

    moments = legendre_table(L_max, x_in) @ w_in + legendre_table(L_max, x_band) @ (w_band * k_band)
    ell = np.arange(L_max + 1)
    b = np.sqrt(math.pi * (2 * ell + 1)) * moments
    b.setflags(write=False)
    return MollifierCoefficients(spec=spec, b=b, L_max=L_max, quad_order=quad_order, cap_r=spec.r)


def cap_indicator_coefficients(r: float, L_max: int) -> MollifierCoefficients:
    """Exact b_l of the hard cap indicator (r = pi gives the full sphere)."""
    if not 0.0 < r <= math.pi:
        raise DomainError("cap radius must lie in (0, pi]")
    x = math.cos(r)
    p = legendre_table(L_max + 1, np.array(x))
    ell = np.arange(L_max + 1)
    moments = np.empty(L_max + 1)
    moments[0] = 1.0 - x
    if L_max >= 1:
        moments[1:] = (p[0:L_max] - p[2 : L_max + 2]) / (2 * ell[1:] + 1)
    if r == math.pi:
        moments[1:] = 0.0
    b = np.sqrt(math.pi * (2 * ell + 1)) * moments
    b.setflags(write=False)
    label = "sphere" if r == math.pi else "indicator"
    return MollifierCoefficients(spec=None, b=b, L_max=L_max, quad_order=0, cap_r=r, label=label)


def full_sphere_coefficients(L_max: int) -> MollifierCoefficients:
    return cap_indicator_coefficients(math.pi, L_max)


def reconstruct(coeffs: MollifierCoefficients, theta):
    """Truncated expansion sum_l b_l Y_l0(theta)."""
    theta = np.asarray(theta, dtype=float)
    ell = np.arange(coeffs.L_max + 1)
    scale = coeffs.b * np.sqrt((2 * ell + 1) / FOUR_PI)
    table = legendre_table(coeffs.L_max, np.cos(theta))
    out = np.tensordot(scale, table, axes=1)
    return out if np.ndim(out) else float(out)


def l1_distance_to_indicator(spec: MollifierSpec, quad_order: int = 64) -> float:
    """int_{S^2} |1_B - smoothed|, which only lives on the blend band."""
    rule = gauss_legendre(quad_order)
    th, w = rule.scaled(spec.r - spec.eps, spec.r)
    t = (th - spec.r + spec.eps) / spec.eps
    return float(2.0 * math.pi * np.dot(w, q_poly(spec.k, t) * np.sin(th)))


def is_admissible(ell, eps, M) -> bool:
    """Whether ell^(M-1) eps^(2M+1) > ell^2, compared in log space."""
    return (M - 1) * math.log(ell) + (2 * M + 1) * math.log(eps) > 2.0 * math.log(ell)


def epsilon_schedule(ell: int, M: int, alpha: float) -> float:
    """eps_l = l^-alpha for an admissible (M, alpha), validated at this l."""
    if M <= 10:
        raise AdmissibilityError(f"the schedule needs smoothness M > 10, got M={M}")
    upper = (M - 3) / (2 * M + 1)
    if not 1.0 / 3.0 < alpha < upper:
        raise AdmissibilityError(
            f"alpha={alpha} outside the admissible window (1/3, (M-3)/(2M+1)) = (0.3333, {upper:.4f}) for M={M}"
        )
    if ell < 2:
        raise AdmissibilityError("the schedule is only defined for ell >= 2")
    eps = float(ell) ** (-alpha)
    if not is_admissible(ell, eps, M):
        raise AdmissibilityError(f"ell^(M-1) eps^(2M+1) <= ell^2 at ell={ell}, eps={eps}")
    return eps


class CapMollifier(TransformerMixin, BaseEstimator):
    """Estimator wrapper: ``fit`` computes the zonal coefficients, ``transform``
    evaluates the truncated expansion at the colatitudes in ``X[:, 0]``.

    Parameters
    ----------
    r, eps, k, M
        Cap radius, smoothing width, spline half-degree and smoothness.
    lmax : int
        Truncation degree.
    quad_order : int or None
        Per-piece Gauss-Legendre order; ``None`` picks ``max(64, lmax/2 + 16)``.
    """

    def __init__(self, r=math.pi / 4, eps=0.25, k=2, M=None, lmax=64, quad_order=None):
        self.r = r
        self.eps = eps
        self.k = k
        self.M = M
        self.lmax = lmax
        self.quad_order = quad_order

    def fit(self, X=None, y=None):
        self.spec_ = MollifierSpec(self.r, self.eps, self.k, self.M)
        self.coefficients_ = fourier_coefficients(self.spec_, self.lmax, self.quad_order)
        self.b_ = np.asarray(self.coefficients_.b)
        self.n_features_in_ = 1
        return self

    def transform(self, X):
        check_is_fitted(self, "coefficients_")
        X = check_array(X, ensure_2d=True)
        if X.shape[1] != 1:
            raise ValueError(f"expected one column of colatitudes, got {X.shape[1]}")
        return reconstruct(self.coefficients_, X[:, 0]).reshape(-1, 1)

    def smooth_indicator(self, X):
        """Exact (untruncated) smoothed indicator at the colatitudes in ``X[:, 0]``."""
        check_is_fitted(self, "spec_")
        X = check_array(X, ensure_2d=True)
        return np.asarray(phi_r_eps(self.spec_, X[:, 0])).reshape(-1, 1)
