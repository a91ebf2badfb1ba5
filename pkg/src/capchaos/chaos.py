"""Wiener-chaos analytics for excursion areas of random eigenfunctions on caps.

The excursion functional ``S(B, z) = int_B 1{T > z}`` has the Hermite
expansion ``sum_q c_q(z) h_q`` with ``h_q = int f H_q(T)`` for the cap weight
``f``. This module evaluates the variances of the first two chaoses, explicit
majorants for the higher ones, the fourth cumulant of ``h_2`` and the
resulting fourth-moment bound on the Wasserstein distance.

All formulas take spherical zonal coefficients ``b_L = int f Y_L0``.
"""
from __future__ import annotations

import math
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass
from functools import lru_cache

import numpy as np
from sklearn.base import BaseEstimator, RegressorMixin
from sklearn.utils.validation import check_is_fitted, column_or_1d

from .exceptions import DomainError, TruncationWarning
from .mollifier import (
    MollifierCoefficients,
    MollifierSpec,
    cap_indicator_coefficients,
    fourier_coefficients,
    is_admissible,
)
from .special import gauss_legendre, hermite, legendre_p, normal_cdf, normal_pdf
from .wigner import cg_zero_m, sixj_exact_float, sixj_float, threej_zero_m

FOUR_PI = 4.0 * math.pi
CUM4_CONSTANT = 48
EXACT_CUM4_MAX = 30


# ---------------------------------------------------------------------------
# Hermite coefficients of the indicator


def j_coeff(q: int, z: float) -> float:
    """J_0 = Phi(z), J_q(z) = -He_{q-1}(z) phi(z)."""
    if q < 0:
        raise DomainError("chaos order must be nonnegative")
    if q == 0:
        return float(normal_cdf(z))
    return float(-hermite(q - 1, z) * normal_pdf(z))


def tail_coeff(q: int, z: float) -> float:
    """Coefficient of H_q in the expansion of 1{Z > z}: c_0 = 1 - Phi, c_q = -J_q / q!."""
    if q == 0:
        return 1.0 - float(normal_cdf(z))
    return -j_coeff(q, z) / math.factorial(q)


def expected_area(cap_r: float, z: float) -> float:
    """E S(B, z) = (1 - Phi(z)) m(B); ``cap_r = pi`` is the whole sphere."""
    if not 0.0 < cap_r <= math.pi:
        raise DomainError("cap radius must lie in (0, pi]")
    return (1.0 - float(normal_cdf(z))) * 2.0 * math.pi * (1.0 - math.cos(cap_r))


# ---------------------------------------------------------------------------
# first and second chaos


@dataclass(frozen=True)
class FirstChaosVariance:
    value: float
    remainder_bound: float

    def __float__(self):
        return self.value


def _require_degree(coeffs, ell, need):
    if coeffs.L_max < need:
        warnings.warn(
            f"coefficients stop at L_max={coeffs.L_max} below the {need} required at ell={ell}",
            TruncationWarning,
            stacklevel=3,
        )


def var_first_chaos(ell: int, coeffs: MollifierCoefficients) -> FirstChaosVariance:
    """Leading term 4pi/(2l+1) b_l^2 plus the smoothing remainder budget.

    The budget sqrt(2/(2l+1)) 2pi sqrt(2pi) eps^(3/2) is zero for the hard
    indicator and the full sphere, where the leading term is exact.
    """
    if ell < 1:
        raise DomainError("degree must be >= 1")
    if coeffs.L_max < ell:
        raise DomainError(f"coefficients stop at L_max={coeffs.L_max} < ell={ell}")
    value = FOUR_PI / (2 * ell + 1) * float(coeffs.b[ell]) ** 2
    eps = coeffs.spec.eps if coeffs.spec is not None else 0.0
    budget = math.sqrt(2.0 / (2 * ell + 1)) * 2.0 * math.pi * math.sqrt(2.0 * math.pi) * eps**1.5
    return FirstChaosVariance(value, budget)


@lru_cache(maxsize=64)
def _cg_weights(ell):
    """(C^{L0}_{l0l0})^2 / (2L+1) for even L = 0..2l."""
    L = np.arange(0, 2 * ell + 1, 2)
    return L, np.array([cg_zero_m(ell, ell, int(x)) ** 2 / (2 * x + 1) for x in L])


def var_second_chaos(ell: int, coeffs: MollifierCoefficients) -> float:
    """8pi sum_L b_L^2 (C^{L0}_{l0l0})^2 / (2L+1); odd L vanish by parity."""
    if ell < 1:
        raise DomainError("degree must be >= 1")
    _require_degree(coeffs, ell, 2 * ell)
    L, w = _cg_weights(ell)
    keep = L <= coeffs.L_max
    b = np.asarray(coeffs.b)[L[keep]]
    return float(8.0 * math.pi * math.fsum(b * b * w[keep]))


def second_chaos_bounds(ell: int, coeffs: MollifierCoefficients):
    """8pi b_0^2/(2l+1) <= v2 <= 32pi^2/(2l+1)."""
    b0 = float(coeffs.b[0])
    return 8.0 * math.pi * b0 * b0 / (2 * ell + 1), 32.0 * math.pi**2 / (2 * ell + 1)


# ---------------------------------------------------------------------------
# higher chaoses


@lru_cache(maxsize=512)
def legendre_abs_moment(ell: int, p: int) -> float:
    """I_p(l) = int_0^1 |P_l(x)|^p dx.

    [0, 1] is cut at the zeros of P_l so |P_l|^p is a polynomial on every
    piece; a Gauss-Legendre rule of order >= (p l + 1)/2 is then exact.
    """
    if ell < 0 or p < 1:
        raise DomainError("need ell >= 0 and p >= 1")
    if ell == 0:
        return 1.0
    roots = np.asarray(gauss_legendre(ell).nodes)
    cuts = np.concatenate([[0.0], np.sort(roots[roots > 0.0]), [1.0]])
    rule = gauss_legendre(max(2, (p * ell + 2) // 2))
    lo, hi = cuts[:-1, None], cuts[1:, None]
    x = lo + 0.5 * (hi - lo) * (rule.nodes[None, :] + 1.0)
    w = 0.5 * (hi - lo) * rule.weights[None, :]
    return float(np.sum(w * np.abs(legendre_p(ell, x)) ** p))


def chaos_tail_bound(ell: int, z: float, q, cap_r: float = math.pi / 4) -> float:
    """Majorant of Var(c_q h_q) for q = 3, 4, or the whole block q >= 5.

    Each uses Var <= (J_q^2 / q!) m(B) 4pi I_q(l). For q = 3 the moment is
    replaced by its Cauchy-Schwarz bound sqrt(I_2 I_4); for q >= 5 the sum of
    J_q^2/q! is closed through Var(1{Z > z}) = Phi (1 - Phi) and |P|^q <= |P|^5.
    """
    if ell < 2:
        raise DomainError("tail bounds need ell >= 2")
    m_b = 2.0 * math.pi * (1.0 - math.cos(cap_r))
    scale = m_b * FOUR_PI
    if q == 3:
        return j_coeff(3, z) ** 2 / 6.0 * scale * math.sqrt(legendre_abs_moment(ell, 2) * legendre_abs_moment(ell, 4))
    if q == 4:
        return j_coeff(4, z) ** 2 / 24.0 * scale * legendre_abs_moment(ell, 4)
    if q in (5, "5+", "5plus"):
        phi_cdf = float(normal_cdf(z))
        rest = phi_cdf * (1.0 - phi_cdf) - math.fsum(j_coeff(k, z) ** 2 / math.factorial(k) for k in range(1, 5))
        return max(rest, 0.0) * scale * legendre_abs_moment(ell, 5)
    raise DomainError(f"q must be 3, 4 or 5 (meaning q >= 5), got {q!r}")


# ---------------------------------------------------------------------------
# fourth cumulant of h_2


@dataclass(frozen=True)
class Cum4Breakdown:
    """Blocks of the four-fold sum grouped by how many indices are zero.

    Blocks are reported before the multiplicity ``combinatorial_constant``;
    ``total`` includes it.
    """

    a_0000: float
    a_one_zero: float
    a_two_zero: float
    a_general: float
    total: float
    combinatorial_constant: int
    exact_path: bool

    @property
    def cyclic_sum(self):
        return self.a_0000 + self.a_one_zero + self.a_two_zero + self.a_general


def _beta(ell, coeffs):
    """beta_L = b_L sqrt((2L+1)/4pi) (L l l; 0 0 0) on even L <= min(2l, L_max)."""
    top = min(2 * ell, coeffs.L_max)
    L = np.arange(0, top + 1, 2)
    b = np.asarray(coeffs.b)[L]
    return L, b * np.sqrt((2 * L + 1) / FOUR_PI) * np.array([threej_zero_m(int(x), ell, ell) for x in L])


def _pair_row(k, ell, L, beta, sixj):
    """sum over L1, L2 >= 2 of beta beta (L1 L2 k;000){L1 L2 k; l l l}, with L1 <= L2 folded."""
    terms = []
    n = len(L)
    for i in range(1, n):
        l1 = int(L[i])
        for j in range(i, n):
            l2 = int(L[j])
            if l2 - l1 > k:
                continue
            if l1 + l2 < k:
                continue
            x = threej_zero_m(l1, l2, k) * sixj(l1, l2, k, ell, ell, ell)
            terms.append((1.0 if i == j else 2.0) * beta[i] * beta[j] * x)
    return math.fsum(terms)


def cum4_second_chaos(ell: int, coeffs: MollifierCoefficients, *, exact=None, threads: int = 1) -> Cum4Breakdown:
    """Fourth cumulant of h_2 through 3j/6j contractions.

    cum4 = 48 (4pi)^4 sum_k (2k+1) R_k^2 with
    R_k = sum_{L1,L2} beta_L1 beta_L2 (L1 L2 k;000){L1 L2 k; l l l}.
    Only even indices contribute. The exact symbol path is used for
    l <= 30 unless ``exact`` forces a choice.
    """
    if ell < 1:
        raise DomainError("degree must be >= 1")
    _require_degree(coeffs, ell, 2 * ell)
    use_exact = ell <= EXACT_CUM4_MAX if exact is None else bool(exact)
    sixj = sixj_exact_float if use_exact else sixj_float
    L, beta = _beta(ell, coeffs)
    ks = [int(k) for k in range(0, 2 * ell + 1, 2)]

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            r_gen = list(pool.map(lambda k: _pair_row(k, ell, L, beta, sixj), ks))
    else:
        r_gen = [_pair_row(k, ell, L, beta, sixj) for k in ks]

    # pieces with zeros: (0 L; k) forces k = L
    x000 = sixj(0, 0, 0, ell, ell, ell)
    r00 = beta[0] ** 2 * x000
    r0 = {}
    for i in range(1, len(L)):
        lk = int(L[i])
        r0[lk] = beta[0] * beta[i] * threej_zero_m(0, lk, lk) * sixj(0, lk, lk, ell, ell, ell)

    four, one, two, general = [], [], [], []
    for k, rg in zip(ks, r_gen):
        w = 2 * k + 1
        cross = 2.0 * r0.get(k, 0.0)
        if k == 0:
            four.append(w * r00 * r00)
            two.append(w * 2.0 * r00 * rg)
        two.append(w * cross * cross)
        one.append(w * 2.0 * cross * rg)
        general.append(w * rg * rg)

    scale = FOUR_PI**4
    blocks = [scale * math.fsum(v) for v in (four, one, two, general)]
    total = CUM4_CONSTANT * math.fsum(blocks)
    return Cum4Breakdown(*blocks, total=total, combinatorial_constant=CUM4_CONSTANT, exact_path=use_exact)


def wasserstein_bound(v2: float, cum4: float) -> float:
    """Fourth-moment bound sqrt(cum4 / (6 v2^2)) on d_W(h_2 / sqrt(v2), N(0,1))."""
    if v2 <= 0.0:
        raise DomainError("variance must be positive")
    if cum4 < -1e-12:
        raise DomainError(f"negative fourth cumulant {cum4}")
    return math.sqrt(max(cum4, 0.0) / (6.0 * v2 * v2))


# ---------------------------------------------------------------------------
# report


@dataclass(frozen=True)
class ChaosVarianceReport:
    ell: int
    z: float
    cap: MollifierSpec | None
    cap_r: float
    v1: float
    v1_remainder: float
    v2: float
    v2_lower: float
    v2_upper: float
    tail3: float
    tail4: float
    tail5plus: float
    var_total: float
    cum4: float
    dw_bound: float
    admissible: bool

    def as_dict(self):
        out = asdict(self)
        out["cap"] = None if self.cap is None else asdict(self.cap)
        return out


def coefficients_for(ell: int, spec: MollifierSpec | None, cap_r: float | None = None) -> MollifierCoefficients:
    """Zonal coefficients up to 2l: smoothed if ``spec`` is given, else the hard cap of radius ``cap_r``."""
    if spec is not None:
        return fourier_coefficients(spec, 2 * ell)
    return cap_indicator_coefficients(cap_r, 2 * ell)


def build_report(ell: int, z: float, spec: MollifierSpec | None, *, cap_r: float | None = None,
                 with_cum4: bool = True, threads: int = 1) -> ChaosVarianceReport:
    """Leading-order variance decomposition of S(B, z) at degree ``ell``.

    ``var_total = c_1^2 v1 + c_2^2 v2`` with c_1 = phi(z), c_2 = z phi(z)/2.
    Admissibility of (eps, M) at ``ell`` is reported rather than enforced so
    that fixed-width caps can still be analysed. With ``spec=None`` the hard
    cap of radius ``cap_r`` (pi for the whole sphere) is used.
    """
    if spec is None and cap_r is None:
        raise DomainError("either a mollifier spec or a cap radius is required")
    coeffs = coefficients_for(ell, spec, cap_r)
    radius = coeffs.cap_r
    first = var_first_chaos(ell, coeffs)
    v2 = var_second_chaos(ell, coeffs)
    lo, hi = second_chaos_bounds(ell, coeffs)
    c1, c2 = tail_coeff(1, z), tail_coeff(2, z)
    var_total = c1 * c1 * first.value + c2 * c2 * v2
    if with_cum4:
        cum4 = cum4_second_chaos(ell, coeffs, threads=threads).total
        dw = wasserstein_bound(v2, cum4)
    else:
        cum4 = dw = float("nan")
    tail_r = min(radius, math.pi)
    tails = [chaos_tail_bound(ell, z, q, tail_r) if ell >= 2 else float("nan") for q in (3, 4, 5)]
    admissible = spec is not None and is_admissible(ell, spec.eps, spec.M)
    return ChaosVarianceReport(
        ell=ell, z=z, cap=spec, cap_r=radius, v1=first.value, v1_remainder=first.remainder_bound,
        v2=v2, v2_lower=lo, v2_upper=hi, tail3=tails[0], tail4=tails[1], tail5plus=tails[2],
        var_total=var_total, cum4=cum4, dw_bound=dw, admissible=admissible,
    )


class ChaosVarianceModel(RegressorMixin, BaseEstimator):
    """Predict the leading-order variance of the excursion area as a function of degree.

    ``fit`` takes nothing from data: it fixes the cap and level. ``predict``
    maps an array of degrees to ``var_total``; ``reports_`` caches the full
    decomposition per degree.

    Parameters
    ----------
    z : float
        Excursion level.
    r, eps, k, M
        Mollifier parameters; ``eps=None`` selects the hard cap indicator.
    """

    def __init__(self, z=1.0, r=math.pi / 4, eps=0.25, k=2, M=None):
        self.z = z
        self.r = r
        self.eps = eps
        self.k = k
        self.M = M

    def fit(self, X=None, y=None):
        self.spec_ = None if self.eps is None else MollifierSpec(self.r, self.eps, self.k, self.M)
        self.reports_ = {}
        return self

    def report(self, ell):
        check_is_fitted(self, "spec_")
        ell = int(ell)
        if ell not in self.reports_:
            self.reports_[ell] = build_report(ell, self.z, self.spec_, cap_r=self.r, with_cum4=False)
        return self.reports_[ell]

    def predict(self, X):
        ells = column_or_1d(np.asarray(X)).astype(int)
        return np.array([self.report(e).var_total for e in ells])
