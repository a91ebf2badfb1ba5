"""Clebsch-Gordan coefficients and Wigner 3j / 6j / 9j symbols.

Integer angular momenta only. Every symbol squares to a rational number, so
values are carried as ``sign * sqrt(num / den)`` with Python integers. Up to
``EXACT_MAX`` this is done exactly; above it the alternating Racah sum is
still evaluated in integer arithmetic (it is the only place cancellation can
occur) while the factorial prefactor goes through ``lgamma``.
"""
from __future__ import annotations

import math
import threading
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from numbers import Integral
from typing import NamedTuple

from .exceptions import DomainError

EXACT_MAX = 60
SYMBOL_MAX = 500

_fact = [1]
_fact_lock = threading.Lock()


def _factorial(n: int) -> int:
    if n >= len(_fact):
        with _fact_lock:
            while len(_fact) <= n:
                _fact.append(_fact[-1] * len(_fact))
    return _fact[n]


def _lfact(n: int) -> float:
    return math.lgamma(n + 1.0)


@dataclass(frozen=True)
class SymbolValue:
    """A coupling coefficient ``sign * sqrt(radicand_num / radicand_den)``.

    ``radicand_num`` and ``radicand_den`` are ``None`` when the value came
    from the floating fallback; ``float_value`` is always populated.
    """

    sign: int
    radicand_num: int | None
    radicand_den: int | None
    float_value: float

    @property
    def exact(self) -> bool:
        return self.radicand_num is not None

    @property
    def square(self) -> Fraction:
        if not self.exact:
            raise ValueError("floating-path symbol has no exact square")
        return Fraction(self.radicand_num, self.radicand_den)

    def __float__(self):
        return self.float_value

    def __bool__(self):
        return self.sign != 0

    def exact_form(self) -> str:
        if self.sign == 0:
            return "0"
        if not self.exact:
            return f"{'-' if self.sign < 0 else ''}sqrt(?)"
        sq = self.square
        s = "-" if self.sign < 0 else ""
        return f"{s}sqrt({sq.numerator}/{sq.denominator})"

    @classmethod
    def zero(cls):
        return cls(0, 0, 1, 0.0)

    @classmethod
    def from_signed_square(cls, sign: int, sq: Fraction):
        if sign == 0 or sq == 0:
            return cls.zero()
        value = sign * math.sqrt(sq.numerator / sq.denominator)
        return cls(sign, sq.numerator, sq.denominator, value)


class TripleIndex(NamedTuple):
    l1: int
    m1: int
    l2: int
    m2: int
    l3: int
    m3: int


def _as_int(v, name="argument"):
    if isinstance(v, Integral):
        return int(v)
    if isinstance(v, float) and v.is_integer():
        return int(v)
    raise DomainError(f"{name}={v!r}: only integer angular momenta are supported")


def _triangle(a, b, c) -> bool:
    return abs(a - b) <= c <= a + b


def _use_exact(exact, *args):
    top = max(args)
    if top > SYMBOL_MAX:
        raise DomainError(f"argument {top} exceeds supported maximum {SYMBOL_MAX}")
    return top <= EXACT_MAX if exact is None else exact


def _horner(zmin, zmax, ratio):
    """Return integers (p, q) with sum_{z=zmin}^{zmax} t_z = t_zmin * p / q.

    ``ratio(z)`` gives the integer pair (num, den) of t_{z+1} / t_z.
    """
    p, q = 1, 1
    for z in range(zmax - 1, zmin - 1, -1):
        rn, rd = ratio(z)
        p, q = q * rd + rn * p, q * rd
    return p, q


def _sign(x) -> int:
    return (x > 0) - (x < 0)


def _delta_sq(a, b, c) -> Fraction:
    return Fraction(
        _factorial(a + b - c) * _factorial(a - b + c) * _factorial(-a + b + c),
        _factorial(a + b + c + 1),
    )


def _log_delta_sq(a, b, c) -> float:
    return _lfact(a + b - c) + _lfact(a - b + c) + _lfact(-a + b + c) - _lfact(a + b + c + 1)


# --------------------------------------------------------------------------
# Clebsch-Gordan


def _cg_racah(j1, m1, j2, m2, j3, m3, exact):
    zmin = max(0, j2 - j3 - m1, j1 - j3 + m2)
    zmax = min(j1 + j2 - j3, j1 - m1, j2 + m2)
    if zmin > zmax:
        return SymbolValue.zero()
    k1, k2, k3 = j1 + j2 - j3, j1 - m1, j2 + m2
    k4, k5 = j3 - j2 + m1, j3 - j1 - m2

    def ratio(z):
        return (-(k1 - z) * (k2 - z) * (k3 - z), (z + 1) * (k4 + z + 1) * (k5 + z + 1))

    p, q = _horner(zmin, zmax, ratio)
    if p == 0:
        return SymbolValue.zero()
    t_sign = -1 if zmin % 2 else 1
    sign = t_sign * _sign(p)
    denom_idx = (zmin, k1 - zmin, k2 - zmin, k3 - zmin, k4 + zmin, k5 + zmin)
    m_idx = (j1 + m1, j1 - m1, j2 + m2, j2 - m2, j3 + m3, j3 - m3)
    if exact:
        t_den = 1
        for n in denom_idx:
            t_den *= _factorial(n)
        pref = (2 * j3 + 1) * _delta_sq(j1, j2, j3)
        for n in m_idx:
            pref *= _factorial(n)
        return SymbolValue.from_signed_square(sign, pref * Fraction(p * p, (t_den * q) ** 2))
    log_mag = 0.5 * (math.log(2 * j3 + 1) + _log_delta_sq(j1, j2, j3) + sum(_lfact(n) for n in m_idx))
    log_mag -= sum(_lfact(n) for n in denom_idx)
    value = sign * math.exp(log_mag) * abs(p / q)
    return SymbolValue(sign, None, None, value)


def clebsch_gordan(l1, m1=None, l2=None, m2=None, l3=None, m3=None, *, exact=None) -> SymbolValue:
    """C^{l3 m3}_{l1 m1 l2 m2}; accepts six integers or a :class:`TripleIndex`."""
    if isinstance(l1, tuple):
        l1, m1, l2, m2, l3, m3 = l1
    l1, m1, l2, m2, l3, m3 = (_as_int(v) for v in (l1, m1, l2, m2, l3, m3))
    for ell, m in ((l1, m1), (l2, m2), (l3, m3)):
        if ell < 0:
            raise DomainError("angular momentum must be nonnegative")
        if abs(m) > ell:
            raise DomainError(f"|m|={abs(m)} exceeds l={ell}")
    if m1 + m2 != m3 or not _triangle(l1, l2, l3):
        return SymbolValue.zero()
    if m1 == m2 == 0 and (l1 + l2 + l3) % 2:
        return SymbolValue.zero()
    return _cg_racah(l1, m1, l2, m2, l3, m3, _use_exact(exact, l1, l2, l3))


def wigner_3j(l1, l2, l3, m1, m2, m3, *, exact=None) -> SymbolValue:
    """Wigner 3j symbol, through its Clebsch-Gordan relation."""
    l1, l2, l3, m1, m2, m3 = (_as_int(v) for v in (l1, l2, l3, m1, m2, m3))
    if m1 + m2 + m3 != 0:
        for ell, m in ((l1, m1), (l2, m2), (l3, m3)):
            if ell < 0 or abs(m) > ell:
                raise DomainError(f"invalid (l, m) = ({ell}, {m})")
        return SymbolValue.zero()
    cg = clebsch_gordan(l1, -m1, l2, -m2, l3, m3, exact=exact)
    if not cg:
        return SymbolValue.zero()
    sign = cg.sign * (-1 if (l3 + m3) % 2 else 1)
    if cg.exact:
        return SymbolValue.from_signed_square(sign, cg.square / (2 * l3 + 1))
    return SymbolValue(sign, None, None, abs(cg.float_value) * sign / math.sqrt(2 * l3 + 1))


@lru_cache(maxsize=1 << 16)
def cg_zero_m(l1: int, l2: int, l3: int) -> float:
    """C^{l3 0}_{l1 0 l2 0} in closed form (no alternating sum); cached."""
    if not _triangle(l1, l2, l3) or (l1 + l2 + l3) % 2:
        return 0.0
    return math.sqrt(2 * l3 + 1) * _threej_zero_m(l1, l2, l3) * (-1 if (l1 - l2) % 2 else 1)


@lru_cache(maxsize=1 << 18)
def _threej_zero_m(l1, l2, l3):
    if not _triangle(l1, l2, l3) or (l1 + l2 + l3) % 2:
        return 0.0
    g = (l1 + l2 + l3) // 2
    log_mag = 0.5 * _log_delta_sq(l1, l2, l3) + _lfact(g) - _lfact(g - l1) - _lfact(g - l2) - _lfact(g - l3)
    return (-1 if g % 2 else 1) * math.exp(log_mag)


def threej_zero_m(l1: int, l2: int, l3: int) -> float:
    """(l1 l2 l3; 0 0 0) in closed form."""
    return _threej_zero_m(int(l1), int(l2), int(l3))


def gaunt(l1, m1, l2, m2, l3, m3) -> float:
    """Integral of Y_{l1 m1} Y_{l2 m2} conj(Y_{l3 m3}) over the sphere."""
    if m1 + m2 != m3:
        return 0.0
    return (
        math.sqrt((2 * l1 + 1) * (2 * l2 + 1) / (4.0 * math.pi * (2 * l3 + 1)))
        * cg_zero_m(l1, l2, l3)
        * float(clebsch_gordan(l1, m1, l2, m2, l3, m3))
    )


# --------------------------------------------------------------------------
# 6j


def _sixj_racah_sum(a, b, c, d, e, f):
    """Rational Racah sum S with {abcdef} = sqrt(prod Delta^2) * S, as (sign, p, q, zmin, al, be)."""
    al = (a + b + c, a + e + f, d + b + f, d + e + c)
    be = (a + b + d + e, a + c + d + f, b + c + e + f)
    zmin, zmax = max(al), min(be)
    if zmin > zmax:
        return None

    def ratio(z):
        return (
            -(z + 2) * (be[0] - z) * (be[1] - z) * (be[2] - z),
            (z + 1 - al[0]) * (z + 1 - al[1]) * (z + 1 - al[2]) * (z + 1 - al[3]),
        )

    p, q = _horner(zmin, zmax, ratio)
    return p, q, zmin, al, be


def _sixj_rational(a, b, c, d, e, f) -> Fraction:
    """Exact rational Racah sum S (without the Delta prefactor)."""
    parts = _sixj_racah_sum(a, b, c, d, e, f)
    if parts is None:
        return Fraction(0)
    p, q, zmin, al, be = parts
    t_den = 1
    for x in al:
        t_den *= _factorial(zmin - x)
    for y in be:
        t_den *= _factorial(y - zmin)
    t_num = _factorial(zmin + 1) * (-1 if zmin % 2 else 1)
    return Fraction(t_num * p, t_den * q)


def _sixj_triads(a, b, c, d, e, f):
    return ((a, b, c), (a, e, f), (d, b, f), (d, e, c))


def _sixj_admissible(a, b, c, d, e, f) -> bool:
    return all(_triangle(*t) for t in _sixj_triads(a, b, c, d, e, f))


def wigner_6j(a, b, c, d, e, f, *, exact=None) -> SymbolValue:
    """Wigner 6j symbol {a b c; d e f} by the Racah single sum."""
    args = tuple(_as_int(v) for v in (a, b, c, d, e, f))
    if min(args) < 0:
        raise DomainError("6j arguments must be nonnegative")
    if not _sixj_admissible(*args):
        return SymbolValue.zero()
    if _use_exact(exact, *args):
        s = _sixj_rational(*args)
        if s == 0:
            return SymbolValue.zero()
        pref = Fraction(1)
        for t in _sixj_triads(*args):
            pref *= _delta_sq(*t)
        return SymbolValue.from_signed_square(_sign(s), pref * s * s)
    value = sixj_float(*args)
    return SymbolValue(_sign(value), None, None, value)


@lru_cache(maxsize=1 << 19)
def sixj_float(a, b, c, d, e, f) -> float:
    """6j value as a float; integer Horner sum, log-gamma prefactor. Cached."""
    if not _sixj_admissible(a, b, c, d, e, f):
        return 0.0
    parts = _sixj_racah_sum(a, b, c, d, e, f)
    if parts is None:
        return 0.0
    p, q, zmin, al, be = parts
    if p == 0:
        return 0.0
    log_mag = 0.5 * sum(_log_delta_sq(*t) for t in _sixj_triads(a, b, c, d, e, f))
    log_mag += _lfact(zmin + 1) - sum(_lfact(zmin - x) for x in al) - sum(_lfact(y - zmin) for y in be)
    sign = -1 if zmin % 2 else 1
    return sign * math.exp(log_mag) * (p / q)


@lru_cache(maxsize=1 << 19)
def sixj_exact_float(a, b, c, d, e, f) -> float:
    """6j value from the exact sign*sqrt(p/q) representation, correctly rounded."""
    return wigner_6j(a, b, c, d, e, f, exact=True).float_value


# --------------------------------------------------------------------------
# 9j


def wigner_9j(a, b, c, d, e, f, g, h, j, *, exact=None) -> SymbolValue:
    """Wigner 9j symbol {a b c; d e f; g h j} as a single sum over 6j products."""
    args = tuple(_as_int(v) for v in (a, b, c, d, e, f, g, h, j))
    if min(args) < 0:
        raise DomainError("9j arguments must be nonnegative")
    a, b, c, d, e, f, g, h, j = args
    outer = ((a, b, c), (d, e, f), (g, h, j), (a, d, g), (b, e, h), (c, f, j))
    if not all(_triangle(*t) for t in outer):
        return SymbolValue.zero()
    xmin = max(abs(a - j), abs(b - f), abs(d - h))
    xmax = min(a + j, b + f, d + h)
    if _use_exact(exact, *args):
        total = Fraction(0)
        for x in range(xmin, xmax + 1):
            s1 = _sixj_rational(a, b, c, f, j, x)
            s2 = _sixj_rational(d, e, f, b, x, h)
            s3 = _sixj_rational(g, h, j, x, a, d)
            if not (s1 and s2 and s3):
                continue
            inner = _delta_sq(a, j, x) * _delta_sq(f, b, x) * _delta_sq(d, x, h)
            total += (2 * x + 1) * s1 * s2 * s3 * inner
        if total == 0:
            return SymbolValue.zero()
        pref = Fraction(1)
        for t in outer:
            pref *= _delta_sq(*t)
        return SymbolValue.from_signed_square(_sign(total), pref * total * total)
    terms = [
        (2 * x + 1) * sixj_float(a, b, c, f, j, x) * sixj_float(d, e, f, b, x, h) * sixj_float(g, h, j, x, a, d)
        for x in range(xmin, xmax + 1)
    ]
    value = math.fsum(terms)
    return SymbolValue(_sign(value), None, None, value)
