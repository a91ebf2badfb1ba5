"""Acceptance criteria, each at its stated tolerance and runtime budget.

Run ``pytest tests/test_acceptance.py`` for one PASS/FAIL line per criterion.
"""
import math
import time
from fractions import Fraction

import numpy as np
import pytest

from capchaos.chaos import build_report, cum4_second_chaos, expected_area, legendre_abs_moment, var_second_chaos
from capchaos.harness import ExperimentConfig, clt_report, oracle_var2_quadrature, run_replicates, summarize
from capchaos.mollifier import (
    MollifierSpec,
    fourier_coefficients,
    full_sphere_coefficients,
    l1_distance_to_indicator,
)
from capchaos.wigner import clebsch_gordan, wigner_3j, wigner_6j, wigner_9j

R = math.pi / 4
SPEC = MollifierSpec(R, 0.25, 2)

TABLE = {
    1: (0.132269, 0.188425, 0.218866, 0.225059),
    2: (0.111278, 0.147981, 0.163897, 0.166747),
    3: (0.0843363, 0.0983641, 0.0987674, 0.0982093),
    4: (0.0557163, 0.0493925, 0.0381274, 0.0352638),
    5: (0.0294925, 0.00959262, -0.00638063, -0.0097985),
}
EPS = (0.5, 0.25, 0.125, 0.1)


def _spread(values):
    v = np.asarray(values, dtype=float)
    return v.max() / v.min() - 1.0


def _signed_square(sym):
    return sym.sign * sym.square if sym.sign else Fraction(0)


@pytest.mark.criterion(1, "mollifier table")
def test_criterion_1_mollifier_table(note):
    t0 = time.perf_counter()
    worst = 0.0
    for col, eps in enumerate(EPS):
        u = fourier_coefficients(MollifierSpec(R, eps, 2), 5).legendre_moments
        for ell, row in TABLE.items():
            worst = max(worst, abs(u[ell] - row[col]))
    elapsed = time.perf_counter() - t0
    note(f"max abs error {worst:.2e}")
    assert worst <= 1e-4
    assert elapsed < 1.0


@pytest.mark.criterion(2, "coupling coefficient identities")
def test_criterion_2_wigner_identities(note):
    t0 = time.perf_counter()
    # unitarity of the coupling matrix in both directions, l1, l2 <= 8
    worst = 0.0
    for l1 in range(9):
        for l2 in range(9):
            rows = [(m1, m2) for m1 in range(-l1, l1 + 1) for m2 in range(-l2, l2 + 1)]
            cols = [(L, M) for L in range(abs(l1 - l2), l1 + l2 + 1) for M in range(-L, L + 1)]
            U = np.zeros((len(rows), len(cols)))
            for i, (m1, m2) in enumerate(rows):
                for j, (L, M) in enumerate(cols):
                    if M == m1 + m2:
                        U[i, j] = float(clebsch_gordan(l1, m1, l2, m2, L, M))
            eye = np.eye(len(rows))
            worst = max(worst, np.abs(U.T @ U - eye).max(), np.abs(U @ U.T - eye).max())
    note(f"unitarity error {worst:.1e}")
    assert worst <= 1e-10

    # parity zeros, on both evaluation paths
    for l1 in range(9):
        for l2 in range(9):
            for L in range(abs(l1 - l2), l1 + l2 + 1):
                if (l1 + l2 + L) % 2:
                    for exact in (True, False):
                        assert float(clebsch_gordan(l1, 0, l2, 0, L, 0, exact=exact)) == 0.0
                        assert float(wigner_3j(l1, l2, L, 0, 0, 0, exact=exact)) == 0.0

    # closed forms for vanishing arguments, compared as exact signed squares
    for l1 in range(7):
        for m1 in range(-l1, l1 + 1):
            for l2 in range(7):
                for m2 in range(-l2, l2 + 1):
                    got = _signed_square(clebsch_gordan(l1, m1, l2, m2, 0, 0))
                    want = Fraction((-1) ** (l1 - m1), 2 * l1 + 1) if (l1 == l2 and m1 == -m2) else 0
                    assert got == want
            for l3 in range(7):
                for m3 in range(-l3, l3 + 1):
                    want = 1 if (l1 == l3 and m1 == m3) else 0
                    assert _signed_square(clebsch_gordan(l1, m1, 0, 0, l3, m3)) == want
    rng = np.random.default_rng(2024)
    for _ in range(200):
        a, b, c, d, e, f = (int(x) for x in rng.integers(0, 6, size=6))
        forms = [
            ((a, b, c, 0, e, f), (-1) ** (a + b + e), (b == f and c == e), (2 * b + 1) * (2 * c + 1)),
            ((a, 0, c, d, e, f), (-1) ** (a + d + e), (a == c and d == f), (2 * a + 1) * (2 * d + 1)),
            ((a, b, c, d, 0, f), (-1) ** (a + b + d), (a == f and c == d), (2 * a + 1) * (2 * c + 1)),
        ]
        for args, sign, deltas, den in forms:
            want = Fraction(sign, den) if deltas and _triangles_6j(*args) else 0
            assert _signed_square(wigner_6j(*args)) == want, args
        # nine-j with a vanishing corner reduces to a six-j
        g = int(rng.integers(0, 5))
        h, f9 = g, c
        nine = wigner_9j(a, b, c, d, e, f9, g, h, 0)
        six = wigner_6j(a, b, c, e, d, g)
        want = (-1) ** (b + c + d + g) * _signed_square(six) / ((2 * c + 1) * (2 * g + 1))
        assert _signed_square(nine) == want
        # whole vanishing bottom row
        tri = abs(a - b) <= c <= a + b
        want = Fraction(1, (2 * a + 1) * (2 * b + 1) * (2 * c + 1)) if tri else 0
        assert _signed_square(wigner_9j(a, b, c, a, b, c, 0, 0, 0)) == want

    # magnitude bounds on 500 random symbols each
    for _ in range(500):
        l1, l2 = (int(x) for x in rng.integers(0, 40, size=2))
        l3 = int(rng.integers(abs(l1 - l2), l1 + l2 + 1))
        m1 = int(rng.integers(-l1, l1 + 1))
        m2 = int(rng.integers(max(-l2, -l3 - m1), min(l2, l3 - m1) + 1))
        bound = math.sqrt(2 * l3 + 1) / math.sqrt(max(2 * l1 + 1, 2 * l2 + 1, 2 * l3 + 1))
        assert abs(float(clebsch_gordan(l1, m1, l2, m2, l3, m1 + m2))) <= bound * (1 + 1e-12)
        a, b, d, e = (int(x) for x in rng.integers(0, 30, size=4))
        c = int(rng.integers(abs(a - b), a + b + 1))
        f = int(rng.integers(abs(a - e), a + e + 1))
        sixj = abs(float(wigner_6j(a, b, c, d, e, f)))
        bound = min(1 / math.sqrt((2 * c + 1) * (2 * f + 1)), 1 / math.sqrt((2 * a + 1) * (2 * d + 1)),
                    1 / math.sqrt((2 * b + 1) * (2 * e + 1)))
        assert sixj <= bound * (1 + 1e-12)
    elapsed = time.perf_counter() - t0
    assert elapsed < 30.0


def _triangles_6j(a, b, c, d, e, f):
    return all(abs(x - y) <= z <= x + y for x, y, z in ((a, b, c), (a, e, f), (d, b, f), (d, e, c)))


@pytest.mark.criterion(3, "full-sphere second chaos")
def test_criterion_3_full_sphere_variance(note):
    t0 = time.perf_counter()
    co = full_sphere_coefficients(128)
    worst = max(abs(var_second_chaos(ell, co) / (32 * math.pi**2 / (2 * ell + 1)) - 1) for ell in range(1, 65))
    elapsed = time.perf_counter() - t0
    note(f"max rel error {worst:.1e}")
    assert worst <= 1e-10
    assert elapsed < 1.0


@pytest.mark.criterion(4, "second chaos against triple quadrature")
def test_criterion_4_quadrature_oracle(note):
    t0 = time.perf_counter()
    errs = []
    for ell in (2, 4, 8):
        v = var_second_chaos(ell, fourier_coefficients(SPEC, 2 * ell))
        errs.append(abs(v / oracle_var2_quadrature(ell, SPEC) - 1))
    elapsed = time.perf_counter() - t0
    note("rel errors " + ", ".join(f"{e:.1e}" for e in errs))
    assert max(errs) <= 1e-6
    assert elapsed < 120.0


@pytest.mark.criterion(5, "fourth cumulant")
def test_criterion_5_fourth_cumulant(note):
    t0 = time.perf_counter()
    worst = 0.0
    for ell in range(1, 33):
        total = cum4_second_chaos(ell, full_sphere_coefficients(2 * ell)).total
        worst = max(worst, abs(total / (48 * (4 * math.pi) ** 4 / (2 * ell + 1) ** 3) - 1))
    assert worst <= 1e-8

    cfg = ExperimentConfig(ell_list=(8,), z=1.0, cap_r=math.pi, k=2, n_replicates=20000, master_seed=42, eps=0.0)
    st = summarize([s.h2 for s in run_replicates(cfg)])
    target = 48 * (4 * math.pi) ** 4 / 17**3
    z_score = (st.fourth_cumulant - target) / st.fourth_cumulant_se
    assert abs(z_score) < 5

    scaled = [ell**3 * cum4_second_chaos(ell, fourier_coefficients(SPEC, 2 * ell)).total for ell in (16, 32, 64)]
    elapsed = time.perf_counter() - t0
    note(f"closed form err {worst:.1e}; MC z-score {z_score:+.2f}; l^3 cum4 spread {_spread(scaled):.1%}")
    assert _spread(scaled) < 0.30
    assert elapsed < 300.0


@pytest.mark.criterion(6, "Wasserstein bound rate")
def test_criterion_6_dw_rate(note):
    t0 = time.perf_counter()
    scaled = [math.sqrt(ell) * build_report(ell, 1.0, SPEC).dw_bound for ell in (16, 32, 64)]
    elapsed = time.perf_counter() - t0
    note("sqrt(l) dw = " + ", ".join(f"{s:.4f}" for s in scaled) + f"; spread {_spread(scaled):.1%}")
    assert _spread(scaled) < 0.25
    assert elapsed < 120.0


@pytest.mark.criterion(7, "Monte Carlo mean and variance")
def test_criterion_7_mc_mean_variance(note):
    t0 = time.perf_counter()
    # hard cap on both sides: the simulated functional is the indicator of the cap
    cfg = ExperimentConfig(ell_list=(32,), z=1.0, cap_r=R, k=2, n_replicates=400, master_seed=42, eps=0.0,
                           w1_bootstrap=0)
    (row,) = clt_report(cfg)
    target = (1 - 0.5 * math.erfc(-1 / math.sqrt(2))) * 2 * math.pi * (1 - math.cos(R))
    assert expected_area(R, 1.0) == pytest.approx(target, rel=1e-14)
    z_mean = (row.mean - target) / row.mean_se
    elapsed = time.perf_counter() - t0
    note(f"mean z-score {z_mean:+.2f}; variance ratio {row.var_ratio:.3f}")
    assert abs(z_mean) < 4
    assert abs(row.var_ratio - 1) <= 0.25
    assert elapsed < 600.0


@pytest.mark.criterion(8, "empirical normality trend")
def test_criterion_8_normality_trend(note):
    t0 = time.perf_counter()
    cfg = ExperimentConfig(ell_list=(8, 32, 64, 128), z=1.0, cap_r=R, k=2, n_replicates=2000, master_seed=42,
                           eps=0.0)
    samples = run_replicates(cfg)
    stats = {}
    for ell in cfg.ell_list:
        stats[ell] = summarize([s.area for s in samples if s.ell == ell], bootstrap=200, seed=cfg.master_seed)
    s64 = stats[64]
    w1 = [(stats[ell].w1_to_normal, stats[ell].w1_se) for ell in (8, 32, 128)]
    elapsed = time.perf_counter() - t0
    note(f"l=64 skew {s64.skewness:+.3f} kurt {s64.excess_kurtosis:+.3f}; w1 "
         + ", ".join(f"{w:.4f}+-{se:.4f}" for w, se in w1))
    assert abs(s64.skewness) <= 0.25
    assert abs(s64.excess_kurtosis) <= 0.5
    for (w_a, se_a), (w_b, se_b) in zip(w1, w1[1:]):
        assert w_b <= w_a + 2 * math.hypot(se_a, se_b)
    assert elapsed < 1800.0


@pytest.mark.criterion(9, "mollifier analysis")
def test_criterion_9_mollifier_analysis(note):
    t0 = time.perf_counter()
    for r in (0.5, R, 1.5, 2.5):
        for frac in (0.05, 0.3, 0.9):
            for k in (1, 2, 4):
                spec = MollifierSpec(r, frac * r, k)
                assert l1_distance_to_indicator(spec) <= 2 * math.pi * spec.eps
                assert fourier_coefficients(spec, 60).sum_of_squares <= 4 * math.pi * (1 + 1e-12)
    ells = np.arange(10, 201)
    growth = []
    for M in (1, 2, 3):
        for eps in (0.1, 0.25, 0.5):
            b = np.abs(fourier_coefficients(MollifierSpec(R, eps, M + 1, M), 200).b[10:201])
            scaled = b * ells ** (M - 0.5)
            # bounded: the tail never rises above the head
            growth.append(scaled[-50:].max() / scaled[:50].max())
            assert np.all(np.isfinite(scaled))
    elapsed = time.perf_counter() - t0
    note(f"max tail/head ratio {max(growth):.2e}")
    assert max(growth) <= 1.0
    assert elapsed < 10.0


@pytest.mark.criterion(10, "chaos tail orders")
def test_criterion_10_tail_orders(note):
    t0 = time.perf_counter()
    ells = (16, 32, 64, 128)
    seqs = {
        "l I2": [ell * legendre_abs_moment(ell, 2) for ell in ells],
        "tail3 proxy": [ell * math.sqrt(ell / math.log(ell))
                        * math.sqrt(legendre_abs_moment(ell, 2) * legendre_abs_moment(ell, 4)) for ell in ells],
        "l^2 I4 / log l": [ell**2 / math.log(ell) * legendre_abs_moment(ell, 4) for ell in ells],
        "l^2 I5": [ell**2 * legendre_abs_moment(ell, 5) for ell in ells],
    }
    elapsed = time.perf_counter() - t0
    note("; ".join(f"{k} max/min {max(v) / min(v):.2f}" for k, v in seqs.items()))
    for v in seqs.values():
        assert max(v) / min(v) < 3
    assert elapsed < 60.0
