"""Monte Carlo experiments and independent oracles for the chaos analytics."""
from __future__ import annotations

import hashlib
import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np

from .chaos import build_report, expected_area
from .exceptions import AdmissibilityError, ConfigurationError, DomainError
from .field import CapGrid, FieldGrid, _draw, auto_resolution, replicate_rng
from .mollifier import MollifierSpec, epsilon_schedule, phi_r_eps
from .special import gauss_legendre, legendre_p, normal_ppf, normalized_assoc_legendre

CHUNK = 64


@dataclass(frozen=True)
class ExperimentConfig:
    """Resolved experiment description.

    ``eps`` set means a fixed smoothing width; otherwise ``(M, alpha)`` gives
    the schedule eps_l = l^-alpha. ``eps == 0`` selects the hard cap in the
    analytic columns. ``grid`` is ``"auto"`` or an ``(n_theta, n_phi)`` pair.
    """

    ell_list: tuple
    z: float
    cap_r: float
    k: int
    n_replicates: int
    master_seed: int
    eps: float | None = None
    M: int | None = None
    alpha: float | None = None
    grid: str | tuple = "auto"
    output_dir: str = "capchaos-out"
    w1_bootstrap: int = 200

    def __post_init__(self):
        object.__setattr__(self, "ell_list", tuple(int(e) for e in self.ell_list))
        if not self.ell_list or min(self.ell_list) < 1:
            raise DomainError("ell_list must contain degrees >= 1")
        if self.n_replicates < 2:
            raise DomainError("n_replicates must be >= 2")
        if not 0.0 < self.cap_r <= math.pi:
            raise DomainError("cap_r must lie in (0, pi]")
        if self.eps is None:
            if self.M is None or self.alpha is None:
                raise ConfigurationError("give either eps or both M and alpha")
            if self.k < self.M:
                raise AdmissibilityError(f"a C^{self.M} blend needs k >= M, got k={self.k}")
        elif self.M is not None or self.alpha is not None:
            raise ConfigurationError("eps and (M, alpha) are mutually exclusive")
        if self.grid != "auto":
            object.__setattr__(self, "grid", tuple(int(g) for g in self.grid))
        for ell in self.ell_list:
            self.spec_for(ell)
            self.grid_for(ell)

    @property
    def hard_cap(self):
        return self.eps == 0.0 or self.cap_r == math.pi

    def spec_for(self, ell) -> MollifierSpec | None:
        if self.hard_cap:
            return None
        if self.eps is not None:
            return MollifierSpec(self.cap_r, self.eps, self.k)
        return MollifierSpec(self.cap_r, epsilon_schedule(ell, self.M, self.alpha), self.k, self.M)

    def grid_for(self, ell):
        if self.grid == "auto":
            return auto_resolution(ell, self.cap_r)
        n_theta, n_phi = self.grid
        CapGrid.check_floor(ell, self.cap_r, n_theta, n_phi)
        return n_theta, n_phi

    def canonical(self):
        """Every field that affects numerical output, in a stable order."""
        d = asdict(self)
        d.pop("output_dir")
        d["grid"] = {ell: list(self.grid_for(ell)) for ell in self.ell_list}
        return d

    def digest(self):
        blob = json.dumps(self.canonical(), sort_keys=True, separators=(",", ":"), default=str)
        return hashlib.sha256(blob.encode()).hexdigest()[:16]


@dataclass(frozen=True)
class ReplicateSample:
    ell: int
    replicate: int
    area: float
    h1: float
    h2: float


def excursion_area(grid, z: float) -> float:
    """sum_ij w_i (2pi/n_phi) 1{T(theta_i, phi_j) > z}."""
    if isinstance(grid, FieldGrid):
        return float(np.dot(grid.weights, (grid.values > z).sum(axis=1)) * 2.0 * math.pi / grid.n_phi)
    raise TypeError("expected a FieldGrid")


def _chunk(cap_grid, z, master_seed, ell, start, stop):
    a = np.stack([_draw(replicate_rng(master_seed, ell, i), ell) for i in range(start, stop)])
    values = cap_grid.values(a)
    area = cap_grid.integrate((values > z).astype(float))
    h1 = cap_grid.integrate(values)
    h2 = cap_grid.integrate(values * values - 1.0)
    return [ReplicateSample(ell, i, float(area[j]), float(h1[j]), float(h2[j])) for j, i in enumerate(range(start, stop))]


def run_replicates(config: ExperimentConfig, threads: int = 1, ells=None):
    """Sample every replicate of every degree; ordered by (ell, replicate).

    Replicate i of degree l draws from its own stream keyed by
    (master_seed, l, i) and is processed in fixed-size chunks, so output does
    not depend on ``threads``.
    """
    out = []
    for ell in ells or config.ell_list:
        n_theta, n_phi = config.grid_for(ell)
        cap_grid = CapGrid(ell, config.cap_r, n_theta, n_phi)
        bounds = [(s, min(s + CHUNK, config.n_replicates)) for s in range(0, config.n_replicates, CHUNK)]

        def work(b, cap_grid=cap_grid, ell=ell):
            return _chunk(cap_grid, config.z, config.master_seed, ell, *b)

        if threads > 1:
            with ThreadPoolExecutor(max_workers=threads) as pool:
                parts = list(pool.map(work, bounds))
        else:
            parts = [work(b) for b in bounds]
        for p in parts:
            out.extend(p)
    return out


# ---------------------------------------------------------------------------
# summary statistics


@dataclass(frozen=True)
class SummaryStats:
    n: int
    mean: float
    variance: float
    skewness: float
    excess_kurtosis: float
    fourth_cumulant: float
    w1_to_normal: float
    degenerate: bool = False
    mean_se: float = float("nan")
    variance_se: float = float("nan")
    fourth_cumulant_se: float = float("nan")
    w1_se: float = float("nan")


def w1_quantile_coupling(x) -> float:
    """(1/n) sum |x_(i) - Phi^-1((i - 1/2)/n)| for an already standardized sample."""
    xs = np.sort(np.asarray(x, dtype=float), axis=-1)
    n = xs.shape[-1]
    q = normal_ppf((np.arange(1, n + 1) - 0.5) / n)
    return np.mean(np.abs(xs - q), axis=-1)


def summarize(samples, bootstrap: int = 0, seed: int = 0) -> SummaryStats:
    """Moments, fourth cumulant and empirical W1 distance to N(0, 1).

    Standard errors come from influence functions for the moments and from a
    seeded bootstrap (``bootstrap`` resamples) for W1. A zero-variance sample
    is flagged and its W1 is taken against a point mass at 0.
    """
    x = np.asarray(samples, dtype=float)
    n = x.size
    if n < 2:
        raise DomainError("need at least two samples")
    mean = float(np.mean(x))
    d = x - mean
    m2, m3, m4 = (float(np.mean(d**p)) for p in (2, 3, 4))
    var = float(np.var(x, ddof=1))
    k4 = m4 - 3.0 * m2 * m2
    scale = math.sqrt(m2)
    if scale == 0.0 or scale <= 1e-13 * float(np.max(np.abs(x))):
        w1 = float(np.mean(np.abs(normal_ppf((np.arange(1, n + 1) - 0.5) / n))))
        return SummaryStats(n, mean, 0.0, 0.0, 0.0, 0.0, w1, degenerate=True, mean_se=0.0, variance_se=0.0,
                            fourth_cumulant_se=0.0, w1_se=0.0)
    u = d / scale
    skew = float(np.mean(u**3))
    kurt = float(np.mean(u**4)) - 3.0
    infl_k4 = (d**4 - m4) - 4.0 * m3 * d - 6.0 * m2 * (d * d - m2)
    std = (x - mean) / math.sqrt(var)
    w1 = float(w1_quantile_coupling(std))
    w1_se = float("nan")
    if bootstrap:
        rng = replicate_rng(seed, n, bootstrap)
        idx = rng.integers(0, n, size=(bootstrap, n))
        boot = x[idx]
        boot = (boot - boot.mean(axis=1, keepdims=True)) / boot.std(axis=1, ddof=1, keepdims=True)
        w1_se = float(np.std(w1_quantile_coupling(boot), ddof=1))
    return SummaryStats(
        n=n, mean=mean, variance=var, skewness=skew, excess_kurtosis=kurt, fourth_cumulant=k4,
        w1_to_normal=w1, mean_se=math.sqrt(var / n), variance_se=float(np.std(d * d, ddof=1)) / math.sqrt(n),
        fourth_cumulant_se=float(np.std(infl_k4, ddof=1)) / math.sqrt(n), w1_se=w1_se,
    )


# ---------------------------------------------------------------------------
# oracles


def _weight_pieces(weight, order):
    """(nodes in cos(theta), weights including the cap weight) over the support."""
    rule = gauss_legendre(order)
    if isinstance(weight, MollifierSpec):
        spec = weight
        mu_in, mu_w = rule.scaled(math.cos(spec.r - spec.eps), 1.0)
        th, th_w = rule.scaled(spec.r - spec.eps, spec.r)
        band_w = th_w * np.sin(th) * phi_r_eps(spec, th)
        return np.concatenate([mu_in, np.cos(th)]), np.concatenate([mu_w, band_w])
    r = float(weight)
    if not 0.0 < r <= math.pi:
        raise DomainError("cap radius must lie in (0, pi]")
    return rule.scaled(math.cos(r), 1.0)


def oracle_var2_quadrature(ell: int, weight, max_ell: int = 16) -> float:
    """2 int int w(x) w(y) P_l(<x, y>)^2 dx dy by tensor Gauss-Legendre.

    ``weight`` is a MollifierSpec (smoothed cap), a radius (hard cap) or pi
    (whole sphere). Uses only Legendre polynomials: no coupling coefficients.
    """
    if ell > max_ell:
        raise ConfigurationError(f"triple quadrature oracle limited to ell <= {max_ell}")
    order = max(8 * ell, 32)
    mu, w = _weight_pieces(weight, order)
    phi, phi_w = gauss_legendre(order).scaled(0.0, 2.0 * math.pi)
    s = np.sqrt(np.clip(1.0 - mu * mu, 0.0, None))
    total = 0.0
    for i in range(mu.size):
        c = mu[i] * mu[:, None] + s[i] * s[:, None] * np.cos(phi)[None, :]
        p2 = legendre_p(ell, np.clip(c, -1.0, 1.0)) ** 2
        total += w[i] * float(w @ (p2 @ phi_w))
    return 2.0 * 2.0 * math.pi * total


def _zonal_gram(ell, weight):
    """g_m = int w |Y_lm|^2 for m = -l..l by quadrature in cos(theta)."""
    mu, w = _weight_pieces(weight, 2 * ell + 40)
    g = 2.0 * math.pi * (w @ normalized_assoc_legendre(ell, mu) ** 2)
    return np.concatenate([g[:0:-1], g])


def oracle_second_chaos_moments(ell: int, weight):
    """(Var h_2, cum_4 h_2) from the diagonal Gram form, independent of Wigner symbols.

    h_2 = c (a^T G a - tr G) with c = 4pi/(2l+1) and G = diag(g_m), hence
    Var = 2 c^2 sum g^2 and cum_4 = 48 c^4 sum g^4.
    """
    g = _zonal_gram(ell, weight)
    c = 4.0 * math.pi / (2 * ell + 1)
    return 2.0 * c * c * float(np.sum(g**2)), 48.0 * c**4 * float(np.sum(g**4))


# ---------------------------------------------------------------------------
# report


@dataclass
class CltRow:
    ell: int
    eps: float
    v1: float
    v2: float
    var_total: float
    dw_bound: float
    tail_sum: float
    expected_area: float
    mean: float
    mean_se: float
    variance: float
    variance_se: float
    var_ratio: float
    skewness: float
    excess_kurtosis: float
    w1: float
    w1_se: float
    bias_budget: float
    admissible: bool
    extra: dict = field(default_factory=dict)


def clt_report(config: ExperimentConfig, samples=None, threads: int = 1):
    """Analytic decomposition next to empirical moments of the excursion area, per degree.

    ``bias_budget`` bounds the discretisation plus higher-chaos gap between
    the empirical and leading-order variance: chaoses 1 and 2 are integrated
    exactly on the grid and the mean is unbiased, so the gap is carried by
    q >= 3 and is at most the sum of the tail majorants.
    """
    if samples is None:
        samples = run_replicates(config, threads=threads)
    rows = []
    for ell in config.ell_list:
        spec = config.spec_for(ell)
        rep = build_report(ell, config.z, spec, cap_r=config.cap_r, threads=threads)
        areas = [s.area for s in samples if s.ell == ell]
        st = summarize(areas, bootstrap=config.w1_bootstrap, seed=config.master_seed)
        tails = rep.tail3 + rep.tail4 + rep.tail5plus if ell >= 2 else float("nan")
        rows.append(CltRow(
            ell=ell, eps=0.0 if spec is None else spec.eps, v1=rep.v1, v2=rep.v2, var_total=rep.var_total,
            dw_bound=rep.dw_bound, tail_sum=tails, expected_area=expected_area(config.cap_r, config.z),
            mean=st.mean, mean_se=st.mean_se, variance=st.variance, variance_se=st.variance_se,
            var_ratio=st.variance / rep.var_total if rep.var_total > 0 else float("nan"),
            skewness=st.skewness, excess_kurtosis=st.excess_kurtosis, w1=st.w1_to_normal, w1_se=st.w1_se,
            bias_budget=tails, admissible=rep.admissible,
            extra={"report": rep.as_dict(), "summary": asdict(st)},
        ))
    return rows
