"""Gaussian random spherical eigenfunctions and their evaluation on caps."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .exceptions import ConfigurationError, DomainError
from .special import SphericalPoint, gauss_legendre, normalized_assoc_legendre


@dataclass(frozen=True)
class HarmonicCoefficients:
    """a_{l m} for m = 0..l; negative orders follow a_{l,-m} = (-1)^m conj(a_{l m})."""

    ell: int
    a: np.ndarray
    seed_tag: tuple

    def full(self):
        """All 2l+1 coefficients ordered m = -l..l."""
        m = np.arange(1, self.ell + 1)
        neg = ((-1.0) ** m * np.conj(self.a[1:]))[::-1]
        return np.concatenate([neg, self.a])


def replicate_rng(*key) -> np.random.Generator:
    """Counter-based stream keyed by integers, e.g. ``(master_seed, ell, i)``."""
    return np.random.Generator(np.random.Philox(np.random.SeedSequence([int(k) for k in key])))


def _draw(rng, ell, size=None):
    shape = (ell + 1,) if size is None else (size, ell + 1)
    z = rng.standard_normal(shape + (2,))
    a = (z[..., 0] + 1j * z[..., 1]) / math.sqrt(2.0)
    a[..., 0] = z[..., 0, 0]
    return a


def sample_coefficients(ell: int, rng_seed) -> HarmonicCoefficients:
    """One realization; ``rng_seed`` is an int or a tuple of ints keying the stream."""
    if ell < 1:
        raise DomainError("degree must be >= 1")
    key = tuple(rng_seed) if isinstance(rng_seed, (tuple, list)) else (int(rng_seed),)
    a = _draw(replicate_rng(*key), ell)
    a.setflags(write=False)
    return HarmonicCoefficients(ell=ell, a=a, seed_tag=key)


def _real_coefficients(ell, a):
    """Cosine / sine weights of the real assembly, normalization included."""
    norm = math.sqrt(4.0 * math.pi / (2 * ell + 1))
    mult = np.full(ell + 1, 2.0)
    mult[0] = 1.0
    return norm * mult * a.real, -norm * mult * a.imag


def evaluate(coeffs: HarmonicCoefficients, p: SphericalPoint) -> float:
    """T_l(p) = sqrt(4pi/(2l+1)) [a_0 Y_l0 + 2 sum_{m>=1} Re(a_m Y_lm)]."""
    ell = coeffs.ell
    plm = normalized_assoc_legendre(ell, np.array(math.cos(p.theta)))
    m = np.arange(ell + 1)
    c, s = _real_coefficients(ell, np.asarray(coeffs.a))
    return float(np.sum(plm * (c * np.cos(m * p.phi) + s * np.sin(m * p.phi))))


def resolution_floor(ell, cap_r):
    return math.ceil(5 * ell * cap_r / math.pi) + 8, 4 * ell + 8


def auto_resolution(ell, cap_r):
    """Smallest grid meeting the floor that also makes h_2 quadrature exact."""
    n_theta, n_phi = resolution_floor(ell, cap_r)
    return max(n_theta, ell + 1), n_phi


@dataclass(frozen=True)
class FieldGrid:
    thetas: np.ndarray
    weights: np.ndarray
    n_phi: int
    values: np.ndarray

    @property
    def phis(self):
        return 2.0 * math.pi * np.arange(self.n_phi) / self.n_phi

    @property
    def cell_weights(self):
        """Area weight of every (theta_i, phi_j) node."""
        return np.outer(self.weights, np.full(self.n_phi, 2.0 * math.pi / self.n_phi))


class CapGrid:
    """Precomputed lattice on a cap: Gauss-Legendre in cos(theta), uniform in phi.

    The normalized associated Legendre table and the phase tables are built
    once and shared by every realization evaluated on the grid.
    """

    @staticmethod
    def check_floor(ell, cap_r, n_theta, n_phi):
        if not 0.0 < cap_r <= math.pi:
            raise DomainError("cap radius must lie in (0, pi]")
        floor_theta, floor_phi = resolution_floor(ell, cap_r)
        if n_theta < floor_theta or n_phi < floor_phi:
            raise ConfigurationError(
                f"grid ({n_theta}, {n_phi}) below the resolution floor ({floor_theta}, {floor_phi}) for ell={ell}"
            )

    def __init__(self, ell, cap_r, n_theta, n_phi):
        self.check_floor(ell, cap_r, n_theta, n_phi)
        self.ell, self.cap_r, self.n_theta, self.n_phi = ell, cap_r, n_theta, n_phi
        mu, w = gauss_legendre(n_theta).scaled(math.cos(cap_r), 1.0)
        self.mu = mu
        self.thetas = np.arccos(mu)
        self.weights = w
        self.plm = normalized_assoc_legendre(ell, mu)
        phis = 2.0 * math.pi * np.arange(n_phi) / n_phi
        m = np.arange(ell + 1)
        self.phase = np.concatenate([np.cos(np.outer(m, phis)), np.sin(np.outer(m, phis))])
        self.dphi = 2.0 * math.pi / n_phi

    @property
    def area(self):
        return 2.0 * math.pi * (1.0 - math.cos(self.cap_r))

    def values(self, a):
        """Field values for one (l+1,) or a batch (B, l+1) of coefficient rows."""
        a = np.asarray(a)
        single = a.ndim == 1
        a = np.atleast_2d(a)
        c, s = _real_coefficients(self.ell, a)
        lhs = np.concatenate([c[:, None, :] * self.plm[None], s[:, None, :] * self.plm[None]], axis=2)
        out = lhs.reshape(-1, 2 * (self.ell + 1)) @ self.phase
        out = out.reshape(a.shape[0], self.n_theta, self.n_phi)
        return out[0] if single else out

    def integrate(self, values):
        """Cap integral of grid values (last two axes are theta, phi)."""
        return self.dphi * np.tensordot(values.sum(axis=-1), self.weights, axes=([-1], [0]))


def evaluate_cap_grid(coeffs: HarmonicCoefficients, cap_r, n_theta, n_phi) -> FieldGrid:
    grid = CapGrid(coeffs.ell, cap_r, n_theta, n_phi)
    return FieldGrid(thetas=grid.thetas, weights=grid.weights, n_phi=n_phi, values=grid.values(coeffs.a))
