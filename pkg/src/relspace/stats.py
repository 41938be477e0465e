"""Cylindrical distribution (bivariate Gaussian x von Mises) with batch and
incremental maximum-likelihood estimation.

The distribution factorizes: (r, h) follow a joint Gaussian, the azimuth phi
follows a von Mises distribution. Batch estimators work on full sample sets;
the accumulators implement the streaming recurrences (running mean/scatter for
the Gaussian, direction-vector sum for the von Mises) and yield the same
parameters as the batch path.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np
from scipy.special import i0e, i1e

from .errors import DegenerateDirections, EmptyAccumulator, InsufficientSamples
from .geometry import CylCoords, wrap_angle

KAPPA_MAX = 1e4
COV_REGULARIZATION = 1e-12
TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class Gaussian2D:
    """Bivariate normal over normalized (radius, height).

    Parameters
    ----------
    mean : ndarray, shape (2,)
    covariance : ndarray, shape (2, 2)
        Symmetric with eigenvalues >= the regularization floor.
    """

    mean: np.ndarray
    covariance: np.ndarray

    def __post_init__(self):
        mean = np.asarray(self.mean, dtype=float).reshape(2)
        cov = np.asarray(self.covariance, dtype=float).reshape(2, 2)
        object.__setattr__(self, "mean", mean)
        object.__setattr__(self, "covariance", cov)
        if abs(cov[0, 1] - cov[1, 0]) > 1e-12:
            raise ValueError("covariance must be symmetric")
        # 2x2 PSD check via trace/determinant
        det = cov[0, 0] * cov[1, 1] - cov[0, 1] * cov[1, 0]
        if det <= 0 or cov[0, 0] <= 0 or cov[1, 1] <= 0:
            raise ValueError("covariance must be positive definite")

    def pdf(self, x: Sequence[float]) -> float:
        d = np.asarray(x, dtype=float) - self.mean
        a, b, c = self.covariance[0, 0], self.covariance[0, 1], self.covariance[1, 1]
        det = a * c - b * b
        quad = (c * d[0] * d[0] - 2.0 * b * d[0] * d[1] + a * d[1] * d[1]) / det
        return math.exp(-0.5 * quad) / (TWO_PI * math.sqrt(det))


@dataclass(frozen=True)
class VonMises:
    """Circular distribution with mean angle mu and concentration kappa.

    kappa = 0 is the uniform distribution on the circle; kappa is capped at
    ``KAPPA_MAX`` to keep the density and the sampler finite.
    """

    mean_angle: float
    concentration: float

    def __post_init__(self):
        if not -math.pi <= self.mean_angle <= math.pi:
            raise ValueError("mean_angle must be in [-pi, pi]")
        if not 0.0 <= self.concentration <= KAPPA_MAX:
            raise ValueError(f"concentration must be in [0, {KAPPA_MAX}]")

    def pdf(self, phi: float) -> float:
        # exp(k*cos(d))/(2*pi*I0(k)) computed with the scaled Bessel function
        # i0e(k) = exp(-k)*I0(k), so the density stays finite for large kappa.
        k = self.concentration
        return math.exp(k * (math.cos(phi - self.mean_angle) - 1.0)) / (TWO_PI * i0e(k))


@dataclass(frozen=True)
class CylindricalDistribution:
    """Product distribution over (r, h) x phi used as a placement model."""

    rh: Gaussian2D
    phi: VonMises

    def pdf(self, c: CylCoords) -> float:
        return self.rh.pdf((c.r, c.h)) * self.phi.pdf(c.phi)

    def pdf_many(self, coords: np.ndarray) -> np.ndarray:
        """Vectorized density for an (n, 3) array of (r, phi, h) rows."""
        coords = np.asarray(coords, dtype=float)
        d0 = coords[:, 0] - self.rh.mean[0]
        d1 = coords[:, 2] - self.rh.mean[1]
        cov = self.rh.covariance
        a, b, cc = cov[0, 0], cov[0, 1], cov[1, 1]
        det = a * cc - b * b
        quad = (cc * d0 * d0 - 2.0 * b * d0 * d1 + a * d1 * d1) / det
        gauss = np.exp(-0.5 * quad) / (TWO_PI * math.sqrt(det))
        k = self.phi.concentration
        vm = np.exp(k * (np.cos(coords[:, 1] - self.phi.mean_angle) - 1.0)) / (TWO_PI * i0e(k))
        return gauss * vm

    def sample(self, rng: np.random.Generator, size: int | None = None):
        """Draw samples; (r, h) via Cholesky of the covariance, phi via the
        Best-Fisher von Mises sampler. The radius is clamped at zero.

        Returns a single :class:`CylCoords` if size is None, else an (n, 3)
        array of (r, phi, h) rows.
        """
        n = 1 if size is None else int(size)
        chol = np.linalg.cholesky(self.rh.covariance)
        rh = self.rh.mean + rng.standard_normal((n, 2)) @ chol.T
        phi = rng.vonmises(self.phi.mean_angle, self.phi.concentration, size=n)
        out = np.column_stack([np.maximum(rh[:, 0], 0.0), phi, rh[:, 1]])
        if size is None:
            return CylCoords(float(out[0, 0]), wrap_angle(float(out[0, 1])), float(out[0, 2]))
        return out


def bessel_ratio(kappa: float) -> float:
    """A_2(kappa) = I1(kappa)/I0(kappa), evaluated with scaled Bessels."""
    if kappa <= 0.0:
        return 0.0
    return float(i1e(kappa) / i0e(kappa))


def solve_concentration(r_bar: float) -> float:
    """Invert A_2(kappa) = r_bar for the von Mises concentration.

    Uses the closed-form start kappa0 = r_bar*(2 - r_bar^2)/(1 - r_bar^2)
    followed by Newton steps on A_2(kappa) - r_bar; the result is capped at
    ``KAPPA_MAX``.
    """
    if r_bar <= 0.0:
        return 0.0
    if r_bar >= 1.0:
        return KAPPA_MAX
    kappa = r_bar * (2.0 - r_bar * r_bar) / (1.0 - r_bar * r_bar)
    if kappa >= KAPPA_MAX:
        return KAPPA_MAX
    for _ in range(8):
        a = bessel_ratio(kappa)
        f = a - r_bar
        if abs(f) < 1e-14:
            break
        # dA/dk = 1 - A^2 - A/k, strictly positive on (0, inf)
        deriv = 1.0 - a * a - a / kappa
        if deriv <= 0.0:
            break
        kappa -= f / deriv
        if kappa <= 0.0:
            kappa = 1e-12
        if kappa >= KAPPA_MAX:
            return KAPPA_MAX
    return kappa


def mle_gaussian(samples: Iterable[Sequence[float]]) -> Gaussian2D:
    """Batch MLE of the bivariate Gaussian (1/n covariance normalization).

    Parameters
    ----------
    samples : iterable of (r, h) pairs, n >= 2

    Raises
    ------
    InsufficientSamples
        If fewer than two samples are given.
    """
    x = np.asarray(list(samples), dtype=float)
    if x.ndim != 2 or x.shape[0] < 2 or x.shape[1] != 2:
        raise InsufficientSamples("need at least two 2-vectors")
    mean = x.mean(axis=0)
    d = x - mean
    cov = d.T @ d / x.shape[0] + COV_REGULARIZATION * np.eye(2)
    return Gaussian2D(mean, cov)


def mle_vonmises(angles: Iterable[float]) -> VonMises:
    """Batch MLE of the von Mises distribution.

    The mean angle is the direction of the summed unit vectors; the
    concentration solves A_2(kappa) = r_bar.

    Raises
    ------
    InsufficientSamples
        If fewer than two angles are given.
    DegenerateDirections
        If the direction vectors cancel (no mean direction exists).
    """
    phis = np.asarray(list(angles), dtype=float)
    if phis.size < 2:
        raise InsufficientSamples("need at least two angles")
    sx = float(np.cos(phis).sum())
    sy = float(np.sin(phis).sum())
    return _vonmises_from_sum(sx, sy, phis.size)


def _vonmises_from_sum(sx: float, sy: float, n: int) -> VonMises:
    norm = math.hypot(sx, sy)
    if norm <= 1e-9:
        raise DegenerateDirections("direction vectors cancel; mean angle undefined")
    mu = math.atan2(sy, sx)
    r_bar = min(norm / n, 1.0)
    return VonMises(mu, solve_concentration(r_bar))


class GaussianAccumulator:
    """Streaming mean and scatter matrix for 2-vectors.

    Implements the running recurrences
    ``mean_n = ((n-1)/n) * mean_{n-1} + x_n / n`` and
    ``scatter_n = scatter_{n-1} + ((n-1)/n) * d d^T`` with
    ``d = x_n - mean_{n-1}``; the MLE covariance is ``scatter_n / n``.
    State is stored as plain floats so million-sample streams stay cheap.
    """

    __slots__ = ("n", "_m0", "_m1", "_s00", "_s01", "_s11")

    def __init__(self):
        self.n = 0
        self._m0 = 0.0
        self._m1 = 0.0
        self._s00 = 0.0
        self._s01 = 0.0
        self._s11 = 0.0

    def add(self, x: Sequence[float]) -> "GaussianAccumulator":
        x0, x1 = float(x[0]), float(x[1])
        n1 = self.n
        n = n1 + 1
        d0 = x0 - self._m0
        d1 = x1 - self._m1
        w = n1 / n
        self._s00 += w * d0 * d0
        self._s01 += w * d0 * d1
        self._s11 += w * d1 * d1
        self._m0 = w * self._m0 + x0 / n
        self._m1 = w * self._m1 + x1 / n
        self.n = n
        return self

    @property
    def mean(self) -> np.ndarray:
        return np.array([self._m0, self._m1])

    @property
    def m2(self) -> np.ndarray:
        return np.array([[self._s00, self._s01], [self._s01, self._s11]])

    def gaussian(self) -> Gaussian2D:
        if self.n == 0:
            raise EmptyAccumulator("no samples accumulated")
        cov = self.m2 / self.n + COV_REGULARIZATION * np.eye(2)
        return Gaussian2D(self.mean, cov)

    def state(self) -> dict:
        return {
            "n": self.n,
            "mean": [self._m0, self._m1],
            "m2": [[self._s00, self._s01], [self._s01, self._s11]],
        }

    @classmethod
    def from_state(cls, d: dict) -> "GaussianAccumulator":
        acc = cls()
        acc.n = int(d["n"])
        acc._m0, acc._m1 = (float(v) for v in d["mean"])
        acc._s00, acc._s01 = (float(v) for v in d["m2"][0])
        acc._s11 = float(d["m2"][1][1])
        return acc


class VonMisesAccumulator:
    """Streaming sum of unit direction vectors for angles."""

    __slots__ = ("n", "_sx", "_sy")

    def __init__(self):
        self.n = 0
        self._sx = 0.0
        self._sy = 0.0

    def add(self, phi: float) -> "VonMisesAccumulator":
        self._sx += math.cos(phi)
        self._sy += math.sin(phi)
        self.n += 1
        return self

    @property
    def direction_sum(self) -> np.ndarray:
        return np.array([self._sx, self._sy])

    def vonmises(self) -> VonMises:
        if self.n == 0:
            raise EmptyAccumulator("no samples accumulated")
        return _vonmises_from_sum(self._sx, self._sy, self.n)

    def state(self) -> dict:
        return {"n": self.n, "direction_sum": [self._sx, self._sy]}

    @classmethod
    def from_state(cls, d: dict) -> "VonMisesAccumulator":
        acc = cls()
        acc.n = int(d["n"])
        acc._sx, acc._sy = (float(v) for v in d["direction_sum"])
        return acc


def accumulate_gaussian(acc: GaussianAccumulator, x: Sequence[float]) -> GaussianAccumulator:
    """Feed one (r, h) sample into the running Gaussian estimate."""
    return acc.add(x)


def accumulate_vonmises(acc: VonMisesAccumulator, phi: float) -> VonMisesAccumulator:
    """Feed one angle into the running direction sum."""
    return acc.add(phi)


def finalize(g: GaussianAccumulator, v: VonMisesAccumulator) -> CylindricalDistribution:
    """Turn accumulator state into a cylindrical distribution.

    Raises
    ------
    EmptyAccumulator
        If no samples were accumulated.
    DegenerateDirections
        If the summed directions cancel.
    """
    if g.n == 0 or v.n == 0:
        raise EmptyAccumulator("no samples accumulated")
    if g.n != v.n:
        raise ValueError(f"accumulator counts differ: {g.n} vs {v.n}")
    return CylindricalDistribution(g.gaussian(), v.vonmises())


# -- persistence record (shared with the memory module) ----------------------

def distribution_to_dict(dist: CylindricalDistribution) -> dict:
    return {
        "mu_rh": [float(dist.rh.mean[0]), float(dist.rh.mean[1])],
        "sigma_rh": [[float(v) for v in row] for row in dist.rh.covariance],
        "mu_phi": dist.phi.mean_angle,
        "kappa_phi": dist.phi.concentration,
    }


def distribution_from_dict(d: dict) -> CylindricalDistribution:
    return CylindricalDistribution(
        Gaussian2D(np.array(d["mu_rh"], dtype=float), np.array(d["sigma_rh"], dtype=float)),
        VonMises(float(d["mu_phi"]), float(d["kappa_phi"])),
    )
