"""Affine maps, moment oracles and checks of equivariance properties.

.. autosummary::
   :nosignatures:

   AffineMap
   random_affine_map
   affine_push
   sample_mean_cov
   check_equivariance
   covariance_singular_equivariance_check
   mean_singular_equivariance_check
   replication_check
   mean_discontinuity_sequence
   covariance_discontinuity_sequence
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numpy.typing import ArrayLike

from .errors import DimensionError
from .model import Sample, TConfig
from .solver import fit_location_scatter
from .symmat import SymMatrix


@dataclass(frozen=True)
class AffineMap:
    """The map `x -> A x + v`, where `A` may be singular."""

    A: np.ndarray  # noqa: N815
    v: np.ndarray

    def __post_init__(self):
        matrix = np.atleast_2d(np.asarray(self.A, dtype=float))
        shift = np.atleast_1d(np.asarray(self.v, dtype=float))
        if matrix.shape != (len(shift), len(shift)):
            raise DimensionError("Affine map needs a square matrix matching the shift")
        if not (np.all(np.isfinite(matrix)) and np.all(np.isfinite(shift))):
            raise ValueError("Affine map must have finite entries")
        object.__setattr__(self, "A", matrix)
        object.__setattr__(self, "v", shift)

    @classmethod
    def identity(cls, dim: int) -> AffineMap:
        return cls(np.eye(dim), np.zeros(dim))

    @property
    def dim(self) -> int:
        return len(self.v)

    @property
    def singular(self) -> bool:
        """bool: whether the determinant vanishes relative to the matrix scale"""
        scale = max(1.0, float(np.abs(self.A).max())) ** self.dim
        return bool(abs(np.linalg.det(self.A)) < 1e-12 * scale)

    def __call__(self, points: ArrayLike) -> np.ndarray:
        return np.atleast_2d(np.asarray(points, dtype=float)) @ self.A.T + self.v  # type: ignore


def random_affine_map(
    dim: int, rng: np.random.Generator, singular: bool = False
) -> AffineMap:
    """Random affine map with singular values between 1/2 and 2.

    Args:
        dim (int): dimension
        rng (:class:`~numpy.random.Generator`): source of randomness
        singular (bool): set the smallest singular value to zero
    """
    left, _ = np.linalg.qr(rng.standard_normal((dim, dim)))
    right, _ = np.linalg.qr(rng.standard_normal((dim, dim)))
    values = rng.uniform(0.5, 2, size=dim)
    if singular:
        values[-1] = 0
    return AffineMap(left @ np.diag(values) @ right.T, rng.standard_normal(dim))


def affine_push(sample: Sample, f: AffineMap) -> Sample:
    """Image law of `sample` under `f`; coinciding images are merged."""
    if sample.dim != f.dim:
        raise DimensionError("Affine map and law have different dimensions")
    image = Sample(f(sample.points), sample.weights)
    return image.merged(1e-12)[0]


def sample_mean_cov(sample: Sample) -> tuple[np.ndarray, SymMatrix]:
    """Weighted mean and covariance, normalized by the total weight."""
    mean = sample.mean()
    centered = sample.points - mean
    cov = (centered * sample.weights[:, np.newaxis]).T @ centered
    return mean, SymMatrix(cov)


def check_equivariance(
    sample: Sample, cfg: TConfig, f: AffineMap
) -> tuple[float, float]:
    """Relative defects of the location-scatter functional under a nonsingular map.

    Returns:
        tuple: `|mu(fP) - (A mu(P) + v)| / (1 + |A mu(P) + v|)` and
        `|S(fP) - A S(P) A'|_F / |A S(P) A'|_F`
    """
    if f.singular:
        raise ValueError("Equivariance of the t functionals needs a nonsingular map")
    est = fit_location_scatter(sample, cfg)
    est_image = fit_location_scatter(affine_push(sample, f), cfg)
    mu_expected = f.A @ est.mu + f.v
    sigma_expected = f.A @ est.sigma.data @ f.A.T
    mu_defect = np.linalg.norm(est_image.mu - mu_expected)
    sigma_defect = np.linalg.norm(est_image.sigma.data - sigma_expected)
    return (
        float(mu_defect / (1 + np.linalg.norm(mu_expected))),
        float(sigma_defect / np.linalg.norm(sigma_expected)),
    )


def covariance_singular_equivariance_check(sample: Sample, matrix: ArrayLike) -> float:
    """Frobenius norm of `cov(B X) - B cov(X) B'` for an arbitrary matrix `B`."""
    mat = np.atleast_2d(np.asarray(matrix, dtype=float))
    _, cov = sample_mean_cov(sample)
    _, cov_image = sample_mean_cov(sample.transformed(mat))
    return float(np.linalg.norm(cov_image.data - mat @ cov.data @ mat.T))


def mean_singular_equivariance_check(
    sample: Sample, matrix: ArrayLike, shift: ArrayLike | None = None
) -> float:
    """Euclidean norm of `mean(B X + v) - (B mean(X) + v)` for an arbitrary `B`."""
    mat = np.atleast_2d(np.asarray(matrix, dtype=float))
    v = np.zeros(len(mat)) if shift is None else np.asarray(shift, dtype=float)
    image_mean = sample.transformed(mat, v).mean()
    return float(np.linalg.norm(image_mean - (mat @ sample.mean() + v)))


def replication_check(points: ArrayLike, m: int, cfg: TConfig) -> bool:
    """Whether repeating every data point `m` times leaves the fit unchanged.

    The comparison is exact, not up to a tolerance.
    """
    if m < 1:
        raise ValueError("Replication factor must be positive")
    data = np.atleast_2d(np.asarray(points, dtype=float))
    est = fit_location_scatter(Sample.from_points(data), cfg)
    est_rep = fit_location_scatter(Sample.from_points(np.tile(data, (m, 1))), cfg)
    return bool(
        np.array_equal(est.mu, est_rep.mu)
        and np.array_equal(est.sigma.data, est_rep.sigma.data)
    )


def mean_discontinuity_sequence(n: int, dim: int = 1) -> Sample:
    """Empirical law of `n` points, all at the origin except `n e_1`.

    The mean equals `e_1` for every `n` although the laws approach the point mass at
    the origin.
    """
    if n < 2:
        raise ValueError("Need at least two points")
    points = np.zeros((n, dim))
    points[0, 0] = n
    return Sample(points)


def covariance_discontinuity_sequence(n: int, dim: int = 1) -> Sample:
    """Empirical law of `n` points with `sqrt(n) e_1`, `-sqrt(n) e_1` and zeros.

    The covariance equals `2 e_1 e_1'` for every `n` although the laws approach the
    point mass at the origin.
    """
    if n < 2:
        raise ValueError("Need at least two points")
    points = np.zeros((n, dim))
    points[0, 0] = np.sqrt(n)
    points[1, 0] = -np.sqrt(n)
    return Sample(points)
