"""Random laws and brute-force oracles shared by the tests.

.. codeauthor:: David Zwicker <david.zwicker@ds.mpg.de>
"""

from __future__ import annotations

import itertools
import math

import numpy as np

from tscatter.model import Sample, TConfig

__all__ = [
    "NU_VALUES",
    "four_point_sample",
    "random_config",
    "random_sample",
    "random_posdef",
    "brute_force_line_mass",
    "brute_force_subspace_mass",
    "grid_sample",
]

NU_VALUES = [1.5, 3.0, 8.0]
"""list: degrees of freedom used by randomized tests"""


def four_point_sample() -> Sample:
    """Uniform law on `(+-1, 0)` and `(0, +-1)`"""
    return Sample([[1, 0], [-1, 0], [0, 1], [0, -1]])


def random_config(rng: np.random.Generator, dim: int, **options) -> TConfig:
    """Configuration with randomly chosen degrees of freedom."""
    return TConfig(nu=float(rng.choice(NU_VALUES)), dim=dim, **options)


def random_sample(
    rng: np.random.Generator, dim: int | None = None, n: int | None = None
) -> Sample:
    """Gaussian points in general position with random weights.

    Such laws lie inside every existence domain since no subspace of dimension below
    `dim` contains more than `dim` atoms.
    """
    if dim is None:
        dim = int(rng.integers(1, 4))
    if n is None:
        n = int(rng.integers(8, 41))
    points = rng.standard_normal((n, dim))
    weights = rng.uniform(0.5, 1.5, size=n)
    return Sample(points, weights, normalize=True)


def random_posdef(rng: np.random.Generator, dim: int, eps: float = 0.1) -> np.ndarray:
    """Random positive definite matrix `G G' + eps I`"""
    mat = rng.standard_normal((dim, dim))
    return mat @ mat.T + eps * np.eye(dim)  # type: ignore


def brute_force_line_mass(sample: Sample) -> float:
    """Largest mass on an affine line in the plane from all pairs of atoms."""
    points, weights = sample.points, sample.weights
    best = float(weights.max())
    for i, j in itertools.combinations(range(sample.n), 2):
        direction = points[j] - points[i]
        if np.linalg.norm(direction) == 0:
            continue
        shifted = points - points[i]
        cross = shifted[:, 0] * direction[1] - shifted[:, 1] * direction[0]
        cross /= np.linalg.norm(direction)
        mask = np.abs(cross) < 1e-9 * (1 + np.linalg.norm(points, axis=1))
        best = max(best, math.fsum(weights[mask]))
    return best


def grid_sample(rng: np.random.Generator, dim: int, n: int) -> Sample:
    """Random weights on atoms of the grid `{-1, 0, 1}^dim`, which are often aligned."""
    points = rng.integers(-1, 2, size=(n, dim)).astype(float)
    return Sample(points, rng.uniform(0.1, 1, size=n), normalize=True)


def brute_force_subspace_mass(sample: Sample, q: int, *, affine: bool) -> float:
    """Largest mass on a subspace of dimension `q` from all subsets of atoms.

    A subset lies in an affine subspace of dimension `q` if its differences span at
    most `q` dimensions and in a linear one if the atoms themselves do.
    """
    points, weights = sample.points, sample.weights
    best = 0.0
    for size in range(1, sample.n + 1):
        for subset in itertools.combinations(range(sample.n), size):
            span = points[list(subset)]
            if affine:
                span = span - span[0]
            if np.linalg.matrix_rank(span, tol=1e-9) <= q:
                best = max(best, math.fsum(weights[list(subset)]))
    return best
