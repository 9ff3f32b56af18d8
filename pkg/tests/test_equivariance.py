"""
.. codeauthor:: David Zwicker <david.zwicker@ds.mpg.de>
"""

import numpy as np
import pytest

from helpers import random_config, random_sample
from tscatter.equivariance import (
    AffineMap,
    affine_push,
    check_equivariance,
    covariance_discontinuity_sequence,
    covariance_singular_equivariance_check,
    mean_discontinuity_sequence,
    mean_singular_equivariance_check,
    random_affine_map,
    replication_check,
    sample_mean_cov,
)
from tscatter.errors import DimensionError
from tscatter.model import Sample, TConfig


def test_affine_map(rng):
    """Test the representation of affine maps."""
    f = AffineMap([[2, 0], [0, 1]], [1, -1])
    np.testing.assert_allclose(f([[1, 1]]), [[3, 0]])
    assert f.dim == 2
    assert not f.singular
    assert AffineMap([[1, 1], [1, 1]], [0, 0]).singular
    np.testing.assert_equal(AffineMap.identity(3)(np.ones((2, 3))), np.ones((2, 3)))

    with pytest.raises(DimensionError):
        AffineMap(np.eye(2), [0, 0, 0])
    with pytest.raises(ValueError):
        AffineMap([[np.inf]], [0])

    g = random_affine_map(3, rng)
    values = np.linalg.svd(g.A, compute_uv=False)
    assert np.all((values >= 0.5) & (values <= 2))
    assert random_affine_map(3, rng, singular=True).singular


def test_affine_push():
    """Test image laws, which merge coinciding atoms."""
    sample = Sample([[1, 0], [0, 1], [2, 2]])
    image = affine_push(sample, AffineMap([[1, 1], [1, 1]], [0, 0]))
    assert image.n == 2
    np.testing.assert_allclose(sorted(image.weights), [1 / 3, 2 / 3])

    # the zero matrix collapses every law onto the shift
    image = affine_push(sample, AffineMap(np.zeros((2, 2)), [1.5, -2]))
    assert image.n == 1
    np.testing.assert_equal(image.points, [[1.5, -2]])
    assert image.weights[0] == pytest.approx(1)

    with pytest.raises(DimensionError):
        affine_push(sample, AffineMap.identity(3))


def test_sample_mean_cov():
    """Test the moment oracles."""
    sample = Sample([[0, 0], [2, 0], [1, 3]], [0.25, 0.25, 0.5])
    mean, cov = sample_mean_cov(sample)
    np.testing.assert_allclose(mean, [1, 1.5])
    np.testing.assert_allclose(cov.data, [[0.5, 0], [0, 2.25]])


def test_location_scatter_equivariance(rng):
    """Test affine equivariance of the location-scatter functional."""
    for i in range(100):
        dim = 1 + i % 3
        sample = random_sample(rng, dim=dim)
        cfg = random_config(rng, dim)
        mu_defect, sigma_defect = check_equivariance(
            sample, cfg, random_affine_map(dim, rng)
        )
        assert mu_defect < 1e-8
        assert sigma_defect < 1e-8

    with pytest.raises(ValueError):
        check_equivariance(sample, cfg, random_affine_map(dim, rng, singular=True))


def test_singular_moment_equivariance(rng):
    """Test that mean and covariance commute with arbitrary linear maps."""
    sample = random_sample(rng, dim=3)
    for _ in range(3):
        matrix = rng.standard_normal((3, 3))
        matrix[:, 0] = 0
        assert covariance_singular_equivariance_check(sample, matrix) < 1e-12
        shift = rng.standard_normal(3)
        assert mean_singular_equivariance_check(sample, matrix, shift) < 1e-12


def test_replication():
    """Test that replicated data yields the identical fit."""
    points = np.random.default_rng(3).standard_normal((12, 2))
    for m in [1, 2, 5]:
        assert replication_check(points, m, TConfig(3, 2))
    with pytest.raises(ValueError):
        replication_check(points, 0, TConfig(3, 2))


def test_discontinuity_sequences():
    """Test that mean and covariance do not follow weak limits."""
    for n in [2, 10, 1000]:
        sample = mean_discontinuity_sequence(n)
        mean, _ = sample_mean_cov(sample)
        np.testing.assert_allclose(mean, [1])

    for n in [10, 100, 1000]:
        sample = covariance_discontinuity_sequence(n, dim=2)
        mean, cov = sample_mean_cov(sample)
        np.testing.assert_allclose(mean, 0, atol=1e-14)
        np.testing.assert_allclose(cov.data, [[2, 0], [0, 0]], atol=1e-12)

    with pytest.raises(ValueError):
        mean_discontinuity_sequence(1)
