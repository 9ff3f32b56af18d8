"""Derivatives of the objective and influence functions of the t functionals.

The objective is parameterized by the entries `C_ij` (`i <= j`) of the inverse scatter
matrix `C = A^-1`. Its gradient is available in closed form, the Hessian is obtained
by central differences of the gradient, and influence functions follow from the
implicit function theorem applied to the critical point equation. Finite differences
along contamination paths provide an independent check.

.. autosummary::
   :nosignatures:

   InfluenceResult
   gradient
   point_gradients
   hessian
   scatter_influence
   scatter_influences
   unembed_jacobian
   influence
   implicit_influences
   finite_difference_influence
   compare_influence
   gateaux_path_check
   divided_difference_ratios
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Any, Sequence

import numpy as np
import scipy.linalg as la
from numpy.typing import ArrayLike

from .errors import DimensionError
from .model import Sample, TConfig, lift_sample, u_weight
from .solver import LocationScatterEstimate, fit_location_scatter, fit_scatter
from .symmat import MatrixLike, PosDefMatrix, SymMatrix, as_posdef, upper_indices

_logger = logging.getLogger(__name__)

HESSIAN_STEP = 1e-5
"""float: relative step of the central differences defining the Hessian"""
PROBE_STEPS = (1e-3, 1e-4)
"""tuple: contamination weights of the finite difference influence"""


@dataclass
class InfluenceResult:
    """Derivative of location and scatter in the direction of a point mass."""

    d_mu: np.ndarray
    d_sigma: np.ndarray
    method: str

    def flatten(self) -> np.ndarray:
        """Coordinates `(d_mu, upper triangle of d_sigma)` as a single vector."""
        dim = len(self.d_mu)
        return np.concatenate([self.d_mu, self.d_sigma[upper_indices(dim)]])

    def to_dict(self) -> dict[str, Any]:
        return {
            "method": self.method,
            "d_mu": self.d_mu.tolist(),
            "d_sigma": self.d_sigma.tolist(),
        }


def _diagonal_factors(dim: int) -> np.ndarray:
    """The factors `1 / (1 + delta_ij)` in parameter order."""
    factors = np.where(np.eye(dim, dtype=bool), 0.5, 1.0)
    return factors[upper_indices(dim)]  # type: ignore


def _gradient_at(
    sample: Sample, a_data: np.ndarray, c_data: np.ndarray, cfg: TConfig
) -> np.ndarray:
    quad = np.einsum("ij,jk,ik->i", sample.points, c_data, sample.points)
    moment = sample.second_moment(u_weight(np.maximum(quad, 0), cfg))
    diff = moment - math.fsum(sample.weights) * a_data
    return diff[upper_indices(len(a_data))] * _diagonal_factors(len(a_data))  # type: ignore


def gradient(sample: Sample, matrix: MatrixLike, cfg: TConfig) -> np.ndarray:
    """Gradient of the objective with respect to the entries of `C = A^-1`.

    The entry belonging to the pair `i <= j` equals
    `sum_k w_k [-A_ij + (nu + d) y_i y_j / (nu + y' C y)] / (1 + delta_ij)` with `y`
    running over the atoms `y_k`.

    Args:
        sample (:class:`~tscatter.model.Sample`): the law Q
        matrix: positive definite matrix A
        cfg (:class:`~tscatter.model.TConfig`): model parameters

    Returns:
        :class:`~numpy.ndarray`: vector of length `d (d + 1) / 2`
    """
    mat = as_posdef(matrix)
    if sample.dim != mat.dim:
        raise DimensionError("Sample and matrix dimensions differ")
    return _gradient_at(sample, mat.data, mat.inverse(), cfg)


def point_gradients(points: ArrayLike, matrix: MatrixLike, cfg: TConfig) -> np.ndarray:
    """Gradient contributions of single points, one row per point."""
    mat = as_posdef(matrix)
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    scales = u_weight(mat.quad_forms(pts), cfg)
    idx = upper_indices(mat.dim)
    factors = _diagonal_factors(mat.dim)
    outer = np.einsum("ni,nj->nij", pts, pts) * np.reshape(scales, (-1, 1, 1))
    return (outer - mat.data)[:, idx[0], idx[1]] * factors  # type: ignore


def hessian(sample: Sample, matrix: MatrixLike, cfg: TConfig) -> np.ndarray:
    """Hessian of the objective with respect to the entries of `C = A^-1`.

    Each column is the central difference of the analytic gradient with step
    `1e-5 (1 + |C_kl|)`. The result is symmetrized.
    """
    mat = as_posdef(matrix)
    c_data = mat.inverse()
    rows, cols = upper_indices(mat.dim)
    result = np.empty((len(rows), len(rows)))
    for m, (k, l) in enumerate(zip(rows, cols)):
        step = HESSIAN_STEP * (1 + abs(c_data[k, l]))
        direction = np.zeros_like(c_data)
        direction[k, l] = direction[l, k] = 1
        grads = []
        for sign in [1, -1]:
            c_shift = c_data + sign * step * direction
            a_shift = PosDefMatrix(c_shift).inverse()
            grads.append(_gradient_at(sample, a_shift, c_shift, cfg))
        result[:, m] = (grads[0] - grads[1]) / (2 * step)
    return 0.5 * (result + result.T)  # type: ignore


def scatter_influences(
    sample: Sample, cfg: TConfig, points: ArrayLike, matrix: MatrixLike | None = None
) -> np.ndarray:
    """Influence of point masses on the pure scatter functional.

    Returns:
        :class:`~numpy.ndarray`: array of shape (m, d, d) for m points
    """
    matrix = fit_scatter(sample, cfg)[0] if matrix is None else as_posdef(matrix)
    points = np.atleast_2d(np.asarray(points, dtype=float))
    hess = hessian(sample, matrix, cfg)
    grads = point_gradients(points, matrix, cfg) - gradient(sample, matrix, cfg)
    d_inverse = -la.solve(hess, grads.T, assume_a="sym").T
    result = np.empty((len(points), matrix.dim, matrix.dim))
    for i, values in enumerate(d_inverse):
        d_c = SymMatrix.from_upper(values, matrix.dim).data
        result[i] = -matrix.data @ d_c @ matrix.data
        result[i] = 0.5 * (result[i] + result[i].T)
    return result


def scatter_influence(
    sample: Sample, cfg: TConfig, z: ArrayLike, matrix: MatrixLike | None = None
) -> SymMatrix:
    """Influence function of the pure scatter functional at the point `z`.

    Args:
        sample (:class:`~tscatter.model.Sample`): the law Q
        cfg (:class:`~tscatter.model.TConfig`): model parameters
        z (array-like): the contaminating point
        matrix (optional): the scatter functional of Q if it is known already

    Returns:
        :class:`~tscatter.symmat.SymMatrix`: derivative of the scatter matrix
    """
    return SymMatrix(scatter_influences(sample, cfg, [z], matrix)[0])


def unembed_jacobian(
    matrix: MatrixLike, d_matrix: ArrayLike, dim: int
) -> tuple[np.ndarray, np.ndarray]:
    """Directional derivative of the map from `A` to `(mu, sigma)`.

    Args:
        matrix: the lifted matrix A of size `dim + 1`
        d_matrix: the direction dA
        dim (int): the dimension `d`

    Returns:
        tuple: the derivatives of location and scatter
    """
    a_data = np.asarray(matrix.data if isinstance(matrix, SymMatrix) else matrix)
    d_a = np.asarray(d_matrix.data if isinstance(d_matrix, SymMatrix) else d_matrix)
    if a_data.shape != (dim + 1, dim + 1) or d_a.shape != a_data.shape:
        raise DimensionError(f"Expected matrices of size {dim + 1}")
    gamma, d_gamma = a_data[dim, dim], d_a[dim, dim]
    mu = a_data[:dim, dim] / gamma
    d_mu = d_a[:dim, dim] / gamma - mu * d_gamma / gamma
    d_sigma = (
        d_a[:dim, :dim] / gamma
        - a_data[:dim, :dim] * d_gamma / gamma**2
        - np.outer(d_mu, mu)
        - np.outer(mu, d_mu)
    )
    return d_mu, 0.5 * (d_sigma + d_sigma.T)


def _location_fit(
    sample: Sample, cfg: TConfig, estimate: LocationScatterEstimate | None
) -> LocationScatterEstimate:
    if estimate is None:
        estimate = fit_location_scatter(sample, cfg)
    if estimate.lifted is None:
        raise ValueError("Influence functions require a non-degenerate estimate")
    return estimate


def implicit_influences(
    sample: Sample,
    cfg: TConfig,
    points: ArrayLike,
    estimate: LocationScatterEstimate | None = None,
) -> list[InfluenceResult]:
    """Influence functions at several points, sharing one Hessian.

    Args:
        sample (:class:`~tscatter.model.Sample`): the law P
        cfg (:class:`~tscatter.model.TConfig`): model parameters
        points (array-like): the contaminating points, one per row
        estimate (:class:`~tscatter.solver.LocationScatterEstimate`, optional):
            the fit of P if it is known already
    """
    estimate = _location_fit(sample, cfg, estimate)
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    if pts.shape[1] != cfg.dim:
        raise DimensionError("Points have the wrong dimension")
    lifted_points = np.hstack([pts, np.ones((len(pts), 1))])
    d_lifted = scatter_influences(
        lift_sample(sample), cfg.lifted(), lifted_points, estimate.lifted
    )
    results = []
    for d_a in d_lifted:
        d_mu, d_sigma = unembed_jacobian(estimate.lifted, d_a, cfg.dim)  # type: ignore
        results.append(InfluenceResult(d_mu, d_sigma, "implicit"))
    return results


def _flatten(estimate: LocationScatterEstimate) -> np.ndarray:
    return np.concatenate([estimate.mu, estimate.sigma.upper()])


def finite_difference_influence(
    sample: Sample,
    cfg: TConfig,
    x: ArrayLike,
    estimate: LocationScatterEstimate | None = None,
    steps: Sequence[float] = PROBE_STEPS,
) -> InfluenceResult:
    """Influence function from the contaminated laws `(1 - t) P + t delta_x`.

    The difference quotients at the two weights in `steps` are combined by Richardson
    extrapolation, which removes the error term linear in `t`.
    """
    estimate = _location_fit(sample, cfg, estimate)
    reference = _flatten(estimate)
    contamination = Sample.point_mass(x)
    quotients = []
    for t in steps:
        fit = fit_location_scatter(sample.mixture(contamination, t), cfg)
        quotients.append((_flatten(fit) - reference) / t)
    ratio = steps[0] / steps[1]
    values = (ratio * quotients[1] - quotients[0]) / (ratio - 1)

    dim = cfg.dim
    d_sigma = SymMatrix.from_upper(values[dim:], dim).data
    return InfluenceResult(values[:dim], np.array(d_sigma), "finite-difference")


def influence(
    sample: Sample,
    cfg: TConfig,
    x: ArrayLike,
    *,
    method: str = "implicit",
    estimate: LocationScatterEstimate | None = None,
) -> InfluenceResult:
    """Influence function of the location-scatter functional at the point `x`.

    Args:
        sample (:class:`~tscatter.model.Sample`): the law P
        cfg (:class:`~tscatter.model.TConfig`): model parameters
        x (array-like): the contaminating point
        method (str): either `implicit` or `finite-difference`
        estimate (optional): the fit of P if it is known already
    """
    if method == "implicit":
        return implicit_influences(sample, cfg, [x], estimate)[0]
    elif method == "finite-difference":
        return finite_difference_influence(sample, cfg, x, estimate)
    else:
        raise ValueError(f"Unknown method `{method}`")


def relative_difference(first: InfluenceResult, second: InfluenceResult) -> float:
    """Norm of the difference relative to the larger of the two norms."""
    a, b = first.flatten(), second.flatten()
    scale = max(np.linalg.norm(a), np.linalg.norm(b), 1e-12)
    return float(np.linalg.norm(a - b) / scale)


def compare_influence(
    sample: Sample, cfg: TConfig, x: ArrayLike
) -> tuple[InfluenceResult, InfluenceResult, float]:
    """Both influence functions at `x` and their relative difference."""
    estimate = fit_location_scatter(sample, cfg)
    implicit = influence(sample, cfg, x, estimate=estimate)
    finite = influence(sample, cfg, x, method="finite-difference", estimate=estimate)
    return implicit, finite, relative_difference(implicit, finite)


def gateaux_path_check(
    sample: Sample, other: Sample, cfg: TConfig, t_list: Sequence[float]
) -> list[tuple[float, LocationScatterEstimate]]:
    """Location-scatter functional along the segment `(1 - t) P + t P2`."""
    return [
        (float(t), fit_location_scatter(sample.mixture(other, t), cfg)) for t in t_list
    ]


def divided_difference_ratios(
    sample: Sample,
    other: Sample,
    cfg: TConfig,
    t: float = 0.5,
    h: float = 0.1,
    levels: int = 3,
) -> np.ndarray:
    """Convergence ratios of central differences along the mixture path.

    Central differences with steps `h, h/2, ..., h/2^levels` are formed at `t`. For a
    smooth path, successive changes between them shrink by a factor close to four.

    Returns:
        :class:`~numpy.ndarray`: the `levels - 1` ratios of successive changes
    """
    if levels < 2:
        raise ValueError("Need at least two levels")
    if t - h < 0 or t + h > 1:
        raise ValueError("Steps leave the segment [0, 1]")
    steps = [h / 2**k for k in range(levels + 1)]
    ts = sorted({t} | {t + s for s in steps} | {t - s for s in steps})
    path = gateaux_path_check(sample, other, cfg, ts)
    values = {tt: _flatten(est) for tt, est in path}
    central = [(values[t + s] - values[t - s]) / (2 * s) for s in steps]
    changes = [np.linalg.norm(a - b) for a, b in zip(central[:-1], central[1:])]
    ratios = np.array([a / b for a, b in zip(changes[:-1], changes[1:])])
    _logger.debug("Divided difference ratios: %s", ratios)
    return ratios
