"""Fixed-point solvers for the t scatter and location-scatter functionals.

The pure scatter functional of a law `Q` is the unique positive definite `B` solving
`B = sum_i w_i u(y_i' B^-1 y_i) y_i y_i'`. The location-scatter functional in `d`
dimensions is obtained from the pure scatter functional of the lifted law in `d + 1`
dimensions with one degree of freedom less.

.. autosummary::
   :nosignatures:

   SolveReport
   LocationScatterEstimate
   fixed_point_map
   fit_scatter
   fit_location_scatter
   fit_univariate
   verify_critical_point
   multistart_uniqueness_probe

.. codeauthor:: David Zwicker <david.zwicker@ds.mpg.de>
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Any

import numpy as np

from .domain import THRESHOLD_SLACK, in_U, in_V
from .errors import DimensionError, DomainViolation, NoConvergence, NotPositiveDefinite
from .model import Sample, TConfig, lift_sample, objective, u_weight, unembed
from .symmat import MatrixLike, PosDefMatrix, SymMatrix, as_posdef, sym_eigenvalues

_logger = logging.getLogger(__name__)

GAMMA_TOLERANCE = 1e-8
"""float: allowed deviation of the last diagonal entry of the lifted fit from one"""
COVARIANCE_REGULARIZATION = 1e-8
"""float: multiple of the trace added to the diagonal of a covariance start"""


@dataclass
class SolveReport:
    """Diagnostics of a fixed-point iteration."""

    converged: bool
    iterations: int
    fixed_point_residual: float
    gradient_norm: float
    objective_trace: list[float] = field(default_factory=list)
    condition_number_trace: list[float] = field(default_factory=list)
    min_eigenvalue_trace: list[float] = field(default_factory=list)

    def to_dict(self) -> dict[str, Any]:
        return {
            "converged": self.converged,
            "iterations": self.iterations,
            "fixed_point_residual": self.fixed_point_residual,
            "gradient_norm": self.gradient_norm,
            "objective_trace": self.objective_trace,
            "condition_number_trace": self.condition_number_trace,
            "min_eigenvalue_trace": self.min_eigenvalue_trace,
        }


@dataclass
class LocationScatterEstimate:
    """Location vector and scatter matrix of a law together with diagnostics.

    Attributes:
        mu (:class:`~numpy.ndarray`): the location
        sigma (:class:`~tscatter.symmat.SymMatrix`): the scatter matrix, which is a
            :class:`~tscatter.symmat.PosDefMatrix` unless the estimate is degenerate
        gamma_check (float): last diagonal entry of the lifted fit, ideally one
        weight_sum (float): `sum_i w_i u((y_i - mu)' S^-1 (y_i - mu))`, ideally one
        report (:class:`SolveReport`): diagnostics of the lifted iteration
        degenerate (bool): whether the scatter vanishes (one-dimensional extension)
        lifted (:class:`~tscatter.symmat.PosDefMatrix`): the lifted pure scatter fit
    """

    mu: np.ndarray
    sigma: SymMatrix
    gamma_check: float | None = None
    weight_sum: float | None = None
    report: SolveReport | None = None
    degenerate: bool = False
    lifted: PosDefMatrix | None = None

    @property
    def dim(self) -> int:
        return len(self.mu)

    def to_dict(self) -> dict[str, Any]:
        return {
            "mu": self.mu.tolist(),
            "sigma": self.sigma.data.tolist(),
            "gamma_check": self.gamma_check,
            "weight_sum": self.weight_sum,
            "degenerate": self.degenerate,
            "report": None if self.report is None else self.report.to_dict(),
        }


def fixed_point_map(sample: Sample, matrix: MatrixLike, cfg: TConfig) -> np.ndarray:
    """Evaluate `sum_i w_i u(y_i' B^-1 y_i) y_i y_i'` for the matrix `B`."""
    mat = as_posdef(matrix)
    if sample.dim != mat.dim:
        raise DimensionError("Sample and matrix dimensions differ")
    scales = u_weight(mat.quad_forms(sample.points), cfg)
    return sample.second_moment(scales)


def _fixed_point_residual(sample: Sample, matrix: PosDefMatrix, cfg: TConfig) -> float:
    return float(np.linalg.norm(matrix.data - fixed_point_map(sample, matrix, cfg)))


def verify_critical_point(
    sample: Sample, matrix: MatrixLike, cfg: TConfig
) -> tuple[float, float]:
    """Measure how far `matrix` is from the critical point of the objective.

    Returns:
        tuple: the Frobenius norm of the fixed-point residual and the Euclidean norm
        of the gradient of the objective with respect to the inverse matrix
    """
    from .calculus import gradient

    mat = as_posdef(matrix)
    grad = gradient(sample, mat, cfg)
    return _fixed_point_residual(sample, mat, cfg), float(np.linalg.norm(grad))


def _initial_matrix(sample: Sample, cfg: TConfig) -> PosDefMatrix:
    if cfg.init == "covariance":
        # second moment about the origin, which is the covariance start of the lift
        moment = sample.second_moment()
        reg = COVARIANCE_REGULARIZATION * max(float(np.trace(moment)), 1.0)
        return PosDefMatrix(moment + reg * np.eye(sample.dim))
    return PosDefMatrix(np.eye(sample.dim))


def fit_scatter(
    sample: Sample, cfg: TConfig, init: MatrixLike | None = None
) -> tuple[PosDefMatrix, SolveReport]:
    """Determine the pure scatter functional by fixed-point iteration.

    Args:
        sample (:class:`~tscatter.model.Sample`): the law Q
        cfg (:class:`~tscatter.model.TConfig`): model and solver settings
        init (optional): positive definite starting matrix, overriding `cfg.init`

    Returns:
        tuple: the scatter matrix and the :class:`SolveReport`

    Raises:
        :class:`~tscatter.errors.DomainViolation`: if the law violates the existence
        condition (only checked if `cfg.check_domain`)
        :class:`~tscatter.errors.NoConvergence`: if the iteration does not reach the
        fixed point
    """
    if sample.dim != cfg.dim:
        raise DimensionError(f"Sample dimension {sample.dim} differs from {cfg.dim}")
    if cfg.check_domain:
        domain = in_U(sample, cfg)
        if not domain.member:
            _logger.warning("Law violates the pure scatter existence condition")
            raise DomainViolation(
                "Law puts too much mass on a linear subspace", report=domain
            )

    current = _initial_matrix(sample, cfg) if init is None else as_posdef(init)
    if current.dim != cfg.dim:
        raise DimensionError("Initial matrix has the wrong dimension")

    report = SolveReport(
        converged=False,
        iterations=0,
        fixed_point_residual=math.inf,
        gradient_norm=math.inf,
    )

    def record(mat: PosDefMatrix) -> None:
        eigs = sym_eigenvalues(mat)
        report.objective_trace.append(objective(sample, mat, cfg))
        report.condition_number_trace.append(float(eigs[-1] / eigs[0]))
        report.min_eigenvalue_trace.append(float(eigs[0]))

    record(current)
    for iteration in range(1, cfg.max_iter + 1):
        try:
            update = PosDefMatrix(fixed_point_map(sample, current, cfg))
        except NotPositiveDefinite as err:
            report.iterations = iteration
            raise NoConvergence(
                f"Iterate lost positive definiteness in step {iteration}", report=report
            ) from err
        step = np.linalg.norm(update.data - current.data) / np.linalg.norm(current.data)
        current = update
        record(current)
        report.iterations = iteration
        if step < cfg.tol_step:
            break

    residual, grad_norm = verify_critical_point(sample, current, cfg)
    report.fixed_point_residual = residual
    report.gradient_norm = grad_norm
    scale = max(1.0, float(np.linalg.norm(current.data)))
    report.converged = bool(
        residual < cfg.tol_fp * scale and grad_norm < cfg.tol_grad * scale
    )
    _logger.debug(
        "Fixed-point iteration stopped after %d steps with residual %g",
        report.iterations,
        residual,
    )

    if not report.converged:
        if report.iterations >= cfg.max_iter:
            message = f"Fixed-point residual {residual:g} after {cfg.max_iter} iterations"
        else:
            message = (
                f"Iteration stalled after {report.iterations} steps with fixed-point "
                f"residual {residual:g} and gradient norm {grad_norm:g}"
            )
        _logger.warning(message)
        raise NoConvergence(message, report=report)
    return current, report


def fit_location_scatter(sample: Sample, cfg: TConfig) -> LocationScatterEstimate:
    """Determine the location-scatter functional of a law.

    The law is lifted by appending a unit coordinate, the pure scatter functional of
    the lifted law is determined with `nu - 1` degrees of freedom, and the result is
    split into location and scatter.

    Args:
        sample (:class:`~tscatter.model.Sample`): the law P
        cfg (:class:`~tscatter.model.TConfig`): model and solver settings, `nu > 1`

    Returns:
        :class:`LocationScatterEstimate`
    """
    cfg.require_location()
    if sample.dim != cfg.dim:
        raise DimensionError(f"Sample dimension {sample.dim} differs from {cfg.dim}")
    if cfg.check_domain:
        domain = in_V(sample, cfg)
        if not domain.member:
            _logger.warning("Law violates the location-scatter existence condition")
            raise DomainViolation(
                "Law puts too much mass on an affine subspace", report=domain
            )

    lifted_cfg = cfg.lifted().replace(check_domain=False)
    matrix, report = fit_scatter(lift_sample(sample), lifted_cfg)
    mu, sigma, gamma = unembed(matrix, cfg.dim)

    centered = sample.points - mu
    weights = u_weight(sigma.quad_forms(centered), cfg)
    weight_sum = math.fsum(sample.weights * weights)

    if abs(gamma - 1) > GAMMA_TOLERANCE:
        raise NoConvergence(
            f"Lifted fit has last diagonal entry {gamma!r} instead of 1", report=report
        )
    return LocationScatterEstimate(
        mu=mu,
        sigma=sigma,
        gamma_check=gamma,
        weight_sum=weight_sum,
        report=report,
        lifted=matrix,
    )


def fit_univariate(sample: Sample, cfg: TConfig) -> LocationScatterEstimate:
    """Location and scale of a law on the real line, defined for every law.

    If a single atom `x` carries mass of at least `nu / (nu + 1)`, the result is the
    degenerate estimate `(x, 0)`. Otherwise the regular location-scatter functional
    is returned.
    """
    cfg.require_location()
    if sample.dim != 1:
        raise DimensionError("Univariate fit requires one-dimensional data")
    merged, _ = sample.merged()
    threshold = cfg.nu / (cfg.nu + 1)
    heaviest = int(np.argmax(merged.weights))
    if merged.weights[heaviest] >= threshold - THRESHOLD_SLACK:
        _logger.info("Atom carries mass %g; scale vanishes", merged.weights[heaviest])
        return LocationScatterEstimate(
            mu=merged.points[heaviest].copy(),
            sigma=SymMatrix([[0.0]]),
            degenerate=True,
        )
    return fit_location_scatter(sample, cfg)


def multistart_uniqueness_probe(
    sample: Sample, cfg: TConfig, k: int = 10, seed: int | None = None
) -> bool:
    """Check that random starting matrices lead to the same fixed point.

    Args:
        sample (:class:`~tscatter.model.Sample`): the law Q
        cfg (:class:`~tscatter.model.TConfig`): model and solver settings
        k (int): number of starts, each of the form `G G' + 0.1 I` with Gaussian `G`
        seed (int): seed of the random starts

    Returns:
        bool: whether all solutions agree within `1e-6` in Frobenius norm
    """
    if k < 1:
        raise ValueError("Need at least one start")
    if cfg.check_domain:
        domain = in_U(sample, cfg)
        if not domain.member:
            raise DomainViolation("Law puts too much mass on a linear subspace", domain)
    cfg = cfg.replace(check_domain=False)

    rng = np.random.default_rng(seed)
    solutions = []
    for _ in range(k):
        mat = rng.standard_normal((cfg.dim, cfg.dim))
        init = mat @ mat.T + 0.1 * np.eye(cfg.dim)
        solutions.append(fit_scatter(sample, cfg, init=init)[0].data)

    scale = max(1.0, float(np.linalg.norm(solutions[0])))
    return all(np.linalg.norm(sol - solutions[0]) < 1e-6 * scale for sol in solutions)
