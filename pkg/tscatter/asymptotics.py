"""Monte-Carlo checks of the large sample behavior of the t functionals.

.. autosummary::
   :nosignatures:

   McReport
   mc_normality
   sandwich_covariance
   GcDiagnostic
   gc_diagnostic
"""

from __future__ import annotations

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Any, Sequence

import numpy as np
import scipy.stats
from tqdm.auto import tqdm

from .calculus import implicit_influences, scatter_influences
from .config import config, thread_count
from .domain import in_U, in_V, in_W, tail_condition
from .errors import DomainViolation, NoConvergence
from .model import Sample, TConfig, location_scatter_objective
from .solver import fit_location_scatter, fit_scatter
from .symmat import PosDefMatrix, as_posdef, upper_indices

_logger = logging.getLogger(__name__)

FUNCTIONALS = ["location-scatter", "scatter"]
"""list: the functionals that can be simulated"""


def coordinate_names(dim: int, functional: str = "location-scatter") -> list[str]:
    """Names of the coordinates used to flatten an estimate."""
    rows, cols = upper_indices(dim)
    if functional == "location-scatter":
        names = [f"mu_{i + 1}" for i in range(dim)]
        return names + [f"sigma_{i + 1}{j + 1}" for i, j in zip(rows, cols)]
    elif functional == "scatter":
        return [f"A_{i + 1}{j + 1}" for i, j in zip(rows, cols)]
    else:
        raise ValueError(f"Unknown functional `{functional}`")


def _evaluate(sample: Sample, cfg: TConfig, functional: str) -> np.ndarray:
    """Flattened value of the functional, the domain is not checked."""
    cfg = cfg.replace(check_domain=False)
    if functional == "scatter":
        return fit_scatter(sample, cfg)[0].upper()
    est = fit_location_scatter(sample, cfg)
    return np.concatenate([est.mu, est.sigma.upper()])


def _in_domain(sample: Sample, cfg: TConfig, functional: str) -> bool:
    if functional == "scatter":
        return in_U(sample, cfg).member
    return in_V(sample, cfg).member


@dataclass
class McReport:
    """Summary of simulated estimation errors scaled by the square root of `n`.

    Attributes:
        n (int): sample size of each replicate
        R (int): number of replicates drawn
        functional (str): `location-scatter` or `scatter`
        coordinates (list): names of the columns of `scaled_errors`
        scaled_errors (:class:`~numpy.ndarray`): one row per successful replicate
        domain_hit_rate (float): fraction of draws inside the existence domain
        excluded (int): replicates dropped because of domain or solver failures
    """

    n: int
    R: int  # noqa: N815
    seed: int
    functional: str
    coordinates: list[str]
    scaled_errors: np.ndarray
    domain_hit_rate: float
    excluded: int
    reference: np.ndarray
    uniformity_flag: bool | None = None
    mean_vector: np.ndarray = field(init=False)
    covariance_matrix: np.ndarray | None = field(init=False)
    standard_errors: np.ndarray | None = field(init=False)
    skewness: np.ndarray | None = field(init=False)
    excess_kurtosis: np.ndarray | None = field(init=False)

    def __post_init__(self):
        errors = self.scaled_errors
        num = len(errors)
        if num == 0:
            self.mean_vector = np.full(len(self.coordinates), np.nan)
        else:
            self.mean_vector = errors.mean(axis=0)
        if num < 2:
            self.covariance_matrix = self.standard_errors = None
            self.skewness = self.excess_kurtosis = None
        else:
            self.covariance_matrix = np.atleast_2d(np.cov(errors, rowvar=False))
            self.standard_errors = np.sqrt(np.diag(self.covariance_matrix) / num)
            self.skewness = scipy.stats.skew(errors, axis=0)
            self.excess_kurtosis = scipy.stats.kurtosis(errors, axis=0, fisher=True)

    def within_standard_errors(self, factor: float = 3) -> np.ndarray:
        """Whether each mean lies within `factor` standard errors of zero."""
        if self.standard_errors is None:
            raise ValueError("Need at least two replicates")
        return np.abs(self.mean_vector) <= factor * self.standard_errors  # type: ignore

    def to_dict(self) -> dict[str, Any]:
        def listed(arr):
            return None if arr is None else np.asarray(arr).tolist()

        return {
            "n": self.n,
            "R": self.R,
            "seed": self.seed,
            "functional": self.functional,
            "coordinates": self.coordinates,
            "reference": listed(self.reference),
            "domain_hit_rate": self.domain_hit_rate,
            "excluded": self.excluded,
            "uniformity_flag": self.uniformity_flag,
            "mean_vector": listed(self.mean_vector),
            "covariance_matrix": listed(self.covariance_matrix),
            "standard_errors": listed(self.standard_errors),
            "skewness": listed(self.skewness),
            "excess_kurtosis": listed(self.excess_kurtosis),
        }

    def to_dataframe(self):
        """Per-coordinate summary as a :class:`pandas.DataFrame`."""
        import pandas as pd

        data: dict[str, Any] = {
            "coordinate": self.coordinates,
            "mean": self.mean_vector,
        }
        if self.standard_errors is not None:
            data["standard_error"] = self.standard_errors
            data["skewness"] = self.skewness
            data["excess_kurtosis"] = self.excess_kurtosis
        return pd.DataFrame(data)


def mc_normality(
    sample: Sample,
    cfg: TConfig,
    n: int,
    R: int,  # noqa: N803
    seed: int = 0,
    *,
    functional: str = "location-scatter",
    tail_radius: float | None = None,
    delta: float = 0.1,
    num_threads: int | None = None,
    progress: bool | None = None,
) -> McReport:
    """Simulate the distribution of `sqrt(n) (T(P_n) - T(P))`.

    Replicate `r` draws its sample with the generator seeded by `(seed, r)`, so the
    report does not depend on the number of threads.

    Args:
        sample (:class:`~tscatter.model.Sample`): the law P
        cfg (:class:`~tscatter.model.TConfig`): model and solver settings
        n (int): size of each simulated sample
        R (int): number of replicates
        seed (int): base seed
        functional (str): `location-scatter` or the pure `scatter` functional
        tail_radius (float, optional): if given, the report flags whether the tail
            condition at this radius holds and the reference lies in the matrix set
            bounded by `1 / delta`
        delta (float): the parameter of the uniformity check
        num_threads (int, optional): worker threads, defaults to the configuration
        progress (bool, optional): show a progress bar, defaults to the configuration
    """
    if n < 1 or R < 1:
        raise ValueError("Sample size and replicate count must be positive")
    coordinates = coordinate_names(cfg.dim, functional)
    if functional == "location-scatter":
        cfg.require_location()
    if cfg.check_domain and not _in_domain(sample, cfg, functional):
        raise DomainViolation("Law lies outside the existence domain")
    reference = _evaluate(sample, cfg, functional)

    def replicate(r: int) -> tuple[str, np.ndarray | None]:
        rng = np.random.default_rng(np.random.SeedSequence([seed, r]))
        draw = sample.draw(n, rng)
        if not _in_domain(draw, cfg, functional):
            return "domain", None
        try:
            return "ok", math.sqrt(n) * (_evaluate(draw, cfg, functional) - reference)
        except NoConvergence:
            return "solver", None

    threads = thread_count(num_threads)
    if progress is None:
        progress = config["progress"]

    with tqdm(total=R, disable=not progress, desc=f"n={n}") as bar:
        if threads > 1:
            with ThreadPoolExecutor(max_workers=threads) as executor:
                outcomes = []
                for outcome in executor.map(replicate, range(R)):
                    outcomes.append(outcome)
                    bar.update()
        else:
            outcomes = []
            for r in range(R):
                outcomes.append(replicate(r))
                bar.update()

    rows = [values for status, values in outcomes if status == "ok"]
    hits = sum(status != "domain" for status, _ in outcomes)
    excluded = R - len(rows)
    if excluded:
        _logger.info("Excluded %d of %d replicates", excluded, R)

    uniformity = None
    if tail_radius is not None:
        if functional == "scatter":
            matrix = PosDefMatrix.from_upper(reference, cfg.dim)
        else:
            matrix = PosDefMatrix.from_upper(reference[cfg.dim :], cfg.dim)
        uniformity = tail_condition(sample, tail_radius, delta, cfg) and in_W(
            matrix, delta
        )

    return McReport(
        n=n,
        R=R,
        seed=seed,
        functional=functional,
        coordinates=coordinates,
        scaled_errors=np.array(rows).reshape(len(rows), len(coordinates)),
        domain_hit_rate=hits / R,
        excluded=excluded,
        reference=reference,
        uniformity_flag=uniformity,
    )


def sandwich_covariance(
    sample: Sample, cfg: TConfig, functional: str = "location-scatter"
) -> np.ndarray:
    """Asymptotic covariance `sum_x P({x}) IF(x) IF(x)'` from influence functions.

    The coordinates agree with those of :func:`mc_normality`.
    """
    if functional == "scatter":
        matrix = fit_scatter(sample, cfg)[0]
        d_mats = scatter_influences(sample, cfg, sample.points, matrix)
        idx = upper_indices(cfg.dim)
        values = d_mats[:, idx[0], idx[1]]
    elif functional == "location-scatter":
        infs = implicit_influences(sample, cfg, sample.points)
        values = np.array([inf.flatten() for inf in infs])
    else:
        raise ValueError(f"Unknown functional `{functional}`")
    cov = (values * sample.weights[:, np.newaxis]).T @ values
    return 0.5 * (cov + cov.T)  # type: ignore


def _chart_point(mu: np.ndarray, chol: np.ndarray) -> np.ndarray:
    """Coordinates `(mu, log diag L, strictly lower L)` of `(mu, L L')`."""
    low = np.tril_indices(len(mu), -1)
    return np.concatenate([mu, np.log(np.diag(chol)), chol[low]])


def _from_chart(theta: np.ndarray, dim: int) -> tuple[np.ndarray, np.ndarray]:
    mu = theta[:dim]
    chol = np.diag(np.exp(theta[dim : 2 * dim]))
    chol[np.tril_indices(dim, -1)] = theta[2 * dim :]
    return mu, chol @ chol.T


@dataclass
class GcDiagnostic:
    """Largest deviation between empirical and population objective on a grid."""

    n_list: list[int]
    sup_deviation: list[float]
    grid_size: int
    radius: float

    @property
    def decreasing(self) -> bool:
        """bool: whether the deviation decreases strictly along `n_list`"""
        dev = self.sup_deviation
        return all(a > b for a, b in zip(dev[:-1], dev[1:]))

    def to_dict(self) -> dict[str, Any]:
        return {
            "n_list": self.n_list,
            "sup_deviation": self.sup_deviation,
            "grid_size": self.grid_size,
            "radius": self.radius,
        }

    def to_dataframe(self):
        import pandas as pd

        return pd.DataFrame({"n": self.n_list, "sup_deviation": self.sup_deviation})


def gc_diagnostic(
    sample: Sample,
    cfg: TConfig,
    radius: float = 0.5,
    grid_size: int = 100,
    n_list: Sequence[int] = (100, 1000, 10000),
    seed: int = 0,
    *,
    n_repeats: int = 1,
    center: tuple[Any, Any] | None = None,
) -> GcDiagnostic:
    """Uniform deviation of empirical objectives over a parameter grid.

    The grid consists of the fitted parameter and `grid_size - 1` further points
    drawn uniformly from the ball of `radius` around it, in coordinates formed by the
    location, the logarithm of the diagonal of the Cholesky factor of the scatter and
    its off-diagonal entries.

    Args:
        sample (:class:`~tscatter.model.Sample`): the law P
        cfg (:class:`~tscatter.model.TConfig`): model parameters
        radius (float): radius of the parameter ball
        grid_size (int): number of grid points
        n_list (sequence): sample sizes
        seed (int): seed of the grid and the draws
        n_repeats (int): independent draws averaged for every sample size
        center (tuple, optional): location and scatter at the center of the grid,
            replacing the fitted values

    Returns:
        :class:`GcDiagnostic`
    """
    if grid_size < 1 or n_repeats < 1:
        raise ValueError("Grid size and number of repeats must be positive")
    if center is None:
        est = fit_location_scatter(sample, cfg)
        mu, sigma = est.mu, est.sigma
    else:
        mu = np.atleast_1d(np.asarray(center[0], dtype=float))
        sigma = center[1]
    sigma = as_posdef(sigma)
    theta0 = _chart_point(mu, sigma.chol)

    rng = np.random.default_rng(np.random.SeedSequence([seed]))
    directions = rng.standard_normal((grid_size - 1, len(theta0)))
    directions /= np.linalg.norm(directions, axis=1, keepdims=True)
    lengths = radius * rng.uniform(size=(grid_size - 1, 1)) ** (1 / len(theta0))
    grid = np.vstack([theta0, theta0 + lengths * directions])
    params = [_from_chart(theta, cfg.dim) for theta in grid]
    population = np.array(
        [location_scatter_objective(sample, m, s, cfg) for m, s in params]
    )

    deviations = []
    for i, n in enumerate(n_list):
        sups = []
        for repeat in range(n_repeats):
            rng = np.random.default_rng(np.random.SeedSequence([seed, i, repeat]))
            draw = sample.draw(int(n), rng)
            empirical = np.array(
                [location_scatter_objective(draw, m, s, cfg) for m, s in params]
            )
            sups.append(float(np.max(np.abs(empirical - population))))
        deviations.append(math.fsum(sups) / n_repeats)
        _logger.info("Sample size %d: sup deviation %g", n, deviations[-1])

    return GcDiagnostic(
        n_list=[int(n) for n in n_list],
        sup_deviation=deviations,
        grid_size=grid_size,
        radius=radius,
    )
