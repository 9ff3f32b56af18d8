"""Ingredients of the elliptically symmetric t model.

The module defines the configuration :class:`TConfig`, weighted discrete laws
(:class:`Sample`), the functions `rho` and `u_weight` of the t model, the adjusted
objective of pure scatter estimation, and the correspondence between location-scatter
pairs in d dimensions and pure scatter matrices in d + 1 dimensions.

.. autosummary::
   :nosignatures:

   TConfig
   Sample
   Embedding
   rho
   u_weight
   objective
   location_scatter_objective
   embed
   unembed
   lift_sample
   quadform_identity_check
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Any

import numpy as np
from numpy.typing import ArrayLike

from .errors import ConfigError, DimensionError, DomainError
from .parameters import Parameter, Parameterized
from .symmat import MatrixLike, PosDefMatrix, SymMatrix, as_posdef

WEIGHT_TOLERANCE = 1e-12
"""float: tolerance for the total weight of a :class:`Sample`"""


class TConfig(Parameterized):
    """Degrees of freedom, dimension, and solver settings of a t functional."""

    parameters_default = [
        Parameter("nu", 1.0, float, "Degrees of freedom of the t model"),
        Parameter("dim", 1, int, "Dimension of the data space"),
        Parameter(
            "tol_step",
            1e-12,
            float,
            "Relative Frobenius change of the iterate below which the fixed-point "
            "iteration stops",
        ),
        Parameter("tol_fp", 1e-9, float, "Tolerance for the fixed-point residual"),
        Parameter("tol_grad", 1e-8, float, "Tolerance for the gradient norm"),
        Parameter("max_iter", 1000, int, "Maximal number of fixed-point iterations"),
        Parameter(
            "init",
            "identity",
            str,
            "Initial value of the iteration",
            choices=["identity", "covariance"],
        ),
        Parameter(
            "check_domain",
            True,
            bool,
            "Verify membership in the existence domain before iterating",
        ),
    ]

    def __init__(self, nu: float, dim: int, **options):
        """
        Args:
            nu (float): degrees of freedom, must be positive
            dim (int): dimension of the data
            **options: solver settings, see :attr:`parameters_default`
        """
        try:
            super().__init__({"nu": nu, "dim": dim, **options}, strict=True)
        except ValueError as err:
            raise ConfigError(str(err)) from err

        if not (math.isfinite(self.nu) and self.nu > 0):
            raise ConfigError(f"Degrees of freedom must be positive, got {self.nu}")
        if self.dim < 1:
            raise ConfigError(f"Dimension must be positive, got {self.dim}")
        for name in ["tol_step", "tol_fp", "tol_grad"]:
            if not self.parameters[name] > 0:
                raise ConfigError(f"`{name}` must be positive")
        if self.max_iter < 1:
            raise ConfigError("`max_iter` must be positive")

    @property
    def nu(self) -> float:
        """float: degrees of freedom"""
        return self.parameters["nu"]  # type: ignore

    @property
    def dim(self) -> int:
        """int: dimension of the data space"""
        return self.parameters["dim"]  # type: ignore

    @property
    def a0(self) -> float:
        """float: supremum of s u(s), which equals nu + dim"""
        return self.nu + self.dim

    @property
    def max_iter(self) -> int:
        return self.parameters["max_iter"]  # type: ignore

    def __getattr__(self, name: str) -> Any:
        # expose the remaining solver settings as attributes
        parameters = self.__dict__.get("parameters", {})
        if name in parameters:
            return parameters[name]
        raise AttributeError(name)

    def replace(self, **changes) -> TConfig:
        """Return a copy with some parameters changed."""
        parameters = {**self.parameters, **changes}
        return self.__class__(**parameters)

    def lifted(self) -> TConfig:
        """Configuration of the pure scatter problem in one more dimension.

        The location-scatter functional with `nu` degrees of freedom in dimension `d`
        corresponds to the pure scatter functional with `nu - 1` degrees of freedom in
        dimension `d + 1`, which shares the bound `a0`.
        """
        self.require_location()
        return self.replace(nu=self.nu - 1, dim=self.dim + 1)

    def require_location(self) -> None:
        """Raise :class:`~tscatter.errors.ConfigError` unless nu > 1."""
        if not self.nu > 1:
            raise ConfigError(
                f"Location-scatter functionals require nu > 1, got nu={self.nu}"
            )

    def to_dict(self) -> dict[str, Any]:
        return dict(self.parameters)

    def __eq__(self, other):
        if not isinstance(other, TConfig):
            return NotImplemented
        return self.parameters == other.parameters

    def __repr__(self):
        args = ", ".join(f"{k}={v!r}" for k, v in self.parameters.items())
        return f"{self.__class__.__name__}({args})"


class Sample:
    """Weighted discrete law on d-dimensional space.

    The law puts the probability `weights[i]` on `points[i]`. Points may repeat;
    repeated points simply add their weights.
    """

    def __init__(
        self,
        points: ArrayLike,
        weights: ArrayLike | None = None,
        *,
        normalize: bool = False,
    ):
        """
        Args:
            points (array-like):
                Array of shape (n, d). A one-dimensional array is interpreted as n
                points on the real line.
            weights (array-like, optional):
                Non-negative weights summing to one. Uniform weights are used if
                omitted.
            normalize (bool):
                Rescale the weights to total one instead of checking the sum
        """
        pts = np.array(points, dtype=float, copy=True)
        if pts.ndim == 1:
            pts = pts[:, np.newaxis]
        if pts.ndim != 2 or pts.shape[0] == 0 or pts.shape[1] == 0:
            raise DimensionError(f"Points must have shape (n, d), got {pts.shape}")
        if not np.all(np.isfinite(pts)):
            raise ValueError("Point coordinates must be finite")

        if weights is None:
            wts = np.full(len(pts), 1 / len(pts))
        else:
            wts = np.array(weights, dtype=float, copy=True).ravel()
        if wts.shape != (len(pts),):
            raise DimensionError("Need exactly one weight per point")
        if not np.all(np.isfinite(wts)) or np.any(wts < 0):
            raise ValueError("Weights must be finite and non-negative")
        total = math.fsum(wts)
        if normalize:
            if total <= 0:
                raise ValueError("Weights must have positive total")
            if abs(total - 1) > WEIGHT_TOLERANCE:
                wts = wts / total
        elif abs(total - 1) > WEIGHT_TOLERANCE:
            raise ValueError(f"Weights sum to {total!r} instead of 1")

        pts.setflags(write=False)
        wts.setflags(write=False)
        self.points = pts
        self.weights = wts

    @classmethod
    def from_points(cls, points: ArrayLike) -> Sample:
        """Empirical measure of the rows of a data matrix.

        Identical rows are merged into one atom whose weight is its multiplicity
        divided by the number of rows, so data repeated m times yields the identical
        object.
        """
        pts = np.asarray(points, dtype=float)
        if pts.ndim == 1:
            pts = pts[:, np.newaxis]
        unique, counts = np.unique(pts, axis=0, return_counts=True)
        return cls(unique, counts / len(pts))

    @classmethod
    def point_mass(cls, x: ArrayLike) -> Sample:
        """Dirac measure at `x`"""
        return cls(np.atleast_1d(np.asarray(x, dtype=float))[np.newaxis, :])

    @property
    def n(self) -> int:
        """int: number of atoms"""
        return self.points.shape[0]

    @property
    def dim(self) -> int:
        """int: dimension of the space"""
        return self.points.shape[1]

    def __len__(self) -> int:
        return self.n

    def __eq__(self, other):
        if not isinstance(other, Sample):
            return NotImplemented
        return np.array_equal(self.points, other.points) and np.array_equal(
            self.weights, other.weights
        )

    def __repr__(self):
        return f"{self.__class__.__name__}(n={self.n}, dim={self.dim})"

    def mean(self) -> np.ndarray:
        """Weighted mean vector."""
        return self.weights @ self.points  # type: ignore

    def second_moment(self, scales: ArrayLike | None = None) -> np.ndarray:
        """Weighted matrix `sum_i w_i s_i y_i y_i'` with optional extra scales `s_i`."""
        coeff = self.weights if scales is None else self.weights * np.asarray(scales)
        moment = (self.points * coeff[:, np.newaxis]).T @ self.points
        return 0.5 * (moment + moment.T)  # type: ignore

    def mixture(self, other: Sample, t: float) -> Sample:
        """The law `(1 - t) * self + t * other`"""
        if other.dim != self.dim:
            raise DimensionError("Cannot mix laws of different dimensions")
        if not 0 <= t <= 1:
            raise ValueError(f"Mixture parameter must lie in [0, 1], got {t}")
        if t == 0:
            return self
        if t == 1:
            return other
        points = np.concatenate([self.points, other.points])
        weights = np.concatenate([(1 - t) * self.weights, t * other.weights])
        return Sample(points, weights, normalize=True)

    def merged(self, tol: float = 1e-12) -> tuple[Sample, list[list[int]]]:
        """Merge atoms closer than `tol` and sum their weights.

        Returns:
            tuple: the merged sample and, for each merged atom, the indices of the
            original atoms it contains
        """
        groups: list[list[int]] = []
        representatives: list[np.ndarray] = []
        for i, point in enumerate(self.points):
            for group, rep in zip(groups, representatives):
                if np.linalg.norm(point - rep) < tol:
                    group.append(i)
                    break
            else:
                groups.append([i])
                representatives.append(point)
        weights = [math.fsum(self.weights[g]) for g in groups]
        return Sample(np.array(representatives), weights, normalize=True), groups

    def draw(self, n: int, rng: np.random.Generator) -> Sample:
        """Empirical measure of `n` independent draws from this law.

        Args:
            n (int): number of draws
            rng (:class:`~numpy.random.Generator`): source of randomness

        Returns:
            :class:`Sample`: atoms of this law that were drawn, weighted by their
            relative frequency
        """
        if n < 1:
            raise ValueError("Need at least one draw")
        counts = rng.multinomial(n, self.weights / self.weights.sum())
        mask = counts > 0
        return Sample(self.points[mask], counts[mask] / n)

    def transformed(self, matrix: ArrayLike, shift: ArrayLike | None = None) -> Sample:
        """Image of the law under `x -> matrix @ x + shift` (atoms not merged)."""
        matrix = np.atleast_2d(np.asarray(matrix, dtype=float))
        points = self.points @ matrix.T
        if shift is not None:
            points = points + np.asarray(shift, dtype=float)
        return Sample(points, self.weights)


def _check_nonnegative(s: ArrayLike) -> np.ndarray:
    arr = np.asarray(s, dtype=float)
    if np.any(arr < 0) or np.any(np.isnan(arr)):
        raise DomainError("Argument must be non-negative")
    return arr


def _as_output(arr: np.ndarray):
    return float(arr) if arr.ndim == 0 else arr


def rho(s: ArrayLike, cfg: TConfig):
    """The function `((nu + d) / 2) log((nu + s) / nu)` of the t model.

    Args:
        s (float or array): non-negative argument(s)
        cfg (:class:`TConfig`): degrees of freedom and dimension

    Raises:
        :class:`~tscatter.errors.DomainError`: if `s < 0`
    """
    arr = _check_nonnegative(s)
    return _as_output(0.5 * cfg.a0 * np.log1p(arr / cfg.nu))


def u_weight(s: ArrayLike, cfg: TConfig):
    """The weight function `(nu + d) / (nu + s)`, twice the derivative of `rho`."""
    arr = _check_nonnegative(s)
    return _as_output(cfg.a0 / (cfg.nu + arr))


def _check_dims(sample: Sample, dim: int, cfg: TConfig) -> None:
    if sample.dim != dim:
        raise DimensionError(f"Sample dimension {sample.dim} does not match {dim}")
    if cfg.dim != dim:
        raise DimensionError(f"Configuration dimension {cfg.dim} does not match {dim}")


def objective(sample: Sample, matrix: MatrixLike, cfg: TConfig) -> float:
    """Adjusted objective of pure scatter estimation.

    The value is `log(det A) / 2 + sum_i w_i [rho(y_i' A^-1 y_i) - rho(y_i' y_i)]`,
    which vanishes at the identity and is finite for every discrete law.

    Args:
        sample (:class:`Sample`): the law Q
        matrix: positive definite matrix A
        cfg (:class:`TConfig`): model parameters
    """
    mat = as_posdef(matrix)
    _check_dims(sample, mat.dim, cfg)
    quad = mat.quad_forms(sample.points)
    norms = np.einsum("ij,ij->i", sample.points, sample.points)
    diff = rho(quad, cfg) - rho(norms, cfg)
    return 0.5 * mat.log_det() + math.fsum(sample.weights * diff)


def location_scatter_objective(
    sample: Sample, mu: ArrayLike, sigma: MatrixLike, cfg: TConfig
) -> float:
    """Adjusted objective of location-scatter estimation.

    The value is `log(det S) / 2 + sum_i w_i [rho((y_i - m)' S^-1 (y_i - m))
    - rho(y_i' y_i)]` with the `rho` of dimension `d`.
    """
    sig = as_posdef(sigma)
    _check_dims(sample, sig.dim, cfg)
    centered = sample.points - np.asarray(mu, dtype=float)
    quad = sig.quad_forms(centered)
    norms = np.einsum("ij,ij->i", sample.points, sample.points)
    diff = rho(quad, cfg) - rho(norms, cfg)
    return 0.5 * sig.log_det() + math.fsum(sample.weights * diff)


@dataclass(frozen=True)
class Embedding:
    """A location-scatter triple together with its pure scatter matrix."""

    mu: np.ndarray
    sigma: PosDefMatrix
    gamma: float
    A: PosDefMatrix  # noqa: N815

    @property
    def dim(self) -> int:
        """int: dimension d of the location"""
        return len(self.mu)


def embed(mu: ArrayLike, sigma: MatrixLike, gamma: float = 1.0) -> Embedding:
    """Build `A = gamma * [[sigma + mu mu', mu], [mu', 1]]`.

    Args:
        mu (array-like): location vector
        sigma: positive definite scatter matrix
        gamma (float): positive scale factor

    Raises:
        :class:`~tscatter.errors.DomainError`: if `gamma <= 0`
    """
    if not gamma > 0:
        raise DomainError(f"Scale factor must be positive, got {gamma}")
    sig = as_posdef(sigma)
    mu_arr = np.atleast_1d(np.asarray(mu, dtype=float))
    if mu_arr.shape != (sig.dim,):
        raise DimensionError("Location and scatter have different dimensions")
    d = sig.dim
    block = np.empty((d + 1, d + 1))
    block[:d, :d] = sig.data + np.outer(mu_arr, mu_arr)
    block[:d, d] = block[d, :d] = mu_arr
    block[d, d] = 1
    return Embedding(
        mu=mu_arr, sigma=sig, gamma=float(gamma), A=PosDefMatrix(gamma * block)
    )


def unembed(matrix: MatrixLike, dim: int) -> tuple[np.ndarray, PosDefMatrix, float]:
    """Recover `(mu, sigma, gamma)` from a pure scatter matrix of size `dim + 1`.

    Raises:
        :class:`~tscatter.errors.NotPositiveDefinite`: if the recovered scatter
        matrix fails the pivot test
    """
    data = matrix.data if isinstance(matrix, SymMatrix) else matrix
    mat = np.asarray(data, dtype=float)
    if mat.shape != (dim + 1, dim + 1):
        raise DimensionError(f"Expected matrix of size {dim + 1}, got {mat.shape}")
    gamma = float(mat[dim, dim])
    if not gamma > 0:
        raise DomainError("Matrix is not positive definite")
    mu = mat[:dim, dim] / gamma
    sigma = PosDefMatrix(mat[:dim, :dim] / gamma - np.outer(mu, mu))
    return mu, sigma, gamma


def lift_sample(sample: Sample) -> Sample:
    """Map every point `y` to `(y', 1)'`, keeping the weights."""
    ones = np.ones((sample.n, 1))
    return Sample(np.hstack([sample.points, ones]), sample.weights)


def quadform_identity_check(y: ArrayLike, emb: Embedding) -> tuple[float, float]:
    """Both sides of `(y', 1) A^-1 (y', 1)' = (1 + (y - mu)' S^-1 (y - mu)) / gamma`"""
    y_arr = np.atleast_1d(np.asarray(y, dtype=float))
    z = np.append(y_arr, 1.0)
    lhs = float(emb.A.quad_forms(z)[0])
    rhs = float((1 + emb.sigma.quad_forms(y_arr - emb.mu)[0]) / emb.gamma)
    return lhs, rhs
