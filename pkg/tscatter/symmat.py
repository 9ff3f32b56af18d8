"""Dense symmetric matrices and their factorizations.

.. autosummary::
   :nosignatures:

   SymMatrix
   PosDefMatrix
   cholesky
   log_det
   solve
   sym_eigenvalues
   condition_number

The factorizations are delegated to :mod:`scipy.linalg`; this module adds the
scale-relative pivot floor used to decide positive definiteness.
"""

from __future__ import annotations

from typing import Union

import numpy as np
import scipy.linalg as la
from numpy.typing import ArrayLike

from .errors import ConvergenceFailure, DimensionError, NotPositiveDefinite

PD_TOLERANCE = 1e-12
"""float: Cholesky pivots must exceed this fraction of the largest diagonal entry"""


def upper_indices(dim: int) -> tuple[np.ndarray, np.ndarray]:
    """Row and column indices of the pairs (i, j) with i <= j in row-major order."""
    return np.triu_indices(dim)


class SymMatrix:
    """Symmetric matrix with finite entries.

    The entries are symmetrized on construction, so the stored array satisfies
    `data[i, j] == data[j, i]` exactly.
    """

    def __init__(self, entries: ArrayLike):
        """
        Args:
            entries (array-like): square matrix, expected to be symmetric
        """
        data = np.array(entries, dtype=float, copy=True)
        if data.ndim == 0:
            data = data.reshape(1, 1)
        if data.ndim != 2 or data.shape[0] != data.shape[1]:
            raise DimensionError(f"Expected square matrix, got shape {data.shape}")
        if not np.all(np.isfinite(data)):
            raise ValueError("Matrix entries must be finite")
        data = 0.5 * (data + data.T)
        data.setflags(write=False)
        self.data = data

    @property
    def dim(self) -> int:
        """int: number of rows"""
        return self.data.shape[0]

    def __array__(self, dtype=None, copy=None):
        if dtype is None:
            return self.data.copy() if copy else self.data
        return self.data.astype(dtype)

    def __repr__(self):
        return f"{self.__class__.__name__}({self.data.tolist()!r})"

    def __eq__(self, other):
        if not isinstance(other, SymMatrix):
            return NotImplemented
        return np.array_equal(self.data, other.data)

    def upper(self) -> np.ndarray:
        """Entries (i, j) with i <= j, ordered row by row."""
        return self.data[upper_indices(self.dim)].copy()

    @classmethod
    def from_upper(cls, values: ArrayLike, dim: int) -> SymMatrix:
        """Create a matrix from its entries (i, j) with i <= j.

        Args:
            values (array-like): d(d+1)/2 entries ordered row by row
            dim (int): dimension d
        """
        values = np.asarray(values, dtype=float)
        if values.shape != (dim * (dim + 1) // 2,):
            raise DimensionError(f"Expected {dim * (dim + 1) // 2} entries")
        data = np.zeros((dim, dim))
        data[upper_indices(dim)] = values
        data = data + np.triu(data, 1).T
        return cls(data)


class PosDefMatrix(SymMatrix):
    """Strictly positive definite matrix with cached Cholesky factor."""

    def __init__(self, entries: ArrayLike):
        """
        Args:
            entries (array-like): symmetric positive definite matrix

        Raises:
            :class:`~tscatter.errors.NotPositiveDefinite`: if a pivot is too small
        """
        super().__init__(entries)
        self.chol = _cholesky_array(self.data)
        self.chol.setflags(write=False)

    def log_det(self) -> float:
        """float: the logarithm of the determinant"""
        return float(2 * np.log(np.diag(self.chol)).sum())

    def solve(self, rhs: ArrayLike) -> np.ndarray:
        """Solve `M x = rhs` for a vector or a matrix of right hand sides."""
        return la.cho_solve((self.chol, True), np.asarray(rhs, dtype=float))

    def inverse(self) -> np.ndarray:
        """Explicit inverse, symmetrized."""
        inv = self.solve(np.eye(self.dim))
        return 0.5 * (inv + inv.T)

    def quad_forms(self, points: ArrayLike) -> np.ndarray:
        """Quadratic forms `y' M^-1 y` for all rows `y` of `points`.

        Args:
            points (:class:`~numpy.ndarray`): array of shape (n, dim)

        Returns:
            :class:`~numpy.ndarray`: array of shape (n,)
        """
        points = np.atleast_2d(np.asarray(points, dtype=float))
        if points.shape[1] != self.dim:
            raise DimensionError(
                f"Points of dimension {points.shape[1]} do not match matrix {self.dim}"
            )
        z = la.solve_triangular(self.chol, points.T, lower=True)
        return np.einsum("ij,ij->j", z, z)


MatrixLike = Union[SymMatrix, ArrayLike]


def _cholesky_array(data: np.ndarray) -> np.ndarray:
    """Lower Cholesky factor with the relative pivot floor."""
    floor = PD_TOLERANCE * max(float(np.max(np.diag(data))), 0.0)
    try:
        factor = la.cholesky(data, lower=True, check_finite=True)
    except la.LinAlgError as err:
        raise NotPositiveDefinite("Matrix is not positive definite") from err
    pivots = np.diag(factor) ** 2
    if floor <= 0 or np.any(pivots <= floor):
        raise NotPositiveDefinite(
            f"Cholesky pivot {pivots.min():g} below tolerance {floor:g}"
        )
    return factor


def as_posdef(matrix: MatrixLike) -> PosDefMatrix:
    """Convert the argument to :class:`PosDefMatrix`, reusing existing factors."""
    if isinstance(matrix, PosDefMatrix):
        return matrix
    if isinstance(matrix, SymMatrix):
        return PosDefMatrix(matrix.data)
    return PosDefMatrix(matrix)


def cholesky(matrix: MatrixLike) -> np.ndarray:
    """Lower triangular Cholesky factor `L` with `L L' = M`.

    Args:
        matrix: symmetric matrix with finite entries

    Raises:
        :class:`~tscatter.errors.NotPositiveDefinite`: if any pivot is at most
        :data:`PD_TOLERANCE` times the largest diagonal entry
    """
    return as_posdef(matrix).chol.copy()


def log_det(matrix: MatrixLike) -> float:
    """Logarithm of the determinant of a positive definite matrix."""
    return as_posdef(matrix).log_det()


def solve(matrix: MatrixLike, rhs: ArrayLike) -> np.ndarray:
    """Solve the linear system `M x = rhs` using the Cholesky factor."""
    mat = as_posdef(matrix)
    rhs = np.asarray(rhs, dtype=float)
    if rhs.shape[0] != mat.dim:
        raise DimensionError(f"Right hand side does not match dimension {mat.dim}")
    return mat.solve(rhs)


def sym_eigenvalues(matrix: MatrixLike) -> np.ndarray:
    """Eigenvalues of a symmetric matrix in ascending order.

    Raises:
        :class:`~tscatter.errors.ConvergenceFailure`: if the eigensolver fails
    """
    data = matrix.data if isinstance(matrix, SymMatrix) else SymMatrix(matrix).data
    try:
        return la.eigh(data, eigvals_only=True)
    except la.LinAlgError as err:
        raise ConvergenceFailure("Symmetric eigenvalue solver failed") from err


def condition_number(matrix: MatrixLike) -> float:
    """Ratio of the largest to the smallest eigenvalue (inf if singular)."""
    eigs = sym_eigenvalues(matrix)
    if eigs[0] <= 0:
        return float("inf")
    return float(eigs[-1] / eigs[0])
