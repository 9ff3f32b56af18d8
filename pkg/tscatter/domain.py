"""Exact membership tests for the existence domains of the t functionals.

A law `Q` on d-dimensional space admits a pure scatter functional if every linear
subspace of dimension `q < d` carries less mass than `1 - (d - q) / a0`. The
location-scatter functional needs the same bound for every affine subspace. Both
conditions are decided exactly for discrete laws by enumerating the subspaces spanned
by atoms.

.. autosummary::
   :nosignatures:

   DimensionMass
   DomainReport
   max_subspace_mass
   in_V
   in_U
   tail_condition
   in_W
"""

from __future__ import annotations

import itertools
import logging
import math
from dataclasses import dataclass, field
from typing import Any

import numpy as np
import scipy.linalg as la

from .errors import ConfigError, DimensionError, ExplicitLimitation
from .model import Sample, TConfig
from .symmat import MatrixLike, sym_eigenvalues

_logger = logging.getLogger(__name__)

MERGE_TOLERANCE = 1e-12
"""float: atoms closer than this are treated as a single atom"""
CONTAINMENT_TOLERANCE = 1e-9
"""float: relative projection residual below which a point lies in a subspace"""
THRESHOLD_SLACK = 1e-12
"""float: masses this close to the threshold count as violations"""
MAX_SUBSETS = 10**6
"""int: largest number of spanning subsets that will be enumerated"""


@dataclass(frozen=True)
class DimensionMass:
    """Largest mass on a subspace of dimension `q` and the bound it must stay below."""

    q: int
    max_mass: float
    threshold: float
    witness: tuple[int, ...]

    @property
    def violated(self) -> bool:
        """bool: whether the mass reaches the threshold"""
        return self.max_mass >= self.threshold - THRESHOLD_SLACK

    def to_dict(self) -> dict[str, Any]:
        return {
            "q": self.q,
            "max_mass": self.max_mass,
            "threshold": self.threshold,
            "witness": list(self.witness),
            "violated": self.violated,
        }


@dataclass
class DomainReport:
    """Evidence for (non-)membership of a law in an existence domain.

    Attributes:
        member (bool): whether all subspace masses stay below their thresholds
        affine (bool): whether affine (`True`) or linear subspaces were tested
        a0 (float): the bound `nu + d` entering the thresholds
        per_dimension (list): one :class:`DimensionMass` for each `q = 0, ..., d - 1`
    """

    member: bool
    affine: bool
    a0: float
    per_dimension: list[DimensionMass] = field(default_factory=list)

    @property
    def violations(self) -> list[DimensionMass]:
        """list: the dimensions whose mass reaches the threshold"""
        return [row for row in self.per_dimension if row.violated]

    def to_dict(self) -> dict[str, Any]:
        return {
            "member": self.member,
            "affine": self.affine,
            "a0": self.a0,
            "per_dimension": [row.to_dict() for row in self.per_dimension],
        }


def _orthonormal_basis(vectors: np.ndarray) -> np.ndarray:
    """Orthonormal basis (as columns) of the span of the rows of `vectors`."""
    if vectors.size == 0 or not np.any(vectors):
        return np.zeros((vectors.shape[1], 0))
    return la.orth(vectors.T, rcond=CONTAINMENT_TOLERANCE)


def _contained(points: np.ndarray, origin: np.ndarray, basis: np.ndarray) -> np.ndarray:
    """Boolean mask of points lying in `origin + span(basis)`."""
    shifted = points - origin
    residual = shifted - (shifted @ basis) @ basis.T
    norms = np.linalg.norm(residual, axis=1)
    return norms < CONTAINMENT_TOLERANCE * (1 + np.linalg.norm(points, axis=1))  # type: ignore


def max_subspace_mass(
    sample: Sample, q: int, affine: bool = True
) -> tuple[float, tuple[int, ...]]:
    """Largest mass that a single subspace of dimension `q` carries.

    Atoms closer than :data:`MERGE_TOLERANCE` are merged first. Every candidate
    subspace is then spanned by `q + 1` atoms (affine case) or by `q` atoms together
    with the origin (linear case), and a point counts as contained when its
    orthogonal projection residual is below `1e-9 (1 + |x|)`.

    Args:
        sample (:class:`~tscatter.model.Sample`): the discrete law
        q (int): dimension of the subspaces, `0 <= q < d`
        affine (bool): test affine subspaces instead of linear ones

    Returns:
        tuple: the mass and the sorted indices of the original atoms in the extremal
        subspace

    Raises:
        :class:`~tscatter.errors.DimensionError`: if `q` is not below the dimension
        :class:`~tscatter.errors.ExplicitLimitation`: if too many subsets are needed
    """
    if not 0 <= q < sample.dim:
        raise DimensionError(f"Subspace dimension {q} not in [0, {sample.dim})")

    merged, groups = sample.merged(MERGE_TOLERANCE)
    points, weights = merged.points, merged.weights
    size = q + 1 if affine else q

    def witness_of(mask) -> tuple[int, ...]:
        return tuple(sorted(i for j in np.flatnonzero(mask) for i in groups[j]))

    if merged.n <= size:
        # all atoms fit into a single subspace of dimension q
        mask = np.ones(merged.n, dtype=bool)
        return math.fsum(weights), witness_of(mask)

    if size == 0:
        # linear subspace of dimension zero is the origin itself
        mask = _contained(points, np.zeros(merged.dim), np.zeros((merged.dim, 0)))
        return math.fsum(weights[mask]), witness_of(mask)

    num_subsets = math.comb(merged.n, size)
    if num_subsets > MAX_SUBSETS:
        raise ExplicitLimitation(
            f"Enumerating {num_subsets} subsets of {merged.n} atoms exceeds the cap "
            f"of {MAX_SUBSETS}"
        )

    best_mass, best_mask = -1.0, np.zeros(merged.n, dtype=bool)
    for subset in itertools.combinations(range(merged.n), size):
        span = points[list(subset)]
        if affine:
            origin = span[0]
            basis = _orthonormal_basis(span[1:] - origin)
        else:
            origin = np.zeros(merged.dim)
            basis = _orthonormal_basis(span)
        mask = _contained(points, origin, basis)
        mass = math.fsum(weights[mask])
        if mass > best_mass:
            best_mass, best_mask = mass, mask
    return best_mass, witness_of(best_mask)


def _domain_report(sample: Sample, cfg: TConfig, affine: bool) -> DomainReport:
    if sample.dim != cfg.dim:
        raise DimensionError(
            f"Sample dimension {sample.dim} does not match configuration {cfg.dim}"
        )
    d, a0 = cfg.dim, cfg.a0
    rows = []
    for q in range(d):
        mass, witness = max_subspace_mass(sample, q, affine=affine)
        rows.append(DimensionMass(q, mass, 1 - (d - q) / a0, witness))
    report = DomainReport(
        member=not any(row.violated for row in rows),
        affine=affine,
        a0=a0,
        per_dimension=rows,
    )
    if not report.member:
        _logger.debug("Law outside domain: %s", report.violations)
    return report


def in_V(sample: Sample, cfg: TConfig) -> DomainReport:  # noqa: N802
    """Test the existence condition of the location-scatter functional.

    Args:
        sample (:class:`~tscatter.model.Sample`): the law P on d-dimensional space
        cfg (:class:`~tscatter.model.TConfig`): supplies `a0 = nu + d`

    Raises:
        :class:`~tscatter.errors.ConfigError`: if `a0 <= d + 1`
    """
    if not cfg.a0 > cfg.dim + 1:
        raise ConfigError(f"Affine domain requires a0 > d + 1, got a0={cfg.a0}")
    return _domain_report(sample, cfg, affine=True)


def in_U(sample: Sample, cfg: TConfig) -> DomainReport:  # noqa: N802
    """Test the existence condition of the pure scatter functional.

    Raises:
        :class:`~tscatter.errors.ConfigError`: if `a0 <= d`
    """
    if not cfg.a0 > cfg.dim:
        raise ConfigError(f"Linear domain requires a0 > d, got a0={cfg.a0}")
    return _domain_report(sample, cfg, affine=False)


def tail_condition(sample: Sample, radius: float, delta: float, cfg: TConfig) -> bool:
    """Whether the mass outside the ball of `radius` is at most `(1 - delta) / a0`."""
    if not radius > 0:
        raise ValueError("Radius must be positive")
    if not 0 < delta < 1:
        raise ValueError("`delta` must lie in (0, 1)")
    outside = np.linalg.norm(sample.points, axis=1) > radius
    return bool(math.fsum(sample.weights[outside]) <= (1 - delta) / cfg.a0)


def in_W(matrix: MatrixLike, delta: float) -> bool:  # noqa: N802
    """Whether both the spectral norm of `matrix` and of its inverse are below
    `1 / delta`."""
    if not 0 < delta < 1:
        raise ValueError("`delta` must lie in (0, 1)")
    eigs = sym_eigenvalues(matrix)
    if eigs[0] <= 0:
        return False
    return bool(max(eigs[-1], 1 / eigs[0]) < 1 / delta)
