"""Two sequences of planar laws with a common weak limit but different t scatter limits.

Both `P^(k)` and `Q^(k)` converge weakly to the uniform law on `(-1, 0)`, `(0, 0)`,
`(1, 0)` as `k` grows, yet the first entries of their scatter matrices converge to
different values `a(nu)` and `b(nu)`.

.. autosummary::
   :nosignatures:

   make_Pk
   make_Qk
   LimitTriple
   limits
   SweepRow
   sweep
"""

from __future__ import annotations

import logging
from dataclasses import asdict, dataclass
from typing import Any, Sequence

import numpy as np

from .errors import ConfigError
from .model import Sample, TConfig
from .solver import fit_location_scatter

_logger = logging.getLogger(__name__)

DEFAULT_K_VALUES = (1, 2, 5, 10, 25, 100)
"""tuple: the values of `k` used by :func:`sweep`"""


def make_Pk(k: int) -> Sample:  # noqa: N802
    """Atoms `(+-1, +-1/k)` of mass 1/6 each and the origin with mass 1/3."""
    if k < 1:
        raise ValueError("`k` must be positive")
    points = [(-1, -1 / k), (-1, 1 / k), (1, -1 / k), (1, 1 / k), (0, 0)]
    return Sample(points, [1 / 6, 1 / 6, 1 / 6, 1 / 6, 1 / 3])


def make_Qk(k: int) -> Sample:  # noqa: N802
    """Atoms `(+-1, 0)` of mass 1/3 each and `(0, +-1/k)` of mass 1/6 each."""
    if k < 1:
        raise ValueError("`k` must be positive")
    points = [(-1, 0), (0, -1 / k), (0, 1 / k), (1, 0)]
    return Sample(points, [1 / 3, 1 / 6, 1 / 6, 1 / 3])


@dataclass(frozen=True)
class LimitTriple:
    """Limits `a = 2 (1 - 1/nu) / 3`, `b = (2 + 1/nu) / 3` and `c = (1 - 1/nu) / 3`."""

    a: float
    b: float
    c: float

    def to_dict(self) -> dict[str, float]:
        return asdict(self)


def limits(cfg: TConfig) -> LimitTriple:
    """The limits of the scatter entries for the degrees of freedom of `cfg`.

    `a` is the limit of the first scatter entry of `P^(k)`; the scatter of every
    `Q^(k)` has the diagonal `(b, c / k^2)`.
    """
    if cfg.dim != 2:
        raise ConfigError("The sequences live in two dimensions")
    cfg.require_location()
    inv = 1 / cfg.nu
    return LimitTriple(a=2 * (1 - inv) / 3, b=(2 + inv) / 3, c=(1 - inv) / 3)


@dataclass(frozen=True)
class SweepRow:
    """Location norms and scatter entries of both laws for one value of `k`."""

    k: int
    p_mu_norm: float
    p_sigma11: float
    p_sigma22: float
    q_mu_norm: float
    q_sigma11: float
    q_sigma22: float


@dataclass
class CounterexampleSweep:
    """Scatter entries of both sequences for several values of `k`."""

    nu: float
    rows: list[SweepRow]
    limits: LimitTriple

    def to_dict(self) -> dict[str, Any]:
        return {
            "nu": self.nu,
            "rows": [asdict(row) for row in self.rows],
            "limits": self.limits.to_dict(),
        }

    def to_dataframe(self):
        import pandas as pd

        return pd.DataFrame([asdict(row) for row in self.rows])


def sweep(
    cfg: TConfig, k_values: Sequence[int] = DEFAULT_K_VALUES, k_max: int | None = None
) -> CounterexampleSweep:
    """Fit both sequences for all `k` in `k_values` not exceeding `k_max`.

    The iteration starts from the covariance, which makes the iterates of the
    rescaled laws exact images of each other.
    """
    triple = limits(cfg)
    fit_cfg = cfg.replace(init="covariance")
    rows = []
    for k in k_values:
        if k_max is not None and k > k_max:
            continue
        est_p = fit_location_scatter(make_Pk(k), fit_cfg)
        est_q = fit_location_scatter(make_Qk(k), fit_cfg)
        rows.append(
            SweepRow(
                k=int(k),
                p_mu_norm=float(np.linalg.norm(est_p.mu)),
                p_sigma11=float(est_p.sigma.data[0, 0]),
                p_sigma22=float(est_p.sigma.data[1, 1]),
                q_mu_norm=float(np.linalg.norm(est_q.mu)),
                q_sigma11=float(est_q.sigma.data[0, 0]),
                q_sigma22=float(est_q.sigma.data[1, 1]),
            )
        )
        _logger.debug("k=%d: %s", k, rows[-1])
    return CounterexampleSweep(nu=cfg.nu, rows=rows, limits=triple)
