"""Reading and writing samples as CSV files.

A sample file has a header row with the coordinate columns `x1, ..., xd` and an
optional column `weight`. Without weights, every row carries the mass `1 / n`.

.. codeauthor:: David Zwicker <david.zwicker@ds.mpg.de>
"""

from __future__ import annotations

import logging
from pathlib import Path

import pandas as pd

from ..errors import DimensionError
from ..model import Sample

_logger = logging.getLogger(__name__)

WEIGHT_COLUMN = "weight"


def read_sample_csv(path: str | Path) -> Sample:
    """Read a sample from a CSV file.

    Weights that do not sum to one within `1e-12` are normalized.

    Args:
        path (str or :class:`~pathlib.Path`): the file

    Returns:
        :class:`~tscatter.model.Sample`: one atom per row, in file order
    """
    data = pd.read_csv(path, float_precision="round_trip")
    columns = [c for c in data.columns if c != WEIGHT_COLUMN]
    expected = [f"x{i + 1}" for i in range(len(columns))]
    if not columns or columns != expected:
        raise DimensionError(
            f"Expected coordinate columns {expected or ['x1']}, got {list(columns)}"
        )
    points = data[columns].to_numpy(dtype=float)
    if WEIGHT_COLUMN in data.columns:
        weights = data[WEIGHT_COLUMN].to_numpy(dtype=float)
        sample = Sample(points, weights, normalize=True)
    else:
        sample = Sample(points)
    _logger.info("Read %d points of dimension %d from %s", sample.n, sample.dim, path)
    return sample


def write_sample_csv(path: str | Path, sample: Sample, *, weights: bool = True) -> None:
    """Write a sample to a CSV file that :func:`read_sample_csv` reads back.

    Args:
        path (str or :class:`~pathlib.Path`): the file
        sample (:class:`~tscatter.model.Sample`): the data
        weights (bool): whether the weight column is written
    """
    columns = {f"x{i + 1}": sample.points[:, i] for i in range(sample.dim)}
    if weights:
        columns[WEIGHT_COLUMN] = sample.weights
    pd.DataFrame(columns).to_csv(path, index=False, lineterminator="\n")
