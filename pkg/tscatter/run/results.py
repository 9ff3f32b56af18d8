"""Classes that describe the reports of commands.

.. codeauthor:: David Zwicker <david.zwicker@ds.mpg.de>
"""

from __future__ import annotations

import json
import math
from pathlib import Path
from typing import Any

import numpy as np

from ..config import SCHEMA
from .command import CommandBase


FLOAT_FORMAT = ".17g"
"""str: format of floats in reports, which keeps 17 significant digits"""


def format_float(value: float) -> str:
    """Represent a float in JSON with 17 significant digits.

    Integral values keep a decimal point so they read back as floats and non-finite
    values become `null`.
    """
    if not math.isfinite(value):
        return "null"
    text = format(value, FLOAT_FORMAT)
    if not any(c in text for c in ".e"):
        text += ".0"
    return text


class ReportEncoder(json.JSONEncoder):
    """Helper class for encoding numpy data and report objects in JSON.

    Floats are written by :func:`format_float`.
    """

    def default(self, obj):
        if isinstance(obj, np.ndarray):
            return obj.tolist()
        if isinstance(obj, np.integer):
            return int(obj)
        if isinstance(obj, np.floating):
            return float(obj)
        if isinstance(obj, np.bool_):
            return bool(obj)
        if hasattr(obj, "to_dict"):
            return obj.to_dict()
        return json.JSONEncoder.default(self, obj)

    def iterencode(self, o, _one_shot: bool = False):
        if self.indent is None or isinstance(self.indent, str):
            indent = self.indent
        else:
            indent = " " * self.indent
        if self.ensure_ascii:
            encoder = json.encoder.encode_basestring_ascii
        else:
            encoder = json.encoder.encode_basestring
        # the pure Python encoder is the only one accepting a float formatter
        iterencode = json.encoder._make_iterencode(  # type: ignore
            {} if self.check_circular else None,
            self.default,
            encoder,
            indent,
            format_float,
            self.key_separator,
            self.item_separator,
            self.sort_keys,
            self.skipkeys,
            _one_shot,
        )
        return iterencode(o, 0)


def _finite(value: Any) -> Any:
    """Replace non-finite floats by `None`, which JSON can represent."""
    if isinstance(value, float):
        return value if math.isfinite(value) else None
    if isinstance(value, dict):
        return {k: _finite(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_finite(v) for v in value]
    return value


class MockCommand(CommandBase):
    """Helper class to store parameter values when the original command is absent."""

    def __init__(self, parameters: dict[str, Any] | None = None):
        """
        Args:
            parameters (dict): A dictionary of parameters
        """
        self.parameters = self._parse_parameters(parameters, check_validity=False)
        self.output = None

    def __call__(self):
        raise RuntimeError(f"{self.__class__.__name__} cannot be called")

    def __repr__(self):
        return f"{self.__class__.__name__}({self.parameters})"


class Result:
    """Describes the result of a single command together with auxiliary information.

    The JSON representation carries the report schema, the command name, all
    parameters of the command (including the seed), and the actual result.
    """

    command: CommandBase
    """:class:`CommandBase`: Command that was run.

    This is a :class:`~tscatter.run.results.MockCommand` instance if the result was
    read from a file
    """
    result: Any
    """The final outcome of the command."""
    info: dict[str, Any]
    """dict: Additional information for this result"""

    def __init__(
        self, command: CommandBase, result: Any, *, info: dict[str, Any] | None = None
    ):
        """
        Args:
            command (:class:`CommandBase`):
                The command from which the result was obtained
            result:
                The actual result
            info (dict):
                Additional information for this result
        """
        if not isinstance(command, CommandBase):
            raise TypeError("The command should be of type `CommandBase`")
        self.command = command
        self.result = result
        self.info = {} if info is None else info

    @property
    def parameters(self) -> dict[str, Any]:
        return self.command.parameters

    def to_dict(self) -> dict[str, Any]:
        """Plain representation of the report using only JSON types."""
        data = {
            "schema": SCHEMA,
            "command": self.command.name,
            "config": self.command.parameters,
            "result": self.result,
        }
        if self.info:
            data["info"] = self.info
        # round trip through the encoder to obtain plain types
        return _finite(json.loads(json.dumps(data, cls=ReportEncoder)))  # type: ignore

    def to_json(self, indent: int | None = 2) -> str:
        """Serialize the report.

        Floats are written with 17 significant digits and keys are sorted, so equal
        results give equal text.
        """
        text = json.dumps(
            self.to_dict(), cls=ReportEncoder, indent=indent, sort_keys=True
        )
        return text + "\n"

    def to_file(self, path: str | Path) -> None:
        """Write the JSON report to `path`."""
        Path(path).write_text(self.to_json(), encoding="utf-8")

    @classmethod
    def from_json(cls, text: str) -> Result:
        """Restore a report written by :meth:`to_json`."""
        data = json.loads(text)
        if data.get("schema") != SCHEMA:
            raise ValueError(f"Unsupported report schema `{data.get('schema')}`")
        command = MockCommand(data.get("config", {}))
        command.name = data.get("command")
        return cls(command, data["result"], info=data.get("info"))

    @classmethod
    def from_file(cls, path: str | Path) -> Result:
        """Load a report from a JSON file."""
        return cls.from_json(Path(path).read_text(encoding="utf-8"))
