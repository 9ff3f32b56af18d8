"""Base class describing a command of the command line interface.

.. codeauthor:: David Zwicker <david.zwicker@ds.mpg.de>
"""

from __future__ import annotations

import argparse
import json
import logging
from abc import ABCMeta, abstractmethod
from datetime import datetime
from typing import TYPE_CHECKING, Any, Sequence

from ..errors import ConfigError
from ..model import Sample, TConfig
from ..parameters import Parameter, Parameterized

if TYPE_CHECKING:
    from .results import Result

_base_logger = logging.getLogger(__name__.rsplit(".", 1)[0])
""":class:`logging.Logger`: Base logger for commands."""


class CommandBase(Parameterized, metaclass=ABCMeta):
    """Base class for commands, whose options are declared as parameters."""

    name: str | None = None
    """str: the name of the command"""
    description: str | None = None
    """str: a longer description of the command"""
    takes_input: bool = True
    """bool: whether the command reads a sample from a CSV file"""
    _logger: logging.Logger  # logger instance to output information

    parameters_default = [
        Parameter(
            "nu", None, float, "Degrees of freedom of the t model", required=True
        ),
        Parameter("seed", 0, int, "Seed of all random numbers"),
        Parameter("tol_step", 1e-12, float, "Relative step tolerance of the solver"),
        Parameter("tol_fp", 1e-9, float, "Tolerance of the fixed-point residual"),
        Parameter("tol_grad", 1e-8, float, "Tolerance of the gradient norm"),
        Parameter("max_iter", 1000, int, "Maximal number of solver iterations"),
        Parameter(
            "init",
            "identity",
            str,
            "Initial value of the iteration",
            choices=["identity", "covariance"],
        ),
        Parameter(
            "skip_domain_check",
            False,
            bool,
            "Skip the existence check before iterating",
        ),
        Parameter(
            "input", None, str, "Path to the CSV file of the sample", hidden=True
        ),
    ]

    def __init__(
        self,
        parameters: dict[str, Any] | None = None,
        output: str | None = None,
        *,
        strict: bool = True,
    ):
        """
        Args:
            parameters (dict):
                A dictionary of parameters to change the defaults of this command
            output (str):
                Path where the JSON report will be written. The report is written to
                standard output if omitted.
            strict (bool):
                Flag indicating whether parameters are strictly interpreted
        """
        super().__init__(parameters, strict=strict)
        self.output = output

    def __init_subclass__(cls, **kwargs):
        """Initialize class-level attributes of subclasses."""
        super().__init_subclass__(**kwargs)
        # create logger for this specific command class
        cls._logger = _base_logger.getChild(cls.__qualname__)

    def read_sample(self) -> Sample:
        """Load the sample given as input."""
        from .io import read_sample_csv

        path = self.parameters.get("input")
        if path is None:
            raise ConfigError(f"Command `{self.name}` requires an input file")
        return read_sample_csv(path)

    def get_config(self, dim: int) -> TConfig:
        """Model configuration for data of dimension `dim`."""
        return TConfig(
            nu=self.parameters["nu"],
            dim=dim,
            tol_step=self.parameters["tol_step"],
            tol_fp=self.parameters["tol_fp"],
            tol_grad=self.parameters["tol_grad"],
            max_iter=self.parameters["max_iter"],
            init=self.parameters["init"],
            check_domain=not self.parameters["skip_domain_check"],
        )

    @abstractmethod
    def __call__(self) -> dict[str, Any]:
        """Main method calculating the result.

        Needs to be specified by sub-class
        """

    def get_result(self, data: Any = None, *, timestamp: bool = False) -> Result:
        """Get the result as a :class:`~tscatter.run.results.Result` object.

        Args:
            data:
                The result data. If omitted, the command is run to obtain results
            timestamp (bool):
                Whether the time of the run is stored, which makes the report differ
                between runs

        Returns:
            :class:`Result`: The result after the command is run
        """
        from .results import Result

        if data is None:
            data = self()

        info = {}
        if timestamp:
            info["time"] = datetime.now().strftime("%Y-%m-%d %H:%M:%S")
        return Result(self, data, info=info)

    def write_result(self, result: Result | None = None) -> None:
        """Write the result to the output file.

        Args:
            result:
                The result data. If omitted, the command is run to obtain results
        """
        from .results import Result

        if self.output is None:
            raise RuntimeError("Output file needs to be specified")

        if result is None:
            result = self.get_result()
        elif not isinstance(result, Result):
            raise TypeError(f"result has type {result.__class__} instead of `Result`")
        result.to_file(self.output)

    @classmethod
    def _prepare_argparser(cls, name: str | None = None) -> argparse.ArgumentParser:
        """Create argument parser for setting parameters of this command.

        Args:
            name (str):
                Name of the program, which will be shown in the command line help

        Returns:
            :class:`~argparse.ArgumentParser`
        """
        parser = argparse.ArgumentParser(
            prog=name,
            description=cls.description,
            formatter_class=argparse.ArgumentDefaultsHelpFormatter,
        )
        if cls.takes_input:
            parser.add_argument("input", metavar="CSV", help="Sample as CSV file")

        group = parser.add_argument_group()
        seen = set()
        # iterate over all parent classes
        for cls1 in cls.__mro__:
            if hasattr(cls1, "parameters_default"):
                # add all parameters of this class
                for p in cls1.parameters_default:
                    if p.name not in seen:
                        p._argparser_add(group)
                        seen.add(p.name)

        # add special parameters
        parser.add_argument(
            "--json",
            metavar="JSON",
            help="JSON-encoded parameter values. Overwrites other parameters.",
        )
        parser.add_argument(
            "-v",
            "--verbose",
            action="count",
            default=0,
            help="Log progress to standard error; repeat for more detail",
        )
        return parser

    @classmethod
    def from_command_line(
        cls, args: Sequence[str] | None = None, name: str | None = None
    ) -> CommandBase:
        """Create command from command line parameters.

        Args:
            args (list):
                Sequence of strings corresponding to the command line arguments
            name (str):
                Name of the program, which will be shown in the command line help

        Returns:
            :class:`CommandBase`: An instance of this command with appropriate
            parameters
        """
        if args is None:
            args = []

        # read the command line arguments
        parser = cls._prepare_argparser(name)

        # add special parameters to determine the output file
        parser.add_argument(
            "-o",
            "--output",
            metavar="PATH",
            help="Path to output file. If omitted, the report is printed.",
        )

        parameters = vars(parser.parse_args(args))
        output = parameters.pop("output")
        parameters_json = parameters.pop("json")
        verbose = parameters.pop("verbose")
        if verbose:
            level = logging.INFO if verbose == 1 else logging.DEBUG
            logging.basicConfig(level=level)

        # update parameters with data from the json argument
        if parameters_json:
            parameters.update(json.loads(parameters_json))

        # create the command
        return cls(parameters, output=output)
