"""Commands of the command line interface.

.. autosummary::
   :nosignatures:

   FitCommand
   CheckDomainCommand
   InfluenceCommand
   McNormalityCommand
   EquivarianceTestCommand
   CounterexampleCommand
   GcDiagnosticCommand
"""

from __future__ import annotations

from typing import Any

import numpy as np

from ..asymptotics import FUNCTIONALS, gc_diagnostic, mc_normality
from ..calculus import influence, relative_difference
from ..counterexample import DEFAULT_K_VALUES, sweep
from ..domain import in_U, in_V
from ..equivariance import check_equivariance, random_affine_map, sample_mean_cov
from ..errors import DomainViolation
from ..parameters import Parameter
from ..solver import fit_location_scatter, fit_scatter, fit_univariate
from .command import CommandBase

FUNCTIONAL_PARAMETER = Parameter(
    "functional",
    "location-scatter",
    str,
    "Which functional is evaluated",
    choices=FUNCTIONALS,
)


class FitCommand(CommandBase):
    """Fit the location-scatter (or pure scatter) functional of a sample."""

    name = "fit"
    description = "Determine the t location and scatter of a sample"
    parameters_default = [FUNCTIONAL_PARAMETER]

    def __call__(self) -> dict[str, Any]:
        sample = self.read_sample()
        cfg = self.get_config(sample.dim)
        if self.parameters["functional"] == "scatter":
            matrix, report = fit_scatter(sample, cfg)
            return {"A": matrix.data, "report": report}
        if sample.dim == 1:
            return fit_univariate(sample, cfg).to_dict()
        return fit_location_scatter(sample, cfg).to_dict()


class CheckDomainCommand(CommandBase):
    """Check the existence condition of a functional for a sample."""

    name = "check-domain"
    description = "Test whether the functional exists for a sample"
    parameters_default = [FUNCTIONAL_PARAMETER]

    def __call__(self) -> dict[str, Any]:
        sample = self.read_sample()
        cfg = self.get_config(sample.dim)
        if self.parameters["functional"] == "scatter":
            report = in_U(sample, cfg)
        else:
            report = in_V(sample, cfg)
        if not report.member:
            raise DomainViolation("Sample lies outside the existence domain", report)
        return report.to_dict()


class InfluenceCommand(CommandBase):
    """Evaluate the influence function at a point."""

    name = "influence"
    description = "Influence function of the location-scatter functional"
    parameters_default = [
        Parameter("x", [], list, "Coordinates of the contaminating point"),
        Parameter(
            "method",
            "both",
            str,
            "How the influence function is computed",
            choices=["implicit", "finite-difference", "both"],
        ),
    ]

    def __call__(self) -> dict[str, Any]:
        sample = self.read_sample()
        cfg = self.get_config(sample.dim)
        x = np.array(self.parameters["x"], dtype=float)
        if x.shape != (sample.dim,):
            raise ValueError(f"Point needs {sample.dim} coordinates")

        estimate = fit_location_scatter(sample, cfg)
        method = self.parameters["method"]
        result: dict[str, Any] = {"x": x}
        if method in {"implicit", "both"}:
            result["implicit"] = influence(sample, cfg, x, estimate=estimate)
        if method in {"finite-difference", "both"}:
            result["finite_difference"] = influence(
                sample, cfg, x, method="finite-difference", estimate=estimate
            )
        if method == "both":
            result["relative_difference"] = relative_difference(
                result["implicit"], result["finite_difference"]
            )
        return result


class McNormalityCommand(CommandBase):
    """Simulate the scaled estimation error of the functional."""

    name = "mc-normality"
    description = "Monte-Carlo distribution of the scaled estimation error"
    parameters_default = [
        FUNCTIONAL_PARAMETER,
        Parameter("n", 200, int, "Size of each simulated sample"),
        Parameter("replicates", 100, int, "Number of simulated samples"),
        Parameter("tail_radius", None, float, "Radius of the optional tail condition"),
        Parameter("delta", 0.1, float, "Parameter of the uniformity check"),
        Parameter("table", False, bool, "Include the per-coordinate summary table"),
    ]

    def __call__(self) -> dict[str, Any]:
        sample = self.read_sample()
        cfg = self.get_config(sample.dim)
        report = mc_normality(
            sample,
            cfg,
            n=self.parameters["n"],
            R=self.parameters["replicates"],
            seed=self.parameters["seed"],
            functional=self.parameters["functional"],
            tail_radius=self.parameters["tail_radius"],
            delta=self.parameters["delta"],
        )
        result = report.to_dict()
        if self.parameters["table"]:
            result["table"] = report.to_dataframe().to_dict(orient="records")
        return result


class EquivarianceTestCommand(CommandBase):
    """Apply random affine maps and measure the equivariance defects."""

    name = "equivariance-test"
    description = "Check affine equivariance of the location-scatter functional"
    parameters_default = [
        Parameter("maps", 10, int, "Number of random affine maps"),
    ]

    def __call__(self) -> dict[str, Any]:
        sample = self.read_sample()
        cfg = self.get_config(sample.dim)
        rng = np.random.default_rng(self.parameters["seed"])
        mu_defects, sigma_defects = [], []
        for _ in range(self.parameters["maps"]):
            f = random_affine_map(sample.dim, rng)
            mu_defect, sigma_defect = check_equivariance(sample, cfg, f)
            mu_defects.append(mu_defect)
            sigma_defects.append(sigma_defect)
        mean, cov = sample_mean_cov(sample)
        return {
            "mu_defects": mu_defects,
            "sigma_defects": sigma_defects,
            "max_mu_defect": max(mu_defects, default=0.0),
            "max_sigma_defect": max(sigma_defects, default=0.0),
            "sample_mean": mean,
            "sample_covariance": cov.data,
        }


class CounterexampleCommand(CommandBase):
    """Fit the two planar sequences with a common weak limit."""

    name = "counterexample"
    description = "Scatter entries of two weakly converging sequences of laws"
    takes_input = False
    parameters_default = [
        Parameter("k_max", max(DEFAULT_K_VALUES), int, "Largest value of k"),
    ]

    def __call__(self) -> dict[str, Any]:
        cfg = self.get_config(2)
        result = sweep(cfg, k_max=self.parameters["k_max"])
        return result.to_dict()


class GcDiagnosticCommand(CommandBase):
    """Compare empirical and population objectives uniformly on a grid."""

    name = "gc-diagnostic"
    description = "Uniform deviation of empirical objectives for growing samples"
    parameters_default = [
        Parameter("radius", 0.5, float, "Radius of the parameter grid"),
        Parameter("grid_size", 100, int, "Number of grid points"),
        Parameter("n_list", [100, 1000, 10000], list, "Sample sizes"),
        Parameter("n_repeats", 1, int, "Number of draws averaged per sample size"),
    ]

    def __call__(self) -> dict[str, Any]:
        sample = self.read_sample()
        cfg = self.get_config(sample.dim)
        result = gc_diagnostic(
            sample,
            cfg,
            radius=self.parameters["radius"],
            grid_size=self.parameters["grid_size"],
            n_list=[int(n) for n in self.parameters["n_list"]],
            seed=self.parameters["seed"],
            n_repeats=self.parameters["n_repeats"],
        )
        return result.to_dict()


COMMANDS: dict[str, type[CommandBase]] = {
    cls.name: cls  # type: ignore
    for cls in [
        FitCommand,
        CheckDomainCommand,
        InfluenceCommand,
        McNormalityCommand,
        EquivarianceTestCommand,
        CounterexampleCommand,
        GcDiagnosticCommand,
    ]
}
"""dict: the commands available on the command line, indexed by name"""
