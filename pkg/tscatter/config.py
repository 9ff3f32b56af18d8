"""Handles package-wide configuration variables.

.. autosummary::
   :nosignatures:

   Config
   get_config
   thread_count

.. codeauthor:: David Zwicker <david.zwicker@ds.mpg.de>
"""

from __future__ import annotations

import collections
import contextlib
import logging
import os
from pathlib import Path
from typing import Any, Mapping, Sequence

from .parameters import Parameter

_logger = logging.getLogger(__name__)

SCHEMA = "tscatter/1"
"""str: identifier of the JSON report format"""

THREADS_ENV = "TSCATTER_THREADS"
"""str: environment variable capping internal parallelism"""


class Config(collections.UserDict):
    """Class handling the package configuration.

    Only the keys defined by the default parameters can be set and values are
    converted to the type of their parameter.
    """

    def __init__(self, default: Sequence[Parameter] | None = None):
        """
        Args:
            default (sequence of :class:`~tscatter.parameters.Parameter`, optional):
                Default configuration values, which also define the keys that can be
                set in the configuration
        """
        self._default = list(default or [])
        super().__init__()
        for param_obj in self._default:
            self.data[param_obj.name] = param_obj.convert()

    def _parameter(self, key: str) -> Parameter:
        for param_obj in self._default:
            if param_obj.name == key:
                return param_obj
        raise KeyError(f"{key} is not a configuration parameter")

    def load(self, path: str | Path):
        """Load configuration from yaml file."""
        import yaml

        with Path(path).open() as fp:
            data = yaml.safe_load(fp)
        if data:
            self.update(data)

    def save(self, path: str | Path):
        """Save configuration to yaml file."""
        import yaml

        with Path(path).open("w") as fp:
            yaml.safe_dump(self.to_dict(), fp)

    def __setitem__(self, key: str, value):
        """Update item `key` with `value`"""
        self.data[key] = self._parameter(key).convert(value)

    def __delitem__(self, key: str):
        raise RuntimeError("Configuration parameters cannot be removed")

    def copy(self) -> Config:
        """Return a copy of the configuration."""
        obj = self.__class__(self._default)
        obj.update(self)
        return obj

    def to_dict(self) -> dict[str, Any]:
        """Convert the configuration to a simple dictionary.

        Returns:
            dict: A representation of the configuration in a normal :class:`dict`.
        """
        return dict(self.items())

    def __repr__(self) -> str:
        """Represent the configuration as a string."""
        return f"{self.__class__.__name__}({repr(self.to_dict())})"

    @contextlib.contextmanager
    def __call__(self, values: dict[str, Any] | None = None, **kwargs):
        """Context manager temporarily changing the configuration.

        Args:
            values (dict): New configuration parameters
            **kwargs: New configuration parameters
        """
        data_initial = self.to_dict()
        if values is not None:
            self.update(values)
        self.update(kwargs)
        try:
            yield
        finally:
            self.update(data_initial)


DEFAULT_CONFIG = [
    Parameter(
        "num_threads",
        1,
        int,
        "Number of threads used for independent solves, e.g., Monte-Carlo "
        f"replicates. The environment variable `{THREADS_ENV}` caps this value.",
    ),
    Parameter("progress", False, bool, "Show progress bars for long loops"),
]


def thread_limit(environ: Mapping[str, str] | None = None) -> int | None:
    """Read the cap on internal parallelism from the environment.

    Args:
        environ (dict):
            Environment variables; defaults to :data:`os.environ`

    Returns:
        int: the largest permitted number of threads or `None` if there is no cap
    """
    env = os.environ if environ is None else environ
    threads = env.get(THREADS_ENV)
    if not threads:
        return None
    try:
        return max(1, int(threads))
    except ValueError:
        _logger.warning("Ignoring invalid %s=%r", THREADS_ENV, threads)
        return None


def thread_count(
    requested: int | None = None, *, environ: Mapping[str, str] | None = None
) -> int:
    """Number of threads to use for a parallel loop.

    Args:
        requested (int):
            Requested number of threads; defaults to the `num_threads` setting
        environ (dict):
            Environment variables; defaults to :data:`os.environ`

    Returns:
        int: the requested number, capped by the environment variable `TSCATTER_THREADS`
    """
    if requested is None:
        requested = config["num_threads"]
    result = max(1, int(requested))
    cap = thread_limit(environ)
    if cap is not None and cap < result:
        _logger.info("Limiting number of threads from %d to %d", result, cap)
        result = cap
    return result


def get_config(
    config: Mapping[str, Any] | None = None, *, load_user_config: bool = True
) -> Config:
    """Create the package configuration.

    Args:
        config (dict):
            Configuration settings that will be used to update the default config
        load_user_config (bool):
            Determines whether the file `~/.tscatter` is loaded as a YAML document to
            provide user-defined settings.

    Returns:
        :class:`~tscatter.config.Config`: the established configuration
    """
    c = Config(DEFAULT_CONFIG)

    if load_user_config:
        path = Path.home() / ".tscatter"
        if path.is_file():
            c.load(path)

    if config is not None:
        c.update(config)
    return c


config = get_config(load_user_config=False)
"""Config: the configuration used by default throughout the package"""
