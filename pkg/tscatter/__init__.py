"""Location and scatter functionals of the elliptically symmetric t model.

.. codeauthor:: David Zwicker <david.zwicker@ds.mpg.de>
"""

# determine the package version
try:
    # try reading version of the automatically generated module
    from ._version import __version__
except ImportError:
    # determine version automatically from CVS information
    from importlib.metadata import PackageNotFoundError, version

    try:
        __version__ = version("tscatter")
    except PackageNotFoundError:
        # package is not installed, so we cannot determine any version
        __version__ = "unknown"
    del PackageNotFoundError, version  # clean name space


from .config import config
from .domain import in_U, in_V
from .errors import *
from .model import Sample, TConfig, embed, lift_sample, unembed
from .solver import fit_location_scatter, fit_scatter, fit_univariate
