"""Command line interface wrapping the library functions.

.. autosummary::
   :nosignatures:

   ~tscatter.run.command.CommandBase
   ~tscatter.run.commands.COMMANDS
   ~tscatter.run.io.read_sample_csv
   ~tscatter.run.io.write_sample_csv
   ~tscatter.run.results.Result
   ~tscatter.run.__main__.main

.. codeauthor:: David Zwicker <david.zwicker@ds.mpg.de>
"""

from .command import CommandBase
from .commands import COMMANDS
from .io import read_sample_csv, write_sample_csv
from .results import Result
