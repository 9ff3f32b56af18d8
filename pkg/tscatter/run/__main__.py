"""Command line entry point.

The first argument selects one of the commands in
:data:`~tscatter.run.commands.COMMANDS`; the remaining arguments are parsed by that
command. The JSON report is written to standard output unless `--output` is given.
Errors are reported on standard error as a JSON object with the keys `code`,
`message` and, for domain violations, `witness`.

.. codeauthor:: David Zwicker <david.zwicker@ds.mpg.de>
"""

from __future__ import annotations

import json
import logging
import sys
from typing import Sequence

from ..errors import DomainViolation, NoConvergence, TScatterError

_logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_DOMAIN_VIOLATION = 2
EXIT_NO_CONVERGENCE = 3


def _report_error(data: dict) -> None:
    from .results import ReportEncoder

    print(json.dumps(data, cls=ReportEncoder, sort_keys=True), file=sys.stderr)


def main(argv: Sequence[str] | None = None) -> int:
    """Run a command and return the exit code.

    Args:
        argv (list): command line arguments without the program name

    Returns:
        int: 0 on success, 2 if the law violates the existence condition, 3 if the
        solver does not converge, and 1 for all other errors
    """
    from .commands import COMMANDS

    args = list(sys.argv[1:] if argv is None else argv)
    if not args or args[0] not in COMMANDS:
        names = ", ".join(COMMANDS)
        message = f"Require a command as first argument, one of {names}"
        _report_error({"code": "usage_error", "message": message})
        return EXIT_ERROR

    name, rest = args[0], args[1:]
    command_cls = COMMANDS[name]
    try:
        cmd = command_cls.from_command_line(rest, name=f"tscatter {name}")
        result = cmd.get_result()
        if cmd.output:
            cmd.write_result(result=result)
        else:
            sys.stdout.write(result.to_json())
    except SystemExit as err:
        # argparse exits after printing help or usage errors
        return EXIT_OK if err.code in {0, None} else EXIT_ERROR
    except DomainViolation as err:
        _report_error(err.to_dict())
        return EXIT_DOMAIN_VIOLATION
    except NoConvergence as err:
        _report_error(err.to_dict())
        return EXIT_NO_CONVERGENCE
    except TScatterError as err:
        _report_error(err.to_dict())
        return EXIT_ERROR
    except (ValueError, OSError, KeyError) as err:
        _logger.debug("Command failed", exc_info=True)
        _report_error({"code": "error", "message": str(err)})
        return EXIT_ERROR
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
