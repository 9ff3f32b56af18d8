"""Allows running the command line interface with `python -m tscatter`.

.. codeauthor:: David Zwicker <david.zwicker@ds.mpg.de>
"""

import sys

from tscatter.run.__main__ import main

if __name__ == "__main__":
    sys.exit(main())
