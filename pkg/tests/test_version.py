"""
.. codeauthor:: David Zwicker <david.zwicker@ds.mpg.de>
"""

import tscatter


def test_version():
    assert isinstance(tscatter.__version__, str)
