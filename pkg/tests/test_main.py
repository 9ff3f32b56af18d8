"""
.. codeauthor:: David Zwicker <david.zwicker@ds.mpg.de>
"""

import json
import os
import subprocess as sp
import sys
from pathlib import Path

PACKAGEPATH = Path(__file__).parents[1].resolve()
assert PACKAGEPATH.is_dir()


def _run(*args):
    """Run the package as a module and return the finished process."""
    env = os.environ.copy()
    env["PYTHONPATH"] = str(PACKAGEPATH) + ":" + env.get("PYTHONPATH", "")
    cmd_args = (sys.executable, "-m", "tscatter") + args
    return sp.run(cmd_args, env=env, capture_output=True, timeout=60)


def test_empty_main():
    """Test that a missing command is reported."""
    proc = _run()
    assert proc.returncode == 1
    assert b"usage_error" in proc.stderr


def test_main():
    """Test the __main__ module."""
    proc = _run("counterexample", "--nu", "3", "--k-max", "2")
    assert proc.returncode == 0
    assert proc.stderr == b""
    report = json.loads(proc.stdout)
    assert report["schema"] == "tscatter/1"
    assert [row["k"] for row in report["result"]["rows"]] == [1, 2]
