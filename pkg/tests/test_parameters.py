"""
.. codeauthor:: David Zwicker <david.zwicker@ds.mpg.de>
"""

import argparse
import logging
import math
import pickle

import numpy as np
import pytest

from tscatter.parameters import Parameter, Parameterized, auto_type, parse_bool


def test_autotype():
    """Test automatic type conversion."""
    assert auto_type(1) == 1
    assert isinstance(auto_type(1), int)
    assert isinstance(auto_type(1.0), int)
    assert auto_type("1") == 1
    assert auto_type(1.5) == 1.5
    assert auto_type("1.5") == 1.5
    assert isinstance(auto_type("1.0"), float)
    assert auto_type("asdf") == "asdf"
    assert np.isnan(auto_type(math.nan))
    assert auto_type(math.inf) == math.inf


def test_parse_bool():
    """Test the interpretation of boolean values."""
    for value in ["1", "true", "Yes", "on", True, 1]:
        assert parse_bool(value) is True
    for value in ["0", "False", "no", "off", False, 0]:
        assert parse_bool(value) is False
    with pytest.raises(ValueError):
        parse_bool("maybe")


def test_parameters():
    """Test mixing Parameterized."""
    param = Parameter("a", 1, int, "help")
    assert isinstance(str(param), str)
    assert param.option_name == "--a"
    assert Parameter("tol_fp", 1e-9, float).option_name == "--tol-fp"

    param_new = pickle.loads(pickle.dumps(param))
    assert param.__dict__ == param_new.__dict__
    assert param is not param_new

    class Test1(Parameterized):
        parameters_default = [param]

    t = Test1()
    assert t.parameters["a"] == 1
    assert Test1.get_parameter_default("a") == 1
    assert Test1(parameters={"a": "2"}).parameters["a"] == 2

    with pytest.raises(ValueError):
        Test1(parameters={"b": 3})
    ps = t._parse_parameters({"b": 3}, check_validity=False)
    assert ps == {"a": 1, "b": 3}

    class Test2(Test1):
        parameters_default = [Parameter("b", "2", int, "help")]

    t = Test2(parameters={"a": 10})
    assert t.parameters == {"a": 10, "b": 2}
    with pytest.raises(KeyError):
        t.get_parameter_default("c")

    class Test3(Test2):
        parameters_default = {"a": 30}

    assert Test3().parameters == {"a": 30, "b": 2}
    assert Test3.get_parameter_default("a") == 30
    assert Test1.get_parameter_default("a") == 1


def test_parameter_help(capsys):
    """Test how parameters are shown."""

    class TestHelp(Parameterized):
        parameters_default = [
            Parameter("a", 1, int, "random string. More details"),
            Parameter("b", 2.5, float, "another word", hidden=True),
        ]

    TestHelp.show_parameters(description=True)
    out, err = capsys.readouterr()
    assert out == "a: int = 1 (random string)\n"
    assert err == ""
    assert len(TestHelp.get_parameters(include_hidden=True)) == 2


def test_parameter_required():
    """Test required parameter."""

    class TestRequired(Parameterized):
        parameters_default = [Parameter("a", required=True)]

    assert TestRequired({"a": 2}).parameters["a"] == 2
    with pytest.raises(ValueError):
        TestRequired()
    with pytest.raises(ValueError):
        TestRequired({"a": None})


def test_parameter_choices():
    """Test parameter with explicit choices."""

    class TestChoices(Parameterized):
        parameters_default = [Parameter("a", "x", str, choices={"x", "y"})]

    assert TestChoices().parameters["a"] == "x"
    assert TestChoices({"a": "y"}).parameters["a"] == "y"
    with pytest.raises(ValueError):
        TestChoices({"a": "z"})

    with pytest.raises(ValueError):
        Parameter("a", "z", str, choices={"x", "y"})


def test_convert_default_values(caplog):
    """Test how default values are handled."""
    caplog.set_level(logging.WARNING)

    class TestConvert2(Parameterized):
        parameters_default = [Parameter("a", 1, float), Parameter("b", "on", bool)]

    t2 = TestConvert2()
    assert isinstance(t2.parameters["a"], float)
    assert t2.parameters["b"] is True

    caplog.clear()
    Parameter("a", 1, str)
    assert len(caplog.records) == 1
    assert "Default value" in caplog.text

    caplog.clear()
    Parameter("a", math.nan, float)
    assert len(caplog.records) == 0

    with pytest.raises(TypeError):
        Parameter("a", "one", int)


def test_argparser():
    """Test the command line options created for parameters."""
    parser = argparse.ArgumentParser()
    Parameter("tol_fp", 1e-9, float)._argparser_add(parser)
    Parameter("table", False, bool)._argparser_add(parser)
    Parameter("check", True, bool)._argparser_add(parser)
    Parameter("x", [], list)._argparser_add(parser)
    Parameter("input", None, str, hidden=True)._argparser_add(parser)

    args = vars(parser.parse_args([]))
    assert args == {"tol_fp": 1e-9, "table": False, "check": True, "x": []}

    args = parser.parse_args(
        ["--tol-fp", "1e-6", "--table", "--no-check", "--x", "1", "2.5"]
    )
    assert args.tol_fp == 1e-6
    assert args.table is True
    assert args.check is False
    assert args.x == [1, 2.5]
