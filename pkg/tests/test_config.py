"""
.. codeauthor:: David Zwicker <david.zwicker@ds.mpg.de>
"""

import numpy as np
import pytest

from helpers import four_point_sample
from tscatter.asymptotics import mc_normality
from tscatter.config import (
    DEFAULT_CONFIG,
    THREADS_ENV,
    Config,
    config,
    get_config,
    thread_count,
)
from tscatter.model import TConfig


def test_config():
    """Test the package configuration and its keys."""
    conf1 = get_config(load_user_config=False)
    conf2 = conf1.copy()

    for c in [conf1, conf2]:
        assert c["num_threads"] == 1
        assert c["progress"] is False
        assert set(c.to_dict()) == {"num_threads", "progress"}
        assert "num_threads" in repr(c)

    assert conf1 is not conf2
    conf2["num_threads"] = "4"
    assert conf1["num_threads"] == 1
    assert conf2["num_threads"] == 4
    conf2["progress"] = "yes"
    assert conf2["progress"] is True

    with pytest.raises(KeyError):
        conf1["undefined"] = 2
    with pytest.raises(KeyError):
        get_config({"undefined": 2}, load_user_config=False)
    with pytest.raises(ValueError):
        conf1["num_threads"] = "many"
    with pytest.raises(RuntimeError):
        del conf1["num_threads"]


def test_config_contexts():
    """Test context manager temporarily changing configuration."""
    c = get_config({"num_threads": 2}, load_user_config=False)
    assert c["num_threads"] == 2

    with c({"num_threads": 3}):
        assert c["num_threads"] == 3
        with c(num_threads=4, progress=True):
            assert c["num_threads"] == 4
            assert c["progress"] is True
        assert c["num_threads"] == 3
        assert c["progress"] is False
    assert c["num_threads"] == 2


def test_config_io(tmp_path):
    """Test storing the configuration in a YAML file."""
    path = tmp_path / "config.yaml"
    conf1 = Config(DEFAULT_CONFIG)
    conf2 = conf1.copy()
    conf1["num_threads"] = 3
    conf1.save(path)

    assert conf2["num_threads"] == 1
    conf2.load(path)
    assert conf2["num_threads"] == 3
    assert conf2["progress"] is False


def test_thread_count():
    """Test that the environment variable caps the number of threads."""
    assert thread_count(3, environ={}) == 3
    assert thread_count(0, environ={}) == 1
    assert thread_count(8, environ={THREADS_ENV: "2"}) == 2
    assert thread_count(1, environ={THREADS_ENV: "4"}) == 1
    assert thread_count(5, environ={THREADS_ENV: "0"}) == 1
    assert thread_count(5, environ={THREADS_ENV: "many"}) == 5

    with config(num_threads=6):
        assert thread_count(environ={}) == 6
        assert thread_count(environ={THREADS_ENV: "2"}) == 2
    assert thread_count(environ={}) == config["num_threads"]


def test_config_threads_in_monte_carlo():
    """Test that the configured number of threads yields identical reports."""
    sample = four_point_sample()
    cfg = TConfig(2, 2)
    serial = mc_normality(sample, cfg, n=60, R=12, seed=5, num_threads=1)
    with config(num_threads=3):
        parallel = mc_normality(sample, cfg, n=60, R=12, seed=5)
    np.testing.assert_array_equal(serial.scaled_errors, parallel.scaled_errors)
    assert serial.to_dict() == parallel.to_dict()
