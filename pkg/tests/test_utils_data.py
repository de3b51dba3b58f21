"""
Suite of tests for modules data and misc from subpackage utils
"""

# General imports
import logging

import numpy as np
import pytest
# Module imports
from pyrangeclust.utils import data, misc
from pyrangeclust.utils.exceptions import (BundleFormatError, ConfigurationError, DataError,
                                           DimensionError, EmptyInputError, NonFiniteError)


def test_parse_csv():
    """
    Test CSV parsing with a header, comments and weights.
    """
    text = "x,y\n# comment\n1,2\n3.5,-4\n\n"
    points, weights = data.parse_csv(text)
    assert weights is None
    assert points.tolist() == [[1.0, 2.0], [3.5, -4.0]]

    points, weights = data.parse_csv("0,0,2\n1,1,0.5\n", weighted=True)
    assert points.shape == (2, 2)
    assert weights.tolist() == [2.0, 0.5]


def test_parse_csv_errors():
    """
    Test that malformed inputs name their line.
    """
    with pytest.raises(DataError, match="Line 3"):
        data.parse_csv("1,2\n3,4\n5\n")
    with pytest.raises(DataError, match="Line 2"):
        data.parse_csv("1,2\n3,b\n")
    with pytest.raises(NonFiniteError):
        data.parse_csv("1,2\nnan,4\n")
    with pytest.raises(EmptyInputError):
        data.parse_csv("x,y\n")
    with pytest.raises(DataError, match="Row 2"):
        data.parse_csv("1,2,1\n3,4,0\n", weighted=True)
    with pytest.raises(DimensionError):
        data.check_dimension(np.zeros((3, 1)))
    with pytest.raises(DimensionError):
        data.check_dimension(np.zeros((3, 9)))


def test_format_csv_exact():
    """
    Test that formatted coordinates parse back to the same floats.
    """
    points = np.random.default_rng(3).random((20, 3)) * 1e3 - 17.0
    text = data.format_csv(points)
    assert text.splitlines()[0] == "x1,x2,x3"
    parsed, _ = data.parse_csv(text)
    assert np.array_equal(parsed, points)


def test_bundle_round_trip(tmp_path):
    """
    Test writing and reading an index bundle.
    """
    rng = np.random.default_rng(5)
    points, weights = rng.random((30, 2)), rng.random(30) + 0.5
    path = tmp_path / "points.rcidx"
    data.write_bundle(path, points, weights, {"delta": 0.5}, {"offset": [0, 0], "scale": 1.0})
    loaded, loaded_weights, header = data.read_bundle(path)
    assert np.array_equal(loaded, points)
    assert np.array_equal(loaded_weights, weights)
    assert header["n"] == 30 and header["d"] == 2 and header["weighted"]
    assert header["params"] == {"delta": 0.5}


def test_bundle_errors(tmp_path):
    """
    Test rejection of foreign or truncated bundles.
    """
    foreign = tmp_path / "foreign.bin"
    foreign.write_bytes(b"NOTIT\n{}\n")
    with pytest.raises(BundleFormatError):
        data.read_bundle(foreign)

    path = tmp_path / "short.rcidx"
    data.write_bundle(path, np.zeros((4, 2)), None, {}, {})
    path.write_bytes(path.read_bytes()[:-8])
    with pytest.raises(BundleFormatError):
        data.read_bundle(path)

    with pytest.raises(DataError):
        data.read_bundle(tmp_path / "missing.rcidx")


def test_generate_points():
    """
    Test reproducibility of synthetic datasets.
    """
    first = data.generate_points(50, 3, "gaussians", m=4, sigma=0.01, seed=9)
    second = data.generate_points(50, 3, "gaussians", m=4, sigma=0.01, seed=9)
    assert first.shape == (50, 3)
    assert np.array_equal(first, second)
    uniform = data.generate_points(40, 2, seed=1)
    assert uniform.min() >= 0.0 and uniform.max() < 1.0
    with pytest.raises(DataError):
        data.generate_points(5, 2, "spirals")


def test_load_params(tmp_path):
    """
    Test YAML parameters with command-line overrides.
    """
    path = tmp_path / "params.yaml"
    path.write_text("delta: 0.25\nk_max: 8\n", encoding="utf-8")
    params = misc.load_params(path, {"k_max": 4, "seed": None})
    assert params == {"delta": 0.25, "k_max": 4}
    assert misc.load_params(None, {"seed": 3}) == {"seed": 3}

    listing = tmp_path / "list.yaml"
    listing.write_text("- 1\n- 2\n", encoding="utf-8")
    with pytest.raises(ConfigurationError):
        misc.load_params(listing)
    with pytest.raises(ConfigurationError):
        misc.load_params(tmp_path / "absent.yaml")


def test_environment(monkeypatch):
    """
    Test the environment-backed settings.
    """
    monkeypatch.delenv("RC_THREADS", raising=False)
    assert misc.thread_count() == 1
    monkeypatch.setenv("RC_THREADS", "4")
    assert misc.thread_count() == 4
    assert misc.get_configs(["RC_THREADS"]) == {"RC_THREADS": "4"}
    monkeypatch.setenv("RC_THREADS", "0")
    with pytest.raises(ConfigurationError):
        misc.thread_count()
    monkeypatch.setenv("RC_LOG_LEVEL", "debug")
    assert misc.log_level() == logging.DEBUG
    monkeypatch.setenv("RC_LOG_LEVEL", "chatty")
    with pytest.raises(ConfigurationError):
        misc.log_level()
    with pytest.raises(TypeError):
        misc.get_configs(3)
