"""
Suite of tests for the diameter and enclosing-radius engines.
"""

# General imports
from functools import lru_cache

import numpy as np
import pytest
# Module imports
from pyrangeclust.engines.access import IndexAccess
from pyrangeclust.engines.extent import (_boundary_cells, calibrated_eps, diameter_of,
                                         diameter_query, extent_coreset, radius_query)
from pyrangeclust.geometry.points import Rect
from pyrangeclust.index.service import SpatialIndex
from pyrangeclust.utils.data import generate_points
from pyrangeclust.validation import oracles
from pyrangeclust.validation.suites import random_rect


@lru_cache(maxsize=None)
def _index(d: int) -> SpatialIndex:
    return SpatialIndex(generate_points(300, d, "gaussians", m=5, sigma=0.06, seed=90 + d))


def test_calibrated_eps():
    """
    Test the grid accuracy derived from eps.
    """
    assert calibrated_eps(1.0, 2) == pytest.approx(1.0 / 16.0)
    assert calibrated_eps(0.1, 3) < 0.1 / 12.0
    assert calibrated_eps(10.0, 2) < 10.0 / 8.0


def test_boundary_cells_unique():
    """
    Test the enumeration of the boundary of a grid box.
    """
    cells = list(_boundary_cells(np.array([0, 0]), np.array([3, 3]), 2))
    assert len(cells) == 12 == len(set(cells))
    cells = list(_boundary_cells(np.array([1, 1, 1]), np.array([3, 3, 3]), 3))
    assert len(cells) == 26 == len(set(cells))
    flat = list(_boundary_cells(np.array([2, 0]), np.array([2, 3]), 2))
    assert len(flat) == len(set(flat)) == 4


def test_diameter_of():
    """
    Test the full-scan diameter and its attaining pair.
    """
    points = np.array([[0.0, 0.0], [1.0, 0.0], [0.0, 2.0]])
    value, pair = diameter_of(points)
    assert value == pytest.approx(5 ** 0.5)
    assert pair.tolist() == [[1.0, 0.0], [0.0, 2.0]]
    assert diameter_of(points[:1])[0] == 0.0


def test_extent_sandwich():
    """
    Test diameter and radius answers against exact oracles.
    """
    for d in (2, 3):
        index = _index(d)
        rng = np.random.default_rng(95 + d)
        for eps in (0.3, 0.1):
            for _ in range(15):
                q = random_rect(index, rng)
                points = index.locations[oracles.scan_mask(index.locations, q)]
                diameter = diameter_query(index, q, eps)
                radius = radius_query(index, q, eps)
                if not len(points):
                    assert diameter.warning == radius.warning == "empty range"
                    continue
                exact = oracles.scan_diameter(points)
                assert exact / (1 + eps) <= diameter.cost * (1 + 1e-12)
                assert diameter.cost <= exact * (1 + 1e-12)
                enclosing = oracles.scan_enclosing_radius(points)
                assert enclosing <= radius.cost * (1 + 1e-9)
                assert radius.cost <= (1 + eps) * enclosing * (1 + 1e-9) + 1e-15
                assert len(radius.centers) == 1


def test_extent_coreset_subset():
    """
    Test that the extent coreset holds range points only, and the enclosing box.
    """
    index = _index(3)
    q = Rect((0.05, 0.1, 0.0), (0.8, 0.9, 0.7))
    pa = IndexAccess(index, q)
    ext = extent_coreset(pa, 0.2)
    inside = set(oracles.scan_members(index.locations, q).tolist())
    assert set(ext.locations) <= inside
    assert ext.locations == sorted(ext.locations)
    box = oracles.scan_extremes(index.locations, q)
    assert np.array_equal(ext.points.min(axis=0), box[0])
    assert np.array_equal(ext.points.max(axis=0), box[1])
    assert ext.apx == pytest.approx(float(np.linalg.norm(box[1] - box[0])))
    assert ext.displacement > 0
    assert ext.counts["boundary"] > 0


def test_single_location_range():
    """
    Test ranges holding one location.
    """
    index = _index(2)
    point = index.locations[7]
    q = Rect(tuple(point), tuple(point))
    diameter = diameter_query(index, q, 0.1)
    radius = radius_query(index, q, 0.1)
    assert diameter.cost == 0.0 and radius.cost == 0.0
    assert np.array_equal(radius.centers[0], point)
    assert diameter.solver == "scan" and radius.solver == "seb"
