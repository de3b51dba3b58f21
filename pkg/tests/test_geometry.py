"""
Suite of tests for the geometry subpackage: standard lengths, rectangles,
normalization and quadtree cells.
"""

# General imports
import math

import numpy as np
import pytest
# Module imports
from pyrangeclust.geometry.cells import (CellId, FaceKind, cell_of_point, classify_cell,
                                         grid_cluster, grid_coords, interleave, morton_key)
from pyrangeclust.geometry.points import (Normalizer, Rect, StandardLength, normalize,
                                          sceil, sfloor)
from pyrangeclust.utils.exceptions import EmptyInputError, NonFiniteError


def test_standard_lengths():
    """
    Test rounding to powers of two.
    """
    assert sfloor(0.3) == StandardLength(2)
    assert sceil(0.3) == StandardLength(1)
    assert sfloor(0.25) == sceil(0.25) == StandardLength(2)
    assert sfloor(3.0) == sceil(1.5) == StandardLength(0)
    for x in (1e-9, 0.001, 0.7, 0.999):
        assert sfloor(x).value <= x < 2 * sfloor(x).value
        assert sceil(x).value / 2 < x <= sceil(x).value
    assert StandardLength(3) < StandardLength(1)
    assert StandardLength(2).half() == StandardLength(3)
    assert StandardLength(0).double() == StandardLength(0)
    with pytest.raises(ValueError):
        sfloor(0.0)
    with pytest.raises(ValueError):
        StandardLength(-1)


def test_rect():
    """
    Test closed containment and intersections of rectangles.
    """
    q = Rect.from_bounds([0, 0], [1, 2])
    mask = q.contains(np.array([[0.0, 2.0], [1.0, 0.5], [1.1, 0.5]]))
    assert mask.tolist() == [True, True, False]
    assert q.intersection(Rect.from_bounds([0.5, 1], [3, 3])) == Rect((0.5, 1.0), (1.0, 2.0))
    assert q.intersection(Rect.from_bounds([2, 2], [3, 3])) is None
    assert Rect.from_bounds([1, 1], [1, 1]).contains(np.array([1.0, 1.0])).all()
    with pytest.raises(ValueError):
        Rect.from_bounds([1, 0], [0, 1])
    with pytest.raises(ValueError):
        Rect.from_bounds([0, 0], [math.inf, 1])


def test_normalize():
    """
    Test the map into the unit root square and back.
    """
    points = np.random.default_rng(0).normal(size=(100, 3)) * 50.0 + 10.0
    normalizer, unit = normalize(points)
    assert unit.min() >= 0.0 and unit.max() < 1.0
    assert np.allclose(normalizer.from_unit(unit), points)
    assert normalizer.length_from_unit(2.0, 2) == 2.0 / normalizer.scale ** 2

    same, flat = normalize(np.ones((4, 2)))
    assert same == Normalizer((1.0, 1.0), 1.0)
    assert np.array_equal(flat, np.zeros((4, 2)))
    with pytest.raises(EmptyInputError):
        normalize(np.empty((0, 2)))
    with pytest.raises(NonFiniteError):
        normalize(np.array([[0.0, np.nan]]))


def test_morton_order():
    """
    Test the interleave and the nesting of Morton intervals.
    """
    assert interleave((1, 0)) == 2
    assert interleave((0, 1)) == 1
    assert interleave((3, 3)) == 15
    cell = CellId(3, (5, 2))
    lo, hi = morton_key(cell)
    for child in cell.children():
        clo, chi = morton_key(child)
        assert lo <= clo < chi <= hi
        assert child.ancestor(3) == cell
        assert cell.contains(child)
    keys = sorted(morton_key(c) for c in cell.children())
    assert all(a[1] == b[0] for a, b in zip(keys, keys[1:]))


def test_grid_cells():
    """
    Test grid coordinates, point location and grid clusters.
    """
    points = np.array([[0.0, 0.5], [0.24, 0.75], [1.0, 0.999]])
    assert grid_coords(points, 2).tolist() == [[0, 2], [0, 3], [3, 3]]
    cell = cell_of_point(np.array([0.3, 0.6]), StandardLength(1))
    assert cell == CellId(1, (0, 1))
    assert cell.contains_point(np.array([0.3, 0.6]))
    lo, hi = cell.box()
    assert lo.tolist() == [0.0, 0.5] and hi.tolist() == [0.5, 1.0]
    assert len(grid_cluster(CellId(1, (0, 0)))) == 4
    assert len(grid_cluster(CellId(2, (1, 2)))) == 9
    assert len(grid_cluster(CellId(3, (0, 4, 7)))) == 12


def test_classify_cell():
    """
    Test the face classes of a cell against query rectangles.
    """
    cell = CellId(1, (0, 0))
    assert classify_cell(CellId(0, (0, 0)), Rect.unit(2)).kind == FaceKind.INSIDE
    assert classify_cell(cell, Rect.from_bounds([0.6, 0.6], [0.9, 0.9])).kind == FaceKind.OUTSIDE
    assert classify_cell(cell, Rect.from_bounds([0.1, 0.1], [0.2, 0.2])).kind == FaceKind.CORNER
    slab = classify_cell(cell, Rect.from_bounds([0.1, -1.0], [0.2, 2.0]))
    assert slab.kind == FaceKind.AVOIDS_BELOW
    assert slab.t == 1 and slab.witness == (1,)
    assert slab.crossing(2) == (0,)
    assert cell.meets(Rect.from_bounds([0.5, 0.5], [0.7, 0.7]))
