"""
Linear-scan reference answers for every exact primitive and the bounds of
the approximate engines.
"""

from typing import Optional, Tuple

import numpy as np

from pyrangeclust.geometry.cells import CellId, grid_coords
from pyrangeclust.geometry.points import Rect
from pyrangeclust.solvers.cost import CostKind, nearest_distances, pairwise_distances, phi
from pyrangeclust.solvers.primitives import seb


def scan_mask(points: np.ndarray, q: Rect) -> np.ndarray:
    """Rows of `points` inside the closed rectangle `q`."""
    return q.contains(points)


def scan_count(points: np.ndarray, weights: np.ndarray, q: Rect) -> float:
    return float(weights[scan_mask(points, q)].sum())


def scan_members(points: np.ndarray, q: Rect) -> np.ndarray:
    return np.flatnonzero(scan_mask(points, q))


def scan_report_one(points: np.ndarray, q: Rect) -> Optional[int]:
    """Lowest row index inside `q`."""
    members = scan_members(points, q)
    return int(members[0]) if len(members) else None


def scan_extremes(points: np.ndarray, q: Rect) -> Optional[Tuple[np.ndarray, np.ndarray]]:
    inside = points[scan_mask(points, q)]
    if not len(inside):
        return None
    return inside.min(axis=0), inside.max(axis=0)


def scan_cell_mask(points: np.ndarray, cell: CellId, q: Rect) -> np.ndarray:
    """Rows in both `q` and the half-open cell."""
    in_cell = np.all(grid_coords(points, cell.level) == np.asarray(cell.coords), axis=1)
    return in_cell & scan_mask(points, q)


def scan_cell_count(points: np.ndarray, weights: np.ndarray, cell: CellId, q: Rect) -> float:
    return float(weights[scan_cell_mask(points, cell, q)].sum())


def scan_radius(points: np.ndarray, centers: np.ndarray) -> float:
    """Largest distance from a point to its nearest center."""
    if not len(points):
        return 0.0
    return float(nearest_distances(points, centers).max())


def scan_diameter(points: np.ndarray) -> float:
    if len(points) <= 1:
        return 0.0
    return float(pairwise_distances(points, points).max())


def scan_enclosing_radius(points: np.ndarray) -> float:
    """Radius of the smallest enclosing ball, by the exact randomized algorithm."""
    return float(seb(points)[1])


def coreset_deviation(points: np.ndarray, weights: np.ndarray, core_points: np.ndarray,
                      core_weights: np.ndarray, centers: np.ndarray, kind: CostKind) -> float:
    """
    Relative cost error of a coreset for one center set.

    Returns
    -------
    float
        |phi(S, C) - phi(P, C)| / phi(P, C); 0 when both costs vanish and
        infinity when only the coreset cost does not.
    """
    full = phi(points, centers, kind, weights)
    approx = phi(core_points, centers, kind, core_weights)
    if full == 0.0:
        return 0.0 if approx == 0.0 else float("inf")
    return abs(approx - full) / full


def displacement(points: np.ndarray, core_points: np.ndarray) -> float:
    """Largest distance from a point to the coreset."""
    if not len(points):
        return 0.0
    if not len(core_points):
        return float("inf")
    return float(nearest_distances(points, core_points).max())
