"""
Approximate diameter and enclosing radius of the points in a range.

The extent coreset keeps, on a grid laid over the smallest enclosing box
of the range, one point from every nonempty boundary cell and, for every
axis and every column of interior cells along it, one point from the
lowest and the highest nonempty cell of the column.
"""

import logging
import math
from dataclasses import dataclass, field
from itertools import product
from typing import Iterator, List, Optional, Tuple

import numpy as np

from pyrangeclust.engines.access import EngineResult, IndexAccess, QueryStats
from pyrangeclust.geometry.cells import CellId, cell_of_point, grid_coords
from pyrangeclust.geometry.points import L_MAX, Rect, StandardLength, sfloor
from pyrangeclust.index.quadtree import CellRef
from pyrangeclust.solvers.cost import Coreset, CostKind, pairwise_distances
from pyrangeclust.solvers.primitives import seb


def calibrated_eps(eps: float, dim: int) -> float:
    """Grid accuracy giving a (1 + eps) guarantee when applied to the box diagonal."""
    return eps / (4.0 * dim * (1.0 + eps))


@dataclass
class ExtentCoreset:
    """
    Unweighted subset of the range used for extent answers.

    Attributes
    ----------
    locations: list[int]
        Location indices, increasing.
    points: np.ndarray
    apx: float
        Diagonal of the smallest enclosing box, between D and sqrt(d) D.
    grid_side: StandardLength | None
        `None` when `apx` is 0.
    """

    locations: List[int]
    points: np.ndarray
    apx: float
    grid_side: Optional[StandardLength] = None
    counts: dict = field(default_factory=dict)

    def __len__(self) -> int:
        return len(self.locations)

    @property
    def displacement(self) -> float:
        """Largest distance from a point of the range to the cell of its representative."""
        if self.grid_side is None:
            return 0.0
        return math.sqrt(self.points.shape[1]) * self.grid_side.value


def _boundary_cells(lo: np.ndarray, hi: np.ndarray, level: int) -> Iterator[CellId]:
    """Cells of the box grid with at least one coordinate on an end of its range."""
    dim = len(lo)
    for axis in range(dim):
        ranges = []
        for other in range(dim):
            if other < axis:
                ranges.append(range(lo[other] + 1, hi[other]))
            elif other == axis:
                ranges.append(sorted({int(lo[axis]), int(hi[axis])}))
            else:
                ranges.append(range(lo[other], hi[other] + 1))
        for coords in product(*ranges):
            yield CellId(level, tuple(int(c) for c in coords))


def extent_coreset(pa: IndexAccess, eps: float) -> ExtentCoreset:
    """
    Points of the range whose diameter and enclosing ball approximate the
    range's.

    Parameters
    ----------
    pa: IndexAccess
    eps: float

    Returns
    -------
    ExtentCoreset
        Empty for an empty range, one point when the range holds a single
        location, otherwise the points of the nonempty boundary cells, the
        extreme cells of every interior column and the points attaining
        the enclosing box.
    """
    ext = pa.extremes()
    if ext is None:
        return ExtentCoreset([], np.empty((0, pa.dim)), 0.0)
    apx = float(np.linalg.norm(ext.hi - ext.lo))
    if apx == 0.0:
        first = ext.low[0]
        return ExtentCoreset([first], pa.point(first)[None, :], 0.0)
    side = sfloor(min(1.0, calibrated_eps(eps, pa.dim) * apx))
    level = min(side.exponent, L_MAX)
    box = grid_coords(np.vstack([ext.lo, ext.hi]), level)
    clo, chi = box[0], box[1]
    chosen = set(ext.low) | set(ext.high)
    boundary = 0
    for cell in _boundary_cells(clo, chi, level):
        node = pa.index.locate(cell)
        if node is None:
            continue
        first = pa.report_one(CellRef(cell, node))
        if first is not None:
            chosen.add(first)
            boundary += 1
    columns = 0
    g = StandardLength(level).value
    for axis in range(pa.dim):
        if chi[axis] - clo[axis] < 2:
            continue
        lo_val = (clo[axis] + 1) * g
        hi_val = float(np.nextafter(chi[axis] * g, -np.inf))
        others = [i for i in range(pa.dim) if i != axis]
        ranges = [range(clo[i] + 1, chi[i]) for i in others]
        for coords in product(*ranges):
            column = CellId(level, tuple(int(c) for c in coords))
            for largest in (False, True):
                hit = pa.axis_extreme(axis, column, lo_val, hi_val, largest)
                if hit is None:
                    break
                cell = cell_of_point(pa.point(hit), StandardLength(level))
                node = pa.index.locate(cell)
                first = pa.query(CellRef(cell, node))[1]
                chosen.add(hit if first is None else first)
                columns += 1
    locations = sorted(int(i) for i in chosen)
    logging.debug(f"Extent coreset: {len(locations)} points, {boundary} boundary cells, "
                  f"{columns} column extremes, side 2^-{level}")
    return ExtentCoreset(locations, np.array([pa.point(i) for i in locations]), apx,
                         StandardLength(level), {"boundary": boundary, "columns": columns})


def diameter_of(points: np.ndarray) -> Tuple[float, np.ndarray]:
    """Largest pairwise distance and the pair attaining it, by a full scan."""
    if points.shape[0] <= 1:
        return 0.0, points[:1]
    dist = pairwise_distances(points, points)
    a, b = np.unravel_index(int(np.argmax(dist)), dist.shape)
    a, b = sorted((int(a), int(b)))
    return float(dist[a, b]), points[[a, b]]


def _as_coreset(ext: ExtentCoreset, eps: float) -> Coreset:
    return Coreset(ext.points, np.ones(len(ext)), CostKind.center, 1, eps, "extent",
                   {"apx": ext.apx, "displacement": ext.displacement})


def _empty(index, kind: str, eps: float, stats: QueryStats) -> EngineResult:
    logging.warning(f"Empty range for {kind} query")
    return EngineResult(np.empty((0, index.dim)), 0.0, CostKind.center, "none",
                        Coreset.empty(index.dim, CostKind.center, 1, eps, "extent"), stats,
                        "empty range")


def diameter_query(index, q: Rect, eps: float, stats: Optional[QueryStats] = None) \
        -> EngineResult:
    """
    Approximate diameter D of the points in a range.

    Returns
    -------
    EngineResult
        Cost in [D / (1 + eps), D], measured on the extent coreset; the
        centers are the two coreset points attaining it.
    """
    pa = IndexAccess(index, q, stats)
    ext = extent_coreset(pa, eps)
    if not len(ext):
        return _empty(index, "diameter", eps, pa.stats)
    value, pair = diameter_of(ext.points)
    pa.stats.extra.update({"coreset_size": len(ext), "apx": ext.apx})
    return EngineResult(pair, value, CostKind.center, "scan", _as_coreset(ext, eps), pa.stats)


def radius_query(index, q: Rect, eps: float, stats: Optional[QueryStats] = None) \
        -> EngineResult:
    """
    Approximate radius r of the smallest ball enclosing the points in a range.

    Returns
    -------
    EngineResult
        The enclosing ball of the extent coreset inflated by the cell
        diagonal, so r <= cost <= (1 + eps) r; its center is the single
        reported center.
    """
    pa = IndexAccess(index, q, stats)
    ext = extent_coreset(pa, eps)
    if not len(ext):
        return _empty(index, "radius", eps, pa.stats)
    center, radius = seb(ext.points)
    pa.stats.extra.update({"coreset_size": len(ext), "apx": ext.apx,
                           "displacement": ext.displacement})
    return EngineResult(np.asarray(center)[None, :], radius + ext.displacement, CostKind.center,
                        "seb", _as_coreset(ext, eps), pa.stats)
