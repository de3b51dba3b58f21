"""
k-center range clustering: a certified lower bound on the optimum from
counts of nonempty cells, then one point per nonempty cell of side about
eps times that bound.
"""

import logging
import math
from dataclasses import dataclass, field
from typing import List, Optional

import numpy as np

from pyrangeclust.engines.access import EngineResult, IndexAccess, QueryStats
from pyrangeclust.geometry.points import L_MAX, Rect, StandardLength, sfloor
from pyrangeclust.index.quadtree import CellRef
from pyrangeclust.solvers.cost import Coreset, CostKind
from pyrangeclust.solvers.dispatch import solve


@dataclass
class LowerBoundResult:
    """
    Outcome of the lower-bound phase.

    Attributes
    ----------
    lb: StandardLength | None
        A length at most the optimal k-center radius; `None` when the
        range is small enough to be answered from its points directly.
    cover: list[CellRef]
        Nonempty cells of side 2 lb, pairwise disjoint, holding the whole
        range; at most k 3^d of them.
    exact_points: np.ndarray | None
        The distinct locations of the range when `lb` is `None`.
    """

    lb: Optional[StandardLength]
    cover: List[CellRef] = field(default_factory=list)
    exact_points: Optional[np.ndarray] = None


def _nonempty(pa: IndexAccess, refs: List[CellRef]) -> List[CellRef]:
    return [ref for ref in refs if not pa.empty_cell(ref)]


def kcenter_lower_bound(pa: IndexAccess, k: int) -> LowerBoundResult:
    """
    Largest standard length alpha with more than k 3^d nonempty cells of side alpha.

    A ball of radius below alpha meets at most 3^d cells of side alpha, so
    such an alpha is at most the optimal radius.

    Parameters
    ----------
    pa: IndexAccess
        Nonempty range.
    k: int

    Returns
    -------
    LowerBoundResult
        The cover is the nonempty cells of the level above `lb`. Ranges with
        at most k locations, or too few nonempty cells even at the finest
        level, come back with their distinct locations instead.
    """
    if pa.location_count() <= k:
        return LowerBoundResult(None, exact_points=pa.distinct()[0])
    threshold = k * 3 ** pa.dim
    root = pa.index.tree.root
    frontier = _nonempty(pa, [CellRef(root.cell.ancestor(0), root)])
    for level in range(1, L_MAX + 1):
        refs: List[CellRef] = []
        for ref in frontier:
            refs.extend(pa.subdivide(ref, level))
        below = _nonempty(pa, refs)
        if len(below) > threshold:
            logging.debug(f"k-center lower bound 2^-{level}: {len(below)} cells above {threshold}")
            return LowerBoundResult(StandardLength(level), frontier)
        frontier = below
    return LowerBoundResult(None, frontier, pa.distinct()[0])


def kcenter_coreset(pa: IndexAccess, bound: LowerBoundResult, k: int, eps: float) -> Coreset:
    """
    One point per nonempty cell of side at most eps lb below the cover.

    Parameters
    ----------
    pa: IndexAccess
    bound: LowerBoundResult
        With a positive `lb`.
    k: int
    eps: float

    Returns
    -------
    Coreset
        Unit-weight points of the range; each point of the range lies
        within sqrt(d) eps lb of one of them.
    """
    if bound.lb is None:
        raise ValueError("The subdivision coreset needs a positive lower bound")
    cover_level = bound.lb.exponent - 1
    target = min(L_MAX, max(sfloor(min(1.0, eps * bound.lb.value)).exponent, cover_level))
    reps = []
    for ref in bound.cover:
        for cell in pa.subdivide(ref, target):
            first = pa.report_one(cell)
            if first is not None:
                reps.append(first)
    reps.sort()
    side = StandardLength(target).value
    constants = {"lb": bound.lb.value, "cover": len(bound.cover), "side": side,
                 "displacement": math.sqrt(pa.dim) * side}
    logging.debug(f"k-center coreset: {len(reps)} points from {len(bound.cover)} cover cells")
    return Coreset(np.array([pa.point(r) for r in reps]), np.ones(len(reps)),
                   CostKind.center, k, eps, "grid", constants)


def kcenter_query(index, q: Rect, k: int, eps: float, params,
                  stats: Optional[QueryStats] = None) -> EngineResult:
    """
    Approximate k-center clustering of the points in a range.

    Parameters
    ----------
    index: SpatialIndex
    q: Rect
        Normalized query rectangle.
    k: int
    eps: float
    params: BuildParams
    stats: QueryStats | None

    Returns
    -------
    EngineResult
        Centers and radius of the final solver on the coreset; the
        displacement bound sqrt(d) eps lb is reported in the statistics.
        Weights are ignored.
    """
    pa = IndexAccess(index, q, stats)
    if pa.is_empty():
        logging.warning("Empty range for kcenter query")
        return EngineResult(np.empty((0, index.dim)), 0.0, CostKind.center, "none",
                            Coreset.empty(index.dim, CostKind.center, k, eps, "grid"),
                            pa.stats, "empty range")
    bound = kcenter_lower_bound(pa, k)
    if bound.lb is None:
        points = bound.exact_points
        coreset = Coreset(points, np.ones(len(points)), CostKind.center, k, eps, "exact")
        if len(points) <= k:
            return EngineResult(points, 0.0, CostKind.center, "exact", coreset, pa.stats)
        pa.stats.extra["displacement"] = 0.0
    else:
        coreset = kcenter_coreset(pa, bound, k, eps)
        pa.stats.extra.update({"lb": coreset.constants["lb"],
                               "displacement": coreset.constants["displacement"]})
    result = solve(coreset.points, k, CostKind.center, coreset.weights, params)
    pa.stats.extra["coreset_size"] = len(coreset)
    return EngineResult(result.centers, result.cost, CostKind.center, result.tag, coreset,
                        pa.stats)
