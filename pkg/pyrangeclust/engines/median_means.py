"""
Coresets and range-clustering answers for the k-median and k-means
objectives.

Given constant-factor centers A of a point set, every point is charged to
one cell of an exponential grid aligned to the quadtree around the
centers, and each nonempty cell contributes its lowest point with the
cell weight.
"""

import logging
import math
from bisect import bisect_right
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Dict, List, NamedTuple, Optional, Set, Tuple

import numpy as np

from pyrangeclust.engines.access import (EngineResult, ExplicitAccess, IndexAccess,
                                         PointAccess, QueryStats)
from pyrangeclust.geometry.cells import CellId, cell_of_point, grid_cluster
from pyrangeclust.geometry.points import L_MAX, Rect, StandardLength, sceil, sfloor
from pyrangeclust.solvers.center import gonzalez
from pyrangeclust.solvers.cost import Coreset, CostKind, distinct_locations, nearest_distances
from pyrangeclust.solvers.dispatch import solve
from pyrangeclust.solvers.search import local_search
from pyrangeclust.utils.exceptions import InvariantViolation

# Relative slack of the weight-conservation check.
WEIGHT_TOL = 1e-9


@dataclass
class ApproxCenters:
    """
    Constant-factor centers of a point set.

    Attributes
    ----------
    centers: np.ndarray
        Shape (m, d), m >= 1; m may exceed k.
    kind: CostKind
    c1: float
        Approximation factor claimed for the centers, above 1.
    """

    centers: np.ndarray
    kind: CostKind
    c1: float

    def __post_init__(self):
        self.centers = np.atleast_2d(np.asarray(self.centers, dtype=float))
        if self.centers.shape[0] < 1:
            raise ValueError("At least one center is required")
        if not self.c1 > 1.0:
            raise ValueError(f"c1 must exceed 1, got {self.c1}")

    def __len__(self) -> int:
        return int(self.centers.shape[0])


class Coverage(Enum):
    covered = "covered"
    uncovered = "uncovered"


@dataclass
class GridLevel:
    """
    One shell of a center's grid.

    Attributes
    ----------
    center: int
        Index of the center in `ApproxCenters`.
    j: int
        Shell number, 0 for the innermost one.
    anchor: CellId
        Standard cell of side R_j holding the center.
    fine_level: int
        Level of the second-level cells of this shell.
    cluster: list[CellId]
        Grid cluster of the anchor.
    inner: set[CellId]
        Grid cluster of the previous anchor, excluded from the shell.
    """

    center: int
    j: int
    anchor: CellId
    fine_level: int
    cluster: List[CellId]
    inner: Set[CellId] = field(default_factory=set)

    @property
    def first_level(self) -> int:
        return self.anchor.level + 1


@dataclass
class UnifiedGrid:
    """
    Exponential grids around every center, aligned to the quadtree.

    Attributes
    ----------
    radius: float
        Base radius R from `approx_radius`.
    base: float
        Side of the innermost anchors before rounding; R for median and
        R * sqrt(c1 * W) for means.
    M: int
        Level count ceil(2 log2(2 sqrt(d) c1 W)). Shells continue past it
        up to the root so each center's shells tile the root square.
    levels: list[GridLevel]
    """

    radius: float
    base: float
    M: int
    eps: float
    kind: CostKind
    total_weight: float
    levels: List[GridLevel]


class GridCell(NamedTuple):
    """Second-level cell with the grid shell it came from."""

    handle: Any
    center: int
    j: int
    level: int


def coverage_probe(pa: PointAccess, A: ApproxCenters, alpha: StandardLength) -> Coverage:
    """
    Decide whether the grid clusters of side `alpha` around the centers hold
    every point.

    Parameters
    ----------
    pa: PointAccess
    A: ApproxCenters
    alpha: StandardLength

    Returns
    -------
    Coverage
        `covered` implies r* <= 2 sqrt(d) alpha, `uncovered` implies
        r* >= alpha, where r* is the largest distance of a point to A.
    """
    pa.stats.probes += 1
    cells: Set[CellId] = set()
    for center in A.centers:
        cells.update(grid_cluster(cell_of_point(center, alpha)))
    total = 0.0
    for cell in sorted(cells):
        if pa.meets(cell):
            total += pa.cell_weight(cell)[0]
    target = pa.total_weight()
    return Coverage.covered if total >= target * (1.0 - WEIGHT_TOL) else Coverage.uncovered


def _coincident(pa: PointAccess, A: ApproxCenters) -> bool:
    finest = {cell_of_point(c, StandardLength(L_MAX)) for c in A.centers}
    total = sum(pa.cell_weight(cell)[0] for cell in sorted(finest) if pa.meets(cell))
    return total >= pa.total_weight() * (1.0 - WEIGHT_TOL)


def approx_radius(pa: PointAccess, A: ApproxCenters) -> float:
    """
    Approximate the largest point-to-center distance, scaled by 1 / (c1 W).

    The search runs over the standard-length exponents in [0, L_MAX]
    instead of the candidate coordinate differences between points and
    centers. Coverage is monotone in the exponent, so a binary search with
    `coverage_probe` finds alpha covered with alpha / 2 uncovered, and
    alpha / 2 <= r* <= 2 sqrt(d) alpha holds as it would for a candidate
    difference. The search costs O(log L_MAX) probes whatever the range.

    Parameters
    ----------
    pa: PointAccess
        Nonempty point set with total weight W.
    A: ApproxCenters

    Returns
    -------
    float
        R = alpha / (c1 W), satisfying R / (2 sqrt(d)) <= r* / (c1 W) <=
        2 sqrt(d) R; 0 when every point shares a finest cell with a center.
    """
    weight = pa.total_weight()
    if weight <= 0:
        raise ValueError("approx_radius needs a nonempty point set")
    if _coincident(pa, A):
        return 0.0
    lo, hi = 0, L_MAX + 1
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if coverage_probe(pa, A, StandardLength(mid)) == Coverage.covered:
            lo = mid
        else:
            hi = mid
    alpha = StandardLength(lo).value
    logging.debug(f"Radius search: alpha = 2^-{lo} after {pa.stats.probes} probes")
    return alpha / (A.c1 * weight)


def level_count(dim: int, c1: float, weight: float) -> int:
    return max(0, math.ceil(2.0 * math.log2(2.0 * math.sqrt(dim) * c1 * max(weight, 1.0))))


def build_unified_grid(pa: PointAccess, A: ApproxCenters, eps: float, kind: CostKind,
                       radius: float) -> UnifiedGrid:
    """
    Shells of side R_j around each center.

    Parameters
    ----------
    pa: PointAccess
    A: ApproxCenters
    eps: float
    kind: CostKind
    radius: float
        Positive R from `approx_radius`.

    Returns
    -------
    UnifiedGrid
        For every center, anchors of side R_j with base 2^j <= R_j <
        base 2^(j+1), clamped to levels [0, L_MAX - 1], and second-level
        cells of side between eps R_j / (40 c1 d) and twice that.
    """
    if not radius > 0:
        raise ValueError("The unified grid needs a positive radius")
    dim = pa.dim
    weight = pa.total_weight()
    base = radius * math.sqrt(A.c1 * weight) if kind == CostKind.means else radius
    divisor = 40.0 * A.c1 * dim
    levels: List[GridLevel] = []
    for i, center in enumerate(A.centers):
        previous: Optional[List[CellId]] = None
        last = None
        shell = 0
        j = 0
        while True:
            side = base * 2.0 ** j
            exponent = min(sceil(side).exponent if side < 1.0 else 0, L_MAX - 1)
            j += 1
            if exponent == last:
                continue
            anchor = cell_of_point(center, StandardLength(exponent))
            if not anchor.contains_point(center):
                raise InvariantViolation(f"Center {center} lies outside its anchor {anchor}")
            fine = sfloor(min(1.0, 2.0 * eps * StandardLength(exponent).value / divisor)).exponent
            fine = min(L_MAX, max(fine, exponent + 1))
            cluster = grid_cluster(anchor)
            levels.append(GridLevel(i, shell, anchor, fine, cluster, set(previous or ())))
            shell += 1
            previous = cluster
            last = exponent
            if exponent == 0:
                break
    grid = UnifiedGrid(radius, base, level_count(dim, A.c1, weight), eps, kind, weight, levels)
    logging.debug(f"Unified grid: {len(A)} centers, {len(levels)} shells, M = {grid.M}")
    return grid


def _prune_nested(pa: PointAccess, candidates: List[Tuple[int, int, int, Any, GridLevel]]) \
        -> List[Tuple[Any, GridLevel]]:
    """
    Keep the candidates containing no other candidate.

    Candidates are (level, start, end, handle, shell); cells are nested or
    disjoint, and so are their location slices.
    """
    candidates.sort(key=lambda c: (-c[0], c[1]))
    starts: List[int] = []
    ends: List[int] = []
    kept: List[Tuple[Any, GridLevel]] = []
    for level, start, end, handle, shell in candidates:
        pos = bisect_right(starts, start)
        if pos > 0 and ends[pos - 1] > start:
            continue
        if pos < len(starts) and starts[pos] < end:
            continue
        starts.insert(pos, start)
        ends.insert(pos, end)
        kept.append((handle, shell))
    return kept


def collect_second_level_cells(pa: PointAccess, grid: UnifiedGrid) -> List[GridCell]:
    """
    Pairwise disjoint second-level cells covering the point set.

    First-level cells of every shell are mapped to their compressed cells;
    a cell containing another candidate is dropped, and the survivors are
    subdivided to their shell's second-level side.

    Parameters
    ----------
    pa: PointAccess
    grid: UnifiedGrid

    Returns
    -------
    list[GridCell]
        Nonempty cells, smallest side first, then in Z-order.
    """
    candidates = []
    for shell in grid.levels:
        for cell in shell.cluster:
            if not pa.meets(cell):
                continue
            handle = pa.locate(cell)
            if handle is None:
                continue
            for child in pa.subdivide(handle, shell.first_level):
                if pa.cell_of(child) in shell.inner:
                    continue
                start, end = pa.span(child)
                candidates.append((shell.first_level, start, end, child, shell))
    kept = _prune_nested(pa, candidates)
    cells: List[GridCell] = []
    for handle, shell in kept:
        for fine in pa.subdivide(handle, shell.fine_level):
            cells.append(GridCell(fine, shell.center, shell.j, shell.fine_level))
    cells.sort(key=lambda c: (-c.level, pa.span(c.handle)[0]))
    logging.debug(f"Second-level cells: {len(candidates)} candidates, {len(kept)} kept, "
                  f"{len(cells)} cells")
    return cells


def exact_coreset(pa: PointAccess, k: int, eps: float, kind: CostKind) -> Coreset:
    """Every distinct location of the point set with its weight."""
    points, weights = pa.distinct()
    return Coreset(np.array(points, dtype=float), np.array(weights, dtype=float),
                   kind, k, eps, "exact")


def _violates_center_bound(points: np.ndarray, shells: List[int], owners: List[int],
                           A: ApproxCenters) -> Optional[int]:
    dim = A.centers.shape[1]
    to_set = nearest_distances(points, A.centers)
    for row, (j, i) in enumerate(zip(shells, owners)):
        if j == 0:
            continue
        own = float(np.linalg.norm(points[row] - A.centers[i]))
        if own > 2.0 * dim * to_set[row] * (1.0 + WEIGHT_TOL):
            return row
    return None


def coreset_from_centers(pa: PointAccess, A: ApproxCenters, k: int, eps: float,
                         kind: CostKind, validate: bool = False) -> Coreset:
    """
    (k, eps)-coreset of the point set from constant-factor centers.

    Parameters
    ----------
    pa: PointAccess
    A: ApproxCenters
    k: int
    eps: float
    kind: CostKind
        `median` or `means`.
    validate: bool, default=False
        Check every representative of an outer shell against the distance
        bound of its center and fall back to the exact coreset on failure.

    Returns
    -------
    Coreset
        One representative per nonempty second-level cell, weighted by the
        cell weight; the weights sum to the total weight of `pa`.
    """
    weight = pa.total_weight()
    if weight <= 0:
        return Coreset.empty(pa.dim, kind, k, eps)
    radius = approx_radius(pa, A)
    constants: Dict[str, Any] = {"c1": A.c1, "radius": radius, "centers": len(A)}
    if radius == 0.0:
        finest = sorted({cell_of_point(c, StandardLength(L_MAX)) for c in A.centers})
        reps, weights = [], []
        for cell in finest:
            if not pa.meets(cell):
                continue
            w, first = pa.cell_weight(cell)
            if first is not None and w > 0:
                reps.append(pa.point(first))
                weights.append(w)
        return Coreset(np.array(reps), np.array(weights), kind, k, eps, "from_centers", constants)
    grid = build_unified_grid(pa, A, eps, kind, radius)
    cells = collect_second_level_cells(pa, grid)
    charged: Set[int] = set()
    reps, weights, shells, owners = [], [], [], []
    for cell in cells:
        w, first = pa.query(cell.handle)
        if first is None or w <= 0:
            continue
        if first in charged:
            raise InvariantViolation(f"Location {first} charged to two cells")
        charged.add(first)
        reps.append(pa.point(first))
        weights.append(w)
        shells.append(cell.j)
        owners.append(cell.center)
    total = float(np.sum(weights)) if weights else 0.0
    if abs(total - weight) > WEIGHT_TOL * max(1.0, weight):
        raise InvariantViolation(f"Coreset weight {total} differs from point weight {weight}")
    constants.update({"M": grid.M, "shells": len(grid.levels), "cells": len(cells)})
    points = np.array(reps, dtype=float)
    if validate:
        row = _violates_center_bound(points, shells, owners, A)
        if row is not None:
            logging.warning(f"Representative {points[row].tolist()} breaks the center distance "
                            f"bound; using the exact coreset")
            return exact_coreset(pa, k, eps, kind)
    logging.debug(f"Coreset from {len(A)} centers: {len(points)} points, eps = {eps}")
    return Coreset(points, np.array(weights, dtype=float), kind, k, eps, "from_centers", constants)


def smaller_coreset(s: Coreset, k: int, kind: CostKind, params,
                    eps: float = 2.0) -> Tuple[Coreset, Optional[ApproxCenters]]:
    """
    Shrink a weighted coreset and find constant-factor centers for it.

    Parameters
    ----------
    s: Coreset
    k: int
    kind: CostKind
    params: BuildParams
        Supplies c1 and the local-search settings.
    eps: float, default=2.0

    Returns
    -------
    Coreset, ApproxCenters | None
        Gonzalez seeds refined by weighted local search give at most `k`
        centers, and `coreset_from_centers` over `s` with them gives the
        smaller coreset. Inputs with at most `k` locations come back merged
        with those locations as centers; `None` for an empty input.
    """
    if len(s) == 0 or s.total_weight <= 0:
        return s, None
    keep = s.weights > 0
    points, weights = distinct_locations(s.points[keep], s.weights[keep])
    if points.shape[0] <= k:
        merged = Coreset(points, weights, kind, k, eps, "smaller")
        return merged, ApproxCenters(points, kind, params.c1)
    seeds = gonzalez(points, k, weights)
    centers = local_search(points, k, kind, seeds, weights, params.swap_width,
                           params.local_search_tol, params.candidate_cap)
    A = ApproxCenters(centers, kind, params.c1)
    coreset = coreset_from_centers(ExplicitAccess(points, weights), A, k, eps, kind)
    coreset.provenance = "smaller"
    return coreset, A


def clustering_query(index, q: Rect, k: int, eps: float, kind: CostKind, params,
                     validate: bool = False, stats: Optional[QueryStats] = None) -> EngineResult:
    """
    Approximate k-median or k-means clustering of the points in a range.

    Parameters
    ----------
    index: SpatialIndex
    q: Rect
        Normalized query rectangle.
    k: int
    eps: float
    kind: CostKind
    params: BuildParams
    validate: bool, default=False
    stats: QueryStats | None

    Returns
    -------
    EngineResult
        The stored canonical coresets are shrunk by `smaller_coreset`,
        whose centers drive `coreset_from_centers` over the index at eps / 3;
        the final solver then runs on that coreset. The cost is measured
        on the final coreset, in normalized units.
    """
    pa = IndexAccess(index, q, stats)
    if pa.is_empty():
        logging.warning(f"Empty range for {kind.value} query")
        return EngineResult(np.empty((0, index.dim)), 0.0, kind, "none",
                            Coreset.empty(index.dim, kind, k, eps), pa.stats, "empty range")
    if pa.location_count() <= k:
        coreset = exact_coreset(pa, k, eps, kind)
        return EngineResult(coreset.points, 0.0, kind, "exact", coreset, pa.stats)
    canonical = pa.canonical_coreset(k, kind)
    small, A = smaller_coreset(canonical, k, kind, params)
    final = coreset_from_centers(pa, A, k, eps / 3.0, kind, validate)
    result = solve(final.points, k, kind, final.weights, params)
    pa.stats.extra.update({"canonical_size": len(canonical), "smaller_size": len(small),
                           "coreset_size": len(final)})
    logging.debug(f"{kind.value} query: canonical {len(canonical)}, smaller {len(small)}, "
                  f"final {len(final)}, probes {pa.stats.probes}")
    return EngineResult(result.centers, result.cost, kind, result.tag, final, pa.stats)


def kmedian_query(index, q: Rect, k: int, eps: float, params, validate: bool = False,
                  stats: Optional[QueryStats] = None) -> EngineResult:
    return clustering_query(index, q, k, eps, CostKind.median, params, validate, stats)


def kmeans_query(index, q: Rect, k: int, eps: float, params, validate: bool = False,
                 stats: Optional[QueryStats] = None) -> EngineResult:
    return clustering_query(index, q, k, eps, CostKind.means, params, validate, stats)
