"""
Exhaustive solvers for tiny inputs, used as the final solver when they are
affordable and as oracles by the validation suites.
"""

from functools import lru_cache
from itertools import combinations
from typing import Optional

import numpy as np

from pyrangeclust.solvers.cost import CostKind, SolverResult, distinct_locations, phi
from pyrangeclust.solvers.primitives import centroid, seb, weiszfeld
from pyrangeclust.utils.exceptions import OracleLimitError

MAX_POINTS = 14
MAX_K = 3


def _part_center(points: np.ndarray, weights: np.ndarray, kind: CostKind) -> np.ndarray:
    if kind == CostKind.median:
        return weiszfeld(points, weights)
    if kind == CostKind.means:
        return centroid(points, weights)
    return seb(points)[0]


def oracle_exact(points: np.ndarray, k: int, kind: CostKind,
                 weights: Optional[np.ndarray] = None,
                 max_points: int = MAX_POINTS, max_k: int = MAX_K) -> SolverResult:
    """
    Optimal continuous clustering by enumerating every partition into at
    most `k` parts.

    Parameters
    ----------
    points: np.ndarray
        Shape (n, d), n <= `max_points` after merging equal locations.
    k: int
        At most `max_k`.
    kind: CostKind
        Each part is served by its geometric median, centroid or enclosing
        ball center.
    weights: np.ndarray | None

    Returns
    -------
    SolverResult
        Exact up to the geometric-median tolerance.

    Raises
    ------
    OracleLimitError
        When the input or `k` exceeds the enumeration limits.
    """
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    w = np.ones(pts.shape[0]) if weights is None else np.asarray(weights, dtype=float)
    keep = w > 0
    locations, loc_weights = distinct_locations(pts[keep], w[keep])
    n = locations.shape[0]
    if n > max_points or k > max_k:
        raise OracleLimitError(f"Exhaustive solver handles at most {max_points} points "
                               f"and k <= {max_k}, got {n} points and k = {k}")
    if n <= k:
        return SolverResult(locations, 0.0, "exhaustive")
    combine = max if kind == CostKind.center else (lambda a, b: a + b)

    @lru_cache(maxsize=None)
    def part(mask: int):
        members = [i for i in range(n) if mask >> i & 1]
        center = _part_center(locations[members], loc_weights[members], kind)
        return phi(locations[members], center[None, :], kind, loc_weights[members]), center

    @lru_cache(maxsize=None)
    def best(parts: int, mask: int):
        value, center = part(mask)
        result = (value, (mask,))
        if parts == 1:
            return result
        low = mask & -mask
        rest = mask ^ low
        sub = rest
        while sub:
            head = low | (rest ^ sub)
            tail_value, tail = best(parts - 1, sub)
            total = combine(part(head)[0], tail_value)
            if total < result[0]:
                result = (total, (head,) + tail)
            sub = (sub - 1) & rest
        return result

    _, masks = best(k, (1 << n) - 1)
    centers = np.asarray([part(m)[1] for m in masks])
    return SolverResult(centers, phi(pts, centers, kind, w), "exhaustive")


def oracle_discrete(points: np.ndarray, k: int, kind: CostKind,
                    weights: Optional[np.ndarray] = None) -> SolverResult:
    """Best `k` centers chosen among the input locations, by enumeration."""
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    w = np.ones(pts.shape[0]) if weights is None else np.asarray(weights, dtype=float)
    locations, _ = distinct_locations(pts[w > 0], w[w > 0])
    if locations.shape[0] <= k:
        return SolverResult(locations, 0.0, "discrete")
    best_cost, best_centers = np.inf, None
    for chosen in combinations(range(locations.shape[0]), k):
        value = phi(pts, locations[list(chosen)], kind, w)
        if value < best_cost:
            best_cost, best_centers = value, locations[list(chosen)]
    return SolverResult(best_centers, best_cost, "discrete")
