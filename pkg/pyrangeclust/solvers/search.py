"""
Swap-based local search over input locations, and Lloyd refinement for
k-means.
"""

import logging
from itertools import combinations
from typing import Optional

import numpy as np

from pyrangeclust.solvers.center import gonzalez
from pyrangeclust.solvers.cost import (CostKind, SolverResult, distinct_locations,
                                       pairwise_distances, phi)


def _candidates(locations: np.ndarray, weights: np.ndarray, seeds: np.ndarray,
                cap: int) -> np.ndarray:
    """Indices into `locations`: a farthest-first prefix plus the seeds' nearest locations."""
    if locations.shape[0] <= cap:
        return np.arange(locations.shape[0])
    prefix = gonzalez(locations, cap, weights)
    picked = [int(np.flatnonzero(np.all(locations == c, axis=1))[0]) for c in prefix]
    if len(seeds):
        picked.extend(int(i) for i in pairwise_distances(seeds, locations).argmin(axis=1))
    logging.info(f"Local search over {len(set(picked))} of {locations.shape[0]} locations, "
                 f"cap {cap}")
    return np.asarray(sorted(set(picked)))


def _fill(current: list, between: np.ndarray, k: int) -> list:
    """Grow `current` to k members by farthest-first over the candidates."""
    chosen = list(dict.fromkeys(current)) or [0]
    while len(chosen) < min(k, between.shape[0]):
        reach = between[:, chosen].min(axis=1)
        reach[chosen] = -1.0
        chosen.append(int(np.argmax(reach)))
    return chosen


def local_search(points: np.ndarray, k: int, kind: CostKind,
                 seed_centers: Optional[np.ndarray] = None,
                 weights: Optional[np.ndarray] = None, swap_width: int = 1,
                 tol: float = 1e-3, candidate_cap: int = 256) -> np.ndarray:
    """
    Weighted local search with up to `swap_width` simultaneous swaps.

    Parameters
    ----------
    points: np.ndarray
        Shape (n, d).
    k: int
    kind: CostKind
        `median` or `means`.
    seed_centers: np.ndarray | None
        Starting centers; snapped to their nearest input location.
    weights: np.ndarray | None
    swap_width: int, default=1
    tol: float, default=1e-3
        A swap is taken only when it lowers the cost below (1 - tol) times
        the current cost.
    candidate_cap: int, default=256
        Size of the farthest-first prefix swapped in when there are more
        locations than this; the nearest location to every seed joins it.

    Returns
    -------
    np.ndarray
        At most `k` input locations.

    Notes
    -----
    Up to `candidate_cap` locations every location is a swap candidate and
    the local optimum costs at most (3 + 2/p) times the best `k` locations,
    p being `swap_width`. Above it the swaps range over the prefix, whose
    covering radius r moves every optimal center by at most r, so with
    OPT the best `k` locations and W the total weight the cost is at most
    (3 + 2/p) (OPT + W r) for `median` and (3 + 2/p)^2 (2 OPT + 2 W r^2)
    for `means`. Each accepted swap gains a factor (1 - tol), which
    loosens both bounds by a factor 1 / (1 - k tol).
    """
    if kind == CostKind.center:
        raise ValueError("Local search handles the median and means objectives")
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    w = np.ones(pts.shape[0]) if weights is None else np.asarray(weights, dtype=float)
    keep = w > 0
    locations, loc_weights = distinct_locations(pts[keep], w[keep])
    if locations.shape[0] <= k:
        return locations
    seeds = np.empty((0, pts.shape[1])) if seed_centers is None \
        else np.atleast_2d(np.asarray(seed_centers, dtype=float))
    cand = _candidates(locations, loc_weights, seeds, candidate_cap)
    power = 1.0 if kind == CostKind.median else 2.0
    dist = pairwise_distances(locations, locations[cand]) ** power
    if len(seeds):
        start = [int(i) for i in pairwise_distances(seeds, locations[cand]).argmin(axis=1)]
    else:
        start = [0]
    current = _fill(start[:k], pairwise_distances(locations[cand], locations[cand]), k)

    def cost_of(members) -> float:
        return float(np.dot(loc_weights, dist[:, list(members)].min(axis=1)))

    cost = cost_of(current)
    n_cand = len(cand)
    bound = (k * locations.shape[0]) ** 2 / tol + 1
    iterations = 0
    while cost > 0.0:
        iterations += 1
        assert iterations <= bound, "local search exceeded its iteration bound"
        best_cost, best_set = cost, None
        outside = [c for c in range(n_cand) if c not in current]
        if not outside:
            break
        if swap_width == 1 or len(current) == 1:
            sub = dist[:, current]
            order = np.argsort(sub, axis=1)
            nearest = sub[np.arange(sub.shape[0]), order[:, 0]]
            second = sub[np.arange(sub.shape[0]), order[:, 1]] if len(current) > 1 \
                else np.full(sub.shape[0], np.inf)
            for pos in range(len(current)):
                without = np.where(order[:, 0] == pos, second, nearest)
                trial = np.minimum(without[:, None], dist[:, outside])
                costs = loc_weights @ trial
                j = int(np.argmin(costs))
                if costs[j] < best_cost:
                    best_cost = float(costs[j])
                    best_set = current[:pos] + [outside[j]] + current[pos + 1:]
        else:
            for width in range(1, min(swap_width, len(current)) + 1):
                for out in combinations(range(len(current)), width):
                    rest = [c for i, c in enumerate(current) if i not in out]
                    for inn in combinations(outside, width):
                        trial_set = rest + list(inn)
                        value = cost_of(trial_set)
                        if value < best_cost:
                            best_cost, best_set = value, trial_set
        if best_set is None or not best_cost < (1.0 - tol) * cost:
            break
        current, cost = best_set, best_cost
    logging.debug(f"Local search settled after {iterations} rounds at cost {cost}")
    return locations[cand[current]]


def lloyd(points: np.ndarray, centers: np.ndarray, weights: Optional[np.ndarray] = None,
          tol: float = 1e-6, max_iter: int = 100) -> np.ndarray:
    """
    Weighted Lloyd iterations; the returned centers never cost more than
    the starting ones.
    """
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    w = np.ones(pts.shape[0]) if weights is None else np.asarray(weights, dtype=float)
    best = np.array(centers, dtype=float)
    best_cost = phi(pts, best, CostKind.means, w)
    current = best.copy()
    for _ in range(max_iter):
        labels = pairwise_distances(pts, current).argmin(axis=1)
        moved = current.copy()
        for c in range(current.shape[0]):
            mask = (labels == c) & (w > 0)
            if np.any(mask):
                moved[c] = (w[mask, None] * pts[mask]).sum(axis=0) / w[mask].sum()
        value = phi(pts, moved, CostKind.means, w)
        current = moved
        if value < best_cost:
            improved = best_cost - value
            best, best_cost = moved.copy(), value
            if improved <= tol * max(best_cost, 1e-300):
                break
        else:
            break
    return best


def local_search_solve(points: np.ndarray, k: int, kind: CostKind,
                       weights: Optional[np.ndarray] = None, swap_width: int = 1,
                       tol: float = 1e-3, candidate_cap: int = 256) -> SolverResult:
    """Gonzalez seeding, then local search; Lloyd refinement for means."""
    seeds = gonzalez(points, k, weights)
    centers = local_search(points, k, kind, seeds, weights, swap_width, tol, candidate_cap)
    tag = "local_search"
    if kind == CostKind.means:
        centers = lloyd(points, centers, weights)
        tag = "local_search+lloyd"
    return SolverResult(centers, phi(points, centers, kind, weights), tag)
