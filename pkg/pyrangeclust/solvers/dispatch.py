"""
Selection of the final single-shot solver for a weighted point set.
"""

import logging
from typing import Optional

import numpy as np

from pyrangeclust.solvers.center import gonzalez_solve
from pyrangeclust.solvers.cost import CostKind, SolverResult, distinct_locations
from pyrangeclust.solvers.search import local_search_solve
from pyrangeclust.solvers.oracle import oracle_exact


def solve(points: np.ndarray, k: int, kind: CostKind,
          weights: Optional[np.ndarray] = None, params=None) -> SolverResult:
    """
    Cluster an explicit weighted point set once.

    Parameters
    ----------
    points: np.ndarray
    k: int
    kind: CostKind
    weights: np.ndarray | None
    params: BuildParams | None
        Supplies the exhaustive thresholds and local-search settings;
        `None` means defaults.

    Returns
    -------
    SolverResult
        Exhaustive partition search when the input has at most
        `exhaustive_max_points` locations and `k <= exhaustive_max_k`;
        otherwise Gonzalez for center, local search for median and local
        search followed by Lloyd for means.
    """
    if params is None:
        from pyrangeclust.models.requests import BuildParams
        params = BuildParams()
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    w = np.ones(pts.shape[0]) if weights is None else np.asarray(weights, dtype=float)
    size = distinct_locations(pts[w > 0], w[w > 0])[0].shape[0]
    if size <= params.exhaustive_max_points and k <= params.exhaustive_max_k:
        logging.debug(f"Exhaustive {kind.value} solver on {size} locations, k = {k}")
        return oracle_exact(pts, k, kind, w, params.exhaustive_max_points,
                            params.exhaustive_max_k)
    if kind == CostKind.center:
        return gonzalez_solve(pts, k, w)
    return local_search_solve(pts, k, kind, w, params.swap_width,
                              params.local_search_tol, params.candidate_cap)
