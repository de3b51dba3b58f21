"""
Farthest-first traversal for k-center.
"""

from typing import Optional

import numpy as np

from pyrangeclust.solvers.cost import CostKind, SolverResult, phi


def gonzalez(points: np.ndarray, k: int, weights: Optional[np.ndarray] = None,
             start: int = 0) -> np.ndarray:
    """
    Farthest-first traversal.

    Parameters
    ----------
    points: np.ndarray
        Shape (n, d), ordered so that the preferred first center comes first.
    k: int
        Number of centers, at least 1.
    weights: np.ndarray | None
        Points of zero weight are ignored.
    start: int, default=0
        Index of the first center.

    Returns
    -------
    np.ndarray
        At most `k` input points; fewer when the input has fewer distinct
        locations. The k-center cost is at most twice the optimum.
    """
    if k < 1:
        raise ValueError("k must be at least 1")
    pts = np.asarray(points, dtype=float)
    if weights is not None:
        pts = pts[np.asarray(weights) > 0]
    if pts.shape[0] == 0:
        return np.empty((0, np.asarray(points).shape[1]))
    chosen = [min(start, pts.shape[0] - 1)]
    dist = np.linalg.norm(pts - pts[chosen[0]], axis=1)
    while len(chosen) < k:
        far = int(np.argmax(dist))
        if dist[far] == 0.0:
            break
        chosen.append(far)
        dist = np.minimum(dist, np.linalg.norm(pts - pts[far], axis=1))
    return pts[chosen]


def gonzalez_solve(points: np.ndarray, k: int,
                   weights: Optional[np.ndarray] = None) -> SolverResult:
    centers = gonzalez(points, k, weights)
    return SolverResult(centers, phi(points, centers, CostKind.center, weights), "gonzalez")
