"""
Continuous one-center primitives: weighted centroid (1-mean), geometric
median (1-median) and smallest enclosing ball (1-center).
"""

import logging
from typing import List, Optional, Tuple

import numpy as np

SEB_SEED = 0x5EED


def _weights(points: np.ndarray, weights: Optional[np.ndarray]) -> np.ndarray:
    if weights is None:
        return np.ones(points.shape[0])
    return np.asarray(weights, dtype=float)


def centroid(points: np.ndarray, weights: Optional[np.ndarray] = None) -> np.ndarray:
    """Weighted mean, the exact minimizer of the weighted squared distances."""
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    w = _weights(pts, weights)
    return (w[:, None] * pts).sum(axis=0) / w.sum()


def weiszfeld(points: np.ndarray, weights: Optional[np.ndarray] = None,
              tol: float = 1e-10, max_iter: int = 10_000) -> np.ndarray:
    """
    Weighted geometric median.

    Fixed-point iteration started at the centroid. When an iterate lands
    on an input point the modified step of Vardi and Zhang is taken, and
    the iterate is returned as soon as that point satisfies the vertex
    optimality condition.

    Parameters
    ----------
    points: np.ndarray
        Shape (n, d).
    weights: np.ndarray | None
    tol: float, default=1e-10
        Stop when a step moves less than `tol` (relative to the iterate).
    max_iter: int, default=10000

    Returns
    -------
    np.ndarray
        Shape (d,).
    """
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    w = _weights(pts, weights)
    keep = w > 0
    pts, w = pts[keep], w[keep]
    if pts.shape[0] == 1:
        return pts[0].copy()
    x = centroid(pts, w)
    for _ in range(max_iter):
        dist = np.linalg.norm(pts - x, axis=1)
        at_x = dist <= 1e-15 * max(1.0, float(np.abs(x).max()))
        inv = np.where(at_x, 0.0, w / np.where(at_x, 1.0, dist))
        if inv.sum() == 0.0:
            return x
        target = (inv[:, None] * pts).sum(axis=0) / inv.sum()
        eta = float(w[at_x].sum())
        if eta > 0.0:
            pull = (inv[:, None] * (pts - x)).sum(axis=0)
            strength = float(np.linalg.norm(pull))
            if strength <= eta:
                return x
            gamma = min(1.0, eta / strength)
            target = (1.0 - gamma) * target + gamma * x
        step = float(np.linalg.norm(target - x))
        x = target
        if step <= tol * max(1.0, float(np.linalg.norm(x))):
            return x
    logging.debug(f"Weiszfeld stopped after {max_iter} iterations")
    return x


def _boundary_ball(boundary: List[np.ndarray]) -> Tuple[Optional[np.ndarray], float]:
    """Smallest ball with every boundary point on its sphere."""
    if not boundary:
        return None, -1.0
    origin = boundary[0]
    if len(boundary) == 1:
        return origin.copy(), 0.0
    rows = np.asarray([p - origin for p in boundary[1:]])
    gram = rows @ rows.T
    rhs = 0.5 * np.einsum("ij,ij->i", rows, rows)
    coeff = np.linalg.lstsq(gram, rhs, rcond=None)[0]
    center = origin + coeff @ rows
    return center, float(np.linalg.norm(center - origin))


def _inside(center: Optional[np.ndarray], radius: float, point: np.ndarray) -> bool:
    if center is None:
        return False
    return float(np.linalg.norm(point - center)) <= radius * (1.0 + 1e-12) + 1e-15


def _move_to_front(points: List[np.ndarray], end: int, boundary: List[np.ndarray],
                   dim: int) -> Tuple[Optional[np.ndarray], float]:
    center, radius = _boundary_ball(boundary)
    if len(boundary) == dim + 1:
        return center, radius
    for i in range(end):
        p = points[i]
        if not _inside(center, radius, p):
            center, radius = _move_to_front(points, i, boundary + [p], dim)
            points.pop(i)
            points.insert(0, p)
    return center, radius


def seb(points: np.ndarray, seed: int = SEB_SEED) -> Tuple[np.ndarray, float]:
    """
    Exact smallest enclosing ball.

    Randomized incremental construction with the move-to-front heuristic,
    run on a seeded shuffle so results are reproducible.

    Parameters
    ----------
    points: np.ndarray
        Shape (n, d), n >= 1.
    seed: int

    Returns
    -------
    np.ndarray, float
        Center and radius.
    """
    pts = np.unique(np.atleast_2d(np.asarray(points, dtype=float)), axis=0)
    if pts.shape[0] == 0:
        raise ValueError("The enclosing ball of no points is undefined")
    if pts.shape[0] == 1:
        return pts[0].copy(), 0.0
    order = np.random.default_rng(seed).permutation(pts.shape[0])
    work = [pts[i] for i in order]
    center, radius = _move_to_front(work, len(work), [], pts.shape[1])
    # Close rounding gaps so that every input is enclosed.
    radius = max(radius, float(np.linalg.norm(pts - center, axis=1).max()))
    return center, radius
