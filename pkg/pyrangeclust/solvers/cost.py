"""
Clustering objectives and the weighted point sets solvers work on.
"""

from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Dict, Optional

import numpy as np


class CostKind(str, Enum):
    """Objective of a clustering: sum of distances, of squares, or max distance."""

    median = "median"
    means = "means"
    center = "center"


@dataclass(eq=False)
class Coreset:
    """
    Weighted point list handed from engines to solvers.

    Attributes
    ----------
    points: np.ndarray
        Shape (m, d), normalized coordinates.
    weights: np.ndarray
        Shape (m,), positive.
    kind: CostKind
    k: int
    eps: float
    provenance: str
        `from_centers`, `canonical`, `smaller`, `raw`, `exact` or `grid`.
    constants: dict
        Construction constants such as c1, the radius and grid sizes.
    """

    points: np.ndarray
    weights: np.ndarray
    kind: CostKind
    k: int
    eps: float
    provenance: str
    constants: Dict[str, Any] = field(default_factory=dict)

    def __len__(self) -> int:
        return int(self.points.shape[0])

    @property
    def total_weight(self) -> float:
        return float(self.weights.sum())

    @property
    def dim(self) -> int:
        return int(self.points.shape[1])

    @classmethod
    def empty(cls, dim: int, kind: CostKind, k: int, eps: float,
              provenance: str = "from_centers") -> "Coreset":
        return cls(np.empty((0, dim)), np.empty(0), kind, k, eps, provenance)


@dataclass
class SolverResult:
    """
    Centers chosen by a single-shot solver and their cost on its input.

    Attributes
    ----------
    centers: np.ndarray
    cost: float
        `phi` of the solver input against `centers`.
    tag: str
        Routine name, reported as the answer's solver.
    """

    centers: np.ndarray
    cost: float
    tag: str


def pairwise_distances(points: np.ndarray, centers: np.ndarray) -> np.ndarray:
    """Euclidean distance matrix of shape (len(points), len(centers))."""
    diff = points[:, None, :] - centers[None, :, :]
    return np.sqrt(np.einsum("ijk,ijk->ij", diff, diff))


def nearest_distances(points: np.ndarray, centers: np.ndarray) -> np.ndarray:
    """Distance of every point to its closest center."""
    if len(centers) == 0:
        raise ValueError("At least one center is required")
    return pairwise_distances(points, np.atleast_2d(centers)).min(axis=1)


def phi(points: np.ndarray, centers: np.ndarray, kind: CostKind,
        weights: Optional[np.ndarray] = None) -> float:
    """
    Clustering cost of a weighted point set.

    Parameters
    ----------
    points: np.ndarray
        Shape (n, d).
    centers: np.ndarray
        Shape (m, d), m >= 1.
    kind: CostKind
    weights: np.ndarray | None
        Multiplicities; `None` means unit weights.

    Returns
    -------
    float
        Weighted sum of distances (median), of squared distances (means),
        or the largest distance over points of positive weight (center).
        Weights do not scale the center objective.
    """
    centers = np.atleast_2d(np.asarray(centers, dtype=float))
    if centers.shape[0] == 0 or centers.size == 0:
        raise ValueError("At least one center is required")
    points = np.atleast_2d(np.asarray(points, dtype=float))
    if points.shape[0] == 0:
        return 0.0
    w = np.ones(points.shape[0]) if weights is None else np.asarray(weights, dtype=float)
    dist = nearest_distances(points, centers)
    if kind == CostKind.median:
        return float(np.dot(w, dist))
    if kind == CostKind.means:
        return float(np.dot(w, dist * dist))
    support = w > 0
    return float(dist[support].max()) if np.any(support) else 0.0


def distinct_locations(points: np.ndarray, weights: Optional[np.ndarray] = None):
    """
    Merge equal rows, keeping first-occurrence order and summing weights.

    Returns
    -------
    np.ndarray, np.ndarray
        Distinct rows and their total weights.
    """
    w = np.ones(points.shape[0]) if weights is None else np.asarray(weights, dtype=float)
    _, first, inverse = np.unique(points, axis=0, return_index=True, return_inverse=True)
    inverse = np.asarray(inverse).reshape(-1)
    order = np.argsort(first, kind="stable")
    rank = np.empty_like(order)
    rank[order] = np.arange(len(order))
    merged = np.zeros(len(first))
    np.add.at(merged, rank[inverse], w)
    return points[first[order]], merged
