"""
Suite of tests for the single-shot solvers and their cost functions.
"""

# General imports
import logging
import math

import numpy as np
import pytest
# Module imports
from pyrangeclust.models.requests import BuildParams
from pyrangeclust.solvers.center import gonzalez, gonzalez_solve
from pyrangeclust.solvers.cost import CostKind, distinct_locations, phi
from pyrangeclust.solvers.dispatch import solve
from pyrangeclust.solvers.oracle import oracle_discrete, oracle_exact
from pyrangeclust.solvers.primitives import centroid, seb, weiszfeld
from pyrangeclust.solvers.search import lloyd, local_search
from pyrangeclust.utils.exceptions import OracleLimitError
from pyrangeclust.validation import oracles


def _blobs(n: int, k: int, seed: int) -> np.ndarray:
    rng = np.random.default_rng(seed)
    means = rng.random((k, 2))
    return means[rng.integers(0, k, n)] + rng.normal(scale=0.03, size=(n, 2))


def test_phi():
    """
    Test the three objectives on a hand-checked example.
    """
    points = np.array([[0.0, 0.0], [3.0, 4.0], [6.0, 8.0]])
    centers = np.array([[0.0, 0.0]])
    weights = np.array([1.0, 2.0, 0.0])
    assert phi(points, centers, CostKind.median) == 15.0
    assert phi(points, centers, CostKind.means) == 125.0
    assert phi(points, centers, CostKind.center) == 10.0
    assert phi(points, centers, CostKind.median, weights) == 10.0
    assert phi(points, centers, CostKind.center, weights) == 5.0
    assert phi(np.empty((0, 2)), centers, CostKind.means) == 0.0
    with pytest.raises(ValueError):
        phi(points, np.empty((0, 2)), CostKind.median)


def test_distinct_locations():
    """
    Test merging of repeated rows in first-occurrence order.
    """
    points = np.array([[1.0, 1.0], [0.0, 0.0], [1.0, 1.0], [2.0, 0.0]])
    rows, weights = distinct_locations(points, np.array([1.0, 2.0, 3.0, 4.0]))
    assert rows.tolist() == [[1.0, 1.0], [0.0, 0.0], [2.0, 0.0]]
    assert weights.tolist() == [4.0, 2.0, 4.0]


def test_gonzalez():
    """
    Test farthest-first traversal and its factor-two guarantee.
    """
    points = np.array([[0.0, 0.0], [0.0, 0.0], [1.0, 0.0]])
    assert len(gonzalez(points, 3)) == 2
    assert gonzalez(points, 1, np.array([0.0, 1.0, 1.0])).tolist() == [[0.0, 0.0]]
    rng = np.random.default_rng(2)
    for _ in range(10):
        pts = rng.random((9, 2))
        for k in (1, 2, 3):
            result = gonzalez_solve(pts, k)
            optimum = oracle_exact(pts, k, CostKind.center).cost
            assert result.tag == "gonzalez"
            assert result.cost <= 2.0 * optimum * (1.0 + 1e-9)


def test_one_center_primitives():
    """
    Test centroid, geometric median and enclosing ball on known inputs.
    """
    points = np.array([[0.0, 0.0], [1.0, 0.0], [10.0, 0.0]])
    assert centroid(points, np.array([1.0, 1.0, 2.0])).tolist() == [5.25, 0.0]
    assert np.allclose(weiszfeld(points), [1.0, 0.0], atol=1e-6)
    square = np.array([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0], [1.0, 1.0], [0.5, 0.5]])
    assert np.allclose(weiszfeld(square), [0.5, 0.5], atol=1e-6)
    center, radius = seb(square)
    assert np.allclose(center, [0.5, 0.5])
    assert radius == pytest.approx(math.sqrt(0.5))
    cloud = np.random.default_rng(6).normal(size=(60, 3))
    center, radius = seb(cloud)
    assert np.linalg.norm(cloud - center, axis=1).max() <= radius * (1 + 1e-12)
    assert seb(cloud[:1])[1] == 0.0
    with pytest.raises(ValueError):
        seb(np.empty((0, 2)))


def test_oracle_exact():
    """
    Test the exhaustive solvers and their limits.
    """
    points = np.array([[0.0, 0.0], [0.0, 1.0], [10.0, 0.0], [10.0, 1.0]])
    median = oracle_exact(points, 2, CostKind.median)
    assert median.cost == pytest.approx(2.0)
    means = oracle_exact(points, 2, CostKind.means)
    assert means.cost == pytest.approx(1.0)
    center = oracle_exact(points, 2, CostKind.center)
    assert center.cost == pytest.approx(0.5)
    assert oracle_exact(points, 3, CostKind.center).cost <= center.cost
    discrete = oracle_discrete(points, 2, CostKind.median)
    assert discrete.cost == pytest.approx(2.0)
    with pytest.raises(OracleLimitError):
        oracle_exact(np.random.default_rng(0).random((15, 2)), 2, CostKind.median)
    with pytest.raises(OracleLimitError):
        oracle_exact(points, 4, CostKind.median)


def test_local_search():
    """
    Test local search against the best discrete centers.
    """
    for seed in range(4):
        pts = _blobs(12, 3, seed)
        for kind, factor in ((CostKind.median, 5.0), (CostKind.means, 25.0)):
            centers = local_search(pts, 2, kind)
            assert len(centers) == 2
            best = oracle_discrete(pts, 2, kind).cost
            assert phi(pts, centers, kind) <= factor * best * (1.0 + 1e-3) + 1e-12
    few = np.array([[0.0, 0.0], [1.0, 1.0]])
    assert len(local_search(few, 3, CostKind.median)) == 2
    with pytest.raises(ValueError):
        local_search(few, 1, CostKind.center)


def _best_pair_cost(points: np.ndarray, power: float) -> float:
    dist = np.linalg.norm(points[:, None, :] - points[None, :, :], axis=2) ** power
    return min(float(np.minimum(dist[:, i:i + 1], dist[:, i + 1:]).sum(axis=0).min())
               for i in range(points.shape[0] - 1))


def test_local_search_capped_candidates(caplog):
    """
    Test local search above the candidate cap against the best discrete
    pair, loosened by the covering radius of the farthest-first prefix.
    """
    pts = _blobs(320, 3, 7)
    cap = 256
    reach = oracles.scan_radius(pts, gonzalez(pts, cap))
    slack = 1.0 / (1.0 - 2 * 1e-3)
    total = float(pts.shape[0])
    with caplog.at_level(logging.INFO):
        centers = local_search(pts, 2, CostKind.median, candidate_cap=cap)
    assert "Local search over" in caplog.text
    best = _best_pair_cost(pts, 1.0)
    assert phi(pts, centers, CostKind.median) <= 5.0 * (best + total * reach) * slack + 1e-9
    centers = local_search(pts, 2, CostKind.means, candidate_cap=cap)
    best = _best_pair_cost(pts, 2.0)
    bound = 25.0 * (2 * best + 2 * total * reach ** 2) * slack
    assert phi(pts, centers, CostKind.means) <= bound + 1e-9
    caplog.clear()
    with caplog.at_level(logging.INFO):
        local_search(pts[:cap], 2, CostKind.median, candidate_cap=cap)
    assert "Local search over" not in caplog.text


def test_lloyd_never_worsens():
    """
    Test that Lloyd refinement keeps or lowers the k-means cost.
    """
    pts = _blobs(200, 4, 9)
    start = pts[:4]
    refined = lloyd(pts, start)
    assert phi(pts, refined, CostKind.means) <= phi(pts, start, CostKind.means)


def test_solve_dispatch():
    """
    Test the choice of the final solver.
    """
    params = BuildParams()
    tiny = _blobs(10, 2, 1)
    assert solve(tiny, 2, CostKind.median, params=params).tag == "exhaustive"
    larger = _blobs(80, 3, 1)
    assert solve(larger, 3, CostKind.median, params=params).tag == "local_search"
    assert solve(larger, 3, CostKind.means, params=params).tag == "local_search+lloyd"
    assert solve(larger, 3, CostKind.center, params=params).tag == "gonzalez"
    result = solve(larger, 2, CostKind.means, np.full(80, 2.0), params)
    assert result.cost == pytest.approx(phi(larger, result.centers, CostKind.means,
                                            np.full(80, 2.0)))
