"""
Suite of tests for the k-median and k-means coreset engine.
"""

# General imports
import math

import numpy as np
import pytest
# Module imports
from pyrangeclust.engines.access import ExplicitAccess, IndexAccess, QueryStats
from pyrangeclust.engines.median_means import (ApproxCenters, Coverage, _prune_nested,
                                               approx_radius, build_unified_grid,
                                               clustering_query, collect_second_level_cells,
                                               coreset_from_centers, coverage_probe,
                                               kmeans_query, kmedian_query, smaller_coreset)
from pyrangeclust.geometry.cells import cell_of_point
from pyrangeclust.geometry.points import L_MAX, Rect, StandardLength
from pyrangeclust.index.service import SpatialIndex
from pyrangeclust.models.requests import BuildParams
from pyrangeclust.solvers.center import gonzalez
from pyrangeclust.solvers.cost import Coreset, CostKind, nearest_distances, phi
from pyrangeclust.solvers.oracle import oracle_exact
from pyrangeclust.solvers.search import local_search
from pyrangeclust.validation import oracles
from pyrangeclust.validation.suites import tiny_rect

PARAMS = BuildParams(k_max=4, raw_node_limit=8)


def _unit_points(n: int, d: int, seed: int) -> np.ndarray:
    rng = np.random.default_rng(seed)
    means = rng.random((3, d)) * 0.6 + 0.2
    pts = means[rng.integers(0, 3, n)] + rng.normal(scale=0.05, size=(n, d))
    return np.clip(pts, 0.0, 0.999)


def _centers(points: np.ndarray, k: int, kind: CostKind) -> ApproxCenters:
    seeds = gonzalez(points, k)
    return ApproxCenters(local_search(points, k, kind, seeds), kind, PARAMS.c1)


def test_approx_centers():
    """
    Test validation of constant-factor centers.
    """
    A = ApproxCenters([0.5, 0.5], CostKind.median, 3.0)
    assert len(A) == 1 and A.centers.shape == (1, 2)
    with pytest.raises(ValueError):
        ApproxCenters(np.empty((0, 2)), CostKind.median, 3.0)
    with pytest.raises(ValueError):
        ApproxCenters([0.5, 0.5], CostKind.median, 1.0)


def test_coverage_probe():
    """
    Test the two ends of the coverage search.
    """
    points = _unit_points(200, 2, 1)
    pa = ExplicitAccess(points)
    A = ApproxCenters(points[:1], CostKind.median, PARAMS.c1)
    assert coverage_probe(pa, A, StandardLength(0)) == Coverage.covered
    assert coverage_probe(pa, A, StandardLength(30)) == Coverage.uncovered
    assert pa.stats.probes == 2


def test_approx_radius_sandwich():
    """
    Test that R brackets the farthest point-to-center distance.
    """
    for d in (2, 3):
        for seed in range(3):
            points = _unit_points(150, d, seed)
            weights = np.random.default_rng(seed).integers(1, 5, 150).astype(float)
            pa = ExplicitAccess(points, weights)
            for kind in (CostKind.median, CostKind.means):
                A = _centers(points, 3, kind)
                before = pa.stats.probes
                radius = approx_radius(pa, A)
                assert pa.stats.probes - before <= math.ceil(math.log2(L_MAX + 2))
                far = float(nearest_distances(points, A.centers).max())
                scaled = far / (A.c1 * weights.sum())
                root = math.sqrt(d)
                assert radius / (2 * root) <= scaled * (1 + 1e-9)
                assert scaled <= 2 * root * radius * (1 + 1e-9)


def test_approx_radius_coincident():
    """
    Test that points sitting on their centers give a zero radius.
    """
    points = np.array([[0.2, 0.2], [0.2, 0.2], [0.7, 0.4]])
    pa = ExplicitAccess(points)
    A = ApproxCenters(np.array([[0.2, 0.2], [0.7, 0.4]]), CostKind.median, 5.0)
    assert approx_radius(pa, A) == 0.0
    coreset = coreset_from_centers(pa, A, 2, 0.1, CostKind.median)
    assert sorted(coreset.weights.tolist()) == [1.0, 2.0]


def test_unified_grid_shells():
    """
    Test that every center's shells climb one level at a time to the root.
    """
    points = _unit_points(200, 2, 4)
    pa = ExplicitAccess(points)
    A = _centers(points, 2, CostKind.means)
    radius = approx_radius(pa, A)
    grid = build_unified_grid(pa, A, 0.2, CostKind.means, radius)
    assert grid.base == pytest.approx(radius * math.sqrt(A.c1 * 200))
    for i, center in enumerate(A.centers):
        shells = [s for s in grid.levels if s.center == i]
        assert [s.j for s in shells] == list(range(len(shells)))
        assert shells[-1].anchor.level == 0
        assert not shells[0].inner
        for inner, outer in zip(shells, shells[1:]):
            assert inner.anchor.level == outer.anchor.level + 1
            assert outer.inner == set(inner.cluster)
        for shell in shells:
            assert shell.anchor == cell_of_point(center, StandardLength(shell.anchor.level))
            assert shell.fine_level >= shell.first_level
    with pytest.raises(ValueError):
        build_unified_grid(pa, A, 0.2, CostKind.means, 0.0)


def test_second_level_cells_partition():
    """
    Test that the kept cells are disjoint and hold every point.
    """
    points = _unit_points(300, 3, 5)
    pa = ExplicitAccess(points)
    A = _centers(points, 3, CostKind.median)
    grid = build_unified_grid(pa, A, 0.3, CostKind.median, approx_radius(pa, A))
    cells = collect_second_level_cells(pa, grid)
    covered = []
    for cell in cells:
        start, end = pa.span(cell.handle)
        covered.extend(range(start, end))
    assert sorted(covered) == list(range(pa.location_count()))


def test_prune_nested():
    """
    Test that a candidate holding another one is dropped.
    """
    shell = object()
    kept = _prune_nested(None, [(3, 0, 2, "a", shell), (2, 0, 5, "b", shell),
                                (3, 5, 6, "c", shell), (1, 4, 9, "d", shell)])
    assert [handle for handle, _ in kept] == ["a", "c"]


def test_coreset_inequality():
    """
    Test the coreset bound for random center sets.
    """
    rng = np.random.default_rng(12)
    for kind in (CostKind.median, CostKind.means):
        points = _unit_points(400, 2, 7)
        weights = rng.integers(1, 3, 400).astype(float)
        pa = ExplicitAccess(points, weights)
        A = _centers(points, 4, kind)
        eps = 0.3
        coreset = coreset_from_centers(pa, A, 4, eps, kind)
        assert coreset.total_weight == pytest.approx(weights.sum())
        assert coreset.provenance == "from_centers"
        assert len(coreset) <= pa.location_count()
        for _ in range(30):
            centers = rng.random((int(rng.integers(1, 5)), 2))
            deviation = oracles.coreset_deviation(points, weights, coreset.points,
                                                  coreset.weights, centers, kind)
            assert deviation <= eps


def test_coreset_validate_guard():
    """
    Test that validation keeps a coreset whose representatives pass the center bound.
    """
    points = _unit_points(200, 2, 8)
    pa = ExplicitAccess(points)
    A = _centers(points, 2, CostKind.median)
    checked = coreset_from_centers(pa, A, 2, 0.3, CostKind.median, validate=True)
    assert checked.total_weight == pytest.approx(200.0)
    assert checked.provenance in ("from_centers", "exact")


def test_smaller_coreset():
    """
    Test the shrinking step on explicit coresets.
    """
    points = _unit_points(300, 2, 9)
    source = Coreset(points, np.ones(300), CostKind.means, 3, 0.0, "raw")
    small, A = smaller_coreset(source, 3, CostKind.means, PARAMS)
    assert small.provenance == "smaller"
    assert small.total_weight == pytest.approx(300.0)
    assert 1 <= len(A) <= 3

    few = Coreset(np.array([[0.1, 0.1], [0.1, 0.1], [0.4, 0.5]]), np.ones(3),
                  CostKind.median, 2, 0.0, "raw")
    merged, centers = smaller_coreset(few, 2, CostKind.median, PARAMS)
    assert len(merged) == 2 and merged.total_weight == 3.0
    assert len(centers) == 2

    empty, none = smaller_coreset(Coreset.empty(2, CostKind.median, 2, 0.0), 2,
                                  CostKind.median, PARAMS)
    assert none is None and len(empty) == 0


def test_coreset_merges_dense_line():
    """
    Test that a dense line of points shrinks into fewer weighted
    representatives while keeping the coreset bound.
    """
    rng = np.random.default_rng(14)
    n = 2000
    points = np.column_stack([np.linspace(0.001, 0.999, n), np.full(n, 0.5)])
    params = BuildParams(c1=1.01)
    eps = 0.5
    for kind in (CostKind.median, CostKind.means):
        A = ApproxCenters([[0.25, 0.5], [0.75, 0.5]], kind, params.c1)
        coreset = coreset_from_centers(ExplicitAccess(points), A, 2, eps, kind)
        assert len(coreset) < n
        assert coreset.total_weight == pytest.approx(float(n))
        assert coreset.weights.max() > 1.0
        for _ in range(20):
            m = int(rng.integers(1, 3))
            centers = np.column_stack([rng.random(m), np.full(m, rng.uniform(0.3, 0.7))])
            deviation = oracles.coreset_deviation(points, np.ones(n), coreset.points,
                                                  coreset.weights, centers, kind)
            assert deviation <= eps
        source = Coreset(points, np.ones(n), kind, 2, eps, "raw")
        small, found = smaller_coreset(source, 2, kind, params)
        assert len(small) < n
        assert small.total_weight == pytest.approx(float(n))
        assert 1 <= len(found) <= 2


def _index() -> SpatialIndex:
    points = _unit_points(300, 2, 10) * 40.0 - 7.0
    return SpatialIndex(points, params=PARAMS)


def test_clustering_query():
    """
    Test range queries through the index, including the degenerate ranges.
    """
    index = _index()
    q = Rect((0.0, 0.0), (0.7, 0.8))
    inside = oracles.scan_mask(index.locations, q)
    for query, kind in ((kmedian_query, CostKind.median), (kmeans_query, CostKind.means)):
        stats = QueryStats()
        result = query(index, q, 3, 0.3, PARAMS, stats=stats)
        assert result.kind == kind
        assert 1 <= len(result.centers) <= 3
        assert result.coreset.total_weight == pytest.approx(float(index.weights[inside].sum()))
        assert result.cost == pytest.approx(phi(result.coreset.points, result.centers, kind,
                                                result.coreset.weights))
        assert stats.point_accesses > 0
        assert {"canonical_size", "smaller_size", "coreset_size"} <= set(stats.extra)

    empty = clustering_query(index, Rect((2.0, 2.0), (3.0, 3.0)), 2, 0.2,
                             CostKind.median, PARAMS)
    assert empty.warning == "empty range"
    assert empty.centers.shape == (0, 2)

    point = index.locations[5]
    single = clustering_query(index, Rect(tuple(point), tuple(point)), 2, 0.2,
                              CostKind.means, PARAMS)
    assert single.solver == "exact" and single.cost == 0.0


def test_tiny_queries_near_optimal():
    """
    Test answers on tiny ranges against the exhaustive optimum.
    """
    index = _index()
    rng = np.random.default_rng(13)
    eps = 0.1
    checked = 0
    for _ in range(30):
        q = tiny_rect(index, rng)
        if q is None:
            continue
        mask = oracles.scan_mask(index.locations, q)
        inside, weights = index.locations[mask], index.weights[mask]
        for kind in (CostKind.median, CostKind.means):
            k = int(rng.integers(1, 4))
            result = clustering_query(index, q, k, eps, kind, PARAMS)
            optimum = oracle_exact(inside, k, kind, weights).cost
            assert phi(inside, result.centers, kind, weights) <= (1 + 3 * eps) * optimum + 1e-9
            checked += 1
    assert checked > 0


def test_index_access_matches_explicit():
    """
    Test that both backends see the same range.
    """
    index = _index()
    q = Rect((0.1, 0.2), (0.6, 0.9))
    pa = IndexAccess(index, q)
    mask = oracles.scan_mask(index.locations, q)
    explicit = ExplicitAccess(index.locations[mask], index.weights[mask])
    assert pa.total_weight() == pytest.approx(explicit.total_weight())
    assert pa.location_count() == explicit.location_count()
    points, _ = pa.distinct()
    assert sorted(map(tuple, points.tolist())) == sorted(map(tuple, explicit.locations.tolist()))
