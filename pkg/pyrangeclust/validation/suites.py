"""
Property suites run by `rangeclust validate`.

Every suite draws its instances from a generator seeded by the index
parameters, checks each property against a linear-scan oracle and reports
how many instances were examined, how many failed and the smallest margin
left by the bound.
"""

import logging
import math
from typing import Callable, Dict, List, Optional, Sequence, Union

import numpy as np

from pyrangeclust.engines.access import IndexAccess
from pyrangeclust.engines.extent import diameter_query, extent_coreset, radius_query
from pyrangeclust.engines.kcenter import kcenter_coreset, kcenter_lower_bound, kcenter_query
from pyrangeclust.engines.median_means import (approx_radius, clustering_query,
                                               coreset_from_centers, smaller_coreset)
from pyrangeclust.geometry.cells import cell_of_point
from pyrangeclust.geometry.points import Rect, StandardLength
from pyrangeclust.index.quadtree import CellRef
from pyrangeclust.models.responses import PropertyResult, ValidationReport
from pyrangeclust.solvers.cost import CostKind, phi
from pyrangeclust.solvers.oracle import oracle_exact
from pyrangeclust.utils.exceptions import QuerySpecError, RangeClusteringError
from pyrangeclust.validation import oracles

SUITES = ("structures", "coresets", "clustering", "extent", "sublinearity")

# Relative slack granted to floating-point sums and iterative solvers.
TOL = 1e-9
SOLVER_TOL = 1e-6

# Largest share of a big range the kcenter and diameter engines may touch.
ACCESS_SHARE = 0.05
SUBLINEAR_MIN_POINTS = 10000


class _Tally:
    """Accumulates the checks of one property."""

    def __init__(self, suite: str, name: str):
        self.suite = suite
        self.name = name
        self.checks = 0
        self.violations = 0
        self.worst = math.inf
        self.detail = ""

    def record(self, slack: float, detail: str = "") -> None:
        self.checks += 1
        if slack < 0:
            self.violations += 1
            if not self.detail:
                self.detail = detail
        self.worst = min(self.worst, slack)

    def fail(self, error: Exception) -> None:
        self.record(-1.0, f"{type(error).__name__}: {error}")

    def result(self) -> PropertyResult:
        worst = self.worst if math.isfinite(self.worst) else 0.0
        return PropertyResult(suite=self.suite, name=self.name, passed=self.violations == 0,
                              checks=self.checks, violations=self.violations,
                              worst_slack=float(worst), detail=self.detail)


class _Suite:
    def __init__(self, name: str):
        self.name = name
        self.tallies: Dict[str, _Tally] = {}

    def __getitem__(self, key: str) -> _Tally:
        if key not in self.tallies:
            self.tallies[key] = _Tally(self.name, key)
        return self.tallies[key]

    def results(self) -> List[PropertyResult]:
        return [t.result() for t in self.tallies.values()]


def random_rect(index, rng: np.random.Generator) -> Rect:
    """Random rectangle over the normalized data, with some bounds on data coordinates."""
    top = index.locations.max(axis=0)
    a, b = rng.random(index.dim) * top, rng.random(index.dim) * top
    lo, hi = np.minimum(a, b), np.maximum(a, b)
    for axis in range(index.dim):
        if rng.random() < 0.3:
            value = index.locations[rng.integers(index.locations.shape[0]), axis]
            if value <= hi[axis]:
                lo[axis] = value
            else:
                hi[axis] = value
    return Rect(tuple(lo.tolist()), tuple(hi.tolist()))


def tiny_rect(index, rng: np.random.Generator, most: int = 12) -> Optional[Rect]:
    """Square around a random location holding between 2 and `most` locations."""
    center = index.locations[rng.integers(index.locations.shape[0])]
    half = 0.25
    for _ in range(40):
        q = Rect(tuple((center - half).tolist()), tuple((center + half).tolist()))
        count = int(oracles.scan_mask(index.locations, q).sum())
        if count <= most:
            return q if count >= 2 else None
        half /= 2.0
    return None


def _random_centers(points: np.ndarray, k: int, rng: np.random.Generator) -> np.ndarray:
    picks = points[rng.integers(points.shape[0], size=rng.integers(1, k + 1))]
    spread = np.ptp(points, axis=0).max() if len(points) > 1 else 0.1
    return picks + rng.normal(scale=0.25 * max(spread, 1e-6), size=picks.shape)


def structures_suite(index, budget: int, rng: np.random.Generator) -> List[PropertyResult]:
    """Exact primitives against linear scans."""
    suite = _Suite("structures")
    locations, weights = index.locations, index.weights
    tree = index.range_tree
    for _ in range(budget):
        q = random_rect(index, rng)
        total = oracles.scan_count(locations, weights, q)
        suite["range_count"].record(TOL * max(1.0, total) - abs(tree.range_count(q) - total))
        suite["range_empty"].record(0.0 if tree.range_empty(q) == (total == 0) else -1.0)
        expected_first = oracles.scan_report_one(locations, q)
        suite["range_report_one"].record(
            0.0 if tree.range_report_one(q) == expected_first else -1.0, f"q={q}")
        expected = oracles.scan_extremes(locations, q)
        found = tree.range_extremes(q)
        same = (expected is None and found is None) or (
            expected is not None and found is not None
            and np.array_equal(found.lo, expected[0]) and np.array_equal(found.hi, expected[1]))
        suite["range_extremes"].record(0.0 if same else -1.0, f"q={q}")
        members = [m for c in tree.canonical_nodes(q) for m in c.members.tolist()]
        same = sorted(members) == oracles.scan_members(locations, q).tolist()
        suite["canonical_union"].record(0.0 if same and len(set(members)) == len(members)
                                        else -1.0, f"q={q}")
        for _ in range(10):
            point = locations[rng.integers(locations.shape[0])]
            cell = cell_of_point(point, StandardLength(int(rng.integers(0, 25))))
            node = index.locate(cell)
            expected_weight = oracles.scan_cell_count(locations, weights, cell, q)
            if node is None:
                suite["cell_range_count"].record(0.0 if expected_weight == 0 else -1.0)
                continue
            ref = CellRef(cell, node)
            try:
                weight, first = index.cell_range_query(ref, q)
                empty = index.cell_range_empty(ref, q)
            except RangeClusteringError as error:
                suite["cell_range_count"].fail(error)
                continue
            detail = f"cell={cell} q={q}"
            suite["cell_range_count"].record(
                TOL * max(1.0, expected_weight) - abs(weight - expected_weight), detail)
            suite["cell_range_empty"].record(0.0 if empty == (expected_weight == 0) else -1.0,
                                             detail)
            mask = oracles.scan_cell_mask(locations, cell, q)
            lowest = int(np.flatnonzero(mask)[0]) if mask.any() else None
            suite["cell_range_report_one"].record(0.0 if first == lowest else -1.0, detail)
    return suite.results()


def coresets_suite(index, budget: int, rng: np.random.Generator,
                   eps: float = 0.2) -> List[PropertyResult]:
    """Coreset inequality, weight conservation, radius sandwich and k-center displacement."""
    suite = _Suite("coresets")
    params = index.params
    sqrt_d = math.sqrt(index.dim)
    for _ in range(budget):
        q = random_rect(index, rng)
        mask = oracles.scan_mask(index.locations, q)
        points, weights = index.locations[mask], index.weights[mask]
        if len(points) < 2:
            continue
        k = int(rng.integers(1, 5))
        pa = IndexAccess(index, q)
        if pa.location_count() <= k:
            continue
        for kind in (CostKind.median, CostKind.means):
            try:
                canonical = pa.canonical_coreset(k, kind)
                _, A = smaller_coreset(canonical, k, kind, params)
                core = coreset_from_centers(pa, A, k, eps, kind)
            except RangeClusteringError as error:
                suite[f"weight_sum_{kind.value}"].fail(error)
                continue
            total = float(weights.sum())
            suite[f"weight_sum_{kind.value}"].record(
                TOL * max(1.0, total) - abs(core.total_weight - total))
            for _ in range(10):
                centers = _random_centers(points, k, rng)
                dev = oracles.coreset_deviation(points, weights, core.points, core.weights,
                                                centers, kind)
                suite[f"coreset_inequality_{kind.value}"].record(eps - dev, f"q={q} k={k}")
            radius = approx_radius(pa, A)
            if radius > 0:
                scaled = oracles.scan_radius(points, A.centers) / (A.c1 * total)
                slack = min(scaled - radius / (2 * sqrt_d), 2 * sqrt_d * radius - scaled)
                suite["radius_sandwich"].record(slack / scaled, f"q={q}")
        bound = kcenter_lower_bound(pa, k)
        if bound.lb is not None:
            suite["kcenter_cover_size"].record(float(k * 3 ** index.dim - len(bound.cover)))
            core = kcenter_coreset(pa, bound, k, eps)
            limit = sqrt_d * eps * bound.lb.value
            suite["kcenter_displacement"].record(
                limit * (1 + TOL) - oracles.displacement(points, core.points), f"q={q} k={k}")
    return suite.results()


def clustering_suite(index, budget: int, rng: np.random.Generator,
                     eps: float = 0.2) -> List[PropertyResult]:
    """Answers on tiny ranges against the exhaustive optimum."""
    suite = _Suite("clustering")
    params = index.params
    sqrt_d = math.sqrt(index.dim)
    for _ in range(budget):
        q = tiny_rect(index, rng)
        if q is None:
            continue
        mask = oracles.scan_mask(index.locations, q)
        points, weights = index.locations[mask], index.weights[mask]
        k = int(rng.integers(1, 4))
        for kind in (CostKind.median, CostKind.means):
            opt = oracle_exact(points, k, kind, weights).cost
            result = clustering_query(index, q, k, eps, kind, params)
            value = phi(points, result.centers, kind, weights)
            bound = (1 + eps) * (1 + params.local_search_tol) * opt
            suite[f"{kind.value}_factor"].record(bound + SOLVER_TOL * max(opt, 1e-12) - value,
                                                 f"q={q} k={k}")
        opt = oracle_exact(points, k, CostKind.center).cost
        pa = IndexAccess(index, q)
        bound = kcenter_lower_bound(pa, k)
        if bound.lb is not None:
            suite["kcenter_lower_bound"].record(opt * (1 + TOL) - bound.lb.value, f"q={q} k={k}")
        result = kcenter_query(index, q, k, eps, params)
        value = phi(points, result.centers, CostKind.center)
        suite["kcenter_factor"].record((1 + 2 * sqrt_d * eps) * opt * (1 + SOLVER_TOL) + TOL
                                       - value, f"q={q} k={k}")
    return suite.results()


def extent_suite(index, budget: int, rng: np.random.Generator,
                 eps_values: Sequence[float] = (0.3, 0.1)) -> List[PropertyResult]:
    """Diameter and radius sandwich bounds and coreset membership."""
    suite = _Suite("extent")
    for _ in range(budget):
        q = random_rect(index, rng)
        members = oracles.scan_members(index.locations, q)
        if not len(members):
            continue
        points = index.locations[members]
        diameter = oracles.scan_diameter(points)
        radius = oracles.scan_enclosing_radius(points)
        for eps in eps_values:
            ext = extent_coreset(IndexAccess(index, q), eps)
            suite["coreset_subset"].record(0.0 if set(ext.locations) <= set(members.tolist())
                                           else -1.0, f"q={q}")
            answer = diameter_query(index, q, eps).cost
            suite["diameter_sandwich"].record(
                min(diameter - answer, answer - diameter / (1 + eps)) + TOL * max(diameter, 1.0),
                f"q={q} eps={eps}")
            answer = radius_query(index, q, eps).cost
            suite["radius_sandwich"].record(
                min(answer - radius, (1 + eps) * radius - answer) + SOLVER_TOL * max(radius, 1e-9),
                f"q={q} eps={eps}")
    return suite.results()


def large_rect(index, rng: np.random.Generator) -> Rect:
    """Rectangle spanning half to nine tenths of the data along every axis."""
    bottom, top = index.locations.min(axis=0), index.locations.max(axis=0)
    extent = top - bottom
    side = rng.uniform(0.5, 0.9, index.dim) * extent
    lo = bottom + rng.random(index.dim) * (extent - side)
    return Rect(tuple(lo.tolist()), tuple((lo + side).tolist()))


def sublinearity_suite(index, budget: int, rng: np.random.Generator,
                       eps: float = 0.25, k: int = 8) -> List[PropertyResult]:
    """
    Structure operations per query on ranges holding a quarter of the data
    or more, as a share of the range size.

    Ranges below `SUBLINEAR_MIN_POINTS` locations are skipped, so small
    datasets report no checks.
    """
    suite = _Suite("sublinearity")
    floor = max(index.tree.size / 4.0, SUBLINEAR_MIN_POINTS)
    for _ in range(budget):
        q = large_rect(index, rng)
        size = len(oracles.scan_members(index.locations, q))
        if size < floor:
            continue
        allowed = ACCESS_SHARE * size
        answer = kcenter_query(index, q, k, eps, index.params)
        suite["kcenter_access_ratio"].record(
            (allowed - answer.stats.point_accesses) / size, f"q={q} size={size}")
        answer = diameter_query(index, q, eps)
        suite["diameter_access_ratio"].record(
            (allowed - answer.stats.point_accesses) / size, f"q={q} size={size}")
    return suite.results()


RUNNERS: Dict[str, Callable] = {
    "structures": structures_suite,
    "coresets": coresets_suite,
    "clustering": clustering_suite,
    "extent": extent_suite,
    "sublinearity": sublinearity_suite,
}


def run_validation(index, suites: Union[str, Sequence[str]] = "all",
                   budget: int = 20) -> ValidationReport:
    """
    Run property suites against a built index.

    Parameters
    ----------
    index: SpatialIndex
    suites: str | Sequence[str], default="all"
        Suite names, or `all`.
    budget: int, default=20
        Random instances per suite.

    Returns
    -------
    ValidationReport
    """
    names = list(SUITES) if suites == "all" else (
        [suites] if isinstance(suites, str) else list(suites))
    unknown = [s for s in names if s not in RUNNERS]
    if unknown:
        raise QuerySpecError(f"Unknown suites {unknown}; choose from {list(SUITES)} or all")
    if budget < 1:
        raise QuerySpecError("The validation budget must be positive")
    report = ValidationReport(n=index.n, d=index.dim, suites=names)
    for name in names:
        rng = np.random.default_rng(index.params.seed + SUITES.index(name))
        results = RUNNERS[name](index, budget, rng)
        failed = [r.name for r in results if not r.passed]
        logging.info(f"Suite {name}: {len(results)} properties, "
                     f"{'all passed' if not failed else f'failed {failed}'}")
        report.results.extend(results)
    return report
