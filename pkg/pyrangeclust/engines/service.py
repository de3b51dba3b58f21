"""
Query execution against a built index, in original dataset units.
"""

import logging
import time
from concurrent.futures import ThreadPoolExecutor
from typing import List, Optional

import numpy as np

from pyrangeclust.engines.access import EngineResult, QueryStats
from pyrangeclust.engines.extent import diameter_query, radius_query
from pyrangeclust.engines.kcenter import kcenter_query
from pyrangeclust.engines.median_means import kmeans_query, kmedian_query
from pyrangeclust.geometry.points import Rect
from pyrangeclust.models.requests import QuerySpec, QueryType
from pyrangeclust.models.responses import ClusteringAnswer
from pyrangeclust.solvers.cost import CostKind
from pyrangeclust.utils.exceptions import QuerySpecError


def _plain(value):
    if isinstance(value, np.generic):
        return value.item()
    if isinstance(value, dict):
        return {k: _plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_plain(v) for v in value]
    return value


class QueryService:
    """
    Runs `QuerySpec`s on a `SpatialIndex` and builds `ClusteringAnswer`s.

    Parameters
    ----------
    index: SpatialIndex
    validate: bool, default=False
        Enables the per-representative distance check of the k-median and
        k-means coresets.
    with_coreset: bool, default=False
        Attach the final coreset to every answer.
    timing: bool, default=True
        Report wall time; `False` reports 0 so outputs compare byte for byte.
    """

    def __init__(self, index, validate: bool = False, with_coreset: bool = False,
                 timing: bool = True):
        self.index = index
        self.params = index.params
        self.validate = validate
        self.with_coreset = with_coreset
        self.timing = timing

    def check(self, spec: QuerySpec) -> Rect:
        """Reject specs the index cannot answer and return the normalized range."""
        if len(spec.lo) != self.index.dim:
            raise QuerySpecError(f"Range has dimension {len(spec.lo)}, index has {self.index.dim}")
        if spec.type.is_clustering and spec.k > self.index.n:
            raise QuerySpecError(f"k = {spec.k} exceeds the {self.index.n} indexed points")
        return self.index.unit_rect(spec.lo, spec.hi)

    def execute(self, spec: QuerySpec, stats: Optional[QueryStats] = None) -> EngineResult:
        """Answer one spec in normalized units."""
        q = self.check(spec)
        stats = stats or QueryStats()
        if spec.type == QueryType.kmedian:
            return kmedian_query(self.index, q, spec.k, spec.eps, self.params, self.validate, stats)
        if spec.type == QueryType.kmeans:
            return kmeans_query(self.index, q, spec.k, spec.eps, self.params, self.validate, stats)
        if spec.type == QueryType.kcenter:
            return kcenter_query(self.index, q, spec.k, spec.eps, self.params, stats)
        if spec.type == QueryType.diameter:
            return diameter_query(self.index, q, spec.eps, stats)
        return radius_query(self.index, q, spec.eps, stats)

    def answer(self, spec: QuerySpec) -> ClusteringAnswer:
        """
        Answer one spec.

        Parameters
        ----------
        spec: QuerySpec

        Returns
        -------
        ClusteringAnswer
            Centers in original coordinates; linear costs rescaled by the
            normalizer scale and k-means costs by its square.
        """
        started = time.perf_counter()
        result = self.execute(spec)
        elapsed = (time.perf_counter() - started) * 1000.0 if self.timing else 0.0
        normalizer = self.index.normalizer
        power = 2 if result.kind == CostKind.means else 1
        centers = normalizer.from_unit(result.centers) if len(result.centers) else result.centers
        instrumentation = _plain(result.stats.as_dict())
        for key in ("lb", "displacement", "apx"):
            if key in instrumentation:
                instrumentation[key] = normalizer.length_from_unit(instrumentation[key])
        coreset_rows = None
        if self.with_coreset and result.coreset is not None:
            points = result.coreset.points
            raw = normalizer.from_unit(points) if len(points) else points.reshape(0, self.index.dim)
            coreset_rows = [row + [float(w)] for row, w in
                            zip(raw.tolist(), result.coreset.weights.tolist())]
        answer = ClusteringAnswer(
            type=spec.type.value, k=spec.k, eps=spec.eps,
            centers=np.asarray(centers, dtype=float).tolist(),
            cost=normalizer.length_from_unit(float(result.cost), power),
            solver=result.solver,
            coreset_size=0 if result.coreset is None else len(result.coreset),
            point_accesses=result.stats.point_accesses,
            wall_ms=round(elapsed, 3),
            instrumentation=instrumentation,
            coreset=coreset_rows,
            warning=result.warning)
        logging.debug(f"{spec.type.value} answered: cost {answer.cost}, "
                      f"{answer.point_accesses} accesses, {answer.wall_ms} ms")
        return answer

    def answer_batch(self, specs: List[QuerySpec], threads: int = 1) -> List[ClusteringAnswer]:
        """Answer many specs on a thread pool; results keep the input order."""
        if threads <= 1:
            return [self.answer(spec) for spec in specs]
        with ThreadPoolExecutor(max_workers=threads) as pool:
            return list(pool.map(self.answer, specs))
