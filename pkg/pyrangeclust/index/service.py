"""
The spatial index: every structure built over one dataset, and the
dispatch of cell-restricted range queries by face class.
"""

import logging
import time
from pathlib import Path
from typing import Optional, Tuple, Union

import numpy as np

from pyrangeclust.geometry.cells import CellId, FaceClass, FaceKind, classify_cell
from pyrangeclust.geometry.points import Rect, normalize
from pyrangeclust.index.coreset_tree import CoresetTree
from pyrangeclust.index.projections import (AxisExtremeTable, ProjectionVersionTable,
                                            build_projection_tables)
from pyrangeclust.index.quadtree import CellRef, QuadNode, build_quadtree
from pyrangeclust.index.range_tree import RangeTree
from pyrangeclust.models.requests import BuildParams
from pyrangeclust.utils import data
from pyrangeclust.utils.exceptions import InvariantViolation


class SpatialIndex:
    """
    Preprocessed dataset answering exact range primitives.

    Parameters
    ----------
    points: np.ndarray
        Raw coordinates, shape (n, d).
    weights: np.ndarray | None
        Positive point weights; unit weights when `None`.
    params: BuildParams | None
    threads: int, default=1
        Workers for the eager coreset build.

    Attributes
    ----------
    normalizer: Normalizer
    tree: CompressedQuadtree
    range_tree: RangeTree
    projections: ProjectionVersionTable
    extremes: AxisExtremeTable
    coresets: CoresetTree
    """

    def __init__(self, points: np.ndarray, weights: Optional[np.ndarray] = None,
                 params: Optional[BuildParams] = None, threads: int = 1):
        started = time.perf_counter()
        self.params = params or BuildParams()
        self.raw_points = np.asarray(points, dtype=float)
        self.raw_weights = None if weights is None else np.asarray(weights, dtype=float)
        self.dim = data.check_dimension(self.raw_points)
        self.normalizer, unit = normalize(self.raw_points)
        self.tree = build_quadtree(unit, self.raw_weights)
        self.range_tree = RangeTree(self.tree.locations, self.tree.weights)
        self.projections = build_projection_tables(self.tree)
        self.extremes = AxisExtremeTable(self.tree).build_all()
        self.coresets = CoresetTree(self.range_tree, self.params)
        if self.params.eager_coresets:
            self.coresets.build_eager(threads)
        self.build_seconds = time.perf_counter() - started
        logging.info(f"Index built: n={len(self.raw_points)}, d={self.dim}, "
                     f"locations={self.tree.size}, nodes={len(self.tree.nodes)}, "
                     f"projection subsets={len(self.projections.built)}, "
                     f"projection insertions={self.projections.insertions}, "
                     f"axis extreme insertions={self.extremes.insertions}, "
                     f"time={self.build_seconds:.3f}s, "
                     f"memory~{self.memory_estimate() / 2 ** 20:.1f}MiB")

    @property
    def n(self) -> int:
        return int(self.raw_points.shape[0])

    @property
    def weighted(self) -> bool:
        return self.raw_weights is not None

    @property
    def locations(self) -> np.ndarray:
        return self.tree.locations

    @property
    def weights(self) -> np.ndarray:
        return self.tree.weights

    def memory_estimate(self) -> int:
        """Rough byte count of the built structures."""
        nodes = 120 * len(self.tree.nodes)
        slots = self.range_tree.slot_count * (8 * (2 + 2 * self.dim))
        versions = 300 * (self.projections.insertions + self.extremes.insertions)
        return int(self.tree.locations.nbytes + nodes + slots + versions)

    def save(self, path: Union[str, Path]) -> None:
        data.write_bundle(path, self.raw_points, self.raw_weights,
                          self.params.dict(), self.normalizer.to_dict())

    @classmethod
    def load(cls, path: Union[str, Path], threads: int = 1) -> "SpatialIndex":
        """Rebuild an index from a bundle; the build is deterministic."""
        points, weights, header = data.read_bundle(path)
        return cls(points, weights, BuildParams(**header["params"]), threads)

    def to_unit_rect(self, rect: Rect) -> Rect:
        return self.normalizer.rect_to_unit(rect)

    def locate(self, cell: CellId) -> Optional[QuadNode]:
        return self.tree.compressed_cell(cell)

    def dispatch_box(self, ref: CellRef) -> CellId:
        """The smaller of a reference's standard cell and its node cell."""
        return ref.node.cell if ref.node.level >= ref.cell.level else ref.cell

    def classify(self, ref: CellRef, q: Rect) -> FaceClass:
        return classify_cell(self.dispatch_box(ref), q)

    def cell_range_query(self, ref: CellRef, q: Rect,
                         cls: Optional[FaceClass] = None) -> Tuple[float, Optional[int]]:
        """
        Weight and lowest location of the points in both `q` and a cell.

        Parameters
        ----------
        ref: CellRef
            Standard cell with its compressed node.
        q: Rect
            Normalized query rectangle.
        cls: FaceClass | None
            Classification of the cell against `q`; computed when omitted.

        Returns
        -------
        float, int | None
            Inside cells answer from the node summary, corner cells from
            the range tree, and the other crossing cells from the node's
            projection version over the crossing axes.
        """
        cell = self.dispatch_box(ref)
        actual = classify_cell(cell, q)
        if cls is not None and cls != actual:
            raise InvariantViolation(f"Face class {cls} does not match {actual} for {cell}")
        node = ref.node
        if actual.kind == FaceKind.OUTSIDE:
            return 0.0, None
        if actual.kind == FaceKind.INSIDE:
            return node.weight, node.start
        if actual.kind == FaceKind.CORNER:
            lo, hi = cell.box()
            lo = np.maximum(lo, q.lo_array)
            hi = np.minimum(np.nextafter(hi, -np.inf), q.hi_array)
            nodes = self.range_tree.canonical_nodes_box(lo.tolist(), hi.tolist())
            if not nodes:
                return 0.0, None
            return float(sum(c.weight for c in nodes)), min(c.first for c in nodes)
        kept = list(actual.crossing(self.dim))
        weight, first = self.projections.query(node, actual.witness,
                                               q.lo_array[kept].tolist(),
                                               q.hi_array[kept].tolist())
        if weight <= 0:
            return 0.0, None
        return weight, first

    def cell_range_count(self, ref: CellRef, q: Rect, cls: Optional[FaceClass] = None) -> float:
        return self.cell_range_query(ref, q, cls)[0]

    def cell_range_report_one(self, ref: CellRef, q: Rect,
                              cls: Optional[FaceClass] = None) -> Optional[int]:
        return self.cell_range_query(ref, q, cls)[1]

    def cell_range_empty(self, ref: CellRef, q: Rect, cls: Optional[FaceClass] = None) -> bool:
        """
        Whether no point lies in both `q` and the cell.

        A cell crossing the facets of `q` along a single axis, and only
        one of them, is decided from the node's closest point to that facet.
        """
        cell = self.dispatch_box(ref)
        actual = cls or classify_cell(cell, q)
        if actual.kind == FaceKind.AVOIDS_BELOW and actual.t == self.dim - 1:
            axis = actual.crossing(self.dim)[0]
            lo, hi = cell.box()
            lower = lo[axis] <= q.lo[axis] <= hi[axis]
            upper = lo[axis] <= q.hi[axis] <= hi[axis]
            if lower and not upper:
                return bool(self.locations[ref.node.high[axis], axis] < q.lo[axis])
            if upper and not lower:
                return bool(self.locations[ref.node.low[axis], axis] > q.hi[axis])
        return self.cell_range_query(ref, q, cls)[0] <= 0

    def unit_rect(self, lo, hi) -> Rect:
        """Normalized rectangle from raw bounds."""
        return self.normalizer.rect_to_unit(Rect.from_bounds(lo, hi))
