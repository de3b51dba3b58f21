"""
Point-access backends shared by the query engines.

The coreset engine runs against either an index restricted to a query
rectangle or an explicit weighted point list. Both answer the same
primitives on standard cells, with counts being weight sums and
representatives the lowest location in Z-order.
"""

from abc import ABC, abstractmethod
from bisect import bisect_left
from dataclasses import dataclass, field
from typing import Any, Dict, List, NamedTuple, Optional, Tuple

import numpy as np

from pyrangeclust.geometry.cells import CellId, FaceKind, grid_coords, morton_key
from pyrangeclust.geometry.points import L_MAX, Rect
from pyrangeclust.index.quadtree import CellRef, morton_keys
from pyrangeclust.index.range_tree import Extremes
from pyrangeclust.solvers.cost import Coreset, CostKind


@dataclass
class QueryStats:
    """
    Counters of one query.

    Attributes
    ----------
    point_accesses: int
        Structure operations issued (one per count, report, lookup or
        extreme call).
    probes: int
        Coverage probes of the radius search.
    """

    point_accesses: int = 0
    probes: int = 0
    extra: Dict[str, Any] = field(default_factory=dict)

    def hit(self, times: int = 1) -> None:
        self.point_accesses += times

    def as_dict(self) -> Dict[str, Any]:
        out = {"point_accesses": self.point_accesses, "probes": self.probes}
        out.update(self.extra)
        return out


class Span(NamedTuple):
    """Cell of an explicit point list, with the slice of its points."""

    cell: CellId
    start: int
    end: int


class PointAccess(ABC):
    """
    Primitives over a weighted point set `P_Q` needed by the coreset engine.

    Handles returned by `locate` and `subdivide` are opaque; `span` gives
    the slice of locations they hold, so that nested handles have nested
    spans.
    """

    dim: int

    def __init__(self, stats: Optional[QueryStats] = None):
        self.stats = stats or QueryStats()

    @abstractmethod
    def total_weight(self) -> float:
        """Total weight of `P_Q`."""

    @abstractmethod
    def location_count(self) -> int:
        """Number of distinct locations of `P_Q`."""

    @abstractmethod
    def distinct(self) -> Tuple[np.ndarray, np.ndarray]:
        """Every location of `P_Q` with its weight, in Z-order."""

    @abstractmethod
    def locate(self, cell: CellId):
        """Handle of the points of a standard cell, or `None` if it holds none."""

    @abstractmethod
    def span(self, handle) -> Tuple[int, int]:
        ...

    @abstractmethod
    def subdivide(self, handle, level: int) -> List[Any]:
        """Handles of the nonempty level-`level` cells below `handle`."""

    @abstractmethod
    def cell_of(self, handle) -> CellId:
        ...

    @abstractmethod
    def query(self, handle) -> Tuple[float, Optional[int]]:
        """Weight of `P_Q` in the handle's cell and its lowest location."""

    @abstractmethod
    def point(self, location: int) -> np.ndarray:
        ...

    @abstractmethod
    def extremes(self) -> Optional[Extremes]:
        ...

    def meets(self, cell: CellId) -> bool:
        """Whether a cell can hold points of `P_Q`."""
        return True

    def is_empty(self) -> bool:
        return self.total_weight() <= 0

    def cell_weight(self, cell: CellId) -> Tuple[float, Optional[int]]:
        handle = self.locate(cell)
        if handle is None:
            return 0.0, None
        return self.query(handle)


class IndexAccess(PointAccess):
    """
    The points of a `SpatialIndex` inside a normalized query rectangle.

    Parameters
    ----------
    index: SpatialIndex
    q: Rect
        Normalized query rectangle.
    stats: QueryStats | None
    """

    def __init__(self, index, q: Rect, stats: Optional[QueryStats] = None):
        super().__init__(stats)
        self.index = index
        self.q = q
        self.dim = index.dim
        self._total: Optional[float] = None

    def total_weight(self) -> float:
        if self._total is None:
            self.stats.hit()
            self._total = self.index.range_tree.range_count(self.q)
        return self._total

    def location_count(self) -> int:
        self.stats.hit()
        return int(sum(len(c.members) for c in self.index.range_tree.canonical_nodes(self.q)))

    def distinct(self) -> Tuple[np.ndarray, np.ndarray]:
        self.stats.hit()
        nodes = self.index.range_tree.canonical_nodes(self.q)
        if not nodes:
            return np.empty((0, self.dim)), np.empty(0)
        members = np.sort(np.concatenate([c.members for c in nodes]))
        return self.index.locations[members], self.index.weights[members]

    def meets(self, cell: CellId) -> bool:
        return cell.meets(self.q)

    def locate(self, cell: CellId) -> Optional[CellRef]:
        self.stats.hit()
        node = self.index.locate(cell)
        return None if node is None else CellRef(cell, node)

    def span(self, handle: CellRef) -> Tuple[int, int]:
        return handle.node.start, handle.node.end

    def subdivide(self, handle: CellRef, level: int) -> List[CellRef]:
        self.stats.hit()
        return self.index.tree.subdivide_to_side(handle.node, level, self.q)

    def cell_of(self, handle: CellRef) -> CellId:
        return handle.cell

    def query(self, handle: CellRef) -> Tuple[float, Optional[int]]:
        """
        Weight and lowest location of `P_Q` in the handle's cell.

        Cells inside `q` answer from their node summary and cost no access.
        """
        cls = self.index.classify(handle, self.q)
        if cls.kind != FaceKind.INSIDE:
            self.stats.hit()
        return self.index.cell_range_query(handle, self.q, cls)

    def empty_cell(self, handle: CellRef) -> bool:
        cls = self.index.classify(handle, self.q)
        if cls.kind == FaceKind.INSIDE:
            return False
        self.stats.hit()
        return self.index.cell_range_empty(handle, self.q, cls)

    def report_one(self, handle: CellRef) -> Optional[int]:
        """Lowest location of `P_Q` in the cell, deciding emptiness first."""
        cls = self.index.classify(handle, self.q)
        if cls.kind == FaceKind.INSIDE:
            return self.index.cell_range_report_one(handle, self.q, cls)
        self.stats.hit()
        if self.index.cell_range_empty(handle, self.q, cls):
            return None
        return self.index.cell_range_report_one(handle, self.q, cls)

    def point(self, location: int) -> np.ndarray:
        return self.index.locations[location]

    def extremes(self) -> Optional[Extremes]:
        self.stats.hit()
        return self.index.range_tree.range_extremes(self.q)

    def canonical_coreset(self, k: int, kind: CostKind) -> Coreset:
        self.stats.hit()
        return self.index.coresets.canonical_coreset(self.q, k, kind)

    def axis_extreme(self, axis: int, column: CellId, lo: float, hi: float,
                     largest: bool) -> Optional[int]:
        """Extreme `axis` coordinate in [lo, hi] over points projecting into a column cell."""
        self.stats.hit()
        projected = self.index.extremes.projected_tree(axis)
        node = projected.compressed_cell(column)
        if node is None:
            return None
        return self.index.extremes.axis_extreme(axis, node, lo, hi, largest)


class ExplicitAccess(PointAccess):
    """
    An explicit weighted point list in normalized coordinates.

    Points are merged by finest cell and kept in Z-order, so cell
    lookups are binary searches over Morton keys.
    """

    def __init__(self, points: np.ndarray, weights: Optional[np.ndarray] = None,
                 stats: Optional[QueryStats] = None):
        super().__init__(stats)
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        w = np.ones(pts.shape[0]) if weights is None else np.asarray(weights, dtype=float)
        keep = w > 0
        pts, w = pts[keep], w[keep]
        self.dim = pts.shape[1]
        coords = grid_coords(pts, L_MAX)
        keys = morton_keys(coords)
        order = sorted(range(len(keys)), key=keys.__getitem__)
        sorted_keys = [keys[i] for i in order]
        firsts = [i for i in range(len(order)) if i == 0 or sorted_keys[i] != sorted_keys[i - 1]]
        bounds = firsts + [len(order)]
        self.keys = [sorted_keys[i] for i in firsts]
        self.locations = pts[[order[i] for i in firsts]] if firsts else np.empty((0, self.dim))
        self.coords = coords[[order[i] for i in firsts]] if firsts else np.empty((0, self.dim))
        self.weights = np.array([w[order[bounds[t]:bounds[t + 1]]].sum()
                                 for t in range(len(firsts))])
        self._cumulative = np.concatenate(([0.0], np.cumsum(self.weights)))

    def total_weight(self) -> float:
        return float(self._cumulative[-1])

    def location_count(self) -> int:
        return len(self.keys)

    def distinct(self) -> Tuple[np.ndarray, np.ndarray]:
        return self.locations, self.weights

    def locate(self, cell: CellId) -> Optional[Span]:
        self.stats.hit()
        lo, hi = morton_key(cell)
        start = bisect_left(self.keys, lo)
        end = bisect_left(self.keys, hi, start)
        return Span(cell, start, end) if end > start else None

    def span(self, handle: Span) -> Tuple[int, int]:
        return handle.start, handle.end

    def subdivide(self, handle: Span, level: int) -> List[Span]:
        self.stats.hit()
        shift = self.dim * (L_MAX - level)
        out: List[Span] = []
        pos = handle.start
        while pos < handle.end:
            prefix = self.keys[pos] >> shift
            end = bisect_left(self.keys, (prefix + 1) << shift, pos, handle.end)
            cell = CellId(L_MAX, tuple(int(c) for c in self.coords[pos])).ancestor(level)
            out.append(Span(cell, pos, end))
            pos = end
        return out

    def cell_of(self, handle: Span) -> CellId:
        return handle.cell

    def query(self, handle: Span) -> Tuple[float, Optional[int]]:
        self.stats.hit()
        return float(self._cumulative[handle.end] - self._cumulative[handle.start]), handle.start

    def point(self, location: int) -> np.ndarray:
        return self.locations[location]

    def extremes(self) -> Optional[Extremes]:
        if not len(self.keys):
            return None
        low = tuple(int(i) for i in self.locations.argmin(axis=0))
        high = tuple(int(i) for i in self.locations.argmax(axis=0))
        return Extremes(self.locations.min(axis=0), self.locations.max(axis=0), low, high)


@dataclass(eq=False)
class EngineResult:
    """
    Answer of an engine in normalized units.

    Attributes
    ----------
    centers: np.ndarray
    cost: float
    kind: CostKind
    solver: str
    coreset: Coreset | None
    stats: QueryStats
    warning: str | None
    """

    centers: np.ndarray
    cost: float
    kind: CostKind
    solver: str
    coreset: Optional[Coreset]
    stats: QueryStats
    warning: Optional[str] = None
