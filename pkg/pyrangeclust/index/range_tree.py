"""
Static d-dimensional range tree over the quadtree locations.

Every axis but the last is a balanced tree whose nodes own a tree over the
next axis. The last axis is an array-backed segment tree whose nodes are
the canonical nodes of a query: each one summarizes its members' weight,
lowest location and per-axis extreme locations.
"""

import logging
from typing import Iterator, List, NamedTuple, Optional, Sequence, Tuple

import numpy as np

from pyrangeclust.geometry.points import Rect


class CanonicalNode(NamedTuple):
    """
    Last-axis node fully inside a query box.

    Attributes
    ----------
    index: int
        Identifier, unique within its tree.
    members: np.ndarray
        Location indices of the node.
    weight: float
    first: int
        Lowest location index among the members.
    low, high: tuple[int, ...]
        Per axis, the member with the smallest and largest coordinate.
    """

    index: int
    members: np.ndarray
    weight: float
    first: int
    low: Tuple[int, ...]
    high: Tuple[int, ...]


class Extremes(NamedTuple):
    """Smallest enclosing box of a point set and the points attaining it."""

    lo: np.ndarray
    hi: np.ndarray
    low: Tuple[int, ...]
    high: Tuple[int, ...]


class _LastAxis:
    """Segment tree over items sorted by the last axis."""

    def __init__(self, items: np.ndarray, coords: np.ndarray, weights: np.ndarray,
                 offset: int):
        axis = coords.shape[1] - 1
        self.items = items[np.lexsort((items, coords[items, axis]))]
        self.keys = coords[self.items, axis]
        self.offset = offset
        count = len(self.items)
        span = 1
        while span < count:
            span *= 2
        self.span = span
        dim = coords.shape[1]
        sentinel = coords.shape[0]
        self.weight = np.zeros(2 * span)
        self.first = np.full(2 * span, sentinel, dtype=np.int64)
        self.low = np.full((2 * span, dim), -1, dtype=np.int64)
        self.high = np.full((2 * span, dim), -1, dtype=np.int64)
        low_val = np.full((2 * span, dim), np.inf)
        high_val = np.full((2 * span, dim), -np.inf)
        leaves = np.arange(span, span + count)
        self.weight[leaves] = weights[self.items]
        self.first[leaves] = self.items
        self.low[leaves] = self.items[:, None]
        self.high[leaves] = self.items[:, None]
        low_val[leaves] = coords[self.items]
        high_val[leaves] = coords[self.items]
        width = span // 2
        while width >= 1:
            v = np.arange(width, 2 * width)
            left, right = 2 * v, 2 * v + 1
            self.weight[v] = self.weight[left] + self.weight[right]
            self.first[v] = np.minimum(self.first[left], self.first[right])
            take = (low_val[left] < low_val[right]) | (
                (low_val[left] == low_val[right])
                & ((self.low[right] < 0) | ((self.low[left] >= 0) & (self.low[left] <= self.low[right]))))
            self.low[v] = np.where(take, self.low[left], self.low[right])
            low_val[v] = np.where(take, low_val[left], low_val[right])
            take = (high_val[left] > high_val[right]) | (
                (high_val[left] == high_val[right])
                & ((self.high[right] < 0) | ((self.high[left] >= 0) & (self.high[left] <= self.high[right]))))
            self.high[v] = np.where(take, self.high[left], self.high[right])
            high_val[v] = np.where(take, high_val[left], high_val[right])
            width //= 2

    @property
    def node_count(self) -> int:
        return 2 * self.span

    def canonical(self, lo: float, hi: float) -> List[CanonicalNode]:
        a = int(np.searchsorted(self.keys, lo, side="left"))
        b = int(np.searchsorted(self.keys, hi, side="right"))
        found = []
        left, right = a + self.span, b + self.span
        while left < right:
            if left & 1:
                found.append(left)
                left += 1
            if right & 1:
                right -= 1
                found.append(right)
            left >>= 1
            right >>= 1
        nodes = [self._node(v) for v in found]
        nodes.sort(key=lambda c: c.members[0] if len(c.members) else -1)
        return nodes

    def _node(self, v: int) -> CanonicalNode:
        height = self.span.bit_length() - v.bit_length()
        start = (v << height) - self.span
        end = min(((v + 1) << height) - self.span, len(self.items))
        return CanonicalNode(self.offset + v, self.items[start:end], float(self.weight[v]),
                             int(self.first[v]), tuple(self.low[v].tolist()),
                             tuple(self.high[v].tolist()))


class _AxisNode:
    __slots__ = ("lo_key", "hi_key", "left", "right", "inner")

    def __init__(self, lo_key: float, hi_key: float):
        self.lo_key = lo_key
        self.hi_key = hi_key
        self.left: Optional["_AxisNode"] = None
        self.right: Optional["_AxisNode"] = None
        self.inner = None


class RangeTree:
    """
    Range tree answering exact count, emptiness, report-one and extreme
    queries on closed boxes.

    Parameters
    ----------
    coords: np.ndarray
        Location coordinates, shape (m, d).
    weights: np.ndarray
        Location multiplicities.
    """

    def __init__(self, coords: np.ndarray, weights: np.ndarray):
        self.coords = np.asarray(coords, dtype=float)
        self.weights = np.asarray(weights, dtype=float)
        self.dim = self.coords.shape[1]
        self.size = self.coords.shape[0]
        self._offset = 0
        self.root = self._build(np.arange(self.size), 0)
        logging.debug(f"Range tree over {self.size} locations with {self._offset} last-axis slots")

    def _build(self, items: np.ndarray, axis: int):
        if axis == self.dim - 1:
            last = _LastAxis(items, self.coords, self.weights, self._offset)
            self._offset += last.node_count
            return last
        ordered = items[np.lexsort((items, self.coords[items, axis]))]
        return self._build_axis(ordered, axis)

    def _build_axis(self, ordered: np.ndarray, axis: int) -> _AxisNode:
        node = _AxisNode(float(self.coords[ordered[0], axis]),
                         float(self.coords[ordered[-1], axis]))
        node.inner = self._build(ordered, axis + 1)
        if len(ordered) > 1:
            mid = len(ordered) // 2
            node.left = self._build_axis(ordered[:mid], axis)
            node.right = self._build_axis(ordered[mid:], axis)
        return node

    @property
    def slot_count(self) -> int:
        return self._offset

    def canonical_nodes_box(self, lo: Sequence[float], hi: Sequence[float]) \
            -> List[CanonicalNode]:
        """Canonical nodes of the closed box [lo, hi]; see `canonical_nodes`."""
        if any(a > b for a, b in zip(lo, hi)):
            return []
        out: List[CanonicalNode] = []
        self._collect(self.root, 0, lo, hi, out)
        return out

    def _collect(self, node, axis: int, lo, hi, out: List[CanonicalNode]) -> None:
        if isinstance(node, _LastAxis):
            out.extend(node.canonical(lo[axis], hi[axis]))
            return
        if node is None or node.hi_key < lo[axis] or node.lo_key > hi[axis]:
            return
        if lo[axis] <= node.lo_key and node.hi_key <= hi[axis]:
            self._collect(node.inner, axis + 1, lo, hi, out)
            return
        self._collect(node.left, axis, lo, hi, out)
        self._collect(node.right, axis, lo, hi, out)

    def canonical_nodes(self, q: Rect) -> List[CanonicalNode]:
        """
        Disjoint canonical nodes whose members are exactly the locations in `q`.

        Parameters
        ----------
        q: Rect

        Returns
        -------
        list[CanonicalNode]
        """
        return self.canonical_nodes_box(q.lo, q.hi)

    def count_box(self, lo: Sequence[float], hi: Sequence[float]) -> float:
        return float(sum(c.weight for c in self.canonical_nodes_box(lo, hi)))

    def report_one_box(self, lo: Sequence[float], hi: Sequence[float]) -> Optional[int]:
        nodes = self.canonical_nodes_box(lo, hi)
        return min(c.first for c in nodes) if nodes else None

    def range_count(self, q: Rect) -> float:
        """Total weight of the locations in `q`."""
        return self.count_box(q.lo, q.hi)

    def range_empty(self, q: Rect) -> bool:
        return not self.canonical_nodes(q)

    def range_report_one(self, q: Rect) -> Optional[int]:
        """Lowest location index inside `q`, or `None`."""
        return self.report_one_box(q.lo, q.hi)

    def range_extremes(self, q: Rect) -> Optional[Extremes]:
        """
        Smallest enclosing box of the locations in `q`.

        Returns
        -------
        Extremes | None
            Per axis, the extreme coordinates and the locations attaining
            them (lowest location on ties); `None` when `q` holds nothing.
        """
        nodes = self.canonical_nodes(q)
        if not nodes:
            return None
        low = list(nodes[0].low)
        high = list(nodes[0].high)
        for node in nodes[1:]:
            for axis in range(self.dim):
                a, b = node.low[axis], low[axis]
                if (self.coords[a, axis], a) < (self.coords[b, axis], b):
                    low[axis] = a
                a, b = node.high[axis], high[axis]
                if (self.coords[a, axis], -a) > (self.coords[b, axis], -b):
                    high[axis] = a
        lo = np.array([self.coords[low[i], i] for i in range(self.dim)])
        hi = np.array([self.coords[high[i], i] for i in range(self.dim)])
        return Extremes(lo, hi, tuple(low), tuple(high))

    def iter_canonical_nodes(self) -> Iterator[CanonicalNode]:
        """Every last-axis node holding at least one location."""
        stack = [self.root]
        while stack:
            node = stack.pop()
            if node is None:
                continue
            if isinstance(node, _LastAxis):
                for v in range(1, node.node_count):
                    summary = node._node(v)
                    if len(summary.members):
                        yield summary
                continue
            stack.extend((node.right, node.left, node.inner))
