"""
Partially persistent multi-axis range-count structure.

Every axis is a segment tree over the ranks of a fixed item universe, and
every node of a non-final axis owns a tree over the next axis holding the
items of its subtree. Insertions copy the touched path, so each returned
root is an immutable version and older versions keep answering as before.
"""

from typing import List, Optional, Sequence, Tuple

import numpy as np


class _Node:
    __slots__ = ("weight", "first", "left", "right", "inner")

    def __init__(self, weight: float, first: int, left=None, right=None, inner=None):
        self.weight = weight
        self.first = first
        self.left = left
        self.right = right
        self.inner = inner


Version = Optional[_Node]


class PersistentRangeTree:
    """
    Persistent range-count tree over a fixed universe of items.

    Parameters
    ----------
    coords: np.ndarray
        Shape (m, a): the `a` coordinates of every item the tree may ever
        hold. Items are identified by their row.

    Attributes
    ----------
    insertions: int
        Number of insertions performed over all versions.
    """

    def __init__(self, coords: np.ndarray):
        values = np.asarray(coords, dtype=float)
        if values.ndim == 1:
            values = values[:, None]
        self.size, self.axes = values.shape
        self.coords = values
        items = np.arange(self.size)
        self.order: List[np.ndarray] = []
        self.ranks: List[np.ndarray] = []
        self.sorted: List[np.ndarray] = []
        for axis in range(self.axes):
            order = np.lexsort((items, values[:, axis]))
            ranks = np.empty(self.size, dtype=np.int64)
            ranks[order] = items
            self.order.append(order)
            self.ranks.append(ranks)
            self.sorted.append(values[order, axis])
        self.insertions = 0

    def insert(self, version: Version, item: int, weight: float = 1.0) -> _Node:
        """New version holding the items of `version` plus `item`."""
        self.insertions += 1
        return self._insert(version, item, weight, 0, 0, self.size)

    def _insert(self, node: Version, item: int, weight: float, axis: int,
                lo: int, hi: int) -> _Node:
        if node is None:
            fresh = _Node(weight, item)
        else:
            fresh = _Node(node.weight + weight, min(node.first, item),
                          node.left, node.right, node.inner)
        if axis + 1 < self.axes:
            fresh.inner = self._insert(fresh.inner, item, weight, axis + 1, 0, self.size)
        if hi - lo > 1:
            mid = (lo + hi) // 2
            if self.ranks[axis][item] < mid:
                fresh.left = self._insert(fresh.left, item, weight, axis, lo, mid)
            else:
                fresh.right = self._insert(fresh.right, item, weight, axis, mid, hi)
        return fresh

    def rank_ranges(self, lo: Sequence[float], hi: Sequence[float]) -> List[Tuple[int, int]]:
        """Per axis, the rank interval [a, b) of coordinates within [lo, hi]."""
        return [(int(np.searchsorted(self.sorted[a], lo[a], side="left")),
                 int(np.searchsorted(self.sorted[a], hi[a], side="right")))
                for a in range(self.axes)]

    def query(self, version: Version, lo: Sequence[float], hi: Sequence[float]) \
            -> Tuple[float, int]:
        """
        Weight and smallest item of a version inside the closed box [lo, hi].

        Returns
        -------
        float, int
            Total weight, and the smallest item (or `size` when the box
            is empty).
        """
        ranges = self.rank_ranges(lo, hi)
        if any(a >= b for a, b in ranges):
            return 0.0, self.size
        return self._query(version, 0, 0, self.size, ranges)

    def _query(self, node: Version, axis: int, lo: int, hi: int,
               ranges: List[Tuple[int, int]]) -> Tuple[float, int]:
        if node is None:
            return 0.0, self.size
        a, b = ranges[axis]
        if b <= lo or hi <= a:
            return 0.0, self.size
        if a <= lo and hi <= b:
            if axis + 1 == self.axes:
                return node.weight, node.first
            return self._query(node.inner, axis + 1, 0, self.size, ranges)
        mid = (lo + hi) // 2
        w1, f1 = self._query(node.left, axis, lo, mid, ranges)
        w2, f2 = self._query(node.right, axis, mid, hi, ranges)
        return w1 + w2, min(f1, f2)

    def count(self, version: Version, lo: Sequence[float], hi: Sequence[float]) -> float:
        return self.query(version, lo, hi)[0]

    def items(self, version: Version) -> List[int]:
        """Every item of a version, by increasing first-axis rank."""
        out: List[int] = []
        stack = [(version, 0, self.size)]
        while stack:
            node, lo, hi = stack.pop()
            if node is None:
                continue
            if hi - lo == 1:
                out.append(int(self.order[0][lo]))
                continue
            mid = (lo + hi) // 2
            stack.append((node.right, mid, hi))
            stack.append((node.left, lo, mid))
        return out

    def extreme(self, version: Version, lo: float, hi: float, largest: bool = True) \
            -> Optional[int]:
        """
        Item with the largest (or smallest) first-axis coordinate in [lo, hi].

        Equal coordinates are ordered by item, so the result is
        deterministic.
        """
        a, b = self.rank_ranges([lo] + [0.0] * (self.axes - 1),
                                [hi] + [0.0] * (self.axes - 1))[0]
        if a >= b:
            return None
        rank = self._extreme(version, 0, self.size, a, b, largest)
        return None if rank is None else int(self.order[0][rank])

    def _extreme(self, node: Version, lo: int, hi: int, a: int, b: int,
                 largest: bool) -> Optional[int]:
        if node is None or b <= lo or hi <= a:
            return None
        if hi - lo == 1:
            return lo
        mid = (lo + hi) // 2
        first, second = (node.right, node.left) if largest else (node.left, node.right)
        spans = ((mid, hi), (lo, mid)) if largest else ((lo, mid), (mid, hi))
        found = self._extreme(first, spans[0][0], spans[0][1], a, b, largest)
        if found is not None:
            return found
        return self._extreme(second, spans[1][0], spans[1][1], a, b, largest)
