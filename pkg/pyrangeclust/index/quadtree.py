"""
Compressed quadtree over the normalized point set.

Points are merged into locations (distinct cells at the finest level) and
stored in Z-order, so the locations of every node occupy one contiguous
slice `[start, end)` of the location array.
"""

import logging
from bisect import bisect_left
from typing import Iterator, List, NamedTuple, Optional

import numpy as np

from pyrangeclust.geometry.cells import CellId, grid_coords, interleave, morton_key
from pyrangeclust.geometry.points import L_MAX, Rect
from pyrangeclust.utils.exceptions import EmptyInputError


class QuadNode:
    """
    Node of the compressed quadtree.

    Attributes
    ----------
    cell: CellId
    start, end: int
        Slice of the location array.
    children: list[QuadNode]
        Empty for leaves, otherwise at least two, in Z-order.
    key_lo, key_hi: int
        Morton interval of `cell`.
    weight: float
        Total multiplicity of the slice.
    low, high: list[int]
        Per axis, the location of the slice closest to the lower and the
        upper facet of the cell (lowest location on ties).
    index: int
        Pre-order number.
    """

    __slots__ = ("cell", "start", "end", "children", "key_lo", "key_hi",
                 "weight", "low", "high", "index")

    def __init__(self, cell: CellId, start: int, end: int, index: int):
        self.cell = cell
        self.start = start
        self.end = end
        self.children: List["QuadNode"] = []
        self.key_lo, self.key_hi = morton_key(cell)
        self.weight = 0.0
        self.low: List[int] = []
        self.high: List[int] = []
        self.index = index

    @property
    def level(self) -> int:
        return self.cell.level

    @property
    def is_leaf(self) -> bool:
        return not self.children

    @property
    def size(self) -> int:
        return self.end - self.start

    @property
    def sample(self) -> int:
        """Lowest Z-order location of the slice."""
        return self.start

    def __repr__(self) -> str:
        return f"QuadNode(#{self.index}, level={self.level}, slice=[{self.start}, {self.end}))"


class CellRef(NamedTuple):
    """A standard cell and the compressed node holding exactly its points."""

    cell: CellId
    node: QuadNode


class CompressedQuadtree:
    """
    Contracted quadtree over a static point set in the unit root square.

    Attributes
    ----------
    dim: int
    locations: np.ndarray
        Distinct point locations in Z-order, shape (m, d); each is the
        first input point (in input order) falling in its finest cell.
    weights: np.ndarray
        Multiplicity of each location, shape (m,).
    keys: list[int]
        Finest-level Morton key of every location, increasing.
    location_of_input: np.ndarray
        Location index of every input point.
    nodes: list[QuadNode]
        All nodes in pre-order; `nodes[0]` is the root.
    """

    def __init__(self, dim: int, locations: np.ndarray, weights: np.ndarray,
                 keys: List[int], coords: np.ndarray, location_of_input: np.ndarray):
        self.dim = dim
        self.locations = locations
        self.weights = weights
        self.keys = keys
        self.coords = coords
        self.location_of_input = location_of_input
        self._cumulative = np.concatenate(([0.0], np.cumsum(weights)))
        self.nodes: List[QuadNode] = []
        self.root = self._build(0, len(keys), None)
        for node in reversed(self.nodes):
            self._summarize(node)

    def _build(self, a: int, b: int, parent: Optional[QuadNode]) -> QuadNode:
        if b - a == 1:
            level = 0 if parent is None else parent.level + 1
            node = QuadNode(self.location_cell(a).ancestor(level), a, b, len(self.nodes))
            self.nodes.append(node)
            return node
        spread = (self.keys[a] ^ self.keys[b - 1]).bit_length()
        level = L_MAX - -(-spread // self.dim)
        node = QuadNode(self.location_cell(a).ancestor(level), a, b, len(self.nodes))
        self.nodes.append(node)
        shift = self.dim * (L_MAX - level - 1)
        pos = a
        while pos < b:
            prefix = self.keys[pos] >> shift
            end = bisect_left(self.keys, (prefix + 1) << shift, pos, b)
            node.children.append(self._build(pos, end, node))
            pos = end
        return node

    def _summarize(self, node: QuadNode) -> None:
        node.weight = float(self._cumulative[node.end] - self._cumulative[node.start])
        if node.is_leaf:
            node.low = [node.start] * self.dim
            node.high = [node.start] * self.dim
            return
        low, high = list(node.children[0].low), list(node.children[0].high)
        for child in node.children[1:]:
            for axis in range(self.dim):
                if self.locations[child.low[axis], axis] < self.locations[low[axis], axis]:
                    low[axis] = child.low[axis]
                if self.locations[child.high[axis], axis] > self.locations[high[axis], axis]:
                    high[axis] = child.high[axis]
        node.low, node.high = low, high

    @property
    def size(self) -> int:
        """Number of distinct locations."""
        return len(self.keys)

    @property
    def total_weight(self) -> float:
        return float(self._cumulative[-1])

    def slice_weight(self, start: int, end: int) -> float:
        return float(self._cumulative[end] - self._cumulative[start])

    def location_cell(self, location: int) -> CellId:
        """Finest-level cell of a location."""
        return CellId(L_MAX, tuple(int(c) for c in self.coords[location]))

    def walk(self) -> Iterator[QuadNode]:
        return iter(self.nodes)

    def compressed_cell(self, cell: CellId) -> Optional[QuadNode]:
        """
        Node holding exactly the points of a standard cell.

        Parameters
        ----------
        cell: CellId

        Returns
        -------
        QuadNode | None
            The highest node whose points are those of `cell`, or `None`
            when `cell` holds no point. Found by one root-to-leaf descent
            on Morton intervals.
        """
        lo, hi = morton_key(cell)
        node = self.root
        while True:
            if lo <= node.key_lo and node.key_hi <= hi:
                return node
            if node.key_hi <= lo or hi <= node.key_lo:
                return None
            if node.is_leaf:
                return node if lo <= self.keys[node.start] < hi else None
            for child in node.children:
                if child.key_lo < hi and lo < child.key_hi:
                    node = child
                    break
            else:
                return None

    def subdivide_to_side(self, node: QuadNode, target: int,
                          clip: Optional[Rect] = None) -> List[CellRef]:
        """
        Standard cells of level `target` below `node` that hold points.

        Parameters
        ----------
        node: QuadNode
            Start of the descent, found by `compressed_cell` for a cell of
            level at most `target`.
        target: int
            Level of the output cells, at most `L_MAX`.
        clip: Rect | None
            Branches and cells missing this rectangle are pruned.

        Returns
        -------
        list[CellRef]
            Pairwise disjoint cells, in Z-order, whose union holds every
            location of the node slice lying in `clip`.
        """
        out: List[CellRef] = []
        stack = [node]
        while stack:
            current = stack.pop()
            if clip is not None and not current.cell.meets(clip):
                continue
            if not current.is_leaf and current.level < target:
                stack.extend(reversed(current.children))
                continue
            anchor = self.location_cell(current.start) if current.is_leaf else current.cell
            cell = anchor.ancestor(min(target, anchor.level))
            if clip is not None and not cell.meets(clip):
                continue
            out.append(CellRef(cell, current))
        return out


def morton_keys(coords: np.ndarray) -> List[int]:
    """Finest-level Morton key of each row of integer coordinates."""
    return [interleave(row) for row in coords.tolist()]


def build_quadtree(points: np.ndarray, weights: Optional[np.ndarray] = None) \
        -> CompressedQuadtree:
    """
    Build the compressed quadtree of normalized points.

    Points are keyed at level `L_MAX`, stably sorted, and points sharing a
    finest cell are merged into one location whose weight is the sum of
    theirs. The tree is then built by splitting on the longest common
    prefix of the sorted keys.

    Parameters
    ----------
    points: np.ndarray
        Shape (n, d), coordinates in [0, 1).
    weights: np.ndarray | None
        Positive multiplicities; unit weights when `None`.

    Returns
    -------
    CompressedQuadtree
    """
    pts = np.asarray(points, dtype=float)
    if pts.ndim != 2 or pts.shape[0] == 0:
        raise EmptyInputError("The quadtree needs at least one point")
    n, dim = pts.shape
    w = np.ones(n) if weights is None else np.asarray(weights, dtype=float)
    coords = grid_coords(pts, L_MAX)
    keys = morton_keys(coords)
    order = sorted(range(n), key=keys.__getitem__)
    sorted_keys = [keys[i] for i in order]
    firsts = [0] + [i for i in range(1, n) if sorted_keys[i] != sorted_keys[i - 1]]
    bounds = firsts + [n]
    location_of_input = np.empty(n, dtype=np.int64)
    loc_weights = np.empty(len(firsts))
    for loc in range(len(firsts)):
        members = order[bounds[loc]:bounds[loc + 1]]
        location_of_input[members] = loc
        loc_weights[loc] = w[members].sum()
    reps = [order[i] for i in firsts]
    tree = CompressedQuadtree(dim, pts[reps], loc_weights,
                              [sorted_keys[i] for i in firsts], coords[reps],
                              location_of_input)
    logging.debug(f"Quadtree over {n} points: {tree.size} locations, {len(tree.nodes)} nodes")
    return tree
