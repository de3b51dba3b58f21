"""
Persistent per-node structures over projected points.

`ProjectionVersionTable` gives every compressed node, for every proper
subset of projected-away axes, a version of a range-count tree over the
node's locations projected on the remaining axes. `AxisExtremeTable`
gives, for every axis, every node of the quadtree built on the points with
that axis dropped, a version of a tree keyed by the dropped coordinate.

Both are built bottom-up: a parent reuses the version of its largest child
and inserts the locations of the other children.
"""

import logging
import threading
from itertools import combinations
from typing import Callable, Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np

from pyrangeclust.index.persistent import PersistentRangeTree, Version
from pyrangeclust.index.quadtree import CompressedQuadtree, QuadNode, build_quadtree

Subset = Tuple[int, ...]


def proper_subsets(dim: int) -> List[Subset]:
    """Nonempty proper subsets of the axes, by size then lexicographically."""
    return [s for size in range(1, dim) for s in combinations(range(dim), size)]


def _heaviest_child(node: QuadNode) -> QuadNode:
    best = node.children[0]
    for child in node.children[1:]:
        if child.size > best.size:
            best = child
    return best


def _grow_versions(nodes: Sequence[QuadNode], structure: PersistentRangeTree,
                   members: Callable[[int, int], Iterable[int]], weights: np.ndarray) -> List[Version]:
    """Version of every node, children before parents."""
    versions: List[Version] = [None] * len(nodes)
    for node in reversed(nodes):
        if node.is_leaf:
            version = None
            for item in members(node.start, node.end):
                version = structure.insert(version, item, float(weights[item]))
        else:
            kept = _heaviest_child(node)
            version = versions[kept.index]
            for child in node.children:
                if child is kept:
                    continue
                for item in members(child.start, child.end):
                    version = structure.insert(version, item, float(weights[item]))
        versions[node.index] = version
    return versions


class ProjectionVersionTable:
    """
    Projection versions of every compressed node, per axis subset. Subsets
    not built up front are built on first use.

    Parameters
    ----------
    tree: CompressedQuadtree
    subsets: Iterable[Subset] | None
        Subsets built right away.
    """

    def __init__(self, tree: CompressedQuadtree, subsets: Optional[Iterable[Subset]] = None):
        self.tree = tree
        self.dim = tree.dim
        self._structures: Dict[Subset, PersistentRangeTree] = {}
        self._versions: Dict[Subset, List[Version]] = {}
        self._lock = threading.Lock()
        for subset in subsets or ():
            self._ensure(subset)

    @staticmethod
    def kept_axes(subset: Subset, dim: int) -> Tuple[int, ...]:
        return tuple(i for i in range(dim) if i not in subset)

    def _ensure(self, subset: Subset) -> None:
        subset = tuple(sorted(subset))
        if subset in self._versions:
            return
        with self._lock:
            if subset in self._versions:
                return
            if not subset or len(subset) >= self.dim:
                raise ValueError(f"Axis subset {subset} is not a nonempty proper subset")
            kept = self.kept_axes(subset, self.dim)
            structure = PersistentRangeTree(self.tree.locations[:, kept])
            versions = _grow_versions(self.tree.nodes, structure,
                                      lambda a, b: range(a, b), self.tree.weights)
            self._structures[subset] = structure
            self._versions[subset] = versions
            logging.debug(f"Projection versions for axes {subset}: "
                          f"{structure.insertions} insertions")

    def build_all(self) -> "ProjectionVersionTable":
        for subset in proper_subsets(self.dim):
            self._ensure(subset)
        return self

    @property
    def built(self) -> List[Subset]:
        return sorted(self._versions)

    @property
    def insertions(self) -> int:
        return sum(s.insertions for s in self._structures.values())

    def insertions_for(self, subset: Subset) -> int:
        self._ensure(subset)
        return self._structures[tuple(sorted(subset))].insertions

    def version(self, node: QuadNode, subset: Subset) -> Version:
        self._ensure(subset)
        return self._versions[tuple(sorted(subset))][node.index]

    def query(self, node: QuadNode, subset: Subset, lo: Sequence[float],
              hi: Sequence[float]) -> Tuple[float, int]:
        """
        Weight and lowest location of `node` inside a box over the kept axes.

        Parameters
        ----------
        node: QuadNode
        subset: tuple[int, ...]
            Projected-away axes.
        lo, hi: Sequence[float]
            Bounds on the kept axes only, in axis order.

        Returns
        -------
        float, int
            Weight, and the lowest location (`tree.size` when empty).
        """
        subset = tuple(sorted(subset))
        self._ensure(subset)
        return self._structures[subset].query(self._versions[subset][node.index], lo, hi)

    def count(self, node: QuadNode, subset: Subset, lo: Sequence[float],
              hi: Sequence[float]) -> float:
        return self.query(node, subset, lo, hi)[0]


def build_projection_tables(tree: CompressedQuadtree,
                            subsets: Optional[Iterable[Subset]] = None) -> ProjectionVersionTable:
    """
    Build the projection versions of every node.

    Parameters
    ----------
    tree: CompressedQuadtree
    subsets: Iterable[Subset] | None
        Subsets to build now; `None` builds all of them.

    Returns
    -------
    ProjectionVersionTable
    """
    table = ProjectionVersionTable(tree, subsets)
    if subsets is None:
        table.build_all()
    logging.info(f"Projection tables: {len(table.built)} subsets, {table.insertions} insertions")
    return table


class AxisExtremeTable:
    """
    Per axis, the quadtree of the locations with that axis dropped, and for
    each of its nodes a version keyed by the dropped coordinate.

    Parameters
    ----------
    tree: CompressedQuadtree
    """

    def __init__(self, tree: CompressedQuadtree):
        self.tree = tree
        self.dim = tree.dim
        self._projected: Dict[int, CompressedQuadtree] = {}
        self._groups: Dict[int, List[np.ndarray]] = {}
        self._structures: Dict[int, PersistentRangeTree] = {}
        self._versions: Dict[int, List[Version]] = {}
        self._lock = threading.Lock()

    def _ensure(self, axis: int) -> None:
        if axis in self._versions:
            return
        with self._lock:
            if axis in self._versions:
                return
            kept = [i for i in range(self.dim) if i != axis]
            projected = build_quadtree(self.tree.locations[:, kept], self.tree.weights)
            owner = projected.location_of_input
            order = np.argsort(owner, kind="stable")
            bounds = np.searchsorted(owner[order], np.arange(projected.size + 1))
            groups = [order[bounds[p]:bounds[p + 1]] for p in range(projected.size)]

            def members(a: int, b: int):
                for p in range(a, b):
                    yield from groups[p].tolist()

            structure = PersistentRangeTree(self.tree.locations[:, axis])
            versions = _grow_versions(projected.nodes, structure, members, self.tree.weights)
            self._projected[axis] = projected
            self._groups[axis] = groups
            self._structures[axis] = structure
            self._versions[axis] = versions
            logging.debug(f"Axis {axis} extremes: {len(projected.nodes)} projected nodes, "
                          f"{structure.insertions} insertions")

    def build_all(self) -> "AxisExtremeTable":
        for axis in range(self.dim):
            self._ensure(axis)
        return self

    @property
    def built(self) -> List[int]:
        return sorted(self._versions)

    @property
    def insertions(self) -> int:
        return sum(s.insertions for s in self._structures.values())

    def projected_tree(self, axis: int) -> CompressedQuadtree:
        self._ensure(axis)
        return self._projected[axis]

    def members(self, axis: int, node: QuadNode) -> List[int]:
        """Original locations whose projection lies in a projected node."""
        self._ensure(axis)
        groups = self._groups[axis]
        return [i for p in range(node.start, node.end) for i in groups[p].tolist()]

    def axis_extreme(self, axis: int, node: QuadNode, lo: float, hi: float,
                     largest: bool = True) -> Optional[int]:
        """
        Location with the extreme `axis` coordinate in [lo, hi] among those
        projecting into `node`.

        Parameters
        ----------
        axis: int
        node: QuadNode
            Node of `projected_tree(axis)`.
        lo, hi: float
        largest: bool, default=True
            Maximum when true, minimum otherwise.

        Returns
        -------
        int | None
        """
        self._ensure(axis)
        return self._structures[axis].extreme(self._versions[axis][node.index], lo, hi, largest)
