"""
Range tree whose canonical nodes carry small clustering coresets.

A node's coreset for `k_bar` centers is built the first time a query asks
for it and kept for later queries. Nodes small enough are represented by
their raw locations.
"""

import logging
import threading
from concurrent.futures import ThreadPoolExecutor
from typing import Dict, Iterable, List, Tuple

import numpy as np

from pyrangeclust.geometry.points import Rect
from pyrangeclust.index.range_tree import CanonicalNode, RangeTree
from pyrangeclust.solvers.cost import Coreset, CostKind


def power_of_two_at_least(k: int) -> int:
    value = 1
    while value < k:
        value *= 2
    return value


class CoresetTree:
    """
    Canonical-node coresets over a `RangeTree`.

    Parameters
    ----------
    range_tree: RangeTree
    params: BuildParams
        Supplies `delta`, `k_max`, `raw_node_limit` and the settings of the
        coreset pipeline.

    Attributes
    ----------
    built: int
        Number of node coresets computed so far.
    """

    def __init__(self, range_tree: RangeTree, params):
        self.range_tree = range_tree
        self.params = params
        self._memo: Dict[Tuple[int, int, CostKind], Coreset] = {}
        self._lock = threading.Lock()
        self.built = 0

    def _raw(self, node: CanonicalNode, k: int, kind: CostKind) -> Coreset:
        members = np.asarray(node.members)
        return Coreset(self.range_tree.coords[members], self.range_tree.weights[members],
                       kind, k, 0.0, "raw")

    def node_coreset(self, node: CanonicalNode, k_bar: int, kind: CostKind) -> Coreset:
        """
        Stored coreset of one canonical node.

        Parameters
        ----------
        node: CanonicalNode
        k_bar: int
            Power of two, at most `k_max`.
        kind: CostKind
            `median` or `means`.

        Returns
        -------
        Coreset
            A (k_bar, delta)-coreset of the node's locations, or the raw
            locations when they are few or no smaller coreset was found.
        """
        key = (node.index, k_bar, kind)
        cached = self._memo.get(key)
        if cached is not None:
            return cached
        raw = self._raw(node, k_bar, kind)
        if len(raw) <= self.params.raw_node_limit:
            result = raw
        else:
            from pyrangeclust.engines.median_means import smaller_coreset
            result, _ = smaller_coreset(raw, k_bar, kind, self.params, eps=self.params.delta)
            if len(result) >= len(raw):
                result = raw
            else:
                result.provenance = "canonical"
        with self._lock:
            stored = self._memo.setdefault(key, result)
            if stored is result:
                self.built += 1
        return stored

    def canonical_coreset(self, q: Rect, k: int, kind: CostKind) -> Coreset:
        """
        Union of the stored coresets of the canonical nodes of `q`.

        Parameters
        ----------
        q: Rect
            Normalized query rectangle.
        k: int
        kind: CostKind

        Returns
        -------
        Coreset
            A (k, delta)-coreset of the locations in `q` whose weights sum
            to their total weight. When `k` exceeds `k_max` the raw
            locations of the canonical nodes are returned.
        """
        nodes = self.range_tree.canonical_nodes(q)
        if not nodes:
            return Coreset.empty(self.range_tree.dim, kind, k, self.params.delta, "canonical")
        if k > self.params.k_max:
            parts = [self._raw(node, k, kind) for node in nodes]
        else:
            k_bar = power_of_two_at_least(k)
            parts = [self.node_coreset(node, k_bar, kind) for node in nodes]
        coreset = Coreset(np.concatenate([p.points for p in parts]),
                          np.concatenate([p.weights for p in parts]),
                          kind, k, self.params.delta, "canonical",
                          {"canonical_nodes": len(nodes)})
        logging.debug(f"Canonical coreset: {len(nodes)} nodes, {len(coreset)} points")
        return coreset

    def build_eager(self, threads: int = 1,
                    kinds: Iterable[CostKind] = (CostKind.median, CostKind.means)) -> int:
        """
        Compute every node coreset up front.

        Returns
        -------
        int
            Number of coresets computed.
        """
        jobs: List[Tuple[CanonicalNode, int, CostKind]] = []
        for node in self.range_tree.iter_canonical_nodes():
            if len(node.members) <= self.params.raw_node_limit:
                continue
            k_bar = 1
            while k_bar <= self.params.k_max:
                for kind in kinds:
                    jobs.append((node, k_bar, kind))
                k_bar *= 2
        with ThreadPoolExecutor(max_workers=threads) as pool:
            list(pool.map(lambda job: self.node_coreset(*job), jobs))
        logging.info(f"Eager coreset tree: {len(jobs)} node coresets over {threads} threads")
        return len(jobs)
