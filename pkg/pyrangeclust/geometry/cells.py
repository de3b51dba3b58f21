"""
Standard quadtree cells: identifiers, Morton (Z-order) keys, grid clusters
and the classification of a cell against a query rectangle.

Bit order of the Morton interleave: axis 0 gives the most significant bit of
every group of `d` bits.
"""

from enum import Enum
from functools import lru_cache
from itertools import product
from typing import List, NamedTuple, Sequence, Tuple

import numpy as np

from pyrangeclust.geometry.points import L_MAX, Rect, StandardLength


class CellId(NamedTuple):
    """
    A standard quadtree cell: the box prod_i [c_i 2^-level, (c_i + 1) 2^-level].

    Points belong to the half-open box, so each point has one cell per level.
    """

    level: int
    coords: Tuple[int, ...]

    @property
    def dim(self) -> int:
        return len(self.coords)

    @property
    def side(self) -> StandardLength:
        return StandardLength(self.level)

    def box(self) -> Tuple[np.ndarray, np.ndarray]:
        """Lower and upper corners of the closed cell box."""
        lo = np.ldexp(np.asarray(self.coords, dtype=float), -self.level)
        return lo, lo + np.ldexp(1.0, -self.level)

    def ancestor(self, level: int) -> "CellId":
        """The cell at `level` containing this one; `level` must not exceed ours."""
        if level > self.level:
            raise ValueError(f"Level {level} is below cell level {self.level}")
        shift = self.level - level
        return CellId(level, tuple(c >> shift for c in self.coords))

    def children(self) -> List["CellId"]:
        level = self.level + 1
        base = [2 * c for c in self.coords]
        return [CellId(level, tuple(b + o for b, o in zip(base, offsets)))
                for offsets in product((0, 1), repeat=self.dim)]

    def contains(self, other: "CellId") -> bool:
        return other.level >= self.level and other.ancestor(self.level) == self

    def meets(self, rect: Rect) -> bool:
        """Closed intersection test against a rectangle."""
        lo, hi = self.box()
        return rect.meets_box(lo, hi)

    def contains_point(self, point: np.ndarray) -> bool:
        return cell_of_point(point, self.side) == self


@lru_cache(maxsize=None)
def _spread_table(dim: int) -> Tuple[int, ...]:
    table = []
    for byte in range(256):
        spread = 0
        for bit in range(8):
            if byte >> bit & 1:
                spread |= 1 << (bit * dim)
        table.append(spread)
    return tuple(table)


def interleave(coords: Sequence[int]) -> int:
    """
    Morton code of integer coordinates.

    Bit `b` of axis `i` lands at position b*d + (d - 1 - i).
    """
    dim = len(coords)
    table = _spread_table(dim)
    code = 0
    for axis, value in enumerate(coords):
        spread = 0
        shift = 0
        value = int(value)
        while value:
            spread |= table[value & 0xFF] << shift
            value >>= 8
            shift += 8 * dim
        code |= spread << (dim - 1 - axis)
    return code


def morton_key(cell: CellId) -> Tuple[int, int]:
    """
    Interval [start, end) of finest-level Z-order positions covered by `cell`.

    Cells nest exactly when their intervals nest, and same-level cells sort
    by their interleaved coordinates.
    """
    if cell.level > L_MAX:
        raise ValueError(f"Cell level {cell.level} exceeds the cap {L_MAX}")
    shift = cell.dim * (L_MAX - cell.level)
    code = interleave(cell.coords)
    return code << shift, (code + 1) << shift


def grid_coords(points: np.ndarray, level: int) -> np.ndarray:
    """
    Integer cell coordinates of many points at one level.

    Parameters
    ----------
    points: np.ndarray
        Normalized points, shape (n, d).
    level: int
        Quadtree level, at most `L_MAX`.

    Returns
    -------
    np.ndarray
        int64 array of shape (n, d); points on the global upper boundary go
        to the last cell.
    """
    scaled = np.floor(np.ldexp(np.asarray(points, dtype=float), level))
    top = (1 << level) - 1
    return np.clip(scaled, 0, top).astype(np.int64)


def cell_of_point(point: np.ndarray, side: StandardLength) -> CellId:
    """
    Standard cell of side `side` containing `point`, half-open convention.
    """
    level = min(side.exponent, L_MAX)
    coords = grid_coords(np.asarray(point, dtype=float).reshape(1, -1), level)[0]
    return CellId(level, tuple(int(c) for c in coords))


def grid_cluster(cell: CellId) -> List[CellId]:
    """
    The cell and its same-level neighbours sharing a face or a corner,
    clipped to the root square (at most 3^d cells).
    """
    top = (1 << cell.level) - 1
    ranges = [range(max(0, c - 1), min(top, c + 1) + 1) for c in cell.coords]
    return [CellId(cell.level, coords) for coords in product(*ranges)]


class FaceKind(Enum):
    INSIDE = "inside"
    CORNER = "corner"
    AVOIDS_BELOW = "avoids_below"
    OUTSIDE = "outside"


class FaceClass(NamedTuple):
    """
    Position of a cell against a query rectangle.

    Attributes
    ----------
    kind: FaceKind
    t: int
        For `AVOIDS_BELOW`, the smallest dimension of a face of the query
        meeting the cell; 0 otherwise.
    witness: tuple[int, ...]
        For `AVOIDS_BELOW`, the `t` axes whose facets all miss the cell.
        Inside the cell the query constraints on these axes always hold.
    """

    kind: FaceKind
    t: int = 0
    witness: Tuple[int, ...] = ()

    def crossing(self, dim: int) -> Tuple[int, ...]:
        """Axes whose facets do meet the cell."""
        return tuple(i for i in range(dim) if i not in self.witness)


def classify_box(lo: np.ndarray, hi: np.ndarray, q: Rect) -> FaceClass:
    """
    Classify the closed box [lo, hi] against `q`; see `classify_cell`.
    """
    qlo, qhi = q.lo_array, q.hi_array
    if np.any(hi < qlo) or np.any(lo > qhi):
        return FaceClass(FaceKind.OUTSIDE)
    if np.all(lo >= qlo) and np.all(hi <= qhi):
        return FaceClass(FaceKind.INSIDE)
    dim = len(lo)
    crossing = [i for i in range(dim)
                if lo[i] <= qlo[i] <= hi[i] or lo[i] <= qhi[i] <= hi[i]]
    if len(crossing) == dim:
        return FaceClass(FaceKind.CORNER)
    witness = tuple(i for i in range(dim) if i not in crossing)
    return FaceClass(FaceKind.AVOIDS_BELOW, len(witness), witness)


def classify_cell(cell: CellId, q: Rect) -> FaceClass:
    """
    Classify a cell against a query rectangle.

    Parameters
    ----------
    cell: CellId
    q: Rect

    Returns
    -------
    FaceClass
        `INSIDE` when the cell lies in `q`, `OUTSIDE` when they are
        disjoint, `CORNER` when the cell holds a vertex of `q`, otherwise
        `AVOIDS_BELOW(t)` where `t` is the smallest dimension of a face of
        `q` meeting the cell.
    """
    lo, hi = cell.box()
    return classify_box(lo, hi, q)
