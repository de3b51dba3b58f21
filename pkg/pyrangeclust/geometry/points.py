"""
Points, rectangles, standard lengths and the dataset normalizer.

Every index structure works inside the unit root square [0, 1]^d. The
`Normalizer` maps raw coordinates into it and maps answers back.
"""

import math
from dataclasses import dataclass
from functools import total_ordering
from typing import NamedTuple, Optional, Sequence, Tuple

import numpy as np

from pyrangeclust.utils.exceptions import EmptyInputError, NonFiniteError

# Deepest quadtree level; points closer than 2^-L_MAX are merged.
L_MAX = 50

# Bounding boxes are padded by this factor so no point touches the upper
# boundary of the root square.
PADDING = 1.0 + 2.0 ** -10


class WeightedPoint(NamedTuple):
    """A point with a nonnegative multiplicity."""

    point: np.ndarray
    weight: float


@total_ordering
@dataclass(frozen=True)
class StandardLength:
    """
    The length 2^-exponent.

    Comparisons follow the length, so a larger exponent is a smaller value.

    Attributes
    ----------
    exponent: int
        Nonnegative exponent.
    """

    exponent: int

    def __post_init__(self):
        if self.exponent < 0:
            raise ValueError(f"Standard lengths need a nonnegative exponent, got {self.exponent}")

    @property
    def value(self) -> float:
        return math.ldexp(1.0, -self.exponent)

    def half(self) -> "StandardLength":
        return StandardLength(self.exponent + 1)

    def double(self) -> "StandardLength":
        return StandardLength(max(0, self.exponent - 1))

    def __lt__(self, other: "StandardLength") -> bool:
        return self.exponent > other.exponent


def sfloor(x: float) -> StandardLength:
    """
    Largest standard length not above `x`; values of at least 1 give 1.

    Parameters
    ----------
    x: float
        Positive length.

    Returns
    -------
    StandardLength
        `s` with s <= x < 2s whenever x <= 1.
    """
    if not x > 0.0:
        raise ValueError(f"sfloor needs a positive value, got {x}")
    if x >= 1.0:
        return StandardLength(0)
    _, exp = math.frexp(x)
    return StandardLength(1 - exp)


def sceil(x: float) -> StandardLength:
    """
    Smallest standard length not below `x`, clamped at 1.

    Parameters
    ----------
    x: float
        Positive length.

    Returns
    -------
    StandardLength
        `s` with s/2 < x <= s whenever x <= 1.
    """
    if not x > 0.0:
        raise ValueError(f"sceil needs a positive value, got {x}")
    if x >= 1.0:
        return StandardLength(0)
    mantissa, exp = math.frexp(x)
    return StandardLength(1 - exp if mantissa == 0.5 else -exp)


class Rect(NamedTuple):
    """
    Axis-parallel box with closed intervals [lo_i, hi_i].
    """

    lo: Tuple[float, ...]
    hi: Tuple[float, ...]

    @classmethod
    def from_bounds(cls, lo: Sequence[float], hi: Sequence[float]) -> "Rect":
        """
        Validated constructor.

        Raises
        ------
        ValueError
            If the bounds differ in length, are not finite or lo_i > hi_i.
        """
        lo_t = tuple(float(v) for v in lo)
        hi_t = tuple(float(v) for v in hi)
        if len(lo_t) != len(hi_t) or not lo_t:
            raise ValueError("Rectangle bounds must have the same positive length")
        if not all(math.isfinite(v) for v in lo_t + hi_t):
            raise ValueError("Rectangle bounds must be finite")
        if any(a > b for a, b in zip(lo_t, hi_t)):
            raise ValueError(f"Empty rectangle: lo={lo_t} hi={hi_t}")
        return cls(lo_t, hi_t)

    @classmethod
    def unit(cls, dim: int) -> "Rect":
        return cls((0.0,) * dim, (1.0,) * dim)

    @property
    def dim(self) -> int:
        return len(self.lo)

    @property
    def lo_array(self) -> np.ndarray:
        return np.asarray(self.lo, dtype=float)

    @property
    def hi_array(self) -> np.ndarray:
        return np.asarray(self.hi, dtype=float)

    def contains(self, points: np.ndarray) -> np.ndarray:
        """Boolean mask of the rows of `points` inside the box."""
        pts = np.atleast_2d(points)
        return np.all((pts >= self.lo_array) & (pts <= self.hi_array), axis=1)

    def meets_box(self, lo: np.ndarray, hi: np.ndarray) -> bool:
        """Whether the closed box [lo, hi] intersects this one."""
        return bool(np.all(lo <= self.hi_array) and np.all(hi >= self.lo_array))

    def intersection(self, other: "Rect") -> Optional["Rect"]:
        lo = np.maximum(self.lo_array, other.lo_array)
        hi = np.minimum(self.hi_array, other.hi_array)
        if np.any(lo > hi):
            return None
        return Rect(tuple(lo.tolist()), tuple(hi.tolist()))


@dataclass(frozen=True)
class Normalizer:
    """
    Uniform affine map from dataset coordinates into the unit root square.

    Attributes
    ----------
    offset: tuple[float, ...]
        Subtracted from every raw coordinate.
    scale: float
        Positive factor applied after the offset. Distances shrink by it,
        so linear costs are divided by `scale` on the way out and squared
        costs by `scale**2`.
    """

    offset: Tuple[float, ...]
    scale: float

    @property
    def dim(self) -> int:
        return len(self.offset)

    def to_unit(self, points: np.ndarray) -> np.ndarray:
        return (np.asarray(points, dtype=float) - np.asarray(self.offset)) * self.scale

    def from_unit(self, points: np.ndarray) -> np.ndarray:
        return np.asarray(points, dtype=float) / self.scale + np.asarray(self.offset)

    def rect_to_unit(self, rect: Rect) -> Rect:
        return Rect(tuple(self.to_unit(rect.lo_array).tolist()),
                    tuple(self.to_unit(rect.hi_array).tolist()))

    def length_from_unit(self, value: float, power: int = 1) -> float:
        """Rescale a normalized length (power 1) or squared length (power 2)."""
        return value / self.scale ** power

    def to_dict(self) -> dict:
        return {"offset": list(self.offset), "scale": self.scale}


def normalize(points: np.ndarray) -> Tuple[Normalizer, np.ndarray]:
    """
    Fit a `Normalizer` to the dataset and return the normalized points.

    Parameters
    ----------
    points: np.ndarray
        Raw coordinates, shape (n, d).

    Returns
    -------
    Normalizer, np.ndarray
        The map and the points in [0, 1)^d. A dataset with zero extent gets
        scale 1 and lands on the origin.
    """
    arr = np.asarray(points, dtype=float)
    if arr.ndim != 2 or arr.shape[0] == 0 or arr.shape[1] == 0:
        raise EmptyInputError("Normalization needs at least one point")
    if not np.all(np.isfinite(arr)):
        raise NonFiniteError("Point coordinates must be finite")
    offset = arr.min(axis=0)
    extent = float((arr.max(axis=0) - offset).max())
    scale = 1.0 if extent == 0.0 else 1.0 / (extent * PADDING)
    normalizer = Normalizer(tuple(offset.tolist()), scale)
    return normalizer, (arr - offset) * scale
