"""
Defines models for incoming parameters, and validators for fields prior to
execution.
"""

from enum import Enum
from typing import List, Optional

from pydantic import BaseModel, validator

from pyrangeclust.utils.exceptions import QuerySpecError


class QueryType(str, Enum):
    kmedian = "kmedian"
    kmeans = "kmeans"
    kcenter = "kcenter"
    diameter = "diameter"
    radius = "radius"

    @property
    def is_clustering(self) -> bool:
        return self in (QueryType.kmedian, QueryType.kmeans, QueryType.kcenter)


class Mixture(str, Enum):
    uniform = "uniform"
    gaussians = "gaussians"


def parse_range(text: str) -> (List[float], List[float]):
    """
    Parse the console range syntax "lo1,lo2,...xhi1,hi2,...".

    Parameters
    ----------
    text: str

    Returns
    -------
    list[float], list[float]
        Lower and upper corners.
    """
    parts = text.strip().split("x")
    if len(parts) != 2:
        raise QuerySpecError(f"Range '{text}' must look like 'lo1,lo2xhi1,hi2'")
    try:
        lo = [float(v) for v in parts[0].split(",")]
        hi = [float(v) for v in parts[1].split(",")]
    except ValueError:
        raise QuerySpecError(f"Range '{text}' holds a non-numeric bound")
    return lo, hi


class BuildParams(BaseModel):
    """
    Parameters fixed when an index is built.

    Attributes
    ----------
    delta: float, default=0.5
        Accuracy of the coresets stored on canonical nodes.
    k_max: int, default=16
        Largest power-of-two cluster count with stored coresets.
    seed: int, default=0x5EED
        Seed of every randomized routine.
    swap_width: int, default=1
        Number of centers exchanged per local-search move.
    c1: float | None, default=None
        Approximation factor assumed for local-search centers; `None` means
        5 * (3 + 2 / swap_width).
    local_search_tol: float, default=1e-3
        Relative improvement below which local search stops.
    candidate_cap: int, default=256
        Largest candidate set scanned by local search.
    exhaustive_max_points: int, default=14
    exhaustive_max_k: int, default=3
        Inputs at most this large are solved by partition enumeration.
    raw_node_limit: int, default=32
        Canonical nodes with at most this many locations store raw points.
    eager_coresets: bool, default=False
        Build every stored coreset at index time instead of on first use.
    """

    delta: float = 0.5
    k_max: int = 16
    seed: int = 0x5EED
    swap_width: int = 1
    c1: Optional[float] = None
    local_search_tol: float = 1e-3
    candidate_cap: int = 256
    exhaustive_max_points: int = 14
    exhaustive_max_k: int = 3
    raw_node_limit: int = 32
    eager_coresets: bool = False

    class Config:
        extra = "forbid"

    @validator("delta")
    def delta_in_unit_interval(cls, v):
        if not 0.0 < v < 1.0:
            raise ValueError("delta must lie strictly between 0 and 1")
        return v

    @validator("k_max")
    def k_max_power_of_two(cls, v):
        if v < 1 or v & (v - 1):
            raise ValueError("k_max must be a power of two")
        return v

    @validator("swap_width", "candidate_cap", "exhaustive_max_k")
    def at_least_one(cls, v):
        if v < 1:
            raise ValueError("must be at least 1")
        return v

    @validator("exhaustive_max_points", "raw_node_limit")
    def nonnegative(cls, v):
        if v < 0:
            raise ValueError("must be nonnegative")
        return v

    @validator("local_search_tol")
    def tol_in_unit_interval(cls, v):
        if not 0.0 < v < 1.0:
            raise ValueError("local_search_tol must lie strictly between 0 and 1")
        return v

    @validator("c1", always=True)
    def c1_default(cls, v, values):
        if v is None:
            width = values.get("swap_width", 1)
            return 5.0 * (3.0 + 2.0 / width)
        if v <= 1.0:
            raise ValueError("c1 must exceed 1")
        return v


class QuerySpec(BaseModel):
    """
    One range-clustering or extent query, in original coordinates.

    Attributes
    ----------
    type: QueryType
    lo: list[float]
    hi: list[float]
        Corners of the closed query rectangle.
    k: int | None
        Number of centers; required for clustering types.
    eps: float
        Accuracy parameter, positive.
    """

    type: QueryType
    lo: List[float]
    hi: List[float]
    k: Optional[int] = None
    eps: float

    @validator("eps")
    def eps_positive(cls, v):
        if not v > 0:
            raise ValueError("eps must be positive")
        return v

    @validator("hi")
    def hi_matches_lo(cls, v, values):
        lo = values.get("lo")
        if lo is not None:
            if len(lo) != len(v):
                raise ValueError("lo and hi must have the same length")
            if any(a > b for a, b in zip(lo, v)):
                raise ValueError("every lo bound must be at most its hi bound")
        return v

    @validator("k", always=True)
    def k_for_clustering(cls, v, values):
        kind = values.get("type")
        if kind is not None and kind.is_clustering:
            if v is None:
                raise ValueError(f"{kind.value} queries need k")
            if v < 1:
                raise ValueError("k must be at least 1")
        return v

    @classmethod
    def from_range(cls, type: str, text: str, eps: float,
                   k: Optional[int] = None) -> "QuerySpec":
        lo, hi = parse_range(text)
        return cls(type=type, lo=lo, hi=hi, k=k, eps=eps)


class GenSpec(BaseModel):
    """
    Synthetic dataset request.

    Attributes
    ----------
    n: int
    d: int
    mixture: Mixture
    m: int
        Number of Gaussian clusters.
    sigma: float
        Spread of each Gaussian cluster.
    seed: int
    """

    n: int
    d: int
    mixture: Mixture = Mixture.uniform
    m: int = 5
    sigma: float = 0.05
    seed: int = 0

    @validator("n")
    def n_positive(cls, v):
        if v <= 0:
            raise ValueError("n must be positive")
        return v

    @validator("d")
    def d_supported(cls, v):
        if not 2 <= v <= 8:
            raise ValueError("d must lie in [2, 8]")
        return v

    @validator("m")
    def m_positive(cls, v):
        if v <= 0:
            raise ValueError("m must be positive")
        return v

    @validator("sigma")
    def sigma_positive(cls, v):
        if not v > 0:
            raise ValueError("sigma must be positive")
        return v
