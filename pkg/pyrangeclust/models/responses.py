"""
Defines models for query answers and validation reports.
"""

from typing import Any, Dict, List, Optional

from pydantic import BaseModel, Field

SCHEMA_VERSION = 1


class ClusteringAnswer(BaseModel):
    """
    Answer to one query, in original dataset units.

    Attributes
    ----------
    schema_version: int
        Serialized as `schema`.
    type: str
        Query type.
    k: int | None
    eps: float
    centers: list[list[float]]
        At most `k` centers; for radius queries the enclosing-ball center.
    cost: float
        Cost under the requested objective; diameter or radius for extent
        queries.
    solver: str
        Tag of the routine that produced the centers.
    coreset_size: int
    point_accesses: int
        Structure operations issued while answering.
    wall_ms: float
    instrumentation: dict
        Extra counters (intermediate coreset sizes, probes, displacement
        bounds).
    coreset: list[list[float]] | None
        Coreset rows `[x..., w]` when requested.
    warning: str | None
    """

    schema_version: int = Field(SCHEMA_VERSION, alias="schema")
    type: str
    k: Optional[int] = None
    eps: float
    centers: List[List[float]] = []
    cost: float = 0.0
    solver: str = "none"
    coreset_size: int = 0
    point_accesses: int = 0
    wall_ms: float = 0.0
    instrumentation: Dict[str, Any] = {}
    coreset: Optional[List[List[float]]] = None
    warning: Optional[str] = None

    class Config:
        allow_population_by_field_name = True

    def to_json(self) -> str:
        """Compact JSON with stable key order, optional fields omitted when unset."""
        return self.json(by_alias=True, exclude_none=True, sort_keys=True,
                         separators=(",", ":"))


class PropertyResult(BaseModel):
    """
    Outcome of one property check.

    Attributes
    ----------
    suite: str
    name: str
    passed: bool
    checks: int
        Number of instances examined.
    violations: int
    worst_slack: float
        Smallest margin observed between the bound and the measured value;
        negative when violated.
    detail: str
    """

    suite: str
    name: str
    passed: bool
    checks: int
    violations: int = 0
    worst_slack: float = 0.0
    detail: str = ""


class ValidationReport(BaseModel):
    """Collection of property results for one bundle."""

    schema_version: int = Field(SCHEMA_VERSION, alias="schema")
    n: int
    d: int
    suites: List[str]
    results: List[PropertyResult] = []

    class Config:
        allow_population_by_field_name = True

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.results)

    def to_json(self) -> str:
        return self.json(by_alias=True, sort_keys=True, indent=2)

    def to_csv(self) -> str:
        header = "suite,name,passed,checks,violations,worst_slack,detail"
        rows = [header]
        for r in self.results:
            detail = r.detail.replace('"', "'")
            rows.append(f"{r.suite},{r.name},{int(r.passed)},{r.checks},"
                        f"{r.violations},{r.worst_slack!r},\"{detail}\"")
        return "\n".join(rows) + "\n"
