"""
Utilities for data ingestion and persistence: CSV datasets, index bundles
and synthetic point sets.
"""

import io
import json
import logging
import math
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple, Union

import numpy as np

from pyrangeclust.utils.exceptions import (BundleFormatError, DataError,
                                           DimensionError, EmptyInputError,
                                           NonFiniteError)

MIN_DIM = 2
MAX_DIM = 8
BUNDLE_MAGIC = b"RCIDX"
BUNDLE_VERSION = 1

PathLike = Union[str, Path]


def parse_csv(text: str, weighted: bool = False) \
        -> Tuple[np.ndarray, Optional[np.ndarray]]:
    """
    Parse comma-separated numeric rows, with an optional header line.

    Parameters
    ----------
    text: str
        File contents.
    weighted: bool, default=False
        Treat the last column as a positive point weight.

    Returns
    -------
    np.ndarray, np.ndarray | None
        Coordinates of shape (n, d) and the weights when requested.

    Raises
    ------
    DataError
        On ragged or non-numeric rows, with the offending line number.
    """
    rows: List[List[float]] = []
    width: Optional[int] = None
    for number, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        fields = [f.strip() for f in stripped.split(",")]
        try:
            values = [float(f) for f in fields]
        except ValueError:
            if not rows and width is None:
                width = len(fields)
                logging.debug(f"Skipping header on line {number}: {stripped}")
                continue
            raise DataError(f"Line {number}: non-numeric value in '{stripped}'")
        if width is None:
            width = len(values)
        elif len(values) != width:
            raise DataError(f"Line {number}: expected {width} columns, found {len(values)}")
        if not all(math.isfinite(v) for v in values):
            raise NonFiniteError(f"Line {number}: non-finite value in '{stripped}'")
        rows.append(values)
    if not rows:
        raise EmptyInputError("The input holds no data rows")
    table = np.asarray(rows, dtype=float)
    if not weighted:
        return table, None
    if table.shape[1] < 2:
        raise DataError("A weighted dataset needs coordinates plus a weight column")
    weights = table[:, -1]
    if np.any(weights <= 0):
        line = int(np.flatnonzero(weights <= 0)[0])
        raise DataError(f"Row {line + 1}: weights must be positive")
    return table[:, :-1], weights


def check_dimension(points: np.ndarray) -> int:
    """
    Verify the dataset dimension is supported.

    Returns
    -------
    int
        The dimension d, with 2 <= d <= 8.
    """
    dim = int(points.shape[1])
    if not MIN_DIM <= dim <= MAX_DIM:
        raise DimensionError(f"Dimension {dim} is outside the supported range "
                             f"[{MIN_DIM}, {MAX_DIM}]")
    return dim


def read_csv(path: PathLike, weighted: bool = False) \
        -> Tuple[np.ndarray, Optional[np.ndarray]]:
    """Read a CSV dataset from disk; see `parse_csv`."""
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as error:
        raise DataError(f"Cannot read {path}: {error}")
    return parse_csv(text, weighted=weighted)


def format_csv(points: np.ndarray, header: bool = True) -> str:
    """Render points as CSV with `repr`-exact floats."""
    buffer = io.StringIO()
    if header:
        buffer.write(",".join(f"x{i + 1}" for i in range(points.shape[1])) + "\n")
    for row in points.tolist():
        buffer.write(",".join(repr(float(v)) for v in row) + "\n")
    return buffer.getvalue()


def write_bundle(path: PathLike, points: np.ndarray, weights: Optional[np.ndarray],
                 params: Dict[str, Any], normalizer: Dict[str, Any]) -> None:
    """
    Write an index bundle.

    The layout is a magic line, a JSON header line, then the raw coordinates
    in row order as little-endian float64, followed by the weights when the
    dataset is weighted.
    """
    header = {
        "format_version": BUNDLE_VERSION,
        "n": int(points.shape[0]),
        "d": int(points.shape[1]),
        "weighted": weights is not None,
        "params": params,
        "normalizer": normalizer,
    }
    payload = np.ascontiguousarray(points, dtype="<f8").tobytes()
    if weights is not None:
        payload += np.ascontiguousarray(weights, dtype="<f8").tobytes()
    with open(path, "wb") as handle:
        handle.write(BUNDLE_MAGIC + b"\n")
        handle.write(json.dumps(header, sort_keys=True).encode("utf-8") + b"\n")
        handle.write(payload)


def read_bundle(path: PathLike) \
        -> Tuple[np.ndarray, Optional[np.ndarray], Dict[str, Any]]:
    """
    Read an index bundle written by `write_bundle`.

    Returns
    -------
    np.ndarray, np.ndarray | None, dict
        Raw coordinates, weights and the parsed header.
    """
    try:
        raw = Path(path).read_bytes()
    except OSError as error:
        raise DataError(f"Cannot read bundle {path}: {error}")
    magic, _, rest = raw.partition(b"\n")
    if magic != BUNDLE_MAGIC:
        raise BundleFormatError(f"{path} is not an index bundle")
    header_line, _, payload = rest.partition(b"\n")
    try:
        header = json.loads(header_line.decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as error:
        raise BundleFormatError(f"Corrupt bundle header in {path}: {error}")
    if header.get("format_version") != BUNDLE_VERSION:
        raise BundleFormatError(f"Unsupported bundle version {header.get('format_version')}")
    n, d = int(header["n"]), int(header["d"])
    expected = n * d + (n if header.get("weighted") else 0)
    if len(payload) != 8 * expected:
        raise BundleFormatError(f"Bundle payload holds {len(payload)} bytes, expected {8 * expected}")
    values = np.frombuffer(payload, dtype="<f8").astype(float)
    points = values[:n * d].reshape(n, d)
    weights = values[n * d:] if header.get("weighted") else None
    return points, weights, header


def generate_points(n: int, d: int, mixture: str = "uniform", m: int = 5,
                    sigma: float = 0.05, seed: int = 0) -> np.ndarray:
    """
    Reproducible synthetic dataset in the unit cube.

    Parameters
    ----------
    n: int
        Number of points.
    d: int
        Dimension.
    mixture: str, default="uniform"
        `uniform`, or `gaussians` for `m` isotropic clusters of spread
        `sigma` around uniform means.
    m: int, default=5
    sigma: float, default=0.05
    seed: int, default=0

    Returns
    -------
    np.ndarray
        Shape (n, d).
    """
    rng = np.random.default_rng(seed)
    if mixture == "uniform":
        return rng.random((n, d))
    if mixture == "gaussians":
        means = rng.random((m, d))
        labels = rng.integers(0, m, size=n)
        return means[labels] + sigma * rng.standard_normal((n, d))
    raise DataError(f"Unknown mixture '{mixture}'")
