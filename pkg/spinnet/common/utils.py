"""
Common utility functions for spinnet

This module provides number formatting, result-file writers and a small
order-preserving worker pool used by the sweep experiments.
"""

import csv
import json
from collections.abc import Callable, Iterable, Sequence
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path
from typing import Any, TypeVar

import numpy as np

from .logging import get_logger

logger = get_logger(__name__)

T = TypeVar("T")
R = TypeVar("R")

SIGNIFICANT_DIGITS = 12


def filter_none_values(data: dict[str, Any]) -> dict[str, Any]:
    """Remove None values from a dictionary.

    Args:
        data: Dictionary to filter

    Returns:
        Dict[str, Any]: Filtered dictionary
    """
    return {k: v for k, v in data.items() if v is not None}


def format_number(value: Any) -> str:
    """Format a scalar for CSV output with 12 significant digits.

    Integers and booleans are written verbatim, complex numbers are reduced to
    their real part (callers only pass real-valued observables).
    """
    if isinstance(value, (bool, np.bool_)):
        return str(bool(value)).lower()
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (complex, np.complexfloating)):
        value = value.real
    if isinstance(value, (float, np.floating)):
        return f"{float(value):.{SIGNIFICANT_DIGITS}g}"
    return str(value)


def to_jsonable(value: Any) -> Any:
    """Convert numpy containers and scalars into plain JSON types."""
    if isinstance(value, dict):
        return {str(k): to_jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [to_jsonable(v) for v in value]
    if isinstance(value, np.ndarray):
        return to_jsonable(value.tolist())
    if isinstance(value, (np.bool_,)):
        return bool(value)
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, np.floating):
        return float(value)
    if isinstance(value, (complex, np.complexfloating)):
        return {"re": float(value.real), "im": float(value.imag)}
    return value


def write_csv(
    path: Path,
    header: Sequence[str],
    rows: Iterable[Sequence[Any]],
    metadata: dict[str, Any],
) -> Path:
    """Write a result table with ``#``-prefixed metadata lines and a header row.

    Args:
        path: Output file
        header: Column names
        rows: Table rows
        metadata: Tool version, resolved config and seed

    Returns:
        Path: The written file
    """
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="", encoding="utf-8") as handle:
        for key, value in metadata.items():
            handle.write(f"# {key}: {json.dumps(to_jsonable(value), sort_keys=True)}\n")
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(header)
        count = 0
        for row in rows:
            writer.writerow([format_number(v) for v in row])
            count += 1
    logger.info("Wrote %d rows to %s", count, path)
    return path


def write_json(path: Path, payload: dict[str, Any], metadata: dict[str, Any]) -> Path:
    """Write a JSON artifact, embedding the run metadata under ``"run"``."""
    path.parent.mkdir(parents=True, exist_ok=True)
    document = {"run": to_jsonable(metadata), **to_jsonable(payload)}
    path.write_text(json.dumps(document, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    logger.info("Wrote %s", path)
    return path


def read_csv(path: Path) -> tuple[dict[str, Any], list[str], list[list[str]]]:
    """Read a table written by :func:`write_csv`.

    Returns:
        Metadata dict, header, and rows as strings
    """
    metadata: dict[str, Any] = {}
    body: list[str] = []
    for line in path.read_text(encoding="utf-8").splitlines():
        if line.startswith("# "):
            key, _, value = line[2:].partition(": ")
            metadata[key] = json.loads(value)
        elif line:
            body.append(line)
    table = list(csv.reader(body))
    return metadata, table[0], table[1:]


def parallel_map(func: Callable[[T], R], items: Sequence[T], threads: int = 1) -> list[R]:
    """Apply ``func`` to every item, preserving input order.

    numpy releases the GIL inside LAPACK calls, so a thread pool gives real
    speedups for the eigendecompositions that dominate each sweep point.
    """
    if threads <= 1 or len(items) <= 1:
        return [func(item) for item in items]
    logger.debug("Mapping %d items over %d threads", len(items), threads)
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(func, items))


def generate_md_table(data: list[tuple]) -> str:
    """Generate a Markdown table from a list of tuples.

    The first tuple contains headers, remaining tuples contain data rows.

    Raises:
        TypeError: If the first row (headers) contains non-string values
        TypeError: If there are not at least 2 items (header and a value row)
        ValueError: If the header row is empty
    """
    if not data or len(data) < 2:
        raise TypeError("Need at least 2 items. The header and a value row")

    headers = data[0]
    if len(headers) == 0:
        raise ValueError("Header row cannot be empty")

    clean_headers = []
    for header in headers:
        if not isinstance(header, str):
            raise TypeError(f"Header values must be strings, got {type(header).__name__}")
        clean_headers.append(header.strip())

    lines = [
        "|" + "|".join(clean_headers) + "|",
        "|" + "|".join(["-"] * len(clean_headers)) + "|",
    ]

    for row in data[1:]:
        row_values = []
        for value in row[: len(clean_headers)]:
            if value is None:
                row_values.append("")
            else:
                text = str(value)
                row_values.append(" ".join(part.strip() for part in text.split("\n") if part.strip()))
        while len(row_values) < len(clean_headers):
            row_values.append("")
        lines.append("|" + "|".join(row_values) + "|")

    return "\n".join(lines)
