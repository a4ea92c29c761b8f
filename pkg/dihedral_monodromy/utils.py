"""Utility functions for report output, seeding and timing."""

import csv
import io
import json
import os
import time
from contextlib import contextmanager
from typing import Any, Dict, Iterator, List, Optional

import numpy as np

from .logger import Logger

logger = Logger("utils")


def make_rng(seed: int) -> np.random.Generator:
    """
    Create the seeded generator used for every random choice in a run.

    Args:
        seed: Seed recorded in the certificates

    Returns:
        A numpy Generator
    """
    return np.random.default_rng(seed)


def random_int_vector(rng: np.random.Generator, size: int, bound: int) -> List[int]:
    """Draw `size` integers uniformly from [-bound, bound]."""
    return [int(v) for v in rng.integers(-bound, bound + 1, size=size)]


@contextmanager
def timed() -> Iterator[Dict[str, int]]:
    """
    Measure the wall time of a block in milliseconds.

    Yields:
        A dict whose "runtime_ms" key is filled in when the block exits
    """
    record = {"runtime_ms": 0}
    start = time.perf_counter()
    try:
        yield record
    finally:
        record["runtime_ms"] = int(round((time.perf_counter() - start) * 1000))


def detect_output_format(output_path: Optional[str]) -> str:
    """
    Detect the desired output format based on file extension.

    Args:
        output_path: Path to output file

    Returns:
        Output format (json, csv)
    """
    from .constants import FORMAT_CSV, FORMAT_JSON

    if not output_path:
        return FORMAT_JSON

    ext = os.path.splitext(output_path)[1].lower()
    if ext == ".csv":
        return FORMAT_CSV
    return FORMAT_JSON


def matrices_to_csv(matrices: Dict[str, List[List[List[str]]]]) -> str:
    """
    Flatten serialized matrices into one CSV row per entry.

    Args:
        matrices: Map of matrix name to rows of serialized scalars ["num/den", ...]

    Returns:
        CSV text with header name,row,col,c0,...
    """
    width = 0
    for rows in matrices.values():
        for row in rows:
            for entry in row:
                width = max(width, len(entry))

    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(["name", "row", "col"] + [f"c{k}" for k in range(width)])
    for name, rows in matrices.items():
        for r, row in enumerate(rows):
            for c, entry in enumerate(row):
                writer.writerow([name, r, c] + list(entry))
    return buffer.getvalue()


def format_for_output_type(payload: Dict[str, Any], format_type: str) -> str:
    """
    Format a report or matrix dump for the specified output type.

    Args:
        payload: JSON-ready report; matrix dumps keep their matrices under "matrices"
        format_type: Output format (json, csv)

    Returns:
        Formatted content
    """
    from .constants import FORMAT_CSV

    if format_type == FORMAT_CSV:
        if "matrices" not in payload:
            raise ValueError("CSV output is only available for matrix dumps")
        return matrices_to_csv(payload["matrices"])

    # sort_keys keeps dumps byte-identical across runs
    return json.dumps(payload, indent=2, sort_keys=True)


def save_to_file(content: str, output_path: str) -> None:
    """
    Save content to file.

    Args:
        content: Content to save
        output_path: Path to output file
    """
    try:
        directory = os.path.dirname(output_path)
        if directory and not os.path.exists(directory):
            os.makedirs(directory)

        with open(output_path, "w", encoding="utf-8") as f:
            f.write(content)

        logger.info(f"Successfully saved output to {output_path}")
    except Exception as e:
        logger.error(f"Error saving to file {output_path}: {str(e)}")
        raise
