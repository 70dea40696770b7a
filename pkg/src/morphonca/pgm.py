"""Plain (ASCII, ``P2``) PGM reading and writing."""
from pathlib import Path

import numpy as np

from ._validation import DataError


def format_pgm(grid, maxval=255):
    grid = np.asarray(grid)
    if grid.ndim != 2:
        raise DataError(f"PGM data must be 2-D, got shape {grid.shape}")
    if grid.size and (grid.min() < 0 or grid.max() > maxval):
        raise DataError(f"PGM values must lie in [0, {maxval}]")
    h, w = grid.shape
    lines = ["P2", f"{w} {h}", str(maxval)]
    lines += [" ".join(str(int(v)) for v in row) for row in grid]
    return "\n".join(lines) + "\n"


def write_pgm(path, grid, maxval=255):
    path = Path(path)
    path.write_text(format_pgm(grid, maxval), encoding="ascii")
    return path


def read_pgm(path):
    """Return ``(grid, maxval)`` from a plain PGM file; ``#`` comments allowed."""
    tokens = []
    for line in Path(path).read_text(encoding="ascii").splitlines():
        tokens += line.split("#", 1)[0].split()
    if len(tokens) < 4 or tokens[0] != "P2":
        raise DataError(f"{path}: not a plain (P2) PGM file")
    try:
        w, h, maxval = int(tokens[1]), int(tokens[2]), int(tokens[3])
        values = np.array([int(t) for t in tokens[4:]], dtype=np.int64)
    except ValueError as exc:
        raise DataError(f"{path}: malformed PGM ({exc})") from None
    if values.size != w * h:
        raise DataError(f"{path}: expected {w * h} pixels, found {values.size}")
    if values.size and (values.min() < 0 or values.max() > maxval):
        raise DataError(f"{path}: pixel values exceed maxval {maxval}")
    return values.reshape(h, w), maxval
