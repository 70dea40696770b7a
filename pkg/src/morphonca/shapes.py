"""Binary target shapes defined by closed-form predicates on the grid.

Every shape is placed so its bounding box is centered on ``grid_center(m)``.
Along an axis, an extent ``e`` starting at ``c - e // 2`` covers
``c - e//2 .. c - e//2 + e - 1``; odd extents are symmetric about the center
cell, even extents are symmetric about ``c - 0.5``.

Shape definitions (``s`` is the bounding-box side, rows counted from the top
of the box):

* square(side): every cell of the ``side x side`` box.
* circle(radius): cells whose Euclidean distance to the center cell is at
  most ``radius`` (radius 1 is the center plus its four neighbors).
* triangle(base): ``h = ceil(base / 2)`` rows; row ``k`` is ``2k + 1`` cells
  wide for odd ``base`` and ``2k + 2`` for even ``base``, apex at the top.
* biped(scale): torso of ``scale // 2 + 1`` full-width rows above two legs of
  width ``scale // 3`` flush with the left and right edges.
* circular_biped(scale): same legs; the torso rows keep only cells within
  ``scale / 2`` of the point (last torso row, ``(scale - 1) / 2``), a dome.
"""
from dataclasses import dataclass

import numpy as np

from ._validation import ConfigError, check_binary_grid, check_grid_dim, check_int
from .ca import grid_center
from .pgm import read_pgm, write_pgm

SHAPE_NAMES = ("square", "circle", "triangle", "biped", "circular_biped")


@dataclass(frozen=True)
class TargetShape:
    name: str
    cells: np.ndarray

    def __post_init__(self):
        cells = check_binary_grid(self.cells, "target")
        if not cells.any():
            raise ConfigError("target shape must contain at least one cell")
        cells.setflags(write=False)
        object.__setattr__(self, "cells", cells)

    @property
    def m(self):
        return self.cells.shape[0]

    @property
    def n_cells(self):
        return int(self.cells.sum())

    def bounding_box(self):
        rows = np.flatnonzero(self.cells.any(axis=1))
        cols = np.flatnonzero(self.cells.any(axis=0))
        return rows[0], rows[-1], cols[0], cols[-1]

    def to_pgm(self, path):
        return write_pgm(path, self.cells, maxval=1)


def _grid(m):
    # even m is always accepted here: the 50x50 experiments need it
    return check_grid_dim(m, allow_even=True)


def _box_origin(m, height, width):
    if height > m or width > m:
        raise ConfigError(f"shape extent {height}x{width} does not fit in a {m}x{m} grid")
    ci, cj = grid_center(m)
    return ci - height // 2, cj - width // 2


def _place(m, box):
    h, w = box.shape
    r0, c0 = _box_origin(m, h, w)
    cells = np.zeros((m, m), dtype=np.uint8)
    cells[r0:r0 + h, c0:c0 + w] = box
    return cells


def make_square(m, side):
    m = _grid(m)
    side = check_int(side, "side", minimum=1)
    if side > m:
        raise ConfigError(f"square side {side} exceeds grid size {m}")
    if m % 2 and side % 2 == 0:
        raise ConfigError(f"square side must be odd on an odd grid (m={m}, side={side})")
    return TargetShape("square", _place(m, np.ones((side, side), dtype=np.uint8)))


def make_circle(m, radius):
    m = _grid(m)
    radius = check_int(radius, "radius", minimum=1)
    ci, cj = grid_center(m)
    if ci - radius < 0 or ci + radius >= m:
        raise ConfigError(f"circle of radius {radius} does not fit in a {m}x{m} grid")
    rr, cc = np.mgrid[0:m, 0:m]
    cells = ((rr - ci) ** 2 + (cc - cj) ** 2 <= radius ** 2).astype(np.uint8)
    return TargetShape("circle", cells)


def make_triangle(m, base):
    m = _grid(m)
    base = check_int(base, "base", minimum=1)
    height = (base + 1) // 2
    box = np.zeros((height, base), dtype=np.uint8)
    extra = 1 if base % 2 else 2
    for k in range(height):
        width = 2 * k + extra
        start = (base - width) // 2
        box[k, start:start + width] = 1
    return TargetShape("triangle", _place(m, box))


def _legs(scale, torso_rows):
    leg = scale // 3
    if leg < 1 or scale - 2 * leg < 1 or torso_rows >= scale:
        raise ConfigError(f"biped scale {scale} too small to separate two legs")
    box = np.zeros((scale, scale), dtype=np.uint8)
    box[torso_rows:, :leg] = 1
    box[torso_rows:, scale - leg:] = 1
    return box


def make_biped(m, scale):
    m = _grid(m)
    scale = check_int(scale, "scale", minimum=3)
    torso = scale // 2 + 1
    box = _legs(scale, torso)
    box[:torso, :] = 1
    return TargetShape("biped", _place(m, box))


def make_circular_biped(m, scale):
    m = _grid(m)
    scale = check_int(scale, "scale", minimum=3)
    torso = scale // 2 + 1
    box = _legs(scale, torso)
    rr, cc = np.mgrid[0:torso, 0:scale]
    dome = (rr - (torso - 1)) ** 2 + (cc - (scale - 1) / 2) ** 2 <= (scale / 2) ** 2
    box[:torso, :] = dome
    return TargetShape("circular_biped", _place(m, box))


_MAKERS = {
    "square": (make_square, "side"),
    "circle": (make_circle, "radius"),
    "triangle": (make_triangle, "base"),
    "biped": (make_biped, "scale"),
    "circular_biped": (make_circular_biped, "scale"),
}


def default_shape_params(name, m):
    """Defaults sized for m=25 and scaled linearly with the grid."""
    if name not in _MAKERS:
        raise ConfigError(f"unknown shape {name!r}; expected one of {SHAPE_NAMES}")
    factor = m / 25
    if name == "square":
        side = max(1, round(15 * factor))
        if m % 2 and side % 2 == 0:
            side -= 1
        return {"side": side}
    if name == "circle":
        return {"radius": max(1, round(7 * factor))}
    if name == "triangle":
        return {"base": max(1, round(15 * factor))}
    return {"scale": max(3, round(15 * factor))}


def make_shape(name, m, **params):
    """Build a named shape, filling unspecified parameters with defaults."""
    if name not in _MAKERS:
        raise ConfigError(f"unknown shape {name!r}; expected one of {SHAPE_NAMES}")
    maker, key = _MAKERS[name]
    unknown = set(params) - {key}
    if unknown:
        raise ConfigError(f"shape {name!r} takes only {key!r}, got {sorted(unknown)}")
    kwargs = default_shape_params(name, m)
    kwargs.update(params)
    return maker(m, **kwargs)


def load_shape(path, name="custom"):
    """Import a binary mask from a PGM file (any nonzero pixel is inside)."""
    grid, _ = read_pgm(path)
    return TargetShape(name, (grid > 0).astype(np.uint8))
