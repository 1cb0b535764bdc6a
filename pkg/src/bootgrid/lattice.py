"""Finite hypercubic grids and one-bit-per-cell occupancy configurations.

Coordinates are 0-based ``(x, y)`` or ``(x, y, z)`` with ``x`` the fastest
axis.  Internally a configuration is a boolean numpy array indexed
``[z, y, x]`` (C order), so the flat cell index is
``x + Lx * (y + Ly * z)`` and bulk operations are contiguous.

Boundary handling is a property of the grid: ``open`` means cells outside
the grid are permanently empty, ``periodic`` means all axes wrap.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import prod

import numpy as np

from .rng import Stream

MAX_CELLS = 1 << 40

BOUNDARIES = ("open", "periodic")


@dataclass(frozen=True)
class GridSpec:
    """Side lengths per axis plus the boundary condition."""

    dims: tuple[int, ...]
    boundary: str = "open"

    def __init__(self, dims, boundary: str = "open"):
        dims = tuple(int(d) for d in dims)
        if not 1 <= len(dims) <= 3:
            raise ValueError(f"dimension must be 1..3, got {len(dims)}")
        if any(d < 1 for d in dims):
            raise ValueError(f"all side lengths must be >= 1, got {dims}")
        if prod(dims) > MAX_CELLS:
            raise ValueError(f"grid of {prod(dims)} cells exceeds the {MAX_CELLS} limit")
        if boundary not in BOUNDARIES:
            raise ValueError(f"boundary must be one of {BOUNDARIES}, got {boundary!r}")
        object.__setattr__(self, "dims", dims)
        object.__setattr__(self, "boundary", boundary)

    @property
    def ndim(self) -> int:
        return len(self.dims)

    @property
    def cells(self) -> int:
        return prod(self.dims)

    @property
    def shape(self) -> tuple[int, ...]:
        """Numpy array shape: dims reversed so x is the last (fastest) axis."""
        return tuple(reversed(self.dims))

    @property
    def periodic(self) -> bool:
        return self.boundary == "periodic"


@dataclass(frozen=True)
class Rect:
    """Axis-aligned box given by its minimal corner and positive extents."""

    corner: tuple[int, ...]
    extents: tuple[int, ...]

    def __init__(self, corner, extents):
        corner = tuple(int(c) for c in corner)
        extents = tuple(int(e) for e in extents)
        if len(corner) != len(extents):
            raise ValueError("corner and extents must have the same dimension")
        if any(e < 1 for e in extents):
            raise ValueError(f"extents must be positive, got {extents}")
        object.__setattr__(self, "corner", corner)
        object.__setattr__(self, "extents", extents)

    def check_within(self, grid: GridSpec) -> None:
        if len(self.corner) != grid.ndim:
            raise ValueError("rect dimension does not match grid dimension")
        for c, e, d in zip(self.corner, self.extents, grid.dims):
            if c < 0 or c + e > d:
                raise ValueError(f"rect {self} does not fit in grid dims {grid.dims}")

    def slices(self) -> tuple[slice, ...]:
        """Index tuple for the [z, y, x]-ordered occupancy array."""
        return tuple(
            slice(c, c + e) for c, e in zip(reversed(self.corner), reversed(self.extents))
        )


class Configuration:
    """Occupancy state of a grid.  Treat instances as immutable; the
    writer operations in this module return new configurations."""

    __slots__ = ("grid", "cells")

    def __init__(self, grid: GridSpec, cells: np.ndarray):
        cells = np.asarray(cells, dtype=bool)
        if cells.shape != grid.shape:
            raise ValueError(f"occupancy shape {cells.shape} != grid shape {grid.shape}")
        self.grid = grid
        self.cells = cells

    def copy(self) -> "Configuration":
        return Configuration(self.grid, self.cells.copy())

    def count_occupied(self) -> int:
        return int(np.count_nonzero(self.cells))

    def is_full(self) -> bool:
        return bool(self.cells.all())

    def is_empty(self) -> bool:
        return not self.cells.any()

    def get(self, coord: tuple[int, ...]) -> bool:
        return bool(self.cells[tuple(reversed(coord))])

    def flat(self) -> np.ndarray:
        """Flat occupancy, index x + Lx*(y + Ly*z)."""
        return self.cells.reshape(-1)

    def occupied_coords(self) -> list[tuple[int, ...]]:
        rev = np.argwhere(self.cells)
        return [tuple(int(v) for v in row[::-1]) for row in rev]

    def __eq__(self, other) -> bool:
        if not isinstance(other, Configuration):
            return NotImplemented
        return self.grid == other.grid and bool(np.array_equal(self.cells, other.cells))

    def __repr__(self) -> str:
        return (
            f"Configuration(dims={self.grid.dims}, boundary={self.grid.boundary!r}, "
            f"occupied={self.count_occupied()}/{self.grid.cells})"
        )


def empty_configuration(grid: GridSpec) -> Configuration:
    return Configuration(grid, np.zeros(grid.shape, dtype=bool))


def full_configuration(grid: GridSpec) -> Configuration:
    return Configuration(grid, np.ones(grid.shape, dtype=bool))


def random_configuration(grid: GridSpec, p: float, stream: Stream) -> Configuration:
    """Each cell is occupied independently with probability ``p``.

    Cell ``i`` is occupied iff the ``i``-th uniform of ``stream`` is below
    ``p``, so two draws from the same stream at p1 < p2 are coupled: the
    p1 configuration is a subset of the p2 one.
    """
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"p must lie in [0, 1], got {p}")
    u = stream.uniforms(grid.cells)
    return Configuration(grid, (u < p).reshape(grid.shape))


def occupy_rect(config: Configuration, rect: Rect) -> Configuration:
    """All cells of ``rect`` occupied, everything else unchanged."""
    rect.check_within(config.grid)
    out = config.copy()
    out.cells[rect.slices()] = True
    return out


def checkerboard_rect(config: Configuration, rect: Rect, parity: str) -> Configuration:
    """Occupy the cells of ``rect`` whose coordinate sum x+y matches ``parity``."""
    if config.grid.ndim != 2:
        raise ValueError("checkerboard_rect is only defined on 2-d grids")
    if parity not in ("even", "odd"):
        raise ValueError(f"parity must be 'even' or 'odd', got {parity!r}")
    rect.check_within(config.grid)
    out = config.copy()
    (x0, y0), (ex, ey) = rect.corner, rect.extents
    xs = np.arange(x0, x0 + ex)
    ys = np.arange(y0, y0 + ey)
    want = 0 if parity == "even" else 1
    mask = ((xs[None, :] + ys[:, None]) % 2) == want
    out.cells[y0 : y0 + ey, x0 : x0 + ex] |= mask
    return out


def to_text(config: Configuration) -> str:
    """Render in the row-of-0/1-characters text format (round-trip exact)."""
    grid = config.grid
    lines = [
        "dims: " + " ".join(str(d) for d in grid.dims),
        f"boundary: {grid.boundary}",
    ]
    arr = config.cells.astype(np.uint8)
    if grid.ndim == 1:
        lines.append("".join("1" if v else "0" for v in arr))
    elif grid.ndim == 2:
        for row in arr:
            lines.append("".join("1" if v else "0" for v in row))
    else:
        for zi, block in enumerate(arr):
            if zi:
                lines.append("")
            for row in block:
                lines.append("".join("1" if v else "0" for v in row))
    return "\n".join(lines) + "\n"


def from_text(text: str) -> Configuration:
    """Parse the text format produced by :func:`to_text`.

    Lines starting with ``#`` are ignored so files carrying a metadata
    preamble stay readable.
    """
    lines = [ln.rstrip("\n") for ln in text.splitlines()]
    lines = [ln for ln in lines if not ln.startswith("#")]
    if len(lines) < 2 or not lines[0].startswith("dims:"):
        raise ValueError("expected a 'dims: ...' header line")
    dims = tuple(int(tok) for tok in lines[0][len("dims:") :].split())
    if not lines[1].startswith("boundary:"):
        raise ValueError("expected a 'boundary: ...' header line")
    boundary = lines[1][len("boundary:") :].strip()
    grid = GridSpec(dims, boundary)

    body = lines[2:]
    rows: list[list[int]] = []
    for ln in body:
        if ln.strip() == "":
            continue
        if set(ln) - {"0", "1"}:
            raise ValueError(f"invalid row characters in {ln!r}")
        rows.append([1 if ch == "1" else 0 for ch in ln])

    lx = dims[0]
    ly = dims[1] if grid.ndim >= 2 else 1
    lz = dims[2] if grid.ndim == 3 else 1
    if len(rows) != ly * lz or any(len(r) != lx for r in rows):
        raise ValueError(f"body does not match dims {dims}")
    arr = np.array(rows, dtype=bool).reshape(grid.shape)
    return Configuration(grid, arr)
