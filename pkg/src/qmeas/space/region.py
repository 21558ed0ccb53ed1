"""Open and compact subsets of a grid.

A region is a cell mask plus a kind tag.  Open regions use
8-connectivity and compact regions 4-connectivity, so a region and its
complement are always measured with the dual pairing.  Since the ambient
rectangle is compact, closed and compact coincide.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np
from scipy import ndimage

from ..errors import GridMismatch, NotConnected
from .grid import Grid

FOUR = ndimage.generate_binary_structure(2, 1)
EIGHT = ndimage.generate_binary_structure(2, 2)


class Kind(enum.Enum):
    OPEN = "open"
    COMPACT = "compact"

    @property
    def opposite(self) -> "Kind":
        return Kind.COMPACT if self is Kind.OPEN else Kind.OPEN

    @property
    def structure(self) -> np.ndarray:
        return EIGHT if self is Kind.OPEN else FOUR

    @classmethod
    def parse(cls, value) -> "Kind":
        if isinstance(value, cls):
            return value
        return cls(str(value).lower())


OPEN = Kind.OPEN
COMPACT = Kind.COMPACT


def _frozen(mask) -> np.ndarray:
    out = np.array(mask, dtype=bool, copy=True)
    out.setflags(write=False)
    return out


@dataclass(frozen=True, eq=False)
class Region:
    grid: Grid
    mask: np.ndarray
    kind: Kind

    def __post_init__(self):
        mask = _frozen(self.mask)
        if mask.shape != self.grid.shape:
            raise ValueError(f"mask shape {mask.shape} does not match grid {self.grid.shape}")
        object.__setattr__(self, "mask", mask)
        object.__setattr__(self, "kind", Kind.parse(self.kind))

    # -- construction -------------------------------------------------

    @classmethod
    def full(cls, grid: Grid, kind=OPEN) -> "Region":
        return cls(grid, np.ones(grid.shape, bool), kind)

    @classmethod
    def empty(cls, grid: Grid, kind=OPEN) -> "Region":
        return cls(grid, np.zeros(grid.shape, bool), kind)

    @classmethod
    def rectangle(cls, grid: Grid, x0, x1, y0, y1, kind=OPEN) -> "Region":
        """Rasterize ``[x0, x1] x [y0, y1]``.

        Compact regions take every cell meeting the rectangle in positive
        area; open regions take the cells lying inside it.
        """
        xs, ys = grid.edges()
        ex, ey = 1e-9 * grid.hx, 1e-9 * grid.hy
        kind = Kind.parse(kind)
        if kind is COMPACT:
            in_x = (xs[:-1] < x1 - ex) & (xs[1:] > x0 + ex)
            in_y = (ys[:-1] < y1 - ey) & (ys[1:] > y0 + ey)
        else:
            in_x = (xs[:-1] >= x0 - ex) & (xs[1:] <= x1 + ex)
            in_y = (ys[:-1] >= y0 - ey) & (ys[1:] <= y1 + ey)
        return cls(grid, np.outer(in_x, in_y), kind)

    @classmethod
    def disk(cls, grid: Grid, center, radius, kind=OPEN) -> "Region":
        xs, ys = grid.edges()
        cx, cy = center
        a, b = np.meshgrid(xs[:-1], ys[:-1], indexing="ij")
        c, d = np.meshgrid(xs[1:], ys[1:], indexing="ij")
        kind = Kind.parse(kind)
        if kind is COMPACT:
            dx = np.maximum.reduce([a - cx, np.zeros_like(a), cx - c])
            dy = np.maximum.reduce([b - cy, np.zeros_like(b), cy - d])
            mask = dx * dx + dy * dy < radius * radius * (1 - 1e-12)
        else:
            dx = np.maximum(np.abs(a - cx), np.abs(c - cx))
            dy = np.maximum(np.abs(b - cy), np.abs(d - cy))
            mask = dx * dx + dy * dy <= radius * radius * (1 + 1e-12)
        return cls(grid, mask, kind)

    @classmethod
    def cell(cls, grid: Grid, point, kind=COMPACT) -> "Region":
        """The single cell containing ``point``."""
        mask = np.zeros(grid.shape, bool)
        mask[grid.cell_of(point)] = True
        return cls(grid, mask, kind)

    # -- algebra ------------------------------------------------------

    def _check(self, other: "Region"):
        if self.grid != other.grid:
            raise GridMismatch("regions live on different grids")

    def _same_kind(self, other: "Region"):
        self._check(other)
        if self.kind is not other.kind:
            raise ValueError(f"cannot combine {self.kind.value} and {other.kind.value} regions")

    def complement(self) -> "Region":
        return Region(self.grid, ~self.mask, self.kind.opposite)

    def union(self, other: "Region") -> "Region":
        self._same_kind(other)
        return Region(self.grid, self.mask | other.mask, self.kind)

    def intersection(self, other: "Region") -> "Region":
        self._same_kind(other)
        return Region(self.grid, self.mask & other.mask, self.kind)

    def difference(self, other: "Region") -> "Region":
        """``self \\ other``; requires ``other`` of the opposite kind so the
        result keeps ``self``'s kind (open minus compact is open)."""
        self._check(other)
        if other.kind is self.kind:
            raise ValueError("difference needs regions of opposite kinds")
        return Region(self.grid, self.mask & ~other.mask, self.kind)

    __or__ = union
    __and__ = intersection

    def as_kind(self, kind) -> "Region":
        return Region(self.grid, self.mask, kind)

    def erode(self, cells: int) -> "Region":
        """Shrink by ``cells`` layers; the ambient border is not a boundary."""
        if cells <= 0 or not self.mask.any():
            return self
        out = ndimage.binary_erosion(self.mask, EIGHT, iterations=cells, border_value=1)
        return Region(self.grid, out, self.kind)

    def dilate(self, cells: int) -> "Region":
        if cells <= 0 or not self.mask.any():
            return self
        out = ndimage.binary_dilation(self.mask, EIGHT, iterations=cells)
        return Region(self.grid, out, self.kind)

    # -- predicates ---------------------------------------------------

    def __eq__(self, other):
        if not isinstance(other, Region):
            return NotImplemented
        return (self.grid == other.grid and self.kind is other.kind
                and np.array_equal(self.mask, other.mask))

    def __hash__(self):
        return hash((self.grid, self.kind, self.mask.tobytes()))

    def __repr__(self):
        return f"Region({self.kind.value}, cells={self.cells}/{self.mask.size})"

    @property
    def cells(self) -> int:
        return int(self.mask.sum())

    @property
    def is_empty(self) -> bool:
        return not self.mask.any()

    @property
    def is_full(self) -> bool:
        return bool(self.mask.all())

    def issubset(self, other: "Region") -> bool:
        self._check(other)
        return not (self.mask & ~other.mask).any()

    def isdisjoint(self, other: "Region") -> bool:
        self._check(other)
        return not (self.mask & other.mask).any()

    def contains_point(self, point) -> bool:
        return bool(self.mask[self.grid.cell_of(point)])

    def touches_border(self) -> bool:
        m = self.mask
        return bool(m[0].any() or m[-1].any() or m[:, 0].any() or m[:, -1].any())

    def boundary_cells(self) -> int:
        """Number of cell edges separating the mask from its complement."""
        m = self.mask
        return int((m[1:] != m[:-1]).sum() + (m[:, 1:] != m[:, :-1]).sum())

    # -- topology -----------------------------------------------------

    def label(self) -> tuple[np.ndarray, int]:
        return ndimage.label(self.mask, structure=self.kind.structure)

    def components(self) -> list["Region"]:
        """Maximal connected pieces, in label order."""
        labels, count = self.label()
        return [Region(self.grid, labels == k, self.kind) for k in range(1, count + 1)]

    @property
    def is_connected(self) -> bool:
        return self.label()[1] <= 1


def components(r: Region) -> list[Region]:
    return r.components()


def complement(r: Region) -> Region:
    return r.complement()


def holes(r: Region) -> list[Region]:
    """Complement components of a connected region that avoid the border."""
    if not r.is_connected:
        raise NotConnected(f"region has {r.label()[1]} components")
    return [c for c in r.complement().components() if not c.touches_border()]


def solid_hull(r: Region) -> Region:
    """``r`` together with all of its holes."""
    mask = r.mask.copy()
    for hole in holes(r):
        mask |= hole.mask
    return Region(r.grid, mask, r.kind)
