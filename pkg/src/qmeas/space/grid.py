"""Rasterized compact rectangles."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..errors import OutOfDomain


@dataclass(frozen=True)
class Grid:
    """An axis-aligned compact rectangle cut into ``n x n`` cells.

    Arrays living on a grid have shape ``(n, n)`` and are indexed
    ``[ix, iy]``; cell ``(i, j)`` covers
    ``[x0 + i*hx, x0 + (i+1)*hx] x [y0 + j*hy, y0 + (j+1)*hy]``.
    Two grids are compatible iff they compare equal.
    """

    x_range: tuple[float, float] = (0.0, 1.0)
    y_range: tuple[float, float] = (0.0, 1.0)
    n: int = 256

    def __post_init__(self):
        object.__setattr__(self, "x_range", tuple(float(v) for v in self.x_range))
        object.__setattr__(self, "y_range", tuple(float(v) for v in self.y_range))
        if int(self.n) != self.n or self.n < 8:
            raise ValueError(f"grid needs n >= 8 cells per axis, got {self.n}")
        object.__setattr__(self, "n", int(self.n))
        for lo, hi in (self.x_range, self.y_range):
            if not (math.isfinite(lo) and math.isfinite(hi) and lo < hi):
                raise ValueError(f"bad interval ({lo}, {hi})")

    @property
    def shape(self) -> tuple[int, int]:
        return (self.n, self.n)

    @property
    def hx(self) -> float:
        return (self.x_range[1] - self.x_range[0]) / self.n

    @property
    def hy(self) -> float:
        return (self.y_range[1] - self.y_range[0]) / self.n

    @property
    def h(self) -> float:
        """Resolution: the longer cell side."""
        return max(self.hx, self.hy)

    @property
    def cell_area(self) -> float:
        return self.hx * self.hy

    @property
    def area(self) -> float:
        return (self.x_range[1] - self.x_range[0]) * (self.y_range[1] - self.y_range[0])

    def edges(self) -> tuple[np.ndarray, np.ndarray]:
        """Cell edge coordinates along x and y, each of length ``n + 1``."""
        xs = self.x_range[0] + self.hx * np.arange(self.n + 1)
        ys = self.y_range[0] + self.hy * np.arange(self.n + 1)
        xs[-1], ys[-1] = self.x_range[1], self.y_range[1]
        return xs, ys

    def centers(self) -> tuple[np.ndarray, np.ndarray]:
        """Cell-center coordinate arrays ``(X, Y)`` of shape ``(n, n)``."""
        xs = self.x_range[0] + self.hx * (np.arange(self.n) + 0.5)
        ys = self.y_range[0] + self.hy * (np.arange(self.n) + 0.5)
        return np.meshgrid(xs, ys, indexing="ij")

    def contains(self, point) -> bool:
        x, y = point
        return (self.x_range[0] <= x <= self.x_range[1]
                and self.y_range[0] <= y <= self.y_range[1])

    def cell_of(self, point) -> tuple[int, int]:
        """Index of the cell holding ``point``.

        Cells are half-open on the upper side, except the last row/column
        which also owns the far edge of the rectangle.
        """
        if not self.contains(point):
            raise OutOfDomain(f"point {tuple(point)} is outside {self.x_range} x {self.y_range}")
        x, y = point
        i = min(int(math.floor((x - self.x_range[0]) / self.hx)), self.n - 1)
        j = min(int(math.floor((y - self.y_range[0]) / self.hy)), self.n - 1)
        return i, j

    def x_index(self, x: float) -> int:
        return self.cell_of((x, self.y_range[0]))[0]

    def y_index(self, y: float) -> int:
        return self.cell_of((self.x_range[0], y))[1]


def unit_square(n: int = 256) -> Grid:
    return Grid((0.0, 1.0), (0.0, 1.0), n)
