"""Seeded generators of test regions, functions and generators.

Every helper takes a ``numpy.random.Generator``; the verifiers build one
from their ``rng_seed`` so a trial sequence is reproducible.
"""

from __future__ import annotations

import numpy as np

from .space import (COMPACT, OPEN, CompactFunc, Grid, Kind, PhiCurve, ProductRegion, Region,
                    TensorFunc)

MIN_FRACTION = 0.02
MAX_FRACTION = 0.9


def _primitive(grid: Grid, rng, kind) -> Region:
    (x0, x1), (y0, y1) = grid.x_range, grid.y_range
    w, h = x1 - x0, y1 - y0
    cx, cy = x0 + w * rng.uniform(0.05, 0.95), y0 + h * rng.uniform(0.05, 0.95)
    if rng.random() < 0.6:
        a, b = w * rng.uniform(0.05, 0.3), h * rng.uniform(0.05, 0.3)
        return Region.rectangle(grid, cx - a, cx + a, cy - b, cy + b, kind)
    return Region.disk(grid, (cx, cy), min(w, h) * rng.uniform(0.05, 0.3), kind)


def random_region(grid: Grid, rng, kind=COMPACT, pieces: int | None = None) -> Region:
    """Union of 1-3 rectangles/disks covering between 2% and 90% of X."""
    kind = Kind.parse(kind)
    for _ in range(100):
        k = pieces or int(rng.integers(1, 4))
        r = _primitive(grid, rng, kind)
        for _ in range(k - 1):
            r = r | _primitive(grid, rng, kind)
        frac = r.cells / r.mask.size
        if MIN_FRACTION <= frac <= MAX_FRACTION:
            return r
    return r


def random_overlapping_pair(grid: Grid, rng, kind=COMPACT) -> tuple[Region, Region]:
    """Two regions that share at least one cell."""
    a = random_region(grid, rng, kind)
    cells = np.argwhere(a.mask)
    i, j = cells[rng.integers(len(cells))]
    X, Y = grid.centers()
    px, py = X[i, j], Y[i, j]
    w = grid.x_range[1] - grid.x_range[0]
    h = grid.y_range[1] - grid.y_range[0]
    left, right = w * rng.uniform(0.02, 0.5), w * rng.uniform(0.02, 0.5)
    down, up = h * rng.uniform(0.02, 0.3), h * rng.uniform(0.02, 0.3)
    b = Region.rectangle(grid, px - left, px + right, py - down, py + up, kind)
    if b.isdisjoint(a):
        b = b | Region.cell(grid, (px, py), kind)
    return a, b


def random_disjoint_pair(grid: Grid, rng, kind=COMPACT, gap: int = 1) -> tuple[Region, Region]:
    """Two nonempty regions at least ``gap`` cells apart."""
    for _ in range(100):
        a = random_region(grid, rng, kind)
        b = random_region(grid, rng, kind)
        mask = b.mask & ~a.dilate(gap).mask
        if mask.any():
            return a, Region(grid, mask, kind)
    raise RuntimeError("could not draw a disjoint pair")


def random_nested_pair(grid: Grid, rng, kind=COMPACT) -> tuple[Region, Region]:
    """``small`` inside ``big``, both of the given kind."""
    big = random_region(grid, rng, kind)
    other = random_region(grid, rng, kind)
    small = Region(grid, big.mask & other.mask, kind)
    if small.is_empty:
        small = big.erode(1)
    return small, big


def ramp_cells(grid: Grid, rng) -> int:
    """Ramp width between n/16 and n/4 cells, so ``Lip(f) h`` shrinks with h."""
    return int(rng.integers(max(1, grid.n // 16), max(2, grid.n // 4) + 1))


def random_function(grid: Grid, rng, signed: bool = True) -> CompactFunc:
    """Sum of 1-3 plateau bumps, occasionally tilted."""
    f = CompactFunc.zeros(grid)
    for _ in range(int(rng.integers(1, 4))):
        inner = random_region(grid, rng, COMPACT)
        if rng.random() < 0.3:
            inner = inner.erode(int(rng.integers(1, 4))) if inner.erode(3).cells else inner
        outer = inner.dilate(ramp_cells(grid, rng)).as_kind(OPEN)
        height = rng.uniform(0.2, 1.0)
        if signed and rng.random() < 0.4:
            height = -height
        bump = CompactFunc.plateau(inner, outer, height)
        if rng.random() < 0.25:
            X, Y = grid.centers()
            tilt = 1.0 + 0.5 * (rng.uniform(-1, 1) * (X - X.mean()) + rng.uniform(-1, 1) * (Y - Y.mean()))
            bump = bump * CompactFunc(grid, tilt)
        f = f + bump
    return f


def random_plateau(grid: Grid, rng, height: float = 1.0, ramp: int | None = None) -> CompactFunc:
    inner = random_region(grid, rng, COMPACT)
    outer = inner.dilate(ramp or ramp_cells(grid, rng)).as_kind(OPEN)
    return CompactFunc.plateau(inner, outer, height)


def random_phi(rng, domain=(-1.0, 1.0), pieces: int | None = None, scale: float = 1.0) -> PhiCurve:
    """Piecewise-linear generator on ``domain`` vanishing at 0, with
    roughly even breakpoints and slopes in ``[-2 scale, 2 scale]``."""
    a, b = float(domain[0]), float(domain[1])
    k = pieces or int(rng.integers(2, 7))
    cuts = np.sort(a + (b - a) * (np.arange(1, k) + rng.uniform(-0.3, 0.3, k - 1)) / k)
    s = np.unique(np.concatenate([[a, b, 0.0], cuts]))
    slopes = scale * rng.uniform(-2.0, 2.0, s.size - 1)
    v = np.concatenate([[0.0], np.cumsum(slopes * np.diff(s))])
    v = v - v[s == 0.0][0]
    return PhiCurve(s, v)


def random_tensorfunc(x_grid: Grid, y_grid: Grid, rng, terms: int | None = None,
                      signed: bool = True) -> TensorFunc:
    """Sum of 1-2 products of plateau bumps with 1-2 cell ramps, which
    keeps the number of distinct sections small."""
    out = []
    for _ in range(terms or int(rng.integers(1, 3))):
        g = random_plateau(x_grid, rng, rng.uniform(0.3, 1.0), int(rng.integers(1, 3)))
        h = random_plateau(y_grid, rng, rng.uniform(0.3, 1.0), int(rng.integers(1, 3)))
        if signed and rng.random() < 0.3:
            h = -h
        out.append((g, h))
    return TensorFunc(tuple(out), x_grid, y_grid)


def random_product_region(x_grid: Grid, y_grid: Grid, rng, kind=OPEN,
                          terms: int | None = None) -> ProductRegion:
    """Union of 1-3 rectangles ``R x S`` built from random regions."""
    kind = Kind.parse(kind)
    out = []
    for _ in range(terms or int(rng.integers(1, 4))):
        out.append((random_region(x_grid, rng, kind), random_region(y_grid, rng, kind)))
    return ProductRegion(tuple(out), kind, x_grid, y_grid)
