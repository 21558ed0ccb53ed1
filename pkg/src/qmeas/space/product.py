"""Sets and functions on a product of two grids, kept symbolic.

A :class:`ProductRegion` is a finite union of rectangles ``R x S`` and a
:class:`TensorFunc` a finite sum ``sum_i g_i (x) h_i``, optionally passed
through a generator.  Sections are therefore exact and nothing of size
``n**4`` is ever stored.
"""

from __future__ import annotations

import functools
import itertools
from dataclasses import dataclass, field

import numpy as np

from ..errors import GridMismatch, OutOfDomain
from .functions import CompactFunc, Phi, compose
from .grid import Grid
from .region import COMPACT, OPEN, Kind, Region


@dataclass(frozen=True, eq=False)
class ProductRegion:
    """``union_i rx_i x ry_i`` with every factor of the same kind."""

    terms: tuple
    kind: Kind
    x_grid: Grid
    y_grid: Grid

    def __post_init__(self):
        kind = Kind.parse(self.kind)
        terms = tuple((rx, ry) for rx, ry in self.terms if not (rx.is_empty or ry.is_empty))
        for rx, ry in terms:
            if rx.grid != self.x_grid or ry.grid != self.y_grid:
                raise GridMismatch("product term factors live on the wrong grids")
            if rx.kind is not kind or ry.kind is not kind:
                raise ValueError(f"every factor of a {kind.value} product region must be {kind.value}")
        object.__setattr__(self, "kind", kind)
        object.__setattr__(self, "terms", terms)

    @classmethod
    def rectangle(cls, rx: Region, ry: Region) -> "ProductRegion":
        if rx.kind is not ry.kind:
            raise ValueError("rectangle factors must share a kind")
        return cls(((rx, ry),), rx.kind, rx.grid, ry.grid)

    @classmethod
    def from_terms(cls, terms, kind=None) -> "ProductRegion":
        terms = list(terms)
        if not terms:
            raise ValueError("need at least one term to infer grids")
        kind = Kind.parse(kind) if kind is not None else terms[0][0].kind
        return cls(tuple(terms), kind, terms[0][0].grid, terms[0][1].grid)

    @classmethod
    def whole(cls, x_grid: Grid, y_grid: Grid, kind=OPEN) -> "ProductRegion":
        return cls(((Region.full(x_grid, kind), Region.full(y_grid, kind)),), kind, x_grid, y_grid)

    @classmethod
    def empty(cls, x_grid: Grid, y_grid: Grid, kind=OPEN) -> "ProductRegion":
        return cls((), kind, x_grid, y_grid)

    # -- algebra ------------------------------------------------------

    def _check(self, other: "ProductRegion"):
        if self.x_grid != other.x_grid or self.y_grid != other.y_grid:
            raise GridMismatch("product regions live on different grids")

    def union(self, other: "ProductRegion") -> "ProductRegion":
        self._check(other)
        if other.kind is not self.kind:
            raise ValueError("union needs product regions of one kind")
        return ProductRegion(self.terms + other.terms, self.kind, self.x_grid, self.y_grid)

    def intersection(self, other: "ProductRegion") -> "ProductRegion":
        self._check(other)
        if other.kind is not self.kind:
            raise ValueError("intersection needs product regions of one kind")
        terms = [(a & c, b & d) for (a, b), (c, d) in itertools.product(self.terms, other.terms)]
        return ProductRegion(tuple(terms), self.kind, self.x_grid, self.y_grid)

    def complement(self) -> "ProductRegion":
        """Exact complement in ``X x Y`` as a union of at most ``2**k``
        rectangles: the complement of ``U_i x W_i`` is
        ``(U_i^c x Y) | (X x W_i^c)``, distributed over the intersection."""
        kind = self.kind.opposite
        full_x = Region.full(self.x_grid, kind)
        full_y = Region.full(self.y_grid, kind)
        cx = [rx.complement() for rx, _ in self.terms]
        cy = [ry.complement() for _, ry in self.terms]
        terms = []
        for choice in itertools.product((0, 1), repeat=len(self.terms)):
            rx, ry = full_x, full_y
            for i, c in enumerate(choice):
                if c:
                    rx = rx & cx[i]
                else:
                    ry = ry & cy[i]
                if rx.is_empty or ry.is_empty:
                    break
            else:
                terms.append((rx, ry))
        return ProductRegion(tuple(_dedupe(terms)), kind, self.x_grid, self.y_grid)

    def difference(self, other: "ProductRegion") -> "ProductRegion":
        """``self \\ other`` for ``other`` of the opposite kind."""
        if other.kind is self.kind:
            raise ValueError("difference needs product regions of opposite kinds")
        return self.intersection(other.complement())

    def transpose(self) -> "ProductRegion":
        """The same set viewed in ``Y x X``."""
        return ProductRegion(tuple((ry, rx) for rx, ry in self.terms), self.kind,
                             self.y_grid, self.x_grid)

    # -- sections -----------------------------------------------------

    def section_y_cell(self, j) -> Region:
        mask = np.zeros(self.x_grid.shape, bool)
        for rx, ry in self.terms:
            if ry.mask[j]:
                mask |= rx.mask
        return Region(self.x_grid, mask, self.kind)

    def section_y(self, y) -> Region:
        """``A_y = {x : (x, y) in A}`` for a point ``y`` of the Y-grid."""
        if not self.y_grid.contains(y):
            raise OutOfDomain(f"{tuple(y)} is outside the Y rectangle")
        return self.section_y_cell(self.y_grid.cell_of(y))

    def section_x(self, x) -> Region:
        """``A_x = {y : (x, y) in A}``."""
        return self.transpose().section_y(x)

    def contains(self, x, y) -> bool:
        return self.section_y(y).contains_point(x)

    @functools.cached_property
    def y_profile(self) -> "SectionProfile":
        return SectionProfile.of(self)

    def __repr__(self):
        return f"ProductRegion({self.kind.value}, {len(self.terms)} terms)"


def _dedupe(terms):
    seen, out = set(), []
    for rx, ry in terms:
        key = (hash(rx), hash(ry))
        if key not in seen:
            seen.add(key)
            out.append((rx, ry))
    return out


@dataclass(frozen=True, eq=False)
class SectionProfile:
    """Partition of the Y-cells by which terms they belong to.

    Cells with the same membership pattern induce the same section
    ``A_y``, so each distinct section is evaluated once.
    """

    region: ProductRegion
    patterns: np.ndarray      # (classes, terms) bool
    labels: np.ndarray        # Y-grid shape, class index per cell
    sections: tuple = field(repr=False)

    @classmethod
    def of(cls, a: ProductRegion) -> "SectionProfile":
        k = len(a.terms)
        shape = a.y_grid.shape
        if k == 0:
            patterns = np.zeros((1, 0), bool)
            labels = np.zeros(shape, int)
        else:
            member = np.stack([ry.mask.ravel() for _, ry in a.terms], axis=1)
            patterns, inverse = np.unique(member, axis=0, return_inverse=True)
            labels = inverse.reshape(shape)
        sections = []
        for pattern in patterns:
            mask = np.zeros(a.x_grid.shape, bool)
            for bit, (rx, _) in zip(pattern, a.terms):
                if bit:
                    mask |= rx.mask
            sections.append(Region(a.x_grid, mask, a.kind))
        return cls(a, patterns, labels, tuple(sections))

    def __len__(self):
        return len(self.sections)

    def cells(self, index: int) -> np.ndarray:
        return self.labels == index

    def where(self, predicate) -> Region:
        """Y-region of the cells whose section satisfies ``predicate``."""
        keep = np.array([bool(predicate(s)) for s in self.sections])
        return Region(self.region.y_grid, keep[self.labels], self.region.kind)


@dataclass(frozen=True, eq=False)
class TensorFunc:
    """``outer o sum_i g_i (x) h_i`` with ``outer`` the identity when None."""

    terms: tuple
    x_grid: Grid
    y_grid: Grid
    outer: Phi | None = None

    def __post_init__(self):
        terms = tuple((g, h) for g, h in self.terms)
        for g, h in terms:
            if g.grid != self.x_grid or h.grid != self.y_grid:
                raise GridMismatch("tensor factors live on the wrong grids")
        object.__setattr__(self, "terms", terms)

    @classmethod
    def tensor(cls, g: CompactFunc, h: CompactFunc) -> "TensorFunc":
        """``(g (x) h)(x, y) = g(x) h(y)``."""
        return cls(((g, h),), g.grid, h.grid)

    @classmethod
    def from_terms(cls, terms) -> "TensorFunc":
        terms = list(terms)
        return cls(tuple(terms), terms[0][0].grid, terms[0][1].grid)

    @classmethod
    def zeros(cls, x_grid: Grid, y_grid: Grid) -> "TensorFunc":
        return cls((), x_grid, y_grid)

    def __add__(self, other: "TensorFunc") -> "TensorFunc":
        if self.outer is not None or other.outer is not None:
            raise ValueError("only plain tensor sums can be added termwise")
        if (self.x_grid, self.y_grid) != (other.x_grid, other.y_grid):
            raise GridMismatch("tensor functions live on different grids")
        return TensorFunc(self.terms + other.terms, self.x_grid, self.y_grid)

    def scale(self, c: float) -> "TensorFunc":
        if self.outer is not None:
            return TensorFunc(self.terms, self.x_grid, self.y_grid, c * self.outer)
        return TensorFunc(tuple((c * g, h) for g, h in self.terms), self.x_grid, self.y_grid)

    def compose(self, phi: Phi) -> "TensorFunc":
        outer = phi if self.outer is None else phi.after(self.outer)
        return TensorFunc(self.terms, self.x_grid, self.y_grid, outer)

    def transpose(self) -> "TensorFunc":
        """``(x, y) -> f(y, x)`` as a function on ``Y x X``."""
        return TensorFunc(tuple((h, g) for g, h in self.terms), self.y_grid, self.x_grid, self.outer)

    # -- sections -----------------------------------------------------

    @functools.cached_property
    def _y_coefficients(self):
        """Distinct rows ``(h_1(y), ..., h_m(y))`` and the row index per Y-cell."""
        if not self.terms:
            return np.zeros((1, 0)), np.zeros(self.y_grid.shape, int)
        coeff = np.stack([h.samples.ravel() for _, h in self.terms], axis=1)
        rows, inverse = np.unique(coeff, axis=0, return_inverse=True)
        return rows, inverse.reshape(self.y_grid.shape)

    def _section_from(self, coefficients) -> CompactFunc:
        acc = np.zeros(self.x_grid.shape)
        for c, (g, _) in zip(coefficients, self.terms):
            if c != 0:
                acc = acc + c * g.samples
        base = CompactFunc(self.x_grid, acc)
        return base if self.outer is None else compose(self.outer, base)

    def section_y_cell(self, j) -> CompactFunc:
        return self._section_from([h.samples[j] for _, h in self.terms])

    def section_y(self, y) -> CompactFunc:
        """``f_y = sum_i h_i(y) g_i`` (then the generator) on X."""
        return self.section_y_cell(self.y_grid.cell_of(y))

    def section_x(self, x) -> CompactFunc:
        return self.transpose().section_y(x)

    def y_sections(self):
        """``(sections, labels)``: each distinct section once, plus the
        index of the section owned by every Y-cell."""
        rows, labels = self._y_coefficients
        return [self._section_from(r) for r in rows], labels

    @functools.cached_property
    def sup_norm(self) -> float:
        sections, _ = self.y_sections()
        return max((s.sup_norm for s in sections), default=0.0)

    def base_range(self) -> tuple[float, float]:
        """Range of the tensor sum before the generator is applied."""
        plain = TensorFunc(self.terms, self.x_grid, self.y_grid)
        sections, _ = plain.y_sections()
        return (min(s.min for s in sections), max(s.max for s in sections))

    def x_support(self) -> Region:
        """``pi_1(supp f)`` over-approximated by the union of the ``supp g_i``."""
        mask = np.zeros(self.x_grid.shape, bool)
        for g, h in self.terms:
            if not h.is_zero:
                mask |= g.samples != 0
        return Region(self.x_grid, mask, COMPACT)

    def y_support(self) -> Region:
        return self.transpose().x_support()

    def __repr__(self):
        tag = "" if self.outer is None else f", outer={self.outer!r}"
        return f"TensorFunc({len(self.terms)} terms{tag})"
