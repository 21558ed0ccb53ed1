"""Sampled functions on a grid and the generators that act on them."""

from __future__ import annotations

import functools
from dataclasses import dataclass

import numpy as np
from scipy import ndimage

from ..errors import DomainMismatch, GridMismatch
from .grid import Grid
from .region import COMPACT, OPEN, Region

_DOMAIN_SLACK = 1e-12


def _frozen(values) -> np.ndarray:
    out = np.array(values, dtype=float, copy=True)
    out.setflags(write=False)
    return out


@dataclass(frozen=True, eq=False)
class CompactFunc:
    """A continuous function sampled at cell centers.

    Between centers the function is the bilinear interpolant of the
    samples (see :meth:`value_at`); all integrals only look at samples.
    """

    grid: Grid
    samples: np.ndarray

    def __post_init__(self):
        samples = _frozen(self.samples)
        if samples.shape != self.grid.shape:
            raise ValueError(f"samples shape {samples.shape} does not match grid {self.grid.shape}")
        if not np.isfinite(samples).all():
            raise ValueError("samples must be finite")
        object.__setattr__(self, "samples", samples)

    # -- construction -------------------------------------------------

    @classmethod
    def zeros(cls, grid: Grid) -> "CompactFunc":
        return cls(grid, np.zeros(grid.shape))

    @classmethod
    def from_callable(cls, grid: Grid, fn) -> "CompactFunc":
        X, Y = grid.centers()
        return cls(grid, np.broadcast_to(fn(X, Y), grid.shape))

    @classmethod
    def coordinate(cls, grid: Grid, axis: int = 0) -> "CompactFunc":
        """``f(x, y) = x`` (axis 0) or ``y`` (axis 1)."""
        return cls(grid, grid.centers()[axis])

    @classmethod
    def plateau(cls, inner: Region, outer: Region, height: float = 1.0) -> "CompactFunc":
        """Equal to ``height`` on ``inner``, zero off ``outer``, and a
        distance-weighted ramp in between."""
        grid = outer.grid
        if inner.grid != grid:
            raise GridMismatch("plateau pieces live on different grids")
        inner_mask = inner.mask & outer.mask
        if not inner_mask.any():
            return cls.zeros(grid)
        if outer.mask.all():
            d_out = np.full(grid.shape, np.inf)
        else:
            d_out = ndimage.distance_transform_edt(outer.mask)
        d_in = ndimage.distance_transform_edt(~inner_mask)
        with np.errstate(invalid="ignore", divide="ignore"):
            ramp = np.where(np.isinf(d_out), 1.0, d_out / (d_out + d_in))
        values = np.where(inner_mask, 1.0, np.where(outer.mask, ramp, 0.0))
        return cls(grid, height * values)

    # -- derived quantities -------------------------------------------

    @functools.cached_property
    def sup_norm(self) -> float:
        return float(np.abs(self.samples).max())

    @functools.cached_property
    def support(self) -> Region:
        return Region(self.grid, self.samples != 0, COMPACT)

    @property
    def min(self) -> float:
        return float(self.samples.min())

    @property
    def max(self) -> float:
        return float(self.samples.max())

    @functools.cached_property
    def lipschitz_step(self) -> float:
        """Largest jump between edge-adjacent cells, i.e. ``Lip(f) * h``."""
        s = self.samples
        return float(max(np.abs(np.diff(s, axis=0)).max(), np.abs(np.diff(s, axis=1)).max()))

    @property
    def is_zero(self) -> bool:
        return not self.samples.any()

    @property
    def is_nonnegative(self) -> bool:
        return bool((self.samples >= 0).all())

    def positive_part(self) -> "CompactFunc":
        return CompactFunc(self.grid, np.maximum(self.samples, 0.0))

    def negative_part(self) -> "CompactFunc":
        return CompactFunc(self.grid, np.maximum(-self.samples, 0.0))

    def cell_value(self, point) -> float:
        return float(self.samples[self.grid.cell_of(point)])

    def value_at(self, point) -> float:
        """Bilinear interpolation between cell centers, constant past the
        outermost centers."""
        g = self.grid
        x, y = point
        u = np.clip((x - g.x_range[0]) / g.hx - 0.5, 0, g.n - 1)
        v = np.clip((y - g.y_range[0]) / g.hy - 0.5, 0, g.n - 1)
        i, j = min(int(u), g.n - 2), min(int(v), g.n - 2)
        a, b = u - i, v - j
        s = self.samples
        return float((1 - a) * (1 - b) * s[i, j] + a * (1 - b) * s[i + 1, j]
                     + (1 - a) * b * s[i, j + 1] + a * b * s[i + 1, j + 1])

    # -- arithmetic ---------------------------------------------------

    def _coerce(self, other) -> np.ndarray:
        if isinstance(other, CompactFunc):
            if other.grid != self.grid:
                raise GridMismatch("functions live on different grids")
            return other.samples
        return np.asarray(float(other))

    def __add__(self, other):
        return CompactFunc(self.grid, self.samples + self._coerce(other))

    def __sub__(self, other):
        return CompactFunc(self.grid, self.samples - self._coerce(other))

    def __mul__(self, other):
        return CompactFunc(self.grid, self.samples * self._coerce(other))

    __rmul__ = __mul__
    __radd__ = __add__

    def __truediv__(self, scalar):
        return CompactFunc(self.grid, self.samples / float(scalar))

    def __neg__(self):
        return CompactFunc(self.grid, -self.samples)

    def __repr__(self):
        return f"CompactFunc(n={self.grid.n}, range=[{self.min:.4g}, {self.max:.4g}])"


def superlevel(f: CompactFunc, t: float) -> Region:
    """The open set ``{f > t}``."""
    return Region(f.grid, f.samples > t, OPEN)


# -- generators ---------------------------------------------------------


class Phi:
    """A continuous map on an interval ``[a, b]`` with ``phi(0) = 0``.

    Subclasses provide :meth:`_apply`; generators compose, add and
    multiply pointwise.
    """

    domain: tuple[float, float]

    def _apply(self, s: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    @property
    def lipschitz(self) -> float:
        a, b = self.domain
        s = np.linspace(a, b, 4097)
        v = self._apply(s)
        return float(np.abs(np.diff(v) / np.diff(s)).max())

    @property
    def is_monotone(self) -> bool:
        a, b = self.domain
        d = np.diff(self._apply(np.linspace(a, b, 4097)))
        return bool((d >= 0).all() or (d <= 0).all())

    def covers(self, lo: float, hi: float) -> bool:
        a, b = self.domain
        slack = _DOMAIN_SLACK * max(1.0, b - a)
        return a - slack <= lo and hi <= b + slack

    def __call__(self, s):
        s = np.asarray(s, dtype=float)
        if s.size and not self.covers(float(s.min()), float(s.max())):
            raise DomainMismatch(
                f"values in [{s.min():.6g}, {s.max():.6g}] leave domain {self.domain}")
        a, b = self.domain
        return self._apply(np.clip(s, a, b))

    def __add__(self, other: "Phi") -> "Phi":
        return PhiFunction(lambda s, p=self, q=other: p._apply(s) + q._apply(s),
                           _meet(self.domain, other.domain))

    def __mul__(self, other) -> "Phi":
        if isinstance(other, Phi):
            return PhiFunction(lambda s, p=self, q=other: p._apply(s) * q._apply(s),
                               _meet(self.domain, other.domain))
        c = float(other)
        return PhiFunction(lambda s, p=self: c * p._apply(s), self.domain)

    __rmul__ = __mul__

    def after(self, inner: "Phi") -> "Phi":
        """``self o inner``."""
        return PhiFunction(lambda s, p=self, q=inner: p._apply(np.clip(q._apply(s), *p.domain)),
                           inner.domain)


def _meet(d1, d2):
    a, b = max(d1[0], d2[0]), min(d1[1], d2[1])
    if not a <= 0 <= b:
        raise DomainMismatch(f"domains {d1} and {d2} do not overlap around 0")
    return (a, b)


class PhiFunction(Phi):
    """Wraps a vectorized callable, e.g. ``np.square``."""

    def __init__(self, fn, domain):
        a, b = float(domain[0]), float(domain[1])
        if not a <= 0 <= b or a == b:
            raise ValueError(f"domain {domain} must be a proper interval containing 0")
        self.fn = fn
        self.domain = (a, b)
        at0 = float(np.asarray(fn(np.zeros(1)))[0])
        if abs(at0) > 1e-12:
            raise ValueError(f"generator must vanish at 0, got phi(0) = {at0}")

    def _apply(self, s):
        return np.asarray(self.fn(s), dtype=float)

    def __repr__(self):
        return f"PhiFunction({getattr(self.fn, '__name__', 'fn')}, {self.domain})"


class PhiCurve(Phi):
    """Continuous piecewise-linear generator given by its breakpoints.

    Sums and compositions of curves are again curves, computed on the
    merged breakpoint sets.
    """

    def __init__(self, s, v):
        s = np.array(s, dtype=float)
        v = np.array(v, dtype=float)
        if s.ndim != 1 or s.shape != v.shape or s.size < 2:
            raise ValueError("need matching 1-d breakpoint arrays of length >= 2")
        if not (np.diff(s) > 0).all():
            raise ValueError("breakpoints must be strictly increasing")
        if not s[0] <= 0 <= s[-1]:
            raise ValueError(f"domain [{s[0]}, {s[-1]}] must contain 0")
        at0 = float(np.interp(0.0, s, v))
        if abs(at0) > 1e-12 * max(1.0, np.abs(v).max()):
            raise ValueError(f"generator must vanish at 0, got phi(0) = {at0}")
        s.setflags(write=False)
        v.setflags(write=False)
        self.s, self.v = s, v
        self.domain = (float(s[0]), float(s[-1]))

    @classmethod
    def identity(cls, a=-1.0, b=1.0) -> "PhiCurve":
        s = np.union1d([a, b], [0.0])
        return cls(s, s)

    @classmethod
    def from_function(cls, fn, a, b, pieces=256) -> "PhiCurve":
        s = np.union1d(np.linspace(a, b, pieces + 1), [0.0])
        v = np.asarray(fn(s), dtype=float)
        v = v - float(np.interp(0.0, s, v))
        return cls(s, v)

    @classmethod
    def zero(cls, a=-1.0, b=1.0) -> "PhiCurve":
        s = np.union1d([a, b], [0.0])
        return cls(s, np.zeros_like(s))

    def _apply(self, s):
        return np.interp(s, self.s, self.v)

    @property
    def lipschitz(self) -> float:
        return float(np.abs(np.diff(self.v) / np.diff(self.s)).max())

    @property
    def is_monotone(self) -> bool:
        d = np.diff(self.v)
        return bool((d >= 0).all() or (d <= 0).all())

    def __add__(self, other):
        if not isinstance(other, PhiCurve):
            return super().__add__(other)
        a, b = _meet(self.domain, other.domain)
        s = np.union1d(self.s, other.s)
        s = s[(s >= a) & (s <= b)]
        return PhiCurve(s, self._apply(s) + other._apply(s))

    def __mul__(self, other):
        if isinstance(other, Phi):
            return super().__mul__(other)
        return PhiCurve(self.s, float(other) * self.v)

    __rmul__ = __mul__

    def __neg__(self):
        return PhiCurve(self.s, -self.v)

    def after(self, inner: Phi) -> Phi:
        if not isinstance(inner, PhiCurve):
            return super().after(inner)
        lo, hi = float(inner.v.min()), float(inner.v.max())
        if not self.covers(lo, hi):
            raise DomainMismatch(f"inner range [{lo}, {hi}] leaves domain {self.domain}")
        points = [inner.s]
        for k in range(inner.s.size - 1):
            s0, s1 = inner.s[k], inner.s[k + 1]
            v0, v1 = inner.v[k], inner.v[k + 1]
            if v0 == v1:
                continue
            lo_v, hi_v = min(v0, v1), max(v0, v1)
            hits = self.s[(self.s > lo_v) & (self.s < hi_v)]
            points.append(s0 + (hits - v0) * (s1 - s0) / (v1 - v0))
        s = np.unique(np.concatenate(points))
        return PhiCurve(s, self._apply(np.clip(inner._apply(s), *self.domain)))

    def __repr__(self):
        return f"PhiCurve({self.s.size} breakpoints on {self.domain})"


def compose(phi: Phi, f: CompactFunc) -> CompactFunc:
    """Cellwise ``phi o f``; stays in the subalgebra generated by ``f``."""
    if f.samples.size and not phi.covers(f.min, f.max):
        raise DomainMismatch(f"range [{f.min:.6g}, {f.max:.6g}] leaves domain {phi.domain}")
    out = phi(f.samples)
    # phi(0) = 0 keeps the support inside supp f
    return CompactFunc(f.grid, np.where(f.samples == 0, 0.0, out))
