"""Discretized ambient spaces, regions and compactly supported functions."""

from .functions import CompactFunc, Phi, PhiCurve, PhiFunction, compose, superlevel
from .grid import Grid, unit_square
from .product import ProductRegion, SectionProfile, TensorFunc
from .region import COMPACT, OPEN, Kind, Region, complement, components, holes, solid_hull


def section_y(a: ProductRegion, y) -> Region:
    return a.section_y(y)


def section_x(a: ProductRegion, x) -> Region:
    return a.section_x(x)


__all__ = [
    "COMPACT", "OPEN", "CompactFunc", "Grid", "Kind", "Phi", "PhiCurve", "PhiFunction",
    "ProductRegion", "Region", "SectionProfile", "TensorFunc", "complement", "components",
    "compose", "holes", "section_x", "section_y", "solid_hull", "superlevel", "unit_square",
]
