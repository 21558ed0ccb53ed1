import numpy as np
import pytest
from hypothesis import given, strategies as st

from qmeas.errors import DomainMismatch, GridMismatch, NotConnected, OutOfDomain
from qmeas.space import (COMPACT, OPEN, CompactFunc, Grid, PhiCurve, PhiFunction, ProductRegion,
                         Region, TensorFunc, compose, unit_square)
from qmeas.space.region import holes, solid_hull


G8 = unit_square(8)
G32 = unit_square(32)


def test_grid_geometry():
    g = Grid((0.0, 2.0), (-1.0, 1.0), 16)
    assert g.hx == 0.125 and g.hy == 0.125 and g.cell_area == 0.125 ** 2 and g.area == 4.0
    assert g.cell_of((0.0, -1.0)) == (0, 0)
    assert g.cell_of((2.0, 1.0)) == (15, 15)      # far edge belongs to the last cell
    assert g.cell_of((0.125, 0.0)) == (1, 8)
    with pytest.raises(OutOfDomain):
        g.cell_of((2.5, 0.0))
    with pytest.raises(ValueError):
        Grid(n=4)


def test_rectangle_rasterization():
    # cell edges at multiples of 1/8: the open rectangle keeps cells inside it,
    # the compact one every cell it meets in positive area
    assert Region.rectangle(G8, 0.25, 0.75, 0.25, 0.75, OPEN).cells == 16
    assert Region.rectangle(G8, 0.25, 0.75, 0.25, 0.75, COMPACT).cells == 16
    assert Region.rectangle(G8, 0.3, 0.7, 0.3, 0.7, OPEN).cells == 4
    assert Region.rectangle(G8, 0.3, 0.7, 0.3, 0.7, COMPACT).cells == 16


def test_connectivity_pairing():
    mask = np.zeros(G8.shape, bool)
    mask[2, 2] = mask[3, 3] = True                 # diagonal neighbours
    assert Region(G8, mask, OPEN).is_connected
    assert len(Region(G8, mask, COMPACT).components()) == 2


def test_holes_and_hull():
    ring = Region.rectangle(G32, 0.2, 0.8, 0.2, 0.8, COMPACT).difference(
        Region.rectangle(G32, 0.4, 0.6, 0.4, 0.6, OPEN).as_kind(OPEN))
    assert len(holes(ring)) == 1
    hull = solid_hull(ring)
    assert hull == Region.rectangle(G32, 0.2, 0.8, 0.2, 0.8, COMPACT)
    with pytest.raises(NotConnected):
        holes(Region.rectangle(G32, 0, 0.2, 0, 0.2, COMPACT) | Region.rectangle(G32, 0.5, 0.7, 0.5, 0.7, COMPACT))


def test_region_algebra_rules():
    a = Region.rectangle(G8, 0, 0.5, 0, 1, OPEN)
    with pytest.raises(ValueError):
        a | a.as_kind(COMPACT)
    with pytest.raises(ValueError):
        a.difference(a)
    with pytest.raises(GridMismatch):
        a | Region.full(G32, OPEN)
    assert a.complement().kind is COMPACT


masks = st.lists(st.booleans(), min_size=64, max_size=64).map(lambda v: np.array(v).reshape(8, 8))


@given(masks, st.sampled_from([OPEN, COMPACT]))
def test_complement_is_an_involution(mask, kind):
    r = Region(G8, mask, kind)
    assert r.complement().complement() == r
    assert r.isdisjoint(r.complement())


@given(masks, st.integers(1, 3))
def test_erode_shrinks_and_dilate_grows(mask, k):
    r = Region(G8, mask, COMPACT)
    assert r.erode(k).issubset(r)
    assert r.issubset(r.dilate(k))


def test_compactfunc_basics():
    x = CompactFunc.coordinate(G8, 0)
    assert x.samples[3, 5] == pytest.approx(3.5 / 8)
    assert x.value_at((0.5, 0.2)) == pytest.approx(0.5)
    f = x - 0.5
    assert f.positive_part().samples.min() == 0 and f.negative_part().samples.min() == 0
    assert np.allclose((f.positive_part() - f.negative_part()).samples, f.samples)
    assert x.lipschitz_step == pytest.approx(1 / 8)
    with pytest.raises(ValueError):
        CompactFunc(G8, np.full(G8.shape, np.nan))


def test_plateau():
    inner = Region.rectangle(G32, 0.4, 0.6, 0.4, 0.6, COMPACT)
    outer = Region.rectangle(G32, 0.2, 0.8, 0.2, 0.8, OPEN)
    p = CompactFunc.plateau(inner, outer, 2.0)
    assert (p.samples[inner.mask] == 2.0).all()
    assert (p.samples[~outer.mask] == 0.0).all()
    assert 0 <= p.min and p.max == 2.0


def test_phi_curves():
    phi = PhiCurve([-1, 0, 1], [-2, 0, 1])
    assert phi(np.array([-0.5, 0.5])).tolist() == [-1.0, 0.5]
    assert phi.lipschitz == 2.0 and phi.is_monotone
    assert not PhiCurve([-1, 0, 1], [1, 0, 1]).is_monotone
    with pytest.raises(ValueError):
        PhiCurve([-1, 0, 1], [1, 1, 1])            # phi(0) != 0
    with pytest.raises(DomainMismatch):
        phi(np.array([2.0]))
    with pytest.raises(ValueError):
        PhiFunction(np.cos, (-1, 1))


@st.composite
def curves(draw):
    m = draw(st.integers(2, 6))
    s = np.linspace(-1, 1, m)
    v = np.array(draw(st.lists(st.floats(-3, 3), min_size=m, max_size=m)))
    return PhiCurve(s, v - np.interp(0.0, s, v))


@given(curves(), curves(), st.lists(st.floats(-1, 1), min_size=1, max_size=20))
def test_curve_sum_and_composition_are_pointwise(p, q, pts):
    s = np.array(pts)
    assert np.allclose((p + q)(s), p(s) + q(s))
    inner = PhiCurve([-1, 0, 1], [-0.5, 0, 0.5])
    assert np.allclose(p.after(inner)(s), p(inner(s)))


def test_compose_keeps_support():
    f = CompactFunc.plateau(Region.rectangle(G32, 0.4, 0.6, 0.4, 0.6, COMPACT),
                            Region.rectangle(G32, 0.3, 0.7, 0.3, 0.7, OPEN))
    g = compose(PhiFunction(lambda s: s + s ** 2, (0, 1)), f)
    assert g.support == f.support
    with pytest.raises(DomainMismatch):
        compose(PhiCurve.identity(-0.5, 0.5), f)


def test_product_regions_and_tensors():
    a = Region.rectangle(G8, 0, 0.5, 0, 1, OPEN)
    b = Region.rectangle(G8, 0.25, 0.75, 0.25, 0.75, OPEN)
    p = ProductRegion.rectangle(a, b)
    x_in, x_out, y_in = (0.1, 0.5), (0.6, 0.5), (0.5, 0.5)
    assert p.contains(x_in, y_in) and not p.contains(x_out, y_in)
    assert p.transpose().contains(y_in, x_in)
    assert p.complement().kind is COMPACT
    whole = ProductRegion.whole(G8, G8)
    assert p.union(whole).contains((0.9, 0.9), (0.9, 0.9))

    g, h = CompactFunc.coordinate(G8, 0), CompactFunc.coordinate(G8, 1)
    t = TensorFunc.tensor(g, h)
    assert t.section_y((0.3, 0.5 + 1 / 16)).samples == pytest.approx((g * (9 / 16)).samples)
    assert t.scale(2.0).sup_norm == pytest.approx(2 * t.sup_norm)
    assert t.transpose().section_x((0.3, 0.5 + 1 / 16)).samples == pytest.approx((g * (9 / 16)).samples)
