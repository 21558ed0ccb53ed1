import numpy as np
import pytest
from hypothesis import given, strategies as st

from qmeas import (COMPACT, OPEN, MeasureSum, PointMass, Region, Scaled, ThreePoint, classify,
                   corrupted, lebesgue, subadditivity_verdict, unit_square, verify_tm_axioms)
from qmeas.errors import DegenerateConfig, GridMismatch
from qmeas.measures import eval_three_point_solid_decomposition
from qmeas.sampling import random_region

G32 = unit_square(32)
G64 = unit_square(64)


def _ring(g, outer, inner):
    big = Region.rectangle(g, *outer, kind=COMPACT)
    return big.difference(Region.rectangle(g, *inner, kind=OPEN))


def test_lebesgue_and_point_mass():
    leb = lebesgue(G32)
    assert leb.eval(Region.rectangle(G32, 0.25, 0.75, 0.25, 0.75)) == pytest.approx(0.25)
    assert leb.total == pytest.approx(1.0) and leb.is_measure
    pm = PointMass(G32, (0.3, 0.6), 2.0)
    assert pm.eval(Region.disk(G32, (0.3, 0.6), 0.1)) == 2.0
    assert pm.eval(Region.disk(G32, (0.7, 0.6), 0.1)) == 0.0
    assert pm.point_mass == (G32.cell_of((0.3, 0.6)), 2.0)


def test_three_point_hand_values():
    # points at (0.25, 0.5), (0.75, 0.5), (0.5, 0.875)
    m = ThreePoint(G64)
    assert m.eval(Region.rectangle(G64, 0.1, 0.9, 0.4, 0.6)) == 1.0            # two points, solid
    assert m.eval(Region.rectangle(G64, 0.1, 0.4, 0.4, 0.6)) == 0.0            # one point
    # ring through p3 around a hole holding p1 and p2: hull 1 minus hole 1
    assert m.eval(_ring(G64, (0.05, 0.95, 0.05, 0.95), (0.15, 0.85, 0.3, 0.7))) == 0.0
    # ring through p2 and p3 around a hole holding only p1: hull 1 minus hole 0
    assert m.eval(_ring(G64, (0.05, 0.95, 0.05, 0.95), (0.15, 0.35, 0.3, 0.7))) == 1.0
    # two disjoint pieces, each with one point
    two = Region.disk(G64, (0.25, 0.5), 0.1) | Region.disk(G64, (0.75, 0.5), 0.1)
    assert m.eval(two) == 0.0
    assert m.eval(two.complement()) == 1.0


def test_three_point_rejects_shared_cells():
    with pytest.raises(DegenerateConfig):
        ThreePoint(unit_square(8), ((0.1, 0.1), (0.11, 0.11), (0.9, 0.9)))


def test_tree_median_matches_solid_decomposition():
    m = ThreePoint(G64)
    rng = np.random.default_rng(3)
    for t in range(200):
        r = random_region(G64, rng, (OPEN, COMPACT)[t % 2])
        assert m.eval(r) == eval_three_point_solid_decomposition(m, r)


@pytest.mark.parametrize("make", [
    lambda g: lebesgue(g),
    lambda g: PointMass(g, (0.3, 0.6)),
    lambda g: ThreePoint(g),
    lambda g: Scaled(2.0, ThreePoint(g)),
    lambda g: MeasureSum((lebesgue(g), ThreePoint(g))),
], ids=["lebesgue", "point-mass", "three-point", "scaled", "sum"])
def test_axioms_hold_for_each_variant(make):
    v = verify_tm_axioms(make(G64), trials=24, rng_seed=5)
    assert v.holds, v.conclusion


def test_corrupted_measure_fails_tm1():
    v = verify_tm_axioms(corrupted(lebesgue(G32), (16, 16), -0.05), trials=40, rng_seed=0)
    assert not v.holds and v.conclusion.startswith("Fail")
    assert v.witness is not None


def test_subadditivity_witness():
    v = subadditivity_verdict(ThreePoint(G64), trials=100, rng_seed=0)
    assert not v.holds
    ua, ub, uab = v.witness["values"]
    assert uab > ua + ub
    assert subadditivity_verdict(lebesgue(G64), trials=40).holds


def test_classification():
    assert str(classify(ThreePoint(G32), 40, 1)) == "Simple"
    assert str(classify(Scaled(2.0, ThreePoint(G32)), 40, 1)) == "AlmostSimple(2)"
    pm = classify(PointMass(G32, (0.3, 0.6), 3.0), 40, 1)
    assert str(pm) == "AlmostSimple(3)" and pm.is_measure
    assert classify(lebesgue(G32), 40, 1).label == "Measure"


def test_grid_mismatch():
    with pytest.raises(GridMismatch):
        lebesgue(G32).eval(Region.full(G64))


masks = st.lists(st.booleans(), min_size=256, max_size=256).map(lambda v: np.array(v).reshape(16, 16))
G16 = unit_square(16)
TP16 = ThreePoint(G16)


@given(masks, st.sampled_from([OPEN, COMPACT]))
def test_three_point_complement_identity(mask, kind):
    r = Region(G16, mask, kind)
    assert TP16.eval(r) + TP16.eval(r.complement()) == 1.0
    assert TP16.eval(r) == eval_three_point_solid_decomposition(TP16, r)


@given(masks, masks, st.sampled_from([OPEN, COMPACT]))
def test_three_point_is_monotone(a, b, kind):
    small, big = Region(G16, a & b, kind), Region(G16, a | b, kind)
    assert TP16.eval(small) <= TP16.eval(big)


@given(masks, st.floats(0.1, 5.0))
def test_scaling_is_linear(mask, c):
    r = Region(G16, mask, OPEN)
    assert Scaled(c, TP16).eval(r) == pytest.approx(c * TP16.eval(r))


def test_distribution_values_match_direct_evaluation():
    m = ThreePoint(G32)
    X, Y = G32.centers()
    samples = np.maximum(0.0, 0.4 - np.hypot(X - 0.5, Y - 0.55))
    ts = np.linspace(-0.05, 0.45, 41)
    for kind in (OPEN, COMPACT):
        fast = m.distribution_values(samples, ts, kind)
        slow = [m.eval(Region(G32, samples > t, kind)) for t in ts]
        assert fast.tolist() == slow
