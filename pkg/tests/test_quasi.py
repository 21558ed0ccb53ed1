import pickle

import numpy as np
import pytest
from hypothesis import given, strategies as st
from hypothesis.extra.numpy import arrays

from qmeas import (COMPACT, OPEN, CompactFunc, PhiCurve, PhiFunction, PointMass, QuasiFunctional,
                   Region, Scaled, ThreePoint, almost_simple_verdict, compose, continuity_check,
                   integrate_generator, lebesgue, quasi_integral, recover_compact, recover_open,
                   simplicity_verdict, unit_square)
from qmeas.errors import DomainMismatch
from qmeas.quasi import connectivity_error, distribution, estimate, qi2_residual, saddle_intervals
from qmeas.sampling import random_function, random_phi

G32 = unit_square(32)
G64 = unit_square(64)


def _cone(g, center, height=0.6):
    X, Y = g.centers()
    return CompactFunc(g, np.maximum(0.0, height - np.hypot(X - center[0], Y - center[1])))


def test_lebesgue_moments_match_midpoint_sums():
    n = 64
    q = QuasiFunctional(lebesgue(unit_square(n)), 512)
    x = CompactFunc.coordinate(q.grid, 0)
    # midpoint rule: mean of (i + 1/2)/n is 1/2, mean of its square is 1/3 - 1/(12 n^2)
    assert abs(quasi_integral(q, x) - 0.5) <= q.tolerance_for(x)
    sq = compose(PhiFunction(np.square, (0.0, 1.0)), x)
    assert abs(quasi_integral(q, sq) - (1 / 3 - 1 / (12 * n * n))) <= q.tolerance_for(sq)


def test_lebesgue_matches_riemann_sum():
    q = QuasiFunctional(lebesgue(G64), 256)
    rng = np.random.default_rng(2)
    for _ in range(10):
        f = random_function(G64, rng, signed=True)
        riemann = float(f.samples.sum() * G64.cell_area)
        assert abs(quasi_integral(q, f) - riemann) <= q.tolerance_for(f)


def test_point_mass_reads_the_atom():
    pm = PointMass(G32, (0.3, 0.6), 2.5)
    q = QuasiFunctional(pm, 256)
    f = _cone(G32, (0.4, 0.5))
    assert quasi_integral(q, f) == pytest.approx(2.5 * f.cell_value((0.3, 0.6)), abs=q.tolerance_for(f))


def test_three_point_takes_the_median_on_unimodal_functions():
    # superlevel sets of a cone are disks, so rho(f) is the median of f at the points
    m = ThreePoint(G64)
    q = QuasiFunctional(m, 512)
    for center in [(0.3, 0.5), (0.6, 0.7), (0.5, 0.2), (0.9, 0.9)]:
        f = _cone(G64, center)
        expected = float(np.median([f.samples[c] for c in m.cells]))
        assert abs(quasi_integral(q, f) - expected) <= q.tolerance_for(f)


def test_distribution_is_antitone():
    q = QuasiFunctional(ThreePoint(G64), 256)
    f = random_function(G64, np.random.default_rng(4), signed=True)
    d = distribution(q, f)
    assert d.is_antitone()
    assert d.values[-1] == 0


def test_saddle_intervals_on_a_checkerboard_block():
    s = np.array([[0.9, 0.1], [0.2, 0.8]])
    lo, hi = saddle_intervals(s)
    assert lo.tolist() == [0.2] and hi.tolist() == [0.8]


def test_connectivity_error_matches_brute_force():
    rng = np.random.default_rng(11)
    q = QuasiFunctional(ThreePoint(G32), 128)
    for _ in range(20):
        f = random_function(G32, rng, signed=bool(rng.integers(2)))
        f = CompactFunc(G32, f.samples + 0.05 * rng.standard_normal(G32.shape) * (f.samples != 0))
        vals = np.unique(f.samples)
        fo = q.mu.distribution_values(f.samples, vals[:-1], OPEN)
        fc = q.mu.distribution_values(f.samples, vals[:-1], COMPACT)
        brute = float(np.dot(np.abs(fo - fc), np.diff(vals)))
        assert connectivity_error(q, f) == pytest.approx(brute, abs=1e-12)


def test_generator_representation():
    rng = np.random.default_rng(8)
    for mu in (lebesgue(G64), ThreePoint(G64), PointMass(G64, (0.3, 0.6))):
        q = QuasiFunctional(mu, 512)
        for t in range(6):
            f = random_function(G64, rng, signed=bool(t % 2))
            phi = random_phi(rng, (min(f.min, 0.0), max(f.max, 0.0)))
            fp = compose(phi, f)
            assert abs(integrate_generator(q, f, phi) - quasi_integral(q, fp)) <= \
                q.generator_tolerance(f, phi, fp)


def test_generator_domain_is_checked():
    q = QuasiFunctional(lebesgue(G32), 64)
    with pytest.raises(DomainMismatch):
        integrate_generator(q, CompactFunc.coordinate(G32, 0), PhiCurve.identity(-0.2, 0.2))


def test_qi2_on_three_point():
    q = QuasiFunctional(ThreePoint(G64), 512)
    rng = np.random.default_rng(5)
    for _ in range(5):
        f = random_function(G64, rng, signed=True)
        dom = (min(f.min, 0.0), max(f.max, 0.0))
        res, tol = qi2_residual(q, f, random_phi(rng, dom), random_phi(rng, dom))
        assert res <= tol


def test_recovery_brackets_the_measure():
    q = QuasiFunctional(lebesgue(G64), 256)
    u = Region.disk(G64, (0.5, 0.5), 0.3, OPEN)
    k = Region.disk(G64, (0.5, 0.5), 0.3, COMPACT)
    assert recover_open(q, u) <= q.mu.eval(u) + 1e-12
    assert recover_compact(q, k) >= q.mu.eval(k) - 1e-12
    assert abs(recover_open(q, u) - q.mu.eval(u)) < 0.05


def test_simplicity_classifier():
    assert simplicity_verdict(QuasiFunctional(ThreePoint(G64), 256), trials=8, rng_seed=1).holds
    v = simplicity_verdict(QuasiFunctional(lebesgue(G64), 256), trials=8, rng_seed=1)
    assert not v.holds and v.witness["condition"] in ("concentration", "commutation", "multiplicativity")


def test_almost_simple_classifier():
    assert almost_simple_verdict(QuasiFunctional(Scaled(2.0, ThreePoint(G64)), 256), 10, 0).holds
    assert not almost_simple_verdict(QuasiFunctional(lebesgue(G64), 256), 10, 0).holds


def test_continuity_bound():
    q = QuasiFunctional(ThreePoint(G64), 256)
    rng = np.random.default_rng(9)
    for t in range(6):
        f = random_function(G64, rng, signed=bool(t % 2))
        g = f + 0.1 * random_function(G64, rng, signed=bool(t % 2))
        assert continuity_check(q, f, g).holds


def test_estimate_cache_is_dropped_on_pickle():
    q = QuasiFunctional(lebesgue(G32), 64)
    f = CompactFunc.coordinate(G32, 0)
    estimate(q, f)
    assert len(q._cache) == 1
    clone = pickle.loads(pickle.dumps(q))
    assert len(clone._cache) == 0 and clone(f) == q(f)


Q8 = QuasiFunctional(ThreePoint(unit_square(8)), 64)
fields = arrays(float, (8, 8), elements=st.floats(-1, 1)).map(lambda a: CompactFunc(Q8.grid, a))


@given(fields, st.floats(0.1, 4.0))
def test_positive_homogeneity(f, a):
    assert abs(Q8(a * f) - a * Q8(f)) <= a * Q8.tolerance_for(f) + Q8.tolerance_for(a * f)


@given(fields)
def test_odd_symmetry(f):
    assert abs(Q8(-f) + Q8(f)) <= 2 * Q8.tolerance_for(f)


@given(fields, fields)
def test_monotone_in_the_function(f, g):
    lo = CompactFunc(Q8.grid, np.minimum(f.samples, g.samples))
    assert Q8(lo) <= Q8(f) + Q8.tolerance_for(lo, f)
