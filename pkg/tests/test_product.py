import numpy as np
import pytest
from hypothesis import given, strategies as st

from qmeas import (COMPACT, OPEN, CompactFunc, IteratedFunctional, PointMass, ProductRegion,
                   QuasiFunctional, Region, Scaled, TensorFunc, ThreePoint, fubini_verdict, lebesgue,
                   product_tm, qi_criterion, t_transform, two_of_three_simple, unit_square)
from qmeas.errors import NotAProductTM, NotApplicable
from qmeas.product import (check_rectangle_family, evaluate, point_mass_identity, rectangle_family,
                           region_family, set_witness)
from qmeas.sampling import random_function

G32 = unit_square(32)
K = 256


def _q(mu):
    return QuasiFunctional(mu, K)


def test_t_transform_of_a_tensor():
    rho = _q(ThreePoint(G32))
    rng = np.random.default_rng(1)
    g, h = random_function(G32, rng, signed=False), random_function(G32, rng, signed=True)
    t = t_transform(rho, TensorFunc.tensor(g, h))
    assert np.allclose(t.samples, rho(g) * h.samples)


@pytest.mark.parametrize("order", ["eta x rho", "rho x eta"])
def test_iterated_tensor_factorizes(order):
    eta, rho = _q(lebesgue(G32)), _q(ThreePoint(G32))
    it = IteratedFunctional(eta, rho)
    if order == "rho x eta":
        it = it.swapped()
    rng = np.random.default_rng(2)
    for _ in range(4):
        g, h = random_function(G32, rng), random_function(G32, rng)
        value, tol = evaluate(it, TensorFunc.tensor(g, h))
        assert abs(value - rho(g) * eta(h)) <= tol + rho.tolerance_for(g) * abs(eta(h)) \
            + eta.tolerance_for(h) * abs(rho(g))


def test_product_of_wholes_and_rectangles():
    tp, pm = ThreePoint(G32), PointMass(G32, (0.3, 0.6), 2.0)
    for eta_mu, rho_mu in [(tp, tp), (pm, tp), (tp, pm)]:
        it = IteratedFunctional(_q(eta_mu), _q(rho_mu))
        assert product_tm(it, ProductRegion.whole(G32, G32)) == rho_mu.total * eta_mu.total
        a = Region.rectangle(G32, 0.1, 0.9, 0.4, 0.6)
        b = Region.disk(G32, (0.3, 0.6), 0.2)
        assert product_tm(it, ProductRegion.rectangle(a, b)) == rho_mu.eval(a) * eta_mu.eval(b)


rects = st.tuples(st.floats(0, 1), st.floats(0, 1), st.floats(0, 1), st.floats(0, 1)).map(
    lambda v: (min(v[0], v[1]), max(v[0], v[1]), min(v[2], v[3]), max(v[2], v[3])))
G16 = unit_square(16)
IT16 = IteratedFunctional(_q(PointMass(G16, (0.3, 0.6))), _q(ThreePoint(G16)))


@given(rects, rects, st.sampled_from([OPEN, COMPACT]))
def test_rectangle_identity_is_exact(ra, rb, kind):
    a, b = Region.rectangle(G16, *ra, kind=kind), Region.rectangle(G16, *rb, kind=kind)
    p = ProductRegion.rectangle(a, b)
    expected = IT16.rho.mu.eval(a) * IT16.eta.mu.eval(b)
    assert product_tm(IT16, p) == expected
    assert product_tm(IT16.swapped(), p) == expected


def test_no_product_formula_for_lebesgue_inside_three_point():
    it = IteratedFunctional(_q(ThreePoint(G32)), _q(lebesgue(G32)))
    with pytest.raises(NotAProductTM):
        product_tm(it, ProductRegion.whole(G32, G32))


def test_fubini_witness_values():
    q = _q(ThreePoint(G32))
    w = set_witness(q, q, 7)
    assert (w["eta_rho"], w["rho_eta"]) == (0.0, 1.0)
    assert q.mu.eval(w["U"]) == q.mu.eval(w["V"]) == 0.0
    assert q.mu.eval(w["U"] | w["V"]) == 1.0


def test_fubini_dichotomy():
    leb, tp = _q(lebesgue(G32)), _q(ThreePoint(G32))
    v = fubini_verdict(leb, leb, trials=8, rng_seed=3)
    assert v.conclusion == "Equal" and v.details["prediction_confirmed"]
    v = fubini_verdict(tp, tp, trials=40, rng_seed=3)
    assert v.conclusion == "Unequal" and v.details["prediction_confirmed"]


def test_point_mass_commutes():
    it = IteratedFunctional(_q(PointMass(G32, (0.3, 0.6))), _q(ThreePoint(G32)))
    for a in region_family(G32, G32, 5, 10):
        assert product_tm(it, a) == product_tm(it.swapped(), a)
        if a.kind is OPEN:
            value, direct = point_mass_identity(it, a)
            assert value == direct


def test_qi_criterion_witness():
    eta, rho = _q(ThreePoint(G32)), _q(lebesgue(G32))
    v = qi_criterion(eta, rho, trials=40, rng_seed=7)
    assert v.conclusion == "NotQuasiIntegral"
    w = v.witness
    t = t_transform(rho, w["F"])
    assert np.allclose(t.samples, (w["g"] + w["h"]).samples, atol=1e-9)
    whole, g, h = w["eta_direct"]
    assert abs(v.residual - abs(whole - g - h)) <= v.tolerance
    assert abs(v.residual - 1.0) <= 0.02


def test_qi_criterion_for_almost_simple_rho():
    v = qi_criterion(_q(ThreePoint(G32)), _q(Scaled(2.0, ThreePoint(G32))), trials=20, rng_seed=1)
    assert v.holds and v.details["rho_almost_simple"]


def test_two_simple_factors():
    tp = _q(ThreePoint(G32))
    v = two_of_three_simple(tp, tp, trials=6, rng_seed=2)
    assert v.holds and v.conclusion == "ProductSimple"


def test_rectangle_family():
    q = _q(ThreePoint(G32))
    members = rectangle_family(q, q, [0.0, 0.5, 1.0])
    v = check_rectangle_family(members, 3, 20)
    assert v.holds and v.details["witness_values"] == [0.0, 0.5, 1.0]
    with pytest.raises(NotApplicable):
        rectangle_family(_q(lebesgue(G32)), q, [0.0])
    with pytest.raises(ValueError):
        rectangle_family(q, q, [2.0])


def test_tensor_sum_sections():
    g, h = CompactFunc.coordinate(G32, 0), CompactFunc.coordinate(G32, 1)
    f = TensorFunc(((g, h), (h, g)), G32, G32)
    y = (0.3, 0.7)
    expected = g.samples * h.cell_value(y) + h.samples * g.cell_value(y)
    assert np.allclose(f.section_y(y).samples, expected)
