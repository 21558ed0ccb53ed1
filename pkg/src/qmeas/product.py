"""Iterated quasi-integrals on ``X x Y`` and product topological measures.

With ``rho`` on X (measure ``mu``) and ``eta`` on Y (measure ``nu``):

* ``T_rho(f)(y) = rho(f_y)`` and ``(eta x rho)(f) = eta(T_rho f)``;
* ``S_eta(f)(x) = eta(f_x)`` and ``(rho x eta)(f) = rho(S_eta f)``;
* ``nu x mu`` is the set function of ``eta x rho``; on open sets it is
  ``integral of mu(U_y) dnu`` when ``nu`` is a measure and
  ``c nu({y : mu(U_y) = c})`` when ``mu`` only takes the values 0, c.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np
from scipy import ndimage

from .errors import GridMismatch, NotAProductTM, NotApplicable, NotEnoughValues
from .measures import EXACT, TopMeasure, Verdict, classify, subadditivity_verdict
from .quasi import QuasiFunctional, almost_simple_verdict, disjoint_unit_pair, simplicity_verdict
from .sampling import random_phi, random_product_region, random_tensorfunc
from .space import (COMPACT, OPEN, CompactFunc, Grid, PhiCurve, PhiFunction, ProductRegion, Region,
                    TensorFunc)


class Order(enum.Enum):
    ETA_RHO = "eta x rho"     # integrate over X first, then over Y
    RHO_ETA = "rho x eta"     # integrate over Y first, then over X


@dataclass(frozen=True, eq=False)
class IteratedFunctional:
    """``eta x rho`` or ``rho x eta`` acting on tensor sums over ``X x Y``."""

    eta: QuasiFunctional      # on Y
    rho: QuasiFunctional      # on X
    order: Order = Order.ETA_RHO

    @property
    def outer(self) -> QuasiFunctional:
        return self.eta if self.order is Order.ETA_RHO else self.rho

    @property
    def inner(self) -> QuasiFunctional:
        return self.rho if self.order is Order.ETA_RHO else self.eta

    @property
    def total(self) -> float:
        """``(nu x mu)(X x Y) = mu(X) nu(Y)``."""
        return self.rho.mu.total * self.eta.mu.total

    def swapped(self) -> "IteratedFunctional":
        other = Order.RHO_ETA if self.order is Order.ETA_RHO else Order.ETA_RHO
        return IteratedFunctional(self.eta, self.rho, other)

    def __call__(self, f: TensorFunc) -> float:
        return iterated(self, f)


def _check(f: TensorFunc, rho: QuasiFunctional, eta: QuasiFunctional):
    if f.x_grid != rho.grid or f.y_grid != eta.grid:
        raise GridMismatch("tensor function and functionals live on different grids")


def _transform(inner: QuasiFunctional, f: TensorFunc, outer_grid: Grid):
    sections, labels = f.y_sections()
    values = np.empty(len(sections))
    slack = 0.0
    for i, s in enumerate(sections):
        values[i] = inner(s)
        if not s.is_zero:
            slack = max(slack, inner.tolerance_for(s))
    return CompactFunc(outer_grid, values[labels]), slack


def t_transform(rho: QuasiFunctional, f: TensorFunc) -> CompactFunc:
    """``y -> rho(f_y)`` on the Y-grid."""
    if f.x_grid != rho.grid:
        raise GridMismatch("tensor function and rho live on different grids")
    return _transform(rho, f, f.y_grid)[0]


def s_transform(eta: QuasiFunctional, f: TensorFunc) -> CompactFunc:
    """``x -> eta(f_x)`` on the X-grid."""
    if f.y_grid != eta.grid:
        raise GridMismatch("tensor function and eta live on different grids")
    return _transform(eta, f.transpose(), f.x_grid)[0]


def evaluate(it: IteratedFunctional, f: TensorFunc) -> tuple[float, float]:
    """``(value, tolerance)``: the tolerance adds the outer ladder budget
    to twice the worst inner budget times the outer total mass."""
    _check(f, it.rho, it.eta)
    g = f if it.order is Order.ETA_RHO else f.transpose()
    transform, slack = _transform(it.inner, g, g.y_grid)
    value = it.outer(transform)
    tol = it.outer.tolerance_for(transform) + 2 * slack * abs(it.outer.mu.total)
    return value, tol


def iterated(it: IteratedFunctional, f: TensorFunc) -> float:
    return evaluate(it, f)[0]


# -- product topological measures -----------------------------------------


def _section_integral(inner: TopMeasure, outer: TopMeasure, a: ProductRegion) -> float:
    prof = a.y_profile
    values = np.array([inner.eval(s) for s in prof.sections])
    return outer.measure_of_cells(values[prof.labels])


def _product_open(inner: TopMeasure, outer: TopMeasure, a: ProductRegion) -> float:
    c = inner.two_valued_scale
    if c is not None:
        top = a.y_profile.where(lambda s: abs(inner.eval(s) - c) <= EXACT * c)
        return c * outer.eval(top)
    if outer.is_measure:
        return _section_integral(inner, outer, a)
    raise NotAProductTM(f"{outer!r} is not a measure and {inner!r} is not almost simple")


def _oriented(it: IteratedFunctional, a: ProductRegion):
    if a.x_grid != it.rho.grid or a.y_grid != it.eta.grid:
        raise GridMismatch("product region and functionals live on different grids")
    if it.order is Order.ETA_RHO:
        return it.rho.mu, it.eta.mu, a
    return it.eta.mu, it.rho.mu, a.transpose()


def product_tm(it: IteratedFunctional, a: ProductRegion) -> float:
    """Value of the product topological measure of ``it`` on ``a``.

    Open regions use the section formulas; compact ones go through the
    complement, ``mu(X) nu(Y) - value(X x Y \\ K)``.
    """
    inner, outer, a = _oriented(it, a)
    if a.kind is COMPACT:
        rest = _product_open(inner, outer, a.complement())
        return inner.total * outer.total - rest
    return _product_open(inner, outer, a)


def section_integral(it: IteratedFunctional, a: ProductRegion) -> float:
    """``integral of mu(A_y) dnu(y)`` for either kind of ``a``; needs the
    outer measure to be a measure."""
    inner, outer, a = _oriented(it, a)
    if not outer.is_measure:
        raise NotAProductTM(f"{outer!r} is not a measure")
    return _section_integral(inner, outer, a)


# -- witnesses ------------------------------------------------------------


def nonadditive_pair(eta: QuasiFunctional, rng_seed: int = 0, trials: int = 400):
    """``g, h >= 0`` with ``eta(g + h) != eta(g) + eta(h)``.

    Takes open ``U, V`` with ``nu(U | V) > nu(U) + nu(V)``, a compact
    ``L`` inside ``U | V`` of the same measure, a plateau ``s`` on ``L``
    supported in ``U | V``, and splits ``s`` by the distances to the
    complements of ``U`` and ``V``.
    """
    sub = subadditivity_verdict(eta.mu, trials, rng_seed, kinds=("open",))
    if sub.holds:
        raise NotApplicable(f"{eta.mu!r} showed no subadditivity violation")
    u, v = sub.witness["first"], sub.witness["second"]
    union = u | v
    target = eta.mu.eval(union)
    # prefer a genuine ramp; a thin band may only keep its value unshrunk
    inner = union.as_kind(COMPACT)
    for j in range(1, 5):
        cand = union.as_kind(COMPACT).erode(j)
        if not cand.is_empty and abs(eta.mu.eval(cand) - target) <= EXACT * max(1.0, abs(target)):
            inner = cand
            break
    s = CompactFunc.plateau(inner, union)
    du = ndimage.distance_transform_edt(u.mask)
    dv = ndimage.distance_transform_edt(v.mask)
    both = du + dv
    with np.errstate(invalid="ignore", divide="ignore"):
        wu = np.where(both > 0, du / both, 0.0)
    g = CompactFunc(eta.grid, s.samples * wu)
    h = CompactFunc(eta.grid, s.samples - g.samples)
    return g, h, {"U": u, "V": v, "L": inner}


def qi_witness(eta: QuasiFunctional, rho: QuasiFunctional, rng_seed: int = 0) -> dict:
    """``F = f1 (x) g + f2 (x) h`` with ``rho(f_i) = 1``, ``f1 f2 = 0`` and
    ``eta(g + h) != eta(g) + eta(h)``; then ``T_rho F = g + h``."""
    f1, f2 = disjoint_unit_pair(rho, rng_seed)
    g, h, sets = nonadditive_pair(eta, rng_seed)
    F = TensorFunc(((f1, g), (f2, h)), rho.grid, eta.grid)
    return {"F": F, "f1": f1, "f2": f2, "g": g, "h": h, **sets}


def qi_criterion(eta: QuasiFunctional, rho: QuasiFunctional, trials: int = 60,
                 rng_seed: int = 0) -> Verdict:
    """``eta x rho`` is a quasi-integral iff ``eta`` is linear or ``rho``
    is almost simple; otherwise exhibit the additivity failure
    ``(eta x rho)(F) != (eta x rho)(f1 (x) g) + (eta x rho)(f2 (x) h)``."""
    linear = subadditivity_verdict(eta.mu, trials, rng_seed)
    almost = almost_simple_verdict(rho, trials, rng_seed)
    details = {"eta_linear": linear.holds, "rho_almost_simple": almost.holds}
    if linear.holds or almost.holds:
        return Verdict("IsQuasiIntegral", True, None, 0.0, 0.0, details)
    w = qi_witness(eta, rho, rng_seed)
    it = IteratedFunctional(eta, rho)
    whole, t0 = evaluate(it, w["F"])
    first, t1 = evaluate(it, TensorFunc(((w["f1"], w["g"]),), rho.grid, eta.grid))
    second, t2 = evaluate(it, TensorFunc(((w["f2"], w["h"]),), rho.grid, eta.grid))
    w.update(whole=whole, parts=(first, second),
             eta_direct=(eta(w["g"] + w["h"]), eta(w["g"]), eta(w["h"])))
    return Verdict("NotQuasiIntegral", False, w, abs(whole - first - second), t0 + t1 + t2, details)


def iterated_qi2(it: IteratedFunctional, f: TensorFunc, phi, psi) -> tuple[float, float]:
    """``(|it((phi + psi) o f) - it(phi o f) - it(psi o f)|, tolerance)``."""
    a, ta = evaluate(it, f.compose(phi + psi))
    b, tb = evaluate(it, f.compose(phi))
    c, tc = evaluate(it, f.compose(psi))
    # QI2 of the inner functional on each section is a continuum identity
    g = f if it.order is Order.ETA_RHO else f.transpose()
    sections, _ = g.y_sections()
    raster = max((it.inner.rasterization(s, phi + psi, phi, psi) for s in sections), default=0.0)
    return abs(a - b - c), ta + tb + tc + 2 * raster * abs(it.outer.mu.total)


def regression_family(x_grid: Grid, y_grid: Grid, rng_seed: int = 0, count: int = 40) -> list:
    """Seeded tensor sums used for functional comparisons."""
    rng = np.random.default_rng(rng_seed)
    return [random_tensorfunc(x_grid, y_grid, rng, signed=bool(k % 3 == 2)) for k in range(count)]


def region_family(x_grid: Grid, y_grid: Grid, rng_seed: int = 0, count: int = 40) -> list:
    rng = np.random.default_rng(rng_seed)
    return [random_product_region(x_grid, y_grid, rng, (OPEN, COMPACT)[k % 2]) for k in range(count)]


def _full_plateau(grid: Grid) -> CompactFunc:
    whole = Region.full(grid, OPEN)
    return CompactFunc.plateau(whole.as_kind(COMPACT).erode(2), whole)


def product_simplicity(it: IteratedFunctional, trials: int = 20, rng_seed: int = 0) -> Verdict:
    """Simplicity of ``it / c`` with ``c = mu(X) nu(Y)``, via commutation
    with generators and multiplicativity on sampled tensor sums.

    Trial 0 is ``p (x) x`` with ``p`` a plateau filling X.
    """
    c = it.total
    rng = np.random.default_rng(rng_seed)
    xg, yg = it.rho.grid, it.eta.grid
    family = regression_family(xg, yg, rng_seed, max(trials - 1, 0))
    first = TensorFunc.tensor(_full_plateau(xg), CompactFunc.coordinate(yg, 0))
    worst, witness = 0.0, None
    for t, f in enumerate([first] + family):
        lo, hi = f.base_range()
        dom = (min(lo, 0.0), max(hi, 0.0))
        phi, psi = random_phi(rng, dom), random_phi(rng, dom)
        if t == 0:
            phi, psi = PhiFunction(np.square, dom), PhiCurve.identity(*dom)
        v, tv = evaluate(it, f)
        vp, tp = evaluate(it, f.compose(phi))
        vq, tq = evaluate(it, f.compose(psi))
        vpq, tpq = evaluate(it, f.compose(phi * psi))
        r = v / c
        checks = {
            "commutation": (abs(vp / c - float(phi._apply(np.clip(r, *dom)))),
                            (tp + phi.lipschitz * tv) / c),
            "multiplicativity": (abs(vpq / c - (vp / c) * (vq / c)),
                                 (tpq + abs(vq) * tp / c + abs(vp) * tq / c + tp * tq / c) / c),
        }
        for name, (res, tol) in checks.items():
            if res > tol and witness is None:
                witness = {"condition": name, "trial": t, "f": f, "phi": phi, "psi": psi,
                           "values": (v, vp, vq, vpq)}
                worst = (res, tol)
    if witness is None:
        label = "Simple" if abs(c - 1.0) <= EXACT else "AlmostSimple"
        return Verdict(label, True, None, 0.0, 0.0, {"scale": c})
    return Verdict("NotSimple", False, witness, worst[0], worst[1], {"scale": c})


def two_of_three_simple(eta: QuasiFunctional, rho: QuasiFunctional, trials: int = 20,
                        rng_seed: int = 0) -> Verdict:
    """Classify ``rho``, ``eta`` and ``eta x rho`` and check that two
    simple ones force the third."""
    crit = qi_criterion(eta, rho, trials, rng_seed)
    if not crit.holds:
        raise NotAProductTM("eta x rho is not a quasi-integral")
    sr = simplicity_verdict(rho, trials, rng_seed)
    se = simplicity_verdict(eta, trials, rng_seed + 1)
    sp = product_simplicity(IteratedFunctional(eta, rho), trials, rng_seed + 2)
    flags = {"rho": sr.holds, "eta": se.holds, "product": sp.conclusion == "Simple"}
    consistent = sum(flags.values()) != 2
    label = sp.conclusion if sp.conclusion != "AlmostSimple" else f"AlmostSimple({sp.details['scale']:g})"
    details = {**flags, "implication_ok": consistent, "product_label": label,
               "product_witness": sp.witness}
    return Verdict(f"Product{label}", consistent, None if consistent else flags, 0.0, 0.0, details)


def factorization_check(eta: QuasiFunctional, rho: QuasiFunctional, trials: int = 10,
                        rng_seed: int = 0) -> Verdict:
    """For ``eta = k eta'`` with ``eta'`` simple: ``eta x rho`` is simple
    iff it equals ``eta' x (k rho)`` with ``k rho`` simple."""
    k = eta.mu.two_valued_scale
    if k is None:
        raise NotApplicable("eta does not take exactly two values")
    eta1 = QuasiFunctional((1.0 / k) * eta.mu, eta.thresholds, eta.tolerance, eta.max_resolved)
    rho1 = rho.scaled(k)
    it, it1 = IteratedFunctional(eta, rho), IteratedFunctional(eta1, rho1)
    worst, tol_sum = 0.0, 0.0
    for f in regression_family(rho.grid, eta.grid, rng_seed, trials):
        a, ta = evaluate(it, f)
        b, tb = evaluate(it1, f)
        if abs(a - b) > worst:
            worst, tol_sum = abs(a - b), ta + tb
    product = product_simplicity(it, trials, rng_seed)
    factors = simplicity_verdict(rho1, trials, rng_seed)
    equal = worst <= tol_sum
    details = {"product_simple": product.conclusion == "Simple", "factor_simple": factors.holds,
               "factors_agree": equal, "scale": k}
    ok = equal and (details["product_simple"] == details["factor_simple"])
    return Verdict("Factorizes" if details["product_simple"] else "NotSimple", ok, None,
                   worst, tol_sum, details)


# -- Fubini ---------------------------------------------------------------


def _scaled_point_mass(label) -> bool:
    return label.is_measure and label.label in ("Simple", "AlmostSimple")


def set_witness(eta: QuasiFunctional, rho: QuasiFunctional, rng_seed: int = 0,
                trials: int = 400) -> dict:
    """``A = (U x W) | (V x E)`` with ``mu(U) = mu(V) = 0 < mu(U | V)`` and
    ``W, E`` the complements of compacts ``C, K`` with
    ``nu(C) = nu(K) = 0 < nu(C | K)``."""
    su = subadditivity_verdict(rho.mu, trials, rng_seed, kinds=("open",))
    sc = subadditivity_verdict(eta.mu, trials, rng_seed + 1, kinds=("compact",))
    if su.holds or sc.holds:
        raise NotApplicable("both measures must fail subadditivity")
    u, v = su.witness["first"], su.witness["second"]
    c, k = sc.witness["first"], sc.witness["second"]
    w, e = c.complement(), k.complement()
    a = ProductRegion(((u, w), (v, e)), OPEN, rho.grid, eta.grid)
    it = IteratedFunctional(eta, rho)
    return {"A": a, "U": u, "V": v, "C": c, "K": k, "W": w, "E": e,
            "eta_rho": product_tm(it, a), "rho_eta": product_tm(it.swapped(), a)}


def function_witness(eta: QuasiFunctional, rho: QuasiFunctional, rng_seed: int = 0) -> dict:
    """``F`` with ``(eta x rho)(F) = eta(g + h)`` but
    ``(rho x eta)(F) = eta(g) + eta(h)`` (or the mirror image)."""
    try:
        w = qi_witness(eta, rho, rng_seed)
        F = w["F"]
    except (NotApplicable, NotEnoughValues):
        # rho is almost simple or eta is linear: build it the other way round
        w = qi_witness(rho, eta, rng_seed)
        F = w["F"].transpose()
    it = IteratedFunctional(eta, rho)
    a, ta = evaluate(it, F)
    b, tb = evaluate(it.swapped(), F)
    return {**w, "F": F, "eta_rho": a, "rho_eta": b, "tolerance": ta + tb}


def fubini_verdict(eta: QuasiFunctional, rho: QuasiFunctional, trials: int = 40,
                   rng_seed: int = 0, regions_grid: tuple[Grid, Grid] | None = None) -> Verdict:
    """Predict ``eta x rho == rho x eta`` from the dichotomy and confirm it.

    Equal is predicted when both measures are measures or one is a scaled
    point mass; the prediction is then checked on the regression family
    (and, for a point mass, on sampled product regions).  Otherwise a
    witness of inequality is built.
    """
    cm = classify(rho.mu, trials, rng_seed)
    cn = classify(eta.mu, trials, rng_seed + 1)
    details = {"mu": str(cm), "nu": str(cn), "mu_measure": cm.is_measure, "nu_measure": cn.is_measure}
    it = IteratedFunctional(eta, rho)
    if (cm.is_measure and cn.is_measure) or _scaled_point_mass(cm) or _scaled_point_mass(cn):
        worst, tol_at, margin = 0.0, 0.0, -np.inf     # the pair closest to failing
        for f in regression_family(rho.grid, eta.grid, rng_seed, trials):
            a, ta = evaluate(it, f)
            b, tb = evaluate(it.swapped(), f)
            if abs(a - b) - (ta + tb) > margin:
                worst, tol_at, margin = abs(a - b), ta + tb, abs(a - b) - (ta + tb)
        region_gap = 0.0
        if _scaled_point_mass(cm) or _scaled_point_mass(cn):
            for a in region_family(rho.grid, eta.grid, rng_seed, trials):
                region_gap = max(region_gap, abs(product_tm(it, a) - product_tm(it.swapped(), a)))
        details.update(function_gap=worst, function_tolerance=tol_at, region_gap=region_gap)
        confirmed = worst <= tol_at and region_gap <= EXACT * max(1.0, abs(it.total))
        details["prediction_confirmed"] = confirmed
        return Verdict("Equal", True, None, worst, tol_at, details)
    if cm.label in ("Simple", "AlmostSimple") and cn.label in ("Simple", "AlmostSimple"):
        w = set_witness(eta, rho, rng_seed)
        residual, tol = abs(w["eta_rho"] - w["rho_eta"]), EXACT * max(1.0, abs(it.total))
    else:
        w = function_witness(eta, rho, rng_seed)
        residual, tol = abs(w["eta_rho"] - w["rho_eta"]), w["tolerance"]
    details["prediction_confirmed"] = residual > tol
    return Verdict("Unequal", False, w, residual, tol, details)


def point_mass_identity(it: IteratedFunctional, a: ProductRegion) -> tuple[float, float]:
    """For a scaled point mass on one side: ``(product_tm(it, a), c nu(U_x0))``
    where the second value is read off the section through the atom."""
    pm_x, pm_y = it.rho.mu.point_mass, it.eta.mu.point_mass
    if pm_x is not None:
        cell, c = pm_x
        mask = np.zeros(a.y_grid.shape, bool)
        for rx, ry in a.terms:
            if rx.mask[cell]:
                mask |= ry.mask
        other = c * it.eta.mu.eval(Region(a.y_grid, mask, a.kind))
    elif pm_y is not None:
        cell, c = pm_y
        other = c * it.rho.mu.eval(a.section_y_cell(cell))
    else:
        raise NotApplicable("neither side is a scaled point mass")
    return product_tm(it, a), other


# -- the family agreeing on rectangles ------------------------------------


@dataclass(frozen=True)
class FamilyMember:
    """``a (mu x nu) + (m - a)(nu x mu)``."""

    a: float
    m: float
    it: IteratedFunctional

    def __call__(self, region: ProductRegion) -> float:
        return (self.a * product_tm(self.it.swapped(), region)
                + (self.m - self.a) * product_tm(self.it, region))


def rectangle_family(eta: QuasiFunctional, rho: QuasiFunctional, coefficients) -> list[FamilyMember]:
    """Set functions ``a (mu x nu) + (m - a)(nu x mu)`` with
    ``m = mu(X) nu(Y)``; needs both measures almost simple and not
    measures, so that the two products differ."""
    for q in (eta, rho):
        if q.mu.two_valued_scale is None or q.mu.is_measure:
            raise NotApplicable(f"{q.mu!r} is not an almost simple non-measure; the products agree")
    m = rho.mu.total * eta.mu.total
    for a in coefficients:
        if not 0 <= a <= m:
            raise ValueError(f"coefficient {a} outside [0, {m}]")
    it = IteratedFunctional(eta, rho)
    return [FamilyMember(float(a), m, it) for a in coefficients]


def check_rectangle_family(members: list[FamilyMember], rng_seed: int = 0, count: int = 40,
                           witness: ProductRegion | None = None) -> Verdict:
    """Members must agree on sampled rectangles and separate on ``witness``."""
    it = members[0].it
    rng = np.random.default_rng(rng_seed)
    worst = 0.0
    for k in range(count):
        rect = random_product_region(it.rho.grid, it.eta.grid, rng, (OPEN, COMPACT)[k % 2], terms=1)
        vals = [m(rect) for m in members]
        worst = max(worst, max(vals) - min(vals))
    if witness is None:
        witness = set_witness(it.eta, it.rho, rng_seed)["A"]
    on_a = [m(witness) for m in members]
    distinct = len(set(on_a)) == len(on_a)
    details = {"rectangle_spread": worst, "witness_values": on_a, "distinct": distinct}
    holds = worst == 0.0 and distinct
    return Verdict("AgreeOnRectangles" if holds else "Fail", holds,
                   None if holds else {"witness_values": on_a}, worst, 0.0, details)
