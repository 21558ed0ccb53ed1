"""Named experiments, one per result, each producing a :class:`Report`.

Expected values come from the structure of the configured measures
(is it a measure, two-valued, a point mass) or from direct evaluation
by an independent route, never from the routine under test.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from ..errors import (ConfigInvalid, DegenerateConfig, NotAProductTM, QMeasError,
                      UnknownScenario)
from ..measures import (EXACT, Scaled, classify, subadditivity_verdict, verify_tm_axioms)
from ..product import (IteratedFunctional, check_rectangle_family, evaluate, factorization_check,
                       fubini_verdict, iterated_qi2, point_mass_identity, product_tm,
                       qi_criterion, rectangle_family, regression_family, region_family,
                       section_integral, set_witness, t_transform, two_of_three_simple)
from ..quasi import (QuasiFunctional, almost_simple_verdict, continuity_check,
                     integrate_generator, quasi_integral, recover_compact, recover_open,
                     recovery_ladder_compact, recovery_ladder_open, simplicity_verdict)
from ..sampling import (random_disjoint_pair, random_function, random_phi, random_plateau,
                        random_product_region, random_region, random_tensorfunc)
from ..space import (COMPACT, OPEN, CompactFunc, PhiCurve, PhiFunction, ProductRegion, Region,
                     TensorFunc, compose, unit_square)
from .config import DEFAULTS, build_measure, functional, grids, merge, validate
from .report import Report

LEBESGUE = {"variant": "lebesgue"}
POINT_MASS = {"variant": "point-mass", "params": {"location": [0.3, 0.6]}}
THREE_POINT = {"variant": "three-point"}
SCALED = {"variant": "scaled", "params": {"c": 2.0, "inner": THREE_POINT}}
SUM = {"variant": "sum", "params": {"terms": [LEBESGUE, THREE_POINT]}}
PANEL = {"lebesgue": LEBESGUE, "point-mass": POINT_MASS, "three-point": THREE_POINT,
         "scaled": SCALED, "sum": SUM}


@dataclass(frozen=True)
class Scenario:
    name: str
    summary: str
    run: Callable[[dict, Report], None]
    defaults: dict = field(default_factory=dict)


REGISTRY: dict[str, Scenario] = {}


def scenario(name: str, summary: str, **defaults):
    def register(fn):
        if name in REGISTRY:
            raise ValueError(f"scenario {name!r} registered twice")
        REGISTRY[name] = Scenario(name, summary, fn, defaults)
        return fn
    return register


def list_scenarios(pattern: str = "") -> list[Scenario]:
    """Registered scenarios in catalog order, filtered by substring."""
    return [s for s in REGISTRY.values() if pattern in s.name]


def effective_config(name: str, overrides: dict | None = None) -> dict:
    if name not in REGISTRY:
        raise UnknownScenario(f"unknown scenario {name!r}; try 'qmeas list'")
    cfg = merge(merge(DEFAULTS, REGISTRY[name].defaults), overrides or {})
    return validate(cfg)


def run_scenario(name: str, config: dict | None = None) -> Report:
    """Run one scenario with ``config`` layered over its defaults."""
    cfg = effective_config(name, config)
    rep = Report(name, cfg, cfg["seed"])
    start = time.perf_counter()
    try:
        REGISTRY[name].run(cfg, rep)
    except (ConfigInvalid, DegenerateConfig):
        raise
    except QMeasError as err:
        # a library refusal mid-scenario is a failed check, not a crash
        rep.check("scenario ran to completion", "completed", f"{type(err).__name__}: {err}")
    rep.wall_time = time.perf_counter() - start
    return rep


# -- helpers ----------------------------------------------------------------


def _measures(cfg: dict, grid):
    for role, spec in cfg["measures"].items():
        yield role, build_measure(spec, grid, f"measures.{role}")


def _exact(*values) -> float:
    return EXACT * max([1.0] + [abs(v) for v in values])


def _is_simple(m) -> bool:
    return m.two_valued_scale is not None and abs(m.two_valued_scale - 1.0) <= EXACT


def _pair(cfg: dict, grid):
    """``(eta, rho)``: ``y`` on Y and ``x`` on X."""
    return functional(cfg, "y", grid), functional(cfg, "x", grid)


class _Worst:
    """Tracks the case closest to failing and counts failures."""

    def __init__(self):
        self.residual, self.tolerance, self.margin, self.failures, self.count = 0.0, 0.0, -np.inf, 0, 0

    def add(self, residual: float, tolerance: float):
        self.count += 1
        if residual > tolerance:
            self.failures += 1
        if residual - tolerance > self.margin:
            self.residual, self.tolerance, self.margin = residual, tolerance, residual - tolerance

    def row(self, rep: Report, description: str):
        rep.check(f"{description} ({self.count} cases, {self.failures} over budget)",
                  0.0, self.residual, self.tolerance, self.failures == 0)


# -- measures -----------------------------------------------------------------


@scenario("axioms", "TM1-TM3, complement identity and subadditivity iff measure",
          measures=PANEL, trials=40)
def _axioms(cfg, rep):
    grid, _ = grids(cfg)
    for role, m in _measures(cfg, grid):
        v = verify_tm_axioms(m, cfg["trials"], cfg["seed"])
        rep.check(f"{role}: TM1-TM3 hold on sampled regions", "Pass", v.conclusion, v.tolerance)
        rng = np.random.default_rng(cfg["seed"])
        gap = 0.0
        for k in range(20):
            r = random_region(grid, rng, (OPEN, COMPACT)[k % 2])
            gap = max(gap, abs(m.eval(r) + m.eval(r.complement()) - m.total))
        rep.check(f"{role}: mu(r) + mu(X minus r) = mu(X) on 20 regions", 0.0, gap, _exact(m.total))
        if v.holds:
            sub = subadditivity_verdict(m, cfg["trials"], cfg["seed"])
            expected = "Subadditive" if m.is_measure else "NotSubadditive"
            rep.check(f"{role}: subadditive exactly when a measure", expected, sub.conclusion)


# -- quasi-integrals ----------------------------------------------------------


def _domain(f: CompactFunc):
    lo, hi = min(f.min, 0.0), max(f.max, 0.0)
    return (lo, hi) if lo < hi else (-1.0, 1.0)


def _representation_draws(grid, trials, seed):
    """Sample functions shared by every measure in the panel."""
    rng = np.random.default_rng(seed)
    draws = []
    for t in range(trials):
        f = random_function(grid, rng, signed=bool(t % 2))
        phi = random_phi(rng, _domain(f))
        pair = None
        if t % 5 == 0:
            a_, b_ = random_disjoint_pair(grid, rng, COMPACT, gap=4)
            g1 = CompactFunc.plateau(a_, a_.as_kind(OPEN).dilate(1), rng.uniform(-1, 1))
            g2 = CompactFunc.plateau(b_, b_.as_kind(OPEN).dilate(1), rng.uniform(-1, 1))
            pair = (g1, g2, g1 + g2)
        draws.append((f, phi, compose(phi, f), pair))
    return draws


@scenario("representation", "rho(phi o f) = integral of phi dm_f, QI1 and disjoint additivity",
          measures=PANEL, trials=100)
def _representation(cfg, rep):
    grid, _ = grids(cfg)
    k = cfg["thresholds"]["k"]
    draws = _representation_draws(grid, cfg["trials"], cfg["seed"])
    for role, m in _measures(cfg, grid):
        q = QuasiFunctional(m, k)
        gen, hom, add = _Worst(), _Worst(), _Worst()
        for f, phi, fp, pair in draws:
            gen.add(abs(integrate_generator(q, f, phi) - quasi_integral(q, fp)),
                    q.generator_tolerance(f, phi, fp))
            if pair is not None:
                r = quasi_integral(q, f)
                for a in (-2.0, -1.0, 0.5, 3.0):
                    hom.add(abs(quasi_integral(q, a * f) - a * r), abs(a) * q.tolerance_for(f))
                g1, g2, both = pair
                add.add(abs(quasi_integral(q, both) - quasi_integral(q, g1) - quasi_integral(q, g2)),
                        q.tolerance_for(both, g1, g2))
        gen.row(rep, f"{role}: |integral phi dm_f - rho(phi o f)|")
        hom.row(rep, f"{role}: |rho(a f) - a rho(f)| for a in -2, -1, 0.5, 3")
        add.row(rep, f"{role}: |rho(f + g) - rho(f) - rho(g)| for f g = 0")
        rep.check(f"{role}: rho(0) = 0", 0.0, quasi_integral(q, CompactFunc.zeros(grid)))

    q = QuasiFunctional(build_measure(LEBESGUE, grid), k)
    x = CompactFunc.coordinate(grid, 0)
    square = PhiFunction(np.square, (0.0, 1.0))
    rep.check("Lebesgue: rho(x) = 1/2 within 1%", 0.5, quasi_integral(q, x), 0.005)
    rep.check("Lebesgue: integral s^2 dm_x = 1/3 within 1%", 1 / 3,
              integrate_generator(q, x, square), 0.01 / 3)
    rep.check("Lebesgue: rho(x^2) = 1/3 within 1%", 1 / 3, quasi_integral(q, compose(square, x)),
              0.01 / 3)


def _perturbed_pair(grid, rng, nonnegative: bool):
    f = random_function(grid, rng, signed=not nonnegative)
    if rng.random() < 0.25:
        return f, random_function(grid, rng, signed=not nonnegative)
    h = random_function(grid, rng, signed=not nonnegative)
    return f, f + rng.uniform(0.01, 0.3) * h


@scenario("continuity", "|rho(f) - rho(g)| <= 2 ||f - g|| mu(K), factor 1 when f, g >= 0",
          measures=PANEL, trials=200)
def _continuity(cfg, rep):
    grid, _ = grids(cfg)
    rng = np.random.default_rng(cfg["seed"])
    pairs = [_perturbed_pair(grid, rng, nonnegative=bool(t % 2)) for t in range(cfg["trials"])]
    for role, m in _measures(cfg, grid):
        q = QuasiFunctional(m, cfg["thresholds"]["k"])
        bad = {1.0: 0, 2.0: 0}
        seen = {1.0: 0, 2.0: 0}
        for f, g in pairs:
            v = continuity_check(q, f, g)
            seen[v.details["factor"]] += 1
            bad[v.details["factor"]] += not v.holds
        rep.check(f"{role}: violations of the factor-2 bound over {seen[2.0]} signed pairs",
                  0, bad[2.0])
        rep.check(f"{role}: violations of the factor-1 bound over {seen[1.0]} nonnegative pairs",
                  0, bad[1.0])


@scenario("simplicity", "simple iff m_f is a point mass iff rho commutes with generators",
          measures=PANEL, trials=100)
def _simplicity(cfg, rep):
    grid, _ = grids(cfg)
    for role, m in _measures(cfg, grid):
        q = QuasiFunctional(m, cfg["thresholds"]["k"])
        v = simplicity_verdict(q, cfg["trials"], cfg["seed"])
        expected = "Simple" if _is_simple(m) else "NotSimple"
        rep.check(f"{role}: concentration, commutation, multiplicativity "
                  f"({v.details['trials']} trials)", expected, v.conclusion, v.tolerance)
        if not v.holds:
            rep.check(f"{role}: failing condition recorded with its witness", True,
                      v.witness is not None and "f" in v.witness)


@scenario("almost-simple", "almost simple iff rho(f) rho(g) = 0 whenever f g = 0",
          measures={"x": THREE_POINT, "y": LEBESGUE}, scales=[0.5, 2.0, 3.0], trials=100)
def _almost_simple(cfg, rep):
    grid, _ = grids(cfg)
    k, seed, trials = cfg["thresholds"]["k"], cfg["seed"], cfg["trials"]
    base = build_measure(cfg["measures"]["x"], grid, "measures.x")
    for c in cfg["scales"]:
        m = Scaled(float(c), base)
        q = QuasiFunctional(m, k)
        v = almost_simple_verdict(q, trials, seed)
        expected = "AlmostSimple" if m.two_valued_scale is not None else "NotAlmostSimple"
        rep.check(f"Scaled({c:g}, x): disjoint supports give rho(f) rho(g) = 0", expected,
                  v.conclusion, v.tolerance)
        if m.two_valued_scale is not None:
            expected = "Simple" if _is_simple(m) else f"AlmostSimple({m.two_valued_scale:g})"
            rep.check(f"Scaled({c:g}, x): classified by its values", expected,
                      str(classify(m, 40, seed)))
    other = build_measure(cfg["measures"]["y"], grid, "measures.y")
    v = almost_simple_verdict(QuasiFunctional(other, k), trials, seed)
    expected = "AlmostSimple" if other.two_valued_scale is not None else "NotAlmostSimple"
    rep.check("y: disjoint supports give rho(f) rho(g) = 0", expected, v.conclusion, v.tolerance)
    if not v.holds:
        rep.check("y: witness pair recorded", True, v.witness is not None)


@scenario("recovery", "mu recovered from rho by plateau ladders on open and compact sets",
          grid={"n": 512}, measures={"lebesgue": LEBESGUE, "three-point": THREE_POINT},
          trials=10)
def _recovery(cfg, rep):
    grid, _ = grids(cfg)
    for role, m in _measures(cfg, grid):
        q = QuasiFunctional(m, cfg["thresholds"]["k"])
        rng = np.random.default_rng(cfg["seed"])
        solid = m.two_valued_scale is not None
        limit = 0.0 if solid else 0.02
        gap, bracket, monotone = 0.0, True, True
        for _ in range(cfg["trials"]):
            # one rectangle or disk: connected with connected complement
            u = random_region(grid, rng, OPEN, pieces=1 if solid else None)
            kk = random_region(grid, rng, COMPACT, pieces=1 if solid else None)
            lo = recovery_ladder_open(q, u)
            hi = recovery_ladder_compact(q, kk)
            tol_o, tol_c = _exact(m.total), _exact(m.total)
            bracket &= max(lo) <= m.eval(u) + tol_o and min(hi) >= m.eval(kk) - tol_c
            monotone &= bool((np.diff(lo) >= -tol_o).all() and (np.diff(hi) <= tol_c).all())
            gap = max(gap, m.eval(u) - recover_open(q, u), recover_compact(q, kk) - m.eval(kk))
        what = "solid" if solid else "test"
        rep.check(f"{role}: recover_open <= mu(U) and recover_compact >= mu(K)", True, bracket)
        rep.check(f"{role}: plateau ladders converge monotonically", True, monotone)
        rep.check(f"{role}: recovery gap on {what} regions at n={grid.n}", 0.0, gap, limit)


# -- products -------------------------------------------------------------------


@scenario("qi-criterion", "eta x rho is a quasi-integral iff eta is linear or rho almost simple",
          measures={"x": LEBESGUE, "y": THREE_POINT}, trials=100)
def _qi_criterion(cfg, rep):
    _, pg = grids(cfg)
    k, seed = cfg["thresholds"]["k"], cfg["seed"]
    eta, rho = _pair(cfg, pg)
    qualifies = eta.mu.is_measure or rho.mu.two_valued_scale is not None
    v = qi_criterion(eta, rho, 60, seed)
    rep.check("eta x rho classified by the criterion",
              "IsQuasiIntegral" if qualifies else "NotQuasiIntegral", v.conclusion)
    if not v.holds:
        w = v.witness
        whole_eta, g_eta, h_eta = w["eta_direct"]
        direct = whole_eta - g_eta - h_eta
        T = t_transform(rho, w["F"])
        rep.check("T_rho F = g + h", 0.0, (T - (w["g"] + w["h"])).sup_norm, v.tolerance)
        rep.check("additivity residual of eta x rho equals eta(g + h) - eta(g) - eta(h)",
                  abs(direct), v.residual, 0.02)
        rep.check("additivity residual is nonzero", True, v.residual > v.tolerance)

    pairs = [("eta linear", QuasiFunctional(build_measure(LEBESGUE, pg), k),
              QuasiFunctional(build_measure(THREE_POINT, pg), k)),
             ("rho almost simple", QuasiFunctional(build_measure(THREE_POINT, pg), k),
              QuasiFunctional(build_measure(SCALED, pg), k))]
    for label, e, r in pairs:
        crit = qi_criterion(e, r, 60, seed)
        rep.check(f"{label}: criterion says quasi-integral", "IsQuasiIntegral", crit.conclusion)
        it = IteratedFunctional(e, r)
        rng = np.random.default_rng(seed)
        worst = _Worst()
        for _ in range(cfg["trials"]):
            f = random_tensorfunc(pg, pg, rng)
            lo, hi = f.base_range()
            dom = (min(lo, 0.0), max(hi, 0.0))
            phi, psi = random_phi(rng, dom), random_phi(rng, dom)
            worst.add(*iterated_qi2(it, f, phi, psi))
        worst.row(rep, f"{label}: QI2 residual of eta x rho")


@scenario("two-of-three", "two simple among rho, eta, eta x rho force the third; scaling",
          measures={"x": THREE_POINT, "y": THREE_POINT}, scales=[0.5, 2.0, 3.0], trials=20)
def _two_of_three(cfg, rep):
    _, pg = grids(cfg)
    seed = cfg["seed"]
    eta, rho = _pair(cfg, pg)
    v = two_of_three_simple(eta, rho, cfg["trials"], seed)
    both = _is_simple(eta.mu) and _is_simple(rho.mu)
    if both:
        rep.check("eta x rho of two simple functionals", "ProductSimple", v.conclusion)
    rep.check("two simple factors force the third", True, v.details["implication_ok"])
    it = IteratedFunctional(eta, rho)
    family = regression_family(pg, pg, seed, 40)
    base = [evaluate(it, f) for f in family]
    for c in cfg["scales"]:
        scaled = IteratedFunctional(eta, rho.scaled(c))
        worst = _Worst()
        for f, (v0, t0) in zip(family, base):
            v1, t1 = evaluate(scaled, f)
            worst.add(abs(v1 - c * v0), c * t0 + t1)
        worst.row(rep, f"(eta x {c:g} rho) - {c:g} (eta x rho)")


@scenario("factorization", "eta x rho simple iff it equals eta' x rho' with simple factors",
          measures={"x": {"variant": "scaled", "params": {"c": 2.0, "inner": THREE_POINT}},
                    "y": {"variant": "scaled", "params": {"c": 0.5, "inner": THREE_POINT}}},
          trials=10)
def _factorization(cfg, rep):
    _, pg = grids(cfg)
    eta, rho = _pair(cfg, pg)
    v = factorization_check(eta, rho, cfg["trials"], cfg["seed"])
    k, s = eta.mu.two_valued_scale, rho.mu.two_valued_scale
    expected = "Factorizes" if s is not None and abs(k * s - 1.0) <= EXACT else "NotSimple"
    rep.check("eta = k eta', rho' = k rho: product simplicity", expected, v.conclusion)
    rep.check("eta x rho = eta' x rho' on regression functions", 0.0, v.residual, v.tolerance)
    rep.check("product simple iff the rescaled factor is simple", True, v.holds)


def _rectangles(xg, yg, rng, count):
    return [random_product_region(xg, yg, rng, (OPEN, COMPACT)[j % 2], terms=1)
            for j in range(count)]


@scenario("product-formulas", "product TMs on rectangles and by the section formulas",
          measures={"three-point": THREE_POINT, "point-mass": POINT_MASS, "lebesgue": LEBESGUE},
          trials=40)
def _product_formulas(cfg, rep):
    grid, pg = grids(cfg)
    k, seed = cfg["thresholds"]["k"], cfg["seed"]
    roles = list(cfg["measures"])
    for rx in roles:
        for ry in roles:
            mu = build_measure(cfg["measures"][rx], grid, f"measures.{rx}")
            nu = build_measure(cfg["measures"][ry], grid, f"measures.{ry}")
            it = IteratedFunctional(QuasiFunctional(nu, k), QuasiFunctional(mu, k))
            name = f"mu={rx}, nu={ry}"
            if not (nu.is_measure or mu.two_valued_scale is not None):
                try:
                    product_tm(it, ProductRegion.whole(grid, grid, OPEN))
                    raised = False
                except NotAProductTM:
                    raised = True
                rep.check(f"{name}: no product formula applies", True, raised)
                continue
            m = mu.total * nu.total
            whole = ProductRegion.whole(grid, grid, OPEN)
            rep.check(f"{name}: (nu x mu)(X x Y) = mu(X) nu(Y)", m, product_tm(it, whole), _exact(m))
            rng = np.random.default_rng(seed)
            gap = 0.0
            for rect in _rectangles(grid, grid, rng, cfg["trials"]):
                (a, b), = rect.terms
                gap = max(gap, abs(product_tm(it, rect) - mu.eval(a) * nu.eval(b)))
            exact = not (mu.is_measure and nu.is_measure and mu.point_mass is None
                         and nu.point_mass is None)
            tol = _exact(m) if exact else 2 * _exact(m)
            rep.check(f"{name}: (nu x mu)(A x B) = mu(A) nu(B) on {cfg['trials']} rectangles",
                      0.0, gap, tol)
            if nu.is_measure and mu.two_valued_scale is not None:
                # the two open-set formulas must agree when both apply
                gap = 0.0
                for a in region_family(grid, grid, seed, 20):
                    if a.kind is OPEN:
                        gap = max(gap, abs(product_tm(it, a) - section_integral(it, a)))
                rep.check(f"{name}: c nu(mu(U_y) = c) = integral of mu(U_y) dnu", 0.0, gap,
                          _exact(m))
    eta = QuasiFunctional(build_measure(THREE_POINT, pg), k)
    rho = QuasiFunctional(build_measure(LEBESGUE, pg), k)
    rng = np.random.default_rng(seed)
    worst = _Worst()
    for _ in range(10):
        g, h = random_plateau(pg, rng, rng.uniform(0.3, 1.0)), random_plateau(pg, rng)
        f = TensorFunc.tensor(g, h)
        a, ta = evaluate(IteratedFunctional(eta, rho), f)
        b, tb = evaluate(IteratedFunctional(eta, rho).swapped(), f)
        direct = rho(g) * eta(h)
        worst.add(max(abs(a - direct), abs(b - direct)), max(ta, tb) + rho.tolerance_for(g) * abs(eta(h))
                  + eta.tolerance_for(h) * abs(rho(g)))
    worst.row(rep, "both iterated orders give rho(g) eta(h) on g (x) h")


@scenario("fubini-failure", "(nu x mu)(A) = 0 but (mu x nu)(A) = 1 for two simple non-measures",
          measures={"x": THREE_POINT, "y": THREE_POINT}, trials=40)
def _fubini_failure(cfg, rep):
    grid, _ = grids(cfg)
    start = time.perf_counter()
    eta, rho = _pair(cfg, grid)
    w = set_witness(eta, rho, cfg["seed"])
    elapsed = time.perf_counter() - start
    mu, nu = rho.mu, eta.mu
    rep.check("(nu x mu)(A) = 0", 0.0, w["eta_rho"])
    rep.check("(mu x nu)(A) = 1", 1.0, w["rho_eta"])
    rep.check("(nu x mu)(A) = nu(E meet W), evaluated on Y", nu.eval(w["E"] & w["W"]), w["eta_rho"])
    rep.check("(mu x nu)(A) = mu(U join V), evaluated on X", mu.eval(w["U"] | w["V"]), w["rho_eta"])
    rep.check("mu(U) = mu(V) = 0 and nu(C) = nu(K) = 0", [0.0, 0.0, 0.0, 0.0],
              [mu.eval(w["U"]), mu.eval(w["V"]), nu.eval(w["C"]), nu.eval(w["K"])])
    it = IteratedFunctional(eta, rho)
    rng = np.random.default_rng(cfg["seed"])
    gap = 0.0
    for rect in _rectangles(grid, grid, rng, cfg["trials"]):
        gap = max(gap, abs(product_tm(it, rect) - product_tm(it.swapped(), rect)))
    rep.check(f"both products agree on {cfg['trials']} rectangles", 0.0, gap)
    rep.check("witness built and evaluated within 10 s", True, elapsed <= 10.0)


@scenario("dichotomy", "eta x rho = rho x eta iff both are measures or one is a point mass",
          trials=40)
def _dichotomy(cfg, rep):
    _, pg = grids(cfg)
    k, seed = cfg["thresholds"]["k"], cfg["seed"]
    specs = {"lebesgue": LEBESGUE, "point-mass": POINT_MASS, "three-point": THREE_POINT}
    pairs = [("lebesgue", "lebesgue"), ("point-mass", "three-point"), ("three-point", "point-mass"),
             ("three-point", "lebesgue"), ("lebesgue", "three-point"), ("three-point", "three-point")]
    for ry, rx in pairs:
        eta = QuasiFunctional(build_measure(specs[ry], pg), k)
        rho = QuasiFunctional(build_measure(specs[rx], pg), k)
        equal = (eta.mu.is_measure and rho.mu.is_measure) or eta.mu.point_mass is not None \
            or rho.mu.point_mass is not None
        v = fubini_verdict(eta, rho, cfg["trials"], seed)
        name = f"eta={ry}, rho={rx}"
        rep.check(f"{name}: orders agree", "Equal" if equal else "Unequal", v.conclusion)
        rep.check(f"{name}: prediction confirmed numerically", True,
                  v.details["prediction_confirmed"], v.tolerance)


@scenario("point-mass-commute", "(nu x mu) = (mu x nu) when one side is a point mass",
          measures={"x": POINT_MASS, "y": THREE_POINT}, trials=40)
def _point_mass_commute(cfg, rep):
    _, pg = grids(cfg)
    seed = cfg["seed"]
    eta, rho = _pair(cfg, pg)
    it = IteratedFunctional(eta, rho)
    regions = region_family(pg, pg, seed, cfg["trials"])
    gap = max(abs(product_tm(it, a) - product_tm(it.swapped(), a)) for a in regions)
    rep.check(f"product TMs agree on {len(regions)} product regions", 0.0, gap)
    if rho.mu.point_mass is not None or eta.mu.point_mass is not None:
        lemma = max(abs(a - b) for a, b in (point_mass_identity(it, r) for r in regions
                                            if r.kind is OPEN))
        rep.check("(nu x mu)(U) = c nu(U_x0) on the open regions", 0.0, lemma)
    family = regression_family(pg, pg, seed, cfg["trials"])
    gap = max(abs(evaluate(it, f)[0] - evaluate(it.swapped(), f)[0]) for f in family)
    rep.check(f"iterated functionals agree on {len(family)} tensor sums", 0.0, gap)


@scenario("rectangle-family", "a (mu x nu) + (m - a)(nu x mu): equal on rectangles, distinct on A",
          measures={"x": THREE_POINT, "y": THREE_POINT}, trials=40)
def _rectangle_family(cfg, rep):
    _, pg = grids(cfg)
    eta, rho = _pair(cfg, pg)
    m = rho.mu.total * eta.mu.total
    coefficients = cfg.get("coefficients") or list(np.linspace(0.0, m, 5))
    members = rectangle_family(eta, rho, coefficients)
    w = set_witness(eta, rho, cfg["seed"])
    v = check_rectangle_family(members, cfg["seed"], cfg["trials"], w["A"])
    rep.check(f"members agree on {cfg['trials']} rectangles", 0.0, v.details["rectangle_spread"])
    rep.check("(mu x nu)(A) = m and (nu x mu)(A) = 0", [m, 0.0], [w["rho_eta"], w["eta_rho"]])
    # so the member with coefficient a is worth a 1 + (m - a) 0 = a on A
    rep.check("member values on the witness A equal their coefficients",
              [float(a) for a in coefficients], v.details["witness_values"])
    rep.check("number of distinct values on A", len(set(float(a) for a in coefficients)),
              len(set(v.details["witness_values"])))
