"""Quasi-integrals ``rho(f) = integral of id dm_f`` and their classifiers.

``m_f`` is the Stieltjes measure of ``F(t) = mu({f > t})``.  On a grid
``F`` is a step function jumping only at sample values, so ``m_f`` is a
finite sum of atoms.  :func:`distribution` samples ``F`` on a uniform
threshold ladder; a bin holding one distinct sample value places its
mass exactly there, and when only a few bins hold mass spread over
several values those bins are resolved exactly as well.  Any remaining
bins use the midpoint rule.
"""

from __future__ import annotations

from collections import OrderedDict
from dataclasses import dataclass

import numpy as np

from .errors import DomainMismatch, GridMismatch, InconsistentIntegral, NotEnoughValues
from .measures import EXACT, TopMeasure, Verdict, classify
from .sampling import random_disjoint_pair, random_function, random_phi
from .space import COMPACT, OPEN, CompactFunc, Phi, PhiCurve, PhiFunction, Region, compose

LADDER_SAFETY = 5.0
CACHE_SIZE = 32


@dataclass(frozen=True)
class DistributionFn:
    """``values[k] = mu({f > thresholds[k]})``."""

    thresholds: np.ndarray
    values: np.ndarray

    @property
    def width(self) -> float:
        return float(self.thresholds[1] - self.thresholds[0]) if self.thresholds.size > 1 else 0.0

    def is_antitone(self, slack: float = 0.0) -> bool:
        return bool((np.diff(self.values) <= slack).all())


@dataclass(frozen=True)
class StieltjesAtoms:
    """Atoms of ``m_f``; ``error`` bounds the displacement cost of the
    atoms placed at bin midpoints."""

    locations: np.ndarray
    masses: np.ndarray
    width: float
    error: float = 0.0

    @property
    def total_mass(self) -> float:
        return float(self.masses.sum())

    def integrate(self, fn=None) -> float:
        """``sum fn(location) * mass``; ``fn`` defaults to the identity."""
        loc = self.locations if fn is None else fn(self.locations)
        return float(np.dot(loc, self.masses))


@dataclass(frozen=True)
class Estimate:
    """A discrete quasi-integral with its a-posteriori error terms.

    ``ladder_error`` is ``sum |mass| w / 2`` over atoms the ladder could
    only place at a bin midpoint.  ``connectivity_error`` is
    ``integral |F_open(t) - F_compact(t)| dt``: how much the value moves
    if every superlevel mask is read with the other connectivity.  It
    vanishes for measures, which never look at connectivity.
    """

    value: float
    ladder_error: float = 0.0
    connectivity_error: float = 0.0

    @property
    def error(self) -> float:
        return self.ladder_error + self.connectivity_error


@dataclass(frozen=True, eq=False)
class QuasiFunctional:
    """The quasi-integral of a topological measure.

    ``thresholds`` is the ladder size K; ``tolerance``, when set,
    replaces every automatic error budget; ``max_resolved`` bounds how
    many multi-valued bins are resolved exactly.
    """

    mu: TopMeasure
    thresholds: int = 512
    tolerance: float | None = None
    max_resolved: int = 4

    def __post_init__(self):
        if self.thresholds < 8:
            raise ValueError("need at least 8 thresholds")
        object.__setattr__(self, "_cache", OrderedDict())

    def __getstate__(self):
        state = dict(self.__dict__)
        state["_cache"] = OrderedDict()
        return state

    def __setstate__(self, state):
        self.__dict__.update(state)

    @property
    def grid(self):
        return self.mu.grid

    def __call__(self, f: CompactFunc) -> float:
        return quasi_integral(self, f)

    def scaled(self, c: float) -> "QuasiFunctional":
        return QuasiFunctional(c * self.mu, self.thresholds, self.tolerance, self.max_resolved)

    def default_tolerance(self, f: CompactFunc) -> float:
        """``5 (||f|| / K + Lip(f) h) mu(X)``, for comparisons with
        continuum values."""
        if self.tolerance is not None:
            return self.tolerance
        return LADDER_SAFETY * (f.sup_norm / self.thresholds + f.lipschitz_step) * abs(self.mu.total)

    def _floor(self, f: CompactFunc) -> float:
        return EXACT * max(1.0, abs(self.mu.total)) * max(1.0, f.sup_norm)

    def tolerance_for(self, *fs: CompactFunc) -> float:
        """Error budget for comparing discrete quasi-integrals of ``fs``:
        five times each estimate's own error, plus rounding slack."""
        if self.tolerance is not None:
            return self.tolerance
        return sum(LADDER_SAFETY * estimate(self, f).error + self._floor(f) for f in fs)

    def rasterization(self, f: CompactFunc, *phis: Phi) -> float:
        """``5 Lip(phi) Lip(f) h`` per non-monotone ``phi``, times the
        connectivity-dependent mass.

        Between neighbouring cells ``f`` may skip a band of levels; then a
        level band of ``phi o f`` no longer separates the grid as its
        continuum counterpart would.  Monotone generators only produce
        superlevel or sublevel sets of ``f``, and measures never look.
        """
        if self.tolerance is not None:
            return 0.0
        lip = sum(p.lipschitz for p in phis if not p.is_monotone)
        return LADDER_SAFETY * lip * f.lipschitz_step * self.mu.topological_mass

    def generator_tolerance(self, f: CompactFunc, phi: Phi,
                            composed: CompactFunc | None = None) -> float:
        """Budget for ``rho(phi o f)`` against a value computed from ``m_f``;
        pass ``composed`` when ``phi o f`` was already integrated."""
        if self.tolerance is not None:
            return self.tolerance
        composed = compose(phi, f) if composed is None else composed
        return (self.tolerance_for(composed) + phi.lipschitz * self.tolerance_for(f)
                + self.rasterization(f, phi))


def _check(q: QuasiFunctional, f: CompactFunc):
    if f.grid != q.grid:
        raise GridMismatch("function and measure live on different grids")


def _ladder(q: QuasiFunctional, f: CompactFunc) -> np.ndarray:
    lo, hi = f.min, f.max
    k = q.thresholds
    w = (hi - lo) / (k - 2)
    ts = lo - w + w * np.arange(k + 1)
    ts[1], ts[k - 1] = lo, hi
    return ts


def distribution(q: QuasiFunctional, f: CompactFunc) -> DistributionFn:
    """``F`` on ``K + 1`` thresholds from one bin below ``min f`` to one
    bin above ``max f``."""
    _check(q, f)
    if f.min == f.max:
        ts = np.array([f.min - 1.0, f.min, f.min + 1.0])
    else:
        ts = _ladder(q, f)
    return DistributionFn(ts, q.mu.distribution_values(f.samples, ts))


def atoms(q: QuasiFunctional, f: CompactFunc, dist: DistributionFn | None = None) -> StieltjesAtoms:
    """The atoms of ``m_f``: exact where the ladder can pin them down,
    bin midpoints otherwise."""
    dist = dist or distribution(q, f)
    ts, F = dist.thresholds, dist.values
    samples = f.samples
    mass = F[:-1] - F[1:]                      # bin k is (ts[k], ts[k + 1]]
    values = np.unique(samples)
    owner = np.clip(np.searchsorted(ts, values, side="left") - 1, 0, mass.size - 1)
    count = np.bincount(owner, minlength=mass.size)
    first = np.full(mass.size, np.nan)
    first[owner[::-1]] = values[::-1]

    locations, masses = [], []
    single = (mass != 0) & (count == 1)
    locations.append(first[single])
    masses.append(mass[single])

    spread = np.flatnonzero((mass != 0) & (count > 1))
    midpoint = (mass != 0) & (count == 0)      # only if mu is not a function of the set
    if spread.size <= q.max_resolved:
        for b in spread:
            vs = values[owner == b]
            Fv = q.mu.distribution_values(samples, np.concatenate([[ts[b]], vs]))
            locations.append(vs)
            masses.append(Fv[:-1] - Fv[1:])
    else:
        midpoint[spread] = True
    locations.append(0.5 * (ts[:-1][midpoint] + ts[1:][midpoint]))
    masses.append(mass[midpoint])
    error = 0.5 * float(np.abs(mass[midpoint] * np.diff(ts)[midpoint]).sum())
    return StieltjesAtoms(np.concatenate(locations), np.concatenate(masses), dist.width, error)


def saddle_intervals(samples: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Threshold intervals ``[lo, hi)`` on which some 2x2 block of
    ``{f > t}`` is a checkerboard.

    Only there can 4- and 8-connectivity disagree, for the mask or for
    its complement.
    """
    a, b = samples[:-1, :-1], samples[:-1, 1:]
    c, d = samples[1:, :-1], samples[1:, 1:]
    main_lo, main_hi = np.maximum(b, c), np.minimum(a, d)     # a, d on; b, c off
    anti_lo, anti_hi = np.maximum(a, d), np.minimum(b, c)
    lo = np.concatenate([main_lo.ravel(), anti_lo.ravel()])
    hi = np.concatenate([main_hi.ravel(), anti_hi.ravel()])
    keep = lo < hi
    return lo[keep], hi[keep]


def connectivity_error(q: QuasiFunctional, f: CompactFunc) -> float:
    """``integral |F_open - F_compact| dt``, exact over the sample values."""
    if q.mu.topological_mass == 0 or f.is_zero:
        return 0.0
    lo, hi = saddle_intervals(f.samples)
    if lo.size == 0:
        return 0.0
    vals = np.unique(f.samples)
    # sets are constant on [vals[i], vals[i + 1]); mark the runs inside a saddle interval
    cover = np.zeros(vals.size + 1, int)
    np.add.at(cover, np.searchsorted(vals, lo), 1)
    np.add.at(cover, np.searchsorted(vals, hi), -1)
    inside = np.flatnonzero(np.cumsum(cover)[:-1] > 0)
    inside = inside[inside < vals.size - 1]
    if inside.size == 0:
        return 0.0
    ts = vals[inside]
    fo = q.mu.distribution_values(f.samples, ts, OPEN)
    fc = q.mu.distribution_values(f.samples, ts, COMPACT)
    return float(np.dot(np.abs(fo - fc), vals[inside + 1] - ts))


def _one_ladder(q: QuasiFunctional, f: CompactFunc) -> Estimate:
    if f.is_zero:
        return Estimate(0.0)
    at = atoms(q, f)
    return Estimate(at.integrate(), at.error, connectivity_error(q, f))


def _estimate(q: QuasiFunctional, f: CompactFunc) -> Estimate:
    if f.is_nonnegative:
        return _one_ladder(q, f)
    pos, neg = _one_ladder(q, f.positive_part()), _one_ladder(q, f.negative_part())
    value = pos.value - neg.value
    direct = _one_ladder(q, f)
    out = Estimate(value, pos.ladder_error + neg.ladder_error,
                   pos.connectivity_error + neg.connectivity_error)
    tol = LADDER_SAFETY * (out.error + direct.ladder_error) + 2 * q._floor(f)
    if q.tolerance is not None:
        tol = max(tol, q.tolerance)
    if abs(value - direct.value) > tol:
        raise InconsistentIntegral(
            f"rho(f+) - rho(f-) = {value:.12g} but the two-sided ladder gives {direct.value:.12g}")
    return out


def estimate(q: QuasiFunctional, f: CompactFunc) -> Estimate:
    """``rho(f)`` with its error terms; recent results are cached."""
    _check(q, f)
    cache = q._cache
    hit = cache.get(id(f))
    if hit is not None and hit[0] is f:
        cache.move_to_end(id(f))
        return hit[1]
    out = _estimate(q, f)
    cache[id(f)] = (f, out)
    if len(cache) > CACHE_SIZE:
        cache.popitem(last=False)
    return out


def quasi_integral(q: QuasiFunctional, f: CompactFunc) -> float:
    """``rho(f)``; for signed ``f`` the value ``rho(f+) - rho(f-)`` is
    returned after checking it against the two-sided ladder."""
    return estimate(q, f).value


def integrate_generator(q: QuasiFunctional, f: CompactFunc, phi: Phi) -> float:
    """``integral of phi dm_f``, using the atoms of ``f`` itself."""
    _check(q, f)
    lo, hi = min(f.min, 0.0), max(f.max, 0.0)
    if not phi.covers(f.min, f.max):
        raise DomainMismatch(f"range [{f.min:.6g}, {f.max:.6g}] leaves domain {phi.domain}")
    if f.is_zero:
        return 0.0
    a, b = phi.domain
    at = atoms(q, f)
    return at.integrate(lambda s: phi._apply(np.clip(s, max(a, lo), min(b, hi))))


def qi2_residual(q: QuasiFunctional, f: CompactFunc, phi: Phi, psi: Phi) -> tuple[float, float]:
    """``|rho((phi + psi) o f) - rho(phi o f) - rho(psi o f)|`` and its budget."""
    parts = (compose(phi + psi, f), compose(phi, f), compose(psi, f))
    a, b, c = (quasi_integral(q, g) for g in parts)
    return abs(a - b - c), q.tolerance_for(*parts) + q.rasterization(f, phi + psi, phi, psi)


# -- recovering mu from rho ---------------------------------------------


def recovery_ladder_open(q: QuasiFunctional, u: Region, ladder: int = 4) -> list[float]:
    """``rho(f_j)`` for ``j = ladder, ..., 1`` where ``f_j`` is 1 on ``u``
    eroded by ``j`` cells and supported in ``u``."""
    if u.kind is not OPEN:
        raise ValueError("recover_open needs an open region")
    out = []
    for j in range(ladder, 0, -1):
        inner = u.as_kind(COMPACT).erode(j)
        out.append(0.0 if inner.is_empty else quasi_integral(q, CompactFunc.plateau(inner, u)))
    return out


def recovery_ladder_compact(q: QuasiFunctional, k: Region, ladder: int = 4) -> list[float]:
    """``rho(g_j)`` for ``j = ladder, ..., 1`` where ``g_j`` is 1 on ``k``
    and supported in ``k`` dilated by ``j`` cells."""
    if k.kind is not COMPACT:
        raise ValueError("recover_compact needs a compact region")
    out = []
    for j in range(ladder, 0, -1):
        outer = k.as_kind(OPEN).dilate(j)
        out.append(0.0 if k.is_empty else quasi_integral(q, CompactFunc.plateau(k, outer)))
    return out


def recover_open(q: QuasiFunctional, u: Region, plateau_ladder: int = 4) -> float:
    """Estimate of ``sup rho(f)`` over ``0 <= f <= 1`` supported in ``u``."""
    return max(recovery_ladder_open(q, u, plateau_ladder), default=0.0)


def recover_compact(q: QuasiFunctional, k: Region, ladder: int = 4) -> float:
    """Estimate of ``inf rho(g)`` over ``g >= 1_k``."""
    return min(recovery_ladder_compact(q, k, ladder), default=0.0)


# -- classifiers ----------------------------------------------------------


def disjoint_unit_pair(q: QuasiFunctional, rng_seed: int = 0, attempts: int = 200):
    """Two functions with disjoint supports and ``rho = 1`` each.

    Draws disjoint compacts of positive measure, puts a plateau on each
    with separated supports, and divides by the quasi-integral.
    """
    label = classify(q.mu, 40, rng_seed)
    if label.label in ("Simple", "AlmostSimple"):
        raise NotEnoughValues(f"{q.mu!r} is {label}; it takes only two values")
    rng = np.random.default_rng(rng_seed)
    for _ in range(attempts):
        c1, c2 = random_disjoint_pair(q.grid, rng, COMPACT, gap=3)
        if q.mu.eval(c1) <= 0 or q.mu.eval(c2) <= 0:
            continue
        f1 = CompactFunc.plateau(c1, c1.as_kind(OPEN).dilate(1))
        f2 = CompactFunc.plateau(c2, c2.as_kind(OPEN).dilate(1))
        r1, r2 = quasi_integral(q, f1), quasi_integral(q, f2)
        if r1 > 0 and r2 > 0:
            return f1 / r1, f2 / r2
    raise NotEnoughValues("no pair of disjoint compacts of positive measure was found")


def _phi_pair(rng, f: CompactFunc):
    dom = (min(f.min, 0.0), max(f.max, 0.0))
    if dom[0] == dom[1]:
        dom = (-1.0, 1.0)
    return random_phi(rng, dom), random_phi(rng, dom)


def simplicity_verdict(q: QuasiFunctional, trials: int = 100, rng_seed: int = 0,
                       exhaustive: bool = False) -> Verdict:
    """Check three equivalent forms of simplicity on sampled ``f, phi, psi``.

    * ``m_f`` is concentrated within two ladder bins of ``rho(f)``;
    * ``rho(phi o f) = phi(rho(f))``;
    * ``rho((phi psi) o f) = rho(phi o f) rho(psi o f)``.

    Trial 0 is ``f(x, y) = x`` with ``phi(s) = s^2`` and ``psi = id``.
    Stops after the first failing trial unless ``exhaustive``.
    """
    rng = np.random.default_rng(rng_seed)
    names = ("concentration", "commutation", "multiplicativity")
    passed = dict.fromkeys(names, 0)
    witness, worst, worst_tol = None, 0.0, 0.0
    mass_tol = EXACT * max(1.0, abs(q.mu.total))
    for t in range(trials):
        if t == 0:
            f = CompactFunc.coordinate(q.grid, 0)
            dom = (min(f.min, 0.0), max(f.max, 0.0))
            phi = PhiFunction(np.square, dom)
            psi = PhiCurve.identity(*dom)
        else:
            f = random_function(q.grid, rng, signed=bool(t % 2))
            phi, psi = _phi_pair(rng, f)
        at = atoms(q, f)
        r = at.integrate()
        far = np.abs(at.locations - r) > 2 * at.width + EXACT * max(1.0, f.sup_norm)
        residuals = {
            "concentration": (float(np.abs(at.masses[far]).sum()), mass_tol),
        }
        fp, fq, fpq = compose(phi, f), compose(psi, f), compose(phi * psi, f)
        rp, rq, rpq = quasi_integral(q, fp), quasi_integral(q, fq), quasi_integral(q, fpq)
        phi_r = float(phi._apply(np.clip(r, *phi.domain)))
        residuals["commutation"] = (abs(rp - phi_r), q.generator_tolerance(f, phi, fp))
        ep, eq = q.tolerance_for(fp), q.tolerance_for(fq)
        ep += q.rasterization(f, phi)
        eq += q.rasterization(f, psi)
        tol = (q.tolerance_for(fpq) + q.rasterization(f, phi * psi)
               + abs(rq) * ep + abs(rp) * eq + ep * eq)
        residuals["multiplicativity"] = (abs(rpq - rp * rq), tol)
        for name, (res, tol) in residuals.items():
            if res <= tol:
                passed[name] += 1
            elif witness is None:
                witness = {"condition": name, "trial": t, "f": f, "phi": phi, "psi": psi,
                           "rho_f": r, "rho_phi_f": rp, "rho_psi_f": rq, "rho_phipsi_f": rpq}
                worst, worst_tol = res, tol
        if witness is not None and not exhaustive:
            trials = t + 1
            break
    details = {"trials": trials, "passed": passed}
    if witness is None:
        return Verdict("Simple", True, None, 0.0, 0.0, details)
    return Verdict("NotSimple", False, witness, worst, worst_tol, details)


def _separated_pair(q: QuasiFunctional, rng, signed: bool, first: bool):
    grid = q.grid
    if first:
        (x0, x1), (y0, y1) = grid.x_range, grid.y_range
        xm = 0.5 * (x0 + x1)
        a = Region.rectangle(grid, x0, xm - 0.1 * (x1 - x0), y0, y1, COMPACT)
        b = Region.rectangle(grid, xm + 0.1 * (x1 - x0), x1, y0, y1, COMPACT)
    else:
        a, b = random_disjoint_pair(grid, rng, COMPACT, gap=8)
    draws = []
    for _ in range(2):
        height = rng.uniform(0.2, 1.0) * (rng.choice([-1.0, 1.0]) if signed else 1.0)
        draws.append((height, int(rng.integers(1, 4))))
    (ha, ja), (hb, jb) = draws
    oa, ob = a.as_kind(OPEN).dilate(ja), b.as_kind(OPEN).dilate(jb)
    while not oa.isdisjoint(ob):
        # coarse grids: shorten the ramps until the supports separate again
        ja, jb = max(ja - 1, 0), max(jb - 1, 0)
        oa, ob = a.as_kind(OPEN).dilate(ja), b.as_kind(OPEN).dilate(jb)
    return [CompactFunc.plateau(a, oa, ha), CompactFunc.plateau(b, ob, hb)]


def almost_simple_verdict(q: QuasiFunctional, trials: int = 100, rng_seed: int = 0) -> Verdict:
    """Check ``rho(f) rho(g) = 0`` for sampled pairs with ``f g = 0``."""
    rng = np.random.default_rng(rng_seed)
    for t in range(trials):
        f, g = _separated_pair(q, rng, signed=bool(t % 2), first=(t == 0))
        assert not (f.samples * g.samples).any()
        rf, rg = quasi_integral(q, f), quasi_integral(q, g)
        ef, eg = q.tolerance_for(f), q.tolerance_for(g)
        tol = ef * (abs(rg) + eg) + eg * abs(rf)
        if abs(rf * rg) > tol:
            return Verdict("NotAlmostSimple", False,
                           {"f": f, "g": g, "rho_f": rf, "rho_g": rg, "trial": t},
                           abs(rf * rg), tol, {"trials": t + 1})
    return Verdict("AlmostSimple", True, None, 0.0, 0.0, {"trials": trials})


def continuity_check(q: QuasiFunctional, f: CompactFunc, g: CompactFunc) -> Verdict:
    """``|rho(f) - rho(g)| <= 2 ||f - g|| mu(K)`` with ``K`` the union of
    the supports, and the factor-1 bound when ``f, g >= 0``."""
    _check(q, f)
    _check(q, g)
    k = Region(q.grid, f.support.mask | g.support.mask, COMPACT)
    mu_k = q.mu.eval(k)
    gap = (f - g).sup_norm
    rf, rg = quasi_integral(q, f), quasi_integral(q, g)
    diff = abs(rf - rg)
    tol = q.tolerance_for(f, g)
    factor = 1.0 if (f.is_nonnegative and g.is_nonnegative) else 2.0
    bound = factor * gap * mu_k
    details = {"rho_f": rf, "rho_g": rg, "mu_K": mu_k, "sup_gap": gap, "factor": factor,
               "bound": bound}
    if diff > bound + tol:
        return Verdict("Violation", False, {"f": f, "g": g, **details}, diff - bound, tol, details)
    return Verdict("WithinBound", True, None, diff - bound, tol, details)
