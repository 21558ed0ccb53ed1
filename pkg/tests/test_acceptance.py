"""One test per acceptance criterion.

Most criteria read the rows of a single default-config run of
``qmeas run all`` (shared across this module); several also re-derive the
key numbers straight from the library.
"""

import re
import time

import numpy as np
import pytest

from qmeas import (IteratedFunctional, PointMass, QuasiFunctional, Region, ThreePoint,
                   unit_square)
from qmeas.product import check_rectangle_family, product_tm, rectangle_family, region_family, set_witness
from qmeas.space import COMPACT, OPEN, ProductRegion

from .conftest import full_run

pytestmark = pytest.mark.acceptance


def _rows(reports, scenario):
    return reports[scenario]["rows"]


def _row(reports, scenario, pattern):
    hits = [r for r in _rows(reports, scenario) if re.search(pattern, r["description"])]
    assert hits, f"no row matching {pattern!r} in {scenario}"
    return hits[0]


def _cases(row) -> int:
    m = re.search(r"\((\d+) cases", row["description"])
    return int(m.group(1)) if m else 0


def test_fubini_failure(suite_run, criterion):
    reports, *_ = suite_run
    g = unit_square(256)
    start = time.perf_counter()
    q = QuasiFunctional(ThreePoint(g), 512)
    w = set_witness(q, q, 7)
    elapsed = time.perf_counter() - start
    rows_ok = reports["fubini-failure"]["pass"]
    ok = w["eta_rho"] == 0.0 and w["rho_eta"] == 1.0 and elapsed <= 10.0 and rows_ok
    criterion(ok, f"(nu x mu)(A)={w['eta_rho']} (mu x nu)(A)={w['rho_eta']} in {elapsed:.2f}s")


def test_rectangle_identities(suite_run, criterion):
    reports, *_ = suite_run
    rows = _rows(reports, "product-formulas")
    rect = [r for r in rows if "X x Y" in r["description"] or "A x B" in r["description"]]
    simple = [r for r in rect if "lebesgue" not in r["description"]]
    # exact for simple and point-mass pairs, recomputed directly at n=256
    g = unit_square(256)
    pm, tp = PointMass(g, (0.3, 0.6)), ThreePoint(g)
    it = IteratedFunctional(QuasiFunctional(pm, 512), QuasiFunctional(tp, 512))
    rng = np.random.default_rng(7)
    gap = 0.0
    for k in range(40):
        x0, x1, y0, y1 = np.sort(rng.uniform(0, 1, 2)).tolist() + np.sort(rng.uniform(0, 1, 2)).tolist()
        kind = (OPEN, COMPACT)[k % 2]
        a = Region.rectangle(g, x0, x1, y0, y1, kind)
        b = Region.disk(g, rng.uniform(0.2, 0.8, 2), rng.uniform(0.1, 0.5), kind)
        gap = max(gap, abs(product_tm(it, ProductRegion.rectangle(a, b)) - tp.eval(a) * pm.eval(b)))
    ok = all(r["pass"] for r in rect) and all(r["actual"] == r["expected"] for r in simple) and gap == 0.0
    criterion(ok, f"{len(rect)} report rows, direct gap {gap}")


def test_point_mass_commutation(suite_run, criterion):
    reports, *_ = suite_run
    rows = _rows(reports, "point-mass-commute")
    g = unit_square(64)
    it = IteratedFunctional(QuasiFunctional(PointMass(g, (0.3, 0.6)), 256),
                            QuasiFunctional(ThreePoint(g), 256))
    gap = max(abs(product_tm(it, a) - product_tm(it.swapped(), a)) for a in region_family(g, g, 7, 40))
    ok = all(r["pass"] and r["actual"] == 0.0 for r in rows) and gap == 0.0
    criterion(ok, f"region and function gaps {[r['actual'] for r in rows]}, direct {gap}")


def test_qi_criterion(suite_run, criterion):
    reports, *_ = suite_run
    res = _row(reports, "qi-criterion", "additivity residual of eta x rho")
    qualifying = [r for r in _rows(reports, "qi-criterion") if "QI2 residual" in r["description"]]
    ok = (abs(res["actual"] - 1.0) <= 0.02 and res["pass"]
          and len(qualifying) == 2 and all(r["pass"] and _cases(r) == 100 for r in qualifying))
    criterion(ok, f"residual {res['actual']}, qualifying pairs {[_cases(r) for r in qualifying]}")


def test_representation(suite_run, criterion):
    reports, *_ = suite_run
    rows = _rows(reports, "representation")
    gen = [r for r in rows if "integral phi dm_f" in r["description"]]
    moments = [r for r in rows if r["description"].startswith("Lebesgue")]
    ok = (len(gen) == 5 and all(r["pass"] and _cases(r) == 100 for r in gen)
          and len(moments) == 3 and all(r["pass"] for r in moments)
          and all(abs(r["actual"] - r["expected"]) <= 0.01 * r["expected"] for r in moments))
    criterion(ok, f"{len(gen)} variants x 100 cases; moments {[r['actual'] for r in moments]}")


def test_simplicity(suite_run, criterion):
    reports, *_ = suite_run
    tp = _row(reports, "simplicity", "^three-point: concentration")
    leb = _row(reports, "simplicity", "^lebesgue: concentration")
    wit = _row(reports, "simplicity", "^lebesgue: failing condition")
    ok = (tp["actual"] == "Simple" and "(100 trials)" in tp["description"]
          and leb["actual"] == "NotSimple" and wit["pass"])
    criterion(ok, f"three-point {tp['actual']}, lebesgue {leb['actual']} with witness")


def test_almost_simple(suite_run, criterion):
    reports, *_ = suite_run
    rows = _rows(reports, "almost-simple")
    scaled = [r for r in rows if "disjoint supports" in r["description"] and r["description"].startswith("Scaled")]
    leb = _row(reports, "almost-simple", "^y: disjoint")
    wit = _row(reports, "almost-simple", "^y: witness")
    ok = (len(scaled) == 3 and all(r["actual"] == "AlmostSimple" for r in scaled)
          and leb["actual"] == "NotAlmostSimple" and wit["pass"] and reports["almost-simple"]["pass"])
    criterion(ok, f"c in 0.5, 2, 3 -> {[r['actual'] for r in scaled]}; lebesgue {leb['actual']}")


def test_continuity(suite_run, criterion):
    reports, *_ = suite_run
    rows = _rows(reports, "continuity")
    per_role = {}
    for r in rows:
        role = r["description"].split(":")[0]
        n = int(re.search(r"over (\d+)", r["description"]).group(1))
        per_role[role] = per_role.get(role, 0) + n
    ok = (all(r["actual"] == 0 for r in rows) and len(per_role) == 5
          and all(n == 200 for n in per_role.values()))
    criterion(ok, f"pairs per variant {per_role}, violations {sum(r['actual'] for r in rows)}")


def test_recovery(suite_run, criterion):
    reports, *_ = suite_run
    rows = _rows(reports, "recovery")
    leb = _row(reports, "recovery", "^lebesgue: recovery gap")
    tp = _row(reports, "recovery", "^three-point: recovery gap")
    ok = all(r["pass"] for r in rows) and leb["actual"] <= 0.02 and tp["actual"] == 0.0
    criterion(ok, f"lebesgue gap {leb['actual']}, three-point gap {tp['actual']}")


def test_two_of_three(suite_run, criterion):
    reports, *_ = suite_run
    label = _row(reports, "two-of-three", "two simple functionals")
    scaling = [r for r in _rows(reports, "two-of-three") if "rho) -" in r["description"]]
    ok = (label["actual"] == "ProductSimple" and reports["two-of-three"]["pass"]
          and scaling and all(r["pass"] and _cases(r) == 40 for r in scaling))
    criterion(ok, f"{label['actual']}, scaling rows {len(scaling)}")


def test_rectangle_family(suite_run, criterion):
    reports, *_ = suite_run
    g = unit_square(32)
    q = QuasiFunctional(ThreePoint(g), 256)
    members = rectangle_family(q, q, np.linspace(0.0, 1.0, 5))
    v = check_rectangle_family(members, 7, 40)
    values = v.details["witness_values"]
    ok = (v.holds and v.details["rectangle_spread"] == 0.0
          and values == [0.0, 0.25, 0.5, 0.75, 1.0] and reports["rectangle-family"]["pass"])
    criterion(ok, f"witness values {values}")


def test_determinism_and_runtime(suite_run, tmp_path, criterion):
    reports, first, elapsed, code = suite_run
    _, second, _, code2 = full_run(tmp_path / "second.json")
    ok = code == 0 and code2 == 0 and first == second and len(first) > 0 and elapsed <= 300
    criterion(ok, f"identical={first == second}, exit codes {code}/{code2}, first run {elapsed:.0f}s")
