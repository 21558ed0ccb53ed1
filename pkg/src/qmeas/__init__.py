"""Topological measures and quasi-integrals on discretized compact spaces.

``space`` holds grids, regions and sampled functions; ``measures`` the
topological measures and their axiom checks; ``quasi`` the
quasi-integral and its classifiers; ``product`` iterated integration and
product measures; ``lab`` the scenario runner behind the ``qmeas`` CLI.
"""

from .errors import QMeasError
from .measures import (ThreePoint, PointMass, GridMeasure, MeasureSum, Scaled, TopMeasure, Verdict,
                       classify, corrupted, lebesgue, subadditivity_verdict, verify_tm_axioms)
from .quasi import (QuasiFunctional, almost_simple_verdict, continuity_check, disjoint_unit_pair,
                    integrate_generator, quasi_integral, recover_compact, recover_open,
                    simplicity_verdict)
from .product import (IteratedFunctional, Order, fubini_verdict, iterated, product_tm,
                      qi_criterion, s_transform, t_transform, two_of_three_simple)
from .space import (COMPACT, OPEN, CompactFunc, Grid, PhiCurve, PhiFunction, ProductRegion, Region,
                    TensorFunc, compose, unit_square)

__all__ = [
    "COMPACT", "OPEN", "CompactFunc", "Grid", "GridMeasure", "IteratedFunctional", "MeasureSum",
    "Order", "PhiCurve", "PhiFunction", "PointMass", "ProductRegion", "QMeasError",
    "QuasiFunctional", "Region", "Scaled", "TensorFunc", "ThreePoint", "TopMeasure", "Verdict",
    "almost_simple_verdict", "classify", "compose", "continuity_check", "corrupted",
    "disjoint_unit_pair", "fubini_verdict", "integrate_generator", "iterated", "lebesgue",
    "product_tm", "qi_criterion", "quasi_integral", "recover_compact", "recover_open",
    "s_transform", "simplicity_verdict", "subadditivity_verdict", "t_transform",
    "two_of_three_simple", "unit_square", "verify_tm_axioms",
]
