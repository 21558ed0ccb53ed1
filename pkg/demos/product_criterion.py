"""When is the iterated product eta x rho itself a quasi-integral?

Exactly when eta is linear or rho is almost simple. Otherwise a tensor sum
F makes the product split g + h into eta(g) + eta(h), where eta is not
additive.
"""

import numpy as np

from qmeas import (QuasiFunctional, Scaled, ThreePoint, lebesgue, qi_criterion, t_transform,
                   two_of_three_simple, unit_square)

g = unit_square(32)
tp = QuasiFunctional(ThreePoint(g), 256)
leb = QuasiFunctional(lebesgue(g), 256)

v = qi_criterion(tp, leb, trials=40, rng_seed=7)
print("three-point x lebesgue:", v.conclusion, " residual", round(v.residual, 4), "+/-", round(v.tolerance, 4))
w = v.witness
print("  T_rho F equals g + h:", bool(np.allclose(t_transform(leb, w["F"]).samples, (w["g"] + w["h"]).samples)))

v = qi_criterion(tp, QuasiFunctional(Scaled(2.0, ThreePoint(g)), 256), trials=20, rng_seed=1)
print("three-point x 2*three-point:", v.conclusion)

v = two_of_three_simple(tp, tp, trials=6, rng_seed=2)
print("product of two simple functionals:", v.conclusion)
