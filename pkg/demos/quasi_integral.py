"""Quasi-integrals through the layer-cake ladder.

For a measure the quasi-integral is the ordinary integral. For the
three-point measure it picks the median of the three point values when
the superlevel sets are solid, and it stays linear only along each
singly generated subalgebra.
"""

import numpy as np

from qmeas import (CompactFunc, QuasiFunctional, ThreePoint, compose, integrate_generator,
                   lebesgue, quasi_integral, unit_square)
from qmeas.quasi import estimate
from qmeas.sampling import random_function, random_phi

g = unit_square(64)
leb = QuasiFunctional(lebesgue(g), 512)
tp = QuasiFunctional(ThreePoint(g), 512)

x = CompactFunc.coordinate(g, 0)
print("lebesgue(x) =", quasi_integral(leb, x), " +/-", leb.tolerance_for(x))

X, Y = g.centers()
cone = CompactFunc(g, np.maximum(0.0, 0.6 - np.hypot(X - 0.3, Y - 0.5)))
point_values = [cone.samples[c] for c in tp.mu.cells]
print("three-point(cone) =", round(quasi_integral(tp, cone), 4),
      " median of point values =", round(float(np.median(point_values)), 4))
e = estimate(tp, cone)
print("  error budget:", e)

# rho(phi o f) as an integral of phi against the distribution of f
rng = np.random.default_rng(8)
f = random_function(g, rng, signed=True)
phi = random_phi(rng, (min(f.min, 0.0), max(f.max, 0.0)))
print("generator form:", round(integrate_generator(tp, f, phi), 6),
      " direct:", round(quasi_integral(tp, compose(phi, f)), 6))

# additivity fails across unrelated functions
a = random_function(g, rng, signed=True)
b = random_function(g, rng, signed=True)
print("rho(a + b) - rho(a) - rho(b) =", round(tp(a + b) - tp(a) - tp(b), 4))
