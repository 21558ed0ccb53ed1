"""The three-point topological measure: a set gets weight 1 when its solid
pieces hold at least two of three fixed points, and 0 otherwise.

It passes every topological-measure axiom, yet it is not subadditive, so
no measure can represent it.
"""

from qmeas import COMPACT, OPEN, Region, ThreePoint, classify, subadditivity_verdict, unit_square
from qmeas import lebesgue, verify_tm_axioms

g = unit_square(64)
m = ThreePoint(g)
print("points (cells):", m.cells)

bar = Region.rectangle(g, 0.1, 0.9, 0.4, 0.6)
left = Region.rectangle(g, 0.1, 0.4, 0.4, 0.6)
print("bar through p1 and p2     ->", m.eval(bar))
print("box around p1 only        ->", m.eval(left))

# a ring whose hole swallows p1 and p2: the hull counts 1 and the hole takes it back
ring = Region.rectangle(g, 0.05, 0.95, 0.05, 0.95, COMPACT).difference(
    Region.rectangle(g, 0.15, 0.85, 0.3, 0.7, OPEN))
print("ring around p1, p2        ->", m.eval(ring))

two = Region.disk(g, (0.25, 0.5), 0.1) | Region.disk(g, (0.75, 0.5), 0.1)
print("two disks, one point each ->", m.eval(two), "  complement ->", m.eval(two.complement()))

v = verify_tm_axioms(m, trials=24, rng_seed=5)
print("axioms:", v.conclusion)
s = subadditivity_verdict(m, trials=100, rng_seed=0)
print("subadditive:", s.holds, " witness values (U, V, U|V):", s.witness["values"])
print("classification:", classify(m, 40, 1), " vs lebesgue:", classify(lebesgue(g), 40, 1))
