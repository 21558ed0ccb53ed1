"""A one-parameter family of distinct topological measures on the square
that all agree on rectangles, so rectangles do not pin down a product.
"""

from qmeas import QuasiFunctional, ThreePoint, unit_square
from qmeas.product import check_rectangle_family, rectangle_family

g = unit_square(32)
q = QuasiFunctional(ThreePoint(g), 256)
members = rectangle_family(q, q, [0.0, 0.25, 0.5, 0.75, 1.0])
v = check_rectangle_family(members, 3, 20)
print(v.conclusion)
print("values on the separating set:", v.details["witness_values"])
