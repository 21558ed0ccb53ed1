"""Two iterated products of the three-point measure with itself disagree
on an open set, so Fubini fails for topological measures.

The set is built from subadditivity witnesses: U, V with mu(U) = mu(V) = 0
but mu(U | V) = 1, and compacts C, K with the same pattern.
"""

from qmeas import QuasiFunctional, ThreePoint, fubini_verdict, lebesgue, unit_square
from qmeas.product import set_witness

g = unit_square(64)
rho = QuasiFunctional(ThreePoint(g), 256)
w = set_witness(rho, rho, 7)
print("mu(U), mu(V), mu(U|V):", rho.mu.eval(w["U"]), rho.mu.eval(w["V"]), rho.mu.eval(w["U"] | w["V"]))
print("(eta x rho)(A) =", w["eta_rho"], "  (rho x eta)(A) =", w["rho_eta"])

for name, q in (("lebesgue", QuasiFunctional(lebesgue(g), 256)), ("three-point", rho)):
    v = fubini_verdict(q, q, trials=40, rng_seed=3)
    print(f"{name:12s} -> {v.conclusion}  (prediction confirmed: {v.details['prediction_confirmed']})")
