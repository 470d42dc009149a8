"""Delta classes, the torsion invariant theta, and Brauer obstruction classes.

A moduli datum is a primitive positive vector v of square 2n-2 in the rank-24
ambient lattice.  Its delta class is a vector delta in v-perp with
delta^2 = 2-2n, divisibility 2n-2 inside v-perp, and (delta - v)/(2n-2)
integral; theta is delta taken modulo (2n-2) v-perp and does not depend on
which delta was picked.
"""

from mukailat import (brauer_trivial, check_delta, divisibility, find_delta,
                      make_model, mukai_ambient, polarization_vector, theta,
                      theta_brauer, torsion_order)
from mukailat.model import enumerate_delta_candidates
from mukailat.pipeline import _algebraic_basis, embed_triple

L = mukai_ambient()

for n in (2, 3, 4):
    coords = [0] * 24
    coords[0], coords[1] = 1, -(n - 1)
    v = L.vector(coords)
    M = make_model(v)
    dc = find_delta(M)
    check_delta(M, dc.delta)
    th = theta(M, dc)
    print(f"n = {n}: v = e1 - {n - 1} f1, delta = {list(dc.delta.coords[:4])}..., "
          f"order(theta) = {torsion_order(th)}")

# choice independence: every delta class in a small search box yields the
# same theta
M2 = make_model(L.vector([1, -1] + [0] * 22))
ref = theta(M2, find_delta(M2))
others = 0
for d in enumerate_delta_candidates(M2, 3):
    assert theta(M2, d) == ref
    others += 1
print(f"\nn = 2: {others} delta classes enumerated, all with the same theta")

# ---------------------------------------------------------------------------
# Brauer classes: [theta_v] is trivial exactly when v has divisibility 1 in
# the designated algebraic sublattice

d = 3
H = polarization_vector(L, d)
alg = _algebraic_basis(L, d)
print(f"\nalgebraic sublattice = <e1, f1, H> with H^2 = {H.norm()}")
for triple in ((1, 0, -1), (2, 1, 1), (3, 0, -1), (2, 3, 2)):
    v = embed_triple(L, d, triple)
    M = make_model(v, algebraic=alg)
    rep = theta_brauer(M, find_delta(M))
    div_v = divisibility(v, sublattice=alg)
    print(f"  v = {triple}: n = {M.n}, div(v) = {div_v}, "
          f"[theta_v] trivial: {brauer_trivial(rep)}")
