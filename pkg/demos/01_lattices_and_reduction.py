"""Tour of the lattice layer: standard models, invariants, and Eichler reduction.

Everything here is exact integer arithmetic; every isometry produced along the
way carries a replayable word, so nothing has to be taken on faith.
"""

import random

from mukailat import (build_standard, discriminant_group, divisibility,
                      eichler_reduce, inner, is_primitive, replay_word,
                      signature)

# ---------------------------------------------------------------------------
# standard lattices

for kind in ("U", "E8_minus", "K3", "Mukai"):
    lat = build_standard(kind)
    print(f"{lat.label:8s} rank {lat.rank:2d}  signature {signature(lat)}  "
          f"disc {lat.det()}")

# the K3^[n] lattices pick up a rank-one <2-2n> part and a cyclic
# discriminant group of order 2n-2
for n in (2, 3, 5):
    K = build_standard("K3n", n)
    dg = discriminant_group(K)
    print(f"K3n({n}): discriminant group Z/{dg.invariant_factors[0]}")

# ---------------------------------------------------------------------------
# Eichler reduction: any primitive vector of divisibility 1 can be moved onto
# the first hyperbolic plane in the form e1 - (x^2/2) f1

L = build_standard("Mukai")
rng = random.Random(0)

for _ in range(3):
    while True:
        coords = [rng.randint(-5, 5) for _ in range(24)]
        x = L.vector(coords)
        if not x.is_zero() and is_primitive(x):
            break
    word, canon = eichler_reduce(x)
    print(f"\nx = {list(x.coords)}")
    print(f"  x^2 = {x.norm()}, moves = {len(word)}")
    print(f"  canonical form = {[c for c in canon.coords[:4]]}... "
          f"(e1 {'-' if x.norm() > 0 else '+'} {abs(x.norm()) // 2} f1)")
    # replay the word from scratch and confirm it reproduces the reduction
    g = replay_word(L, word)
    assert g(x).coords == canon.coords
    print("  replay check: ok")

# vectors of divisibility > 1 cannot reach that form; the library refuses
# rather than returning something plausible-looking
K = build_standard("K3n", 3)
delta = K.basis_vector(K.rank - 1)
print(f"\nK3n(3) exceptional generator: square {delta.norm()}, "
      f"divisibility {divisibility(delta)}")
try:
    eichler_reduce(delta)
except Exception as exc:
    print(f"  eichler_reduce: {exc}")
