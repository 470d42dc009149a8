import random
from math import gcd

import pytest

from mukailat import (build_standard, compose_all, eichler_transvection_in,
                      exp_map_in, identity, reflection)


@pytest.fixture
def rng():
    return random.Random(20260823)


def vec_plane(lat, coeffs):
    """Vector supported on the marked hyperbolic planes: coeffs = [(a,b), ...]."""
    coords = [0] * lat.rank
    for (e, f), (a, b) in zip(lat.hyperbolic_pairs, coeffs):
        coords[e] += a
        coords[f] += b
    return lat.vector(coords)


def random_primitive(lat, rng, lo=-6, hi=6):
    while True:
        c = [rng.randint(lo, hi) for _ in range(lat.rank)]
        g = 0
        for x in c:
            g = gcd(g, x)
        if g == 1:
            return lat.vector(c)


def random_plane_vector(lat, pair, rng, bound=2):
    """Integral vector orthogonal to the marked plane ``pair``."""
    w = [0] * lat.rank
    for j in range(lat.rank):
        if j not in pair:
            w[j] = rng.randint(-bound, bound)
    return lat.vector(w)


def random_word_isometry(lat, rng, length=6, bound=2, reflections=False):
    """Product of random transvections/exponentials (and -2 reflections)."""
    g = identity(lat)
    parts = []
    for _ in range(length):
        roll = rng.random()
        if reflections and roll < 0.2:
            # reflection in a fixed (-2)-vector e+f keeps things integral
            pair = lat.hyperbolic_pairs[rng.randrange(len(lat.hyperbolic_pairs))]
            u = [0] * lat.rank
            u[pair[0]], u[pair[1]] = 1, 1
            parts.append(reflection(lat.vector(u)))
            continue
        pair = lat.hyperbolic_pairs[rng.randrange(len(lat.hyperbolic_pairs))]
        b = random_plane_vector(lat, pair, rng, bound)
        maker = eichler_transvection_in if roll < 0.6 else exp_map_in
        parts.append(maker(lat, pair, b))
    if not parts:
        return g
    return compose_all(*parts)


@pytest.fixture(scope="session")
def mukai():
    return build_standard("Mukai")


@pytest.fixture(scope="session")
def k3():
    return build_standard("K3")
