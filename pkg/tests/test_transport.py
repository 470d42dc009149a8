import pytest

from mukailat import (ReductionError, TransportError, bfs_reduce,
                      build_standard, direct_sum, eichler_reduce, identity,
                      reduce_vector, replay_word, transport_pair)
from conftest import random_primitive, random_word_isometry, vec_plane


@pytest.fixture(scope="module")
def uu():
    U = build_standard("U")
    return direct_sum(U, U)


def test_reduce_canonical_form_uu(uu, rng):
    for _ in range(100):
        x = random_primitive(uu, rng, -9, 9)
        word, can = eichler_reduce(x)
        # canonical form e1 - (x^2/2) f1, supported on the first plane
        assert can.coords[2] == can.coords[3] == 0
        assert can.coords[0] == 1 and can.coords[1] == -x.norm() // 2
        g = replay_word(uu, word)
        assert g(x).coords == can.coords


def test_reduce_canonical_form_mukai(mukai, rng):
    for _ in range(40):
        x = random_primitive(mukai, rng)
        word, can = eichler_reduce(x)
        assert set(i for i, c in enumerate(can.coords) if c) <= {0, 1}
        assert can.coords[0] == 1 and can.coords[1] == -x.norm() // 2
        assert replay_word(mukai, word)(x).coords == can.coords


def test_reduce_large_coefficients(mukai, rng):
    for _ in range(5):
        x = random_primitive(mukai, rng, -1000, 1000)
        word, can = eichler_reduce(x)
        assert can.coords[0] == 1


def test_reduce_fixed_points(mukai):
    for n in (2, 3, 5):
        x = vec_plane(mukai, [(1, -(n - 1))])
        word, can = eichler_reduce(x)
        assert can.coords == x.coords


def test_reduce_rejects_imprimitive(uu):
    with pytest.raises(ReductionError):
        eichler_reduce(uu.vector([2, 0, 2, 0]))


def test_reduce_high_divisibility_honest_failure():
    K = build_standard("K3n", 3)
    delta = K.basis_vector(K.rank - 1)      # divisibility 4
    with pytest.raises(ReductionError):
        eichler_reduce(delta)
    # the generic reducer still produces a replayable residual form
    r = reduce_vector(delta)
    assert replay_word(K, r.word)(delta).coords == r.canonical.coords


def test_bfs_oracle_agrees_with_reduce(uu, rng):
    # cross-check word-based reduction against a blind BFS on small inputs
    checked = 0
    for _ in range(40):
        x = random_primitive(uu, rng, -2, 2)
        word, can = eichler_reduce(x)
        found = bfs_reduce(x, can, coeff_bound=1, max_depth=3)
        if found is None:
            continue    # BFS depth bound too small for this input
        assert replay_word(uu, found)(x).coords == can.coords
        checked += 1
    assert checked >= 10


def test_transport_pair_conjugated(mukai, rng):
    n, r = 2, 3
    x1 = vec_plane(mukai, [(1, -(n - 1))])
    x2 = vec_plane(mukai, [(1, -(n - 1 - r)), (-1, r)])
    for _ in range(8):
        h = random_word_isometry(mukai, rng, length=5)
        a1, a2 = h(x1), h(x2)
        g = transport_pair(a1, x1, a2, x2)
        assert g(a1).coords == x1.coords and g(a2).coords == x2.coords


def test_transport_pair_independent_words(mukai, rng):
    n, r = 2, 3
    x1 = vec_plane(mukai, [(1, -(n - 1))])
    x2 = vec_plane(mukai, [(1, -(n - 1 - r)), (-1, r)])
    succ = 0
    for _ in range(6):
        h1 = random_word_isometry(mukai, rng, length=4, bound=1)
        h2 = random_word_isometry(mukai, rng, length=4, bound=1)
        try:
            g = transport_pair(h1(x1), h2(x1), h1(x2), h2(x2))
        except TransportError:
            continue    # step bound exceeded: honest failure, not silence
        assert g(h1(x1)).coords == h2(x1).coords
        assert g(h1(x2)).coords == h2(x2).coords
        succ += 1
    assert succ >= 3
