import json
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mukailat import (K3Input, LatticeError, build_standard, decide,
                      certificate_from_json, certificate_to_json,
                      dumps_certificate, eichler_transvection_in,
                      isometry_from_json, isometry_to_json, lattice_from_json,
                      lattice_to_json, loads_certificate, vector_from_json,
                      vector_to_json, verify_certificate)
from conftest import random_word_isometry


def test_lattice_round_trip():
    for kind in ("U", "K3", "Mukai"):
        lat = build_standard(kind)
        obj = json.loads(json.dumps(lattice_to_json(lat)))
        back = lattice_from_json(obj)
        assert back == lat
        assert back.hyperbolic_pairs == lat.hyperbolic_pairs


@settings(max_examples=40, deadline=None)
@given(st.lists(st.integers(-10 ** 6, 10 ** 6), min_size=2, max_size=2))
def test_integral_vector_round_trip(coords):
    U = build_standard("U")
    x = U.vector(coords)
    assert vector_from_json(vector_to_json(x)) == x


@settings(max_examples=40, deadline=None)
@given(st.lists(st.fractions(min_value=-100, max_value=100, max_denominator=97),
                min_size=2, max_size=2))
def test_rational_vector_round_trip(coords):
    U = build_standard("U")
    x = U.rational_vector(coords)
    y = vector_from_json(vector_to_json(x))
    assert tuple(Fraction(c) for c in y.coords) == x.coords


def test_isometry_round_trip(mukai, rng):
    g = random_word_isometry(mukai, rng, length=5, reflections=True)
    h = isometry_from_json(json.loads(json.dumps(isometry_to_json(g))))
    assert h == g
    assert h.word == g.word         # word atoms survive as tuples


def test_isometry_round_trip_transvection(mukai):
    pair = mukai.hyperbolic_pairs[0]
    b = [0] * 24
    b[3], b[8] = 2, -1
    g = eichler_transvection_in(mukai, pair, mukai.vector(b))
    assert isometry_from_json(isometry_to_json(g)) == g


@pytest.fixture(scope="module")
def cert():
    return decide(K3Input(3, (1, 0, -1), (2, 1, 1)))


def test_certificate_round_trip_bit_exact(cert):
    s = dumps_certificate(cert)
    back = loads_certificate(s)
    assert back == cert
    assert dumps_certificate(back) == s


def test_certificate_round_trip_still_verifies(cert):
    back = loads_certificate(dumps_certificate(cert))
    assert verify_certificate(back)


def test_certificate_schema_guard(cert):
    obj = certificate_to_json(cert)
    obj["schema"] = 2
    with pytest.raises(LatticeError):
        certificate_from_json(obj)


def test_birational_certificate_round_trip():
    cert = decide(K3Input(3, (1, 0, -1), (1, 0, -1)))
    back = loads_certificate(dumps_certificate(cert))
    assert back == cert
    assert verify_certificate(back)
