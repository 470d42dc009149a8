from dataclasses import replace
from math import gcd

import pytest

from mukailat import (K3Input, PipelineError, decide, embed_triple, exp_tH,
                      find_t, gcd_criterion, inner, is_primitive_sublattice,
                      mukai_ambient, polarization_vector, select_gamma,
                      select_k, transformed_triple, verify_certificate,
                      verify_certificate_report)
from mukailat.pipeline import _algebraic_basis
from mukailat import make_model


def test_k3input_validation():
    with pytest.raises(PipelineError):
        K3Input(0, (1, 0, -1), (1, 0, -1))          # d < 1
    with pytest.raises(PipelineError):
        K3Input(3, (2, 0, 2), (1, 0, -1))           # imprimitive triple
    with pytest.raises(PipelineError):
        K3Input(3, (1, 0, -1), (1, 0, 1))           # unequal squares
    inp = K3Input(3, (1, 0, -1), (2, 1, 1))
    assert inp.n == 2


def test_embed_and_polarization():
    L = mukai_ambient()
    H = polarization_vector(L, 3)
    assert H.norm() == 6
    v = embed_triple(L, 3, (2, 1, 1))
    assert v.norm() == 2 * 1 * 3 - 2 * 2 * 1
    w = embed_triple(L, 3, (1, 0, -1))
    # <v.w> = 2 k1 k2 d - r1 s2 - r2 s1
    assert inner(v, w) == -2 * 1 * (-1) - 1 * 1


def test_transformed_triple_matches_exp(rng):
    L = mukai_ambient()
    for _ in range(20):
        d = rng.randint(1, 4)
        r, k, s = rng.randint(-4, 4), rng.randint(1, 4), rng.randint(-4, 4)
        t = rng.randint(-3, 3)
        v = embed_triple(L, d, (r, k, s))
        expect = embed_triple(L, d, transformed_triple(r, k, s, d, t))
        assert exp_tH(L, d, t)(v).coords == expect.coords


def test_gcd_criterion_examples():
    assert gcd_criterion(2, 1, 1)
    assert not gcd_criterion(3, 8, 1)    # gcd(8*1, 8) = 8


def test_find_t_properties(rng):
    found = 0
    for _ in range(30):
        d = rng.randint(1, 4)
        r = rng.choice([-5, -4, -3, -2, 2, 3, 4, 5])
        k = rng.randint(1, 5)
        s = rng.randint(-5, 5)
        if k * k * d - r * s < 1 or gcd(gcd(r, k), s) != 1:
            continue
        t = find_t(r, k, s, d)
        assert abs(t) <= 10 ** 4
        assert gcd_criterion(*transformed_triple(r, k, s, d, t))
        found += 1
    assert found >= 10


def test_find_t_rejects_unit_r():
    with pytest.raises(PipelineError):
        find_t(1, 2, 1, 3)


def test_select_gamma_pairing():
    L = mukai_ambient()
    vx = embed_triple(L, 3, (1, 0, -1))
    M = make_model(vx, algebraic=_algebraic_basis(L, 3))
    beta = M.vperp.vector([0, 1] + [0] * 21)
    gamma = select_gamma(beta)
    assert inner(beta, gamma) == 1


def test_select_k():
    # find k with gcd(r, s + k m + r k^2 g2/2) = 1
    k = select_k(4, 3, 2, 2)
    s_k = 2 + k * 3 + 4 * k * k * 2 // 2
    assert gcd(4, s_k) == 1


def test_decide_birational_self_case():
    cert = decide(K3Input(3, (1, 0, -1), (1, 0, -1)))
    assert cert.verdict == "birational"
    assert cert.epsilon == 1
    assert verify_certificate(cert)


def test_decide_case1_with_dualization():
    cert = decide(K3Input(3, (1, 0, -1), (2, 1, 1)))
    assert cert.verdict == "criterion-case-1"
    assert cert.profile_r == 1
    flags = dict(cert.flags)
    assert flags["gcd_criterion"] and flags["primitive_span"]
    assert flags["fine_moduli"]
    ok, reason = verify_certificate_report(cert)
    assert ok, reason


def test_decide_outside_hypotheses():
    # moduli datum that is not a Hilbert-scheme vector on the left
    cert = decide(K3Input(3, (2, 1, 1), (2, 1, 1)))
    assert cert.verdict in ("birational", "failure")
    assert verify_certificate(cert)


def test_tampered_certificates_rejected():
    cert = decide(K3Input(3, (1, 0, -1), (2, 1, 1)))
    bad = replace(cert, delta_v=tuple(x + 1 for x in cert.delta_v))
    ok, reason = verify_certificate_report(bad)
    assert not ok
    bad2 = replace(cert, epsilon=-cert.epsilon)
    assert not verify_certificate(bad2)
    bad3 = replace(cert, profile_r=cert.profile_r + 1)
    assert not verify_certificate(bad3)
    bad4 = replace(cert, n=cert.n + 1)
    assert not verify_certificate(bad4)


def test_failure_certificates_are_honest():
    cert = decide(K3Input(3, (1, 0, -1), (1, 0, -1)))
    bad = replace(cert, verdict="failure", diagnostic="made up")
    # failure certificates make no positive claim, so they verify trivially
    assert verify_certificate(bad)
