import pytest

from mukailat import (BField, compose, compose_all, diagonalize,
                      direct_sum_map, eichler_transvection, exceptional_case,
                      exp_B, extend, hyperbolic_quotient, identity,
                      is_discriminant_trivial, profile, reflection, swap_ef,
                      verify)


@pytest.fixture(scope="module")
def ext(k3):
    return extend(k3)


def test_exp_b_formula(ext, k3, rng):
    B = BField.of(k3.vector([rng.randint(-3, 3) for _ in range(22)]))
    X = exp_B(ext, B)
    assert verify(X) and X.is_integral
    assert X(ext.f).coords == ext.f.coords
    img = X(ext.e)
    assert ext.lambda_part(img).coords == tuple(B.b.coords)
    assert img.coords[ext.f_index] == B.b.norm() / 2


def test_transvection_identities(ext, k3, rng):
    eta = swap_ef(ext)
    for _ in range(25):
        b1 = k3.vector([rng.randint(-3, 3) for _ in range(22)])
        b2 = k3.vector([rng.randint(-3, 3) for _ in range(22)])
        X1, X2 = exp_B(ext, BField.of(b1)), exp_B(ext, BField.of(b2))
        assert compose(X1, X2) == exp_B(ext, BField.of(b1 + b2))
        Eb = eichler_transvection(ext, b1)
        assert Eb == compose_all(eta, exp_B(ext, BField.of(-1 * b1)), eta)
        assert compose(Eb, eichler_transvection(ext, -1 * b1)) == identity(ext.full)
        assert is_discriminant_trivial(Eb) and is_discriminant_trivial(X1)


def test_transvection_f_image(ext, k3):
    b = k3.vector([1, 2] + [0] * 20)
    imf = eichler_transvection(ext, b)(ext.f)
    # E_b(f) = (b^2/2) e - b + f
    assert imf.coords[ext.e_index] == b.norm() // 2
    assert ext.lambda_part(imf).coords == tuple(-c for c in b.coords)
    assert imf.coords[ext.f_index] == 1


def test_profile_basic(ext, k3):
    p = profile(identity(ext.full), ext, ext)
    assert (p.r, p.m, p.s) == (0, 0, 1)
    b = k3.vector([1, 2] + [0] * 20)
    pe = profile(compose(exp_B(ext, BField.of(b)), swap_ef(ext)), ext, ext)
    assert pe.r == 1


def test_diagonalize_round_trip_r1(ext, k3, rng):
    u0 = k3.vector([0] * 6 + [1] + [0] * 15)     # a (-2) root
    F0 = reflection(u0)
    psi0 = compose(direct_sum_map(F0, ext, ext), swap_ef(ext))
    for _ in range(12):
        b1 = k3.vector([rng.randint(-2, 2) for _ in range(22)])
        b2 = k3.vector([rng.randint(-2, 2) for _ in range(22)])
        psi = compose_all(exp_B(ext, BField.of(b1)), psi0,
                          exp_B(ext, BField.of(b2)))
        pr = profile(psi, ext, ext)
        assert pr.r == 1
        F, _ = diagonalize(psi, pr, ext, ext)
        assert F == F0


def test_diagonalize_r2(ext, k3):
    b4 = k3.vector([1, -2] + [0] * 20)           # square 4
    assert b4.norm() == 4
    psi = eichler_transvection(ext, b4)
    pr = profile(psi, ext, ext)
    assert pr.r == 2
    F, resid = diagonalize(psi, pr, ext, ext)
    assert verify(F)
    # residual U-block is sgn(r) [[0, r^2], [1, 0]] / |r|
    assert resid.den == 2
    assert resid.num[0, 1] == 4 and resid.num[1, 0] == 1


def test_hyperbolic_quotient(ext):
    q = hyperbolic_quotient(ext)
    assert q is not None


def test_exceptional_case_recovery(ext, k3, rng):
    beta = k3.vector([1, -1] + [0] * 20)
    assert beta.norm() == 2
    u = ext.embed(beta, e_coeff=2, f_coeff=1)
    assert u.norm() == -2
    u0 = k3.vector([0] * 6 + [1] + [0] * 15)
    L0 = k3.vector([rng.randint(-2, 2) for _ in range(22)])
    psi = compose_all(reflection(u),
                      direct_sum_map(reflection(u0), ext, ext),
                      exp_B(ext, BField.of(L0)))
    pr = profile(psi, ext, ext)
    exc = exceptional_case(psi, pr, ext, ext)
    assert exc is not None
    assert exc.u.norm() == -2
    assert exc.relations_hold
    assert exc.phi == reflection(u0)
    assert exc.L_shift.coords == L0.coords
    # forced relations: r0 = +-ell and s = +-(m0^2 beta^2)/2
    assert abs(exc.r0) == 1 or exc.r0 in (exc.ell, -exc.ell)


def test_exceptional_case_none_for_generic(ext, k3):
    b4 = k3.vector([1, -2] + [0] * 20)
    psi = eichler_transvection(ext, b4)
    pr = profile(psi, ext, ext)
    assert exceptional_case(psi, pr, ext, ext) is None


def test_direct_sum_map_word_lift(ext, k3, rng):
    from mukailat import replay_word
    g = compose_all(*[reflection(k3.vector([0] * i + [1] + [0] * (21 - i)))
                      for i in (6, 7)])
    lifted = direct_sum_map(g, ext, ext)
    assert lifted.word
    assert replay_word(ext.full, lifted.word) == lifted
    x = k3.vector([rng.randint(-2, 2) for _ in range(22)])
    assert ext.lambda_part(lifted(ext.embed(x))).coords == g(x).coords
