from math import gcd

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mukailat import (IntegralLattice, LatticeError, build_standard,
                      direct_sum, discriminant_group, divisibility, inner,
                      is_primitive, is_primitive_sublattice, rescale,
                      saturate, signature, smith_normal_form)
from mukailat import _linalg as la


def test_u_basics():
    U = build_standard("U")
    assert U.rank == 2
    assert signature(U) == (1, 1)
    assert U.det() == -1
    e, f = U.basis_vector(0), U.basis_vector(1)
    assert inner(e, f) == -1 and e.norm() == 0 and f.norm() == 0


def test_standard_signatures():
    assert signature(build_standard("E8_minus")) == (0, 8)
    assert signature(build_standard("K3")) == (3, 19)
    assert signature(build_standard("Mukai")) == (4, 20)
    assert build_standard("K3").det() == -1
    assert build_standard("Mukai").det() == 1


def test_standard_discriminant_groups():
    assert discriminant_group(build_standard("Mukai")).invariant_factors == ()
    assert discriminant_group(build_standard("K3")).invariant_factors == ()
    for n in range(2, 8):
        dg = discriminant_group(build_standard("K3n", n))
        assert dg.invariant_factors == (2 * n - 2,)


def test_invalid_grams_rejected():
    with pytest.raises(LatticeError):
        IntegralLattice(((1,),))          # odd diagonal
    with pytest.raises(LatticeError):
        IntegralLattice(((0, 1), (2, 0)))  # not symmetric
    with pytest.raises(LatticeError):
        IntegralLattice(((0, 0), (0, 2)))  # degenerate


def test_rescale_and_direct_sum():
    U = build_standard("U")
    U2 = rescale(U, 3)
    assert U2.gram == ((0, -3), (-3, 0))
    s = direct_sum(U, rescale(U, -1))
    assert signature(s) == (2, 2)


def test_divisibility_and_primitivity():
    K = build_standard("K3n", 3)
    delta = K.basis_vector(K.rank - 1)     # the rank-one <2-2n> generator
    assert delta.norm() == -4
    assert divisibility(delta) == 4
    assert is_primitive(delta)
    assert not is_primitive(2 * delta)
    U = build_standard("U")
    assert divisibility(U.vector([1, 1])) == 1


def test_saturation_oracle():
    U = build_standard("U")
    e, f = U.basis_vector(0), U.basis_vector(1)
    assert is_primitive_sublattice([e, f])
    assert not is_primitive_sublattice([e + f, e - f])   # index 2
    sat = saturate([e + f, e - f])
    assert len(sat) == 2
    m = la.mat([[v.coords[0] for v in sat], [v.coords[1] for v in sat]])
    assert abs(int(la.det(m))) == 1


@settings(max_examples=60, deadline=None)
@given(st.lists(st.lists(st.integers(-9, 9), min_size=3, max_size=3),
                min_size=2, max_size=4))
def test_smith_normal_form_properties(rows):
    m = la.mat(rows)
    s, p, q = smith_normal_form(m)
    assert (p @ m @ q == s).all()
    assert abs(int(la.det(p))) == 1 and abs(int(la.det(q))) == 1
    k = min(s.shape)
    diag = [int(s[i, i]) for i in range(k)]
    for i in range(k - 1):
        if diag[i + 1] != 0:
            assert diag[i] != 0 and diag[i + 1] % diag[i] == 0
    off = s.copy()
    for i in range(k):
        off[i, i] = 0
    assert not off.any()


@settings(max_examples=40, deadline=None)
@given(st.lists(st.integers(-20, 20), min_size=2, max_size=2))
def test_divisibility_matches_definition_in_u(coords):
    U = build_standard("U")
    if coords == [0, 0]:
        return
    x = U.vector(coords)
    vals = [abs(inner(x, U.vector([a, b])))
            for a in range(-3, 4) for b in range(-3, 4) if (a, b) != (0, 0)]
    d = divisibility(x)
    assert all(v % d == 0 for v in vals)
    g = 0
    for v in vals:
        g = gcd(g, v)
    assert d == g


def test_integer_kernel_is_saturated():
    m = la.mat([[2, 4, 6], [0, 2, 2]])
    ker = la.integer_kernel(m)
    assert not (m @ ker).any()
    # a saturated rank-1 kernel basis must have content 1
    col = [int(c) for c in ker[:, 0]]
    assert la.content(la.vec(col)) == 1
