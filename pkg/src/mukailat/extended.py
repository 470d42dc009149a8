"""The Lambda (+) U formalism: B-field exponentials, Eichler transvections,
psi-profiles, blockwise diagonalization, and the exceptional (-2)-reflection
case.

An ExtendedLattice is base (+) U with the hyperbolic generators e, f marked
as the last two basis vectors, <e.f> = -1.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd

import numpy as np

from . import _linalg as la
from .lattice import (
    IntegralLattice, LatticeVector, RationalVector, LatticeError,
    build_standard, direct_sum, inner,
)
from .isometry import (
    Isometry, IsometryError, identity, minus_identity, compose, compose_all,
    inverse, verify, reflection, make_isometry,
    eichler_transvection_in, exp_map_in, swap_pair,
)


class ExtendedError(LatticeError):
    pass


@dataclass(frozen=True)
class ExtendedLattice:
    base: IntegralLattice
    full: IntegralLattice
    e_index: int
    f_index: int

    @property
    def pair(self):
        return (self.e_index, self.f_index)

    def embed(self, x, e_coeff=0, f_coeff=0):
        """Lift a base vector (plus optional e, f coefficients) to the full lattice."""
        coords = list(x.coords) + [e_coeff, f_coeff]
        if all(Fraction(c).denominator == 1 for c in coords):
            return self.full.vector([int(c) for c in coords])
        return self.full.rational_vector([Fraction(c) for c in coords])

    def lambda_part(self, v):
        coords = v.coords[:self.base.rank]
        if all(Fraction(c).denominator == 1 for c in coords):
            return self.base.vector([int(c) for c in coords])
        return self.base.rational_vector([Fraction(c) for c in coords])

    def e_coeff(self, v):
        return v.coords[self.e_index]

    def f_coeff(self, v):
        return v.coords[self.f_index]

    @property
    def e(self):
        return self.full.basis_vector(self.e_index)

    @property
    def f(self):
        return self.full.basis_vector(self.f_index)


def extend(base: IntegralLattice, label: str | None = None) -> ExtendedLattice:
    full = direct_sum(base, build_standard("U"),
                      label or f"{base.label}(+)U")
    return ExtendedLattice(base, full, base.rank, base.rank + 1)


@dataclass(frozen=True)
class BField:
    """A rational class b in Lambda (x) Q with d * b integral."""

    b: RationalVector
    d: int

    def __post_init__(self):
        if self.d <= 0:
            raise ExtendedError("B-field denominator must be positive")
        for c in self.b.coords:
            if (Fraction(c) * self.d).denominator != 1:
                raise ExtendedError("d * b is not integral")

    @classmethod
    def of(cls, b) -> "BField":
        d = 1
        for c in b.coords:
            q = Fraction(c).denominator
            d = d * q // gcd(d, q)
        if isinstance(b, LatticeVector):
            b = b.lattice.rational_vector([Fraction(c) for c in b.coords])
        return cls(b, d)

    @property
    def is_integral(self) -> bool:
        return all(Fraction(c).denominator == 1 for c in self.b.coords)


def exp_B(E: ExtendedLattice, B: BField) -> Isometry:
    """e^B: (r, c, s) -> (r, c + rB, rB^2/2 + s + <c.B>); integral iff B is."""
    if B.b.lattice.gram != E.base.gram:
        raise ExtendedError("B-field lives on the wrong base lattice")
    return exp_map_in(E.full, E.pair, E.embed(B.b))


def eichler_transvection(E: ExtendedLattice, b: LatticeVector) -> Isometry:
    """E_b: (r, c, s) -> (r - <b.c> + s b^2/2, c - sb, s); always integral."""
    if b.lattice.gram != E.base.gram:
        raise ExtendedError("transvection argument lives on the wrong base lattice")
    if not all(Fraction(c).denominator == 1 for c in b.coords):
        raise ExtendedError("transvection argument must be integral")
    return eichler_transvection_in(E.full, E.pair, E.embed(b))


def swap_ef(E: ExtendedLattice) -> Isometry:
    """eta: exchanges e and f, identity on the base."""
    return swap_pair(E.full, E.pair)


@dataclass(frozen=True)
class PsiProfile:
    r: int
    m: int
    s: int
    m_prime: int
    s_prime: int
    beta: LatticeVector
    alpha: LatticeVector


def _decompose_f_image(E: ExtendedLattice, img) -> tuple[int, int, int, LatticeVector]:
    r = img.coords[E.e_index]
    s = img.coords[E.f_index]
    c = E.lambda_part(img)
    if not all(Fraction(x).denominator == 1 for x in (r, s, *c.coords)):
        raise ExtendedError("profile of a non-integral isometry")
    m = la.content(la.vec([int(x) for x in c.coords]))
    if m == 0:
        beta = c.lattice.zero()
    else:
        # m >= 0 (the content); the sign lives in beta so that m*beta = c
        beta = c.lattice.vector([int(x) // m for x in c.coords])
    return int(r), int(m), int(s), beta


def profile(psi: Isometry, E_dom: ExtendedLattice, E_cod: ExtendedLattice) -> PsiProfile:
    """The (r, m beta, s) data of psi(f) and psi^{-1}(f); r = -<psi(f).f>."""
    if not verify(psi):
        raise ExtendedError("profile of a non-isometry")
    r, m, s, beta = _decompose_f_image(E_cod, psi.apply(E_dom.f))
    r2, m2, s2, alpha = _decompose_f_image(E_dom, inverse(psi).apply(E_cod.f))
    if r2 != r:
        raise ExtendedError("inconsistent r between psi(f) and psi^{-1}(f)")
    return PsiProfile(r, m, s, m2, s2, beta, alpha)


def diagonalize(psi: Isometry, p: PsiProfile,
                E_dom: ExtendedLattice, E_cod: ExtendedLattice):
    """Conjugate psi by B-field maps so it acts blockwise as F (+) rho_{f-re}.

    Returns (F, residual) with e^{-m beta/r} o psi o e^{m' alpha/r} = F (+)
    residual, residual sending e to f/r and f to r e.  Exact equality is
    verified; r = 0 is an error.
    """
    if p.r == 0:
        raise ExtendedError("diagonalize requires r != 0")
    r = p.r
    left = exp_B(E_cod, BField.of(E_cod.base.rational_vector(
        [Fraction(-p.m * c, r) for c in p.beta.coords])))
    right = exp_B(E_dom, BField.of(E_dom.base.rational_vector(
        [Fraction(p.m_prime * c, r) for c in p.alpha.coords])))
    conj = compose_all(left, psi, right)
    nb = E_dom.base.rank
    ei, fi = E_dom.pair
    ec, fc = E_cod.pair
    mf = conj.matrix_fractions()
    # off-diagonal blocks must vanish
    for j in range(nb):
        if mf[ec, j] != 0 or mf[fc, j] != 0:
            raise ExtendedError("diagonalization failed: Lambda column touches U")
    for i in range(nb):
        if mf[i, ei] != 0 or mf[i, fi] != 0:
            raise ExtendedError("diagonalization failed: U column touches Lambda")
    if (mf[ec, ei] != 0 or mf[fc, ei] != Fraction(1, r)
            or mf[ec, fi] != r or mf[fc, fi] != 0):
        raise ExtendedError("diagonalization failed: U block is not rho_{f-re}")
    fnum, fden = la.fractions_to_num_den(mf[:nb, :nb])
    F = make_isometry(E_dom.base, E_cod.base, fnum, fden)
    U = build_standard("U")
    sgn = 1 if r > 0 else -1
    residual = make_isometry(U, U, sgn * la.mat([[0, r * r], [1, 0]]), abs(r))
    return F, residual


@dataclass(frozen=True)
class HyperbolicQuotient:
    """f^perp / f with the canonical section c -> c (the base copy)."""

    E: ExtendedLattice

    def project(self, v) -> LatticeVector | RationalVector:
        if inner(v, self.E.f) != 0:
            raise ExtendedError("vector is not orthogonal to f")
        return self.E.lambda_part(v)

    def section(self, c):
        return self.E.embed(c)

    def induced(self, psi: Isometry, E_cod: "ExtendedLattice | None" = None) -> Isometry:
        """Base-level isometry induced by psi when psi(f) = +-f."""
        E_cod = E_cod or self.E
        imgf = psi.apply(self.E.f)
        if imgf.coords not in (E_cod.f.coords, (-1 * E_cod.f).coords):
            raise ExtendedError("isometry does not preserve the ray of f")
        nb = self.E.base.rank
        cols = []
        for j in range(nb):
            img = psi.apply(self.section(self.E.base.basis_vector(j)))
            cols.append([Fraction(c) for c in img.coords[:nb]])
        mf = np.array(cols, dtype=object).T
        num, den = la.fractions_to_num_den(mf)
        return make_isometry(self.E.base, E_cod.base, num, den)


def hyperbolic_quotient(E: ExtendedLattice) -> HyperbolicQuotient:
    return HyperbolicQuotient(E)


@dataclass(frozen=True)
class ExceptionalData:
    u: LatticeVector
    sign: int                 # rho_u o psi (f) = sign * f
    phi: Isometry             # induced base isometry
    L_shift: LatticeVector    # psi'' = (phi (+) id) o e^{L_shift}
    ell: int
    r0: int
    m0: int
    t: int
    relations_hold: bool      # r0 = +-ell and s = +-m0^2 beta^2/2


def exceptional_case(psi: Isometry, p: PsiProfile,
                     E_dom: ExtendedLattice, E_cod: ExtendedLattice,
                     ) -> ExceptionalData | None:
    """The (-2)-reflection route: applicable iff r0 divides m0^2 beta^2/2 + 1.

    With r = ell r0, m = ell m0, gcd(r0, m0) = 1 and t = (m0^2 beta^2 + 2)
    / (2 r0), the vector u = r0 e + m0 beta + t f has square -2 and the
    reflection rho_u sends psi(f) to -+f.  Returns None when inapplicable.
    """
    if p.r == 0:
        raise ExtendedError("exceptional case requires r != 0")
    ell = gcd(p.r, p.m)
    r0 = p.r // ell
    m0 = p.m // ell
    beta2 = p.beta.norm()
    num = m0 * m0 * beta2 // 2 + 1
    if num % r0 != 0:
        return None
    t = (m0 * m0 * beta2 + 2) // (2 * r0)
    u = E_cod.embed(m0 * p.beta, e_coeff=r0, f_coeff=t)
    if u.norm() != -2:
        raise ExtendedError("internal: u^2 != -2")
    rho = reflection(u)
    psi_p = compose(rho, psi)
    imgf = psi_p.apply(E_dom.f)
    if imgf.coords == E_cod.f.coords:
        sign = 1
    elif imgf.coords == (-1 * E_cod.f).coords:
        sign = -1
    else:
        raise ExtendedError("rho_u o psi does not send f to -+f")
    relations = (r0 == ell or r0 == -ell) and (
        2 * p.s == m0 * m0 * beta2 or 2 * p.s == -m0 * m0 * beta2)
    psi_pp = psi_p if sign == 1 else compose(minus_identity(E_cod.full), psi_p)
    phi = hyperbolic_quotient(E_dom).induced(psi_pp, E_cod)
    # psi'' = (phi (+) id) o e^L  =>  e^L = (phi (+) id)^{-1} o psi''
    phi_t = direct_sum_map(phi, E_dom, E_cod)
    eL = compose(inverse(phi_t), psi_pp)
    L = E_dom.lambda_part(eL.apply(E_dom.e))
    if not all(Fraction(c).denominator == 1 for c in L.coords):
        raise ExtendedError("exceptional shift is not integral")
    L = E_dom.base.vector([int(c) for c in L.coords])
    check = compose(phi_t, exp_B(E_dom, BField.of(L)))
    # codomain side: e^L acts on the domain extension
    if not (check.num == psi_pp.num).all() or check.den != psi_pp.den:
        raise ExtendedError("psi'' != (phi (+) id) o e^L")
    return ExceptionalData(u, sign, phi, L, ell, r0, m0, t, relations)


def _lift_atom(atom):
    """Re-express a base-lattice word atom on base (+) U, or None if impossible."""
    kind = atom[0]
    if kind in ("E", "refl"):
        coords = atom[-1] if kind == "E" else atom[1]
        lifted = tuple(coords) + (0, 0)
        return (atom[0], atom[1], atom[2], lifted) if kind == "E" else ("refl", lifted)
    if kind == "exp":
        return ("exp", atom[1], atom[2], tuple(atom[3]) + (0, 0), atom[4])
    if kind == "eta":
        return atom
    return None  # "neg"/"matrix" do not commute with appending id_U


def direct_sum_map(phi: Isometry, E_dom: ExtendedLattice,
                   E_cod: ExtendedLattice) -> Isometry:
    """phi (+) id_U between the extended lattices."""
    nb = E_dom.base.rank
    nc = E_cod.base.rank
    num = np.zeros((nc + 2, nb + 2), dtype=object)
    num[:] = 0
    num[:nc, :nb] = phi.num
    num[nc, nb] = phi.den
    num[nc + 1, nb + 1] = phi.den
    word = tuple(_lift_atom(a) for a in phi.word)
    if any(a is None for a in word):
        word = (("matrix", tuple(tuple(int(x) for x in row) for row in num), phi.den),)
    return make_isometry(E_dom.full, E_cod.full, num, phi.den, word=word)
