"""Oriented rank-24 models (L, v) and their invariants.

A model carries a rank-24 even lattice of signature (4,20) with four marked
hyperbolic planes, a primitive positive vector v of square 2n-2, a fixed
saturated basis of v-perp, orientation data, and (optionally) a rational
period surrogate plus a designated algebraic/Picard sublattice.  On top of
that sit delta-classes, the order-(2n-2) torsion class theta, B-field classes
modulo the Picard sublattice, the extended twist construction psi-tilde, and
the parallel-transport criterion.
"""

from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from math import gcd

import numpy as np

from . import _linalg as la
from .lattice import (IntegralLattice, LatticeError, LatticeVector,
                      RationalVector, divisibility, inner, is_primitive,
                      signature)
from .isometry import (Isometry, IsometryError, OrientationDatum, compose,
                       inverse, make_isometry, orientation_sign, replay_word)
from .transport import (ReductionError, TransportError, _default_planes,
                        eichler_reduce, transport_pair)
from .extended import (BField, ExtendedLattice, direct_sum_map,
                       eichler_transvection, exp_B, extend)


class ModelError(LatticeError):
    pass


# ---------------------------------------------------------------------------
# period surrogate


@dataclass(frozen=True)
class PeriodSurrogate:
    """Rational stand-in for a period: an oriented positive 2-plane and a
    Kahler direction orthogonal to it."""

    plane: tuple[RationalVector, RationalVector]
    kahler: RationalVector

    def __post_init__(self):
        p1, p2 = self.plane
        g11, g12, g22 = inner(p1, p1), inner(p1, p2), inner(p2, p2)
        if g11 <= 0 or g11 * g22 - g12 * g12 <= 0:
            raise ModelError("period plane is not positive definite")
        if inner(self.kahler, self.kahler) <= 0:
            raise ModelError("kahler direction has non-positive square")
        if inner(self.kahler, p1) != 0 or inner(self.kahler, p2) != 0:
            raise ModelError("kahler direction is not orthogonal to the plane")


# ---------------------------------------------------------------------------
# the model


@dataclass(frozen=True)
class MukaiModel:
    L: IntegralLattice
    v: LatticeVector
    n: int
    orientation: OrientationDatum
    vperp: IntegralLattice
    vperp_basis: tuple[LatticeVector, ...]
    positive: tuple[RationalVector, ...]     # 3 positive directions inside v-perp
    plane: PeriodSurrogate | None = None
    algebraic: tuple[LatticeVector, ...] | None = None
    picard: tuple[LatticeVector, ...] | None = None

    @property
    def modulus(self) -> int:
        return 2 * self.n - 2

    def _basis_matrix(self):
        return np.column_stack([b.array() for b in self.vperp_basis])

    def to_perp(self, x):
        """Coordinates of an ambient vector (in v-perp) in the fixed basis."""
        if inner(x, self.v) != 0:
            raise ModelError("vector is not orthogonal to v")
        sol = la.solve(self._basis_matrix(), la.vec([Fraction(c) for c in x.coords]))
        if sol is None:
            raise ModelError("vector is outside the span of the v-perp basis")
        if all(Fraction(c).denominator == 1 for c in sol):
            return self.vperp.vector([int(c) for c in sol])
        return self.vperp.rational_vector([Fraction(c) for c in sol])

    def from_perp(self, c):
        """Ambient vector with the given v-perp coordinates."""
        amb = self._basis_matrix() @ la.vec(list(c.coords))
        if all(Fraction(x).denominator == 1 for x in amb):
            return self.L.vector([int(x) for x in amb])
        return self.L.rational_vector([Fraction(x) for x in amb])

    def perp_orientation(self) -> OrientationDatum:
        return OrientationDatum(
            self.vperp, tuple(self.to_perp(p) for p in self.positive))


def _positive_triple(L: IntegralLattice, v: LatticeVector):
    # the e_i - f_i span a maximal positive 4-space; its intersection with
    # v-perp is positive definite of dimension exactly 3 (v has positive square)
    us = []
    for (e, f) in L.hyperbolic_pairs:
        c = [0] * L.rank
        c[e], c[f] = 1, -1
        us.append(L.vector(c))
    row = la.mat([[inner(u, v) for u in us]])
    ker = la.integer_kernel(row)
    out = []
    for j in range(ker.shape[1]):
        coords = [0] * L.rank
        for i, u in enumerate(us):
            k = int(ker[i, j])
            if k:
                for t in range(L.rank):
                    coords[t] += k * u.coords[t]
        out.append(L.vector(coords))
    if len(out) < 3:
        raise ModelError("could not build a positive triple in v-perp")
    return tuple(out[:3])


def _pairing_row(x) -> la.np.ndarray:
    g = x.lattice.gram_matrix()
    return g @ x.array()


def _span_kernel_vectors(L, rows):
    """Integral vectors annihilated by the given pairing rows (cleared to Z)."""
    mat_rows = []
    for r in rows:
        den = 1
        for c in r:
            den = den * Fraction(c).denominator // gcd(den, Fraction(c).denominator)
        mat_rows.append([int(Fraction(c) * den) for c in r])
    ker = la.integer_kernel(la.mat(mat_rows))
    return [L.vector([int(ker[i, j]) for i in range(L.rank)])
            for j in range(ker.shape[1])]


def make_model(v: LatticeVector, plane: PeriodSurrogate | None = None,
               algebraic: list[LatticeVector] | None = None) -> MukaiModel:
    L = v.lattice
    if L.rank != 24 or signature(L) != (4, 20):
        raise ModelError("model lattice must have rank 24 and signature (4,20)")
    if len(L.hyperbolic_pairs) != 4:
        raise ModelError("model lattice needs four marked hyperbolic planes")
    if not is_primitive(v):
        raise ModelError("v must be primitive")
    sq = v.norm()
    if sq < 2 or sq % 2:
        raise ModelError("v^2 must be a positive even number")
    n = sq // 2 + 1

    # saturated basis of v-perp (kernel of an integer row is saturated)
    ker = la.integer_kernel(la.mat([list(_pairing_row(v))]))
    vperp_basis = tuple(L.vector([int(ker[i, j]) for i in range(L.rank)])
                        for j in range(ker.shape[1]))
    bm = np.column_stack([b.array() for b in vperp_basis])
    kgram = tuple(tuple(int(x) for x in row)
                  for row in (bm.T @ L.gram_matrix() @ bm))
    vperp = IntegralLattice(kgram, f"{L.label}-perp", ())

    if plane is not None:
        for p in (*plane.plane, plane.kahler):
            if p.lattice.gram != L.gram:
                raise ModelError("surrogate data lives on the wrong lattice")
            if inner(p, v) != 0:
                raise ModelError("surrogate data must be orthogonal to v")
        positive = (*plane.plane, plane.kahler)
        if algebraic is None:
            algebraic = _span_kernel_vectors(
                L, [list(_pairing_row(p)) for p in plane.plane])
    else:
        positive = tuple(
            L.rational_vector([Fraction(c) for c in t.coords])
            for t in _positive_triple(L, v))
    positive = tuple(
        p if isinstance(p, RationalVector)
        else L.rational_vector([Fraction(c) for c in p.coords])
        for p in positive)

    picard = None
    if algebraic is not None:
        algebraic = tuple(algebraic)
        # v must belong to the rational span of the algebraic part
        am = np.column_stack([a.array() for a in algebraic])
        if la.solve(am, v.array()) is None:
            raise ModelError("v is outside the designated algebraic sublattice")
        row = la.mat([[inner(a, v) for a in algebraic]])
        cker = la.integer_kernel(row)
        picard = []
        for j in range(cker.shape[1]):
            coords = [0] * L.rank
            for i, a in enumerate(algebraic):
                k = int(cker[i, j])
                if k:
                    for t in range(L.rank):
                        coords[t] += k * a.coords[t]
            picard.append(L.vector(coords))
        picard = tuple(picard)

    orientation = OrientationDatum(
        L, positive + (L.rational_vector([Fraction(c) for c in v.coords]),))
    return MukaiModel(L, v, n, orientation, vperp, vperp_basis, positive,
                      plane, algebraic, picard)


# ---------------------------------------------------------------------------
# delta-classes


@dataclass(frozen=True)
class DeltaClass:
    delta: LatticeVector


def is_delta_class(M: MukaiModel, delta: LatticeVector) -> bool:
    try:
        check_delta(M, delta)
        return True
    except ModelError:
        return False


def check_delta(M: MukaiModel, delta: LatticeVector) -> None:
    m = M.modulus
    if inner(delta, M.v) != 0:
        raise ModelError("delta is not orthogonal to v")
    if delta.norm() != 2 - 2 * M.n:
        raise ModelError(f"delta^2 = {delta.norm()} != {2 - 2 * M.n}")
    d = divisibility(delta, sublattice=list(M.vperp_basis))
    if d != m:
        raise ModelError(f"div(delta) = {d} != {m} inside v-perp")
    if any((delta.coords[i] - M.v.coords[i]) % m for i in range(M.L.rank)):
        raise ModelError("(delta - v)/(2n-2) is not integral")


def delta_class(M: MukaiModel, delta: LatticeVector) -> DeltaClass:
    check_delta(M, delta)
    return DeltaClass(delta)


@dataclass(frozen=True)
class DeltaConstraint:
    """Ask for delta with inner(phi(delta), w) = -r, r = (phi(v)-w)^2 / 2."""

    phi: Isometry
    w: LatticeVector

    def r_value(self, M: MukaiModel) -> int:
        diff = self.phi(M.v) - self.w
        return diff.norm() // 2


def _plane_target(L, pairs, coeffs):
    coords = [0] * L.rank
    for (e, f), (a, b) in zip(pairs, coeffs):
        coords[e] += a
        coords[f] += b
    return L.vector(coords)


def enumerate_delta_candidates(M: MukaiModel, box: int, support=None):
    """All delta-classes with coordinates in [-box, box] on the support slots
    and zero elsewhere.  Default support: the first two marked planes plus the
    support of v, trimmed to six slots."""
    if support is None:
        p1, p2 = _default_planes(M.L)
        support = list(p1) + list(p2)
        for j, c in enumerate(M.v.coords):
            if c and j not in support:
                support.append(j)
        support = support[:6]
    for combo in product(range(-box, box + 1), repeat=len(support)):
        coords = [0] * M.L.rank
        for j, c in zip(support, combo):
            coords[j] = c
        cand = M.L.vector(coords)
        if cand.norm() != 2 - 2 * M.n or inner(cand, M.v) != 0:
            continue
        if is_delta_class(M, cand):
            yield DeltaClass(cand)


def find_delta(M: MukaiModel, constraint: DeltaConstraint | None = None,
               box: int = 8, support=None, max_steps: int = 400) -> DeltaClass:
    """Layered search: canonical transport, constrained pair transport, then a
    bounded coefficient box.  Every result is re-verified from scratch."""
    n = M.n
    if constraint is None:
        try:
            word, _can = eichler_reduce(M.v, max_steps=max_steps)
            g = replay_word(M.L, word)
            e1, f1 = _default_planes(M.L)[0]
            tgt = [0] * M.L.rank
            tgt[e1], tgt[f1] = 1, n - 1
            return delta_class(M, inverse(g)(M.L.vector(tgt)))
        except (ReductionError, ModelError):
            pass
    else:
        phi, w = constraint.phi, constraint.w
        if phi.domain.gram != M.L.gram or w.lattice.gram != phi.codomain.gram:
            raise ModelError("constraint data on the wrong lattices")
        if w.norm() != M.v.norm():
            raise ModelError("constraint requires w^2 = v^2")
        r = constraint.r_value(M)
        LY = w.lattice
        pairs = _default_planes(LY)
        y1 = _plane_target(LY, pairs, [(1, -(n - 1)), (0, 0)])
        y2 = _plane_target(LY, pairs, [(1, -(n - 1 - r)), (-1, r)])
        try:
            g = transport_pair(phi(M.v), y1, w, y2, max_steps=max_steps)
            tgt = _plane_target(LY, pairs, [(1, n - 1), (0, 0)])
            dv = inverse(phi)(inverse(g)(tgt))
            dc = delta_class(M, dv)
            if inner(phi(dv), w) != -r:
                raise ModelError("transported delta violates the pairing constraint")
            return dc
        except (TransportError, ReductionError, ModelError):
            pass
    for dc in enumerate_delta_candidates(M, box, support):
        if constraint is not None:
            if inner(constraint.phi(dc.delta), constraint.w) != -constraint.r_value(M):
                continue
        return dc
    raise ModelError(f"delta search exhausted (box {box})")


# ---------------------------------------------------------------------------
# theta: the order-(2n-2) torsion class


@dataclass(frozen=True)
class TorsionClass:
    rep: tuple[int, ...]        # coordinates in the fixed v-perp basis
    modulus: int


def theta(M: MukaiModel, d: DeltaClass) -> TorsionClass:
    m = M.modulus
    c = M.to_perp(d.delta)
    return TorsionClass(tuple(int(x) % m for x in c.coords), m)


def torsion_neg(t: TorsionClass) -> TorsionClass:
    return TorsionClass(tuple((-c) % t.modulus for c in t.rep), t.modulus)


def torsion_order(t: TorsionClass) -> int:
    g = 0
    for c in t.rep:
        g = gcd(g, c)
    return t.modulus // gcd(t.modulus, g)


# ---------------------------------------------------------------------------
# Brauer classes modulo the Picard sublattice


@dataclass(frozen=True)
class BrauerRep:
    """A class [b/d] in (v-perp / picard) (x) Q/Z, in v-perp coordinates."""

    bfield: BField
    picard: tuple[tuple[int, ...], ...]


def brauer_class(M: MukaiModel, B) -> BrauerRep:
    if M.picard is None:
        raise ModelError("no Picard sublattice designated on the model")
    if B.lattice.gram == M.L.gram:
        B = M.to_perp(B)
    elif B.lattice.gram != M.vperp.gram:
        raise ModelError("B-field lives on the wrong lattice")
    if isinstance(B, LatticeVector):
        B = M.vperp.rational_vector([Fraction(c) for c in B.coords])
    pic = tuple(tuple(int(c) for c in M.to_perp(p).coords) for p in M.picard)
    return BrauerRep(BField.of(B), pic)


def brauer_trivial(rep: BrauerRep) -> bool:
    """Whether d*b lands in picard + d*(v-perp), i.e. [b] = 0."""
    d = rep.bfield.d
    nvec = la.vec([int(Fraction(c) * d) for c in rep.bfield.b.coords])
    r = len(nvec)
    cols = [list(p) for p in rep.picard]
    cols += [[d if i == j else 0 for i in range(r)] for j in range(r)]
    a = np.column_stack([la.vec(c) for c in cols])
    return la.solve_integral(a, nvec) is not None


def brauer_eq(r1: BrauerRep, r2: BrauerRep) -> bool:
    if r1.picard != r2.picard:
        raise ModelError("Brauer classes over different Picard sublattices")
    diff = r1.bfield.b - r2.bfield.b
    return brauer_trivial(BrauerRep(BField.of(diff), r1.picard))


def theta_brauer(M: MukaiModel, d: DeltaClass) -> BrauerRep:
    """[theta_v] presented by the B-field delta/(2n-2)."""
    b = M.L.rational_vector([Fraction(c, M.modulus) for c in d.delta.coords])
    return brauer_class(M, b)


# ---------------------------------------------------------------------------
# the extended twist psi-tilde


def extended_model(M: MukaiModel) -> ExtendedLattice:
    return extend(M.L, f"{M.L.label}(+)U")


def build_psi_tilde(M_X: MukaiModel, M_Y: MukaiModel, phi: Isometry,
                    dv: DeltaClass, dw: DeltaClass) -> Isometry:
    """e^{(dw-w)/(2n-2)} o E_{phi(v)-w} o (phi (+) id_U) o e^{(v-dv)/(2n-2)}.

    Integral by construction, sends v to w; both facts are re-verified.
    """
    if phi.domain.gram != M_X.L.gram or phi.codomain.gram != M_Y.L.gram:
        raise ModelError("phi does not match the models")
    if not phi.is_integral:
        raise ModelError("phi must be integral")
    if M_X.n != M_Y.n:
        raise ModelError("models have different n")
    check_delta(M_X, dv.delta)
    check_delta(M_Y, dw.delta)
    v, w, m = M_X.v, M_Y.v, M_X.modulus
    pv = phi(v)
    # equal squares force <phi(v).(phi(v)-w)> = (phi(v)-w)^2 / 2
    if 2 * inner(pv, pv - w) != (pv - w).norm():
        raise ModelError("square bookkeeping violated (v^2 != w^2?)")
    E_X, E_Y = extended_model(M_X), extended_model(M_Y)
    b1 = M_X.L.vector([(v.coords[i] - dv.delta.coords[i]) // m
                       for i in range(M_X.L.rank)])
    b2 = M_Y.L.vector([(dw.delta.coords[i] - w.coords[i]) // m
                       for i in range(M_Y.L.rank)])
    psi = compose(exp_B(E_Y, BField.of(b2)),
                  compose(eichler_transvection(E_Y, pv - w),
                          compose(direct_sum_map(phi, E_X, E_Y),
                                  exp_B(E_X, BField.of(b1)))))
    if not psi.is_integral:
        raise ModelError("psi-tilde failed to be integral")
    if psi(E_X.embed(v)).coords != E_Y.embed(w).coords:
        raise ModelError("psi-tilde does not send v to w")
    return psi


def perp_extension(M: MukaiModel) -> ExtendedLattice:
    return extend(M.vperp, f"{M.L.label}-perp(+)U")


def _perp_extended_orientation(M: MukaiModel, E: ExtendedLattice) -> OrientationDatum:
    vecs = []
    for p in M.positive:
        vecs.append(E.full.rational_vector(
            [Fraction(c) for c in M.to_perp(p).coords] + [Fraction(0), Fraction(0)]))
    ef = [Fraction(0)] * E.full.rank
    ef[E.e_index], ef[E.f_index] = Fraction(1), Fraction(-1)
    vecs.append(E.full.rational_vector(ef))
    return OrientationDatum(E.full, tuple(vecs))


def restrict_to_vperp(psi_tilde: Isometry, M_X: MukaiModel, M_Y: MukaiModel,
                      phi: Isometry | None = None,
                      dv: DeltaClass | None = None,
                      dw: DeltaClass | None = None) -> Isometry:
    """Restriction of psi-tilde to (v-perp (+) U) -> (w-perp (+) U).

    With phi given, asserts the restriction's orientation sign equals phi's.
    With period surrogates and delta-classes given, verifies that the twisted
    period plane maps onto the twisted period plane with positive determinant.
    """
    E_X, E_Y = extended_model(M_X), extended_model(M_Y)
    if psi_tilde.domain.gram != E_X.full.gram or psi_tilde.codomain.gram != E_Y.full.gram:
        raise ModelError("psi-tilde does not act on the extended model lattices")
    if psi_tilde(E_X.embed(M_X.v)).coords != E_Y.embed(M_Y.v).coords:
        raise ModelError("psi-tilde does not send v to w")
    P_X, P_Y = perp_extension(M_X), perp_extension(M_Y)

    def lift_dom(c23):
        return list(c23) + [0, 0]

    dom_cols = [lift_dom(b.coords) for b in M_X.vperp_basis]
    for j in (E_X.e_index, E_X.f_index):
        col = [0] * E_X.full.rank
        col[j] = 1
        dom_cols.append(col)
    cod_cols = [lift_dom(b.coords) for b in M_Y.vperp_basis]
    for j in (E_Y.e_index, E_Y.f_index):
        col = [0] * E_Y.full.rank
        col[j] = 1
        cod_cols.append(col)
    wmat = np.column_stack([la.vec(c) for c in cod_cols])
    num = np.zeros((P_Y.full.rank, P_X.full.rank), dtype=object)
    for j, col in enumerate(dom_cols):
        img = psi_tilde.num @ la.vec(col)
        sol = la.solve(wmat, la.vec([Fraction(int(x), psi_tilde.den) for x in img]))
        if sol is None or any(Fraction(x).denominator != 1 for x in sol):
            raise ModelError("restriction is not integral on the chosen bases")
        for i in range(P_Y.full.rank):
            num[i, j] = int(sol[i])
    word = (("matrix", tuple(tuple(int(x) for x in row) for row in num), 1),)
    rho = make_isometry(P_X.full, P_Y.full, num, 1, word=word)

    if phi is not None:
        s_phi = orientation_sign(phi, M_X.orientation, M_Y.orientation)
        s_rho = orientation_sign(rho, _perp_extended_orientation(M_X, P_X),
                                 _perp_extended_orientation(M_Y, P_Y))
        if s_phi != s_rho:
            raise ModelError(
                f"orientation mismatch: restriction {s_rho}, phi {s_phi}")
    if (M_X.plane is not None and M_Y.plane is not None
            and dv is not None and dw is not None):
        _check_twisted_periods(rho, M_X, M_Y, dv, dw, P_X, P_Y)
    return rho


def _twisted_plane(M: MukaiModel, d: DeltaClass, P: ExtendedLattice):
    out = []
    for sigma in M.plane.plane:
        shift = Fraction(inner(d.delta, sigma), M.modulus)
        coords = [Fraction(c) for c in M.to_perp(sigma).coords] + [Fraction(0), shift]
        out.append(P.full.rational_vector(coords))
    return out


def _check_twisted_periods(rho, M_X, M_Y, dv, dw, P_X, P_Y):
    tx = _twisted_plane(M_X, dv, P_X)
    ty = _twisted_plane(M_Y, dw, P_Y)
    ymat = np.column_stack([t.array() for t in ty])
    coeff = np.zeros((2, 2), dtype=object)
    for j, t in enumerate(tx):
        img = rho(t)
        sol = la.solve(ymat, img.array())
        if sol is None:
            raise ModelError("twisted period plane is not preserved")
        coeff[0, j], coeff[1, j] = Fraction(sol[0]), Fraction(sol[1])
    if la.det(coeff) <= 0:
        raise ModelError("twisted period plane map has non-positive determinant")


# ---------------------------------------------------------------------------
# parallel transport criterion


@dataclass(frozen=True)
class TransportCheck:
    accepted: bool
    delta_match: bool
    lift_integral: bool
    theta_match: bool
    orientation: int

    def __bool__(self):
        return self.accepted


def parallel_transport_check(rho: Isometry, M_X: MukaiModel, M_Y: MukaiModel,
                             dv: DeltaClass, dw: DeltaClass) -> TransportCheck:
    """Accepts iff rho maps dv to dw exactly; also runs the direct route
    (integrality of the rational lift fixing v -> w) and checks the two
    agree at the torsion-class level."""
    if rho.domain.gram != M_X.vperp.gram or rho.codomain.gram != M_Y.vperp.gram:
        raise ModelError("rho does not act between the v-perp lattices")
    if not rho.is_integral:
        raise ModelError("rho must be integral")
    check_delta(M_X, dv.delta)
    check_delta(M_Y, dw.delta)
    m = M_X.modulus
    sign = orientation_sign(rho, M_X.perp_orientation(), M_Y.perp_orientation())
    img = rho(M_X.to_perp(dv.delta))
    dw_c = M_Y.to_perp(dw.delta)
    delta_match = tuple(img.coords) == tuple(dw_c.coords)
    theta_match = all((int(a) - int(b)) % m == 0
                      for a, b in zip(img.coords, dw_c.coords))

    # rational lift: rho on v-perp, v -> w
    L_X, L_Y = M_X.L, M_Y.L
    frame = np.column_stack(
        [M_X.v.array()] + [b.array() for b in M_X.vperp_basis])
    lift = np.zeros((L_Y.rank, L_X.rank), dtype=object)
    for j in range(L_X.rank):
        rhs = la.vec([Fraction(1) if i == j else Fraction(0)
                      for i in range(L_X.rank)])
        sol = la.solve(frame, rhs)
        perp = M_X.vperp.rational_vector([Fraction(c) for c in sol[1:]])
        amb = M_Y.from_perp(rho(perp))
        for i in range(L_Y.rank):
            lift[i, j] = Fraction(sol[0]) * M_Y.v.coords[i] + Fraction(amb.coords[i])
    num, den = la.fractions_to_num_den(lift)
    lift_iso = make_isometry(L_X, L_Y, num, den)
    lift_integral = lift_iso.is_integral
    if lift_integral != theta_match:
        raise ModelError("parallel-transport routes disagree (internal error)")
    accepted = delta_match and lift_integral and sign == 1
    return TransportCheck(accepted, delta_match, lift_integral, theta_match, sign)
