"""Isometries between lattices: verification, composition, reflections,
transvections, orientation character, and discriminant action.

An isometry stores an integer matrix ``num`` and a positive denominator
``den``; it sends a coordinate column x to (num @ x) / den.  ``word`` is an
optional list of replayable generator tags used by certificates.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd

import numpy as np

from . import _linalg as la
from .lattice import (
    IntegralLattice, LatticeVector, RationalVector, LatticeError,
    FiniteAbelianGroup, discriminant_group, inner,
)


class IsometryError(LatticeError):
    pass


@dataclass(frozen=True)
class Isometry:
    domain: IntegralLattice
    codomain: IntegralLattice
    num: np.ndarray
    den: int
    word: tuple = field(default=(), compare=False)

    def __post_init__(self):
        if self.num.shape != (self.codomain.rank, self.domain.rank):
            raise IsometryError("matrix shape does not match lattices")
        if self.den <= 0:
            raise IsometryError("denominator must be positive")

    @property
    def is_integral(self) -> bool:
        if self.den == 1:
            return True
        return all(int(x) % self.den == 0 for x in self.num.flat)

    def matrix_fractions(self) -> np.ndarray:
        return la.num_den_to_fractions(self.num, self.den)

    def apply(self, x):
        _check_on(x, self.domain)
        img = self.num @ x.array()
        if self.den == 1:
            if isinstance(x, LatticeVector):
                return self.codomain.vector(img)
            return self.codomain.rational_vector(img)
        coords = [Fraction(int(c)) / self.den if not isinstance(c, Fraction)
                  else c / self.den for c in img]
        if all(Fraction(c).denominator == 1 for c in coords):
            return self.codomain.vector([int(c) for c in coords])
        return self.codomain.rational_vector(coords)

    def __call__(self, x):
        return self.apply(x)

    def __eq__(self, other):
        if not isinstance(other, Isometry):
            return NotImplemented
        return (self.domain.gram == other.domain.gram
                and self.codomain.gram == other.codomain.gram
                and self.den == other.den
                and (self.num == other.num).all())

    def __repr__(self):
        return (f"Isometry({self.domain.label}->{self.codomain.label}, "
                f"den={self.den}, word_len={len(self.word)})")


def _check_on(x, lat: IntegralLattice):
    if x.lattice.gram != lat.gram:
        raise IsometryError("vector is not on the expected lattice")


def make_isometry(domain: IntegralLattice, codomain: IntegralLattice,
                  num, den: int = 1, word: tuple = (),
                  check: bool = True) -> Isometry:
    num = la.mat(num) if not isinstance(num, np.ndarray) else num
    num, den = la.normalize_num_den(num.copy(), den)
    g = Isometry(domain, codomain, num, den, word)
    if check and not verify(g):
        raise IsometryError("matrix is not Gram-compatible")
    return g


def identity(lat: IntegralLattice) -> Isometry:
    return Isometry(lat, lat, la.identity(lat.rank), 1, ())


def minus_identity(lat: IntegralLattice) -> Isometry:
    return Isometry(lat, lat, -la.identity(lat.rank), 1, (("neg",),))


def verify(g: Isometry) -> bool:
    """Exact check of num^T . gram(cod) . num == den^2 . gram(dom)."""
    lhs = la.matmul(la.matmul(g.num.T.copy(), g.codomain.gram_matrix()), g.num)
    rhs = (g.den * g.den) * g.domain.gram_matrix()
    return bool((lhs == rhs).all())


def compose(g: Isometry, h: Isometry) -> Isometry:
    """g after h (domain of g must be codomain of h)."""
    if g.domain.gram != h.codomain.gram:
        raise IsometryError("composition domain/codomain mismatch")
    num, den = la.normalize_num_den(la.matmul(g.num, h.num), g.den * h.den)
    return Isometry(h.domain, g.codomain, num, den, h.word + g.word)


def compose_all(*gs: Isometry) -> Isometry:
    """compose_all(g1, g2, ..., gk) = g1 after g2 after ... after gk."""
    out = gs[0]
    for g in gs[1:]:
        out = compose(out, g)
    return out


def inverse(g: Isometry) -> Isometry:
    inv_num, inv_den = la.inverse(g.num)
    num, den = la.normalize_num_den(inv_num * g.den, inv_den)
    word = tuple(_invert_atom(a) for a in reversed(g.word))
    return Isometry(g.codomain, g.domain, num, den, word)


def _invert_atom(atom):
    kind = atom[0]
    if kind == "E":
        _, e, f, coords = atom
        return ("E", e, f, tuple(-c for c in coords))
    if kind == "exp":
        _, e, f, numv, den = atom
        return ("exp", e, f, tuple(-c for c in numv), den)
    if kind == "refl" or kind == "eta" or kind == "neg":
        return atom
    if kind == "matrix":
        _, num, den = atom
        inum, iden = la.inverse(la.mat(num))
        inum, iden = la.normalize_num_den(inum * den, iden)
        return ("matrix", tuple(tuple(int(x) for x in row) for row in inum), iden)
    raise IsometryError(f"cannot invert word atom {kind!r}")


def reflection(u: LatticeVector) -> Isometry:
    """Reflection in a non-isotropic vector: x -> x - 2<x,u>/<u,u> u."""
    uu = u.norm()
    if uu == 0:
        raise IsometryError("cannot reflect in an isotropic vector")
    lat = u.lattice
    n = lat.rank
    gu = lat.gram_matrix() @ u.array()   # pairings <basis_j, u>
    num = la.identity(n) * uu
    ua = u.array()
    for j in range(n):
        col = 2 * int(gu[j])
        if col:
            for i in range(n):
                num[i, j] -= col * ua[i]
    num, den = la.normalize_num_den(num, uu if uu > 0 else -uu)
    if uu < 0:
        num = -num
    word = (("refl", tuple(u.coords)),)
    return Isometry(lat, lat, num, den, word)


# ---------------------------------------------------------------------------
# transvections relative to a marked hyperbolic pair


def _pair_vectors(lat: IntegralLattice, pair: tuple[int, int]):
    ei, fi = pair
    e = lat.basis_vector(ei)
    f = lat.basis_vector(fi)
    if e.norm() != 0 or f.norm() != 0 or inner(e, f) != -1:
        raise IsometryError("marked pair is not a <e.f>=-1 hyperbolic pair")
    return e, f


def _check_arg(lat, pair, coords):
    # the argument must be orthogonal to both marked generators
    if all(Fraction(c).denominator == 1 for c in coords):
        w = lat.vector([int(c) for c in coords])
    else:
        w = lat.rational_vector([Fraction(c) for c in coords])
    e, f = _pair_vectors(lat, pair)
    if inner(w, e) != 0 or inner(w, f) != 0:
        raise IsometryError("transvection argument touches the marked plane")
    return w


def eichler_transvection_in(lat: IntegralLattice, pair: tuple[int, int],
                            b: LatticeVector) -> Isometry:
    """E_b relative to the marked pair: (r,c,s) -> (r - <b.c> + s b^2/2, c - s b, s)."""
    w = _check_arg(lat, pair, b.coords)
    ei, fi = pair
    n = lat.rank
    g = lat.gram_matrix()
    ge = g[:, ei]              # <basis_j, e> as row j
    gb = g @ w.array()
    b2h = w.norm() // 2 if isinstance(w.norm(), int) else w.norm() / 2
    num = la.identity(n)
    ba = w.array()
    for j in range(n):
        c_j = int(ge[j])       # <basis_j, e>
        t = -c_j * b2h - int(gb[j])
        if c_j:
            for i in range(n):
                num[i, j] += c_j * ba[i]
        if t:
            num[ei, j] += t
    word = (("E", ei, fi, tuple(b.coords)),)
    return Isometry(lat, lat, num, 1, word)


def exp_map_in(lat: IntegralLattice, pair: tuple[int, int], B) -> Isometry:
    """e^B relative to the marked pair: (r,c,s) -> (r, c + rB, rB^2/2 + s + <c.B>).

    Integral iff B is integral.
    """
    w = _check_arg(lat, pair, B.coords)
    ei, fi = pair
    n = lat.rank
    g = lat.gram_matrix()
    gf = g[:, fi]
    gB = g @ w.array()
    if all(not isinstance(c, Fraction) or c.denominator == 1 for c in w.coords):
        # integral B: the matrix is integral (B^2 is even), skip Fractions
        b2h = int(w.norm()) // 2
        num = la.identity(n)
        ba = la.vec([int(c) for c in w.coords])
        for j in range(n):
            r_j = -int(gf[j])
            t = r_j * b2h + int(gB[j])
            if r_j:
                for i in range(n):
                    num[i, j] += r_j * ba[i]
            if t:
                num[fi, j] += t
        word = (("exp", ei, fi, tuple(int(c) for c in w.coords), 1),)
        return Isometry(lat, lat, num, 1, word)
    B2h = Fraction(w.norm()) / 2
    numf = np.zeros((n, n), dtype=object)
    for i in range(n):
        for j in range(n):
            numf[i, j] = Fraction(int(i == j))
    Ba = w.array()
    for j in range(n):
        r_j = -Fraction(gf[j])   # -<basis_j, f>
        t = r_j * B2h + Fraction(gB[j])
        if r_j:
            for i in range(n):
                numf[i, j] += r_j * Fraction(Ba[i])
        if t:
            numf[fi, j] += t
    num, den = la.fractions_to_num_den(numf)
    bden = 1
    for c in w.coords:
        if isinstance(c, Fraction):
            bden = bden * c.denominator // gcd(bden, c.denominator)
    word = (("exp", ei, fi, tuple(int(Fraction(c) * bden) for c in w.coords), bden),)
    return Isometry(lat, lat, num, den, word)


def swap_pair(lat: IntegralLattice, pair: tuple[int, int]) -> Isometry:
    """The isometry exchanging the marked e and f, identity elsewhere."""
    _pair_vectors(lat, pair)
    ei, fi = pair
    num = la.identity(lat.rank)
    num[ei, ei] = num[fi, fi] = 0
    num[ei, fi] = num[fi, ei] = 1
    return Isometry(lat, lat, num, 1, (("eta", ei, fi),))


def replay_word(domain: IntegralLattice, word, codomain: IntegralLattice | None = None,
                ) -> Isometry:
    """Rebuild an isometry from its word, leftmost atom applied first."""
    codomain = codomain or domain
    out = identity(domain)
    for atom in word:
        kind = atom[0]
        if kind == "E":
            _, e, f, coords = atom
            g = eichler_transvection_in(out.codomain, (e, f), out.codomain.vector(coords))
        elif kind == "exp":
            _, e, f, numv, den = atom
            g = exp_map_in(out.codomain, (e, f),
                           out.codomain.rational_vector([Fraction(c, den) for c in numv]))
        elif kind == "refl":
            g = reflection(out.codomain.vector(atom[1]))
        elif kind == "eta":
            g = swap_pair(out.codomain, (atom[1], atom[2]))
        elif kind == "neg":
            g = minus_identity(out.codomain)
        elif kind == "matrix":
            _, num, den = atom
            tgt = codomain if len(num) == codomain.rank else out.codomain
            g = make_isometry(out.codomain, tgt, la.mat(num), den)
        else:
            raise IsometryError(f"unknown word atom {kind!r}")
        out = compose(g, out)
    return out


# ---------------------------------------------------------------------------
# orientation


@dataclass(frozen=True)
class OrientationDatum:
    """Ordered rational basis of a maximal positive-definite subspace."""

    lattice: IntegralLattice
    basis: tuple[RationalVector, ...]

    def __post_init__(self):
        p = len(self.basis)
        g = [[Fraction(inner(a, b)) for b in self.basis] for a in self.basis]
        # Sylvester: all leading principal minors positive
        for k in range(1, p + 1):
            mk = la.mat([row[:k] for row in g[:k]])
            if la.det(mk) <= 0:
                raise IsometryError("orientation basis does not span a positive-definite subspace")


def standard_orientation(lat: IntegralLattice,
                         extra: list[RationalVector] | None = None) -> OrientationDatum:
    """Canonical positive plane data built from the marked hyperbolic pairs.

    Uses e_i - f_i for each marked pair (square 2 under <e.f> = -1); any
    extra positive directions (e.g. a rank-one positive part) can be
    appended by the caller.
    """
    vecs = []
    for ei, fi in lat.hyperbolic_pairs:
        coords = [0] * lat.rank
        coords[ei] = 1
        coords[fi] = -1
        vecs.append(lat.rational_vector(coords))
    if extra:
        vecs.extend(extra)
    from .lattice import signature
    p, _ = signature(lat)
    if len(vecs) != p:
        raise IsometryError(
            f"orientation needs {p} positive directions, have {len(vecs)}")
    return OrientationDatum(lat, tuple(vecs))


def _integral_direction(x) -> np.ndarray:
    den = 1
    for c in x.coords:
        q = Fraction(c).denominator
        den = den * q // gcd(den, q)
    return la.vec([int(Fraction(c) * den) for c in x.coords])


def orientation_sign(g: Isometry, d_dom: OrientationDatum,
                     d_cod: OrientationDatum) -> int:
    """Sign of det of (project onto span(d_cod)) o g restricted to span(d_dom)."""
    if d_dom.lattice.gram != g.domain.gram or d_cod.lattice.gram != g.codomain.gram:
        raise IsometryError("orientation data on the wrong lattices")
    p = len(d_dom.basis)
    if len(d_cod.basis) != p:
        raise IsometryError("orientation data of different dimensions")
    gc = g.codomain.gram_matrix()
    # clear denominators: positive column scalings cannot change the sign
    w = np.column_stack([_integral_direction(x) for x in d_cod.basis])
    v = np.column_stack([_integral_direction(x) for x in d_dom.basis])
    gv = g.num @ v                       # images (times den, sign-irrelevant)
    b = w.T @ gc @ gv                    # p x p
    d = la.det(b)
    if d == 0:
        raise IsometryError("projection between positive planes is singular")
    return 1 if d > 0 else -1


# ---------------------------------------------------------------------------
# discriminant action


def discriminant_action(g: Isometry) -> list[RationalVector]:
    """Images of the discriminant-group generators under an integral self-isometry."""
    if g.domain.gram != g.codomain.gram:
        raise IsometryError("discriminant action needs a self-isometry")
    if not g.is_integral:
        raise IsometryError("discriminant action needs an integral isometry")
    grp = discriminant_group(g.domain)
    out = []
    for x in grp.generators:
        img = g.num @ x.array()
        out.append(g.domain.rational_vector(
            [Fraction(c) / g.den for c in img]))
    return out


def is_discriminant_trivial(g: Isometry) -> bool:
    """Whether g induces the identity on L*/L."""
    if g.domain.gram != g.codomain.gram:
        raise IsometryError("discriminant action needs a self-isometry")
    if not g.is_integral:
        raise IsometryError("discriminant action needs an integral isometry")
    grp = discriminant_group(g.domain)
    for x in grp.generators:
        img = g.num @ x.array()
        diff = [Fraction(img[i], g.den) - x.coords[i] for i in range(len(x.coords))]
        if not all(d.denominator == 1 for d in diff):
            return False
    return True
