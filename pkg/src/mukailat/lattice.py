"""Even integral lattices and exact lattice-theoretic primitives.

A lattice is given by its Gram matrix in a fixed basis; vectors are
coordinate tuples in that basis.  Everything is exact: arbitrary-precision
integers and Fractions, no floating point.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd

import numpy as np

from . import _linalg as la


class LatticeError(ValueError):
    pass


# Gram matrices of the standard building blocks.  The hyperbolic plane uses
# the <e.f> = -1 convention throughout; e = first basis vector, f = second.
U_GRAM = ((0, -1), (-1, 0))

# E8 in the standard root basis (simple roots, Bourbaki ordering).
E8_GRAM = (
    (2, 0, -1, 0, 0, 0, 0, 0),
    (0, 2, 0, -1, 0, 0, 0, 0),
    (-1, 0, 2, -1, 0, 0, 0, 0),
    (0, -1, -1, 2, -1, 0, 0, 0),
    (0, 0, 0, -1, 2, -1, 0, 0),
    (0, 0, 0, 0, -1, 2, -1, 0),
    (0, 0, 0, 0, 0, -1, 2, -1),
    (0, 0, 0, 0, 0, 0, -1, 2),
)


@dataclass(frozen=True)
class IntegralLattice:
    """Nondegenerate even lattice with a fixed basis.

    ``hyperbolic_pairs`` records (e_index, f_index) pairs of marked
    hyperbolic summands for the standard constructions; it is bookkeeping,
    not part of lattice identity.
    """

    gram: tuple[tuple[int, ...], ...]
    label: str = ""
    hyperbolic_pairs: tuple[tuple[int, int], ...] = field(default=(), compare=False)

    def __post_init__(self):
        g = self.gram
        n = len(g)
        if n == 0 or any(len(row) != n for row in g):
            raise LatticeError("gram matrix must be square and nonempty")
        for i in range(n):
            if g[i][i] % 2 != 0:
                raise LatticeError("odd diagonal entry: lattice is not even")
            for j in range(n):
                if g[i][j] != g[j][i]:
                    raise LatticeError("gram matrix is not symmetric")
        if la.det(self.gram_matrix()) == 0:
            raise LatticeError("degenerate gram matrix")

    @property
    def rank(self) -> int:
        return len(self.gram)

    def gram_matrix(self) -> np.ndarray:
        return la.mat(self.gram)

    def det(self) -> int:
        return int(la.det(self.gram_matrix()))

    def vector(self, coords) -> "LatticeVector":
        return LatticeVector(self, tuple(int(c) for c in coords))

    def rational_vector(self, coords) -> "RationalVector":
        return RationalVector(self, tuple(Fraction(c) for c in coords))

    def zero(self) -> "LatticeVector":
        return self.vector([0] * self.rank)

    def basis_vector(self, i: int) -> "LatticeVector":
        coords = [0] * self.rank
        coords[i] = 1
        return self.vector(coords)

    def __repr__(self):
        return f"IntegralLattice({self.label or 'rank %d' % self.rank})"


@dataclass(frozen=True)
class LatticeVector:
    lattice: IntegralLattice
    coords: tuple[int, ...]

    def __post_init__(self):
        if len(self.coords) != self.lattice.rank:
            raise LatticeError("coordinate length does not match lattice rank")

    def array(self) -> np.ndarray:
        return la.vec(self.coords)

    def is_zero(self) -> bool:
        return all(c == 0 for c in self.coords)

    def __add__(self, other):
        _same_lattice(self, other)
        return _wrap(self.lattice, [a + b for a, b in zip(self.coords, other.coords)])

    def __sub__(self, other):
        _same_lattice(self, other)
        return _wrap(self.lattice, [a - b for a, b in zip(self.coords, other.coords)])

    def __neg__(self):
        return _wrap(self.lattice, [-a for a in self.coords])

    def __rmul__(self, c):
        return _wrap(self.lattice, [c * a for a in self.coords])

    def norm(self):
        return inner(self, self)


@dataclass(frozen=True)
class RationalVector:
    lattice: IntegralLattice
    coords: tuple[Fraction, ...]

    def __post_init__(self):
        if len(self.coords) != self.lattice.rank:
            raise LatticeError("coordinate length does not match lattice rank")

    def array(self) -> np.ndarray:
        return la.vec(self.coords)

    def is_zero(self) -> bool:
        return all(c == 0 for c in self.coords)

    def is_integral(self) -> bool:
        return all(Fraction(c).denominator == 1 for c in self.coords)

    def to_integral(self) -> LatticeVector:
        if not self.is_integral():
            raise LatticeError("vector is not integral")
        return self.lattice.vector([int(c) for c in self.coords])

    def __add__(self, other):
        _same_lattice(self, other)
        return _wrap(self.lattice,
                     [Fraction(a) + Fraction(b) for a, b in zip(self.coords, other.coords)])

    def __sub__(self, other):
        _same_lattice(self, other)
        return _wrap(self.lattice,
                     [Fraction(a) - Fraction(b) for a, b in zip(self.coords, other.coords)])

    def __neg__(self):
        return _wrap(self.lattice, [-a for a in self.coords])

    def __rmul__(self, c):
        return _wrap(self.lattice, [Fraction(c) * a for a in self.coords])

    def norm(self):
        return inner(self, self)


Vector = LatticeVector | RationalVector


def _wrap(lattice: IntegralLattice, coords):
    if all(isinstance(c, int) or (isinstance(c, Fraction) and c.denominator == 1)
           for c in coords):
        return lattice.vector([int(c) for c in coords])
    return lattice.rational_vector(coords)


def _same_lattice(x: Vector, y: Vector):
    if x.lattice.gram != y.lattice.gram:
        raise LatticeError("vectors live on different lattices")


def inner(x: Vector, y: Vector):
    """The bilinear form <x.y>; an int when both vectors are integral."""
    _same_lattice(x, y)
    g = x.lattice.gram
    total = 0
    for i, xi in enumerate(x.coords):
        if xi == 0:
            continue
        row = g[i]
        total += xi * sum(row[j] * yj for j, yj in enumerate(y.coords) if yj != 0)
    if isinstance(total, Fraction) and total.denominator == 1:
        return int(total)
    return total


@dataclass(frozen=True)
class FiniteAbelianGroup:
    """Discriminant group L*/L: invariant factors with coset generators."""

    invariant_factors: tuple[int, ...]
    generators: tuple[RationalVector, ...]

    @property
    def order(self) -> int:
        n = 1
        for f in self.invariant_factors:
            n *= f
        return n

    def is_trivial(self) -> bool:
        return not self.invariant_factors


# ---------------------------------------------------------------------------
# standard lattices


def _direct_sum_grams(*grams):
    n = sum(len(g) for g in grams)
    out = [[0] * n for _ in range(n)]
    off = 0
    for g in grams:
        k = len(g)
        for i in range(k):
            for j in range(k):
                out[off + i][off + j] = g[i][j]
        off += k
    return tuple(tuple(row) for row in out)


def build_standard(kind: str, n: int | None = None) -> IntegralLattice:
    """Standard lattices: U, E8_minus, K3, Mukai, K3n(n), RankOne(c).

    Basis orderings are fixed and documented: U summands come first with
    (e, f) pairs in order, then E8(-1) blocks in the simple-root basis, then
    any rank-one part.  U uses <e.f> = -1.
    """
    e8m = tuple(tuple(-x for x in row) for row in E8_GRAM)
    if kind == "U":
        return IntegralLattice(U_GRAM, "U", ((0, 1),))
    if kind == "E8_minus":
        return IntegralLattice(e8m, "E8(-1)")
    if kind == "K3":
        g = _direct_sum_grams(U_GRAM, U_GRAM, U_GRAM, e8m, e8m)
        return IntegralLattice(g, "K3", ((0, 1), (2, 3), (4, 5)))
    if kind == "Mukai":
        g = _direct_sum_grams(U_GRAM, U_GRAM, U_GRAM, U_GRAM, e8m, e8m)
        return IntegralLattice(g, "Mukai", ((0, 1), (2, 3), (4, 5), (6, 7)))
    if kind == "K3n":
        if n is None or n < 2:
            raise LatticeError("K3n requires n >= 2")
        g = _direct_sum_grams(U_GRAM, U_GRAM, U_GRAM, e8m, e8m, ((2 - 2 * n,),))
        return IntegralLattice(g, f"K3n({n})", ((0, 1), (2, 3), (4, 5)))
    if kind == "RankOne":
        if n is None or n == 0 or n % 2 != 0:
            raise LatticeError("RankOne requires a nonzero even square")
        return IntegralLattice(((n,),), f"<{n}>")
    raise LatticeError(f"unknown standard lattice {kind!r}")


def direct_sum(l1: IntegralLattice, l2: IntegralLattice,
               label: str | None = None) -> IntegralLattice:
    g = _direct_sum_grams(l1.gram, l2.gram)
    pairs = l1.hyperbolic_pairs + tuple(
        (a + l1.rank, b + l1.rank) for a, b in l2.hyperbolic_pairs)
    return IntegralLattice(g, label or f"{l1.label}(+){l2.label}", pairs)


def rescale(lat: IntegralLattice, c: int, label: str | None = None) -> IntegralLattice:
    if c == 0:
        raise LatticeError("rescale by zero")
    g = tuple(tuple(c * x for x in row) for row in lat.gram)
    # evenness is re-checked on construction
    return IntegralLattice(g, label or f"{lat.label}({c})",
                           lat.hyperbolic_pairs if c == 1 else ())


# ---------------------------------------------------------------------------
# divisibility, primitivity, saturation


def divisibility(x: LatticeVector,
                 sublattice: list[LatticeVector] | None = None) -> int:
    """div(x): gcd of <x.y> over y in the ambient lattice.

    With ``sublattice`` given (a list of vectors), the gcd runs over that
    span instead; this is how div is measured inside v-perp.
    """
    if x.is_zero():
        raise LatticeError("divisibility of the zero vector")
    if sublattice is None:
        gx = x.lattice.gram_matrix() @ x.array()
        return _gcd_all(gx)
    vals = [inner(x, y) for y in sublattice]
    g = 0
    for v in vals:
        g = gcd(g, int(v))
    if g == 0:
        raise LatticeError("vector pairs to zero with the whole sublattice")
    return g


def _gcd_all(arr) -> int:
    g = 0
    for v in arr:
        g = gcd(g, int(v))
    return g


def is_primitive(x: LatticeVector) -> bool:
    if x.is_zero():
        return False
    return _gcd_all(x.array()) == 1


def smith_normal_form(m) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """(S, P, Q) with P @ m @ Q = S; re-exported from the linalg kernel."""
    return la.smith_normal_form(la.mat(m) if not isinstance(m, np.ndarray) else m)


_DISC_CACHE: dict = {}


def discriminant_group(lat: IntegralLattice) -> FiniteAbelianGroup:
    cached = _DISC_CACHE.get(lat.gram)
    if cached is not None:
        # rewrap the generators so callers see vectors on their own lattice
        if cached.generators and cached.generators[0].lattice is not lat:
            cached = FiniteAbelianGroup(
                cached.invariant_factors,
                tuple(lat.rational_vector(v.coords) for v in cached.generators))
        return cached
    g = lat.gram_matrix()
    s, p, q = la.smith_normal_form(g)
    n = lat.rank
    factors = []
    gens = []
    for i in range(n):
        d = int(s[i, i])
        if d > 1:
            factors.append(d)
            # generator: column i of Q / d, reduced mod Z
            col = [Fraction(int(q[j, i]), d) for j in range(n)]
            col = [c - (c.numerator // c.denominator) for c in col]
            gens.append(lat.rational_vector(col))
    out = FiniteAbelianGroup(tuple(factors), tuple(gens))
    _DISC_CACHE[lat.gram] = out
    return out


def saturate(gens: list[LatticeVector]) -> list[LatticeVector]:
    """Basis of the primitive closure (Q-span intersected with the lattice)."""
    if not gens:
        return []
    lat = gens[0].lattice
    for g in gens:
        _same_lattice(gens[0], g)
    m = la.mat([g.coords for g in gens])
    sat = la.row_saturation(m)
    return [lat.vector(row) for row in sat]


def is_primitive_sublattice(gens: list[LatticeVector]) -> bool:
    """Whether the Z-span of gens equals its primitive closure."""
    if not gens:
        return True
    m = la.mat([g.coords for g in gens])
    sat = la.row_saturation(m)
    return all(la.in_row_span_z(m, sat[i]) for i in range(sat.shape[0]))


def signature(lat: IntegralLattice) -> tuple[int, int]:
    """(p, q): counts of positive and negative eigenvalues, computed exactly.

    Uses rational symmetric diagonalization (no floating point).
    """
    n = lat.rank
    a = np.array([[Fraction(x) for x in row] for row in lat.gram], dtype=object)
    pos = neg = 0
    idx = list(range(n))
    while idx:
        # find a nonzero diagonal entry, or create one
        k = next((i for i in idx if a[i, i] != 0), None)
        if k is None:
            i = idx[0]
            j = next(j for j in idx[1:] if a[i, j] != 0)
            a[i, :] = a[i, :] + a[j, :]
            a[:, i] = a[:, i] + a[:, j]
            k = i
        d = a[k, k]
        if d > 0:
            pos += 1
        else:
            neg += 1
        idx.remove(k)
        for i in idx:
            if a[i, k] != 0:
                c = a[i, k] / d
                a[i, :] = a[i, :] - c * a[k, :]
                a[:, i] = a[:, i] - c * a[:, k]
    return pos, neg
