"""Transvection-based transport of primitive vectors.

Any vector of a lattice containing two orthogonal hyperbolic-plane summands
can be driven to a normal form supported on the first plane by a finite word
of Eichler transvections and integral exponential maps.  The normal form of
a primitive vector x with divisibility 1 is e1 - (x^2/2) f1; vectors of
larger divisibility keep a small residue outside the plane.  Words are
replayable, and every transport result is re-verified before it is returned.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import gcd

from . import _linalg as la
from .lattice import (
    IntegralLattice, LatticeVector, LatticeError, divisibility, is_primitive,
)
from .isometry import (
    Isometry, IsometryError, identity, compose, inverse, replay_word,
    eichler_transvection_in, exp_map_in,
)


class ReductionError(IsometryError):
    pass


class TransportError(IsometryError):
    pass


def _check_plane(lat: IntegralLattice, pair):
    e, f = pair
    g = lat.gram
    n = lat.rank
    if g[e][e] != 0 or g[f][f] != 0 or g[e][f] != -1:
        raise ReductionError("marked indices do not span a <e.f>=-1 plane")
    for j in range(n):
        if j not in (e, f) and (g[e][j] != 0 or g[f][j] != 0):
            raise ReductionError("marked plane is not an orthogonal summand")


def _default_planes(lat: IntegralLattice):
    if len(lat.hyperbolic_pairs) < 2:
        raise ReductionError("need two marked hyperbolic planes")
    return lat.hyperbolic_pairs[0], lat.hyperbolic_pairs[1]


class _Reducer:
    """Deterministic Euclidean schedule over the slots of two marked planes.

    Writing x = a e1 + b f1 + p e2 + q f2 + z, transvections in arguments
    lying inside the planes change one slot by a multiple of a slot of the
    other plane; arguments in the orthogonal rest reduce z and inject the
    gcd of its pairings.  The schedule gathers div(x) into the e1 slot and
    kills everything else, leaving b forced by the norm.
    """

    def __init__(self, lat: IntegralLattice, x: LatticeVector,
                 planes=None, max_steps: int = 400):
        if x.lattice.gram != lat.gram:
            raise ReductionError("vector not on the given lattice")
        p1, p2 = planes if planes is not None else _default_planes(lat)
        _check_plane(lat, p1)
        _check_plane(lat, p2)
        if len(set(p1) | set(p2)) != 4:
            raise ReductionError("planes overlap")
        self.lat = lat
        self.e1, self.f1 = p1
        self.e2, self.f2 = p2
        self.others = [j for j in range(lat.rank)
                       if j not in (self.e1, self.f1, self.e2, self.f2)]
        self.x = list(x.coords)
        self.word: list = []
        self.steps = 0
        self.max_steps = max_steps

    # -- slot access ------------------------------------------------------
    @property
    def a(self): return self.x[self.e1]
    @property
    def b(self): return self.x[self.f1]
    @property
    def p(self): return self.x[self.e2]
    @property
    def q(self): return self.x[self.f2]

    def zvec(self):
        return [self.x[j] for j in self.others]

    # -- moves ------------------------------------------------------------
    def _apply(self, iso: Isometry):
        if self.steps >= self.max_steps:
            raise ReductionError(
                f"step bound {self.max_steps} exhausted at state {self.x}")
        self.steps += 1
        img = iso.num @ la.vec(self.x)
        self.x = [int(c) for c in img]
        self.word.extend(iso.word)

    def _vec(self, coords):
        return self.lat.vector(coords)

    def E1(self, wcoords):
        self._apply(eichler_transvection_in(
            self.lat, (self.e1, self.f1), self._vec(wcoords)))

    def X1(self, wcoords):
        self._apply(exp_map_in(
            self.lat, (self.e1, self.f1), self._vec(wcoords)))

    def E2(self, wcoords):
        self._apply(eichler_transvection_in(
            self.lat, (self.e2, self.f2), self._vec(wcoords)))

    def X2(self, wcoords):
        self._apply(exp_map_in(
            self.lat, (self.e2, self.f2), self._vec(wcoords)))

    def _unit(self, idx, k):
        c = [0] * self.lat.rank
        c[idx] = k
        return c

    def _ovec(self, ocoords):
        c = [0] * self.lat.rank
        for j, v in zip(self.others, ocoords):
            c[j] = v
        return c

    # -- pairings of the rest part ---------------------------------------
    def _z_pairings(self):
        g = self.lat.gram
        out = []
        for j in self.others:
            out.append(sum(g[j][k] * self.x[k] for k in self.others))
        return out

    def _z_content_and_witness(self):
        """gcd g of pairings of z, and ocoords u with <u, z> = g."""
        pair = self._z_pairings()
        gacc = 0
        coeffs = [0] * len(pair)
        for j, t in enumerate(pair):
            if t == 0:
                continue
            if gacc == 0:
                gacc = abs(t)
                coeffs = [0] * len(pair)
                coeffs[j] = 1 if t > 0 else -1
            else:
                gnew, s, c2 = la.xgcd(gacc, t)
                coeffs = [s * cc for cc in coeffs]
                coeffs[j] = c2
                gacc = gnew
        return gacc, coeffs

    # -- schedule ---------------------------------------------------------
    @staticmethod
    def _balanced(t, m):
        """quotient k with |t - k*m| minimal (m != 0)."""
        k, r = divmod(t, m)
        # floor division leaves r with the sign of m; bump k when |r| > |m|/2
        if (m > 0 and 2 * r > m) or (m < 0 and 2 * r < m):
            k += 1
        return k

    def _reduce_z_mod_a(self):
        m = abs(self.a)
        u = []
        changed = False
        for zj in self.zvec():
            r = zj % m
            u.append((r - zj) // self.a)
            if r != zj:
                changed = True
        if changed:
            self.X1(self._ovec(u))                   # z += a u

    def _step(self) -> bool:
        """One schedule step; True when the gathering phase is complete.

        The global minimum |slot| never increases; it halves whenever a
        cross-reduction is inexact, and exact reductions only retire slots,
        so the phase terminates.
        """
        a, b, p, q = self.a, self.b, self.p, self.q
        slots = [(abs(a), 0, a), (abs(b), 1, b), (abs(p), 2, p), (abs(q), 3, q)]
        nz = [s for s in slots if s[0] != 0]
        if not nz:
            gz, u = self._z_content_and_witness()
            if gz == 0:
                return True                          # zero vector
            self.X1(self._ovec(u))                   # b -> <z,u> = gz (a = 0: clean)
            return False
        m, idx, pv = min(nz)
        if idx in (0, 1):
            # pivot in the first plane; reduce p, q against it
            if p != 0 or q != 0:
                tgt = 2 if (p != 0 and (q == 0 or abs(p) >= abs(q))) else 3
                tv = p if tgt == 2 else q
                k = self._balanced(tv, pv)
                if idx == 0:
                    # p += k' a  /  q += k' a  via exp in the first plane
                    self.X1(self._unit(self.e2 if tgt == 2 else self.f2, -k))
                else:
                    # p -= k' b  /  q -= k' b  via E in the first plane
                    self.E1(self._unit(self.e2 if tgt == 2 else self.f2, k))
                return False
            partner = b if idx == 0 else a
            if partner % pv != 0:
                # copy the non-divisible partner into p and keep going
                if idx == 0:
                    self.E1(self._unit(self.e2, 1))      # p -> -b
                else:
                    self.X1(self._unit(self.e2, 1))      # p -> a
                return False
            if idx == 1:
                # route the pivot into the a slot: a -> a - k b with p = -b
                self.E1(self._unit(self.e2, 1))          # p -> -b
                k = (a - b) // b if a != 0 else -1
                self.X2(self._unit(self.e1, k))          # a -> a + k p = b or -b...
                return False
            return True                                  # pivot in a, others clear
        # pivot in the second plane; reduce a, b against it
        if a != 0 or b != 0:
            tgt = 0 if (a != 0 and (b == 0 or abs(a) >= abs(b))) else 1
            tv = a if tgt == 0 else b
            k = self._balanced(tv, pv)
            if idx == 3:
                # a -= k' q  /  b -= k' q  via E in the second plane
                self.E2(self._unit(self.e1 if tgt == 0 else self.f1, k))
            else:
                # a += k' p  /  b += k' p  via exp in the second plane
                self.X2(self._unit(self.e1 if tgt == 0 else self.f1, -k))
            return False
        # a = b = 0: move the pivot over to a (clean since b = 0)
        if idx == 3:
            self.E2(self._unit(self.e1, 1))              # a -> -q
        else:
            self.X2(self._unit(self.e1, 1))              # a -> p
        return False

    def run(self):
        guard = 0
        while True:
            guard += 1
            if guard > self.max_steps + 50:
                raise ReductionError("schedule failed to converge")
            if not self._step():
                continue
            if self.a == 0:
                break                                    # zero vector
            # gathering done: p = q = 0, a | b; absorb the rest part
            if any(self.zvec()):
                self._reduce_z_mod_a()
                if any(self.zvec()):
                    gz, u = self._z_content_and_witness()
                    if gz % self.a != 0:
                        self.E2(self._ovec(u))           # p -> -gz (q = 0: clean)
                        continue
            break
        self._endgame()
        return tuple(self.word), self.lat.vector(self.x)

    def _endgame(self):
        d = abs(self.a) if self.a != 0 else 0
        if d == 0:
            return
        if d == 1:
            if self.a == -1:
                self.X1(self._unit(self.e2, 1))          # p += a = -1
                self.X2(self._unit(self.e1, -2))         # a += -2p = +1
            # one move kills p, q and z together
            w = [0] * self.lat.rank
            w[self.e2] = -self.p
            w[self.f2] = -self.q
            for j in self.others:
                w[j] = -self.x[j]
            if any(w):
                self.X1(w)
            return
        if self.a < 0:
            self.X1(self._unit(self.e2, 1))              # p += a
            self.X2(self._unit(self.e1, -2))             # a -> -a
            # sides left multiples of d; clean them up exactly
            if self.q % self.a == 0 and self.q != 0:
                self.X1(self._unit(self.f2, -self.q // self.a))
            if self.p % self.a == 0 and self.p != 0:
                self.X1(self._unit(self.e2, -self.p // self.a))
        if any(self.zvec()):
            self._reduce_z_mod_a()


@dataclass(frozen=True)
class Reduction:
    word: tuple
    canonical: LatticeVector
    steps: int


def reduce_vector(x: LatticeVector, planes=None, max_steps: int = 400) -> Reduction:
    """Drive any nonzero x to the plane-supported normal form; replay-checked."""
    if not any(x.coords):
        raise ReductionError("cannot reduce the zero vector")
    lat = x.lattice
    red = _Reducer(lat, x, planes, max_steps)
    word, can = red.run()
    g = replay_word(lat, word)
    if g.apply(x).coords != can.coords:
        raise ReductionError("replay mismatch (internal error)")
    return Reduction(word, can, red.steps)


def eichler_reduce(x: LatticeVector, planes=None, max_steps: int = 400):
    """Normal form of a primitive vector: word w with w(x) = e1 - (x^2/2) f1.

    Only divisibility-1 vectors admit a form supported purely on the marked
    plane (d e1 + m f1 with d > 1 is never primitive), so larger divisibility
    is reported as an explicit failure rather than a fake normal form.
    Returns (word, canonical vector).
    """
    if not is_primitive(x):
        raise ReductionError("input vector is not primitive")
    r = reduce_vector(x, planes, max_steps)
    p1 = planes[0] if planes is not None else _default_planes(x.lattice)[0]
    e1, f1 = p1
    support = [j for j, c in enumerate(r.canonical.coords) if c != 0]
    if not set(support) <= {e1, f1}:
        d = divisibility(x)
        raise ReductionError(
            f"no plane-supported normal form: divisibility {d} > 1 "
            f"(residual {r.canonical.coords})")
    return r.word, r.canonical


# ---------------------------------------------------------------------------
# pair transport


def _perp_context(lat: IntegralLattice, c: LatticeVector, p1):
    """Basis of c^perp for c = e1 + B f1 supported on the first plane."""
    e1, f1 = p1
    B = c.coords[f1]
    if c.coords[e1] != 1 or B == 0:
        raise TransportError("first canonical vector is not e1 + B f1 with B != 0")
    cstar = [0] * lat.rank
    cstar[e1] = 1
    cstar[f1] = -B
    basis = [cstar] + [la_unit(lat.rank, j) for j in range(lat.rank)
                       if j not in (e1, f1)]
    amb_index = [None] + [j for j in range(lat.rank) if j not in (e1, f1)]
    g = lat.gram_matrix()
    bm = la.mat(basis).T                  # columns = basis vectors
    kgram = tuple(tuple(int(v) for v in row) for row in (bm.T @ g @ bm))
    pairs = []
    for (a, b) in lat.hyperbolic_pairs:
        if a in (e1, f1):
            continue
        pairs.append((amb_index.index(a), amb_index.index(b)))
    K = IntegralLattice(kgram, f"{lat.label}-perp", tuple(pairs))
    return K, basis, amb_index


def la_unit(n, j):
    c = [0] * n
    c[j] = 1
    return c


def _translate_word(word, basis, pair_map):
    """Map a word on the perp lattice to ambient atoms."""
    out = []
    n = len(basis[0])
    for atom in word:
        kind = atom[0]
        if kind == "E" or kind == "exp":
            eK, fK = atom[1], atom[2]
            coords = atom[3]
            den = atom[4] if kind == "exp" else 1
            amb = [0] * n
            for j, cj in enumerate(coords):
                if cj:
                    for i in range(n):
                        amb[i] += cj * basis[j][i]
            ae, af = pair_map[(eK, fK)]
            if kind == "E":
                out.append(("E", ae, af, tuple(amb)))
            else:
                out.append(("exp", ae, af, tuple(amb), den))
        else:
            raise TransportError(f"untranslatable atom {kind!r}")
    return tuple(out)


def transport_pair(x1: LatticeVector, y1: LatticeVector,
                   x2: LatticeVector, y2: LatticeVector,
                   max_steps: int = 400) -> Isometry:
    """Integral isometry g with g(x1) = y1 and g(x2) = y2, as a transvection word.

    Strategy: reduce x1 and y1 to the common normal form c, then match the
    transported second vectors inside the stabilizer of c, which is the
    transvection group of the lattice c^perp (it has one hyperbolic plane
    fewer).  Best effort: failure within the step bound is reported with
    diagnostics, never papered over.
    """
    lat = x1.lattice
    for v in (y1, x2, y2):
        if v.lattice.gram != lat.gram:
            raise TransportError("all four vectors must live in one lattice")
    data = (x1.norm(), x2.norm(), int(la.vec(x1.coords) @ lat.gram_matrix() @ la.vec(x2.coords)))
    data_y = (y1.norm(), y2.norm(), int(la.vec(y1.coords) @ lat.gram_matrix() @ la.vec(y2.coords)))
    if data != data_y:
        raise TransportError(f"Gram data mismatch: {data} vs {data_y}")
    p1, p2 = _default_planes(lat)
    r_x = reduce_vector(x1, (p1, p2), max_steps)
    r_y = reduce_vector(y1, (p1, p2), max_steps)
    if r_x.canonical.coords != r_y.canonical.coords:
        raise TransportError(
            f"first vectors reduce to different normal forms: "
            f"{r_x.canonical.coords} vs {r_y.canonical.coords}")
    c = r_x.canonical
    W = replay_word(lat, r_x.word)
    V = replay_word(lat, r_y.word)
    z = W.apply(x2)
    zp = V.apply(y2)
    if z.coords == zp.coords:
        g = compose(inverse(V), W)
    else:
        g = compose(inverse(V), compose(
            _stabilizer_match(lat, c, z, zp, p1, max_steps), W))
    if g.apply(x1).coords != y1.coords or g.apply(x2).coords != y2.coords:
        raise TransportError("transport verification failed (internal error)")
    if not g.is_integral:
        raise TransportError("transport produced a non-integral isometry")
    return g


def _stabilizer_match(lat, c, z, zp, p1, max_steps) -> Isometry:
    """Word fixing c that maps z to zp, via reduction in c^perp."""
    if c.norm() == 0:
        raise TransportError("isotropic first vector is not supported")
    K, basis, amb_index = _perp_context(lat, c, p1)
    if len(K.hyperbolic_pairs) < 2:
        raise TransportError(
            "stabilizer matching needs a third hyperbolic plane; "
            "not available in this lattice")
    c2 = c.norm()
    chi = int(la.vec(z.coords) @ lat.gram_matrix() @ la.vec(c.coords))

    def to_perp(v):
        amb = [c2 * v.coords[i] - chi * c.coords[i] for i in range(lat.rank)]
        e1, f1 = p1
        mu = amb[e1]
        kco = [mu] + [amb[j] for j in amb_index[1:]]
        # consistency of the plane component with mu * c*
        if amb[f1] != -c.coords[f1] * mu:
            raise TransportError("perp projection inconsistency")
        return kco

    kz = to_perp(z)
    kzp = to_perp(zp)
    gz = la.content(la.vec(kz))
    gzp = la.content(la.vec(kzp))
    if gz != gzp:
        raise TransportError(f"content mismatch in stabilizer: {gz} vs {gzp}")
    if gz == 0:
        return identity(lat)
    uz = K.vector([v // gz for v in kz])
    uzp = K.vector([v // gz for v in kzp])
    rz = reduce_vector(uz, None, max_steps)
    rzp = reduce_vector(uzp, None, max_steps)
    if rz.canonical.coords != rzp.canonical.coords:
        raise TransportError(
            f"second vectors reduce to different stabilizer normal forms: "
            f"{rz.canonical.coords} vs {rzp.canonical.coords}")
    pair_map = {}
    for kp, ap in zip(K.hyperbolic_pairs,
                      [pp for pp in lat.hyperbolic_pairs if pp != p1]):
        pair_map[kp] = ap
    wz = _translate_word(rz.word, basis, pair_map)
    wzp = _translate_word(rzp.word, basis, pair_map)
    S = compose(inverse(replay_word(lat, wzp)), replay_word(lat, wz))
    if S.apply(c).coords != c.coords:
        raise TransportError("stabilizer word moved the first vector (internal)")
    if S.apply(z).coords != zp.coords:
        raise TransportError(
            "stabilizer matching failed: normal forms agree but replay differs")
    return S


# ---------------------------------------------------------------------------
# brute-force oracle (tests): breadth-first search over small transvections


def bfs_reduce(x: LatticeVector, target: LatticeVector, planes=None,
               coeff_bound: int = 1, max_depth: int = 4) -> tuple | None:
    """Tiny BFS over transvection words mapping x to target; None if not found."""
    lat = x.lattice
    p1, p2 = planes if planes is not None else _default_planes(lat)
    gens = []
    from itertools import product
    rng = range(-coeff_bound, coeff_bound + 1)
    for pl in (p1, p2):
        free = [j for j in range(lat.rank) if j not in pl]
        for combo in product(rng, repeat=len(free)):
            if not any(combo):
                continue
            w = [0] * lat.rank
            for j, cval in zip(free, combo):
                w[j] = cval
            for kind in ("E", "exp"):
                if kind == "E":
                    iso = eichler_transvection_in(lat, pl, lat.vector(w))
                    atom = ("E", pl[0], pl[1], tuple(w))
                else:
                    iso = exp_map_in(lat, pl, lat.vector(w))
                    atom = ("exp", pl[0], pl[1], tuple(w), 1)
                gens.append((atom, iso))
    frontier = {x.coords: ()}
    seen = {x.coords}
    for _ in range(max_depth):
        nxt = {}
        for coords, word in frontier.items():
            v = la.vec(coords)
            for atom, iso in gens:
                img = tuple(int(t) for t in iso.num @ v)
                if img == target.coords:
                    return word + (atom,)
                if img not in seen:
                    seen.add(img)
                    nxt[img] = word + (atom,)
        frontier = nxt
        if not frontier:
            break
    return None
