"""Exact integer and rational linear algebra kernels.

Matrices are numpy arrays with dtype=object holding Python ints (arbitrary
precision) or Fractions.  Rational matrices are usually carried around as a
pair (num, den) with an integer numerator matrix and a positive common
denominator; Fraction entries only appear in the slower elimination
routines.  No floating point anywhere.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd

import numpy as np


def matmul(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Exact product of integer object-dtype matrices.

    Uses the much faster int64 kernel when a conservative bound rules out
    overflow; falls back to exact object arithmetic otherwise.
    """
    try:
        a64 = a.astype(np.int64)
        b64 = b.astype(np.int64)
    except (OverflowError, TypeError, ValueError):
        return a @ b
    if (a64 != a).any() or (b64 != b).any():
        return a @ b                      # non-integer entries
    ma = int(np.abs(a64).max(initial=0))
    mb = int(np.abs(b64).max(initial=0))
    k = a.shape[1] if a.ndim == 2 else a.shape[0]
    if ma and mb and k * ma * mb >= 2 ** 62:
        return a @ b
    return (a64 @ b64).astype(object)


def mat(rows) -> np.ndarray:
    """Build an object-dtype matrix from nested sequences."""
    m = np.array([[x for x in row] for row in rows], dtype=object)
    if m.ndim != 2:
        raise ValueError("expected a 2-d matrix")
    return m


def vec(entries) -> np.ndarray:
    v = np.array(list(entries), dtype=object)
    if v.ndim != 1:
        raise ValueError("expected a 1-d vector")
    return v


def identity(n: int) -> np.ndarray:
    m = np.zeros((n, n), dtype=object)
    for i in range(n):
        m[i, i] = 1
    return m


def zeros(r: int, c: int) -> np.ndarray:
    return np.zeros((r, c), dtype=object)


def is_integer_matrix(m: np.ndarray) -> bool:
    return all(isinstance(x, int) or (isinstance(x, Fraction) and x.denominator == 1)
               for x in m.flat)


def to_int_matrix(m: np.ndarray) -> np.ndarray:
    out = np.zeros(m.shape, dtype=object)
    for idx, x in np.ndenumerate(m):
        if isinstance(x, Fraction):
            if x.denominator != 1:
                raise ValueError(f"entry {x} is not an integer")
            out[idx] = int(x)
        else:
            out[idx] = int(x)
    return out


def content(m: np.ndarray) -> int:
    """gcd of all entries (0 for the zero matrix)."""
    g = 0
    for x in m.flat:
        g = gcd(g, int(x))
        if g == 1:
            return 1
    return g


def normalize_num_den(num: np.ndarray, den: int) -> tuple[np.ndarray, int]:
    """Reduce (num, den) so that den > 0 and gcd(content(num), den) = 1."""
    if den == 0:
        raise ZeroDivisionError("zero denominator")
    if den < 0:
        num, den = -num, -den
    g = gcd(content(num), den)
    if g > 1:
        num = num // g
        den //= g
    return num, den


def fractions_to_num_den(m: np.ndarray) -> tuple[np.ndarray, int]:
    """Split a Fraction/int matrix into an integer matrix and a common denominator."""
    den = 1
    for x in m.flat:
        if isinstance(x, Fraction):
            den = den * x.denominator // gcd(den, x.denominator)
    num = np.zeros(m.shape, dtype=object)
    for idx, x in np.ndenumerate(m):
        num[idx] = int(Fraction(x) * den)
    return normalize_num_den(num, den)


def num_den_to_fractions(num: np.ndarray, den: int) -> np.ndarray:
    out = np.zeros(num.shape, dtype=object)
    for idx, x in np.ndenumerate(num):
        out[idx] = Fraction(int(x), den)
    return out


def det(m: np.ndarray):
    """Exact determinant.  Bareiss for integer matrices, Fractions otherwise."""
    n = m.shape[0]
    if m.shape[0] != m.shape[1]:
        raise ValueError("determinant of a non-square matrix")
    if n == 0:
        return 1
    if is_integer_matrix(m):
        return _det_bareiss(to_int_matrix(m))
    a = np.array([[Fraction(x) for x in row] for row in m], dtype=object)
    d = Fraction(1)
    for col in range(n):
        piv = next((r for r in range(col, n) if a[r, col] != 0), None)
        if piv is None:
            return Fraction(0)
        if piv != col:
            a[[col, piv]] = a[[piv, col]]
            d = -d
        d *= a[col, col]
        inv = 1 / a[col, col]
        for r in range(col + 1, n):
            if a[r, col] != 0:
                a[r, col:] = a[r, col:] - (a[r, col] * inv) * a[col, col:]
    return d


def _det_bareiss(a: np.ndarray) -> int:
    a = a.copy()
    n = a.shape[0]
    sign = 1
    prev = 1
    for k in range(n - 1):
        if a[k, k] == 0:
            piv = next((r for r in range(k + 1, n) if a[r, k] != 0), None)
            if piv is None:
                return 0
            a[[k, piv]] = a[[piv, k]]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i, j] = (a[i, j] * a[k, k] - a[i, k] * a[k, j]) // prev
            a[i, k] = 0
        prev = a[k, k]
    return sign * int(a[n - 1, n - 1])


def inverse(m: np.ndarray) -> tuple[np.ndarray, int]:
    """Exact inverse of an integer (or Fraction) square matrix.

    Returns (num, den) with m @ num == den * I.
    """
    n = m.shape[0]
    a = np.array([[Fraction(x) for x in row] for row in m], dtype=object)
    b = np.array([[Fraction(int(i == j)) for j in range(n)] for i in range(n)],
                 dtype=object)
    for col in range(n):
        piv = next((r for r in range(col, n) if a[r, col] != 0), None)
        if piv is None:
            raise ZeroDivisionError("singular matrix")
        if piv != col:
            a[[col, piv]] = a[[piv, col]]
            b[[col, piv]] = b[[piv, col]]
        inv = 1 / a[col, col]
        a[col] = a[col] * inv
        b[col] = b[col] * inv
        for r in range(n):
            if r != col and a[r, col] != 0:
                c = a[r, col]
                a[r] = a[r] - c * a[col]
                b[r] = b[r] - c * b[col]
    return fractions_to_num_den(b)


def solve(a: np.ndarray, rhs: np.ndarray) -> np.ndarray | None:
    """Solve a @ x = rhs exactly over the rationals.

    rhs may be a vector or a matrix.  Returns a Fraction array, or None if the
    system is inconsistent.  For underdetermined systems an arbitrary solution
    is returned (free variables set to 0).
    """
    rows, cols = a.shape
    one_d = rhs.ndim == 1
    r = rhs.reshape(rows, -1)
    aug = np.zeros((rows, cols + r.shape[1]), dtype=object)
    for i in range(rows):
        for j in range(cols):
            aug[i, j] = Fraction(a[i, j])
        for j in range(r.shape[1]):
            aug[i, cols + j] = Fraction(r[i, j])
    pivots = []
    row = 0
    for col in range(cols):
        piv = next((i for i in range(row, rows) if aug[i, col] != 0), None)
        if piv is None:
            continue
        if piv != row:
            aug[[row, piv]] = aug[[piv, row]]
        aug[row] = aug[row] / aug[row, col]
        for i in range(rows):
            if i != row and aug[i, col] != 0:
                aug[i] = aug[i] - aug[i, col] * aug[row]
        pivots.append(col)
        row += 1
        if row == rows:
            break
    # consistency: zero rows of the coefficient part must have zero rhs
    for i in range(row, rows):
        if any(aug[i, cols + j] != 0 for j in range(r.shape[1])):
            return None
    x = np.zeros((cols, r.shape[1]), dtype=object)
    for i in range(cols):
        for j in range(r.shape[1]):
            x[i, j] = Fraction(0)
    for i, col in enumerate(pivots):
        for j in range(r.shape[1]):
            x[col, j] = aug[i, cols + j]
    return x[:, 0] if one_d else x


def rank(m: np.ndarray) -> int:
    rows, cols = m.shape
    a = np.array([[Fraction(x) for x in row] for row in m], dtype=object)
    rk = 0
    for col in range(cols):
        piv = next((i for i in range(rk, rows) if a[i, col] != 0), None)
        if piv is None:
            continue
        if piv != rk:
            a[[rk, piv]] = a[[piv, rk]]
        a[rk] = a[rk] / a[rk, col]
        for i in range(rk + 1, rows):
            if a[i, col] != 0:
                a[i] = a[i] - a[i, col] * a[rk]
        rk += 1
        if rk == rows:
            break
    return rk


def smith_normal_form(m: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Smith normal form of an integer matrix.

    Returns (S, P, Q) with P @ m @ Q == S, P and Q unimodular, S diagonal with
    S[i,i] >= 0 and S[i,i] | S[i+1,i+1].
    """
    a = to_int_matrix(m)
    rows, cols = a.shape
    p = identity(rows)
    q = identity(cols)
    t = 0
    while t < min(rows, cols):
        # find a nonzero pivot in the remaining block
        piv = None
        for i in range(t, rows):
            for j in range(t, cols):
                if a[i, j] != 0:
                    piv = (i, j)
                    break
            if piv:
                break
        if piv is None:
            break
        i, j = piv
        if i != t:
            a[[t, i]] = a[[i, t]]
            p[[t, i]] = p[[i, t]]
        if j != t:
            a[:, [t, j]] = a[:, [j, t]]
            q[:, [t, j]] = q[:, [j, t]]
        while True:
            # clear column t
            for i in range(t + 1, rows):
                if a[i, t] != 0:
                    if a[i, t] % a[t, t] != 0:
                        g, x, y = _xgcd(int(a[t, t]), int(a[i, t]))
                        u, v = a[t, t] // g, a[i, t] // g
                        rt, ri = a[t].copy(), a[i].copy()
                        a[t], a[i] = x * rt + y * ri, -v * rt + u * ri
                        rt, ri = p[t].copy(), p[i].copy()
                        p[t], p[i] = x * rt + y * ri, -v * rt + u * ri
                    k = a[i, t] // a[t, t]
                    a[i] = a[i] - k * a[t]
                    p[i] = p[i] - k * p[t]
            # clear row t
            changed = False
            for j in range(t + 1, cols):
                if a[t, j] != 0:
                    if a[t, j] % a[t, t] != 0:
                        g, x, y = _xgcd(int(a[t, t]), int(a[t, j]))
                        u, v = a[t, t] // g, a[t, j] // g
                        ct, cj = a[:, t].copy(), a[:, j].copy()
                        a[:, t], a[:, j] = x * ct + y * cj, -v * ct + u * cj
                        ct, cj = q[:, t].copy(), q[:, j].copy()
                        q[:, t], q[:, j] = x * ct + y * cj, -v * ct + u * cj
                        changed = True  # column ops may dirty column t below
                    else:
                        k = a[t, j] // a[t, t]
                        a[:, j] = a[:, j] - k * a[:, t]
                        q[:, j] = q[:, j] - k * q[:, t]
            if not changed and all(a[i, t] == 0 for i in range(t + 1, rows)):
                break
        t += 1
    # positivity and divisibility chain
    r = min(rows, cols)
    for i in range(r):
        if a[i, i] < 0:
            a[:, i] = -a[:, i]
            q[:, i] = -q[:, i]
    done = False
    while not done:
        done = True
        for i in range(r - 1):
            d1, d2 = int(a[i, i]), int(a[i + 1, i + 1])
            if d1 != 0 and d2 % d1 != 0:
                done = False
                # fold a[i+1,i+1] into position (i,i)
                a[:, i] = a[:, i] + a[:, i + 1]
                q[:, i] = q[:, i] + q[:, i + 1]
                g, x, y = _xgcd(d1, d2)
                # row ops to restore diagonal form on the 2x2 block
                rt, ri = a[i].copy(), a[i + 1].copy()
                a[i], a[i + 1] = x * rt + y * ri, -(d2 // g) * rt + (d1 // g) * ri
                rt, ri = p[i].copy(), p[i + 1].copy()
                p[i], p[i + 1] = x * rt + y * ri, -(d2 // g) * rt + (d1 // g) * ri
                k = a[i, i + 1] // a[i, i]
                a[:, i + 1] = a[:, i + 1] - k * a[:, i]
                q[:, i + 1] = q[:, i + 1] - k * q[:, i]
                if a[i + 1, i] != 0:
                    k = a[i + 1, i] // a[i, i]
                    a[i + 1] = a[i + 1] - k * a[i]
                    p[i + 1] = p[i + 1] - k * p[i]
                if a[i, i] < 0:
                    a[:, i] = -a[:, i]
                    q[:, i] = -q[:, i]
                if a[i + 1, i + 1] < 0:
                    a[:, i + 1] = -a[:, i + 1]
                    q[:, i + 1] = -q[:, i + 1]
    return a, p, q


def _xgcd(a: int, b: int) -> tuple[int, int, int]:
    """Return (g, x, y) with x*a + y*b = g = gcd(a, b) >= 0."""
    old_r, r = a, b
    old_s, s = 1, 0
    old_t, t = 0, 1
    while r != 0:
        qt = old_r // r
        old_r, r = r, old_r - qt * r
        old_s, s = s, old_s - qt * s
        old_t, t = t, old_t - qt * t
    if old_r < 0:
        old_r, old_s, old_t = -old_r, -old_s, -old_t
    return old_r, old_s, old_t


def xgcd(a: int, b: int) -> tuple[int, int, int]:
    return _xgcd(a, b)


def row_saturation(g: np.ndarray) -> np.ndarray:
    """Basis (as rows) of the saturation of the row span of integer matrix g.

    The saturation is (Q-span of the rows) intersected with Z^n.
    """
    s, p, q = smith_normal_form(g)
    r = sum(1 for i in range(min(s.shape)) if s[i, i] != 0)
    qinv, d = inverse(q)
    assert d == 1
    return qinv[:r, :].copy()


def in_row_span_z(g: np.ndarray, x: np.ndarray) -> bool:
    """Whether integer vector x is an integral combination of the rows of g."""
    s, p, q = smith_normal_form(g)
    # rows of g: row-space over Z.  x in rowspan(g) iff x @ q in rowspan(s).
    y = x @ q
    r = min(s.shape)
    for j in range(len(y)):
        if j < r and s[j, j] != 0:
            if y[j] % s[j, j] != 0:
                return False
        else:
            if y[j] != 0:
                return False
    return True


def integer_kernel(m: np.ndarray) -> np.ndarray:
    """Columns form a basis of {x in Z^n : m @ x = 0}; the basis is saturated."""
    s, p, q = smith_normal_form(m)
    r = sum(1 for i in range(min(s.shape)) if s[i, i] != 0)
    return q[:, r:].copy()


def solve_integral(a: np.ndarray, b: np.ndarray) -> np.ndarray | None:
    """An integer solution x of a @ x = b, or None if none exists."""
    s, p, q = smith_normal_form(a)
    c = p @ b
    r = min(s.shape)
    y = np.zeros(a.shape[1], dtype=object)
    for i in range(len(c)):
        if i < r and s[i, i] != 0:
            if c[i] % s[i, i] != 0:
                return None
            y[i] = c[i] // s[i, i]
        else:
            if c[i] != 0:
                return None
    return q @ y
