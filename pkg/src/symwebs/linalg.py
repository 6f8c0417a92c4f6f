"""Exact dense linear algebra over a :class:`FieldSpec`.

Matrices are lists of row lists holding raw field values.  A handful of
vectorized numpy helpers for prime fields live at the bottom; they work on
``int64`` arrays whose entries are residues mod p.
"""
from __future__ import annotations

import numpy as np

from .errors import DimensionMismatch, SingularMatrix
from .exactfield import FieldSpec


def identity(F: FieldSpec, n: int):
    return [[F.one if i == j else F.zero for j in range(n)] for i in range(n)]


def zeros(F: FieldSpec, r: int, c: int):
    return [[F.zero] * c for _ in range(r)]


def coerce_matrix(F: FieldSpec, rows):
    return [[F.coerce(x) for x in row] for row in rows]


def transpose(a):
    return [list(col) for col in zip(*a)]


def matmul(F: FieldSpec, a, b):
    if len(a[0]) != len(b):
        raise DimensionMismatch("inner dimensions differ")
    bt = transpose(b)
    out = []
    for row in a:
        new = []
        for col in bt:
            s = F.zero
            for x, y in zip(row, col):
                if x and y:
                    s = s + x * y
            new.append(F.normalize(s))
        out.append(new)
    return out


def scale(F: FieldSpec, c, a):
    return [[F.mul(c, x) for x in row] for row in a]


def add(F: FieldSpec, a, b):
    return [[F.add(x, y) for x, y in zip(r, s)] for r, s in zip(a, b)]


def rref(F: FieldSpec, a):
    """Reduced row echelon form; returns ``(R, pivot_columns)``."""
    m = [list(row) for row in a]
    rows = len(m)
    cols = len(m[0]) if rows else 0
    pivots = []
    r = 0
    for c in range(cols):
        if r == rows:
            break
        piv = next((i for i in range(r, rows) if m[i][c]), None)
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        inv = F.inv(m[r][c])
        m[r] = [F.mul(inv, x) for x in m[r]]
        for i in range(rows):
            if i != r and m[i][c]:
                f = m[i][c]
                m[i] = [F.sub(x, F.mul(f, y)) for x, y in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
    return m, pivots


def rank(F: FieldSpec, a) -> int:
    if not a or not a[0]:
        return 0
    return len(rref(F, a)[1])


def nullspace(F: FieldSpec, a, ncols: int | None = None):
    """Basis of {x : a x = 0}, one vector per free column.

    Each basis vector is 1 at its own free column and 0 at the other free
    columns, so the coordinates of a kernel vector are its free entries.
    Returns ``(basis, free_columns)``.
    """
    if ncols is None:
        ncols = len(a[0])
    if not a:
        free = list(range(ncols))
    else:
        R, pivots = rref(F, a)
        free = [c for c in range(ncols) if c not in set(pivots)]
    if not a:
        return [[F.one if i == f else F.zero for i in range(ncols)] for f in free], free
    basis = []
    for f in free:
        v = [F.zero] * ncols
        v[f] = F.one
        for row, pc in zip(R, pivots):
            v[pc] = F.neg(row[f])
        basis.append(v)
    return basis, free


def det(F: FieldSpec, a):
    n = len(a)
    m = [list(row) for row in a]
    d = F.one
    for c in range(n):
        piv = next((i for i in range(c, n) if m[i][c]), None)
        if piv is None:
            return F.zero
        if piv != c:
            m[c], m[piv] = m[piv], m[c]
            d = F.neg(d)
        d = F.mul(d, m[c][c])
        inv = F.inv(m[c][c])
        for i in range(c + 1, n):
            if m[i][c]:
                f = F.mul(m[i][c], inv)
                m[i] = [F.sub(x, F.mul(f, y)) for x, y in zip(m[i], m[c])]
    return d


def inverse(F: FieldSpec, a):
    n = len(a)
    aug = [list(row) + e for row, e in zip(a, identity(F, n))]
    R, pivots = rref(F, aug)
    if pivots[:n] != list(range(n)):
        raise SingularMatrix("matrix is not invertible")
    return [row[n:] for row in R]


def solve_left(F: FieldSpec, rows, target):
    """Coefficients c with sum_i c_i rows[i] == target, or None."""
    k = len(rows)
    system = transpose(rows)  # len(target) equations, k unknowns
    aug = [eq + [t] for eq, t in zip(system, target)]
    R, pivots = rref(F, aug)
    if k in pivots:
        return None
    sol = [F.zero] * k
    for row, pc in zip(R, pivots):
        sol[pc] = row[k]
    return sol


def is_identity(F: FieldSpec, a) -> bool:
    return all(x == (F.one if i == j else F.zero) for i, row in enumerate(a) for j, x in enumerate(row))


# -- vectorized prime-field helpers --------------------------------------

def inverse_table(p: int) -> np.ndarray:
    tab = np.zeros(p, dtype=np.int64)
    for x in range(1, p):
        tab[x] = pow(x, -1, p)
    return tab


def batch_full_rank(mats: np.ndarray, p: int) -> np.ndarray:
    """Boolean mask: which square matrices in a (N, d, d) stack are invertible mod p."""
    a = np.array(mats, dtype=np.int64) % p
    N, d, _ = a.shape
    ok = np.ones(N, dtype=bool)
    inv = inverse_table(p)
    idx = np.arange(N)
    for c in range(d):
        sub = a[:, c:, c] != 0
        has = sub.any(axis=1)
        ok &= has
        piv = c + np.argmax(sub, axis=1)
        rows_c = a[idx, c].copy()
        a[idx, c] = a[idx, piv]
        a[idx, piv] = rows_c
        pv = inv[a[:, c, c]]
        a[:, c] = a[:, c] * pv[:, None] % p
        f = a[:, c + 1:, c]
        a[:, c + 1:] = (a[:, c + 1:] - f[:, :, None] * a[:, None, c]) % p
    return ok


def mod_rref_np(a: np.ndarray, p: int):
    """Row reduce one integer matrix mod p; returns (R, pivots)."""
    m = np.array(a, dtype=np.int64) % p
    rows, cols = m.shape
    pivots = []
    r = 0
    for c in range(cols):
        if r == rows:
            break
        nz = np.nonzero(m[r:, c])[0]
        if nz.size == 0:
            continue
        piv = r + nz[0]
        m[[r, piv]] = m[[piv, r]]
        m[r] = m[r] * pow(int(m[r, c]), -1, p) % p
        for i in range(rows):
            if i != r and m[i, c]:
                m[i] = (m[i] - m[i, c] * m[r]) % p
        pivots.append(c)
        r += 1
    return m, pivots
