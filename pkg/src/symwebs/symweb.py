"""Webs of symmetric matrices M = (M_0, ..., M_m) and their discriminants.

A web is identified with the matrix of linear forms
M(X) = X_0 M_0 + ... + X_m M_m.  The group GL_{m+1} x GL_{n+1} acts on the
right by (M.(A, P))(X) = P^T M(AX) P.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass
from functools import cached_property
from typing import Optional, Sequence

import numpy as np

from . import linalg
from .errors import (
    DimensionMismatch,
    DomainError,
    FactorsDoNotExhaust,
    NotSymmetric,
    SingularMatrix,
    ZeroDiscriminant,
)
from .exactfield import FieldSpec, Scalar
from .mpoly import MPoly, is_geometrically_squarefree, multiplicity

MAX_DET_SIZE = 12


class SymWeb:
    """An immutable (m+1)-tuple of symmetric (n+1)x(n+1) matrices over ``field``."""

    def __init__(self, field: FieldSpec, mats: Sequence):
        mats = tuple(tuple(tuple(field.coerce(x) for x in row) for row in mat) for mat in mats)
        if len(mats) < 3:
            raise DimensionMismatch(f"need m >= 2, got {len(mats)} matrices")
        size = len(mats[0])
        if size < 2:
            raise DimensionMismatch("need n >= 1")
        for i, mat in enumerate(mats):
            if len(mat) != size or any(len(row) != size for row in mat):
                raise DimensionMismatch(f"matrix {i} is not {size}x{size}")
            for r in range(size):
                for c in range(r + 1, size):
                    if mat[r][c] != mat[c][r]:
                        raise NotSymmetric(f"matrix {i} differs at ({r},{c}) and ({c},{r})")
        self.field = field
        self.m = len(mats) - 1
        self.n = size - 1
        self.mats = mats

    @property
    def size(self) -> int:
        return self.n + 1

    def matrix(self, i: int):
        return [list(row) for row in self.mats[i]]

    def __eq__(self, other):
        return isinstance(other, SymWeb) and (self.field, self.mats) == (other.field, other.mats)

    def __hash__(self):
        return hash((self.field, self.mats))

    def __repr__(self):
        return f"SymWeb({self.field}, m={self.m}, n={self.n})"

    def scaled(self, c) -> "SymWeb":
        F = self.field
        c = F.coerce(c)
        return SymWeb(F, [[[F.mul(c, x) for x in row] for row in mat] for mat in self.mats])

    def linear_form_matrix(self):
        """M(X) as a matrix of MPoly linear forms in m+1 variables."""
        F = self.field
        s = self.size
        return [
            [MPoly.linear_form(F, [self.mats[i][r][c] for i in range(self.m + 1)]) for c in range(s)]
            for r in range(s)
        ]

    def as_array(self) -> np.ndarray:
        """Integer array of shape (m+1, n+1, n+1); prime fields only."""
        if self.field.p is None:
            raise DomainError("array view needs a prime field")
        return np.array(self.mats, dtype=np.int64)

    def code(self) -> int:
        """Base-p integer encoding of the upper triangles (prime fields).

        Digits run over matrices, then rows, then columns c >= r, most
        significant first; this is the canonical sort key for webs.
        """
        p = self.field.p
        code = 0
        for mat in self.mats:
            for r in range(self.size):
                for c in range(r, self.size):
                    code = code * p + mat[r][c]
        return code

    @cached_property
    def disc(self) -> MPoly:
        return discriminant(self)


def web_from_code(field: FieldSpec, m: int, n: int, code: int) -> SymWeb:
    p = field.p
    s = n + 1
    tri = [(r, c) for r in range(s) for c in range(r, s)]
    digits = []
    for _ in range((m + 1) * len(tri)):
        digits.append(code % p)
        code //= p
    digits.reverse()
    mats = []
    it = iter(digits)
    for _ in range(m + 1):
        mat = [[0] * s for _ in range(s)]
        for r, c in tri:
            mat[r][c] = mat[c][r] = next(it)
        mats.append(mat)
    return SymWeb(field, mats)


@dataclass(frozen=True)
class GroupElem:
    """(A, P) in GL_{m+1}(k) x GL_{n+1}(k), entries stored raw."""

    field: FieldSpec
    A: tuple
    P: tuple

    def __init__(self, field: FieldSpec, A, P):
        A = tuple(tuple(field.coerce(x) for x in row) for row in A)
        P = tuple(tuple(field.coerce(x) for x in row) for row in P)
        for name, mat in (("A", A), ("P", P)):
            if any(len(row) != len(mat) for row in mat):
                raise DimensionMismatch(f"{name} is not square")
            if not linalg.det(field, mat):
                raise SingularMatrix(f"{name} is singular")
        object.__setattr__(self, "field", field)
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "P", P)

    @classmethod
    def identity(cls, field, m, n):
        return cls(field, linalg.identity(field, m + 1), linalg.identity(field, n + 1))

    @classmethod
    def scalar(cls, field, m, n, a):
        a = field.coerce(a)
        A = [[a if i == j else field.zero for j in range(m + 1)] for i in range(m + 1)]
        return cls(field, A, linalg.identity(field, n + 1))

    def __mul__(self, other: "GroupElem") -> "GroupElem":
        F = self.field
        return GroupElem(F, linalg.matmul(F, self.A, other.A), linalg.matmul(F, self.P, other.P))

    def inverse(self) -> "GroupElem":
        F = self.field
        return GroupElem(F, linalg.inverse(F, self.A), linalg.inverse(F, self.P))

    def det_A(self) -> Scalar:
        return Scalar(self.field, linalg.det(self.field, self.A))

    def det_P(self) -> Scalar:
        return Scalar(self.field, linalg.det(self.field, self.P))


class WebClass(str, enum.Enum):
    ZERO_DISC = "zero_disc"
    NONREDUCED = "nonreduced"
    GEOMETRICALLY_REDUCED = "geometrically_reduced"

    def __str__(self):
        return self.value


# -- determinants of matrices of polynomials -------------------------------

def det_poly(entries) -> MPoly:
    """Determinant of a square matrix of MPoly by Laplace expansion over column subsets.

    dp[mask] is the signed sum over all ways of assigning the first
    popcount(mask) rows to the columns in mask.  Choosing column c for the
    next row contributes the sign (-1)^(#unused columns left of c).
    """
    s = len(entries)
    if s > MAX_DET_SIZE:
        raise DomainError(f"determinant size {s} exceeds the cap {MAX_DET_SIZE}")
    F, k = entries[0][0].field, entries[0][0].nvars
    if s == 0:
        return MPoly.constant(F, k, 1)
    dp = {0: MPoly.constant(F, k, 1)}
    for r in range(s):
        nxt: dict[int, MPoly] = {}
        for mask, val in dp.items():
            if not val:
                continue
            left_unused = 0
            for c in range(s):
                if mask >> c & 1:
                    continue
                e = entries[r][c]
                if e:
                    term = val * e
                    if left_unused & 1:
                        term = -term
                    nm = mask | (1 << c)
                    nxt[nm] = nxt[nm] + term if nm in nxt else term
                left_unused += 1
        dp = nxt
    return dp.get((1 << s) - 1, MPoly.zero(F, k))


def discriminant(M: SymWeb) -> MPoly:
    """disc(M) = det(X_0 M_0 + ... + X_m M_m)."""
    return det_poly(M.linear_form_matrix())


def adjugate(M: SymWeb):
    """Matrix of signed cofactors of M(X): adj[i][j] = (-1)^(i+j) det(minor_{j,i})."""
    L = M.linear_form_matrix()
    s = M.size
    F, k = M.field, M.m + 1
    if s == 1:
        return [[MPoly.constant(F, k, 1)]]
    adj = [[None] * s for _ in range(s)]
    for i in range(s):
        for j in range(s):
            minor = [[L[r][c] for c in range(s) if c != i] for r in range(s) if r != j]
            d = det_poly(minor)
            adj[i][j] = -d if (i + j) % 2 else d
    return adj


def poly_matmul(a, b):
    s, t, u = len(a), len(b), len(b[0])
    F, k = a[0][0].field, a[0][0].nvars
    out = []
    for i in range(s):
        row = []
        for j in range(u):
            acc = MPoly.zero(F, k)
            for l in range(t):
                if a[i][l] and b[l][j]:
                    acc = acc + a[i][l] * b[l][j]
            row.append(acc)
        out.append(row)
    return out


# -- the group action ------------------------------------------------------

def congruence_transform(F: FieldSpec, M: SymWeb, P) -> list:
    """The list [P^T M_i P]_i as raw matrices."""
    Pt = linalg.transpose(P)
    return [linalg.matmul(F, linalg.matmul(F, Pt, M.matrix(i)), P) for i in range(M.m + 1)]


def act(M: SymWeb, g: GroupElem) -> SymWeb:
    """M.(A, P) = (sum_i a_{i,j} P^T M_i P)_j."""
    F = M.field
    if g.field != F:
        raise DimensionMismatch("group element over a different field")
    if len(g.A) != M.m + 1 or len(g.P) != M.size:
        raise DimensionMismatch("group element has the wrong size for this web")
    T = congruence_transform(F, M, g.P)
    s = M.size
    out = []
    for j in range(M.m + 1):
        mat = [[F.zero] * s for _ in range(s)]
        for i in range(M.m + 1):
            a = g.A[i][j]
            if a:
                for r in range(s):
                    Ti, row = T[i][r], mat[r]
                    for c in range(s):
                        row[c] = F.add(row[c], F.mul(a, Ti[c]))
        out.append(mat)
    return SymWeb(F, out)


def normalized_act(M: SymWeb, g: GroupElem) -> SymWeb:
    """det(A)^{-1} * M.(A, P), the action compatible with rescaling the duality."""
    F = M.field
    return act(M, g).scaled(F.inv(linalg.det(F, g.A)))


def transformed_discriminant(M: SymWeb, g: GroupElem) -> MPoly:
    """det(P)^2 * disc(M)(AX): the predicted discriminant of M.(A, P)."""
    F = M.field
    dp = linalg.det(F, g.P)
    return M.disc.substitute_linear(g.A).scale(F.mul(dp, dp))


def classify(M: SymWeb) -> WebClass:
    d = M.disc
    if not d:
        return WebClass.ZERO_DISC
    if is_geometrically_squarefree(d):
        return WebClass.GEOMETRICALLY_REDUCED
    return WebClass.NONREDUCED


def multiplicity_profile(M: SymWeb, factors: Sequence[MPoly]) -> tuple[list[int], Scalar]:
    """Exponents n_i and unit u with disc(M) = u * prod F_i^{n_i}."""
    d = M.disc
    if not d:
        raise ZeroDiscriminant("disc(M) = 0")
    exps = []
    rest = d
    for f in factors:
        e = multiplicity(rest, f)
        exps.append(e)
        for _ in range(e):
            rest = rest.exact_div(f)
    if not rest.is_constant():
        raise FactorsDoNotExhaust(f"residual factor {rest}")
    return exps, Scalar(M.field, rest.leading_coefficient())


# -- vectorized discriminants over prime fields ----------------------------

def monomials(nvars: int, degree: int) -> list[tuple]:
    """All exponent vectors of the given total degree, descending lex."""
    if nvars == 1:
        return [(degree,)]
    out = []
    for d in range(degree, -1, -1):
        for rest in monomials(nvars - 1, degree - d):
            out.append((d,) + rest)
    return out


def dense_coefficients(f: MPoly, degree: int) -> np.ndarray:
    mons = monomials(f.nvars, degree)
    vec = np.zeros(len(mons), dtype=np.int64)
    index = {e: i for i, e in enumerate(mons)}
    for e, c in f.terms.items():
        if e not in index:
            raise DomainError("polynomial has terms outside the given degree")
        vec[index[e]] = c
    return vec


def batch_discriminants(webs: np.ndarray, p: int) -> np.ndarray:
    """Dense discriminant coefficients for a stack of webs mod p.

    ``webs`` has shape (N, m+1, s, s); the result has shape (N, #monomials)
    in the order of :func:`monomials` (nvars=m+1, degree=s).  Same subset
    recursion as :func:`det_poly`, run on dense coefficient arrays.
    """
    if p >= 2**20:
        raise DomainError("vectorized discriminants need p < 2**20")
    webs = np.asarray(webs, dtype=np.int64) % p
    N, k, s, _ = webs.shape
    mons = [monomials(k, d) for d in range(s + 1)]
    index = [{e: i for i, e in enumerate(ms)} for ms in mons]
    # shift[d][:, i] = index of (monomial j of degree d) * X_i in degree d+1
    shift = []
    for d in range(s):
        tab = np.empty((len(mons[d]), k), dtype=np.int64)
        for j, e in enumerate(mons[d]):
            for i in range(k):
                ee = list(e)
                ee[i] += 1
                tab[j, i] = index[d + 1][tuple(ee)]
        shift.append(tab)
    dp = {0: np.ones((N, 1), dtype=np.int64)}
    for r in range(s):
        nxt: dict[int, np.ndarray] = {}
        for mask, val in dp.items():
            left_unused = 0
            for c in range(s):
                if mask >> c & 1:
                    continue
                coef = webs[:, :, r, c]
                prod = np.zeros((N, len(mons[r + 1])), dtype=np.int64)
                for i in range(k):
                    prod[:, shift[r][:, i]] += val * coef[:, i:i + 1]
                if left_unused & 1:
                    prod = -prod
                nm = mask | (1 << c)
                nxt[nm] = (nxt[nm] + prod) % p if nm in nxt else prod % p
                left_unused += 1
        dp = nxt
    return dp[(1 << s) - 1] % p


def batch_proportional(coeffs: np.ndarray, target: np.ndarray, p: int) -> np.ndarray:
    """Mask of rows equal to u*target for some unit u (target nonzero)."""
    j = int(np.nonzero(target)[0][0])
    inv = linalg.inverse_table(p)
    u = coeffs[:, j] * inv[target[j]] % p
    return (u != 0) & np.all(coeffs == (u[:, None] * target[None, :]) % p, axis=1)


def right_multiply(M: SymWeb, R) -> Optional[SymWeb]:
    """The web (M_i R)_i if every product is symmetric, else None."""
    F = M.field
    mats = [linalg.matmul(F, M.matrix(i), R) for i in range(M.m + 1)]
    try:
        return SymWeb(F, mats)
    except NotSymmetric:
        return None


def pullback_unit(M: SymWeb, Mp: SymWeb) -> Optional[Scalar]:
    """u with disc(Mp) = u * disc(M), if one exists."""
    from .mpoly import proportional

    return proportional(Mp.disc, M.disc)


__all__ = [
    "SymWeb",
    "GroupElem",
    "WebClass",
    "discriminant",
    "adjugate",
    "act",
    "normalized_act",
    "classify",
    "multiplicity_profile",
    "transformed_discriminant",
    "batch_discriminants",
    "web_from_code",
]
