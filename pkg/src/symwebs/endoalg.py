"""The endomorphism algebra L0 of a web and the unit groups built on it.

L0 is realized as the solution space of P^T M_i = M_i P' (all i) inside
pairs of (n+1)x(n+1) matrices, with product (P1, P1')(P2, P2') =
(P2 P1, P1' P2') and involution sigma(P, P') = (P', P).  After the linear
solve the algebra is carried by structure constants, so everything else
is plain dim-dimensional arithmetic.

Elements are coordinate vectors in the computed basis.  Over F_q they are
also encoded as integers ``sum_a x_a q^a``; that code is the canonical sort
key for every enumerated list returned here.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Union

import numpy as np

from . import linalg
from .errors import (
    ClosureFailure,
    EnumerationTooLarge,
    InfiniteField,
    NotInGrRegime,
    ZeroDiscriminant,
)
from .exactfield import FieldSpec
from .symweb import SymWeb

DEFAULT_ENUM_CAP = 10**8
INFINITE_OR_UNKNOWN = "infinite-or-unknown"


def _flatten_pair(P, Pp):
    return [x for row in P for x in row] + [x for row in Pp for x in row]


def _unflatten_pair(v, s):
    P = [list(v[r * s:(r + 1) * s]) for r in range(s)]
    Pp = [list(v[s * s + r * s:s * s + (r + 1) * s]) for r in range(s)]
    return P, Pp


class EndoAlgebra:
    """Structure-constant presentation of L0 for one web."""

    def __init__(self, web: SymWeb, basis, free, structure, sigma, identity):
        self.web = web
        self.field: FieldSpec = web.field
        self.basis = basis  # list of (P, P') raw matrix pairs
        self._free = free
        self.dim = len(basis)
        self.structure_constants = structure  # [a][b] -> coords of e_a e_b
        self.sigma_matrix = sigma  # row a = coords of sigma(e_a)
        self.identity_coords = identity

    # -- elements -----------------------------------------------------------
    def coords_of(self, P, Pp) -> Optional[list]:
        """Coordinates of the pair (P, P') or None if it is not in L0."""
        v = _flatten_pair(P, Pp)
        x = [v[f] for f in self._free]
        if self._combine(x) != v:
            return None
        return x

    def _combine(self, x):
        F = self.field
        s = self.web.size
        out = [F.zero] * (2 * s * s)
        for c, (P, Pp) in zip(x, self.basis):
            if c:
                flat = _flatten_pair(P, Pp)
                out = [F.add(o, F.mul(c, y)) for o, y in zip(out, flat)]
        return out

    def element_pair(self, x):
        """The matrix pair (P, P') of a coordinate vector."""
        return _unflatten_pair(self._combine(x), self.web.size)

    def mul(self, x, y):
        F = self.field
        out = [F.zero] * self.dim
        for a, xa in enumerate(x):
            if not xa:
                continue
            for b, yb in enumerate(y):
                if not yb:
                    continue
                c = F.mul(xa, yb)
                for e, s in enumerate(self.structure_constants[a][b]):
                    if s:
                        out[e] = F.add(out[e], F.mul(c, s))
        return out

    def sigma(self, x):
        F = self.field
        out = [F.zero] * self.dim
        for a, xa in enumerate(x):
            if xa:
                out = [F.add(o, F.mul(xa, s)) for o, s in zip(out, self.sigma_matrix[a])]
        return out

    def left_matrix(self, x):
        """Matrix of y -> x*y; column b holds the coordinates of x*e_b."""
        cols = [self.mul(x, [self.field.one if i == b else self.field.zero for i in range(self.dim)])
                for b in range(self.dim)]
        return linalg.transpose(cols)

    # -- numpy views over F_q -------------------------------------------------
    def structure_array(self) -> np.ndarray:
        return np.array(self.structure_constants, dtype=np.int64).reshape(self.dim, self.dim, self.dim)

    def sigma_array(self) -> np.ndarray:
        return np.array(self.sigma_matrix, dtype=np.int64).reshape(self.dim, self.dim)

    def __repr__(self):
        return f"EndoAlgebra(dim={self.dim}, field={self.field})"


def endomorphism_algebra(M: SymWeb) -> EndoAlgebra:
    """Solve P^T M_i = M_i P' exactly and assemble the algebra."""
    if not M.disc:
        raise ZeroDiscriminant("L0 is only computed for webs with nonzero discriminant")
    F = M.field
    s = M.size
    nun = 2 * s * s
    rows = []
    for i in range(M.m + 1):
        Mi = M.mats[i]
        for r in range(s):
            for c in range(s):
                eq = [F.zero] * nun
                for k in range(s):
                    # (P^T M_i)[r][c] = sum_k P[k][r] M_i[k][c]
                    eq[k * s + r] = F.add(eq[k * s + r], Mi[k][c])
                    # (M_i P')[r][c] = sum_k M_i[r][k] P'[k][c]
                    eq[s * s + k * s + c] = F.sub(eq[s * s + k * s + c], Mi[r][k])
                if any(eq):
                    rows.append(eq)
    vecs, free = linalg.nullspace(F, rows, nun)
    basis = [_unflatten_pair(v, s) for v in vecs]
    alg = EndoAlgebra(M, basis, free, None, None, None)

    def coords_or_fail(P, Pp, what):
        x = alg.coords_of(P, Pp)
        if x is None:
            raise ClosureFailure(f"{what} is not in the solution space")
        return x

    structure = []
    for a, (Pa, Ppa) in enumerate(basis):
        row = []
        for b, (Pb, Ppb) in enumerate(basis):
            prod = (linalg.matmul(F, Pb, Pa), linalg.matmul(F, Ppa, Ppb))
            row.append(coords_or_fail(*prod, f"product e{a}*e{b}"))
        structure.append(row)
    sigma = [coords_or_fail(Pp, P, f"sigma(e{a})") for a, (P, Pp) in enumerate(basis)]
    I = linalg.identity(F, s)
    ident = coords_or_fail(I, I, "(I, I)")
    alg.structure_constants = structure
    alg.sigma_matrix = sigma
    alg.identity_coords = ident
    return alg


def sigma_fixed_space(alg: EndoAlgebra) -> list:
    """Basis (coordinate vectors) of L = ker(sigma - id)."""
    F = alg.field
    d = alg.dim
    # column a of the sigma matrix is sigma(e_a)
    S = linalg.transpose(alg.sigma_matrix)
    rows = [[F.sub(S[r][c], F.one if r == c else F.zero) for c in range(d)] for r in range(d)]
    return linalg.nullspace(F, rows, d)[0]


@dataclass(frozen=True)
class EtaleReport:
    commutative: bool
    sigma_identity: bool
    etale: bool
    factor_count_r: Optional[int]
    fiber_group_order: Optional[Union[int, str]]


def is_commutative(alg: EndoAlgebra) -> bool:
    C = alg.structure_constants
    return all(C[a][b] == C[b][a] for a in range(alg.dim) for b in range(alg.dim))


def trace_form(alg: EndoAlgebra):
    """Gram matrix T[a][b] = trace of y -> e_a e_b y."""
    F = alg.field
    C = alg.structure_constants
    d = alg.dim
    t = [F.normalize(sum((C[a][c][c] for c in range(d)), F.zero)) for a in range(d)]
    return [[F.normalize(sum((F.mul(C[a][b][e], t[e]) for e in range(d)), F.zero)) for b in range(d)]
            for a in range(d)]


def power(alg: EndoAlgebra, x, e: int):
    result = list(alg.identity_coords)
    base = list(x)
    while e:
        if e & 1:
            result = alg.mul(result, base)
        e >>= 1
        if e:
            base = alg.mul(base, base)
    return result


def frobenius_matrix(alg: EndoAlgebra):
    """Matrix of x -> x^q (F_q-linear on a commutative algebra); columns = images of e_b."""
    F = alg.field
    d = alg.dim
    cols = [power(alg, [F.one if i == b else F.zero for i in range(d)], F.p) for b in range(d)]
    return linalg.transpose(cols)


def _fixed_dim(F, mat):
    d = len(mat)
    rows = [[F.sub(mat[r][c], F.one if r == c else F.zero) for c in range(d)] for r in range(d)]
    return d - linalg.rank(F, rows)


def etale_report(alg: EndoAlgebra) -> EtaleReport:
    F = alg.field
    d = alg.dim
    comm = is_commutative(alg)
    sig_id = linalg.is_identity(F, alg.sigma_matrix)
    etale = comm and bool(linalg.det(F, trace_form(alg)))
    r = None
    order: Optional[Union[int, str]] = None
    if etale and F.is_finite:
        frob = frobenius_matrix(alg)
        r = _fixed_dim(F, frob)
        if F.p == 2:
            order = 1
        else:
            # L = prod F_{q^{d_j}}; a non-square of F_q becomes a square exactly
            # in the even-degree factors.  dim ker(Frob^2 - 1) = r + #even.
            even = _fixed_dim(F, linalg.matmul(F, frob, frob)) - r
            order = 2**r if even == r else 2 ** (r - 1)
    elif etale:
        order = 1 if d == 1 else INFINITE_OR_UNKNOWN
    return EtaleReport(comm, sig_id, etale, r, order)


# -- enumerative unit-group computations over F_q ---------------------------

def _require_finite(alg: EndoAlgebra, cap: int) -> int:
    F = alg.field
    if not F.is_finite:
        raise InfiniteField("unit groups are only enumerated over finite fields")
    total = F.p**alg.dim
    if total > cap:
        raise EnumerationTooLarge(f"{total} algebra elements exceed the cap {cap}")
    return total


def _digits(codes: np.ndarray, q: int, d: int) -> np.ndarray:
    return np.stack([(codes // q**a) % q for a in range(d)], axis=1) if d else np.zeros((len(codes), 0), np.int64)


def _encode(x: np.ndarray, q: int) -> np.ndarray:
    return x @ (q ** np.arange(x.shape[1], dtype=np.int64))


def _batch_mul(X, Y, C, q):
    return np.einsum("na,nb,abc->nc", X, Y, C) % q


def _batch_units(X, C, q):
    L = np.einsum("na,abc->ncb", X, C) % q
    return linalg.batch_full_rank(L, q)


def _chunks(total, size=1 << 16):
    for start in range(0, total, size):
        yield np.arange(start, min(total, start + size), dtype=np.int64)


def units(alg: EndoAlgebra, cap: int = DEFAULT_ENUM_CAP) -> np.ndarray:
    """Sorted codes of all units of L0."""
    total = _require_finite(alg, cap)
    q, d = alg.field.p, alg.dim
    C = alg.structure_array()
    out = []
    for codes in _chunks(total):
        X = _digits(codes, q, d)
        out.append(codes[_batch_units(X, C, q)])
    return np.concatenate(out)


def _scalar_normalize(X: np.ndarray, q: int) -> np.ndarray:
    """Representative of each k^x-orbit: scale so the first nonzero coordinate is 1."""
    first = np.argmax(X != 0, axis=1)
    lead = X[np.arange(len(X)), first]
    inv = linalg.inverse_table(q)
    return X * inv[lead][:, None] % q


def norm_kernel_elements(alg: EndoAlgebra, cap: int = DEFAULT_ENUM_CAP) -> np.ndarray:
    """Sorted codes of the k^x-normalized units l with sigma(l) l in k^x * 1.

    These index ker(N-bar) = {l in L0^x : sigma(l) l in k^x} / k^x.
    """
    _require_finite(alg, cap)
    q, d = alg.field.p, alg.dim
    C = alg.structure_array()
    S = alg.sigma_array()
    ident = np.array(alg.identity_coords, dtype=np.int64)
    j = int(np.nonzero(ident)[0][0])
    inv = linalg.inverse_table(q)
    u_codes = units(alg, cap)
    kept = []
    for start in range(0, len(u_codes), 1 << 16):
        X = _digits(u_codes[start:start + (1 << 16)], q, d)
        sx = X @ S % q
        nx = _batch_mul(sx, X, C, q)
        u = nx[:, j] * inv[ident[j]] % q
        ok = (u != 0) & np.all(nx == u[:, None] * ident[None, :] % q, axis=1)
        kept.append(_encode(_scalar_normalize(X[ok], q), q))
    return np.unique(np.concatenate(kept)) if kept else np.zeros(0, np.int64)


def norm_kernel_order(alg: EndoAlgebra, cap: int = DEFAULT_ENUM_CAP) -> int:
    """|{l in L0^x : sigma(l) l in k^x}| / (q - 1)."""
    return int(len(norm_kernel_elements(alg, cap)))


def unit_coset_reps(alg: EndoAlgebra, cap: int = DEFAULT_ENUM_CAP) -> list[tuple]:
    """Coset representatives of L^x / k^x L^{x2}.

    The identity comes first; every other coset is represented by its
    smallest element code, in ascending order.
    """
    rep = etale_report(alg)
    if not (rep.commutative and rep.sigma_identity and rep.etale):
        raise NotInGrRegime("need L0 commutative, etale and sigma = id")
    total = _require_finite(alg, cap)
    q, d = alg.field.p, alg.dim
    C = alg.structure_array()
    u_codes = units(alg, cap)
    U = _digits(u_codes, q, d)
    squares = _batch_mul(U, U, C, q)
    subgroup = np.unique(np.concatenate([_encode(a * squares % q, q) for a in range(1, q)]))
    H = _digits(subgroup, q, d)
    covered = np.zeros(total, dtype=bool)

    def cover(x):
        X = np.broadcast_to(np.asarray(x, dtype=np.int64), H.shape)
        covered[_encode(_batch_mul(X, H, C, q), q)] = True

    ident = tuple(int(v) for v in alg.identity_coords)
    reps = [ident]
    cover(ident)
    for code, x in zip(u_codes, U):
        if not covered[code]:
            reps.append(tuple(int(v) for v in x))
            cover(x)
    return reps


def element_code(x, q: int) -> int:
    return int(sum(int(v) * q**a for a, v in enumerate(x)))
