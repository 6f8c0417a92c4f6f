"""Equivalence tests between webs, fiber enumeration and exhaustive censuses.

Three relations are decided here:

* congruence:  M' = a P^T M P          ((k^x I) x GL_{n+1} orbit)
* full orbit:  M' = M.(A, P)           (GL_{m+1} x GL_{n+1} orbit)
* module iso:  M' = U M V, U, V invertible (same cokernel module)

Searches over F_q are exhaustive and return the first witness in the
canonical enumeration order of :mod:`symwebs.glenum`.
"""
from __future__ import annotations

import enum
import random
from dataclasses import dataclass, field
from typing import Optional, Union

import numpy as np

from . import linalg
from .endoalg import endomorphism_algebra, etale_report, unit_coset_reps
from .errors import (
    ClosureFailure,
    DimensionMismatch,
    DomainError,
    InfiniteField,
    NotGeometricallyReduced,
    ZeroDiscriminant,
)
from .exactfield import FieldSpec, Scalar
from .glenum import check_cap, gl_matrices, gl_order, map_chunks
from .mpoly import MPoly, proportional
from .symweb import (
    GroupElem,
    SymWeb,
    WebClass,
    act,
    batch_discriminants,
    batch_proportional,
    classify,
    dense_coefficients,
    right_multiply,
)

DEFAULT_CAP = 10**8
RATIONAL_TRIALS = 20


class EquivKind(str, enum.Enum):
    CONGRUENCE = "congruence"
    FULL_ORBIT = "full_orbit"
    MODULE_ISO = "module_iso"


class _ProbablyAbsent:
    """Falsy marker: no witness found by random sampling over Q (not a proof)."""

    _inst = None

    def __new__(cls):
        if cls._inst is None:
            cls._inst = super().__new__(cls)
        return cls._inst

    def __bool__(self):
        return False

    def __repr__(self):
        return "PROBABLY_ABSENT"


PROBABLY_ABSENT = _ProbablyAbsent()


def _check_pair(M: SymWeb, Mp: SymWeb):
    if M.field != Mp.field:
        raise DimensionMismatch("webs over different fields")
    if (M.m, M.n) != (Mp.m, Mp.n):
        raise DimensionMismatch(f"shapes differ: (m,n)=({M.m},{M.n}) vs ({Mp.m},{Mp.n})")


def _require_finite(F: FieldSpec):
    if not F.is_finite:
        raise InfiniteField(f"exhaustive search needs a finite field, got {F}")


def _congruence_stack(W: np.ndarray, P: np.ndarray, p: int) -> np.ndarray:
    """(B, m+1, s, s): P_b^T W_i P_b for every matrix in the stack P."""
    P = P[:, None]
    return np.swapaxes(P, -1, -2) @ W[None] % p @ P % p


# -- congruence ---------------------------------------------------------------

def congruent(M: SymWeb, Mp: SymWeb, cap: int = DEFAULT_CAP, threads: int = 1):
    """Witness (a, P) with a P^T M_i P = M'_i for all i, or None."""
    _check_pair(M, Mp)
    F = M.field
    _require_finite(F)
    p, s = F.p, M.size
    check_cap(gl_order(s, p), cap, "congruence search")
    W, Wp = M.as_array(), Mp.as_array()
    scalars = np.arange(1, p, dtype=np.int64)

    def scan(P):
        T = _congruence_stack(W, P, p)
        hit = np.all((scalars[None, :, None, None, None] * T[:, None] % p) == Wp[None, None], axis=(2, 3, 4))
        rows, cols = np.nonzero(hit)
        if len(rows) == 0:
            return None
        return P[rows[0]], int(scalars[cols[0]])

    for found in map_chunks(scan, gl_matrices(s, p), threads):
        if found is not None:
            P = [[int(x) for x in row] for row in found[0]]
            a = found[1]
            T = [linalg.scale(F, a, X) for X in _congruence_list(M, P)]
            if T != [Mp.matrix(i) for i in range(Mp.m + 1)]:
                raise ClosureFailure("congruence witness failed exact verification")
            return Scalar(F, a), P
    return None


def _congruence_list(M: SymWeb, P):
    F = M.field
    Pt = linalg.transpose(P)
    return [linalg.matmul(F, linalg.matmul(F, Pt, M.matrix(i)), P) for i in range(M.m + 1)]


# -- module isomorphism ---------------------------------------------------------

def intertwiner_space(M: SymWeb, Mp: SymWeb):
    """Basis of {(U, W) : U M_i = M'_i W for all i}, as (U, W) matrix pairs."""
    F = M.field
    s = M.size
    nun = 2 * s * s
    rows = []
    for i in range(M.m + 1):
        A, B = M.mats[i], Mp.mats[i]
        for r in range(s):
            for c in range(s):
                eq = [F.zero] * nun
                for k in range(s):
                    eq[r * s + k] = F.add(eq[r * s + k], A[k][c])
                    eq[s * s + k * s + c] = F.sub(eq[s * s + k * s + c], B[r][k])
                if any(eq):
                    rows.append(eq)
    vecs, _ = linalg.nullspace(F, rows, nun)
    return [([list(v[r * s:(r + 1) * s]) for r in range(s)],
             [list(v[s * s + r * s:s * s + (r + 1) * s]) for r in range(s)]) for v in vecs]


def _module_witness(M, Mp, U, Wm):
    F = M.field
    V = linalg.inverse(F, Wm)
    for i in range(M.m + 1):
        if linalg.matmul(F, linalg.matmul(F, U, M.matrix(i)), V) != Mp.matrix(i):
            raise ClosureFailure("module isomorphism witness failed exact verification")
    return U, V


def module_isomorphic(M: SymWeb, Mp: SymWeb, cap: int = DEFAULT_CAP, trials: int = RATIONAL_TRIALS,
                      seed: int = 0):
    """Witness (U, V) with U M_i V = M'_i, None, or PROBABLY_ABSENT (over Q).

    The pairs (U, W) with U M_i = M'_i W form a linear space; an
    isomorphism exists iff that space contains a pair with U invertible,
    and then W is invertible too and V = W^{-1}.
    """
    _check_pair(M, Mp)
    if not M.disc or not Mp.disc:
        raise ZeroDiscriminant("module isomorphism is only tested for nonzero discriminants")
    if proportional(Mp.disc, M.disc) is None:
        return None
    F = M.field
    if M == Mp:
        I = linalg.identity(F, M.size)
        return I, [row[:] for row in I]
    basis = intertwiner_space(M, Mp)
    if not basis:
        return None
    d = len(basis)
    s = M.size
    if F.is_finite:
        p = F.p
        check_cap(p**d, cap, "module isomorphism search")
        Ub = np.array([b[0] for b in basis], dtype=np.int64)  # (d, s, s)
        for start in range(1, p**d, 1 << 16):
            codes = np.arange(start, min(p**d, start + (1 << 16)), dtype=np.int64)
            coeffs = np.stack([(codes // p**j) % p for j in range(d)], axis=1)
            U = np.einsum("nd,drc->nrc", coeffs, Ub) % p
            ok = np.nonzero(linalg.batch_full_rank(U, p))[0]
            if len(ok):
                c = [int(x) for x in coeffs[ok[0]]]
                return _module_witness(M, Mp, *_combine(F, basis, c, s))
        return None
    rng = random.Random(seed)
    for _ in range(trials):
        c = [F.coerce(rng.randint(-10, 10)) for _ in range(d)]
        U, Wm = _combine(F, basis, c, s)
        if linalg.det(F, U):
            return _module_witness(M, Mp, U, Wm)
    return PROBABLY_ABSENT


def _combine(F, basis, coeffs, s):
    U = linalg.zeros(F, s, s)
    Wm = linalg.zeros(F, s, s)
    for c, (Ub, Wb) in zip(coeffs, basis):
        if c:
            U = linalg.add(F, U, linalg.scale(F, c, Ub))
            Wm = linalg.add(F, Wm, linalg.scale(F, c, Wb))
    return U, Wm


# -- full orbit ------------------------------------------------------------------

def span_residual(rows: np.ndarray, p: int):
    """Return f(V) giving the residual of each row of V modulo span(rows).

    f(V) == 0 exactly on the rows of V lying in the span.
    """
    R, piv = linalg.mod_rref_np(rows, p)
    R = R[:len(piv)]
    piv = np.array(piv, dtype=np.int64)

    def residual(V):
        V = np.asarray(V, dtype=np.int64) % p
        if len(piv) == 0:
            return V
        return (V - V[..., piv] @ R) % p

    return residual


def full_orbit(M: SymWeb, Mp: SymWeb, cap: int = DEFAULT_CAP, threads: int = 1) -> Optional[GroupElem]:
    """Witness g = (A, P) with M.(A, P) = M', or None."""
    _check_pair(M, Mp)
    F = M.field
    _require_finite(F)
    p, s, k = F.p, M.size, M.m + 1
    check_cap(gl_order(s, p), cap, "full-orbit search")
    W = M.as_array()
    flat_p = Mp.as_array().reshape(k, s * s)
    rank_m = len(linalg.mod_rref_np(W.reshape(k, s * s), p)[1])
    if rank_m != len(linalg.mod_rref_np(flat_p, p)[1]):
        return None
    residual = span_residual(flat_p, p)

    def scan(P):
        T = _congruence_stack(W, P, p).reshape(len(P), k, s * s)
        # span(T) has the rank of span(M); inclusion in span(M') forces equality
        return P[np.all(residual(T) == 0, axis=(1, 2))]

    for cands in map_chunks(scan, gl_matrices(s, p), threads):
        for Pn in cands:
            P = [[int(x) for x in row] for row in Pn]
            A = _solve_A(M, Mp, P, cap)
            if A is not None:
                g = GroupElem(F, A, P)
                if act(M, g) != Mp:
                    raise ClosureFailure("full-orbit witness failed exact verification")
                return g
    return None


def _solve_A(M: SymWeb, Mp: SymWeb, P, cap: int):
    """An invertible A with sum_i a_ij P^T M_i P = M'_j for all j, or None."""
    F = M.field
    k = M.m + 1
    T = [[x for row in X for x in row] for X in _congruence_list(M, P)]
    cols = []
    for j in range(k):
        target = [x for row in Mp.mats[j] for x in row]
        c = linalg.solve_left(F, T, target)
        if c is None:
            return None
        cols.append(c)
    A0 = linalg.transpose(cols)
    # A is unique up to kernel(T) in each column
    ker, _ = linalg.nullspace(F, linalg.transpose(T), k)
    if linalg.det(F, A0):
        return A0
    if not ker:
        return None
    combos = len(ker) * k
    check_cap(F.p**combos, cap, "coefficient matrix search")
    for code in range(1, F.p**combos):
        digits = [(code // F.p**t) % F.p for t in range(combos)]
        A = [row[:] for row in A0]
        for j in range(k):
            for t, v in enumerate(ker):
                c = digits[j * len(ker) + t]
                if c:
                    for i in range(k):
                        A[i][j] = F.add(A[i][j], F.mul(c, v[i]))
        if linalg.det(F, A):
            return A
    return None


def equivalent(M: SymWeb, Mp: SymWeb, kind: Union[EquivKind, str], cap: int = DEFAULT_CAP, threads: int = 1):
    kind = EquivKind(kind)
    if kind is EquivKind.CONGRUENCE:
        return congruent(M, Mp, cap, threads)
    if kind is EquivKind.FULL_ORBIT:
        return full_orbit(M, Mp, cap, threads)
    return module_isomorphic(M, Mp, cap)


# -- fibers ----------------------------------------------------------------------

@dataclass
class FiberReport:
    base: SymWeb
    reps: list
    group_order: int
    pairwise_inequivalent: bool
    action_transitive_verified: bool
    multipliers: list = field(default_factory=list)


def fiber_enumerate(M: SymWeb, cap: int = DEFAULT_CAP, threads: int = 1) -> FiberReport:
    """Representatives M.R of the fiber through M, one per class of L^x / k^x L^x2."""
    F = M.field
    _require_finite(F)
    if classify(M) is not WebClass.GEOMETRICALLY_REDUCED:
        raise NotGeometricallyReduced("fiber enumeration needs a geometrically reduced discriminant")
    alg = endomorphism_algebra(M)
    coset = unit_coset_reps(alg, cap)
    order = etale_report(alg).fiber_group_order
    reps, mults = [], []
    for x in coset:
        R, Rp = alg.element_pair(list(x))
        if R != Rp:
            raise ClosureFailure("sigma-fixed element with P != P'")
        W = right_multiply(M, R)
        if W is None:
            raise ClosureFailure("M.R is not symmetric for R in L")
        if proportional(W.disc, M.disc) is None:
            raise ClosureFailure("M.R changed the discriminant class")
        if not module_isomorphic(M, W, cap):
            raise ClosureFailure("M.R is not module isomorphic to M")
        reps.append(W)
        mults.append(R)
    distinct = all(congruent(reps[i], reps[j], cap, threads) is None
                   for i in range(len(reps)) for j in range(i + 1, len(reps)))
    return FiberReport(M, reps, order, distinct, distinct and len(reps) == order, mults)


# -- census ----------------------------------------------------------------------

class UnionFind:
    def __init__(self, n):
        self.parent = list(range(n))

    def find(self, x):
        root = x
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[x] != root:
            self.parent[x], x = root, self.parent[x]
        return root

    def union(self, a, b):
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            if ra > rb:
                ra, rb = rb, ra
            self.parent[rb] = ra


def _triangle(s):
    return [(r, c) for r in range(s) for c in range(r, s)]


def decode_webs(codes: np.ndarray, m: int, n: int, p: int) -> np.ndarray:
    """Vectorized inverse of SymWeb.code: (N,) codes -> (N, m+1, s, s)."""
    s = n + 1
    tri = _triangle(s)
    ndig = (m + 1) * len(tri)
    digits = np.stack([(codes // p ** (ndig - 1 - t)) % p for t in range(ndig)], axis=1)
    out = np.zeros((len(codes), m + 1, s, s), dtype=np.int64)
    t = 0
    for i in range(m + 1):
        for r, c in tri:
            out[:, i, r, c] = digits[:, t]
            out[:, i, c, r] = digits[:, t]
            t += 1
    return out


def encode_webs(webs: np.ndarray, p: int) -> np.ndarray:
    N, k, s, _ = webs.shape
    code = np.zeros(N, dtype=np.int64)
    for i in range(k):
        for r, c in _triangle(s):
            code = code * p + webs[:, i, r, c]
    return code


def primitive_root(p: int) -> int:
    if p == 2:
        return 1
    factors = [f for f in range(2, p) if (p - 1) % f == 0 and all(f % d for d in range(2, f))]
    return next(g for g in range(2, p) if all(pow(g, (p - 1) // f, p) != 1 for f in factors))


def congruence_generators(s: int, p: int) -> tuple[list[np.ndarray], int]:
    """Generators of GL_s(F_p) (transvections and one diagonal) plus a generator of F_p^x."""
    g = primitive_root(p)
    mats = []
    for i in range(s):
        for j in range(s):
            if i != j:
                E = np.eye(s, dtype=np.int64)
                E[i, j] = 1
                mats.append(E)
    if g != 1:
        D = np.eye(s, dtype=np.int64)
        D[0, 0] = g
        mats.append(D)
    return mats, g


@dataclass
class CensusRow:
    module_class_id: int
    congruence_class_count: int
    r: Optional[int]
    predicted: Optional[Union[int, str]]
    representative: SymWeb
    congruence_class_sizes: list


@dataclass
class CensusTable:
    field: FieldSpec
    m: int
    n: int
    target: MPoly
    total_webs: int
    matching_webs: int
    congruence_classes: int
    rows: list

    def render(self) -> str:
        head = ("module_class_id", "congruence_class_count", "r", "predicted")
        body = [(str(r.module_class_id), str(r.congruence_class_count),
                 "n/a" if r.r is None else str(r.r),
                 "n/a" if r.predicted is None else str(r.predicted)) for r in self.rows]
        widths = [max(len(x) for x in col) for col in zip(head, *body)]
        lines = ["  ".join(x.rjust(w) for x, w in zip(row, widths)) for row in (head, *body)]
        return "\n".join(lines) + "\n"


def census(F: FieldSpec, m: int, n: int, target: MPoly, cap: int = DEFAULT_CAP, threads: int = 1) -> CensusTable:
    """Exhaustive census of webs with disc proportional to ``target``."""
    _require_finite(F)
    if m < 2 or n < 1:
        raise DimensionMismatch("need m >= 2 and n >= 1")
    if target.nvars != m + 1:
        raise DimensionMismatch(f"target has {target.nvars} variables, expected {m + 1}")
    if not target or target.is_homogeneous() != n + 1:
        raise DomainError(f"target must be a nonzero form of degree {n + 1}")
    p, s = F.p, n + 1
    total = p ** ((m + 1) * s * (s + 1) // 2)
    check_cap(total, cap, "census")
    tvec = dense_coefficients(target, s) % p

    def scan(codes):
        webs = decode_webs(codes, m, n, p)
        return codes[batch_proportional(batch_discriminants(webs, p), tvec, p)]

    chunks = (np.arange(a, min(total, a + (1 << 15)), dtype=np.int64) for a in range(0, total, 1 << 15))
    members = np.concatenate([np.zeros(0, np.int64)] + list(map_chunks(scan, chunks, threads)))
    N = len(members)
    uf = UnionFind(N)
    if N:
        webs = decode_webs(members, m, n, p)
        mats, g = congruence_generators(s, p)
        images = [encode_webs(np.einsum("kr,nikl,ls->nirs", G, webs, G) % p, p) for G in mats]
        if g != 1:
            images.append(encode_webs(g * webs % p, p))
        for img in images:
            pos = np.searchsorted(members, img)
            if np.any(pos >= N) or np.any(members[np.minimum(pos, N - 1)] != img):
                raise ClosureFailure("congruence image left the census set")
            for a, b in zip(range(N), pos.tolist()):
                uf.union(a, b)
    roots = {}
    for i in range(N):
        roots.setdefault(uf.find(i), []).append(i)
    classes = sorted(roots.values(), key=lambda idx: idx[0])
    class_reps = [SymWeb(F, decode_webs(members[c[0]:c[0] + 1], m, n, p)[0].tolist()) for c in classes]
    mod_uf = UnionFind(len(classes))
    for i in range(len(classes)):
        for j in range(i + 1, len(classes)):
            if mod_uf.find(i) != mod_uf.find(j) and module_isomorphic(class_reps[i], class_reps[j], cap):
                mod_uf.union(i, j)
    groups = {}
    for i in range(len(classes)):
        groups.setdefault(mod_uf.find(i), []).append(i)
    rows = []
    for mid, idx in enumerate(sorted(groups.values(), key=lambda v: v[0])):
        rep = class_reps[idx[0]]
        r = pred = None
        if classify(rep) is WebClass.GEOMETRICALLY_REDUCED:
            rep_report = etale_report(endomorphism_algebra(rep))
            r, pred = rep_report.factor_count_r, rep_report.fiber_group_order
        rows.append(CensusRow(mid, len(idx), r, pred, rep, [len(classes[i]) for i in idx]))
    return CensusTable(F, m, n, target, total, N, len(classes), rows)
