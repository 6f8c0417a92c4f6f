import itertools
import random

import numpy as np
import pytest

from conftest import rand_invertible, rand_web
from symwebs import F2, F3, F5, QQ, GroupElem, SymWeb, WebClass, act, classify, linalg, parse_poly, proportional
from symwebs.equivalence import (
    PROBABLY_ABSENT,
    EquivKind,
    UnionFind,
    census,
    congruent,
    decode_webs,
    encode_webs,
    equivalent,
    fiber_enumerate,
    full_orbit,
    module_isomorphic,
)
from symwebs.errors import InfiniteField, NotGeometricallyReduced, SearchTooLarge, ZeroDiscriminant
from symwebs.glenum import gl_matrices

Z2 = [[0, 0], [0, 0]]


def diag(*v):
    return [[v[i] if i == j else 0 for j in range(len(v))] for i in range(len(v))]


def two_lines(F, b=1):
    return SymWeb(F, [diag(1, 0), diag(0, b), Z2])


def conic(F):
    return SymWeb(F, [[[1, 0], [0, 0]], [[0, 1], [1, 0]], [[0, 0], [0, 1]]])


def scaled_congruence(M, a, P):
    F = M.field
    Pt = linalg.transpose(P)
    return SymWeb(F, [linalg.scale(F, a, linalg.matmul(F, linalg.matmul(F, Pt, M.matrix(i)), P))
                      for i in range(M.m + 1)])


def brute_congruent(M, Mp):
    """Plain loop over all matrices and scalars."""
    F = M.field
    s = M.size
    for entries in itertools.product(range(F.p), repeat=s * s):
        P = [list(entries[r * s:(r + 1) * s]) for r in range(s)]
        if not linalg.det(F, P):
            continue
        for a in range(1, F.p):
            if scaled_congruence(M, a, P) == Mp:
                return True
    return False


def test_congruent_examples():
    M = two_lines(F3)
    a, P = congruent(M, M)
    assert a == 1 and P == linalg.identity(F3, 2)
    assert congruent(M, two_lines(F3, 2)) is None
    assert not brute_congruent(M, two_lines(F3, 2))
    with pytest.raises(InfiniteField):
        congruent(two_lines(QQ), two_lines(QQ))
    with pytest.raises(SearchTooLarge):
        congruent(M, M, cap=10)


def test_congruent_orbit_members_and_witness_algebra():
    rng = random.Random(31)
    for F in (F3, F5):
        for _ in range(10):
            M = rand_web(rng, F, 2, rng.randint(1, 2), lo=0, hi=F.p - 1)
            a = rng.randint(1, F.p - 1)
            P = rand_invertible(rng, F, M.size)
            Mp = scaled_congruence(M, a, P)
            b, Q = congruent(M, Mp)
            assert scaled_congruence(M, b.value, Q) == Mp
            # symmetry: M = b^-1 Q^-T M' Q^-1
            c, R = congruent(Mp, M)
            assert scaled_congruence(Mp, c.value, R) == M
            # transitivity by composing witnesses
            P2 = rand_invertible(rng, F, M.size)
            M2 = scaled_congruence(Mp, 1, P2)
            d, S = congruent(Mp, M2)
            comp = linalg.matmul(F, Q, S)
            assert scaled_congruence(M, F.mul(b.value, d.value), comp) == M2
            if M.disc:
                assert module_isomorphic(M, Mp)
                assert proportional(Mp.disc, M.disc) is not None


def test_congruent_matches_brute_force():
    rng = random.Random(32)
    webs = [rand_web(rng, F3, 2, 1, lo=0, hi=2) for _ in range(12)]
    for M, Mp in itertools.combinations(webs[:6], 2):
        assert (congruent(M, Mp) is not None) == brute_congruent(M, Mp)
    M = webs[0]
    assert (congruent(M, scaled_congruence(M, 2, [[1, 1], [0, 1]])) is not None)


def test_module_isomorphic_examples():
    M = two_lines(F3)
    U, V = module_isomorphic(M, M)
    assert U == V == linalg.identity(F3, 2)
    U, V = module_isomorphic(M, two_lines(F3, 2))
    for i in range(3):
        assert linalg.matmul(F3, linalg.matmul(F3, U, M.matrix(i)), V) == two_lines(F3, 2).matrix(i)
    assert (U, V) == ([[1, 0], [0, 2]], [[1, 0], [0, 1]])
    # A non-scalar changes the discriminant and is rejected early
    g = GroupElem(F3, [[1, 1, 0], [0, 1, 0], [0, 0, 1]], linalg.identity(F3, 2))
    assert module_isomorphic(M, act(M, g)) is None
    with pytest.raises(ZeroDiscriminant):
        module_isomorphic(M, SymWeb(F3, [Z2, Z2, Z2]))


def test_module_isomorphic_rationals():
    M = two_lines(QQ)
    U, V = module_isomorphic(M, two_lines(QQ, 7))
    assert linalg.det(QQ, U) and linalg.det(QQ, V)
    # same discriminant, nonzero intertwiners, but every U is singular
    A = SymWeb(QQ, [[[1, 0], [0, 0]], [[0, 1], [1, 0]], Z2])
    B = SymWeb(QQ, [Z2, [[1, 0], [0, -1]], Z2])
    assert proportional(A.disc, B.disc) is not None
    assert module_isomorphic(A, B) is PROBABLY_ABSENT
    assert not PROBABLY_ABSENT
    A3 = SymWeb(F3, [[[1, 0], [0, 0]], [[0, 1], [1, 0]], Z2])
    B3 = SymWeb(F3, [Z2, [[1, 0], [0, 2]], Z2])
    assert module_isomorphic(A3, B3) is None


def brute_full_orbit(M, Mp):
    F = M.field
    p = F.p
    W = M.as_array()
    target = Mp.as_array()
    As = np.concatenate(list(gl_matrices(M.m + 1, p)))
    for P in gl_matrices(M.size, p):
        T = np.einsum("bkr,ikl,bls->birs", P, W, P) % p  # (B, i, s, s)
        img = np.einsum("aij,birs->bajrs", As, T) % p
        if np.any(np.all(img == target, axis=(2, 3, 4))):
            return True
    return False


def test_full_orbit():
    M = two_lines(F3)
    g = full_orbit(M, two_lines(F3, 2))
    assert act(M, g) == two_lines(F3, 2)
    assert full_orbit(M, conic(F3)) is None
    assert not brute_full_orbit(M, conic(F3))
    rng = random.Random(33)
    for _ in range(8):
        M = rand_web(rng, F3, 2, 1, lo=0, hi=2)
        h = GroupElem(F3, rand_invertible(rng, F3, 3), rand_invertible(rng, F3, 2))
        g = full_orbit(M, act(M, h))
        assert act(M, g) == act(M, h)
    webs = [rand_web(rng, F3, 2, 1, lo=0, hi=2) for _ in range(5)]
    for M, Mp in itertools.combinations(webs, 2):
        assert (full_orbit(M, Mp) is not None) == brute_full_orbit(M, Mp)


def test_equivalent_dispatch():
    M, Mp = two_lines(F3), two_lines(F3, 2)
    assert equivalent(M, Mp, "congruence") is None
    assert equivalent(M, Mp, EquivKind.MODULE_ISO)
    assert equivalent(M, Mp, "full_orbit")


def test_fiber_enumerate():
    rep = fiber_enumerate(conic(F3))
    assert rep.group_order == 1 and rep.reps == [conic(F3)]
    rep = fiber_enumerate(two_lines(F3))
    assert rep.group_order == 2 and len(rep.reps) == 2
    assert rep.pairwise_inequivalent and rep.action_transitive_verified
    assert rep.reps[0] == two_lines(F3)
    assert congruent(rep.reps[1], two_lines(F3, 2)) is not None
    assert all(classify(W) is WebClass.GEOMETRICALLY_REDUCED for W in rep.reps)
    rep = fiber_enumerate(two_lines(F2))
    assert rep.group_order == 1 and len(rep.reps) == 1
    with pytest.raises(NotGeometricallyReduced):
        fiber_enumerate(SymWeb(F3, [diag(1, 1), Z2, Z2]))


def test_fiber_enumerate_random():
    rng = random.Random(34)
    done = 0
    while done < 12:
        F = rng.choice([F3, F5])
        M = rand_web(rng, F, 2, rng.randint(1, 2), lo=0, hi=F.p - 1)
        if classify(M) is not WebClass.GEOMETRICALLY_REDUCED:
            continue
        rep = fiber_enumerate(M)
        assert rep.action_transitive_verified
        for W in rep.reps:
            assert module_isomorphic(M, W)
            assert proportional(W.disc, M.disc) is not None
        done += 1


def _orbit_partition(F, m, n, members):
    """Independent oracle: apply every (a, P) to every member."""
    p = F.p
    W = decode_webs(np.array(members, dtype=np.int64), m, n, p)
    index = {c: i for i, c in enumerate(members)}
    label = [-1] * len(members)
    Ps = np.concatenate(list(gl_matrices(n + 1, p)))
    for i in range(len(members)):
        if label[i] >= 0:
            continue
        T = np.einsum("bkr,ikl,bls->birs", Ps, W[i], Ps) % p
        for a in range(1, p):
            for c in encode_webs(a * T % p, p):
                label[index[int(c)]] = i
    return sorted(label.count(x) for x in set(label))


@pytest.mark.parametrize("F,target,expected", [(F3, "X0*X1", 2), (F2, "X0*X1", 1), (F3, "X0*X2 - X1^2", 1)],
                         ids=["F3-two-lines", "F2-two-lines", "F3-conic"])
def test_census(F, target, expected):
    t = census(F, 2, 1, parse_poly(target, F, 3))
    assert t.total_webs == F.p**9
    assert t.rows and all(r.congruence_class_count == expected for r in t.rows)
    assert all(r.predicted == expected for r in t.rows)
    # class sizes agree with a direct orbit computation
    members = [W.code() for W in _census_members(F, t)]
    sizes = sorted(s for r in t.rows for s in r.congruence_class_sizes)
    assert sizes == _orbit_partition(F, 2, 1, members)


def _census_members(F, t):
    p = F.p
    codes = np.arange(t.total_webs, dtype=np.int64)
    from symwebs.symweb import batch_discriminants, batch_proportional, dense_coefficients

    webs = decode_webs(codes, 2, 1, p)
    mask = batch_proportional(batch_discriminants(webs, p), dense_coefficients(t.target, 2) % p, p)
    out = [SymWeb(F, w.tolist()) for w in webs[mask]]
    # cross-check against the exact determinant
    assert all(proportional(W.disc, t.target) is not None for W in out)
    return out


def test_census_act_invariance():
    rng = random.Random(35)
    F = F3
    target = parse_poly("X0*X1", F, 3)
    base = census(F, 2, 1, target)
    for _ in range(3):
        A = rand_invertible(rng, F, 3)
        P = rand_invertible(rng, F, 2)
        dP = linalg.det(F, P)
        moved = target.substitute_linear(A).scale(F.mul(dP, dP))
        t = census(F, 2, 1, moved)
        assert t.matching_webs == base.matching_webs
        assert sorted(r.congruence_class_count for r in t.rows) == sorted(r.congruence_class_count for r in base.rows)


def test_census_threads_deterministic():
    F = F3
    target = parse_poly("X0*X1", F, 3)
    assert census(F, 2, 1, target, threads=1).render() == census(F, 2, 1, target, threads=4).render()


def test_census_guards():
    with pytest.raises(SearchTooLarge):
        census(F3, 2, 1, parse_poly("X0*X1", F3, 3), cap=100)
    with pytest.raises(InfiniteField):
        census(QQ, 2, 1, parse_poly("X0*X1", QQ, 3))


def test_union_find_and_codes():
    uf = UnionFind(5)
    uf.union(3, 4)
    uf.union(4, 1)
    assert uf.find(3) == uf.find(1) == 1 and uf.find(0) == 0
    rng = random.Random(36)
    webs = [rand_web(rng, F5, 2, 2, lo=0, hi=4) for _ in range(20)]
    codes = np.array([W.code() for W in webs], dtype=np.int64)
    arr = decode_webs(codes, 2, 2, 5)
    assert [SymWeb(F5, a.tolist()) for a in arr] == webs
    assert np.array_equal(encode_webs(arr, 5), codes)
