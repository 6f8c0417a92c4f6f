import random

import numpy as np
import pytest
import sympy as sp

from conftest import rand_invertible, rand_web
from symwebs import F2, F3, F5, QQ, GroupElem, MPoly, SymWeb, WebClass, linalg, parse_poly
from symwebs.errors import DimensionMismatch, FactorsDoNotExhaust, NotSymmetric, SingularMatrix, ZeroDiscriminant
from symwebs.symweb import (
    act,
    adjugate,
    batch_discriminants,
    classify,
    dense_coefficients,
    multiplicity_profile,
    normalized_act,
    poly_matmul,
    transformed_discriminant,
    web_from_code,
)

Z2 = [[0, 0], [0, 0]]


def diag(*v):
    return [[v[i] if i == j else 0 for j in range(len(v))] for i in range(len(v))]


def test_disc_examples():
    assert str(SymWeb(QQ, [diag(1, 0), diag(0, 1), Z2]).disc) == "X0*X1"
    assert str(SymWeb(QQ, [diag(1, 1), Z2, Z2]).disc) == "X0^2"
    M = SymWeb(QQ, [[[1, 0], [0, 1]], [[0, 1], [1, 0]], [[1, 1], [1, 0]]])
    assert M.disc == parse_poly("X0^2 + X0*X2 - X1^2 - 2*X1*X2 - X2^2", QQ, 3)


def test_disc_against_sympy_det():
    rng = random.Random(11)
    xs = sp.symbols("X0:4")
    for _ in range(20):
        n = rng.randint(1, 3)
        M = rand_web(rng, QQ, 3, n)
        mat = sp.zeros(n + 1, n + 1)
        for i in range(4):
            mat += xs[i] * sp.Matrix(M.matrix(i))
        ref = sp.Poly(mat.det(), *xs)
        ours = {e: c for e, c in M.disc.terms.items()}
        assert {tuple(e): sp.Rational(c) for e, c in ref.terms()} == {e: sp.Rational(c) for e, c in ours.items()}


def test_adjugate_examples():
    M = SymWeb(QQ, [[[1, 0], [0, 0]], [[0, 1], [1, 0]], [[0, 0], [0, 1]]])
    adj = adjugate(M)
    P = lambda t: parse_poly(t, QQ, 3)  # noqa: E731
    assert adj == [[P("X2"), P("-X1")], [P("-X1"), P("X0")]]
    D = SymWeb(QQ, [diag(1, 0, 0), diag(0, 1, 0), diag(0, 0, 1)])
    assert adjugate(D) == [[P("X1*X2"), P("0"), P("0")], [P("0"), P("X0*X2"), P("0")], [P("0"), P("0"), P("X0*X1")]]


@pytest.mark.parametrize("F", [F3, QQ], ids=str)
def test_adjugate_identity(F):
    rng = random.Random(12)
    for _ in range(15):
        M = rand_web(rng, F, 2, rng.randint(1, 3))
        L = M.linear_form_matrix()
        adj = adjugate(M)
        s = M.size
        zero = MPoly.zero(F, 3)
        expected = [[M.disc if r == c else zero for c in range(s)] for r in range(s)]
        assert poly_matmul(L, adj) == expected
        assert poly_matmul(adj, L) == expected


def test_act_examples():
    rng = random.Random(13)
    M = rand_web(rng, F5, 2, 2)
    assert act(M, GroupElem.identity(F5, 2, 2)) == M
    a = 3
    g = GroupElem(F5, linalg.scale(F5, a, linalg.identity(F5, 3)), linalg.identity(F5, 3))
    assert act(M, g) == M.scaled(a)


@pytest.mark.parametrize("F", [F3, F5, QQ], ids=str)
def test_right_action_and_law(F):
    rng = random.Random(14)
    for _ in range(20):
        m, n = 2, rng.randint(1, 2)
        M = rand_web(rng, F, m, n)
        g1 = GroupElem(F, rand_invertible(rng, F, m + 1), rand_invertible(rng, F, n + 1))
        g2 = GroupElem(F, rand_invertible(rng, F, m + 1), rand_invertible(rng, F, n + 1))
        assert act(act(M, g1), g2) == act(M, g1 * g2)
        assert act(act(M, g1), g1.inverse()) == M
        assert act(M, g1).disc == transformed_discriminant(M, g1)
        assert classify(act(M, g1)) == classify(M)


def test_scalar_law_factor():
    # for A = a*I the factor is a^(n+1) det(P)^2, not det(A) det(P)^2
    rng = random.Random(15)
    M = rand_web(rng, F5, 2, 1)
    while not M.disc:
        M = rand_web(rng, F5, 2, 1)
    g = GroupElem(F5, linalg.scale(F5, 2, linalg.identity(F5, 3)), linalg.identity(F5, 2))
    assert act(M, g).disc == M.disc.scale(2**2)
    assert act(M, g).disc != M.disc.scale(2**3)


def test_normalized_act():
    rng = random.Random(16)
    M = rand_web(rng, F5, 2, 1)
    assert normalized_act(M, GroupElem.identity(F5, 2, 1)) == M
    g = GroupElem(F5, linalg.scale(F5, 2, linalg.identity(F5, 3)), linalg.identity(F5, 2))
    # det(A)^-1 * (2M) = 2^-3 * 2 * M = 2^-2 M = 4M over F5
    assert normalized_act(M, g) == M.scaled(4)
    for _ in range(20):
        M = rand_web(rng, F5, 2, rng.randint(1, 2))
        h = GroupElem(F5, rand_invertible(rng, F5, 3), rand_invertible(rng, F5, M.size))
        dA = linalg.det(F5, h.A)
        expected = transformed_discriminant(M, h).scale(F5.power(F5.inv(dA), M.size))
        assert normalized_act(M, h).disc == expected


def test_classify_examples():
    assert classify(SymWeb(F3, [diag(1, 0), diag(0, 1), Z2])) is WebClass.GEOMETRICALLY_REDUCED
    assert classify(SymWeb(F3, [diag(1, 1), Z2, Z2])) is WebClass.NONREDUCED
    assert classify(SymWeb(F3, [Z2, Z2, Z2])) is WebClass.ZERO_DISC
    assert str(WebClass.ZERO_DISC) == "zero_disc"


def test_multiplicity_profile():
    P = lambda t, F=QQ: parse_poly(t, F, 3)  # noqa: E731
    D = SymWeb(QQ, [diag(1, 0, 0), diag(0, 1, 0), diag(0, 0, 1)])
    exps, u = multiplicity_profile(D, [P("X0"), P("X1"), P("X2")])
    assert exps == [1, 1, 1] and u == 1
    exps, u = multiplicity_profile(SymWeb(QQ, [diag(1, 1), Z2, Z2]), [P("X0")])
    assert exps == [2] and u == 1
    W = SymWeb(F5, [diag(2, 1, 1), diag(0, 1, 1), diag(0, 0, 0)])
    exps, u = multiplicity_profile(W, [P("X0", F5), P("X0 + X1", F5)])
    assert exps == [1, 2] and u == 2
    with pytest.raises(FactorsDoNotExhaust):
        multiplicity_profile(W, [P("X0", F5)])
    with pytest.raises(ZeroDiscriminant):
        multiplicity_profile(SymWeb(F5, [Z2, Z2, Z2]), [P("X0", F5)])


def test_degree_of_disc():
    rng = random.Random(17)
    for _ in range(40):
        n = rng.randint(1, 3)
        M = rand_web(rng, F5, 2, n)
        if M.disc:
            assert M.disc.is_homogeneous() == n + 1


def test_validation():
    with pytest.raises(NotSymmetric):
        SymWeb(F3, [[[1, 1], [0, 0]], Z2, Z2])
    with pytest.raises(DimensionMismatch):
        SymWeb(F3, [Z2, Z2])
    with pytest.raises(DimensionMismatch):
        SymWeb(F3, [[[1]], [[1]], [[1]]])
    with pytest.raises(DimensionMismatch):
        SymWeb(F3, [Z2, Z2, diag(1, 1, 1)])
    with pytest.raises(SingularMatrix):
        GroupElem(F3, linalg.identity(F3, 3), [[1, 1], [1, 1]])


def test_codes_and_batch_discriminants():
    rng = random.Random(18)
    for F in (F2, F3, F5):
        for n in (1, 2):
            webs = [rand_web(rng, F, 2, n) for _ in range(30)]
            for M in webs:
                assert web_from_code(F, 2, n, M.code()) == M
            arr = np.stack([M.as_array() for M in webs])
            batch = batch_discriminants(arr, F.p)
            for M, row in zip(webs, batch):
                assert np.array_equal(row, dense_coefficients(M.disc, n + 1))
