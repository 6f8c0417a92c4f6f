# ---
# jupyter:
#   jupytext:
#     text_representation:
#       extension: .py
#       format_name: light
# ---

# # Webs and their discriminants
#
# A web is a tuple of symmetric matrices M_0, ..., M_m. Its discriminant is
# det(X_0 M_0 + ... + X_m M_m), a form of degree n+1 in m+1 variables.
# Everything below is exact: F_p arithmetic is modular and Q uses fractions.

import random

from symwebs import F3, F5, QQ, GroupElem, SymWeb, act, adjugate, classify, linalg, render
from symwebs.symweb import poly_matmul

# Two lines over F3: the diagonal web diag(X0, X1).

two_lines = SymWeb(F3, [[[1, 0], [0, 0]], [[0, 0], [0, 1]], [[0, 0], [0, 0]]])
print("disc:", render(two_lines.disc), "|", classify(two_lines).value)

# A conic: M(X) = [[X0, X1], [X1, X2]] has discriminant X0*X2 - X1^2.

conic = SymWeb(QQ, [[[1, 0], [0, 0]], [[0, 1], [1, 0]], [[0, 0], [0, 1]]])
print("disc:", render(conic.disc), "|", classify(conic).value)

# ## The group action
#
# (A, P) sends M to the web whose j-th matrix is sum_i a_ij P^T M_i P.
# The discriminant transforms as det(P)^2 disc(M)(AX).

rng = random.Random(0)


def random_sym(F, size):
    rows = [[0] * size for _ in range(size)]
    for r in range(size):
        for c in range(r, size):
            rows[r][c] = rows[c][r] = F.coerce(rng.randint(-2, 2))
    return rows


def random_invertible(F, size):
    while True:
        A = [[F.coerce(rng.randint(-2, 2)) for _ in range(size)] for _ in range(size)]
        if linalg.det(F, A):
            return A


M = SymWeb(F5, [random_sym(F5, 3) for _ in range(3)])
A, P = random_invertible(F5, 3), random_invertible(F5, 3)
moved = act(M, GroupElem(F5, A, P))
dp = linalg.det(F5, P)
predicted = M.disc.substitute_linear(A).scale(F5.mul(dp, dp))
print("disc(M)       =", render(M.disc))
print("disc(M.(A,P)) =", render(moved.disc))
print("law holds:", moved.disc == predicted)

# For a scalar A = aI the factor is a^(n+1), since each of the n+1 rows picks up a.

a = F5.coerce(2)
aI = [[a if i == j else 0 for j in range(3)] for i in range(3)]
scaled = act(M, GroupElem(F5, aI, linalg.identity(F5, 3)))
print("a^(n+1) law:", scaled.disc == M.disc.scale(F5.power(a, 3)))

# ## Adjugate
#
# M(X) adj(M(X)) = disc(M) I holds as an identity of polynomial matrices.

prod = poly_matmul(M.linear_form_matrix(), adjugate(M))
print("diagonal entries equal disc:", all(prod[i][i] == M.disc for i in range(3)))
print("off-diagonal entries vanish:", all(not prod[i][j] for i in range(3) for j in range(3) if i != j))
