# ---
# jupyter:
#   jupytext:
#     text_representation:
#       extension: .py
#       format_name: light
# ---

# # Endomorphism algebras, fibers and censuses
#
# For a web M with nonzero discriminant, the pairs (P, P') with P^T M_i = M_i P'
# form an algebra L0. When disc(M) is squarefree over the algebraic closure,
# L0 is commutative and etale, and the webs that share the cokernel module
# of M split into |L^x / k^x L^x2| congruence classes.

from symwebs import F2, F3, SymWeb, census, congruent, endomorphism_algebra, etale_report, fiber_enumerate
from symwebs import parse_poly, render
from symwebs.endoalg import norm_kernel_order

two_lines = SymWeb(F3, [[[1, 0], [0, 0]], [[0, 0], [0, 1]], [[0, 0], [0, 0]]])
alg = endomorphism_algebra(two_lines)
rep = etale_report(alg)
print("dim L0 =", alg.dim)
print("commutative:", rep.commutative, "| sigma = id:", rep.sigma_identity, "| etale:", rep.etale)
print("r =", rep.factor_count_r, "| fiber group order =", rep.fiber_group_order)
print("|ker N| =", norm_kernel_order(alg))

# ## The fiber of diag(X0, X1) over F3
#
# L = F3 x F3, so the fiber group has order 2 and there are two congruence classes.

fiber = fiber_enumerate(two_lines)
for i, W in enumerate(fiber.reps):
    print(f"rep {i}: disc = {render(W.disc)}, matrices = {[W.matrix(j) for j in range(3)]}")
print("representatives congruent:", congruent(fiber.reps[0], fiber.reps[1]) is not None)

# ## Exhaustive censuses
#
# All 3^9 webs with m = 2, n = 1 over F3 are enumerated, filtered by discriminant up
# to scalars, and partitioned into congruence classes and module classes.

table = census(F3, 2, 1, parse_poly("X0*X1", F3, 3))
print(table.render())

# In characteristic 2 the fiber group collapses, so every module class is a single congruence class.

print(census(F2, 2, 1, parse_poly("X0*X1", F2, 3)).render())

# A smooth conic has L = k, so again one congruence class per module class.

print(census(F3, 2, 1, parse_poly("X0*X2 - X1^2", F3, 3)).render())
