# ---
# jupyter:
#   jupytext:
#     text_representation:
#       extension: .py
#       format_name: light
# ---

# # Automorphisms of an intersection of quadrics
#
# Three quadrics in P^3 over F3 span a net; their Gram matrices form a web with m = 2, n = 3.
# The automorphism group of the base locus X_Q sits in an exact sequence
# 0 -> ker N -> Aut(X_Q) -> H_Q -> 0, where ker N is read off the endomorphism algebra
# and H_Q from the stabilizer of the net. The brute force below runs over all
# 24261120 elements of GL4(F3) and takes about fifteen seconds.

import time

from symwebs import QuadricSystem, SymWeb, base_locus_points, corank, stabilizer_groups, F3, render

grams = [
    [[1, 0, 0, 0], [0, 0, 0, 0], [0, 0, 0, 0], [0, 0, 0, 1]],
    [[0, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 0], [0, 0, 0, 1]],
    [[0, 0, 0, 0], [0, 0, 0, 0], [0, 0, 1, 0], [0, 0, 0, 1]],
]
Q = QuadricSystem(SymWeb(F3, grams))
print("disc =", render(Q.web.disc))
print("coranks:", [corank(F3, G) for G in grams])

start = time.perf_counter()
report = stabilizer_groups(Q)
print(f"brute force took {time.perf_counter() - start:.1f}s")
for key, val in report.orders().items():
    print(f"|{key}| = {val}")
print("exact sequence checks out:", report.exactness_ok)
print("|Aut| == |ker N| * |H_Q|:", report.Aut == report.kerN * report.H_Q)

# The base locus has no F3-points but eight points over F9.

for s in (1, 2):
    print(f"#X_Q(F_3^{s}) =", len(base_locus_points(Q, s)))
