"""Dilate a random POVM two ways and watch the subset errors rebuild its graph."""

import numpy as np

from opgraph.naimark import Povm, dilate, random_povm, subset_isometry, subset_element, verify_proposition1

p = random_povm(3, 4, seed=2)
print("ranks of the POVM elements:", p.ranks())

for minimal in (False, True):
    d = dilate(p, minimal=minimal)
    print(f"\nminimal={minimal}: dim K = {d.dimK}")
    for name, r in d.invariant_residuals().items():
        print(f"  {name:14s} {r:.1e}")

# V_B^dag V_B' = M(B n B') for two overlapping outcome sets
d = dilate(p, minimal=True)
B, B2 = {0, 1}, {1, 2}
lhs = subset_isometry(d, B).conj().T @ subset_isometry(d, B2)
print("\n|V_B^dag V_B' - M({1})| =", np.abs(lhs - subset_element(p, B & B2)).max())

rep = verify_proposition1(p, seed=2)
print("\nfull check passes:", rep.passed)
print("graph size:", rep.parameters["graph_size"], " (the span of 4 elements in a 9-dim space)")

# the trine: three rank-one elements on a qubit, so the minimal dilation is smaller
kets = [np.array([np.cos(a), np.sin(a)]) for a in (0, 2 * np.pi / 3, 4 * np.pi / 3)]
trine = Povm(dim=2, elements=[2 / 3 * np.outer(v, v) for v in kets])
print("\ntrine: canonical dim K =", dilate(trine).dimK, " minimal dim K =", dilate(trine, minimal=True).dimK)
