"""A two-qubit bit-flip channel, its code space, and the recovery that undoes it."""

import numpy as np

from opgraph.graphs import KrausSet, graph_from_kraus
from opgraph.kl_codes import correct_single_error, kl_recovery, search_anticlique, verify_anticlique

X = np.array([[0, 1], [1, 0]])
k = KrausSet([np.eye(4) / np.sqrt(2), np.kron(X, np.eye(2)) / np.sqrt(2)], channel=True)
g = graph_from_kraus(k)
print("graph dimension:", g.size)

P = np.diag([1.0, 1.0, 0.0, 0.0])
cert = verify_anticlique(g, P)
print("P = |0><0| (x) I is an anticlique:", cert.valid, f"(residual {cert.residual:.1e})")

R = kl_recovery(k, P)
rho = np.diag([0.7, 0.3, 0, 0]).astype(complex)
rho[0, 1] = rho[1, 0] = 0.2
back = R.apply(k.apply(rho))
print("recovered state error:", np.abs(back - rho).max())

# an arbitrary error from the span, not just a Kraus operator
V = 0.3 * k.ops[0] + (0.5 - 0.2j) * k.ops[1]
out, d = correct_single_error(R, V, rho, P)
print(f"single error: output = {d:.4f} * rho, max deviation {np.abs(out - d * rho).max():.1e}")

# the search finds a code on its own; any answer is re-verified
found = search_anticlique(g, 2, seed=0)
print("search found a rank-2 anticlique:", found is not None and found.valid)
