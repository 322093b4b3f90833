"""Coherent-state propagation: the kernel matches quadrature up to a constant,
while the Gram matrix of the propagated states drifts."""

import numpy as np

from opgraph.oscillator import verify_corollary3

rep = verify_corollary3()
print("ratio quadrature / kernel:")
for row in rep.tables["ratios"]:
    print("  ", np.round(np.asarray(row, dtype=complex).ravel()[:3], 6))
print("measured constant:", np.round(rep.tables["measured_constant"], 10))
print("exp(-|beta|^2):    ", np.round(np.exp(-0.25), 10))
print(f"ratio spread {rep.residuals['ratio_spread']:.1e}")
print(f"Gram drift over time {rep.residuals['unitarity_gram_drift']:.3f}  <- the propagator is not norm preserving")
