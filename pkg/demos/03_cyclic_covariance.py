"""Covariant POVM on Z_n and the two readings of the phase-orbit projections."""

from opgraph.cyclic import corollary1_build, corollary2_verify

for n in (3, 5):
    graph, povm, rep = corollary1_build(n)
    print(f"n={n}: dim H = {povm.dim}, graph size {graph.size}, all identities hold: {rep.passed}")

print("\nphase orbits of Q_j (dimension of each span, and whether they coincide)")
for n in (2, 3, 4):
    for reading in ("literal", "bell"):
        rep = corollary2_verify(n, reading)
        t = rep.tables
        print(f"  n={n} {reading:7s} dims={t['graph_dims']} coincide={t['coincide']} "
              f"equal to span(U_j)={t['equals_generator_span']} (span(U_j) has dim {t['generator_span_dim']})")
