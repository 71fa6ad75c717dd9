"""
Laplacians, graph Fourier transforms and smooth signals
========================================================

A small tour of the graph primitives: build a weighted graph, look at its
spectrum, and compare signals drawn with low- and high-frequency energy.
"""

import numpy as np

from graphlearn import graph_core, synth_data

# a connected random graph on 8 nodes with 40% of the possible edges
rng = synth_data.stream(seed=0, stream_id=0)
adj = synth_data.gen_base_graph(8, 0.4, rng)
lap = graph_core.laplacian(adj)
print("row sums of L:", np.round(lap.sum(axis=1), 12))

# the eigendecomposition is the graph Fourier basis; lambda_1 is zero for a
# connected graph and its eigenvector is constant
lam, vecs = graph_core.gft(lap)
print("eigenvalues:", np.round(lam, 3))

# smooth signals put their energy on small eigenvalues, outliers on large ones
smooth = synth_data.sample_signals(adj, 500, "smooth", rng)
rough = synth_data.sample_signals(adj, 500, "high-frequency", rng)
for name, x in (("smooth", smooth), ("high-frequency", rough)):
    energy = np.mean((vecs.T @ x) ** 2, axis=1)
    quotient = np.mean([graph_core.smoothness(x[:, i], lap) / (x[:, i] @ x[:, i])
                        for i in range(x.shape[1])])
    print(f"{name:>15}: spectral energy {np.round(energy / energy.sum(), 2)}, "
          f"mean Rayleigh quotient {quotient:.3f}")

# a second-order spectral polynomial acts on L directly
h = graph_core.SpectralPolynomial(0.0, 1.0, 0.5)
print("h(L) equals L + 0.5 L^2:",
      np.allclose(graph_core.apply_spectral_polynomial(lap, h), lap + 0.5 * lap @ lap))
