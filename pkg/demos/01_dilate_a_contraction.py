# # Realising a lossy linear map with a lossless interferometer
#
# A single photon spread over N1 input modes can be sent through any
# linear map K with operator norm at most one. The trick is to embed K as
# the top-left block of a larger unitary and let the missing probability
# leak into ancilla modes.

# %%
import numpy as np

from dilatic import dilate, dilation_to_circuit, recompose, beam_splitter_bound, propagate

rng = np.random.default_rng(7)
k = rng.normal(size=(2, 3)) + 1j * rng.normal(size=(2, 3))
k *= 0.9 / np.linalg.norm(k, 2)
print("K =\n", np.round(k, 3))

# %% [markdown]
# The dilation uses the singular value decomposition K = U S V^H. Every
# singular value below one becomes a single beam splitter with
# cos(theta) = sigma; missing singular values are padded with ones.

# %%
d = dilate(k)
print("singular values:", np.round(d.singular_values, 6))
print("padded:", np.round(d.sigma_prime, 6))
print("angles (rad):", np.round(d.thetas, 6))
print("unitarity residual:", np.abs(d.u_big.conj().T @ d.u_big - np.eye(d.mode_count)).max())
print("block residual:", np.abs(d.u_big[:2, :3] - k).max())

# %% [markdown]
# Compile to beam splitters and phase shifters. V^H and U become
# triangular meshes, G is a column of splitters between the top and bottom
# halves.

# %%
circ = dilation_to_circuit(d)
print(circ.module_beam_splitters())
print("total:", circ.beam_splitter_count(), "bound:", beam_splitter_bound(3, 2))
print("circuit vs dense:", np.abs(recompose(circ) - d.u_big).max())

# %% [markdown]
# Send a photon in: the first two output modes carry K psi, the rest is
# loss.

# %%
psi = np.array([1, 1j, 0]) / np.sqrt(2)
out = propagate(circ, psi).amplitudes
print("success probability:", np.vdot(out[:2], out[:2]).real)
print("<psi|K^H K|psi>     :", np.vdot(psi, k.conj().T @ k @ psi).real)
