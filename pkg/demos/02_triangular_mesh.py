# # Any unitary as a triangle of beam splitters
#
# Nulling the sub-diagonal entries of a unitary one at a time, bottom row
# first, leaves a diagonal of phases. Each nulling step is one beam
# splitter, so an N-mode unitary needs N(N-1)/2 of them.

# %%
import numpy as np

from dilatic import reck_decompose, recompose

rng = np.random.default_rng(3)
n = 5
z = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
q, r = np.linalg.qr(z)
u = q * (np.diag(r) / np.abs(np.diag(r)))

circ = reck_decompose(u)
print("beam splitters:", circ.beam_splitter_count(), "expected:", n * (n - 1) // 2)
for e in circ.elements[:6]:
    print(f"  {e.kind:14s} modes={e.modes} theta={e.theta:.4f} phi={e.phi:+.4f}")
print("  ...")
print("round-trip residual:", np.abs(recompose(circ) - u).max())

# %% [markdown]
# Structured unitaries use fewer elements, since identity splitters are
# dropped. A cyclic shift of three modes needs only two.

# %%
shift = np.roll(np.eye(3), 1, axis=0)
c = reck_decompose(shift)
print("cyclic shift:", c.beam_splitter_count(), "beam splitters")
print(np.round(recompose(c).real, 12))
