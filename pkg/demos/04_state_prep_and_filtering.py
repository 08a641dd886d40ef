# # Preparing a qudit, then concentrating entanglement
#
# A column vector is a 1-input map, so preparing a single-photon qudit is
# just another dilation. Filtering one half of a two-photon entangled
# state is a diagonal map with the same construction.

# %%
import numpy as np

from dilatic import entanglement_filter, prepare_qudit, propagate
from dilatic.simulator import filtered_state, schmidt_coefficients

target = np.array([0.5, 0.5j, -0.5, 0.5])
circ = prepare_qudit(target)
out = propagate(circ, [1.0]).amplitudes
print("prepared:", np.round(out[:4], 12))
print("beam splitters:", circ.beam_splitter_count())

# %% [markdown]
# For sum_i c_i |ii> the filter diag(min(c) / c_i) equalises the Schmidt
# coefficients. It succeeds with probability N min(c)^2.

# %%
c = np.sqrt([0.8, 0.2])
k, prob = entanglement_filter(c)
print("filter:", np.round(np.diag(k.k), 6), "success:", prob)
print("output Schmidt coefficients:", schmidt_coefficients(filtered_state(k, c)))

c3 = np.sqrt([0.5, 0.3, 0.2])
print("three levels, success:", entanglement_filter(c3)[1])
