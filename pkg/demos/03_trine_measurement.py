# # A three-outcome measurement on a qubit
#
# The trine POVM has three elements (2/3)|f_k><f_k| with the f_k spaced
# 120 degrees apart on a real circle. No projective measurement on a qubit
# has three outcomes, so the compiler spreads the photon over three lanes
# of two modes each.

# %%
import numpy as np

from dilatic import compile_povm, measure_povm, validate_povm

elements = []
for k in range(3):
    a = 2 * np.pi * k / 3
    f = np.array([np.cos(a), np.sin(a)])
    elements.append((2 / 3) * np.outer(f, f))

p = validate_povm(elements)
bundle = compile_povm(p)
print("modules:", [m.name for m in bundle.modules])
print("beam splitters:", bundle.beam_splitter_count())
for st in bundle.stages:
    print(f"outcome {st.index}: sigma* = {np.round(st.sigma_star, 6)}, ports dropped = {st.rank_drop}")

# %% [markdown]
# The second stage has a unit sigma*: one port is fully routed to its
# outcome and the last lane only needs the remaining one.

# %%
rec = measure_povm(bundle, [1.0, 0.0], shots=100_000, seed=1)
print("exact probabilities:", np.round(rec.outcome_probs, 12))
print("sampled counts:     ", rec.counts)
for i, s in enumerate(rec.outcome_states):
    print(f"state after outcome {i}:", np.round(s.amplitudes, 6))
