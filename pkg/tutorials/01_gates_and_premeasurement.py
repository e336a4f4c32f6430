# %% [markdown]
# # Controlled shifts and premeasurement
#
# A measurement starts with a unitary that copies the system's pointer
# states onto an apparatus dial. For qubits this is the c-not; for an
# N-position dial it is the controlled shift |s>|A_k> -> |s>|A_{k+s}>.

# %%
import math

import numpy as np

from einselection import PureState, SubsystemLayout, mutual_information, to_density
from einselection.dynamics import (
    CShiftSpec,
    cnot,
    cshift_unitary,
    hadamard_states,
    hft,
    interaction_unitary,
    premeasure,
)

print(cnot().real.astype(int))

# %% [markdown]
# The same gate read in the Hadamard basis runs backwards: the apparatus
# now controls the system. Information flows both ways once phases count.

# %%
plus, minus = hadamard_states()
hh = np.kron(np.column_stack([plus, minus]), np.column_stack([plus, minus]))
swap = np.eye(4)[[0, 2, 1, 3]]
print(np.allclose(hh.conj().T @ cnot() @ hh, swap @ cnot() @ swap))

# %% [markdown]
# ## The shift as a Hamiltonian evolution
#
# In the Fourier-conjugate basis of the dial the shift is diagonal, so it
# is generated by a product interaction `s (x) B`. Evolving for action
# `G 2 pi / N` reproduces the permutation exactly.

# %%
spec = CShiftSpec(n=3, N=8, G=2)
print("max deviation:", np.max(np.abs(interaction_unitary(spec) - cshift_unitary(spec))))
print("Fourier matrix unitary:", np.allclose(hft(8) @ hft(8).conj().T, np.eye(8)))

# %% [markdown]
# Stopping halfway leaves the dial in a superposition; the correlation is
# only partial.

# %%
system = PureState(np.array([0.6, 0.8]), SubsystemLayout.of(S=2))
for fraction in (0.0, 0.25, 0.5, 1.0):
    u = interaction_unitary(CShiftSpec(2, 2, action=fraction * math.pi))
    out = PureState(u @ np.kron(system.amplitudes, [1, 0]), SubsystemLayout.of(S=2, A=2))
    print(f"fraction {fraction:4.2f}: I(S:A) = {mutual_information(to_density(out)):.4f} bits")

# %% [markdown]
# A complete premeasurement of a uniform N-state system yields
# I(S:A) = 2 log2 N: pure global state, so both marginals carry log2 N.

# %%
for N in (2, 4, 8):
    s = PureState(np.full(N, 1 / math.sqrt(N)), SubsystemLayout.of(S=N))
    print(N, mutual_information(to_density(premeasure(s, N))), 2 * math.log2(N))
