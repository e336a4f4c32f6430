# %% [markdown]
# # The action price of a record
#
# Moving a ready state onto one of N orthogonal outcomes costs at least the
# angle arccos|<ready|outcome>|. A ready state orthogonal to all outcomes
# pays pi/2; the best ready state sits at equal overlap with all of them.

# %%
import math

import numpy as np

from einselection.dynamics import minimal_correlating_action
from einselection.infotheory import action_cost, min_action_bound, minimize_action, per_bit_cost

N = 4
ext = np.eye(N + 1)
print("orthogonal ready state:", action_cost(np.full(N, 1 / N), ext[N], ext[:N]), math.pi / 2)

# %%
for N in range(2, 7):
    res = minimize_action(np.full(N, 1 / N), np.eye(N), starts=32)
    print(f"N={N}: searched {res.cost:.6f}  closed form {min_action_bound(N):.6f}")

# %% [markdown]
# For a qubit the minimum is pi/4: half the cost of starting orthogonal.
# Dividing by log2 N gives the price per bit, which falls as the dial grows.

# %%
for N in (2, 4, 16, 256):
    c = per_bit_cost(N)
    print(f"N={N:4d}: approx {c.approximate:.4f}  exact {c.exact:.4f}  rad/bit")

# %% [markdown]
# A Hamiltonian that rotates each branch directly toward its outcome
# attains the bound: the Mandelstam-Tamm action gt * Delta H at first
# maximal correlation equals arcsin sqrt(1 - 1/N).

# %%
for N in (2, 3, 5, 8):
    r = minimal_correlating_action(N)
    print(f"N={N}: action {r['action']:.6f}  bound {r['bound']:.6f}  fidelity {r['fidelity']:.6f}")
