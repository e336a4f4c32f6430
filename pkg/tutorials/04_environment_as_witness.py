# %% [markdown]
# # The environment as a witness
#
# When a system imprints its pointer state on many environment fragments,
# each fragment holds a copy. The redundancy ratio counts the copies:
# R_I = sum_k I(S:E_k) / H(S).

# %%
from einselection.witness import (
    BranchingScenario,
    Event,
    evolve,
    maximize_redundancy_J,
    partition,
    redundancy,
    redundancy_I,
    redundancy_rate,
)
from einselection.dynamics import hadamard_states
from einselection.qstate import MeasurementBasis, reduced_density

M = 6
scenario = BranchingScenario((0.6, 0.8), (2,) * M, tuple(Event("S", f"E{k}", k + 1.0) for k in range(M)))
trajectory = evolve(scenario)
for (t, state), (_, rate) in zip(trajectory, redundancy_rate(trajectory)):
    r = redundancy_I(state)
    print(f"t={t:.0f}: R_I={r.R_I:.3f}  rate={rate:+.3f}  records={r.records}")

# %% [markdown]
# The first event gives R_I = 2, not 1: system and one fragment share a
# pure state, so I(S:E) = 2 H(S). From then on each fragment adds one.
# The measurement-based ratio is maximal in the pointer basis and
# vanishes for a complementary measurement.

# %%
_, final = trajectory[-1]
best = maximize_redundancy_J(final, starts=16, polish=4)
print("max R_J:", round(best.R_J, 6))
plus, minus = hadamard_states()
print("R_J in Hadamard basis:", round(redundancy(final, basis=MeasurementBasis.from_vectors("S", [plus, minus])).R_J, 6))

# %% [markdown]
# Grouping fragments changes the count: the whole environment is a
# single witness.

# %%
print(partition(final, [[f"E{k}" for k in range(M)]]).R_I)
print(partition(final, [["E0", "E1", "E2"], ["E3", "E4", "E5"]]).R_I)

# %% [markdown]
# ## Records spread without touching the system
#
# Copying from primary to secondary environment raises redundancy while
# the system's own state stays fixed.

# %%
secondary = BranchingScenario((0.6, 0.8), (2, 2, 2, 2), (
    Event("S", "E0", 1.0), Event("S", "E1", 2.0), Event("E0", "E2", 3.0), Event("E1", "E3", 4.0)))
for t, state in evolve(secondary):
    rho_s = reduced_density(state, ["S"]).matrix
    print(f"t={t:.0f}: R_I={redundancy_I(state).R_I:.3f}  |rho_S offdiag|={abs(rho_s[0, 1]):.3f}")
