"""Acceptance gate: one test per criterion, each printing a PASS/FAIL line.

Lines are collected and shown in the terminal summary; with ``-s`` they
also appear inline.
"""

import filecmp
import math
import subprocess
import sys
import time

import numpy as np
from einselection import cli
from einselection.discord import (
    DephasingSpec,
    DiscordSearch,
    basis_angle_degrees,
    dephase,
    grid_discord_qubit,
    minimize_discord,
    mutual_information_J,
)
from einselection.dynamics import CShiftSpec, cnot, cshift_unitary, hadamard_states, interaction_unitary, premeasure
from einselection.infotheory import action_cost, entropy, min_action_bound, minimize_action, mutual_information
from einselection.qstate import DensityMatrix, MeasurementBasis, PureState, SubsystemLayout, reduced_density, to_density
from einselection.randomness import haar_unitary, make_rng, random_density_matrix, random_pure_state
from einselection.witness import BranchingScenario, Event, evolve, maximize_redundancy_J, redundancy_I

from conftest import ACCEPTANCE_LINES


class Gate:
    def __init__(self, number, title, limit_s):
        self.number, self.title, self.limit = number, title, limit_s
        self.checks = []

    def check(self, ok, detail):
        self.checks.append((bool(ok), detail))

    def __enter__(self):
        self.t0 = time.perf_counter()
        return self

    def __exit__(self, exc_type, exc, tb):
        elapsed = time.perf_counter() - self.t0
        if exc_type is not None:
            self.checks.append((False, f"raised {exc_type.__name__}: {exc}"))
        self.check(elapsed < self.limit, f"runtime {elapsed:.1f}s (limit {self.limit:g}s)")
        failed = [d for ok, d in self.checks if not ok]
        status = "PASS" if not failed else "FAIL"
        if failed:
            detail = "; ".join(failed) + f" ({len(self.checks) - len(failed)} other checks passed)"
        else:
            detail = "; ".join(d for _, d in self.checks)
        line = f"[{status}] criterion {self.number} {self.title}: {detail}"
        ACCEPTANCE_LINES.append(line)
        print(line)
        if exc_type is None:
            assert not failed, line
        return False


SWAP = np.eye(4)[[0, 2, 1, 3]]


def test_criterion_1_gate_identities():
    with Gate(1, "gate identities", 1.0) as g:
        u = cshift_unitary(CShiftSpec(2, 2, 1))
        truth = {(s, a): (s, a ^ s) for s in (0, 1) for a in (0, 1)}
        table_ok = all(u[2 * so + ao, 2 * s + a] == 1 for (s, a), (so, ao) in truth.items())
        g.check(table_ok and np.array_equal(u, cnot()), "c-shift(2,2,1) equals the c-not truth table")
        plus, minus = hadamard_states()
        hb = np.column_stack([plus, minus])
        hh = np.kron(hb, hb)
        # in the Hadamard basis the apparatus controls the system
        dev = np.max(np.abs(hh.conj().T @ cnot() @ hh - SWAP @ cnot() @ SWAP))
        g.check(dev < 1e-12, f"Hadamard-basis reversal deviation {dev:.1e}")
        dev_i = np.max(np.abs(interaction_unitary(CShiftSpec(2, 2, 1)) - cnot()))
        g.check(dev_i < 1e-12, f"Hamiltonian c-not deviation {dev_i:.1e}")


def test_criterion_2_hamiltonian_equivalence():
    with Gate(2, "Hamiltonian equivalence", 30.0) as g:
        worst, cases = 0.0, 0
        for n in range(2, 9):
            for N in range(2, 9):
                for G in range(1, N):
                    spec = CShiftSpec(n, N, G)
                    worst = max(worst, float(np.max(np.abs(interaction_unitary(spec) - cshift_unitary(spec)))))
                    cases += 1
        g.check(worst < 1e-10, f"{cases} cases, max deviation {worst:.1e}")


def test_criterion_3_action_calculus():
    with Gate(3, "action calculus", 120.0) as g:
        for N in (2, 4, 8):
            ext = np.eye(N + 1)
            c = action_cost(np.full(N, 1 / N), ext[N], ext[:N])
            g.check(abs(c - math.pi / 2) < 1e-12, f"orthogonal cost N={N} is {c:.12f}")
        worst = 0.0
        for N in range(2, 9):
            res = minimize_action(np.full(N, 1 / N), np.eye(N), starts=32, seed=N)
            err = abs(res.cost - min_action_bound(N))
            worst = max(worst, err)
            g.check(err < 1e-5, f"N={N} minimum {res.cost:.8f} vs {min_action_bound(N):.8f}")
            if N == 2:
                g.check(abs(res.cost - math.pi / 4) < 1e-5, f"N=2 minimum {res.cost:.8f} vs pi/4")
        g.check(worst < 1e-5, f"max |min action - arcsin sqrt(1-1/N)| = {worst:.1e} for N=2..8")
        sc = cli.normalize({"version": "1", "mode": "action", "params": {"N": 2}})
        rows = cli.sweep(sc, "N", range(2, 17))
        iota_err = max(abs(r["per_bit_approximate"] - math.pi / (2 * math.log2(r["N"]))) for r in rows)
        g.check(iota_err <= 4e-16, f"sweep iota(N), N=2..16, max error {iota_err:.1e}")


def test_criterion_4_mutual_information():
    with Gate(4, "premeasurement mutual information", 10.0) as g:
        worst = 0.0
        for N in range(2, 9):
            system = PureState(np.full(N, 1 / math.sqrt(N)), SubsystemLayout.of(S=N))
            info = mutual_information(to_density(premeasure(system, N)))
            worst = max(worst, abs(info - 2 * math.log2(N)))
        g.check(worst < 1e-9, f"max |I - 2 log2 N| = {worst:.1e} for N=2..8")


def test_criterion_5_discord_suite():
    with Gate(5, "discord suite", 600.0) as g:
        layout = SubsystemLayout.of(S=2, A=2)
        bell = to_density(PureState.normalized([1, 0, 0, 1], layout))
        rep = minimize_discord(bell)
        grid, _, _ = grid_discord_qubit(bell, "A", 1.0)
        g.check(abs(rep.discord - 1) < 1e-3 and abs(rep.discord - grid) < 1e-3,
                f"Bell min discord {rep.discord:.6f}, 1-degree grid {grid:.6f}")
        dec = DensityMatrix(np.diag([0.5, 0, 0, 0.5]), layout)
        rep = minimize_discord(dec)
        angle = basis_angle_degrees(rep.basis.vectors, np.eye(2))
        g.check(rep.discord < 1e-6 and angle < 1.0,
                f"decohered Bell min discord {rep.discord:.1e} at {angle:.1e} deg from pointer basis")
        rng = make_rng(5)
        fast = DiscordSearch(starts=8, polish=2, grid_step_deg=None)
        low, j_excess = math.inf, -math.inf
        for _ in range(1000):
            rho = random_density_matrix(layout, rng, rank=int(rng.integers(1, 5)))
            low = min(low, minimize_discord(rho, fast).discord)
            basis = MeasurementBasis("A", haar_unitary(2, rng))
            j_excess = max(j_excess, mutual_information_J(rho, basis) - mutual_information(rho))
        g.check(low >= -1e-6, f"1000 random states, smallest minimized discord {low:.1e}")
        g.check(j_excess <= 1e-9, f"max fixed-basis J - I = {j_excess:.1e}")


def test_criterion_6_dephasing_entropy():
    with Gate(6, "dephasing entropy", 60.0) as g:
        rng = make_rng(6)
        worst_jump, worst_step = math.inf, math.inf
        lams = np.linspace(0, 1, 11)
        for i in range(500):
            dS, dA = (2, 2) if i % 2 else (2, 3)
            layout = SubsystemLayout.of(S=dS, A=dA)
            if i % 3 == 0:
                rho = to_density(premeasure(random_pure_state(SubsystemLayout.of(S=dS), rng), dA))
            else:
                rho = random_density_matrix(layout, rng, rank=int(rng.integers(1, dS * dA + 1)))
            bases = (MeasurementBasis("S", haar_unitary(dS, rng)), MeasurementBasis("A", haar_unitary(dA, rng)))
            hs = [entropy(dephase(rho, DephasingSpec(*bases, lam))) for lam in lams]
            worst_jump = min(worst_jump, hs[-1] - hs[0])
            worst_step = min(worst_step, min(b - a for a, b in zip(hs, hs[1:])))
        g.check(worst_jump >= -1e-9, f"min H(rho_D) - H(rho_P) = {worst_jump:.1e} over 500 states")
        g.check(worst_step >= -1e-9, f"min entropy step along lambda = {worst_step:.1e}")


def _random_scenario(rng):
    n = 2
    n_env = int(rng.integers(1, 5))
    dims = tuple(int(d) for d in rng.integers(2, 4, size=n_env))
    amps = rng.normal(size=n) + 1j * rng.normal(size=n)
    amps /= np.linalg.norm(amps)
    events, t = [], 0.0
    for k in range(int(rng.integers(1, 6))):
        target = int(rng.integers(n_env))
        sources = ["S"] + [f"E{j}" for j in range(n_env) if j != target]
        t += float(rng.uniform(0.1, 1.0))
        events.append(Event(str(rng.choice(sources)), f"E{target}", t,
                            fraction=float(rng.choice([1.0, rng.uniform(0, 1)]))))
    return BranchingScenario(amps, dims, tuple(events))


def test_criterion_7_witness_suite():
    with Gate(7, "witness suite", 600.0) as g:
        amps = (1 / math.sqrt(2), 1 / math.sqrt(2))
        for M in range(1, 11):
            sc = BranchingScenario(amps, (2,) * M, tuple(Event("S", f"E{k}", k + 1.0) for k in range(M)))
            _, final = evolve(sc)[-1]
            r_i = redundancy_I(final).R_I
            g.check(abs(r_i - M) < 1e-9, f"GHZ M={M}: R_I = {r_i:.12f}")
            r_j = maximize_redundancy_J(final, starts=16, polish=4, seed=M).R_J
            g.check(abs(r_j - M) < 1e-4, f"GHZ M={M}: max-basis R_J = {r_j:.8f}")
        rng = make_rng(7)
        excess = -math.inf
        for i in range(200):
            _, psi = evolve(_random_scenario(rng))[-1]
            r_i = redundancy_I(psi)
            if r_i.undefined:
                continue
            r_j = maximize_redundancy_J(psi, starts=8, polish=2, seed=i)
            excess = max(excess, r_j.R_J - r_i.R_I)
        g.check(excess <= 1e-6, f"200 random scenarios, max R_J,max - R_I = {excess:.1e}")
        sc = BranchingScenario((0.6, 0.8), (2, 2, 2, 2), (
            Event("S", "E0", 1.0), Event("S", "E1", 2.0), Event("E0", "E2", 3.0), Event("E1", "E3", 4.0)))
        traj = evolve(sc)
        values = [redundancy_I(s).R_I for _, s in traj[2:]]
        rho_s = [reduced_density(s, ["S"]).matrix for _, s in traj[2:]]
        drift = max(float(np.max(np.abs(m - rho_s[0]))) for m in rho_s)
        g.check(all(b > a + 0.5 for a, b in zip(values, values[1:])),
                f"secondary transfers raise R_I {[round(v, 9) for v in values]}")
        g.check(drift < 1e-12, f"rho_S drift during transfers {drift:.1e}")


def test_criterion_8_determinism(tmp_path):
    with Gate(8, "determinism", 60.0) as g:
        names = sorted(cli.bundled_scenarios())
        same = []
        for name in names:
            a, b = tmp_path / f"a_{name}", tmp_path / f"b_{name}"
            cli.main(["run", "--scenario", name, "--out", str(a)])
            subprocess.run([sys.executable, "-m", "einselection", "run", "--scenario", name, "--out", str(b)],
                           check=True, capture_output=True)
            same.append(filecmp.cmp(a, b, shallow=False))
        g.check(all(same), f"{sum(same)}/{len(names)} bundled scenarios byte-identical across two runs")
