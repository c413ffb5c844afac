"""Ensemble averaging of unitary trajectories with sampled classical noise.

Each trajectory draws a noise record per hook, propagates exactly
through the piecewise-constant Hamiltonian, and contributes observable
traces; the ensemble mean and standard error come back per observable.
Trajectory streams derive deterministically from (seed, index).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..hilbert import _mat_of
from .noise import NoiseProcess


@dataclass
class StochasticResult:
    times: np.ndarray
    mean: dict
    stderr: dict
    n_traj: int
    seed: int


def _expi_step(h_mat: np.ndarray, dt: float) -> np.ndarray:
    w, v = np.linalg.eigh(h_mat)
    return (v * np.exp(-1j * dt * w)) @ v.conj().T


def _propagate_piecewise(h0, hooks, records, t_grid, psi0, observables):
    """Exact stepping through the union of noise edges and output times."""
    dim = h0.shape[0]
    edges = set(float(t) for t in t_grid)
    for rec in records:
        edges.update(float(e) for e in rec.edges if t_grid[0] <= e <= t_grid[-1])
    breakpoints = np.array(sorted(edges))
    psi = psi0.astype(complex).copy()
    out = {name: np.empty(len(t_grid)) for name in observables}
    grid_idx = 0
    t_prev = breakpoints[0]

    def record_if_grid(t, psi):
        nonlocal grid_idx
        while grid_idx < len(t_grid) and abs(t_grid[grid_idx] - t) <= 1e-15 * max(1.0, abs(t)):
            for name, op in observables.items():
                out[name][grid_idx] = np.real(np.vdot(psi, op @ psi))
            grid_idx += 1

    record_if_grid(t_prev, psi)
    for t_next in breakpoints[1:]:
        dt = t_next - t_prev
        if dt > 0:
            t_mid = 0.5 * (t_prev + t_next)
            h = h0.copy()
            for (op, _), rec in zip(hooks, records):
                h = h + rec.at(t_mid) * op
            psi = _expi_step(h, dt) @ psi
        record_if_grid(t_next, psi)
        t_prev = t_next
    return out


def stochastic_evolve(
    hamiltonian,
    hooks: list[tuple[object, NoiseProcess]],
    psi0: np.ndarray,
    t_grid: np.ndarray,
    n_traj: int,
    seed: int = 0,
    observables: dict | None = None,
    initial_sampler=None,
) -> StochasticResult:
    """Average unitary noisy trajectories.

    hooks: (operator, NoiseProcess) pairs; each trajectory adds
    w_i(t) * operator_i to the static Hamiltonian. initial_sampler(rng)
    may supply a stochastic initial state (e.g. thermal Fock sampling).
    """
    if n_traj < 2:
        raise ValueError("n_traj >= 2 required for error estimates")
    t_grid = np.asarray(t_grid, dtype=float)
    h0 = _mat_of(hamiltonian)
    obs = {name: _mat_of(op) for name, op in (observables or {}).items()}
    hook_ops = [(_mat_of(op), proc) for op, proc in hooks]
    streams = np.random.SeedSequence(seed).spawn(n_traj)
    acc = {name: np.zeros((n_traj, len(t_grid))) for name in obs}
    for k, stream in enumerate(streams):
        rng = np.random.default_rng(stream)
        records = [proc.sample(rng, float(t_grid[-1])) for _, proc in hook_ops]
        start = psi0 if initial_sampler is None else initial_sampler(rng)
        traj = _propagate_piecewise(h0, hook_ops, records, t_grid, start, obs)
        for name in obs:
            acc[name][k] = traj[name]
    mean = {name: acc[name].mean(axis=0) for name in obs}
    stderr = {
        name: acc[name].std(axis=0, ddof=1) / np.sqrt(n_traj) for name in obs
    }
    return StochasticResult(times=t_grid, mean=mean, stderr=stderr, n_traj=n_traj, seed=seed)
