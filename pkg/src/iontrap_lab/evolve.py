"""Time-ordered propagation of Hamiltonian programs.

Two independent routes: adaptive high-order ODE integration of the
Schrodinger equation (states), and piecewise-constant midpoint stepping
with per-step matrix exponentials (states or full unitaries). Both
tighten their knob until the result stops moving, so they can serve as
oracles for closed-form results.
"""

from __future__ import annotations

import numpy as np
from scipy.integrate import solve_ivp
from scipy.linalg import expm

from .hilbert import HamiltonianProgram


def propagate_state(
    program: HamiltonianProgram,
    psi0: np.ndarray,
    t_final: float,
    t_eval: np.ndarray | None = None,
    rtol: float = 1e-10,
    atol: float = 1e-12,
    max_step: float | None = None,
) -> np.ndarray:
    """Integrate i dpsi/dt = H(t) psi from 0 to t_final.

    Returns the state at t_final, or the stack of states at t_eval.
    """
    psi0 = np.asarray(psi0, dtype=complex)
    shape = psi0.shape  # (d,) or (d, k) for a batch sharing the time steps

    def rhs(t, y):
        return (-1j * program.apply(t, y.reshape(shape))).ravel()

    kwargs = dict(method="DOP853", rtol=rtol, atol=atol, dense_output=False)
    if max_step is not None:
        kwargs["max_step"] = max_step
    sol = solve_ivp(rhs, (0.0, t_final), psi0.ravel(), t_eval=t_eval, **kwargs)
    if not sol.success:
        raise RuntimeError(f"state propagation failed: {sol.message}")
    if t_eval is None:
        return sol.y[:, -1].reshape(shape)
    return sol.y.T.reshape((-1,) + shape)


def propagate_state_converged(
    program: HamiltonianProgram,
    psi0: np.ndarray,
    t_final: float,
    fidelity_tol: float = 1e-6,
    rtol0: float = 1e-8,
    max_rounds: int = 4,
) -> np.ndarray:
    """Tighten the integrator tolerance until the endpoint overlap between
    consecutive rounds changes by less than fidelity_tol."""
    rtol = rtol0
    psi = propagate_state(program, psi0, t_final, rtol=rtol, atol=rtol * 1e-2)
    for _ in range(max_rounds):
        rtol /= 100
        finer = propagate_state(program, psi0, t_final, rtol=max(rtol, 1e-13), atol=max(rtol * 1e-2, 1e-15))
        overlap = abs(np.vdot(finer, psi)) / (np.linalg.norm(finer) * np.linalg.norm(psi))
        psi = finer
        if 1 - overlap < fidelity_tol:
            return psi
        if rtol <= 1e-13:
            break
    return psi


def _hermitian_step(h_mat: np.ndarray, dt: float) -> np.ndarray:
    """exp(-i dt H) for hermitian H via eigendecomposition (fast and
    exactly unitary, unlike the general Pade route)."""
    w, v = np.linalg.eigh(h_mat)
    return (v * np.exp(-1j * dt * w)) @ v.conj().T


def piecewise_unitary(
    program: HamiltonianProgram,
    t0: float,
    t1: float,
    n_steps: int,
    order: int = 4,
) -> np.ndarray:
    """Time-ordered unitary via frozen-coefficient exponential steps.

    order 2 freezes H at the step midpoint; order 4 is the two-exponential
    commutator-free scheme on the Gauss nodes.
    """
    d = program.layout.dim
    u = np.eye(d, dtype=complex)
    h = (t1 - t0) / n_steps
    if order == 2:
        for k in range(n_steps):
            tm = t0 + (k + 0.5) * h
            u = _hermitian_step(program.value(tm), h) @ u
        return u
    if order != 4:
        raise ValueError("order must be 2 or 4")
    c_lo, c_hi = 0.5 - np.sqrt(3) / 6, 0.5 + np.sqrt(3) / 6
    a1, a2 = 0.25 + np.sqrt(3) / 6, 0.25 - np.sqrt(3) / 6
    for k in range(n_steps):
        ta = t0 + (k + c_lo) * h
        tb = t0 + (k + c_hi) * h
        h_a = program.value(ta)
        h_b = program.value(tb)
        u = _hermitian_step(a1 * h_a + a2 * h_b, h) @ u
        u = _hermitian_step(a2 * h_a + a1 * h_b, h) @ u
    return u


def piecewise_unitary_converged(
    program: HamiltonianProgram,
    t0: float,
    t1: float,
    n_steps0: int,
    tol: float = 1e-6,
    max_rounds: int = 6,
) -> np.ndarray:
    """Double the step count until the unitary stops changing in max norm."""
    n = n_steps0
    u = piecewise_unitary(program, t0, t1, n)
    for _ in range(max_rounds):
        n *= 2
        finer = piecewise_unitary(program, t0, t1, n)
        if np.abs(finer - u).max() < tol:
            return finer
        u = finer
    return u


def operator_overlap(u: np.ndarray, v: np.ndarray, keep: np.ndarray | None = None) -> float:
    """Normalized |Tr(U^dag V)| overlap between two unitaries.

    `keep` restricts the trace to a subspace (boolean mask or index list),
    which excludes truncation-edge columns from the comparison.
    """
    if keep is None:
        d = u.shape[0]
        return float(abs(np.trace(u.conj().T @ v)) / d)
    idx = np.asarray(keep)
    if idx.dtype == bool:
        idx = np.nonzero(idx)[0]
    sub = u[:, idx].conj().T @ v[:, idx]
    return float(abs(np.trace(sub)) / len(idx))


def low_occupation_mask(layout, n_cut: int) -> np.ndarray:
    """Basis mask keeping total motional occupation <= n_cut, the region
    where a truncated propagator is trustworthy."""
    dims = layout.dims
    kinds = [k for k, _ in layout.parts]
    grids = np.meshgrid(*[np.arange(d) for d in dims], indexing="ij")
    total = np.zeros(layout.dim, dtype=int)
    for kind, g in zip(kinds, grids):
        if kind == "boson":
            total += g.reshape(-1)
    return total <= n_cut
