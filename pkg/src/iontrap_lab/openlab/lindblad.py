"""Markovian master-equation propagation.

Two independent routes guard each other: the exact action of the
(sparse) Liouvillian exponential for time-independent generators, and
adaptive explicit integration of the vectorized equation, which also
covers time-dependent Hamiltonians.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import solve_ivp
from scipy.linalg import expm
from scipy.sparse import csr_matrix, identity, kron
from scipy.sparse.linalg import expm_multiply

from ..hilbert import DensityMatrix, HamiltonianProgram, HilbertLayout, QOperator, _mat_of

TRACE_TOL = 1e-9
NEG_EIG_TOL = -1e-6


@dataclass
class LindbladSpec:
    """Hamiltonian plus weighted collapse operators.

    hamiltonian may be a static matrix/QOperator or a HamiltonianProgram;
    collapse is a list of (operator, rate >= 0) pairs covering damping,
    pumping, number dephasing, and site dephasing alike.
    """

    hamiltonian: object
    collapse: list[tuple[object, float]]
    layout: HilbertLayout | None = None

    def __post_init__(self):
        if isinstance(self.hamiltonian, HamiltonianProgram):
            self.layout = self.hamiltonian.layout
        elif isinstance(self.hamiltonian, QOperator):
            self.layout = self.hamiltonian.layout
        elif self.layout is None:
            d = _mat_of(self.hamiltonian).shape[0]
            self.layout = HilbertLayout((("boson", d),)) if d > 2 else HilbertLayout((("spin", 2),))
        ops = []
        for op, rate in self.collapse:
            if rate < 0:
                raise ValueError("collapse rates must be >= 0")
            mat = _mat_of(op)
            if mat.shape != (self.dim, self.dim):
                raise ValueError("collapse operator does not match the layout dimension")
            ops.append((mat, float(rate)))
        self.collapse = ops

    @property
    def dim(self) -> int:
        if isinstance(self.hamiltonian, HamiltonianProgram):
            return self.hamiltonian.layout.dim
        return _mat_of(self.hamiltonian).shape[0]

    def h_static(self) -> np.ndarray | None:
        if isinstance(self.hamiltonian, HamiltonianProgram):
            if self.hamiltonian.is_static():
                return self.hamiltonian.static_value()
            return None
        return _mat_of(self.hamiltonian)

    def h_at(self, t: float) -> np.ndarray:
        if isinstance(self.hamiltonian, HamiltonianProgram):
            return self.hamiltonian.value(t)
        return _mat_of(self.hamiltonian)


@dataclass
class LindbladResult:
    times: np.ndarray
    states: list[DensityMatrix]
    traces: dict
    trace_drift: float
    min_eigenvalue: float
    method: str


def liouvillian_matrix(spec: LindbladSpec, sparse: bool = True):
    """Row-major-vec generator: vec(d rho/dt) = L vec(rho)."""
    h = spec.h_static()
    if h is None:
        raise ValueError("Liouvillian matrix needs a time-independent Hamiltonian")
    d = spec.dim
    eye = identity(d, format="csr", dtype=complex)
    hs = csr_matrix(h)
    lv = -1j * (kron(hs, eye) - kron(eye, hs.T))
    for c, rate in spec.collapse:
        if rate == 0:
            continue
        cs = csr_matrix(c)
        cdc = csr_matrix(c.conj().T @ c)
        lv = lv + rate * (
            kron(cs, cs.conj())
            - 0.5 * (kron(cdc, eye) + kron(eye, cdc.T))
        )
    return lv.tocsr() if sparse else lv.toarray()


def _dissipator_apply(spec: LindbladSpec, rho: np.ndarray) -> np.ndarray:
    out = np.zeros_like(rho)
    for c, rate in spec.collapse:
        if rate == 0:
            continue
        cdc = c.conj().T @ c
        out += rate * (c @ rho @ c.conj().T - 0.5 * (cdc @ rho + rho @ cdc))
    return out


def lindblad_evolve(
    spec: LindbladSpec,
    rho0: DensityMatrix | np.ndarray,
    t_grid: np.ndarray,
    observables: dict | None = None,
    method: str = "auto",
    rtol: float = 1e-8,
    atol: float = 1e-10,
    keep_states: bool = True,
) -> LindbladResult:
    """Propagate rho through the master equation on the given time grid.

    method 'krylov' applies the exact exponential of the sparse constant
    Liouvillian between grid points; 'rk' integrates the vectorized
    equation (only choice for time-dependent H); 'dense' exponentiates the
    dense Liouvillian once per step (small systems; cross-check).
    """
    t_grid = np.asarray(t_grid, dtype=float)
    rho = rho0.mat.copy() if isinstance(rho0, DensityMatrix) else np.array(rho0, dtype=complex)
    d = spec.dim
    static = spec.h_static() is not None
    if method == "auto":
        method = "krylov" if static else "rk"
    if method in ("krylov", "dense") and not static:
        raise ValueError("exponential routes need a time-independent Hamiltonian")

    states_raw = []
    if method == "krylov":
        lv = liouvillian_matrix(spec, sparse=True)
        v = rho.reshape(-1)
        states_raw.append(rho.copy())
        for k in range(1, len(t_grid)):
            dt = t_grid[k] - t_grid[k - 1]
            v = expm_multiply(lv * dt, v)
            states_raw.append(v.reshape(d, d).copy())
    elif method == "dense":
        lv = liouvillian_matrix(spec, sparse=False)
        states_raw.append(rho.copy())
        v = rho.reshape(-1)
        for k in range(1, len(t_grid)):
            dt = t_grid[k] - t_grid[k - 1]
            v = expm(lv * dt) @ v
            states_raw.append(v.reshape(d, d).copy())
    elif method == "rk":
        def rhs(t, y):
            r = y.reshape(d, d)
            dr = -1j * (spec.h_at(t) @ r - r @ spec.h_at(t)) + _dissipator_apply(spec, r)
            return dr.reshape(-1)

        sol = solve_ivp(
            rhs,
            (t_grid[0], t_grid[-1]),
            rho.reshape(-1),
            t_eval=t_grid,
            method="DOP853",
            rtol=rtol,
            atol=atol,
        )
        if not sol.success:
            raise RuntimeError(f"integration failed: {sol.message}")
        states_raw = [sol.y[:, k].reshape(d, d) for k in range(sol.y.shape[1])]
    else:
        raise ValueError(f"unknown method {method!r}")

    # hermitize at evaluation points; the generator preserves hermiticity
    # exactly, so this only strips rounding noise
    states_raw = [(r + r.conj().T) / 2 for r in states_raw]
    traces = {"trace": np.array([np.trace(r).real for r in states_raw])}
    if observables:
        for name, op in observables.items():
            mat = _mat_of(op)
            traces[name] = np.array([np.trace(mat @ r).real for r in states_raw])
    drift = float(np.abs(traces["trace"] - traces["trace"][0]).max())
    span = max(t_grid[-1] - t_grid[0], 1e-300)
    if drift > TRACE_TOL * max(1.0, span):
        raise RuntimeError(f"trace drifted by {drift:.2e}; step-size failure")
    w_min = float(np.linalg.eigvalsh(states_raw[-1]).min())
    if w_min < NEG_EIG_TOL:
        raise RuntimeError(f"negative eigenvalue {w_min:.2e}; step-size failure")
    states = (
        [DensityMatrix(r, spec.layout, validate=False) for r in states_raw]
        if keep_states
        else [DensityMatrix(states_raw[-1], spec.layout, validate=False)]
    )
    return LindbladResult(
        times=t_grid,
        states=states,
        traces=traces,
        trace_drift=drift,
        min_eigenvalue=w_min,
        method=method,
    )
