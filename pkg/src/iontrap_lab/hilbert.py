"""Dense operator algebra for composite spin-1/2 / truncated-boson systems.

Everything here is plain dense numpy; the intended scale is desk-sized
Hilbert spaces (total dimension up to a few thousand).
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
from scipy.linalg import expm

HERMITIAN_TOL = 1e-12
UNITARY_TOL = 1e-8

PAULI_X = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)
PAULI_Y = np.array([[0.0, -1.0j], [1.0j, 0.0]], dtype=complex)
PAULI_Z = np.array([[1.0, 0.0], [0.0, -1.0]], dtype=complex)
SIGMA_PLUS = np.array([[0.0, 1.0], [0.0, 0.0]], dtype=complex)   # |up><down|
SIGMA_MINUS = SIGMA_PLUS.conj().T
SPIN_UP = np.array([1.0, 0.0], dtype=complex)
SPIN_DOWN = np.array([0.0, 1.0], dtype=complex)


def sigma_phi(phi: float) -> np.ndarray:
    """Spin operator with rotation axis at angle phi in the equatorial plane:
    sigma_+ e^{i phi} + sigma_- e^{-i phi} = sigma_x cos(phi) - sigma_y sin(phi)."""
    return SIGMA_PLUS * np.exp(1j * phi) + SIGMA_MINUS * np.exp(-1j * phi)


def spin() -> tuple[str, int]:
    return ("spin", 2)


def boson(n_max: int) -> tuple[str, int]:
    if n_max < 2:
        raise ValueError("boson truncation needs n_max >= 2")
    return ("boson", int(n_max))


@dataclass(frozen=True)
class HilbertLayout:
    """Ordered subsystem list; each part is ('spin', 2) or ('boson', n_max)."""

    parts: tuple[tuple[str, int], ...]

    def __post_init__(self):
        object.__setattr__(self, "parts", tuple((str(k), int(d)) for k, d in self.parts))
        for kind, d in self.parts:
            if kind == "spin" and d != 2:
                raise ValueError("spin subsystem must have dimension 2")
            if kind == "boson" and d < 2:
                raise ValueError("boson truncation needs n_max >= 2")

    @property
    def dims(self) -> tuple[int, ...]:
        return tuple(d for _, d in self.parts)

    @property
    def dim(self) -> int:
        return int(np.prod(self.dims)) if self.parts else 1

    @property
    def n_parts(self) -> int:
        return len(self.parts)

    def spin_indices(self) -> list[int]:
        return [i for i, (k, _) in enumerate(self.parts) if k == "spin"]

    def boson_indices(self) -> list[int]:
        return [i for i, (k, _) in enumerate(self.parts) if k == "boson"]

    def describe(self) -> list[list]:
        return [[k, d] for k, d in self.parts]


class QOperator:
    """Dense complex matrix tied to a HilbertLayout."""

    __slots__ = ("mat", "layout")

    def __init__(self, mat, layout: HilbertLayout, hermitian: bool | None = None):
        mat = np.asarray(mat, dtype=complex)
        if mat.shape != (layout.dim, layout.dim):
            raise ValueError(f"matrix shape {mat.shape} does not match layout dim {layout.dim}")
        if hermitian:
            dev = np.abs(mat - mat.conj().T).max()
            if dev > HERMITIAN_TOL:
                raise ValueError(f"operator claimed hermitian but max deviation is {dev:.3e}")
        self.mat = mat
        self.layout = layout

    def dagger(self) -> "QOperator":
        return QOperator(self.mat.conj().T, self.layout)

    def is_hermitian(self, tol: float = HERMITIAN_TOL) -> bool:
        return bool(np.abs(self.mat - self.mat.conj().T).max() <= tol)

    def is_unitary(self, tol: float = UNITARY_TOL) -> bool:
        d = self.layout.dim
        return bool(np.abs(self.mat.conj().T @ self.mat - np.eye(d)).max() <= tol)

    def __add__(self, other):
        return QOperator(self.mat + _mat_of(other), self.layout)

    def __sub__(self, other):
        return QOperator(self.mat - _mat_of(other), self.layout)

    def __mul__(self, scalar):
        return QOperator(self.mat * scalar, self.layout)

    __rmul__ = __mul__

    def __matmul__(self, other):
        return QOperator(self.mat @ _mat_of(other), self.layout)

    def __neg__(self):
        return QOperator(-self.mat, self.layout)

    def save(self, path):
        """Debug dump: one JSON header line, then row-major complex128 bytes."""
        header = json.dumps({"dims": list(self.layout.dims), "layout": self.layout.describe()})
        with open(path, "wb") as fh:
            fh.write(header.encode() + b"\n")
            fh.write(np.ascontiguousarray(self.mat).tobytes())

    @classmethod
    def load(cls, path) -> "QOperator":
        with open(path, "rb") as fh:
            header = json.loads(fh.readline().decode())
            raw = fh.read()
        layout = HilbertLayout(tuple((k, d) for k, d in header["layout"]))
        d = layout.dim
        mat = np.frombuffer(raw, dtype=complex).reshape(d, d)
        return cls(mat.copy(), layout)


def _mat_of(x):
    return x.mat if isinstance(x, QOperator) else np.asarray(x, dtype=complex)


class DensityMatrix:
    """Trace-one hermitian PSD matrix on a layout (tolerances are numerical)."""

    __slots__ = ("mat", "layout")

    TRACE_TOL = 1e-9
    PSD_TOL = -1e-8

    def __init__(self, mat, layout: HilbertLayout, validate: bool = True):
        mat = np.asarray(mat, dtype=complex)
        if mat.shape != (layout.dim, layout.dim):
            raise ValueError("density matrix shape does not match layout")
        if validate:
            tr = np.trace(mat).real
            if abs(tr - 1.0) > self.TRACE_TOL:
                raise ValueError(f"trace {tr} is not 1 within {self.TRACE_TOL}")
            if np.abs(mat - mat.conj().T).max() > 1e-9:
                raise ValueError("density matrix is not hermitian")
            w = np.linalg.eigvalsh((mat + mat.conj().T) / 2)
            if w.min() < self.PSD_TOL:
                raise ValueError(f"negative eigenvalue {w.min():.3e}")
        self.mat = mat
        self.layout = layout

    def expect(self, op) -> complex:
        return complex(np.trace(_mat_of(op) @ self.mat))

    def purity(self) -> float:
        return float(np.trace(self.mat @ self.mat).real)

    def partial_trace(self, keep: Sequence[int]) -> "DensityMatrix":
        """Trace out every subsystem not listed in `keep` (indices into layout.parts)."""
        keep = sorted(keep)
        dims = self.layout.dims
        n = len(dims)
        rho = self.mat.reshape(dims + dims)
        drop = [i for i in range(n) if i not in keep]
        for k, ax in enumerate(sorted(drop)):
            a = ax - k  # earlier traces shifted the remaining axes left
            rho = np.trace(rho, axis1=a, axis2=a + rho.ndim // 2)
        new_layout = HilbertLayout(tuple(self.layout.parts[i] for i in keep))
        d = new_layout.dim
        return DensityMatrix(rho.reshape(d, d), new_layout, validate=False)


def pure_state(vec, layout: HilbertLayout) -> DensityMatrix:
    v = np.asarray(vec, dtype=complex)
    v = v / np.linalg.norm(v)
    return DensityMatrix(np.outer(v, v.conj()), layout, validate=False)


def kron_all(mats: Sequence[np.ndarray]) -> np.ndarray:
    out = np.array([[1.0 + 0j]])
    for m in mats:
        out = np.kron(out, m)
    return out


def kron_state(vecs: Sequence[np.ndarray]) -> np.ndarray:
    out = np.array([1.0 + 0j])
    for v in vecs:
        out = np.kron(out, np.asarray(v, dtype=complex))
    return out


def embed(op_local, subsystem_index: int, layout: HilbertLayout) -> QOperator:
    """identity x ... x op x ... x identity in layout order."""
    local = _mat_of(op_local)
    dims = layout.dims
    if not 0 <= subsystem_index < len(dims):
        raise ValueError("subsystem index out of range")
    if local.shape != (dims[subsystem_index], dims[subsystem_index]):
        raise ValueError(
            f"local operator dim {local.shape[0]} does not match subsystem "
            f"dim {dims[subsystem_index]}"
        )
    mats = [np.eye(d, dtype=complex) for d in dims]
    mats[subsystem_index] = local
    return QOperator(kron_all(mats), layout)


def ladder(n_max: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Truncated (a, a_dagger, n) on n_max Fock levels 0..n_max-1.

    [a, a_dagger] = 1 except in the top-corner element, the usual
    truncation artifact.
    """
    if n_max < 2:
        raise ValueError("n_max >= 2 required")
    a = np.diag(np.sqrt(np.arange(1, n_max, dtype=float)), k=1).astype(complex)
    adag = a.conj().T
    return a, adag, adag @ a


def displacement(alpha: complex, n_max: int, warn: bool = True) -> QOperator:
    """exp(alpha a^dag - alpha* a) on the truncated Fock space."""
    if warn and abs(alpha) ** 2 > n_max / 4:
        import warnings

        warnings.warn(
            f"|alpha|^2 = {abs(alpha)**2:.2f} exceeds n_max/4 = {n_max/4:.2f}; "
            "truncation may bite",
            stacklevel=2,
        )
    a, adag, _ = ladder(n_max)
    mat = expm(alpha * adag - np.conj(alpha) * a)
    return QOperator(mat, HilbertLayout((boson(n_max),)))


def coherent_state(alpha: complex, n_max: int) -> np.ndarray:
    n = np.arange(n_max)
    from scipy.special import gammaln

    logw = n * np.log(abs(alpha) + 1e-300) - 0.5 * gammaln(n + 1.0)
    vec = np.exp(logw - 0.5 * abs(alpha) ** 2) * np.exp(1j * n * np.angle(alpha))
    return vec / np.linalg.norm(vec)


def fock_state(n: int, n_max: int) -> np.ndarray:
    v = np.zeros(n_max, dtype=complex)
    v[n] = 1.0
    return v


def thermal_state(n_bar: float, n_max: int) -> DensityMatrix:
    """Boltzmann-diagonal motional state with mean occupation n_bar."""
    if n_bar < 0:
        raise ValueError("n_bar >= 0 required")
    if n_bar == 0:
        p = np.zeros(n_max)
        p[0] = 1.0
    else:
        r = n_bar / (n_bar + 1.0)
        tail = r**n_max
        if tail > 1e-6:
            need = int(np.ceil(np.log(1e-6) / np.log(r)))
            raise ValueError(
                f"thermal tail beyond n_max = {n_max} carries weight {tail:.2e}; "
                f"use n_max >= {need}"
            )
        p = (1 - r) * r ** np.arange(n_max)
        p = p / p.sum()
    return DensityMatrix(np.diag(p).astype(complex), HilbertLayout((boson(n_max),)))


def heisenberg_position(
    omega: float,
    t: float,
    n_max: int,
    mass: float | None = None,
    x0: float | None = None,
    floquet=None,
    omega_rf: float | None = None,
) -> QOperator:
    """Position operator at time t: x0 [a u*(t) + a_dag u(t)].

    Harmonic representation uses u(t) = e^{i omega t}. Passing a Floquet
    solution (with omega_rf) uses the driven-motion mode function
    u(t) = e^{i beta omega_rf t / 2} sum_n C_2n e^{i n omega_rf t} instead.
    """
    if x0 is None:
        if mass is None:
            x0 = 1.0
        else:
            from scipy.constants import hbar

            x0 = np.sqrt(hbar / (2 * mass * omega))
    if floquet is None:
        u = np.exp(1j * omega * t)
    else:
        if omega_rf is None:
            raise ValueError("floquet representation needs omega_rf")
        ns = np.arange(-floquet.n_max, floquet.n_max + 1)
        u = np.exp(1j * floquet.beta * omega_rf * t / 2) * np.sum(
            floquet.coeffs * np.exp(1j * ns * omega_rf * t)
        )
    a, adag, _ = ladder(n_max)
    mat = x0 * (a * np.conj(u) + adag * u)
    return QOperator(mat, HilbertLayout((boson(n_max),)))


class ProgramTerm:
    """One (operator, scalar envelope) pair; envelope None means static."""

    __slots__ = ("op", "op_sparse", "envelope", "label", "family")

    def __init__(self, op, envelope: Callable[[float], complex] | None, label: str = "", family: str = ""):
        self.op = _mat_of(op)
        self.envelope = envelope
        self.label = label
        self.family = family
        # drive terms are kroneckers of ladder/Pauli factors and extremely
        # sparse; matvec through CSR keeps long propagations affordable
        nnz = int(np.count_nonzero(self.op))
        if nnz < 0.05 * self.op.size and self.op.shape[0] > 16:
            from scipy.sparse import csr_matrix

            self.op_sparse = csr_matrix(self.op)
        else:
            self.op_sparse = None

    def coeff(self, t: float) -> complex:
        return 1.0 + 0j if self.envelope is None else self.envelope(t)


class HamiltonianProgram:
    """Time-dependent hermitian operator as sum of (static op, envelope) pairs.

    Non-hermitian operators must come with their conjugate partner (use
    add_pair) so that H(t) stays hermitian at every t.
    """

    def __init__(self, layout: HilbertLayout):
        self.layout = layout
        self.terms: list[ProgramTerm] = []
        self._stack = None

    def add(self, op, envelope=None, label: str = "", family: str = ""):
        self.terms.append(ProgramTerm(op, envelope, label, family))
        self._stack = None
        return self

    def add_pair(self, op, envelope: Callable[[float], complex], label: str = "", family: str = ""):
        """Add op * f(t) together with its hermitian partner op^dag * f(t)*."""
        self.add(op, envelope, label, family)
        conj_env = (lambda t, f=envelope: np.conj(f(t)))
        self.add(_mat_of(op).conj().T, conj_env, label + "_hc", family)
        return self

    def families(self) -> set[str]:
        return {t.family for t in self.terms}

    def _ensure_stack(self):
        if self._stack is None:
            d = self.layout.dim
            self._stack = np.stack([t.op for t in self.terms]) if self.terms else np.zeros((0, d, d), complex)

    def value(self, t: float) -> np.ndarray:
        self._ensure_stack()
        if not self.terms:
            return np.zeros((self.layout.dim, self.layout.dim), complex)
        coeffs = np.array([term.coeff(t) for term in self.terms])
        return np.tensordot(coeffs, self._stack, axes=1)

    def apply(self, t: float, psi: np.ndarray) -> np.ndarray:
        """H(t) @ psi without materializing H(t); used by tight inner loops."""
        out = np.zeros_like(psi)
        for term in self.terms:
            op = term.op_sparse if term.op_sparse is not None else term.op
            out += term.coeff(t) * (op @ psi)
        return out

    def static_value(self) -> np.ndarray:
        """Sum of the static (envelope-free) terms."""
        d = self.layout.dim
        out = np.zeros((d, d), complex)
        for term in self.terms:
            if term.envelope is None:
                out = out + term.op
        return out

    def is_static(self) -> bool:
        return all(term.envelope is None for term in self.terms)

    def hermitian_at(self, t: float, tol: float = 1e-10) -> bool:
        h = self.value(t)
        return bool(np.abs(h - h.conj().T).max() <= tol)
