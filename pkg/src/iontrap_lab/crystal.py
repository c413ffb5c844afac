"""Linear ion-crystal statics and normal modes.

Equilibrium positions in Coulomb-scaled units, axial/radial mode
matrices and their shared eigenvectors, the zig-zag aspect-ratio limit,
the sinusoid eigenvector approximation for quasi-uniform chains, and
sideband coupling (Lamb-Dicke) parameters.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
from scipy.constants import epsilon_0, hbar, pi


class ZigZagError(RuntimeError):
    """Radial spectrum turned non-positive: the linear chain is unstable."""

    def __init__(self, message, beta_c):
        super().__init__(message)
        self.beta_c = beta_c


@dataclass(frozen=True)
class IonChain:
    """n identical ions in a linear trap with axial COM frequency omega_z and
    radial-to-axial aspect ratio beta = omega_z / omega_x."""

    n_ions: int
    mass: float
    omega_z: float
    aspect_beta: float
    charge: float

    def __post_init__(self):
        if self.n_ions < 1:
            raise ValueError("n_ions >= 1")
        if min(self.mass, self.omega_z, self.charge) <= 0:
            raise ValueError("mass, omega_z, charge must be positive")
        if not 0 < self.aspect_beta < 1:
            raise ValueError("aspect_beta must lie in (0, 1) for a linear chain")
        if self.n_ions >= 3:
            bc = critical_aspect_ratio(self.n_ions)
            if self.aspect_beta >= bc:
                warnings.warn(
                    f"aspect ratio {self.aspect_beta:.4f} >= zig-zag threshold "
                    f"{bc:.4f} for N = {self.n_ions}; linear-chain results invalid",
                    stacklevel=2,
                )


@dataclass
class ModeSpectrum:
    u_eq: np.ndarray        # dimensionless equilibrium positions
    b: np.ndarray           # eigenvector matrix, columns = modes
    gamma_z: np.ndarray     # axial eigenvalues, ascending, gamma_z[0] = 1
    gamma_x: np.ndarray     # radial eigenvalues, same mode order
    omega_zm: np.ndarray
    omega_xm: np.ndarray
    beta: float
    omega_z: float
    mass: float

    @property
    def n_ions(self) -> int:
        return len(self.u_eq)


@dataclass
class LambDickeSet:
    eta: np.ndarray   # (ion, mode)
    xi0: np.ndarray   # ground-state spread per mode (m)
    k_l: float
    omega_m: np.ndarray


def length_scale(mass: float, omega_z: float, charge: float) -> float:
    """Coulomb length (q^2 / (4 pi eps0 m w_z^2))^(1/3) in meters."""
    if min(mass, omega_z, charge) <= 0:
        raise ValueError("positive inputs required")
    return (charge**2 / (4 * pi * epsilon_0 * mass * omega_z**2)) ** (1.0 / 3.0)


def _equilibrium_residual(u: np.ndarray) -> np.ndarray:
    n = len(u)
    f = np.empty(n)
    for i in range(n):
        f[i] = u[i] - np.sum(1.0 / (u[i] - u[:i]) ** 2) + np.sum(
            1.0 / (u[i] - u[i + 1 :]) ** 2
        )
    return f


def _axial_matrix_from_positions(u: np.ndarray) -> np.ndarray:
    n = len(u)
    du = u[:, None] - u[None, :]
    np.fill_diagonal(du, 1.0)
    inv3 = 1.0 / np.abs(du) ** 3
    np.fill_diagonal(inv3, 0.0)
    a = -2.0 * inv3
    np.fill_diagonal(a, 1.0 + 2.0 * inv3.sum(axis=1))
    return a


def equilibrium_positions(n_ions: int, tol: float = 1e-13, max_iter: int = 200) -> np.ndarray:
    """Scaled equilibrium positions of the linear chain, sorted ascending.

    Damped Newton on the force balance; the Jacobian is the axial mode
    matrix, which is positive definite, so the iteration is well posed.
    """
    if n_ions < 1:
        raise ValueError("n_ions >= 1")
    if n_ions == 1:
        return np.zeros(1)
    idx = np.arange(1, n_ions + 1)
    u = (idx - (n_ions + 1) / 2) * (2.018 / n_ions**0.559)
    f = _equilibrium_residual(u)
    for _ in range(max_iter):
        if np.abs(f).max() < tol:
            break
        jac = _axial_matrix_from_positions(u)
        step = np.linalg.solve(jac, f)
        lam = 1.0
        base = np.abs(f).max()
        improved = False
        while lam > 1e-6:
            trial = u - lam * step
            if np.all(np.diff(trial) > 0):
                f_trial = _equilibrium_residual(trial)
                if np.abs(f_trial).max() < base:
                    u, f = trial, f_trial
                    improved = True
                    break
            lam /= 2
        if not improved:
            if base < 1e-12:
                break  # stalled at rounding level, already good enough
            # fall back to a plain gradient step on the potential
            u = u - 1e-3 * f
            f = _equilibrium_residual(u)
    else:
        if np.abs(f).max() >= 1e-12:
            raise RuntimeError(
                f"equilibrium solver did not converge for N = {n_ions}; "
                f"max residual {np.abs(f).max():.3e}"
            )
    u = u - u.mean()  # center; the force balance already implies sum = 0
    if np.abs(f).max() > 1e-12:
        raise RuntimeError(f"equilibrium residual {np.abs(f).max():.3e} above 1e-12")
    return u


def mode_matrices(u_eq: np.ndarray, beta: float) -> tuple[np.ndarray, np.ndarray]:
    """Axial and radial Hessians (A, B) of the scaled potential.

    B is built from its own formula, not from A; the linear relation
    between the two is left to the caller as an invariant check.
    """
    u = np.asarray(u_eq, dtype=float)
    n = len(u)
    if n > 1:
        gaps = np.abs(u[:, None] - u[None, :])[~np.eye(n, dtype=bool)]
        if gaps.min() < 1e-12:
            raise ValueError("coincident ion positions")
    a = _axial_matrix_from_positions(u)
    du = u[:, None] - u[None, :]
    np.fill_diagonal(du, 1.0)
    inv3 = 1.0 / np.abs(du) ** 3
    np.fill_diagonal(inv3, 0.0)
    b = inv3.copy()
    np.fill_diagonal(b, 1.0 / beta - inv3.sum(axis=1))
    return a, b


def _fix_eigenvector_signs(vecs: np.ndarray) -> np.ndarray:
    out = vecs.copy()
    for m in range(out.shape[1]):
        col = out[:, m]
        nz = np.nonzero(np.abs(col) > 1e-12)[0]
        if len(nz) and col[nz[0]] < 0:
            out[:, m] = -col
    return out


def normal_modes(chain: IonChain) -> ModeSpectrum:
    """Axial and radial collective-mode spectrum of the chain.

    Both families share one eigenvector matrix; the radial eigenvalues
    follow from the axial ones through the fixed linear relation, so the
    radial frequencies come out sorted descending when the axial ones are
    ascending.
    """
    u = equilibrium_positions(chain.n_ions)
    a, _ = mode_matrices(u, chain.aspect_beta)
    gamma_z, vecs = np.linalg.eigh(a)
    order = np.argsort(gamma_z)
    gamma_z = gamma_z[order]
    vecs = _fix_eigenvector_signs(vecs[:, order])
    gamma_x = (0.5 + 1.0 / chain.aspect_beta) - gamma_z / 2.0
    if gamma_x.min() <= 0:
        bc = critical_aspect_ratio(chain.n_ions)
        raise ZigZagError(
            f"radial eigenvalue {gamma_x.min():.4g} <= 0: zig-zag transition "
            f"(aspect_beta must be below {bc:.4f} for N = {chain.n_ions})",
            beta_c=bc,
        )
    return ModeSpectrum(
        u_eq=u,
        b=vecs,
        gamma_z=gamma_z,
        gamma_x=gamma_x,
        omega_zm=np.sqrt(gamma_z) * chain.omega_z,
        omega_xm=np.sqrt(gamma_x) * chain.omega_z,
        beta=chain.aspect_beta,
        omega_z=chain.omega_z,
        mass=chain.mass,
    )


def critical_aspect_ratio(n_ions: int) -> float:
    """Aspect ratio beta at which the softest radial mode hits zero."""
    if n_ions < 3:
        raise ValueError("n_ions >= 3")
    u = equilibrium_positions(n_ions)
    a = _axial_matrix_from_positions(u)
    gamma_z_max = float(np.linalg.eigvalsh(a).max())
    return 2.0 / (gamma_z_max - 1.0)


def approx_radial_eigenvectors(n_ions: int) -> np.ndarray:
    """Sinusoid-envelope eigenvector approximation for quasi-uniform chains."""
    if n_ions < 2:
        raise ValueError("n_ions >= 2")
    i = np.arange(1, n_ions + 1)[:, None]
    m = np.arange(1, n_ions + 1)[None, :]
    amp = np.sqrt((2.0 - (m == 1)) / n_ions)
    return amp * np.cos((2 * i - 1) * (m - 1) * np.pi / (2 * n_ions))


def uniform_chain_surrogate(n_ions: int, diagonal: float = 1.0) -> np.ndarray:
    """Idealized axial matrix of an equally spaced chain: constant diagonal,
    -2/|i-j|^3 off-diagonals. Stands in for the anharmonic-axial regime the
    sinusoid approximation addresses; no generating potential is modeled."""
    i = np.arange(n_ions)
    d = np.abs(i[:, None] - i[None, :]).astype(float)
    np.fill_diagonal(d, 1.0)
    a = -2.0 / d**3
    np.fill_diagonal(a, diagonal)
    return a


def lamb_dicke_params(
    spectrum: ModeSpectrum,
    k_l: float,
    mass: float | None = None,
    family: str = "radial",
) -> LambDickeSet:
    """eta[j, m] = b[j, m] * sqrt(hbar / (2 m omega_m)) * k_l per mode family."""
    if k_l <= 0:
        raise ValueError("k_l must be positive")
    m_ion = spectrum.mass if mass is None else mass
    omega_m = {"radial": spectrum.omega_xm, "axial": spectrum.omega_zm}[family]
    xi0 = np.sqrt(hbar / (2 * m_ion * omega_m))
    return LambDickeSet(
        eta=spectrum.b * xi0[None, :] * k_l,
        xi0=xi0,
        k_l=k_l,
        omega_m=omega_m.copy(),
    )


def recoil_frequency(k_l: float, mass: float) -> float:
    """Photon recoil angular frequency hbar k^2 / (2 m)."""
    return hbar * k_l**2 / (2 * mass)


def single_ion_eta(k_l: float, mass: float, omega: float) -> float:
    """Lamb-Dicke parameter of one ion on one mode: k * x0 = sqrt(w_rec / w)."""
    return k_l * np.sqrt(hbar / (2 * mass * omega))
