"""Classical single-ion trap physics.

Mathieu coefficients from trap voltages and geometry, Floquet
characteristic exponents and stability, driven trajectories, secular
frequencies, rf power dissipation, and the periodic-potential band
structure reached through the s = -4q mapping.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import eigh_tridiagonal, eigvalsh_tridiagonal
from scipy.optimize import brentq

STABILITY_IMAG_TOL = 1e-9
MULTIPLIER_TOL = 1e-6
EDGE_TOL = 1e-9
DIVERGENCE_FACTOR = 1e12


class FloquetError(RuntimeError):
    """Raised when the truncated mode recurrence cannot be solved."""

    def __init__(self, message, residual=None):
        super().__init__(message)
        self.residual = residual


class UnstableTrapError(RuntimeError):
    pass


@dataclass(frozen=True)
class TrapGeometry:
    """Electrode voltages and geometry factors of a linear rf trap.

    kappa_x/y/z are the dc geometric factors (alpha_i = kappa_i / z0^2),
    kappa_r the rf factor in (0, 1] (alpha'_x = -alpha'_y = kappa_r / r0^2,
    alpha'_z = 0).
    """

    v_dc: float
    v_rf: float
    omega_rf: float
    r0: float
    z0: float
    kappa_x: float
    kappa_y: float
    kappa_z: float
    kappa_r: float
    mass: float
    charge: float

    def __post_init__(self):
        for name in ("omega_rf", "r0", "z0", "mass", "charge"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be strictly positive")
        if not 0 < self.kappa_r <= 1:
            raise ValueError("kappa_r must lie in (0, 1]")
        # Laplace constraint on the dc tensor
        if abs(self.kappa_x + self.kappa_y + self.kappa_z) > 1e-9 * max(
            1.0, abs(self.kappa_z)
        ):
            raise ValueError("dc geometric factors must sum to zero (Laplace)")

    @classmethod
    def linear(cls, v_dc, v_rf, omega_rf, r0, z0, kappa_z, kappa_r, mass, charge):
        """Symmetric linear-trap preset: kappa_x = kappa_y = -kappa_z/2, kappa_z > 0."""
        if kappa_z <= 0:
            raise ValueError("kappa_z must be positive for axial dc confinement")
        return cls(
            v_dc=v_dc,
            v_rf=v_rf,
            omega_rf=omega_rf,
            r0=r0,
            z0=z0,
            kappa_x=-kappa_z / 2,
            kappa_y=-kappa_z / 2,
            kappa_z=kappa_z,
            kappa_r=kappa_r,
            mass=mass,
            charge=charge,
        )

    def alpha_dc(self, axis: str) -> float:
        kappa = {"x": self.kappa_x, "y": self.kappa_y, "z": self.kappa_z}[axis]
        return kappa / self.z0**2

    def alpha_rf(self, axis: str) -> float:
        if axis == "x":
            return self.kappa_r / self.r0**2
        if axis == "y":
            return -self.kappa_r / self.r0**2
        return 0.0


@dataclass(frozen=True)
class MathieuPoint:
    a: float
    q: float
    axis: str = "x"


@dataclass
class FloquetSolution:
    """Characteristic exponent and mode coefficients C_2n, C_0 = 1."""

    beta: complex
    coeffs: np.ndarray
    n_max: int
    stable: bool
    truncation_residual: float
    multiplier: float  # largest one-period multiplier magnitude
    band_index: int | None = None

    def coeff(self, n: int) -> complex:
        """C_{2n}, i.e. the weight of the harmonic at beta + 2n."""
        return self.coeffs[n + self.n_max]


@dataclass
class Trajectory:
    times: np.ndarray
    x: np.ndarray
    v: np.ndarray
    diverged: bool = False


@dataclass
class StabilityMap:
    a_values: np.ndarray
    q_values: np.ndarray
    stable: np.ndarray  # shape (len(a), len(q))
    mode: str


@dataclass
class BandStructure:
    s: float
    e_values: np.ndarray
    allowed: np.ndarray
    bands: list[tuple[float, float]]
    gaps: list[tuple[float, float]]


def mathieu_coefficients(trap: TrapGeometry, axis: str) -> MathieuPoint:
    """Dimensionless (a, q) for the requested principal axis."""
    if axis not in ("x", "y", "z"):
        raise ValueError("axis must be one of x, y, z")
    m, w = trap.mass, trap.omega_rf
    a = 4 * trap.charge * trap.v_dc * trap.alpha_dc(axis) / (m * w**2)
    q = 2 * trap.charge * trap.v_rf * trap.alpha_rf(axis) / (m * w**2)
    return MathieuPoint(a=a, q=q, axis=axis)


def _edge_eigenvalues(q: float, n_max: int, beta_frac: float) -> np.ndarray:
    """Eigenvalues a_k(beta) of the truncated three-term recurrence."""
    ns = np.arange(-n_max, n_max + 1)
    diag = (beta_frac + 2.0 * ns) ** 2
    off = -q * np.ones(2 * n_max)
    return eigvalsh_tridiagonal(diag, off)


def _band_of(a: float, q: float, n_max: int) -> tuple[int | None, float]:
    """Locate the stability band containing `a`, if any.

    Returns (band index k, distance to nearest edge). Band k connects the
    k-th sorted recurrence eigenvalue at beta = 0 to the one at beta = 1.
    """
    e0 = _edge_eigenvalues(q, n_max, 0.0)
    e1 = _edge_eigenvalues(q, n_max, 1.0)
    lo = np.minimum(e0, e1)
    hi = np.maximum(e0, e1)
    edge_dist = float(np.min(np.abs(np.concatenate([e0, e1]) - a)))
    inside = np.nonzero((lo < a) & (a < hi))[0]
    if len(inside) == 0:
        return None, edge_dist
    return int(inside[0]), edge_dist


def _monodromy(a: float, q: float, steps: int = 2000) -> np.ndarray:
    """One-period map of x'' + [a + 2q cos(2 xi)] x = 0 over xi in [0, pi]."""
    h = np.pi / steps

    def deriv(xi, y):
        x, v = y
        return np.array([v, -(a + 2 * q * np.cos(2 * xi)) * x])

    M = np.eye(2)
    y = M.copy()  # integrate both unit solutions at once (columns)
    xi = 0.0
    for _ in range(steps):
        k1 = np.column_stack([deriv(xi, y[:, 0]), deriv(xi, y[:, 1])])
        k2 = np.column_stack(
            [deriv(xi + h / 2, y[:, 0] + h / 2 * k1[:, 0]), deriv(xi + h / 2, y[:, 1] + h / 2 * k1[:, 1])]
        )
        k3 = np.column_stack(
            [deriv(xi + h / 2, y[:, 0] + h / 2 * k2[:, 0]), deriv(xi + h / 2, y[:, 1] + h / 2 * k2[:, 1])]
        )
        k4 = np.column_stack(
            [deriv(xi + h, y[:, 0] + h * k3[:, 0]), deriv(xi + h, y[:, 1] + h * k3[:, 1])]
        )
        y = y + h / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
        xi += h
    return y


def floquet_characteristic(a: float, q: float, n_max: int = 25) -> FloquetSolution:
    """Characteristic exponent beta and coefficients C_2n for one (a, q) point.

    beta is found by locating the stability band from the truncated
    recurrence eigenvalues and bisecting the dispersion relation inside
    it; the one-period multiplier is computed independently as a guard.
    """
    if n_max < 5:
        raise ValueError("n_max >= 5 required")
    q = float(q)
    a = float(a)

    M = _monodromy(a, q)
    mult = float(np.max(np.abs(np.linalg.eigvals(M))))
    half_trace = float(np.trace(M)) / 2.0

    band, edge_dist = _band_of(a, q, n_max)
    on_edge = edge_dist <= EDGE_TOL * max(1.0, abs(a))

    if band is None or on_edge:
        # unstable or exactly on a band edge: beta from the one-period map
        if half_trace > 1.0:
            beta = 1j * np.arccosh(min(half_trace, 1e300)) / np.pi
        elif half_trace < -1.0:
            beta = 1.0 + 1j * np.arccosh(-half_trace) / np.pi
        else:
            beta = complex(np.arccos(np.clip(half_trace, -1, 1)) / np.pi)
        coeffs = _coeffs_for_beta(a, q, complex(beta), n_max)
        residual = _tail_residual(coeffs, q, n_max)
        return FloquetSolution(
            beta=beta,
            coeffs=coeffs,
            n_max=n_max,
            stable=False,
            truncation_residual=residual,
            multiplier=mult,
            band_index=band,
        )

    def dispersion(beta_frac):
        return _edge_eigenvalues(q, n_max, beta_frac)[band] - a

    f0, f1 = dispersion(0.0), dispersion(1.0)
    if f0 == 0.0 or f1 == 0.0 or np.sign(f0) == np.sign(f1):
        raise FloquetError(
            f"dispersion relation has no sign change in band {band} at "
            f"(a={a}, q={q}); increase n_max",
            residual=edge_dist,
        )
    beta_frac = brentq(dispersion, 0.0, 1.0, xtol=1e-14, rtol=1e-15)
    # unfold the within-band parameter to the monotone exponent branch
    if band % 2 == 0:
        beta = band + beta_frac
    else:
        beta = (band + 1) - beta_frac

    # coefficients at the unfolded exponent, where C_0 is the dominant
    # harmonic and the C_0 = 1 normalization is well posed
    ns = np.arange(-n_max, n_max + 1)
    diag = (beta + 2.0 * ns) ** 2
    off = -q * np.ones(2 * n_max)
    evals, evecs = eigh_tridiagonal(diag, off, select="a")
    idx = int(np.argmin(np.abs(evals - a)))
    vec = evecs[:, idx]
    if abs(vec[n_max]) < 1e-12:
        raise FloquetError(
            f"C_0 vanishes at (a={a}, q={q}); normalization C_0 = 1 impossible",
            residual=abs(vec[n_max]),
        )
    coeffs = (vec / vec[n_max]).astype(complex)
    residual = _tail_residual(coeffs, q, n_max)
    if residual > 1e-3:
        raise FloquetError(
            f"mode recurrence truncated too early at n_max={n_max} "
            f"(tail residual {residual:.2e})",
            residual=residual,
        )

    stable = (
        abs(np.imag(beta)) < STABILITY_IMAG_TOL
        and mult < 1.0 + MULTIPLIER_TOL
        and not on_edge
    )
    return FloquetSolution(
        beta=beta,
        coeffs=coeffs,
        n_max=n_max,
        stable=bool(stable),
        truncation_residual=residual,
        multiplier=mult,
        band_index=band,
    )


def _tail_residual(coeffs: np.ndarray, q: float, n_max: int) -> float:
    # coupling the truncation dropped: q * C at the boundary rows
    return float(abs(q) * max(abs(coeffs[0]), abs(coeffs[-1])))


def _coeffs_for_beta(a: float, q: float, beta: complex, n_max: int) -> np.ndarray:
    """Inverse iteration for C_2n at fixed (possibly complex) beta."""
    ns = np.arange(-n_max, n_max + 1)
    dim = 2 * n_max + 1
    T = np.zeros((dim, dim), complex)
    T[np.arange(dim), np.arange(dim)] = (beta + 2.0 * ns) ** 2 - a
    T[np.arange(dim - 1), np.arange(1, dim)] = -q
    T[np.arange(1, dim), np.arange(dim - 1)] = -q
    T += 1e-12 * np.eye(dim)
    vec = np.ones(dim, complex)
    for _ in range(3):
        try:
            vec = np.linalg.solve(T, vec)
        except np.linalg.LinAlgError:
            break
        vec = vec / np.linalg.norm(vec)
    if abs(vec[n_max]) < 1e-12:
        return vec
    return vec / vec[n_max]


def integrate_trajectory(
    a: float,
    q: float,
    x0: float,
    v0: float,
    xi_span: tuple[float, float],
    step: float = 0.02,
) -> Trajectory:
    """Fixed-step RK4 solution of x'' + [a + 2q cos(2 xi)] x = 0.

    The step is halved until the endpoint moves by less than 1e-6
    (relative). Strongly unstable runs abort once |x| exceeds 1e12 times
    the initial amplitude and come back flagged as diverged.
    """
    xi0, xi1 = xi_span
    if xi1 <= xi0:
        raise ValueError("xi_span must be increasing")

    def run(h):
        n = max(2, int(np.ceil((xi1 - xi0) / h)))
        h = (xi1 - xi0) / n
        xi = xi0 + h * np.arange(n + 1)
        xs = np.empty(n + 1)
        vs = np.empty(n + 1)
        xs[0], vs[0] = x0, v0
        scale = max(abs(x0), abs(v0), 1e-30)
        x, v = float(x0), float(v0)
        for i in range(n):
            t = xi[i]

            def f(tt, xx, vv):
                return vv, -(a + 2 * q * np.cos(2 * tt)) * xx

            k1x, k1v = f(t, x, v)
            k2x, k2v = f(t + h / 2, x + h / 2 * k1x, v + h / 2 * k1v)
            k3x, k3v = f(t + h / 2, x + h / 2 * k2x, v + h / 2 * k2v)
            k4x, k4v = f(t + h, x + h * k3x, v + h * k3v)
            x = x + h / 6 * (k1x + 2 * k2x + 2 * k3x + k4x)
            v = v + h / 6 * (k1v + 2 * k2v + 2 * k3v + k4v)
            xs[i + 1], vs[i + 1] = x, v
            if abs(x) > DIVERGENCE_FACTOR * scale:
                return Trajectory(xi[: i + 2], xs[: i + 2], vs[: i + 2], diverged=True)
        return Trajectory(xi, xs, vs, diverged=False)

    traj = run(step)
    for _ in range(12):
        finer = run(step / 2)
        if traj.diverged or finer.diverged:
            return finer if finer.diverged else traj
        ref = max(abs(finer.x[-1]), abs(finer.v[-1]), 1e-12)
        if abs(finer.x[-1] - traj.x[-1]) <= 1e-6 * ref:
            return finer
        traj, step = finer, step / 2
    warnings.warn("trajectory endpoint did not converge under step halving")
    return traj


def lowest_order_trajectory(
    a: float, q: float, xi_grid: np.ndarray, beta: float | None = None
) -> Trajectory:
    """Secular cosine modulated by the leading micromotion factor.

    x(xi) = cos(beta xi) [1 - (q/2) cos(2 xi)] with the lowest-order
    secular frequency beta = sqrt(a + q^2/2) unless an exact exponent is
    supplied (the approximate frequency slips phase over many secular
    periods even where the modulation shape is accurate). Valid for
    |a|, q^2 << 1; a warning is issued beyond q = 0.4.
    """
    if q > 0.4:
        warnings.warn(f"lowest-order form degrades at q = {q} > 0.4", stacklevel=2)
    if beta is None:
        beta = np.sqrt(a + q**2 / 2)
    xi = np.asarray(xi_grid, dtype=float)
    # sign note: for x'' + [a + 2q cos(2 xi)] x = 0 the leading mode
    # coefficients C_{+-1} are +q/4, so the fast factor is 1 + (q/2) cos
    x = np.cos(beta * xi) * (1 + (q / 2) * np.cos(2 * xi))
    v = -beta * np.sin(beta * xi) * (1 + (q / 2) * np.cos(2 * xi)) - np.cos(
        beta * xi
    ) * q * np.sin(2 * xi)
    return Trajectory(xi, x, v, diverged=False)


def _stable_grid(a_values: np.ndarray, q_values: np.ndarray, n_max: int) -> np.ndarray:
    """Vectorized band classification: for each q the band edges are computed
    once and every a is tested against them."""
    out = np.zeros((len(a_values), len(q_values)), dtype=bool)
    for j, q in enumerate(q_values):
        e0 = _edge_eigenvalues(q, n_max, 0.0)
        e1 = _edge_eigenvalues(q, n_max, 1.0)
        lo = np.minimum(e0, e1)
        hi = np.maximum(e0, e1)
        inside = (a_values[:, None] > lo[None, :]) & (a_values[:, None] < hi[None, :])
        out[:, j] = inside.any(axis=1)
    return out


def stability_scan(
    a_range: tuple[float, float],
    q_range: tuple[float, float],
    grid: tuple[int, int],
    mode: str = "single_axis",
    n_max: int = 25,
) -> StabilityMap:
    """Boolean stability map over an (a, q) rectangle.

    mode 'single_axis' classifies the bare equation; 'linear_3d' requires
    simultaneous x (a, q), y (a, -q) and z (-2a, 0) confinement of the
    symmetric linear trap, which forces a < 0.
    """
    na, nq = grid
    if na < 2 or nq < 2:
        raise ValueError("grid must be at least 2x2")
    a_values = np.linspace(*a_range, na)
    q_values = np.linspace(*q_range, nq)
    stable = _stable_grid(a_values, q_values, n_max)
    if mode == "single_axis":
        pass
    elif mode == "linear_3d":
        stable_neg_q = _stable_grid(a_values, -q_values, n_max)
        # z motion sees (a_z, q_z) = (-2a, 0): stable iff -2a in an allowed
        # band, i.e. a < 0 away from the zero-width q = 0 edges
        stable_z = _stable_grid(-2.0 * a_values, np.array([0.0]), n_max)[:, 0]
        stable = stable & stable_neg_q & stable_z[:, None]
    else:
        raise ValueError("mode must be single_axis or linear_3d")
    return StabilityMap(a_values=a_values, q_values=q_values, stable=stable, mode=mode)


@dataclass
class SecularFrequency:
    omega: float            # exact beta * omega_rf / 2
    omega_lowest_order: float  # sqrt(a + q^2/2) * omega_rf / 2
    omega_pure_q: float     # q / (2 sqrt 2) * omega_rf
    beta: float
    q_dominated: bool


def secular_frequency(trap: TrapGeometry, axis: str = "x") -> SecularFrequency:
    """Secular frequency of the slow motion along `axis`, from the exact
    characteristic exponent, with the two standard approximations alongside."""
    pt = mathieu_coefficients(trap, axis)
    sol = floquet_characteristic(pt.a, pt.q)
    if not sol.stable:
        raise UnstableTrapError(
            f"(a={pt.a:.4g}, q={pt.q:.4g}) on axis {axis} is not stable"
        )
    beta = float(np.real(sol.beta))
    return SecularFrequency(
        omega=beta * trap.omega_rf / 2,
        omega_lowest_order=float(np.sqrt(pt.a + pt.q**2 / 2)) * trap.omega_rf / 2
        if pt.a + pt.q**2 / 2 > 0
        else float("nan"),
        omega_pure_q=abs(pt.q) / (2 * np.sqrt(2)) * trap.omega_rf,
        beta=beta,
        q_dominated=pt.q**2 > abs(pt.a) * 10,
    )


def power_dissipation(r_t: float, c_t: float, omega_rf: float, v_rf: float) -> float:
    """Dissipated rf power R C^2 w^2 V^2 / 2 in watts."""
    if r_t <= 0 or c_t <= 0 or omega_rf <= 0 or v_rf < 0:
        raise ValueError("positive inputs required (v_rf may be zero)")
    return 0.5 * r_t * c_t**2 * omega_rf**2 * v_rf**2


def lattice_band_structure(
    s: float, e_range: tuple[float, float], grid: int, n_max: int = 25
) -> BandStructure:
    """Allowed/forbidden energy intervals of the periodic lattice problem.

    Lattice depth s and scaled energy E map onto the driven-motion plane
    through q = -s/4 and a = E - s/2; a point is allowed exactly when the
    corresponding (a, q) is stable. Points on a band edge count as gap.
    """
    if s < 0:
        raise ValueError("lattice depth s must be >= 0")
    if grid < 2 or e_range[1] <= e_range[0]:
        raise ValueError("need an increasing energy range with >= 2 samples")
    e_values = np.linspace(*e_range, grid)
    q = -s / 4.0
    a_values = e_values - s / 2.0
    allowed = _stable_grid(a_values, np.array([q]), n_max)[:, 0]
    bands: list[tuple[float, float]] = []
    gaps: list[tuple[float, float]] = []
    i = 0
    while i < grid:
        j = i
        while j + 1 < grid and allowed[j + 1] == allowed[i]:
            j += 1
        seg = (float(e_values[i]), float(e_values[j]))
        (bands if allowed[i] else gaps).append(seg)
        i = j + 1
    return BandStructure(s=s, e_values=e_values, allowed=allowed, bands=bands, gaps=gaps)
