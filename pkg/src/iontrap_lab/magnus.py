"""Closed-form analytics of the bichromatic spin-dependent force.

Displacement amplitudes, accumulated two-spin phases, the spin-spin
coupling matrix in both algebraic forms, the full second-order
commutator content (including the carrier cross terms), power-law fits,
effective spin / spin-boson Hamiltonians, and spectator-mode couplings.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .crystal import recoil_frequency
from .drive import SDFConfig, phase_convention
from .hilbert import (
    HamiltonianProgram,
    HilbertLayout,
    PAULI_X,
    PAULI_Y,
    PAULI_Z,
    QOperator,
    SIGMA_MINUS,
    SIGMA_PLUS,
    boson,
    embed,
    ladder,
    sigma_phi,
    spin,
)

RESONANCE_GAP = 1e-4


class ResonanceError(ValueError):
    """Beatnote sits on a motional mode; use the resonant-frame path."""


def _check_dispersive_poles(cfg: SDFConfig, modes=None):
    mu = cfg.tones.mu
    idx = range(cfg.n_modes) if modes is None else modes
    for m in idx:
        if abs(mu - cfg.omega_m[m]) < RESONANCE_GAP * abs(mu):
            raise ResonanceError(
                f"mu is within {RESONANCE_GAP:.0e} (relative) of mode {m}; "
                "the dispersive closed forms are invalid there, use the "
                "resonant frame instead"
            )


def regime_flags(cfg: SDFConfig) -> dict:
    """Dispersive-regime diagnostics: mu >> Omega and delta_m >> eta Omega."""
    mu = abs(cfg.tones.mu)
    om = cfg.tones.omega
    eta_om = np.abs(cfg.eta) * om[:, None]
    delta = np.abs(cfg.delta_m)
    mu_ratio = mu / om.max() if om.max() > 0 else np.inf
    sdf_ratio = float(np.min(delta[None, :] / np.maximum(eta_om, 1e-300)))
    return {
        "mu_over_omega": float(mu_ratio),
        "min_delta_over_eta_omega": sdf_ratio,
        "dispersive": bool(mu_ratio >= 9.99 and sdf_ratio >= 9.99),
    }


def displacement_amplitude(
    j: int, m: int, tau: float, cfg: SDFConfig, variant: str = "full"
) -> complex:
    """Phase-space displacement of mode m driven through ion j at time tau.

    'full' keeps the counter-rotating contribution; 'rwa' is the
    slow-loop form that closes exactly at multiples of 2 pi / delta_m.
    """
    _check_dispersive_poles(cfg, modes=[m])
    _, psi = phase_convention(cfg.tones)
    eta = cfg.eta[j, m]
    om_j = cfg.tones.omega[j]
    mu = cfg.tones.mu
    w = cfg.omega_m[m]
    p = psi[j]
    if variant == "rwa":
        delta = mu - w
        return -(eta * om_j * np.exp(1j * p) / (2 * delta)) * (1 - np.exp(-1j * delta * tau))
    if variant != "full":
        raise ValueError("variant must be 'full' or 'rwa'")
    pref = -1j * eta * om_j / (mu**2 - w**2)
    return pref * (
        np.exp(1j * w * tau) * (mu * np.sin(mu * tau - p) + 1j * w * np.cos(mu * tau - p))
        + mu * np.sin(p)
        - 1j * w * np.cos(p)
    )


def geometric_phase(j: int, k: int, tau: float, cfg: SDFConfig) -> float:
    """Accumulated two-spin phase chi_jk(tau) of the slow-loop drive."""
    _, psi = phase_convention(cfg.tones)
    om = cfg.tones.omega
    delta = cfg.delta_m
    if np.any(delta == 0):
        raise ResonanceError("delta_m = 0: no accumulated-phase closed form")
    dpsi = psi[j] - psi[k]
    total = 0.0
    for m in range(cfg.n_modes):
        d = delta[m]
        total += (
            cfg.eta[j, m]
            * cfg.eta[k, m]
            / d
            * (tau * np.cos(dpsi) - (np.sin(d * tau - dpsi) + np.sin(dpsi)) / d)
        )
    return float(om[j] * om[k] / 2 * total)


def jij_matrix(cfg: SDFConfig, exclude_modes: tuple[int, ...] = ()) -> np.ndarray:
    """Spin-spin coupling matrix of the dispersive drive (rad/s).

    Computed from the sideband-coupling form; when the configuration
    carries mode-participation data the independent recoil form is
    evaluated too and both must agree to 1e-12, which pins down the
    frequency bookkeeping.
    """
    _check_dispersive_poles(cfg)
    flags = regime_flags(cfg)
    if not flags["dispersive"]:
        warnings.warn(
            "outside the dispersive regime "
            f"(mu/Omega = {flags['mu_over_omega']:.2f}, "
            f"min delta/(eta Omega) = {flags['min_delta_over_eta_omega']:.2f}); "
            "the coupling matrix is only a leading-order statement",
            stacklevel=2,
        )
    n = cfg.n_ions
    mu = cfg.tones.mu
    _, psi = phase_convention(cfg.tones)
    om = cfg.tones.omega
    keep = [m for m in range(cfg.n_modes) if m not in set(exclude_modes)]
    j_mat = np.zeros((n, n))
    for a in range(n):
        for bidx in range(n):
            if a == bidx:
                continue
            s = 0.0
            for m in keep:
                s += (
                    cfg.eta[a, m]
                    * cfg.eta[bidx, m]
                    * cfg.omega_m[m]
                    / (mu**2 - cfg.omega_m[m] ** 2)
                )
            j_mat[a, bidx] = om[a] * om[bidx] * s * np.cos(psi[a] - psi[bidx])
    if cfg.b is not None and cfg.k_l is not None and cfg.mass is not None:
        w_rec = recoil_frequency(cfg.k_l, cfg.mass)
        alt = np.zeros((n, n))
        for a in range(n):
            for bidx in range(n):
                if a == bidx:
                    continue
                s = 0.0
                for m in keep:
                    s += cfg.b[a, m] * cfg.b[bidx, m] / (mu**2 - cfg.omega_m[m] ** 2)
                alt[a, bidx] = (
                    om[a] * om[bidx] * w_rec * s * np.cos(psi[a] - psi[bidx])
                )
        scale = max(np.abs(j_mat).max(), 1e-300)
        if np.abs(alt - j_mat).max() > 1e-12 * scale:
            raise AssertionError(
                "sideband-coupling and recoil forms of the spin-spin matrix "
                f"disagree by {np.abs(alt - j_mat).max() / scale:.2e} (relative); "
                "eta / b / k_l / mass bookkeeping is inconsistent"
            )
    return j_mat


def cross_mode_coupling(cfg: SDFConfig, mode_subset: tuple[int, ...]) -> np.ndarray:
    """Residual spin-spin coupling through the modes left out of the
    resonant frame."""
    return jij_matrix(cfg, exclude_modes=tuple(mode_subset))


@dataclass
class SecondOrderTerms:
    """Second-order commutator content of the full drive at time tau."""

    chi_full: np.ndarray      # symmetric (N, N); linear + bounded parts
    chi_linear: np.ndarray    # J * tau
    chi_bounded: np.ndarray   # chi_full - chi_linear
    x1: np.ndarray            # carrier cross-term amplitudes, (N, M)
    x2: np.ndarray
    max_carrier_cross: float


def _full_ss_pair(cfg: SDFConfig, tau: float, a: int, k: int) -> float:
    """Ordered-pair kernel of the full second-order spin-spin exponent."""
    mu = cfg.tones.mu
    _, psi = phase_convention(cfg.tones)
    om = cfg.tones.omega
    pj, pk = psi[a], psi[k]
    total = 0.0
    for m in range(cfg.n_modes):
        w = cfg.omega_m[m]
        pref = cfg.eta[a, m] * cfg.eta[k, m] * om[a] * om[k] / (mu**2 - w**2)
        bracket = (
            np.cos(pj - pk) * w * tau
            + w
            * ((5 * mu**2 - w**2) * np.cos(pj) * np.sin(pk) - (3 * mu**2 + w**2) * np.sin(pj) * np.cos(pk))
            / (2 * mu * (mu - w) * (mu + w))
            + w
            * np.cos(pk)
            * (
                np.sin(2 * mu * tau - pj) / (2 * mu)
                - np.sin((mu - w) * tau - pj) / (mu - w)
                - np.sin((mu + w) * tau - pj) / (mu + w)
            )
            + np.sin(pk)
            * (
                -w * np.cos(2 * mu * tau - pj) / (2 * mu)
                - mu * np.cos((mu - w) * tau - pj) / (mu - w)
                + mu * np.cos((mu + w) * tau - pj) / (mu + w)
            )
        )
        total += pref * bracket
    return total


def _carrier_cross_amplitudes(cfg: SDFConfig, tau: float) -> tuple[np.ndarray, np.ndarray]:
    """Closed-form amplitudes of the carrier x spin-motion cross terms."""
    mu = cfg.tones.mu
    _, psi = phase_convention(cfg.tones)
    om = cfg.tones.omega
    x1 = np.zeros((cfg.n_ions, cfg.n_modes), complex)
    x2 = np.zeros((cfg.n_ions, cfg.n_modes), complex)
    for a in range(cfg.n_ions):
        p = psi[a]
        for m in range(cfg.n_modes):
            w = cfg.omega_m[m]
            d = mu - w
            denom = 2 * d * mu * (mu + w) * (mu + d) * (2 * mu + w)
            ew = np.exp(1j * w * tau)
            common = 1j * w * (2 * mu**2 + w**2) * np.sin(2 * p)
            x1[a, m] = (
                -cfg.eta[a, m]
                * om[a] ** 2
                / denom
                * (
                    4 * mu**3
                    - mu * w**2
                    - 3 * mu * w**2 * np.cos(2 * p)
                    + np.conj(ew)
                    * (
                        3 * mu * w**2 * np.cos(2 * mu * tau - 2 * p)
                        + 1j * w * (2 * mu**2 + w**2) * np.sin(2 * mu * tau - 2 * p)
                        - (4 * mu**2 - w**2)
                        * (
                            mu
                            + 2j * ew * w * np.cos(p) * np.sin(mu * tau - p)
                            + 2j * w * np.cos(mu * tau - p) * np.sin(p)
                            - 2 * mu * np.sin(mu * tau - p) * np.sin(p)
                            + 2 * ew * mu * np.sin(mu * tau - p) * np.sin(p)
                        )
                    )
                    + common
                )
            )
            x2[a, m] = (
                cfg.eta[a, m]
                * om[a] ** 2
                / denom
                * (
                    mu * (w**2 - 4 * mu**2)
                    - 3 * ew * mu * w**2 * np.cos(2 * mu * tau - 2 * p)
                    + 3 * mu * w**2 * np.cos(2 * p)
                    + 1j * ew * w * (2 * mu**2 + w**2) * np.sin(2 * mu * tau - 2 * p)
                    - (4 * mu**2 - w**2)
                    * (
                        2j * w * np.cos(p) * np.sin(mu * tau - p)
                        + 2j * ew * w * np.cos(mu * tau - p) * np.sin(p)
                        + mu
                        * (
                            2 * ew * np.sin(mu * tau - p) * np.sin(p)
                            - 2 * np.sin(mu * tau - p) * np.sin(p)
                            - ew
                        )
                    )
                    + common
                )
            )
    return x1, x2


def second_order_terms(tau: float, cfg: SDFConfig) -> SecondOrderTerms:
    """Everything the second-order exponent of the full drive contains:
    the linear spin-spin growth, the time-bounded remainder, and the
    carrier cross-term amplitudes that the dispersive regime discards."""
    _check_dispersive_poles(cfg)
    n = cfg.n_ions
    chi_full = np.zeros((n, n))
    for a in range(n):
        for k in range(n):
            chi_full[a, k] = _full_ss_pair(cfg, tau, a, k)
    chi_full = (chi_full + chi_full.T) / 2
    # linear growth including the diagonal self terms (a pure global phase)
    mu = cfg.tones.mu
    _, psi = phase_convention(cfg.tones)
    om = cfg.tones.omega
    lin = np.zeros((n, n))
    for a in range(n):
        for k in range(n):
            s = np.sum(
                cfg.eta[a, :] * cfg.eta[k, :] * cfg.omega_m / (mu**2 - cfg.omega_m**2)
            )
            lin[a, k] = om[a] * om[k] * s * np.cos(psi[a] - psi[k])
    chi_linear = lin * tau
    x1, x2 = _carrier_cross_amplitudes(cfg, tau)
    max_cross = float(max(np.abs(x1).max(), np.abs(x2).max()))
    mu = abs(cfg.tones.mu)
    eta_om2 = float((np.abs(cfg.eta) * cfg.tones.omega[:, None] ** 2).max())
    delta_min = float(np.abs(cfg.delta_m).min())
    bound = eta_om2 * mu**3 / (delta_min * mu**4) * 8
    if max_cross > bound:
        warnings.warn(
            f"carrier cross terms ({max_cross:.3e}) exceed the dispersive "
            f"estimate {bound:.3e}; the two-spin reduction is unreliable",
            stacklevel=2,
        )
    return SecondOrderTerms(
        chi_full=chi_full,
        chi_linear=chi_linear,
        chi_bounded=chi_full - chi_linear,
        x1=x1,
        x2=x2,
        max_carrier_cross=max_cross,
    )


def powerlaw_fit(j_mat: np.ndarray) -> tuple[float, float, float]:
    """Fit |J_jk| (averaged per ion separation) to J0 / |j-k|^p.

    Returns (J0, p, rms of log residuals). Separations whose average
    coupling vanishes are excluded with a warning.
    """
    n = j_mat.shape[0]
    if n < 4:
        raise ValueError("power-law fit needs at least 4 ions")
    dists, means = [], []
    for d in range(1, n):
        vals = [abs(j_mat[i, i + d]) for i in range(n - d)]
        mean = float(np.mean(vals))
        if mean == 0.0:
            warnings.warn(f"couplings at separation {d} vanish; excluded from fit", stacklevel=2)
            continue
        dists.append(d)
        means.append(mean)
    if len(dists) < 2:
        raise ValueError("not enough separations with nonzero coupling")
    x = np.log(np.asarray(dists, dtype=float))
    y = np.log(np.asarray(means))
    coeffs, residuals, *_ = np.polyfit(x, y, 1, full=True)
    slope, intercept = coeffs
    fit = np.polyval(coeffs, x)
    rms = float(np.sqrt(np.mean((y - fit) ** 2)))
    return float(np.exp(intercept)), float(-slope), rms


@dataclass
class MagnusReport:
    alpha: np.ndarray          # (N, M) displacement amplitudes at tau
    chi: np.ndarray            # (N, N) accumulated two-spin phases at tau
    j_matrix: np.ndarray       # (N, N) coupling matrix (rad/s)
    regime: dict
    max_carrier_cross: float
    max_bounded_residual: float


def magnus_report(tau: float, cfg: SDFConfig, variant: str = "full") -> MagnusReport:
    """One-stop summary of the drive analytics at time tau."""
    n, m = cfg.n_ions, cfg.n_modes
    alpha = np.array(
        [[displacement_amplitude(a, b, tau, cfg, variant) for b in range(m)] for a in range(n)]
    )
    chi = np.zeros((n, n))
    for a in range(n):
        for b in range(n):
            if a != b:
                chi[a, b] = geometric_phase(a, b, tau, cfg)
    # only the symmetric part acts on the commuting spin pair product
    chi = (chi + chi.T) / 2
    terms = second_order_terms(tau, cfg)
    return MagnusReport(
        alpha=alpha,
        chi=chi,
        j_matrix=jij_matrix(cfg),
        regime=regime_flags(cfg),
        max_carrier_cross=terms.max_carrier_cross,
        max_bounded_residual=float(np.abs(terms.chi_bounded).max()),
    )


def effective_hamiltonian(
    kind: str,
    cfg: SDFConfig | None = None,
    j_mat: np.ndarray | None = None,
    delta: float = 0.0,
    phi_s: np.ndarray | None = None,
) -> QOperator:
    """Closed effective Hamiltonians the dispersive drive realizes.

    kinds: 'ising', 'transverse_ising', 'exchange', 'xy' on the spin
    register; 'spin_boson' on spins plus the designated modes.
    """
    if kind == "spin_boson":
        if cfg is None:
            raise ValueError("spin_boson needs the drive configuration")
        modes = tuple(cfg.designated_modes) or tuple(range(cfg.n_modes))
        parts = [spin()] * cfg.n_ions + [boson(cfg.n_max)] * len(modes)
        layout = HilbertLayout(tuple(parts))
        phis, psi = phase_convention(cfg.tones)
        h = np.zeros((layout.dim, layout.dim), complex)
        a_local, _, n_local = ladder(cfg.n_max)
        for qi, m in enumerate(modes):
            a_m = embed(a_local, cfg.n_ions + qi, layout).mat
            n_m = embed(n_local, cfg.n_ions + qi, layout).mat
            h -= (cfg.tones.mu - cfg.omega_m[m]) * n_m
            for ion in range(cfg.n_ions):
                s = embed(sigma_phi(phis[ion]), ion, layout).mat
                amp = cfg.eta[ion, m] * cfg.tones.omega[ion] / 2
                h += amp * s @ (a_m * np.exp(-1j * psi[ion]) + a_m.conj().T * np.exp(1j * psi[ion]))
        return QOperator(h, layout, hermitian=True)

    if j_mat is None:
        if cfg is None:
            raise ValueError("need a coupling matrix or a drive configuration")
        j_mat = jij_matrix(cfg)
    n = j_mat.shape[0]
    layout = HilbertLayout(tuple([spin()] * n))
    if phi_s is None:
        if cfg is not None:
            phi_s, _ = phase_convention(cfg.tones)
        else:
            phi_s = np.zeros(n)
    h = np.zeros((layout.dim, layout.dim), complex)
    if kind in ("ising", "transverse_ising"):
        for a in range(n):
            for b in range(a + 1, n):
                sa = embed(sigma_phi(phi_s[a]), a, layout).mat
                sb = embed(sigma_phi(phi_s[b]), b, layout).mat
                h += j_mat[a, b] * sa @ sb
        if kind == "transverse_ising":
            for a in range(n):
                h += delta / 2 * embed(PAULI_Z, a, layout).mat
        return QOperator(h, layout, hermitian=True)
    if kind in ("exchange", "xy"):
        if delta / 2 <= np.abs(j_mat).max():
            warnings.warn(
                "excitation-conserving reduction assumes a transverse field "
                "dominating every coupling (delta/2 > max J); flagged invalid",
                stacklevel=2,
            )
        for a in range(n):
            for b in range(a + 1, n):
                if kind == "exchange":
                    pa = embed(SIGMA_PLUS, a, layout).mat
                    ma = embed(SIGMA_MINUS, a, layout).mat
                    pb = embed(SIGMA_PLUS, b, layout).mat
                    mb = embed(SIGMA_MINUS, b, layout).mat
                    h += j_mat[a, b] * (pa @ mb + ma @ pb)
                else:
                    xa = embed(PAULI_X, a, layout).mat
                    xb = embed(PAULI_X, b, layout).mat
                    ya = embed(PAULI_Y, a, layout).mat
                    yb = embed(PAULI_Y, b, layout).mat
                    h += j_mat[a, b] / 2 * (xa @ xb + ya @ yb)
        return QOperator(h, layout, hermitian=True)
    raise ValueError(f"unknown effective Hamiltonian kind {kind!r}")
