"""Laser-ion interaction builders.

Phase conventions of the bichromatic drive, carrier rotations,
micromotion coupling weights, photon-scattering suppression, the
spin-dependent-force Hamiltonian in its ordinary / shifted / resonant
frames, and the light-shift (z-basis) force.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np
from scipy.special import jv

from .hilbert import (
    HamiltonianProgram,
    HilbertLayout,
    PAULI_Z,
    QOperator,
    boson,
    embed,
    kron_all,
    ladder,
    sigma_phi,
    spin,
)


@dataclass
class ToneSet:
    """Bichromatic tone pair: per-ion Rabi frequencies, beatnote mu, and
    blue/red optical phases, plus the beam-geometry convention."""

    omega: np.ndarray
    mu: float
    phi_b: np.ndarray
    phi_r: np.ndarray
    geometry: str = "phase_sensitive"
    delta_shift: float = 0.0
    jitter: np.ndarray | None = None

    def __post_init__(self):
        self.omega = np.atleast_1d(np.asarray(self.omega, dtype=float))
        n = len(self.omega)
        self.phi_b = np.broadcast_to(np.asarray(self.phi_b, dtype=float), (n,)).copy()
        self.phi_r = np.broadcast_to(np.asarray(self.phi_r, dtype=float), (n,)).copy()
        if self.jitter is None:
            self.jitter = np.zeros(n)
        else:
            self.jitter = np.broadcast_to(np.asarray(self.jitter, dtype=float), (n,)).copy()
        if np.any(self.omega < 0):
            raise ValueError("Rabi frequencies must be >= 0")
        if self.geometry not in ("phase_sensitive", "phase_insensitive"):
            raise ValueError("geometry must be phase_sensitive or phase_insensitive")

    @property
    def n_ions(self) -> int:
        return len(self.omega)


def phase_convention(tones: ToneSet) -> tuple[np.ndarray, np.ndarray]:
    """Spin phase phi_s and motional phase psi per ion.

    Co-propagating sidebands put the Lamb-Dicke pi/2 and the
    interferometric jitter into the spin phase; counter-propagating ones
    put both into the motional phase.
    """
    mean = (tones.phi_b + tones.phi_r) / 2
    half_diff = (tones.phi_b - tones.phi_r) / 2
    if tones.geometry == "phase_sensitive":
        phi_s = mean + np.pi / 2 + tones.jitter
        psi = half_diff
    else:
        phi_s = mean
        psi = half_diff + np.pi / 2 + tones.jitter
    return phi_s, psi


def carrier_hamiltonian(omega: float, phi: float) -> QOperator:
    """Resonant single-qubit drive (omega/2) sigma_phi."""
    layout = HilbertLayout((spin(),))
    return QOperator(omega / 2 * sigma_phi(phi), layout, hermitian=True)


def intrinsic_micromotion_weights(floq) -> dict[int, float]:
    """Relative sideband coupling weight C_2n at offset n * omega_rf from
    the secular sideband. The carrier coupling carries no such factor."""
    if not floq.stable:
        raise ValueError("micromotion weights need a stable mode solution")
    return {
        n: float(np.real(floq.coeff(n)))
        for n in range(-floq.n_max, floq.n_max + 1)
    }


def modulation_index(k_l: float, u0: float, q: float) -> float:
    """Frequency-modulation index of an ion displaced u0 from the rf null."""
    return k_l * (u0 * q / 2.0)


def excess_micromotion_weights(beta_mod: float, nu_max: int = 40) -> dict[int, float]:
    """Bessel weights J_nu(beta) of the drive components at offsets
    nu * omega_rf induced by excess micromotion."""
    if beta_mod < 0:
        raise ValueError("modulation index must be >= 0")
    return {int(nu): float(jv(nu, beta_mod)) for nu in range(-nu_max, nu_max + 1)}


def scattering_suppression(beta_mod: float, omega_rf: float, gamma_atom: float, nu_max: int = 200) -> float:
    """Scattering-rate ratio of a displaced ion to the micromotion-free one."""
    if omega_rf <= 0 or gamma_atom <= 0:
        raise ValueError("omega_rf and gamma_atom must be positive")
    total = jv(0, beta_mod) ** 2
    for nu in range(1, nu_max + 1):
        term = 2 * jv(nu, beta_mod) ** 2 / (1 + 4 * nu**2 * omega_rf**2 / gamma_atom**2)
        total += term
        if nu > 5 * (1 + beta_mod) and term < 1e-16:
            break
    return float(total)


_PRESETS = {
    # full interaction, analyzed perturbatively
    "dispersive": dict(carrier=True, counter_rotating=True, frame="ordinary"),
    # quasi-resonant entangling drive: carrier and fast terms dropped
    "gate": dict(carrier=False, counter_rotating=False, frame="ordinary"),
    # designated modes rotated to rest: static coupling minus mode detuning
    "spin_boson": dict(carrier=False, counter_rotating=False, frame="resonant"),
}


@dataclass
class SDFConfig:
    """Spin-dependent-force configuration over a set of motional modes.

    eta has shape (n_ions, n_modes); omega_m holds the mode angular
    frequencies; detunings are delta_m = mu - omega_m.
    """

    tones: ToneSet
    omega_m: np.ndarray
    eta: np.ndarray
    n_max: int
    frame: str = "ordinary"
    designated_modes: tuple[int, ...] = ()
    basis: str = "xy"
    carrier: bool = True
    counter_rotating: bool = True
    # optional mode-participation bookkeeping for recoil-form couplings
    b: np.ndarray | None = None
    k_l: float | None = None
    mass: float | None = None

    def __post_init__(self):
        self.omega_m = np.atleast_1d(np.asarray(self.omega_m, dtype=float))
        self.eta = np.atleast_2d(np.asarray(self.eta, dtype=float))
        if self.eta.shape != (self.tones.n_ions, len(self.omega_m)):
            raise ValueError("eta must have shape (n_ions, n_modes)")
        if self.frame not in ("ordinary", "shifted", "resonant"):
            raise ValueError("frame must be ordinary, shifted or resonant")
        if self.basis not in ("xy", "z"):
            raise ValueError("basis must be xy or z")
        if self.frame == "resonant" and len(self.designated_modes) == 0:
            raise ValueError("resonant frame needs designated modes")

    @property
    def n_ions(self) -> int:
        return self.tones.n_ions

    @property
    def n_modes(self) -> int:
        return len(self.omega_m)

    @property
    def delta_m(self) -> np.ndarray:
        return self.tones.mu - self.omega_m

    def layout(self) -> HilbertLayout:
        parts = [spin()] * self.n_ions + [boson(self.n_max)] * self.n_modes
        return HilbertLayout(tuple(parts))

    def with_preset(self, name: str) -> "SDFConfig":
        if name not in _PRESETS:
            raise ValueError(f"unknown preset {name!r}")
        return replace(self, **_PRESETS[name])

    @classmethod
    def from_chain(
        cls,
        tones: ToneSet,
        spectrum,
        ld_set,
        n_max: int,
        **kwargs,
    ) -> "SDFConfig":
        """Build from a mode spectrum and its sideband-coupling set."""
        return cls(
            tones=tones,
            omega_m=ld_set.omega_m,
            eta=ld_set.eta,
            n_max=n_max,
            b=spectrum.b.copy(),
            k_l=ld_set.k_l,
            mass=spectrum.mass,
            **kwargs,
        )


def _spin_ops(cfg: SDFConfig, phi_s: np.ndarray) -> tuple[list[np.ndarray], list[np.ndarray]]:
    """(carrier spin op, spin-motion spin op) per ion, already embedded."""
    layout = cfg.layout()
    sm_ops, carrier_ops = [], []
    for j in range(cfg.n_ions):
        if cfg.basis == "z":
            sm = embed(PAULI_Z, j, layout).mat
            carrier_local = sm
        else:
            sm = embed(sigma_phi(phi_s[j]), j, layout).mat
            if cfg.tones.geometry == "phase_sensitive":
                carrier_local = embed(sigma_phi(phi_s[j] - np.pi / 2), j, layout).mat
            else:
                carrier_local = sm
        sm_ops.append(sm)
        carrier_ops.append(carrier_local)
    return carrier_ops, sm_ops


def sdf_program(cfg: SDFConfig) -> HamiltonianProgram:
    """Full time-dependent spin-dependent-force Hamiltonian.

    Term families are labeled ('carrier', 'spin_motion', 'counter_rotating',
    'transverse_field', 'mode_detuning', 'cross_mode') so approximation
    variants stay explicit; carrier / counter_rotating flags simply skip
    their families.
    """
    layout = cfg.layout()
    phi_s, psi = phase_convention(cfg.tones)
    mu = cfg.tones.mu
    omega = cfg.tones.omega
    prog = HamiltonianProgram(layout)
    carrier_ops, sm_ops = _spin_ops(cfg, phi_s)

    # carrier envelope phase offset: pi/2 when the Lamb-Dicke phase sits in
    # the motional phase (counter-propagating geometry, and the z basis)
    carrier_offset = (
        np.pi / 2
        if (cfg.tones.geometry == "phase_insensitive" or cfg.basis == "z")
        else 0.0
    )
    if cfg.carrier:
        for j in range(cfg.n_ions):
            if omega[j] == 0:
                continue
            env = (lambda t, w=mu, p=psi[j], off=carrier_offset: np.cos(w * t - p + off))
            prog.add(omega[j] * carrier_ops[j], env, label=f"carrier_{j}", family="carrier")

    if cfg.frame == "shifted":
        for j in range(cfg.n_ions):
            prog.add(
                cfg.tones.delta_shift / 2 * embed(PAULI_Z, j, layout).mat,
                None,
                label=f"field_{j}",
                family="transverse_field",
            )

    a_ops = []
    for m in range(cfg.n_modes):
        a_ops.append(embed(ladder(cfg.n_max)[0], cfg.n_ions + m, layout).mat)

    designated = set(cfg.designated_modes) if cfg.frame == "resonant" else set()
    for j in range(cfg.n_ions):
        for m in range(cfg.n_modes):
            amp = cfg.eta[j, m] * omega[j] / 2
            if amp == 0:
                continue
            op = sm_ops[j] @ a_ops[m]
            if cfg.frame == "resonant":
                if m in designated:
                    static = amp * (
                        a_ops[m] * np.exp(-1j * psi[j])
                        + a_ops[m].conj().T * np.exp(1j * psi[j])
                    )
                    prog.add(sm_ops[j] @ static, None, label=f"sm_{j}_{m}", family="spin_motion")
                    if cfg.counter_rotating:
                        env = (lambda t, w=2 * mu, p=psi[j], A=amp: A * np.exp(-1j * (w * t - p)))
                        prog.add_pair(op, env, label=f"cr_{j}_{m}", family="counter_rotating")
                else:
                    # spectator mode seen from the resonant frame
                    env = (
                        lambda t, w=mu, wm=cfg.omega_m[m], p=psi[j], A=2 * amp: A
                        * np.cos(w * t - p)
                        * np.exp(-1j * wm * t)
                    )
                    prog.add_pair(op, env, label=f"cross_{j}_{m}", family="cross_mode")
            else:
                delta = cfg.delta_m[m]
                env = (lambda t, d=delta, p=psi[j], A=amp: A * np.exp(1j * (d * t - p)))
                prog.add_pair(op, env, label=f"sm_{j}_{m}", family="spin_motion")
                if cfg.counter_rotating:
                    env_cr = (
                        lambda t, w=mu + cfg.omega_m[m], p=psi[j], A=amp: A
                        * np.exp(-1j * (w * t - p))
                    )
                    prog.add_pair(op, env_cr, label=f"cr_{j}_{m}", family="counter_rotating")

    if cfg.frame == "resonant":
        for m in designated:
            n_op = embed(ladder(cfg.n_max)[2], cfg.n_ions + m, layout).mat
            prog.add(-cfg.delta_m[m] * n_op, None, label=f"det_{m}", family="mode_detuning")

    if not prog.hermitian_at(0.0):
        raise ValueError("program lost a hermitian partner; check term flags")
    return prog


@dataclass
class LightShiftResult:
    omega_eff: float
    delta_bar: float
    valid: bool
    program: HamiltonianProgram | None


def light_shift_effective(
    omega_b_up: float,
    omega_r_up: float,
    omega_b_down: float,
    omega_r_down: float,
    mu_b: float,
    mu_r: float,
    *,
    eta: np.ndarray | None = None,
    omega_m: np.ndarray | None = None,
    mu: float | None = None,
    n_max: int | None = None,
    delta_phi: float = 0.0,
    carrier: bool = True,
    counter_rotating: bool = True,
) -> LightShiftResult:
    """Differential AC-Stark (z-basis) force from two far-detuned beams.

    Omega_eff = (Ob_up Or_up - Ob_down Or_down) / (4 dbar) with dbar the
    harmonic mean of the two detunings. When mode parameters are supplied
    the matching z-basis force program is built with motional phase
    psi = delta_phi + pi/2.
    """
    if mu_b == 0 or mu_r == 0 or (1 / mu_b + 1 / mu_r) == 0:
        raise ValueError("zero harmonic-mean detuning")
    delta_bar = 2.0 / (1 / mu_b + 1 / mu_r)
    omega_eff = (omega_b_up * omega_r_up - omega_b_down * omega_r_down) / (4 * delta_bar)
    rabis = [omega_b_up, omega_r_up, omega_b_down, omega_r_down]
    valid = min(abs(mu_b), abs(mu_r)) > 10 * max(rabis) if max(rabis) > 0 else True
    program = None
    if eta is not None:
        if omega_m is None or mu is None or n_max is None:
            raise ValueError("mode parameters omega_m, mu, n_max are required")
        # psi = delta_phi + pi/2 comes out of the insensitive-geometry table
        # with phi_b - phi_r = 2 delta_phi
        tones = ToneSet(
            omega=[abs(omega_eff)],
            mu=mu,
            phi_b=[delta_phi],
            phi_r=[-delta_phi],
            geometry="phase_insensitive",
        )
        cfg = SDFConfig(
            tones=tones,
            omega_m=omega_m,
            eta=np.atleast_2d(eta),
            n_max=n_max,
            basis="z",
            carrier=carrier,
            counter_rotating=counter_rotating,
        )
        program = sdf_program(cfg)
    return LightShiftResult(
        omega_eff=float(omega_eff), delta_bar=float(delta_bar), valid=bool(valid), program=program
    )
