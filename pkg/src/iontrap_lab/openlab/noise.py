"""Classical noise processes the drive can carry.

Every process samples to a piecewise-constant record so unitary
trajectory propagation can step exactly between switching times. The
generated power spectra are testable against their analytic shapes.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


@dataclass
class PiecewiseNoise:
    """Right-open piecewise-constant record: value[k] holds on
    [edges[k], edges[k+1])."""

    edges: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        if len(self.edges) != len(self.values) + 1:
            raise ValueError("need one more edge than values")

    def at(self, t: float) -> float:
        k = np.searchsorted(self.edges, t, side="right") - 1
        k = min(max(k, 0), len(self.values) - 1)
        return float(self.values[k])

    def sample_grid(self, dt: float) -> np.ndarray:
        t = np.arange(self.edges[0], self.edges[-1], dt)
        idx = np.clip(np.searchsorted(self.edges, t, side="right") - 1, 0, len(self.values) - 1)
        return self.values[idx]


@dataclass
class NoiseProcess:
    """Declarative noise description.

    kinds: 'telegraph' (w_max, rate), 'lorentzian' (center, fwhm, sigma),
    'gaussian_detuning' (std, tau_step), 'random_motional_phase' ().
    """

    kind: str
    w_max: float = 0.0
    rate: float = 0.0
    center: float = 0.0
    fwhm: float = 0.0
    sigma: float = 0.0
    std: float = 0.0
    tau_step: float = 0.0

    def __post_init__(self):
        kinds = ("telegraph", "lorentzian", "gaussian_detuning", "random_motional_phase")
        if self.kind not in kinds:
            raise ValueError(f"kind must be one of {kinds}")

    def sample(self, rng: np.random.Generator, t_final: float) -> PiecewiseNoise:
        if self.kind == "telegraph":
            return _sample_telegraph(rng, t_final, self.w_max, self.rate)
        if self.kind == "gaussian_detuning":
            return _sample_gaussian_steps(rng, t_final, self.std, self.tau_step)
        if self.kind == "lorentzian":
            return _sample_lorentzian(rng, t_final, self.center, self.fwhm, self.sigma)
        raise ValueError(f"{self.kind} does not sample to an amplitude record")


def _sample_telegraph(rng, t_final, w_max, rate) -> PiecewiseNoise:
    """Two-valued process at +-w_max/2 with exponential waiting times, so
    switching events sit exactly where they fell, not on a step grid."""
    edges = [0.0]
    t = 0.0
    while t < t_final:
        t += rng.exponential(1.0 / rate) if rate > 0 else np.inf
        edges.append(min(t, t_final))
        if t >= t_final:
            break
    if edges[-1] < t_final:
        edges.append(t_final)
    n_vals = len(edges) - 1
    start = rng.integers(0, 2)
    values = np.array([(w_max / 2) * (1 if (start + k) % 2 == 0 else -1) for k in range(n_vals)])
    return PiecewiseNoise(np.array(edges), values)


def _sample_gaussian_steps(rng, t_final, std, tau_step) -> PiecewiseNoise:
    n = int(np.ceil(t_final / tau_step))
    edges = np.minimum(tau_step * np.arange(n + 1), t_final)
    values = rng.normal(0.0, std, size=n)
    return PiecewiseNoise(edges, values)


def _sample_lorentzian(rng, t_final, center, fwhm, sigma, points_per_cycle: int = 24) -> PiecewiseNoise:
    """Colored process with a Lorentzian line at +-center.

    Two independent relaxation processes quadrature-modulate the carrier:
    w(t) = x1 cos(center t) + x2 sin(center t), with x1/x2 exponentially
    correlated at rate fwhm/2 and variance sigma^2.
    """
    kappa = fwhm / 2.0
    fastest = max(center / (2 * np.pi), kappa / (2 * np.pi), 1.0 / t_final)
    dt = 1.0 / (points_per_cycle * fastest)
    n = int(np.ceil(t_final / dt))
    edges = np.minimum(dt * np.arange(n + 1), t_final)
    decay = np.exp(-kappa * dt)
    kick = sigma * np.sqrt(1 - decay**2)
    x1 = np.empty(n)
    x2 = np.empty(n)
    x1[0] = rng.normal(0.0, sigma)
    x2[0] = rng.normal(0.0, sigma)
    for k in range(1, n):
        x1[k] = x1[k - 1] * decay + kick * rng.normal()
        x2[k] = x2[k - 1] * decay + kick * rng.normal()
    t_mid = edges[:-1]
    values = x1 * np.cos(center * t_mid) + x2 * np.sin(center * t_mid)
    return PiecewiseNoise(edges, values)


def telegraph_spectrum(omega: np.ndarray, w_max: float, rate: float) -> np.ndarray:
    """Analytic two-sided spectrum of the telegraph process."""
    a2 = (w_max / 2) ** 2
    return a2 * 4 * rate / (4 * rate**2 + np.asarray(omega) ** 2)


def lorentzian_spectrum(
    omega: np.ndarray, center: float, fwhm: float, sigma: float
) -> np.ndarray:
    """Analytic two-sided spectrum of the modulated relaxation process."""
    kappa = fwhm / 2.0
    w = np.asarray(omega)
    return sigma**2 * (kappa / (kappa**2 + (w - center) ** 2) + kappa / (kappa**2 + (w + center) ** 2))


def estimate_spectrum(
    process: NoiseProcess,
    t_final: float,
    dt: float,
    n_traj: int,
    seed: int = 0,
) -> tuple[np.ndarray, np.ndarray]:
    """Averaged periodogram S(omega) of sampled realizations, normalized as
    the two-sided spectral density of the continuous process."""
    sub = np.random.SeedSequence(seed).spawn(n_traj)
    acc = None
    for ss in sub:
        rng = np.random.default_rng(ss)
        rec = process.sample(rng, t_final)
        x = rec.sample_grid(dt)
        spec = np.abs(np.fft.rfft(x)) ** 2 * dt / len(x)
        acc = spec if acc is None else acc + spec
    acc /= n_traj
    freqs = np.fft.rfftfreq(int(round(t_final / dt)), dt) * 2 * np.pi
    return freqs[: len(acc)], acc
