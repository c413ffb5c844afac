"""Open-system engine: master equation, noise processes, ensembles."""

import numpy as np
import pytest

from iontrap_lab.hilbert import (
    HilbertLayout,
    PAULI_X,
    PAULI_Z,
    boson,
    embed,
    ladder,
    spin,
    thermal_state,
)
from iontrap_lab.openlab import (
    LindbladSpec,
    NoiseProcess,
    estimate_spectrum,
    lindblad_evolve,
    lorentzian_spectrum,
    stochastic_evolve,
    telegraph_spectrum,
)


def boson_layout(n):
    return HilbertLayout((boson(n),))


class TestLindblad:
    def test_damped_oscillator_decay(self):
        n_max = 20
        a, adag, num = ladder(n_max)
        gamma = 0.37
        spec = LindbladSpec(1.3 * num, [(a, gamma)], layout=boson_layout(n_max))
        rho0 = np.zeros((n_max, n_max), complex)
        rho0[1, 1] = 1.0
        t = np.linspace(0, 5, 40)
        res = lindblad_evolve(spec, rho0, t, observables={"n": num})
        assert np.abs(res.traces["n"] - np.exp(-gamma * t)).max() < 1e-6
        assert res.trace_drift < 1e-9

    def test_thermal_steady_state(self):
        n_max = 25
        a, adag, num = ladder(n_max)
        gamma, n_bar = 0.4, 0.3
        spec = LindbladSpec(
            1.1 * num,
            [(a, gamma * (n_bar + 1)), (adag, gamma * n_bar)],
            layout=boson_layout(n_max),
        )
        rho0 = thermal_state(0.01, n_max).mat
        res = lindblad_evolve(spec, rho0, np.linspace(0, 80, 30), observables={"n": num})
        assert res.traces["n"][-1] == pytest.approx(n_bar, abs=1e-4)

    def test_number_dephasing_law(self):
        # coherence |n><m| decays at gamma (n - m)^2 / 2; populations frozen
        n_max = 12
        _, _, num = ladder(n_max)
        gamma = 0.21
        spec = LindbladSpec(0.9 * num, [(num, gamma)], layout=boson_layout(n_max))
        v = np.zeros(n_max, complex)
        v[0] = v[2] = 1 / np.sqrt(2)
        t = np.linspace(0, 3, 25)
        res = lindblad_evolve(spec, np.outer(v, v.conj()), t)
        coh = np.array([abs(r.mat[0, 2]) for r in res.states])
        law = 0.5 * np.exp(-gamma * (2 - 0) ** 2 * t / 2)
        assert np.abs(coh - law).max() < 1e-6
        pops = np.array([r.mat[2, 2].real for r in res.states])
        assert np.abs(pops - 0.5).max() < 1e-8

    def test_rk_route_matches_exponential(self):
        n_max = 12
        a, _, num = ladder(n_max)
        h = 0.7 * num + 0.2 * (a + a.conj().T)
        spec = LindbladSpec(h, [(a, 0.25)], layout=boson_layout(n_max))
        rho0 = thermal_state(0.4, n_max).mat
        t = np.linspace(0, 4, 9)
        r1 = lindblad_evolve(spec, rho0, t, method="krylov")
        r2 = lindblad_evolve(spec, rho0, t, method="rk")
        r3 = lindblad_evolve(spec, rho0, t, method="dense")
        d12 = np.abs(r1.states[-1].mat - r2.states[-1].mat).max()
        d13 = np.abs(r1.states[-1].mat - r3.states[-1].mat).max()
        assert d12 < 2e-6
        assert d13 < 1e-9

    def test_pure_damping_energy_monotone(self):
        n_max = 14
        a, _, num = ladder(n_max)
        spec = LindbladSpec(num, [(a, 0.3)], layout=boson_layout(n_max))
        rho0 = np.zeros((n_max, n_max), complex)
        rho0[3, 3] = 1.0
        res = lindblad_evolve(spec, rho0, np.linspace(0, 10, 60), observables={"n": num})
        assert (np.diff(res.traces["n"]) < 1e-12).all()

    def test_rejects_negative_rate(self):
        a, _, num = ladder(6)
        with pytest.raises(ValueError):
            LindbladSpec(num, [(a, -0.1)], layout=boson_layout(6))

    def test_positivity_guard(self):
        n_max = 8
        a, _, num = ladder(n_max)
        spec = LindbladSpec(num, [(a, 0.2)], layout=boson_layout(n_max))
        rho0 = thermal_state(0.2, n_max).mat
        res = lindblad_evolve(spec, rho0, np.linspace(0, 5, 12))
        assert res.min_eigenvalue > -1e-6


class TestNoiseProcesses:
    def test_telegraph_values_and_rate(self):
        proc = NoiseProcess(kind="telegraph", w_max=2.0, rate=30.0)
        rng = np.random.default_rng(0)
        rec = proc.sample(rng, 50.0)
        assert set(np.round(np.abs(rec.values), 12)) == {1.0}
        # switching count ~ rate * span
        n_switch = len(rec.values) - 1
        assert n_switch == pytest.approx(30.0 * 50.0, rel=0.25)

    def test_telegraph_spectrum_matches_analytic(self):
        proc = NoiseProcess(kind="telegraph", w_max=1.5, rate=8.0)
        freqs, est = estimate_spectrum(proc, t_final=200.0, dt=0.01, n_traj=60, seed=3)
        ref = telegraph_spectrum(freqs, 1.5, 8.0)
        band = (freqs > 0.5) & (freqs < 30.0)
        rel = np.abs(est[band] - ref[band]) / ref[band]
        assert np.median(rel) < 0.2

    def test_lorentzian_spectrum_peak(self):
        center, fwhm, sigma = 12.0, 1.5, 0.8
        proc = NoiseProcess(kind="lorentzian", center=center, fwhm=fwhm, sigma=sigma)
        freqs, est = estimate_spectrum(proc, t_final=300.0, dt=0.02, n_traj=40, seed=5)
        window = (freqs > 5) & (freqs < 30)
        f_peak = freqs[window][np.argmax(est[window])]
        assert f_peak == pytest.approx(center, abs=fwhm)
        # smooth the periodogram over the linewidth before comparing heights
        ref = lorentzian_spectrum(freqs, center, fwhm, sigma)
        sel = np.abs(freqs - center) < fwhm / 2
        assert abs(est[sel].mean() - ref[sel].mean()) / ref[sel].mean() < 0.35

    def test_gaussian_steps(self):
        proc = NoiseProcess(kind="gaussian_detuning", std=0.7, tau_step=0.05)
        rng = np.random.default_rng(1)
        rec = proc.sample(rng, 10.0)
        assert len(rec.values) == 200
        assert rec.values.std() == pytest.approx(0.7, rel=0.2)

    def test_unknown_kind_rejected(self):
        with pytest.raises(ValueError):
            NoiseProcess(kind="pink")


class TestStochasticEnsemble:
    def test_zero_noise_matches_closed_system(self):
        h = np.array([[0.0, 1.0], [1.0, 0.0]], complex)
        proc = NoiseProcess(kind="gaussian_detuning", std=0.0, tau_step=0.5)
        psi0 = np.array([1.0, 0.0], complex)
        t = np.linspace(0, 6, 31)
        obs = {"p0": np.diag([1.0, 0.0]).astype(complex)}
        res = stochastic_evolve(h, [(np.diag([1.0, -1.0]).astype(complex), proc)], psi0, t, 4, seed=0, observables=obs)
        assert np.abs(res.mean["p0"] - np.cos(t) ** 2).max() < 1e-9
        assert np.abs(res.stderr["p0"]).max() < 1e-12

    def test_telegraph_matches_dephasing_rate(self):
        # pair coherence decays at w_max^2 / rate when switching is fast
        j = 1.0
        h = np.array([[0.0, j], [j, 0.0]], complex)
        lam, gamma = 50.0, 0.5
        w_max = np.sqrt(gamma * lam)
        proc = NoiseProcess(kind="telegraph", w_max=w_max, rate=lam)
        hooks = [
            (2 * np.diag([1.0, 0.0]).astype(complex), proc),
            (2 * np.diag([0.0, 1.0]).astype(complex), proc),
        ]
        psi0 = np.array([1.0, 1.0], complex) / np.sqrt(2)
        t = np.linspace(0, 4.0, 33)
        obs = {"coh": np.array([[0, 0.5], [0.5, 0]], complex)}
        res = stochastic_evolve(h, hooks, psi0, t, 500, seed=11, observables=obs)
        # |+> is an eigenstate of the hopping; only dephasing moves coherence
        fit = np.polyfit(t, np.log(np.abs(res.mean["coh"]) + 1e-12), 1)
        assert -fit[0] == pytest.approx(gamma, rel=0.15)

    def test_gaussian_detuning_matches_lindblad(self):
        n_max = 10
        layout = HilbertLayout((spin(), boson(n_max)))
        a_full = embed(ladder(n_max)[0], 1, layout).mat
        n_full = embed(ladder(n_max)[2], 1, layout).mat
        sx = embed(PAULI_X, 0, layout).mat
        sz = embed(PAULI_Z, 0, layout).mat
        h = 0.3 * sx + 0.5 * sz + 0.2 * sz @ (a_full + a_full.conj().T) + 1.0 * n_full
        gamma, tau_step = 0.25, 0.02
        proc = NoiseProcess(kind="gaussian_detuning", std=np.sqrt(gamma / tau_step), tau_step=tau_step)
        up = np.array([1.0, 0.0], complex)
        psi0 = np.kron(up, np.eye(n_max)[0]).astype(complex)
        t = np.linspace(0, 8, 41)
        res = stochastic_evolve(h, [(n_full, proc)], psi0, t, 400, seed=5, observables={"sz": sz})
        spec = LindbladSpec(h, [(n_full, gamma)], layout=layout)
        lres = lindblad_evolve(spec, np.outer(psi0, psi0.conj()), t, observables={"sz": sz})
        assert np.abs(res.mean["sz"] - lres.traces["sz"]).max() / 2 < 0.05

    def test_deterministic_given_seed(self):
        h = np.array([[0.0, 1.0], [1.0, 0.0]], complex)
        proc = NoiseProcess(kind="telegraph", w_max=1.0, rate=10.0)
        hooks = [(np.diag([1.0, -1.0]).astype(complex), proc)]
        psi0 = np.array([1.0, 0.0], complex)
        t = np.linspace(0, 3, 16)
        obs = {"p0": np.diag([1.0, 0.0]).astype(complex)}
        r1 = stochastic_evolve(h, hooks, psi0, t, 20, seed=42, observables=obs)
        r2 = stochastic_evolve(h, hooks, psi0, t, 20, seed=42, observables=obs)
        assert np.array_equal(r1.mean["p0"], r2.mean["p0"])

    def test_requires_two_trajectories(self):
        h = np.eye(2, dtype=complex)
        with pytest.raises(ValueError):
            stochastic_evolve(h, [], np.array([1.0, 0]), np.linspace(0, 1, 5), 1)
