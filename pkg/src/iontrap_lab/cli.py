"""Batch command-line front end.

Every subcommand resolves its configuration (flags override config-file
values), runs the requested computation, writes CSV/JSON outputs with
one-line headers, and drops a JSON manifest capturing the resolved
configuration, seed, and convergence flags so a run can be reproduced
byte for byte.
"""

from __future__ import annotations

import argparse
import configparser
import json
import os
import sys
import time

import numpy as np

from . import __version__


class ConfigError(Exception):
    pass


class ConvergenceError(Exception):
    pass


def _fmt(x) -> str:
    if isinstance(x, (bool, np.bool_)):
        return "1" if x else "0"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return repr(float(x))


def write_csv(path, columns, rows):
    with open(path, "w") as fh:
        fh.write(",".join(columns) + "\n")
        for row in rows:
            fh.write(",".join(_fmt(v) for v in row) + "\n")


def write_manifest(path, subcommand, config, seed, outputs, t_start, flags=None):
    manifest = {
        "subcommand": subcommand,
        "config": config,
        "seed": seed,
        "toolkit_version": __version__,
        "wall_time_s": time.time() - t_start,
        "outputs": outputs,
        "flags": flags or {},
    }
    with open(path, "w") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True, default=str)
    return manifest


def resolve_seed(args) -> int:
    if getattr(args, "seed", None) is not None:
        return int(args.seed)
    env = os.environ.get("IONTRAP_LAB_SEED")
    return int(env) if env else 0


ALLOWED_KEYS = {
    "et-scan": {
        "system": {"v_x", "delta_e", "g", "omega"},
        "bath": {"gamma", "n_bar"},
        "scan": {"delta_e_min", "delta_e_max", "steps"},
        "run": {"n_max", "horizon", "n_grid", "seed"},
        "noise": set(),
    },
    "enaqt": {
        "system": {"n_sites", "j_max", "alpha", "b_max", "init_site", "target_site"},
        "noise": {"kind", "gamma", "rate_factor", "center", "fwhm"},
        "run": {"n_disorder", "n_traj", "horizon", "n_grid", "seed"},
        "bath": set(),
        "scan": {"gamma_values"},
    },
    "pyrazine": {
        "system": {"delta_e", "g1", "g2", "omega1", "omega2", "alpha"},
        "bath": {"gamma"},
        "run": {"n_max1", "n_max2", "horizon", "n_grid"},
        "noise": set(),
        "scan": set(),
    },
    "vaet": {
        "system": {"v", "delta_e", "g", "omega"},
        "bath": {"gamma", "n_bar"},
        "run": {"mode", "n_traj", "horizon_ps", "n_max", "n_grid", "seed"},
        "noise": set(),
        "scan": set(),
    },
    "lindblad": {
        "system": {"omega", "n_max"},
        "bath": {"gamma", "n_bar", "dephasing"},
        "run": {"horizon", "n_grid", "initial_fock"},
        "noise": set(),
        "scan": set(),
    },
}


def load_config(path, subcommand, required_sections=()):
    """Line-oriented key = value sections; unknown keys are hard errors."""
    parser = configparser.ConfigParser(inline_comment_prefixes=("#", ";"))
    read = parser.read(path)
    if not read:
        raise ConfigError(f"config file {path!r} not found or unreadable")
    allowed = ALLOWED_KEYS[subcommand]
    for section in required_sections:
        if section not in parser:
            raise ConfigError(f"missing required section [{section}] in {path}")
    out = {}
    for section in parser.sections():
        if section not in allowed:
            raise ConfigError(f"unknown section [{section}] in {path}")
        for key, value in parser[section].items():
            if key not in allowed[section]:
                raise ConfigError(f"unknown key {key!r} in section [{section}] of {path}")
            out[f"{section}.{key}"] = value
    return out


def _get(cfgmap, key, cast, default, override=None):
    if override is not None:
        return override
    if key in cfgmap:
        return cast(cfgmap[key])
    return default


# ---------------------------------------------------------------------- ops


def cmd_stability(args):
    from . import trapcore

    t0 = time.time()
    m = trapcore.stability_scan(
        (args.a_min, args.a_max),
        (args.q_min, args.q_max),
        (args.grid, args.grid),
        mode="linear_3d" if args.mode == "linear3d" else "single_axis",
    )
    rows = []
    for i, a in enumerate(m.a_values):
        for j, q in enumerate(m.q_values):
            rows.append((a, q, bool(m.stable[i, j])))
    out = args.output
    write_csv(out, ["a", "q", "stable"], rows)
    write_manifest(
        out + ".manifest.json", "stability",
        {"a_min": args.a_min, "a_max": args.a_max, "q_min": args.q_min,
         "q_max": args.q_max, "grid": args.grid, "mode": args.mode},
        None, [out], t0,
    )
    return 0


def cmd_trajectory(args):
    from . import trapcore

    t0 = time.time()
    traj = trapcore.integrate_trajectory(
        args.a, args.q, args.x0, args.v0, (0.0, args.xi_max), step=args.step
    )
    out = args.output
    write_csv(out, ["xi", "x", "v"], zip(traj.times, traj.x, traj.v))
    write_manifest(
        out + ".manifest.json", "trajectory",
        {"a": args.a, "q": args.q, "x0": args.x0, "v0": args.v0,
         "xi_max": args.xi_max, "step": args.step},
        None, [out], t0, flags={"diverged": traj.diverged},
    )
    return 0


def cmd_bands(args):
    from . import trapcore

    t0 = time.time()
    bs = trapcore.lattice_band_structure(args.s, (args.e_min, args.e_max), args.grid)
    out = args.output
    write_csv(out, ["e", "allowed"], zip(bs.e_values, bs.allowed))
    report = {
        "s": args.s,
        "bands": bs.bands,
        "gaps": bs.gaps,
    }
    with open(out + ".bands.json", "w") as fh:
        json.dump(report, fh, indent=2)
    write_manifest(
        out + ".manifest.json", "bands",
        {"s": args.s, "e_min": args.e_min, "e_max": args.e_max, "grid": args.grid},
        None, [out, out + ".bands.json"], t0,
    )
    return 0


def cmd_modes(args):
    from scipy.constants import atomic_mass, elementary_charge

    from . import crystal

    t0 = time.time()
    chain = crystal.IonChain(
        n_ions=args.n,
        mass=args.mass_amu * atomic_mass,
        omega_z=2 * np.pi * args.omega_z,
        aspect_beta=args.beta,
        charge=elementary_charge,
    )
    spectrum = crystal.normal_modes(chain)
    out = args.output
    rows = []
    for i in range(args.n):
        for m in range(args.n):
            rows.append((i + 1, m + 1, spectrum.b[i, m]))
    write_csv(out, ["ion", "mode", "b"], rows)
    report = {
        "gamma_z": list(spectrum.gamma_z),
        "gamma_x": list(spectrum.gamma_x),
        "omega_zm_hz": list(spectrum.omega_zm / (2 * np.pi)),
        "omega_xm_hz": list(spectrum.omega_xm / (2 * np.pi)),
        "u_eq": list(spectrum.u_eq),
        "length_scale_m": crystal.length_scale(chain.mass, chain.omega_z, chain.charge),
    }
    json_path = out + ".spectrum.json"
    with open(json_path, "w") as fh:
        json.dump(report, fh, indent=2)
    write_manifest(
        out + ".manifest.json", "modes",
        {"n": args.n, "omega_z_hz": args.omega_z, "beta": args.beta, "mass_amu": args.mass_amu},
        None, [out, json_path], t0,
    )
    return 0


def cmd_jij(args):
    from scipy.constants import atomic_mass, elementary_charge

    from . import crystal, magnus
    from .drive import SDFConfig, ToneSet

    t0 = time.time()
    chain = crystal.IonChain(
        n_ions=args.n,
        mass=args.mass_amu * atomic_mass,
        omega_z=2 * np.pi * args.omega_z,
        aspect_beta=args.beta,
        charge=elementary_charge,
    )
    spectrum = crystal.normal_modes(chain)
    k_l = 2 * np.pi / args.wavelength_nm * 1e9 * args.k_factor
    ld = crystal.lamb_dicke_params(spectrum, k_l)
    mu = 2 * np.pi * args.mu_offset_hz + spectrum.omega_xm.max()
    tones = ToneSet(
        omega=np.full(args.n, 2 * np.pi * args.omega_hz),
        mu=mu,
        phi_b=np.full(args.n, -np.pi / 2),
        phi_r=np.full(args.n, -np.pi / 2),
    )
    cfg = SDFConfig.from_chain(tones, spectrum, ld, n_max=4)
    import warnings as _warnings

    with _warnings.catch_warnings():
        _warnings.simplefilter("ignore")
        j_mat = magnus.jij_matrix(cfg)
        j0, p, rms = magnus.powerlaw_fit(j_mat)
    out = args.output
    rows = []
    for a in range(args.n):
        for b in range(a + 1, args.n):
            rows.append((a + 1, b + 1, j_mat[a, b] / (2 * np.pi)))
    write_csv(out, ["j", "k", "J_hz"], rows)
    fit_path = out + ".fit.json"
    with open(fit_path, "w") as fh:
        json.dump({"J0_hz": j0 / (2 * np.pi), "p": p, "rms": rms}, fh, indent=2)
    write_manifest(
        out + ".manifest.json", "jij",
        {"n": args.n, "omega_z_hz": args.omega_z, "beta": args.beta,
         "mu_offset_hz": args.mu_offset_hz, "omega_hz": args.omega_hz,
         "wavelength_nm": args.wavelength_nm, "k_factor": args.k_factor,
         "mass_amu": args.mass_amu},
        None, [out, fit_path], t0,
    )
    return 0


def cmd_gate(args):
    from . import gatesim

    t0 = time.time()
    if args.ions != 2:
        raise ConfigError("only two-ion gates are supported")
    delta = 2 * np.pi * args.delta_hz
    if args.segments <= 1:
        schedule, cfg = gatesim.default_two_ion_gate(delta=delta, eta=args.eta, n_max=args.n_max)
    else:
        n_modes = (args.segments - 1) // 2
        if 2 * n_modes + 1 != args.segments:
            raise ConfigError("segments must be odd (2 * n_modes + 1)")
        base = 2 * np.pi * 2e6
        split = 2 * np.pi * 30e3
        omega_m = base - split * np.arange(n_modes)[::-1]
        mu = base + delta
        eta = np.empty((2, n_modes))
        for m in range(n_modes):
            eta[0, m] = args.eta
            eta[1, m] = args.eta * (1 if (n_modes - 1 - m) % 2 == 0 else -1)
        tones = gatesim.tones_for([2 * np.pi * 30e3] * 2, mu, 0.0, 0.0)
        from .drive import SDFConfig

        cfg = SDFConfig(
            tones=tones, omega_m=omega_m, eta=eta, n_max=args.n_max,
            carrier=False, counter_rotating=False,
        )
        tau_g = args.tmax if args.tmax else 2 * np.pi / delta * n_modes
        schedule = gatesim.segmented_solve(n_modes, tau_g, cfg, n_segments=args.segments)
    tau_g = schedule.tau_g
    t_grid = np.linspace(0.0, args.tmax if args.tmax else tau_g, args.n_grid)
    traces = gatesim.population_traces(schedule, cfg, t_grid)
    closed = gatesim.ms_closed_form(schedule, cfg)
    out = args.output
    write_csv(
        out,
        ["t", "P_dd", "P_ud_du", "P_uu"],
        zip(traces["t"], traces["p_dd"], traces["p_odd"], traces["p_uu"]),
    )
    report = {
        "closure_residuals": list(closed.closure),
        "chi_12": float(closed.chi[0, 1]),
        "phase_error": closed.phase_error,
        "tau_g": tau_g,
    }
    report_path = out + ".gate.json"
    with open(report_path, "w") as fh:
        json.dump(report, fh, indent=2)
    write_manifest(
        out + ".manifest.json", "gate",
        {"ions": args.ions, "delta_hz": args.delta_hz, "segments": args.segments,
         "eta": args.eta, "n_max": args.n_max, "tmax": args.tmax},
        None, [out, report_path], t0,
        flags={"max_closure_residual": float(max(closed.closure))},
    )
    return 0


def cmd_enaqt(args):
    from .openlab import EnaqtConfig, enaqt_experiment

    t0 = time.time()
    cfgmap = load_config(args.config, "enaqt", required_sections=("system", "run")) if args.config else {}
    seed = resolve_seed(args) if (args.seed is not None or "run.seed" not in cfgmap) else int(cfgmap["run.seed"])
    n_sites = _get(cfgmap, "system.n_sites", int, 8, args.n_sites)
    cfg = EnaqtConfig(
        n_sites=n_sites,
        j_max=_get(cfgmap, "system.j_max", float, 1.0),
        hop_exponent=_get(cfgmap, "system.alpha", float, 1.0),
        b_max=_get(cfgmap, "system.b_max", float, 2.5, args.b_max),
        init_site=_get(cfgmap, "system.init_site", int, max(0, min(2, n_sites - 2))),
        target_site=_get(cfgmap, "system.target_site", int, n_sites - 1),
        n_disorder=_get(cfgmap, "run.n_disorder", int, 20, args.n_disorder),
        n_traj=_get(cfgmap, "run.n_traj", int, 200, args.n_traj),
        gamma=_get(cfgmap, "noise.gamma", float, 0.0, args.gamma),
        noise=_get(cfgmap, "noise.kind", str, "lindblad", args.noise),
        lorentz_center=_get(cfgmap, "noise.center", float, 0.0),
        lorentz_fwhm=_get(cfgmap, "noise.fwhm", float, 0.5),
        horizon=_get(cfgmap, "run.horizon", float, None),
        seed=seed,
    )
    result = enaqt_experiment(cfg, jobs=args.jobs)
    out = args.output
    n = cfg.n_sites
    cols = ["t"] + [f"p_{i+1}" for i in range(n)]
    rows = zip(result.t, *[result.traces[f"p_{i}"] for i in range(n)])
    write_csv(out, cols, rows)
    eta_path = out + ".eta.json"
    with open(eta_path, "w") as fh:
        json.dump(
            {
                "eta": list(result.scalars["eta"]),
                "eta_stderr": list(result.scalars["eta_stderr"]),
                "eta_target": result.scalars["eta_target"],
                "horizon": result.scalars["horizon"],
                "gamma": cfg.gamma,
            },
            fh,
            indent=2,
        )
    write_manifest(
        out + ".manifest.json", "enaqt",
        {"n_sites": cfg.n_sites, "b_max": cfg.b_max, "gamma": cfg.gamma,
         "noise": cfg.noise, "n_disorder": cfg.n_disorder, "n_traj": cfg.n_traj},
        seed, [out, eta_path], t0,
    )
    return 0


def cmd_et_scan(args):
    from .openlab import EtConfig, et_rate_spectrum

    t0 = time.time()
    cfgmap = load_config(args.config, "et-scan", required_sections=("system", "bath")) if args.config else {}
    cfg = EtConfig(
        v_x=_get(cfgmap, "system.v_x", float, 0.24, args.v_x),
        delta_e=_get(cfgmap, "system.delta_e", float, 1.0),
        g=_get(cfgmap, "system.g", float, 1.8),
        omega=_get(cfgmap, "system.omega", float, 1.0),
        gamma=_get(cfgmap, "bath.gamma", float, 0.25, args.gamma),
        n_bar=_get(cfgmap, "bath.n_bar", float, 0.05),
        n_max=_get(cfgmap, "run.n_max", int, 18),
        horizon=_get(cfgmap, "run.horizon", float, None),
        n_grid=_get(cfgmap, "run.n_grid", int, 400),
    )
    lo = _get(cfgmap, "scan.delta_e_min", float, 0.3)
    hi = _get(cfgmap, "scan.delta_e_max", float, 2.6)
    steps = _get(cfgmap, "scan.steps", int, 24)
    des = np.linspace(lo, hi, steps)
    spectrum = et_rate_spectrum(cfg, des, jobs=args.jobs)
    out = args.output
    write_csv(out, ["delta_e", "k_T"], zip(spectrum.t, spectrum.traces["k_t"]))
    write_manifest(
        out + ".manifest.json", "et-scan",
        {"v_x": cfg.v_x, "g": cfg.g, "omega": cfg.omega, "gamma": cfg.gamma,
         "n_bar": cfg.n_bar, "n_max": cfg.n_max,
         "scan": {"min": lo, "max": hi, "steps": steps}},
        None, [out], t0,
    )
    return 0


def cmd_pyrazine(args):
    from .openlab import PyrazineConfig, pyrazine_experiment

    t0 = time.time()
    cfgmap = load_config(args.config, "pyrazine", required_sections=("system",)) if args.config else {}
    cfg = PyrazineConfig(
        delta_e=_get(cfgmap, "system.delta_e", float, 0.8),
        g1=_get(cfgmap, "system.g1", float, 0.6),
        g2=_get(cfgmap, "system.g2", float, 0.35),
        omega1=_get(cfgmap, "system.omega1", float, 1.0),
        omega2=_get(cfgmap, "system.omega2", float, 0.8),
        alpha=_get(cfgmap, "system.alpha", float, 1.5),
        gamma=_get(cfgmap, "bath.gamma", float, 0.0, args.gamma),
        n_max1=_get(cfgmap, "run.n_max1", int, 14),
        n_max2=_get(cfgmap, "run.n_max2", int, 8),
        horizon=_get(cfgmap, "run.horizon", float, 60.0),
    )
    result = pyrazine_experiment(cfg)
    out = args.output
    write_csv(out, ["t", "P_up"], zip(result.t, result.traces["p_up"]))
    write_manifest(
        out + ".manifest.json", "pyrazine",
        {"delta_e": cfg.delta_e, "g1": cfg.g1, "g2": cfg.g2, "gamma": cfg.gamma,
         "alpha": cfg.alpha, "omega1": cfg.omega1, "omega2": cfg.omega2},
        None, [out], t0,
        flags={"p_up_final": result.scalars["p_up_final"]},
    )
    return 0


def cmd_vaet(args):
    from .openlab import VaetConfig, dephased_spinboson_experiment, spectral_density

    t0 = time.time()
    cfgmap = load_config(args.config, "vaet", required_sections=("system",)) if args.config else {}
    seed = resolve_seed(args)
    cfg = VaetConfig(
        v_coupling=_get(cfgmap, "system.v", float, 15.0),
        delta_e=_get(cfgmap, "system.delta_e", float, 100.0),
        g=_get(cfgmap, "system.g", float, 30.0),
        omega=_get(cfgmap, "system.omega", float, 104.4, args.omega),
        gamma=_get(cfgmap, "bath.gamma", float, 0.0, args.gamma),
        n_bar=_get(cfgmap, "bath.n_bar", float, 0.0, args.n_bar),
        n_max=_get(cfgmap, "run.n_max", int, 10),
        horizon_ps=_get(cfgmap, "run.horizon_ps", float, 6.0),
        n_traj=_get(cfgmap, "run.n_traj", int, 300, args.n_traj),
        mode=_get(cfgmap, "run.mode", str, "lindblad", args.mode),
        seed=seed,
    )
    result = dephased_spinboson_experiment(cfg)
    out = args.output
    write_csv(out, ["t_ps", "P_D"], zip(result.t, result.traces["p_donor"]))
    if cfg.gamma > 0:
        w = np.linspace(0.0, 2.5 * cfg.omega, 400)
        jw = spectral_density(w, [cfg.g], [cfg.gamma], [cfg.omega])
        jw_path = out + ".spectral_density.csv"
        write_csv(jw_path, ["omega_cm1", "J"], zip(w, jw))
        outputs = [out, jw_path]
    else:
        outputs = [out]
    write_manifest(
        out + ".manifest.json", "vaet",
        {"v": cfg.v_coupling, "delta_e": cfg.delta_e, "g": cfg.g, "omega": cfg.omega,
         "gamma": cfg.gamma, "n_bar": cfg.n_bar, "mode": cfg.mode, "n_traj": cfg.n_traj},
        seed, outputs, t0,
        flags={"transfer_amplitude": result.scalars["transfer_amplitude"],
               "resonance_cm1": result.scalars["resonance_cm1"]},
    )
    return 0


def cmd_lindblad(args):
    from .hilbert import HilbertLayout, boson, ladder
    from .openlab import LindbladSpec, lindblad_evolve

    t0 = time.time()
    cfgmap = load_config(args.config, "lindblad") if args.config else {}
    n_max = _get(cfgmap, "system.n_max", int, 20)
    omega = _get(cfgmap, "system.omega", float, 1.0)
    gamma = _get(cfgmap, "bath.gamma", float, 0.1, args.gamma)
    n_bar = _get(cfgmap, "bath.n_bar", float, 0.0)
    dephasing = _get(cfgmap, "bath.dephasing", float, 0.0)
    horizon = _get(cfgmap, "run.horizon", float, 30.0)
    n_grid = _get(cfgmap, "run.n_grid", int, 121)
    init_fock = _get(cfgmap, "run.initial_fock", int, 1)
    a, adag, num = ladder(n_max)
    collapse = []
    if gamma > 0:
        collapse.append((a, gamma * (n_bar + 1)))
        if n_bar > 0:
            collapse.append((adag, gamma * n_bar))
    if dephasing > 0:
        collapse.append((num, dephasing))
    spec = LindbladSpec(omega * num, collapse, layout=HilbertLayout((boson(n_max),)))
    psi = np.zeros(n_max, complex)
    psi[init_fock] = 1 / np.sqrt(2)
    psi[0] = 1 / np.sqrt(2)
    rho0 = np.outer(psi, psi.conj())
    t_grid = np.linspace(0.0, horizon, n_grid)
    result = lindblad_evolve(spec, rho0, t_grid, observables={"n": num}, keep_states=True)
    coh = np.array([abs(r.mat[0, init_fock]) for r in result.states])
    out = args.output
    write_csv(
        out,
        ["t", "n_expect", "trace", "coherence"],
        zip(t_grid, result.traces["n"], result.traces["trace"], coh),
    )
    write_manifest(
        out + ".manifest.json", "lindblad",
        {"n_max": n_max, "omega": omega, "gamma": gamma, "n_bar": n_bar,
         "dephasing": dephasing, "horizon": horizon, "initial_fock": init_fock},
        None, [out], t0,
        flags={"trace_drift": result.trace_drift, "min_eigenvalue": result.min_eigenvalue},
    )
    return 0


# ------------------------------------------------------------------- parser


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="iontrap-lab",
        description="Trapped-ion physics toolkit batch runner. Flags override "
        "config-file values; IONTRAP_LAB_SEED seeds runs without --seed.",
    )
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("stability", help="classify an (a, q) rectangle")
    s.add_argument("--a-min", type=float, default=-0.2)
    s.add_argument("--a-max", type=float, default=0.2)
    s.add_argument("--q-min", type=float, default=0.0)
    s.add_argument("--q-max", type=float, default=1.0)
    s.add_argument("--grid", type=int, default=100)
    s.add_argument("--mode", choices=["single", "linear3d"], default="single")
    s.add_argument("--output", default="stability.csv")
    s.set_defaults(func=cmd_stability)

    s = sub.add_parser("trajectory", help="integrate one driven trajectory")
    s.add_argument("--a", type=float, required=True)
    s.add_argument("--q", type=float, required=True)
    s.add_argument("--x0", type=float, default=1.0)
    s.add_argument("--v0", type=float, default=0.0)
    s.add_argument("--xi-max", type=float, default=100.0)
    s.add_argument("--step", type=float, default=0.02)
    s.add_argument("--output", default="trajectory.csv")
    s.set_defaults(func=cmd_trajectory)

    s = sub.add_parser("bands", help="periodic-lattice band structure")
    s.add_argument("--s", type=float, required=True, dest="s")
    s.add_argument("--e-min", type=float, default=0.0)
    s.add_argument("--e-max", type=float, default=12.0)
    s.add_argument("--grid", type=int, default=400)
    s.add_argument("--output", default="bands.csv")
    s.set_defaults(func=cmd_bands)

    s = sub.add_parser("modes", help="chain normal-mode spectrum")
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--omega-z", type=float, required=True, help="axial COM frequency (Hz)")
    s.add_argument("--beta", type=float, required=True)
    s.add_argument("--mass-amu", type=float, default=171.0)
    s.add_argument("--output", default="modes.csv")
    s.set_defaults(func=cmd_modes)

    s = sub.add_parser("jij", help="spin-spin coupling matrix of a chain")
    s.add_argument("--n", type=int, default=10)
    s.add_argument("--omega-z", type=float, default=5e5)
    s.add_argument("--beta", type=float, default=0.1)
    s.add_argument("--omega-hz", type=float, default=25e3, help="Rabi frequency (Hz)")
    s.add_argument("--mu-offset-hz", type=float, default=50e3, help="beatnote above top mode (Hz)")
    s.add_argument("--wavelength-nm", type=float, default=355.0)
    s.add_argument("--k-factor", type=float, default=2.0, help="wavevector multiplier (beam geometry)")
    s.add_argument("--mass-amu", type=float, default=171.0)
    s.add_argument("--output", default="jij.csv")
    s.set_defaults(func=cmd_jij)

    s = sub.add_parser("gate", help="two-ion entangling-gate populations")
    s.add_argument("--ions", type=int, default=2)
    s.add_argument("--delta-hz", type=float, default=20e3)
    s.add_argument("--segments", type=int, default=1)
    s.add_argument("--eta", type=float, default=0.1)
    s.add_argument("--n-max", type=int, default=16)
    s.add_argument("--tmax", type=float, default=None)
    s.add_argument("--n-grid", type=int, default=161)
    s.add_argument("--output", default="gate.csv")
    s.set_defaults(func=cmd_gate)

    s = sub.add_parser("enaqt", help="noisy-network transport efficiency")
    s.add_argument("--config", default=None)
    s.add_argument("--n-sites", type=int, default=None)
    s.add_argument("--b-max", type=float, default=None)
    s.add_argument("--gamma", type=float, default=None)
    s.add_argument("--noise", default=None)
    s.add_argument("--n-disorder", type=int, default=None)
    s.add_argument("--n-traj", type=int, default=None)
    s.add_argument("--seed", type=int, default=None)
    s.add_argument("--jobs", type=int, default=1)
    s.add_argument("--output", default="enaqt.csv")
    s.set_defaults(func=cmd_enaqt)

    s = sub.add_parser("et-scan", help="electron-transfer rate spectrum")
    s.add_argument("--config", default=None)
    s.add_argument("--v-x", type=float, default=None)
    s.add_argument("--gamma", type=float, default=None)
    s.add_argument("--jobs", type=int, default=1)
    s.add_argument("--output", default="et_scan.csv")
    s.set_defaults(func=cmd_et_scan)

    s = sub.add_parser("pyrazine", help="conical-intersection population decay")
    s.add_argument("--config", default=None)
    s.add_argument("--gamma", type=float, default=None)
    s.add_argument("--output", default="pyrazine.csv")
    s.set_defaults(func=cmd_pyrazine)

    s = sub.add_parser("vaet", help="dephased spin-boson transfer trace")
    s.add_argument("--config", default=None)
    s.add_argument("--omega", type=float, default=None)
    s.add_argument("--gamma", type=float, default=None)
    s.add_argument("--n-bar", type=float, default=None)
    s.add_argument("--n-traj", type=int, default=None)
    s.add_argument("--mode", default=None, choices=[None, "stochastic", "lindblad"])
    s.add_argument("--seed", type=int, default=None)
    s.add_argument("--output", default="vaet.csv")
    s.set_defaults(func=cmd_vaet)

    s = sub.add_parser("lindblad", help="damped/dephased oscillator reference run")
    s.add_argument("--config", default=None)
    s.add_argument("--gamma", type=float, default=None)
    s.add_argument("--output", default="lindblad.csv")
    s.set_defaults(func=cmd_lindblad)

    return p


def dispatch(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code not in (0, None) else 0
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except (ValueError, KeyError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except (RuntimeError, ConvergenceError) as exc:
        print(f"convergence failure: {exc}", file=sys.stderr)
        return 3


def main() -> None:
    sys.exit(dispatch())


if __name__ == "__main__":
    main()
