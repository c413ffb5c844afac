"""Shared fixtures and preset builders for the test suite."""

import warnings

import numpy as np
import pytest


def dispersive_validation_config(n_max=12, n_loops=26):
    """Two-ion, two-mode full-drive configuration for effective-model checks.

    eta = 0.08 and Rabi frequency 2 pi x 25 kHz, beatnote ten sideband
    couplings above the upper mode; the mode splitting is solved so the
    comparison time (an eighth of the coupling period) is an integer number
    of upper-mode loops, where the dispersive reduction is cleanest.
    """
    from scipy.optimize import brentq

    from iontrap_lab import magnus as mg
    from iontrap_lab.drive import SDFConfig, ToneSet

    om = 2 * np.pi * 25e3
    eta0 = 0.08
    w_u = 2 * np.pi * 2.1e6
    delta_u = 10 * eta0 * om
    mu = w_u + delta_u
    j_target = delta_u / (8 * n_loops)

    def make(w_l):
        tones = ToneSet(
            omega=[om, om], mu=mu, phi_b=[-np.pi / 2] * 2, phi_r=[-np.pi / 2] * 2
        )
        eta = np.array([[eta0, eta0], [-eta0, eta0]])
        return SDFConfig(
            tones=tones, omega_m=[w_l, w_u], eta=eta, n_max=n_max
        ).with_preset("dispersive")

    def j12(w_l):
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            return mg.jij_matrix(make(w_l))[0, 1]

    w_l = brentq(lambda w: j12(w) - j_target, 2 * np.pi * 1.3e6, 2 * np.pi * 2.05e6, xtol=1e-3)
    return make(w_l)


@pytest.fixture(scope="session")
def dispersive_cfg():
    return dispersive_validation_config()
