"""Ion-chain statics, normal modes, and sideband coupling parameters."""

import numpy as np
import pytest
from scipy.constants import atomic_mass, elementary_charge, epsilon_0, hbar, pi

from iontrap_lab import crystal as cr

YB = 171 * atomic_mass
E = elementary_charge


def chain(n=3, beta=None, omega_z=2 * np.pi * 5e5):
    if beta is None:
        beta = 0.1 if n <= 5 else 0.03
    return cr.IonChain(n_ions=n, mass=YB, omega_z=omega_z, aspect_beta=beta, charge=E)


class TestLengthScale:
    def test_power_law_in_omega(self):
        l1 = cr.length_scale(YB, 2 * np.pi * 5e5, E)
        l2 = cr.length_scale(YB, 4 * 2 * np.pi * 5e5, E)
        assert l2 == pytest.approx(l1 / 4 ** (2 / 3), rel=1e-12)

    def test_yb_reference_value(self):
        # frozen from the defining formula with CODATA constants
        ell = cr.length_scale(YB, 2 * np.pi * 5e5, E)
        expected = (E**2 / (4 * pi * epsilon_0 * YB * (2 * np.pi * 5e5) ** 2)) ** (1 / 3)
        assert ell == pytest.approx(expected, rel=1e-12)
        assert ell == pytest.approx(4.350e-6, rel=0.005)
        assert 1e-6 < ell < 1e-5  # few-micron regime

    def test_rejects_nonpositive(self):
        with pytest.raises(ValueError):
            cr.length_scale(-1.0, 1.0, 1.0)


class TestEquilibriumPositions:
    def test_two_ions_analytic(self):
        u = cr.equilibrium_positions(2)
        ref = 0.5 ** (2 / 3)
        assert u == pytest.approx([-ref, ref], abs=1e-10)

    def test_single_ion(self):
        assert cr.equilibrium_positions(1) == pytest.approx([0.0])

    def test_three_ions_analytic(self):
        # symmetric ansatz (-d, 0, d) reduces the force balance to
        # d = 1/d^2 + 1/(4 d^2), so d = (5/4)^(1/3)
        u = cr.equilibrium_positions(3)
        d = (5 / 4) ** (1 / 3)
        assert u == pytest.approx([-d, 0.0, d], abs=1e-10)

    @pytest.mark.parametrize("n", [2, 5, 12, 30, 64])
    def test_residual_and_antisymmetry(self, n):
        u = cr.equilibrium_positions(n)
        assert np.abs(cr._equilibrium_residual(u)).max() < 1e-12
        assert np.abs(u + u[::-1]).max() < 1e-12
        assert (np.diff(u) > 0).all()


class TestModeMatrices:
    def test_single_ion(self):
        a, b = cr.mode_matrices(np.zeros(1), beta=0.25)
        assert a[0, 0] == pytest.approx(1.0)
        assert b[0, 0] == pytest.approx(1 / 0.25)

    def test_two_ion_off_diagonal(self):
        u = cr.equilibrium_positions(2)
        a, _ = cr.mode_matrices(u, beta=0.1)
        du = 2 * 0.5 ** (2 / 3)
        assert a[0, 1] == pytest.approx(-2 / du**3, rel=1e-12)

    def test_linear_relation_between_families(self):
        rng = np.random.default_rng(1)
        u = cr.equilibrium_positions(5)
        for _ in range(3):
            beta = rng.uniform(0.05, 0.3)
            a, b = cr.mode_matrices(u, beta)
            rel = (0.5 + 1 / beta) * np.eye(5) - a / 2
            assert np.abs(b - rel).max() < 1e-12

    def test_coincident_positions_rejected(self):
        with pytest.raises(ValueError):
            cr.mode_matrices(np.array([0.0, 0.0]), beta=0.1)


class TestNormalModes:
    def test_com_mode(self):
        for n in (2, 4, 7):
            sp = cr.normal_modes(chain(n))
            assert sp.gamma_z[0] == pytest.approx(1.0, abs=1e-10)
            assert np.abs(sp.b[:, 0] - 1 / np.sqrt(n)).max() < 1e-8

    def test_stretch_mode(self):
        for n in (2, 3, 6):
            sp = cr.normal_modes(chain(n))
            assert sp.gamma_z[1] == pytest.approx(3.0, abs=1e-10)
            vec = sp.u_eq / np.linalg.norm(sp.u_eq)
            overlap = abs(vec @ sp.b[:, 1])
            assert overlap == pytest.approx(1.0, abs=1e-10)

    def test_three_ion_spectrum(self):
        sp = cr.normal_modes(chain(3))
        assert sp.gamma_z == pytest.approx([1.0, 3.0, 5.8], abs=1e-10)

    def test_radial_axial_relation(self):
        sp = cr.normal_modes(chain(5, beta=0.08))
        rel = (0.5 + 1 / 0.08) - sp.gamma_z / 2
        assert np.abs(sp.gamma_x - rel).max() < 1e-10

    def test_radial_order_reversed(self):
        sp = cr.normal_modes(chain(5))
        assert (np.diff(sp.gamma_z) > 0).all()
        assert (np.diff(sp.gamma_x) < 0).all()

    def test_omega_x2_identity(self):
        sp = cr.normal_modes(chain(4, beta=0.12))
        assert sp.omega_xm[1] == pytest.approx(
            np.sqrt(sp.omega_xm[0] ** 2 - sp.omega_zm[0] ** 2), rel=1e-10
        )

    def test_orthonormal_eigenvectors(self):
        sp = cr.normal_modes(chain(8))
        assert np.abs(sp.b.T @ sp.b - np.eye(8)).max() < 1e-10

    def test_eigenvalues_independent_of_omega_z(self):
        s1 = cr.normal_modes(chain(4, omega_z=2 * np.pi * 3e5))
        s2 = cr.normal_modes(chain(4, omega_z=2 * np.pi * 9e5))
        assert np.abs(s1.gamma_z - s2.gamma_z).max() < 1e-12
        assert s2.omega_zm == pytest.approx(3 * s1.omega_zm, rel=1e-12)

    def test_brute_force_eigenvalues(self):
        # characteristic-polynomial roots as an independent eigenvalue oracle
        for n in (3, 5, 8):
            u = cr.equilibrium_positions(n)
            a, _ = cr.mode_matrices(u, 0.1)
            roots = np.sort(np.real(np.roots(np.poly(a))))
            sp = cr.normal_modes(chain(n))
            assert np.abs(np.sort(sp.gamma_z) - roots).max() < 1e-8

    def test_shared_eigenvectors_between_families(self):
        u = cr.equilibrium_positions(5)
        a, b = cr.mode_matrices(u, 0.11)
        wa, va = np.linalg.eigh(a)
        wb, vb = np.linalg.eigh(b)
        # columns agree up to order reversal and sign
        for k in range(5):
            overlap = abs(va[:, k] @ vb[:, 5 - 1 - k])
            assert overlap == pytest.approx(1.0, abs=1e-9)

    def test_zigzag_error(self):
        bc = cr.critical_aspect_ratio(3)
        import warnings

        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            bad = cr.IonChain(3, YB, 2 * np.pi * 5e5, bc * 1.02, E)
        with pytest.raises(cr.ZigZagError) as err:
            cr.normal_modes(bad)
        assert err.value.beta_c == pytest.approx(bc, rel=1e-9)


class TestCriticalAspectRatio:
    def test_three_ion_value(self):
        assert cr.critical_aspect_ratio(3) == pytest.approx(2 / 4.8, rel=1e-9)

    def test_bisection_oracle(self):
        # independent oracle: bisect the sign of the smallest radial eigenvalue
        for n in (3, 5, 9):
            u = cr.equilibrium_positions(n)

            def min_radial(beta):
                _, b = cr.mode_matrices(u, beta)
                return np.linalg.eigvalsh(b).min()

            lo, hi = 0.01, 0.99
            for _ in range(60):
                mid = (lo + hi) / 2
                if min_radial(mid) > 0:
                    lo = mid
                else:
                    hi = mid
            assert cr.critical_aspect_ratio(n) == pytest.approx((lo + hi) / 2, abs=1e-9)

    def test_monotone_decrease_with_n(self):
        vals = [cr.critical_aspect_ratio(n) for n in range(3, 21)]
        assert all(b2 < b1 for b1, b2 in zip(vals, vals[1:]))

    def test_requires_three_ions(self):
        with pytest.raises(ValueError):
            cr.critical_aspect_ratio(2)


class TestApproxEigenvectors:
    def test_com_column(self):
        b = cr.approx_radial_eigenvectors(7)
        assert np.abs(b[:, 0] - 1 / np.sqrt(7)).max() < 1e-12

    def test_orthonormal(self):
        b = cr.approx_radial_eigenvectors(10)
        assert np.abs(b.T @ b - np.eye(10)).max() < 1e-10

    def test_overlap_with_uniform_surrogate(self):
        n = 10
        b = cr.approx_radial_eigenvectors(n)
        w, v = np.linalg.eigh(cr.uniform_chain_surrogate(n))
        for m in range(3):
            assert abs(v[:, m] @ b[:, m]) > 0.9


class TestLambDicke:
    def test_single_ion_window(self):
        # counter-propagating Raman pair at 355 nm on a 2 MHz mode
        k_eff = 2 * (2 * np.pi / 355e-9)
        eta = cr.single_ion_eta(k_eff, YB, 2 * np.pi * 2e6)
        assert 0.05 < eta < 0.15

    def test_omega_scaling(self):
        k = 2 * np.pi / 355e-9
        e1 = cr.single_ion_eta(k, YB, 2 * np.pi * 1e6)
        e2 = cr.single_ion_eta(k, YB, 2 * np.pi * 4e6)
        assert e2 == pytest.approx(e1 / 2, rel=1e-12)

    def test_recoil_crosscheck(self):
        k = 2 * (2 * np.pi / 355e-9)
        omega = 2 * np.pi * 2e6
        eta = cr.single_ion_eta(k, YB, omega)
        assert eta == pytest.approx(np.sqrt(cr.recoil_frequency(k, YB) / omega), rel=1e-12)

    def test_matrix_definition(self):
        sp = cr.normal_modes(chain(4))
        k = 2 * (2 * np.pi / 355e-9)
        ld = cr.lamb_dicke_params(sp, k)
        xi0 = np.sqrt(hbar / (2 * YB * sp.omega_xm))
        assert np.abs(ld.eta - sp.b * xi0[None, :] * k).max() < 1e-16
        assert np.isfinite(ld.eta).all()

    def test_sum_rule_identity(self):
        # sum_m eta_jm^2 = (k xi_single)^2 sum_m b_jm^2 omega_single/omega_m
        sp = cr.normal_modes(chain(5))
        k = 2 * (2 * np.pi / 355e-9)
        ld = cr.lamb_dicke_params(sp, k)
        omega_ref = sp.omega_xm[0]
        xi_ref = np.sqrt(hbar / (2 * YB * omega_ref))
        direct = (ld.eta**2).sum(axis=1)
        recomputed = (k * xi_ref) ** 2 * (sp.b**2 * (omega_ref / sp.omega_xm)[None, :]).sum(axis=1)
        assert np.abs(direct - recomputed).max() < 1e-12

    def test_requires_positive_k(self):
        sp = cr.normal_modes(chain(2))
        with pytest.raises(ValueError):
            cr.lamb_dicke_params(sp, -1.0)
