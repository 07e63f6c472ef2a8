import math

import numpy as np
import pytest

from becscatter import kernels
from becscatter.permittivity import (
    Permittivity,
    epsilon_sweep,
    local_sqrt_epsilon,
    lorentz_shift,
    residual,
    solve_epsilon,
)


class TestLorentzShift:
    def test_zero_density(self):
        assert lorentz_shift(0.0) == 0.0

    def test_reference_density(self):
        # pi * n0 in gamma units from the dipole-linewidth relation
        assert lorentz_shift(0.05) == pytest.approx(math.pi * 0.05, rel=1e-15)

    def test_linear_in_density(self):
        assert lorentz_shift(0.1) == 2.0 * lorentz_shift(0.05)

    def test_negative_density_rejected(self):
        with pytest.raises(ValueError):
            lorentz_shift(-1e-6)


class TestSolveEpsilon:
    def test_vacuum_is_exactly_one(self):
        for d in (-7.0, -0.3, 0.0, 0.4, 12.0):
            eps = solve_epsilon(d, 0.0)
            assert abs(eps.epsilon - 1.0) < 1e-12
            assert abs(eps.sqrt_epsilon - 1.0) < 1e-12

    def test_far_detuned_approaches_vacuum(self):
        # leading asymptote eps ~ 1 - 3b/delta
        eps = solve_epsilon(50.0, 0.05)
        b = lorentz_shift(0.05)
        assert abs(eps.epsilon - 1.0) < 0.05
        assert eps.epsilon.imag < abs(eps.epsilon.real - 1.0)
        asym = 1.0 - 3.0 * b / (50.0 + b)
        assert abs(eps.epsilon - asym) < 5e-4

    def test_residual_property_randomized(self):
        # below the stop-band threshold (~0.085) absorption is strictly
        # positive; inside the dense-medium stop band eps is real negative
        # (evanescent, lossless), so only eps'' >= 0 holds there
        rng = np.random.default_rng(42)
        for _ in range(1000):
            d = float(rng.uniform(-10, 10))
            n0 = float(rng.uniform(0, 0.2))
            eps = solve_epsilon(d, n0)
            assert residual(d, n0, eps) <= 1e-10
            assert eps.epsilon.imag >= -1e-9
            if 0 < n0 < 0.08:
                assert eps.epsilon.imag > 0.0

    def test_branch_continuity_along_sweep(self):
        deltas = np.arange(-4.0, 4.0 + 1e-12, 0.01)
        eps = epsilon_sweep(deltas, 0.05)
        steps = np.abs(np.diff(eps))
        assert np.max(steps) < 0.1

    def test_mu_c_displaces_argument_exactly(self):
        shifted = solve_epsilon(0.3, 0.05, mu_c=1e-3)
        plain = solve_epsilon(0.3 + 1e-3, 0.05, mu_c=0.0)
        assert shifted.epsilon == plain.epsilon
        assert shifted.sqrt_epsilon == plain.sqrt_epsilon

    def test_passivity_strict_below_stop_band(self):
        for d in np.linspace(-10, 10, 41):
            assert solve_epsilon(float(d), 0.05).epsilon.imag > 0

    def test_stop_band_is_evanescent_not_amplifying(self):
        # dense medium: a detuning window with real negative eps and a
        # purely imaginary decaying sqrt
        eps = solve_epsilon(0.8, 0.15)
        assert abs(eps.epsilon.imag) < 1e-9
        assert eps.epsilon.real < 0
        assert eps.sqrt_epsilon.imag > 0
        assert abs(eps.sqrt_epsilon.real) < 1e-9

    def test_branch_continuity_through_stop_band(self):
        deltas = np.arange(0.2, 1.4, 1e-3)
        eps = epsilon_sweep(deltas, 0.15)
        assert np.max(np.abs(np.diff(eps))) < 0.3
        # the band is entered and left along the sweep
        in_gap = np.abs(eps.imag) < 1e-12
        assert in_gap.any() and not in_gap.all()

    def test_resonance_curve_shape(self):
        # single absorption peak, dispersive real part crossing nearby
        deltas = np.linspace(-4, 4, 801)
        eps = epsilon_sweep(deltas, 0.05)
        im = eps.imag
        interior = (im[1:-1] > im[:-2]) & (im[1:-1] > im[2:])
        peaks = np.flatnonzero(interior) + 1
        assert len(peaks) == 1
        re_minus_1 = eps.real - 1.0
        sign_changes = np.flatnonzero(np.diff(np.sign(re_minus_1)) != 0)
        assert len(sign_changes) >= 1
        assert np.min(np.abs(deltas[sign_changes] - deltas[peaks[0]])) < 1.0

    def test_local_sqrt_vectorized_matches_scalar(self):
        dens = np.array([0.0, 0.01, 0.05, 0.2])
        xs = local_sqrt_epsilon(dens, 0.7)
        for d, x in zip(dens, xs):
            assert x == solve_epsilon(0.7, float(d)).sqrt_epsilon

    def test_continuity_in_density(self):
        dens = np.linspace(0.0, 0.2, 2001)
        xs = local_sqrt_epsilon(dens, 0.0)
        assert np.max(np.abs(np.diff(xs))) < 0.01


class TestBackends:
    def test_numpy_path_matches_active_backend(self):
        rng = np.random.default_rng(3)
        d = rng.uniform(-10, 10, 256)
        b = math.pi * rng.uniform(0, 0.2, 256)
        roots = kernels._cubic_roots_np(d, b, eta=kernels._ETA)
        x_np = kernels._polish_np(kernels._select_root_np(roots, b), d, b)
        x_active = kernels.cubic_sqrt_eps(d, b)
        assert np.max(np.abs(x_np - x_active)) < 1e-13


class TestPermittivityType:
    def test_rejects_gain_medium(self):
        with pytest.raises(ValueError):
            Permittivity(epsilon=1.0 - 0.1j, sqrt_epsilon=complex(math.sqrt(1.0)),
                         detuning=0.0, density=0.05)

    def test_rejects_mismatched_sqrt(self):
        with pytest.raises(ValueError):
            Permittivity(epsilon=2.0 + 0.1j, sqrt_epsilon=1.0 + 0.0j,
                         detuning=0.0, density=0.05)
