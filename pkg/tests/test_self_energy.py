import numpy as np
import pytest

from becscatter import kernels
from becscatter.core import (
    FourierGrid,
    OrderParameterProfile,
    ProfileKind,
    SimulationParams,
    make_profile,
)
from becscatter.polariton import self_energy, uniform_self_energy_reference

import oracles


def params_for(**kw):
    base = dict(density=0.05, slab_depth=2.0, delta_q=0.5)
    base.update(kw)
    return SimulationParams(**base)


class TestClosedFormOracle:
    def test_uniform_matches_reference_randomized(self):
        # kernel path vs the explicit pole + boundary closed forms
        rng = np.random.default_rng(7)
        for _ in range(40):
            p = params_for(slab_depth=float(rng.uniform(0.5, 20.0)),
                           density=float(rng.uniform(1e-3, 0.2)))
            d = float(rng.uniform(-3.0, 3.0))
            grid = FourierGrid(int(rng.integers(3, 25)), p.length)
            prof = make_profile("uniform", p)
            sig = self_energy(prof, grid, d, p).sigma
            ref = uniform_self_energy_reference(grid, d, p)
            scale = np.max(np.abs(ref))
            assert np.max(np.abs(sig - ref)) <= 1e-10 * scale

    def test_uniform_matches_reference_on_light_line(self):
        # L = 10 wavelengths puts grid modes within ~1e-9 of the light line
        p = params_for(slab_depth=10.0)
        prof = make_profile("uniform", p)
        grid = FourierGrid(45, p.length)
        for d in (0.0, 0.1, -2.0):
            sig = self_energy(prof, grid, d, p).sigma
            ref = uniform_self_energy_reference(grid, d, p)
            assert np.max(np.abs(sig - ref)) <= 1e-10 * np.max(np.abs(ref))

    def test_diagonal_pole_term_dominates_far_from_light_line(self):
        # large-k diagonal approaches the resonant pole expression,
        # boundary piece suppressed by 1/L
        p = params_for(slab_depth=50.0)
        prof = make_profile("uniform", p)
        grid = FourierGrid(130, p.length)
        d = 0.0
        sig = self_energy(prof, grid, d, p).sigma
        q = p.optical_wavenumber(d)
        i = np.argmin(np.abs(grid.wavenumbers - 2.0))  # k_s = 2, far from q
        ks = grid.wavenumbers[i]
        pole = 3.0 * np.pi * p.density * q * q / (q * q - ks * ks)
        assert abs(sig[i, i] - pole) < 0.02 * abs(pole)


class TestQuadratureOracle:
    @pytest.mark.parametrize("kind", list(ProfileKind))
    def test_matches_2d_quadrature(self, kind):
        p = params_for()
        prof = make_profile(kind, p)
        grid = FourierGrid(8, p.length)
        sig = self_energy(prof, grid, 0.0, p).sigma
        ref = oracles.sigma_quadrature(prof, grid.wavenumbers, 0.0, p)
        scale = np.max(np.abs(ref))
        assert np.max(np.abs(sig - ref)) <= 1e-8 * scale

    def test_matches_quadrature_off_resonance(self):
        p = params_for()
        prof = make_profile("cosine", p)
        grid = FourierGrid(6, p.length)
        sig = self_energy(prof, grid, 1.7, p).sigma
        ref = oracles.sigma_quadrature(prof, grid.wavenumbers, 1.7, p)
        assert np.max(np.abs(sig - ref)) <= 1e-8 * np.max(np.abs(ref))

    def test_near_pole_commensurate_slab(self):
        # light line essentially on the grid; closed-form limit vs quadrature
        p = params_for(slab_depth=10.0)
        prof = make_profile("uniform", p)
        ks = 2.0 * np.pi * np.arange(-8, 9) / p.length + 0.8
        # shift the window so k = q sits strictly inside evaluated range
        sig = kernels.sigma_block(ks, ks, np.asarray(prof.amplitudes, complex),
                                  np.asarray(prof.wavenumbers, float),
                                  p.optical_wavenumber(0.1), p.length)
        ref = oracles.sigma_quadrature(prof, ks, 0.1, p)
        assert np.max(np.abs(sig - ref)) <= 1e-8 * np.max(np.abs(ref))


class TestStructure:
    def test_zero_order_parameter_gives_zero(self):
        p = params_for(density=0.0)
        prof = make_profile("uniform", p)
        grid = FourierGrid(5, p.length)
        assert np.all(self_energy(prof, grid, 0.3, p).sigma == 0)

    @pytest.mark.parametrize("kind", list(ProfileKind))
    def test_index_reversal_reciprocity(self, kind):
        # real order parameter: K(z,z') = K(z',z), so Sigma[s,s'] = Sigma[-s',-s]
        p = params_for()
        prof = make_profile(kind, p)
        grid = FourierGrid(7, p.length)
        sig = self_energy(prof, grid, 0.4, p).sigma
        flipped = sig[::-1, ::-1].T
        assert np.max(np.abs(sig - flipped)) <= 1e-13 * np.max(np.abs(sig))

    def test_grid_must_cover_profile(self):
        p = params_for(delta_q=3.0)
        prof = make_profile("split", p)
        grid = FourierGrid(1, p.length)
        with pytest.raises(ValueError):
            self_energy(prof, grid, 0.0, p)

    def test_complex_amplitude_profile_accepted(self):
        # single travelling-wave component (complex field, real density)
        p = params_for()
        prof = OrderParameterProfile((0.1j,), (0.5,), ProfileKind.UNIFORM, p.length)
        grid = FourierGrid(6, p.length)
        sig = self_energy(prof, grid, 0.0, p).sigma
        ref = oracles.sigma_quadrature(prof, grid.wavenumbers, 0.0, p)
        assert np.max(np.abs(sig - ref)) <= 1e-8 * np.max(np.abs(ref))


class TestBackends:
    def test_numpy_twin_matches_active_backend(self):
        p = params_for()
        prof = make_profile("split", p)
        grid = FourierGrid(9, p.length)
        q = p.optical_wavenumber(0.2)
        amps = np.asarray(prof.amplitudes, complex)
        kaps = np.asarray(prof.wavenumbers, float)
        active = kernels.sigma_block(grid.wavenumbers, grid.wavenumbers,
                                     amps, kaps, q, p.length)
        pure = kernels._sigma_block_np(grid.wavenumbers, grid.wavenumbers,
                                       amps, kaps, q, p.length)
        assert np.max(np.abs(active - pure)) <= 1e-13 * np.max(np.abs(pure))

    def test_diag_matches_block_diagonal(self):
        p = params_for()
        prof = make_profile("cosine", p)
        ks = np.linspace(2.1, 30.0, 40)
        amps = np.asarray(prof.amplitudes, complex)
        kaps = np.asarray(prof.wavenumbers, float)
        q = p.optical_wavenumber(0.0)
        diag = kernels.sigma_diag(ks, amps, kaps, q, p.length)
        block = kernels.sigma_block(ks, ks, amps, kaps, q, p.length)
        assert np.max(np.abs(diag - np.diag(block))) < 1e-14
