"""Dimensionless unit system, physical parameters, order-parameter profiles
and the shared Fourier-mode representation.

Unit conventions used throughout the package:

* frequencies (detunings, shifts, rates) in units of the natural linewidth
  ``gamma``,
* wavenumbers in units of the resonant wavenumber ``k0``,
* lengths in units of ``1/k0`` (so one resonant wavelength is ``2*pi``).

Detunings handed to the solvers are measured from the displaced resonance
``omega0 - mu_c`` (the chemical potential red-shifts the resonance seen by
an excitation leaving the condensate); with the default ``mu_c = 0`` this
coincides with the bare atomic resonance.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

TWO_PI = 2.0 * math.pi


class ProfileKind(str, enum.Enum):
    UNIFORM = "uniform"
    COSINE = "cosine"
    SPLIT = "split"


@dataclass(frozen=True)
class SimulationParams:
    """Dimensionless physical configuration of one scattering run.

    density          atomic density n0 in units of 1/k0^3
    slab_depth       slab length L in units of the resonant wavelength
    gamma            natural linewidth; it is the frequency unit and must be 1
    mu_c             chemical potential in units of gamma
    recoil           single-photon recoil frequency hbar*k0^2/(2 m) in gamma
    resonance_ratio  omega0 / gamma
    delta_q          fragment momentum modulation, units of k0 (split profile)
    """

    density: float
    slab_depth: float
    gamma: float = 1.0
    mu_c: float = 0.0
    recoil: float = 1e-3
    resonance_ratio: float = 1e8
    delta_q: float = 0.5

    def __post_init__(self):
        if self.density < 0:
            raise ValueError(f"density must be >= 0, got {self.density}")
        if self.slab_depth <= 0:
            raise ValueError(f"slab_depth must be > 0, got {self.slab_depth}")
        if self.gamma != 1.0:
            raise ValueError("gamma is the frequency unit and must be 1.0")
        # validity regime of the model: mu_c below the recoil scale, recoil
        # far below the linewidth
        if self.mu_c > self.recoil:
            raise ValueError(
                f"mu_c={self.mu_c} exceeds the recoil frequency {self.recoil}"
            )
        if self.mu_c < 0:
            raise ValueError(f"mu_c must be >= 0, got {self.mu_c}")
        if not self.recoil < 0.1:
            raise ValueError(f"recoil must be << 1 in units of gamma, got {self.recoil}")
        if self.resonance_ratio < 1e3:
            raise ValueError(
                f"resonance_ratio must be >> 1 (>= 1e3), got {self.resonance_ratio}"
            )
        if self.delta_q < 0:
            raise ValueError(f"delta_q must be >= 0, got {self.delta_q}")

    @property
    def length(self) -> float:
        """Slab length in units of 1/k0."""
        return TWO_PI * self.slab_depth

    def optical_wavenumber(self, detuning: float):
        """Wavenumber q = omega/c of light at `detuning` (from the displaced
        resonance), in units of k0.

        omega = omega0 - mu_c + detuning, so q/k0 = 1 + (detuning - mu_c)/omega0.
        The correction is O(1e-8) but kept explicit so the approximation
        stays testable rather than silently dropped.
        """
        return 1.0 + (detuning - self.mu_c) / self.resonance_ratio


@dataclass(frozen=True)
class OrderParameterProfile:
    """Condensate order parameter as a finite sum of windowed plane waves.

    Xi(z) = sum_a amplitudes[a] * exp(i * wavenumbers[a] * z) on the slab
    z in (-L/2, L/2), identically zero outside. Wavenumbers are in units of
    k0 and z in units of 1/k0.
    """

    amplitudes: tuple[complex, ...]
    wavenumbers: tuple[float, ...]
    kind: ProfileKind
    length: float

    def __post_init__(self):
        if len(self.amplitudes) != len(self.wavenumbers):
            raise ValueError("amplitudes and wavenumbers must pair up")

    def evaluate(self, z) -> np.ndarray:
        """Xi(z) for scalar or array z (zero outside the slab)."""
        z = np.asarray(z, dtype=float)
        out = np.zeros(z.shape, dtype=complex)
        for amp, kap in zip(self.amplitudes, self.wavenumbers):
            out += amp * np.exp(1j * kap * z)
        inside = np.abs(z) < self.length / 2
        return np.where(inside, out, 0.0)

    def density_at(self, z) -> np.ndarray:
        return np.abs(self.evaluate(z)) ** 2

    def total_number(self) -> float:
        """Integral of |Xi|^2 over the slab (atoms per unit transverse area,
        in k0 units), from the closed-form component sums."""
        amps = np.asarray(self.amplitudes)
        kaps = np.asarray(self.wavenumbers)
        total = 0.0 + 0.0j
        for a, ka in zip(amps, kaps):
            for b, kb in zip(amps, kaps):
                total += a * np.conj(b) * slab_window(ka - kb, self.length)
        return float(total.real)


def make_profile(kind: ProfileKind | str, params: SimulationParams) -> OrderParameterProfile:
    """Build one of the three order-parameter configurations.

    uniform : Xi = sqrt(n0)
    cosine  : Xi = sqrt(n0) * cos(pi z / L)
    split   : Xi = sqrt(2 n0) * cos(pi z / L) * cos(delta_q z), two
              counter-propagating fragments with relative momentum 2*delta_q
    """
    kind = ProfileKind(kind)
    n0 = params.density
    L = params.length
    if kind is ProfileKind.UNIFORM:
        amps = (complex(math.sqrt(n0)),)
        kaps = (0.0,)
    elif kind is ProfileKind.COSINE:
        half = complex(math.sqrt(n0) / 2.0)
        amps = (half, half)
        kaps = (math.pi / L, -math.pi / L)
    elif kind is ProfileKind.SPLIT:
        # sqrt(2 n0) cos(pi z/L) cos(dq z) expanded into four exponentials
        quarter = complex(math.sqrt(2.0 * n0) / 4.0)
        dq = params.delta_q
        amps = (quarter, quarter, quarter, quarter)
        kaps = (
            math.pi / L + dq,
            math.pi / L - dq,
            -math.pi / L + dq,
            -math.pi / L - dq,
        )
    else:  # pragma: no cover - enum is exhaustive
        raise ValueError(f"unknown profile kind: {kind!r}")
    return OrderParameterProfile(amps, kaps, kind, L)


@dataclass(frozen=True)
class FourierGrid:
    """Symmetric Fourier grid k_s = 2*pi*s/L, s = -cutoff..cutoff."""

    cutoff: int
    length: float
    mode_indices: np.ndarray = field(repr=False, default=None)
    wavenumbers: np.ndarray = field(repr=False, default=None)

    def __post_init__(self):
        if self.cutoff < 1:
            raise ValueError("cutoff must be >= 1")
        s = np.arange(-self.cutoff, self.cutoff + 1)
        object.__setattr__(self, "mode_indices", s)
        object.__setattr__(self, "wavenumbers", TWO_PI * s / self.length)

    @property
    def size(self) -> int:
        return 2 * self.cutoff + 1

    def refined(self, factor: int = 2) -> "FourierGrid":
        return FourierGrid(self.cutoff * factor, self.length)


def default_cutoff(params: SimulationParams, kind: ProfileKind | str,
                   detuning: float = 0.0, margin: float = 4.0) -> int:
    """Smallest cutoff with k_max >= margin * (q + 2*delta_q) so the
    Bragg-coupled modes and the light-line region sit inside the grid."""
    kind = ProfileKind(kind)
    dq = params.delta_q if kind is ProfileKind.SPLIT else 0.0
    q = params.optical_wavenumber(detuning)
    k_need = margin * (q + 2.0 * dq)
    return max(1, math.ceil(k_need * params.length / TWO_PI))


def make_grid(params: SimulationParams, kind: ProfileKind | str,
              detuning: float = 0.0, margin: float = 4.0) -> FourierGrid:
    return FourierGrid(default_cutoff(params, kind, detuning, margin), params.length)


def slab_window(x, L: float):
    """Integral of exp(i x z) over z in (-L/2, L/2): 2 sin(xL/2)/x.

    Entire in x (the x -> 0 limit L is taken via sinc), so exact grid hits
    never divide by zero.
    """
    x = np.asarray(x, dtype=float)
    return L * np.sinc(x * L / TWO_PI)


def window_transform(profile: OrderParameterProfile, k):
    """Fourier transform of the windowed order parameter,
    W(k) = integral of Xi(z) exp(i k z) dz over the slab."""
    k = np.asarray(k, dtype=float)
    out = np.zeros(k.shape, dtype=complex)
    for amp, kap in zip(profile.amplitudes, profile.wavenumbers):
        out += amp * slab_window(k + kap, profile.length)
    return out


def density_fourier(profile: OrderParameterProfile, grid: FourierGrid) -> np.ndarray:
    """Convolution matrix of the local density on the mode grid:

    N[s, s'] = (1/L) * integral of |Xi(z)|^2 exp(-i (k_s - k_s') z) dz,

    in closed form from the plane-wave components. Hermitian; for the
    uniform profile it is exactly n0 * identity.
    """
    if not math.isclose(grid.length, profile.length):
        raise ValueError("grid and profile were built for different slab lengths")
    L = profile.length
    ks = grid.wavenumbers
    dk = ks[:, None] - ks[None, :]
    out = np.zeros(dk.shape, dtype=complex)
    for amp_a, kap_a in zip(profile.amplitudes, profile.wavenumbers):
        for amp_b, kap_b in zip(profile.amplitudes, profile.wavenumbers):
            out += amp_a * np.conj(amp_b) * slab_window(kap_a - kap_b - dk, L) / L
    return out
