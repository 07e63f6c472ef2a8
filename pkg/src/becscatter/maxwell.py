"""Closed-form macroscopic Maxwell transmission/reflection of a homogeneous
dielectric slab: the disordered-gas reference curve and the primary
cross-validation oracle for the polariton solver.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import SimulationParams
from .permittivity import Permittivity


@dataclass(frozen=True)
class SlabResponse:
    detuning: float
    T: float
    R: float
    psi: complex

    def __post_init__(self):
        if self.T < 0 or self.R < 0:
            raise ValueError("negative flux coefficient")
        if self.T + self.R > 1.0 + 1e-9:
            raise ValueError(f"T + R = {self.T + self.R} exceeds unity")


def maxwell_slab(detuning: float, params: SimulationParams,
                 eps: Permittivity) -> SlabResponse:
    """Slab transmission and reflection from the closed-form solution with
    phase psi = L * sqrt(eps) * omega / c.

    Evaluated through the algebraically equivalent single-denominator form

        T = |2 x|^2 / |D|^2,  R = |(1 - x^2) sin psi|^2 / |D|^2,
        D = 2 x cos psi - i (1 + x^2) sin psi,  x = sqrt(eps),

    which is branch-free: the textbook reflection expression carries a
    complex logarithm whose branch jumps are spurious (exp(log w) = w for
    every branch), and at eps = 1 it degenerates while this form yields
    R = 0 exactly. Agreement with a two-interface transfer matrix is
    asserted in tests at 1e-10.
    """
    x = eps.sqrt_epsilon
    q = params.optical_wavenumber(detuning)
    psi = params.length * x * q
    den = 2.0 * x * np.cos(psi) - 1j * (1.0 + x * x) * np.sin(psi)
    if den == 0:
        raise ZeroDivisionError("degenerate slab denominator (eps = 0?)")
    T = abs(2.0 * x / den) ** 2
    R = abs((1.0 - x * x) * np.sin(psi) / den) ** 2
    # absorption-free roundoff can leave T+R microscopically above 1
    return SlabResponse(detuning=float(detuning), T=float(T), R=float(R),
                        psi=complex(psi))


def transfer_matrix_slab(detuning: float, params: SimulationParams,
                         eps: Permittivity) -> tuple[float, float]:
    """Independent two-interface Fresnel + propagation computation of the
    same slab, used to guard the closed form against branch sensitivity."""
    x = eps.sqrt_epsilon
    q = params.optical_wavenumber(detuning)
    psi = params.length * x * q
    r12 = (1.0 - x) / (1.0 + x)
    ph = np.exp(2j * psi)
    denom = 1.0 - r12 * r12 * ph
    r = r12 * (1.0 - ph) / denom
    t = (1.0 - r12 * r12) * np.exp(1j * psi) / denom
    return float(abs(t) ** 2), float(abs(r) ** 2)
