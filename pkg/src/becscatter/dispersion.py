"""Bulk polariton propagator of the infinite homogeneous medium.

Diagnostics for the two quasi-particle branches (atom-like near the bare
resonance, photon-like near the light line E = E0 + c p) and the reference
for the finite-slab infinite-length limit. The chemical potential is
ignored here: it is negligible against both the linewidth and the recoil
scale for every supported parameter set.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import SimulationParams
from .permittivity import lorentz_shift, sqrt_epsilon_at


@dataclass(frozen=True)
class BulkPropagator:
    p: float            # quasiparticle momentum, units of hbar*k0
    e_detuning: float   # E - E_n in units of hbar*gamma
    g_parallel: complex
    g_perp: complex


def bulk_propagator(p: float, detuning: float, density: float,
                    params: SimulationParams) -> BulkPropagator:
    """Longitudinal and transverse propagator components at momentum `p` and
    energy detuning `detuning` (in 1/gamma units, gamma = 1).

    g_parallel = 1 / (detuning - recoil p^2 - 2b + (i/2) sqrt(eps))
    g_perp     = same with +b instead of -2b and the resonant photon
                 coupling -3b * wE^2/(wE^2 - (c p)^2), wE = omega0 + detuning.

    An exact pole hit returns a signed-infinity component, never NaN.
    """
    b = lorentz_shift(density)
    x = sqrt_epsilon_at(detuning, density)
    kin = params.recoil * p * p
    base = detuning - kin + 0.5j * x

    den_par = base - 2.0 * b
    g_par = _safe_inverse(den_par)

    rr = params.resonance_ratio
    w_e = rr + detuning          # omega_E in gamma units
    cp = rr * p                  # c p / hbar in gamma units
    light = w_e * w_e - cp * cp
    if light == 0 and b > 0:
        # photon-coupling term diverges exactly on the light line: the
        # denominator is infinite there, the propagator vanishes
        g_perp = 0.0 + 0.0j
    else:
        coupling = 3.0 * b * w_e * w_e / light if b > 0 else 0.0
        g_perp = _safe_inverse(base + b - coupling)

    return BulkPropagator(p=float(p), e_detuning=float(detuning),
                          g_parallel=g_par, g_perp=g_perp)


def _safe_inverse(den: complex) -> complex:
    if den == 0:
        return complex(np.inf, 0.0)
    return 1.0 / den


def transverse_scan(p_values, detuning: float, density: float,
                    params: SimulationParams) -> np.ndarray:
    """|g_perp| over an array of momenta at fixed energy; used to locate the
    photon-branch pole for the slab bulk-limit check."""
    return np.array([
        abs(bulk_propagator(p, detuning, density, params).g_perp)
        for p in np.asarray(p_values, dtype=float)
    ])
