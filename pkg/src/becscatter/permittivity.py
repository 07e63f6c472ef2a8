"""Self-consistent dielectric permittivity of the condensate.

The over-condensate medium responds like a resonant gas whose permittivity
obeys a self-consistency relation: with b the local-field (Lorentz-Lorenz)
shift and x = sqrt(eps),

    eps = (delta_eff - 2 b + (i/2) x) / (delta_eff + b + (i/2) x),

equivalent to the cubic (i/2) x^3 + (delta_eff + b) x^2 - (i/2) x
- (delta_eff - 2 b) = 0. The condensate binding energy displaces the
frequency argument: the permittivity at physical detuning ``delta``
(measured from the bare resonance) solves the relation at
``delta_eff = delta + mu_c``, so

    solve_epsilon(delta, n, mu_c) == solve_epsilon(delta + mu_c, n, 0)

holds exactly. The physical root carries Im eps >= 0 (passive medium) and
Im sqrt(eps) >= 0 (damped wave) and tends to 1 far from resonance.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import kernels


@dataclass(frozen=True)
class Permittivity:
    """Complex permittivity at one detuning, with the selected square root."""

    epsilon: complex
    sqrt_epsilon: complex
    detuning: float
    density: float

    def __post_init__(self):
        if self.epsilon.imag < -1e-9:
            raise ValueError(f"eps''={self.epsilon.imag} < 0: not a passive medium")
        if self.sqrt_epsilon.imag < -1e-9:
            raise ValueError("sqrt(eps) must lie in the upper half plane")
        if abs(self.sqrt_epsilon**2 - self.epsilon) > 1e-9 * max(1.0, abs(self.epsilon)):
            raise ValueError("sqrt_epsilon does not square to epsilon")


def lorentz_shift(density: float) -> float:
    """Static local-field shift b in units of gamma: b = pi * n0 * gamma
    for density n0 in 1/k0^3 units.

    Follows from b = 4 pi n0 d0^2 / (3 hbar) with the two-level
    dipole-linewidth relation d0^2 = 3 hbar gamma / (4 k0^3).
    """
    if density < 0:
        raise ValueError(f"density must be >= 0, got {density}")
    return math.pi * density


def sqrt_epsilon_at(delta_eff, density):
    """Physical sqrt(eps) at effective detuning(s) `delta_eff`; vectorized."""
    return kernels.cubic_sqrt_eps(delta_eff, lorentz_shift(density))


def solve_epsilon(detuning: float, density: float, mu_c: float = 0.0) -> Permittivity:
    """Permittivity at physical detuning `detuning` (units of gamma, from the
    bare resonance) for the given dimensionless density.

    The chemical potential displaces the argument of the self-consistency
    relation, so the cubic is solved at detuning + mu_c; with mu_c = 0 this
    is the disordered-gas permittivity.
    """
    x = kernels.cubic_sqrt_eps(detuning + mu_c, lorentz_shift(density))
    return Permittivity(epsilon=x * x, sqrt_epsilon=x,
                        detuning=float(detuning), density=float(density))


def epsilon_sweep(detunings, density: float, mu_c: float = 0.0):
    """Vectorized eps(detuning) over an array of physical detunings."""
    x = kernels.cubic_sqrt_eps(np.asarray(detunings, dtype=float) + mu_c,
                               lorentz_shift(density))
    return x * x


def local_sqrt_epsilon(densities, delta_eff):
    """sqrt(eps) for an array of local densities at one effective detuning.

    Used for inhomogeneous profiles where eps(z) follows the local density
    |Xi(z)|^2.
    """
    densities = np.asarray(densities, dtype=float)
    return kernels.cubic_sqrt_eps(delta_eff, math.pi * densities)


def residual(detuning: float, density: float, eps: Permittivity,
             mu_c: float = 0.0) -> float:
    """Relative imbalance of the self-consistency relation for `eps` at the
    requested physical detuning; used by the verification tests."""
    b = lorentz_shift(density)
    d = detuning + mu_c
    rhs = (d - 2.0 * b + 0.5j * eps.sqrt_epsilon) / (d + b + 0.5j * eps.sqrt_epsilon)
    return abs(eps.epsilon - rhs) / max(1.0, abs(rhs))
