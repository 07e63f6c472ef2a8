"""1D light scattering from a Bose-Einstein condensate slab.

Spectral polariton scattering solver for windowed plane-wave order
parameters, a self-consistent resonant permittivity, the macroscopic
Maxwell slab reference, bulk polariton dispersion diagnostics, and sweep
tooling producing deterministic CSV/JSON tables.
"""

from .core import (
    FourierGrid,
    OrderParameterProfile,
    ProfileKind,
    SimulationParams,
    default_cutoff,
    density_fourier,
    make_grid,
    make_profile,
    slab_window,
    window_transform,
)
from .dispersion import BulkPropagator, bulk_propagator
from .maxwell import SlabResponse, maxwell_slab, transfer_matrix_slab
from .permittivity import (
    Permittivity,
    epsilon_sweep,
    local_sqrt_epsilon,
    lorentz_shift,
    solve_epsilon,
)
from .polariton import (
    ConvergenceError,
    PolaritonSystem,
    ScatterCoefficients,
    SelfEnergyMatrix,
    SolveError,
    assemble_operator,
    build_system,
    converge,
    convolution_matrices,
    s_matrix,
    scatter,
    self_energy,
    solve_propagator,
    uniform_self_energy_reference,
)
from .runner import (
    BraggScanTable,
    SpectrumTable,
    forward_only_coefficients,
    run_bragg_scan,
    run_spectrum,
)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
