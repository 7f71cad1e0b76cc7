"""Relative entropic uncertainty for a lattice-regularized free scalar field."""

from .entropy import (
    EntropyValue,
    Method,
    functional_entropy,
    gaussian_entropy,
    gaussian_relative_entropy,
    relative_entropy_quadrature,
    state_relative_entropy_to_optimal_coherent,
)
from .lattice import (
    LatticeModel,
    build_lattice,
    dispersion_continuum,
    position_space_covariance,
    vacuum_energy,
)
from .quadrature import QuadratureError
from .reur import (
    ReurReport,
    ReurViolation,
    check_reur,
    classical_limit_bound,
    heisenberg_chain_check,
    heisenberg_ratio,
    reur_bound,
    reur_report,
    thermal_bound_density_sweep,
    thermal_closed_forms,
)
from .smearing import (
    WavePacket,
    smeared_one_particle_bound,
    smeared_one_particle_reur,
    smeared_vacuum_variance,
)
from .states import (
    GaussianDensity,
    HermiteDensity,
    StateKind,
    StateSpec,
    bose_einstein,
    coherent_state,
    excited_state,
    hermite,
    hermite_explicit,
    mode_density,
    thermal_state,
    vacuum_state,
)

__version__ = "0.1.0"
