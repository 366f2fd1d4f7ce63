"""Bound-state spectra of the Dirac equation with equal scalar and vector potentials.

Coulomb or oscillator radial potentials combined with one of three
non-central angular ring-potential families.
"""
from .angular import (
    angular_wavefunction,
    azimuthal,
    energy_upper_bound,
    solve_angular_params,
    theta_domain,
)
from .assembler import SpinorSample, assemble_spinor, lower_spinor, normalize, solve_coupled
from .model import (
    AngularSolution,
    AngularSpec,
    BoundState,
    Constants,
    ConvergenceError,
    DomainError,
    Family,
    GridFunction,
    NoAdmissibleBranch,
    RadialKind,
    RadialSpec,
    SpectraError,
    ValidationError,
    require_valid,
    rho_to_l,
    validate,
)
from .radial import RadialEnergyResult, radial_energy, radial_wavefunction

__version__ = "0.1.0"

__all__ = [
    "AngularSolution", "AngularSpec", "BoundState", "Constants", "ConvergenceError",
    "DomainError", "Family", "GridFunction", "NoAdmissibleBranch", "RadialEnergyResult",
    "RadialKind", "RadialSpec", "SpectraError", "SpinorSample", "ValidationError",
    "angular_wavefunction", "assemble_spinor", "azimuthal", "energy_upper_bound",
    "lower_spinor", "normalize", "radial_energy", "radial_wavefunction", "require_valid",
    "rho_to_l", "solve_angular_params", "solve_coupled", "theta_domain", "validate",
]
