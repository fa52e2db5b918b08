"""Nonreciprocal transitions in a driven cyclic three-level atom and
one-way single-photon scattering between two coupled-resonator waveguides."""
from .atom import (
    CyclicAtomParams,
    EffectiveTwoLevel,
    adiabatic_c_amplitude,
    adiabatic_eliminate,
    build_effective_hamiltonian,
    build_full_hamiltonian,
    coherent_dissipative_coupling,
)
from .dynamics import DynamicsPoint, SweepResult, sweep_flux, sweep_time, transition_probabilities
from .errors import (
    BandEdgeError,
    DomainError,
    IntegrationError,
    InvalidInputError,
    NoHalfMaxError,
    NonrecipError,
    NoPropagatingModeError,
    PoleError,
)
from .operators import expm, integrate_linear
from .scattering import (
    FlowMatrix,
    FwhmResult,
    ScatteringQuery,
    ScatteringResult,
    WaveguideSystem,
    dispersion,
    half_max_k,
    half_max_k_numeric,
    required_jba,
    scattering_flows,
    scattering_matrix,
    solve_k,
    sweep_k,
)
from .verify import VerifyReport, verify_paper_claims

__version__ = "0.1.0"
