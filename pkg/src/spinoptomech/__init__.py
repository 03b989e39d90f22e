"""Simulator for a photon-controlled spin-oscillator system.

A spin (two-level system) couples to a mechanical oscillator whose phonon
potential is modulated, through a quadratic optomechanical coupling, by the
Fock-state photon number of an ancillary cavity.  The package computes the
photon-dependent squeezed frame, the closed-system entanglement dynamics,
the dissipative four-level evolution with its concurrence, and the
dispersive-regime mechanical squeezing, each paired with an independent
numerical oracle.  A CLI turns the standard parameter sets into CSV files.
"""

from .errors import (
    CutoffTooSmall,
    InvariantBreach,
    NormalizationError,
    NotAState,
    ParameterInvalid,
    ResonantDivergence,
    SpinOptoError,
    StabilityViolation,
    StepTooLarge,
    ZeroFrequency,
)
from .frame import (
    SqueezedFrame,
    SystemParams,
    build_frame,
    rabi_period,
    rwa_ratio,
    stability_margin,
)
from .closed_dynamics import (
    AmplitudePair,
    PhotonSweepPoint,
    amplitudes,
    concurrence_pure,
    concurrence_vs_photons,
)
from .open_dynamics import (
    ConcurrenceSeries,
    DensityMatrix4,
    FockOracleTrace,
    OpenEvolutionTrace,
    concurrence_mixed,
    concurrence_trace,
    default_step,
    evolve,
    fock_lindblad_oracle,
    prepare_initial_state,
)
from .dispersive import (
    MomentState,
    MomentTrace,
    VariancePoint,
    dispersive_shift,
    dispersive_validity,
    effective_frequency,
    moment_oracle,
    variance_analytic,
    variance_steady,
)

__version__ = "0.1.0"

__all__ = [
    "SpinOptoError",
    "ParameterInvalid",
    "StabilityViolation",
    "ZeroFrequency",
    "ResonantDivergence",
    "NormalizationError",
    "StepTooLarge",
    "InvariantBreach",
    "CutoffTooSmall",
    "NotAState",
    "SystemParams",
    "SqueezedFrame",
    "build_frame",
    "stability_margin",
    "rabi_period",
    "rwa_ratio",
    "AmplitudePair",
    "PhotonSweepPoint",
    "amplitudes",
    "concurrence_pure",
    "concurrence_vs_photons",
    "DensityMatrix4",
    "OpenEvolutionTrace",
    "FockOracleTrace",
    "ConcurrenceSeries",
    "prepare_initial_state",
    "default_step",
    "evolve",
    "fock_lindblad_oracle",
    "concurrence_mixed",
    "concurrence_trace",
    "VariancePoint",
    "MomentState",
    "MomentTrace",
    "dispersive_shift",
    "effective_frequency",
    "dispersive_validity",
    "variance_analytic",
    "variance_steady",
    "moment_oracle",
    "__version__",
]
