"""Exception types raised by the simulator."""


class SpinOptoError(Exception):
    """Base class for all domain errors raised by this package."""


class ParameterInvalid(SpinOptoError):
    """A system parameter is outside its allowed domain."""


class StabilityViolation(SpinOptoError):
    """The photon-modified phonon potential is no longer confining.

    Raised when 4*n*g/omega_b >= 1, where the squeezing amplitude diverges.
    """


class ZeroFrequency(SpinOptoError):
    """The rescaled Rabi frequency vanishes, so no oscillation period exists."""


class ResonantDivergence(SpinOptoError):
    """The spin-oscillator detuning is zero, so the dispersive shift diverges."""


class NormalizationError(SpinOptoError):
    """A state vector is not normalized within tolerance."""


class StepTooLarge(SpinOptoError):
    """The requested integration step exceeds the stability/accuracy bound."""


class InvariantBreach(SpinOptoError):
    """An integrated state violates trace or positivity tolerances.

    Signals integrator misconfiguration rather than bad user input.
    """


class CutoffTooSmall(SpinOptoError):
    """Population leaked to the highest retained Fock level of the oracle."""


class NotAState(SpinOptoError):
    """A supplied density matrix fails trace or positivity checks."""
