"""Photon-dependent squeezed frame of the spin-oscillator system.

The mechanical oscillator sits in an ancillary cavity holding a Fock state
with ``n`` photons, coupled quadratically (strength ``g``) to the phonon
displacement.  Projecting onto the Fock state and applying a Bogoliubov
(squeezing) transformation with amplitude

    r_n = -(1/4) * ln(1 - 4*n*g/omega_b)

diagonalizes the photon-modified phonon potential and renormalizes the
mechanical frequency and the spin-oscillator coupling:

    omega_n  = exp(-2*r_n) * omega_b
    lambda_n = exp(+r_n)   * lambda

Everything downstream (Jaynes-Cummings dynamics, dissipative evolution,
dispersive squeezing) is driven by these frame quantities, the detuning
Delta = Omega - omega_n, the quantum Rabi frequency Omega_n = 2*lambda_n
and its detuning-rescaled version Omega_tilde_n = sqrt(Omega_n^2 + Delta^2).

All rates and frequencies are stored as multiples of the oscillator decay
rate kappa; times are in units of 1/kappa.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import ParameterInvalid, StabilityViolation, ZeroFrequency

__all__ = [
    "SystemParams",
    "SqueezedFrame",
    "build_frame",
    "stability_margin",
    "rabi_period",
    "rwa_ratio",
]


@dataclass(frozen=True)
class SystemParams:
    """Bare physical rates and frequencies, in units of kappa.

    Attributes
    ----------
    lam : float
        Spin-oscillator coupling strength (> 0).
    omega_b : float
        Bare mechanical frequency (> 0).
    omega_a : float
        Ancillary cavity frequency.  After Fock-state projection it only
        contributes a constant energy offset and is never used in dynamics.
    g : float
        Quadratic optomechanical coupling (>= 0).
    Omega : float
        Spin transition frequency.
    kappa : float
        Oscillator decay rate.  Conventionally 1.0 (the unit scale); may be
        set to 0.0 to switch off mechanical dissipation.
    gamma_a : float
        Spin decay rate (>= 0).
    n_th : float
        Thermal phonon number of the bath (>= 0).
    n : int
        Photon number of the ancillary-cavity Fock state (>= 0, exact
        integer: the cavity is in a Fock state, not a coherent one).
    """

    lam: float
    omega_b: float
    omega_a: float
    g: float
    Omega: float
    kappa: float
    gamma_a: float
    n_th: float
    n: int

    def __post_init__(self) -> None:
        if not self.lam > 0:
            raise ParameterInvalid(f"lam must be > 0, got {self.lam}")
        if not self.omega_b > 0:
            raise ParameterInvalid(f"omega_b must be > 0, got {self.omega_b}")
        if self.g < 0:
            raise ParameterInvalid(f"g must be >= 0, got {self.g}")
        if self.kappa < 0:
            raise ParameterInvalid(f"kappa must be >= 0, got {self.kappa}")
        if self.gamma_a < 0:
            raise ParameterInvalid(f"gamma_a must be >= 0, got {self.gamma_a}")
        if self.n_th < 0:
            raise ParameterInvalid(f"n_th must be >= 0, got {self.n_th}")
        if isinstance(self.n, bool) or not isinstance(self.n, int):
            raise ParameterInvalid(f"n must be an integer, got {self.n!r}")
        if self.n < 0:
            raise ParameterInvalid(f"n must be >= 0, got {self.n}")


@dataclass(frozen=True)
class SqueezedFrame:
    """Derived frame quantities for a fixed photon number.

    ``chi`` is the dispersive shift lambda_n^2 / Delta; it is ``None`` on
    resonance (Delta == 0), where the dispersive picture does not exist.
    """

    r_n: float
    omega_n: float
    lambda_n: float
    Delta: float
    Omega_n: float
    Omega_tilde_n: float
    chi: float | None


def stability_margin(params: SystemParams) -> float:
    """Distance 1 - 4*n*g/omega_b to the instability of the phonon potential.

    Positive values admit a squeezed frame; at <= 0 the potential is no
    longer confining and `build_frame` refuses to construct one.
    """
    return 1.0 - 4.0 * params.n * params.g / params.omega_b


def build_frame(params: SystemParams) -> SqueezedFrame:
    """Construct the squeezed frame for the given parameters.

    Raises
    ------
    StabilityViolation
        If 4*n*g/omega_b >= 1 (the squeezing amplitude diverges).
    """
    x = 4.0 * params.n * params.g / params.omega_b
    if x >= 1.0:
        raise StabilityViolation(
            f"4*n*g/omega_b = {x:g} >= 1: phonon potential not confining "
            f"(n={params.n}, g={params.g:g}, omega_b={params.omega_b:g})"
        )
    r_n = -0.25 * math.log1p(-x)
    omega_n = math.exp(-2.0 * r_n) * params.omega_b
    lambda_n = math.exp(r_n) * params.lam
    Delta = params.Omega - omega_n
    Omega_n = 2.0 * lambda_n
    Omega_tilde_n = math.hypot(Omega_n, Delta)
    chi = lambda_n * lambda_n / Delta if Delta != 0.0 else None
    return SqueezedFrame(
        r_n=r_n,
        omega_n=omega_n,
        lambda_n=lambda_n,
        Delta=Delta,
        Omega_n=Omega_n,
        Omega_tilde_n=Omega_tilde_n,
        chi=chi,
    )


def rabi_period(frame: SqueezedFrame) -> float:
    """Rabi oscillation period 1/Omega_tilde_n, in units of 1/kappa.

    The period is defined up to a proportionality constant; this fixes the
    constant to 1, which preserves the monotone decrease with photon number.
    """
    if frame.Omega_tilde_n == 0.0:
        raise ZeroFrequency(
            "Omega_tilde_n = 0 (requires lambda_n = 0 and Delta = 0): "
            "no Rabi oscillation exists"
        )
    return 1.0 / frame.Omega_tilde_n


def rwa_ratio(frame: SqueezedFrame) -> float:
    """Ratio omega_n / lambda_n controlling the rotating-wave approximation.

    Values much greater than 1 (working regime: >= ~100) mean the
    counter-rotating terms are negligible.  This only reports the number;
    thresholding is the caller's policy.
    """
    return frame.omega_n / frame.lambda_n
