"""Large-detuning (dispersive) mechanics: shift, variances, squeezing.

When |Delta| >> lambda_n * sqrt(<b'b>) the spin-oscillator exchange reduces
to a spin-state-dependent frequency shift chi = lambda_n^2 / Delta; in the
spin-up subspace the oscillator Hamiltonian is chi * b'b.  With the
oscillator starting in vacuum and damped by a thermal bath, the quadrature
variances in the squeezed frame are

    <dX+-^2>(t) = [1 + 2*n_th*(1 - e^{-2*kappa*t})] * e^{+/-2*r_n}

so only the X- quadrature squeezes, saturating at the steady value
(1 + 2*n_th) * e^{-2*r_n}.  `moment_oracle` integrates the first and second
moments of the damped mode directly (an exact closure for this Gaussian
dynamics) and rebuilds the variances from them, providing an independent
check of the closed form.

The bath correlators are taken delta-correlated with weights n_th and
n_th + 1; the oscillator initially in vacuum is a fixed assumption of the
variance path, not a parameter.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import ParameterInvalid, ResonantDivergence, StepTooLarge
from .frame import SqueezedFrame, SystemParams

__all__ = [
    "VariancePoint",
    "MomentState",
    "MomentTrace",
    "dispersive_shift",
    "effective_frequency",
    "dispersive_validity",
    "variance_analytic",
    "variance_steady",
    "moment_oracle",
]


@dataclass(frozen=True)
class VariancePoint:
    """Mechanical quadrature variances at time ``t`` [1/kappa]."""

    t: float
    var_plus: float
    var_minus: float


@dataclass(frozen=True)
class MomentState:
    """First and second moments of the damped mode at time ``t``."""

    mean_b: complex
    occ: float
    anom: complex
    t: float


@dataclass(frozen=True)
class MomentTrace:
    """Moment-equation oracle output: moments and assembled variances."""

    moments: tuple[MomentState, ...]
    variances: tuple[VariancePoint, ...]


def dispersive_shift(frame: SqueezedFrame) -> float:
    """Dispersive shift chi = lambda_n^2 / Delta [kappa].

    Raises
    ------
    ResonantDivergence
        On resonance (Delta = 0), where the shift diverges.
    """
    if frame.Delta == 0.0:
        raise ResonantDivergence("Delta = 0: dispersive shift diverges on resonance")
    return frame.lambda_n**2 / frame.Delta


def effective_frequency(frame: SqueezedFrame) -> float:
    """Oscillator frequency chi of the spin-up-subspace Hamiltonian chi*b'b.

    Numerically identical to `dispersive_shift`; kept as a named operation
    because it answers a different question (the effective frequency seen
    by the decoupled oscillator, rather than the spin's level shift).
    """
    return dispersive_shift(frame)


def dispersive_validity(frame: SqueezedFrame, occ_estimate: float) -> float:
    """Ratio |Delta| / (lambda_n * sqrt(max(occ_estimate, 1))).

    Values much greater than 1 justify the dispersive approximation; the
    max with 1 guards the vacuum case where the bare occupancy would make
    the ratio meaningless.  Returns +inf for lambda_n = 0 (no coupling:
    always valid).  Thresholding is the caller's policy.
    """
    if occ_estimate < 0:
        raise ParameterInvalid(f"occ_estimate must be >= 0, got {occ_estimate}")
    if frame.lambda_n == 0.0:
        return math.inf
    return abs(frame.Delta) / (frame.lambda_n * math.sqrt(max(occ_estimate, 1.0)))


def variance_analytic(
    params: SystemParams, frame: SqueezedFrame, t: float
) -> VariancePoint:
    """Closed-form quadrature variances at time ``t`` (vacuum start)."""
    if t < 0:
        raise ParameterInvalid(f"t must be >= 0, got {t}")
    thermal = 1.0 + 2.0 * params.n_th * (1.0 - math.exp(-2.0 * params.kappa * t))
    return VariancePoint(
        t=t,
        var_plus=thermal * math.exp(2.0 * frame.r_n),
        var_minus=thermal * math.exp(-2.0 * frame.r_n),
    )


def variance_steady(
    params: SystemParams, frame: SqueezedFrame
) -> tuple[float, bool]:
    """Steady-state squeezed-quadrature variance and whether it beats vacuum.

    Returns ((1 + 2*n_th) * e^{-2*r_n}, flag); the flag is True when the
    variance lies below 1, the vacuum limit separating squeezing from no
    squeezing.
    """
    var = (1.0 + 2.0 * params.n_th) * math.exp(-2.0 * frame.r_n)
    return var, var < 1.0


#: Upper bound on the moment-oracle integration step.
MOMENT_STEP_BOUND = 1e-3


def moment_oracle(
    params: SystemParams,
    frame: SqueezedFrame,
    t_end: float,
    dt: float = 1e-3,
    stride: int = 1,
) -> MomentTrace:
    """Integrate the moment equations of the damped dispersive oscillator.

    The Langevin dynamics b' = -(kappa + i*chi) b + noise closes at the
    level of moments:

        d<b>/dt   = -(kappa + i*chi) <b>
        d<b'b>/dt = -2*kappa <b'b> + 2*kappa*n_th
        d<b^2>/dt = -2*(kappa + i*chi) <b^2>

    with all moments starting at zero (vacuum).  The variances are then

        <dX+-^2> = [1 + 2<b'b> +- 2*Re<b^2> -+ <X+->^2] * e^{+/-2*r_n},

    which this routine evaluates at every ``stride``-th step using classical
    fixed-step RK4.  From vacuum, <b> and <b^2> stay identically zero and
    the result must match `variance_analytic`; the independent integration
    is the point.

    Raises
    ------
    StepTooLarge
        If dt exceeds 1e-3/kappa (or 1e-3 when kappa = 0).
    ResonantDivergence
        On Delta = 0, where chi does not exist.
    """
    if t_end <= 0:
        raise ParameterInvalid(f"t_end must be > 0, got {t_end}")
    if dt <= 0:
        raise ParameterInvalid(f"dt must be > 0, got {dt}")
    bound = MOMENT_STEP_BOUND / params.kappa if params.kappa > 0 else MOMENT_STEP_BOUND
    if dt > bound * (1.0 + 1e-12):
        raise StepTooLarge(f"dt = {dt:g} exceeds {bound:g}")
    chi = dispersive_shift(frame)

    kappa = params.kappa
    n_th = params.n_th
    decay = -(kappa + 1j * chi)

    def rhs(mean_b: complex, occ: float, anom: complex):
        return (
            decay * mean_b,
            -2.0 * kappa * occ + 2.0 * kappa * n_th,
            2.0 * decay * anom,
        )

    def variance_point(t: float, mean_b: complex, occ: float, anom: complex):
        two_re_anom = 2.0 * anom.real
        mean_xp_sq = (2.0 * mean_b.real) ** 2
        mean_xm_sq = (2.0 * mean_b.imag) ** 2
        return VariancePoint(
            t=t,
            var_plus=(1.0 + 2.0 * occ + two_re_anom - mean_xp_sq)
            * math.exp(2.0 * frame.r_n),
            var_minus=(1.0 + 2.0 * occ - two_re_anom - mean_xm_sq)
            * math.exp(-2.0 * frame.r_n),
        )

    n_steps = max(1, math.ceil(t_end / dt - 1e-9))
    n_steps = ((n_steps + stride - 1) // stride) * stride
    mean_b: complex = 0.0j
    occ = 0.0
    anom: complex = 0.0j
    moments = [MomentState(mean_b=mean_b, occ=occ, anom=anom, t=0.0)]
    variances = [variance_point(0.0, mean_b, occ, anom)]
    for k in range(n_steps):
        m1, o1, a1 = rhs(mean_b, occ, anom)
        m2, o2, a2 = rhs(mean_b + 0.5 * dt * m1, occ + 0.5 * dt * o1, anom + 0.5 * dt * a1)
        m3, o3, a3 = rhs(mean_b + 0.5 * dt * m2, occ + 0.5 * dt * o2, anom + 0.5 * dt * a2)
        m4, o4, a4 = rhs(mean_b + dt * m3, occ + dt * o3, anom + dt * a3)
        mean_b += dt / 6.0 * (m1 + 2.0 * m2 + 2.0 * m3 + m4)
        occ += dt / 6.0 * (o1 + 2.0 * o2 + 2.0 * o3 + o4)
        anom += dt / 6.0 * (a1 + 2.0 * a2 + 2.0 * a3 + a4)
        if (k + 1) % stride == 0:
            t = (k + 1) * dt
            moments.append(MomentState(mean_b=mean_b, occ=occ, anom=anom, t=t))
            variances.append(variance_point(t, mean_b, occ, anom))
    return MomentTrace(moments=tuple(moments), variances=tuple(variances))
