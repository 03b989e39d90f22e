"""Closed (lossless) dynamics of the single-excitation manifold.

Under the rotating-wave approximation the interaction couples only
|up,0> <-> |down,1>, so the state is fixed by two complex amplitudes.
Starting from |up,0>, they evolve as

    c_up0(t)   = [cos(Wt*t/2) - i*(Delta/Wt)*sin(Wt*t/2)] * exp(+i*Delta*t/2)
    c_down1(t) = -i*(Wn/Wt)*sin(Wt*t/2) * exp(-i*Delta*t/2)

with Wn = Omega_n = 2*lambda_n and Wt = Omega_tilde_n = sqrt(Wn^2 + Delta^2).
The exp(+/- i*Delta*t/2) phases are kept exactly as written: the concurrence
is insensitive to them, but the open-system module seeds its coherence from
the full complex values, so the convention is fixed here.

The pure-state concurrence is C = 2*|c_up0*c_down1|.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, replace

from .errors import NormalizationError, ParameterInvalid, StabilityViolation
from .frame import SqueezedFrame, SystemParams, build_frame

__all__ = [
    "AmplitudePair",
    "PhotonSweepPoint",
    "amplitudes",
    "concurrence_pure",
    "concurrence_vs_photons",
]

#: Largest tolerated deviation of |c_up0|^2 + |c_down1|^2 from 1.
NORMALIZATION_TOL = 1e-6


@dataclass(frozen=True)
class AmplitudePair:
    """Probability amplitudes of |up,0> and |down,1> at time ``t`` [1/kappa]."""

    c_up0: complex
    c_down1: complex
    t: float

    def norm_sq(self) -> float:
        return abs(self.c_up0) ** 2 + abs(self.c_down1) ** 2


def amplitudes(frame: SqueezedFrame, t: float) -> AmplitudePair:
    """Closed-form amplitudes at time ``t`` for the initial state |up,0>.

    Total on t >= 0.  The degenerate case Omega_tilde_n = 0 returns the
    frozen initial state (1, 0), which is the exact limit.
    """
    if t < 0:
        raise ParameterInvalid(f"t must be >= 0, got {t}")
    wt = frame.Omega_tilde_n
    if wt == 0.0:
        return AmplitudePair(c_up0=1.0 + 0.0j, c_down1=0.0j, t=t)
    half = 0.5 * wt * t
    cos_h = math.cos(half)
    sin_h = math.sin(half)
    phase = cmath.exp(0.5j * frame.Delta * t)
    c_up0 = (cos_h - 1j * (frame.Delta / wt) * sin_h) * phase
    c_down1 = -1j * (frame.Omega_n / wt) * sin_h * phase.conjugate()
    return AmplitudePair(c_up0=c_up0, c_down1=c_down1, t=t)


def concurrence_pure(amps: AmplitudePair) -> float:
    """Concurrence C = 2*|c_up0 * c_down1| of the pure two-qubit state."""
    norm = amps.norm_sq()
    if abs(norm - 1.0) > NORMALIZATION_TOL:
        raise NormalizationError(
            f"|c_up0|^2 + |c_down1|^2 = {norm!r} deviates from 1 "
            f"by more than {NORMALIZATION_TOL:g}"
        )
    return min(1.0, 2.0 * abs(amps.c_up0 * amps.c_down1))


@dataclass(frozen=True)
class PhotonSweepPoint:
    """One entry of a photon-number sweep.

    Either ``concurrence`` is set, or ``error`` carries the reason the
    point is invalid (e.g. the stability bound was hit).
    """

    n: int
    concurrence: float | None
    error: str | None = None


def concurrence_vs_photons(
    params: SystemParams, t1: float, n_values: list[int]
) -> list[PhotonSweepPoint]:
    """Closed-system concurrence at fixed time ``t1`` for each photon number.

    For each ``n`` the frame is rebuilt and the amplitudes evaluated at
    ``t1``.  Unstable photon numbers do not abort the sweep; they yield an
    entry with the ``error`` field set.
    """
    points: list[PhotonSweepPoint] = []
    for n in n_values:
        try:
            frame = build_frame(replace(params, n=n))
        except StabilityViolation as exc:
            points.append(PhotonSweepPoint(n=n, concurrence=None, error=str(exc)))
            continue
        c = concurrence_pure(amplitudes(frame, t1))
        points.append(PhotonSweepPoint(n=n, concurrence=c))
    return points
