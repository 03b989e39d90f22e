"""Dissipative dynamics of the truncated four-level manifold.

With the oscillator in a thermal bath and the spin decaying, the density
matrix in the basis (|1> = |up,0>, |2> = |up,1>, |3> = |down,0>,
|4> = |down,1>) keeps the X-shaped structure: populations rho11, rho33,
rho44 and the single coherence rho14 (rho22 stays structurally zero,
rho41 is the conjugate of rho14).  The matrix elements obey

    d rho11/dt = -i*lam*(e^{+i D t} rho41 - e^{-i D t} rho14) - gamma_a*rho11
    d rho14/dt = -i*lam*e^{+i D t}*(rho44 - rho11) - (kd + gamma_a)/2 * rho14
    d rho33/dt = kd*rho44 - kp*rho33 + gamma_a*rho11
    d rho44/dt = +i*lam*(e^{+i D t} rho41 - e^{-i D t} rho14) - kd*rho44 + kp*rho33

with lam the transformed coupling, D the detuning, kd = kappa*(n_th+1),
kp = kappa*n_th.  These equations are integrated verbatim, including their
truncation: at n_th > 0 they omit thermal pumping out of the manifold
(|up,0> -> |up,1>, |down,1> -> |down,2>).  `fock_lindblad_oracle` solves the
untruncated master equation on a full spin x Fock space instead and is the
brute-force reference for `evolve`; at n_th = 0 the manifold is exactly
closed and both must agree, at n_th > 0 the difference is the truncation
error, which is measured and reported rather than patched.

The integrator is a fixed-step classical Runge-Kutta scheme on the real
5-vector (rho11, rho33, rho44, Re rho14, Im rho14), with the explicit
e^{+/- i D t} phases evaluated exactly at stage times.  Fixed stepping keeps
golden-file outputs bit-reproducible.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np
from numba import njit
from scipy.integrate import solve_ivp

from .closed_dynamics import amplitudes
from .errors import (
    CutoffTooSmall,
    InvariantBreach,
    NotAState,
    ParameterInvalid,
    StepTooLarge,
)
from .frame import SqueezedFrame, SystemParams, build_frame

__all__ = [
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
]

#: Tolerance on |Tr rho - 1| for an integrated state.
TRACE_TOL = 1e-8
#: Most negative eigenvalue tolerated in positivity checks.
POSITIVITY_TOL = 1e-9


@dataclass(frozen=True)
class DensityMatrix4:
    """Stored elements of the four-level density matrix at time ``t``.

    rho22 is structurally zero and rho41 is derived as the conjugate of
    rho14, so neither is stored.
    """

    rho11: float
    rho33: float
    rho44: float
    rho14: complex
    t: float

    def trace(self) -> float:
        return self.rho11 + self.rho33 + self.rho44

    def as_matrix(self) -> np.ndarray:
        """Full 4x4 matrix in the basis |up,0>, |up,1>, |down,0>, |down,1>."""
        m = np.zeros((4, 4), dtype=complex)
        m[0, 0] = self.rho11
        m[2, 2] = self.rho33
        m[3, 3] = self.rho44
        m[0, 3] = self.rho14
        m[3, 0] = np.conj(self.rho14)
        return m


def _state_violation(
    rho: DensityMatrix4, trace_tol: float = TRACE_TOL, pos_tol: float = POSITIVITY_TOL
) -> str | None:
    """Return a description of the violated invariant, or None if valid."""
    tr = rho.trace()
    if abs(tr - 1.0) > trace_tol:
        return f"trace = {tr!r} deviates from 1 by more than {trace_tol:g}"
    if rho.rho33 < -pos_tol:
        return f"rho33 = {rho.rho33!r} < -{pos_tol:g}"
    # Smallest eigenvalue of the 2x2 block [[rho11, rho14], [rho14*, rho44]].
    eig_min = 0.5 * (
        rho.rho11
        + rho.rho44
        - math.hypot(rho.rho11 - rho.rho44, 2.0 * abs(rho.rho14))
    )
    if eig_min < -pos_tol:
        return f"coherence block eigenvalue {eig_min!r} < -{pos_tol:g}"
    return None


@dataclass(frozen=True)
class OpenEvolutionTrace:
    """Sampled dissipative evolution plus snapshots of its inputs."""

    samples: tuple[DensityMatrix4, ...]
    params: SystemParams
    frame: SqueezedFrame

    @property
    def times(self) -> np.ndarray:
        return np.array([s.t for s in self.samples])


@dataclass(frozen=True)
class FockOracleTrace(OpenEvolutionTrace):
    """Oracle trace projected onto the four-level basis.

    ``occupancy`` is the full-space mean phonon number <b'b> and
    ``top_level_population`` the population of the highest retained Fock
    level, both per sample.
    """

    occupancy: np.ndarray
    top_level_population: np.ndarray


def prepare_initial_state(params: SystemParams, t1: float) -> DensityMatrix4:
    """Pure entangled state prepared by the photon-free resonant evolution.

    Preparation runs for a time ``t1`` before any photons are injected, so
    the amplitudes are evaluated in the n = 0 frame; the returned matrix is
    the corresponding pure state (rho33 = 0) with the clock reset to 0 for
    the subsequent open evolution.
    """
    frame0 = build_frame(replace(params, n=0))
    amps = amplitudes(frame0, t1)
    return DensityMatrix4(
        rho11=abs(amps.c_up0) ** 2,
        rho33=0.0,
        rho44=abs(amps.c_down1) ** 2,
        rho14=amps.c_up0 * np.conj(amps.c_down1),
        t=0.0,
    )


def default_step(params: SystemParams, frame: SqueezedFrame) -> float | None:
    """Default integration step min(1e-3/kappa, 1e-2/Omega_tilde_n).

    Resolves both the dissipative and the Rabi time scale.  Returns None
    when neither scale exists (kappa = 0 and Omega_tilde_n = 0), in which
    case the caller must supply a step explicitly.
    """
    bounds = []
    if params.kappa > 0:
        bounds.append(1e-3 / params.kappa)
    if frame.Omega_tilde_n > 0:
        bounds.append(1e-2 / frame.Omega_tilde_n)
    return min(bounds) if bounds else None


@njit(cache=True)
def _rk4_truncated(y0, n_steps, dt, stride, lam, delta, kd, kp, gamma_a):
    """Fixed-step RK4 for the real 5-vector (r11, r33, r44, Re r14, Im r14).

    Stage times are computed as k*dt (not accumulated) so the e^{i*delta*t}
    phases stay coherent over millions of steps.  Returns one row every
    ``stride`` steps, including the initial state.
    """
    g2 = 0.5 * (kd + gamma_a)
    n_samples = n_steps // stride + 1
    out = np.empty((n_samples, 5), dtype=np.float64)
    r11, r33, r44, x, y = y0[0], y0[1], y0[2], y0[3], y0[4]
    out[0, 0] = r11
    out[0, 1] = r33
    out[0, 2] = r44
    out[0, 3] = x
    out[0, 4] = y
    for k in range(n_steps):
        t0 = k * dt

        c = math.cos(delta * t0)
        s = math.sin(delta * t0)
        ex = lam * (s * x - c * y)
        dpop = r44 - r11
        a1 = 2.0 * ex - gamma_a * r11
        b1 = kd * r44 - kp * r33 + gamma_a * r11
        c1 = -2.0 * ex - kd * r44 + kp * r33
        d1 = lam * s * dpop - g2 * x
        e1 = -lam * c * dpop - g2 * y

        th = t0 + 0.5 * dt
        c = math.cos(delta * th)
        s = math.sin(delta * th)
        r11b = r11 + 0.5 * dt * a1
        r33b = r33 + 0.5 * dt * b1
        r44b = r44 + 0.5 * dt * c1
        xb = x + 0.5 * dt * d1
        yb = y + 0.5 * dt * e1
        ex = lam * (s * xb - c * yb)
        dpop = r44b - r11b
        a2 = 2.0 * ex - gamma_a * r11b
        b2 = kd * r44b - kp * r33b + gamma_a * r11b
        c2 = -2.0 * ex - kd * r44b + kp * r33b
        d2 = lam * s * dpop - g2 * xb
        e2 = -lam * c * dpop - g2 * yb

        r11b = r11 + 0.5 * dt * a2
        r33b = r33 + 0.5 * dt * b2
        r44b = r44 + 0.5 * dt * c2
        xb = x + 0.5 * dt * d2
        yb = y + 0.5 * dt * e2
        ex = lam * (s * xb - c * yb)
        dpop = r44b - r11b
        a3 = 2.0 * ex - gamma_a * r11b
        b3 = kd * r44b - kp * r33b + gamma_a * r11b
        c3 = -2.0 * ex - kd * r44b + kp * r33b
        d3 = lam * s * dpop - g2 * xb
        e3 = -lam * c * dpop - g2 * yb

        t1 = t0 + dt
        c = math.cos(delta * t1)
        s = math.sin(delta * t1)
        r11b = r11 + dt * a3
        r33b = r33 + dt * b3
        r44b = r44 + dt * c3
        xb = x + dt * d3
        yb = y + dt * e3
        ex = lam * (s * xb - c * yb)
        dpop = r44b - r11b
        a4 = 2.0 * ex - gamma_a * r11b
        b4 = kd * r44b - kp * r33b + gamma_a * r11b
        c4 = -2.0 * ex - kd * r44b + kp * r33b
        d4 = lam * s * dpop - g2 * xb
        e4 = -lam * c * dpop - g2 * yb

        sixth = dt / 6.0
        r11 += sixth * (a1 + 2.0 * a2 + 2.0 * a3 + a4)
        r33 += sixth * (b1 + 2.0 * b2 + 2.0 * b3 + b4)
        r44 += sixth * (c1 + 2.0 * c2 + 2.0 * c3 + c4)
        x += sixth * (d1 + 2.0 * d2 + 2.0 * d3 + d4)
        y += sixth * (e1 + 2.0 * e2 + 2.0 * e3 + e4)

        if (k + 1) % stride == 0:
            i = (k + 1) // stride
            out[i, 0] = r11
            out[i, 1] = r33
            out[i, 2] = r44
            out[i, 3] = x
            out[i, 4] = y
    return out


def evolve(
    rho0: DensityMatrix4,
    frame: SqueezedFrame,
    params: SystemParams,
    t_end: float,
    dt: float | None = None,
    stride: int = 100,
) -> OpenEvolutionTrace:
    """Integrate the truncated matrix-element equations up to ``t_end``.

    ``dt`` defaults to `default_step` and may not exceed it.  One sample is
    stored every ``stride`` steps; the step count is rounded up so that the
    sampled times are uniform and the last sample lands at or just past
    ``t_end``.

    Raises
    ------
    StepTooLarge
        If ``dt`` exceeds min(1e-3/kappa, 1e-2/Omega_tilde_n).
    InvariantBreach
        If any stored sample violates trace or positivity tolerances.
    """
    if t_end <= 0:
        raise ParameterInvalid(f"t_end must be > 0, got {t_end}")
    if stride < 1:
        raise ParameterInvalid(f"stride must be >= 1, got {stride}")
    msg = _state_violation(rho0)
    if msg is not None:
        raise NotAState(f"initial state invalid: {msg}")
    bound = default_step(params, frame)
    if dt is None:
        if bound is None:
            raise ParameterInvalid(
                "no time scale to derive a default step from "
                "(kappa = 0 and Omega_tilde_n = 0); pass dt explicitly"
            )
        dt = bound
    elif dt <= 0:
        raise ParameterInvalid(f"dt must be > 0, got {dt}")
    elif bound is not None and dt > bound * (1.0 + 1e-12):
        raise StepTooLarge(
            f"dt = {dt:g} exceeds min(1e-3/kappa, 1e-2/Omega_tilde_n) = {bound:g}"
        )

    n_steps = max(1, math.ceil(t_end / dt - 1e-9))
    n_steps = ((n_steps + stride - 1) // stride) * stride
    y0 = np.array(
        [rho0.rho11, rho0.rho33, rho0.rho44, rho0.rho14.real, rho0.rho14.imag]
    )
    raw = _rk4_truncated(
        y0,
        n_steps,
        dt,
        stride,
        frame.lambda_n,
        frame.Delta,
        params.kappa * (params.n_th + 1.0),
        params.kappa * params.n_th,
        params.gamma_a,
    )
    samples = tuple(
        DensityMatrix4(
            rho11=float(row[0]),
            rho33=float(row[1]),
            rho44=float(row[2]),
            rho14=complex(row[3], row[4]),
            t=i * stride * dt,
        )
        for i, row in enumerate(raw)
    )
    for s in samples:
        msg = _state_violation(s)
        if msg is not None:
            raise InvariantBreach(f"sample at t = {s.t:g}: {msg}")
    return OpenEvolutionTrace(samples=samples, params=params, frame=frame)


#: Population allowed on the highest retained Fock level before the oracle
#: declares its cutoff too small.
LEAKAGE_TOL = 1e-6


def fock_lindblad_oracle(
    rho0: DensityMatrix4,
    frame: SqueezedFrame,
    params: SystemParams,
    t_end: float,
    fock_cutoff: int = 6,
    times: np.ndarray | None = None,
) -> FockOracleTrace:
    """Brute-force reference: the full master equation on spin x Fock space.

    Integrates the interaction Hamiltonian
    lam*(b'*sigma_- e^{-i D t} + b*sigma_+ e^{+i D t}) together with the
    three dissipators (phonon decay at kappa*(n_th+1), thermal pumping at
    kappa*n_th, spin decay at gamma_a) on the untruncated space with Fock
    levels 0..fock_cutoff, using an adaptive high-order solver, then
    projects each sample onto the four-level basis.  Independent of the
    fixed-step path in every ingredient, so it serves as the oracle.

    ``times`` selects the sample instants (default: 201 uniform points).

    Raises
    ------
    CutoffTooSmall
        If the top Fock level ever holds more than 1e-6 population.
    """
    if fock_cutoff < 3:
        raise ParameterInvalid(f"fock_cutoff must be >= 3, got {fock_cutoff}")
    if times is None:
        times = np.linspace(0.0, t_end, 201)
    times = np.asarray(times, dtype=float)

    nlev = fock_cutoff + 1
    dim = 2 * nlev
    b_f = np.diag(np.sqrt(np.arange(1, nlev)), 1).astype(complex)
    eye_f = np.eye(nlev, dtype=complex)
    sm2 = np.array([[0, 0], [1, 0]], dtype=complex)  # |down><up|
    B = np.kron(np.eye(2, dtype=complex), b_f)
    Sm = np.kron(sm2, eye_f)
    A = B.conj().T @ Sm  # b' sigma_-
    Ad = A.conj().T

    lam = frame.lambda_n
    delta = frame.Delta
    rates = [
        params.kappa * (params.n_th + 1.0),
        params.kappa * params.n_th,
        params.gamma_a,
    ]
    ops = [B, B.conj().T, Sm]
    lindblad = [
        (math.sqrt(r) * L, math.sqrt(r) * L.conj().T)
        for r, L in zip(rates, ops)
        if r > 0
    ]
    ldl = [Ld @ L for L, Ld in lindblad]

    def rhs(t: float, y: np.ndarray) -> np.ndarray:
        rho = y.reshape(dim, dim)
        ph = np.exp(-1j * delta * t)
        H = lam * (ph * A + np.conj(ph) * Ad)
        drho = -1j * (H @ rho - rho @ H)
        for (L, Ld), LdL in zip(lindblad, ldl):
            drho += L @ rho @ Ld - 0.5 * (LdL @ rho + rho @ LdL)
        return drho.reshape(-1)

    rho_full = np.zeros((dim, dim), dtype=complex)
    rho_full[0, 0] = rho0.rho11
    rho_full[nlev, nlev] = rho0.rho33
    rho_full[nlev + 1, nlev + 1] = rho0.rho44
    rho_full[0, nlev + 1] = rho0.rho14
    rho_full[nlev + 1, 0] = np.conj(rho0.rho14)

    sol = solve_ivp(
        rhs,
        (0.0, float(times[-1])),
        rho_full.reshape(-1),
        t_eval=times,
        method="DOP853",
        rtol=1e-10,
        atol=1e-12,
    )
    if not sol.success:  # pragma: no cover - solver failure is exceptional
        raise InvariantBreach(f"oracle integration failed: {sol.message}")

    number = np.kron(np.eye(2), np.diag(np.arange(nlev, dtype=float)))
    samples = []
    occupancy = np.empty(len(times))
    top_pop = np.empty(len(times))
    for i, t in enumerate(times):
        rho = sol.y[:, i].reshape(dim, dim)
        top = rho[fock_cutoff, fock_cutoff].real + rho[nlev + fock_cutoff, nlev + fock_cutoff].real
        top_pop[i] = top
        if top > LEAKAGE_TOL:
            raise CutoffTooSmall(
                f"population {top:g} on Fock level {fock_cutoff} at t = {t:g} "
                f"exceeds {LEAKAGE_TOL:g}; raise fock_cutoff"
            )
        occupancy[i] = np.trace(number @ rho).real
        samples.append(
            DensityMatrix4(
                rho11=float(rho[0, 0].real),
                rho33=float(rho[nlev, nlev].real),
                rho44=float(rho[nlev + 1, nlev + 1].real),
                rho14=complex(rho[0, nlev + 1]),
                t=float(t),
            )
        )
    return FockOracleTrace(
        samples=tuple(samples),
        params=params,
        frame=frame,
        occupancy=occupancy,
        top_level_population=top_pop,
    )


def concurrence_mixed(rho: DensityMatrix4) -> float:
    """Wootters concurrence of the four-level state.

    The two qubits are the spin and the phonon {0, 1} pair.  The measure is
    max(0, sqrt(l1) - sqrt(l2) - sqrt(l3) - sqrt(l4)) over the descending
    eigenvalues l_i of the 4x4 product rho * (sy x sy) * rho^* * (sy x sy).
    For the stored structure that product is

        [[p + |w|^2, 0, 0, 2*rho11*w], [0]*4, [0]*4, [2*rho44*w^*, 0, 0, p + |w|^2]]

    with p = rho11*rho44 and w = rho14, so its characteristic polynomial
    factors as l^2 * [(l - p - |w|^2)^2 - 4*p*|w|^2] and the eigenvalues are
    0, 0, (sqrt(p) +- |w|)^2 in closed form.  Solving the polynomial instead
    of running a general eigensolver keeps the two zero roots exact, which a
    rank-deficient non-normal matrix would otherwise smear by ~1e-8.  The
    quadratic's roots are clamped at zero before the square roots (they are
    nonnegative in exact arithmetic; clamping absorbs roundoff).

    Raises
    ------
    NotAState
        If the trace or positivity invariants fail beyond tolerance.
    """
    msg = _state_violation(rho)
    if msg is not None:
        raise NotAState(msg)
    s = math.sqrt(max(rho.rho11 * rho.rho44, 0.0))
    m = abs(rho.rho14)
    # sqrt of descending eigenvalues: s + m, |s - m|, 0, 0.
    c = (s + m) - abs(s - m)
    return float(min(1.0, max(0.0, c)))


@dataclass(frozen=True)
class ConcurrenceSeries:
    """Concurrence over time for one photon number."""

    n: int
    times: np.ndarray
    concurrence: np.ndarray
    trace: OpenEvolutionTrace


def concurrence_trace(
    params: SystemParams,
    t1: float,
    t_end: float,
    n_values: list[int],
    dt: float | None = None,
    stride: int = 100,
) -> list[ConcurrenceSeries]:
    """Prepare, evolve and score the concurrence for each photon number.

    The state is prepared in the photon-free frame for a time ``t1``, the
    photons are then injected instantaneously and the dissipative evolution
    runs in the n-photon frame for ``t_end``.
    """
    series = []
    for n in n_values:
        params_n = replace(params, n=n)
        frame_n = build_frame(params_n)
        rho0 = prepare_initial_state(params, t1)
        trace = evolve(rho0, frame_n, params_n, t_end, dt=dt, stride=stride)
        conc = np.array([concurrence_mixed(s) for s in trace.samples])
        series.append(
            ConcurrenceSeries(n=n, times=trace.times, concurrence=conc, trace=trace)
        )
    return series
