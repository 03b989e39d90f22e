import dataclasses
import math

import numpy as np
import pytest

from spinoptomech import (
    DensityMatrix4,
    NotAState,
    ParameterInvalid,
    StepTooLarge,
    amplitudes,
    build_frame,
    concurrence_mixed,
    concurrence_pure,
    concurrence_trace,
    evolve,
    fock_lindblad_oracle,
    prepare_initial_state,
)
from spinoptomech.frame import SqueezedFrame
from spinoptomech.open_dynamics import default_step

from _oracles import random_x_state

QUARTER = 0.25 * math.pi


def free_frame(lambda_n: float, delta: float = 0.0) -> SqueezedFrame:
    return SqueezedFrame(
        r_n=0.0,
        omega_n=2000.0 - delta,
        lambda_n=lambda_n,
        Delta=delta,
        Omega_n=2.0 * lambda_n,
        Omega_tilde_n=math.hypot(2.0 * lambda_n, delta),
        chi=None if delta == 0 else lambda_n**2 / delta,
    )


def max_sample_diff(trace_a, trace_b) -> float:
    assert len(trace_a.samples) == len(trace_b.samples)
    return max(
        max(
            abs(a.rho11 - b.rho11),
            abs(a.rho33 - b.rho33),
            abs(a.rho44 - b.rho44),
            abs(a.rho14 - b.rho14),
        )
        for a, b in zip(trace_a.samples, trace_b.samples)
    )


# ---------------------------------------------------------------------------
# prepare_initial_state


def test_prepare_trivial(baseline):
    rho = prepare_initial_state(baseline, 0.0)
    assert (rho.rho11, rho.rho33, rho.rho44, rho.rho14) == (1.0, 0.0, 0.0, 0.0j)


def test_prepare_maximally_entangled(baseline):
    rho = prepare_initial_state(baseline, QUARTER)
    assert rho.rho11 == pytest.approx(0.5, abs=1e-15)
    assert rho.rho44 == pytest.approx(0.5, abs=1e-15)
    assert abs(rho.rho14) == pytest.approx(0.5, abs=1e-15)
    assert rho.rho33 == 0.0


def test_prepare_full_transfer(baseline):
    rho = prepare_initial_state(baseline, 0.5 * math.pi)
    assert rho.rho44 == pytest.approx(1.0, abs=1e-15)
    assert rho.rho11 <= 1e-30


# ---------------------------------------------------------------------------
# evolve


def test_decoupled_exponential_decay(baseline):
    # lambda_n = 0 and kappa = 0: rho11 decays at gamma_a into rho33.
    params = dataclasses.replace(baseline, kappa=0.0, gamma_a=0.1, n_th=0.0)
    rho0 = DensityMatrix4(rho11=1.0, rho33=0.0, rho44=0.0, rho14=0.0j, t=0.0)
    trace = evolve(rho0, free_frame(0.0), params, 10.0, dt=1e-3, stride=100)
    for s in trace.samples:
        assert s.rho11 == pytest.approx(math.exp(-0.1 * s.t), abs=1e-10)
        assert s.rho33 == pytest.approx(1.0 - math.exp(-0.1 * s.t), abs=1e-10)
        assert s.rho44 == 0.0 and s.rho14 == 0.0j


def test_lossless_evolution_matches_closed_forms(baseline):
    # kappa = gamma_a = 0: the integrated matrix elements must reproduce
    # the analytic amplitudes over [0, 4*pi].
    for n in (0, 2000):
        params = dataclasses.replace(baseline, kappa=0.0, gamma_a=0.0, n_th=0.0, n=n)
        frame = build_frame(params)
        rho0 = prepare_initial_state(params, 0.0)
        trace = evolve(rho0, frame, params, 4.0 * math.pi, stride=100)
        worst = 0.0
        for s in trace.samples:
            amps = amplitudes(frame, s.t)
            worst = max(
                worst,
                abs(s.rho11 - abs(amps.c_up0) ** 2),
                abs(s.rho14 - amps.c_up0 * np.conj(amps.c_down1)),
            )
        assert worst <= 1e-8


def test_step_bound_enforced(baseline):
    frame = build_frame(baseline)
    rho0 = prepare_initial_state(baseline, QUARTER)
    bound = default_step(baseline, frame)
    with pytest.raises(StepTooLarge):
        evolve(rho0, frame, baseline, 1.0, dt=2.0 * bound)
    with pytest.raises(ParameterInvalid):
        evolve(rho0, frame, baseline, 1.0, dt=-1e-4)


def test_default_step_resolves_rabi_scale(with_photons):
    params = with_photons(24000)
    frame = build_frame(params)
    dt = default_step(params, frame)
    assert dt == pytest.approx(1e-2 / frame.Omega_tilde_n, rel=1e-12)
    assert dt < 6.3e-6


def test_rejects_invalid_initial_state(baseline):
    frame = build_frame(baseline)
    bad = DensityMatrix4(rho11=0.9, rho33=0.0, rho44=0.0, rho14=0.0j, t=0.0)
    with pytest.raises(NotAState):
        evolve(bad, frame, baseline, 1.0)


def test_trace_preserved_with_dissipation(baseline, with_photons):
    for n in (0, 24000):
        params = with_photons(n)
        frame = build_frame(params)
        rho0 = prepare_initial_state(baseline, QUARTER)
        trace = evolve(rho0, frame, params, 10.0, stride=1000)
        for s in trace.samples:
            assert abs(s.trace() - 1.0) <= 1e-8
        times = trace.times
        assert all(b > a for a, b in zip(times, times[1:]))
        assert times[-1] >= 10.0 - 1e-12


def test_rho33_monotone_without_thermal_pump(baseline):
    params = dataclasses.replace(baseline, n_th=0.0)
    frame = build_frame(params)
    trace = evolve(prepare_initial_state(params, QUARTER), frame, params, 10.0)
    r33 = [s.rho33 for s in trace.samples]
    assert all(b >= a for a, b in zip(r33, r33[1:]))


def test_fourth_order_convergence(baseline):
    # Halving dt must shrink the error against a dt/8 reference ~16x.
    params = dataclasses.replace(
        baseline, lam=5.0, kappa=0.01, gamma_a=0.02, n_th=0.0
    )
    frame = build_frame(params)
    rho0 = prepare_initial_state(params, 0.0)

    def rho11_at_5(dt, stride):
        trace = evolve(rho0, frame, params, 5.0, dt=dt, stride=stride)
        assert trace.samples[-1].t == pytest.approx(5.0, abs=1e-12)
        return trace.samples[-1].rho11

    ref = rho11_at_5(1.25e-4, 40000)
    e1 = abs(rho11_at_5(1e-3, 5000) - ref)
    e2 = abs(rho11_at_5(5e-4, 10000) - ref)
    assert e1 > 0 and e2 > 0
    assert 12.0 <= e1 / e2 <= 20.0


# ---------------------------------------------------------------------------
# fock_lindblad_oracle


def test_oracle_matches_evolve_without_thermal_occupation(baseline):
    # n_th = 0 keeps the four-level manifold exactly closed, so the full
    # Fock-space solution and the truncated equations must agree.
    params = dataclasses.replace(baseline, n_th=0.0)
    frame = build_frame(params)
    rho0 = prepare_initial_state(params, QUARTER)
    trace = evolve(rho0, frame, params, 5.0, stride=500)
    oracle = fock_lindblad_oracle(
        rho0, frame, params, 5.0, fock_cutoff=6, times=trace.times
    )
    assert max_sample_diff(trace, oracle) <= 1e-6


def test_oracle_thermal_fixed_point(baseline):
    # With no coupling and no spin decay the oscillator relaxes to the
    # bath occupancy (rate kappa, so t = 20 leaves only the ~1e-6 cutoff
    # trapping deficit).
    params = dataclasses.replace(baseline, gamma_a=0.0, n_th=0.3)
    rho0 = DensityMatrix4(rho11=1.0, rho33=0.0, rho44=0.0, rho14=0.0j, t=0.0)
    oracle = fock_lindblad_oracle(
        rho0, free_frame(0.0), params, 20.0, fock_cutoff=10
    )
    assert oracle.occupancy[0] == pytest.approx(0.0, abs=1e-12)
    assert oracle.occupancy[-1] == pytest.approx(0.3, abs=1e-5)


def test_oracle_cutoff_leakage_detected(baseline):
    from spinoptomech import CutoffTooSmall

    params = dataclasses.replace(baseline, gamma_a=0.0, n_th=1.0)
    rho0 = DensityMatrix4(rho11=1.0, rho33=0.0, rho44=0.0, rho14=0.0j, t=0.0)
    with pytest.raises(CutoffTooSmall):
        fock_lindblad_oracle(rho0, free_frame(0.0), params, 8.0, fock_cutoff=3)


def test_oracle_requires_minimum_cutoff(baseline):
    rho0 = DensityMatrix4(rho11=1.0, rho33=0.0, rho44=0.0, rho14=0.0j, t=0.0)
    with pytest.raises(ParameterInvalid):
        fock_lindblad_oracle(rho0, free_frame(1.0), baseline, 1.0, fock_cutoff=2)


def test_truncation_error_at_finite_temperature_is_recorded(baseline, capsys):
    # At n_th > 0 the truncated equations omit thermal pumping out of the
    # manifold; the deviation from the full solver is measured and printed,
    # not asserted to a tight bound.  (fock_cutoff = 7: the transient from
    # the initially occupied phonon level pushes 1.35e-6 onto level 6,
    # tripping the leakage gate one level lower.)
    params = baseline  # n_th = 0.1
    frame = build_frame(params)
    rho0 = prepare_initial_state(params, QUARTER)
    trace = evolve(rho0, frame, params, 10.0, stride=1000)
    oracle = fock_lindblad_oracle(
        rho0, frame, params, 10.0, fock_cutoff=7, times=trace.times
    )
    dev = max_sample_diff(trace, oracle)
    with capsys.disabled():
        print(f"\n[truncation] max |evolve - oracle| at n_th=0.1: {dev:.3e}")
    assert math.isfinite(dev)
    assert dev < 0.5  # sanity only: it is a model truncation, not a bug


# ---------------------------------------------------------------------------
# concurrence_mixed


def test_concurrence_bell_state():
    rho = DensityMatrix4(rho11=0.5, rho33=0.0, rho44=0.5, rho14=0.5j, t=0.0)
    assert concurrence_mixed(rho) == pytest.approx(1.0, abs=1e-15)


def test_concurrence_diagonal_states():
    rng = np.random.default_rng(5)
    for _ in range(50):
        p = rng.dirichlet((1.0, 1.0, 1.0))
        rho = DensityMatrix4(p[0], p[1], p[2], 0.0j, t=0.0)
        assert concurrence_mixed(rho) == 0.0


def test_concurrence_matches_general_eigenvalue_formula():
    # The structure-aware closed form must agree with the generic Wootters
    # recipe (spin-flipped product, dense eigensolver) on random states.
    sy2 = np.array([[0.0, -1.0j], [1.0j, 0.0]])
    spin_flip = np.kron(sy2, sy2).real
    rng = np.random.default_rng(17)
    for _ in range(1000):
        rho11, rho33, rho44, rho14 = random_x_state(rng)
        rho = DensityMatrix4(rho11, rho33, rho44, rho14, t=0.0)
        m = rho.as_matrix()
        product = m @ spin_flip @ m.conj() @ spin_flip
        roots = np.sqrt(np.clip(np.linalg.eigvals(product).real, 0.0, None))
        roots.sort()
        general = max(0.0, roots[3] - roots[2] - roots[1] - roots[0])
        assert concurrence_mixed(rho) == pytest.approx(general, abs=1e-10)
        assert concurrence_mixed(rho) == pytest.approx(
            2.0 * abs(rho14), abs=1e-12
        )


def test_concurrence_pure_state_consistency(baseline):
    # On pure states the mixed-state measure must reduce to the pure one.
    frame = build_frame(baseline)
    for t in np.linspace(0.0, 3.0, 31):
        amps = amplitudes(frame, t)
        rho = DensityMatrix4(
            rho11=abs(amps.c_up0) ** 2,
            rho33=0.0,
            rho44=abs(amps.c_down1) ** 2,
            rho14=amps.c_up0 * np.conj(amps.c_down1),
            t=t,
        )
        assert abs(concurrence_mixed(rho) - concurrence_pure(amps)) <= 1e-10


def test_concurrence_rejects_invalid_state():
    with pytest.raises(NotAState):
        concurrence_mixed(DensityMatrix4(0.7, 0.0, 0.0, 0.0j, t=0.0))
    with pytest.raises(NotAState):
        # Coherence too large for the populations: negative eigenvalue.
        concurrence_mixed(DensityMatrix4(0.5, 0.3, 0.2, 0.45 + 0.0j, t=0.0))


# ---------------------------------------------------------------------------
# concurrence_trace


def test_concurrence_trace_lossless_composition(baseline):
    # Without dissipation and without photons the prepared phase simply
    # continues: C(T) = |sin(2*(T1 + T))|.
    params = dataclasses.replace(baseline, kappa=0.0, gamma_a=0.0, n_th=0.0)
    series = concurrence_trace(params, QUARTER, 2.0, [0], dt=1e-3, stride=100)[0]
    assert series.n == 0
    for t, c in zip(series.times, series.concurrence):
        assert c == pytest.approx(abs(math.sin(2.0 * (QUARTER + t))), abs=1e-9)
    assert series.concurrence[0] == pytest.approx(1.0, abs=1e-12)


def test_concurrence_trace_decays_with_dissipation(baseline):
    # n = 0 with the standard rates: the envelope decays at
    # kappa*(n_th + 1) + gamma_a over one coherence time.
    series = concurrence_trace(baseline, QUARTER, 5.0, [0], dt=1e-3, stride=100)[0]
    envelope_rate = baseline.kappa * (baseline.n_th + 1.0) + baseline.gamma_a
    # Compare peak heights against the coherence-decay envelope.
    c = series.concurrence
    t = series.times
    peaks = [
        i
        for i in range(1, len(c) - 1)
        if c[i] > c[i - 1] and c[i] > c[i + 1] and c[i] > 0.02
    ]
    assert len(peaks) >= 2
    for i in peaks:
        assert c[i] <= math.exp(-0.5 * envelope_rate * t[i]) * 1.05
    assert c[-1] < 0.1 < c[0]
