import dataclasses

import pytest

from spinoptomech import SystemParams


@pytest.fixture
def baseline() -> SystemParams:
    """Standard parameter set: lam = kappa, omega_b = 2000, g = 1e-5*omega_b,
    Omega = omega_b, gamma_a = 0.1, n_th = 0.1."""
    return SystemParams(
        lam=1.0,
        omega_b=2000.0,
        omega_a=0.0,
        g=0.02,
        Omega=2000.0,
        kappa=1.0,
        gamma_a=0.1,
        n_th=0.1,
        n=0,
    )


@pytest.fixture
def with_photons(baseline):
    def _make(n: int, **overrides) -> SystemParams:
        return dataclasses.replace(baseline, n=n, **overrides)

    return _make
