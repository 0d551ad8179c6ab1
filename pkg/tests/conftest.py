"""Shared fixtures: kernel warmup, reusable full-length trajectory sets.

The compiled kernels are exercised once on tiny problems before any
timed assertion runs, so acceptance-time budgets measure integration
work rather than JIT compilation.  The expensive bath sweeps are
session-scoped and shared by the conservation, positivity, and
figure-level tests.
"""

import numpy as np
import pytest

from roasim.model import (
    DiscreteBath,
    DiscretizationConfig,
    IntegratorConfig,
    LorentzianPeak,
    Scenario,
    SiteBath,
)
from roasim.presets import BATH_TABLE, chain_couplings, preset
from roasim.runner import run_scenario

ACCEPTANCE_LINES = []


def record_acceptance(line: str) -> None:
    ACCEPTANCE_LINES.append(line)


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


def closed_system_scenario(method: str, cfg: IntegratorConfig) -> Scenario:
    """Three-site chain with all couplings switched off, per method family."""
    if method in ("general-low", "general-high"):
        bath = DiscreteBath(np.array([1.0]), np.zeros((1, 3), dtype=complex))
    else:
        bath = [
            SiteBath(site=i, peaks=[LorentzianPeak(weight=0.0, half_width=0.1, center=1.0)])
            for i in range(3)
        ]
    return Scenario(
        n_sites=3,
        couplings=chain_couplings(3),
        bath=bath,
        initial_state=np.array([1.0, 0.0, 0.0], dtype=complex),
        method=method,
        integrator=cfg,
    )


def dephasing_scenario(cfg: IntegratorConfig) -> Scenario:
    """Zero system Hamiltonian, one unit mode on the first site only."""
    return Scenario(
        n_sites=3,
        couplings=np.zeros((3, 3)),
        bath=DiscreteBath(np.array([1.0]), np.array([[1.0, 0.0, 0.0]], dtype=complex)),
        initial_state=np.array([1.0, 1.0, 1.0], dtype=complex) / np.sqrt(3.0),
        method="general-low",
        integrator=cfg,
    )


@pytest.fixture(scope="session")
def warm_kernels():
    """Compile every kernel once on tiny problems."""
    tiny = IntegratorConfig(dt=1e-2, t_max=0.1, sample_stride=10)
    for method in ("general-low", "general-high", "lorentzian-low",
                   "lorentzian-high", "pm-reference"):
        run_scenario(closed_system_scenario(method, tiny))
    sc = preset("bath-A", method="lorentzian-low").with_overrides(integrator=tiny)
    run_scenario(sc)
    return True


@pytest.fixture(scope="session")
def bath_runs(warm_kernels):
    """Full [0, 30] trajectories for all four block variants on baths A-D.

    The high-order discrete-mode variant uses a 5x coarser step to keep
    the sweep affordable; the conserved quantities under test here are
    step-size independent.
    """
    runs = {}
    for bath in BATH_TABLE:
        for method in ("general-low", "general-high", "lorentzian-low", "lorentzian-high"):
            dt = 5e-3 if method == "general-high" else 1e-3
            cfg = IntegratorConfig(dt=dt, t_max=30.0, sample_stride=int(round(0.1 / dt)))
            sc = preset(bath, method=method).with_overrides(integrator=cfg)
            runs[(method, bath)] = run_scenario(sc)
    return runs


@pytest.fixture(scope="session")
def pm_bath_a(warm_kernels):
    cfg = IntegratorConfig(dt=2e-2, t_max=30.0, sample_stride=5)
    return run_scenario(preset("bath-A", method="pm-reference").with_overrides(integrator=cfg))


@pytest.fixture(scope="session")
def pm_bath_d(warm_kernels):
    cfg = IntegratorConfig(dt=5e-2, t_max=30.0, sample_stride=2)
    return run_scenario(preset("bath-D", method="pm-reference").with_overrides(integrator=cfg))


@pytest.fixture(scope="session")
def ring_runs(warm_kernels):
    """Ring scenario with a representative single-peak bath on every site.

    The damped-mode reference cannot represent 15 modes (dimension cap)
    and the high-order variants need minutes per run at this size, so the
    ring is exercised with the two low-order variants on a shortened
    window and a coarse mode grid.
    """
    peaks = [LorentzianPeak(weight=0.3, half_width=0.1, center=1.0)]
    cfg = IntegratorConfig(dt=1e-2, t_max=10.0, sample_stride=100)
    runs = {}
    sc = preset("ring-15", method="lorentzian-low", peaks=peaks).with_overrides(integrator=cfg)
    runs["lorentzian-low"] = run_scenario(sc)
    sc = preset("ring-15", method="general-low", peaks=peaks).with_overrides(
        integrator=cfg, discretization=DiscretizationConfig(delta_omega=0.5))
    runs["general-low"] = run_scenario(sc)
    return runs
