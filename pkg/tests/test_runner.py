"""End-to-end scenario execution through run_scenario."""

import numpy as np
import pytest

from roasim.model import (
    IntegratorConfig,
    LorentzianPeak,
    Scenario,
    ScenarioError,
    SiteBath,
)
from roasim.runner import Trajectory, run_scenario


def dimer(method="lorentzian-low", **integ):
    cfg = IntegratorConfig(**integ) if integ else IntegratorConfig(
        dt=5e-3, t_max=3.0, sample_stride=100
    )
    return Scenario(
        n_sites=2,
        couplings=np.array([[0.0, -1.0], [-1.0, 0.0]]),
        bath=(
            SiteBath(site=0, peaks=(LorentzianPeak(0.3, 0.1, 1.0),)),
            SiteBath(site=1, peaks=(LorentzianPeak(0.3, 0.1, 1.0),)),
        ),
        initial_state=np.array([1.0, 0.0]),
        method=method,
        integrator=cfg,
    )


def test_run_lorentzian_low_basic():
    traj = run_scenario(dimer())
    assert traj.completed
    assert traj.status == "completed"
    assert traj.method == "lorentzian-low"
    assert traj.times[0] == 0.0
    assert traj.times[-1] == pytest.approx(3.0)
    assert traj.wall_time > 0
    # first sample is the initial state
    assert np.allclose(traj.samples[0].rho, np.diag([1.0, 0.0]))
    assert traj.samples[0].purity == pytest.approx(1.0)
    # damped variants carry no energy functional
    assert all(s.energy is None for s in traj.samples)
    # positive form: every sample unit trace, PSD
    for s in traj.samples:
        assert abs(np.trace(s.rho) - 1.0) < 1e-12
        assert np.linalg.eigvalsh(s.rho).min() > -1e-10


def test_run_validates_first():
    bad = dimer().with_overrides(initial_state=np.array([2.0, 0.0]))
    with pytest.raises(ScenarioError, match="normalized"):
        run_scenario(bad)
    # validation can be skipped explicitly
    traj = run_scenario(
        bad.with_overrides(initial_state=np.array([1.0, 0.0])), validate=False
    )
    assert traj.completed


def test_run_pm_reference():
    traj = run_scenario(dimer("pm-reference"))
    assert traj.completed
    assert traj.samples[-1].trace_residual < 1e-10
    assert traj.samples[-1].purity < 1.0


def test_run_general_low_records_energy():
    sc = dimer("general-low")
    traj = run_scenario(sc)
    assert traj.completed
    energies = [s.energy for s in traj.samples]
    assert all(e is not None for e in energies)
    assert max(abs(e - energies[0]) for e in energies) < 1e-6


def test_rho_form_dispatch():
    sc = dimer()
    pos = run_scenario(sc, rho_form="positive")
    tr = run_scenario(sc, rho_form="trace")
    # the two reconstructions agree at t = 0 and drift apart later
    assert np.allclose(pos.samples[0].rho, tr.samples[0].rho)
    final_gap = np.abs(pos.samples[-1].rho - tr.samples[-1].rho).max()
    assert final_gap < 0.2  # same physics, different closure
    with pytest.raises(ValueError, match="unknown density-matrix form"):
        run_scenario(sc, rho_form="magic")


def test_collect_states():
    traj = run_scenario(dimer(), collect_states=True)
    assert traj.states is not None
    assert len(traj.states) == len(traj.times)
    assert traj.states[0].ndim == 1
    default = run_scenario(dimer())
    assert default.states is None


def test_column_accessor():
    traj = run_scenario(dimer())
    re = traj.column(0, 0)
    im = traj.column(0, 1, "im")
    assert re.shape == (len(traj.times),)
    assert re[0] == pytest.approx(1.0)
    assert im.dtype == float


def test_ordering_weight_passthrough():
    sc = dimer("general-low")
    base = run_scenario(sc)
    skew = run_scenario(sc, ordering_weight=0.0)
    gap = np.abs(base.samples[-1].rho - skew.samples[-1].rho).max()
    assert gap > 1e-6  # the knob has an effect
    with pytest.raises(ValueError, match="only adjustable"):
        run_scenario(dimer("lorentzian-low"), ordering_weight=0.0)


def test_trajectory_defaults():
    traj = Trajectory(scenario=dimer(), method="lorentzian-low")
    assert traj.status == "error"
    assert not traj.completed
