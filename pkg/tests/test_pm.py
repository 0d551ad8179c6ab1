"""Damped-mode reference solver: operators, generator, exact limits."""

import numpy as np
import pytest
import scipy.sparse as sp

from roasim.integrator import integrate
from roasim.model import (
    DiscreteBath,
    IntegratorConfig,
    LorentzianPeak,
    PMConfig,
    Scenario,
    SiteBath,
)
from roasim.oracles import damped_exchange_amplitudes
from roasim.pm import PMModel, Pseudomode, default_n_max, simulate_pm


def exchange_scenario(weight=0.25, width=0.2, center=0.7, n_max=3):
    return Scenario(
        n_sites=2,
        couplings=np.zeros((2, 2)),
        bath=(
            SiteBath(site=0, peaks=()),
            SiteBath(site=1, peaks=(LorentzianPeak(weight, width, center),)),
        ),
        initial_state=np.array([0.0, 1.0]),
        method="pm-reference",
        pm=PMConfig(n_max=n_max),
    )


def test_from_scenario_shapes_and_zero_weight_drop():
    sc = exchange_scenario()
    model = PMModel.from_scenario(sc)
    assert model.n_sites == 2
    assert model.n_modes == 1
    assert model.n_max == 3
    assert model.dim == 2 * 4
    # zero-weight peaks are dropped
    sc2 = sc.with_overrides(
        bath=(
            SiteBath(site=0, peaks=(LorentzianPeak(0.0, 0.1, 1.0),)),
            SiteBath(site=1, peaks=(LorentzianPeak(0.25, 0.2, 0.7),)),
        )
    )
    assert PMModel.from_scenario(sc2).n_modes == 1


def test_from_scenario_rejects_discrete_bath():
    sc = Scenario(
        n_sites=1,
        couplings=np.zeros((1, 1)),
        bath=DiscreteBath(np.array([1.0]), np.ones((1, 1), dtype=complex)),
        initial_state=np.array([1.0]),
        method="general-low",
    )
    with pytest.raises(ValueError, match="Lorentzian"):
        PMModel.from_scenario(sc)


def test_default_n_max_heuristic():
    weak = [Pseudomode(site=0, center=1.0, half_width=0.1, root_weight=0.5)]
    strong = [Pseudomode(site=0, center=1.0, half_width=0.1, root_weight=0.9)]
    assert default_n_max(weak) == 4
    assert default_n_max(strong) == 6


def test_dim_cap_enforced():
    mode = Pseudomode(site=0, center=1.0, half_width=0.1, root_weight=0.5)
    with pytest.raises(ValueError, match="exceeds cap"):
        PMModel(np.zeros((2, 2)), [mode] * 6, n_max=9, dim_cap=1000)
    with pytest.raises(ValueError, match="n_max"):
        PMModel(np.zeros((2, 2)), [mode], n_max=0)


def test_operator_algebra():
    model = PMModel(
        np.array([[0.0, -1.0], [-1.0, 0.0]]),
        [
            Pseudomode(site=0, center=1.0, half_width=0.1, root_weight=0.4),
            Pseudomode(site=1, center=-0.5, half_width=0.3, root_weight=0.6),
        ],
        n_max=2,
    )
    for p in range(2):
        b = model.lowering_operator(p).toarray()
        n = model.number_operator(p).toarray()
        # commutator and number identities hold below the truncation edge
        assert np.allclose(b.conj().T @ b, n)
        comm = b @ b.conj().T - b.conj().T @ b
        top = model.mode_occupation(p, np.arange(model.dim)) == model.n_max
        expect = np.where(top, -model.n_max, 1.0)
        assert np.allclose(np.diag(comm), expect)
    # projectors resolve the identity
    total = sum(model.site_projector(m).toarray() for m in range(2))
    assert np.allclose(total, np.eye(model.dim))
    # modes commute
    b0 = model.lowering_operator(0).toarray()
    b1 = model.lowering_operator(1).toarray()
    assert np.allclose(b0 @ b1, b1 @ b0)


def test_hamiltonian_is_hermitian():
    model = PMModel(
        np.array([[0.3, -1.0], [-1.0, -0.2]]),
        [Pseudomode(site=0, center=0.9, half_width=0.15, root_weight=0.5)],
        n_max=3,
    )
    h = model.hamiltonian().toarray()
    assert np.abs(h - h.conj().T).max() < 1e-14


def test_initial_density_and_partial_trace_invert():
    model = PMModel(
        np.eye(2), [Pseudomode(site=0, center=1.0, half_width=0.1, root_weight=0.3)],
        n_max=2,
    )
    rho_s = np.array([[0.7, 0.1 - 0.2j], [0.1 + 0.2j, 0.3]])
    rho = model.initial_density(rho_s)
    assert rho.shape == (model.dim, model.dim)
    assert abs(np.trace(rho) - 1.0) < 1e-14
    assert np.allclose(model.partial_trace(rho), rho_s)


def test_mode_occupation_indexing():
    model = PMModel(
        np.eye(2),
        [
            Pseudomode(site=0, center=1.0, half_width=0.1, root_weight=0.3),
            Pseudomode(site=1, center=1.0, half_width=0.1, root_weight=0.3),
        ],
        n_max=2,
    )
    i = np.arange(model.dim)
    occ1 = model.mode_occupation(1, i)
    # fastest index cycles through the last mode's levels
    assert occ1[:6].tolist() == [0, 1, 2, 0, 1, 2]
    occ0 = model.mode_occupation(0, i)
    assert occ0[:9].tolist() == [0, 0, 0, 1, 1, 1, 2, 2, 2]


def test_generator_matches_dense_superoperator():
    # full Liouvillian built densely: L(rho) = -i[H, rho]
    # + sum_p rate (b rho b^+ - {n, rho}/2)
    model = PMModel(
        np.array([[0.1, -0.8], [-0.8, -0.3]]),
        [Pseudomode(site=1, center=0.7, half_width=0.2, root_weight=0.5)],
        n_max=2,
    )
    action = model.action()
    H = model.hamiltonian().toarray()
    b = model.lowering_operator(0).toarray()
    n_op = b.conj().T @ b
    rate = 2 * 0.2
    r = np.random.default_rng(2)
    x = r.standard_normal((model.dim, model.dim)) + 1j * r.standard_normal(
        (model.dim, model.dim)
    )
    rho = x + x.conj().T
    expected = -1j * (H @ rho - rho @ H) + rate * (
        b @ rho @ b.conj().T - 0.5 * (n_op @ rho + rho @ n_op)
    )
    out = np.zeros(model.dim**2, dtype=complex)
    action.rhs(0.0, rho.ravel().copy(), out)
    assert np.abs(out.reshape(model.dim, model.dim) - expected).max() < 1e-12
    out2 = np.zeros_like(out)
    action.generic_rhs(0.0, x.ravel().copy(), out2)
    expected2 = -1j * (H @ x - x @ H) + rate * (
        b @ x @ b.conj().T - 0.5 * (n_op @ x + x @ n_op)
    )
    assert np.abs(out2.reshape(model.dim, model.dim) - expected2).max() < 1e-12


def test_custom_hamiltonian_substitution():
    model = PMModel(
        np.zeros((1, 1)),
        [Pseudomode(site=0, center=1.0, half_width=0.25, root_weight=0.0)],
        n_max=2,
    )
    # zero Hamiltonian: pure decay of the mode occupation
    action = model.action(hamiltonian=sp.csr_matrix((model.dim, model.dim)))
    rho = np.diag([0.0, 1.0, 0.0]).astype(complex)  # one photon
    out = np.zeros(model.dim**2, dtype=complex)
    action.rhs(0.0, rho.ravel().copy(), out)
    d = out.reshape(model.dim, model.dim)
    # d rho_11 = -rate * 1, d rho_00 = +rate * 1
    assert d[1, 1] == pytest.approx(-0.5)
    assert d[0, 0] == pytest.approx(+0.5)


def test_single_excitation_exchange_matches_oracle():
    """Damped vacuum exchange against the non-Hermitian 2x2 closed form.

    A custom composite Hamiltonian with an excitation-exchange coupling
    makes the one-quantum sector close exactly: the jump target (ground
    state, no photon) is dark, so the excited population is |c_s|^2 from
    the damped two-level amplitude equations.
    """
    k, center, gamma = np.sqrt(0.25), 0.7, 0.2
    model = PMModel(
        np.zeros((2, 2)),
        [Pseudomode(site=1, center=center, half_width=gamma, root_weight=k)],
        n_max=3,
    )
    b = model.lowering_operator(0)
    eye_fock = sp.identity(model.fock_dim, dtype=complex, format="csr")
    lower_sys = sp.kron(
        sp.csr_matrix((np.ones(1, dtype=complex), ([0], [1])), shape=(2, 2)),
        eye_fock, format="csr",
    )
    h = center * model.number_operator(0) + k * (
        lower_sys @ b.conj().T.tocsr() + lower_sys.conj().T.tocsr() @ b
    )
    action = model.action(hamiltonian=h)
    rho_s0 = np.diag([0.0, 1.0]).astype(complex)  # excitation on level 1
    y0 = model.initial_density(rho_s0).reshape(-1)
    cfg = IntegratorConfig(dt=1e-3, t_max=4.0, sample_stride=4000)
    holder = {}
    report = integrate(action.rhs, y0, cfg,
                       observer=lambda i, t, y: holder.update(y=y.copy()))
    assert report.ok
    rho_s = model.partial_trace(holder["y"].reshape(model.dim, model.dim))
    c_s, _ = damped_exchange_amplitudes(k, center, gamma, 4.0)
    assert rho_s[1, 1].real == pytest.approx(abs(c_s) ** 2, abs=1e-10)
    assert abs(np.trace(rho_s) - 1.0) < 1e-10


def test_free_mode_correlation_function():
    """<b(t) b^+(0)> over the vacuum decays as exp((-i w0 - gamma) t)."""
    model = PMModel(
        np.zeros((1, 1)),
        [Pseudomode(site=0, center=1.3, half_width=0.35, root_weight=0.0)],
        n_max=2,
    )
    action = model.action()
    b = model.lowering_operator(0).toarray()
    vac = np.zeros((model.dim, model.dim), dtype=complex)
    vac[0, 0] = 1.0
    # evolve X = b^+ |vac><vac| under the generator, then take tr(b X)
    X = b.conj().T @ vac
    cfg = IntegratorConfig(dt=1e-3, t_max=2.0, sample_stride=2000)
    holder = {}
    report = integrate(
        action.generic_rhs, X.reshape(-1), cfg,
        observer=lambda i, t, y: holder.update(y=y.copy()),
    )
    assert report.ok
    val = np.trace(b @ holder["y"].reshape(model.dim, model.dim))
    expected = np.exp((-1j * 1.3 - 0.35) * 2.0)
    assert abs(val - expected) < 1e-12


def test_simulate_pm_open_dimer():
    # hopping dimer with one damped site: trace exact, purity decays
    sc = Scenario(
        n_sites=2,
        couplings=np.array([[0.0, -1.0], [-1.0, 0.0]]),
        bath=(
            SiteBath(site=0, peaks=()),
            SiteBath(site=1, peaks=(LorentzianPeak(0.3, 0.1, 1.0),)),
        ),
        initial_state=np.array([1.0, 0.0]),
        method="pm-reference",
        pm=PMConfig(n_max=3),
    )
    model = PMModel.from_scenario(sc)
    cfg = IntegratorConfig(dt=5e-3, t_max=5.0, sample_stride=200)
    times, rhos, report = simulate_pm(model, sc.initial_density(), cfg)
    assert report.ok
    assert len(times) == len(rhos)
    for rho in rhos:
        assert abs(np.trace(rho) - 1.0) < 1e-10
        assert np.abs(rho - rho.conj().T).max() < 1e-10
    pops = np.array([r[0, 0].real for r in rhos])
    assert pops.min() < 0.5  # the excitation does move
    final_purity = np.einsum("mn,nm->", rhos[-1], rhos[-1]).real
    assert final_purity < 1.0 - 1e-3  # bath entanglement shows up
