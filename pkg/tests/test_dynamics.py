from __future__ import annotations

import math
from types import SimpleNamespace

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from skyrmech import dynamics as dyn
from skyrmech import topo_bath as tb
from skyrmech.errors import NotExcitationConserving, PlacementCollision, StepSizeUnderflow, TraceDrift
from skyrmech.operators import SIGMA_MINUS, SIGMA_X, OperatorMatrix, SpaceSpec, basis_state, excitation_number, qubit_op
from skyrmech.topo_bath import Site, SSHChain


def test_rabi_dimension_and_decoupled_spectrum():
    h = dyn.build_rabi_hamiltonian(1.3, 0.7, 0.0, 8)
    assert h.dim == 16
    expect = sorted(s * 0.65 + n * 0.7 for s in (-1, 1) for n in range(8))
    np.testing.assert_allclose(np.linalg.eigvalsh(h.dense()), expect, atol=1e-12)
    with pytest.raises(ValueError):
        dyn.build_rabi_hamiltonian(1, 1, 1, 1)


def test_jc_doublet_splitting():
    lam = 0.05
    h = dyn.build_rabi_hamiltonian(1.0, 1.0, lam, 60, rwa=True)
    e = np.linalg.eigvalsh(h.dense())
    assert e[2] - e[1] == pytest.approx(2 * lam, rel=1e-10)


def test_rabi_has_counter_rotating_terms():
    full = dyn.build_rabi_hamiltonian(1.0, 1.0, 0.1, 10).dense()
    nop = excitation_number(SpaceSpec(1, (10,)))
    assert np.max(np.abs(full @ nop - nop @ full)) > 0.01
    rwa = dyn.build_rabi_hamiltonian(1.0, 1.0, 0.1, 10, rwa=True).dense()
    assert np.max(np.abs(rwa @ nop - nop @ rwa)) < 1e-14


def test_two_qubit_label_swap_equivalence():
    h = dyn.build_two_qubit_hamiltonian(0.4, 1.0, 0.2, 6).dense()
    swap = np.zeros((4, 4))
    for a in range(2):
        for b in range(2):
            swap[2 * b + a, 2 * a + b] = 1
    # swapping labels flips the coupling sign; a pi rotation of the mode (b -> -b) restores it
    parity = np.diag((-1.0) ** np.arange(6))
    u = np.kron(swap, parity)
    np.testing.assert_allclose(u @ h @ u.T, h, atol=1e-14)


def test_two_qubit_product_spectrum_without_coupling():
    h = dyn.build_two_qubit_hamiltonian(0.8, 1.1, 0.0, 5)
    expect = sorted(0.4 * (s1 + s2) + 1.1 * n for s1 in (-1, 1) for s2 in (-1, 1) for n in range(5))
    np.testing.assert_allclose(np.linalg.eigvalsh(h.dense()), expect, atol=1e-12)


def test_two_qubit_low_energy_matches_schrieffer_wolff():
    lam_eff = 1.0
    h = dyn.build_two_qubit_hamiltonian(0.0, 10.0, lam_eff, 30)
    low = np.linalg.eigvalsh(h.dense())[:4]
    big, heff = dyn.sw_effective_two_qubit(lam_eff, 10.0)
    eff = np.linalg.eigvalsh(heff.dense())
    np.testing.assert_allclose(low - low[0], eff - eff[0], atol=0.01 * big)
    assert low[2] - low[1] == pytest.approx(4 * big, rel=0.02)


def test_sw_operator_identity_and_scaling():
    lam, h = dyn.sw_effective_two_qubit(1.0, 10.0)
    xx = np.kron(SIGMA_X, SIGMA_X)
    np.testing.assert_allclose(h.dense(), -lam * (2 * np.eye(4) - 2 * xx), atol=1e-15)
    assert dyn.sw_effective_two_qubit(2.0, 10.0)[0] == pytest.approx(4 * lam)
    with pytest.warns(UserWarning):
        dyn.sw_effective_two_qubit(1.0, 3.0)


def test_full_transfer_time_matches_effective_model():
    lam_eff = 1.0
    lam_ss = lam_eff**2 / 10.0
    t_star = dyn.transfer_time(lam_ss)
    h = dyn.build_two_qubit_hamiltonian(0.0, 10.0, lam_eff, 10)
    t = np.linspace(0, 1.5 * t_star, 1201)
    res = dyn.lindblad_evolve(dyn.LindbladSpec(h), basis_state(h.space, [0, 1, 0]), t)
    t_peak = t[np.argmax(res.traces["P_e1"])]
    assert t_peak == pytest.approx(t_star, rel=0.10)


def test_pure_decay():
    h = OperatorMatrix(np.zeros((2, 2), dtype=complex), SpaceSpec(1, ()))
    t = np.linspace(0, 3, 31)
    res = dyn.lindblad_evolve(dyn.LindbladSpec(h, [(SIGMA_MINUS, 0.7)]), np.array([0, 1]), t)
    np.testing.assert_allclose(res.traces["P_e1"], np.exp(-0.7 * t), atol=1e-8)


def test_jc_rabi_oscillation_and_first_zero():
    lam = 0.5
    h = dyn.build_rabi_hamiltonian(20.0, 20.0, lam, 4, rwa=True)
    t = np.linspace(0, 3 * math.pi / lam, 601)
    res = dyn.lindblad_evolve(dyn.LindbladSpec(h), basis_state(h.space, [1, 0]), t)
    assert np.max(np.abs(res.traces["P_e1"] - np.cos(lam * t) ** 2)) < 1e-6
    res = dyn.lindblad_evolve(dyn.LindbladSpec(h), basis_state(h.space, [1, 0]), [0, math.pi / (2 * lam)])
    assert res.traces["P_e1"][-1] < 1e-8


def test_closed_evolution_invariants():
    h = dyn.build_rabi_hamiltonian(2.0, 1.5, 0.8, 20)
    t = np.linspace(0, 10, 201)
    psi = basis_state(h.space, [1, 0])
    res = dyn.lindblad_evolve(dyn.LindbladSpec(h), psi, t)
    e = res.traces["energy"]
    assert np.max(np.abs(e - e[0])) < 1e-8 * max(1.0, abs(e[0]))
    assert np.max(np.abs(res.trace_of_rho - 1)) < 1e-6
    assert res.min_eigenvalue.min() > dyn.POSITIVITY_FLOOR
    tight = dyn.lindblad_evolve(dyn.LindbladSpec(h), psi, t, rtol=0.5e-9, atol=0.5e-12)
    for k in ("P_e1", "n1"):
        assert np.max(np.abs(tight.traces[k] - res.traces[k])) < 1e-6


def test_open_evolution_positive_and_trace_preserving():
    h = dyn.build_two_qubit_hamiltonian(0.0, 2.0, 0.5, 6)
    ops = dyn.standard_collapse_ops(h, 0.1, 0.5)
    assert len(ops) == 5
    res = dyn.lindblad_evolve(dyn.LindbladSpec(h, ops), basis_state(h.space, [0, 1, 0]), np.linspace(0, 5, 51))
    assert np.max(np.abs(res.trace_of_rho - 1)) < 1e-6
    assert res.min_eigenvalue.min() > dyn.POSITIVITY_FLOOR
    assert all(np.all(res.traces[k] > -1e-9) for k in ("P_e1", "P_e2", "n1"))


def test_negative_rate_rejected():
    h = dyn.build_rabi_hamiltonian(1, 1, 1, 3)
    with pytest.raises(ValueError):
        dyn.LindbladSpec(h, [(np.eye(6), -1.0)])


def test_solver_failure_reported(monkeypatch):
    monkeypatch.setattr(dyn, "solve_ivp", lambda *a, **k: SimpleNamespace(status=-1, message="step size too small"))
    h = dyn.build_rabi_hamiltonian(1, 1, 1, 3)
    with pytest.raises(StepSizeUnderflow):
        dyn.lindblad_evolve(dyn.LindbladSpec(h), basis_state(h.space, [1, 0]), [0, 1])


def test_trace_drift_detected(monkeypatch):
    h = dyn.build_rabi_hamiltonian(1, 1, 1, 3)
    rho = np.zeros(36, dtype=complex)
    rho[0] = 1.0
    bad = np.stack([rho, 1.01 * rho], axis=1)
    monkeypatch.setattr(dyn, "solve_ivp", lambda *a, **k: SimpleNamespace(status=0, y=bad, message=""))
    with pytest.raises(TraceDrift):
        dyn.lindblad_evolve(dyn.LindbladSpec(h), basis_state(h.space, [0, 0]), [0, 1])


def test_hermitian_flag_enforced():
    with pytest.raises(ValueError):
        OperatorMatrix(np.array([[0, 1], [0, 0]], dtype=complex), SpaceSpec(1, ()))


# -- qubit arrays ----------------------------------------------------------


def test_array_placement_collision():
    chain = SSHChain(4, 1.0, 0.2)
    with pytest.raises(PlacementCollision):
        dyn.build_array_hamiltonian(chain, [Site(1, "A"), Site(1, "A")], 0.1)
    with pytest.raises(PlacementCollision):
        dyn.build_array_hamiltonian(chain, [Site(9, "A")], 0.1)


def test_array_conserves_excitations():
    chain = SSHChain(2, 1.0, 0.3)
    h = dyn.build_array_hamiltonian(chain, [Site(0, "A"), Site(1, "B")], 0.2, 0.1, restriction="full")
    n = excitation_number(h.space, sparse=True)
    comm = h.matrix @ n - n @ h.matrix
    assert abs(comm).max() < 1e-12


def test_array_without_coupling_is_union_of_spectra():
    chain = SSHChain(6, 1.0, 0.3)
    h = dyn.build_array_hamiltonian(chain, [Site(2, "B")], 0.0, 0.7)
    e = np.linalg.eigvalsh(h.dense()) + 0.35
    expect = np.sort(np.concatenate([[0.0, 0.7], np.linalg.eigvalsh(chain.hopping_matrix())]))
    np.testing.assert_allclose(e, expect, atol=1e-12)


def test_array_zero_mode_matches_bound_state():
    chain = SSHChain(40, 1.0, 0.25)
    h = dyn.build_array_hamiltonian(chain, [Site(20, "A")], 0.4, 0.0)
    vals, vecs = np.linalg.eigh(h.dense()[1:, 1:])
    i = int(np.argmin(np.abs(vals)))
    assert abs(vals[i]) < 1e-8
    v = vecs[:, i] * np.sign(vecs[0, i])
    bs = tb.bound_state_closed_form(chain, 0.4, "A", (-19, 19))
    assert v[0] == pytest.approx(bs.qubit_amplitude.real, abs=1e-3)
    sites = v[1:].reshape(40, 2)
    np.testing.assert_allclose(sites[(20 + bs.cells) % 40], bs.site_amplitudes.real, atol=1e-3)


def test_single_excitation_full_space_agrees_with_restricted():
    chain = SSHChain(2, 1.0, 0.3)
    sites = [Site(0, "A"), Site(1, "B")]
    t = np.linspace(0, 20, 101)
    small = dyn.build_array_hamiltonian(chain, sites, 0.3, 0.2)
    a = dyn.single_excitation_evolve(small, dyn.array_initial_state(2, 4, 0), t)
    full = dyn.build_array_hamiltonian(chain, sites, 0.3, 0.2, restriction="full")
    psi = basis_state(full.space, [1, 0, 0, 0, 0, 0])
    b = dyn.single_excitation_evolve(full, psi, t)
    for k in ("P_e1", "P_e2", "n_total"):
        np.testing.assert_allclose(a.traces[k], b.traces[k], atol=1e-10)


def test_single_excitation_rejects_non_conserving():
    h = dyn.build_rabi_hamiltonian(1.0, 1.0, 0.3, 4)
    with pytest.raises(NotExcitationConserving):
        dyn.single_excitation_evolve(h, basis_state(h.space, [1, 0]), [0, 1])


def test_single_excitation_rejects_state_outside_sector():
    h = dyn.build_rabi_hamiltonian(1.0, 1.0, 0.3, 4, rwa=True)
    with pytest.raises(NotExcitationConserving):
        dyn.single_excitation_evolve(h, basis_state(h.space, [1, 1]), [0, 1])


@settings(max_examples=20, deadline=None)
@given(st.floats(-0.9, 0.9), st.floats(0.01, 0.3), st.floats(-0.5, 0.5))
def test_single_excitation_norm_conserved(delta, g, dq):
    chain = SSHChain(5, 1.0, delta)
    h = dyn.build_array_hamiltonian(chain, [Site(1, "A"), Site(3, "B")], g, dq)
    res = dyn.single_excitation_evolve(h, dyn.array_initial_state(2, 10, 0), np.linspace(0, 50, 21))
    assert np.max(np.abs(res.trace_of_rho - 1)) < 1e-10


def test_sparse_path_for_large_spaces():
    h = dyn.build_two_qubit_hamiltonian(0.0, 1.0, 0.1, 1100)
    assert h.is_sparse and h.dim == 4400
    sm = qubit_op(SIGMA_MINUS, 0, h.space, sparse=True)
    assert sm.shape == (4400, 4400)
