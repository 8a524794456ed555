"""Exit-criteria checks; each test prints one PASS/FAIL line with the measured values."""

from __future__ import annotations

import math
import time

import numpy as np
import pytest

from skyrmech import cli, device, dynamics, qubit_spectrum, scenarios, tip_field, topo_bath
from skyrmech.errors import SqueezeDiverges
from skyrmech.operators import basis_state
from skyrmech.units import TWO_PI

pytestmark = pytest.mark.acceptance

CFG = cli.default_config()


def report(number: int, title: str, ok: bool, detail: str) -> None:
    print(f"\n[{'PASS' if ok else 'FAIL'}] criterion {number:2d} {title}: {detail}")
    assert ok, detail


def best_time(fn, repeats: int = 5) -> float:
    best = math.inf
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def test_01_cantilever_frequency():
    geom = scenarios.cantilever(CFG)
    f_m = device.cantilever_frequency(geom)
    dt = best_time(lambda: device.cantilever_frequency(geom))
    ok = abs(f_m / 9.7e6 - 1) < 0.05 and dt < 1e-3
    report(1, "cantilever frequency", ok, f"f_m = {f_m / 1e6:.4f} MHz (target 9.7 MHz +/- 5%), {dt * 1e3:.3f} ms")


def test_02_tip_gradient():
    geom = scenarios.tip_geometry(CFG)
    z = CFG["tip"]["h_ts_nm"] * 1e-9
    t0 = time.perf_counter()
    g = tip_field.field_gradient(geom, z)
    h = 1e-12
    fd = (tip_field.bz_on_axis(geom, z + h) - tip_field.bz_on_axis(geom, z - h)) / (2 * h)
    dt = time.perf_counter() - t0
    rel = abs(tip_field.gradient_on_axis(geom, z) / fd - 1)
    ok = abs(g / 1.74e7 - 1) < 0.10 and rel < 1e-6 and dt < 1.0
    report(2, "tip gradient", ok, f"G = {g:.5e} T/m (target 1.74e7 +/- 10%), analytic vs FD rel {rel:.1e}, {dt:.3f} s")


def test_03_coupling_budget():
    _, zp = scenarios.zero_point(CFG)
    grad = tip_field.field_gradient(scenarios.tip_geometry(CFG), CFG["tip"]["h_ts_nm"] * 1e-9)
    sbar, lande = CFG["material"]["spin_sbar"], CFG["material"]["lande_g"]

    def evaluate():
        lam = device.bare_coupling(zp.z0, grad, sbar, lande)
        coop = device.cooperativity(TWO_PI * 3.56e6, TWO_PI * 0.1e6, TWO_PI * 1e6)
        return lam, coop

    lam, coop = evaluate()
    dt = best_time(evaluate)
    ratio = lam / TWO_PI / 3.56e6
    ok = 0.5 <= ratio <= 2.0 and round(coop) == 507 and coop == pytest.approx(4 * 3.56**2 / 0.1, rel=1e-12) and dt < 1e-3
    report(
        3, "coupling budget", ok,
        f"lambda/2pi = {lam / TWO_PI / 1e6:.4f} MHz (ratio {ratio:.3f} to 3.56 MHz), cooperativity {coop:.3f}, {dt * 1e3:.3f} ms",
    )


def test_04_hopping_scaling():
    g1 = scenarios.hopping(CFG, 1.0)
    g10 = scenarios.hopping(CFG, 10.0)
    dt = best_time(lambda: scenarios.hopping(CFG, 1.0))
    ratio = g10 / g1
    g_hz = g1 / TWO_PI
    ok = abs(ratio - 100) < 100 * 4 * np.finfo(float).eps and 0.12e6 / 5 <= g_hz <= 0.12e6 * 5 and dt < 1e-3
    report(4, "hopping scaling", ok, f"g(10V)/g(1V) = {ratio!r}, g(1V)/2pi = {g_hz / 1e6:.4f} MHz, {dt * 1e3:.3f} ms")


def test_05_squeeze_identities():
    rng = np.random.default_rng(2024)
    dm = 10 ** rng.uniform(-2, 2, 200)
    drive = rng.uniform(-0.999, 0.999, 200) * dm
    lam_bar = 10 ** rng.uniform(-2, 2, 200)
    t0 = time.perf_counter()
    frames = [device.squeeze_frame(a, b, c) for a, b, c in zip(dm, drive, lam_bar)]
    dt = time.perf_counter() - t0
    err_drive = max(abs(math.tanh(2 * f.r) * a / b - 1) for f, a, b in zip(frames, dm, drive))
    err_lam = max(abs(f.lambda_eff / (c * math.exp(f.r) / 2) - 1) for f, c in zip(frames, lam_bar))
    raised = 0
    for om in (1.0, -1.0, 1.5, -3.0):
        try:
            device.squeeze_frame(1.0, om, 1.0)
        except SqueezeDiverges:
            raised += 1
    ok = err_drive < 1e-12 and err_lam < 1e-12 and raised == 4 and dt < 10e-3
    report(5, "squeeze identities", ok, f"max rel err {err_drive:.1e} / {err_lam:.1e}, diverges raised {raised}/4, {dt * 1e3:.2f} ms")


def test_06_jc_rabi_oracle():
    p = dict(CFG["fig3"])
    lam = device.squeeze_from_r(0.0, p["delta_m_over_lambda"], 1.0).lambda_eff
    p["t_max"] = 3 * math.pi / lam
    t0 = time.perf_counter()
    res = scenarios.rabi_run(0.0, p, CFG["solver"], True, p["n_max_sc"])
    dt = time.perf_counter() - t0
    dev = float(np.max(np.abs(res.traces["P_e1"] - np.cos(lam * res.times) ** 2)))
    ok = dev < 1e-6 and dt < 5.0
    report(6, "JC Rabi oracle", ok, f"max |P_e - cos^2| = {dev:.1e} over 3 periods, {dt:.2f} s")


def test_07_usc_phonon_number():
    p, solver = CFG["fig3"], CFG["solver"]
    t0 = time.perf_counter()
    a = scenarios.rabi_run(p["r_usc"], p, solver, False, p["n_max"])
    b = scenarios.rabi_run(p["r_usc"], p, solver, False, p["n_max"] + 10)
    dt = time.perf_counter() - t0
    n_peak = float(a.traces["n1"].max())
    diff = max(float(np.max(np.abs(a.traces[k] - b.traces[k]))) for k in ("P_e1", "n1"))
    ok = n_peak > 1 and diff < 1e-4 and dt < 60
    report(7, "USC phonon number", ok, f"max <n> = {n_peak:.3f}, n_max {p['n_max']} vs +10 diff {diff:.1e}, {dt:.1f} s")


def test_08_schrieffer_wolff_transfer():
    t0 = time.perf_counter()
    lam_eff, dm = 1.0, 10.0
    big, _ = dynamics.sw_effective_two_qubit(lam_eff, dm)
    t_star = dynamics.transfer_time(big)
    h = dynamics.build_two_qubit_hamiltonian(0.0, dm, lam_eff, 10)
    times = np.linspace(0, 1.5 * t_star, 1201)
    res = dynamics.lindblad_evolve(dynamics.LindbladSpec(h), basis_state(h.space, [0, 1, 0]), times)
    t_peak = float(times[np.argmax(res.traces["P_e1"])])
    p, solver = CFG["fig4"], CFG["solver"]
    on = float(scenarios.two_qubit_run(p["r_on"], p, solver, dephasing=True).traces["P_e1"].max())
    off = float(scenarios.two_qubit_run(p["r_off"], p, solver, dephasing=True).traces["P_e1"].max())
    dt = time.perf_counter() - t0
    ok = abs(t_peak / t_star - 1) < 0.10 and on > 0.5 and off < 0.1 and dt < 120
    report(
        8, "SW transfer", ok,
        f"t_peak/t* = {t_peak / t_star:.4f}, P_e1 peak r={p['r_on']}: {on:.3f}, r={p['r_off']}: {off:.3f}, {dt:.1f} s",
    )


def test_09_dispersion_gap():
    chain = topo_bath.SSHChain(40, 1.0, CFG["fig6"]["delta"])
    k = np.linspace(-math.pi, math.pi, 10_000)
    t0 = time.perf_counter()
    wp, _ = topo_bath.dispersion(chain, k)
    w0 = topo_bath.dispersion(chain, np.array([0.0]))[0][0]
    dt = time.perf_counter() - t0
    rel = abs(wp.min() / (2 * abs(chain.dimerization)) - 1)
    ok = rel < 1e-9 and w0 == 2.0 and dt < 0.1
    report(9, "dispersion gap", ok, f"min Omega+ rel err {rel:.1e}, Omega+(0) = {float(w0)!r}, {dt * 1e3:.2f} ms")


def test_10_bound_state_triple_agreement():
    t0 = time.perf_counter()
    chain = topo_bath.SSHChain(40, 1.0, 0.25)
    cpl = 0.4
    quad_err, chain_err, forbidden = 0.0, 0.0, 0.0
    for attach, site in (("A", topo_bath.Site(20, "A")), ("B", topo_bath.Site(20, "B"))):
        closed = topo_bath.bound_state_closed_form(chain, cpl, attach, (-19, 19))
        quad = topo_bath.bound_state_quadrature(chain, cpl, 0.0, attach, (-19, 19))
        quad_err = max(quad_err, float(np.max(np.abs(quad.site_amplitudes - closed.site_amplitudes))),
                       abs(quad.qubit_amplitude - closed.qubit_amplitude))
        forbidden = max(forbidden, closed.forbidden_weight())
        h = dynamics.build_array_hamiltonian(chain, [site], cpl, 0.0)
        vals, vecs = np.linalg.eigh(h.dense()[1:, 1:])
        v = vecs[:, int(np.argmin(np.abs(vals)))]
        v = v * np.sign(v[0]) * np.sign(closed.qubit_amplitude.real)
        sites = v[1:].reshape(40, 2)[(20 + closed.cells) % 40]
        chain_err = max(chain_err, float(np.max(np.abs(sites - closed.site_amplitudes.real))), abs(v[0] - closed.qubit_amplitude.real))
    dt = time.perf_counter() - t0
    ok = quad_err < 1e-6 and chain_err < 1e-3 and forbidden < 1e-8 and dt < 10
    report(
        10, "bound-state triple agreement", ok,
        f"quad vs closed {quad_err:.1e}, chain vs closed {chain_err:.1e}, forbidden weight {forbidden:.1e}, {dt:.2f} s",
    )


def test_11_chirality_restoration():
    t0 = time.perf_counter()
    table = scenarios.fig7(CFG)[1]
    dt = time.perf_counter() - t0
    chi = {(e, r): c for e, r, _, c in table.rows}
    e0 = CFG["fig7"]["e_bs_over_g"]
    r_lo, r_hi = min(CFG["fig7"]["r_values"]), max(CFG["fig7"]["r_values"])
    pairs = {e: (chi[(e, r_lo)], chi[(e, r_hi)]) for e in (e0, -e0)}
    ok = all(hi > lo for lo, hi in pairs.values()) and dt < 10
    detail = ", ".join(f"E={e:+.2f}: r={r_lo:g} {lo:+.3f} -> r={r_hi:g} {hi:+.3f}" for e, (lo, hi) in pairs.items())
    report(11, "chirality restoration", ok, f"{detail}, {dt:.2f} s")


def test_12_chiral_network_dynamics():
    t0 = time.perf_counter()
    p = dict(CFG["fig8"])
    decoupled, lines, ok = {}, [], True
    for case in ("a", "b"):
        for delta in (0.25, -0.9):
            p.update(case=case, delta=delta)
            res, eff = scenarios.fig8_run(p)
            start = p["initial_excited"] - 1
            g = eff.entries
            partner = int(np.argmax(np.abs(g[start])))
            idle = ({0, 1, 2} - {start, partner}).pop()
            dev = float(np.max(np.abs(res.traces[f"P_e{idle + 1}"] - (1.0 if idle == start else 0.0))))
            pk = res.traces[f"P_e{partner + 1}"]
            t_peak = float(res.times[int(np.argmax(pk))])
            freq_ratio = (math.pi / t_peak) / (2 * abs(g[start, partner]))
            decoupled[(case, delta)] = idle
            ok &= dev < 0.05 and abs(freq_ratio - 1) < 0.10 and pk.max() > 0.9
            lines.append(f"{case}/{delta:+g}: Sky{start + 1}<->Sky{partner + 1} freq ratio {freq_ratio:.3f}, idle Sky{idle + 1} dev {dev:.1e}")
    flips = all(decoupled[(c, 0.25)] != decoupled[(c, -0.9)] for c in ("a", "b"))
    dt = time.perf_counter() - t0
    ok &= flips and dt < 60
    report(12, "chiral network dynamics", ok, "; ".join(lines) + f"; flip {flips}, {dt:.2f} s")


def test_13_qubit_spectrum():
    c = qubit_spectrum.QubitCoefficients(1.0, 1.0, 0.1)
    s_max = CFG["qubit"]["s_max"]
    t0 = time.perf_counter()
    full = qubit_spectrum.diagonalize_qubit(c, s_max)
    bigger = qubit_spectrum.diagonalize_qubit(c, s_max + 10)
    two = qubit_spectrum.two_level_reduction(c)
    dt = time.perf_counter() - t0
    dev = abs(two.omega_q / full.omega_q - 1)
    conv = float(np.max(np.abs(full.energies[:6] - bigger.energies[:6])))
    ok = dev < 0.01 and conv < 1e-10 and dt < 0.1
    report(13, "qubit spectrum", ok, f"two-level vs full omega_q rel dev {dev:.2e}, s_max {s_max} vs +10 diff {conv:.1e}, {dt * 1e3:.2f} ms")
