"""Figure and budget reproductions as plain tables.

Every scenario takes the nested config mapping and returns a list of
``Table`` objects; sweepable scenarios also expose a one-row ``point``
function used by ``skyrmech sweep``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Mapping

import numpy as np

from skyrmech import device, dynamics, qubit_spectrum, tip_field, topo_bath
from skyrmech.operators import basis_state
from skyrmech.units import TWO_PI


@dataclass
class Table:
    name: str
    columns: list[str]
    units: list[str]
    rows: list[tuple]

    def column(self, name: str) -> np.ndarray:
        i = self.columns.index(name)
        return np.array([r[i] for r in self.rows])


Cfg = Mapping[str, Mapping]


# -- device budget ---------------------------------------------------------


def tip_geometry(cfg: Cfg) -> tip_field.TipGeometry:
    t = cfg["tip"]
    return tip_field.TipGeometry.from_nm(t["r_a_nm"], t["r_b_nm"], t["h_tip_nm"], t["s_nm_nm"], t["mu0_ms_t"])


def cantilever(cfg: Cfg) -> device.CantileverGeometry:
    c = cfg["cantilever"]
    return device.CantileverGeometry(
        c["length_um"] * 1e-6, c["width_um"] * 1e-6, c["thickness_um"] * 1e-6, c["density_kg_per_m3"], c["youngs_pa"]
    )


def zero_point(cfg: Cfg) -> tuple[float, device.ZeroPoint]:
    geom = cantilever(cfg)
    f_m = device.cantilever_frequency(geom)
    return f_m, device.zero_point_motion(geom, TWO_PI * f_m, cfg["cantilever"]["mass_fraction"])


def tip_coupling(cfg: Cfg, h_ts_nm: float | None = None, geom: tip_field.TipGeometry | None = None) -> float:
    """Bare coupling (rad/s) at tip-skyrmion distance ``h_ts_nm``."""
    h_ts = cfg["tip"]["h_ts_nm"] if h_ts_nm is None else h_ts_nm
    grad = tip_field.field_gradient(geom or tip_geometry(cfg), h_ts * 1e-9)
    _, zp = zero_point(cfg)
    m = cfg["material"]
    return device.bare_coupling(zp.z0, grad, m["spin_sbar"], m["lande_g"])


def budget(cfg: Cfg) -> list[Table]:
    f_m, zp = zero_point(cfg)
    grad = tip_field.field_gradient(tip_geometry(cfg), cfg["tip"]["h_ts_nm"] * 1e-9)
    m, loss = cfg["material"], cfg["loss"]
    lam = device.bare_coupling(zp.z0, grad, m["spin_sbar"], m["lande_g"])
    coop = device.cooperativity(lam, TWO_PI * loss["gamma_m_mhz"] * 1e6, TWO_PI * loss["gamma_sky_mhz"] * 1e6)
    g1 = hopping(cfg, cfg["hopping"]["voltage_v"])
    rows = [
        ("f_m", f_m, 10e6, "Hz"),
        ("z0", zp.z0, float("nan"), "m"),
        ("mode_mass", zp.mass, float("nan"), "kg"),
        ("G", grad, 1.74e7, "T/m"),
        ("lambda_ts", lam / TWO_PI, 3.56e6, "Hz"),
        ("cooperativity", coop, 507.0, "1"),
        ("hopping_g", g1 / TWO_PI, 0.12e6, "Hz"),
    ]
    return [Table("budget", ["quantity", "value", "reference_value", "unit"], ["-", "-", "-", "-"], rows)]


def budget_point(cfg: Cfg) -> dict:
    t = {r[0]: r[1] for r in budget(cfg)[0].rows}
    return {"f_m_hz": t["f_m"], "z0_m": t["z0"], "g_t_per_m": t["G"], "lambda_ts_hz": t["lambda_ts"], "cooperativity": t["cooperativity"]}


def hopping(cfg: Cfg, voltage: float, squeeze_r: float = 0.0) -> float:
    hp = cfg["hopping"]
    _, zp = zero_point(cfg)
    link = device.hopping_rate(
        voltage, hp["cap_c_ff"] * 1e-15, device.wire_capacitance(hp["gap_d_um"] * 1e-6), hp["gap_h_nm"] * 1e-9, zp.z0, squeeze_r
    )
    return link.dressed_g if squeeze_r else link.bare_g


def fig2_point(cfg: Cfg) -> dict:
    lam = tip_coupling(cfg)
    loss = cfg["fig2"]
    coop = device.cooperativity(lam, TWO_PI * loss["gamma_m_khz"] * 1e3, TWO_PI * loss["gamma_sky_mhz"] * 1e6)
    return {"h_ts_nm": cfg["tip"]["h_ts_nm"], "lambda_ts_hz": lam / TWO_PI, "cooperativity": coop}


def fig2(cfg: Cfg) -> list[Table]:
    p = cfg["fig2"]
    rows = []
    for h in np.linspace(p["h_ts_min_nm"], p["h_ts_max_nm"], p["n_points"]):
        pt = fig2_point(_with(cfg, "tip", h_ts_nm=float(h)))
        rows.append((pt["h_ts_nm"], pt["lambda_ts_hz"], pt["cooperativity"]))
    a = Table("fig2a", ["h_ts_nm", "lambda_ts_hz", "cooperativity"], ["nm", "Hz", "1"], rows)
    t = cfg["tip"]
    rows_b = []
    for ra in np.linspace(p["r_a_min_nm"], p["r_a_max_nm"], p["n_grid"]):
        for ht in np.linspace(p["h_tip_min_nm"], p["h_tip_max_nm"], p["n_grid"]):
            geom = tip_field.TipGeometry.from_nm(ra, max(t["r_b_nm"], ra), ht, t["s_nm_nm"], t["mu0_ms_t"])
            rows_b.append((float(ra), float(ht), tip_coupling(cfg, geom=geom) / TWO_PI))
    b = Table("fig2b", ["r_a_nm", "h_tip_nm", "lambda_ts_hz"], ["nm", "nm", "Hz"], rows_b)
    return [a, b]


def fig5b_point(cfg: Cfg) -> dict:
    u = cfg["hopping"]["voltage_v"]
    return {"voltage_v": u, "g_hz": hopping(cfg, u) / TWO_PI}


def fig5b(cfg: Cfg) -> list[Table]:
    p = cfg["fig5b"]
    rows = [(float(u), hopping(cfg, float(u)) / TWO_PI) for u in np.linspace(p["u_min_v"], p["u_max_v"], p["n_points"])]
    return [Table("fig5b", ["voltage_v", "g_hz"], ["V", "Hz"], rows)]


# -- qubit -----------------------------------------------------------------


def material(cfg: Cfg) -> qubit_spectrum.SkyrmionMaterial:
    m = cfg["material"]
    return qubit_spectrum.SkyrmionMaterial(
        j1=m["j1_mev"],
        j2=m["j2_mev"],
        lattice_a=m["lattice_a_nm"],
        field_h=m["field_h_t"],
        anisotropy_k=m["anisotropy_k_mev"],
        spin_sbar=m["spin_sbar"],
        efield=m["efield_v_per_m"],
        polarization_pe=m["polarization_pe_c_per_m2"],
        lande_g=m["lande_g"],
    )


def qubit(cfg: Cfg) -> tuple[list[Table], dict]:
    q = cfg["qubit"]
    if q["source"] == "direct":
        coeffs = qubit_spectrum.QubitCoefficients(
            TWO_PI * q["kappa_ghz"] * 1e9, TWO_PI * q["hz_ghz"] * 1e9, TWO_PI * q["eps_ghz"] * 1e9
        )
    else:
        coeffs = qubit_spectrum.qubit_coefficients(material(cfg), kappa_mode=q["kappa_mode"], measure=q["measure"])
    spec = qubit_spectrum.diagonalize_qubit(coeffs, q["s_max"], center=None)
    tl = qubit_spectrum.two_level_reduction(coeffs, check_anharmonicity=False)
    rows = [(i, float(e) / TWO_PI) for i, e in enumerate(spec.energies[: q["n_levels"]])]
    record = spec.to_record(q["n_levels"])
    record.update(
        omega_q_two_level=tl.omega_q,
        theta=tl.theta,
        coefficients={"kappa": coeffs.kappa, "hz": coeffs.hz, "eps": coeffs.eps},
        units="rad/s",
    )
    return [Table("qubit_levels", ["level", "energy_hz"], ["1", "Hz"], rows)], record


# -- squeezed-frame dynamics ----------------------------------------------


def _times(t_max: float, n_t: int) -> np.ndarray:
    return np.linspace(0.0, t_max, n_t)


def fig3_point(cfg: Cfg) -> dict:
    p = cfg["fig3"]
    r = p["r"]
    return {"r": r, "lambda_eff_over_bar": math.exp(r) / 2.0, "drive_ratio": math.tanh(2.0 * r)}


def rabi_run(r: float, p: Mapping, solver: Mapping, rwa: bool, n_max: int) -> dynamics.EvolutionResult:
    frame = device.squeeze_from_r(r, p["delta_m_over_lambda"], 1.0)
    h = dynamics.build_rabi_hamiltonian(frame.delta_m_eff, frame.delta_m_eff, frame.lambda_eff, n_max, rwa=rwa)
    psi0 = basis_state(h.space, [1, 0])
    return dynamics.lindblad_evolve(
        dynamics.LindbladSpec(h), psi0, _times(p["t_max"], p["n_t"]), rtol=solver["rtol"], atol=solver["atol"]
    )


def fig3(cfg: Cfg) -> list[Table]:
    p, solver = cfg["fig3"], cfg["solver"]
    rs = np.linspace(0.0, p["r_max"], p["n_r"])
    a = Table("fig3a", ["r", "lambda_eff_over_bar"], ["1", "1"], [(float(r), math.exp(r) / 2.0) for r in rs])
    b = Table("fig3b", ["drive_ratio", "r"], ["1", "1"],
              [(float(x), 0.5 * math.atanh(x)) for x in np.linspace(0.0, p["drive_ratio_max"], p["n_r"])])
    out = [a, b]
    for name, r, rwa, n_max in (("fig3c", p["r_sc"], True, p["n_max_sc"]), ("fig3d", p["r_usc"], False, p["n_max"])):
        res = rabi_run(r, p, solver, rwa, n_max)
        rows = list(zip(res.times, res.traces["P_e1"], res.traces["n1"]))
        out.append(Table(name, ["t", "P_e", "n_phonon"], ["1/lambda_bar", "1", "1"], rows))
    return out


def two_qubit_run(r: float, p: Mapping, solver: Mapping, dephasing: bool, dissipative: bool = True):
    lam = math.exp(r) / 2.0
    dm = p["delta_m_over_lambda_eff"] * lam
    h = dynamics.build_two_qubit_hamiltonian(0.0, dm, lam, p["n_max"])
    ops = dynamics.standard_collapse_ops(h, p["gamma_m"], p["gamma_sky"], dephasing) if dissipative else []
    psi0 = basis_state(h.space, [0, 1, 0])
    return dynamics.lindblad_evolve(
        dynamics.LindbladSpec(h, ops), psi0, _times(p["t_max"], p["n_t"]), rtol=solver["rtol"], atol=solver["atol"]
    )


def fig4_point(cfg: Cfg) -> dict:
    p = cfg["fig4"]
    lam = math.exp(p["r"]) / 2.0
    return {"r": p["r"], "lambda_ss_over_bar": dynamics.sw_effective_two_qubit(lam, p["delta_m_over_lambda_eff"] * lam)[0]}


def fig4(cfg: Cfg) -> list[Table]:
    p, solver = cfg["fig4"], cfg["solver"]
    rs = np.linspace(0.0, p["r_max"], p["n_r"])
    rows = [(float(r), fig4_point(_with(cfg, "fig4", r=float(r)))["lambda_ss_over_bar"]) for r in rs]
    out = [Table("fig4b", ["r", "lambda_ss_over_bar"], ["1", "1"], rows)]
    for name, r in (("fig4c", p["r_off"]), ("fig4d", p["r_on"])):
        for suffix, deph in (("", True), ("_nodephasing", False)):
            res = two_qubit_run(r, p, solver, deph)
            rows = list(zip(res.times, res.traces["P_e1"], res.traces["P_e2"], res.traces["n1"]))
            out.append(Table(name + suffix, ["t", "P_e1", "P_e2", "n_phonon"], ["1/lambda_bar", "1", "1", "1"], rows))
    return out


# -- SSH bath --------------------------------------------------------------


def fig6(cfg: Cfg) -> list[Table]:
    p = cfg["fig6"]
    k = np.linspace(-math.pi, math.pi, p["n_k"])
    chain = topo_bath.SSHChain(p["n_cells"], 1.0, p["delta"])
    wp, wm = topo_bath.dispersion(chain, k)
    out = [Table("fig6a", ["k", "omega_plus", "omega_minus"], ["1/cell", "G", "G"], list(zip(k, wp, wm)))]
    rows = []
    for r in p["r_values"]:
        sq = topo_bath.SSHChain(p["n_cells"], topo_bath.squeezed_hopping(1.0, r), p["delta"])
        wp, wm = topo_bath.dispersion(sq, k)
        rows += [(float(r), *x) for x in zip(k, wp, wm)]
    out.append(Table("fig6b", ["r", "k", "omega_plus", "omega_minus"], ["1", "1/cell", "g", "g"], rows))
    rows = []
    for attach in ("A", "B"):
        bs = topo_bath.bound_state_closed_form(chain, p["coupling_over_g"], attach, (p["j_min"], p["j_max"]))
        rows += _profile_rows(bs, attach, 0.0)
    out.append(Table("fig6cd", ["attach", "r", "j", "weight_a", "weight_b"], ["-", "1", "cell", "1", "1"], rows))
    return out


def _profile_rows(bs: topo_bath.BoundState, attach: str, r: float) -> list[tuple]:
    w = bs.weights
    return [(attach, float(r), int(j), float(w[i, 0]), float(w[i, 1])) for i, j in enumerate(bs.cells)]


def fig7(cfg: Cfg) -> list[Table]:
    p = cfg["fig7"]
    prof, summary = [], []
    for e in (p["e_bs_over_g"], -p["e_bs_over_g"]):
        for r in p["r_values"]:
            chain = topo_bath.SSHChain(p["n_cells"], topo_bath.squeezed_hopping(1.0, r), p["delta"])
            bs = topo_bath.bound_state_quadrature(chain, p["coupling_over_g"], e, "A", (p["j_min"], p["j_max"]))
            prof += [(float(e), *row[1:]) for row in _profile_rows(bs, "A", r)]
            summary.append((float(e), float(r), chain.hop_g, bs.chirality))
    return [
        Table("fig7", ["e_bs", "r", "j", "weight_a", "weight_b"], ["g", "1", "cell", "1", "1"], prof),
        Table("fig7_chirality", ["e_bs", "r", "chain_hopping", "chirality"], ["g", "1", "g", "1"], summary),
    ]


FIG8_PLACEMENTS = {"a": ("B2", "A3", "B4"), "b": ("A2", "B3", "A4")}


def fig8_panel(case: str, delta: float) -> str:
    return {("a", True): "fig8c", ("b", True): "fig8d", ("a", False): "fig8e", ("b", False): "fig8f"}[(case, delta > 0)]


def fig8_run(p: Mapping) -> tuple[dynamics.EvolutionResult, topo_bath.EffectiveCouplingMatrix]:
    chain = topo_bath.SSHChain(p["n_cells"], 1.0, p["delta"])
    sites = [topo_bath.Site.parse(s) for s in FIG8_PLACEMENTS[p["case"]]]
    h = dynamics.build_array_hamiltonian(chain, sites, p["coupling_over_g"])
    eff = topo_bath.effective_coupling_matrix(chain, p["coupling_over_g"], sites)
    scale = np.max(np.abs(eff.entries)) or p["coupling_over_g"] ** 2
    times = _times(p["t_max_over_exchange"] / scale, p["n_t"])
    psi0 = dynamics.array_initial_state(len(sites), chain.n_sites, p["initial_excited"] - 1)
    return dynamics.single_excitation_evolve(h, psi0, times), eff


def fig8(cfg: Cfg) -> list[Table]:
    p = cfg["fig8"]
    if p["case"] not in FIG8_PLACEMENTS:
        raise ValueError(f"fig8 case must be one of {sorted(FIG8_PLACEMENTS)}")
    res, eff = fig8_run(p)
    rows = list(zip(res.times, res.traces["P_e1"], res.traces["P_e2"], res.traces["P_e3"]))
    dyn = Table(fig8_panel(p["case"], p["delta"]), ["t", "P_sky1", "P_sky2", "P_sky3"], ["1/G", "1", "1", "1"], rows)
    labels = FIG8_PLACEMENTS[p["case"]]
    pairs = [
        (labels[i], labels[j], float(eff.entries[i, j]), int(eff.separations[i, j]))
        for i in range(len(labels)) for j in range(i + 1, len(labels))
    ]
    return [dyn, Table("fig8_effective", ["site_i", "site_j", "g_ij", "x_ij"], ["-", "-", "G", "cell"], pairs)]


# -- registry --------------------------------------------------------------


def _with(cfg: Cfg, section: str, **values) -> dict:
    out = {k: dict(v) for k, v in cfg.items()}
    out[section].update(values)
    return out


SCENARIOS: dict[str, Callable] = {
    "budget": budget,
    "fig2": fig2,
    "fig3": fig3,
    "fig4": fig4,
    "fig5b": fig5b,
    "fig6": fig6,
    "fig7": fig7,
    "fig8": fig8,
    "qubit": qubit,
}

# sweepable scenario -> (row function, output table name)
POINTS: dict[str, tuple[Callable, str]] = {
    "budget": (budget_point, "budget_sweep"),
    "fig2": (fig2_point, "fig2a"),
    "fig3": (fig3_point, "fig3a"),
    "fig4": (fig4_point, "fig4b"),
    "fig5b": (fig5b_point, "fig5b"),
}
