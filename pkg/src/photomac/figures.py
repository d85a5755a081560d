"""Plot-ready tables for the published curves. No math lives here beyond
calling the model modules and converting units for display."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Dict, List, Sequence

from .catalog import SimConfig, dbm_to_watts, watts_to_dbm
from .energy import InfeasibleError, cmos_ratio, energy_per_op
from .link_budget import link_budget
from .noise import UnreachableTarget, afe_sensitivity, binary_error_prob
from .scaling import scaling_limit, soa_plan

SIZES = (8, 16, 32, 64, 128)
BITS = (1, 2, 3, 4)
DATA_RATES = tuple(g * 1e9 for g in range(1, 11))
THERMAL = ("TOPS_plain", "TOPS_insulated")
ALL_TUNINGS = ("TOPS_plain", "TOPS_insulated", "NOEMS", "LCOS", "PCM")


@dataclass(frozen=True)
class FigureData:
    figure: str
    columns: List[str]
    rows: List[tuple]


def _energy_pj(cfg: SimConfig) -> float:
    try:
        return energy_per_op(cfg).total * 1e12
    except InfeasibleError:
        return math.nan


def _link_trace(cfg: SimConfig, arch: str) -> FigureData:
    rows = []
    c = cfg.with_(architecture=arch)
    for n in SIZES:
        rep = link_budget(c, n, laser_dbm=0.0)
        for i, st in enumerate(rep.stages):
            rows.append((n, i, st.label, st.loss_db, st.cumulative_dbm))
    return FigureData("", ["N", "stage", "label", "loss_db", "power_dbm"], rows)


def _sensitivity_levels(cfg: SimConfig, arch: str) -> FigureData:
    c = cfg.with_(architecture=arch)
    rows = []
    for n in SIZES:
        rows.append(("output", n, "", link_budget(c, n).output_power))
    for bits in range(1, 7):
        try:
            level = watts_to_dbm(afe_sensitivity(bits, c.noise))
        except UnreachableTarget:
            level = math.nan
        rows.append(("sensitivity", "", bits, level))
    return FigureData("", ["series", "N", "bits", "power_dbm"], rows)


def _energy_vs_n(cfg: SimConfig, arch: str) -> FigureData:
    rows = []
    for tuning in THERMAL:
        c = cfg.with_(architecture=arch, tuning_kind=tuning, bits=1)
        n_ltd = scaling_limit(arch, 1, None, c, with_energy=False).n_ltd
        for n in range(2, max(n_ltd, 2) + 1):
            rows.append((tuning, n, _energy_pj(c.with_(n=n))))
    return FigureData("", ["tuning", "N", "energy_pj_per_op"], rows)


def _energy_vs_bits(cfg: SimConfig, arch: str) -> FigureData:
    rows = []
    for tuning in THERMAL:
        c = cfg.with_(architecture=arch, tuning_kind=tuning)
        for bits in BITS:
            lim = scaling_limit(arch, bits, None, c)
            rows.append((tuning, bits, lim.n_ltd, lim.energy_at_limit * 1e12,
                         cmos_ratio(lim.energy_at_limit)))
    return FigureData("", ["tuning", "bits", "n_ltd", "energy_pj_per_op", "cmos_ratio"], rows)


def _data_rate_sweep(cfg: SimConfig, arch: str) -> FigureData:
    rows = []
    c = cfg.with_(architecture=arch)
    for bits in BITS:
        for dr in DATA_RATES:
            lim = scaling_limit(arch, bits, dr, c)
            rows.append((bits, dr / 1e9, lim.n_ltd, lim.energy_at_limit * 1e12))
    return FigureData("", ["bits", "data_rate_gsps", "n_ltd", "energy_pj_per_op"], rows)


def fig6(cfg: SimConfig) -> FigureData:
    """MZM energy and N_ltd per resolution, plus the precision-for-power trade:
    scaling the laser down by rho_opt costs log2(rho_opt) bits."""
    base = _energy_vs_bits(cfg, "mzm")
    rows = [r + (1.0, 0.0, math.nan) for r in base.rows]
    c = cfg.with_(architecture="mzm", tuning_kind="TOPS_insulated", bits=1)
    n_ltd = scaling_limit("mzm", 1, None, c, with_energy=False).n_ltd
    c = c.with_(n=n_ltd)
    p_out = dbm_to_watts(link_budget(c).output_power)
    rho = 1.0
    while rho <= n_ltd:
        cr = c.with_(rho_opt=rho)
        e = energy_per_op(cr)
        rows.append(("TOPS_insulated", 1, n_ltd, e.total * 1e12, cmos_ratio(e.total), rho,
                     math.log2(rho), binary_error_prob(p_out, rho, c.noise)))
        rho *= 2.0
    return FigureData("fig6", base.columns + ["rho_opt", "bits_lost", "binary_error_prob"], rows)


def _soa_grid(cfg: SimConfig, arch: str) -> FigureData:
    rows = []
    c = cfg.with_(architecture=arch)
    sizes = sorted(set(list(range(4, 129, 4)) + [55, 94]))
    for bits in range(1, 7):
        for n in sizes:
            plan = soa_plan(arch, n, bits, c)
            rows.append((n, bits, plan.soa_count if plan.feasible else "", plan.achieved_bits,
                         plan.afe_power_dbm, int(plan.feasible)))
    return FigureData("", ["N", "bits", "soa_count", "achieved_bits", "afe_power_dbm", "feasible"], rows)


def fig14(cfg: SimConfig) -> FigureData:
    """Energy breakdown per tuning technology and resolution, each at its own N_ltd."""
    rows = []
    for arch in ("mzm", "mrr"):
        for tuning in ALL_TUNINGS:
            for bits in BITS:
                c = cfg.with_(architecture=arch, tuning_kind=tuning, bits=bits)
                lim = scaling_limit(arch, bits, None, c, with_energy=False)
                if not lim.feasible:
                    rows.append((arch, tuning, bits, 0) + (math.nan,) * 7)
                    continue
                e = energy_per_op(c.with_(n=lim.n_ltd))
                rows.append((arch, tuning, bits, lim.n_ltd,
                             *(getattr(e, p) * 1e15 for p in e.PARTS), e.total * 1e15))
    cols = ["arch", "tuning", "bits", "n_ltd"] + [f"{p}_fj" for p in
                                                  ("laser", "input_drivers", "mem_interface",
                                                   "matrix_tuning", "soa", "output_afe")] + ["total_fj"]
    return FigureData("fig14", cols, rows)


def _named(fn: Callable[[SimConfig, str], FigureData], arch: str, name: str):
    def make(cfg: SimConfig) -> FigureData:
        d = fn(cfg, arch)
        return FigureData(name, d.columns, d.rows)

    return make


FIGURES: Dict[str, Callable[[SimConfig], FigureData]] = {
    "fig2": _named(_link_trace, "mzm", "fig2"),
    "fig3": _named(_sensitivity_levels, "mzm", "fig3"),
    "fig5": _named(_energy_vs_n, "mzm", "fig5"),
    "fig6": fig6,
    "fig7": _named(_data_rate_sweep, "mzm", "fig7"),
    "fig9": _named(_link_trace, "mrr", "fig9"),
    "fig10": _named(_sensitivity_levels, "mrr", "fig10"),
    "fig11": _named(_energy_vs_n, "mrr", "fig11"),
    "fig12": _named(_energy_vs_bits, "mrr", "fig12"),
    "fig13": _named(_data_rate_sweep, "mrr", "fig13"),
    "fig14": fig14,
    "fig16": _named(_soa_grid, "mzm", "fig16"),
    "fig17": _named(_soa_grid, "mrr", "fig17"),
}


def emit_figure_data(fig_id: str, cfg: SimConfig) -> FigureData:
    try:
        make = FIGURES[fig_id]
    except KeyError:
        raise ValueError(f"unknown figure id {fig_id!r} (known: {', '.join(FIGURES)})") from None
    return make(cfg)


def figure_ids() -> Sequence[str]:
    return tuple(FIGURES)
