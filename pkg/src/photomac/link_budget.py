"""Stage-by-stage optical power from the laser to one photodetector."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import List, Optional, Tuple

from .catalog import MrrTechParams, MzmTechParams, SimConfig


@dataclass(frozen=True)
class Stage:
    label: str
    loss_db: float
    cumulative_dbm: float


@dataclass(frozen=True)
class LinkBudgetReport:
    laser_dbm: float
    stages: Tuple[Stage, ...]
    output_power: float  # dBm

    @property
    def total_loss(self) -> float:
        return self.laser_dbm - self.output_power

    def loss_of(self, label: str) -> float:
        for st in self.stages:
            if st.label == label:
                return st.loss_db
        raise KeyError(label)


def _report(laser_dbm: float, items: List[Tuple[str, float]]) -> LinkBudgetReport:
    stages, running = [], 0.0
    for label, loss in items:
        running += loss
        stages.append(Stage(label, loss, laser_dbm - running))
    return LinkBudgetReport(laser_dbm, tuple(stages), laser_dbm - running)


def splitter_loss(n: int, el_splitter: float) -> float:
    """1-to-N tree: ideal split plus excess loss per level (levels rounded up)."""
    if n < 1:
        raise ValueError("N must be >= 1")
    return 10.0 * math.log10(n) + el_splitter * math.ceil(math.log2(n))


def mzm_link_budget(n: int, tech: MzmTechParams, laser_dbm: float = 0.0,
                    ps_loss_db: Optional[float] = None) -> LinkBudgetReport:
    """Diagonal route through an N-deep mesh, two phase shifters and two couplers per column.

    ``ps_loss_db`` is the loss of one mesh phase shifter; by default it is the
    PN modulator value ``il_ps * l_mzi``.
    """
    if n < 1:
        raise ValueError("N must be >= 1")
    ps = tech.input_mzm_loss if ps_loss_db is None else ps_loss_db
    return _report(laser_dbm, [
        ("smf", tech.il_smf),
        ("edge_coupler", tech.il_ec),
        ("splitter", splitter_loss(n, tech.el_splitter)),
        ("input_mzm", tech.input_mzm_loss),
        ("waveguide", tech.il_wg * n * tech.l_mzi),
        ("mesh_phase_shifters", 2 * n * ps),
        ("directional_couplers", 2 * n * tech.il_dc),
        ("penalty", tech.il_penalty),
    ])


def mrr_link_budget(n: int, tech: MrrTechParams, laser_dbm: float = 0.0,
                    weight_ring_il: Optional[float] = None) -> LinkBudgetReport:
    if n < 1:
        raise ValueError("N must be >= 1")
    ring = tech.il_mrr if weight_ring_il is None else weight_ring_il
    return _report(laser_dbm, [
        ("smf", tech.il_smf),
        ("edge_coupler", tech.il_ec),
        ("input_mrm", tech.il_mrm),
        ("mrm_out_of_band", (n - 1) * tech.obl_mrm),
        ("splitter", splitter_loss(n, tech.el_splitter)),
        ("weight_mrr", ring),
        ("mrr_out_of_band", (n - 1) * tech.obl_mrr),
        ("waveguide", tech.il_wg * n * tech.d_mrr * 1e-3),
        ("penalty", tech.il_penalty),
    ])


def link_budget(cfg: SimConfig, n: Optional[int] = None,
                laser_dbm: Optional[float] = None) -> LinkBudgetReport:
    """Report for a full configuration; mesh/weight elements take the loss of
    the configured tuning technology and the laser defaults to its rating."""
    n = cfg.n if n is None else n
    tech = cfg.tech
    laser = tech.laser_rated_optical_power if laser_dbm is None else laser_dbm
    il = cfg.tuning.insertion_loss
    if cfg.architecture == "mzm":
        return mzm_link_budget(n, tech, laser, ps_loss_db=il)
    return mrr_link_budget(n, tech, laser, weight_ring_il=max(tech.il_mrr, il))


def path_loss_db(cfg: SimConfig, n: Optional[int] = None) -> float:
    return link_budget(cfg, n, laser_dbm=0.0).total_loss
