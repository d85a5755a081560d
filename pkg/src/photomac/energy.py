"""Laser power, energy per operation, tuning power and the digital baseline.

All per-operation energies are power divided by the operation rate of an
N x N vector-matrix product, ``2 N^2 DR``.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from typing import Optional

from .catalog import MrrTechParams, MzmTechParams, SimConfig, TuningTechnology, db_to_linear
from .link_budget import link_budget, mrr_link_budget, mzm_link_budget
from .noise import afe_sensitivity

LASER_POWER_CEILING = 1e6  # W, anything above is treated as infeasible

# 8b digital MAC plus register-file access, halved per operation
CMOS_MAC_ENERGY = 0.046e-12
CMOS_RF_ENERGY = 0.0117e-12

PCM_E_A = 372e-12
PCM_E_C = 373e-12
PCM_E_A_TOP = 601e-12
PCM_E_C_TOP = 562e-12


class InfeasibleError(ArithmeticError):
    """A model quantity left its physically meaningful range."""


@dataclass(frozen=True)
class EnergyBreakdown:
    laser: float  # J/Op
    input_drivers: float
    mem_interface: float
    matrix_tuning: float
    soa: float
    output_afe: float
    ops_per_second: float
    laser_electrical_power: float = 0.0  # W, informational

    PARTS = ("laser", "input_drivers", "mem_interface", "matrix_tuning", "soa", "output_afe")

    def __post_init__(self):
        for name in self.PARTS:
            if getattr(self, name) < 0:
                raise ValueError(f"energy term {name} is negative")

    @property
    def total(self) -> float:
        return (self.laser + self.input_drivers + self.mem_interface + self.matrix_tuning
                + self.soa + self.output_afe)

    def as_dict(self) -> dict:
        d = asdict(self)
        d["total"] = self.total
        return d


@dataclass(frozen=True)
class TuningPowerResult:
    total_static: float  # W
    per_update_dynamic: float  # J per full matrix update
    effective_power: float  # W


def _laser_from_loss(n: int, sensitivity: float, loss_db: float, wpe: float) -> float:
    # the 1:N split is accounted for by the N outputs sharing the laser
    try:
        optical = n * sensitivity * db_to_linear(loss_db - 10.0 * math.log10(n))
    except OverflowError:
        optical = math.inf
    p = optical / wpe
    if not p <= LASER_POWER_CEILING:
        raise InfeasibleError(f"laser would need {p:.3g} W electrical at N={n}")
    return p


def mzm_laser_electrical_power(n: int, sensitivity: float, tech: MzmTechParams,
                               ps_loss_db: Optional[float] = None) -> float:
    loss = mzm_link_budget(n, tech, 0.0, ps_loss_db).total_loss
    return _laser_from_loss(n, sensitivity, loss, tech.wpe)


def mrr_laser_electrical_power(n: int, sensitivity: float, tech: MrrTechParams,
                               weight_ring_il: Optional[float] = None) -> float:
    loss = mrr_link_budget(n, tech, 0.0, weight_ring_il).total_loss
    return _laser_from_loss(n, sensitivity, loss, tech.wpe)


def laser_electrical_power(cfg: SimConfig, sensitivity: Optional[float] = None) -> float:
    if sensitivity is None:
        sensitivity = afe_sensitivity(cfg.bits, cfg.noise)
    loss = link_budget(cfg, laser_dbm=0.0).total_loss
    return _laser_from_loss(cfg.n, sensitivity, loss, cfg.tech.wpe)


def pcm_average_energy(bits: int) -> float:
    """Mean write+erase energy (J) of a PCM cell for uniformly distributed weights."""
    if bits not in (1, 2, 3, 4):
        raise ValueError(f"PCM energy is defined for 1..4 bits, got {bits}")
    levels = 2 ** bits
    base = (levels - 1) / levels ** 2 * (PCM_E_A + PCM_E_C)
    coeff = ((levels ** 2 - 1) * 2 ** (bits - 1) / 3.0 - (levels - 1)) / levels ** 2
    if coeff == 0.0:
        return base
    delta = (PCM_E_A_TOP - PCM_E_A) / (levels - 2) + (PCM_E_C_TOP - PCM_E_C) / (levels - 2)
    return base + coeff * delta


def avg_tuning_power(tech: TuningTechnology, arch: str, n: int, data_rate: float) -> TuningPowerResult:
    """Whole-matrix tuning power.

    MZM heaters: N(N-1)/4 P_pi. Ring heaters: N^2 rings at P_FSR/2.
    Other technologies: N^2 elements, static power plus one full-matrix
    update every ``weight_reuse`` evaluations.
    """
    if n < 1:
        raise ValueError("N must be >= 1")
    if tech.thermal:
        static = n * (n - 1) / 4.0 * tech.static_power if arch == "mzm" else n * n * tech.static_power / 2.0
        return TuningPowerResult(static, 0.0, static)
    static = n * n * tech.static_power
    dynamic = n * n * tech.dynamic_energy
    return TuningPowerResult(static, dynamic, static + dynamic * data_rate / tech.weight_reuse)


def _soa_gain(cfg: SimConfig) -> float:
    return cfg.soa.gain ** cfg.soa_count


def mzm_energy_per_op(cfg: SimConfig, sensitivity: Optional[float] = None) -> EnergyBreakdown:
    n, dr, bits = cfg.n, cfg.noise.data_rate, cfg.bits
    ops = 2.0 * n * n * dr
    gamma = cfg.rho_opt ** 2 * _soa_gain(cfg)
    p_laser = laser_electrical_power(cfg, sensitivity)
    p_element = cfg.tuning.element_power(dr)
    return EnergyBreakdown(
        laser=p_laser / (gamma * ops),
        input_drivers=n * dr * cfg.drivers.mzm_driver(bits) / ops,
        mem_interface=2.0 * cfg.drivers.mem_interface_power / ops,
        # one output row: 2(N-1) tuned shifters
        matrix_tuning=2.0 * (n - 1) * p_element / (2.0 * n * dr),
        soa=cfg.soa_count * cfg.soa.electrical_power / (2.0 * n * dr),
        output_afe=dr * cfg.drivers.afe(bits) / (2.0 * n * dr),
        ops_per_second=ops,
        laser_electrical_power=p_laser,
    )


def mrr_energy_per_op(cfg: SimConfig, sensitivity: Optional[float] = None) -> EnergyBreakdown:
    n, dr, bits = cfg.n, cfg.noise.data_rate, cfg.bits
    ops = 2.0 * n * n * dr
    p_laser = laser_electrical_power(cfg, sensitivity)
    p_mod = dr * cfg.drivers.mrm_driver(bits) + cfg.drivers.mrm_control_power
    return EnergyBreakdown(
        laser=p_laser / (_soa_gain(cfg) * ops),
        input_drivers=n * p_mod / ops,
        mem_interface=2.0 * cfg.drivers.mem_interface_power / ops,
        # one output row: a bank of N weight rings
        matrix_tuning=n * cfg.tuning.element_power(dr) / (2.0 * n * dr),
        soa=cfg.soa_count * cfg.soa.electrical_power / (2.0 * n * dr),
        output_afe=dr * cfg.drivers.afe(bits) / (2.0 * n * dr),
        ops_per_second=ops,
        laser_electrical_power=p_laser,
    )


def energy_per_op(cfg: SimConfig, sensitivity: Optional[float] = None) -> EnergyBreakdown:
    if cfg.architecture == "mzm":
        return mzm_energy_per_op(cfg, sensitivity)
    return mrr_energy_per_op(cfg, sensitivity)


def cmos_mac_baseline() -> float:
    return (CMOS_MAC_ENERGY + CMOS_RF_ENERGY) / 2.0


def cmos_ratio(energy: float) -> float:
    return energy / cmos_mac_baseline()


def throughput_ratio(n: int, alpha: float, f_opt: float, f_cmos: float) -> float:
    if min(n, alpha, f_opt, f_cmos) <= 0:
        raise ValueError("throughput ratio arguments must be positive")
    return 2.0 * n * alpha * f_opt / f_cmos
