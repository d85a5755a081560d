"""Analytical models of silicon-photonic multiply-accumulate accelerators."""

from .catalog import (ConfigError, SimConfig, db_to_linear, dbm_to_watts, linear_to_db, load_config,
                      load_config_file, watts_to_dbm)
from .energy import (EnergyBreakdown, InfeasibleError, avg_tuning_power, cmos_mac_baseline,
                     energy_per_op, mrr_energy_per_op, mzm_energy_per_op, pcm_average_energy,
                     throughput_ratio)
from .link_budget import LinkBudgetReport, link_budget, mrr_link_budget, mzm_link_budget, splitter_loss
from .mesh import ClementsProgram, clements_decompose, clements_reconstruct, propagate, svd_program
from .noise import afe_sensitivity, bit_resolution, q_function, soa_snr
from .scaling import fsr_channel_limit, optimum_network, scaling_limit, soa_plan, sweep

__version__ = "0.1.0"
