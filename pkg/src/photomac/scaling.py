"""Scaling limits, optimal network size, SOA planning and batch sweeps."""

from __future__ import annotations

import itertools
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, fields
from typing import List, Optional, Sequence, Tuple

from .catalog import SimConfig, dbm_to_watts, watts_to_dbm
from .energy import EnergyBreakdown, InfeasibleError, energy_per_op
from .link_budget import link_budget
from .noise import (SoaChainSpec, UnreachableTarget, afe_sensitivity, bit_resolution, snr_to_bits,
                    soa_snr)

N_SEARCH_MAX = 4096
MAX_SOA_COUNT = 2

LIMIT_LASER = "laser_rated_power"
LIMIT_FSR = "fsr_channels"
LIMIT_AFE = "afe_ceiling"


@dataclass(frozen=True)
class ScalingResult:
    arch: str
    n_target: int
    data_rate: float
    n_ltd: int  # 0 when even N = 1 fails
    limiting_factor: str
    energy_at_limit: float = math.nan  # J/Op

    @property
    def feasible(self) -> bool:
        return self.n_ltd >= 1


@dataclass(frozen=True)
class SoaPlan:
    n: int
    n_target: int
    soa_count: int
    achieved_bits: float
    afe_power_dbm: float
    feasible: bool


def fsr_channel_limit(fsr: float, spacing: float) -> int:
    """Largest channel count strictly below FSR / spacing."""
    if fsr <= 0 or spacing <= 0:
        raise ValueError("FSR and channel spacing must be positive")
    q = fsr / spacing
    k = round(q)
    if math.isclose(q, k, rel_tol=1e-12, abs_tol=1e-12):
        return max(k - 1, 0)
    return math.floor(q)


def _scenario(cfg: SimConfig, arch: str, n_target: int, data_rate: Optional[float]) -> SimConfig:
    changes = {"architecture": arch, "bits": n_target}
    if data_rate is not None:
        changes["data_rate"] = data_rate
    return cfg.with_(**changes)


def _chain(cfg: SimConfig, count: int) -> SoaChainSpec:
    if count == 0:
        return SoaChainSpec.none()
    return SoaChainSpec.build(count, cfg.soa.gain_db, cfg.soa.n_sp, cfg.noise.wavelength)


def _largest_true(pred, lo: int, hi: int) -> int:
    """Largest N in [lo, hi] with pred(N) for a predicate that is true then false; lo - 1 if none."""
    if not pred(lo):
        return lo - 1
    if pred(hi):
        return hi
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if pred(mid):
            lo = mid
        else:
            hi = mid
    return lo


def scaling_limit(arch: str, n_target: int, data_rate: Optional[float], cfg: SimConfig,
                  with_energy: bool = True) -> ScalingResult:
    """Largest N whose output at rated laser power still resolves ``n_target`` bits.

    With ``cfg.soa_count`` amplifiers the resolution comes from the amplified
    SNR and the amplified power must stay under the front-end ceiling.
    """
    sc = _scenario(cfg, arch, n_target, data_rate)
    dr = sc.noise.data_rate
    count = sc.soa_count
    if count == 0:
        try:
            sens_dbm = watts_to_dbm(afe_sensitivity(n_target, sc.noise))
        except UnreachableTarget:
            return ScalingResult(arch, n_target, dr, 0, LIMIT_AFE)

        def ok(n):
            return link_budget(sc, n).output_power >= sens_dbm
    else:
        chain = _chain(sc, count)

        def ok(n):
            p = dbm_to_watts(link_budget(sc, n).output_power)
            return snr_to_bits(soa_snr(p, chain, sc.noise)) >= n_target

    n_ltd = _largest_true(ok, 1, N_SEARCH_MAX)
    factor = LIMIT_LASER
    if count and n_ltd >= 1:
        # amplified power falls with N, so if the largest resolvable N
        # saturates the front-end every smaller N does too
        amplified = link_budget(sc, n_ltd).output_power + 10.0 * math.log10(_chain(sc, count).total_gain)
        if amplified > sc.tech.max_afe_input:
            return ScalingResult(arch, n_target, dr, 0, LIMIT_AFE)
    if n_ltd < 1:
        return ScalingResult(arch, n_target, dr, 0, LIMIT_LASER)
    if arch == "mrr" and sc.mrr.fsr_limit:
        cap = fsr_channel_limit(sc.mrr.fsr, sc.mrr.channel_spacing)
        if cap < n_ltd:
            n_ltd, factor = cap, LIMIT_FSR
            if cap < 1:
                return ScalingResult(arch, n_target, dr, 0, LIMIT_FSR)
    energy = math.nan
    if with_energy:
        try:
            energy = energy_per_op(sc.with_(n=n_ltd)).total
        except InfeasibleError:
            pass
    return ScalingResult(arch, n_target, dr, n_ltd, factor, energy)


def optimum_network(arch: str, n_target: int, data_rate: Optional[float],
                    cfg: SimConfig) -> Tuple[int, EnergyBreakdown]:
    """Energy-optimal N in [1, N_ltd]; ties go to the larger N."""
    limit = scaling_limit(arch, n_target, data_rate, cfg, with_energy=False)
    if not limit.feasible:
        raise InfeasibleError(f"{arch} cannot reach {n_target} bits at any N ({limit.limiting_factor})")
    sc = _scenario(cfg, arch, n_target, data_rate)
    sens = afe_sensitivity(n_target, sc.noise)
    best_n, best = 0, None
    for n in range(1, limit.n_ltd + 1):
        e = energy_per_op(sc.with_(n=n), sens)
        if best is None or e.total <= best.total:
            best_n, best = n, e
    return best_n, best


def soa_plan(arch: str, n: int, n_target: int, cfg: SimConfig) -> SoaPlan:
    """Fewest amplifiers (0..2) that reach ``n_target`` bits at size ``n``."""
    sc = _scenario(cfg, arch, n_target, None).with_(n=n)
    p_dbm = link_budget(sc, n).output_power
    p = dbm_to_watts(p_dbm)
    ceiling = sc.tech.max_afe_input
    fallback = None
    for count in range(MAX_SOA_COUNT + 1):
        chain = _chain(sc, count)
        afe_dbm = p_dbm + 10.0 * math.log10(chain.total_gain)
        bits = snr_to_bits(soa_snr(p, chain, sc.noise))
        if afe_dbm > ceiling:
            break
        if bits >= n_target:
            return SoaPlan(n, n_target, count, bits, afe_dbm, True)
        if fallback is None or bits > fallback.achieved_bits:
            fallback = SoaPlan(n, n_target, count, bits, afe_dbm, False)
    if fallback is None:
        return SoaPlan(n, n_target, 0, snr_to_bits(soa_snr(p, _chain(sc, 0), sc.noise)), p_dbm, False)
    return fallback


def max_n_with_soas(arch: str, n_target: int, count: int, cfg: SimConfig) -> int:
    """Largest N resolving ``n_target`` bits with exactly ``count`` amplifiers (0 if none)."""
    return scaling_limit(arch, n_target, None, cfg.with_(soa_count=count), with_energy=False).n_ltd


# ---------------------------------------------------------------------------
# sweeps

@dataclass(frozen=True)
class SweepConfig:
    """Cartesian grid; ``ns = None`` evaluates every point at its own N_ltd."""

    base: SimConfig = field(default_factory=SimConfig)
    archs: Sequence[str] = ("mzm",)
    ns: Optional[Sequence[int]] = None
    bits: Sequence[int] = (1,)
    data_rates: Sequence[float] = (10e9,)
    tunings: Sequence[str] = ("TOPS_insulated",)
    responsivities: Sequence[float] = (1.2,)
    workers: int = 1

    def __post_init__(self):
        for name in ("archs", "bits", "data_rates", "tunings", "responsivities"):
            if len(getattr(self, name)) == 0:
                raise ValueError(f"sweep axis {name} is empty")
        if self.ns is not None and len(self.ns) == 0:
            raise ValueError("sweep axis ns is empty")
        if self.workers < 1:
            raise ValueError("workers must be >= 1")

    def points(self) -> List[tuple]:
        ns = [None] if self.ns is None else list(self.ns)
        return list(itertools.product(self.archs, self.tunings, self.responsivities,
                                      self.data_rates, self.bits, ns))


@dataclass(frozen=True)
class SweepRow:
    arch: str
    tuning: str
    responsivity: float
    data_rate: float
    bits: int
    n: int
    n_ltd: int
    limiting_factor: str
    output_power_dbm: float
    achieved_bits: float
    snr_db: float
    laser_electrical_w: float
    energy_laser: float
    energy_input_drivers: float
    energy_mem_interface: float
    energy_matrix_tuning: float
    energy_soa: float
    energy_output_afe: float
    energy_total: float
    error: str = ""

    @classmethod
    def columns(cls) -> List[str]:
        return [f.name for f in fields(cls)]


def _evaluate(args) -> SweepRow:
    base, (arch, tuning, resp, dr, bits, n) = args
    nan = math.nan
    try:
        cfg = base.with_(architecture=arch, tuning_kind=tuning, bits=bits,
                         responsivity=resp, data_rate=dr)
        limit = scaling_limit(arch, bits, dr, cfg, with_energy=False)
    except (ValueError, InfeasibleError) as exc:
        return SweepRow(arch, tuning, resp, dr, bits, n or 0, 0, "", *([nan] * 11), error=str(exc))
    n_eval = limit.n_ltd if n is None else n
    head = (arch, tuning, resp, dr, bits, n_eval, limit.n_ltd, limit.limiting_factor)
    if n_eval < 1:
        return SweepRow(*head, *([nan] * 11), error="infeasible: no network size meets the target")
    cfg = cfg.with_(n=n_eval)
    out = link_budget(cfg).output_power
    res = bit_resolution(dbm_to_watts(out), cfg.noise)
    try:
        e = energy_per_op(cfg)
    except (InfeasibleError, ValueError) as exc:
        return SweepRow(*head, out, res.bits, res.snr_db, *([nan] * 8), error=str(exc))
    return SweepRow(*head, out, res.bits, res.snr_db, e.laser_electrical_power, e.laser,
                    e.input_drivers, e.mem_interface, e.matrix_tuning, e.soa, e.output_afe, e.total)


def sweep(grid: SweepConfig) -> List[SweepRow]:
    """Evaluate every grid point; row order is grid order whatever the worker count."""
    jobs = [(grid.base, p) for p in grid.points()]
    if grid.workers == 1 or len(jobs) == 1:
        return [_evaluate(j) for j in jobs]
    with ProcessPoolExecutor(max_workers=grid.workers) as pool:
        return list(pool.map(_evaluate, jobs, chunksize=max(1, len(jobs) // (4 * grid.workers))))
