"""Front-end noise: bits from received power, its inverse, and the SOA chain."""

from __future__ import annotations

import math
from dataclasses import dataclass

from scipy.constants import Boltzmann, elementary_charge, h, c
from scipy.special import ndtr

from .catalog import NoiseParams, db_to_linear

Q_E = elementary_charge
K_B = Boltzmann

SENSITIVITY_BRACKET = (1e-12, 0.1)  # W
SENSITIVITY_TOL_DB = 1e-3


class UnreachableTarget(ValueError):
    """The requested resolution cannot be met anywhere in the power bracket."""


@dataclass(frozen=True)
class ResolutionResult:
    bits: float
    snr_db: float
    signal_current: float  # A
    noise_current: float  # A

    @property
    def achievable(self) -> bool:
        return math.isfinite(self.bits)


@dataclass(frozen=True)
class SoaChainSpec:
    count: int
    gain: float  # linear, per amplifier
    rho_ase: float  # W/Hz

    def __post_init__(self):
        if self.count < 0:
            raise ValueError("SOA count must be >= 0")
        if self.gain < 1:
            raise ValueError("SOA gain must be >= 1 (linear)")
        if self.rho_ase < 0 or (self.rho_ase == 0) != (self.count == 0 or self.gain == 1):
            raise ValueError("rho_ase must be > 0 exactly when amplifiers are present")

    @property
    def total_gain(self) -> float:
        return self.gain ** self.count

    @classmethod
    def none(cls) -> "SoaChainSpec":
        return cls(0, 1.0, 0.0)

    @classmethod
    def build(cls, count: int, gain_db: float, n_sp: float, wavelength: float) -> "SoaChainSpec":
        g = db_to_linear(gain_db) if count else 1.0
        return cls(count, g, rho_ase(count, n_sp, wavelength, g))


def q_function(x: float) -> float:
    return float(ndtr(-x))


def snr_to_bits(snr_db: float) -> float:
    return (snr_db - 1.76) / 6.02


def bits_to_snr(bits: float) -> float:
    return 6.02 * bits + 1.76


def _floor_variance(ctx: NoiseParams) -> float:
    # per-Hz dark + thermal contribution
    return 2.0 * Q_E * ctx.dark_current + 4.0 * K_B * ctx.temperature / ctx.load_resistance


def noise_current(p_opt: float, ctx: NoiseParams) -> float:
    """Total noise current (A) at received power ``p_opt`` (W)."""
    R = ctx.responsivity
    floor = _floor_variance(ctx)
    first = 2.0 * Q_E * R * p_opt + floor + (R * p_opt) ** 2 * ctx.rin
    return (math.sqrt(first) + math.sqrt(floor)) * math.sqrt(ctx.data_rate / math.sqrt(2.0))


def input_referred_noise(ctx: NoiseParams) -> float:
    if ctx.input_referred_noise is not None:
        return ctx.input_referred_noise
    return noise_current(0.0, ctx)


def bit_resolution(p_opt: float, ctx: NoiseParams) -> ResolutionResult:
    if p_opt < 0:
        raise ValueError("optical power must be >= 0")
    signal = ctx.responsivity * p_opt
    noise = noise_current(p_opt, ctx)
    if signal == 0.0:
        return ResolutionResult(-math.inf, -math.inf, 0.0, noise)
    snr = 20.0 * math.log10(signal / noise)
    return ResolutionResult(snr_to_bits(snr), snr, signal, noise)


def afe_sensitivity(n_target: float, ctx: NoiseParams) -> float:
    """Smallest received power (W) giving at least ``n_target`` bits.

    Bisection in the dB domain over the fixed bracket; the upper end of the
    final 0.001 dB interval is returned so the target is always met.
    """
    if not 1 <= n_target <= 6:
        raise ValueError(f"target resolution must lie in [1, 6], got {n_target}")
    lo, hi = (10.0 * math.log10(p) for p in SENSITIVITY_BRACKET)

    def bits_at(db):
        return bit_resolution(10.0 ** (db / 10.0), ctx).bits

    if bits_at(hi) < n_target:
        raise UnreachableTarget(
            f"{n_target} bits not reachable below {SENSITIVITY_BRACKET[1] * 1e3:g} mW "
            "(RIN-limited ceiling)")
    if bits_at(lo) >= n_target:
        return SENSITIVITY_BRACKET[0]
    while hi - lo > SENSITIVITY_TOL_DB:
        mid = 0.5 * (lo + hi)
        if bits_at(mid) >= n_target:
            hi = mid
        else:
            lo = mid
    return 10.0 ** (hi / 10.0)


def binary_error_prob(p_out: float, rho_opt: float, ctx: NoiseParams) -> float:
    """Bit error probability of a binary output scaled down by ``rho_opt``."""
    if rho_opt < 1:
        raise ValueError("rho_opt must be >= 1")
    i_irn = input_referred_noise(ctx)
    return q_function((p_out / rho_opt) * ctx.responsivity / (2.0 * i_irn))


def rho_ase(count: int, n_sp: float, wavelength: float, gain: float) -> float:
    """ASE spectral density (W/Hz) of ``count`` amplifiers with linear gain."""
    if count < 0 or n_sp < 0 or wavelength <= 0 or gain < 0:
        raise ValueError("rho_ase arguments must be non-negative")
    return 2.0 * count * n_sp * (h * c / wavelength) * (gain - 1.0)


def soa_snr(p_out: float, chain: SoaChainSpec, ctx: NoiseParams) -> float:
    """SNR in dB at the front-end after an amplifier chain.

    ``p_out`` is the passive (pre-gain) power; the chain multiplies the
    signal by its total gain. The RIN term stays on the unamplified power.
    """
    if p_out < 0:
        raise ValueError("optical power must be >= 0")
    R, G, rho = ctx.responsivity, chain.total_gain, chain.rho_ase
    floor = _floor_variance(ctx)
    ase_ase = rho ** 2 * R ** 2 * (2.0 * ctx.optical_bandwidth - ctx.b_e)
    first = (2.0 * Q_E * R * G * p_out + floor + 2.0 * rho * R ** 2 * G * p_out + ase_ase
             + R ** 2 * p_out ** 2 * ctx.rin)
    second = floor + ase_ase
    signal = (R * G * p_out) ** 2
    if signal == 0.0:
        return -math.inf
    return 10.0 * math.log10(signal / ((math.sqrt(first) + math.sqrt(second)) ** 2 * ctx.b_e))
