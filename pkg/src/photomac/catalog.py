"""Device parameters, technology options and configuration loading.

Every physical constant used by the evaluators lives here. Losses are kept in
dB and only converted to linear transmission inside the evaluators.
"""

from __future__ import annotations

import math
import os
import re
from decimal import Decimal, InvalidOperation
from dataclasses import dataclass, field, fields, replace
from pathlib import Path
from typing import Optional

CONFIG_ENV_VAR = "PHOTOMAC_CONFIG"

ARCHITECTURES = ("mzm", "mrr")
TUNING_KINDS = ("TOPS_plain", "TOPS_insulated", "NOEMS", "LCOS", "PCM")


class ConfigError(ValueError):
    """Raised for malformed or invalid configuration. ``key`` names the culprit."""

    def __init__(self, key: str, message: str):
        super().__init__(f"{key}: {message}")
        self.key = key


def db_to_linear(x: float) -> float:
    return 10.0 ** (x / 10.0)


def linear_to_db(x: float) -> float:
    if not x > 0:
        raise ValueError(f"linear_to_db needs a positive ratio, got {x!r}")
    return 10.0 * math.log10(x)


def dbm_to_watts(p_dbm: float) -> float:
    return 1e-3 * db_to_linear(p_dbm)


def watts_to_dbm(p_w: float) -> float:
    if p_w <= 0:
        return -math.inf
    return linear_to_db(p_w / 1e-3)


def _require(cond: bool, key: str, message: str) -> None:
    if not cond:
        raise ConfigError(key, message)


@dataclass(frozen=True)
class NoiseParams:
    """Receiver/front-end noise context (SI units unless suffixed)."""

    responsivity: float = 1.0  # A/W
    load_resistance: float = 50.0  # ohm
    dark_current: float = 35e-9  # A
    temperature: float = 300.0  # K
    data_rate: float = 10e9  # samples/s
    optical_bandwidth: float = 25e9  # Hz
    electrical_bandwidth: Optional[float] = None  # Hz, None -> DR/sqrt(2)
    wavelength: float = 1550e-9  # m
    rin_db: float = -140.0  # dB/Hz
    input_referred_noise: Optional[float] = None  # A, None -> thermal+dark floor

    def __post_init__(self):
        for name in ("responsivity", "load_resistance", "dark_current", "temperature",
                     "data_rate", "optical_bandwidth", "wavelength"):
            _require(getattr(self, name) > 0, name, "must be strictly positive")
        if self.electrical_bandwidth is not None:
            _require(self.electrical_bandwidth > 0, "electrical_bandwidth", "must be strictly positive")
        if self.input_referred_noise is not None:
            _require(self.input_referred_noise > 0, "input_referred_noise", "must be strictly positive")
        _require(math.isfinite(self.rin_db), "rin", "must be finite")

    @property
    def rin(self) -> float:
        """Linear RIN in 1/Hz."""
        return db_to_linear(self.rin_db)

    @property
    def b_e(self) -> float:
        if self.electrical_bandwidth is not None:
            return self.electrical_bandwidth
        return self.data_rate / math.sqrt(2.0)


@dataclass(frozen=True)
class MzmTechParams:
    wpe: float = 0.1
    il_smf: float = 0.0  # dB
    il_ec: float = 1.6  # dB
    il_wg: float = 0.3  # dB/mm
    el_splitter: float = 0.01  # dB
    il_ps: float = 1.0  # dB/mm, PN phase shifter of the input modulator
    l_mzi: float = 0.5  # mm
    il_dc: float = 0.01  # dB
    il_penalty: float = 4.8  # dB
    laser_rated_optical_power: float = 10.0  # dBm
    max_afe_input: float = 10.0  # dBm

    def __post_init__(self):
        _require(0 < self.wpe <= 1, "wpe", "wall-plug efficiency must lie in (0, 1]")
        for name in ("il_smf", "il_ec", "il_wg", "el_splitter", "il_ps", "il_dc", "il_penalty"):
            _require(getattr(self, name) >= 0, name, "loss must be >= 0 dB")
        _require(self.l_mzi > 0, "l_mzi", "must be strictly positive")

    @property
    def input_mzm_loss(self) -> float:
        return self.il_ps * self.l_mzi


@dataclass(frozen=True)
class MrrTechParams:
    wpe: float = 0.1
    il_smf: float = 0.0  # dB
    il_ec: float = 1.6  # dB
    il_wg: float = 0.3  # dB/mm
    el_splitter: float = 0.01  # dB
    il_mrm: float = 4.0  # dB
    obl_mrm: float = 0.01  # dB
    il_mrr: float = 0.01  # dB
    obl_mrr: float = 0.01  # dB
    d_mrr: float = 20.0  # um
    il_penalty: float = 4.8  # dB
    laser_rated_optical_power: float = 10.0  # dBm
    max_afe_input: float = 10.0  # dBm
    fsr: float = 50.0  # nm
    channel_spacing: float = 0.8  # nm
    fsr_limit: bool = False  # cap N at the WDM channel count when set

    def __post_init__(self):
        _require(0 < self.wpe <= 1, "wpe", "wall-plug efficiency must lie in (0, 1]")
        for name in ("il_smf", "il_ec", "il_wg", "el_splitter", "il_mrm", "obl_mrm",
                     "il_mrr", "obl_mrr", "il_penalty"):
            _require(getattr(self, name) >= 0, name, "loss must be >= 0 dB")
        _require(self.d_mrr > 0, "d_mrr", "must be strictly positive")
        _require(self.channel_spacing > 0, "channel_spacing", "must be strictly positive")
        _require(self.fsr > self.channel_spacing, "fsr", "must exceed channel_spacing")


@dataclass(frozen=True)
class TuningTechnology:
    """One weight-tuning option, already resolved for an architecture.

    ``static_power`` is per pi shift for MZM meshes and per FSR for rings.
    """

    kind: str
    static_power: float  # W
    dynamic_energy: float  # J per weight update
    insertion_loss: float  # dB per element
    weight_reuse: float = 1.0

    def __post_init__(self):
        _require(self.kind in TUNING_KINDS, "tuning", f"unknown kind {self.kind!r}")
        _require(self.static_power >= 0, "static_power", "must be >= 0")
        _require(self.dynamic_energy >= 0, "dynamic_energy", "must be >= 0")
        _require(self.insertion_loss >= 0, "insertion_loss", "must be >= 0 dB")
        _require(self.weight_reuse >= 1, "alpha_w", "weight reuse factor must be >= 1")

    @property
    def thermal(self) -> bool:
        return self.kind.startswith("TOPS")

    def element_power(self, data_rate: float) -> float:
        """Mean power of one tuned element: heaters sit at P/2 on average for
        uniform weights; non-volatile elements pay E_update per reuse window."""
        if self.thermal:
            return self.static_power / 2.0
        return self.static_power + self.dynamic_energy * data_rate / self.weight_reuse


@dataclass(frozen=True)
class TuningCatalog:
    """Raw numbers for every tuning technology."""

    p_pi_plain: float = 20e-3  # W per pi, MZM heater
    p_pi_insulated: float = 1.4e-3  # W per pi, 2.8 mW per FSR halved
    p_fsr_plain: float = 40e-3  # W per FSR, ring heater
    p_fsr_insulated: float = 2.8e-3
    tops_il: float = 0.01  # dB
    noems_il: float = 0.01
    noems_energy: float = 1e-15  # J
    lcos_il: float = 0.35
    lcos_static: float = 2e-9  # W
    pcm_il: float = 0.32
    alpha_w: float = 4096.0

    def __post_init__(self):
        for f in fields(self):
            _require(getattr(self, f.name) >= 0, f.name, "must be >= 0")
        _require(self.alpha_w >= 1, "alpha_w", "weight reuse factor must be >= 1")

    def resolve(self, kind: str, arch: str, bits: int = 1) -> TuningTechnology:
        _require(arch in ARCHITECTURES, "architecture", f"unknown architecture {arch!r}")
        if kind == "TOPS_plain":
            p = self.p_pi_plain if arch == "mzm" else self.p_fsr_plain
            return TuningTechnology(kind, p, 0.0, self.tops_il)
        if kind == "TOPS_insulated":
            p = self.p_pi_insulated if arch == "mzm" else self.p_fsr_insulated
            return TuningTechnology(kind, p, 0.0, self.tops_il)
        if kind == "NOEMS":
            return TuningTechnology(kind, 0.0, self.noems_energy, self.noems_il, self.alpha_w)
        if kind == "LCOS":
            return TuningTechnology(kind, self.lcos_static, 0.0, self.lcos_il, self.alpha_w)
        if kind == "PCM":
            # local import: energy depends on catalog, not the other way round
            from .energy import pcm_average_energy

            return TuningTechnology(kind, 0.0, pcm_average_energy(min(max(bits, 1), 4)),
                                    self.pcm_il, self.alpha_w)
        raise ConfigError("tuning", f"unknown kind {kind!r}")


def _extrapolated(table: dict, n: int, step: float) -> float:
    if n in table:
        return table[n]
    top = max(table)
    return table[top] + step * (n - top)


@dataclass(frozen=True)
class DriverAfeCatalog:
    """Per-symbol energies of the electrical periphery, indexed by bits."""

    mzm_driver_energy: dict = field(default_factory=lambda: {1: 2e-12, 2: 4e-12, 3: 6e-12, 4: 8e-12})
    mrm_driver_energy: dict = field(default_factory=lambda: {1: 0.3e-12, 2: 0.6e-12, 3: 0.9e-12, 4: 1.2e-12})
    binary_afe_energy: float = 0.4e-12
    linear_tia_energy: float = 0.6e-12
    adc_energy: dict = field(default_factory=lambda: {2: 1.7e-12, 3: 3.1e-12, 4: 5.7e-12})
    adc_fom: float = 0.335e-12  # J per conversion, used beyond the quoted table
    mem_interface_power: float = 5.77e-3  # W
    mrm_control_power: float = 0.2e-3  # W per ring

    def __post_init__(self):
        for name in ("mzm_driver_energy", "mrm_driver_energy", "adc_energy"):
            table = getattr(self, name)
            vals = [table[k] for k in sorted(table)]
            _require(all(v >= 0 for v in vals), name, "energies must be >= 0")
            _require(all(a <= b for a, b in zip(vals, vals[1:])), name,
                     "must be non-decreasing in resolution")

    def mzm_driver(self, bits: int) -> float:
        return _extrapolated(self.mzm_driver_energy, bits, self.mzm_driver_energy[1])

    def mrm_driver(self, bits: int) -> float:
        return _extrapolated(self.mrm_driver_energy, bits, self.mrm_driver_energy[1])

    def afe(self, bits: int) -> float:
        if bits <= 1:
            return self.binary_afe_energy
        adc = self.adc_energy.get(bits, 2 ** bits * self.adc_fom)
        return self.linear_tia_energy + adc


@dataclass(frozen=True)
class SoaParams:
    gain_db: float = 17.0
    n_sp: float = 2.0
    electrical_power: float = 42e-3  # W per amplifier

    def __post_init__(self):
        _require(self.gain_db > 0, "soa_gain", "gain must be > 0 dB")
        _require(self.n_sp >= 1, "n_sp", "spontaneous emission factor must be >= 1")
        _require(self.electrical_power >= 0, "soa_power", "must be >= 0")

    @property
    def gain(self) -> float:
        return db_to_linear(self.gain_db)


@dataclass(frozen=True)
class SimConfig:
    architecture: str = "mzm"
    n: int = 8
    bits: int = 1
    noise: NoiseParams = field(default_factory=NoiseParams)
    mzm: MzmTechParams = field(default_factory=MzmTechParams)
    mrr: MrrTechParams = field(default_factory=MrrTechParams)
    tuning_kind: str = "TOPS_insulated"
    tunings: TuningCatalog = field(default_factory=TuningCatalog)
    drivers: DriverAfeCatalog = field(default_factory=DriverAfeCatalog)
    soa: SoaParams = field(default_factory=SoaParams)
    soa_count: int = 0
    rho_opt: float = 1.0

    def __post_init__(self):
        _require(self.architecture in ARCHITECTURES, "architecture",
                 f"must be one of {ARCHITECTURES}")
        _require(self.n >= 1, "n", "matrix size must be >= 1")
        _require(1 <= self.bits <= 6, "bits", "resolution must lie in [1, 6]")
        _require(self.tuning_kind in TUNING_KINDS, "tuning", f"must be one of {TUNING_KINDS}")
        _require(self.soa_count >= 0, "soa_count", "must be >= 0")
        _require(self.rho_opt >= 1, "rho_opt", "must be >= 1")
        _require(self.rho_opt <= self.n, "rho_opt", "cannot exceed the matrix size N")

    @property
    def tech(self):
        return self.mzm if self.architecture == "mzm" else self.mrr

    @property
    def tuning(self) -> TuningTechnology:
        return self.tunings.resolve(self.tuning_kind, self.architecture, self.bits)

    def with_(self, **changes) -> "SimConfig":
        """``dataclasses.replace`` that also reaches into nested records.

        Keys such as ``responsivity`` or ``data_rate`` are routed to
        ``noise``; everything else must be a top-level field.
        """
        top = {f.name for f in fields(self)}
        noise_keys = {f.name for f in fields(NoiseParams)}
        direct = {k: v for k, v in changes.items() if k in top}
        nested = {k: v for k, v in changes.items() if k not in top}
        unknown = set(nested) - noise_keys
        if unknown:
            raise ConfigError(sorted(unknown)[0], "unknown configuration field")
        if nested:
            direct["noise"] = replace(direct.get("noise", self.noise), **nested)
        if "n" in direct and "rho_opt" not in direct:
            direct["rho_opt"] = min(self.rho_opt, direct["n"])
        return replace(self, **direct)


# ---------------------------------------------------------------------------
# configuration text

_UNITS = {
    "dB": {"dB": 1.0},
    "dBm": {"dBm": 1.0},
    "dB/mm": {"dB/mm": 1.0, "dB/cm": 0.1, "dB/m": 1e-3},
    "dB/Hz": {"dB/Hz": 1.0},
    "W": {"W": 1.0, "mW": 1e-3, "uW": 1e-6, "µW": 1e-6, "nW": 1e-9},
    "J": {"J": 1.0, "nJ": 1e-9, "pJ": 1e-12, "fJ": 1e-15},
    "Hz": {"Hz": 1.0, "kHz": 1e3, "MHz": 1e6, "GHz": 1e9, "S/s": 1.0, "MS/s": 1e6, "GS/s": 1e9},
    "m": {"m": 1.0, "mm": 1e-3, "um": 1e-6, "µm": 1e-6, "nm": 1e-9},
    "mm": {"mm": 1.0, "um": 1e-3, "µm": 1e-3, "cm": 10.0},
    "um": {"um": 1.0, "µm": 1.0, "mm": 1e3, "nm": 1e-3},
    "nm": {"nm": 1.0, "um": 1e3, "µm": 1e3},
    "A": {"A": 1.0, "mA": 1e-3, "uA": 1e-6, "µA": 1e-6, "nA": 1e-9, "pA": 1e-12},
    "A/W": {"A/W": 1.0, "mA/mW": 1.0},
    "ohm": {"ohm": 1.0, "Ω": 1.0, "kohm": 1e3, "kΩ": 1e3},
    "K": {"K": 1.0},
    "ratio": {"": 1.0, "%": 1e-2},
    "int": {"": 1.0},
    "str": {"": 1.0},
    "bool": {"": 1.0},
}

# key -> (record, field, dimension). record None = SimConfig itself.
_KEYS = {
    "architecture": (None, "architecture", "str"),
    "n": (None, "n", "int"),
    "bits": (None, "bits", "int"),
    "tuning": (None, "tuning_kind", "str"),
    "soa_count": (None, "soa_count", "int"),
    "rho_opt": (None, "rho_opt", "ratio"),
    "responsivity": ("noise", "responsivity", "A/W"),
    "load_resistance": ("noise", "load_resistance", "ohm"),
    "dark_current": ("noise", "dark_current", "A"),
    "temperature": ("noise", "temperature", "K"),
    "data_rate": ("noise", "data_rate", "Hz"),
    "optical_bandwidth": ("noise", "optical_bandwidth", "Hz"),
    "electrical_bandwidth": ("noise", "electrical_bandwidth", "Hz"),
    "wavelength": ("noise", "wavelength", "m"),
    "rin": ("noise", "rin_db", "dB/Hz"),
    "input_referred_noise": ("noise", "input_referred_noise", "A"),
    "p_pi_plain": ("tunings", "p_pi_plain", "W"),
    "p_pi_insulated": ("tunings", "p_pi_insulated", "W"),
    "p_fsr_plain": ("tunings", "p_fsr_plain", "W"),
    "p_fsr_insulated": ("tunings", "p_fsr_insulated", "W"),
    "tops_il": ("tunings", "tops_il", "dB"),
    "noems_il": ("tunings", "noems_il", "dB"),
    "noems_energy": ("tunings", "noems_energy", "J"),
    "lcos_il": ("tunings", "lcos_il", "dB"),
    "lcos_static": ("tunings", "lcos_static", "W"),
    "pcm_il": ("tunings", "pcm_il", "dB"),
    "alpha_w": ("tunings", "alpha_w", "ratio"),
    "binary_afe_energy": ("drivers", "binary_afe_energy", "J"),
    "linear_tia_energy": ("drivers", "linear_tia_energy", "J"),
    "adc_fom": ("drivers", "adc_fom", "J"),
    "mem_interface_power": ("drivers", "mem_interface_power", "W"),
    "mrm_control_power": ("drivers", "mrm_control_power", "W"),
    "soa_gain": ("soa", "gain_db", "dB"),
    "n_sp": ("soa", "n_sp", "ratio"),
    "soa_power": ("soa", "electrical_power", "W"),
}

_TECH_DIMS = {
    "wpe": "ratio", "il_smf": "dB", "il_ec": "dB", "il_wg": "dB/mm", "el_splitter": "dB",
    "il_ps": "dB/mm", "l_mzi": "mm", "il_dc": "dB", "il_penalty": "dB",
    "laser_rated_optical_power": "dBm", "max_afe_input": "dBm",
    "il_mrm": "dB", "obl_mrm": "dB", "il_mrr": "dB", "obl_mrr": "dB", "d_mrr": "um",
    "fsr": "nm", "channel_spacing": "nm", "fsr_limit": "bool",
}
_MZM_FIELDS = {f.name for f in fields(MzmTechParams)}
_MRR_FIELDS = {f.name for f in fields(MrrTechParams)}

# per-resolution tables: "mzm_driver_energy.2 = 4 pJ"
_TABLE_KEYS = {"mzm_driver_energy", "mrm_driver_energy", "adc_energy"}

_LINE = re.compile(r"^(?P<key>[A-Za-z_][\w.]*)\s*=\s*(?P<value>\S+)\s*(?P<unit>\S*)\s*$")


def _convert(key: str, raw: str, unit: str, dim: str):
    if dim == "str":
        if unit:
            raise ConfigError(key, f"unexpected unit {unit!r}")
        return raw
    if dim == "bool":
        low = raw.lower()
        if low in ("on", "true", "yes", "1"):
            return True
        if low in ("off", "false", "no", "0"):
            return False
        raise ConfigError(key, f"expected on/off, got {raw!r}")
    scales = _UNITS[dim]
    if unit not in scales:
        expected = ", ".join(repr(u) for u in scales) or "no unit"
        raise ConfigError(key, f"unit {unit!r} not accepted (expected {expected})")
    if dim == "int":
        try:
            return int(raw)
        except ValueError:
            raise ConfigError(key, f"expected an integer, got {raw!r}") from None
    try:
        value = Decimal(raw)
    except InvalidOperation:
        raise ConfigError(key, f"expected a number, got {raw!r}") from None
    if not value.is_finite():
        raise ConfigError(key, "value must be finite")
    # decimal product keeps e.g. "1550 nm" == 1550e-9 exactly
    return float(value * Decimal(repr(scales[unit])))


def parse_config(text: str) -> dict:
    """Parse ``key = value unit`` lines into a flat ``{key: converted}`` dict."""
    out = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        m = _LINE.match(line)
        if m is None:
            key = line.split("=", 1)[0].strip() or f"line {lineno}"
            raise ConfigError(key, f"cannot parse line {lineno}: {line!r}")
        key, raw, unit = m["key"], m["value"], m["unit"]
        base = key.split(".", 1)
        if base[0] in _TABLE_KEYS and len(base) == 2:
            try:
                idx = int(base[1])
            except ValueError:
                raise ConfigError(key, "table index must be an integer resolution") from None
            out[(base[0], idx)] = _convert(key, raw, unit, "J")
            continue
        if key in _KEYS:
            out[key] = _convert(key, raw, unit, _KEYS[key][2])
            continue
        prefix, _, name = key.rpartition(".")
        if prefix in ("", "mzm", "mrr") and name in _TECH_DIMS:
            owners = {"mzm": _MZM_FIELDS, "mrr": _MRR_FIELDS}
            if prefix and name not in owners[prefix]:
                raise ConfigError(key, f"{prefix} technology has no parameter {name!r}")
            out[key] = _convert(key, raw, unit, _TECH_DIMS[name])
            continue
        raise ConfigError(key, "unknown configuration key")
    return out


def load_config(text: str = "") -> SimConfig:
    """Build a :class:`SimConfig` from configuration text; unset keys keep defaults."""
    values = parse_config(text)
    top, records = {}, {"noise": {}, "tunings": {}, "drivers": {}, "soa": {}, "mzm": {}, "mrr": {}}
    tables = {}
    for key, value in values.items():
        if isinstance(key, tuple):
            tables.setdefault(key[0], {})[key[1]] = value
            continue
        if key in _KEYS:
            record, name, _ = _KEYS[key]
            (top if record is None else records[record])[name] = value
            continue
        prefix, _, name = key.rpartition(".")
        if prefix:
            records[prefix][name] = value
        else:
            # shared names apply to every technology that has them; explicit
            # prefixed keys win regardless of order
            for arch, owned in (("mzm", _MZM_FIELDS), ("mrr", _MRR_FIELDS)):
                if name in owned and f"{arch}.{name}" not in values:
                    records[arch][name] = value

    defaults = SimConfig()
    drivers = dict(records["drivers"])
    for name, entries in tables.items():
        drivers[name] = {**getattr(defaults.drivers, name), **entries}
    try:
        built = {
            "noise": replace(defaults.noise, **records["noise"]),
            "mzm": replace(defaults.mzm, **records["mzm"]),
            "mrr": replace(defaults.mrr, **records["mrr"]),
            "tunings": replace(defaults.tunings, **records["tunings"]),
            "drivers": replace(defaults.drivers, **drivers),
            "soa": replace(defaults.soa, **records["soa"]),
        }
        if "architecture" in top:
            top["architecture"] = top["architecture"].lower()
        return replace(defaults, **built, **top)
    except ConfigError as err:
        # report the user's spelling of the key where it differs from the field
        for user_key, (record, name, _) in _KEYS.items():
            if name == err.key and user_key in values:
                raise ConfigError(user_key, str(err).split(": ", 1)[1]) from None
        raise


def load_config_file(path: Optional[os.PathLike] = None) -> SimConfig:
    """Load a config file; falls back to ``$PHOTOMAC_CONFIG`` then to defaults."""
    if path is None:
        path = os.environ.get(CONFIG_ENV_VAR)
        if not path:
            return SimConfig()
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError("config", f"cannot read {path}: {exc.strerror}") from None
    return load_config(text)
