"""Command-line front end.

Exit status: 0 success, 1 invalid input, 2 model infeasible (the row is still written).
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
import tempfile
from dataclasses import asdict
from pathlib import Path
from typing import List, Optional, Sequence

import numpy as np

from .catalog import ConfigError, SimConfig, TUNING_KINDS, dbm_to_watts, load_config_file, watts_to_dbm
from .energy import EnergyBreakdown, InfeasibleError, cmos_ratio, energy_per_op
from .figures import emit_figure_data, figure_ids
from .link_budget import link_budget
from .mesh import ClementsProgram, clements_decompose, clements_reconstruct
from .noise import K_B, Q_E, bit_resolution
from .scaling import SweepConfig, SweepRow, optimum_network, scaling_limit, soa_plan, sweep

EXIT_OK, EXIT_INVALID, EXIT_INFEASIBLE = 0, 1, 2
PROG = "photomac"


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


# ---------------------------------------------------------------------------
# output helpers

def fmt_float(x) -> str:
    if isinstance(x, (bool, np.bool_)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        return format(float(x), ".9g")
    return str(x)


def to_csv(columns: Sequence[str], rows: Sequence[Sequence]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for row in rows:
        w.writerow([fmt_float(v) for v in row])
    return buf.getvalue()


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        return x if math.isfinite(x) else None
    if isinstance(obj, np.integer):
        return int(obj)
    return obj


def to_json(obj) -> str:
    return json.dumps(_jsonable(obj), indent=1, allow_nan=False) + "\n"


def write_atomic(path: os.PathLike, text: str) -> None:
    path = Path(path)
    fd, tmp = tempfile.mkstemp(dir=path.parent or ".", prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _emit(args, text: str, summary: List[str]) -> None:
    if args.out:
        try:
            write_atomic(args.out, text)
        except OSError as exc:
            raise UsageError(f"cannot write {args.out}: {exc.strerror}") from None
        for line in summary:
            print(line)
    else:
        sys.stdout.write(text)


def _table(args, columns, rows, payload, summary) -> None:
    text = to_json(payload) if args.format == "json" else to_csv(columns, rows)
    _emit(args, text, summary)


# ---------------------------------------------------------------------------
# config assembly

def _config(args) -> SimConfig:
    cfg = load_config_file(args.config)
    changes = {}
    if args.arch is not None:
        changes["architecture"] = args.arch
    if args.n is not None:
        changes["n"] = args.n
    if args.bits is not None:
        changes["bits"] = args.bits
    if args.dr is not None:
        changes["data_rate"] = args.dr * 1e9
    if args.tuning is not None:
        changes["tuning_kind"] = args.tuning
    if args.responsivity is not None:
        changes["responsivity"] = args.responsivity
    return cfg.with_(**changes) if changes else cfg


# ---------------------------------------------------------------------------
# subcommands

def cmd_link_budget(args) -> int:
    cfg = _config(args)
    laser = args.laser
    rep = link_budget(cfg, laser_dbm=laser)
    cols = ["stage", "label", "loss_db", "cumulative_dbm"]
    rows = [(i, st.label, st.loss_db, st.cumulative_dbm) for i, st in enumerate(rep.stages)]
    payload = {"architecture": cfg.architecture, "N": cfg.n, "laser_dbm": rep.laser_dbm,
               "stages": [asdict(st) for st in rep.stages], "output_power_dbm": rep.output_power}
    summary = [f"{cfg.architecture} N={cfg.n}: output {rep.output_power:.3f} dBm "
               f"(laser {rep.laser_dbm:.3f} dBm, loss {rep.total_loss:.3f} dB)"]
    _table(args, cols, rows, payload, summary)
    return EXIT_OK


def noise_terms(p_opt: float, cfg: SimConfig) -> dict:
    """Per-Hz current variances (A^2/Hz) entering the noise expression."""
    ctx = cfg.noise
    R = ctx.responsivity
    return {
        "shot": 2.0 * Q_E * R * p_opt,
        "dark": 2.0 * Q_E * ctx.dark_current,
        "thermal": 4.0 * K_B * ctx.temperature / ctx.load_resistance,
        "rin": (R * p_opt) ** 2 * ctx.rin,
    }


def cmd_snr(args) -> int:
    cfg = _config(args)
    if args.power is None:
        p_dbm = link_budget(cfg).output_power
    else:
        p_dbm = args.power
    res = bit_resolution(dbm_to_watts(p_dbm), cfg.noise)
    payload = {"power_dbm": p_dbm, "bits": res.bits, "snr_db": res.snr_db,
               "signal_current": res.signal_current, "noise_current": res.noise_current,
               "noise_terms_a2_per_hz": noise_terms(dbm_to_watts(p_dbm), cfg)}
    if args.format == "csv":
        cols = ["power_dbm", "bits", "snr_db", "signal_current", "noise_current"]
        text = to_csv(cols, [[payload[c] for c in cols]])
    else:
        text = to_json(payload)
    _emit(args, text, [f"{p_dbm:.3f} dBm -> {res.bits:.3f} bits (SNR {res.snr_db:.3f} dB)"])
    return EXIT_OK


ENERGY_COLUMNS = ["N", "arch", "bits", "tuning", "total_fj_per_op"] + [f"{p}_fj" for p in EnergyBreakdown.PARTS]


def cmd_energy(args) -> int:
    cfg = _config(args)
    head = [cfg.n, cfg.architecture, cfg.bits, cfg.tuning_kind]
    try:
        e = energy_per_op(cfg)
    except InfeasibleError as exc:
        nan_row = head + [math.nan] * (len(ENERGY_COLUMNS) - len(head))
        _table(args, ENERGY_COLUMNS + ["error"], [nan_row + [str(exc)]],
               {"config": dict(zip(ENERGY_COLUMNS, head)), "error": str(exc)}, [])
        print(f"{PROG}: infeasible: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    row = head + [e.total * 1e15] + [getattr(e, p) * 1e15 for p in e.PARTS]
    payload = {"config": dict(zip(ENERGY_COLUMNS, head)), "breakdown_j_per_op": e.as_dict(),
               "cmos_ratio": cmos_ratio(e.total)}
    summary = [f"{cfg.architecture} N={cfg.n} {cfg.bits}b {cfg.tuning_kind}: "
               f"{e.total * 1e15:.2f} fJ/Op ({cmos_ratio(e.total):.2f}x CMOS)"]
    _table(args, ENERGY_COLUMNS, [row], payload, summary)
    return EXIT_OK


def cmd_scaling(args) -> int:
    cfg = _config(args)
    lim = scaling_limit(cfg.architecture, cfg.bits, None, cfg)
    n_opt, e_opt = 0, math.nan
    if lim.feasible:
        try:
            n_opt, br = optimum_network(cfg.architecture, cfg.bits, None, cfg)
            e_opt = br.total
        except InfeasibleError:
            pass
    cols = ["arch", "bits", "data_rate_gsps", "n_ltd", "limiting_factor", "energy_at_limit_fj",
            "n_opt", "energy_opt_fj"]
    row = [lim.arch, lim.n_target, lim.data_rate / 1e9, lim.n_ltd, lim.limiting_factor,
           lim.energy_at_limit * 1e15, n_opt, e_opt * 1e15]
    summary = [f"{lim.arch} {lim.n_target}b: N_ltd={lim.n_ltd} ({lim.limiting_factor}), "
               f"optimum N={n_opt} at {e_opt * 1e15:.2f} fJ/Op"]
    _table(args, cols, [row], dict(zip(cols, row)), summary)
    if not lim.feasible:
        print(f"{PROG}: infeasible: no network size reaches {lim.n_target} bits", file=sys.stderr)
        return EXIT_INFEASIBLE
    return EXIT_OK


def cmd_soa(args) -> int:
    cfg = _config(args)
    plan = soa_plan(cfg.architecture, cfg.n, cfg.bits, cfg)
    cols = ["arch", "N", "bits", "soa_count", "achieved_bits", "afe_power_dbm", "feasible"]
    row = [cfg.architecture, plan.n, plan.n_target, plan.soa_count, plan.achieved_bits,
           plan.afe_power_dbm, plan.feasible]
    summary = [f"{cfg.architecture} N={plan.n} {plan.n_target}b: {plan.soa_count} SOA(s), "
               f"{plan.achieved_bits:.3f} bits, {plan.afe_power_dbm:.3f} dBm at the AFE"
               + ("" if plan.feasible else " (infeasible)")]
    _table(args, cols, [row], dict(zip(cols, row)), summary)
    if not plan.feasible:
        print(f"{PROG}: infeasible: {plan.n_target} bits unreachable at N={plan.n} with <= 2 SOAs",
              file=sys.stderr)
        return EXIT_INFEASIBLE
    return EXIT_OK


def _csv_list(text: str, conv):
    try:
        return [conv(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise UsageError(f"cannot parse list {text!r}") from None


def cmd_sweep(args) -> int:
    cfg = _config(args)
    grid = SweepConfig(
        base=cfg,
        archs=_csv_list(args.archs, str) if args.archs else [cfg.architecture],
        ns=_csv_list(args.ns, int) if args.ns else ([cfg.n] if args.n is not None else None),
        bits=_csv_list(args.bits_list, int) if args.bits_list else [cfg.bits],
        data_rates=[g * 1e9 for g in _csv_list(args.drs, float)] if args.drs else [cfg.noise.data_rate],
        tunings=_csv_list(args.tunings, str) if args.tunings else [cfg.tuning_kind],
        responsivities=(_csv_list(args.responsivities, float) if args.responsivities
                        else [cfg.noise.responsivity]),
        workers=args.workers,
    )
    rows = sweep(grid)
    cols = SweepRow.columns()
    data = [[getattr(r, c) for c in cols] for r in rows]
    if args.format == "json":
        text = to_json({"rows": [dict(zip(cols, d)) for d in data]})
    else:
        text = to_csv(cols, data)
    failed = sum(1 for r in rows if r.error)
    _emit(args, text, [f"{len(rows)} rows written to {args.out} ({failed} infeasible)"])
    if args.out:
        sidecar = {"grid": {"archs": grid.archs, "ns": grid.ns, "bits": grid.bits,
                            "data_rates": grid.data_rates, "tunings": grid.tunings,
                            "responsivities": grid.responsivities},
                   "base_config": asdict(cfg), "columns": cols}
        write_atomic(str(args.out) + ".json", to_json(sidecar))
    return EXIT_OK


def _read_json(path: str):
    try:
        return json.loads(Path(path).read_text(encoding="utf-8"))
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise UsageError(f"{path} is not valid JSON: {exc.msg} at line {exc.lineno}") from None


def matrix_from_json(doc) -> np.ndarray:
    """Accepts {"real": [[..]], "imag": [[..]]} or a plain nested list of reals."""
    if isinstance(doc, dict):
        re_ = np.asarray(doc["real"], dtype=float)
        im = np.asarray(doc.get("imag", np.zeros_like(re_)), dtype=float)
        return re_ + 1j * im
    return np.asarray(doc, dtype=float).astype(complex)


def matrix_to_json(m: np.ndarray) -> dict:
    return {"real": m.real.tolist(), "imag": m.imag.tolist()}


def cmd_mesh(args) -> int:
    if bool(args.decompose) == bool(args.reconstruct):
        raise UsageError("give exactly one of --decompose or --reconstruct")
    if args.decompose:
        try:
            U = matrix_from_json(_read_json(args.decompose))
        except (KeyError, TypeError, ValueError) as exc:
            raise UsageError(f"bad matrix document: {exc}") from None
        prog = clements_decompose(U)
        _emit(args, prog.to_json() + "\n", [f"decomposed {prog.size}x{prog.size} unitary into "
                                            f"{len(prog.nodes)} nodes"])
    else:
        try:
            text = Path(args.reconstruct).read_text(encoding="utf-8")
        except OSError as exc:
            raise UsageError(f"cannot read {args.reconstruct}: {exc.strerror}") from None
        try:
            prog = ClementsProgram.from_json(text)
        except (KeyError, TypeError, json.JSONDecodeError) as exc:
            raise UsageError(f"bad program document: {exc}") from None
        U = clements_reconstruct(prog)
        _emit(args, to_json(matrix_to_json(U)), [f"reconstructed {prog.size}x{prog.size} unitary"])
    return EXIT_OK


def cmd_figures(args) -> int:
    cfg = _config(args)
    data = emit_figure_data(args.id, cfg)
    payload = {"figure": data.figure, "columns": data.columns,
               "rows": [list(r) for r in data.rows]}
    _table(args, data.columns, data.rows, payload,
           [f"{data.figure}: {len(data.rows)} rows written to {args.out}"])
    return EXIT_OK


# ---------------------------------------------------------------------------

def _add_common(s: argparse.ArgumentParser) -> None:
    # added per subparser: shared parent actions would leak per-command defaults
    s.add_argument("--config", help="configuration file (default: $PHOTOMAC_CONFIG)")
    s.add_argument("--arch", choices=["mzm", "mrr"])
    s.add_argument("--n", type=int, help="matrix size N")
    s.add_argument("--bits", type=int, help="target resolution in bits")
    s.add_argument("--dr", type=float, help="data rate in GS/s")
    s.add_argument("--tuning", choices=TUNING_KINDS)
    s.add_argument("--responsivity", type=float, help="photodiode responsivity in A/W")
    s.add_argument("--out", help="output file (written atomically); stdout if omitted")
    s.add_argument("--format", choices=["csv", "json"], default="csv")


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog=PROG, description="Link budget, noise, energy and scaling models for "
                                       "silicon-photonic MAC accelerators.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def command(name: str, help_: str, func, **defaults) -> argparse.ArgumentParser:
        s = sub.add_parser(name, help=help_)
        _add_common(s)
        s.set_defaults(func=func, **defaults)
        return s

    s = command("link-budget", "stage-by-stage optical power", cmd_link_budget)
    s.add_argument("--laser", type=float, default=0.0, help="laser power in dBm (default 0)")

    s = command("snr", "bits and noise terms at a received power", cmd_snr, format="json")
    s.add_argument("--power", type=float,
                   help="received power in dBm (default: link output at rated laser power)")

    command("energy", "energy per operation breakdown", cmd_energy)
    command("scaling", "scaling limit and optimum size", cmd_scaling)
    command("soa", "amplifiers needed for a resolution", cmd_soa)

    s = command("sweep", "cartesian design-space sweep", cmd_sweep)
    s.add_argument("--archs", help="comma list, e.g. mzm,mrr")
    s.add_argument("--ns", help="comma list of N (default: each point's N_ltd)")
    s.add_argument("--bits-list", help="comma list of resolutions")
    s.add_argument("--drs", help="comma list of data rates in GS/s")
    s.add_argument("--tunings", help="comma list of tuning technologies")
    s.add_argument("--responsivities", help="comma list of responsivities in A/W")
    s.add_argument("--workers", type=int, default=1)

    s = command("mesh", "Clements decomposition round trips", cmd_mesh, format="json")
    s.add_argument("--decompose", metavar="MATRIX_JSON")
    s.add_argument("--reconstruct", metavar="PROGRAM_JSON")

    # figure captions use R = 1.2 A/W
    s = command("figures", "plot-ready tables", cmd_figures, responsivity=1.2)
    s.add_argument("--id", required=True, choices=list(figure_ids()))
    return p


def run(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except (UsageError, ConfigError, ValueError) as exc:
        msg = " ".join(str(exc).split())
        print(f"{PROG}: error: {msg}", file=sys.stderr)
        return EXIT_INVALID


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
