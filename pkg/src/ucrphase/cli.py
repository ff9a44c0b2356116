"""Command-line front end.

    ucrphase <subcommand> --config FILE [--out FILE] [--format csv|json] [--workers N]

Subcommands: clock, butterfly, differential, budget, scan, table-check,
signal-trace. Exit codes: 0 success, 1 configuration error, 2 quadrature
failure, 3 I/O error. ``UCRPHASE_CONFIG`` is read when ``--config`` is absent.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import List

import numpy as np

from . import __version__
from .config import ConfigError, RunConfig, load_config, with_override
from .model import make_butterfly, make_ramsey
from .phases import (PhaseBreakdown, TableRow, butterfly_phase_closed_form, clock_phase,
                     phase_quadrature, signal, table_row)
from .quadrature import QuadratureError
from .ucr import (SpeciesPair, constraint_budget, differential_butterfly, differential_fountain,
                  shot_noise_sensitivity)

EXIT_OK, EXIT_CONFIG, EXIT_NUMERIC, EXIT_IO = 0, 1, 2, 3
COMMANDS = ("clock", "butterfly", "differential", "budget", "scan", "table-check", "signal-trace")
BREAKDOWN_COLUMNS = list(PhaseBreakdown().as_dict())

# relative residual allowed by table-check; light-propagation terms are linearised
TABLE_TOL = 1e-9
TABLE_TOL_FSL = 1e-6


@dataclass
class Report:
    command: str
    columns: List[str]
    rows: List[dict]
    notes: List[str] = field(default_factory=list)


def _need_pair(cfg: RunConfig, command: str) -> SpeciesPair:
    if len(cfg.species) != 2:
        raise ConfigError(f"'{command}' needs two species (species.1 and species.2)", "species.2.preset")
    return SpeciesPair(cfg.species[0], cfg.species[1], cfg.initial[0], cfg.initial[1], cfg.constants)


def run_clock(cfg: RunConfig) -> Report:
    rows = []
    for sp, ic in zip(cfg.species, cfg.initial):
        seq = make_ramsey(sp, cfg.T, cfg.constants)
        q = phase_quadrature(seq, sp, ic, cfg.perturbation, include_wavepacket=True)
        rows.append({"species": sp.name, "T": cfg.T, **q.as_dict(),
                     "closed_form": clock_phase(sp, ic, cfg.T, cfg.constants)})
    return Report("clock", ["species", "T"] + BREAKDOWN_COLUMNS + ["closed_form"], rows,
                  ["closed_form neglects the perturbation section"])


def run_butterfly(cfg: RunConfig) -> Report:
    rows = []
    for sp, ic in zip(cfg.species, cfg.initial):
        cf = butterfly_phase_closed_form(sp, ic, cfg.T, cfg.perturbation, const=cfg.constants)
        q = phase_quadrature(make_butterfly(sp, cfg.T, cfg.constants), sp, ic, cfg.perturbation,
                             include_wavepacket=True)
        rows.append({"species": sp.name, "method": "closed_form", "T": cfg.T, **cf.as_dict()})
        rows.append({"species": sp.name, "method": "quadrature", "T": cfg.T, **q.as_dict()})
    return Report("butterfly", ["species", "method", "T"] + BREAKDOWN_COLUMNS, rows)


def run_differential(cfg: RunConfig) -> Report:
    pair = _need_pair(cfg, "differential")
    row = {"T": cfg.T, "delta_alpha": pair.delta_alpha,
           "fountain": differential_fountain(pair, cfg.T),
           "butterfly": differential_butterfly(pair, cfg.T)}
    return Report("differential", list(row), [row],
                  ["observables are phi1/(Omega1 T) - phi2/(Omega2 T)"])


def run_budget(cfg: RunConfig) -> Report:
    pair = _need_pair(cfg, "budget")
    if cfg.budget_epsilon is None:
        raise ConfigError("missing required key for 'budget'", "budget.epsilon")
    rep = constraint_budget(pair, cfg.budget_epsilon, cfg.T, cfg.gamma_zz, cfg.delta_a,
                            cfg.sensitivity, cfg.noise_convention)
    rows = []
    if cfg.sensitivity is not None:
        sens = shot_noise_sensitivity(pair, cfg.sensitivity, cfg.noise_convention)
        rows.append({"kind": "sensitivity", "name": "sigma_delta_alpha",
                     "value": sens.sigma_delta_alpha, "units": "1",
                     "formula_tag": f"shot noise, {sens.convention}"})
        rows.append({"kind": "sensitivity", "name": "campaign_duration", "value": sens.duration_days,
                     "units": "day", "formula_tag": "n_reps * cycle_time"})
    for c in rep.constraints:
        rows.append({"kind": "constraint", "name": c.name, "value": c.limit, "units": c.units,
                     "formula_tag": c.formula_tag, "reference_value": c.reference_value})
    for e in rep.epsilon_contributions:
        rows.append({"kind": "epsilon", "name": e.effect, "value": e.epsilon, "units": "1"})
    return Report("budget", ["kind", "name", "value", "units", "formula_tag", "reference_value"],
                  rows, [f"epsilon target {rep.epsilon_target:.3e}"] + rep.notes)


def scan_point(cfg: RunConfig) -> dict:
    """Observables at one scan point; pair quantities only if two species are set."""
    sp, ic = cfg.species[0], cfg.initial[0]
    seq = make_butterfly(sp, cfg.T, cfg.constants)
    row = {
        "T": cfg.T,
        "clock_phase_1": clock_phase(sp, ic, cfg.T, cfg.constants),
        "butterfly_phase_1": butterfly_phase_closed_form(sp, ic, cfg.T, cfg.perturbation,
                                                         const=cfg.constants).total,
        "butterfly_quadrature_1": phase_quadrature(seq, sp, ic, cfg.perturbation).total,
    }
    if len(cfg.species) == 2:
        pair = SpeciesPair(cfg.species[0], cfg.species[1], cfg.initial[0], cfg.initial[1],
                           cfg.constants)
        row["differential_fountain"] = differential_fountain(pair, cfg.T)
        try:
            row["differential_butterfly"] = differential_butterfly(pair, cfg.T)
        except ValueError:
            row["differential_butterfly"] = None
        if cfg.sensitivity is not None:
            row["sigma_delta_alpha"] = shot_noise_sensitivity(
                pair, cfg.sensitivity, cfg.noise_convention).sigma_delta_alpha
    return row


def _scan_worker(args):
    cfg, key, value = args
    return {key: value, **scan_point(with_override(cfg, key, value))}


def run_scan(cfg: RunConfig, workers: int = 1) -> Report:
    if cfg.scan is None:
        raise ConfigError("missing scan section for 'scan'", "scan.parameter")
    key = cfg.scan.parameter
    jobs = [(cfg, key, float(v)) for v in cfg.scan.values]
    # validate every point up front so config errors surface before any work
    for _, _, v in jobs:
        with_override(cfg, key, v)
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(_scan_worker, jobs))  # map keeps scan order
    else:
        rows = [_scan_worker(j) for j in jobs]
    columns = [key] + [c for c in rows[0] if c != key and not (c == "T" and key == "sequence.T")]
    return Report("scan", columns, rows)


def run_table_check(cfg: RunConfig) -> Report:
    rows = []
    pert = cfg.perturbation
    for sp, ic in zip(cfg.species, cfg.initial):
        seq = make_butterfly(sp, cfg.T, cfg.constants)
        q, scale = phase_quadrature(seq, sp, ic, pert, include_wavepacket=True, return_scale=True)
        qd = q.as_dict()
        for r in TableRow:
            closed = table_row(r, sp, ic, cfg.T, pert, cfg.constants)
            num = qd[r.value]
            ref = max(abs(closed), abs(num), scale.get(r.value, 0.0))
            resid = abs(num - closed)
            rel = resid / ref if ref > 0 else 0.0
            tol = TABLE_TOL_FSL if r is TableRow.FINITE_SPEED_OF_LIGHT else TABLE_TOL
            rows.append({"species": sp.name, "row": r.value, "closed_form": closed, "quadrature": num,
                         "abs_residual": resid, "rel_residual": rel, "pass": rel <= tol})
        for name in ("laser_phase_phi0", "wavepacket"):
            rows.append({"species": sp.name, "row": name, "closed_form": 0.0, "quadrature": qd[name],
                         "abs_residual": abs(qd[name]), "rel_residual": None,
                         "pass": qd[name] == 0.0})
    return Report("table-check", ["species", "row", "closed_form", "quadrature", "abs_residual",
                                  "rel_residual", "pass"], rows,
                  [f"tolerance {TABLE_TOL:g} relative ({TABLE_TOL_FSL:g} for light propagation); "
                   "reference is max(|closed form|, |quadrature|, integrand scale)"])


def signal_traces(cfg: RunConfig, times=None) -> List[dict]:
    pair = _need_pair(cfg, "signal-trace")
    C = cfg.signal.contrast
    times = cfg.signal.times() if times is None else times
    pert = cfg.perturbation
    rows = []
    for T in times:
        T = float(T)
        row = {"T": T}
        for j, (sp, ic) in enumerate(zip(cfg.species, cfg.initial), start=1):
            fphi = clock_phase(sp, ic, T, cfg.constants)
            bphi = butterfly_phase_closed_form(sp, ic, T, pert, const=cfg.constants).total
            row[f"fountain_phase_{j}"] = fphi
            row[f"fountain_I{j}"] = signal(fphi, C).intensity
            row[f"butterfly_phase_{j}"] = bphi
            row[f"butterfly_I{j}"] = signal(bphi, C).intensity
        rows.append(row)
    return rows


def run_signal_trace(cfg: RunConfig) -> Report:
    rows = signal_traces(cfg)
    return Report("signal-trace", list(rows[0]), rows,
                  [f"I = (1 + C cos phi)/2 with C = {cfg.signal.contrast:g}"])


def run(command: str, cfg: RunConfig, workers: int = 1) -> Report:
    if command == "scan":
        return run_scan(cfg, workers)
    handlers = {"clock": run_clock, "butterfly": run_butterfly, "differential": run_differential,
                "budget": run_budget, "table-check": run_table_check,
                "signal-trace": run_signal_trace}
    if command not in handlers:
        raise ValueError(f"unknown command {command!r}")
    return handlers[command](cfg)


def _clean(v):
    if isinstance(v, (bool, np.bool_)):
        return bool(v)
    if isinstance(v, (float, np.floating)):
        return float(v) if math.isfinite(v) else None
    if isinstance(v, np.integer):
        return int(v)
    return v


def _csv_cell(v) -> str:
    if v is None:
        return ""
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (float, np.floating)):
        return f"{float(v) + 0.0:.11e}" if math.isfinite(v) else str(float(v))
    return str(v)


def format_report(rep: Report, cfg: RunConfig, fmt: str) -> str:
    if fmt == "json":
        doc = {"tool": "ucrphase", "version": __version__, "command": rep.command,
               "config": cfg.echo(), "notes": rep.notes, "columns": rep.columns,
               "rows": [{c: _clean(r.get(c)) for c in rep.columns} for r in rep.rows]}
        return json.dumps(doc, indent=2, allow_nan=False) + "\n"
    buf = io.StringIO()
    buf.write(f"# ucrphase {__version__} {rep.command}\n")
    for line in cfg.echo():
        buf.write(f"# config: {line}\n")
    for note in rep.notes:
        buf.write(f"# note: {note}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(rep.columns)
    for r in rep.rows:
        w.writerow([_csv_cell(r.get(c)) for c in rep.columns])
    return buf.getvalue()


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="ucrphase", description="UCR phase calculations")
    p.add_argument("command", choices=COMMANDS)
    p.add_argument("--config", help="config file (default: $UCRPHASE_CONFIG)")
    p.add_argument("--out", help="output file (default: output.path or stdout)")
    p.add_argument("--format", choices=("csv", "json"), help="default: output.format or csv")
    p.add_argument("--workers", type=int, default=1, help="processes for scans")
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    path = args.config or os.environ.get("UCRPHASE_CONFIG")
    if not path:
        print("error: no config given (--config or UCRPHASE_CONFIG)", file=sys.stderr)
        return EXIT_CONFIG
    if args.workers < 1:
        print("error: --workers must be at least 1", file=sys.stderr)
        return EXIT_CONFIG
    try:
        cfg = load_config(path)
    except ConfigError as exc:
        print(f"config error in {path}: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (OSError, UnicodeDecodeError) as exc:
        print(f"error reading {path}: {exc}", file=sys.stderr)
        return EXIT_IO
    try:
        rep = run(args.command, cfg, args.workers)
    except ConfigError as exc:
        print(f"config error in {path}: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except QuadratureError as exc:
        print(f"{args.command}: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except ValueError as exc:
        print(f"{args.command}: invalid input: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    text = format_report(rep, cfg, args.format or cfg.output_format)
    out = args.out or cfg.output_path
    if out is None:
        sys.stdout.write(text)
        return EXIT_OK
    try:
        with open(out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    except OSError as exc:
        print(f"error writing {out}: {exc}", file=sys.stderr)
        return EXIT_IO
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
