"""``phonon-quench`` command line driver.

    phonon-quench <mode> [--config PATH] [--out DIR] [--workers K]

Modes: ``derive`` (trap couplings and validity report), ``ground``
(ground-state correlation vs J/U), ``quench`` (time series after a local
quench) and ``sweep`` (oscillation amplitude vs J/U). Each run writes its
CSV/SVG outputs and a ``manifest.json`` into the output directory.

Exit codes: 0 success, 2 configuration error, 3 numerical failure,
4 I/O failure.
"""
from __future__ import annotations

import argparse
import json
import math
import os
import shutil
import sys
import tempfile
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Optional

import numpy as np

from . import __version__
from ._accel import USE_NUMBA
from .config import MODES, RunConfig, parse_config
from .errors import ConfigError, PhononQuenchError
from .observables import ObservableSeries
from .quench import (crossover_curve_ju, run_quench, steepest_crossover,
                     sweep_max_variation)
from .svgplot import line_plot
from .trap import (derive_couplings, mean_count_rate, overall_status, photon_series,
                   report_records, report_table, validity_report)

EXIT_OK, EXIT_CONFIG, EXIT_NUMERICAL, EXIT_IO = 0, 2, 3, 4

QUENCH_COLUMNS = ("t_U", "t_s", "n_i0", "n_i", "R_i_per_s")
SWEEP_COLUMNS = ("ju", "amp_n_i0", "amp_R_i_per_s", "mean_n_i0")
GROUND_COLUMNS = ("ju", "delta_avg", "delta_central", "gap_over_U")
COUPLING_COLUMNS = ("quantity", "value", "unit")
VALIDITY_COLUMNS = ("name", "condition", "ratio", "status")

ARTIFACT_CHOICES = (
    "quench.t_max, quench.samples and the sweep grid are artifact defaults; "
    "the source experiment does not state them"
)


def fmt(x) -> str:
    """Locale-independent number formatting with 12 significant digits."""
    if isinstance(x, str):
        return x
    if isinstance(x, (bool, np.bool_)):
        return str(int(x))
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    x = float(x)
    if x == 0.0:
        return "0"
    return format(x, ".12g")


def csv_text(columns, rows) -> str:
    lines = [",".join(columns)]
    lines.extend(",".join(fmt(v) for v in row) for row in rows)
    return "\n".join(lines) + "\n"


@dataclass
class RunOutcome:
    exit_code: int
    files: List[Path] = field(default_factory=list)
    message: str = ""


class _Stage:
    """Collects outputs in a scratch directory, published only on success."""

    def __init__(self, out_dir: Path):
        self.out_dir = out_dir
        self.tmp = None
        self.names: List[str] = []

    def __enter__(self):
        self.out_dir.mkdir(parents=True, exist_ok=True)
        self.tmp = Path(tempfile.mkdtemp(prefix=".staging-", dir=self.out_dir))
        return self

    def write(self, name: str, text: str):
        (self.tmp / name).write_text(text, encoding="utf-8", newline="\n")
        self.names.append(name)

    def publish(self) -> List[Path]:
        paths = []
        for name in self.names:
            dest = self.out_dir / name
            os.replace(self.tmp / name, dest)
            paths.append(dest)
        return paths

    def __exit__(self, *exc):
        shutil.rmtree(self.tmp, ignore_errors=True)
        return False


# ---------------------------------------------------------------------------
# mode drivers; each returns (files: {name: text}, metadata dict)
# ---------------------------------------------------------------------------

def _validity(cfg: RunConfig):
    trap = cfg.trap_params()
    derived = derive_couplings(trap, cfg["trap.hopping_hz"])
    return derived, validity_report(derived, trap.quench_mod_freq)


def _derive(cfg: RunConfig):
    derived, report = _validity(cfg)
    det = cfg.detection_params()
    rows = [
        ("omega_x", derived.omega_x, "Hz"),
        ("eta_x", derived.eta_x, "1"),
        ("eta_x^4", derived.eta_x ** 4, "1"),
        ("J", derived.J, "Hz"),
        ("U", derived.U, "Hz"),
        ("J/U", derived.ju, "1"),
        ("beta_x", derived.beta_x, "1"),
        ("F", derived.F, "Hz"),
        ("omega_0", cfg["trap.omega_0"], "Hz"),
        ("solid_angle_fraction", det.omega, "1"),
        ("mean_count_rate", mean_count_rate(det), "1/s"),
    ]
    files = {
        "couplings.csv": csv_text(COUPLING_COLUMNS, rows),
        "validity.csv": csv_text(VALIDITY_COLUMNS, [(c.name, c.condition, c.ratio, c.status)
                                                    for c in report]),
        "validity.txt": report_table(report) + "\n",
    }
    return files, {"validity": {"overall": overall_status(report), "checks": report_records(report)}}


def _ground(cfg: RunConfig):
    grid = cfg.ju_grid()
    J = 1.0
    points = crossover_curve_ju(cfg.L, cfg.N, grid, J=J, boundary=cfg["lattice.boundary"],
                                workers=cfg["run.workers"])
    rows = [(p.ju, p.delta_avg, p.delta_central, p.gap * p.ju / J) for p in points]
    svg = line_plot([p.ju for p in points], [[p.delta_avg for p in points],
                                              [p.delta_central for p in points]],
                    ["bond-averaged", "central bond"], "J/U", "Delta (nearest neighbour)",
                    f"Ground-state correlation, L={cfg.L}, N={cfg.N}", logx=True, markers=True)
    meta = {"ju_grid": grid, "degenerate_points": [p.ju for p in points if p.degenerate]}
    if len(points) >= 2:
        meta["steepest_ju"] = steepest_crossover(points)
    return {"ground.csv": csv_text(GROUND_COLUMNS, rows), "ground.svg": svg}, meta


def _quench(cfg: RunConfig):
    spec = cfg.quench_spec()
    _, U_hz = cfg.couplings_hz()
    result = run_quench(spec, workers=1)
    det = cfg.detection_params()
    rate = photon_series(ObservableSeries(result.n0.site, result.tu, result.n0.values), det, U_hz=U_hz)
    columns = QUENCH_COLUMNS if U_hz is not None else tuple(c for c in QUENCH_COLUMNS if c != "t_s")
    rows = []
    for k, tu in enumerate(result.tu):
        row = [tu]
        if U_hz is not None:
            row.append(rate.times[k])
        row += [result.n0.values[k], result.density.values[k], rate.values[k]]
        rows.append(row)
    site = spec.measure_site
    svg = line_plot(result.tu, [rate.values], [f"R_{site}"], "t U", "photon counts per second",
                    f"Quench at site {spec.quench_site}, J/U = {spec.ju:.4g}, L={spec.L}")
    meta = {
        "ju": spec.ju,
        "quench_site": spec.quench_site,
        "measure_site": site,
        "ground_energy_over_U": result.ground_energy / abs(spec.U_init),
        "post_quench_energy_over_U": result.final_energy / abs(spec.U_init),
        "degeneracy_warning": result.degeneracy_warning,
        "amplitude_n_i0": result.amplitude,
        "mean_count_rate_per_s": mean_count_rate(det),
    }
    if cfg["model.couplings"] == "trap":
        meta.update(_validity_meta(cfg))
    return {"quench.csv": csv_text(columns, rows), "quench.svg": svg}, meta


def _sweep(cfg: RunConfig):
    base = cfg.sweep_base_spec()
    grid = cfg.ju_grid()
    points = sweep_max_variation(base, grid, workers=cfg["run.workers"])
    r_mean = mean_count_rate(cfg.detection_params())
    rows = [(p.ju, p.amplitude, p.amplitude * r_mean, p.mean_n0) for p in points]
    svg = line_plot([p.ju for p in points], [[p.amplitude * r_mean for p in points]],
                    ["max variation of R_i"], "J/U (before quench)", "counts per second",
                    f"Quench response vs J/U, L={base.L}, site {base.quench_site}",
                    logx=True, markers=True)
    peak = max(points, key=lambda p: p.amplitude)
    meta = {
        "ju_grid": grid,
        "argmax_ju": peak.ju,
        "relative_variation_at_peak": peak.amplitude / peak.mean_n0 if peak.mean_n0 > 0 else None,
        "degenerate_points": [p.ju for p in points if p.degenerate],
    }
    if cfg["model.couplings"] == "trap":
        meta.update(_validity_meta(cfg))
    return {"sweep.csv": csv_text(SWEEP_COLUMNS, rows), "sweep.svg": svg}, meta


def _validity_meta(cfg):
    _, report = _validity(cfg)
    return {"validity": {"overall": overall_status(report), "checks": report_records(report)}}


DRIVERS = {"derive": _derive, "ground": _ground, "quench": _quench, "sweep": _sweep}


def _jsonable(value):
    if isinstance(value, dict):
        return {k: _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if isinstance(value, (np.floating,)):
        return float(value)
    if isinstance(value, (np.integer,)):
        return int(value)
    if isinstance(value, float) and not math.isfinite(value):
        return str(value)
    return value


def run(cfg: RunConfig, out_dir: Optional[str] = None) -> RunOutcome:
    """Execute one configured run and write its outputs.

    Package errors are reported through the exit code; nothing is left in
    the output directory when a run fails.
    """
    out = Path(out_dir if out_dir is not None else cfg["run.output_dir"])
    started = time.perf_counter()
    try:
        files, meta = DRIVERS[cfg.mode](cfg)
    except ConfigError as exc:
        return RunOutcome(EXIT_CONFIG, message=f"config error: {exc}")
    except PhononQuenchError as exc:
        return RunOutcome(EXIT_NUMERICAL, message=f"numerical failure: {exc}")
    elapsed = time.perf_counter() - started
    manifest = {
        "artifact": "phonon_quench",
        "version": __version__,
        "mode": cfg.mode,
        "config_text": cfg.echo_text(),
        "config": cfg.values,
        "resolved_defaults": cfg.resolved_defaults(),
        "notes": [ARTIFACT_CHOICES],
        "numba": USE_NUMBA,
        "results": meta,
        "outputs": sorted(files),
        "timings_s": {"compute": elapsed},
    }
    try:
        with _Stage(out) as stage:
            for name in sorted(files):
                stage.write(name, files[name])
            stage.write("manifest.json", json.dumps(_jsonable(manifest), indent=2, sort_keys=True) + "\n")
            paths = stage.publish()
    except OSError as exc:
        return RunOutcome(EXIT_IO, message=f"I/O failure: {exc}")
    return RunOutcome(EXIT_OK, paths, f"wrote {len(paths)} files to {out}")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="phonon-quench", description=__doc__.split("\n")[0])
    parser.add_argument("mode", choices=MODES)
    parser.add_argument("--config", help="configuration file (section.key = value lines)")
    parser.add_argument("--out", help="output directory (default: $PHONON_QUENCH_OUT or ./phonon_quench_out)")
    parser.add_argument("--workers", type=int, help="worker processes for sweeps")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    text = ""
    if args.config:
        try:
            text = Path(args.config).read_text(encoding="utf-8")
        except OSError as exc:
            print(f"phonon-quench: cannot read config: {exc}", file=sys.stderr)
            return EXIT_CONFIG
    overrides: Dict[str, str] = {"run.mode": args.mode}
    try:
        cfg = parse_config(text, overrides)
    except ConfigError as exc:
        print(f"phonon-quench: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    if args.workers is not None:
        if args.workers < 1:
            print("phonon-quench: --workers must be >= 1", file=sys.stderr)
            return EXIT_CONFIG
        cfg.values["run.workers"] = args.workers
    outcome = run(cfg, args.out)
    stream = sys.stdout if outcome.exit_code == EXIT_OK else sys.stderr
    print(f"phonon-quench: {outcome.message}", file=stream)
    if outcome.exit_code == EXIT_OK and cfg.mode == "derive":
        print((Path(outcome.files[0]).parent / "validity.txt").read_text(), end="")
    return outcome.exit_code


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
