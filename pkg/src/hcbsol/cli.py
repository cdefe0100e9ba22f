"""Command-line entry points.

Each subcommand reads a flat INI config and writes its artifacts into the
output directory: trajectories as CSV, reports as schema-tagged JSON.  On
failure a machine-readable JSON error is printed to stderr and the exit
code is nonzero.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .errors import ConfigError, HcbsolError
from .experiments import (collision_pair, run_breather, run_collision,
                          run_interspecies, sweep_phase_diagram)
from .integrate import evolve
from .io import (read_config, report_to_dict, write_report, write_trajectory,
                 SCHEMA)
from .solitons import (build_state, imprint_profile, soliton_width,
                       train_state)


def _write_json(path, doc):
    Path(path).write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n",
                          encoding="utf-8")


def _summary(traj):
    first, last = traj.diagnostics[0], traj.diagnostics[-1]
    return {
        "frames": traj.n_frames,
        "t_final": float(traj.times[-1]),
        "particle_number": first.particle_number,
        "number_drift": abs(last.particle_number - first.particle_number),
        "energy": first.energy,
        "energy_drift_rel": abs(last.energy - first.energy) / max(1.0, abs(first.energy)),
    }


def cmd_propagate(cfg, out):
    if not cfg.solitons:
        raise ConfigError(["MissingRequired([soliton] section for propagate)"])
    winding = cfg.build.get("winding", "strict")
    polish = cfg.build.get("polish", "true").lower() != "false"
    state = build_state(cfg.solitons, cfg.params.L, cfg.params,
                        polish=polish, winding=winding)
    traj = evolve(state, cfg.params, cfg.integrator)
    write_trajectory(traj, out / "trajectory.csv")
    _write_json(out / "summary.json",
                {"schema": SCHEMA, "kind": "propagate", **_summary(traj)})


def cmd_collide(cfg, out):
    c = cfg.collide
    for key in ("rho0", "vbar"):
        if key not in c:
            raise ConfigError([f"MissingRequired(collide.{key})"])
    a, b = collision_pair(c.get("species_a", "bright"), c.get("species_b", "bright"),
                          c["rho0"], c["vbar"], cfg.params,
                          separation=c.get("separation"))
    traj, report = run_collision(a, b, cfg.params, dt=cfg.integrator.dt,
                                 frame_dt=cfg.integrator.frame_stride * cfg.integrator.dt,
                                 t_end=cfg.integrator.t_end)
    write_trajectory(traj, out / "trajectory.csv")
    write_report(report, out / "report.json", extra=_summary(traj))


def cmd_interspecies(cfg, out):
    c = cfg.interspecies
    if "vbar" not in c:
        raise ConfigError(["MissingRequired(interspecies.vbar)"])
    traj, report = run_interspecies(c["vbar"], cfg.params,
                                    separation=c.get("separation", 40.0),
                                    dt=cfg.integrator.dt,
                                    frame_dt=cfg.integrator.frame_stride * cfg.integrator.dt,
                                    t_end=cfg.integrator.t_end)
    write_trajectory(traj, out / "trajectory.csv")
    write_report(report, out / "report.json", extra=_summary(traj))


def cmd_sweep(cfg, out):
    s = cfg.sweep
    for key in ("rho0_grid", "vbar_grid"):
        if key not in s:
            raise ConfigError([f"MissingRequired(sweep.{key})"])
    grid = sweep_phase_diagram(s["rho0_grid"], s["vbar_grid"], cfg.params,
                               species=s.get("species", "bright"),
                               dt=cfg.integrator.dt,
                               bracket_thresholds=(
                                   s.get("bracket_thresholds", "false").lower()
                                   == "true"))
    write_report(grid, out / "grid.json")
    for i, rho0 in enumerate(grid.rho0_axis):
        for j, vbar in enumerate(grid.vbar_axis):
            _write_json(out / f"point_{i}_{j}.json",
                        {"schema": SCHEMA, "kind": "sweep_point", "rho0": rho0,
                         "vbar": vbar, "label": grid.labels[i][j],
                         "failure": grid.failures.get((i, j))})


def cmd_breathe(cfg, out):
    if cfg.imprint is None:
        raise ConfigError(["MissingRequired([imprint] section for breathe)"])
    traj, report = run_breather(cfg.imprint, cfg.params, config=cfg.integrator)
    write_trajectory(traj, out / "trajectory.csv")
    x = np.arange(cfg.params.L, dtype=float)
    prof = imprint_profile(x, cfg.imprint)
    write_report(report, out / "report.json",
                 extra={"imprint": {"n": cfg.imprint.n,
                                    "width": cfg.imprint.width,
                                    "centers": list(cfg.imprint.centers),
                                    "phi": prof.tolist()},
                        **_summary(traj)})


def cmd_train(cfg, out):
    c = cfg.train
    for key in ("rho0", "vbar"):
        if key not in c:
            raise ConfigError([f"MissingRequired(train.{key})"])
    from .solitons import SolitonSpec
    species = c.get("species", "bright" if c["rho0"] < 0.5 else "dark")
    spec = SolitonSpec(species, c["rho0"], c["vbar"],
                       c.get("center", cfg.params.L / 2))
    state = train_state(spec, cfg.params.L, cfg.params)
    traj = evolve(state, cfg.params, cfg.integrator)
    write_trajectory(traj, out / "trajectory.csv")
    rho = 0.5 * (1.0 - state.delta)
    from scipy.signal import find_peaks
    peaks, _ = find_peaks(rho)
    gaps = np.diff(peaks)
    doc = {"schema": SCHEMA, "kind": "train",
           "period_analytic": 2 * np.pi * soliton_width(c["rho0"], c["vbar"],
                                                        cfg.params).value,
           "period_measured": float(np.mean(gaps)) if len(gaps) else None,
           "n_peaks": int(len(peaks)), **_summary(traj)}
    _write_json(out / "report.json", doc)


_COMMANDS = {
    "propagate": cmd_propagate,
    "collide": cmd_collide,
    "interspecies": cmd_interspecies,
    "sweep": cmd_sweep,
    "breathe": cmd_breathe,
    "train": cmd_train,
}


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="hcbsol",
        description="Hard-core boson lattice soliton simulator")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)
    for name in _COMMANDS:
        sp = sub.add_parser(name)
        sp.add_argument("--config", required=True, help="INI config path")
        sp.add_argument("--out", required=True, help="output directory")
    args = parser.parse_args(argv)

    try:
        cfg = read_config(args.config)
        if cfg.kind != args.command:
            raise ConfigError([f"DomainViolation('kind', {cfg.kind!r}, "
                               f"'{args.command}')"])
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        _COMMANDS[args.command](cfg, out)
    except ConfigError as exc:
        json.dump({"error": "ConfigError", "issues": exc.issues}, sys.stderr)
        sys.stderr.write("\n")
        return 2
    except HcbsolError as exc:
        json.dump({"error": type(exc).__name__, "message": str(exc)}, sys.stderr)
        sys.stderr.write("\n")
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
