"""Experiment configuration parsing and artifact serialization.

Configs are flat-section INI text (`key = value`).  Trajectories serialize
to CSV with one row per (frame, site) and 17 significant digits, so a
read/write round trip is bit-exact; structured reports serialize to JSON
with a versioned schema tag.  Every artifact carries the run parameters in
its header so it is self-describing.
"""

from __future__ import annotations

import configparser
import dataclasses
import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import ConfigError, FormatViolation, IoFailure, ParamDomain
from .experiments import (BreatherReport, CollisionReport, InterspeciesReport,
                          PhaseDiagramGrid, TrainCollisionReport)
from .integrate import ConservationTolerances, IntegratorConfig, Trajectory
from .model import ModelParams
from .solitons import PhaseImprint, SolitonSpec

SCHEMA = "hcbsol.report/v1"

KINDS = ("propagate", "collide", "interspecies", "sweep", "breathe", "train")

_MODEL_KEYS = {"L", "t", "V", "boundary", "mu_eff"}
_INTEGRATOR_KEYS = {"dt", "t_end", "frame_stride", "tol_number", "tol_energy"}
_EXPERIMENT_KEYS = {"kind", "seed"}
_SOLITON_KEYS = {"species", "rho0", "vbar", "center", "phase_sign"}
_IMPRINT_KEYS = {"n", "width", "centers"}
_SWEEP_KEYS = {"rho0_grid", "vbar_grid", "species", "bracket_thresholds"}
_COLLIDE_KEYS = {"species_a", "species_b", "rho0", "vbar", "separation"}
_INTERSPECIES_KEYS = {"vbar", "separation"}
_TRAIN_KEYS = {"rho0", "vbar", "center", "species"}
_BUILD_KEYS = {"winding", "polish"}


@dataclass
class ExperimentConfig:
    kind: str
    params: ModelParams
    integrator: IntegratorConfig
    solitons: list = field(default_factory=list)       # SolitonSpec
    imprint: PhaseImprint | None = None
    collide: dict = field(default_factory=dict)
    interspecies: dict = field(default_factory=dict)
    sweep: dict = field(default_factory=dict)
    train: dict = field(default_factory=dict)
    build: dict = field(default_factory=dict)
    seed: int | None = None


def _coerce(text, caster, key, issues, allowed):
    try:
        return caster(text)
    except (TypeError, ValueError):
        issues.append(f"DomainViolation({key!r}, {text!r}, {allowed!r})")
        return None


def parse_config(text: str) -> ExperimentConfig:
    """Validate configuration text, reporting every issue at once."""
    cp = configparser.ConfigParser(inline_comment_prefixes=("#", ";"))
    cp.optionxform = str  # keys are case-sensitive (L, V, t)
    try:
        cp.read_string(text)
    except configparser.Error as exc:
        raise ConfigError([f"FormatViolation: {exc}"]) from exc

    issues: list[str] = []

    def section(name):
        return dict(cp[name]) if cp.has_section(name) else {}

    def check_keys(name, got, allowed):
        for k in got:
            if k not in allowed:
                issues.append(f"UnknownKey({name}.{k})")

    exp = section("experiment")
    check_keys("experiment", exp, _EXPERIMENT_KEYS)
    kind = exp.get("kind")
    if kind is None:
        issues.append("MissingRequired(experiment.kind)")
    elif kind not in KINDS:
        issues.append(f"DomainViolation('kind', {kind!r}, {KINDS!r})")

    model = section("model")
    check_keys("model", model, _MODEL_KEYS)
    if "L" not in model:
        issues.append("MissingRequired(model.L)")
    L = _coerce(model.get("L", "0"), int, "L", issues, "integer >= 8")
    t = _coerce(model.get("t", "1.0"), float, "t", issues, "> 0")
    V = _coerce(model.get("V", "0.9"), float, "V", issues, "(0, t)")
    boundary = model.get("boundary", "periodic")
    mu_eff = _coerce(model.get("mu_eff", "0.0"), float, "mu_eff", issues, "real")
    params = None
    if not issues:
        try:
            params = ModelParams(L=L, t=t, V=V, boundary=boundary, mu_eff=mu_eff)
        except ParamDomain as exc:
            if V is not None and t is not None and not (0 < V < t):
                issues.append(f"DomainViolation('V', {V}, '(0, t)')")
            else:
                issues.append(f"DomainViolation: {exc}")

    integ = section("integrator")
    check_keys("integrator", integ, _INTEGRATOR_KEYS)
    if "t_end" not in integ:
        issues.append("MissingRequired(integrator.t_end)")
    dt = _coerce(integ.get("dt", "0.005"), float, "dt", issues, "(0, 0.05]")
    t_end = _coerce(integ.get("t_end", "0"), float, "t_end", issues, "finite")
    stride = _coerce(integ.get("frame_stride", "100"), int, "frame_stride",
                     issues, ">= 1")
    tol_n = _coerce(integ.get("tol_number", "1e-10"), float, "tol_number",
                    issues, "> 0")
    tol_e = _coerce(integ.get("tol_energy", "1e-7"), float, "tol_energy",
                    issues, "> 0")
    integrator = None
    if not issues:
        try:
            integrator = IntegratorConfig(
                t_end=t_end, dt=dt, frame_stride=stride,
                tolerances=ConservationTolerances(number=tol_n, energy=tol_e))
        except ParamDomain as exc:
            issues.append(f"DomainViolation: {exc}")

    solitons = []
    for name in sorted(s for s in cp.sections() if s == "soliton"
                       or s.startswith("soliton.")):
        body = section(name)
        check_keys(name, body, _SOLITON_KEYS)
        if "rho0" not in body:
            issues.append(f"MissingRequired({name}.rho0)")
        if "vbar" not in body:
            issues.append(f"MissingRequired({name}.vbar)")
        rho0 = _coerce(body.get("rho0", "0.5"), float, "rho0", issues, "(0, 1)")
        vbar = _coerce(body.get("vbar", "0"), float, "vbar", issues, "|vbar| != 1")
        center = _coerce(body.get("center", str((L or 0) / 2)), float, "center",
                         issues, "real")
        sign = _coerce(body.get("phase_sign", "1"), int, "phase_sign", issues,
                       "+1 or -1")
        species = body.get("species", "bright")
        if not issues:
            try:
                solitons.append(SolitonSpec(species, rho0, vbar, center,
                                            phase_sign=sign))
            except ParamDomain as exc:
                issues.append(f"DomainViolation: {exc}")

    imprint = None
    if cp.has_section("imprint"):
        body = section("imprint")
        check_keys("imprint", body, _IMPRINT_KEYS)
        n = _coerce(body.get("n", "2"), int, "n", issues, "even >= 0")
        width = _coerce(body.get("width", "3.0"), float, "width", issues, "> 0")
        centers = body.get("centers", str((L or 0) / 2))
        try:
            centers = tuple(float(c) for c in centers.split(","))
        except ValueError:
            issues.append(f"DomainViolation('centers', {centers!r}, 'comma reals')")
            centers = ()
        if not issues:
            try:
                imprint = PhaseImprint(n=n, width=width, centers=centers)
            except ParamDomain as exc:
                issues.append(f"DomainViolation: {exc}")

    def plain_section(name, allowed, casters):
        body = section(name)
        check_keys(name, body, allowed)
        out = {}
        for k, v in body.items():
            if k in casters:
                val = _coerce(v, casters[k], k, issues, casters[k].__name__)
                if val is not None:
                    out[k] = val
            else:
                out[k] = v
        return out

    grids = lambda s: [float(x) for x in s.split(",")]
    collide = plain_section("collide", _COLLIDE_KEYS,
                            {"rho0": float, "vbar": float, "separation": float})
    inter = plain_section("interspecies", _INTERSPECIES_KEYS,
                          {"vbar": float, "separation": float})
    sweep = plain_section("sweep", _SWEEP_KEYS,
                          {"rho0_grid": grids, "vbar_grid": grids})
    train = plain_section("train", _TRAIN_KEYS,
                          {"rho0": float, "vbar": float, "center": float})
    build = plain_section("build", _BUILD_KEYS, {})

    known = {"experiment", "model", "integrator", "imprint", "collide",
             "interspecies", "sweep", "train", "build"}
    for name in cp.sections():
        if name not in known and name != "soliton" and not name.startswith("soliton."):
            issues.append(f"UnknownKey(section [{name}])")

    seed = None
    if "seed" in exp:
        seed = _coerce(exp["seed"], int, "seed", issues, "integer")

    if issues:
        raise ConfigError(issues)
    return ExperimentConfig(kind=kind, params=params, integrator=integrator,
                            solitons=solitons, imprint=imprint, collide=collide,
                            interspecies=inter, sweep=sweep, train=train,
                            build=build, seed=seed)


def read_config(path) -> ExperimentConfig:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise IoFailure(f"cannot read config {path}: {exc}") from exc
    return parse_config(text)


# ---------------------------------------------------------------------------
# trajectory CSV
# ---------------------------------------------------------------------------

def _fmt(x: float) -> str:
    return format(x, ".17g")


def write_trajectory(traj: Trajectory, path) -> None:
    """CSV rows (frame, site) with columns time,site,rho,phi,rho_s."""
    p = traj.params
    lines = [
        f"# hcbsol trajectory v1",
        f"# L={p.L} t={_fmt(p.t)} V={_fmt(p.V)} boundary={p.boundary} "
        f"mu_eff={_fmt(p.mu_eff)} dt={_fmt(traj.dt)}",
        "time,site,rho,phi,rho_s",
    ]
    rho_all = traj.densities()
    for i in range(traj.n_frames):
        tstr = _fmt(float(traj.times[i]))
        rho = rho_all[i]
        phi = traj.phis[i]
        rho_s = rho * (1.0 - rho)
        for j in range(p.L):
            lines.append(f"{tstr},{j},{_fmt(rho[j])},{_fmt(phi[j])},{_fmt(rho_s[j])}")
    try:
        Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")
    except OSError as exc:
        raise IoFailure(f"cannot write trajectory {path}: {exc}") from exc


def read_trajectory(path) -> Trajectory:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise IoFailure(f"cannot read trajectory {path}: {exc}") from exc
    lines = text.splitlines()
    meta = {}
    body_start = None
    for i, line in enumerate(lines):
        if line.startswith("#"):
            for tokens in line[1:].split():
                if "=" in tokens:
                    k, v = tokens.split("=", 1)
                    meta[k] = v
            continue
        if line.strip() == "time,site,rho,phi,rho_s":
            body_start = i + 1
            break
        raise FormatViolation(f"unexpected header line: {line!r}")
    if body_start is None:
        raise FormatViolation("missing column header 'time,site,rho,phi,rho_s'")
    needed = {"L", "t", "V", "boundary"}
    if not needed.issubset(meta):
        raise FormatViolation(f"missing metadata {needed - set(meta)}")
    L = int(meta["L"])
    params = ModelParams(L=L, t=float(meta["t"]), V=float(meta["V"]),
                         boundary=meta["boundary"],
                         mu_eff=float(meta.get("mu_eff", "0")))
    times, deltas, phis = [], [], []
    row_rho = np.empty(L)
    row_phi = np.empty(L)
    expect_site = 0
    current_t = None
    for line in lines[body_start:]:
        if not line.strip():
            continue
        parts = line.split(",")
        if len(parts) != 5:
            raise FormatViolation(f"bad row: {line!r}")
        tval = float(parts[0])
        site = int(parts[1])
        if site != expect_site:
            raise FormatViolation(f"site out of order: got {site}, want {expect_site}")
        if site == 0:
            current_t = tval
        elif tval != current_t:
            raise FormatViolation("time changed mid-frame")
        row_rho[site] = float(parts[2])
        row_phi[site] = float(parts[3])
        expect_site += 1
        if expect_site == L:
            times.append(current_t)
            deltas.append(1.0 - 2.0 * row_rho.copy())
            phis.append(row_phi.copy())
            expect_site = 0
    if expect_site != 0:
        raise FormatViolation("truncated final frame")
    from .model import observables
    traj = Trajectory(params=params, times=np.array(times),
                      deltas=np.array(deltas), phis=np.array(phis),
                      diagnostics=[], dt=float(meta.get("dt", "0.005")))
    traj.diagnostics = [observables(traj.frame_state(i), params)
                        for i in range(traj.n_frames)]
    return traj


# ---------------------------------------------------------------------------
# report JSON
# ---------------------------------------------------------------------------

_REPORT_KINDS = {
    CollisionReport: "collision",
    InterspeciesReport: "interspecies",
    BreatherReport: "breather",
    PhaseDiagramGrid: "phase_diagram",
    TrainCollisionReport: "train_collision",
}


def _jsonable(obj):
    if isinstance(obj, (np.floating, float)):
        v = float(obj)
        return v if math.isfinite(v) else None
    if isinstance(obj, (np.integer, int)):
        return int(obj)
    if isinstance(obj, np.ndarray):
        return [_jsonable(x) for x in obj.tolist()]
    if isinstance(obj, (list, tuple)):
        return [_jsonable(x) for x in obj]
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    return obj


def report_to_dict(report) -> dict:
    kind = _REPORT_KINDS.get(type(report))
    if kind is None:
        raise IoFailure(f"unknown report type {type(report).__name__}")
    body = _jsonable(dataclasses.asdict(report))
    if kind == "collision":
        body["class"] = body.pop("cls")
    if kind == "train_collision":
        body["class"] = body.pop("cls")
    return {"schema": SCHEMA, "kind": kind, **body}


def write_report(report, path, extra: dict | None = None) -> None:
    doc = report_to_dict(report)
    if extra:
        doc.update(_jsonable(extra))
    try:
        Path(path).write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n",
                              encoding="utf-8")
    except OSError as exc:
        raise IoFailure(f"cannot write report {path}: {exc}") from exc


def read_report(path) -> dict:
    try:
        doc = json.loads(Path(path).read_text(encoding="utf-8"))
    except OSError as exc:
        raise IoFailure(f"cannot read report {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise FormatViolation(f"invalid JSON in {path}: {exc}") from exc
    if doc.get("schema") != SCHEMA:
        raise FormatViolation(f"unknown schema {doc.get('schema')!r}")
    return doc
