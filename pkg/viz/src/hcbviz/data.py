"""Readers for the simulator's file artifacts.

This package consumes files only: trajectory CSV (`time,site,rho,phi,rho_s`
rows under a `#`-comment header) and schema-tagged report JSON.  No physics
is recomputed here.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

SCHEMA = "hcbsol.report/v1"


class FormatViolation(Exception):
    """Input file does not match the expected format."""


@dataclass
class TrajectoryData:
    times: np.ndarray     # (F,)
    rho: np.ndarray       # (F, L)
    phi: np.ndarray       # (F, L)
    rho_s: np.ndarray     # (F, L)
    meta: dict

    @property
    def L(self) -> int:
        return self.rho.shape[1]


def read_trajectory(path) -> TrajectoryData:
    lines = Path(path).read_text(encoding="utf-8").splitlines()
    meta = {}
    start = None
    for i, line in enumerate(lines):
        if line.startswith("#"):
            for tok in line[1:].split():
                if "=" in tok:
                    k, v = tok.split("=", 1)
                    meta[k] = v
            continue
        if line.strip() == "time,site,rho,phi,rho_s":
            start = i + 1
            break
        raise FormatViolation(f"unexpected line before header: {line!r}")
    if start is None:
        raise FormatViolation("missing 'time,site,rho,phi,rho_s' header")
    rows = [line.split(",") for line in lines[start:] if line.strip()]
    if not rows or any(len(r) != 5 for r in rows):
        raise FormatViolation("malformed data rows")
    data = np.array(rows, dtype=float)
    L = int(data[:, 1].max()) + 1
    if len(data) % L:
        raise FormatViolation("row count is not a multiple of the site count")
    F = len(data) // L
    times = data[::L, 0]
    return TrajectoryData(times=times,
                          rho=data[:, 2].reshape(F, L),
                          phi=data[:, 3].reshape(F, L),
                          rho_s=data[:, 4].reshape(F, L),
                          meta=meta)


def read_report(path) -> dict:
    try:
        doc = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise FormatViolation(f"invalid JSON: {exc}") from exc
    if doc.get("schema") != SCHEMA:
        raise FormatViolation(f"unexpected schema {doc.get('schema')!r}")
    return doc
