"""Offline renderers for hcbsol trajectory and report artifacts."""

from .data import FormatViolation, TrajectoryData, read_report, read_trajectory
from .render import render_breather, render_phase_diagram, render_spacetime

__version__ = "0.1.0"
