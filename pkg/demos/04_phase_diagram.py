"""Collision phase diagram: R below a density-dependent threshold speed.

Sweeps a small (rho0, vbar) grid of bright-pair collisions, then brackets
the R->T crossover at one background density by bisection.  Transmission
requires a higher speed at lower filling, where the hard-core constraint
bites harder.
"""

from hcbsol import ModelParams
from hcbsol.experiments import find_transmission_threshold, sweep_phase_diagram

params = ModelParams(L=400, t=1.0, V=0.9)

grid = sweep_phase_diagram([0.35, 0.45], [0.5, 0.7, 0.85], params, dt=0.01)
print("labels (rows rho0, columns vbar):")
print("        " + "  ".join(f"{v:>5}" for v in grid.vbar_axis))
for rho0, row in zip(grid.rho0_axis, grid.labels):
    print(f"rho0={rho0}: " + "  ".join(f"{lab:>5}" for lab in row))
print(f"sound speeds: {[round(c, 4) for c in grid.sound_speed_curve]}")

lo, hi = find_transmission_threshold(0.45, params, dv=0.01, dt=0.01)
print(f"\nR->T threshold at rho0 = 0.45: vbar in [{lo:.3f}, {hi:.3f}]")
