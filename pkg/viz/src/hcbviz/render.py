"""Figure renderers: space-time heatmaps, phase diagrams, breather panels.

All renderers are pure consumers: identical inputs produce identical image
bytes (fixed style, no timestamps).
"""

from __future__ import annotations

from pathlib import Path

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from .data import FormatViolation, read_report, read_trajectory  # noqa: E402

_STYLE = {
    "figure.dpi": 130,
    "font.size": 9,
    "axes.titlesize": 10,
    "svg.hashsalt": "hcbviz",
}


def _save(fig, out):
    out = Path(out)
    meta = {"Date": None} if out.suffix == ".svg" else {}
    fig.savefig(out, metadata=meta)
    plt.close(fig)


def render_spacetime(trajectory_csv, out_image, kind: str = "density"):
    """Space-time heatmap of the density or the phase (cyclic colormap)."""
    if kind not in ("density", "phase"):
        raise FormatViolation(f"kind must be 'density' or 'phase', got {kind!r}")
    traj = read_trajectory(trajectory_csv)
    with plt.rc_context(_STYLE):
        fig, ax = plt.subplots(figsize=(5.2, 4.2), constrained_layout=True)
        extent = [0, traj.L, traj.times[0], traj.times[-1]]
        if kind == "density":
            im = ax.imshow(traj.rho, origin="lower", aspect="auto",
                           extent=extent, cmap="viridis", vmin=0.0, vmax=1.0)
            label = "density"
        else:
            im = ax.imshow(np.mod(traj.phi, 2 * np.pi), origin="lower",
                           aspect="auto", extent=extent, cmap="twilight",
                           vmin=0.0, vmax=2 * np.pi)
            label = "phase mod 2pi"
        ax.set_xlabel("site")
        ax.set_ylabel("time (1/t)")
        ax.set_title(f"space-time {label}")
        fig.colorbar(im, ax=ax, label=label)
        _save(fig, out_image)
    return Path(out_image)


_LABEL_STYLE = {
    "T": dict(marker="o", color="#1f77b4", label="T (pass through)"),
    "R": dict(marker="s", color="#d62728", label="R (repel)"),
    "indeterminate": dict(marker="D", color="#7f7f7f", label="indeterminate"),
    "failed": dict(marker="x", color="#000000", label="failed"),
}


def render_phase_diagram(grid_json, out_image):
    """Collision classes over (rho0, velocity) with the sound-speed curve.

    Points are placed at the raw speed vbar * c_s(rho0), so the tabulated
    sound-speed curve is the arc separating the supersonic train region
    from localized solitons.
    """
    doc = read_report(grid_json)
    if doc.get("kind") != "phase_diagram":
        raise FormatViolation("not a phase_diagram report")
    rho0s = doc["rho0_axis"]
    vbars = doc["vbar_axis"]
    labels = doc["labels"]
    cs = doc["sound_speed_curve"]
    with plt.rc_context(_STYLE):
        fig, ax = plt.subplots(figsize=(5.0, 4.2), constrained_layout=True)
        seen = set()
        for i, r in enumerate(rho0s):
            for j, vb in enumerate(vbars):
                lab = labels[i][j]
                style = _LABEL_STYLE.get(lab, _LABEL_STYLE["failed"])
                ax.scatter([r], [vb * cs[i]], s=46,
                           label=style["label"] if lab not in seen else None,
                           marker=style["marker"], color=style["color"])
                seen.add(lab)
        order = np.argsort(rho0s)
        ax.plot(np.asarray(rho0s)[order], np.asarray(cs)[order], color="#000000",
                lw=1.2, label="sound speed c_s(rho0)")
        ax.fill_between(np.asarray(rho0s)[order], np.asarray(cs)[order],
                        ax.get_ylim()[1], color="#9ecae1", alpha=0.18,
                        label="supersonic (trains)")
        ax.set_xlabel("background density rho0")
        ax.set_ylabel("speed v (sites per 1/t)")
        ax.set_title("collision phase diagram")
        ax.legend(loc="upper left", fontsize=7)
        _save(fig, out_image)
    return Path(out_image)


def render_breather(trajectory_csv, report_json, out_image):
    """Breather space-time panel with the imprint profile inset."""
    traj = read_trajectory(trajectory_csv)
    doc = read_report(report_json)
    if doc.get("kind") != "breather":
        raise FormatViolation("not a breather report")
    with plt.rc_context(_STYLE):
        fig, ax = plt.subplots(figsize=(5.6, 4.4), constrained_layout=True)
        im = ax.imshow(traj.rho, origin="lower", aspect="auto",
                       extent=[0, traj.L, traj.times[0], traj.times[-1]],
                       cmap="viridis", vmin=0.0, vmax=1.0)
        ax.set_xlabel("site")
        ax.set_ylabel("time (1/t)")
        period = doc.get("period_mean")
        title = f"breathers: count={doc['count']}, verdict={doc['verdict']}"
        if period is not None:
            title += f", period={period:.1f}"
        ax.set_title(title)
        fig.colorbar(im, ax=ax, label="density")
        imprint = doc.get("imprint")
        if imprint and imprint.get("phi"):
            inset = ax.inset_axes([0.66, 0.64, 0.32, 0.32])
            phi = np.asarray(imprint["phi"], dtype=float)
            inset.plot(np.arange(len(phi)), phi, lw=0.9, color="#ffffff")
            inset.set_title("imprinted phase", fontsize=6, color="#ffffff")
            inset.tick_params(labelsize=5, colors="#ffffff")
            inset.patch.set_alpha(0.15)
            for spine in inset.spines.values():
                spine.set_color("#ffffff")
        _save(fig, out_image)
    return Path(out_image)
