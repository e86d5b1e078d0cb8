"""Result serialization: CSV files, gnuplot scripts and rendered figures.

A simulation run leaves behind, in its output directory:

    energy.csv          per-step energy, -log(E), -log(E)/t, dissipation
                        channels and the combined-functional value
    snapshot_initial.csv / snapshot_final.csv
                        x, phi, psi, theta, p at t = 0 and t = T
    fields.csv          t, x, phi, psi, theta, p at the snapshot stride
                        (for the space-time surface plots)
    plots.gp            gnuplot script reproducing the seven standard
                        figures from the CSV files
    *.png               the same figures rendered with matplotlib

All numbers are written with 17 significant digits and '.' decimal
separator, so repeated runs of one configuration produce byte-identical
files.
"""

from __future__ import annotations

import os
from typing import Optional

import numpy as np

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402  (backend must be pinned first)

from .convergence import RefinementStudy  # noqa: E402
from .energy import EnergySeries  # noqa: E402
from .fem import Mesh1D  # noqa: E402
from .stepper import BeamState  # noqa: E402

SURFACE_FIELDS = ("phi", "psi", "theta", "p")
SERIES_FIGURES = ("energy", "neg_log_energy", "neg_log_energy_over_t")


def _fmt(value: float) -> str:
    return f"{value:.17g}"


def write_energy_csv(series: EnergySeries, path: str) -> None:
    """Energy history with -log(E) columns left empty where undefined."""
    lines = ["t,E,neg_log_E,neg_log_E_over_t,diss_theta,diss_p,diss_damp,lyapunov"]
    for n in range(len(series)):
        t = float(series.t[n])
        e = float(series.energy[n])
        neg_log = _fmt(-np.log(e)) if e > 0.0 else ""
        neg_log_over_t = _fmt(-np.log(e) / t) if e > 0.0 and t > 0.0 else ""
        lyap = "" if series.lyapunov is None else _fmt(float(series.lyapunov[n]))
        lines.append(",".join([
            _fmt(t), _fmt(e), neg_log, neg_log_over_t,
            _fmt(float(series.diss_theta[n])), _fmt(float(series.diss_p[n])),
            _fmt(float(series.diss_damp[n])), lyap,
        ]))
    _write_text(path, "\n".join(lines) + "\n")


def write_snapshot_csv(state: BeamState, mesh: Mesh1D, path: str) -> None:
    """One state over the full node set, boundary rows included as zeros."""
    lines = ["x,phi,psi,theta,p"]
    for row in _snapshot_rows(state, mesh):
        lines.append(",".join(_fmt(v) for v in row))
    _write_text(path, "\n".join(lines) + "\n")


def write_fields_csv(trajectory: list[BeamState], mesh: Mesh1D, path: str,
                     stride: int = 1) -> None:
    """Space-time table (t, x, phi, psi, theta, p) at the given stride."""
    lines = ["t,x,phi,psi,theta,p"]
    for n, state in enumerate(trajectory):
        if n % stride and n != len(trajectory) - 1:
            continue
        for row in _snapshot_rows(state, mesh):
            lines.append(",".join([_fmt(state.t)] + [_fmt(v) for v in row]))
    _write_text(path, "\n".join(lines) + "\n")


def _snapshot_rows(state: BeamState, mesh: Mesh1D):
    def padded(v):
        return np.concatenate(([0.0], v, [0.0]))

    phi, psi = padded(state.phi), padded(state.psi)
    theta, p = padded(state.theta), padded(state.p)
    for j, x in enumerate(mesh.nodes):
        yield (x, phi[j], psi[j], theta[j], p[j])


def write_convergence_csv(study: RefinementStudy, path: str) -> None:
    """Per-level refinement table: level, s, dt, composite error, order."""
    lines = ["level,s,dt,error,order"]
    for level, s, dt, error, order in study.rows():
        lines.append(",".join([
            str(level), str(s), _fmt(dt), _fmt(error),
            "" if order is None else _fmt(order),
        ]))
    _write_text(path, "\n".join(lines) + "\n")


GNUPLOT_SCRIPT = """\
# gnuplot script reproducing the standard figures from the CSV output.
# Run from the output directory:  gnuplot plots.gp
set datafile separator ","
set terminal pngcairo size 900,600

set output "energy.png"
set xlabel "t"
set ylabel "E"
set title "Energy as function of time"
plot "energy.csv" using 1:2 with lines notitle

set output "neg_log_energy.png"
set ylabel "-log(E)"
set title "-log(energy) as function of time"
plot "energy.csv" using 1:3 with lines notitle

set output "neg_log_energy_over_t.png"
set ylabel "-log(E)/t"
set title "Asymptotic behavior of -log(energy)/t"
plot "energy.csv" using 1:4 with lines notitle

set xlabel "x"
set ylabel "t"
set dgrid3d 64,64
set hidden3d
"""

GNUPLOT_SURFACE = """\
set output "{field}_surface.png"
set title "{field} as function of x and t"
splot "fields.csv" using 2:1:{column} with lines notitle
"""


def emit_plot_scripts(run_dir: str) -> str:
    """Write the gnuplot script for the seven standard figures; return its path."""
    script = GNUPLOT_SCRIPT
    for column, field in enumerate(SURFACE_FIELDS, start=3):
        script += GNUPLOT_SURFACE.format(field=field, column=column)
    path = os.path.join(run_dir, "plots.gp")
    _write_text(path, script)
    return path


def render_series_figures(series: EnergySeries, run_dir: str) -> list[str]:
    """Render the three time-series figures to PNG; return the paths."""
    written = []
    t = series.t
    e = series.energy
    positive = e > 0.0

    def save(name: str, x, y, ylabel: str, title: str):
        fig, ax = plt.subplots(figsize=(7.0, 4.5))
        ax.plot(x, y, lw=1.5)
        ax.set_xlabel("t")
        ax.set_ylabel(ylabel)
        ax.set_title(title)
        ax.grid(True, alpha=0.4)
        path = os.path.join(run_dir, f"{name}.png")
        fig.savefig(path, dpi=110)
        plt.close(fig)
        written.append(path)

    save("energy", t, e, "E", "Energy as function of time")
    if np.any(positive):
        tp, ep = t[positive], e[positive]
        save("neg_log_energy", tp, -np.log(ep), "-log(E)",
             "-log(energy) as function of time")
        over_t = positive & (t > 0.0)
        to, eo = t[over_t], e[over_t]
        save("neg_log_energy_over_t", to, -np.log(eo) / to, "-log(E)/t",
             "Asymptotic behavior of -log(energy)/t")
    return written


def render_surface_figures(trajectory: list[BeamState], mesh: Mesh1D,
                           run_dir: str, stride: int = 1) -> list[str]:
    """Render the four space-time surfaces (phi, psi, theta, p) to PNG."""
    indices = [n for n in range(len(trajectory))
               if n % stride == 0 or n == len(trajectory) - 1]
    t = np.array([trajectory[n].t for n in indices])
    x = mesh.nodes
    written = []
    for field in SURFACE_FIELDS:
        grid = np.zeros((len(indices), x.shape[0]))
        for row, n in enumerate(indices):
            grid[row, 1:-1] = getattr(trajectory[n], field)
        fig, ax = plt.subplots(figsize=(7.0, 4.5))
        mesh_plot = ax.pcolormesh(x, t, grid, shading="gouraud", cmap="viridis")
        fig.colorbar(mesh_plot, ax=ax, label=field)
        ax.set_xlabel("x")
        ax.set_ylabel("t")
        ax.set_title(f"{field} as function of x and t")
        path = os.path.join(run_dir, f"{field}_surface.png")
        fig.savefig(path, dpi=110)
        plt.close(fig)
        written.append(path)
    return written


def render_convergence_figure(study: RefinementStudy, run_dir: str) -> Optional[str]:
    """Log-log plot of the composite error against the element size."""
    if study.exact:
        return None
    dts = np.array([dt for (_, dt) in study.levels])
    fig, ax = plt.subplots(figsize=(6.0, 4.5))
    ax.loglog(dts, study.errors, "o-", label="measured")
    scale = study.errors[0] / dts[0] ** 2
    ax.loglog(dts, scale * dts**2, "--", label="slope 2 reference")
    ax.set_xlabel("dt  (= h/2 under coupled refinement)")
    ax.set_ylabel("composite squared error")
    ax.legend()
    ax.grid(True, which="both", alpha=0.4)
    path = os.path.join(run_dir, "convergence.png")
    fig.savefig(path, dpi=110)
    plt.close(fig)
    return path


def _write_text(path: str, content: str) -> None:
    os.makedirs(os.path.dirname(path) or ".", exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="\n") as handle:
        handle.write(content)
