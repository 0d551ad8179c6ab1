"""CSV serialization of trajectories, run manifests, and curve comparison.

The CSV layout is one row per sample: time, the upper triangle of the
density matrix split into real and imaginary parts, purity, energy
(blank when the method does not track a conserved functional), and the
block-trace residual.  Floats are written with 17 significant digits so
that a round trip through text is lossless and repeated runs are
byte-comparable.
"""

import csv
import json
from datetime import datetime, timezone

import numpy as np

from . import __version__
from .runner import Trajectory

__all__ = [
    "csv_header",
    "write_trajectory_csv",
    "write_manifest",
    "read_trajectory_csv",
    "compare_columns",
    "write_gnuplot_script",
]

_FMT = "%.17g"


def csv_header(n_sites: int) -> list:
    cols = ["t"]
    for m in range(n_sites):
        for n in range(m, n_sites):
            cols.append("rho_%d_%d_re" % (m, n))
            cols.append("rho_%d_%d_im" % (m, n))
    cols += ["purity", "energy", "trace_residual"]
    return cols


def write_trajectory_csv(path, traj: Trajectory) -> None:
    """Write one trajectory to CSV; partial trajectories are written as-is."""
    n = traj.scenario.n_sites
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(csv_header(n))
        for rec in traj.samples:
            row = [_FMT % rec.time]
            for m in range(n):
                for k in range(m, n):
                    row.append(_FMT % rec.rho[m, k].real)
                    row.append(_FMT % rec.rho[m, k].imag)
            row.append(_FMT % rec.purity)
            row.append("" if rec.energy is None else _FMT % rec.energy)
            row.append(_FMT % rec.trace_residual)
            writer.writerow(row)


def write_manifest(path, traj: Trajectory, output_path, deterministic: bool = False,
                   config_path=None) -> None:
    """JSON sidecar describing how the CSV next to it was produced."""
    cfg = traj.scenario.integrator
    doc = {
        "scenario": traj.scenario.name,
        "config_path": None if config_path is None else str(config_path),
        "method": traj.method,
        "integrator": {
            "dt": cfg.dt,
            "t_max": cfg.t_max,
            "sample_stride": cfg.sample_stride,
            "adaptive": cfg.adaptive,
            "tol": cfg.tol,
        },
        "output": str(output_path),
        "status": traj.status,
        "n_samples": len(traj.samples),
        "wall_time_s": traj.wall_time,
        "deterministic": deterministic,
        "version": __version__,
        "created": datetime.now(timezone.utc).isoformat(),
    }
    with open(path, "w") as fh:
        json.dump(doc, fh, indent=2)
        fh.write("\n")


def read_trajectory_csv(path) -> dict:
    """Read a trajectory CSV into a dict of column name -> float array.

    Blank cells (untracked energy) become NaN.
    """
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        rows = [r for r in reader if r]
    out = {}
    for j, name in enumerate(header):
        out[name] = np.array(
            [float(r[j]) if r[j] != "" else np.nan for r in rows]
        )
    return out


def compare_columns(a: dict, b: dict, column: str, metric: str = "rms",
                    interpolate: bool = False) -> float:
    """Difference between one column of two trajectory tables.

    The tables must share the time grid unless ``interpolate`` is set, in
    which case the second is linearly interpolated onto the overlap of
    the two grids.
    """
    for tab, name in ((a, "first"), (b, "second")):
        if column not in tab:
            raise KeyError("column %r not present in %s file" % (column, name))
    ta, tb = a["t"], b["t"]
    va, vb = a[column], b[column]
    if ta.shape == tb.shape and np.allclose(ta, tb, rtol=0.0, atol=1e-12):
        da, db = va, vb
    elif interpolate:
        lo = max(ta[0], tb[0])
        hi = min(ta[-1], tb[-1])
        if not hi > lo:
            raise ValueError("time grids do not overlap")
        sel = (ta >= lo) & (ta <= hi)
        da = va[sel]
        db = np.interp(ta[sel], tb, vb)
    else:
        raise ValueError(
            "time grids differ; pass interpolate=True to compare anyway"
        )
    diff = da - db
    if metric == "rms":
        return float(np.sqrt(np.mean(diff**2)))
    if metric == "max":
        return float(np.max(np.abs(diff)))
    raise ValueError("unknown metric %r (use 'rms' or 'max')" % (metric,))


def write_gnuplot_script(path, csv_path, n_sites: int) -> None:
    """Emit a gnuplot script plotting the site populations of one CSV."""
    lines = [
        "set datafile separator ','",
        "set key autotitle columnhead",
        "set xlabel 't'",
        "set ylabel 'population'",
        "plot \\",
    ]
    header = csv_header(n_sites)
    terms = []
    for m in range(n_sites):
        col = header.index("rho_%d_%d_re" % (m, m)) + 1
        terms.append("  '%s' using 1:%d with lines title 'site %d'" % (csv_path, col, m))
    lines.append(", \\\n".join(terms))
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")
