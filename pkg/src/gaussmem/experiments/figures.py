"""CSV emission for run reports and the sigma-versus-curvature table.

Every file starts with ``# key=value`` comment lines carrying the full
parameter set, followed by a header row.  Floats are written as their
shortest round-trip repr, so files are byte-stable and lossless.
"""

from __future__ import annotations

import csv
import io
from collections import Counter
from pathlib import Path

import numpy as np

from ..errors import IoFailure
from ..sigma_solver import Figure1Table

FIG1_NAME = "fig1_sigma_vs_rho2.csv"


def fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, (bool, np.bool_)):
        return str(bool(v))
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return str(v)


def _write(path: Path, meta: dict, header, columns) -> Path:
    buf = io.StringIO()
    for k, v in meta.items():
        buf.write(f"# {k}={fmt(v)}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in zip(*columns):
        w.writerow([fmt(v) for v in row])
    try:
        path.write_text(buf.getvalue())
    except OSError as exc:
        raise IoFailure(f"cannot write {path}: {exc}") from exc
    return path


def read_metadata(path) -> dict:
    """Parse the ``# key=value`` header of a CSV written here."""
    meta = {}
    with open(path) as fh:
        for line in fh:
            if not line.startswith("# "):
                break
            k, _, v = line[2:].rstrip("\n").partition("=")
            meta[k] = v
    return meta


def write_density_csv(path, report) -> Path:
    cols = [report.x, report.density]
    header = ["x", "density"]
    if report.true_density is not None:
        cols.append(report.true_density)
        header.append("true_density")
    meta = dict(report.metadata)
    if report.l1_error is not None:
        meta["l1_error"] = report.l1_error
        meta["linf_error"] = report.linf_error
    return _write(Path(path), meta, header, cols)


def write_epsilon_csv(path, report) -> Path:
    return _write(Path(path), report.metadata, ["center", "sigma", "f_emp", "epsilon"],
                  [report.centers, report.sigmas, report.f_emp, report.epsilon])


def write_fig1_csv(path, table: Figure1Table) -> Path:
    try:
        Path(path).write_text(table.to_csv())
    except OSError as exc:
        raise IoFailure(f"cannot write {path}: {exc}") from exc
    return Path(path)


def _stem(report) -> str:
    m = report.metadata
    return f"N{m['n_samples']}_sigma_{m['sigma_rule'].replace(':', '')}"


def emit_figures(reports, fig1: Figure1Table | None, out_dir) -> list[Path]:
    """Write density/epsilon CSVs for every report, plus the figure-1 table.

    Reports sharing sample size and sigma rule get a ``_seed<k>`` suffix.
    """
    reports = list(reports)
    if not reports:
        raise IoFailure("NoData: no run reports to emit")
    out = Path(out_dir)
    try:
        out.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise IoFailure(f"cannot create {out}: {exc}") from exc
    paths = []
    if fig1 is not None:
        paths.append(write_fig1_csv(out / FIG1_NAME, fig1))
    counts = Counter(_stem(r) for r in reports)
    for r in reports:
        stem = _stem(r)
        if counts[stem] > 1:
            stem += f"_seed{r.metadata['seed']}"
        paths.append(write_density_csv(out / f"fig2_density_{stem}.csv", r))
        paths.append(write_epsilon_csv(out / f"fig2_epsilon_{stem}.csv", r))
    return paths


def write_summary_csv(path, reports, meta: dict) -> Path:
    """One row per run: sample size, rule, seed, l1/linf error and median epsilon."""
    rows = [
        (r.metadata["n_samples"], r.metadata["sigma_rule"], r.metadata["replicate"],
         r.metadata["seed"], r.l1_error, r.linf_error, float(np.median(r.epsilon))
         if r.epsilon.size else None)
        for r in reports
    ]
    header = ["n_samples", "sigma_rule", "replicate", "seed", "l1_error", "linf_error",
              "median_epsilon"]
    return _write(Path(path), meta, header, list(zip(*rows)) if rows else [[]] * 7)
