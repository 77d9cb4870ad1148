"""CSV / JSON serialisation of sweep records and trajectories."""

from __future__ import annotations

import csv
import json
from pathlib import Path

import numpy as np

from .experiments import EfficiencyRecord
from .integrator import TrajectoryRecord

RECORD_COLUMNS = ("sequence", "model", "gamma", "alpha", "n_photons",
                  "p3_final", "trace_err", "min_eig")
TRAJECTORY_COLUMNS = ("t", "rho11", "rho22", "rho33", "p_plus", "p_zero", "p_minus",
                      "trace_err", "min_eig")
FORMATS = ("csv", "json")


def fmt(x: float) -> str:
    """Twelve significant digits."""
    return f"{x:.12g}"


def _row(record: EfficiencyRecord) -> list[str]:
    return [record.sequence, record.model] + [fmt(getattr(record, c)) for c in RECORD_COLUMNS[2:]]


def write_records(records, fmt_name: str, path) -> None:
    """Write sweep records as CSV (header always present) or a JSON array."""
    if fmt_name not in FORMATS:
        raise ValueError(f"unknown format {fmt_name!r}")
    path = Path(path)
    if fmt_name == "csv":
        with path.open("w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(RECORD_COLUMNS)
            for r in records:
                w.writerow(_row(r))
    else:
        rows = []
        for r in records:
            obj = {"sequence": r.sequence, "model": r.model}
            obj.update({c: float(fmt(getattr(r, c))) for c in RECORD_COLUMNS[2:]})
            rows.append(obj)
        path.write_text(json.dumps(rows, indent=1) + "\n")


def read_records(path) -> list[EfficiencyRecord]:
    """Parse a file produced by :func:`write_records` (format from the suffix)."""
    path = Path(path)
    text = path.read_text()
    if text.lstrip().startswith("["):
        rows = json.loads(text)
    else:
        rows = list(csv.DictReader(text.splitlines()))
    out = []
    for row in rows:
        out.append(EfficiencyRecord(row["sequence"], row["model"],
                                    *(float(row[c]) for c in RECORD_COLUMNS[2:])))
    return out


def write_trajectory(record: TrajectoryRecord, fmt_name: str, path, member: int = 0,
                     rho_final: np.ndarray | None = None) -> None:
    """Write the sampled trajectory of one batch member."""
    if fmt_name not in FORMATS:
        raise ValueError(f"unknown format {fmt_name!r}")
    cols = np.column_stack([record.times, record.bare[:, member], record.dressed[:, member],
                            record.trace_error[:, member], record.min_eigenvalue[:, member]])
    path = Path(path)
    if fmt_name == "csv":
        with path.open("w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(TRAJECTORY_COLUMNS)
            for row in cols:
                w.writerow([fmt(x) for x in row])
    else:
        obj = {c: [float(fmt(x)) for x in cols[:, i]] for i, c in enumerate(TRAJECTORY_COLUMNS)}
        if rho_final is not None:
            obj["rho_final_real"] = [[float(fmt(x)) for x in row] for row in np.real(rho_final)]
            obj["rho_final_imag"] = [[float(fmt(x)) for x in row] for row in np.imag(rho_final)]
        path.write_text(json.dumps(obj, indent=1) + "\n")


def gnuplot_script(data_path, kind: str, fmt_name: str = "csv") -> str:
    """A plain gnuplot script plotting the CSV written to ``data_path``."""
    data = Path(data_path).name
    lines = ["set datafile separator ','", "set key autotitle columnhead",
             f"set output '{Path(data).stem}.png'", "set terminal pngcairo size 800,600"]
    if kind == "trajectory":
        lines += ["set xlabel 't / T'", "set ylabel 'population'",
                  f"plot '{data}' using 1:2 with lines, '' using 1:3 with lines, "
                  "'' using 1:4 with lines"]
    elif kind == "sweep-gamma-alpha":
        lines += ["set logscale x", "set xlabel 'Gamma T'", "set ylabel 'alpha'",
                  "set zlabel 'P3'",
                  f"splot '{data}' using 3:4:6 with points pt 7 ps 0.5"]
    elif kind == "sweep-gamma-n":
        lines += ["set logscale x", "set logscale y", "set xlabel 'Gamma T'",
                  "set ylabel 'N'", "set zlabel 'P3'",
                  f"splot '{data}' using 3:($5 > 0 ? $5 : 1e-3):6 with points pt 7 ps 0.5"]
    else:
        lines += ["set logscale x", "set xlabel 'Gamma T'", "set ylabel 'P3'",
                  f"plot '{data}' using 3:(strcol(2) eq 'microscopic' ? $6 : 1/0) "
                  "with linespoints title 'microscopic', "
                  f"'' using 3:(strcol(2) eq 'phenomenological' ? $6 : 1/0) "
                  "with linespoints title 'phenomenological'"]
    if fmt_name != "csv":
        lines.insert(0, "# data file is JSON; convert to CSV before plotting")
    return "\n".join(lines) + "\n"
