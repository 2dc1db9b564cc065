"""Delimited-text outputs and the gnuplot script that redraws them.

Numbers are written with 12 significant digits in scientific notation so
that identical runs give byte-identical files.

File schemas
------------
fidelity.csv
    ``t/tau`` followed by one column per run: ``unprotected`` and ``n=<n>``.
gate_fidelity.csv
    ``n,fidelity``; the row with ``n = 0`` is the unprotected run.
schedule.csv
    ``#``-prefixed JSON header line with detunings and eta, then ``t/tau``
    and ``Re_Omega_<s>_<q>``, ``Im_Omega_<s>_<q>`` for s = 1..3, q = +1, 0, -1.
"""

import json

import numpy as np

from .rb87 import POLARIZATIONS

FMT = "{:.11e}"


def fmt(x):
    return FMT.format(float(x))


def _n_label(n):
    return f"{n:g}"


def fidelity_columns(result):
    """Ordered ``label -> (times, fidelity)`` mapping for a sweep result."""
    cols = {"unprotected": (result.baseline.times, result.baseline.fidelity)}
    for n, tr in sorted(result.runs.items()):
        cols[f"n={_n_label(n)}"] = (tr.times, tr.fidelity)
    return cols


def write_fidelity_csv(path, columns):
    labels = list(columns)
    times = columns[labels[0]][0]
    with open(path, "w", newline="\n") as fh:
        fh.write(",".join(["t/tau"] + labels) + "\n")
        data = [columns[lab][1] for lab in labels]
        tau = times[-1]
        for k, t in enumerate(times):
            fh.write(",".join([fmt(t / tau)] + [fmt(col[k]) for col in data]) + "\n")


def write_gate_fidelity_csv(path, table):
    with open(path, "w", newline="\n") as fh:
        fh.write("n,fidelity\n")
        for n, f in table:
            fh.write(f"{_n_label(n)},{fmt(f)}\n")


def schedule_header(schedule, report=None):
    header = {
        "Delta": [float(x) for x in schedule.Delta.Delta],
        "t0": float(schedule.t0),
        "time_unit": "tau",
    }
    if report is not None:
        header["eta"] = float(report.eta)
        header["max_rabi_hz"] = float(report.max_rabi_hz)
    return header


def schedule_columns():
    cols = ["t/tau"]
    for s in (1, 2, 3):
        for q in POLARIZATIONS:
            tag = f"{q:+d}" if q else "0"
            cols += [f"Re_Omega_{s}_{tag}", f"Im_Omega_{s}_{tag}"]
    return cols


def write_schedule_csv(path, schedule, report=None):
    header = schedule_header(schedule, report)
    tau = schedule.times[-1] if schedule.times[-1] > 0 else 1.0
    with open(path, "w", newline="\n") as fh:
        fh.write("# " + json.dumps(header, sort_keys=True) + "\n")
        fh.write(",".join(schedule_columns()) + "\n")
        for k, t in enumerate(schedule.times):
            vals = [t / tau]
            for s in range(3):
                for c in range(3):
                    z = schedule.Omega[k, s, c]
                    vals += [z.real, z.imag]
            fh.write(",".join(fmt(v) for v in vals) + "\n")


def read_schedule_csv(path):
    """Parse a schedule file back into ``(header, column names, data array)``."""
    with open(path) as fh:
        first = fh.readline()
        names = fh.readline().strip().split(",")
        data = np.loadtxt(fh, delimiter=",", ndmin=2)
    return json.loads(first[1:]), names, data


GNUPLOT_TEMPLATE = """\
# Fidelity versus t/tau with gate fidelity versus n as an inset.
# Usage: gnuplot {script}
set terminal pngcairo size 900,600 enhanced font ',11'
set output '{image}'
set datafile separator ','
set key left bottom
set multiplot
set xlabel 't/{{/Symbol t}}'
set ylabel 'Fidelity'
set xrange [0:1]
set yrange [*:1.02]
plot {main}
set origin 0.55,0.35
set size 0.4,0.45
set xlabel 'n' font ',9'
set ylabel 'gate fidelity' font ',9'
unset key
set xrange [*:*]
set yrange [*:*]
plot '{table}' skip 1 using 1:($1 > 0 ? $2 : NaN) with linespoints pt 7 ps 0.6 lc black
unset multiplot
"""

DASHTYPES = [1, 3, 4, 2, 5]


def write_gnuplot(path, columns, data_file="fidelity.csv",
                  table_file="gate_fidelity.csv", image="fig2_gnuplot.png"):
    parts = []
    for i, label in enumerate(columns):
        dt = DASHTYPES[i % len(DASHTYPES)]
        parts.append(f"'{data_file}' skip 1 using 1:{i + 2} with lines dt {dt} "
                     f"lc black title '{label}'")
    text = GNUPLOT_TEMPLATE.format(
        script=path.name, image=image, table=table_file,
        main=", \\\n     ".join(parts))
    path.write_text(text)
