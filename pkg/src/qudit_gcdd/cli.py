"""Command-line front end.

Examples::

    qudit-gcdd --preset fig2 --out fig2            # Fig. 2 style sweep
    qudit-gcdd --preset fig2 --mode check-decoupling --seed 7
    qudit-gcdd --config run.ini --mode export-schedule
"""

import argparse
import logging
import math
import os
import sys
from pathlib import Path

import numpy as np

from . import report
from .baths import coupling_operators
from .config import MODES, dump, load_config
from .dynamics import Scenario, integrate, scenario_for_n, sweep_gate_fidelity
from .errors import GCDDError
from .gcdd import build_frame, check_decoupling_identity, gate_spec
from .rb87 import DetuningSet, feasibility_report, schedule_from_frame

log = logging.getLogger("qudit_gcdd")

DECOUPLING_TOL = 1e-8


class Outputs:
    """Tracks written files so a failed run can remove its partial output."""

    def __init__(self, directory):
        self.dir = Path(directory)
        self.written = []

    def path(self, name):
        self.dir.mkdir(parents=True, exist_ok=True)
        p = self.dir / name
        self.written.append(p)
        return p

    def discard(self):
        for p in self.written:
            if p.exists():
                p.unlink()


def base_scenario(cfg):
    psi0 = np.zeros(cfg.d, dtype=complex)
    psi0[1] = 1.0                     # |0> in the |-1>, |0>, |1> ordering
    return Scenario(gate=cfg.gate, bath=cfg.bath,
                    couplings=coupling_operators(cfg.bath),
                    initial_state=psi0, protected=False)


def random_operators(rng, d, count):
    """Alternating Hermitian and general complex matrices."""
    out = []
    for i in range(count):
        A = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
        out.append(A + A.conj().T if i % 2 == 0 else A)
    return out


def run_check(cfg, stream):
    rng = np.random.default_rng(cfg.seed)
    worst = 0.0
    for d in cfg.check.dims:
        frame = build_frame(d, 2 * math.pi)
        devs = [check_decoupling_identity(frame, A, cfg.check.n_quad)
                for A in random_operators(rng, d, cfg.check.n_random)]
        print(f"d={d}: max deviation {max(devs):.3e} over {len(devs)} operators",
              file=stream)
        worst = max(worst, max(devs))
    print(f"max deviation {worst:.3e}", file=stream)
    return 0 if worst <= DECOUPLING_TOL else 1


def _write_fidelity_outputs(out, columns, table):
    from .plotting import plot_fidelity

    report.write_fidelity_csv(out.path("fidelity.csv"), columns)
    report.write_gate_fidelity_csv(out.path("gate_fidelity.csv"), table)
    report.write_gnuplot(out.path("fig2.gp"), columns)
    plot_fidelity(columns, table, out.path("fig2.png"))


def run_sweep(cfg, out, jobs, stream):
    result = sweep_gate_fidelity(base_scenario(cfg), cfg.n_values, cfg.grid, jobs=jobs)
    table = result.table()
    _write_fidelity_outputs(out, report.fidelity_columns(result), table)
    for n, f in table:
        label = "unprotected" if n == 0 else f"n={n:g}"
        print(f"{label:>12s}  gate fidelity {f:.6f}", file=stream)
    return 0


def run_single(cfg, out, stream):
    scn = base_scenario(cfg)
    if cfg.protected:
        scn = scenario_for_n(scn, cfg.run_n)
    traj = integrate(scn, cfg.grid)
    n = cfg.run_n if cfg.protected else 0
    columns = {scn.label: (traj.times, traj.fidelity)}
    _write_fidelity_outputs(out, columns, [(n, traj.gate_fidelity)])
    print(f"{scn.label}: gate fidelity {traj.gate_fidelity:.6f}", file=stream)
    return 0


def build_schedule(cfg):
    sc = cfg.schedule
    tau = cfg.gate.tau
    frame = build_frame(cfg.d, 2 * math.pi * sc.periods / tau)
    spec = gate_spec(frame, cfg.gate)
    n = sc.periods * sc.samples_per_period
    times = np.linspace(0.0, tau, n + 1)
    # one schedule time unit (tau) lasts periods * physical_t0 seconds
    delta = DetuningSet.from_ghz(sc.detunings_ghz, sc.periods * sc.physical_t0 / tau)
    schedule = schedule_from_frame(frame, spec, times, delta)
    return schedule, feasibility_report(schedule, sc.physical_t0)


def run_export(cfg, out, stream):
    from .plotting import plot_schedule

    schedule, rep = build_schedule(cfg)
    report.write_schedule_csv(out.path("schedule.csv"), schedule, rep)
    plot_schedule(schedule, out.path("schedule.png"))
    print(f"wrote {len(schedule.times)} samples, eta = {rep.eta:.6e}", file=stream)
    return 0


def run_feasibility(cfg, stream):
    _, rep = build_schedule(cfg)
    for line in rep.lines():
        print(line, file=stream)
    return 0


def run(cfg, jobs=1, stream=None):
    """Execute a validated configuration; returns the process exit code."""
    stream = stream or sys.stdout
    if cfg.mode == "check-decoupling":
        return run_check(cfg, stream)
    if cfg.mode == "feasibility":
        return run_feasibility(cfg, stream)
    out = Outputs(cfg.output_dir)
    try:
        if cfg.mode == "sweep":
            code = run_sweep(cfg, out, jobs, stream)
        elif cfg.mode == "run":
            code = run_single(cfg, out, stream)
        else:
            code = run_export(cfg, out, stream)
        out.path("manifest.txt").write_text(dump(cfg))
    except BaseException:
        out.discard()
        raise
    return code


def make_parser():
    p = argparse.ArgumentParser(
        prog="qudit-gcdd",
        description="Continuous dynamical decoupling of qudit gates: "
                    "decoupling checks, noisy-gate sweeps, Rabi schedules.")
    p.add_argument("--config", help="INI configuration file")
    p.add_argument("--preset", choices=["fig2"], help="built-in configuration")
    p.add_argument("--mode", choices=MODES, help="override run.mode")
    p.add_argument("--jobs", type=int, default=os.cpu_count() or 1,
                   help="worker processes for sweeps (default: all cores)")
    p.add_argument("--out", help="override run.output_dir")
    p.add_argument("--seed", type=int, help="override run.seed")
    p.add_argument("-v", "--verbose", action="store_true")
    return p


def main(argv=None):
    args = make_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    if args.config is None and args.preset is None:
        print("error: give --config and/or --preset", file=sys.stderr)
        return 2
    try:
        cfg = load_config(args.config, args.preset)
        cfg = cfg.with_overrides(mode=args.mode, output_dir=args.out, seed=args.seed)
        return run(cfg, jobs=max(1, args.jobs))
    except GCDDError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
