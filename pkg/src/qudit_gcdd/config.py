"""Run configuration: INI-style file format, the ``fig2`` preset, validation.

Grammar (``configparser`` INI; ``#`` starts a comment, ``;`` only at the
start of a line)::

    [run]
    mode = sweep            # check-decoupling | run | sweep | export-schedule | feasibility
    d = 3
    seed = 12345
    output_dir = out
    n = 4                   # control frequency index for mode "run"
    protected = true        # mode "run" only

    [gate]
    name = hadamard         # or any other name together with "matrix"
    tau = 1.0
    matrix = 0, 1 ; 1, 0    # rows separated by ';', entries by ','; complex as 1+2j

    [bath]
    alpha = 0.1
    lambda_damp_m1 = 1.0
    lambda_damp_p1 = 1.0
    lambda_deph_m1 = 1.0
    lambda_deph_p1 = 1.0
    tau_c = 0.25            # or omega_c
    beta_omega_c = 1.0      # or beta

    [grid]
    n_steps = 10240
    memory_window = 2.0     # in units of tau, or "full"; default 8 tau_c

    [sweep]
    n_values = 2, 4, 16

    [schedule]
    detunings_ghz = 1.0, 1.5, 2.2
    physical_t0 = 0.1       # seconds per control period
    periods = 1             # tau / t0
    samples_per_period = 200

    [check]
    dims = 2, 3, 4, 5
    n_random = 20
    n_quad = 2048

Every section except ``[gate]`` falls back to defaults.
"""

import configparser
import math
from dataclasses import dataclass, field, replace

import numpy as np

from .baths import BathConfig
from .errors import ConfigError, GCDDError
from .gates import GATES, NamedGate, custom_gate
from .gcdd import build_frame, check_integrality
from .dynamics import SimulationGrid, required_steps

MODES = ("check-decoupling", "run", "sweep", "export-schedule", "feasibility")

KEYS = {
    "run": {"mode", "d", "seed", "output_dir", "n", "protected"},
    "gate": {"name", "tau", "matrix"},
    "bath": {"alpha", "lambda_damp_m1", "lambda_damp_p1", "lambda_deph_m1",
             "lambda_deph_p1", "tau_c", "omega_c", "beta_omega_c", "beta"},
    "grid": {"n_steps", "memory_window"},
    "sweep": {"n_values"},
    "schedule": {"detunings_ghz", "physical_t0", "periods", "samples_per_period"},
    "check": {"dims", "n_random", "n_quad"},
}

FIG2_PRESET = """
[run]
mode = sweep
d = 3
seed = 12345
output_dir = fig2

[gate]
name = hadamard
tau = 1.0

[bath]
alpha = 0.1
lambda_damp_m1 = 1.0
lambda_damp_p1 = 1.0
lambda_deph_m1 = 1.0
lambda_deph_p1 = 1.0
tau_c = 0.25
beta_omega_c = 1.0

[grid]
n_steps = 10240

[sweep]
n_values = 2, 4, 16
"""

PRESETS = {"fig2": FIG2_PRESET}


@dataclass(frozen=True)
class ScheduleConfig:
    detunings_ghz: tuple = (1.0, 1.5, 2.2)
    physical_t0: float = 0.1
    periods: int = 1
    samples_per_period: int = 200


@dataclass(frozen=True)
class CheckConfig:
    dims: tuple = (2, 3, 4, 5)
    n_random: int = 20
    n_quad: int = 2048


@dataclass(frozen=True)
class RunConfig:
    mode: str
    d: int
    gate: NamedGate
    bath: BathConfig
    grid: SimulationGrid
    n_values: tuple
    output_dir: str
    seed: int
    run_n: float = 4
    protected: bool = True
    schedule: ScheduleConfig = field(default_factory=ScheduleConfig)
    check: CheckConfig = field(default_factory=CheckConfig)
    source: str = ""

    def with_overrides(self, mode=None, output_dir=None, seed=None):
        changes = {}
        if mode is not None:
            changes["mode"] = mode
        if output_dir is not None:
            changes["output_dir"] = output_dir
        if seed is not None:
            changes["seed"] = seed
        cfg = replace(self, **changes)
        validate(cfg)
        return cfg


def _parser():
    return configparser.ConfigParser(
        inline_comment_prefixes=("#",), interpolation=None)


def read_text(text, parser=None, source="<string>"):
    parser = parser or _parser()
    try:
        parser.read_string(text, source=source)
    except configparser.ParsingError as exc:
        line = exc.errors[0][0] if exc.errors else None
        raise ConfigError(f"cannot parse {source}", line=line)
    except (configparser.DuplicateOptionError,
            configparser.DuplicateSectionError) as exc:
        raise ConfigError(str(exc.message if hasattr(exc, "message") else exc),
                          line=getattr(exc, "lineno", None))
    except configparser.MissingSectionHeaderError as exc:
        raise ConfigError("missing section header", line=exc.lineno)
    return parser


def _get(parser, section, key, conv, default=None, required=False):
    path = f"{section}.{key}"
    if not parser.has_option(section, key):
        if required:
            raise ConfigError("is required", field=path)
        return default
    raw = parser.get(section, key).strip()
    try:
        return conv(raw)
    except (ValueError, TypeError) as exc:
        raise ConfigError(f"invalid value {raw!r} ({exc})", field=path)


def _floats(raw):
    return tuple(float(x) for x in raw.replace(";", ",").split(",") if x.strip())


def _numbers(raw):
    out = []
    for x in raw.split(","):
        x = x.strip()
        if not x:
            continue
        v = float(x)
        out.append(int(v) if v == int(v) else v)
    return tuple(out)


def _ints(raw):
    vals = _numbers(raw)
    if any(not isinstance(v, int) for v in vals):
        raise ValueError("expected integers")
    return vals


def _bool(raw):
    low = raw.lower()
    if low in ("1", "true", "yes", "on"):
        return True
    if low in ("0", "false", "no", "off"):
        return False
    raise ValueError("expected a boolean")


def _matrix(raw):
    rows = [r for r in raw.split(";") if r.strip()]
    M = np.array([[complex(x.strip().replace(" ", "")) for x in r.split(",")]
                  for r in rows])
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise ValueError("matrix must be square")
    return M


def _window(raw):
    return None if raw.lower() == "full" else float(raw)


def build(parser, source=""):
    """Turn a parsed INI document into a validated :class:`RunConfig`."""
    for section in parser.sections():
        if section not in KEYS:
            raise ConfigError("unknown section", field=section)
        unknown = set(parser.options(section)) - KEYS[section]
        if unknown:
            raise ConfigError("unknown key", field=f"{section}.{sorted(unknown)[0]}")
    if not parser.has_section("gate"):
        raise ConfigError("section is missing", field="gate")

    mode = _get(parser, "run", "mode", str, "sweep")
    d = _get(parser, "run", "d", int, 3)
    seed = _get(parser, "run", "seed", int, 0)
    output_dir = _get(parser, "run", "output_dir", str, "out")
    run_n = _get(parser, "run", "n", float, 4.0)
    protected = _get(parser, "run", "protected", _bool, True)

    tau = _get(parser, "gate", "tau", float, 1.0)
    name = _get(parser, "gate", "name", str, required=True)
    matrix = _get(parser, "gate", "matrix", _matrix)
    try:
        if matrix is not None:
            gate = custom_gate(name, matrix, tau)
        elif name in GATES:
            gate = GATES[name](tau)
        else:
            raise ConfigError(f"unknown gate {name!r} and no matrix given",
                              field="gate.name")
    except GCDDError as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(str(exc), field="gate")

    if parser.has_option("bath", "tau_c") and parser.has_option("bath", "omega_c"):
        raise ConfigError("give tau_c or omega_c, not both", field="bath.omega_c")
    if parser.has_option("bath", "beta") and parser.has_option("bath", "beta_omega_c"):
        raise ConfigError("give beta or beta_omega_c, not both", field="bath.beta")
    tau_c = _get(parser, "bath", "tau_c", float, tau / 4)
    omega_c = _get(parser, "bath", "omega_c", float, 2 * math.pi / tau_c)
    beta = _get(parser, "bath", "beta", float,
                _get(parser, "bath", "beta_omega_c", float, 1.0) / omega_c)
    try:
        bath = BathConfig(
            lambda_damp_m1=_get(parser, "bath", "lambda_damp_m1", float, 1.0),
            lambda_damp_p1=_get(parser, "bath", "lambda_damp_p1", float, 1.0),
            lambda_deph_m1=_get(parser, "bath", "lambda_deph_m1", float, 1.0),
            lambda_deph_p1=_get(parser, "bath", "lambda_deph_p1", float, 1.0),
            alpha=_get(parser, "bath", "alpha", float, 0.1),
            omega_c=omega_c, beta=beta)
    except GCDDError as exc:
        raise ConfigError(str(exc), field="bath")

    n_steps = _get(parser, "grid", "n_steps", int, 10240)
    window = _get(parser, "grid", "memory_window", _window, 8 * bath.tau_c)
    grid = SimulationGrid(n_steps=n_steps, tau=tau, memory_window=window)

    n_values = _get(parser, "sweep", "n_values", _numbers, (2, 4, 16))

    schedule = ScheduleConfig(
        detunings_ghz=_get(parser, "schedule", "detunings_ghz", _floats, (1.0, 1.5, 2.2)),
        physical_t0=_get(parser, "schedule", "physical_t0", float, 0.1),
        periods=_get(parser, "schedule", "periods", int, 1),
        samples_per_period=_get(parser, "schedule", "samples_per_period", int, 200),
    )
    check = CheckConfig(
        dims=_get(parser, "check", "dims", _ints, None) or (d,),
        n_random=_get(parser, "check", "n_random", int, 20),
        n_quad=_get(parser, "check", "n_quad", int, 2048),
    )
    cfg = RunConfig(mode=mode, d=d, gate=gate, bath=bath, grid=grid,
                    n_values=tuple(n_values), output_dir=output_dir, seed=seed,
                    run_n=run_n, protected=protected, schedule=schedule,
                    check=check, source=source)
    validate(cfg)
    return cfg


def validate(cfg):
    """Re-check every cross-field constraint; raises :class:`ConfigError`."""
    if cfg.mode not in MODES:
        raise ConfigError(f"must be one of {', '.join(MODES)}, got {cfg.mode!r}",
                          field="run.mode")
    if cfg.d < 2:
        raise ConfigError(f"must be >= 2, got {cfg.d}", field="run.d")
    if cfg.gate.d != cfg.d:
        raise ConfigError(f"gate is {cfg.gate.d}-dimensional but d={cfg.d}",
                          field="gate")
    if cfg.mode == "check-decoupling":
        if any(k < 2 for k in cfg.check.dims):
            raise ConfigError("dimensions must be >= 2", field="check.dims")
        if cfg.check.n_quad < 64:
            raise ConfigError("must be >= 64", field="check.n_quad")
        return
    if cfg.d != 3:
        raise ConfigError(
            f"mode {cfg.mode!r} models the atomic qutrit and needs d=3", field="run.d")
    if cfg.mode in ("run", "sweep"):
        ns = cfg.n_values if cfg.mode == "sweep" else (
            (cfg.run_n,) if cfg.protected else ())
        fld = "sweep.n_values" if cfg.mode == "sweep" else "run.n"
        if cfg.mode == "sweep" and not ns:
            raise ConfigError("needs at least one value", field=fld)
        for n in ns:
            if not n >= 1:
                raise ConfigError(f"n values must be >= 1, got {n}", field=fld)
            frame = build_frame(cfg.d, 2 * math.pi * n / cfg.bath.tau_c)
            try:
                check_integrality(frame, cfg.gate.tau)
            except ConfigError as exc:
                raise ConfigError(str(exc), field=fld)
            need = required_steps(frame, cfg.grid.tau)
            if cfg.grid.n_steps < need:
                raise ConfigError(
                    f"{cfg.grid.n_steps} steps cannot resolve n={n}; "
                    f"need n_steps >= {need}", field="grid.n_steps")
    if cfg.mode in ("export-schedule", "feasibility"):
        sc = cfg.schedule
        if sc.periods < 1:
            raise ConfigError("must be >= 1", field="schedule.periods")
        if sc.samples_per_period < 2:
            raise ConfigError("must be >= 2", field="schedule.samples_per_period")
        if not sc.physical_t0 > 0:
            raise ConfigError("must be positive", field="schedule.physical_t0")
        if len(sc.detunings_ghz) != 3 or any(f <= 0 for f in sc.detunings_ghz):
            raise ConfigError("needs three positive magnitudes",
                              field="schedule.detunings_ghz")


def load_config(path=None, preset=None):
    """Load a configuration file, optionally layered on top of a preset."""
    parser = _parser()
    source = ""
    if preset is not None:
        if preset not in PRESETS:
            raise ConfigError(f"unknown preset {preset!r}", field="preset")
        read_text(PRESETS[preset], parser, source=f"preset:{preset}")
        source = PRESETS[preset]
    if path is not None:
        try:
            with open(path) as fh:
                text = fh.read()
        except OSError as exc:
            raise ConfigError(f"cannot read {path}: {exc.strerror}")
        read_text(text, parser, source=str(path))
        source += text
    if preset is None and path is None:
        raise ConfigError("either a config file or a preset is required")
    return build(parser, source)


def dump(cfg):
    """Resolved configuration as INI text (used for the run manifest)."""
    g = cfg.gate
    rows = ";".join(",".join(repr(complex(x)) for x in r) for r in g.HG)
    lines = [
        "[run]",
        f"mode = {cfg.mode}",
        f"d = {cfg.d}",
        f"seed = {cfg.seed}",
        f"n = {cfg.run_n!r}",
        f"protected = {str(cfg.protected).lower()}",
        "",
        "[gate]",
        f"name = {g.name}",
        f"tau = {g.tau!r}",
        f"matrix = {rows}",
        "",
        "[bath]",
        f"alpha = {cfg.bath.alpha!r}",
        f"lambda_damp_m1 = {cfg.bath.lambda_damp_m1!r}",
        f"lambda_damp_p1 = {cfg.bath.lambda_damp_p1!r}",
        f"lambda_deph_m1 = {cfg.bath.lambda_deph_m1!r}",
        f"lambda_deph_p1 = {cfg.bath.lambda_deph_p1!r}",
        f"omega_c = {cfg.bath.omega_c!r}",
        f"beta = {cfg.bath.beta!r}",
        "",
        "[grid]",
        f"n_steps = {cfg.grid.n_steps}",
        "memory_window = " + ("full" if cfg.grid.memory_window is None
                              else repr(cfg.grid.memory_window)),
        "",
        "[sweep]",
        "n_values = " + ", ".join(repr(n) for n in cfg.n_values),
        "",
        "[schedule]",
        "detunings_ghz = " + ", ".join(repr(f) for f in cfg.schedule.detunings_ghz),
        f"physical_t0 = {cfg.schedule.physical_t0!r}",
        f"periods = {cfg.schedule.periods}",
        f"samples_per_period = {cfg.schedule.samples_per_period}",
        "",
        "[check]",
        "dims = " + ", ".join(str(k) for k in cfg.check.dims),
        f"n_random = {cfg.check.n_random}",
        f"n_quad = {cfg.check.n_quad}",
    ]
    return "\n".join(lines) + "\n"
