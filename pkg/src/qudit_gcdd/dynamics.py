"""Second-order memory-kernel master equation for a driven qutrit.

In the doubly rotated picture ``rho~ = U_G^dagger U_c^dagger rho U_c U_G``
the reduced state obeys

    d rho~/dt = -sum_s int_0^t { [rho~ L_s^dagger(t'), L_s(t)] G1(t - t')
                               - [L_s(t') rho~, L_s^dagger(t)] G1*(t - t')
                               + [rho~ L_s(t'), L_s^dagger(t)] G2(t - t')
                               - [L_s^dagger(t') rho~, L_s(t)] G2*(t - t') } dt'

with ``L_s(t) = U_G^dagger U_c^dagger Lambda_s U_c U_G``.  Since ``rho~(t)``
sits outside the memory integral, the right-hand side collapses to

    d rho~/dt = -(A + A^dagger),  A = sum_s [rho~ M1_s(t), L_s(t)] + [rho~ M2_s(t), L_s^dagger(t)],

where ``M1_s(t) = int L_s^dagger(t') G1(t - t') dt'`` and
``M2_s(t) = int L_s(t') G2(t - t') dt'`` depend on time only.  They are
precomputed on the grid by trapezoidal convolution, after which each step is a
handful of 3x3 products.  Time stepping is Heun's predictor-corrector.
"""

import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np
from scipy.signal import fftconvolve

from .baths import BathConfig, CouplingOperators, correlation_g1, correlation_g2
from .errors import ConfigError, DomainError, IntegrationError
from .gates import NamedGate
from .gcdd import QuditFrame, build_frame, check_integrality, control_unitaries
from .linalg import dagger, fidelity

log = logging.getLogger(__name__)

SAMPLES_PER_PERIOD = 20
TRACE_TOL = 1e-4
WINDOW_MASS_TOL = 1e-5


@dataclass(frozen=True)
class SimulationGrid:
    """Uniform grid on ``[0, tau]``; ``memory_window=None`` keeps the full history."""

    n_steps: int = 2000
    tau: float = 1.0
    memory_window: float = None

    def __post_init__(self):
        if int(self.n_steps) != self.n_steps or self.n_steps < 100:
            raise ConfigError(f"must be an integer >= 100, got {self.n_steps}",
                              field="grid.n_steps")
        if not self.tau > 0:
            raise ConfigError(f"must be positive, got {self.tau}", field="gate.tau")
        if self.memory_window is not None and not self.memory_window > 0:
            raise ConfigError(f"must be positive or 'full', got {self.memory_window}",
                              field="grid.memory_window")

    @property
    def dt(self):
        return self.tau / self.n_steps

    @property
    def times(self):
        return np.linspace(0.0, self.tau, self.n_steps + 1)


def max_control_frequency(frame):
    return (frame.d - 1) * (frame.d + 1) * frame.omega0


def required_steps(frame, tau):
    """Smallest ``n_steps`` resolving the fastest control oscillation."""
    dt_max = 2 * math.pi / max_control_frequency(frame) / SAMPLES_PER_PERIOD
    return max(100, int(math.ceil(tau / dt_max * (1 - 1e-12))))


def check_resolution(frame, grid):
    if frame is None:
        return
    need = required_steps(frame, grid.tau)
    if grid.n_steps < need:
        raise ConfigError(
            f"dt={grid.dt:.4g} does not resolve the control frequency "
            f"{max_control_frequency(frame):.4g}; need n_steps >= {need}",
            field="grid.n_steps")


@dataclass(frozen=True)
class Scenario:
    gate: NamedGate
    bath: BathConfig
    couplings: CouplingOperators
    initial_state: np.ndarray
    frame: QuditFrame = None
    protected: bool = True

    def __post_init__(self):
        psi = np.asarray(self.initial_state, dtype=complex)
        if psi.shape != (self.gate.d,):
            raise DomainError(
                f"initial state has shape {psi.shape}, expected ({self.gate.d},)")
        object.__setattr__(self, "initial_state", psi / np.linalg.norm(psi))
        if self.protected and self.frame is None:
            raise DomainError("a protected scenario needs a decoupling frame")
        if self.frame is not None and self.frame.d != self.gate.d:
            raise DomainError("frame and gate dimensions differ")
        for L in self.couplings.as_list():
            if L.shape != (self.gate.d, self.gate.d):
                raise DomainError("coupling operator dimension mismatch")

    @property
    def label(self):
        if not self.protected:
            return "unprotected"
        n = self.frame.omega0 * self.bath.tau_c / (2 * math.pi)
        return f"n={n:g}"


@dataclass
class Trajectory:
    times: np.ndarray
    rho_tilde: np.ndarray          # shape (n_times, d, d)
    fidelity: np.ndarray
    label: str = ""
    min_eigenvalue: float = field(default=1.0)

    @property
    def gate_fidelity(self):
        return float(self.fidelity[-1])

    def trace_defect(self):
        return float(np.max(np.abs(np.trace(self.rho_tilde, axis1=1, axis2=2) - 1)))

    def hermiticity_defect(self):
        diff = self.rho_tilde - dagger(self.rho_tilde)
        return float(np.max(np.linalg.norm(diff, axis=(1, 2))))


def frame_unitaries(scn, times):
    """``U_c(t) U_G(t)`` sampled on ``times``; ``U_c = I`` when unprotected."""
    w, V = np.linalg.eigh(scn.gate.HG)
    phases = np.exp(-1j * np.multiply.outer(np.asarray(times, float), w))
    UG = np.einsum("ij,tj,kj->tik", V, phases, V.conj())
    if not scn.protected:
        return UG
    return control_unitaries(scn.frame, times) @ UG


def rotate_coupling(scn, t, L):
    """``U_G^dagger(t) U_c^dagger(t) L U_c(t) U_G(t)``."""
    if not 0 <= t <= scn.gate.tau * (1 + 1e-12):
        raise DomainError(f"t={t} outside [0, tau]")
    U = frame_unitaries(scn, [t])[0]
    return dagger(U) @ np.asarray(L, dtype=complex) @ U


def _memory_convolution(kernel, ops, dt):
    """Trapezoid ``int_0^{t_k} kernel(t_k - t') op(t') dt'`` for every node ``k``.

    ``kernel[j]`` is the kernel at lag ``j*dt`` and ``ops[j]`` the operator at
    node ``j``.  The full sum is an FFT convolution; the end-point halves of the
    trapezoid rule are subtracted afterwards.
    """
    n = len(kernel)
    flat = ops.reshape(n, -1)
    full = fftconvolve(kernel[:, None], flat, axes=0)[:n]
    full -= 0.5 * kernel[:, None] * flat[0][None, :]
    full -= 0.5 * kernel[0] * flat
    full[0] = 0.0
    return (dt * full).reshape(ops.shape)


def kernel_tables(bath, grid):
    lags = np.arange(grid.n_steps + 1) * grid.dt
    g1 = correlation_g1(lags, bath)
    g2 = correlation_g2(lags, bath)
    if grid.memory_window is not None:
        cut = lags > grid.memory_window * (1 + 1e-12)
        if np.any(cut):
            total = np.sum(np.abs(g1)) + np.sum(np.abs(g2))
            dropped = np.sum(np.abs(g1[cut])) + np.sum(np.abs(g2[cut]))
            fraction = dropped / total if total > 0 else 0.0
            # thermal kernels decay only like 1/s, so a window of a few tau_c
            # can discard far more than the zero-temperature envelope suggests
            if fraction > WINDOW_MASS_TOL:
                log.warning("memory window %.4g discards %.2e of the kernel mass; "
                            "consider memory_window = full", grid.memory_window,
                            fraction)
        g1[cut] = 0.0
        g2[cut] = 0.0
    return g1, g2


def integrate(scn, grid, kernels=None):
    """Integrate the master equation on ``grid`` and return the trajectory."""
    if abs(grid.tau - scn.gate.tau) > 1e-12 * scn.gate.tau:
        raise ConfigError("grid tau differs from gate tau", field="grid.tau")
    if scn.protected:
        check_resolution(scn.frame, grid)
        check_integrality(scn.frame, grid.tau)
    times = grid.times
    dt = grid.dt
    g1, g2 = kernels if kernels is not None else kernel_tables(scn.bath, grid)

    U = frame_unitaries(scn, times)
    Ud = dagger(U)
    Ls, M1s, M2s = [], [], []
    for Lam in scn.couplings.as_list():
        Lt = Ud @ Lam @ U
        if not np.any(Lam):
            continue
        Ls.append(Lt)
        M1s.append(_memory_convolution(g1, dagger(Lt), dt))
        M2s.append(_memory_convolution(g2, Lt, dt))
    Lds = [dagger(L) for L in Ls]

    def rhs(k, rho):
        A = np.zeros_like(rho)
        for L, Ld, M1, M2 in zip(Ls, Lds, M1s, M2s):
            X = rho @ M1[k]
            Y = rho @ M2[k]
            A += X @ L[k] - L[k] @ X + Y @ Ld[k] - Ld[k] @ Y
        return -(A + A.conj().T)

    psi0 = scn.initial_state
    rho = np.outer(psi0, psi0.conj())
    out = np.empty((len(times),) + rho.shape, dtype=complex)
    out[0] = rho
    f_now = rhs(0, rho)
    for k in range(grid.n_steps):
        pred = rho + dt * f_now
        f_next = rhs(k + 1, pred)
        rho = rho + 0.5 * dt * (f_now + f_next)
        out[k + 1] = rho
        f_now = rhs(k + 1, rho)

    traj = Trajectory(times, out, fidelity_trace_raw(out, psi0), label=scn.label)
    drift = traj.trace_defect()
    if drift > TRACE_TOL:
        raise IntegrationError(f"trace drifted by {drift:.3e}",
                               suggested_n_steps=2 * grid.n_steps)
    traj.min_eigenvalue = float(np.min(np.linalg.eigvalsh(
        0.5 * (out + dagger(out)))))
    if traj.min_eigenvalue < 0:
        log.info("%s: min eigenvalue of rho~ is %.3e", traj.label,
                 traj.min_eigenvalue)
    return traj


def fidelity_trace_raw(rho_tilde, psi0):
    return np.real(np.einsum("i,tij,j->t", psi0.conj(), rho_tilde, psi0))


def fidelity_trace(traj, scn):
    """Fidelity with the ideal noise-free state at every sample.

    The ideal state is constant in the doubly rotated picture, so this is
    ``<psi0| rho~(t) |psi0>``.
    """
    return fidelity_trace_raw(traj.rho_tilde, scn.initial_state)


def lab_fidelity_trace(traj, scn):
    """Same quantity computed in the laboratory frame with the Uhlmann formula."""
    U = frame_unitaries(scn, traj.times)
    out = np.empty(len(traj.times))
    for k, (Uk, rt) in enumerate(zip(U, traj.rho_tilde)):
        rho_lab = Uk @ rt @ dagger(Uk)
        target = Uk @ scn.initial_state
        out[k] = fidelity(rho_lab, np.outer(target, target.conj()), atol=1e-6)
    return out


@dataclass
class SweepResult:
    baseline: Trajectory
    runs: dict                    # n -> Trajectory, in ascending n

    def table(self):
        rows = [(0, self.baseline.gate_fidelity)]
        rows += [(n, tr.gate_fidelity) for n, tr in sorted(self.runs.items())]
        return rows


def scenario_for_n(base, n, tau_c=None):
    """Protected copy of ``base`` with ``omega0 = 2 pi n / tau_c``."""
    if not n >= 1:
        raise ConfigError(f"n values must be >= 1, got {n}", field="sweep.n_values")
    tau_c = base.bath.tau_c if tau_c is None else tau_c
    frame = build_frame(base.gate.d, 2 * math.pi * n / tau_c)
    check_integrality(frame, base.gate.tau)
    return replace(base, frame=frame, protected=True)


def _run(args):
    scn, grid, kernels = args
    return integrate(scn, grid, kernels)


def sweep_gate_fidelity(scn_base, n_values, grid, jobs=1):
    """One unprotected baseline plus one protected run per ``n``.

    Runs are independent and may be spread over ``jobs`` worker processes;
    results are collected in input order, so the outcome does not depend on
    scheduling.
    """
    ns = sorted(set(n_values))
    scenarios = [replace(scn_base, protected=False, frame=None)]
    scenarios += [scenario_for_n(scn_base, n) for n in ns]
    for s in scenarios[1:]:
        check_resolution(s.frame, grid)
    kernels = kernel_tables(scn_base.bath, grid)
    work = [(s, grid, kernels) for s in scenarios]
    if jobs > 1 and len(work) > 1:
        with ProcessPoolExecutor(max_workers=min(jobs, len(work))) as pool:
            trajs = list(pool.map(_run, work))
    else:
        trajs = [_run(w) for w in work]
    return SweepResult(trajs[0], dict(zip(ns, trajs[1:])))
