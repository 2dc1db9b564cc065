"""Continuous dynamical-decoupling frame for a d-level system.

The control unitary is

    U_c(t) = exp(-i w_r t) exp(-i H_L t) exp(-i H_F t)

with ``H_L = diag(0, 1, ..., d-1) * d * w0`` in the logical basis and ``H_F``
carrying eigenvalues ``n * w0`` on the discrete-Fourier basis.  Averaged over
one period ``t0 = 2 pi / w0`` it maps any operator ``A`` to ``Tr(A) I / d``,
so every traceless system-bath coupling is averaged away.

Units: hbar = 1, frequencies are angular.
"""

from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError, ConsistencyError, DomainError
from .gates import NamedGate, fourier_basis
from .linalg import (
    CLAMP_TOL, check_hermitian, dagger, eig_hermitian, fro, hermitize,
    sqrtm_psd,
)

INTEGRALITY_RTOL = 1e-9


@dataclass(frozen=True)
class QuditFrame:
    d: int
    omega0: float
    t0: float
    omega_d: float
    HL: np.ndarray
    HF: np.ndarray
    omega_r: float
    # eigendecompositions of HL and HF, reused for every U_c(t)
    hl_eig: tuple = field(repr=False, compare=False)
    hf_eig: tuple = field(repr=False, compare=False)

    def identity(self):
        return np.eye(self.d, dtype=complex)


@dataclass(frozen=True)
class GateSpec:
    """A gate generator split as ``HG = g0 I - G`` with ``G >= 0``."""

    HG: np.ndarray
    tau: float
    g0: float
    G: np.ndarray
    omega_g: float
    name: str = "gate"


def build_frame(d, omega0):
    """Construct the decoupling frame for dimension ``d`` and frequency ``omega0``."""
    if int(d) != d or d < 2:
        raise DomainError(f"dimension must be an integer >= 2, got {d}")
    if not omega0 > 0:
        raise DomainError(f"omega0 must be positive, got {omega0}")
    d = int(d)
    omega0 = float(omega0)
    omega_d = d * omega0
    k = np.arange(d, dtype=float)
    HL = np.diag(k * omega_d).astype(complex)
    F = fourier_basis(d)
    HF = hermitize((F * (k * omega0)) @ dagger(F))
    omega_r = -float(np.real(np.trace(HL) + np.trace(HF))) / d
    return QuditFrame(
        d=d, omega0=omega0, t0=2 * np.pi / omega0, omega_d=omega_d,
        HL=HL, HF=HF, omega_r=omega_r,
        hl_eig=eig_hermitian(HL), hf_eig=eig_hermitian(HF),
    )


def _propagators(eig, times):
    # stack of V diag(exp(-i w t)) V^dagger over t
    w, V = eig
    phases = np.exp(-1j * np.multiply.outer(np.asarray(times, float), w))
    return np.einsum("ij,tj,kj->tik", V, phases, V.conj())


def logical_unitaries(frame, times):
    """``U_L(t) = exp(-i H_L t)`` for an array of times."""
    return _propagators(frame.hl_eig, times)


def control_unitaries(frame, times):
    """Stack of ``U_c(t)`` for an array of times, shape ``(len(times), d, d)``."""
    times = np.asarray(times, dtype=float)
    UL = _propagators(frame.hl_eig, times)
    UF = _propagators(frame.hf_eig, times)
    glob = np.exp(-1j * frame.omega_r * times)
    return glob[:, None, None] * (UL @ UF)


def control_unitary(frame, t):
    return control_unitaries(frame, [t])[0]


def control_hamiltonian(frame, t):
    """``H_c(t) = w_r I + H_L + U_L(t) H_F U_L(t)^dagger``."""
    UL = logical_unitaries(frame, [t])[0]
    Hc = frame.omega_r * frame.identity() + frame.HL + UL @ frame.HF @ dagger(UL)
    return hermitize(Hc)


def simpson_weights(n):
    """Composite-Simpson weights for ``n`` (even) panels on a unit interval."""
    w = np.ones(n + 1)
    w[1:-1:2] = 4
    w[2:-1:2] = 2
    return w / (3 * n)


def check_decoupling_identity(frame, A, n_quad=2048):
    """Deviation of the period average of ``U_c^dagger A U_c`` from ``Tr(A) I / d``.

    The average is taken with composite Simpson on ``n_quad`` panels; an odd
    ``n_quad`` is bumped up by one.  Returns the Frobenius norm of the
    difference.
    """
    A = np.asarray(A, dtype=complex)
    if A.shape != (frame.d, frame.d):
        raise DomainError(f"operator shape {A.shape} does not match d={frame.d}")
    if n_quad < 64:
        raise DomainError(f"n_quad must be >= 64, got {n_quad}")
    n = int(n_quad) + (int(n_quad) % 2)
    times = np.linspace(0.0, frame.t0, n + 1)
    U = control_unitaries(frame, times)
    integrand = dagger(U) @ A @ U
    avg = np.einsum("t,tij->ij", simpson_weights(n), integrand)
    target = np.trace(A) / frame.d * frame.identity()
    return fro(avg - target)


def check_integrality(frame, tau):
    ratio = tau / frame.t0
    m = round(ratio)
    if m < 1 or abs(ratio - m) > INTEGRALITY_RTOL * max(1.0, ratio):
        raise ConfigError(
            f"gate time {tau!r} is not an integer multiple of t0={frame.t0!r} "
            f"(ratio {ratio!r})", field="tau")
    return m


def gate_spec(frame, gate):
    """Split the gate generator into ``g0 I - G`` and compute ``omega_g``.

    ``g0`` is the largest eigenvalue of ``HG`` if positive, otherwise zero,
    so that ``G`` is non-negative.
    """
    if isinstance(gate, NamedGate):
        HG, tau, name = gate.HG, gate.tau, gate.name
    else:
        raise DomainError("gate must be a NamedGate")
    HG = check_hermitian(HG, what="gate Hamiltonian")
    if HG.shape != (frame.d, frame.d):
        raise DomainError(
            f"gate dimension {HG.shape[0]} does not match frame d={frame.d}")
    check_integrality(frame, tau)
    w, _ = eig_hermitian(HG)
    g0 = float(max(w[-1], 0.0))
    G = hermitize(g0 * frame.identity() - HG)
    omega_g = g0 + frame.omega_r + (frame.d ** 2 - 1) * frame.omega0
    return GateSpec(HG=HG, tau=float(tau), g0=g0, G=G, omega_g=omega_g, name=name)


def gate_hamiltonian_rotated(frame, gate, t):
    """``H_gate(t) = U_c(t) HG U_c(t)^dagger``."""
    HG = gate.HG
    if HG.shape != (frame.d, frame.d):
        raise DomainError(
            f"gate dimension {HG.shape[0]} does not match frame d={frame.d}")
    U = control_unitary(frame, t)
    return hermitize(U @ HG @ dagger(U))


def lab_hamiltonian(frame, gate, t, clamp_tol=CLAMP_TOL):
    """Applied field Hamiltonian and its square-root factor at time ``t``.

    Returns ``(H_lab, Upsilon)`` with ``H_lab = H_gate(t) + H_c(t)`` and
    ``Upsilon = sqrt(V)`` where ``V = H_L' + U_L H_F' U_L^dagger +
    U_c G U_c^dagger`` is non-negative, so that
    ``H_lab = omega_g I - Upsilon @ Upsilon``.
    """
    d = frame.d
    I = frame.identity()
    U = control_unitary(frame, t)
    UL = logical_unitaries(frame, [t])[0]
    Hlab = hermitize(U @ gate.HG @ dagger(U)) + control_hamiltonian(frame, t)
    HLp = (d - 1) * frame.omega_d * I - frame.HL
    HFp = (d - 1) * frame.omega0 * I - frame.HF
    V = hermitize(HLp + UL @ HFp @ dagger(UL) + U @ gate.G @ dagger(U))
    try:
        Upsilon = sqrtm_psd(V, clamp_tol)
    except DomainError as exc:
        raise ConsistencyError(f"shifted laboratory operator at t={t}: {exc}")
    return Hlab, Upsilon
