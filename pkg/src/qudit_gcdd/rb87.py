"""Rabi-frequency schedules for the 87Rb ground-state qutrit.

Three red-detuned laser colours ``s = 1, 2, 3`` each drive the two-photon
transitions with polarisations ``q = +1, 0, -1``.  After adiabatic
elimination of the excited state the qutrit sees

    H_eff = -Theta^dagger Theta,   Theta[s, q] = Omega_{s,q} / sqrt(Delta_s),

with ``sqrt(Delta) = i sqrt(-Delta)``.  Choosing the nine Rabi frequencies so
that ``Theta`` is Hermitian and equal to ``Upsilon(t)`` reproduces the
laboratory Hamiltonian up to the constant ``omega_g I``.

Array layout: ``Omega[..., s_index, q_index]`` with ``s_index = s - 1`` and
``q_index = 0, 1, 2`` for ``q = +1, 0, -1``, so column ``c`` of ``Theta``
couples to basis state ``c`` in the |-1>, |0>, |1> ordering.
"""

from dataclasses import dataclass

import numpy as np

from .errors import DomainError
from .gcdd import lab_hamiltonian
from .linalg import dagger, is_hermitian

POLARIZATIONS = (1, 0, -1)
ETA_TARGET = 1e-3
MAX_RABI_HZ = 10e6
DETUNING_RANGE_HZ = (0.1e9, 10e9)


@dataclass(frozen=True)
class DetuningSet:
    Delta: tuple

    def __post_init__(self):
        D = tuple(float(x) for x in self.Delta)
        if len(D) != 3:
            raise DomainError("exactly three detunings are required")
        if any(x >= 0 for x in D):
            raise DomainError(f"detunings must be red (negative), got {D}")
        biggest = max(abs(x) for x in D)
        for i in range(3):
            for j in range(i + 1, 3):
                if abs(D[i] - D[j]) < 0.1 * biggest:
                    raise DomainError(
                        f"detunings {D[i]:.6g} and {D[j]:.6g} are too close; "
                        "pairwise separation must be at least 0.1 max|Delta|")
        object.__setattr__(self, "Delta", D)

    @classmethod
    def from_ghz(cls, magnitudes_ghz, physical_time_unit):
        """Red detunings ``-2 pi f`` for ``f`` in GHz, in units of ``1/physical_time_unit``."""
        return cls(tuple(-2 * np.pi * f * 1e9 * physical_time_unit
                         for f in magnitudes_ghz))

    def sqrt(self):
        return np.array([sqrt_negative_detuning(x) for x in self.Delta])


@dataclass(frozen=True)
class RabiSchedule:
    times: np.ndarray
    Omega: np.ndarray    # shape (n_times, 3, 3), complex
    Delta: DetuningSet
    t0: float = 1.0      # control period in the schedule's time unit

    def theta(self, k=None):
        """``Theta = Omega / sqrt(Delta)`` at sample ``k`` (all samples if None)."""
        Om = self.Omega if k is None else self.Omega[k]
        return Om / self.Delta.sqrt()[:, None]

    def channel(self, s, q):
        return self.Omega[:, s - 1, POLARIZATIONS.index(q)]


def sqrt_negative_detuning(Delta_s):
    """Square root of a negative detuning on the branch ``i sqrt(-Delta)``."""
    if not Delta_s < 0:
        raise DomainError(f"detuning must be negative, got {Delta_s}")
    return 1j * np.sqrt(-Delta_s)


def map_upsilon_to_rabi(upsilons, Delta, times=None, t0=1.0):
    """Rabi frequencies making ``Theta(t) = Upsilon(t)`` at every sample.

    The six independent entries come from the upper triangle of ``Upsilon``;
    the remaining three are fixed by Hermiticity of ``Theta``:
    ``Omega_{2,1} = sqrt(D2) conj(Omega_{1,0} / sqrt(D1))`` and likewise for
    ``(3,1)`` and ``(3,0)``.
    """
    Y = np.asarray(upsilons, dtype=complex)
    if Y.ndim == 2:
        Y = Y[None]
    if Y.shape[1:] != (3, 3):
        raise DomainError(f"Upsilon samples must be 3x3, got {Y.shape[1:]}")
    for k, Yk in enumerate(Y):
        if not is_hermitian(Yk):
            raise DomainError(f"Upsilon sample {k} is not Hermitian")
    if not isinstance(Delta, DetuningSet):
        Delta = DetuningSet(tuple(Delta))
    r = Delta.sqrt()
    Om = np.zeros_like(Y)
    for s in range(3):
        for c in range(s, 3):
            Om[:, s, c] = r[s] * Y[:, s, c]
    # diagonal samples are imaginary by construction; drop round-off real parts
    for s in range(3):
        Om[:, s, s] = 1j * Om[:, s, s].imag
    for s in range(3):
        for c in range(s):
            Om[:, s, c] = r[s] * np.conj(Om[:, c, s] / r[c])
    if times is None:
        times = np.arange(len(Y), dtype=float)
    return RabiSchedule(np.asarray(times, float), Om, Delta, float(t0))


def effective_hamiltonian(schedule, t_index):
    """``H_eff[m, n] = sum_s conj(Omega_{s,-m}) Omega_{s,-n} / Delta_s``."""
    Om = schedule.Omega[t_index]
    D = np.asarray(schedule.Delta.Delta)
    H = np.einsum("sm,sn,s->mn", Om.conj(), Om, 1.0 / D)
    return 0.5 * (H + dagger(H))


def check_pairing(schedule):
    """Largest violation of the diagonal and off-diagonal Rabi constraints."""
    Om = schedule.Omega
    r = schedule.Delta.sqrt()
    worst = 0.0
    for s in range(3):
        worst = max(worst, np.max(np.abs(Om[:, s, s] + Om[:, s, s].conj()),
                                  initial=0.0))
        for c in range(s):
            lhs = Om[:, s, c] / r[s]
            rhs = np.conj(Om[:, c, s]) / np.conj(r[c])
            worst = max(worst, np.max(np.abs(lhs - rhs), initial=0.0))
    return worst


@dataclass(frozen=True)
class FeasibilityReport:
    eta: float
    max_rabi_hz: float
    detunings_hz: tuple
    eta_ok: bool
    rabi_ok: bool
    detunings_ok: bool

    @property
    def ok(self):
        return self.eta_ok and self.rabi_ok and self.detunings_ok

    def lines(self):
        flag = {True: "pass", False: "FAIL"}
        det = ", ".join(f"{f / 1e9:.4g}" for f in self.detunings_hz)
        return [
            f"eta = max|Omega/Delta| = {self.eta:.6e}  "
            f"(target <= {ETA_TARGET:g}: {flag[self.eta_ok]})",
            f"max |Omega|/2pi = {self.max_rabi_hz:.6e} Hz  "
            f"(<= {MAX_RABI_HZ:g} Hz: {flag[self.rabi_ok]})",
            f"|Delta_s|/2pi = [{det}] GHz  "
            f"(within [0.1, 10] GHz: {flag[self.detunings_ok]})",
        ]


def feasibility_report(schedule, physical_t0):
    """Order-of-magnitude check of a schedule against the atomic scheme.

    ``physical_t0`` is the duration of one control period in seconds; the
    schedule's frequencies are rescaled by ``schedule.t0 / physical_t0`` to
    obtain physical angular frequencies.
    """
    if not physical_t0 > 0:
        raise DomainError(f"physical_t0 must be positive, got {physical_t0}")
    to_hz = schedule.t0 / physical_t0 / (2 * np.pi)
    D = np.abs(np.asarray(schedule.Delta.Delta))
    Om = np.abs(schedule.Omega)
    eta = float(np.max(Om / D[None, :, None], initial=0.0))
    max_rabi = float(np.max(Om, initial=0.0) * to_hz)
    det_hz = tuple(float(x * to_hz) for x in D)
    lo, hi = DETUNING_RANGE_HZ
    return FeasibilityReport(
        eta=eta, max_rabi_hz=max_rabi, detunings_hz=det_hz,
        eta_ok=eta <= ETA_TARGET, rabi_ok=max_rabi <= MAX_RABI_HZ,
        detunings_ok=all(lo <= f <= hi for f in det_hz),
    )


def schedule_from_frame(frame, gate, times, Delta):
    """Sample ``Upsilon`` of a qutrit build on ``times`` and map it to Rabi frequencies."""
    if frame.d != 3:
        raise DomainError(f"the atomic scheme realises qutrits only, got d={frame.d}")
    ups = np.array([lab_hamiltonian(frame, gate, t)[1] for t in times])
    return map_upsilon_to_rabi(ups, Delta, times=times, t0=frame.t0)
