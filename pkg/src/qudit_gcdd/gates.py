"""Target gates, given by their Hamiltonian generator and gate time.

Basis ordering follows the atomic labels: logical index 0, 1, 2 of a qutrit
is the magnetic state |-1>, |0>, |1>.
"""

from dataclasses import dataclass

import numpy as np

from .errors import DomainError
from .linalg import check_hermitian, expm_hermitian


@dataclass(frozen=True)
class NamedGate:
    name: str
    d: int
    HG: np.ndarray
    UG: np.ndarray
    tau: float

    def unitary_at(self, t):
        """Ideal gate propagator ``exp(-i HG t)``."""
        return expm_hermitian(self.HG, -1j * t)


def fourier_basis(d):
    """Unitary whose column ``n`` is ``sum_j exp(2 pi i j n / d) |j> / sqrt(d)``."""
    if int(d) != d or d < 2:
        raise DomainError(f"dimension must be an integer >= 2, got {d}")
    j = np.arange(d)
    return np.exp(2j * np.pi * np.outer(j, j) / d) / np.sqrt(d)


def custom_gate(name, HG, tau):
    if tau <= 0:
        raise DomainError(f"gate time must be positive, got {tau}")
    HG = check_hermitian(HG, what=f"gate Hamiltonian {name!r}")
    UG = expm_hermitian(HG, -1j * tau)
    return NamedGate(name, HG.shape[0], HG, UG, float(tau))


def hadamard_qutrit(tau=1.0):
    """Qutrit Hadamard gate with its generator for gate time ``tau``."""
    if tau <= 0:
        raise DomainError(f"gate time must be positive, got {tau}")
    r3 = np.sqrt(3.0)
    a = 2 * r3 + 1
    HG = np.pi / (4 * r3 * tau) * np.array([
        [4 * r3 - 2, -2, -2],
        [-2, a, a],
        [-2, a, a],
    ], dtype=complex)
    w = np.exp(2j * np.pi / 3)
    UG = np.array([
        [1, 1, 1],
        [1, w, w * w],
        [1, w * w, w],
    ]) / (1j * r3)
    return NamedGate("hadamard", 3, HG, UG, float(tau))


GATES = {"hadamard": hadamard_qutrit}
