"""Thermal bosonic baths with an Ohmic, exponentially cut-off spectral density.

Two independent identical baths act on the qutrit: one through the
amplitude-damping operator ``Lambda1`` (|0><-1| and |0><1| transitions) and
one through the dephasing operator ``Lambda2``.  Both share the spectral
density ``J(w) = alpha^2 w exp(-w / w_c)`` and inverse temperature ``beta``.

For this ``J`` the two bath correlation functions have closed-form thermal
series (hbar = k_B = 1):

    G1(s) = alpha^2 sum_{k>=1} (1/w_c + k beta + i s)^-2
    G2(s) = alpha^2 [(1/w_c - i s)^-2 + sum_{k>=1} (1/w_c + k beta - i s)^-2]
"""

import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate

from .errors import DomainError, NumericError

K_MAX = 10 ** 6
QUAD_CUTOFF = 60.0


@dataclass(frozen=True)
class BathConfig:
    lambda_damp_m1: float = 1.0
    lambda_damp_p1: float = 1.0
    lambda_deph_m1: float = 1.0
    lambda_deph_p1: float = 1.0
    alpha: float = 0.1
    omega_c: float = 8 * math.pi
    beta: float = 1 / (8 * math.pi)

    def __post_init__(self):
        if self.alpha < 0:
            raise DomainError(f"alpha must be >= 0, got {self.alpha}")
        if not self.omega_c > 0:
            raise DomainError(f"omega_c must be positive, got {self.omega_c}")
        if not self.beta > 0:
            raise DomainError(f"beta must be positive, got {self.beta}")

    @classmethod
    def fig2(cls, tau=1.0, lambda_bar=0.1):
        """Equal couplings ``alpha * lambda = lambda_bar``, ``tau_c = tau/4``, ``beta w_c = 1``."""
        omega_c = 4 * (2 * math.pi / tau)
        return cls(alpha=lambda_bar, omega_c=omega_c, beta=1 / omega_c)

    @property
    def tau_c(self):
        return 2 * math.pi / self.omega_c


@dataclass(frozen=True)
class CouplingOperators:
    Lambda1: np.ndarray
    Lambda2: np.ndarray

    def as_list(self):
        return [self.Lambda1, self.Lambda2]


def coupling_operators(cfg):
    """Damping and dephasing system operators in the |-1>, |0>, |1> basis."""
    L1 = np.zeros((3, 3), dtype=complex)
    L1[1, 0] = cfg.lambda_damp_m1
    L1[1, 2] = cfg.lambda_damp_p1
    L2 = np.diag([cfg.lambda_deph_m1,
                  -cfg.lambda_deph_m1 - cfg.lambda_deph_p1,
                  cfg.lambda_deph_p1]).astype(complex)
    return CouplingOperators(L1, L2)


def spectral_density(omega, cfg):
    omega = np.asarray(omega, dtype=float)
    if np.any(omega < 0):
        raise DomainError("spectral density is defined for omega >= 0")
    return cfg.alpha ** 2 * omega * np.exp(-omega / cfg.omega_c)


def occupation(omega, cfg):
    """Bose-Einstein occupation ``1 / (exp(beta w) - 1)``."""
    omega = np.asarray(omega, dtype=float)
    if np.any(omega <= 0):
        raise DomainError("occupation is defined for omega > 0")
    return 1.0 / np.expm1(cfg.beta * omega)


def _thermal_sum(c, beta):
    """``sum_{k>=1} (c + k beta)^-2`` for complex ``c`` with ``Re c > 0``.

    The first ``K`` terms are summed directly and the remainder is closed
    with its Euler-Maclaurin expansion, accurate once ``|c + K beta|`` is
    well beyond ``beta``.  ``K`` grows with ``|c| / beta``.
    """
    c = np.asarray(c, dtype=complex)
    if math.isinf(beta):
        return np.zeros_like(c)
    K = max(16, int(math.ceil(8 * float(np.max(np.abs(c), initial=0.0)) / beta)))
    if K > K_MAX:
        raise NumericError(
            f"thermal series needs {K} terms (limit {K_MAX}); beta too small")
    total = np.zeros_like(c)
    for k in range(1, K + 1):
        total += (c + k * beta) ** -2
    z = c + K * beta
    b = beta
    tail = (1 / (b * z) - 1 / (2 * z ** 2) + b / (6 * z ** 3)
            - b ** 3 / (30 * z ** 5) + b ** 5 / (42 * z ** 7)
            - b ** 7 / (30 * z ** 9))
    return total + tail


def correlation_g1(s, cfg):
    """Absorption correlation ``int J(w) n(w) exp(-i w s) dw``."""
    s = np.asarray(s, dtype=float)
    a = 1 / cfg.omega_c + 1j * s
    return cfg.alpha ** 2 * _thermal_sum(a, cfg.beta)


def correlation_g2(s, cfg):
    """Emission correlation ``int J(w) (1 + n(w)) exp(i w s) dw``."""
    s = np.asarray(s, dtype=float)
    a = 1 / cfg.omega_c - 1j * s
    return cfg.alpha ** 2 * (a ** -2 + _thermal_sum(a, cfg.beta))


def correlation_quadrature(s, cfg, which, upper=QUAD_CUTOFF):
    """Direct adaptive quadrature of a correlation function at lag ``s``.

    Integrates over ``(0, upper * omega_c]``; kept independent of the series
    so it can serve as a reference.
    """
    wc = cfg.omega_c
    b = cfg.beta

    def weight(w):
        if w == 0.0:
            # J(w) n(w) -> alpha^2 / beta as w -> 0
            return 0.0 if math.isinf(b) else cfg.alpha ** 2 / b
        occ = 0.0 if math.isinf(b) else 1.0 / math.expm1(b * w)
        dens = cfg.alpha ** 2 * w * math.exp(-w / wc)
        return dens * (occ if which == 1 else 1.0 + occ)

    sign = -1.0 if which == 1 else 1.0
    opts = dict(limit=5000, epsabs=1e-13 * cfg.alpha ** 2 * wc ** 2, epsrel=1e-11)
    if s == 0:
        re, _ = integrate.quad(weight, 0.0, upper * wc, **opts)
        return complex(re, 0.0)
    re, _ = integrate.quad(weight, 0.0, upper * wc, weight="cos", wvar=s, **opts)
    im, _ = integrate.quad(weight, 0.0, upper * wc, weight="sin", wvar=s, **opts)
    return complex(re, sign * im)
