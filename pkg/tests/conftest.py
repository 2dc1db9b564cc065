import numpy as np
import pytest

from qudit_gcdd.baths import BathConfig, coupling_operators
from qudit_gcdd.dynamics import Scenario
from qudit_gcdd.gates import hadamard_qutrit


def random_hermitian(rng, d, scale=1.0):
    A = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
    return scale * (A + A.conj().T) / 2


def random_density(rng, d, rank=None):
    rank = d if rank is None else rank
    A = rng.standard_normal((d, rank)) + 1j * rng.standard_normal((d, rank))
    rho = A @ A.conj().T
    return rho / np.trace(rho)


def random_state(rng, d):
    psi = rng.standard_normal(d) + 1j * rng.standard_normal(d)
    return psi / np.linalg.norm(psi)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def fig2_scenario(bath=None):
    bath = BathConfig.fig2() if bath is None else bath
    return Scenario(hadamard_qutrit(1.0), bath, coupling_operators(bath),
                    np.array([0, 1, 0]), protected=False)

