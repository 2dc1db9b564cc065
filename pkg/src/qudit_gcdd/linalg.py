"""Dense linear algebra for small complex Hermitian matrices.

Everything here works on plain ``numpy`` arrays of shape ``(d, d)``; there are
no wrapper classes.  Hermitian eigendecomposition is the workhorse: matrix
exponentials, square roots and the Uhlmann fidelity are all evaluated through
it, which keeps unitarity and Hermiticity exact up to round-off.
"""

import numpy as np

from .errors import DomainError, NumericError

HERMITIAN_RTOL = 1e-12
DENSITY_ATOL = 1e-9
PSD_ATOL = 1e-7
CLAMP_TOL = 1e-9
PURE_THRESHOLD = 1.0 - 1e-10


def as_matrix(M):
    """Return ``M`` as a finite square complex array."""
    M = np.asarray(M, dtype=complex)
    if M.ndim != 2 or M.shape[0] != M.shape[1] or M.shape[0] < 1:
        raise DomainError(f"expected a square matrix, got shape {M.shape}")
    if not np.all(np.isfinite(M)):
        raise DomainError("matrix has non-finite entries")
    return M


def fro(M):
    return float(np.linalg.norm(M))


def dagger(M):
    return np.conj(np.swapaxes(M, -1, -2))


def hermiticity_defect(M):
    return fro(M - dagger(M))


def is_hermitian(M, rtol=HERMITIAN_RTOL):
    M = np.asarray(M)
    return hermiticity_defect(M) <= rtol * max(1.0, fro(M))


def check_hermitian(M, rtol=HERMITIAN_RTOL, what="operator"):
    M = as_matrix(M)
    if not is_hermitian(M, rtol):
        raise DomainError(
            f"{what} is not Hermitian (defect {hermiticity_defect(M):.3e})")
    return M


def hermitize(M):
    """Symmetric part ``(M + M†)/2``; removes round-off anti-Hermitian noise."""
    return 0.5 * (M + dagger(M))


def _canonical_phases(V):
    # Make the largest-magnitude component of every eigenvector real positive.
    # The first index wins among components equal to within round-off.
    mags = np.abs(V)
    idx = np.argmax(mags >= mags.max(axis=0) * (1 - 1e-12), axis=0)
    pivots = V[idx, np.arange(V.shape[1])]
    return V * (np.abs(pivots) / pivots)


def eig_hermitian(H, rtol=HERMITIAN_RTOL):
    """Eigendecomposition ``H = V diag(w) V†`` of a Hermitian matrix.

    Parameters
    ----------
    H : array_like, shape (d, d)
        Hermitian within ``rtol * max(1, ||H||_F)``.

    Returns
    -------
    w : ndarray, shape (d,)
        Real eigenvalues in ascending order.
    V : ndarray, shape (d, d)
        Unitary matrix whose columns are the eigenvectors, each with its
        largest-magnitude component made real and positive.
    """
    H = check_hermitian(H, rtol)
    try:
        w, V = np.linalg.eigh(hermitize(H))
    except np.linalg.LinAlgError as exc:
        raise NumericError(f"Hermitian eigensolver did not converge: {exc}")
    return w, _canonical_phases(V)


def from_eig(w, V, f=None):
    """Rebuild ``V diag(f(w)) V†``; ``f`` defaults to the identity."""
    vals = w if f is None else f(w)
    return (V * vals) @ dagger(V)


def expm_hermitian(H, scale):
    """``exp(scale * H)`` for Hermitian ``H`` and complex ``scale``.

    With purely imaginary ``scale`` the result is unitary to round-off.
    """
    w, V = eig_hermitian(H)
    return from_eig(w, V, lambda x: np.exp(scale * x))


def sqrtm_psd(H, clamp_tol=CLAMP_TOL):
    """Non-negative square root of a positive semidefinite Hermitian matrix.

    Eigenvalues in ``[-clamp_tol * max(1, ||H||_F), 0)`` are treated as
    round-off and clamped to zero; anything more negative is rejected.
    """
    w, V = eig_hermitian(H)
    floor = -clamp_tol * max(1.0, fro(H))
    if w[0] < floor:
        raise DomainError(
            f"operator not non-negative (min eigenvalue {w[0]:.3e})")
    S = from_eig(w, V, lambda x: np.sqrt(np.clip(x, 0.0, None)))
    return hermitize(S)


def check_density(rho, atol=DENSITY_ATOL, psd_atol=PSD_ATOL):
    """Validate a density matrix and return it as a complex array."""
    rho = as_matrix(rho)
    if hermiticity_defect(rho) > atol:
        raise DomainError("density matrix is not Hermitian")
    tr = np.trace(rho)
    if abs(tr - 1.0) > atol:
        raise DomainError(f"density matrix trace {tr.real:.12g} != 1")
    if np.linalg.eigvalsh(hermitize(rho))[0] < -psd_atol:
        raise DomainError("density matrix has a negative eigenvalue")
    return rho


def pure_state(psi):
    psi = np.asarray(psi, dtype=complex)
    psi = psi / np.linalg.norm(psi)
    return np.outer(psi, psi.conj())


def uhlmann_fidelity(rho, sigma):
    """General mixed-state route through ``sqrt(rho)``; no input checks."""
    root = sqrtm_psd(hermitize(rho), clamp_tol=PSD_ATOL)
    inner = hermitize(root @ sigma @ root)
    w = np.linalg.eigvalsh(inner)
    return float(np.sum(np.sqrt(np.clip(w, 0.0, None))) ** 2)


def fidelity(rho, sigma, atol=DENSITY_ATOL):
    """Uhlmann fidelity ``[Tr sqrt(sqrt(rho) sigma sqrt(rho))]^2``.

    When either state is pure (largest eigenvalue at least ``1 - 1e-10``) the
    shortcut ``<psi| other |psi>`` is used instead of matrix square roots.
    """
    rho = check_density(rho, atol)
    sigma = check_density(sigma, atol)
    for a, b in ((sigma, rho), (rho, sigma)):
        w, V = np.linalg.eigh(hermitize(a))
        if w[-1] >= PURE_THRESHOLD:
            psi = V[:, -1]
            return float(max(0.0, np.real(psi.conj() @ b @ psi)))
    return uhlmann_fidelity(rho, sigma)
