"""Spectral kernel for Hermitian and positive semidefinite matrices.

Operators are plain ``numpy`` arrays. ``hermitian`` and ``density_matrix``
validate and symmetrize inputs; everything downstream assumes their output.
Negative and log powers act on the support only (pseudo-inverse convention).
"""

from dataclasses import dataclass

import numpy as np

from .errors import (
    DimensionMismatch,
    EmptySupport,
    NonHermitian,
    NotPositive,
    SingularSpectrum,
)

GROUP_TOL = 1e-9
SUPPORT_TOL = 1e-12
HERMITIAN_TOL = 1e-12


def hermitian(A, tol=HERMITIAN_TOL):
    """Return ``(A + A^dagger) / 2`` after checking ``A`` is Hermitian."""
    A = np.asarray(A, dtype=complex)
    if A.ndim != 2 or A.shape[0] != A.shape[1] or A.shape[0] < 1:
        raise NonHermitian(f"expected a square matrix, got shape {A.shape}")
    scale = max(1.0, float(np.max(np.abs(A))))
    if np.max(np.abs(A - A.conj().T)) > tol * scale:
        raise NonHermitian("matrix differs from its conjugate transpose")
    return (A + A.conj().T) / 2


def density_matrix(A, trace_tol=1e-10, eig_tol=1e-12):
    """Validate a density matrix: Hermitian, PSD up to ``eig_tol``, unit trace."""
    A = hermitian(A)
    tr = np.trace(A).real
    if abs(tr - 1.0) > trace_tol:
        raise NotPositive(f"trace is {tr!r}, expected 1")
    if np.linalg.eigvalsh(A)[0] < -eig_tol:
        raise NotPositive("matrix has a negative eigenvalue")
    return A


@dataclass(frozen=True)
class SpectralDecomposition:
    eigenvalues: np.ndarray  # descending
    eigenvectors: np.ndarray  # columns match eigenvalues
    groups: tuple  # tuple of (start, stop) index ranges

    def reconstruct(self):
        U = self.eigenvectors
        return (U * self.eigenvalues) @ U.conj().T

    def projectors(self):
        U = self.eigenvectors
        return [U[:, a:b] @ U[:, a:b].conj().T for a, b in self.groups]


@dataclass(frozen=True)
class SpectralStats:
    v: int
    lam: float
    min_eig: float
    max_eig: float


def _eigh_desc(A):
    w, U = np.linalg.eigh(A)
    return w[::-1], U[:, ::-1]


def _group(w, group_tol):
    """Chain-cluster descending eigenvalues whose gap is within the tolerance."""
    scale = float(np.max(np.abs(w))) if w.size else 0.0
    thr = group_tol * scale if scale > 0 else group_tol
    groups = []
    start = 0
    for i in range(1, len(w)):
        if w[i - 1] - w[i] > thr:
            groups.append((start, i))
            start = i
    groups.append((start, len(w)))
    return tuple(groups)


def spectral_decompose(A, group_tol=GROUP_TOL):
    if group_tol <= 0:
        raise ValueError("group_tol must be positive")
    A = hermitian(A)
    w, U = _eigh_desc(A)
    return SpectralDecomposition(w, U, _group(w, group_tol))


def _support_threshold(w, support_tol):
    return support_tol * max(float(np.max(np.abs(w))), 0.0)


def matrix_function(A, f, support_tol=SUPPORT_TOL):
    """Apply ``f`` to the spectrum of a PSD matrix.

    ``f`` is either ``"log"`` or a real exponent. Eigenvalues at or below
    ``support_tol * max|eig|`` count as zero: they map to zero for positive
    exponents and are dropped from the support otherwise, so a zero exponent
    gives the support projector.
    """
    A = hermitian(A)
    w, U = np.linalg.eigh(A)
    thr = _support_threshold(w, support_tol)
    if w[0] < -max(thr, 1e-9 * max(1.0, abs(w[-1]))):
        raise NotPositive(f"negative eigenvalue {w[0]!r}")
    supp = w > thr
    if f == "log":
        if not supp.any():
            raise EmptySupport("log of an operator with empty support")
        g = np.zeros_like(w)
        g[supp] = np.log(w[supp])
    else:
        alpha = float(f)
        g = np.zeros_like(w)
        if alpha <= 0 and not supp.any():
            raise EmptySupport("non-positive power of an operator with empty support")
        g[supp] = w[supp] ** alpha
    return (U * g) @ U.conj().T


def mpow(A, alpha, support_tol=SUPPORT_TOL):
    return matrix_function(A, alpha, support_tol)


def mlog(A, support_tol=SUPPORT_TOL):
    return matrix_function(A, "log", support_tol)


def support_projector(A, support_tol=SUPPORT_TOL):
    return matrix_function(A, 0.0, support_tol)


def pinching(sigma, rho, group_tol=GROUP_TOL):
    """Project ``rho`` onto the block-diagonal algebra of ``sigma``'s eigenspaces."""
    sigma = hermitian(sigma)
    rho = hermitian(rho)
    if sigma.shape != rho.shape:
        raise DimensionMismatch(f"{sigma.shape} vs {rho.shape}")
    dec = spectral_decompose(sigma, group_tol)
    out = np.zeros_like(rho)
    for P in dec.projectors():
        out += P @ rho @ P
    return (out + out.conj().T) / 2


def spectral_stats(A, group_tol=GROUP_TOL, support_tol=SUPPORT_TOL, full_space=False):
    """Number of distinct eigenvalues and the log spectral ratio.

    ``lam`` is ``log a1 - log a0`` for the trace-normalized operator restricted
    to its support. With ``full_space=True`` a rank-deficient operator raises
    ``SingularSpectrum`` instead.
    """
    dec = spectral_decompose(A, group_tol)
    w = dec.eigenvalues
    v = len(dec.groups)
    thr = _support_threshold(w, support_tol)
    pos = w[w > thr]
    if pos.size == 0:
        raise EmptySupport("operator has empty support")
    if full_space and pos.size < w.size:
        raise SingularSpectrum("operator is singular on the full space")
    wn = pos / pos.sum()
    lam = float(np.log(wn[0]) - np.log(wn[-1]))
    return SpectralStats(v=v, lam=max(lam, 0.0), min_eig=float(w[-1]), max_eig=float(w[0]))


def trace_norm(A):
    return float(np.sum(np.abs(np.linalg.eigvalsh(hermitian(A)))))


def trace_norm_distance(A, B):
    A = np.asarray(A, dtype=complex)
    B = np.asarray(B, dtype=complex)
    if A.shape != B.shape:
        raise DimensionMismatch(f"{A.shape} vs {B.shape}")
    return trace_norm(A - B)


def random_density(d, rng, rank=None):
    """Random density matrix from a complex Ginibre matrix of the given rank."""
    rank = d if rank is None else rank
    G = rng.normal(size=(d, rank)) + 1j * rng.normal(size=(d, rank))
    rho = G @ G.conj().T
    return rho / np.trace(rho).real


def random_hermitian(d, rng):
    G = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    return (G + G.conj().T) / 2
