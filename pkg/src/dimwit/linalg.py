"""Dense complex Hermitian linear algebra sized for local dimensions up to ~16.

Everything here is a pure function on immutable inputs; the eigensolver is a
cyclic Jacobi sweep chosen for robustness at these tiny sizes rather than
speed at scale.  The sweep kernel is compiled with numba when available
(identical code runs uncompiled otherwise).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import (
    DimensionMismatchError,
    NoConvergenceError,
    NotHermitianError,
    NotPSDError,
)

try:
    from numba import njit

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - exercised via explicit fallback test
    HAVE_NUMBA = False

    def njit(*args, **kwargs):
        def wrap(fn):
            return fn

        return wrap


HERMITICITY_TOL = 1e-9
#: Sweep terminates once sqrt(sum_{i<j} |a_ij|^2) falls below this, scaled by
#: max(1, ||A||_F) so huge-norm inputs do not spuriously exhaust the sweep cap.
OFF_DIAGONAL_THRESHOLD = 1e-13
MAX_SWEEPS = 100


@dataclass(frozen=True)
class HermitianEig:
    """Spectral decomposition A = V diag(w) V† with eigenvalues descending."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray


def _as_matrix(a) -> np.ndarray:
    m = np.asarray(a, dtype=complex)
    if m.ndim != 2 or m.shape[0] < 1 or m.shape[1] < 1:
        raise DimensionMismatchError(f"expected a 2-d matrix, got shape {np.shape(a)}")
    return m


def _require_hermitian(a, tol: float) -> np.ndarray:
    m = _as_matrix(a)
    if m.shape[0] != m.shape[1]:
        raise DimensionMismatchError(f"expected a square matrix, got shape {m.shape}")
    deviation = float(np.abs(m - m.conj().T).max())
    if deviation > tol:
        raise NotHermitianError(
            f"matrix deviates from Hermiticity by {deviation:.3e} (tol {tol:.1e})"
        )
    # Symmetrize once the check passed so downstream math sees an exact Hermitian.
    return (m + m.conj().T) / 2.0


@njit(cache=True)
def _jacobi_core(m, v, stop, skip, max_sweeps):
    """Cyclic Jacobi sweeps in place; returns sweeps used, or -1 on failure."""
    n = m.shape[0]
    for sweep in range(max_sweeps):
        off = 0.0
        for i in range(n - 1):
            for j in range(i + 1, n):
                off += abs(m[i, j]) ** 2
        if off**0.5 <= stop:
            return sweep
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = m[p, q]
                r = abs(apq)
                if r <= skip:
                    continue
                phase = apq / r
                tau = (m[q, q].real - m[p, p].real) / (2.0 * r)
                if tau == 0.0:
                    t = 1.0
                else:
                    sgn = 1.0 if tau > 0.0 else -1.0
                    t = sgn / (abs(tau) + (1.0 + tau * tau) ** 0.5)
                c = 1.0 / (1.0 + t * t) ** 0.5
                s = t * c
                sw = s * phase
                swc = s * phase.conjugate()
                for k in range(n):
                    mp = m[p, k]
                    mq = m[q, k]
                    m[p, k] = c * mp - sw * mq
                    m[q, k] = swc * mp + c * mq
                for k in range(n):
                    mp = m[k, p]
                    mq = m[k, q]
                    m[k, p] = c * mp - swc * mq
                    m[k, q] = sw * mp + c * mq
                m[p, q] = 0.0
                m[q, p] = 0.0
                m[p, p] = m[p, p].real + 0.0j
                m[q, q] = m[q, q].real + 0.0j
                for k in range(n):
                    vp = v[k, p]
                    vq = v[k, q]
                    v[k, p] = c * vp - swc * vq
                    v[k, q] = sw * vp + c * vq
    off = 0.0
    for i in range(n - 1):
        for j in range(i + 1, n):
            off += abs(m[i, j]) ** 2
    if off**0.5 <= stop:
        return max_sweeps
    return -1


def eig_hermitian(a, tol: float = HERMITICITY_TOL) -> HermitianEig:
    """Diagonalize a complex Hermitian matrix by cyclic Jacobi rotations.

    Returns eigenvalues in descending order with matching orthonormal
    eigenvector columns.  Raises ``NotHermitianError`` if the input deviates
    from A = A† by more than ``tol``, and ``NoConvergenceError`` if the
    off-diagonal norm has not reached threshold after 100 sweeps.

    Eigenvectors within a degenerate cluster are solver-dependent; callers
    must only rely on spectral projectors.
    """
    m = _require_hermitian(a, tol)
    n = m.shape[0]
    v = np.eye(n, dtype=complex)
    if n > 1:
        stop = OFF_DIAGONAL_THRESHOLD * max(1.0, float(np.linalg.norm(m)))
        skip = stop / (n * n)
        if _jacobi_core(m, v, stop, skip, MAX_SWEEPS) < 0:
            raise NoConvergenceError(
                f"Jacobi sweep limit ({MAX_SWEEPS}) exceeded for a {n}x{n} matrix"
            )
    w = np.diag(m).real.copy()
    order = np.argsort(-w, kind="stable")
    return HermitianEig(w[order], np.ascontiguousarray(v[:, order]))


def kron(a, b) -> np.ndarray:
    """Kronecker product; output dimensions are the products of the inputs'."""
    return np.kron(_as_matrix(a), _as_matrix(b))


def partial_trace(a, d_a: int, d_b: int, traced_party: str) -> np.ndarray:
    """Trace out one tensor factor of a (d_a*d_b) x (d_a*d_b) matrix.

    ``traced_party`` is ``"A"`` (result is d_b x d_b) or ``"B"`` (d_a x d_a).
    """
    m = _as_matrix(a)
    d = d_a * d_b
    if m.shape != (d, d):
        raise DimensionMismatchError(
            f"expected a {d}x{d} matrix for local dims ({d_a},{d_b}), got {m.shape}"
        )
    m4 = m.reshape(d_a, d_b, d_a, d_b)
    party = traced_party.upper()
    if party == "A":
        return np.trace(m4, axis1=0, axis2=2)
    if party == "B":
        return np.trace(m4, axis1=1, axis2=3)
    raise ValueError(f"traced_party must be 'A' or 'B', got {traced_party!r}")


def positive_projector(a, tol: float = HERMITICITY_TOL) -> np.ndarray:
    """Projector onto the strictly positive eigenspace (eigenvalues > tol)."""
    eig = eig_hermitian(a, tol)
    keep = eig.eigenvalues > tol
    if not np.any(keep):
        return np.zeros_like(np.asarray(a, dtype=complex))
    vecs = eig.eigenvectors[:, keep]
    p = vecs @ vecs.conj().T
    return (p + p.conj().T) / 2.0


def psd_pseudo_sqrt(a, tol: float = HERMITICITY_TOL) -> tuple[np.ndarray, np.ndarray]:
    """Square root of a PSD matrix together with its support projector.

    Eigenvalues in [-tol, 0] are clamped to zero; anything below -tol raises
    ``NotPSDError``.  The support projector spans eigenvalues > tol, so
    ``sqrt @ sqrt`` reproduces the input and ``support`` commutes with it.
    """
    eig = eig_hermitian(a, tol)
    w = eig.eigenvalues
    if w[-1] < -tol:
        raise NotPSDError(f"eigenvalue {w[-1]:.3e} below -tol ({-tol:.1e})")
    w = np.clip(w, 0.0, None)
    v = eig.eigenvectors
    root = (v * np.sqrt(w)) @ v.conj().T
    keep = w > tol
    if np.any(keep):
        vk = v[:, keep]
        support = vk @ vk.conj().T
        support = (support + support.conj().T) / 2.0
    else:
        support = np.zeros_like(root)
    return (root + root.conj().T) / 2.0, support
