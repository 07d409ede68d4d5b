import numpy as np
import pytest

from dimwit import linalg
from dimwit.errors import DimensionMismatchError, NotHermitianError, NotPSDError

from conftest import random_hermitian

SX = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)
SZ = np.diag([1.0, -1.0]).astype(complex)


def test_identity_eigenvalues():
    eig = linalg.eig_hermitian(np.eye(3))
    assert np.allclose(eig.eigenvalues, [1.0, 1.0, 1.0])


def test_pauli_x_spectrum():
    eig = linalg.eig_hermitian(SX)
    assert np.allclose(eig.eigenvalues, [1.0, -1.0])


def test_eigenvalues_descending_and_match_numpy(rng):
    for n in (2, 3, 5, 9, 12, 16):
        a = random_hermitian(rng, n)
        eig = linalg.eig_hermitian(a)
        assert np.all(np.diff(eig.eigenvalues) <= 0)
        # independent oracle: numpy's eigensolver
        assert np.allclose(eig.eigenvalues, np.linalg.eigvalsh(a)[::-1], atol=1e-11)


def test_reconstruction_and_orthonormality(rng):
    for _ in range(200):
        n = int(rng.integers(2, 10))
        a = random_hermitian(rng, n)
        eig = linalg.eig_hermitian(a)
        rebuilt = (eig.eigenvectors * eig.eigenvalues) @ eig.eigenvectors.conj().T
        assert np.abs(a - rebuilt).max() < 1e-10
        gram = eig.eigenvectors.conj().T @ eig.eigenvectors
        assert np.abs(gram - np.eye(n)).max() < 1e-10


def test_large_norm_input_still_converges(rng):
    a = 1e8 * random_hermitian(rng, 6)
    eig = linalg.eig_hermitian(a, tol=1.0)
    rebuilt = (eig.eigenvectors * eig.eigenvalues) @ eig.eigenvectors.conj().T
    assert np.abs(a - rebuilt).max() < 1e-10 * np.linalg.norm(a)


def test_not_hermitian_rejected():
    with pytest.raises(NotHermitianError):
        linalg.eig_hermitian(np.array([[0.0, 1.0], [0.0, 0.0]]))
    with pytest.raises(DimensionMismatchError):
        linalg.eig_hermitian(np.zeros((2, 3)))


def test_python_fallback_kernel_matches(rng):
    """The uncompiled sweep (used when numba is absent) gives the same result."""
    core = linalg._jacobi_core
    py_core = core.py_func if hasattr(core, "py_func") else core
    a = random_hermitian(rng, 5)
    m = a.copy()
    v = np.eye(5, dtype=complex)
    stop = linalg.OFF_DIAGONAL_THRESHOLD * max(1.0, float(np.linalg.norm(m)))
    sweeps = py_core(m, v, stop, stop / 25.0, linalg.MAX_SWEEPS)
    assert sweeps >= 0
    rebuilt = (v * np.diag(m).real) @ v.conj().T
    assert np.abs(a - rebuilt).max() < 1e-10


def test_kron_basics():
    assert np.array_equal(linalg.kron(np.eye(2), np.eye(2)), np.eye(4))
    assert np.allclose(linalg.kron(SZ, SZ), np.diag([1.0, -1.0, -1.0, 1.0]))


def test_kron_block_pattern(rng):
    a = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
    b = rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))
    k = linalg.kron(a, b)
    assert k.shape == (6, 6)
    for i in range(2):
        for j in range(2):
            assert np.allclose(k[3 * i : 3 * i + 3, 3 * j : 3 * j + 3], a[i, j] * b)


def test_kron_associative_and_trace_multiplicative(rng):
    a, b, c = (random_hermitian(rng, n) for n in (2, 3, 2))
    assert np.allclose(
        linalg.kron(linalg.kron(a, b), c), linalg.kron(a, linalg.kron(b, c)), atol=1e-12
    )
    assert abs(np.trace(linalg.kron(a, b)) - np.trace(a) * np.trace(b)) < 1e-12


def test_partial_trace_product_state():
    ket00 = np.zeros(4, dtype=complex)
    ket00[0] = 1.0
    rho = np.outer(ket00, ket00.conj())
    reduced = linalg.partial_trace(rho, 2, 2, "B")
    assert np.allclose(reduced, np.diag([1.0, 0.0]))
    assert abs(np.trace(reduced) - np.trace(rho)) < 1e-12  # trace preserved
    assert np.allclose(linalg.partial_trace(np.eye(4) / 4.0, 2, 2, "A"), np.eye(2) / 2.0)


def test_partial_trace_bell_state():
    # Hand computation: the 4x4 density matrix of (|00>+|11>)/sqrt(2) has
    # 1/2 at positions (0,0), (0,3), (3,0), (3,3); tracing B leaves I/2.
    psi = np.array([1.0, 0.0, 0.0, 1.0], dtype=complex) / np.sqrt(2.0)
    rho = np.outer(psi, psi.conj())
    assert np.allclose(linalg.partial_trace(rho, 2, 2, "B"), np.eye(2) / 2.0)


def test_partial_trace_of_kron(rng):
    for _ in range(20):
        a = random_hermitian(rng, 3)
        b = random_hermitian(rng, 2)
        traced = linalg.partial_trace(linalg.kron(a, b), 3, 2, "B")
        assert np.abs(traced - a * np.trace(b)).max() < 1e-10
        traced = linalg.partial_trace(linalg.kron(a, b), 3, 2, "A")
        assert np.abs(traced - b * np.trace(a)).max() < 1e-10


def test_partial_trace_dimension_check():
    with pytest.raises(DimensionMismatchError):
        linalg.partial_trace(np.eye(5), 2, 2, "B")


def test_positive_projector_examples():
    assert np.allclose(linalg.positive_projector(SZ), np.diag([1.0, 0.0]))
    assert np.allclose(linalg.positive_projector(-np.eye(2)), np.zeros((2, 2)))
    assert np.allclose(linalg.positive_projector(SX), np.full((2, 2), 0.5))


def test_positive_projector_idempotent_and_commutes(rng):
    for _ in range(25):
        a = random_hermitian(rng, int(rng.integers(2, 7)))
        p = linalg.positive_projector(a)
        assert np.abs(p @ p - p).max() < 1e-9
        assert np.abs(a @ p - p @ a).max() < 1e-9


def test_psd_pseudo_sqrt_examples():
    root, support = linalg.psd_pseudo_sqrt(np.eye(4))
    assert np.allclose(root, np.eye(4)) and np.allclose(support, np.eye(4))
    root, support = linalg.psd_pseudo_sqrt(np.diag([4.0, 0.0]))
    assert np.allclose(root, np.diag([2.0, 0.0]))
    assert np.allclose(support, np.diag([1.0, 0.0]))
    p = np.full((2, 2), 0.5)  # rank-1 projector is its own root and support
    root, support = linalg.psd_pseudo_sqrt(p)
    assert np.abs(root - p).max() < 1e-12
    assert np.abs(support - p).max() < 1e-12


def test_psd_pseudo_sqrt_squares_back(rng):
    for _ in range(25):
        n = int(rng.integers(2, 7))
        g = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
        a = g @ g.conj().T  # PSD by construction
        root, support = linalg.psd_pseudo_sqrt(a)
        assert np.abs(root @ root - a).max() < 1e-9
        assert np.abs(support @ root - root).max() < 1e-9


def test_psd_pseudo_sqrt_clamps_and_rejects():
    root, _ = linalg.psd_pseudo_sqrt(np.diag([1.0, -5e-10]), tol=1e-9)
    assert np.allclose(root, np.diag([1.0, 0.0]))
    with pytest.raises(NotPSDError):
        linalg.psd_pseudo_sqrt(np.diag([1.0, -1e-6]), tol=1e-9)
