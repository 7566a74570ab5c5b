"""Dense-kernel checks against numpy's LAPACK-backed routines.

The library does not call numpy.linalg at runtime; these tests are the one
place where the bespoke kernels are cross-validated against an independent
implementation.
"""

import numpy as np
import pytest

from bkbundle.errors import CertificationError, ConvergenceError
from bkbundle.linalg import (
    characteristic_polynomial,
    frobenius,
    gauss_jordan_inverse,
    hermitian_eigensystem,
    hermitian_eigenvalues,
    operator_norm,
    polynomial_roots,
    singular_values,
    smallest_singular_value,
)
from bkbundle.sampling import derive_rng


def random_complex(rng, n):
    return rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))


def sorted_by_parts(values):
    return np.array(sorted(values, key=lambda z: (round(z.real, 9), round(z.imag, 9))))


def test_characteristic_polynomial_matches_numpy_poly():
    rng = derive_rng(0, "linalg", "charpoly")
    for trial in range(50):
        n = int(rng.integers(1, 9))
        a = random_complex(rng, n)
        coeffs = characteristic_polynomial(a)
        oracle = np.poly(a)
        scale = max(1.0, np.abs(oracle).max())
        assert np.abs(coeffs - oracle).max() <= 1e-8 * scale


def test_polynomial_roots_match_numpy_eigvals():
    rng = derive_rng(0, "linalg", "roots")
    for trial in range(50):
        n = int(rng.integers(2, 9))
        a = random_complex(rng, n)
        coeffs = characteristic_polynomial(a)
        radius = operator_norm(a) + 1.0
        roots, converged, _ = polynomial_roots(coeffs, radius)
        assert converged
        oracle = np.linalg.eigvals(a)
        got = sorted_by_parts(roots)
        want = sorted_by_parts(oracle)
        # eigenvalue condition numbers of random matrices are mild; 1e-6
        # absolute headroom on top of scale covers the clustered cases
        scale = max(1.0, np.abs(oracle).max())
        assert np.abs(got - want).max() <= 1e-6 * scale


def test_hermitian_eigenvalues_match_numpy():
    rng = derive_rng(0, "linalg", "hermitian")
    for trial in range(50):
        n = int(rng.integers(1, 9))
        a = random_complex(rng, n)
        h = a + a.conj().T
        got = hermitian_eigenvalues(h)
        want = np.sort(np.linalg.eigvalsh(h))
        scale = max(1.0, np.abs(want).max())
        assert np.abs(got - want).max() <= 1e-10 * scale
        assert np.all(np.diff(got) >= -1e-12 * scale)


def test_hermitian_eigensystem_reconstructs():
    rng = derive_rng(0, "linalg", "eigensystem")
    for trial in range(20):
        n = int(rng.integers(1, 9))
        a = random_complex(rng, n)
        h = a + a.conj().T
        vals, vecs = hermitian_eigensystem(h)
        recon = vecs @ np.diag(vals) @ vecs.conj().T
        scale = max(1.0, np.abs(h).max())
        assert np.abs(recon - h).max() <= 1e-10 * scale
        gram = vecs.conj().T @ vecs
        assert np.abs(gram - np.eye(n)).max() <= 1e-10


def test_singular_values_match_numpy_svd():
    rng = derive_rng(0, "linalg", "svd")
    worst = 0.0
    for trial in range(100):
        n = int(rng.integers(1, 9))
        a = random_complex(rng, n)
        got = singular_values(a)
        want = np.sort(np.linalg.svd(a, compute_uv=False))
        scale = max(1.0, want.max())
        worst = max(worst, np.abs(got - want).max() / scale)
    assert worst <= 1e-12


def test_singular_values_resolve_tiny_sigma():
    # the numerically hard case: sigma_min far below sqrt(eps) * scale.
    # normal-equation approaches lose these digits to cancellation.
    rng = derive_rng(0, "linalg", "tiny-sigma")
    for trial in range(20):
        n = int(rng.integers(2, 7))
        a = random_complex(rng, n)
        u, _, vh = np.linalg.svd(a)
        target = np.geomspace(1e-12, 1.0, n)
        b = (u * target) @ vh
        got = smallest_singular_value(b)
        assert got == pytest.approx(1e-12, rel=1e-6)


def test_operator_norm_matches_numpy():
    rng = derive_rng(0, "linalg", "opnorm")
    for trial in range(100):
        n = int(rng.integers(1, 9))
        a = random_complex(rng, n)
        want = np.linalg.norm(a, ord=2)
        assert operator_norm(a) == pytest.approx(want, rel=1e-11, abs=1e-13)


def test_gauss_jordan_inverse_matches_numpy():
    rng = derive_rng(0, "linalg", "inverse")
    for trial in range(100):
        n = int(rng.integers(1, 9))
        a = random_complex(rng, n)
        if smallest_singular_value(a) < 1e-3:
            continue
        got = gauss_jordan_inverse(a)
        want = np.linalg.inv(a)
        scale = max(1.0, np.abs(want).max())
        assert np.abs(got - want).max() <= 1e-10 * scale
        assert np.abs(got @ a - np.eye(n)).max() <= 1e-10 * max(1.0, operator_norm(a))


def test_gauss_jordan_rejects_singular():
    singular = np.array([[1.0, 2.0], [2.0, 4.0]], dtype=complex)
    with pytest.raises(CertificationError):
        gauss_jordan_inverse(singular)


def test_frobenius_matches_numpy():
    rng = derive_rng(0, "linalg", "frobenius")
    a = random_complex(rng, 6)
    assert frobenius(a) == pytest.approx(np.linalg.norm(a), rel=1e-14)


def test_polynomial_roots_flags_non_convergence():
    # a radius far too small keeps the iteration away from the roots
    coeffs = np.array([1.0, 0.0, 0.0, -8.0], dtype=complex)
    with pytest.raises(ConvergenceError):
        roots, converged, _ = polynomial_roots(coeffs, radius=1e-9, max_iter=3)
        if not converged:
            raise ConvergenceError("root iteration did not settle")
