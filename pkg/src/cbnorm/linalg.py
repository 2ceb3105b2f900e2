"""Dense complex matrix kernel.

Matrices are plain ``numpy`` arrays.  Hermitian inputs are validated with
:func:`as_hermitian`, which symmetrizes them exactly.  Tensor products use
the row-major convention: on ``C^d1 (x) C^d2`` the basis index of
``e_i (x) e_j`` is ``i * d2 + j``.
"""
from __future__ import annotations

from typing import Literal

import numpy as np

HERM_TOL = 1e-12
PSD_TOL = 1e-9


class ShapeError(ValueError):
    """Raised when array shapes are inconsistent with the requested operation."""


class NotPSDError(ValueError):
    """Raised when a matrix has an eigenvalue below ``-psd_tol``."""

    def __init__(self, min_eig: float, psd_tol: float):
        self.min_eig = min_eig
        self.psd_tol = psd_tol
        super().__init__(
            f"matrix is not positive semidefinite: min eigenvalue {min_eig:.3e} < -{psd_tol:.1e}"
        )


class DecompositionError(np.linalg.LinAlgError):
    """Raised when an eigendecomposition fails its reconstruction check."""

    def __init__(self, residual: float):
        self.residual = residual
        super().__init__(f"eigendecomposition failed (reconstruction residual {residual:.3e})")


def as_matrix(a, rows: int | None = None, cols: int | None = None) -> np.ndarray:
    """Return ``a`` as a finite complex 2-d array, optionally checking its shape."""
    m = np.asarray(a, dtype=complex)
    if m.ndim != 2 or m.size == 0:
        raise ShapeError(f"expected a non-empty 2-d matrix, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise ValueError("matrix has non-finite entries")
    if rows is not None and m.shape[0] != rows:
        raise ShapeError(f"expected {rows} rows, got {m.shape[0]}")
    if cols is not None and m.shape[1] != cols:
        raise ShapeError(f"expected {cols} columns, got {m.shape[1]}")
    return m


def as_hermitian(a, herm_tol: float = HERM_TOL) -> np.ndarray:
    """Validate Hermiticity of ``a`` (max-entry deviation) and return ``(a + a*)/2``."""
    m = as_matrix(a)
    if m.shape[0] != m.shape[1]:
        raise ShapeError(f"Hermitian matrix must be square, got {m.shape}")
    dev = np.max(np.abs(m - m.conj().T))
    if dev > herm_tol:
        raise ValueError(f"matrix is not Hermitian (max deviation {dev:.3e} > {herm_tol:.1e})")
    return (m + m.conj().T) / 2


def herm_eig(h: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Eigendecomposition ``h = V diag(w) V*`` with eigenvalues ascending.

    Raises
    ------
    DecompositionError
        If LAPACK fails or the reconstruction residual exceeds
        ``1e-10 * (1 + ||h||_F)``.
    """
    h = np.asarray(h, dtype=complex)
    try:
        w, v = np.linalg.eigh(h)
    except np.linalg.LinAlgError:
        raise DecompositionError(float("inf")) from None
    scale = 1.0 + np.linalg.norm(h)
    residual = np.linalg.norm((v * w) @ v.conj().T - h)
    if residual > 1e-10 * scale:
        raise DecompositionError(float(residual))
    return w, v


def sqrtm_psd(p: np.ndarray, psd_tol: float = PSD_TOL) -> np.ndarray:
    """Positive square root of a PSD matrix.

    Eigenvalues in ``[-psd_tol, 0)`` are clamped to zero; anything more
    negative raises :class:`NotPSDError`.
    """
    w, v = herm_eig(p)
    if w[0] < -psd_tol:
        raise NotPSDError(float(w[0]), psd_tol)
    s = np.sqrt(np.clip(w, 0.0, None))
    r = (v * s) @ v.conj().T
    return (r + r.conj().T) / 2


def pinv_sqrtm_psd(p: np.ndarray, rcond: float = 1e-10) -> np.ndarray:
    """Moore-Penrose inverse of the PSD square root, restricted to the support of ``p``."""
    w, v = herm_eig(p)
    cutoff = rcond * max(float(w[-1]), 0.0)
    s = np.zeros_like(w)
    keep = w > cutoff
    s[keep] = 1.0 / np.sqrt(w[keep])
    return (v * s) @ v.conj().T


def singular_values(a: np.ndarray) -> np.ndarray:
    return np.linalg.svd(np.asarray(a, dtype=complex), compute_uv=False)


def trace_norm(a: np.ndarray) -> float:
    """Sum of singular values."""
    return float(np.sum(singular_values(a)))


def spectral_norm(a: np.ndarray) -> float:
    """Largest singular value."""
    return float(singular_values(a)[0])


def frobenius_norm(a: np.ndarray) -> float:
    return float(np.linalg.norm(np.asarray(a, dtype=complex)))


def partial_trace(
    m: np.ndarray, dims: tuple[int, int], keep: Literal["first", "second"]
) -> np.ndarray:
    """Partial trace of an operator on ``C^d1 (x) C^d2``.

    ``keep="first"`` traces out the second factor and vice versa.
    """
    d1, d2 = dims
    m = np.asarray(m)
    if m.shape != (d1 * d2, d1 * d2):
        raise ShapeError(f"matrix of shape {m.shape} does not act on C^{d1} (x) C^{d2}")
    t = m.reshape(d1, d2, d1, d2)
    if keep == "first":
        return np.einsum("ajbj->ab", t)
    if keep == "second":
        return np.einsum("iaib->ab", t)
    raise ValueError(f"keep must be 'first' or 'second', got {keep!r}")


def vec(a: np.ndarray) -> np.ndarray:
    """Row-major vectorization, so that ``vec(E_ij) = e_i (x) e_j``."""
    a = np.asarray(a)
    if a.ndim != 2:
        raise ShapeError(f"vec expects a matrix, got shape {a.shape}")
    return a.reshape(-1).copy()


def unvec(v: np.ndarray, rows: int, cols: int) -> np.ndarray:
    v = np.asarray(v)
    if v.size != rows * cols:
        raise ShapeError(f"vector of length {v.size} cannot be reshaped to {rows}x{cols}")
    return v.reshape(rows, cols).copy()


def fidelity_direct(p: np.ndarray, q: np.ndarray, psd_tol: float = PSD_TOL) -> float:
    """Fidelity ``||sqrt(P) sqrt(Q)||_1`` of two PSD matrices (not squared)."""
    return trace_norm(sqrtm_psd(p, psd_tol) @ sqrtm_psd(q, psd_tol))


def min_eig(h: np.ndarray) -> float:
    h = np.asarray(h)
    return float(np.linalg.eigvalsh((h + h.conj().T) / 2)[0])


def inner(a: np.ndarray, b: np.ndarray) -> complex:
    """Hilbert-Schmidt inner product ``Tr(a* b)``."""
    return complex(np.vdot(a, b))


def hermitian_basis(d: int) -> np.ndarray:
    """Orthonormal basis of ``Herm(C^d)`` as a ``(d*d, d, d)`` array.

    Diagonal units come first, then for each ``j < k`` the real and
    imaginary off-diagonal elements scaled by ``1/sqrt(2)``.
    """
    basis = np.zeros((d * d, d, d), dtype=complex)
    t = 0
    for j in range(d):
        basis[t, j, j] = 1.0
        t += 1
    r = 1.0 / np.sqrt(2.0)
    for j in range(d):
        for k in range(j + 1, d):
            basis[t, j, k] = basis[t, k, j] = r
            basis[t + 1, j, k] = -1j * r
            basis[t + 1, k, j] = 1j * r
            t += 2
    return basis


def random_unitary(n: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-random unitary from the QR decomposition of a Ginibre matrix."""
    g = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    q, r = np.linalg.qr(g)
    d = np.diag(r)
    return q * (d / np.abs(d))


def random_psd(n: int, rng: np.random.Generator, rank: int | None = None) -> np.ndarray:
    g = rng.standard_normal((n, rank or n)) + 1j * rng.standard_normal((n, rank or n))
    p = g @ g.conj().T
    return (p + p.conj().T) / 2


def random_density(n: int, rng: np.random.Generator, rank: int | None = None) -> np.ndarray:
    p = random_psd(n, rng, rank)
    return p / np.trace(p).real
