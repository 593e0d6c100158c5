"""
Dense complex matrix kernel.

Matrices are plain 2-D ``numpy`` arrays of dtype ``complex128``. Every routine
here is a pure function; inputs are never modified in place.
"""

from __future__ import annotations

from functools import reduce
from typing import Iterable, Sequence

import numpy as np

from .errors import InvalidDimsError, NotHermitianError, NotPSDError

EPS_HERM = 1e-9
EPS_PSD = 1e-9
EPS_RECON = 1e-9
# eigenvalues this close below zero are treated as roundoff
EPS_CLIP = 1e-12

SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)


def as_matrix(m) -> np.ndarray:
    """Coerce ``m`` to a finite 2-D complex array."""
    a = np.asarray(m, dtype=complex)
    if a.ndim == 1:
        a = a.reshape(-1, 1)
    if a.ndim != 2:
        raise InvalidDimsError(f"expected a 2-D matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise InvalidDimsError("matrix has non-finite entries")
    return a


def max_abs(m) -> float:
    """Max-norm, the entrywise largest modulus."""
    a = np.asarray(m)
    return float(np.abs(a).max()) if a.size else 0.0


def dagger(m) -> np.ndarray:
    """Conjugate transpose."""
    return as_matrix(m).conj().T


def kron(*ms) -> np.ndarray:
    """Kronecker product of one or more matrices, left to right."""
    if not ms:
        raise InvalidDimsError("kron needs at least one factor")
    return reduce(np.kron, (as_matrix(m) for m in ms))


def ket(d: int, i: int) -> np.ndarray:
    """Column basis vector ``|i>`` in dimension ``d``."""
    v = np.zeros((d, 1), dtype=complex)
    v[i, 0] = 1.0
    return v


def projector(v) -> np.ndarray:
    """``|v><v|`` for a (not necessarily normalised) vector."""
    v = as_matrix(v).reshape(-1, 1)
    return v @ v.conj().T


def check_dims(dims: Sequence[int], size: int) -> tuple[int, ...]:
    dims = tuple(int(d) for d in dims)
    if not dims or any(d < 1 for d in dims):
        raise InvalidDimsError(f"subsystem dimensions must be positive, got {dims}")
    if int(np.prod(dims)) != size:
        raise InvalidDimsError(f"dims {dims} do not multiply to matrix dimension {size}")
    return dims


def partial_trace(m, dims: Sequence[int], keep: Iterable[int]) -> np.ndarray:
    """Trace out every subsystem not listed in ``keep``.

    Kept subsystems appear in ascending index order in the result. Keeping
    nothing (an empty ``keep``) returns the 1x1 full trace.
    """
    a = as_matrix(m)
    if a.shape[0] != a.shape[1]:
        raise InvalidDimsError(f"partial trace needs a square matrix, got {a.shape}")
    dims = check_dims(dims, a.shape[0])
    keep = sorted(set(int(k) for k in keep))
    if any(k < 0 or k >= len(dims) for k in keep):
        raise InvalidDimsError(f"keep indices {keep} out of range for {len(dims)} subsystems")

    t = a.reshape(dims + dims)
    n = len(dims)
    for idx in reversed(range(len(dims))):
        if idx in keep:
            continue
        t = np.trace(t, axis1=idx, axis2=idx + n)
        n -= 1
    d_keep = int(np.prod([dims[k] for k in keep])) if keep else 1
    return t.reshape(d_keep, d_keep)


def is_hermitian(m, tol: float = EPS_HERM) -> bool:
    a = as_matrix(m)
    return a.shape[0] == a.shape[1] and max_abs(a - a.conj().T) <= tol


def hermitian_eig(m, tol: float = EPS_HERM) -> tuple[np.ndarray, np.ndarray]:
    """Eigen-decomposition of a Hermitian matrix.

    Returns ascending real eigenvalues and a unitary whose columns are the
    matching eigenvectors. Backed by LAPACK's ``zheevd`` via ``numpy``.
    """
    a = as_matrix(m)
    if a.shape[0] != a.shape[1]:
        raise NotHermitianError(f"matrix of shape {a.shape} is not square")
    herm_err = max_abs(a - a.conj().T)
    if herm_err > tol:
        raise NotHermitianError(f"matrix is not Hermitian (max violation {herm_err:.3e})")
    w, q = np.linalg.eigh((a + a.conj().T) / 2)
    return w, q


def clip_spectrum(w: np.ndarray, tol: float = EPS_PSD) -> np.ndarray:
    """Zero out slightly negative eigenvalues; raise on genuinely negative ones."""
    w = np.asarray(w, dtype=float)
    if w.size and w.min() < -tol:
        raise NotPSDError(f"negative eigenvalue {w.min():.3e} below tolerance {tol:.0e}")
    return np.where(w < 0, 0.0, w)


def is_psd(m, tol: float = EPS_PSD) -> bool:
    try:
        w, _ = hermitian_eig(m)
    except NotHermitianError:
        return False
    return bool(w.min() >= -tol)


def matrix_sqrt_psd(m) -> np.ndarray:
    """Principal square root of a positive semidefinite matrix."""
    w, q = hermitian_eig(m)
    w = clip_spectrum(w)
    return (q * np.sqrt(w)) @ q.conj().T


def matrix_power_psd(m, power: float) -> np.ndarray:
    """``m**power`` on the support of a PSD matrix (pseudo-inverse for negative powers)."""
    w, q = hermitian_eig(m)
    w = clip_spectrum(w)
    wp = np.zeros_like(w)
    nz = w > EPS_CLIP
    wp[nz] = w[nz] ** power
    return (q * wp) @ q.conj().T


def is_unitary(u, tol: float = EPS_RECON) -> bool:
    a = as_matrix(u)
    if a.shape[0] != a.shape[1]:
        return False
    return max_abs(a.conj().T @ a - np.eye(a.shape[0])) <= tol


def is_isometry(v, tol: float = EPS_RECON) -> bool:
    a = as_matrix(v)
    return max_abs(a.conj().T @ a - np.eye(a.shape[1])) <= tol
