"""Entropic functionals and two-qubit concurrence. All values are in nats."""

from __future__ import annotations

from typing import Sequence

import numpy as np

from . import linalg as la
from .errors import InvalidDimsError
from .states import DensityMatrix, Ensemble, as_state

NEG_TOL = 1e-9
CONC_FLOOR = 1e-13
_SYY = np.kron(la.SIGMA_Y, la.SIGMA_Y)


def shannon(probs) -> float:
    """Shannon entropy of a probability vector, ``0 ln 0 = 0``."""
    p = np.asarray(probs, dtype=float)
    p = p[p > 0]
    return float(-(p * np.log(p)).sum())


def entropy(rho) -> float:
    """von Neumann entropy ``-Tr rho ln rho``."""
    return shannon(as_state(rho).eigvals())


def old_information(rho) -> float:
    """``ln d - S(rho)``."""
    rho = as_state(rho)
    return float(np.log(rho.dim)) - entropy(rho)


def _clip_nonneg(value: float) -> float:
    return 0.0 if -NEG_TOL <= value < 0 else value


def holevo_chi(e: Ensemble) -> float:
    """``S(sum p rho) - sum p S(rho)``; zero-weight members contribute nothing."""
    avg = e.average()
    mixed = sum(p * entropy(s) for p, s in e.members if p > 0)
    return _clip_nonneg(entropy(avg) - mixed)


def _bipartite(rho, dims: Sequence[int] | None) -> DensityMatrix:
    rho = as_state(rho, dims or ())
    if len(rho.dims) != 2:
        raise InvalidDimsError(f"expected two subsystems, got dims {rho.dims}")
    return rho


def mutual_information(rho, dims: Sequence[int] | None = None) -> float:
    """``S(A) + S(B) - S(AB)``."""
    rho = _bipartite(rho, dims)
    val = entropy(rho.reduce([0])) + entropy(rho.reduce([1])) - entropy(rho)
    return _clip_nonneg(val)


def conditional_entropy(rho, dims: Sequence[int] | None = None, condition_on: int = 1) -> float:
    """``S(AB) - S(condition_on)``; can be negative."""
    rho = _bipartite(rho, dims)
    if condition_on not in (0, 1):
        raise InvalidDimsError(f"condition_on must be 0 or 1, got {condition_on}")
    return entropy(rho) - entropy(rho.reduce([condition_on]))


def coherent_information(rho_am, dims: Sequence[int] | None = None) -> float:
    """``S(A) - S(AM)`` for a state ordered ``(A, M)``; can be negative."""
    rho = _bipartite(rho_am, dims)
    return entropy(rho.reduce([0])) - entropy(rho)


def concurrence(rho) -> float:
    """Wootters concurrence from ``R = sqrt(rho) rho~ sqrt(rho)``.

    ``R = M M^dag`` with ``M = sqrt(rho) (s_y (x) s_y) sqrt(rho)^*``, so the
    square roots of its eigenvalues are the singular values of ``M``; taking
    them directly avoids square-rooting roundoff in the small eigenvalues.
    Eigenvalues of ``rho`` below ``CONC_FLOOR`` are treated as exact zeros for
    the same reason.
    """
    rho = as_state(rho)
    if rho.dim != 4 or rho.dims not in ((4,), (2, 2)):
        raise InvalidDimsError(f"concurrence needs a two-qubit state, got dims {rho.dims}")
    w, v = la.hermitian_eig(rho.matrix)
    w = np.where(w > CONC_FLOOR, w, 0.0)
    root = (v * np.sqrt(w)) @ v.conj().T
    m = root @ _SYY @ root.conj()
    lam = np.linalg.svd(m, compute_uv=False)
    return max(0.0, float(lam[0] - lam[1] - lam[2] - lam[3]))
