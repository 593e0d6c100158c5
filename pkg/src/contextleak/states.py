"""Density matrices, ensembles, contexts and seeded random generators."""

from __future__ import annotations

from dataclasses import dataclass
from typing import TYPE_CHECKING, Sequence

import numpy as np

from . import linalg as la
from .errors import InvalidContextError, InvalidDimsError, InvalidRankError, InvalidStateError

if TYPE_CHECKING:
    from .measurements import Observable

TRACE_TOL = 1e-9
PROB_TOL = 1e-9


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    """Trace-one positive Hermitian operator with declared subsystem dimensions.

    The stored matrix is the Hermitian part of the input, so downstream
    eigen-solvers see an exactly Hermitian array.
    """

    matrix: np.ndarray
    dims: tuple[int, ...] = ()

    def __post_init__(self):
        m = la.as_matrix(self.matrix)
        if m.shape[0] != m.shape[1]:
            raise InvalidStateError(f"density matrix must be square, got {m.shape}")
        dims = self.dims or (m.shape[0],)
        dims = la.check_dims(dims, m.shape[0])
        herm_err = la.max_abs(m - m.conj().T)
        if herm_err > la.EPS_HERM:
            raise InvalidStateError(f"state is not Hermitian (violation {herm_err:.3e})")
        m = (m + m.conj().T) / 2
        tr = np.trace(m).real
        if abs(tr - 1) > TRACE_TOL:
            raise InvalidStateError(f"state has trace {tr:.12g}, expected 1")
        w = np.linalg.eigvalsh(m)
        if w.min() < -la.EPS_PSD:
            raise InvalidStateError(f"state is not positive (min eigenvalue {w.min():.3e})")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)
        object.__setattr__(self, "dims", dims)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def eigvals(self) -> np.ndarray:
        """Ascending spectrum with roundoff negatives clipped to zero."""
        w, _ = la.hermitian_eig(self.matrix)
        return la.clip_spectrum(w)

    def reduce(self, keep: Sequence[int]) -> "DensityMatrix":
        """Reduced state on the subsystems in ``keep``."""
        keep = sorted(keep)
        m = la.partial_trace(self.matrix, self.dims, keep)
        return DensityMatrix(m, tuple(self.dims[k] for k in keep))

    def with_dims(self, dims: Sequence[int]) -> "DensityMatrix":
        return DensityMatrix(self.matrix, tuple(dims))

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.matrix, dtype=dtype)

    def __repr__(self):
        return f"DensityMatrix(dim={self.dim}, dims={self.dims})"


def as_state(rho, dims: Sequence[int] = ()) -> DensityMatrix:
    if isinstance(rho, DensityMatrix):
        return rho if not dims or tuple(dims) == rho.dims else rho.with_dims(dims)
    return DensityMatrix(np.asarray(rho), tuple(dims))


def tensor_states(*states: DensityMatrix) -> DensityMatrix:
    """Product state; subsystem dims are concatenated."""
    dims = tuple(d for s in states for d in s.dims)
    return DensityMatrix(la.kron(*(s.matrix for s in states)), dims)


@dataclass(frozen=True, eq=False)
class Ensemble:
    """Probability-weighted list of states sharing one set of dims.

    Probabilities that sum to within ``1e-9`` of one are renormalised;
    anything further off is rejected.
    """

    members: tuple[tuple[float, DensityMatrix], ...]

    def __post_init__(self):
        members = tuple((float(p), as_state(s)) for p, s in self.members)
        if not members:
            raise InvalidStateError("ensemble needs at least one member")
        probs = np.array([p for p, _ in members])
        if np.any(probs < -PROB_TOL) or np.any(probs > 1 + PROB_TOL):
            raise InvalidStateError(f"ensemble probabilities out of [0, 1]: {probs}")
        total = probs.sum()
        if abs(total - 1) > PROB_TOL:
            raise InvalidStateError(f"ensemble probabilities sum to {total:.12g}")
        dims = members[0][1].dims
        if any(s.dims != dims for _, s in members):
            raise InvalidDimsError("ensemble members have different dims")
        probs = np.clip(probs, 0.0, None) / total
        members = tuple((float(p), s) for p, (_, s) in zip(probs, members))
        object.__setattr__(self, "members", members)

    @property
    def probabilities(self) -> np.ndarray:
        return np.array([p for p, _ in self.members])

    @property
    def states(self) -> list[DensityMatrix]:
        return [s for _, s in self.members]

    @property
    def dims(self) -> tuple[int, ...]:
        return self.members[0][1].dims

    def average(self) -> DensityMatrix:
        m = sum(p * s.matrix for p, s in self.members)
        return DensityMatrix(m, self.dims)

    def map(self, fn) -> "Ensemble":
        """Apply ``fn`` (a state -> state callable, e.g. a channel) to every member."""
        return Ensemble(tuple((p, as_state(fn(s))) for p, s in self.members))

    def __len__(self):
        return len(self.members)


@dataclass(frozen=True, eq=False)
class Context:
    """A state together with Alice's observable ``x_obs`` and Eve's ``y_obs``.

    ``y_obs`` must act on the output space of the instrument Alice uses for
    ``x_obs``; that check happens where the instrument is chosen.
    """

    state: DensityMatrix
    x_obs: "Observable"
    y_obs: "Observable"

    def __post_init__(self):
        object.__setattr__(self, "state", as_state(self.state))
        if self.x_obs.dim != self.state.dim:
            raise InvalidContextError(
                f"observable X acts on dimension {self.x_obs.dim}, state has dimension {self.state.dim}"
            )


def maximally_mixed(d: int) -> DensityMatrix:
    if d < 1:
        raise InvalidDimsError(f"dimension must be positive, got {d}")
    return DensityMatrix(np.eye(d, dtype=complex) / d)


def pure(v, dims: Sequence[int] = ()) -> DensityMatrix:
    v = np.asarray(v, dtype=complex).reshape(-1)
    norm2 = float(np.vdot(v, v).real)
    if norm2 <= 0:
        raise InvalidStateError("cannot build a pure state from the zero vector")
    return DensityMatrix(np.outer(v, v.conj()) / norm2, tuple(dims))


def basis_state(d: int, i: int) -> DensityMatrix:
    return DensityMatrix(la.projector(la.ket(d, i)))


def _rng(seed) -> np.random.Generator:
    return np.random.default_rng(seed)


def ginibre(d: int, k: int, seed) -> np.ndarray:
    rng = _rng(seed)
    return (rng.standard_normal((d, k)) + 1j * rng.standard_normal((d, k))) / np.sqrt(2)


def random_density(d: int, rank: int | None = None, seed=None) -> DensityMatrix:
    """Ginibre-induced random state ``G G^dag / Tr`` with ``G`` of shape ``d x rank``."""
    rank = d if rank is None else rank
    if not 1 <= rank <= d:
        raise InvalidRankError(f"rank must be in [1, {d}], got {rank}")
    g = ginibre(d, rank, seed)
    m = g @ g.conj().T
    return DensityMatrix(m / np.trace(m).real)


def random_unitary(d: int, seed=None) -> np.ndarray:
    """Haar unitary from the QR decomposition of a Ginibre matrix, phases fixed."""
    if d < 1:
        raise InvalidDimsError(f"dimension must be positive, got {d}")
    z = ginibre(d, d, seed)
    q, r = np.linalg.qr(z)
    ph = np.diagonal(r) / np.abs(np.diagonal(r))
    return q * ph


def random_pure(d: int, seed=None) -> DensityMatrix:
    return random_density(d, 1, seed)
