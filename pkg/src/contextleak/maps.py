"""
Completely positive maps in Kraus form: trace non-increasing maps, channels
and instruments, plus the operations that act with them on states.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Hashable, Sequence

import numpy as np

from . import linalg as la
from .errors import InvalidDimsError, InvalidInstrumentError, InvalidMapError
from .states import DensityMatrix, Ensemble, as_state, random_unitary

MAP_TOL = 1e-9
WEIGHT_TOL = 1e-12


def _kraus_tuple(kraus, in_dim=None, out_dim=None):
    ks = tuple(la.as_matrix(k) for k in kraus)
    if not ks:
        raise InvalidMapError("a Kraus map needs at least one operator")
    shape = ks[0].shape
    if any(k.shape != shape for k in ks):
        raise InvalidMapError("Kraus operators have inconsistent shapes")
    if in_dim is not None and shape[1] != in_dim:
        raise InvalidDimsError(f"Kraus operators take dimension {shape[1]}, expected {in_dim}")
    if out_dim is not None and shape[0] != out_dim:
        raise InvalidDimsError(f"Kraus operators return dimension {shape[0]}, expected {out_dim}")
    for k in ks:
        k.setflags(write=False)
    return ks


def kraus_gram(kraus: Sequence[np.ndarray]) -> np.ndarray:
    """``sum_k K_k^dag K_k``; the effect the map assigns to its output."""
    return sum(k.conj().T @ k for k in kraus)


@dataclass(frozen=True, eq=False)
class KrausMap:
    """Completely positive, trace non-increasing map ``rho -> sum_k K rho K^dag``."""

    kraus: tuple[np.ndarray, ...]

    def __post_init__(self):
        ks = _kraus_tuple(self.kraus)
        object.__setattr__(self, "kraus", ks)
        w = np.linalg.eigvalsh(kraus_gram(ks))
        if w.max() > 1 + MAP_TOL:
            raise InvalidMapError(f"map increases trace (max Kraus-gram eigenvalue {w.max():.12g})")

    @property
    def in_dim(self) -> int:
        return self.kraus[0].shape[1]

    @property
    def out_dim(self) -> int:
        return self.kraus[0].shape[0]

    def effect(self) -> np.ndarray:
        return kraus_gram(self.kraus)

    def apply(self, m) -> np.ndarray:
        """Action on an arbitrary operator; the result is not renormalised."""
        m = np.asarray(m, dtype=complex)
        if m.shape != (self.in_dim, self.in_dim):
            raise InvalidDimsError(f"map expects a {self.in_dim}x{self.in_dim} operator, got {m.shape}")
        return sum(k @ m @ k.conj().T for k in self.kraus)

    def __call__(self, m) -> np.ndarray:
        return self.apply(np.asarray(m))


class Channel(KrausMap):
    """Trace-preserving :class:`KrausMap`."""

    def __post_init__(self):
        super().__post_init__()
        err = la.max_abs(self.effect() - np.eye(self.in_dim))
        if err > MAP_TOL:
            raise InvalidMapError(f"channel is not trace preserving (violation {err:.3e})")

    def on_state(self, rho: DensityMatrix, dims: Sequence[int] = ()) -> DensityMatrix:
        return DensityMatrix(self.apply(as_state(rho).matrix), tuple(dims))


@dataclass(frozen=True, eq=False)
class Instrument:
    """Outcome-indexed Kraus maps whose sum is a channel."""

    outcomes: tuple[Hashable, ...]
    branches: tuple[KrausMap, ...]

    def __post_init__(self):
        outcomes = tuple(self.outcomes)
        branches = tuple(b if isinstance(b, KrausMap) else KrausMap(tuple(b)) for b in self.branches)
        if len(outcomes) != len(branches):
            raise InvalidInstrumentError("number of outcome labels and branches differ")
        if len(set(outcomes)) != len(outcomes):
            raise InvalidInstrumentError(f"duplicate outcome labels {outcomes}")
        if not branches:
            raise InvalidInstrumentError("an instrument needs at least one branch")
        shapes = {(b.out_dim, b.in_dim) for b in branches}
        if len(shapes) != 1:
            raise InvalidInstrumentError(f"branches have inconsistent dimensions {shapes}")
        total = sum(b.effect() for b in branches)
        err = la.max_abs(total - np.eye(branches[0].in_dim))
        if err > MAP_TOL:
            raise InvalidInstrumentError(f"branches do not sum to a channel (violation {err:.3e})")
        object.__setattr__(self, "outcomes", outcomes)
        object.__setattr__(self, "branches", branches)

    @property
    def in_dim(self) -> int:
        return self.branches[0].in_dim

    @property
    def out_dim(self) -> int:
        return self.branches[0].out_dim

    def branch(self, label) -> KrausMap:
        return self.branches[self.outcomes.index(label)]

    def __len__(self):
        return len(self.branches)


def identity_channel(d: int) -> Channel:
    return Channel((np.eye(d, dtype=complex),))


def unitary_channel(u) -> Channel:
    u = la.as_matrix(u)
    if not la.is_unitary(u):
        raise InvalidMapError("matrix is not unitary")
    return Channel((u,))


def constant_channel(in_dim: int, eta: DensityMatrix) -> Channel:
    """Completely depolarising channel ``T -> Tr(T) eta``."""
    return Channel(_depolarizing_kraus(np.eye(in_dim, dtype=complex), as_state(eta)))


def _depolarizing_kraus(sqrt_effect: np.ndarray, eta: DensityMatrix) -> tuple[np.ndarray, ...]:
    # K_{j,k} = sqrt(lambda_j) |e_j><k| sqrt(B)
    w, q = la.hermitian_eig(eta.matrix)
    w = la.clip_spectrum(w)
    d_in = sqrt_effect.shape[0]
    ks = []
    for lam, e in zip(w, q.T):
        if lam <= WEIGHT_TOL:
            continue
        for k in range(d_in):
            bra_k = np.zeros((1, d_in), dtype=complex)
            bra_k[0, k] = 1.0
            ks.append(np.sqrt(lam) * e.reshape(-1, 1) @ bra_k @ sqrt_effect)
    return tuple(ks)


def compose(outer: KrausMap, inner: KrausMap) -> KrausMap:
    """``outer o inner`` with Kraus list ``{A_i B_j}``."""
    if outer.in_dim != inner.out_dim:
        raise InvalidDimsError(
            f"cannot compose: outer map takes dimension {outer.in_dim}, inner returns {inner.out_dim}"
        )
    ks = tuple(a @ b for a in outer.kraus for b in inner.kraus)
    cls = Channel if isinstance(outer, Channel) and isinstance(inner, Channel) else KrausMap
    return cls(ks)


def tensor_identity(phi: KrausMap, d_env: int) -> KrausMap:
    """``phi (x) id`` acting on the first factor of a ``H (x) C^d_env`` space."""
    eye = np.eye(d_env, dtype=complex)
    cls = Channel if isinstance(phi, Channel) else KrausMap
    return cls(tuple(np.kron(k, eye) for k in phi.kraus))


def choi_matrix(phi: KrausMap) -> np.ndarray:
    """Unnormalised Choi operator ``sum_ij |i><j| (x) phi(|i><j|)``."""
    d = phi.in_dim
    out = np.zeros((d * phi.out_dim, d * phi.out_dim), dtype=complex)
    eye = np.eye(d, dtype=complex)
    for k in phi.kraus:
        # |K>> = sum_i |i> (x) K|i>
        v = sum(np.kron(eye[:, [i]], k[:, [i]]) for i in range(d))
        out += v @ v.conj().T
    return out


def same_map(a: KrausMap, b: KrausMap, tol: float = MAP_TOL) -> bool:
    if (a.in_dim, a.out_dim) != (b.in_dim, b.out_dim):
        return False
    return la.max_abs(choi_matrix(a) - choi_matrix(b)) <= tol


def same_instrument(a: Instrument, b: Instrument, tol: float = MAP_TOL) -> bool:
    if a.outcomes != b.outcomes:
        return False
    return all(same_map(x, y, tol) for x, y in zip(a.branches, b.branches))


def apply_branch(phi: KrausMap, rho) -> tuple[float, DensityMatrix | None]:
    """Probability of the branch and the normalised post-measurement state.

    The state is ``None`` when the weight is at most ``1e-12``.
    """
    rho = as_state(rho)
    out = phi.apply(rho.matrix)
    weight = float(np.trace(out).real)
    if weight <= WEIGHT_TOL:
        return max(weight, 0.0), None
    return min(weight, 1.0), DensityMatrix(out / weight)


def apply_instrument(inst: Instrument, rho) -> Ensemble:
    """Ensemble of surviving branches; zero-weight outcomes are dropped."""
    rho = as_state(rho)
    if rho.dim != inst.in_dim:
        raise InvalidDimsError(f"instrument takes dimension {inst.in_dim}, state has {rho.dim}")
    members = []
    for b in inst.branches:
        w, s = apply_branch(b, rho)
        if s is not None:
            members.append((w, s))
    return Ensemble(tuple(members))


def outcome_distribution(inst: Instrument, rho) -> np.ndarray:
    """Branch weights for every outcome, zeros included."""
    rho = as_state(rho)
    return np.array([max(float(np.trace(b.apply(rho.matrix)).real), 0.0) for b in inst.branches])


def induced_channel(inst: Instrument) -> Channel:
    """Channel obtained by forgetting the outcome."""
    try:
        return Channel(tuple(k for b in inst.branches for k in b.kraus))
    except InvalidMapError as exc:
        raise InvalidInstrumentError(str(exc)) from exc


def random_isometry(d_in: int, d_out: int, seed=None) -> np.ndarray:
    if d_out < d_in:
        raise InvalidDimsError(f"isometry cannot map dimension {d_in} into {d_out}")
    return random_unitary(d_out, seed)[:, :d_in]


def random_channel(d_in: int, d_out: int | None = None, n_kraus: int = 2, seed=None) -> Channel:
    """Random channel from a Haar-random Stinespring isometry.

    ``n_kraus`` is raised if needed so that ``n_kraus * d_out >= d_in``.
    """
    d_out = d_in if d_out is None else d_out
    n_kraus = max(n_kraus, -(-d_in // d_out))
    v = random_isometry(d_in, d_out * n_kraus, seed)
    return Channel(tuple(v[j * d_out:(j + 1) * d_out, :] for j in range(n_kraus)))
