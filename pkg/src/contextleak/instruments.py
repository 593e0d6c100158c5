"""
Instrument constructors: Luders, Naimark-dilation parent instruments,
completely depolarising instruments and post-processing by a channel.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import linalg as la
from .errors import InvalidDimsError, InvalidParameterError, LabelError
from .maps import (
    Channel,
    Instrument,
    KrausMap,
    _depolarizing_kraus,
    apply_branch,
    apply_instrument,
    choi_matrix,
    induced_channel,
    random_channel,
    unitary_channel,
)
from .measurements import Observable, is_rank_one, is_sharp, random_povm
from .states import as_state, random_density, random_unitary

IMPL_TOL = 1e-9

__all__ = [
    "NaimarkExtension",
    "apply_branch",
    "apply_instrument",
    "choi_matrix",
    "depolarizing_instrument",
    "implements",
    "induced_channel",
    "luders_instrument",
    "naimark_extension",
    "parent_instrument",
    "post_process",
    "random_instrument",
]


def implements(inst: Instrument, obs: Observable, tol: float = IMPL_TOL) -> bool:
    """True iff every branch's Kraus gram equals the matching effect."""
    if set(inst.outcomes) != set(obs.labels):
        raise LabelError(f"instrument outcomes {inst.outcomes} differ from observable labels {obs.labels}")
    if inst.in_dim != obs.dim:
        return False
    return all(la.max_abs(inst.branch(lab).effect() - obs.effect(lab)) <= tol for lab in obs.labels)


def luders_instrument(obs: Observable) -> Instrument:
    """One Kraus operator ``sqrt(A(x))`` per outcome."""
    return Instrument(obs.labels, tuple(KrausMap((la.matrix_sqrt_psd(e),)) for e in obs.effects))


@dataclass(frozen=True, eq=False)
class NaimarkExtension:
    """Isometry ``V: H -> K`` and a PVM on ``K`` compressing to the source observable."""

    isometry: np.ndarray
    pvm: Observable
    source: Observable

    @property
    def k_dim(self) -> int:
        return self.isometry.shape[0]

    def max_violation(self) -> float:
        """Largest of the isometry and compression residuals."""
        v = self.isometry
        err = la.max_abs(v.conj().T @ v - np.eye(v.shape[1]))
        for big, small in zip(self.pvm.effects, self.source.effects):
            err = max(err, la.max_abs(v.conj().T @ big @ v - small))
        return err


def naimark_extension(obs: Observable) -> NaimarkExtension:
    """Canonical dilation on ``K = H (x) C^n``: ``V|psi> = sum_x sqrt(A(x))|psi> (x) |x>``."""
    n, d = len(obs), obs.dim
    eye_n = np.eye(n, dtype=complex)
    v = sum(np.kron(la.matrix_sqrt_psd(e), eye_n[:, [x]]) for x, e in enumerate(obs.effects))
    pvm = Observable(
        tuple(np.kron(np.eye(d), la.projector(eye_n[:, x])) for x in range(n)), obs.labels
    )
    return NaimarkExtension(v, pvm, obs)


def parent_instrument(obs: Observable, force_dilation: bool = False) -> Instrument:
    """Instrument whose induced channel is ``rho -> sum_x Ahat(x) V rho V^dag Ahat(x)``.

    Sharp rank-one observables use ``V = I`` (so the result is the Luders
    instrument on the same space) unless ``force_dilation`` is set.
    """
    if not force_dilation and is_sharp(obs) and is_rank_one(obs):
        return Instrument(obs.labels, tuple(KrausMap((e,)) for e in obs.effects))
    ext = naimark_extension(obs)
    return Instrument(obs.labels, tuple(KrausMap((p @ ext.isometry,)) for p in ext.pvm.effects))


def depolarizing_instrument(obs: Observable, eta) -> Instrument:
    """Branch ``y`` prepares ``eta`` with probability ``Tr[rho B(y)]``."""
    eta = as_state(eta)
    branches = tuple(KrausMap(_depolarizing_kraus(la.matrix_sqrt_psd(e), eta)) for e in obs.effects)
    return Instrument(obs.labels, branches)


def post_process(theta: Channel, inst: Instrument) -> Instrument:
    """Apply ``theta`` after every branch of ``inst``."""
    if theta.in_dim != inst.out_dim:
        raise InvalidDimsError(f"channel takes dimension {theta.in_dim}, instrument outputs {inst.out_dim}")
    branches = tuple(KrausMap(tuple(t @ k for t in theta.kraus for k in b.kraus)) for b in inst.branches)
    return Instrument(inst.outcomes, branches)


def random_instrument(d: int, n_outcomes: int, seed=None, kind: str = "parent-unitary") -> tuple[Instrument, Observable]:
    """Random instrument together with the observable it implements.

    ``kind`` selects the family:

    * ``"parent-unitary"``: parent of a random POVM followed by a random unitary
    * ``"luders"``: Luders instrument of a random POVM
    * ``"parent-channel"``: parent followed by a random non-unitary channel
    * ``"depolarizing"``: depolarising instrument to a random state
    """
    rng = np.random.default_rng(seed)
    obs = random_povm(d, n_outcomes, rng)
    if kind == "luders":
        return luders_instrument(obs), obs
    if kind == "depolarizing":
        return depolarizing_instrument(obs, random_density(d, None, rng)), obs
    parent = parent_instrument(obs)
    if kind == "parent-unitary":
        return post_process(unitary_channel(random_unitary(parent.out_dim, rng)), parent), obs
    if kind == "parent-channel":
        return post_process(random_channel(parent.out_dim, d, 2, rng), parent), obs
    raise InvalidParameterError(f"unknown random instrument kind {kind!r}")
