"""Observables (POVMs), their structure predicates, and measurement models."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Hashable, Sequence

import numpy as np

from . import linalg as la
from .errors import (
    InvalidDimsError,
    InvalidLabelsError,
    InvalidObservableError,
    RequiresSharpError,
    UnsupportedPointerError,
)
from .maps import Channel, Instrument, KrausMap
from .states import DensityMatrix, as_state, ginibre, random_unitary

OBS_TOL = 1e-9
ZERO_EFFECT_TOL = 1e-12


@dataclass(frozen=True)
class ValidityReport:
    hermitian_violation: float
    psd_violation: float
    completeness_violation: float
    sharp: bool
    tol: float = OBS_TOL

    @property
    def hermitian(self) -> bool:
        return self.hermitian_violation <= self.tol

    @property
    def psd(self) -> bool:
        return self.psd_violation <= self.tol

    @property
    def complete(self) -> bool:
        return self.completeness_violation <= self.tol

    @property
    def valid(self) -> bool:
        return self.hermitian and self.psd and self.complete

    def __str__(self):
        kind = "PVM" if self.valid and self.sharp else "POVM"
        status = "valid" if self.valid else "invalid"
        return (
            f"{status} {kind}: hermitian={self.hermitian_violation:.3e} "
            f"psd={self.psd_violation:.3e} completeness={self.completeness_violation:.3e}"
        )


@dataclass(frozen=True, eq=False)
class Observable:
    """Outcome-indexed effects on a common ``d``-dimensional space.

    Construction validates the POVM conditions unless ``check=False``, which
    exists so that :func:`validate` can inspect broken effect lists.
    """

    effects: tuple[np.ndarray, ...]
    labels: tuple[Hashable, ...] = ()
    check: bool = field(default=True, repr=False)

    def __post_init__(self):
        effects = tuple(la.as_matrix(e) for e in self.effects)
        if not effects:
            raise InvalidObservableError("an observable needs at least one effect")
        d = effects[0].shape[0]
        if any(e.shape != (d, d) for e in effects):
            raise InvalidObservableError("effects must be square matrices of one common size")
        labels = tuple(self.labels) if self.labels else tuple(str(i) for i in range(len(effects)))
        if len(labels) != len(effects):
            raise InvalidLabelsError(f"{len(labels)} labels for {len(effects)} effects")
        if len(set(labels)) != len(labels):
            raise InvalidLabelsError(f"duplicate outcome labels {labels}")
        for e in effects:
            e.setflags(write=False)
        object.__setattr__(self, "effects", effects)
        object.__setattr__(self, "labels", labels)
        if self.check:
            report = validate(self)
            if not report.valid:
                raise InvalidObservableError(str(report))

    @property
    def dim(self) -> int:
        return self.effects[0].shape[0]

    def __len__(self):
        return len(self.effects)

    def effect(self, label) -> np.ndarray:
        return self.effects[self.labels.index(label)]


def validate(obs: Observable, tol: float = OBS_TOL) -> ValidityReport:
    """Report (never raise) on Hermiticity, positivity and completeness."""
    herm = max(la.max_abs(e - e.conj().T) for e in obs.effects)
    psd = 0.0
    for e in obs.effects:
        w = np.linalg.eigvalsh((e + e.conj().T) / 2)
        psd = max(psd, float(-w.min()))
    complete = la.max_abs(sum(obs.effects) - np.eye(obs.dim))
    sharp = all(la.max_abs(e @ e - e) <= tol for e in obs.effects)
    return ValidityReport(herm, psd, complete, sharp, tol)


def is_sharp(obs: Observable, tol: float = OBS_TOL) -> bool:
    """Every effect idempotent."""
    return all(la.max_abs(e @ e - e) <= tol for e in obs.effects)


def effect_rank(e: np.ndarray, tol: float = OBS_TOL) -> int:
    return int(np.sum(np.linalg.eigvalsh((e + e.conj().T) / 2) > tol))


def is_rank_one(obs: Observable, tol: float = OBS_TOL) -> bool:
    """Every nonzero effect has rank one."""
    return all(effect_rank(e, tol) <= 1 for e in obs.effects)


def commutes(x: Observable, y: Observable, tol: float = OBS_TOL) -> bool:
    if x.dim != y.dim:
        raise InvalidDimsError(f"observables act on dimensions {x.dim} and {y.dim}")
    return all(la.max_abs(a @ b - b @ a) <= tol for a in x.effects for b in y.effects)


def marginals_of_joint(g: Observable) -> tuple[Observable, Observable]:
    """Marginal observables of a joint observable labelled by pairs ``(x, y)``.

    The labels must cover a full product grid exactly once; marginal labels
    keep their first-seen order.
    """
    try:
        pairs = [tuple(lab) for lab in g.labels]
    except TypeError:
        raise InvalidLabelsError("joint observable labels must be (x, y) pairs") from None
    if any(len(p) != 2 for p in pairs):
        raise InvalidLabelsError("joint observable labels must be (x, y) pairs")
    xs = list(dict.fromkeys(p[0] for p in pairs))
    ys = list(dict.fromkeys(p[1] for p in pairs))
    if len(set(pairs)) != len(pairs) or len(pairs) != len(xs) * len(ys):
        raise InvalidLabelsError("joint observable labels do not form a product grid")
    table = dict(zip(pairs, g.effects))
    a = [sum(table[(x, y)] for y in ys) for x in xs]
    b = [sum(table[(x, y)] for x in xs) for y in ys]
    return Observable(tuple(a), tuple(xs)), Observable(tuple(b), tuple(ys))


def born_probabilities(rho, obs: Observable) -> np.ndarray:
    """``p_x = Tr[rho A(x)]``, clipped into ``[0, 1]``."""
    rho = as_state(rho)
    if rho.dim != obs.dim:
        raise InvalidDimsError(f"state has dimension {rho.dim}, observable acts on {obs.dim}")
    p = np.array([np.trace(rho.matrix @ e).real for e in obs.effects])
    return np.clip(p, 0.0, 1.0)


def luders_channel(x: Observable) -> Channel:
    """Dephasing channel ``rho -> sum_i X_i rho X_i`` of a sharp observable."""
    if not is_sharp(x):
        raise RequiresSharpError("the Luders channel with projector Kraus operators needs a sharp observable")
    return Channel(tuple(e for e in x.effects if la.max_abs(e) > ZERO_EFFECT_TOL))


@dataclass(frozen=True, eq=False)
class MeasurementModel:
    """Ancilla state, system-ancilla unitary and sharp pointer observable."""

    ancilla_state: DensityMatrix
    unitary: np.ndarray
    pointer: Observable

    def __post_init__(self):
        anc = as_state(self.ancilla_state)
        u = la.as_matrix(self.unitary)
        object.__setattr__(self, "ancilla_state", anc)
        object.__setattr__(self, "unitary", u)
        if self.pointer.dim != anc.dim:
            raise InvalidDimsError(
                f"pointer acts on dimension {self.pointer.dim}, ancilla has {anc.dim}"
            )
        if u.shape[0] % anc.dim or u.shape[0] != u.shape[1]:
            raise InvalidDimsError(f"unitary of shape {u.shape} does not fit ancilla dimension {anc.dim}")
        if not la.is_unitary(u):
            raise InvalidDimsError("measurement-model matrix is not unitary")

    @property
    def system_dim(self) -> int:
        return self.unitary.shape[0] // self.ancilla_state.dim


def model_to_instrument(m: MeasurementModel) -> Instrument:
    """Instrument ``Phi_x(rho) = Tr_a[(1 (x) A'(x)) U (rho (x) s) U^dag (1 (x) A'(x))]``."""
    if not is_sharp(m.pointer):
        raise UnsupportedPointerError("post-measurement states are only defined here for sharp pointers")
    d, da = m.system_dim, m.ancilla_state.dim
    eye_d = np.eye(d, dtype=complex)
    eye_a = np.eye(da, dtype=complex)
    w, q = la.hermitian_eig(m.ancilla_state.matrix)
    w = la.clip_spectrum(w)
    branches = []
    for eff in m.pointer.effects:
        proj = np.kron(eye_d, eff)
        ks = []
        for s, a in zip(w, q.T):
            if s <= ZERO_EFFECT_TOL:
                continue
            embed = np.kron(eye_d, a.reshape(-1, 1))
            for b in range(da):
                k = np.sqrt(s) * np.kron(eye_d, eye_a[[b], :]) @ proj @ m.unitary @ embed
                if la.max_abs(k) > ZERO_EFFECT_TOL:
                    ks.append(k)
        branches.append(KrausMap(tuple(ks) or (np.zeros((d, d), dtype=complex),)))
    return Instrument(m.pointer.labels, tuple(branches))


def model_probabilities(m: MeasurementModel, rho) -> np.ndarray:
    """Right-hand side of the model's Born rule, evaluated on the dilated system."""
    rho = as_state(rho)
    big = m.unitary @ np.kron(rho.matrix, m.ancilla_state.matrix) @ m.unitary.conj().T
    eye_d = np.eye(m.system_dim)
    return np.array([np.trace(big @ np.kron(eye_d, e)).real for e in m.pointer.effects])


# named observables

def pvm_from_basis(u, labels: Sequence[Hashable] = ()) -> Observable:
    """Rank-one PVM whose effects project onto the columns of ``u``."""
    u = la.as_matrix(u)
    return Observable(tuple(la.projector(u[:, i]) for i in range(u.shape[1])), tuple(labels))


def pauli_observable(axis: str) -> Observable:
    """Eigenprojectors of a Pauli matrix, ``+1`` eigenvalue first."""
    axis = axis.lower()
    s = 1 / np.sqrt(2)
    bases = {
        "z": (np.array([[1, 0], [0, 1]]), ("0", "1")),
        "x": (np.array([[s, s], [s, -s]]), ("+", "-")),
        "y": (np.array([[s, s], [1j * s, -1j * s]]), ("+i", "-i")),
    }
    if axis not in bases:
        raise InvalidObservableError(f"unknown Pauli axis {axis!r}")
    u, labels = bases[axis]
    return pvm_from_basis(u, labels)


def trine_povm() -> Observable:
    """Three symmetric qubit effects ``(2/3)|phi_k><phi_k|``."""
    effects = []
    for k in range(3):
        t = 2 * np.pi * k / 3
        v = np.array([np.cos(t / 2), np.sin(t / 2)])
        effects.append(2 / 3 * np.outer(v, v))
    return Observable(tuple(effects))


def trivial_observable(d: int, weights: Sequence[float] = (1.0,)) -> Observable:
    """Effects ``w_i * I``; measures nothing."""
    return Observable(tuple(w * np.eye(d, dtype=complex) for w in weights))


def random_povm(d: int, n: int, seed=None) -> Observable:
    """Random ``n``-outcome POVM ``S^{-1/2} G_k S^{-1/2}`` with Wishart ``G_k``."""
    rng = np.random.default_rng(seed)
    gs = []
    for _ in range(n):
        g = ginibre(d, d, rng)
        gs.append(g @ g.conj().T)
    s_inv_half = la.matrix_power_psd(sum(gs), -0.5)
    return Observable(tuple(s_inv_half @ g @ s_inv_half for g in gs))


def random_pvm(d: int, seed=None) -> Observable:
    """Rank-one PVM in a Haar-random basis."""
    return pvm_from_basis(random_unitary(d, seed))
