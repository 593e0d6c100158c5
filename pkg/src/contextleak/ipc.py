"""
Incompatibility of a physical context.

Two families of measures live here. The entropy-difference measure takes a
state and two sharp observables and compares the entropy after Alice's
dephasing with the entropy after Eve's dephasing on top of it. The
Holevo-based leakage instead tracks the accessible information of Alice's
ensemble before and after Eve's (outcome-forgetting) channel; with parent
instruments on both sides it gives the modified context measure.

Memory variants take a bipartite state on ``A (x) M`` and measure only the
``A`` factor with rank-one projective observables.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidContextError, InvalidDimsError, RequiresSharpError
from .info import coherent_information, entropy, holevo_chi
from .instruments import depolarizing_instrument, parent_instrument
from .maps import Instrument, apply_instrument, induced_channel, tensor_identity
from .measurements import Observable, commutes, is_rank_one, is_sharp, luders_channel
from .states import Context, DensityMatrix, Ensemble, as_state

TOL = 1e-9


def _require_sharp(*observables: Observable):
    for obs in observables:
        if not is_sharp(obs):
            raise RequiresSharpError("this measure is defined for sharp observables only")


def _require_sharp_rank_one(*observables: Observable):
    for obs in observables:
        if not (is_sharp(obs) and is_rank_one(obs)):
            raise RequiresSharpError("this measure needs sharp rank-one observables")


def old_ipc(rho, x: Observable, y: Observable) -> float:
    """``S(N_Y(N_X(rho))) - S(N_X(rho))`` for sharp ``x`` and ``y``."""
    rho = as_state(rho)
    _require_sharp(x, y)
    if not (x.dim == y.dim == rho.dim):
        raise InvalidDimsError(f"dimension mismatch: state {rho.dim}, X {x.dim}, Y {y.dim}")
    after_x = luders_channel(x).on_state(rho)
    after_y = luders_channel(y).on_state(after_x)
    return entropy(after_y) - entropy(after_x)


def old_ipc_generalized(rho, inst_a: Instrument, inst_b: Instrument) -> float:
    """Entropy-difference measure with arbitrary instruments for Alice and Eve.

    Can be negative: an Eve who re-prepares a pure state drives it to
    ``-S(Lambda_A(rho))``.
    """
    rho = as_state(rho)
    if inst_a.in_dim != rho.dim or inst_b.in_dim != inst_a.out_dim:
        raise InvalidDimsError(
            f"cannot chain state ({rho.dim}) -> Alice ({inst_a.in_dim}->{inst_a.out_dim})"
            f" -> Eve ({inst_b.in_dim}->{inst_b.out_dim})"
        )
    after_a = induced_channel(inst_a).on_state(rho)
    after_b = induced_channel(inst_b).on_state(after_a)
    return entropy(after_b) - entropy(after_a)


@dataclass(frozen=True, eq=False)
class LeakReport:
    chi_alice: float
    chi_after_eve: float
    leak: float
    alice_ensemble: Ensemble
    eve_channel_id: str = "custom"


def chi_alice(rho, inst_a: Instrument) -> tuple[float, Ensemble]:
    """Holevo quantity of the ensemble Alice's instrument prepares from ``rho``."""
    ens = apply_instrument(inst_a, rho)
    return holevo_chi(ens), ens


def leak(rho, inst_a: Instrument, inst_b: Instrument, eve_channel_id: str = "custom") -> LeakReport:
    """Drop in Holevo quantity when Eve's induced channel acts on every branch state."""
    rho = as_state(rho)
    if inst_b.in_dim != inst_a.out_dim:
        raise InvalidDimsError(
            f"Eve's instrument takes dimension {inst_b.in_dim}, Alice's outputs {inst_a.out_dim}"
        )
    chi_a, ens = chi_alice(rho, inst_a)
    eve = induced_channel(inst_b)
    chi_b = holevo_chi(ens.map(eve.on_state))
    return LeakReport(chi_a, chi_b, chi_a - chi_b, ens, eve_channel_id)


def min_leak_over_eve(rho, inst_a: Instrument, y: Observable) -> LeakReport:
    """Leak when Eve measures ``y`` with its parent instrument."""
    if y.dim != inst_a.out_dim:
        raise InvalidDimsError(f"Y acts on dimension {y.dim}, Alice's instrument outputs {inst_a.out_dim}")
    return leak(rho, inst_a, parent_instrument(y), "parent")


def alice_max_instrument(x: Observable) -> Instrument:
    """Instrument for ``x`` with maximal Holevo quantity: the parent instrument.

    Sharp rank-one observables give the Luders instrument on the input space.
    """
    return parent_instrument(x)


def _context(c_or_rho, x=None, y=None) -> Context:
    if isinstance(c_or_rho, Context):
        return c_or_rho
    return Context(as_state(c_or_rho), x, y)


def ipc_modified(c, x: Observable | None = None, y: Observable | None = None) -> float:
    """Modified context measure: minimal leak with Alice's maximal instrument.

    Accepts a :class:`Context` or ``(rho, x, y)``. ``y`` must act on the output
    space of Alice's parent instrument, i.e. on ``H`` for sharp rank-one
    ``x`` and on ``H (x) C^n`` otherwise.
    """
    c = _context(c, x, y)
    inst_a = alice_max_instrument(c.x_obs)
    if c.y_obs.dim != inst_a.out_dim:
        raise InvalidContextError(
            f"Y acts on dimension {c.y_obs.dim} but Alice's parent instrument outputs dimension {inst_a.out_dim}"
        )
    return min_leak_over_eve(c.state, inst_a, c.y_obs).leak


def sharp_relation_terms(rho, x: Observable, y: Observable) -> tuple[float, float]:
    """``(sum_x p_x S(N_Y(rho_x)), old_ipc)`` for sharp rank-one ``x`` and ``y``."""
    _require_sharp_rank_one(x, y)
    ens = apply_instrument(parent_instrument(x), rho)
    ny = luders_channel(y)
    dephased = sum(p * entropy(ny.on_state(s)) for p, s in ens.members)
    return dephased, old_ipc(rho, x, y)


def sharp_relation_residual(rho, x: Observable, y: Observable) -> float:
    """Gap between the modified measure and ``sum p_x S(N_Y(rho_x)) - old_ipc``."""
    dephased, old = sharp_relation_terms(rho, x, y)
    return abs(ipc_modified(rho, x, y) - (dephased - old))


# memory-conditioned variants


@dataclass(frozen=True, eq=False)
class MemoryContext:
    """Joint state on ``A (x) M`` with sharp rank-one observables on ``A``."""

    joint_state: DensityMatrix
    x_obs: Observable
    y_obs: Observable

    def __post_init__(self):
        js = as_state(self.joint_state)
        if len(js.dims) != 2:
            raise InvalidContextError(f"joint state must declare two subsystems (A, M), got dims {js.dims}")
        object.__setattr__(self, "joint_state", js)
        for name, obs in (("X", self.x_obs), ("Y", self.y_obs)):
            if obs.dim != js.dims[0]:
                raise InvalidContextError(f"{name} acts on dimension {obs.dim}, subsystem A has {js.dims[0]}")
            if not (is_sharp(obs) and is_rank_one(obs)):
                raise InvalidContextError(f"{name} must be a sharp rank-one observable")

    @property
    def dims(self) -> tuple[int, int]:
        return self.joint_state.dims

    def reduced_context(self) -> Context:
        return Context(self.joint_state.reduce([0]), self.x_obs, self.y_obs)


@dataclass(frozen=True, eq=False)
class MemoryStates:
    """States of the memory game after Alice (``AM``) and after Eve (``A'M``)."""

    rho_am: DensityMatrix
    rho_apm: DensityMatrix
    branch_probs: np.ndarray
    branches_am: tuple[DensityMatrix | None, ...]
    branches_apm: tuple[DensityMatrix | None, ...]


def memory_states(mc: MemoryContext) -> MemoryStates:
    d_a, d_m = mc.dims
    nx = tensor_identity(luders_channel(mc.x_obs), d_m)
    ny = tensor_identity(luders_channel(mc.y_obs), d_m)
    rho_am = nx.on_state(mc.joint_state, mc.dims)
    rho_apm = ny.on_state(rho_am, mc.dims)
    eye_m = np.eye(d_m)
    probs, b_am, b_apm = [], [], []
    for e in mc.x_obs.effects:
        k = np.kron(e, eye_m)
        out = k @ mc.joint_state.matrix @ k.conj().T
        w = float(np.trace(out).real)
        probs.append(max(w, 0.0))
        if w <= 1e-12:
            b_am.append(None)
            b_apm.append(None)
            continue
        s = DensityMatrix(out / w, mc.dims)
        b_am.append(s)
        b_apm.append(ny.on_state(s, mc.dims))
    return MemoryStates(rho_am, rho_apm, np.array(probs), tuple(b_am), tuple(b_apm))


def old_ipc_mem(mc: MemoryContext) -> float:
    """``S(rho_A'M) - S(rho_AM)``."""
    ms = memory_states(mc)
    return entropy(ms.rho_apm) - entropy(ms.rho_am)


@dataclass(frozen=True)
class MemoryTerms:
    """Three evaluations of the memory-conditioned modified measure.

    ``conditional`` keeps the branch entropies of the classical-quantum states
    exactly (weighted by the branch probabilities). ``purity`` replaces their
    difference by ``sum_x p_x S(rho^x_A')`` using that each ``rho^x_AM`` is a
    product with a pure ``A`` factor. ``unweighted`` is the same expression
    without the probabilities.
    """

    conditional: float
    purity: float
    unweighted: float

    @property
    def derivation_gap(self) -> float:
        return abs(self.conditional - self.purity)

    @property
    def unweighted_divergence(self) -> float:
        return abs(self.purity - self.unweighted)


def memory_terms(mc: MemoryContext) -> MemoryTerms:
    ms = memory_states(mc)
    base = entropy(ms.rho_am) - entropy(ms.rho_apm)
    cond = base
    purity = base
    unweighted = base
    ny = luders_channel(mc.y_obs)
    for p, s_am, s_apm in zip(ms.branch_probs, ms.branches_am, ms.branches_apm):
        if s_am is None:
            continue
        cond += p * (entropy(s_apm) - entropy(s_am))
        s_ap = entropy(ny.on_state(s_am.reduce([0])))
        purity += p * s_ap
        unweighted += s_ap
    return MemoryTerms(float(cond), float(purity), float(unweighted))


def new_ipc_mem(mc: MemoryContext) -> float:
    """Modified measure conditioned on the memory (probability-weighted form)."""
    return memory_terms(mc).conditional


def memory_gap(mc: MemoryContext) -> tuple[float, float]:
    """``(old - old_mem, new - new_mem)``; the first is <= 0, the second >= 0."""
    c = mc.reduced_context()
    old_gap = old_ipc(c.state, c.x_obs, c.y_obs) - old_ipc_mem(mc)
    new_gap = ipc_modified(c) - new_ipc_mem(mc)
    return float(old_gap), float(new_gap)


def coherent_gap(mc: MemoryContext) -> float:
    """``I_coh(M>A) - I_coh(M>A')`` evaluated directly on the memory states."""
    ms = memory_states(mc)
    return coherent_information(ms.rho_am) - coherent_information(ms.rho_apm)


def depolarizing_eve(y: Observable, eta=None) -> Instrument:
    """Eve measuring ``y`` and re-preparing ``eta`` (default ``|0><0|``)."""
    if eta is None:
        eta = np.zeros((y.dim, y.dim), dtype=complex)
        eta[0, 0] = 1.0
    return depolarizing_instrument(y, eta)


def commuting(c: Context) -> bool:
    return c.x_obs.dim == c.y_obs.dim and commutes(c.x_obs, c.y_obs)
