"""
Worked scenarios: the BB84-style averaging game on a maximally mixed qubit,
and the qubit-memory sweep with its concurrence and mutual-information
curves.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import InvalidParameterError
from .info import concurrence, entropy, mutual_information
from .instruments import luders_instrument
from .ipc import (
    MemoryContext,
    depolarizing_eve,
    ipc_modified,
    leak,
    memory_gap,
    memory_states,
    new_ipc_mem,
    old_ipc,
)
from .measurements import pauli_observable
from .states import DensityMatrix, maximally_mixed

MONO_SLACK = 1e-9
_S = 1 / math.sqrt(2)
QUBIT_BASES = {
    "z": np.array([[1, 0], [0, 1]], dtype=complex),
    "x": np.array([[_S, _S], [_S, -_S]], dtype=complex),
    "y": np.array([[_S, _S], [1j * _S, -1j * _S]], dtype=complex),
}


@dataclass(frozen=True)
class ContextValue:
    x: str
    y: str
    old: float
    new: float


@dataclass(frozen=True)
class Example1Result:
    old_avg: float
    new_avg: float
    contexts: tuple[ContextValue, ...]
    eve: str = "parent"


def run_example1(eve: str = "parent") -> Example1Result:
    """Alice and Eve each pick sigma_z or sigma_x uniformly on the maximally mixed qubit.

    ``eve="depolarizing"`` replaces Eve's parent instrument by one that
    re-prepares ``|0><0|``; the average leak can then only go up.
    """
    rho = maximally_mixed(2)
    obs = {"z": pauli_observable("z"), "x": pauli_observable("x")}
    rows = []
    for a in ("z", "x"):
        for b in ("z", "x"):
            old = old_ipc(rho, obs[a], obs[b])
            if eve == "parent":
                new = ipc_modified(rho, obs[a], obs[b])
            elif eve == "depolarizing":
                new = leak(rho, luders_instrument(obs[a]), depolarizing_eve(obs[b]), "depolarizing").leak
            else:
                raise InvalidParameterError(f"unknown Eve strategy {eve!r}")
            rows.append(ContextValue(a, b, old, new))
    return Example1Result(
        old_avg=sum(r.old for r in rows) / 4,
        new_avg=sum(r.new for r in rows) / 4,
        contexts=tuple(rows),
        eve=eve,
    )


def default_p_grid(p_min: float = 0.5, p_max: float = 1.0, steps: int = 101) -> tuple[float, ...]:
    if steps < 1:
        raise InvalidParameterError("the grid needs at least one point")
    if steps == 1:
        return (float(p_min),)
    return tuple(float(p) for p in np.linspace(p_min, p_max, steps))


@dataclass(frozen=True)
class Example2Config:
    """Input-state weight ``alpha`` on the first eigenvector, mixing grid and eigenbasis."""

    alpha: float = 0.25
    p_grid: tuple[float, ...] = field(default_factory=default_p_grid)
    eigenbasis: str = "y"

    def __post_init__(self):
        if not 0 <= self.alpha <= 1:
            raise InvalidParameterError(f"alpha must lie in [0, 1], got {self.alpha}")
        if self.eigenbasis not in QUBIT_BASES:
            raise InvalidParameterError(f"eigenbasis must be one of {sorted(QUBIT_BASES)}")
        object.__setattr__(self, "p_grid", tuple(float(p) for p in self.p_grid))
        for p in self.p_grid:
            memory_weight(self.alpha, p)

    @property
    def basis(self) -> np.ndarray:
        return QUBIT_BASES[self.eigenbasis]


def memory_weight(alpha: float, p: float) -> float:
    """Schmidt weight ``alpha'`` of the pure part so the input marginal keeps weight ``alpha``."""
    if not 0 < p <= 1:
        raise InvalidParameterError(f"p must lie in (0, 1], got {p}")
    a = (2 * alpha - 1 + p) / (2 * p)
    if a < -1e-12 or a > 1 + 1e-12:
        raise InvalidParameterError(f"p={p} gives alpha'={a:.6g} outside [0, 1] for alpha={alpha}")
    return min(max(a, 0.0), 1.0)


def build_example2_state(cfg: Example2Config, p: float) -> DensityMatrix:
    """``p |psi><psi| + (1-p) I/4`` with ``|psi> = sqrt(a')|l1 l1'> + sqrt(b')|l2 l2'>``."""
    a = memory_weight(cfg.alpha, p)
    l1, l2 = cfg.basis[:, 0], cfg.basis[:, 1]
    psi = math.sqrt(a) * np.kron(l1, l1) + math.sqrt(1 - a) * np.kron(l2, l2)
    m = p * np.outer(psi, psi.conj()) + (1 - p) * np.eye(4) / 4
    return DensityMatrix(m, (2, 2))


def concurrence_threshold(alpha: float = 0.25) -> float:
    """Smallest ``p`` with nonzero concurrence: root of ``3p^2 + 2p - (1 + 4c^2) = 0``, ``c = 1 - 2 alpha``."""
    c = 1 - 2 * alpha
    return (-1 + math.sqrt(4 + 12 * c * c)) / 3


COLUMNS = ("concurrence", "mutual_info", "leak_no_mem", "leak_with_mem", "leak_diff")
NORMALIZED = ("concurrence", "mutual_info", "leak_diff")


@dataclass(frozen=True)
class SweepRow:
    p: float
    concurrence: float
    mutual_info_inM: float
    leak_no_mem: float
    leak_with_mem: float
    leak_difference: float
    mutual_info_am: float
    normalized_concurrence: float = math.nan
    normalized_mutual_info: float = math.nan
    normalized_leak_difference: float = math.nan


@dataclass(frozen=True)
class Example2Result:
    rows: tuple[SweepRow, ...]
    concurrence_zero_crossing: float
    unnormalized_columns: tuple[str, ...] = ()


def sweep_point(cfg: Example2Config, p: float) -> SweepRow:
    sigma = build_example2_state(cfg, p)
    mc = MemoryContext(sigma, pauli_observable("z"), pauli_observable("x"))
    _, new_gap = memory_gap(mc)
    ms = memory_states(mc)
    return SweepRow(
        p=p,
        concurrence=concurrence(sigma),
        mutual_info_inM=mutual_information(sigma),
        leak_no_mem=ipc_modified(mc.reduced_context()),
        leak_with_mem=new_ipc_mem(mc),
        leak_difference=new_gap,
        mutual_info_am=mutual_information(ms.rho_am),
    )


def _normalize(values: Sequence[float]) -> tuple[list[float], bool]:
    top = max(values)
    if top <= 1e-15:
        return list(values), False
    return [v / top for v in values], True


def run_example2(cfg: Example2Config | None = None) -> Example2Result:
    """Evaluate the memory sweep on every grid point, in grid order."""
    cfg = cfg or Example2Config()
    raw = [sweep_point(cfg, p) for p in cfg.p_grid]
    norm_c, ok_c = _normalize([r.concurrence for r in raw])
    norm_m, ok_m = _normalize([r.mutual_info_inM for r in raw])
    norm_l, ok_l = _normalize([r.leak_difference for r in raw])
    rows = tuple(
        SweepRow(**{**r.__dict__, "normalized_concurrence": c, "normalized_mutual_info": m,
                    "normalized_leak_difference": lk})
        for r, c, m, lk in zip(raw, norm_c, norm_m, norm_l)
    )
    flagged = tuple(name for name, ok in zip(NORMALIZED, (ok_c, ok_m, ok_l)) if not ok)
    return Example2Result(rows, concurrence_threshold(cfg.alpha), flagged)


@dataclass(frozen=True)
class MonotonicityReport:
    monotone: dict
    counterexamples: dict

    @property
    def all_monotone(self) -> bool:
        return all(self.monotone.values())


def probe_conjecture(cfg: Example2Config | None = None, resort: bool = False,
                     result: Example2Result | None = None) -> MonotonicityReport:
    """Check that correlations and the leak reduction grow together along the grid.

    Concurrence, mutual information and the leak difference must each be
    non-decreasing in ``p`` and the leak with memory non-increasing. The first
    offending pair of rows is kept for every column that fails.
    """
    cfg = cfg or Example2Config()
    grid = list(cfg.p_grid)
    if grid != sorted(grid):
        if not resort:
            raise InvalidParameterError("p grid must be sorted ascending (pass resort=True to sort it)")
        cfg = Example2Config(cfg.alpha, tuple(sorted(grid)), cfg.eigenbasis)
    rows = (result or run_example2(cfg)).rows
    checks = {
        "concurrence": (lambda r: r.concurrence, 1),
        "mutual_info": (lambda r: r.mutual_info_inM, 1),
        "leak_diff": (lambda r: r.leak_difference, 1),
        "leak_with_mem": (lambda r: r.leak_with_mem, -1),
    }
    monotone, bad = {}, {}
    for name, (get, sign) in checks.items():
        monotone[name] = True
        for prev, cur in zip(rows, rows[1:]):
            if sign * (get(cur) - get(prev)) < -MONO_SLACK:
                monotone[name] = False
                bad[name] = (prev, cur)
                break
    return MonotonicityReport(monotone, bad)


def reduced_input_state(cfg: Example2Config, p: float) -> DensityMatrix:
    return build_example2_state(cfg, p).reduce([0])


def independent_leak_difference(cfg: Example2Config, p: float) -> float:
    """``S(sigma_M) + S(sigma_A) - S(sigma_AM)`` after Alice's ``S_z`` measurement."""
    sigma = build_example2_state(cfg, p)
    ms = memory_states(MemoryContext(sigma, pauli_observable("z"), pauli_observable("x")))
    am = ms.rho_am
    return entropy(am.reduce([1])) + entropy(am.reduce([0])) - entropy(am)


__all__ = [
    "ContextValue",
    "Example1Result",
    "Example2Config",
    "Example2Result",
    "MonotonicityReport",
    "SweepRow",
    "build_example2_state",
    "concurrence_threshold",
    "default_p_grid",
    "independent_leak_difference",
    "memory_weight",
    "probe_conjecture",
    "run_example1",
    "run_example2",
]
