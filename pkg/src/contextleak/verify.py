"""
Seeded property suites run by ``contextleak verify``.

Each suite draws ``trials`` random instances from a generator seeded with
``(seed, suite index)`` and records the worst tolerance excess it sees. A
suite passes when every instance is inside its tolerance.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import info
from . import linalg as la
from .instruments import (
    depolarizing_instrument,
    implements,
    luders_instrument,
    naimark_extension,
    parent_instrument,
    post_process,
    random_instrument,
)
from .ipc import (
    MemoryContext,
    ipc_modified,
    leak,
    memory_gap,
    memory_terms,
    old_ipc,
    old_ipc_generalized,
    sharp_relation_residual,
)
from .maps import (
    Instrument,
    apply_instrument,
    choi_matrix,
    compose,
    induced_channel,
    outcome_distribution,
    random_channel,
    unitary_channel,
)
from .measurements import (
    MeasurementModel,
    Observable,
    born_probabilities,
    luders_channel,
    marginals_of_joint,
    model_probabilities,
    model_to_instrument,
    pauli_observable,
    random_povm,
    random_pvm,
    validate,
)
from .states import Ensemble, basis_state, maximally_mixed, random_density, random_unitary

TOL = 1e-9
TIGHT = 1e-12


@dataclass(frozen=True)
class SuiteResult:
    name: str
    passed: bool
    max_violation: float
    trials: int
    claim: str


class _Tracker:
    """Accumulates the worst excess over a tolerance."""

    def __init__(self):
        self.worst = 0.0
        self.ok = True

    def le(self, value: float, tol: float = TOL):
        """Record a quantity that must be at most ``tol``."""
        value = float(value)
        if not math.isfinite(value) or value > tol:
            self.ok = False
        self.worst = max(self.worst, value if math.isfinite(value) else math.inf)

    def true(self, cond: bool):
        if not cond:
            self.ok = False
            self.worst = math.inf


def _random_hermitian(d: int, rng) -> np.ndarray:
    g = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
    return (g + g.conj().T) / 2


def _random_ensemble(d: int, rng) -> Ensemble:
    n = int(rng.integers(2, 5))
    p = rng.dirichlet(np.ones(n))
    return Ensemble(tuple((float(pi), random_density(d, int(rng.integers(1, d + 1)), rng)) for pi in p))


def _sharp_rank_one(d: int, rng) -> Observable:
    return random_pvm(d, rng)


# linalg


def suite_eig(trials, rng, t):
    for _ in range(trials):
        d = int(rng.integers(1, 9))
        h = _random_hermitian(d, rng)
        w, q = la.hermitian_eig(h)
        t.le(la.max_abs(q @ np.diag(w) @ q.conj().T - h))
        t.le(la.max_abs(q.conj().T @ q - np.eye(d)))
        t.true(bool(np.all(np.diff(w) >= 0)))


def suite_sqrt_psd(trials, rng, t):
    for _ in range(trials):
        d = int(rng.integers(1, 9))
        k = int(rng.integers(1, d + 1))
        g = rng.standard_normal((d, k)) + 1j * rng.standard_normal((d, k))
        m = g @ g.conj().T
        r = la.matrix_sqrt_psd(m)
        t.le(la.max_abs(r @ r - m))
        t.le(-np.linalg.eigvalsh(r).min())


def suite_traces(trials, rng, t):
    for _ in range(trials):
        da, db = (int(x) for x in rng.integers(1, 5, size=2))
        a = rng.standard_normal((da, da)) + 1j * rng.standard_normal((da, da))
        b = rng.standard_normal((db, db)) + 1j * rng.standard_normal((db, db))
        ab = la.kron(a, b)
        t.le(abs(np.trace(ab) - np.trace(a) * np.trace(b)), TIGHT * max(1.0, abs(np.trace(ab))))
        t.le(abs(la.partial_trace(ab, [da, db], [])[0, 0] - np.trace(ab)), TIGHT * max(1.0, abs(np.trace(ab))))


# states


def suite_random_density_rank(trials, rng, t):
    for _ in range(trials):
        d = int(rng.integers(1, 6))
        r = int(rng.integers(1, d + 1))
        rho = random_density(d, r, rng)
        t.true(int(np.sum(rho.eigvals() > 1e-9)) == r)
        t.le(abs(np.trace(rho.matrix).real - 1))


# measurements


def suite_validate(trials, rng, t):
    for _ in range(trials):
        d = int(rng.integers(2, 4))
        obs = random_povm(d, int(rng.integers(2, 5)), rng)
        t.true(validate(obs).valid)
        effects = list(obs.effects)
        pert = _random_hermitian(d, rng)
        pert *= 1e-5 / la.max_abs(pert)
        effects[0] = effects[0] + pert
        report = validate(Observable(tuple(effects), check=False))
        t.true(report.completeness_violation > 1e-6 and not report.valid)


def suite_luders(trials, rng, t):
    for _ in range(trials):
        d = int(rng.integers(2, 4))
        n = luders_channel(_sharp_rank_one(d, rng))
        rho = random_density(d, None, rng).matrix
        once = n.apply(rho)
        t.le(abs(np.trace(once) - 1))
        t.le(la.max_abs(n.apply(once) - once))


def suite_joint_marginals(trials, rng, t):
    for _ in range(trials):
        d = int(rng.integers(2, 4))
        nx, ny = (int(x) for x in rng.integers(2, 4, size=2))
        raw = random_povm(d, nx * ny, rng)
        labels = tuple((f"x{i}", f"y{j}") for i in range(nx) for j in range(ny))
        g = Observable(raw.effects, labels)
        a, b = marginals_of_joint(g)
        t.true(validate(a).valid and validate(b).valid)
        rho = random_density(d, None, rng)
        pg = born_probabilities(rho, g).reshape(nx, ny)
        t.le(la.max_abs(pg.sum(axis=1) - born_probabilities(rho, a)), TIGHT)
        t.le(la.max_abs(pg.sum(axis=0) - born_probabilities(rho, b)), TIGHT)


def suite_model(trials, rng, t):
    for _ in range(trials):
        d, da = int(rng.integers(2, 4)), int(rng.integers(2, 4))
        model = MeasurementModel(random_density(da, None, rng), random_unitary(d * da, rng), random_pvm(da, rng))
        inst = model_to_instrument(model)
        rho = random_density(d, None, rng)
        t.le(la.max_abs(outcome_distribution(inst, rho) - model_probabilities(model, rho)))
        big = model.unitary @ np.kron(rho.matrix, model.ancilla_state.matrix) @ model.unitary.conj().T
        avg = la.partial_trace(big, [d, da], [0])
        t.le(la.max_abs(induced_channel(inst).apply(rho.matrix) - avg))


# instruments


def suite_naimark(trials, rng, t):
    for _ in range(trials):
        d, n = int(rng.integers(2, 4)), int(rng.integers(2, 5))
        obs = random_povm(d, n, rng)
        t.le(naimark_extension(obs).max_violation())
        inst = parent_instrument(obs)
        rho = random_density(d, None, rng)
        t.le(la.max_abs(outcome_distribution(inst, rho) - born_probabilities(rho, obs)))
        t.true(implements(inst, obs))


def suite_implements(trials, rng, t):
    for _ in range(trials):
        d, n = int(rng.integers(2, 4)), int(rng.integers(2, 5))
        obs = random_povm(d, n, rng)
        eta = random_density(d, None, rng)
        for inst in (luders_instrument(obs), parent_instrument(obs), parent_instrument(obs, True),
                     depolarizing_instrument(obs, eta)):
            t.true(implements(inst, obs))


def suite_post_process(trials, rng, t):
    for _ in range(trials):
        d, n = int(rng.integers(2, 4)), int(rng.integers(2, 4))
        obs = random_povm(d, n, rng)
        inst = parent_instrument(obs)
        theta = random_channel(inst.out_dim, int(rng.integers(2, 4)), 2, rng)
        pp = post_process(theta, inst)
        t.true(implements(pp, obs))
        lhs = choi_matrix(induced_channel(pp))
        rhs = choi_matrix(compose(theta, induced_channel(inst)))
        t.le(la.max_abs(lhs - rhs))


# info


def suite_holevo_bounds(trials, rng, t):
    for _ in range(trials):
        e = _random_ensemble(int(rng.integers(2, 4)), rng)
        chi = info.holevo_chi(e)
        t.le(-chi)
        t.le(chi - info.entropy(e.average()))


def suite_data_processing(trials, rng, t):
    for _ in range(trials):
        d = int(rng.integers(2, 4))
        e = _random_ensemble(d, rng)
        ch = random_channel(d, int(rng.integers(2, 4)), int(rng.integers(1, 4)), rng)
        t.le(info.holevo_chi(e.map(ch.on_state)) - info.holevo_chi(e))


def suite_concavity(trials, rng, t):
    for _ in range(trials):
        d = int(rng.integers(2, 4))
        a, b = random_density(d, None, rng), random_density(d, None, rng)
        mid = (a.matrix + b.matrix) / 2
        t.le((info.entropy(a) + info.entropy(b)) / 2 - info.entropy(mid))


def suite_concurrence_family(trials, rng, t):
    for _ in range(trials):
        a = float(rng.uniform(0, 1))
        p = float(rng.uniform(0, 1))
        u = random_unitary(2, rng)
        psi = math.sqrt(a) * np.kron(u[:, 0], u[:, 0]) + math.sqrt(1 - a) * np.kron(u[:, 1], u[:, 1])
        rho = p * np.outer(psi, psi.conj()) + (1 - p) * np.eye(4) / 4
        closed = max(0.0, 2 * p * math.sqrt(a * (1 - a)) - (1 - p) / 2)
        t.le(abs(info.concurrence(rho) - closed))


# ipc


def _random_alice(d: int, rng) -> Instrument:
    kind = ("parent-unitary", "luders", "parent-channel")[int(rng.integers(0, 3))]
    inst, _ = random_instrument(d, int(rng.integers(2, 4)), rng, kind)
    return inst


def _random_eve(d: int, rng) -> Instrument:
    kind = int(rng.integers(0, 4))
    obs = random_povm(d, int(rng.integers(2, 4)), rng)
    if kind == 0:
        return luders_instrument(obs)
    if kind == 1:
        return depolarizing_instrument(obs, random_density(d, 1, rng))
    if kind == 2:
        return depolarizing_instrument(obs, random_density(d, None, rng))
    return post_process(unitary_channel(random_unitary(d, rng)), luders_instrument(obs))


def suite_nonnegativity(trials, rng, t):
    for _ in range(trials):
        d = int(rng.integers(2, 4))
        rho = random_density(d, int(rng.integers(1, d + 1)), rng)
        alice = _random_alice(d, rng)
        eve = _random_eve(alice.out_dim, rng)
        rep = leak(rho, alice, eve)
        t.le(-rep.leak)
        t.le(abs(rep.leak - (rep.chi_alice - rep.chi_after_eve)), TIGHT)


def suite_negativity_witness(trials, rng, t):
    for _ in range(trials):
        d = int(rng.integers(2, 4))
        rho = random_density(d, None, rng)
        alice = _random_alice(d, rng)
        eve = depolarizing_instrument(random_povm(alice.out_dim, 2, rng), random_density(alice.out_dim, 1, rng))
        after_a = induced_channel(alice).on_state(rho)
        t.le(abs(old_ipc_generalized(rho, alice, eve) + info.entropy(after_a)))
        t.le(-leak(rho, alice, eve).leak)


def suite_parent_optimality(trials, rng, t):
    for _ in range(trials):
        d = int(rng.integers(2, 4))
        rho = random_density(d, None, rng)
        alice = _random_alice(d, rng)
        ens = apply_instrument(alice, rho)
        b = random_povm(alice.out_dim, 2, rng)
        parent = induced_channel(parent_instrument(b))
        theta = random_channel(parent.out_dim, int(rng.integers(2, 4)), 2, rng)
        kept = info.holevo_chi(ens.map(parent.on_state))
        processed = info.holevo_chi(ens.map(compose(theta, parent).on_state))
        t.le(processed - kept)


def suite_eq18(trials, rng, t):
    for _ in range(trials):
        d = int(rng.integers(2, 4))
        rho = random_density(d, int(rng.integers(1, d + 1)), rng)
        t.le(sharp_relation_residual(rho, _sharp_rank_one(d, rng), _sharp_rank_one(d, rng)))


def suite_memory(trials, rng, t):
    z, x = pauli_observable("z"), pauli_observable("x")
    for _ in range(trials):
        js = random_density(4, int(rng.integers(1, 5)), rng).with_dims((2, 2))
        mc = MemoryContext(js, z, x)
        old_gap, new_gap = memory_gap(mc)
        t.le(old_gap)
        t.le(-new_gap)
        t.le(abs(old_gap + new_gap))
        t.le(memory_terms(mc).derivation_gap)


def suite_commuting_zero(trials, rng, t):
    for _ in range(trials):
        d = int(rng.integers(2, 4))
        x = _sharp_rank_one(d, rng)
        rho = random_density(d, None, rng)
        t.le(abs(ipc_modified(rho, x, x)))
        t.le(abs(old_ipc(rho, x, x)))


def suite_maximally_mixed(trials, rng, t):
    rho = maximally_mixed(2)
    z, x = pauli_observable("z"), pauli_observable("x")
    t.le(abs(ipc_modified(rho, z, x) - math.log(2)))
    t.le(abs(old_ipc(rho, z, x)))
    t.true(ipc_modified(rho, z, x) > 0)
    t.le(abs(old_ipc(basis_state(2, 0), z, x) - math.log(2)))


SUITES: dict[str, tuple[Callable, str]] = {
    "eig": (suite_eig, "Hermitian eigendecomposition reconstructs and is unitary"),
    "sqrt-psd": (suite_sqrt_psd, "PSD square root squares back to its input"),
    "traces": (suite_traces, "kron and full partial trace preserve traces"),
    "random-density-rank": (suite_random_density_rank, "random states have the requested rank"),
    "validate": (suite_validate, "POVM validation accepts valid and rejects perturbed effects"),
    "luders": (suite_luders, "Luders channel is trace preserving and idempotent"),
    "joint-marginals": (suite_joint_marginals, "joint-observable marginals match Born probabilities"),
    "measurement-model": (suite_model, "model instrument reproduces the model's probabilities and channel"),
    "naimark": (suite_naimark, "Naimark isometry, compression and parent Born rule"),
    "implements": (suite_implements, "every constructed instrument implements its observable"),
    "post-process": (suite_post_process, "post-processing keeps the observable and composes channels"),
    "holevo-bounds": (suite_holevo_bounds, "0 <= chi <= S(average)"),
    "data-processing": (suite_data_processing, "Holevo chi is non-increasing under channels"),
    "concavity": (suite_concavity, "von Neumann entropy is concave"),
    "concurrence-family": (suite_concurrence_family, "concurrence of pure-plus-noise matches the closed form"),
    "nonnegativity": (suite_nonnegativity, "Holevo leak is non-negative"),
    "negativity-witness": (suite_negativity_witness, "entropy measure equals -S(Lambda_A(rho)) for re-preparing Eve"),
    "parent-optimality": (suite_parent_optimality, "post-processing Eve's parent channel never raises chi"),
    "sharp-relation": (suite_eq18, "modified measure equals sum p S(N_Y rho_x) minus entropy measure"),
    "memory": (suite_memory, "memory gaps have opposite signs and cancel"),
    "commuting-zero": (suite_commuting_zero, "both measures vanish for Y = X"),
    "maximally-mixed": (suite_maximally_mixed, "maximally mixed qubit: modified ln 2, entropy measure 0"),
}


def run_suite(name: str, seed: int = 0, trials: int = 1000) -> SuiteResult:
    fn, claim = SUITES[name]
    index = list(SUITES).index(name)
    rng = np.random.default_rng([seed, index])
    t = _Tracker()
    fn(trials, rng, t)
    return SuiteResult(name, t.ok, t.worst, trials, claim)


def run_all(seed: int = 0, trials: int = 1000, only: list[str] | None = None) -> list[SuiteResult]:
    names = list(SUITES)
    if only:
        unknown = [n for n in only if n not in SUITES]
        if unknown:
            raise KeyError(f"unknown suite(s): {', '.join(unknown)}")
        names = [n for n in names if n in only]
    return [run_suite(n, seed, trials) for n in names]
