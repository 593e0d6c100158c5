import math

import numpy as np
import pytest

from contextleak.errors import InvalidDimsError, InvalidInstrumentError, InvalidMapError, LabelError
from contextleak.instruments import (
    depolarizing_instrument,
    implements,
    luders_instrument,
    naimark_extension,
    parent_instrument,
    post_process,
    random_instrument,
)
from contextleak.maps import (
    Channel,
    Instrument,
    KrausMap,
    apply_branch,
    apply_instrument,
    choi_matrix,
    compose,
    constant_channel,
    identity_channel,
    induced_channel,
    random_channel,
    same_instrument,
    same_map,
    unitary_channel,
)
from contextleak.measurements import (
    Observable,
    born_probabilities,
    luders_channel,
    pauli_observable,
    random_povm,
    trine_povm,
)
from contextleak.states import basis_state, maximally_mixed, random_density, random_unitary

Z, X = pauli_observable("z"), pauli_observable("x")
P0, P1 = np.diag([1.0, 0.0]), np.diag([0.0, 1.0])
PLUS = np.full((2, 2), 0.5)
MINUS = np.array([[0.5, -0.5], [-0.5, 0.5]])


def test_maps_validate_kraus():
    with pytest.raises(InvalidMapError):
        KrausMap((2 * np.eye(2),))
    with pytest.raises(InvalidMapError):
        Channel((0.5 * np.eye(2),))
    with pytest.raises(InvalidInstrumentError):
        Instrument(("a", "b"), (KrausMap((P0,)), KrausMap((0.5 * P1,))))


def test_apply_branch_examples():
    inst = luders_instrument(Z)
    w, s = apply_branch(inst.branch("0"), basis_state(2, 0))
    assert abs(w - 1) < 1e-15 and np.abs(s.matrix - P0).max() < 1e-15
    w, s = apply_branch(inst.branch("1"), basis_state(2, 0))
    assert w == 0 and s is None
    w, s = apply_branch(inst.branch("0"), maximally_mixed(2))
    assert abs(w - 0.5) < 1e-15 and np.abs(s.matrix - P0).max() < 1e-15
    with pytest.raises(InvalidDimsError):
        apply_branch(inst.branch("0"), maximally_mixed(3))


def test_apply_instrument_on_maximally_mixed():
    ens = apply_instrument(luders_instrument(Z), maximally_mixed(2))
    assert np.abs(ens.probabilities - 0.5).max() < 1e-15
    assert np.abs(ens.states[0].matrix - P0).max() < 1e-15
    assert np.abs(ens.states[1].matrix - P1).max() < 1e-15
    ens = apply_instrument(luders_instrument(X), maximally_mixed(2))
    assert np.abs(ens.states[0].matrix - PLUS).max() < 1e-15
    assert np.abs(ens.states[1].matrix - MINUS).max() < 1e-15


def test_ensemble_average_is_induced_channel():
    for seed in range(20):
        inst, _ = random_instrument(2, 3, seed, kind=("luders", "parent-unitary", "parent-channel", "depolarizing")[seed % 4])
        rho = random_density(2, seed=seed + 50)
        avg = apply_instrument(inst, rho).average().matrix
        assert np.abs(avg - induced_channel(inst).on_state(rho).matrix).max() < 1e-12


def test_induced_channel_examples():
    assert same_map(induced_channel(luders_instrument(Z)), luders_channel(Z))
    eta = random_density(2, seed=3)
    dep = induced_channel(depolarizing_instrument(X, eta))
    assert same_map(dep, constant_channel(2, eta))
    assert same_map(induced_channel(parent_instrument(Z)), luders_channel(Z))


def test_implements_examples():
    assert implements(luders_instrument(Z), Z)
    relabelled_x = Observable(X.effects, Z.labels)
    assert not implements(luders_instrument(Z), relabelled_x)
    with pytest.raises(LabelError):
        implements(luders_instrument(Z), X)
    for seed in range(5):
        b = random_povm(2, 3, seed)
        assert implements(depolarizing_instrument(b, random_density(2, seed=seed)), b)


def test_luders_instrument_examples():
    inst = luders_instrument(Z)
    assert np.abs(inst.branch("0").kraus[0] - P0).max() < 1e-15
    assert np.abs(inst.branch("1").kraus[0] - P1).max() < 1e-15
    half = luders_instrument(Observable((np.eye(2) / 2, np.eye(2) / 2)))
    for b in half.branches:
        assert np.abs(b.kraus[0] - np.eye(2) / math.sqrt(2)).max() < 1e-15
    rho = random_density(2, seed=1)
    for s in apply_instrument(half, rho).states:
        assert np.abs(s.matrix - rho.matrix).max() < 1e-14
    assert implements(luders_instrument(trine_povm()), trine_povm())


def test_naimark_extension_examples():
    ext = naimark_extension(Z)
    assert ext.k_dim == 4 and ext.max_violation() < 1e-15
    single = naimark_extension(Observable((np.eye(3),)))
    assert single.k_dim == 3
    assert np.abs(single.isometry - np.eye(3)).max() < 1e-15
    assert np.abs(single.pvm.effects[0] - np.eye(3)).max() < 1e-15
    ext = naimark_extension(trine_povm())
    assert ext.k_dim == 6
    assert np.abs(ext.isometry.conj().T @ ext.isometry - np.eye(2)).max() < 1e-14


def test_naimark_random_povms_direct_check():
    for seed in range(30):
        a = random_povm(3, 4, seed)
        ext = naimark_extension(a)
        v = ext.isometry
        assert np.abs(v.conj().T @ v - np.eye(3)).max() < 1e-12
        for big, small in zip(ext.pvm.effects, a.effects):
            assert np.abs(big @ big - big).max() < 1e-15
            assert np.abs(v.conj().T @ big @ v - small).max() < 1e-12


def test_parent_of_sharp_rank_one_is_luders():
    assert same_instrument(parent_instrument(X), luders_instrument(X))
    assert parent_instrument(X).out_dim == 2


def test_parent_of_z_with_full_dilation():
    inst = parent_instrument(Z, force_dilation=True)
    assert inst.out_dim == 4
    ens = apply_instrument(inst, maximally_mixed(2))
    assert np.abs(ens.probabilities - 0.5).max() < 1e-15
    for i, s in enumerate(ens.states):
        ii = np.zeros(4)
        ii[3 * i] = 1
        assert np.abs(s.matrix - np.outer(ii, ii)).max() < 1e-15


def test_parent_probabilities_are_born():
    for seed in range(20):
        a = random_povm(2 + seed % 2, 3, seed)
        rho = random_density(a.dim, seed=seed + 7)
        inst = parent_instrument(a)
        assert implements(inst, a)
        got = [float(np.trace(b.apply(rho.matrix)).real) for b in inst.branches]
        assert np.abs(np.array(got) - born_probabilities(rho, a)).max() < 1e-12


def test_depolarizing_instrument_examples():
    eta = basis_state(2, 0)
    inst = depolarizing_instrument(X, eta)
    for seed in range(5):
        rho = random_density(2, seed=seed)
        assert np.abs(induced_channel(inst).on_state(rho).matrix - P0).max() < 1e-14
        ens = apply_instrument(inst, rho)
        assert np.abs(ens.probabilities - born_probabilities(rho, X)).max() < 1e-14
        assert all(np.abs(s.matrix - P0).max() < 1e-14 for s in ens.states)


def test_post_process_examples():
    a = random_povm(2, 3, 4)
    parent = parent_instrument(a)
    assert same_instrument(post_process(identity_channel(parent.out_dim), parent), parent)
    eta = random_density(2, seed=8)
    dep = post_process(constant_channel(parent.out_dim, eta), parent)
    assert same_instrument(dep, depolarizing_instrument(a, eta))
    with pytest.raises(InvalidDimsError):
        post_process(identity_channel(5), parent)


def test_post_process_keeps_observable():
    for seed in range(100):
        a = random_povm(2, 2 + seed % 3, seed)
        parent = parent_instrument(a)
        theta = random_channel(parent.out_dim, 2, 3, seed)
        assert implements(post_process(theta, parent), a)


def test_choi_examples():
    phi = np.array([1, 0, 0, 1]) / math.sqrt(2)
    assert np.abs(choi_matrix(identity_channel(2)) - 2 * np.outer(phi, phi)).max() < 1e-15
    assert np.abs(choi_matrix(constant_channel(2, maximally_mixed(2))) - np.eye(4) / 2).max() < 1e-15
    for seed in range(10):
        c = choi_matrix(random_channel(2, 3, 2, seed))
        assert np.linalg.eigvalsh(c).min() > -1e-12


def test_compose_and_unitary_channel():
    u = random_unitary(2, 3)
    v = random_unitary(2, 4)
    assert same_map(compose(unitary_channel(u), unitary_channel(v)), unitary_channel(u @ v))
    assert not same_map(unitary_channel(u), unitary_channel(v))


def test_random_instrument_kinds():
    for kind in ("parent-unitary", "luders", "parent-channel", "depolarizing"):
        inst, obs = random_instrument(2, 3, 0, kind)
        assert implements(inst, obs)
    with pytest.raises(ValueError):
        random_instrument(2, 3, 0, "bogus")
