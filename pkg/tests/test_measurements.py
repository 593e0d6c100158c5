import numpy as np
import pytest

from contextleak import linalg as la
from contextleak.errors import (
    InvalidDimsError,
    InvalidLabelsError,
    InvalidObservableError,
    RequiresSharpError,
    UnsupportedPointerError,
)
from contextleak.instruments import implements, luders_instrument
from contextleak.maps import identity_channel, same_instrument, same_map
from contextleak.measurements import (
    MeasurementModel,
    Observable,
    born_probabilities,
    commutes,
    is_rank_one,
    is_sharp,
    luders_channel,
    marginals_of_joint,
    model_probabilities,
    model_to_instrument,
    pauli_observable,
    random_povm,
    random_pvm,
    trine_povm,
    trivial_observable,
    validate,
)
from contextleak.states import basis_state, maximally_mixed, pure, random_density, random_unitary

Z, X = pauli_observable("z"), pauli_observable("x")
P0 = np.diag([1.0, 0.0])


def test_validate_examples():
    assert validate(Z).valid and validate(Z).sharp
    rep = validate(Observable((0.6 * np.eye(2), 0.4 * np.eye(2))))
    assert rep.valid and not rep.sharp
    broken = validate(Observable((P0, P0), check=False))
    assert not broken.valid
    assert abs(broken.completeness_violation - 1.0) < 1e-15
    assert "invalid" in str(broken)


def test_construction_rejects_invalid_effects():
    with pytest.raises(InvalidObservableError):
        Observable((P0, P0))
    with pytest.raises(InvalidObservableError):
        Observable((np.diag([1.5, 0.5]), np.diag([-0.5, 0.5])))
    with pytest.raises(InvalidLabelsError):
        Observable((P0, np.eye(2) - P0), labels=("a", "a"))


def test_sharp_and_rank_one():
    assert is_sharp(X) and is_rank_one(X)
    half = Observable((np.eye(2) / 2, np.eye(2) / 2))
    assert not is_sharp(half)
    trine = trine_povm()
    assert not is_sharp(trine) and is_rank_one(trine)
    assert len(trine.effects) == 3
    # each trine effect is (2/3)P, and ((2/3)P)^2 = (4/9)P
    e = trine.effects[0]
    assert np.abs(e @ e - (2 / 3) * e).max() < 1e-15


def test_commutes():
    assert commutes(Z, Z)
    assert not commutes(Z, X)
    assert commutes(Z, Observable((np.eye(2) / 2, np.eye(2) / 2)))
    with pytest.raises(InvalidDimsError):
        commutes(Z, random_pvm(3, 0))


def test_born_probabilities():
    assert np.abs(born_probabilities(maximally_mixed(2), Z) - 0.5).max() < 1e-15
    assert np.abs(born_probabilities(basis_state(2, 0), Z) - [1, 0]).max() < 1e-15
    assert np.abs(born_probabilities(basis_state(2, 0), X) - 0.5).max() < 1e-15
    with pytest.raises(InvalidDimsError):
        born_probabilities(maximally_mixed(3), Z)


def test_luders_channel_examples():
    plus = pure([1, 1])
    assert np.abs(luders_channel(Z).on_state(plus).matrix - np.eye(2) / 2).max() < 1e-15
    assert np.abs(luders_channel(Z).on_state(basis_state(2, 0)).matrix - P0).max() < 1e-15
    for seed in range(10):
        rho = random_density(2, seed=seed)
        out = luders_channel(X).on_state(luders_channel(Z).on_state(rho))
        assert np.abs(out.matrix - np.eye(2) / 2).max() < 1e-13
    with pytest.raises(RequiresSharpError):
        luders_channel(trine_povm())


def test_marginals_of_joint():
    joint = Observable((P0, np.zeros((2, 2)), np.zeros((2, 2)), np.eye(2) - P0),
                       labels=(("0", "0"), ("0", "1"), ("1", "0"), ("1", "1")))
    a, b = marginals_of_joint(joint)
    assert all(np.abs(ea - ez).max() < 1e-15 for ea, ez in zip(a.effects, Z.effects))
    assert all(np.abs(eb - ez).max() < 1e-15 for eb, ez in zip(b.effects, Z.effects))

    trine = trine_povm()
    weights = (0.3, 0.7)
    effects, labels = [], []
    for lab, e in zip(trine.labels, trine.effects):
        for j, w in enumerate(weights):
            effects.append(w * e)
            labels.append((lab, j))
    a, b = marginals_of_joint(Observable(tuple(effects), tuple(labels)))
    assert all(np.abs(ea - et).max() < 1e-15 for ea, et in zip(a.effects, trine.effects))
    assert all(np.abs(eb - w * np.eye(2)).max() < 1e-15 for eb, w in zip(b.effects, weights))


def test_marginals_of_random_joint_are_valid():
    for seed in range(10):
        g = random_povm(2, 6, seed)
        labelled = Observable(g.effects, tuple((i // 3, i % 3) for i in range(6)))
        a, b = marginals_of_joint(labelled)
        assert validate(a).valid and validate(b).valid
        # direct summation oracle
        assert np.abs(a.effects[1] - sum(g.effects[3:6])).max() < 1e-14
        assert np.abs(b.effects[2] - (g.effects[2] + g.effects[5])).max() < 1e-14


def test_marginals_reject_non_grid_labels():
    g = Observable((P0, np.eye(2) - P0), labels=(("a", 0), ("b", 1)))
    with pytest.raises(InvalidLabelsError):
        marginals_of_joint(g)
    with pytest.raises(InvalidLabelsError):
        marginals_of_joint(Z)


CNOT = np.array([[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex)


def test_cnot_model_gives_luders_instrument():
    model = MeasurementModel(basis_state(2, 0), CNOT, Z)
    inst = model_to_instrument(model)
    assert implements(inst, Z)
    assert same_instrument(inst, luders_instrument(Z))
    # explicit 4x4 computation: (I (x) <x|) CNOT (I (x) |0>) = |x><x|
    for i, lab in enumerate(Z.labels):
        bra = np.kron(np.eye(2), np.eye(2)[i:i + 1])
        ket0 = np.kron(np.eye(2), np.eye(2)[:, :1])
        k = bra @ CNOT @ ket0
        assert np.abs(k - Z.effects[i]).max() < 1e-15
        assert np.abs(inst.branch(lab).kraus[0] @ inst.branch(lab).kraus[0].conj().T - Z.effects[i]).max() < 1e-15


def test_trivial_model_is_identity():
    model = MeasurementModel(basis_state(1, 0), np.eye(2), Observable((np.eye(1),)))
    inst = model_to_instrument(model)
    assert len(inst.outcomes) == 1
    assert same_map(inst.branch(inst.outcomes[0]), identity_channel(2))


def test_model_probabilities_match_instrument():
    for seed in range(10):
        anc = random_density(2, seed=100 + seed)
        u = random_unitary(4, seed)
        model = MeasurementModel(anc, u, X)
        inst = model_to_instrument(model)
        rho = random_density(2, seed=200 + seed)
        direct = model_probabilities(model, rho)
        via_inst = [float(np.trace(inst.branch(l).apply(rho.matrix)).real) for l in inst.outcomes]
        assert np.abs(direct - via_inst).max() < 1e-12


def test_unsharp_pointer_rejected():
    with pytest.raises(UnsupportedPointerError):
        model_to_instrument(MeasurementModel(basis_state(2, 0), CNOT, Observable((np.eye(2) / 2, np.eye(2) / 2))))


def test_named_observables():
    y = pauli_observable("y")
    assert y.labels == ("+i", "-i")
    assert np.abs(y.effects[0] - y.effects[1] - la.SIGMA_Y).max() < 1e-15
    assert np.abs(X.effects[0] - X.effects[1] - la.SIGMA_X).max() < 1e-15
    t = trivial_observable(3, (0.2, 0.8))
    assert validate(t).valid and not is_sharp(t)


def test_random_observables_are_valid():
    for seed in range(20):
        povm = random_povm(3, 4, seed)
        assert validate(povm).valid
        pvm = random_pvm(3, seed)
        assert is_sharp(pvm) and is_rank_one(pvm)
    assert all(np.abs(a - b).max() == 0 for a, b in zip(random_povm(2, 3, 5).effects, random_povm(2, 3, 5).effects))
