"""Randomized properties driven by hypothesis-chosen seeds and dimensions."""

import math

import numpy as np
from hypothesis import given, settings, strategies as st

from contextleak.info import entropy, holevo_chi, mutual_information
from contextleak.instruments import implements, naimark_extension, parent_instrument, random_instrument
from contextleak.ipc import MemoryContext, ipc_modified, leak, memory_gap, old_ipc, sharp_relation_residual
from contextleak.maps import apply_instrument, random_channel
from contextleak.measurements import pauli_observable, random_povm, random_pvm
from contextleak.states import random_density

from oracles import entropy_oracle

seeds = st.integers(min_value=0, max_value=2**32 - 1)
dims = st.sampled_from([2, 3])
kinds = st.sampled_from(["parent-unitary", "luders", "parent-channel", "depolarizing"])
FAST = settings(max_examples=60, deadline=None)


@FAST
@given(seeds, dims)
def test_entropy_bounds_and_oracle(seed, d):
    rho = random_density(d, seed=seed)
    s = entropy(rho)
    assert -1e-12 <= s <= math.log(d) + 1e-12
    assert abs(s - entropy_oracle(rho.matrix)) < 1e-10


@FAST
@given(seeds, dims, st.integers(min_value=1, max_value=4))
def test_naimark_compression(seed, d, n):
    ext = naimark_extension(random_povm(d, n, seed))
    assert ext.max_violation() < 1e-9


@FAST
@given(seeds, dims, kinds)
def test_leak_is_nonnegative(seed, d, kind):
    rng = np.random.default_rng(seed)
    alice, _ = random_instrument(d, 2, rng, kind)
    eve, _ = random_instrument(alice.out_dim, 2, rng, "luders")
    rep = leak(random_density(d, seed=rng), alice, eve)
    assert rep.leak >= -1e-9
    assert abs(rep.leak - (rep.chi_alice - rep.chi_after_eve)) <= 1e-12


@FAST
@given(seeds, dims)
def test_holevo_data_processing(seed, d):
    rng = np.random.default_rng(seed)
    inst, _ = random_instrument(d, 3, rng, "luders")
    ens = apply_instrument(inst, random_density(d, seed=rng))
    channel = random_channel(d, d, 2, rng)
    assert holevo_chi(ens.map(channel.on_state)) <= holevo_chi(ens) + 1e-9


@FAST
@given(seeds, dims)
def test_sharp_relation_and_commuting_zero(seed, d):
    rng = np.random.default_rng(seed)
    rho = random_density(d, seed=rng)
    x, y = random_pvm(d, rng), random_pvm(d, rng)
    assert sharp_relation_residual(rho, x, y) <= 1e-9
    assert abs(ipc_modified(rho, x, x)) <= 1e-9
    assert abs(old_ipc(rho, x, x)) <= 1e-9


@FAST
@given(seeds, dims)
def test_parent_implements(seed, d):
    obs = random_povm(d, 3, seed)
    assert implements(parent_instrument(obs), obs)


@FAST
@given(seeds)
def test_memory_antisymmetry(seed):
    mc = MemoryContext(random_density(4, seed=seed).with_dims((2, 2)), pauli_observable("z"), pauli_observable("x"))
    old_gap, new_gap = memory_gap(mc)
    assert old_gap <= 1e-9 and new_gap >= -1e-9
    assert abs(old_gap + new_gap) <= 1e-9


@FAST
@given(seeds)
def test_mutual_information_nonnegative(seed):
    assert mutual_information(random_density(6, seed=seed).with_dims((3, 2))) >= 0
