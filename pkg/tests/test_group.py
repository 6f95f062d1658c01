import random

import pytest
from hypothesis import given, settings, strategies as st

from symfix.bench import gen_parity, gen_php
from symfix.group import (
    OrbitTable,
    SSLimits,
    enumerate_group,
    generator_filter_stabilizer,
    orbit_of,
    pointwise_stabilizer,
    schreier_sims,
)
from symfix.symmetry import LiteralPermutation


def perm(n, mapping):
    return LiteralPermutation.from_mapping(n, mapping)


def random_gens(seed, n, k):
    rng = random.Random(seed)
    out = []
    for _ in range(k):
        vs = list(range(1, n + 1))
        rng.shuffle(vs)
        out.append(perm(n, {v: (w if rng.random() < 0.7 else -w) for v, w in zip(range(1, n + 1), vs)}))
    return out


def test_orbit_and_witness():
    g = [perm(4, {1: 2, 2: 3, 3: 1}), perm(4, {4: -4})]
    orbit, tree = orbit_of(g, 1)
    assert orbit == {1, 2, 3}
    for t in orbit:
        assert tree.witness(t)(1) == t
    with pytest.raises(KeyError):
        tree.witness(4)


def test_orbit_table():
    g = [perm(4, {1: 2, 2: 1}), perm(4, {3: -3})]
    table = OrbitTable(g, 4)
    assert table.same_orbit(1, 2) and table.same_orbit(-1, -2)
    assert not table.same_orbit(1, -1)
    assert table.same_orbit(3, -3)
    assert table.orbit(4) == {4}
    assert table.witness(2, 1)(2) == 1
    assert table.witness(3, -3)(3) == -3
    assert sorted(map(len, table.classes())) == [1, 1, 2, 2, 2]
    with pytest.raises(KeyError):
        table.witness(1, 3)


@pytest.mark.parametrize("inst, order", [(gen_php(3, 2), 12), (gen_php(5, 4), 2880), (gen_parity(4, 1), 8)])
def test_orders(inst, order):
    state = schreier_sims(inst.generators, num_vars=inst.formula.num_vars)
    assert state.order() == order


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10**6), st.integers(2, 5), st.integers(1, 3))
def test_order_and_membership_match_closure(seed, n, k):
    gens = random_gens(seed, n, k)
    elements = enumerate_group(gens, n)
    state = schreier_sims(gens, num_vars=n)
    assert state.order() == len(elements)
    assert all(state.contains(e) for e in elements)
    # something outside the group, if one exists
    for g in random_gens(seed + 1, n, 3):
        assert state.contains(g) == (g in elements)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10**6), st.integers(2, 5), st.integers(1, 3), st.data())
def test_pointwise_stabilizer_exact(seed, n, k, data):
    gens = random_gens(seed, n, k)
    elements = enumerate_group(gens, n)
    lits = data.draw(st.lists(st.integers(1, n).flatmap(lambda v: st.sampled_from((v, -v))),
                              max_size=2, unique_by=abs))
    state = schreier_sims(gens, num_vars=n)
    stab = pointwise_stabilizer(state, lits)
    expected = {e for e in elements if all(e(l) == l for l in lits)}
    assert set(enumerate_group(stab, n)) == expected
    # base hint gives the same subgroup without re-basing
    hinted = schreier_sims(gens, base_hint=lits, num_vars=n)
    assert hinted.base[: len(lits)] == lits
    assert set(enumerate_group(pointwise_stabilizer(hinted, lits), n)) == expected


def test_filter_is_subgroup_of_exact():
    inst = gen_parity(4, 1)
    exact = pointwise_stabilizer(schreier_sims(inst.generators, num_vars=4), [1])
    filt = generator_filter_stabilizer(inst.generators, [1])
    assert filt == []
    assert len(enumerate_group(exact, 4)) == 4


def test_budget_fallback():
    inst = gen_php(5, 4)
    state = schreier_sims(inst.generators, limits=SSLimits(max_base=1), num_vars=20)
    assert not state.has_bsgs
    with pytest.raises(ValueError):
        state.order()
    stab = pointwise_stabilizer(state, [1])
    assert stab == generator_filter_stabilizer(inst.generators, [1])
    state = schreier_sims(inst.generators, limits=SSLimits(max_transversal=5), num_vars=20)
    assert not state.has_bsgs


def test_trivial_group():
    state = schreier_sims([], num_vars=3)
    assert state.order() == 1
    assert pointwise_stabilizer(state, [1]) == []
