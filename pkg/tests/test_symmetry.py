import random

import pytest
from hypothesis import given, settings, strategies as st

from conftest import naive_automorphisms, named_fixtures, planted_formula, random_signed_perm
from symfix.bench import gen_php
from symfix.cnf import Formula
from symfix.group import enumerate_group
from symfix.symmetry import (
    GeneratorError,
    LiteralPermutation,
    build_model_graph,
    find_symmetries,
    format_generators,
    parse_generators,
    validate_symmetry,
)


def test_permutation_basics():
    s = LiteralPermutation.from_mapping(3, {1: 2, 2: -1})
    assert s(1) == 2 and s(-1) == -2 and s(2) == -1 and s(3) == 3
    assert s.inverse()(2) == 1
    assert s.compose(s)(1) == -1
    assert s.compose(s.inverse()).is_identity()
    assert list(s.moved_variables()) == [1, 2]
    assert s.fixes(3) and not s.fixes(1)
    assert s.cycles() == "(1 2 -1 -2)"
    assert LiteralPermutation.identity(3).cycles() == "()"


def test_compose_applies_right_first():
    a = LiteralPermutation.from_mapping(3, {1: 2, 2: 1})
    b = LiteralPermutation.from_mapping(3, {2: 3, 3: 2})
    assert a.compose(b)(2) == a(b(2)) == 3


def test_negation_commutation_enforced():
    with pytest.raises(ValueError):
        LiteralPermutation([0, 1, 2])
    with pytest.raises(ValueError):
        LiteralPermutation([0, 0, 2, 3])
    with pytest.raises(ValueError):
        LiteralPermutation([2, 1, 0, 3])
    with pytest.raises(ValueError):
        LiteralPermutation.from_mapping(2, {1: 2, -1: 2})
    assert LiteralPermutation([1, 0, 2, 3])(1) == -1


def test_restrict_keeps_invariant_part():
    s = LiteralPermutation.from_mapping(4, {1: 2, 2: 1, 3: 4, 4: 3})
    r = s.restrict({1, 2})
    assert r(1) == 2 and r(3) == 3


def test_validate_symmetry(amo3):
    swap = LiteralPermutation.from_mapping(3, {1: 2, 2: 1})
    flip = LiteralPermutation.from_mapping(3, {1: -1})
    assert validate_symmetry(amo3, swap)
    assert not validate_symmetry(amo3, flip)


def test_parse_generators_roundtrip(amo3):
    gens = parse_generators("c gens\n(1 2)\n(2 3)\n", amo3)
    assert [g.cycles() for g in gens] == ["(1 2)", "(2 3)"]
    assert parse_generators(format_generators(gens), amo3) == gens


def test_parse_generators_signed_and_unicode_minus():
    f = Formula(2, [(1, 2), (-1, -2)])
    (g,) = parse_generators("(1 -2)\n", f)
    assert g(1) == -2 and g(2) == -1
    (h,) = parse_generators("(1 −2)(−1 2)\n", f)
    assert h == g


@pytest.mark.parametrize("text, index", [("(1 2)\n(1 -1)\n", 1), ("(1 x)\n", 0), ("(1 2) junk\n", 0),
                                         ("(1 2)\n(2 3)\n(1 0)\n", 2)])
def test_parse_generators_errors(amo3, text, index):
    with pytest.raises(GeneratorError) as exc:
        parse_generators(text, amo3)
    assert exc.value.index == index


def test_model_graph_shape(amo3):
    g = build_model_graph(amo3)
    assert g.num_literal_vertices == 6
    assert g.num_vertices == 10
    clause_colors = sorted(g.colors[6:])
    assert clause_colors == [3, 3, 3, 4]  # 1 + clause length


@pytest.mark.parametrize("name", sorted(k for k, f in named_fixtures().items() if len(f.variables) <= 6))
def test_search_generates_full_group(name):
    f = named_fixtures()[name]
    res = find_symmetries(f)
    assert res.complete
    assert all(validate_symmetry(f, g) for g in res.generators)
    assert len(enumerate_group(res.generators, f.num_vars)) == len(naive_automorphisms(f))


def test_search_php54_order():
    f = gen_php(5, 4).formula
    res = find_symmetries(f)
    from symfix.group import schreier_sims

    assert schreier_sims(res.generators, num_vars=f.num_vars).order() == 120 * 24


def test_search_budget_marks_incomplete():
    res = find_symmetries(gen_php(5, 4).formula, max_nodes=3)
    assert not res.complete
    assert all(validate_symmetry(gen_php(5, 4).formula, g) for g in res.generators)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10**6))
def test_search_on_planted(seed):
    f = planted_formula(seed, max_vars=7)
    res = find_symmetries(f)
    assert res.complete
    assert all(validate_symmetry(f, g) for g in res.generators)
    if len(f.variables) <= 6:
        assert len(enumerate_group(res.generators, f.num_vars)) == len(naive_automorphisms(f))


def test_random_perm_helper_is_symmetry_after_closure():
    from conftest import close_under

    rng = random.Random(3)
    perm = random_signed_perm(rng, 5)
    f = Formula(5, close_under([[1, -2], [3, 4, 5]], perm))
    sigma = LiteralPermutation.from_mapping(5, perm)
    assert validate_symmetry(f, sigma)
