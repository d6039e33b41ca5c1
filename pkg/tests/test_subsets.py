"""Subsets, sumsets, representation functions, and additive energy."""

import math

import numpy as np
import pytest

from cayleysum.errors import GuardError, StructuralError
from cayleysum.groups import parse_group
from cayleysum.subsets import (
    GroupSubset,
    additive_energy,
    additive_energy_oracle,
    parse_subset,
    rep_function,
    sumset,
)

from conftest import (
    oracle_energy,
    oracle_rep_counts,
    oracle_sumset,
    random_nonempty,
)


def test_from_indices_dedup_and_order():
    g = parse_group("z10")
    s = GroupSubset.from_indices(g, [5, 1, 5, 3])
    assert s.to_index_list() == [1, 3, 5]
    assert s.size == 3
    assert s.contains(5) and not s.contains(0)


def test_mask_roundtrip():
    g = parse_group("f2^3")
    s = GroupSubset.from_indices(g, [0, 2, 7])
    assert GroupSubset.from_mask(g, s.mask).to_index_list() == [0, 2, 7]
    assert s.mask == (1 << 0) | (1 << 2) | (1 << 7)


def test_set_algebra_matches_python_sets(small_group, rnd):
    g = small_group
    for _ in range(50):
        a = random_nonempty(rnd, g, g.order)
        b = random_nonempty(rnd, g, g.order)
        sa, sb = set(a.to_index_list()), set(b.to_index_list())
        assert set(a.union(b).to_index_list()) == sa | sb
        assert set(a.intersection(b).to_index_list()) == sa & sb
        assert set(a.difference(b).to_index_list()) == sa - sb
        assert a.is_disjoint(b) == sa.isdisjoint(sb)


def test_out_of_range_rejected():
    g = parse_group("z6")
    with pytest.raises(StructuralError):
        GroupSubset.from_indices(g, [0, 6])
    with pytest.raises(StructuralError):
        GroupSubset.from_indices(g, [-1])


def test_parse_subset_forms():
    g = parse_group("z8")
    assert parse_subset(g, "[0,1,5]").to_index_list() == [0, 1, 5]
    assert parse_subset(g, "0x2f").to_index_list() == [0, 1, 2, 3, 5]
    assert parse_subset(g, "[]").size == 0
    with pytest.raises(StructuralError):
        parse_subset(g, "[0,99]")


def test_sumset_frozen():
    g = parse_group("z8")
    x = GroupSubset.from_indices(g, [1, 2])
    y = GroupSubset.from_indices(g, [3, 6])
    assert sumset(x, y).to_index_list() == [0, 4, 5, 7]


def test_sumset_matches_oracle(small_group, rnd):
    g = small_group
    for _ in range(30):
        x = random_nonempty(rnd, g, 6)
        y = random_nonempty(rnd, g, 6)
        assert set(sumset(x, y).to_index_list()) == oracle_sumset(
            g.moduli, x.to_index_list(), y.to_index_list()
        )


def test_rep_function_frozen():
    g = parse_group("z4")
    x = GroupSubset.from_indices(g, [0, 1])
    r = rep_function(x, x)
    assert r.values.tolist() == [1, 2, 1, 0]
    assert additive_energy(x, x) == 6


def test_energy_full_group_z2():
    g = parse_group("z2")
    full = GroupSubset.full(g)
    assert additive_energy(full, full) == 8


def test_rep_function_matches_oracle(small_group, rnd):
    g = small_group
    for _ in range(20):
        x = random_nonempty(rnd, g, 8)
        y = random_nonempty(rnd, g, 8)
        counts = oracle_rep_counts(g.moduli, x.to_index_list(), y.to_index_list())
        values = rep_function(x, y).values
        assert {z: int(v) for z, v in enumerate(values) if v} == dict(counts)


def test_energy_against_both_oracles(small_group, rnd):
    g = small_group
    for _ in range(40):
        x = random_nonempty(rnd, g, 8)
        y = random_nonempty(rnd, g, 8)
        e = additive_energy(x, y)
        assert e == additive_energy_oracle(x, y)
        assert e == oracle_energy(g.moduli, x.to_index_list(), y.to_index_list())


def test_energy_symmetric_in_arguments(small_group, rnd):
    g = small_group
    for _ in range(20):
        x = random_nonempty(rnd, g, 8)
        y = random_nonempty(rnd, g, 8)
        assert additive_energy(x, y) == additive_energy(y, x)


def test_energy_bounds(small_group, rnd):
    g = small_group
    for _ in range(40):
        x = random_nonempty(rnd, g, g.order)
        y = random_nonempty(rnd, g, g.order)
        e = additive_energy(x, y)
        assert x.size * y.size <= e <= x.size * y.size * min(x.size, y.size)


def test_energy_full_group_row():
    # against the whole group every translate is uniform: E(G, Y) = N |Y|^2
    for name in ("z12", "f2^4", "3,5"):
        g = parse_group(name)
        full = GroupSubset.full(g)
        y = GroupSubset.from_indices(g, range(0, g.order, 2))
        assert additive_energy(full, y) == g.order * y.size**2


def _sqrt_subadditive(e_union: int, e_x: int, e_y: int) -> bool:
    # sqrt(e_union) <= sqrt(e_x) + sqrt(e_y), squared out in integers
    lhs = e_union - e_x - e_y
    return lhs <= 0 or lhs * lhs <= 4 * e_x * e_y


def test_union_energy_inequalities(small_group, rnd):
    g = small_group
    for _ in range(60):
        x = random_nonempty(rnd, g, g.order)
        y = random_nonempty(rnd, g, g.order)
        z = random_nonempty(rnd, g, g.order)
        e_union = additive_energy(x.union(y), z)
        e_x, e_y = additive_energy(x, z), additive_energy(y, z)
        assert _sqrt_subadditive(e_union, e_x, e_y)
        if x.is_disjoint(y):
            assert e_union >= e_x + e_y


def test_disjoint_union_superadditive_forced(small_group, rnd):
    g = small_group
    for _ in range(30):
        x = random_nonempty(rnd, g, g.order)
        rest = GroupSubset.full(g).difference(x)
        if rest.size == 0:
            continue
        pick = rnd.sample(rest.to_index_list(), rnd.randint(1, rest.size))
        y = GroupSubset.from_indices(g, pick)
        z = random_nonempty(rnd, g, g.order)
        assert x.is_disjoint(y)
        assert additive_energy(x.union(y), z) >= additive_energy(x, z) + additive_energy(y, z)


def test_empty_inputs_give_zero():
    g = parse_group("z4")
    empty = GroupSubset.empty(g)
    x = GroupSubset.from_indices(g, [0])
    assert additive_energy(empty, x) == 0
    assert rep_function(x, empty).total() == 0
    assert sumset(empty, x).size == 0


def test_oracle_guard():
    g = parse_group("z64", dense_cap=1 << 20)
    big = GroupSubset.full(g)
    # (|X||Y|)^2 = 64^4 = 1.6e7 is fine; push over 1e8 with a bigger group
    g2 = parse_group("z128")
    big2 = GroupSubset.full(g2)
    with pytest.raises(GuardError):
        additive_energy_oracle(big2, big2)
    assert additive_energy_oracle(big, big) == additive_energy(big, big)


def test_translate_matches_oracle(small_group, rnd):
    from conftest import oracle_add

    g = small_group
    s = random_nonempty(rnd, g, 6)
    shift = rnd.randrange(g.order)
    moved = s.translate(shift)
    assert set(moved.to_index_list()) == {
        oracle_add(g.moduli, i, shift) for i in s.to_index_list()
    }
