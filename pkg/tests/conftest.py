"""Shared fixtures and independent oracles.

Oracles here redo the arithmetic from the moduli alone (own codec, own
elimination, own sign-vector enumeration), so they share no code path with
the implementations they judge.
"""

from __future__ import annotations

import itertools
import random
from collections import Counter

import pytest

from cayleysum.groups import parse_group
from cayleysum.subsets import GroupSubset


# ---------------------------------------------------------------- group math

def coords_of(moduli, index: int) -> tuple:
    out = []
    for m in reversed(moduli):
        index, r = divmod(index, m)
        out.append(r)
    return tuple(reversed(out))


def index_of(moduli, coords) -> int:
    idx = 0
    for m, c in zip(moduli, coords):
        idx = idx * m + (c % m)
    return idx


def oracle_add(moduli, i: int, j: int) -> int:
    ci, cj = coords_of(moduli, i), coords_of(moduli, j)
    return index_of(moduli, tuple(a + b for a, b in zip(ci, cj)))


def oracle_neg(moduli, i: int) -> int:
    return index_of(moduli, tuple(-c for c in coords_of(moduli, i)))


def oracle_scale(moduli, i: int, c: int) -> int:
    return index_of(moduli, tuple(c * v for v in coords_of(moduli, i)))


# ------------------------------------------------------------ energy oracles

def oracle_rep_counts(moduli, x_idx, y_idx) -> Counter:
    counts: Counter = Counter()
    for x in x_idx:
        for y in y_idx:
            counts[oracle_add(moduli, x, y)] += 1
    return counts


def oracle_energy(moduli, x_idx, y_idx) -> int:
    return sum(v * v for v in oracle_rep_counts(moduli, x_idx, y_idx).values())


def oracle_sumset(moduli, x_idx, y_idx) -> set:
    return set(oracle_rep_counts(moduli, x_idx, y_idx))


# ------------------------------------------------------ dissociation oracles

def oracle_dissociated(moduli, s_idx) -> bool:
    """Sign-vector enumeration; feasible up to |S| around 8."""
    items = list(s_idx)
    if not items:
        return True
    zero = (0,) * len(moduli)
    for signs in itertools.product((-1, 0, 1), repeat=len(items)):
        if not any(signs):
            continue
        total = [0] * len(moduli)
        for c, e in zip(signs, items):
            for pos, v in enumerate(coords_of(moduli, e)):
                total[pos] += c * v
        if tuple(t % m for t, m in zip(total, moduli)) == zero:
            return False
    return True


def oracle_gf2_rank(indices) -> int:
    """Gaussian elimination over int bitmasks, written independently."""
    pivots: dict[int, int] = {}
    rank = 0
    for raw in indices:
        v = int(raw)
        while v:
            lead = v.bit_length() - 1
            if lead not in pivots:
                pivots[lead] = v
                rank += 1
                break
            v ^= pivots[lead]
    return rank


def oracle_dimension(moduli, s_idx) -> int:
    """Max dissociated subset size by direct subset enumeration."""
    items = list(s_idx)
    for size in range(len(items), 0, -1):
        for combo in itertools.combinations(items, size):
            if oracle_dissociated(moduli, combo):
                return size
    return 0


def oracle_sigma_parts(moduli, a_idx, x_idx, y_idx) -> tuple:
    """(edge count, |X||Y|) so callers can form sigma exactly."""
    a = set(a_idx)
    edges = sum(
        1 for x in x_idx for y in y_idx if oracle_add(moduli, x, y) in a
    )
    return edges, len(x_idx) * len(y_idx)


# ------------------------------------------------------------------ sampling

def random_subset_indices(rnd: random.Random, order: int, size: int) -> list:
    return sorted(rnd.sample(range(order), size))


def random_nonempty(rnd: random.Random, g, max_size: int) -> GroupSubset:
    size = rnd.randint(1, min(max_size, g.order))
    return GroupSubset.from_indices(g, random_subset_indices(rnd, g.order, size))


@pytest.fixture
def rnd() -> random.Random:
    return random.Random(0xC0FFEE)


@pytest.fixture(params=["z12", "f2^4", "3,5"])
def small_group(request):
    return parse_group(request.param)
