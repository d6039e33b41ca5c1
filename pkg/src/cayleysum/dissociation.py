"""Dissociated sets, spans, and additive dimension.

A set S is dissociated when the only coefficient vector eps in {-1,0,1}^S
with sum(eps_s * s) = 0 is all zeros.  Span(S) is the set of all such signed
subset sums.  The additive dimension of A is the size of its largest
dissociated subset.

Two facts drive the implementation:

* Span(S) is symmetric and S + {e} stays dissociated exactly when S is
  dissociated and e lies outside Span(S).  So membership tests reduce to a
  dense span closure grown one element at a time, with no sign-vector
  enumeration.
* In exponent-2 groups, dissociated means linearly independent over the
  2-element field, and the index codec makes every element its own bit
  vector, so rank is Gaussian elimination over int bitmasks and greedy
  selection is exact (independence is a matroid).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import combinations

import numpy as np

from .errors import GuardError, StructuralError
from .groups import GroupSpec
from .subsets import GroupSubset

__all__ = [
    "SPAN_ENUMERATION_GUARD",
    "EXACT_DIMENSION_GUARD",
    "DimensionResult",
    "LowDimensionSetCount",
    "is_dissociated",
    "span",
    "additive_dimension",
    "count_low_dimension_sets",
]

# non-exponent-2 span/dissociation closure refuses above this set size
SPAN_ENUMERATION_GUARD = 24
# exact dimension search refuses above this set size (non-exponent-2)
EXACT_DIMENSION_GUARD = 20
# count_low_dimension_sets enumerates exhaustively only up to this group order
_COUNT_ORDER_LIMIT = 32
_COUNT_SUBSET_LIMIT = 2_000_000


def _gf2_basis_scan(indices) -> tuple[int, list[int]]:
    """Rank and greedy witness of a family of F_2 vectors given as int bitmasks."""
    basis: list[int] = []  # kept in echelon form, distinct leading bits
    witness: list[int] = []
    for raw in indices:
        v = int(raw)
        cur = v
        for b in basis:
            cur = min(cur, cur ^ b)
        if cur:
            basis.append(cur)
            basis.sort(reverse=True)
            witness.append(v)
    return len(basis), witness


def _span_guard(g: GroupSpec, size: int, what: str) -> None:
    if not g.is_exponent_two and size > SPAN_ENUMERATION_GUARD:
        raise GuardError(
            f"{what} over {size} elements exceeds the guard {SPAN_ENUMERATION_GUARD} "
            "outside exponent-2 groups"
        )


def _closure_insert(g: GroupSpec, span_bits: np.ndarray, e: int) -> None:
    """Grow a span closure in place by one generator."""
    old = np.flatnonzero(span_bits)
    span_bits[g.translate_array(old, e)] = True
    ne = g.neg_index(e)
    if ne != e:
        span_bits[g.translate_array(old, ne)] = True


def is_dissociated(s: GroupSubset) -> bool:
    """Whether no nontrivial {-1,0,1} combination of s sums to zero."""
    g = s.group
    if s.size == 0:
        return True
    if g.is_exponent_two:
        rank, _ = _gf2_basis_scan(s.indices)
        return rank == s.size
    _span_guard(g, s.size, "dissociation test")
    span_bits = np.zeros(g.order, dtype=bool)
    span_bits[0] = True
    for e in s.indices:
        e = int(e)
        if span_bits[e]:
            return False
        _closure_insert(g, span_bits, e)
    return True


def span(s: GroupSubset) -> GroupSubset:
    """All signed subset sums of s (always contains 0, closed under negation)."""
    g = s.group
    _span_guard(g, s.size, "span")
    span_bits = np.zeros(g.order, dtype=bool)
    span_bits[0] = True
    for e in s.indices:
        _closure_insert(g, span_bits, int(e))
    return GroupSubset(g, span_bits)


@dataclass
class DimensionResult:
    """Additive dimension value with a dissociated witness subset."""

    value: int
    witness: GroupSubset
    exact: bool

    def to_json(self) -> dict:
        return {"value": self.value, "witness": self.witness.to_index_list(), "exact": self.exact}


def _greedy_scan(a: GroupSubset) -> list[int]:
    """Maximal-by-inclusion dissociated subset, scanning indices ascending."""
    g = a.group
    if g.is_exponent_two:
        _, witness = _gf2_basis_scan(a.indices)
        return witness
    span_bits = np.zeros(g.order, dtype=bool)
    span_bits[0] = True
    chosen: list[int] = []
    for e in a.indices:
        e = int(e)
        if not span_bits[e]:
            chosen.append(e)
            _closure_insert(g, span_bits, e)
    return chosen


def _exact_search(a: GroupSubset, stop_at: int | None = None) -> list[int]:
    """Largest dissociated subset by branch and bound over indices ascending.

    With stop_at set, returns early once a dissociated subset of that size is
    found (used for dim <= d tests).
    """
    g = a.group
    elems = [int(e) for e in a.indices]
    n = len(elems)
    best = _greedy_scan(a)
    if stop_at is not None and len(best) >= stop_at:
        return best[:stop_at]
    root = np.zeros(g.order, dtype=bool)
    root[0] = True

    def rec(i: int, chosen: list[int], span_bits: np.ndarray) -> bool:
        nonlocal best
        if len(chosen) > len(best):
            best = list(chosen)
            if stop_at is not None and len(best) >= stop_at:
                return True
        if i == n or len(chosen) + (n - i) <= len(best):
            return False
        e = elems[i]
        if not span_bits[e]:
            grown = span_bits.copy()
            grown[e] = True  # e itself is a one-term signed sum
            _closure_insert(g, grown, e)
            if rec(i + 1, chosen + [e], grown):
                return True
        return rec(i + 1, chosen, span_bits)

    rec(0, [], root)
    return best


def additive_dimension(a: GroupSubset, mode: str = "exact") -> DimensionResult:
    """Largest dissociated subset of a, exact or greedy lower bound.

    Greedy mode returns a maximal-by-inclusion witness and is flagged inexact.
    Exact mode uses F_2 rank in exponent-2 groups and a branch-and-bound
    search elsewhere, refusing above EXACT_DIMENSION_GUARD elements.
    """
    g = a.group
    if mode == "greedy":
        chosen = _greedy_scan(a)
        return DimensionResult(len(chosen), GroupSubset.from_indices(g, chosen), exact=False)
    if mode != "exact":
        raise StructuralError(f"unknown dimension mode {mode!r}")
    if g.is_exponent_two:
        chosen = _greedy_scan(a)  # matroid: greedy is maximum
        return DimensionResult(len(chosen), GroupSubset.from_indices(g, chosen), exact=True)
    if a.size > EXACT_DIMENSION_GUARD:
        raise GuardError(
            f"exact dimension over {a.size} elements exceeds the guard "
            f"{EXACT_DIMENSION_GUARD}; use mode='greedy'"
        )
    chosen = _exact_search(a)
    return DimensionResult(len(chosen), GroupSubset.from_indices(g, chosen), exact=True)


def _dimension_at_most(g: GroupSpec, indices: tuple[int, ...], d: int) -> bool:
    if len(indices) <= d:
        return True
    if g.is_exponent_two:
        basis: list[int] = []
        for v in indices:
            cur = v
            for b in basis:
                cur = min(cur, cur ^ b)
            if cur:
                basis.append(cur)
                basis.sort(reverse=True)
                if len(basis) > d:
                    return False
        return True
    found = _exact_search(GroupSubset.from_indices(g, indices), stop_at=d + 1)
    return len(found) <= d


@dataclass
class LowDimensionSetCount:
    """Count of nonempty sets X with |X| <= n and dim(X) <= d, plus bounds.

    The closed-form ceiling is exp(2nd); the intermediate quantity
    N^d * 3^(nd) < exp((log N + 1.1 n) d) feeds the chain that proves it
    whenever n >= 2 log N.
    """

    exact: int | None
    bound: float
    intermediate: float
    log_bound: float
    log_intermediate: float
    chain_ok: bool
    threshold_ok: bool
    enumerated: bool

    def to_json(self) -> dict:
        return {
            "exact": self.exact,
            "bound": self.bound,
            "intermediate": self.intermediate,
            "log_bound": self.log_bound,
            "log_intermediate": self.log_intermediate,
            "chain_ok": self.chain_ok,
            "threshold_ok": self.threshold_ok,
            "enumerated": self.enumerated,
        }


def _exp_or_inf(x: float) -> float:
    try:
        return math.exp(x)
    except OverflowError:
        return math.inf


def count_low_dimension_sets(
    g: GroupSpec, n: int, d: int, max_enumeration: int = _COUNT_SUBSET_LIMIT
) -> LowDimensionSetCount:
    """Count (when feasible) and bound the nonempty X with |X| <= n, dim(X) <= d."""
    if n < 1 or d < 0:
        raise StructuralError("need n >= 1 and d >= 0")
    N = g.order
    log_n_group = math.log(N)
    threshold_ok = n >= 2 * log_n_group
    log_bound = 2.0 * n * d
    log_intermediate = d * log_n_group + n * d * math.log(3.0)
    mid = (log_n_group + 1.1 * n) * d
    # strict chain only makes sense for d >= 1; at d = 0 everything is 1
    chain_ok = (log_intermediate < mid <= log_bound) if d >= 1 else True

    exact: int | None = None
    enumerated = False
    top = min(n, N)
    total_subsets = sum(math.comb(N, i) for i in range(1, top + 1))
    if N <= _COUNT_ORDER_LIMIT and total_subsets <= max_enumeration:
        enumerated = True
        count = 0
        for size in range(1, top + 1):
            if size <= d:
                count += math.comb(N, size)
                continue
            for combo in combinations(range(N), size):
                if _dimension_at_most(g, combo, d):
                    count += 1
        exact = count

    return LowDimensionSetCount(
        exact=exact,
        bound=_exp_or_inf(log_bound),
        intermediate=_exp_or_inf(log_intermediate),
        log_bound=log_bound,
        log_intermediate=log_intermediate,
        chain_ok=chain_ok,
        threshold_ok=threshold_ok,
        enumerated=enumerated,
    )
