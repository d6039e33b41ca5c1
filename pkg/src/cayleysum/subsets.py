"""Dense subsets of a group and exact additive-energy computations.

A GroupSubset is an immutable bitset over the index space [0, N).  The
additive energy of (X, Y) counts quadruples (x1, y1, x2, y2) with
x1 + y1 = x2 + y2.  The production path computes the representation counts
r(z) = #{(x, y) : x + y = z} and sums r(z)^2; the quartic literal count is
kept as an independent oracle and never shares that code path.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import GuardError, StructuralError
from .groups import GroupSpec

__all__ = [
    "GroupSubset",
    "parse_subset",
    "sumset",
    "RepFunction",
    "rep_function",
    "additive_energy",
    "additive_energy_oracle",
    "ORACLE_QUADRUPLE_GUARD",
]

# additive_energy_oracle refuses above this many quadruples
ORACLE_QUADRUPLE_GUARD = 10**8

# rep_function uses one flat pairwise bincount below this many pairs
_PAIRWISE_LIMIT = 1 << 22


class GroupSubset:
    """Immutable dense subset of a group, indexed by the group's codec."""

    __slots__ = ("group", "_bits", "_indices", "_mask")

    def __init__(self, group: GroupSpec, bits: np.ndarray):
        bits = np.asarray(bits, dtype=bool)
        if bits.shape != (group.order,):
            raise StructuralError(
                f"bit vector of length {bits.shape} does not match group order {group.order}"
            )
        bits = bits.copy()
        bits.setflags(write=False)
        object.__setattr__(self, "group", group)
        object.__setattr__(self, "_bits", bits)
        object.__setattr__(self, "_indices", None)
        object.__setattr__(self, "_mask", None)

    def __setattr__(self, name, value):
        raise AttributeError("GroupSubset is immutable")

    # ---- constructors ----

    @classmethod
    def empty(cls, group: GroupSpec) -> "GroupSubset":
        return cls(group, np.zeros(group.order, dtype=bool))

    @classmethod
    def full(cls, group: GroupSpec) -> "GroupSubset":
        return cls(group, np.ones(group.order, dtype=bool))

    @classmethod
    def from_indices(cls, group: GroupSpec, indices: Iterable[int]) -> "GroupSubset":
        bits = np.zeros(group.order, dtype=bool)
        for i in indices:
            i = int(i)
            if not 0 <= i < group.order:
                raise StructuralError(f"index {i} out of range for group order {group.order}")
            bits[i] = True
        return cls(group, bits)

    @classmethod
    def from_mask(cls, group: GroupSpec, mask: int) -> "GroupSubset":
        if mask < 0:
            raise StructuralError("subset mask must be nonnegative")
        if mask >> group.order:
            raise StructuralError(f"mask 0x{mask:x} has bits beyond group order {group.order}")
        bits = np.zeros(group.order, dtype=bool)
        i = 0
        while mask:
            if mask & 1:
                bits[i] = True
            mask >>= 1
            i += 1
        return cls(group, bits)

    # ---- views ----

    @property
    def bits(self) -> np.ndarray:
        return self._bits

    @property
    def indices(self) -> np.ndarray:
        if self._indices is None:
            object.__setattr__(self, "_indices", np.flatnonzero(self._bits))
        return self._indices

    @property
    def size(self) -> int:
        return int(self._bits.sum())

    @property
    def mask(self) -> int:
        """The subset as a Python int bitmask (bit i = index i)."""
        if self._mask is None:
            acc = 0
            for i in self.indices:
                acc |= 1 << int(i)
            object.__setattr__(self, "_mask", acc)
        return self._mask

    def contains(self, index: int) -> bool:
        return bool(self._bits[index])

    def to_index_list(self) -> list[int]:
        return [int(i) for i in self.indices]

    def to_json(self) -> dict:
        return {"indices": self.to_index_list(), "size": self.size}

    # ---- set algebra ----

    def _require_same_group(self, other: "GroupSubset") -> None:
        if self.group != other.group:
            raise StructuralError("subsets live in different groups")

    def union(self, other: "GroupSubset") -> "GroupSubset":
        self._require_same_group(other)
        return GroupSubset(self.group, self._bits | other._bits)

    def intersection(self, other: "GroupSubset") -> "GroupSubset":
        self._require_same_group(other)
        return GroupSubset(self.group, self._bits & other._bits)

    def difference(self, other: "GroupSubset") -> "GroupSubset":
        self._require_same_group(other)
        return GroupSubset(self.group, self._bits & ~other._bits)

    def is_disjoint(self, other: "GroupSubset") -> bool:
        self._require_same_group(other)
        return not bool((self._bits & other._bits).any())

    def translate(self, by: int) -> "GroupSubset":
        """The shifted set {x + by : x in self}."""
        bits = np.zeros(self.group.order, dtype=bool)
        bits[self.group.translate_array(self.indices, by)] = True
        return GroupSubset(self.group, bits)

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, GroupSubset)
            and self.group == other.group
            and bool(np.array_equal(self._bits, other._bits))
        )

    def __hash__(self) -> int:
        return hash((self.group, self.mask))

    def __repr__(self) -> str:
        shown = self.to_index_list()
        if len(shown) > 12:
            shown = shown[:12] + ["..."]
        return f"GroupSubset({self.group!r}, {shown})"


def parse_subset(group: GroupSpec, text: str) -> GroupSubset:
    """Parse a subset literal: an index list "[0,1,5]" or a hex mask "0x2f"."""
    cleaned = text.strip().replace(" ", "")
    if not cleaned:
        raise StructuralError("empty subset literal")
    if cleaned.startswith("[") and cleaned.endswith("]"):
        body = cleaned[1:-1]
        if not body:
            return GroupSubset.empty(group)
        try:
            indices = [int(part) for part in body.split(",")]
        except ValueError as exc:
            raise StructuralError(f"bad index list {text!r}") from exc
        return GroupSubset.from_indices(group, indices)
    if cleaned.lower().startswith("0x"):
        try:
            mask = int(cleaned, 16)
        except ValueError as exc:
            raise StructuralError(f"bad hex mask {text!r}") from exc
        return GroupSubset.from_mask(group, mask)
    raise StructuralError(
        f"unrecognized subset literal {text!r}; use an index list like [0,1,5] or a hex mask like 0x2f"
    )


def sumset(x: GroupSubset, y: GroupSubset) -> GroupSubset:
    """The set {a + b : a in X, b in Y}."""
    x._require_same_group(y)
    g = x.group
    if x.size == 0 or y.size == 0:
        return GroupSubset.empty(g)
    small, large = (x, y) if x.size <= y.size else (y, x)
    bits = np.zeros(g.order, dtype=bool)
    large_idx = large.indices
    for e in small.indices:
        bits[g.translate_array(large_idx, int(e))] = True
    return GroupSubset(g, bits)


@dataclass
class RepFunction:
    """Representation counts r(z) = #{(x, y) in X x Y : x + y = z}."""

    values: np.ndarray
    x_size: int
    y_size: int

    def total(self) -> int:
        return int(self.values.sum())


def rep_function(x: GroupSubset, y: GroupSubset) -> RepFunction:
    x._require_same_group(y)
    g = x.group
    counts = np.zeros(g.order, dtype=np.int64)
    if x.size and y.size:
        if x.size * y.size <= _PAIRWISE_LIMIT:
            ps = g.pairsum_matrix(x.indices, y.indices)
            counts = np.bincount(ps.ravel(), minlength=g.order).astype(np.int64)
        else:
            small, large = (x, y) if x.size <= y.size else (y, x)
            large_idx = large.indices
            for e in small.indices:
                counts += np.bincount(
                    g.translate_array(large_idx, int(e)), minlength=g.order
                )
    return RepFunction(values=counts, x_size=x.size, y_size=y.size)


def additive_energy(x: GroupSubset, y: GroupSubset) -> int:
    """Number of quadruples (x1, y1, x2, y2) with x1 + y1 = x2 + y2, exactly."""
    v = rep_function(x, y).values
    return int(np.dot(v, v))


def additive_energy_oracle(x: GroupSubset, y: GroupSubset) -> int:
    """Literal quadruple count; independent of the rep-function path.

    Refuses when |X|^2 |Y|^2 exceeds ORACLE_QUADRUPLE_GUARD.
    """
    x._require_same_group(y)
    g = x.group
    quads = (x.size * y.size) ** 2
    if quads > ORACLE_QUADRUPLE_GUARD:
        raise GuardError(
            f"oracle would count {quads} quadruples, above the guard {ORACLE_QUADRUPLE_GUARD}"
        )
    xi = x.indices
    yi = y.indices
    if len(xi) == 0 or len(yi) == 0:
        return 0
    sums = [g.translate_array(yi, int(a)) for a in xi]
    total = 0
    for z1 in sums:
        for z2 in sums:
            total += int((z1[:, None] == z2[None, :]).sum())
    return total
