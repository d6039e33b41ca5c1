"""Finite abelian groups presented as products of cyclic factors.

A group is a tuple of moduli (m_1, ..., m_k), each >= 2, standing for
Z_{m_1} x ... x Z_{m_k}.  Elements are coordinate tuples; the index codec is
row-major mixed radix with the last coordinate varying fastest, so group
elements double as dense array indices in [0, N).  Dense representations are
capped at N <= 2^20 by default; the CAYLEY_DENSE_CAP environment variable
overrides the cap.

Groups of exponent 2 (all moduli equal to 2) get fast paths throughout: an
element's index is its coordinate vector read as a bitmask, addition is XOR,
and negation is the identity.
"""

from __future__ import annotations

import os
import re
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import StructuralError

__all__ = [
    "DEFAULT_DENSE_CAP",
    "DENSE_CAP_ENV",
    "Element",
    "GroupSpec",
    "parse_group",
]

DEFAULT_DENSE_CAP = 1 << 20
DENSE_CAP_ENV = "CAYLEY_DENSE_CAP"


def _dense_cap() -> int:
    raw = os.environ.get(DENSE_CAP_ENV)
    if raw is None:
        return DEFAULT_DENSE_CAP
    try:
        cap = int(raw, 0)
    except ValueError as exc:
        raise StructuralError(f"{DENSE_CAP_ENV} must be an integer, got {raw!r}") from exc
    if cap < 2:
        raise StructuralError(f"{DENSE_CAP_ENV} must be at least 2, got {cap}")
    return cap


@dataclass(frozen=True)
class Element:
    """Group element as a coordinate tuple."""

    coords: tuple[int, ...]

    def to_json(self) -> list[int]:
        return list(self.coords)


class GroupSpec:
    """Product-of-cyclic-factors group with a dense row-major index codec."""

    __slots__ = ("moduli", "order", "strides", "is_exponent_two", "_coord_cache")

    def __init__(self, moduli: Sequence[int], dense_cap: int | None = None):
        moduli = tuple(int(m) for m in moduli)
        if not moduli:
            raise StructuralError("a group needs at least one cyclic factor")
        for m in moduli:
            if m < 2:
                raise StructuralError(f"every modulus must be >= 2, got {m}")
        order = 1
        for m in moduli:
            order *= m
        cap = _dense_cap() if dense_cap is None else dense_cap
        if order > cap:
            raise StructuralError(
                f"group order {order} exceeds the dense representation cap {cap}"
            )
        strides = []
        acc = 1
        for m in reversed(moduli):
            strides.append(acc)
            acc *= m
        object.__setattr__(self, "moduli", moduli)
        object.__setattr__(self, "order", order)
        object.__setattr__(self, "strides", tuple(reversed(strides)))
        object.__setattr__(self, "is_exponent_two", all(m == 2 for m in moduli))
        object.__setattr__(self, "_coord_cache", {})

    def __setattr__(self, name, value):  # immutable by convention
        raise AttributeError("GroupSpec is immutable")

    def __eq__(self, other) -> bool:
        return isinstance(other, GroupSpec) and self.moduli == other.moduli

    def __hash__(self) -> int:
        return hash(self.moduli)

    def __repr__(self) -> str:
        return f"GroupSpec({','.join(str(m) for m in self.moduli)})"

    @property
    def rank(self) -> int:
        return len(self.moduli)

    def zero(self) -> Element:
        return Element((0,) * self.rank)

    def describe(self) -> dict:
        return {
            "moduli": list(self.moduli),
            "order": self.order,
            "exponent_two": self.is_exponent_two,
        }

    # ---- element-level arithmetic ----

    def _validate(self, a: Element) -> None:
        if len(a.coords) != self.rank:
            raise StructuralError(f"element {a.coords} has wrong rank for {self!r}")
        for c, m in zip(a.coords, self.moduli):
            if not 0 <= c < m:
                raise StructuralError(f"coordinate {c} out of range for modulus {m}")

    def add(self, a: Element, b: Element) -> Element:
        self._validate(a)
        self._validate(b)
        return Element(tuple((x + y) % m for x, y, m in zip(a.coords, b.coords, self.moduli)))

    def neg(self, a: Element) -> Element:
        self._validate(a)
        return Element(tuple((-x) % m for x, m in zip(a.coords, self.moduli)))

    # ---- index codec ----

    def encode(self, a: Element) -> int:
        self._validate(a)
        return sum(c * s for c, s in zip(a.coords, self.strides))

    def decode(self, index: int) -> Element:
        if not 0 <= index < self.order:
            raise StructuralError(f"index {index} out of range for order {self.order}")
        coords = []
        for m, s in zip(self.moduli, self.strides):
            coords.append((index // s) % m)
        return Element(tuple(coords))

    def add_indices(self, i: int, j: int) -> int:
        if self.is_exponent_two:
            return i ^ j
        if self.rank == 1:
            return (i + j) % self.order
        return self.encode(self.add(self.decode(i), self.decode(j)))

    def neg_index(self, i: int) -> int:
        if self.is_exponent_two:
            return i
        if self.rank == 1:
            return (-i) % self.order
        return self.encode(self.neg(self.decode(i)))

    # ---- vectorized index arithmetic ----

    def _coord_array(self, c: int) -> np.ndarray:
        cache = self._coord_cache
        arr = cache.get(c)
        if arr is None:
            idx = np.arange(self.order, dtype=np.int64)
            arr = (idx // self.strides[c]) % self.moduli[c]
            cache[c] = arr
        return arr

    def translate_array(self, idx: np.ndarray, by: int) -> np.ndarray:
        """Index array of {i + by : i in idx}."""
        idx = np.asarray(idx, dtype=np.int64)
        if self.is_exponent_two:
            return idx ^ np.int64(by)
        if self.rank == 1:
            return (idx + by) % self.order
        by_coords = self.decode(by).coords
        out = np.zeros(len(idx), dtype=np.int64)
        for c, (m, s, bc) in enumerate(zip(self.moduli, self.strides, by_coords)):
            out += ((self._coord_array(c)[idx] + bc) % m) * s
        return out

    def neg_array(self, idx: np.ndarray) -> np.ndarray:
        idx = np.asarray(idx, dtype=np.int64)
        if self.is_exponent_two:
            return idx.copy()
        if self.rank == 1:
            return (-idx) % self.order
        out = np.zeros(len(idx), dtype=np.int64)
        for c, (m, s) in enumerate(zip(self.moduli, self.strides)):
            out += ((-self._coord_array(c)[idx]) % m) * s
        return out

    def pairsum_matrix(self, xi: np.ndarray, yi: np.ndarray) -> np.ndarray:
        """Matrix of index sums, shape (len(xi), len(yi))."""
        xi = np.asarray(xi, dtype=np.int64)
        yi = np.asarray(yi, dtype=np.int64)
        if self.is_exponent_two:
            return xi[:, None] ^ yi[None, :]
        if self.rank == 1:
            return (xi[:, None] + yi[None, :]) % self.order
        out = np.zeros((len(xi), len(yi)), dtype=np.int64)
        for c, (m, s) in enumerate(zip(self.moduli, self.strides)):
            ca = self._coord_array(c)
            out += ((ca[xi][:, None] + ca[yi][None, :]) % m) * s
        return out


_GROUP_CYCLIC = re.compile(r"^z(\d+)$")
_GROUP_BOOLEAN = re.compile(r"^f2\^(\d+)$")


def parse_group(text: str, dense_cap: int | None = None) -> GroupSpec:
    """Parse a group literal: "2,2,2,2", "z8", or "f2^10"."""
    cleaned = text.strip().lower().replace(" ", "")
    if not cleaned:
        raise StructuralError("empty group literal")
    m = _GROUP_CYCLIC.match(cleaned)
    if m:
        return GroupSpec((int(m.group(1)),), dense_cap=dense_cap)
    m = _GROUP_BOOLEAN.match(cleaned)
    if m:
        k = int(m.group(1))
        if k < 1:
            raise StructuralError("f2^k needs k >= 1")
        return GroupSpec((2,) * k, dense_cap=dense_cap)
    try:
        moduli: Iterable[int] = tuple(int(part) for part in cleaned.split(","))
    except ValueError as exc:
        raise StructuralError(f"unrecognized group literal {text!r}") from exc
    return GroupSpec(moduli, dense_cap=dense_cap)
