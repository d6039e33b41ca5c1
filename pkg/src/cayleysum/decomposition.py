"""Energy-driven decomposition of a set into structured and unstructured parts.

find_structured_subset realizes an existence guarantee as a checked search:
given A, B with |A| >= |B| and energy ratio parameter K (where
E(A,B) >= |A||B|^2 / K), it returns B_* inside B with
E(A, B_*) >= E(A,B) / 32 (hard postcondition) and reports whether the
witness dimension stays below dim_constant * K * log|A| (soft check, the
guarantee's shape, with a configurable constant).

energy_partition iterates the finder: while the residual part keeps energy
ratio at most M, extract a structured piece and continue.  Each extraction
drops the residual energy by a factor of at most 31/32, which bounds the
step count by ceil(log_{32/31}(|B| M / K)) + 1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .dissociation import EXACT_DIMENSION_GUARD, additive_dimension
from .errors import GuardError, PropertyError, StructuralError, check
from .subsets import GroupSubset, additive_energy

__all__ = [
    "ENERGY_KEEP_DENOMINATOR",
    "EXHAUSTIVE_SUBSET_GUARD",
    "DEFAULT_DIMENSION_CONSTANT",
    "StructuredSubsetReport",
    "DecompositionStep",
    "DecompositionResult",
    "find_structured_subset",
    "energy_partition",
]

# the finder must keep at least 1/32 of the input energy
ENERGY_KEEP_DENOMINATOR = 32
# exhaustive mode enumerates all subsets of B: refuse above this size
EXHAUSTIVE_SUBSET_GUARD = 12
# default multiplier in the soft dimension target K * log|A|
DEFAULT_DIMENSION_CONSTANT = 16.0


@dataclass
class StructuredSubsetReport:
    """Finder output: the subset, its energy, and dimension bookkeeping."""

    subset: GroupSubset
    energy: int
    input_energy: int
    dim_value: int
    dim_exact: bool
    dim_target: float
    dim_within_target: bool

    def to_json(self) -> dict:
        return {
            "subset": self.subset.to_index_list(),
            "energy": self.energy,
            "input_energy": self.input_energy,
            "dim_value": self.dim_value,
            "dim_exact": self.dim_exact,
            "dim_target": self.dim_target,
            "dim_within_target": self.dim_within_target,
        }


def _as_fraction(value, name: str) -> Fraction:
    try:
        f = Fraction(value)
    except (TypeError, ValueError) as exc:
        raise StructuralError(f"{name} must be a rational number, got {value!r}") from exc
    return f


def _dimension_info(subset: GroupSubset) -> tuple[int, bool]:
    g = subset.group
    if g.is_exponent_two or subset.size <= EXACT_DIMENSION_GUARD:
        res = additive_dimension(subset, mode="exact")
    else:
        res = additive_dimension(subset, mode="greedy")
    return res.value, res.exact


def _translate_lists(a: GroupSubset, b: GroupSubset) -> list[np.ndarray]:
    g = a.group
    ai = a.indices
    return [g.translate_array(ai, int(y)) for y in b.indices]


def find_structured_subset(
    a: GroupSubset,
    b: GroupSubset,
    energy_ratio,
    mode: str = "exhaustive",
    dim_constant: float = DEFAULT_DIMENSION_CONSTANT,
) -> StructuredSubsetReport:
    """Find B_* in B keeping at least 1/32 of E(A, B), preferring low dimension.

    Exhaustive mode scans all nonempty subsets of B (guard: |B| <= 12) and
    returns the qualifying subset minimizing (dimension, size, bitmask).
    Greedy mode grows B_* by the element with the largest energy gain until
    the threshold is met.
    """
    if a.group != b.group:
        raise StructuralError("A and B live in different groups")
    if b.size == 0:
        raise StructuralError("B must be nonempty")
    if a.size < b.size:
        raise StructuralError(f"need |A| >= |B|, got {a.size} < {b.size}")
    K = _as_fraction(energy_ratio, "energy_ratio")
    if K <= 0:
        raise StructuralError("energy_ratio must be positive")

    e_ab = additive_energy(a, b)
    # hypothesis E(A,B) >= |A| |B|^2 / K, compared exactly
    if e_ab * K.numerator < a.size * b.size**2 * K.denominator:
        raise StructuralError(
            f"energy hypothesis fails: E(A,B)={e_ab} < |A||B|^2/K"
        )

    g = a.group
    n_a = a.size
    b_idx = [int(y) for y in b.indices]
    translates = _translate_lists(a, b)

    if mode == "exhaustive":
        if b.size > EXHAUSTIVE_SUBSET_GUARD:
            raise GuardError(
                f"exhaustive mode over {b.size} elements exceeds the guard "
                f"{EXHAUSTIVE_SUBSET_GUARD}; use mode='greedy'"
            )
        m = len(b_idx)
        rep = np.zeros(g.order, dtype=np.int64)
        energy = 0
        qualifying: list[tuple[int, int]] = []  # (local mask, energy)
        prev_gray = 0
        for i in range(1, 1 << m):
            gray = i ^ (i >> 1)
            j = (gray ^ prev_gray).bit_length() - 1
            tr = translates[j]
            if gray & (1 << j):
                energy += 2 * int(rep[tr].sum()) + n_a
                rep[tr] += 1
            else:
                rep[tr] -= 1
                energy -= 2 * int(rep[tr].sum()) + n_a
            prev_gray = gray
            if ENERGY_KEEP_DENOMINATOR * energy >= e_ab:
                qualifying.append((gray, energy))
        check(bool(qualifying), "the full set B always qualifies; none found")

        best = None  # (dim, size, global mask, local mask, energy, exact)
        for local_mask, sub_energy in qualifying:
            members = [b_idx[j] for j in range(m) if local_mask >> j & 1]
            candidate = GroupSubset.from_indices(g, members)
            greedy_dim = additive_dimension(candidate, mode="greedy").value
            if best is not None and greedy_dim > best[0]:
                continue  # the exact dim is at least the greedy one: cannot win
            dim_value, dim_exact = _dimension_info(candidate)
            global_mask = 0
            for e in members:
                global_mask |= 1 << e
            key = (dim_value, len(members), global_mask)
            if best is None or key < (best[0], best[1], best[2]):
                best = (dim_value, len(members), global_mask, local_mask, sub_energy, dim_exact)
        assert best is not None
        members = [b_idx[j] for j in range(m) if best[3] >> j & 1]
        subset = GroupSubset.from_indices(g, members)
        chosen_energy = best[4]
        dim_value, dim_exact = best[0], best[5]
    elif mode == "greedy":
        rep = np.zeros(g.order, dtype=np.int64)
        energy = 0
        in_set = [False] * len(b_idx)
        chosen: list[int] = []
        while ENERGY_KEEP_DENOMINATOR * energy < e_ab:
            best_gain = -1
            best_j = -1
            for j, tr in enumerate(translates):
                if in_set[j]:
                    continue
                gain = 2 * int(rep[tr].sum()) + n_a
                if gain > best_gain:
                    best_gain = gain
                    best_j = j
            check(best_j >= 0, "greedy ran out of elements before reaching the threshold")
            in_set[best_j] = True
            chosen.append(b_idx[best_j])
            rep[translates[best_j]] += 1
            energy += best_gain
        subset = GroupSubset.from_indices(g, chosen)
        chosen_energy = energy
        dim_value, dim_exact = _dimension_info(subset)
    else:
        raise StructuralError(f"unknown finder mode {mode!r}")

    check(
        ENERGY_KEEP_DENOMINATOR * chosen_energy >= e_ab,
        "finder postcondition failed: kept energy below 1/32 of the input",
    )
    check(
        chosen_energy == additive_energy(a, subset),
        "incremental energy bookkeeping disagrees with recomputation",
    )
    log_a = math.log(a.size)
    dim_target = dim_constant * float(K) * log_a
    return StructuredSubsetReport(
        subset=subset,
        energy=chosen_energy,
        input_energy=e_ab,
        dim_value=dim_value,
        dim_exact=dim_exact,
        dim_target=dim_target,
        dim_within_target=dim_value <= dim_target,
    )


@dataclass
class DecompositionStep:
    extracted: GroupSubset
    residual_energy_before: int
    dim_value: int
    dim_exact: bool

    def to_json(self) -> dict:
        return {
            "extracted": self.extracted.to_index_list(),
            "residual_energy_before": self.residual_energy_before,
            "dim_value": self.dim_value,
            "dim_exact": self.dim_exact,
        }


@dataclass
class DecompositionResult:
    """Partition of B into a structured union and a low-ratio residual."""

    structured: GroupSubset
    residual: GroupSubset
    steps: list[DecompositionStep]
    energy_ratio: Fraction  # K with E(A,B) = |A| |B|^2 / K
    target_ratio: Fraction  # M, the stopping threshold
    initial_energy: int
    structured_energy: int
    residual_energy: int
    step_bound: int

    @property
    def step_count(self) -> int:
        return len(self.steps)

    def to_json(self) -> dict:
        return {
            "structured": self.structured.to_index_list(),
            "residual": self.residual.to_index_list(),
            "steps": [s.to_json() for s in self.steps],
            "energy_ratio": str(self.energy_ratio),
            "target_ratio": str(self.target_ratio),
            "initial_energy": self.initial_energy,
            "structured_energy": self.structured_energy,
            "residual_energy": self.residual_energy,
            "step_count": self.step_count,
            "step_bound": self.step_bound,
        }


def energy_partition(
    a: GroupSubset,
    b: GroupSubset,
    target_ratio,
    mode: str = "exhaustive",
    dim_constant: float = DEFAULT_DIMENSION_CONSTANT,
) -> DecompositionResult:
    """Split B into structured pieces and a residual whose ratio beats M.

    Loop invariant: the residual's energy drops by a factor <= 31/32 at every
    extraction, asserted exactly.  Stops when the residual is empty or
    E(A, residual) < |A| |residual|^2 / M.
    """
    if a.group != b.group:
        raise StructuralError("A and B live in different groups")
    if b.size < 2:
        raise StructuralError(f"need |B| >= 2, got {b.size}")
    if a.size < b.size:
        raise StructuralError(f"need |A| >= |B|, got {a.size} < {b.size}")
    M = _as_fraction(target_ratio, "target_ratio")
    if M <= 0:
        raise StructuralError("target_ratio must be positive")

    g = a.group
    initial_energy = additive_energy(a, b)
    K = Fraction(a.size * b.size**2, initial_energy)

    structured = GroupSubset.empty(g)
    residual = b
    steps: list[DecompositionStep] = []
    residual_energy = initial_energy
    while residual.size > 0:
        # halt when E(A, residual) < |A| |residual|^2 / M, compared exactly
        if residual_energy * M.numerator < a.size * residual.size**2 * M.denominator:
            break
        step_ratio = Fraction(a.size * residual.size**2, residual_energy)
        report = find_structured_subset(a, residual, step_ratio, mode=mode, dim_constant=dim_constant)
        extracted = report.subset
        steps.append(
            DecompositionStep(
                extracted=extracted,
                residual_energy_before=residual_energy,
                dim_value=report.dim_value,
                dim_exact=report.dim_exact,
            )
        )
        structured = structured.union(extracted)
        residual = residual.difference(extracted)
        next_energy = additive_energy(a, residual)
        check(
            32 * next_energy <= 31 * residual_energy,
            "extraction failed to shave a 1/32 energy fraction off the residual",
        )
        residual_energy = next_energy

    if M >= K:
        # log(|B| M / K) via integer logs so huge rationals cannot overflow
        ratio_log = math.log(b.size * M.numerator * K.denominator) - math.log(
            M.denominator * K.numerator
        )
        step_bound = math.ceil(ratio_log / math.log(32.0 / 31.0)) + 1
    else:
        step_bound = 0
    check(len(steps) <= step_bound, "step count exceeded its logarithmic bound")

    structured_energy = additive_energy(a, structured)
    if steps:
        check(
            ENERGY_KEEP_DENOMINATOR * structured_energy >= initial_energy,
            "structured part kept less than 1/32 of the initial energy",
        )
    check(
        structured.is_disjoint(residual) and structured.union(residual) == b,
        "structured and residual parts must partition B",
    )
    return DecompositionResult(
        structured=structured,
        residual=residual,
        steps=steps,
        energy_ratio=K,
        target_ratio=M,
        initial_energy=initial_energy,
        structured_energy=structured_energy,
        residual_energy=residual_energy,
        step_bound=step_bound,
    )
