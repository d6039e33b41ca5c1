"""Seeded Monte Carlo experiments, exhaustive desk-scale scans, and reports.

Every experiment is a pure function of its config: per-trial seeds derive
from the master seed by the package-wide splitmix chain, aggregation is
commutative, and reports embed the full config, so rerunning a report's own
config reproduces it byte for byte.  Wall-clock data lives in a separate
"timing" object that comparisons strip.

Tail-bound experiments take their theoretical reference values from the
bounds module; nothing here re-derives a formula.
"""

from __future__ import annotations

import csv
import io
import json
import math
import time
from dataclasses import dataclass
from datetime import datetime, timezone
from fractions import Fraction
from statistics import median

import numpy as np

from . import bounds, rng
from .deviation import (
    deviation_packing_pipeline,
    edge_density_deviation,
    greedy_low_overlap_packing,
    high_deviation_elements,
    random_subset,
    restriction_sample,
)
from .errors import StructuralError, check
from .groups import GroupSpec, parse_group
from .subsets import GroupSubset

__all__ = [
    "CSV_SCHEMA_VERSION",
    "ExperimentReport",
    "wilson_interval",
    "run_joint_deviation_mc",
    "run_sigma_tail_mc",
    "run_restriction_mc",
    "run_worst_case_scan",
    "run_deviation_scan",
]

CSV_SCHEMA_VERSION = 1
_MC_CHUNK = 1 << 13
_WORST_CASE_ORDER_CAP = 16
_Z95 = 1.959963984540054


def wilson_interval(successes: int, trials: int) -> tuple[float, float]:
    """95% Wilson score interval for a binomial proportion."""
    if trials < 1:
        raise StructuralError(f"trials must be >= 1, got {trials}")
    if not 0 <= successes <= trials:
        raise StructuralError(f"successes {successes} outside [0, {trials}]")
    p = successes / trials
    z2 = _Z95**2
    denom = 1.0 + z2 / trials
    center = (p + z2 / (2 * trials)) / denom
    half = (_Z95 / denom) * math.sqrt(p * (1 - p) / trials + z2 / (4 * trials**2))
    # the interval must contain the point estimate even at the endpoints,
    # where center - half cancels to rounding noise
    lo = 0.0 if successes == 0 else max(0.0, center - half)
    hi = 1.0 if successes == trials else min(1.0, center + half)
    return (lo, hi)


@dataclass(frozen=True)
class ExperimentReport:
    kind: str
    config: dict
    results: dict
    timing: dict

    def to_json(self, include_timing: bool = True) -> dict:
        doc = {
            "kind": self.kind,
            "schema_version": CSV_SCHEMA_VERSION,
            "config": dict(self.config),
            "results": dict(self.results),
        }
        if include_timing:
            doc["timing"] = dict(self.timing)
        return doc

    def canonical_bytes(self, include_timing: bool = False) -> bytes:
        """Deterministic serialization; timing excluded by default."""
        return json.dumps(
            self.to_json(include_timing=include_timing),
            sort_keys=True,
            separators=(",", ":"),
        ).encode()

    def csv_text(self) -> str:
        rows = _CSV_EXTRACTORS.get(self.kind)
        if rows is None:
            raise StructuralError(f"kind {self.kind!r} has no CSV schema; use JSON")
        header, data = rows(self)
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["schema_version", CSV_SCHEMA_VERSION])
        writer.writerow(header)
        writer.writerows(data)
        return buf.getvalue()


def _finish(kind: str, config: dict, results: dict, started: float) -> ExperimentReport:
    timing = {
        "generated_at": datetime.now(timezone.utc).isoformat(),
        "elapsed_seconds": time.monotonic() - started,
    }
    return ExperimentReport(kind=kind, config=config, results=results, timing=timing)


def _parse_epsilon(value) -> Fraction:
    eps = Fraction(value)
    if not 0 < eps <= Fraction(1, 2):
        raise StructuralError(f"epsilon must lie in (0, 1/2], got {eps}")
    return eps


def _subgroup_prefix(g: GroupSpec, n: int) -> GroupSubset:
    # first n indices; in an exponent-2 group with n a power of two this is
    # a subgroup, so its translates by coset representatives are disjoint
    if not (1 <= n <= g.order):
        raise StructuralError(f"n must lie in [1, {g.order}], got {n}")
    return GroupSubset.from_indices(g, np.arange(n))


def run_joint_deviation_mc(
    group: str = "f2^8",
    n: int = 32,
    epsilon="1/2",
    ks: tuple = (1, 2, 4),
    trials: int = 100_000,
    seed: int = 0,
) -> ExperimentReport:
    """Empirical frequency of k simultaneous large row deviations vs its bound.

    X is an index-prefix subgroup of size n; the packing rows come from the
    greedy scan over the whole group, so the admitted translates satisfy the
    low-overlap condition by construction.  Acceptance slack per k is
    bound + 3 sqrt(bound (1 - bound) / trials).
    """
    started = time.monotonic()
    g = parse_group(group)
    eps = _parse_epsilon(epsilon)
    if trials < 1:
        raise StructuralError("trials must be >= 1")
    ks = tuple(sorted(set(int(k) for k in ks)))
    if not ks or ks[0] < 1:
        raise StructuralError(f"ks must be positive, got {ks}")
    x = _subgroup_prefix(g, n)
    packing = greedy_low_overlap_packing(x, GroupSubset.full(g), eps)
    if packing.k < ks[-1]:
        raise StructuralError(
            f"packing yields only {packing.k} rows, need {ks[-1]}"
        )
    row_targets = np.array(packing.ys[: ks[-1]], dtype=np.int64)
    gather = np.vstack([g.translate_array(x.indices, int(y)) for y in row_targets])

    num, den = eps.numerator, eps.denominator
    successes = {k: 0 for k in ks}
    indep_hits = 0
    indep_rows = np.vstack(
        [g.translate_array(np.arange(2), 2), g.translate_array(np.arange(2), 4)]
    )
    done = 0
    while done < trials:
        count = min(_MC_CHUNK, trials - done)
        seeds = rng.derive_seed_array(seed, np.arange(done, done + count))
        bits = rng.bit_matrix(seeds, g.order)
        counts = bits[:, gather].sum(axis=2, dtype=np.int64)
        # |c/n - 1/2| >= eps  <=>  |2c - n| den >= 2 n num
        events = np.abs(2 * counts - n) * den >= 2 * n * num
        for k in ks:
            successes[k] += int(events[:, :k].all(axis=1).sum())
        pair = bits[:, indep_rows].sum(axis=2, dtype=np.int64)
        pair_events = np.abs(2 * pair - 2) * den >= 2 * 2 * num
        indep_hits += int(pair_events.all(axis=1).sum())
        done += count

    per_k = []
    for k in ks:
        bound = bounds.joint_deviation_bound(float(eps), k, n)
        sigma_ref = math.sqrt(bound * (1.0 - bound) / trials)
        empirical = successes[k] / trials
        lo, hi = wilson_interval(successes[k], trials)
        per_k.append(
            {
                "k": k,
                "bound": bound,
                "successes": successes[k],
                "empirical": empirical,
                "wilson_95": [lo, hi],
                "acceptance_threshold": bound + 3.0 * sigma_ref,
                "accepted": empirical <= bound + 3.0 * sigma_ref,
            }
        )

    # with A = G every row count equals n, so the event holds whenever
    # eps <= 1/2: the bound constrains random A only
    full_counts = np.full(ks[-1], n, dtype=np.int64)
    forced = bool((np.abs(2 * full_counts - n) * den >= 2 * n * num).all())

    single = Fraction(1, 2)
    product_ref = float(single * single)
    indep_emp = indep_hits / trials
    indep_sigma = math.sqrt(product_ref * (1 - product_ref) / trials)

    results = {
        "rows_used": [int(y) for y in row_targets],
        "per_k": per_k,
        "all_accepted": all(entry["accepted"] for entry in per_k),
        "forced_full_group_event": forced,
        "independence_arm": {
            "x_size": 2,
            "k": 2,
            "empirical": indep_emp,
            "product_reference": product_ref,
            "within_5_sigma": abs(indep_emp - product_ref) <= 5 * indep_sigma,
        },
    }
    config = {
        "group": group,
        "n": n,
        "epsilon": str(eps),
        "ks": list(ks),
        "trials": trials,
        "seed": seed,
    }
    return _finish("joint-deviation", config, results, started)


def run_sigma_tail_mc(
    group: str = "f2^10",
    tiers: tuple = ((4, 4), (8, 8), (16, 16), (32, 32), (64, 64)),
    trials: int = 2000,
    seed: int = 0,
) -> ExperimentReport:
    """Distribution of |sigma| across random (A, X, Y) draws per size tier."""
    started = time.monotonic()
    g = parse_group(group)
    if g.order > 1 << 16:
        raise StructuralError(f"group order {g.order} exceeds the 2^16 throughput cap")
    if trials < 1:
        raise StructuralError("trials must be >= 1")
    tiers = tuple((int(a), int(b)) for a, b in tiers)
    for sx, sy in tiers:
        if not (1 <= sx <= g.order and 1 <= sy <= g.order):
            raise StructuralError(f"tier ({sx}, {sy}) out of range for N={g.order}")

    pool = range(g.order)
    tier_rows = []
    for i, (sx, sy) in enumerate(tiers):
        tier_seed = rng.derive_seed(seed, 1000 + i)
        values = []
        for t in range(trials):
            base = rng.derive_seed(tier_seed, t)
            a = random_subset(g, rng.derive_seed(base, 0)).a
            x = GroupSubset.from_indices(
                g, rng.sample_without_replacement(pool, sx, rng.derive_seed(base, 1))
            )
            y = GroupSubset.from_indices(
                g, rng.sample_without_replacement(pool, sy, rng.derive_seed(base, 2))
            )
            values.append(abs(edge_density_deviation(a, x, y).sigma))
        med = median(values)
        peak = max(values)
        tier_rows.append(
            {
                "x_size": sx,
                "y_size": sy,
                "trials": trials,
                "median_abs_sigma": float(med),
                "median_abs_sigma_exact": str(med),
                "max_abs_sigma": float(peak),
                "max_abs_sigma_exact": str(peak),
            }
        )

    medians = [row["median_abs_sigma"] for row in tier_rows]
    trend_ok = all(b <= a for a, b in zip(medians, medians[1:]))
    results = {"tiers": tier_rows, "median_trend_nonincreasing": trend_ok}
    config = {
        "group": group,
        "tiers": [list(t) for t in tiers],
        "trials": trials,
        "seed": seed,
    }
    return _finish("sigma-tail", config, results, started)


def run_restriction_mc(
    group: str = "f2^8",
    x_size: int = 64,
    y_size: int = 64,
    epsilon="1/2",
    trials: int = 1000,
    seed: int = 0,
) -> ExperimentReport:
    """Frequency with which the seeded restriction draw keeps energy and sigma.

    The two per-draw checks hold with positive probability, not always; the
    smoke threshold asks the joint frequency to reach 1/2.
    """
    started = time.monotonic()
    g = parse_group(group)
    eps = _parse_epsilon(epsilon)
    if trials < 1:
        raise StructuralError("trials must be >= 1")
    pool = range(g.order)
    x = GroupSubset.from_indices(
        g, rng.sample_without_replacement(pool, x_size, rng.derive_seed(seed, 1))
    )
    y = GroupSubset.from_indices(
        g, rng.sample_without_replacement(pool, y_size, rng.derive_seed(seed, 2))
    )
    energy_ok = 0
    deviation_ok = 0
    joint = 0
    params_echo = None
    for t in range(trials):
        base = rng.derive_seed(seed, 100 + t)
        a = random_subset(g, rng.derive_seed(base, 0)).a
        draw = restriction_sample(x, y, eps, rng.derive_seed(base, 1), a=a)
        params_echo = draw.params.to_json()
        energy_ok += draw.energy_check
        deviation_ok += bool(draw.deviation_check)
        joint += draw.energy_check and bool(draw.deviation_check)
    freq = joint / trials
    lo, hi = wilson_interval(joint, trials)
    results = {
        "params": params_echo,
        "energy_check_freq": energy_ok / trials,
        "deviation_check_freq": deviation_ok / trials,
        "joint_freq": freq,
        "joint_wilson_95": [lo, hi],
        "smoke_ok": freq >= 0.5,
    }
    config = {
        "group": group,
        "x_size": x_size,
        "y_size": y_size,
        "epsilon": str(eps),
        "trials": trials,
        "seed": seed,
    }
    return _finish("restriction", config, results, started)


def run_worst_case_scan(
    group: str = "z4",
    a_indices=None,
    floor: int = 1,
    seed: int = 0,
) -> ExperimentReport:
    """Exact max of |sigma| over all X, Y with |X|, |Y| >= floor, tiny N only.

    For each X (Gray-code enumeration with incremental row counts), the best
    Y of each size is a prefix of the rows sorted by deviation, so the scan
    is exact without enumerating Y.  The argmax is re-verified by direct
    recomputation.
    """
    started = time.monotonic()
    g = parse_group(group)
    n_total = g.order
    if n_total > _WORST_CASE_ORDER_CAP:
        raise StructuralError(
            f"group order {n_total} exceeds the exhaustive cap {_WORST_CASE_ORDER_CAP}"
        )
    if not 1 <= floor <= n_total:
        raise StructuralError(f"floor must lie in [1, {n_total}], got {floor}")
    if a_indices is None:
        a = random_subset(g, seed).a
    else:
        a = GroupSubset.from_indices(g, a_indices)

    all_idx = np.arange(n_total)
    pair_matrix = g.pairsum_matrix(all_idx, all_idx)
    hits = a.bits[pair_matrix].astype(np.int64)  # hits[x, y] = A(x + y)

    best_num, best_den = 0, 1  # best |sigma| as a fraction
    best_x: list[int] = []
    best_y: list[int] = []
    counts = np.zeros(n_total, dtype=np.int64)
    members: set[int] = set()
    prev_gray = 0
    for i in range(1, 1 << n_total):
        gray = i ^ (i >> 1)
        j = (gray ^ prev_gray).bit_length() - 1
        prev_gray = gray
        if gray & (1 << j):
            counts += hits[j]
            members.add(j)
        else:
            counts -= hits[j]
            members.discard(j)
        n = len(members)
        if n < floor:
            continue
        dev = 2 * counts - n
        order_desc = np.argsort(-dev, kind="stable")
        top = np.cumsum(dev[order_desc])
        order_asc = np.argsort(dev, kind="stable")
        bottom = np.cumsum(dev[order_asc])
        for sums, order in ((top, order_desc), (bottom, order_asc)):
            vals = np.abs(sums[floor - 1 :])
            ms = np.arange(floor, n_total + 1)
            # |sum| / (2 n m) > best_num / best_den, cross-multiplied
            better = vals * best_den > best_num * 2 * n * ms
            if better.any():
                for offset in np.flatnonzero(better):
                    m = floor + int(offset)
                    val = int(vals[offset])
                    if val * best_den > best_num * 2 * n * m:
                        frac = Fraction(val, 2 * n * m)
                        best_num, best_den = frac.numerator, frac.denominator
                        best_x = sorted(members)
                        best_y = sorted(int(v) for v in order[:m])

    check(best_x and best_y, "scan must find a witness at any feasible floor")
    x_w = GroupSubset.from_indices(g, best_x)
    y_w = GroupSubset.from_indices(g, best_y)
    recomputed = abs(edge_density_deviation(a, x_w, y_w).sigma)
    claimed = Fraction(best_num, best_den)
    check(recomputed == claimed, "witness recomputation must match the scan maximum")

    results = {
        "a": a.to_index_list(),
        "floor": floor,
        "max_abs_sigma": str(claimed),
        "max_abs_sigma_float": float(claimed),
        "x_witness": best_x,
        "y_witness": best_y,
        "verified": True,
    }
    config = {
        "group": group,
        "a_indices": None if a_indices is None else list(a_indices),
        "floor": floor,
        "seed": seed,
    }
    return _finish("worst-case", config, results, started)


def run_deviation_scan(
    group: str,
    seed: int = 0,
    epsilon="1/4",
    x_indices=None,
    y_indices=None,
    x_size: int | None = None,
    y_size: int | None = None,
) -> ExperimentReport:
    """Sample A, then report sigma, extraction, and the packing pipeline."""
    started = time.monotonic()
    g = parse_group(group)
    eps = _parse_epsilon(epsilon)
    sample = random_subset(g, seed)
    pool = range(g.order)
    if x_indices is not None:
        x = GroupSubset.from_indices(g, x_indices)
    else:
        size = x_size if x_size is not None else max(1, g.order // 4)
        x = GroupSubset.from_indices(
            g, rng.sample_without_replacement(pool, size, rng.derive_seed(seed, 1))
        )
    if y_indices is not None:
        y = GroupSubset.from_indices(g, y_indices)
    else:
        size = y_size if y_size is not None else max(x.size, g.order // 4)
        y = GroupSubset.from_indices(
            g, rng.sample_without_replacement(pool, size, rng.derive_seed(seed, 2))
        )
    report = edge_density_deviation(sample.a, x, y)
    rows = high_deviation_elements(sample.a, x, y, eps)
    pipeline = deviation_packing_pipeline(sample.a, x, y, eps)
    results = {
        "a_size": sample.a.size,
        "sigma": report.to_json(),
        "high_deviation_rows": rows.to_index_list(),
        "pipeline": pipeline.to_json(),
    }
    config = {
        "group": group,
        "seed": seed,
        "epsilon": str(eps),
        "x": x.to_index_list(),
        "y": y.to_index_list(),
    }
    return _finish("scan", config, results, started)


def _csv_joint(report: ExperimentReport):
    header = [
        "kind", "group", "n", "epsilon", "trials", "seed", "k",
        "successes", "empirical", "wilson_lo", "wilson_hi", "bound",
        "acceptance_threshold", "accepted",
    ]
    cfg = report.config
    data = [
        [
            report.kind, cfg["group"], cfg["n"], cfg["epsilon"], cfg["trials"],
            cfg["seed"], row["k"], row["successes"], row["empirical"],
            row["wilson_95"][0], row["wilson_95"][1], row["bound"],
            row["acceptance_threshold"], row["accepted"],
        ]
        for row in report.results["per_k"]
    ]
    return header, data


def _csv_sigma_tail(report: ExperimentReport):
    header = [
        "kind", "group", "trials", "seed", "x_size", "y_size",
        "median_abs_sigma", "max_abs_sigma",
    ]
    cfg = report.config
    data = [
        [
            report.kind, cfg["group"], cfg["trials"], cfg["seed"],
            row["x_size"], row["y_size"],
            row["median_abs_sigma"], row["max_abs_sigma"],
        ]
        for row in report.results["tiers"]
    ]
    return header, data


def _csv_restriction(report: ExperimentReport):
    header = [
        "kind", "group", "x_size", "y_size", "epsilon", "trials", "seed",
        "energy_check_freq", "deviation_check_freq", "joint_freq",
        "wilson_lo", "wilson_hi", "smoke_ok",
    ]
    cfg = report.config
    res = report.results
    data = [[
        report.kind, cfg["group"], cfg["x_size"], cfg["y_size"], cfg["epsilon"],
        cfg["trials"], cfg["seed"], res["energy_check_freq"],
        res["deviation_check_freq"], res["joint_freq"],
        res["joint_wilson_95"][0], res["joint_wilson_95"][1], res["smoke_ok"],
    ]]
    return header, data


def _csv_worst_case(report: ExperimentReport):
    header = [
        "kind", "group", "floor", "seed", "max_abs_sigma", "max_abs_sigma_float",
        "x_witness", "y_witness",
    ]
    cfg = report.config
    res = report.results
    data = [[
        report.kind, cfg["group"], cfg["floor"], cfg["seed"],
        res["max_abs_sigma"], res["max_abs_sigma_float"],
        " ".join(map(str, res["x_witness"])),
        " ".join(map(str, res["y_witness"])),
    ]]
    return header, data


_CSV_EXTRACTORS = {
    "joint-deviation": _csv_joint,
    "sigma-tail": _csv_sigma_tail,
    "restriction": _csv_restriction,
    "worst-case": _csv_worst_case,
}
