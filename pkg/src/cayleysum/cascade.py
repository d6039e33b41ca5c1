"""Extended-precision audits of the two proof-parameter cascades.

The headline density guarantees only kick in once the group is enormous, and
no double-precision sweep can see where.  This module recomputes every
derived parameter and required inequality at a concrete (log N, w) in
arbitrary-precision arithmetic (mpmath) and reports each inequality as a
pass/fail ledger row.  The audit reports; it never raises on a failed row,
since which rows fail at a given size is the interesting output.

log N is the primary input.  Every formula depends on the group only through
log N and loglog N, and the passing region begins near log N ~ exp(2^700)
under unit constants, far beyond any representable integer N.  mpf bignum
exponents carry such values exactly; only exp() of arguments of that own
magnitude must be saturated (safe_exp).

Ledger determinism: inputs are canonicalized to strings before parsing, so
re-auditing at a ledger's stored inputs reproduces every field bit for bit.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from mpmath import mp, mpf

from .errors import GuardError, StructuralError

__all__ = [
    "LedgerRow",
    "CascadeLedger",
    "ThresholdSearch",
    "cascade_audit",
    "find_threshold",
    "safe_exp",
]

MODES = ("general", "exponent2")
DEFAULT_DPS = 30
_NSTR_DIGITS = 20
# beyond this magnitude the result's own exponent becomes an astronomically
# long integer; saturate instead of materializing it
_EXP_ARG_LIMIT = mpf("1e15")

_DEFAULT_CONSTANTS = {
    "general": {"count_rate": 1.0},
    "exponent2": {"dim_rate": 1.0},
}


def safe_exp(x: mpf) -> mpf:
    if x < -_EXP_ARG_LIMIT:
        return mp.zero
    if x > _EXP_ARG_LIMIT:
        return mp.inf
    return mp.exp(x)


def _fmt(x) -> str:
    return mp.nstr(mpf(x), _NSTR_DIGITS)


def _canonical_input(value) -> str:
    if isinstance(value, str):
        return value.strip()
    if isinstance(value, int):
        return str(value)
    if isinstance(value, float):
        return repr(value)
    return mp.nstr(value, mp.dps)


def _loglog_shifted(log_order: mpf) -> mpf:
    """loglog(N + 3) computed from log N; above 1e6 the +3 is below precision."""
    if log_order > mpf("1e6"):
        return mp.log(log_order)
    return mp.log(mp.log(mp.exp(log_order) + 3))


@dataclass(frozen=True)
class LedgerRow:
    name: str
    anchor: str
    lhs: str
    rhs: str
    relation: str
    passed: bool
    constant_dependent: bool
    note: str = ""

    def to_json(self) -> dict:
        return {
            "name": self.name,
            "anchor": self.anchor,
            "lhs": self.lhs,
            "rhs": self.rhs,
            "relation": self.relation,
            "passed": self.passed,
            "constant_dependent": self.constant_dependent,
            "note": self.note,
        }


@dataclass(frozen=True)
class CascadeLedger:
    mode: str
    dps: int
    inputs: dict
    constants: dict
    derived: dict
    rows: tuple
    all_pass: bool

    def row(self, name: str) -> LedgerRow:
        for r in self.rows:
            if r.name == name:
                return r
        raise StructuralError(f"no ledger row named {name!r}")

    def to_json(self) -> dict:
        return {
            "mode": self.mode,
            "dps": self.dps,
            "inputs": dict(self.inputs),
            "constants": dict(self.constants),
            "derived": dict(self.derived),
            "rows": [r.to_json() for r in self.rows],
            "all_pass": self.all_pass,
        }


def _merge_constants(mode: str, constants: dict | None) -> dict:
    merged = dict(_DEFAULT_CONSTANTS[mode])
    for key, value in (constants or {}).items():
        if key not in merged:
            raise StructuralError(
                f"unknown constant {key!r} for mode {mode!r}; known: {sorted(merged)}"
            )
        merged[key] = float(value)
    return merged


def cascade_audit(
    mode: str,
    log_order,
    w,
    constants: dict | None = None,
    dps: int = DEFAULT_DPS,
) -> CascadeLedger:
    """Evaluate one cascade at (log N, w) and return the inequality ledger."""
    if mode not in MODES:
        raise StructuralError(f"mode must be one of {MODES}, got {mode!r}")
    if dps < 15:
        raise StructuralError(f"dps must be >= 15, got {dps}")
    consts = _merge_constants(mode, constants)
    log_order_str = _canonical_input(log_order)
    w_str = _canonical_input(w)
    with mp.workdps(dps):
        logn = mpf(log_order_str)
        wv = mpf(w_str)
        if not logn > mp.e:
            raise StructuralError(f"need log N > e, got {log_order_str}")
        if not wv > 1:
            raise StructuralError(f"need w > 1, got {w_str}")
        if mode == "general":
            derived, rows = _general_rows(logn, wv, consts)
        else:
            derived, rows = _exponent2_rows(logn, wv, consts)
    return CascadeLedger(
        mode=mode,
        dps=dps,
        inputs={"logN": log_order_str, "w": w_str},
        constants=consts,
        derived=derived,
        rows=tuple(rows),
        all_pass=all(r.passed for r in rows),
    )


def _general_rows(logn: mpf, wv: mpf, consts: dict):
    ll = mp.log(logn)
    ll_shifted = _loglog_shifted(logn)
    w1 = mp.sqrt(wv)
    eps = mp.power(wv, mpf(-1) / 13)
    eps_t = eps / 4
    nt0 = mp.ceil(w1 * logn * ll**2)
    nt1 = 2 * nt0
    m = wv * logn * ll**10
    j0 = mp.ceil(ll / 2)
    n0 = eps_t * w1 * logn * ll
    nu0 = int(mp.floor(mp.log(2 * ll / eps_t, 2)))
    ratio_floor0 = n0**2 / (4 * w1**2 * logn**2 * ll**4)
    budget = w1 * logn * ll**4
    rate = mpf(consts["count_rate"])

    rows: list[LedgerRow] = []

    rows.append(
        LedgerRow(
            name="growth_cap",
            anchor="w <= loglog(N + 3)",
            lhs=_fmt(wv),
            rhs=_fmt(ll_shifted),
            relation="<=",
            passed=bool(wv <= ll_shifted),
            constant_dependent=False,
        )
    )

    applicability = eps_t**2 * w1 / 32
    rows.append(
        LedgerRow(
            name="packed_bound_applicability",
            anchor="(eps/4)^2 sqrt(w) / 32 > 1",
            lhs=_fmt(applicability),
            rhs="1.0",
            relation=">",
            passed=bool(applicability > 1),
            constant_dependent=False,
            note="smallest block size must clear the packed-bound size floor",
        )
    )

    form_a = (n0 / (2 * w1 * logn * ll**2)) ** 2
    form_b = ratio_floor0
    tol = mp.power(10, -(mp.dps - 5))
    consistent = abs(form_a - form_b) <= abs(form_b) * tol
    rows.append(
        LedgerRow(
            name="ratio_floor_consistency",
            anchor="(n_v / (2 sqrt(w) logN llN^2))^2 == n_v^2 / (4 w logN^2 llN^4)",
            lhs=_fmt(form_a),
            rhs=_fmt(form_b),
            relation="==",
            passed=bool(consistent),
            constant_dependent=False,
            note="both printed forms of the per-level energy-ratio floor, at level 0",
        )
    )

    ladder_top = mp.power(10, j0)
    rows.append(
        LedgerRow(
            name="ratio_ladder_exhaustion",
            anchor="10^ceil(llN/2) > 2 ceil(sqrt(w) logN llN^2)",
            lhs=_fmt(ladder_top),
            rhs=_fmt(nt1),
            relation=">",
            passed=bool(ladder_top > nt1),
            constant_dependent=False,
            note="top of the energy-ratio ladder exceeds any admissible |X|",
        )
    )

    count_exp = 2 * rate * w1 * logn * ll**4
    decay_exp = eps**6 * mp.power(ll, -6) * m / mp.power(2, 26)
    rows.append(
        LedgerRow(
            name="count_vs_decay_margin",
            anchor="2 C sqrt(w) logN llN^4 < eps^6 llN^-6 m / 2^26",
            lhs=_fmt(count_exp),
            rhs=_fmt(decay_exp),
            relation="<",
            passed=bool(count_exp < decay_exp),
            constant_dependent=True,
            note="level 0; both sides scale by the same 10^j at higher levels",
        )
    )

    per_level = mp.log(nu0 + 1) + count_exp - decay_exp
    rows.append(
        LedgerRow(
            name="per_level_sum",
            anchor="log(nu0 + 1) + (count - decay) <= -sqrt(w) logN llN^4 / 2",
            lhs=_fmt(per_level),
            rhs=_fmt(-budget / 2),
            relation="<=",
            passed=bool(per_level <= -budget / 2),
            constant_dependent=True,
            note="log scale; summing the doubling sizes within one level",
        )
    )

    level_cap = int(j0) if j0 < 64 else 64
    correction = mp.zero
    for j in range(1, level_cap):
        correction += safe_exp(-(mp.power(10, j) - 1) * budget / 2)
    total_log = -budget / 2 + mp.log1p(correction)
    rows.append(
        LedgerRow(
            name="level_total",
            anchor="sum_j exp(-10^j sqrt(w) logN llN^4 / 2) <= exp(-sqrt(w) logN llN^4 / 3)",
            lhs=_fmt(total_log),
            rhs=_fmt(-budget / 3),
            relation="<=",
            passed=bool(total_log <= -budget / 3),
            constant_dependent=False,
            note="log scale; geometric-in-the-exponent sum over levels",
        )
    )

    derived = {
        "loglogN": _fmt(ll),
        "loglogN_shifted": _fmt(ll_shifted),
        "w1": _fmt(w1),
        "epsilon": _fmt(eps),
        "epsilon_quarter": _fmt(eps_t),
        "block_floor": _fmt(nt0),
        "block_cap": _fmt(nt1),
        "row_count_floor": _fmt(m),
        "ladder_levels": _fmt(j0),
        "doubling_base": _fmt(n0),
        "doubling_steps": str(nu0),
        "ratio_floor_level0": _fmt(ratio_floor0),
        "level_budget": _fmt(budget),
    }
    return derived, rows


def _exponent2_rows(logn: mpf, wv: mpf, consts: dict):
    ll = mp.log(logn)
    eps = mp.power(wv, mpf(-1) / 13)
    ratio_floor = mp.sqrt(logn) / ll
    dim_cap = mpf(consts["dim_rate"]) * ratio_floor * ll**2
    n_prime = (eps / 2) * wv * ll * mp.power(logn, mpf(3) / 2)
    span_log = dim_cap * mp.log(3)

    rows: list[LedgerRow] = []

    floor_cond = eps**7 * wv * ll * mp.sqrt(logn)
    rows.append(
        LedgerRow(
            name="deviation_floor_condition",
            anchor="eps^7 w llN sqrt(logN) >= 2^25",
            lhs=_fmt(floor_cond),
            rhs=_fmt(mp.power(2, 25)),
            relation=">=",
            passed=bool(floor_cond >= mp.power(2, 25)),
            constant_dependent=False,
        )
    )

    size_lhs = min(eps * n_prime / 8, n_prime)
    size_rhs = 2000 * mp.power(eps / 4, -4) * span_log
    rows.append(
        LedgerRow(
            name="restricted_size_hypothesis",
            anchor="min(eps n'/8, n') >= 2000 (eps/4)^-4 d log 3",
            lhs=_fmt(size_lhs),
            rhs=_fmt(size_rhs),
            relation=">=",
            passed=bool(size_lhs >= size_rhs),
            constant_dependent=True,
            note="surviving row/column sizes clear the low-energy bound's floor "
            "inside the spanned subgroup",
        )
    )

    margin_lhs = eps**2 * n_prime / 160
    margin_rhs = mp.power(2, 19) * dim_cap**2 / eps**4 + dim_cap * logn
    rows.append(
        LedgerRow(
            name="count_vs_decay_margin",
            anchor="eps^2 n'/160 > 2^19 d^2/eps^4 + d logN",
            lhs=_fmt(margin_lhs),
            rhs=_fmt(margin_rhs),
            relation=">",
            passed=bool(margin_lhs > margin_rhs),
            constant_dependent=True,
            note="decay beats the subgroup entropy cost N^d",
        )
    )

    clean_lhs = eps**2 * n_prime
    clean_rhs = dim_cap**2 / eps**4 + dim_cap * logn
    rows.append(
        LedgerRow(
            name="clean_growth_margin",
            anchor="eps^2 n' >= d^2/eps^4 + d logN",
            lhs=_fmt(clean_lhs),
            rhs=_fmt(clean_rhs),
            relation=">=",
            passed=bool(clean_lhs >= clean_rhs),
            constant_dependent=True,
            note="unit-constant form of the growth requirement",
        )
    )

    derived = {
        "loglogN": _fmt(ll),
        "epsilon": _fmt(eps),
        "ratio_floor": _fmt(ratio_floor),
        "dim_cap": _fmt(dim_cap),
        "surviving_size": _fmt(n_prime),
        "span_log": _fmt(span_log),
    }
    return derived, rows


@dataclass(frozen=True)
class ThresholdSearch:
    """Bisection record for the least all-pass size along logN = exp(w)."""

    mode: str
    constants: dict
    dps: int
    bracket: tuple
    tolerance: float
    probes: tuple = field(default=())
    passing_u: float = 0.0
    passing_w: str = ""
    passing_log_order: str = ""

    def to_json(self) -> dict:
        return {
            "mode": self.mode,
            "constants": dict(self.constants),
            "dps": self.dps,
            "bracket": list(self.bracket),
            "tolerance": self.tolerance,
            "probes": [dict(p) for p in self.probes],
            "passing_u": self.passing_u,
            "passing_w": self.passing_w,
            "passing_logN": self.passing_log_order,
        }


_DEFAULT_BRACKETS = {"general": (0.7, 520.0), "exponent2": (0.2, 12.0)}


def find_threshold(
    mode: str,
    constants: dict | None = None,
    dps: int = DEFAULT_DPS,
    bracket: tuple | None = None,
    tolerance: float = 1e-3,
) -> ThresholdSearch:
    """Bisect for the least u with an all-pass ledger at w = e^u, logN = e^w.

    The probe curve sets loglog N a relative 1e-15 above w, so the growth
    cap binds but cannot flap on last-ulp rounding, and a single parameter
    sweeps both inputs.  Probes are recorded in evaluation order; sorted by
    u their pass flags must form a monotone step, which the caller can
    verify.
    """
    if mode not in MODES:
        raise StructuralError(f"mode must be one of {MODES}, got {mode!r}")
    lo, hi = bracket if bracket is not None else _DEFAULT_BRACKETS[mode]
    if not (0 < lo < hi):
        raise StructuralError(f"need 0 < lo < hi, got ({lo}, {hi})")
    consts = _merge_constants(mode, constants)
    probes: list[dict] = []

    def probe(u: float) -> dict:
        with mp.workdps(dps):
            wv = mp.exp(mpf(repr(u)))
            logn = mp.exp(wv * (1 + mpf("1e-15")))
            w_str = mp.nstr(wv, mp.dps)
            logn_str = mp.nstr(logn, mp.dps)
        ledger = cascade_audit(mode, logn_str, w_str, constants=consts, dps=dps)
        entry = {
            "u": u,
            "w": w_str,
            "logN": logn_str,
            "all_pass": ledger.all_pass,
        }
        probes.append(entry)
        return entry

    low = probe(lo)
    high = probe(hi)
    if low["all_pass"]:
        raise GuardError(f"bracket low end u={lo} already passes; widen downward")
    if not high["all_pass"]:
        raise GuardError(f"bracket high end u={hi} still fails; widen upward")
    lo_u, hi_u = lo, hi
    hi_entry = high
    while hi_u - lo_u > tolerance:
        mid = (lo_u + hi_u) / 2.0
        entry = probe(mid)
        if entry["all_pass"]:
            hi_u, hi_entry = mid, entry
        else:
            lo_u = mid
    return ThresholdSearch(
        mode=mode,
        constants=consts,
        dps=dps,
        bracket=(lo, hi),
        tolerance=tolerance,
        probes=tuple(probes),
        passing_u=hi_u,
        passing_w=hi_entry["w"],
        passing_log_order=hi_entry["logN"],
    )
