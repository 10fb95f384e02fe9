"""Both intersection formulas and their comparison.

The BY side is evaluated entirely in :mod:`cmcompare.reflex`
from (delta, n) alone.  The LV side is evaluated from
:class:`~cmcompare.cmfield.IndexData` and :mod:`cmcompare.quadorder`.  The
two share nothing but :mod:`cmcompare.arith`, so agreement is a genuine
cross-check.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd
from typing import Optional

from .arith import INFINITY, hilbert_symbol, prime_divisors, valuation
from .cmfield import (
    CmField,
    IndexData,
    all_index_data,
    check_assumptions,
    enumerate_deltas,
    enumerate_ns,
    index_data,
)
from .quadorder import (
    SplitType,
    count_ideals_of_norm,
    eps_d,
    is_fundamental,
    rho_tilde,
    split_type,
)
from .reflex import ReflexField, ideal_norm, inverse_different_index_set

SCHEMA_VERSION = 1


def _v(N: int, ell: int) -> int:
    return valuation(N, ell) if N % ell == 0 else 0


def mu(idx: IndexData, ell: int) -> Fraction:
    v = _v(idx.N, ell)
    if gcd(idx.du, idx.dx) % ell == 0:
        return Fraction(v)
    return Fraction(v + 1, 2)


def mu_closed(idx: IndexData, ell: int) -> Fraction:
    """mu when d_u and d_x share no prime divisor of N."""
    return Fraction(_v(idx.N, ell) + 1, 2)


@dataclass
class LVPaths:
    definitional: Fraction
    local: Optional[Fraction]
    trace: list

    @property
    def agree(self) -> bool:
        return self.local is None or self.local == self.definitional


def lv_paths(idx: IndexData, ell: int) -> LVPaths:
    du, dx, N = idx.du, idx.dx, idx.N
    if not is_fundamental(du):
        raise ValueError(f"d_u = {du} is not fundamental")
    m = mu(idx, ell)
    value = m * rho_tilde(du, N, ell) * count_ideals_of_norm(du, Fraction(N, ell))

    ps = prime_divisors(N)
    trace = [
        {
            "p": p,
            "du": split_type(du, p).value,
            "dx": split_type(dx, p).value,
            "v": valuation(N, p),
            "eps": eps_d(du, p, N),
        }
        for p in ps
    ]

    tu, tx = split_type(du, ell), split_type(dx, ell)
    local: Optional[Fraction]
    if tu is SplitType.RAMIFIED and tx is SplitType.RAMIFIED:
        local = None
    elif SplitType.INERT in (tu, tx) and _v(N, ell) % 2 == 1:
        local = m
        for p in ps:
            if p != ell:
                local *= eps_d(du, p, N)
    else:
        local = Fraction(0)
    return LVPaths(value, local, trace)


def lv_summand(f: CmField, delta: int, n: int, ell: int) -> Fraction:
    paths = lv_paths(index_data(f, delta, n), ell)
    if not paths.agree:
        raise ArithmeticError(
            f"LV paths disagree at delta={delta}, n={n}, ell={ell}: "
            f"{paths.definitional} vs {paths.local}"
        )
    return paths.definitional


def by_summand(f: CmField, delta: int, n: int, ell: int) -> Fraction:
    return ReflexField.of(f).B_summand(delta, n, ell)


def _require_assumptions(f: CmField) -> None:
    rep = check_assumptions(f)
    if not rep.passed:
        raise ValueError(f"field {f.params} fails assumptions: {', '.join(rep.failed())}")


def by_total(f: CmField, ell: int) -> Fraction:
    _require_assumptions(f)
    return sum(
        (by_summand(f, delta, n, ell) for delta in enumerate_deltas(f.D) for n in enumerate_ns(f, delta)),
        Fraction(0),
    )


def lv_total(f: CmField, ell: int) -> Fraction:
    _require_assumptions(f)
    return sum(
        (lv_summand(f, delta, n, ell) for delta in enumerate_deltas(f.D) for n in enumerate_ns(f, delta)),
        Fraction(0),
    )


def rational_json(q) -> Optional[dict]:
    if q is None:
        return None
    q = Fraction(q)
    return {"num": q.numerator, "den": q.denominator}


@dataclass
class Row:
    delta: int
    n: int
    N: int
    du: int
    dx: int
    by: Optional[Fraction]
    lv: Optional[Fraction]
    by_paths_agree: Optional[bool] = None
    lv_paths_agree: Optional[bool] = None
    mu_agrees: Optional[bool] = None
    trace: list = field(default_factory=list)
    error: Optional[str] = None

    @property
    def equal(self) -> bool:
        return self.by is not None and self.by == self.lv

    def to_json(self) -> dict:
        out = {
            "delta": self.delta,
            "n": self.n,
            "N": self.N,
            "du": self.du,
            "dx": self.dx,
            "by": rational_json(self.by),
            "lv": rational_json(self.lv),
            "equal": self.equal,
            "paths_agree": {"by": self.by_paths_agree, "lv": self.lv_paths_agree},
            "trace": self.trace,
        }
        if self.error:
            out["error"] = self.error
        return out


@dataclass
class ComparisonReport:
    field: CmField
    ell: int
    assumptions: dict
    rows: list[Row]

    @property
    def in_theorem(self) -> bool:
        return bool(self.assumptions.get("passed"))

    @property
    def by_total(self) -> Optional[Fraction]:
        if any(r.by is None for r in self.rows):
            return None
        return sum((r.by for r in self.rows), Fraction(0))

    @property
    def lv_total(self) -> Optional[Fraction]:
        if any(r.lv is None for r in self.rows):
            return None
        return sum((r.lv for r in self.rows), Fraction(0))

    @property
    def totals_equal(self) -> bool:
        return self.by_total is not None and self.by_total == self.lv_total

    @property
    def rows_equal(self) -> bool:
        return all(r.equal for r in self.rows)

    def to_json(self) -> dict:
        f = self.field
        return {
            "schema": SCHEMA_VERSION,
            "D": f.D,
            "a2": f.a2,
            "b2": f.b2,
            "Dt": f.Dt,
            "eta_case": f.eta_case.value,
            "cK": f.cK,
            "assumptions": self.assumptions,
            "ell": self.ell,
            "rows": [r.to_json() for r in self.rows],
            "by_total": rational_json(self.by_total),
            "lv_total": rational_json(self.lv_total),
            "totals_equal": self.totals_equal,
        }


def _merge_trace(by_trace: list, lv_trace: list) -> list:
    by_p = {t["p"]: t for t in by_trace}
    return [
        {
            "p": t["p"],
            "by": {k: v for k, v in by_p.get(t["p"], {}).items() if k != "p"} or None,
            "lv": {k: v for k, v in t.items() if k != "p"},
        }
        for t in lv_trace
    ]


def compare(f: CmField, ell: int, permissive: bool = False) -> ComparisonReport:
    """Evaluate both formulas summand by summand at the prime ell.

    Outside the theorem's hypotheses this only runs when ``permissive`` is
    set; failures to evaluate a side are then recorded on the row.
    """
    rep = check_assumptions(f)
    if not rep.passed and not permissive:
        raise ValueError(f"field {f.params} fails assumptions: {', '.join(rep.failed())}")
    rf = ReflexField.of(f)
    rows = []
    for delta in enumerate_deltas(f.D):
        for n in enumerate_ns(f, delta):
            idx = index_data(f, delta, n)
            row = Row(delta, n, idx.N, idx.du, idx.dx, None, None)
            errors = []
            by_trace: list = []
            lv_trace: list = []
            try:
                bp = rf.b_paths(delta, n, ell)
                row.by, row.by_paths_agree, by_trace = bp.definitional, bp.agree, bp.trace
            except (ValueError, ArithmeticError) as exc:
                errors.append(f"by: {exc}")
            try:
                lp = lv_paths(idx, ell)
                row.lv, row.lv_paths_agree, lv_trace = lp.definitional, lp.agree, lp.trace
            except (ValueError, ArithmeticError) as exc:
                errors.append(f"lv: {exc}")
            if idx.N % ell == 0:
                row.mu_agrees = mu(idx, ell) == mu_closed(idx, ell)
            row.trace = _merge_trace(by_trace, lv_trace)
            row.error = "; ".join(errors) or None
            rows.append(row)
    return ComparisonReport(f, ell, rep.to_json(), rows)


# lemma harness

LEMMA_NAMES = (
    "cK_odd",
    "cK_congruence",
    "du_negative",
    "gcd_delta_N",
    "du_dx_coprime_on_N",
    "norm_identity",
    "hilbert_du_dx",
    "norm_consistency",
    "valuation_lemma",
    "splitting_reciprocity",
    "local_factor_equality",
    "index_set_double",
)


@dataclass
class LemmaReport:
    field: CmField
    counts: dict = field(default_factory=lambda: {k: 0 for k in LEMMA_NAMES})
    failures: dict = field(default_factory=lambda: {k: [] for k in LEMMA_NAMES})

    def record(self, name: str, ok: bool, witness=None) -> None:
        self.counts[name] += 1
        if not ok:
            self.failures[name].append(witness)

    @property
    def passed(self) -> bool:
        return not any(self.failures.values())

    def to_json(self) -> dict:
        return {
            "D": self.field.D,
            "a2": self.field.a2,
            "b2": self.field.b2,
            "passed": self.passed,
            "counts": self.counts,
            "failures": {k: v for k, v in self.failures.items() if v},
        }


def hilbert_places(*xs: int) -> list:
    ps = set()
    for x in xs:
        ps |= set(prime_divisors(x))
    return [INFINITY] + sorted(ps | {2})


def verify_paper_lemmas(f: CmField) -> LemmaReport:
    """Check the structural claims behind the comparison over the whole index set."""
    rep = LemmaReport(f)
    rep.record("cK_odd", f.cK % 2 == 1, f.cK)
    rep.record("cK_congruence", (2 * f.cK - f.a2) % f.D == 0, f.cK)
    rf = ReflexField.of(f)

    for delta in enumerate_deltas(f.D):
        ns = enumerate_ns(f, delta)
        other = inverse_different_index_set(f, delta)
        rep.record("index_set_double", ns == other, {"delta": delta, "congruence": ns, "different": other})

    for idx in all_index_data(f):
        w = {"delta": idx.delta, "n": idx.n}
        N = idx.N
        rep.record("du_negative", idx.du < 0, {**w, "du": idx.du})
        rep.record("gcd_delta_N", gcd(idx.delta, N) == 1, {**w, "N": N})
        lhs = idx.delta**2 * f.Dt - idx.n**2
        rep.record("norm_identity", lhs == f.D * (idx.du * idx.dx - idx.cross_term**2), w)
        for v in hilbert_places(idx.du, idx.dx, N):
            rep.record(
                "hilbert_du_dx",
                hilbert_symbol(idx.du, -N, v) == hilbert_symbol(idx.dx, -N, v),
                {**w, "place": v},
            )

        frakN, ND = rf.reflex_ideal_of_index(idx.delta, idx.n)
        rep.record(
            "norm_consistency",
            ideal_norm(ND) == N and ideal_norm(frakN) == Fraction(N, f.D),
            {**w, "N": N, "norm_ND": str(ideal_norm(ND))},
        )
        for p in prime_divisors(N):
            wp = {**w, "p": p}
            rep.record("du_dx_coprime_on_N", not (idx.du % p == 0 and idx.dx % p == 0), wp)
            vp = valuation(N, p)
            supp = [P for P in rf.primes_over(p) if ND.get(P, 0) > 0]
            ok = (
                len(supp) == 1
                and rf.classify(supp[0]) is not SplitType.RAMIFIED
                and supp[0].f == 1
                and ND[supp[0]] == vp
                and frakN.get(supp[0], 0) == vp
            )
            rep.record("valuation_lemma", ok, {**wp, "support": [str(P) for P in supp]})
            if len(supp) != 1:
                continue
            kt = rf.classify(supp[0])
            tu, tx = split_type(idx.du, p), split_type(idx.dx, p)
            recip = (kt is SplitType.SPLIT) == (SplitType.SPLIT in (tu, tx)) and (
                kt is SplitType.INERT
            ) == (SplitType.INERT in (tu, tx))
            rep.record("splitting_reciprocity", recip, {**wp, "ktilde": kt.value, "du": tu.value, "dx": tx.value})
            if is_fundamental(idx.du):
                a, b = rf.eps(p, ND), eps_d(idx.du, p, N)
                rep.record("local_factor_equality", a == b, {**wp, "reflex": a, "du": b})
    return rep
