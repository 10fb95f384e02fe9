"""Command-line front end.

    cmcompare scan   --d-max 41 --coeff-max 40 --ell-max 50 [--permissive] [--jobs N] [--out PATH]
    cmcompare field  --D 5 --a2 -37 --b2 -9 --ell 2 [--json]
    cmcompare verify [--d-max 41 --coeff-max 40 --ell-max 50]

Records are JSON lines (schema in docs/schema.md).  Exit codes: 0 success,
1 equality or property failure, 2 usage error or rejected field, 3 I/O error.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
import time
from dataclasses import dataclass
from multiprocessing import Pool
from typing import Iterator, Optional

from .arith import INFINITY, hilbert_symbol, is_prime, prime_divisors
from .cmfield import FieldRejected, build_cm_field, check_assumptions
from .formulas import SCHEMA_VERSION, compare, verify_paper_lemmas
from .quadorder import count_ideals_brute, count_ideals_of_norm, is_fundamental

log = logging.getLogger("cmcompare")

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_IO = 0, 1, 2, 3


@dataclass(frozen=True)
class ScanConfig:
    d_max: int = 41
    coeff_max: int = 40
    ell_max: int = 50
    permissive: bool = False
    out: Optional[str] = None
    jobs: int = 1

    def __post_init__(self):
        if self.d_max < 5:
            raise ValueError("d_max must be at least 5")
        if self.coeff_max < 0 or self.ell_max < 2:
            raise ValueError("coeff_max must be >= 0 and ell_max >= 2")


def scan_primes(d_max: int) -> list[int]:
    return [D for D in range(5, d_max + 1) if D % 4 == 1 and is_prime(D)]


def ells(ell_max: int) -> list[int]:
    return [p for p in range(2, ell_max + 1) if is_prime(p)]


def iter_fields(cfg: ScanConfig) -> Iterator[tuple[int, int, int]]:
    """(D, 2A, 2B) over the box with matching parity, in output order."""
    c = cfg.coeff_max
    for D in scan_primes(cfg.d_max):
        for a2 in range(-c, c + 1):
            for b2 in range(-c, c + 1):
                if (a2 - b2) % 2 == 0:
                    yield D, a2, b2


def _field_records(args) -> list[dict]:
    (D, a2, b2), ell_list, permissive = args
    try:
        f = build_cm_field(D, a2, b2)
    except FieldRejected:
        return []
    rep = check_assumptions(f)
    if not rep.passed and not permissive:
        return []
    return [compare(f, ell, permissive=True).to_json() for ell in ell_list]


def run_scan(cfg: ScanConfig) -> Iterator[dict]:
    """Comparison records for every admitted field, ordered by (D, a2, b2, ell)."""
    ell_list = ells(cfg.ell_max)
    work = ((params, ell_list, cfg.permissive) for params in iter_fields(cfg))
    if cfg.jobs > 1:
        with Pool(cfg.jobs) as pool:
            # imap keeps submission order whatever the completion order
            for recs in pool.imap(_field_records, work, chunksize=16):
                yield from recs
    else:
        for item in work:
            yield from _field_records(item)


def record_failed(rec: dict) -> bool:
    """An in-theorem record whose formulas or evaluation paths disagree."""
    if not rec["assumptions"]["passed"]:
        return False
    if not rec["totals_equal"]:
        return True
    return any(
        not row["equal"] or row["paths_agree"]["by"] is False or row["paths_agree"]["lv"] is False
        for row in rec["rows"]
    )


def cmd_scan(cfg: ScanConfig, stdout=None) -> int:
    stdout = stdout or sys.stdout
    stats = {"fields": 0, "comparisons": 0, "equalities": 0, "failures": 0, "out_of_theorem": 0,
             "nonempty_fields": 0, "positive_totals": 0}
    seen = set()
    try:
        sink = open(cfg.out, "w", encoding="utf-8") if cfg.out else stdout
    except OSError as exc:
        print(f"cannot open {cfg.out}: {exc}", file=sys.stderr)
        return EXIT_IO
    try:
        for rec in run_scan(cfg):
            key = (rec["D"], rec["a2"], rec["b2"])
            if key not in seen:
                seen.add(key)
                stats["fields"] += 1
                if rec["rows"]:
                    stats["nonempty_fields"] += 1
            stats["comparisons"] += 1
            if not rec["assumptions"]["passed"]:
                stats["out_of_theorem"] += 1
            elif record_failed(rec):
                stats["failures"] += 1
            else:
                stats["equalities"] += 1
            by = rec["by_total"]
            if by and by["num"] > 0:
                stats["positive_totals"] += 1
            sink.write(json.dumps(rec, sort_keys=True) + "\n")
        summary = {"schema": SCHEMA_VERSION, "summary": stats}
        sink.write(json.dumps(summary, sort_keys=True) + "\n")
        if sink is not stdout:
            stdout.write(json.dumps(summary, sort_keys=True) + "\n")
    except OSError as exc:
        print(f"write failed: {exc}", file=sys.stderr)
        return EXIT_IO
    finally:
        if sink is not stdout:
            sink.close()
    return EXIT_FAIL if stats["failures"] else EXIT_OK


def _fmt(q) -> str:
    if q is None:
        return "-"
    return str(q["num"]) if q["den"] == 1 else f"{q['num']}/{q['den']}"


def format_record(rec: dict) -> str:
    lines = [
        f"K: D={rec['D']}  2A={rec['a2']}  2B={rec['b2']}  Dt={rec['Dt']}  "
        f"eta case {rec['eta_case']}  c_K={rec['cK']}  ell={rec['ell']}",
        "assumptions: " + ", ".join(f"{k}={'ok' if v else 'FAILED'}" for k, v in rec["assumptions"]["checks"].items()),
    ]
    if not rec["rows"]:
        lines.append("index set: empty")
    else:
        lines.append(f"{'delta':>5} {'n':>6} {'N':>8} {'du':>8} {'dx':>8} {'BY':>6} {'LV':>6}  trace")
        for r in rec["rows"]:
            tr = " ".join(
                f"{t['p']}:{(t['by'] or {}).get('ktilde', '?')[0]}/{t['lv']['du'][0]}{t['lv']['dx'][0]}"
                for t in r["trace"]
            )
            flag = "" if r["equal"] else "  MISMATCH"
            lines.append(
                f"{r['delta']:>5} {r['n']:>6} {r['N']:>8} {r['du']:>8} {r['dx']:>8} "
                f"{_fmt(r['by']):>6} {_fmt(r['lv']):>6}  {tr}{flag}"
            )
    lines.append(f"totals: BY={_fmt(rec['by_total'])}  LV={_fmt(rec['lv_total'])}  equal={rec['totals_equal']}")
    return "\n".join(lines)


def cmd_field(D: int, a2: int, b2: int, ell: int, as_json: bool = False, stdout=None) -> int:
    stdout = stdout or sys.stdout
    if not is_prime(ell):
        print(f"ell = {ell} is not prime", file=sys.stderr)
        return EXIT_USAGE
    try:
        f = build_cm_field(D, a2, b2)
    except FieldRejected as exc:
        print("field rejected:", file=sys.stderr)
        for r in exc.reasons:
            print(f"  - {r}", file=sys.stderr)
        return EXIT_USAGE
    rec = compare(f, ell, permissive=True).to_json()
    if as_json:
        stdout.write(json.dumps(rec, sort_keys=True) + "\n")
    else:
        stdout.write(format_record(rec) + "\n")
        if not rec["assumptions"]["passed"]:
            stdout.write("(outside the theorem's hypotheses; equality not asserted)\n")
    return EXIT_FAIL if record_failed(rec) else EXIT_OK


# verification suite


class PropertyTally:
    def __init__(self):
        self.counts: dict[str, int] = {}
        self.first_failure: dict[str, object] = {}

    def add(self, name: str, ok: bool, witness=None) -> None:
        self.counts.setdefault(name, 0)
        if ok:
            self.counts[name] += 1
        elif name not in self.first_failure:
            self.first_failure[name] = witness

    @property
    def passed(self) -> bool:
        return not self.first_failure


def hilbert_product_check(bound: int, tally: PropertyTally) -> None:
    for a in range(-bound, bound + 1):
        for b in range(-bound, bound + 1):
            if a == 0 or b == 0:
                continue
            places = [INFINITY] + sorted(set(prime_divisors(2 * a * b)))
            prod = 1
            for v in places:
                prod *= hilbert_symbol(a, b, v)
            tally.add("hilbert_product_formula", prod == 1, (a, b))


def ideal_count_check(d_bound: int, a_bound: int, tally: PropertyTally) -> None:
    for d in range(-d_bound + 1, 0):
        if not is_fundamental(d):
            continue
        for A in range(1, a_bound + 1):
            tally.add(
                "ideal_count_oracle",
                count_ideals_brute(d, A) == count_ideals_of_norm(d, A),
                (d, A),
            )


def corpus_check(cfg: ScanConfig, tally: PropertyTally) -> None:
    for D, a2, b2 in iter_fields(cfg):
        try:
            f = build_cm_field(D, a2, b2)
        except FieldRejected:
            continue
        if not check_assumptions(f).passed:
            continue
        tally.add("fields_in_theorem", True)
        lemmas = verify_paper_lemmas(f)
        for name, count in lemmas.counts.items():
            fails = lemmas.failures[name]
            for _ in range(count - len(fails)):
                tally.add(name, True)
            for w in fails:
                tally.add(name, False, {"field": f.params, "witness": w})
        for ell in ells(cfg.ell_max):
            rep = compare(f, ell)
            tally.add("totals_equal", rep.totals_equal, (f.params, ell))
            for r in rep.rows:
                w = (f.params, ell, r.delta, r.n)
                tally.add("summands_equal", r.equal, w)
                tally.add("by_paths_agree", r.by_paths_agree is not False, w)
                tally.add("lv_paths_agree", r.lv_paths_agree is not False, w)
                if r.mu_agrees is not None:
                    tally.add("mu_closed_form", r.mu_agrees, w)


def cmd_verify(cfg: ScanConfig, oracle_d: int = 500, oracle_a: int = 300,
               hilbert_bound: int = 50, stdout=None) -> int:
    stdout = stdout or sys.stdout
    tally = PropertyTally()
    t0 = time.perf_counter()
    hilbert_product_check(hilbert_bound, tally)
    ideal_count_check(oracle_d, oracle_a, tally)
    corpus_check(cfg, tally)
    width = max(len(k) for k in tally.counts)
    for name in sorted(tally.counts):
        status = "FAIL" if name in tally.first_failure else "ok"
        stdout.write(f"{name:<{width}}  {tally.counts[name]:>8} passed  {status}\n")
    for name, w in tally.first_failure.items():
        stdout.write(f"first counterexample for {name}: {w}\n")
    stdout.write(f"elapsed {time.perf_counter() - t0:.1f}s\n")
    return EXIT_OK if tally.passed else EXIT_FAIL


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="cmcompare", description=__doc__.splitlines()[0] if __doc__ else None)
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="cmd", required=True)

    def box(p, d=41, c=40, e=50):
        p.add_argument("--d-max", type=int, default=d)
        p.add_argument("--coeff-max", type=int, default=c)
        p.add_argument("--ell-max", type=int, default=e)

    s = sub.add_parser("scan", help="scan (D, 2A, 2B) and compare both formulas")
    box(s)
    s.add_argument("--permissive", action="store_true", help="include fields outside the hypotheses")
    s.add_argument("--jobs", type=int, default=os.cpu_count() or 1)
    s.add_argument("--out", help="write JSON lines here instead of stdout")

    fl = sub.add_parser("field", help="compare both formulas for one field and prime")
    fl.add_argument("--D", type=int, required=True)
    fl.add_argument("--a2", type=int, required=True, help="2A")
    fl.add_argument("--b2", type=int, required=True, help="2B")
    fl.add_argument("--ell", type=int, required=True)
    fl.add_argument("--json", action="store_true")

    v = sub.add_parser("verify", help="run the property suite")
    box(v)
    v.add_argument("--oracle-d-max", type=int, default=500)
    v.add_argument("--oracle-a-max", type=int, default=300)
    v.add_argument("--hilbert-max", type=int, default=50)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING)
    try:
        if args.cmd == "field":
            return cmd_field(args.D, args.a2, args.b2, args.ell, as_json=args.json)
        cfg = ScanConfig(args.d_max, args.coeff_max, args.ell_max,
                         permissive=getattr(args, "permissive", False),
                         out=getattr(args, "out", None), jobs=getattr(args, "jobs", 1))
    except ValueError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    if args.cmd == "scan":
        return cmd_scan(cfg)
    return cmd_verify(cfg, args.oracle_d_max, args.oracle_a_max, args.hilbert_max)


if __name__ == "__main__":
    sys.exit(main())
