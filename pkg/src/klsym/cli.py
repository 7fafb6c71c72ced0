"""Batch front end: compute, verify, and scan subcommands.

stdout carries data (JSON for single cells and verify summaries, CSV for
scans), stderr carries progress logs.  Output bytes are deterministic
for fixed inputs unless --timings is requested.  Exit codes: 0 success,
1 verification failure, 2 usage or resource error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from fractions import Fraction

from .char_sums import PAIR_BUDGET_DEFAULT
from .epsilon import (constant_c_closed, eps_infinity_assembled, evans_sign,
                      jacobi_symbol, laumon_constant)
from .errors import (EXIT_OK, EXIT_USAGE, EXIT_VERIFICATION, DomainError,
                     IntegrityError, ResourceLimitError, VerificationError)
from .finite_field import is_prime
from .local_data import (delta_degree, h1c_degree,
                         infinity_invariant_eigenvalues, odd_tame_pair_counts)
from .lseries import (SumCache, default_guard, extract_functional_constant,
                      purity_check, reconstruct_lpolynomial)

SCAN_BUDGET_DEFAULT = 2 * 10**10
SCAN_BUDGET_SLOW = 2 * 10**11


def _log(msg: str) -> None:
    print(f"[klsym] {msg}", file=sys.stderr, flush=True)


def _emit(text: str) -> None:
    sys.stdout.write(text)
    sys.stdout.flush()


def _threads(value) -> int:
    if value:
        return max(1, int(value))
    env = os.environ.get("KLSYM_THREADS")
    if env:
        return max(1, int(env))
    return os.cpu_count() or 1


def compute_cell(p: int, k: int, *, guard=None,
                 pair_budget: int = PAIR_BUDGET_DEFAULT,
                 cache: SumCache | None = None,
                 with_timings: bool = False) -> dict:
    """Full pipeline for one (p, k) cell, returning a RunRecord dict.

    The record always carries the named checks {integrality,
    truncation_or_fe, functional_equation, c_squared, c_closed_form,
    purity}; a check that could not run because an upstream one failed is
    marked failed with a note.
    """
    t0 = time.monotonic()
    delta = delta_degree(p, k)
    cache = cache or SumCache(pair_budget=pair_budget)
    checks: dict[str, dict] = {}
    record = {"p": p, "k": k, "delta": delta, "coeffs": None,
              "c_computed": None, "c_closed": str(constant_c_closed(p, k)),
              "checks": checks}

    def fail_rest(reason: str) -> None:
        for name in ("integrality", "truncation_or_fe", "functional_equation",
                     "c_squared", "c_closed_form", "purity"):
            checks.setdefault(name, {"pass": False, "detail": reason})

    result = None
    try:
        result = reconstruct_lpolynomial(p, k, guard, pair_budget=pair_budget,
                                         cache=cache)
    except IntegrityError as exc:
        checks["integrality"] = {"pass": False, "detail": str(exc)}
        fail_rest("skipped: power sums failed integrality")
    except VerificationError as exc:
        tag = exc.details.get("check")
        name = "truncation_or_fe" if tag == "truncation" else "integrality"
        checks[name] = {"pass": False, "detail": str(exc)}
        fail_rest("skipped: reconstruction failed")

    if result is not None:
        poly = result.poly
        record["coeffs"] = [str(m) for m in poly.coeffs]
        record["c_computed"] = str(poly.coeffs[-1])
        checks["integrality"] = {
            "pass": True,
            "detail": f"S_j integral for j=1..{delta + result.guard}"}
        if result.guard >= 1:
            checks["truncation_or_fe"] = {
                "pass": True,
                "detail": f"{result.guard} guard coefficients vanish"}
        else:
            checks["truncation_or_fe"] = {
                "pass": True,
                "detail": "guard 0; functional equation certifies truncation"}
        try:
            c, _residuals = extract_functional_constant(poly)
            checks["functional_equation"] = {"pass": True,
                                             "detail": "all residuals zero"}
            checks["c_squared"] = {
                "pass": c * c == p ** ((k + 1) * delta),
                "detail": f"c^2 == p^{(k + 1) * delta}"}
            closed = constant_c_closed(p, k)
            checks["c_closed_form"] = {
                "pass": c == closed,
                "detail": f"c={c} vs closed {closed}"}
        except VerificationError as exc:
            checks["functional_equation"] = {"pass": False, "detail": str(exc)}
            checks.setdefault("c_squared", {"pass": False, "detail": "skipped"})
            checks.setdefault("c_closed_form", {"pass": False, "detail": "skipped"})
        try:
            report = purity_check(poly)
            checks["purity"] = {
                "pass": True,
                "detail": f"max relative deviation {report['max_rel_error']:.2e}"}
        except VerificationError as exc:
            checks["purity"] = {"pass": False, "detail": str(exc)}

    record["ok"] = all(c["pass"] for c in checks.values())
    if with_timings:
        record["timings"] = {"total_s": round(time.monotonic() - t0, 3)}
    return record


def run_compute(args) -> int:
    cache = SumCache(pair_budget=args.budget, workers=_threads(args.threads),
                     cache_dir=args.cache_dir)
    record = compute_cell(args.p, args.k, guard=args.guard,
                          pair_budget=args.budget, cache=cache,
                          with_timings=args.timings)
    _emit(json.dumps(record, indent=2, sort_keys=True) + "\n")
    return EXIT_OK if record["ok"] else EXIT_VERIFICATION


# ----- verify ----------------------------------------------------------------


def _odd_primes_up_to(n: int) -> list[int]:
    return [p for p in range(3, n + 1) if is_prime(p)]


def identity_suite_cell(p: int, k: int) -> list[str]:
    """Closed-form identity checks for one (p, k); returns failure notes."""
    failures = []
    try:
        if laumon_constant(p, k).integer_value() != constant_c_closed(p, k):
            failures.append(f"laumon != closed at ({p},{k})")
    except VerificationError as exc:
        failures.append(f"laumon product failed at ({p},{k}): {exc}")
    try:
        eps_infinity_assembled(p, k)
    except VerificationError as exc:
        failures.append(f"infinity assembly failed at ({p},{k}): {exc}")
    c = constant_c_closed(p, k)
    delta = delta_degree(p, k)
    if c * c != p ** ((k + 1) * delta):
        failures.append(f"c^2 != p^((k+1)delta) at ({p},{k})")
    if h1c_degree(p, k) - 1 - len(infinity_invariant_eigenvalues(p, k)) != delta:
        failures.append(f"degree cross-check failed at ({p},{k})")
    if k % 2 == 0 and c <= 0:
        failures.append(f"even-k constant not positive at ({p},{k})")
    if k % 2 == 1:
        lhs, rhs = odd_tame_pair_counts(p, k)
        if lhs != rhs:
            failures.append(f"odd-k floor identity failed at ({p},{k})")
    return failures


def _verify_full_worker(task) -> list[dict]:
    p, ks, budget = task
    cache = SumCache(pair_budget=budget, workers=1)
    records = []
    for k in ks:
        records.append(compute_cell(p, k, pair_budget=budget, cache=cache))
    return records


def run_verify(args) -> int:
    failures: list[str] = []
    summary: dict = {}
    if args.identities:
        cells = 0
        for p in _odd_primes_up_to(args.pmax):
            for k in range(1, args.kmax + 1):
                failures.extend(identity_suite_cell(p, k))
                cells += 1
        summary = {"mode": "identities", "pmax": args.pmax, "kmax": args.kmax,
                   "cells": cells, "failures": failures}
    elif args.full:
        pset = sorted({int(x) for x in args.pset.split(",")})
        for p in pset:
            if p == 2 or not is_prime(p):
                raise DomainError(f"--pset entries must be odd primes, got {p}")
        tasks = []
        for p in pset:
            ks = []
            for k in range(1, args.kmax + 1):
                delta = delta_degree(p, k)
                if p ** (2 * (delta + default_guard(p, delta))) <= args.budget:
                    ks.append(k)
            if ks:
                tasks.append((p, ks, args.budget))
        threads = _threads(args.threads)
        if threads > 1 and len(tasks) > 1:
            with ProcessPoolExecutor(max_workers=min(threads, len(tasks))) as pool:
                results = list(pool.map(_verify_full_worker, tasks))
        else:
            results = [_verify_full_worker(t) for t in tasks]
        records = [rec for batch in results for rec in batch]
        for rec in records:
            for name, check in rec["checks"].items():
                if not check["pass"]:
                    failures.append(f"({rec['p']},{rec['k']}) {name}: "
                                    f"{check['detail']}")
        summary = {"mode": "full", "pset": pset, "kmax": args.kmax,
                   "budget": args.budget, "cells": len(records),
                   "records": records, "failures": failures}
    else:
        raise DomainError("choose one of --identities or --full")
    _emit(json.dumps(summary, indent=2, sort_keys=True) + "\n")
    return EXIT_VERIFICATION if failures else EXIT_OK


# ----- scan -------------------------------------------------------------------


def _scan_row_worker(task) -> dict:
    p, k, budget = task
    cache = SumCache(pair_budget=budget, workers=1)
    delta = delta_degree(p, k)
    row = {"p": p, "delta": delta}
    try:
        result = reconstruct_lpolynomial(p, k, pair_budget=budget, cache=cache)
    except ResourceLimitError as exc:
        row["error"] = f"resource: {exc}"
        return row
    except (VerificationError, IntegrityError) as exc:
        row["error"] = f"verification: {exc}"
        return row
    poly = result.poly
    c = poly.coeffs[-1]
    row["c"] = c
    row["sign_c"] = 1 if c > 0 else -1
    row["evans_sign"] = evans_sign(p, k)
    row["match"] = row["sign_c"] == row["evans_sign"]
    row["a_p"] = poly.coeffs[1] if delta >= 1 else 0
    problems = []
    try:
        extract_functional_constant(poly)
    except VerificationError as exc:
        problems.append(str(exc))
    if k == 7:
        if delta != 3:
            problems.append(f"delta_7({p}) = {delta}, expected 3")
        root = Fraction(jacobi_symbol(p, 105), p**4)
        if poly.evaluate(root) != 0:
            problems.append("predicted reciprocal root is not a root")
    if not row["match"]:
        problems.append("sign mismatch")
    if problems:
        row["error"] = f"verification: {'; '.join(problems)}"
    return row


def run_scan(args) -> int:
    if args.k not in (7, 11):
        raise DomainError(f"scan supports k in (7, 11), got {args.k}")
    budget = args.budget
    if budget is None:
        budget = SCAN_BUDGET_SLOW if args.slow else SCAN_BUDGET_DEFAULT
    primes = [p for p in _odd_primes_up_to(args.pmax) if p > args.k]
    tasks = [(p, args.k, budget) for p in primes]
    threads = _threads(args.threads)
    if threads > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=min(threads, len(tasks))) as pool:
            rows = list(pool.map(_scan_row_worker, tasks))
    else:
        rows = []
        for t in tasks:
            _log(f"scan row p={t[0]}")
            rows.append(_scan_row_worker(t))

    had_resource = any("error" in r and r["error"].startswith("resource")
                       for r in rows)
    had_failure = any("error" in r and r["error"].startswith("verification")
                      for r in rows)
    if args.emit == "json":
        printable = [{kk: (str(v) if kk == "c" else v) for kk, v in r.items()}
                     for r in rows]
        _emit(json.dumps(printable, indent=2, sort_keys=True) + "\n")
    else:
        lines = ["p,delta,c,sign_c,evans_sign,match,a_p"]
        for r in rows:
            if "c" in r:
                lines.append(f"{r['p']},{r['delta']},{r['c']},{r['sign_c']},"
                             f"{r['evans_sign']},{str(r['match']).lower()},{r['a_p']}")
            else:
                lines.append(f"{r['p']},{r['delta']},,,,,")
        _emit("\n".join(lines) + "\n")
    for r in rows:
        if "error" in r:
            _log(f"p={r['p']}: {r['error']}")
    if had_resource:
        return EXIT_USAGE
    return EXIT_VERIFICATION if had_failure else EXIT_OK


# ----- argument parsing --------------------------------------------------------


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="klsym",
        description="Exact symmetric-power Kloosterman L-polynomial engine")
    sub = parser.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--budget", type=int, default=None,
                        help="max pair count for enumeration kernels")
    common.add_argument("--threads", type=int, default=None,
                        help="worker processes (default: all cores, "
                             "or KLSYM_THREADS)")
    common.add_argument("--cache-dir", default=None,
                        help="directory for binary field-table caches")

    c = sub.add_parser("compute", parents=[common],
                       help="one (p, k) cell with all checks")
    c.add_argument("--p", type=int, required=True)
    c.add_argument("--k", type=int, required=True)
    c.add_argument("--guard", type=int, default=None)
    c.add_argument("--emit", choices=["json"], default="json")
    c.add_argument("--timings", action="store_true",
                   help="include wall-clock timings (breaks byte determinism)")

    v = sub.add_parser("verify", parents=[common],
                       help="closed-form identity suite or full grid")
    v.add_argument("--identities", action="store_true")
    v.add_argument("--full", action="store_true")
    v.add_argument("--pmax", type=int, default=97)
    v.add_argument("--kmax", type=int, default=50)
    v.add_argument("--pset", default="3,5,7,11,13")

    s = sub.add_parser("scan", parents=[common],
                       help="sign scan over primes for k = 7 or 11")
    s.add_argument("--k", type=int, required=True)
    s.add_argument("--pmax", type=int, required=True)
    s.add_argument("--slow", action="store_true",
                   help="enable the extended budget tier")
    s.add_argument("--emit", choices=["csv", "json"], default="csv")
    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "budget", None) is None and args.command != "scan":
        args.budget = PAIR_BUDGET_DEFAULT
    if getattr(args, "kmax", None) is not None and args.kmax < 1:
        print("kmax must be >= 1", file=sys.stderr)
        return EXIT_USAGE
    try:
        if args.command == "compute":
            return run_compute(args)
        if args.command == "verify":
            return run_verify(args)
        return run_scan(args)
    except (DomainError, ResourceLimitError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (VerificationError, IntegrityError) as exc:
        print(f"verification failure: {exc}", file=sys.stderr)
        return EXIT_VERIFICATION


if __name__ == "__main__":
    sys.exit(main())
