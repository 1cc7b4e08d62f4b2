"""Command-line front end for the verification pipelines.

Every subcommand renders one flat table, as CSV (header always present) or
JSON (a single flat object for scalar reports, an array of flat objects for
sweeps), with floats at 12 significant digits. Identical invocations produce
byte-identical output: field order is declared per subcommand, solver seeds
are fixed, and the suite runner buffers per line and writes in line order.

Exit codes: 0 success, 1 numeric failure (a verified inequality broke or an
iteration stalled), 2 usage error (bad flags, unknown domain class,
out-of-scope parameter combinations).
"""

from __future__ import annotations

import argparse
import csv
import io
import os
import shlex
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

from . import bounds, fem, geometry, rearrangement, special, sturm1d
from .errors import NumericError, ParameterError

_FEM_P_RULE = "FEM mu1 unavailable for p != 2 (discrete solver is linear only)"


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return f"{value:.12g}"
    return str(value)


def _json_ready(value):
    if isinstance(value, float):
        return float(f"{value:.12g}")
    return value


def emit_table(rows, fmt: str, fieldnames=None, single: bool = False) -> str:
    """Render row dicts as CSV or JSON text.

    fieldnames pins the column set (needed when rows is empty); otherwise the
    keys of the first row are used in their insertion order. With single=True
    a one-row JSON table is emitted as a bare object instead of an array.
    """
    import json

    if fieldnames is None:
        fieldnames = list(rows[0].keys()) if rows else []
    if fmt == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(fieldnames)
        for row in rows:
            writer.writerow([_fmt(row.get(name)) for name in fieldnames])
        return buf.getvalue()
    if fmt != "json":
        raise ParameterError(f"unknown format {fmt!r}")
    payload = [{name: _json_ready(row.get(name)) for name in fieldnames}
               for row in rows]
    obj = payload[0] if (single and len(payload) == 1) else payload
    return json.dumps(obj, indent=2) + "\n"


def _parse_list(text: str, kind):
    try:
        return [kind(part) for part in text.split(",") if part != ""]
    except ValueError as ex:
        raise ParameterError(f"bad list value {text!r}: {ex}") from None


def _spec_from_args(args) -> geometry.DomainSpec:
    if args.domain == "square":
        return geometry.make_rectangle(1.0, 1.0)
    if args.domain == "rectangle":
        if args.a is None or args.b is None:
            raise ParameterError("rectangle needs --a and --b")
        return geometry.make_rectangle(args.a, args.b)
    if args.domain == "rhombus":
        if args.m is None:
            raise ParameterError("rhombus needs --m")
        return geometry.make_rhombus(args.m)
    if args.k is None:
        raise ParameterError("polygon needs --k")
    return geometry.make_regular_polygon(args.k, args.radius)


def _add_domain_flags(sub) -> None:
    sub.add_argument("--domain", required=True,
                     choices=["square", "rectangle", "rhombus", "polygon"])
    sub.add_argument("--m", type=int, help="rhombus angle parameter")
    sub.add_argument("--a", type=float, help="rectangle long side")
    sub.add_argument("--b", type=float, help="rectangle short side")
    sub.add_argument("--k", type=int, help="polygon vertex count")
    sub.add_argument("--radius", type=float, default=1.0)


def _add_output_flags(sub, default_format: str) -> None:
    sub.add_argument("--format", choices=["json", "csv"], default=default_format)
    sub.add_argument("--out", dest="out_path", default=None,
                     help="write the table to this file instead of stdout")


def _eigen_pipeline(spec: geometry.DomainSpec, level: int):
    mesh = geometry.triangulate(spec, level)
    pair = fem.solve_neumann_mu1(mesh)
    profile = rearrangement.rearrange_oriented(mesh, pair.vector)
    return pair, profile


def _require_p2(p: float) -> None:
    if p != 2.0:
        raise ParameterError(_FEM_P_RULE)


def _cmd_psi(args):
    ps = _parse_list(args.p, float)
    ns = _parse_list(args.n, int)
    if not ps or not ns:
        raise ParameterError("psi needs at least one --p and one --n value")
    rows = []
    for p in ps:
        for n in ns:
            zero = special.psi_profile(p, n).first_zero
            rows.append({"p": p, "n": n, "psi": zero, "psi_p": zero ** p})
    return rows, False, ["p", "n", "psi", "psi_p"]


def _cmd_bound(args):
    spec = _spec_from_args(args)
    entry = bounds.kn_lookup(spec)
    area = spec.area
    row = {
        "domain": spec.label, "p": args.p, "n": 2,
        "k_value": entry.value, "rule": entry.rule,
        "area": area, "width": spec.width, "diameter": spec.diameter,
        "main": bounds.main_bound(args.p, 2, entry.value, area),
        "ashbaugh_mercado": bounds.ashbaugh_mercado(args.p, 2, entry.value, area),
    }
    if args.p == 2.0:
        row["payne_weinberger"] = bounds.payne_weinberger(spec.diameter)
        row["bct_corollary"] = bounds.bct_corollary(2, entry.value, area)
        row["symmetric_planar"] = bounds.symmetric_planar_bound(spec.width, area)
    return [row], True, list(row.keys())


def _cmd_compare_bounds(args):
    _require_p2(args.p)
    spec = _spec_from_args(args)
    report = bounds.compare_report(spec, args.p, level=args.level)
    rows = [{"domain": report.domain, "p": report.p, "n": report.n,
             "mu1": report.mu1, "bound": entry.name, "value": entry.value,
             "ratio": entry.value / report.mu1, "applicable": entry.applicable}
            for entry in report.entries]
    names = ["domain", "p", "n", "mu1", "bound", "value", "ratio", "applicable"]
    return rows, False, names


def _cmd_verify_rhombus(args):
    ms = _parse_list(args.m, int)
    if not ms:
        raise ParameterError("verify-rhombus needs at least one --m value")
    rows = []
    for m in ms:
        sharp = bounds.rhombus_sharpness(m, level=args.level)
        sandwich = bounds.sector_sandwich(m, level=args.level)
        rows.append({
            "m": m, "level": args.level, "mu1": sharp.mu1,
            "scaled_ball_value": sharp.scaled_ball_value, "r_m": sharp.ratio,
            "dn_value": sandwich.value, "dn_lower": sandwich.lower,
            "dn_upper": sandwich.upper, "dn_ok": sandwich.ok,
        })
    names = ["m", "level", "mu1", "scaled_ball_value", "r_m",
             "dn_value", "dn_lower", "dn_upper", "dn_ok"]
    return rows, False, names


def _cmd_chiti(args):
    _require_p2(args.p)
    spec = _spec_from_args(args)
    pair, profile = _eigen_pipeline(spec, args.level)
    K = bounds.kn_lookup(spec).value
    ball = rearrangement.dirichlet_ball_profile(2.0, 2, K, pair.value)
    report = rearrangement.chiti_check(profile, ball, args.q)
    row = {
        "domain": spec.label, "p": args.p, "q": args.q, "r": None,
        "lhs": report.lhs, "rhs": report.rhs,
        "max_violation": report.max_violation, "mesh_level": args.level,
        "s_at_max": report.s_at_max, "comparison_measure": report.L,
        "positive_measure": report.s_tilde,
        "lemma_violated": report.lemma_violated,
    }
    return [row], True, list(row.keys())


def _cmd_rholder(args):
    _require_p2(args.p)
    if not (0.0 < args.r < args.q):
        raise ParameterError(f"need 0 < r < q, got r={args.r}, q={args.q}")
    spec = _spec_from_args(args)
    pair, profile = _eigen_pipeline(spec, args.level)
    K = bounds.kn_lookup(spec).value
    report = rearrangement.reverse_holder_check(profile, 2.0, 2, K, pair.value,
                                                q=args.q, r=args.r)
    row = {
        "domain": spec.label, "p": args.p, "q": args.q, "r": args.r,
        "lhs": report.lhs, "rhs": report.rhs,
        "max_violation": max(0.0, report.lhs - report.rhs),
        "mesh_level": args.level,
        "constant": report.constant, "ok": report.ok,
    }
    return [row], True, list(row.keys())


def _cmd_sturm(args):
    problem = sturm1d.SturmProblem(gamma=args.gamma, beta=args.beta,
                                   length=args.A, n_cells=args.N)
    solution = sturm1d.solve(problem)
    row = {
        "gamma": args.gamma, "beta": args.beta, "a": args.A, "n_cells": args.N,
        "sigma1": solution.sigma,
        "hardy_lower_bound": solution.hardy_lower_bound,
        "iterations": solution.iterations,
    }
    return [row], True, list(row.keys())


_HANDLERS = {
    "psi": _cmd_psi,
    "bound": _cmd_bound,
    "compare-bounds": _cmd_compare_bounds,
    "verify-rhombus": _cmd_verify_rhombus,
    "chiti": _cmd_chiti,
    "rholder": _cmd_rholder,
    "sturm": _cmd_sturm,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="spectral-bounds",
        description="Verification pipelines for Neumann eigenvalue lower bounds.")
    subs = parser.add_subparsers(dest="command", required=True)

    sub = subs.add_parser("psi", help="first zeros of the radial profiles")
    sub.add_argument("--p", default="2", help="comma-separated exponents")
    sub.add_argument("--n", default="2", help="comma-separated dimensions")
    _add_output_flags(sub, "csv")

    sub = subs.add_parser("bound", help="closed-form lower bounds, no FEM")
    _add_domain_flags(sub)
    sub.add_argument("--p", type=float, default=2.0)
    _add_output_flags(sub, "json")

    sub = subs.add_parser("compare-bounds",
                          help="all bounds against the FEM eigenvalue")
    _add_domain_flags(sub)
    sub.add_argument("--p", type=float, default=2.0)
    sub.add_argument("--level", type=int, default=5)
    _add_output_flags(sub, "json")

    sub = subs.add_parser("verify-rhombus",
                          help="sharpness ratio table for degenerating rhombi")
    sub.add_argument("--m", default="8,16,32,64",
                     help="comma-separated angle parameters")
    sub.add_argument("--level", type=int, default=5)
    _add_output_flags(sub, "json")

    sub = subs.add_parser("chiti", help="cumulative-power domination check")
    _add_domain_flags(sub)
    sub.add_argument("--p", type=float, default=2.0)
    sub.add_argument("--q", type=float, default=2.0)
    sub.add_argument("--level", type=int, default=5)
    _add_output_flags(sub, "json")

    sub = subs.add_parser("rholder", help="reverse Holder norm check")
    _add_domain_flags(sub)
    sub.add_argument("--p", type=float, default=2.0)
    sub.add_argument("--q", type=float, default=2.0)
    sub.add_argument("--r", type=float, default=1.0)
    sub.add_argument("--level", type=int, default=5)
    _add_output_flags(sub, "json")

    sub = subs.add_parser("sturm", help="singular Sturm-Liouville eigenvalue")
    sub.add_argument("--gamma", type=float, required=True)
    sub.add_argument("--beta", type=float, required=True)
    sub.add_argument("--A", type=float, required=True, help="interval length")
    sub.add_argument("--N", type=int, default=4096, help="cell count")
    _add_output_flags(sub, "json")

    sub = subs.add_parser("suite", help="run one subcommand per file line")
    sub.add_argument("path", help="suite file; blank lines and # comments skipped")

    return parser


def dispatch(argv, out=None, err=None) -> int:
    """Parse argv, run one subcommand, write its table, return the exit code."""
    stream = out if out is not None else sys.stdout
    errstream = err if err is not None else sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as ex:
        code = ex.code
        return code if isinstance(code, int) else (0 if code is None else 2)
    if args.command == "suite":
        return run_suite(args.path, out=stream)
    try:
        rows, single, fieldnames = _HANDLERS[args.command](args)
        text = emit_table(rows, args.format, fieldnames=fieldnames, single=single)
    except ParameterError as ex:
        print(f"error: {ex}", file=errstream)
        return 2
    except NumericError as ex:
        print(f"numeric failure: {ex}", file=errstream)
        return 1
    if args.out_path:
        Path(args.out_path).write_text(text, encoding="utf-8")
    else:
        stream.write(text)
    return 0


def run_suite(path: str, out=None) -> int:
    """Run every non-blank, non-comment line of a suite file as an invocation.

    Lines run concurrently on a thread pool (SPECTRAL_BOUNDS_THREADS caps the
    width, machine cores by default) but output is buffered per line and
    written strictly in file order, one status comment per line. Nested
    suite lines are rejected. Exit 1 if any line fails, 2 if the file cannot
    be read, 0 otherwise.
    """
    stream = out if out is not None else sys.stdout
    try:
        content = Path(path).read_text(encoding="utf-8")
    except OSError as ex:
        print(f"cannot read suite file: {ex}", file=sys.stderr)
        return 2
    runs = []
    for lineno, raw in enumerate(content.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        try:
            argv = shlex.split(line)
        except ValueError as ex:
            print(f"cannot parse suite line {lineno}: {ex}", file=sys.stderr)
            return 2
        runs.append((lineno, argv))
    if not runs:
        print("# suite: 0 runs, 0 failures", file=stream)
        return 0

    def one(argv):
        if argv and argv[0] == "suite":
            return 2, "", "nested suite lines are not allowed\n"
        buffer = io.StringIO()
        errbuffer = io.StringIO()
        try:
            code = dispatch(argv, out=buffer, err=errbuffer)
        except SystemExit as ex:
            code = ex.code if isinstance(ex.code, int) else 2
        return code, buffer.getvalue(), errbuffer.getvalue()

    env_threads = os.environ.get("SPECTRAL_BOUNDS_THREADS", "")
    workers = int(env_threads) if env_threads else (os.cpu_count() or 1)
    workers = max(1, min(workers, len(runs)))
    with ThreadPoolExecutor(max_workers=workers) as pool:
        results = list(pool.map(one, [argv for _, argv in runs]))

    failures = 0
    for (lineno, argv), (code, text, errtext) in zip(runs, results):
        if text:
            stream.write(text if text.endswith("\n") else text + "\n")
        if code != 0:
            failures += 1
            detail = errtext.strip().splitlines()
            suffix = f": {detail[-1]}" if detail else ""
            print(f"# line {lineno} fail({code}): {shlex.join(argv)}{suffix}",
                  file=stream)
        else:
            print(f"# line {lineno} ok: {shlex.join(argv)}", file=stream)
    print(f"# suite: {len(runs)} runs, {failures} failures", file=stream)
    return 1 if failures else 0


def entry() -> None:
    sys.exit(dispatch(sys.argv[1:]))


if __name__ == "__main__":
    entry()
