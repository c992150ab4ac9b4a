"""Command-line front end: matrix file formats, subcommands, and reports.

Matrix files are JSON ``{"rows": n, "cols": m, "entries": [[re, im], ...]}``
(row-major) or CSV of ``a+bj`` tokens.  Reports are deterministic JSON given
identical inputs, seed, and tool version; every error exit carries a
machine-readable ``violated`` field.  Exit codes: 0 ok, 2 usage/parse,
3 invalid structure, 4 mathematical precondition failure.
"""

from __future__ import annotations

import argparse
import hashlib
import io
import json
import os
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .errors import KreinLabError, ParseError
from .families import analyze_regular_family, sum_normal_family, sum_qpr_family
from .harness import DEFAULT_SIZES, Scenario, list_scenarios, run_scenario
from .krein import KreinSpace, Subspace, check_qpr_criterion, classify, decompose_qpr
from .num_core import TolerancePolicy, as_matrix
from .projections import (
    ProjectionOp,
    normal_projection,
    oblique_projection,
    selfadjoint_projection,
)
from .verify import SUITES, run_suite

TOL_ENV = "KREINLAB_TOL"


# ---------------------------------------------------------------------------
# matrix file formats


def _format_complex(z: complex) -> str:
    return f"{z.real:.17g}{z.imag:+.17g}j"


def matrix_to_json(m) -> dict:
    m = as_matrix(m)
    return {
        "rows": m.shape[0],
        "cols": m.shape[1],
        "entries": [[float(z.real), float(z.imag)] for z in m.ravel()],
    }


def matrix_from_json(doc) -> np.ndarray:
    try:
        rows, cols = int(doc["rows"]), int(doc["cols"])
        entries = doc["entries"]
    except (KeyError, TypeError, ValueError) as exc:
        raise ParseError(f"malformed matrix document: {exc}") from exc
    if len(entries) != rows * cols:
        raise ParseError(
            f"entry count {len(entries)} does not equal rows*cols = {rows * cols}"
        )
    flat = np.empty(rows * cols, dtype=complex)
    for i, item in enumerate(entries):
        if isinstance(item, (list, tuple)) and len(item) == 2:
            flat[i] = complex(float(item[0]), float(item[1]))
        else:
            raise ParseError(f"entry {i} is not an [re, im] pair")
    return flat.reshape(rows, cols)


def matrix_from_csv(text: str) -> np.ndarray:
    rows = []
    for lineno, line in enumerate(text.strip().splitlines(), 1):
        if not line.strip():
            continue
        try:
            rows.append([complex(tok.strip()) for tok in line.split(",")])
        except ValueError as exc:
            raise ParseError(f"bad complex token on line {lineno}: {exc}") from exc
    if not rows:
        raise ParseError("empty CSV matrix")
    width = len(rows[0])
    if any(len(r) != width for r in rows):
        raise ParseError("ragged CSV matrix")
    return np.array(rows, dtype=complex)


def matrix_to_csv(m) -> str:
    m = as_matrix(m)
    return "\n".join(",".join(_format_complex(z) for z in row) for row in m) + "\n"


def load_matrix(path: str) -> np.ndarray:
    p = Path(path)
    try:
        text = p.read_text(encoding="utf-8")
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc}") from exc
    if p.suffix.lower() == ".csv":
        return matrix_from_csv(text)
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        if p.suffix.lower() == ".json":
            raise ParseError(f"{path}: {exc}") from exc
        return matrix_from_csv(text)
    return matrix_from_json(doc)


def _digest(paths) -> str:
    h = hashlib.sha256()
    for path in paths:
        h.update(Path(path).read_bytes())
    return h.hexdigest()


# ---------------------------------------------------------------------------
# report plumbing


def _tolerance() -> TolerancePolicy:
    raw = os.environ.get(TOL_ENV)
    if raw is None:
        return TolerancePolicy()
    try:
        return TolerancePolicy(relative_eps=float(raw))
    except (TypeError, ValueError) as exc:
        raise ParseError(f"bad {TOL_ENV} value {raw!r}") from exc


def _report(command: str, inputs, results: dict, seed=None, flags=None) -> dict:
    return {
        "command": command,
        "version": __version__,
        "inputs_digest": _digest(inputs) if inputs else "",
        "tolerance": _tolerance().relative_eps,
        "seed": seed,
        "flags": flags or {},
        "results": results,
    }


def _emit(report: dict, out: str | None, fmt: str = "json", csv_text: str | None = None):
    if fmt == "csv" and csv_text is not None:
        payload = csv_text
    else:
        payload = json.dumps(report, sort_keys=True, indent=2) + "\n"
    if out:
        Path(out).write_text(payload, encoding="utf-8")
    else:
        sys.stdout.write(payload)


def _projection_results(p: ProjectionOp) -> dict:
    return {
        "matrix": matrix_to_json(p.matrix),
        "rank": p.rank,
        "norm": p.norm(),
        "flags": p.flags,
    }


def _load_space(path: str, tol: TolerancePolicy) -> KreinSpace:
    return KreinSpace(load_matrix(path), tol=tol)


def _load_subspace(space: KreinSpace, path: str) -> Subspace:
    return Subspace.from_span(space, load_matrix(path))


# ---------------------------------------------------------------------------
# subcommands


def cmd_classify(args) -> int:
    tol = _tolerance()
    space = _load_space(args.space, tol)
    s = _load_subspace(space, args.subspace)
    cls = classify(s)
    dec = decompose_qpr(s)
    crit = check_qpr_criterion(s)
    results = {
        "classification": cls.as_dict(),
        "subspace_dim": s.dim,
        "regular_part": matrix_to_json(dec.R.basis),
        "isotropic_part": matrix_to_json(dec.N.basis),
        "adapted_symmetry": matrix_to_json(dec.adapted_J),
        "sum_with_companion_margin": crit.sum_with_companion_margin,
        "is_qpr": crit.is_qpr,
    }
    _emit(_report("classify", [args.space, args.subspace], results), args.out)
    return 0


def cmd_project(args) -> int:
    tol = _tolerance()
    space = _load_space(args.space, tol)
    s = _load_subspace(space, args.subspace)
    if args.mode == "selfadjoint":
        p = selfadjoint_projection(s)
    elif args.mode == "normal":
        p = normal_projection(s)
    else:
        if not args.kernel:
            raise ParseError("--mode oblique requires --kernel")
        kernel = _load_subspace(space, args.kernel)
        p = oblique_projection(s, kernel)
    inputs = [args.space, args.subspace] + ([args.kernel] if args.kernel else [])
    _emit(_report("project", inputs, _projection_results(p), flags=p.flags), args.out)
    return 0


def _family_files(directory: str, prefix: str | None = None):
    d = Path(directory)
    if not d.is_dir():
        raise ParseError(f"{directory} is not a directory")
    names = sorted(
        p
        for p in d.iterdir()
        if p.suffix.lower() in (".json", ".csv")
        and (prefix is None or p.name.upper().startswith(prefix))
    )
    if not names:
        raise ParseError(f"no matrix files in {directory}" + (f" with prefix {prefix}" if prefix else ""))
    return names


def cmd_family(args) -> int:
    tol = _tolerance()
    space = _load_space(args.space, tol)
    inputs = [args.space]
    if args.kind == "qpr":
        e_files = _family_files(args.family_dir, "E")
        t_files = _family_files(args.family_dir, "T")
        inputs += [str(p) for p in e_files + t_files]
        es = [ProjectionOp.from_matrix(space, load_matrix(p)) for p in e_files]
        ts = [load_matrix(p) for p in t_files]
        res = sum_qpr_family(es, ts, subset_budget=args.budget, seed=args.seed)
        results = {
            "C": res.C,
            "dim_sum": res.M_basis.shape[1],
            "sum_basis": matrix_to_json(res.M_basis),
            "neutral_dim": res.N_basis.shape[1],
            "containment_ok": res.containment_ok,
            "max_span_residual": res.max_span_residual,
            "projection": _projection_results(res.P),
            "row_bound_exact": res.T_row.subset_exact,
        }
    else:
        files = _family_files(args.family_dir)
        inputs += [str(p) for p in files]
        members = [ProjectionOp.from_matrix(space, load_matrix(p)) for p in files]
        if args.kind == "regular":
            rep = analyze_regular_family(members, subset_budget=args.budget, seed=args.seed)
            results = {
                "C": rep.C,
                "C_exact": rep.C_exact,
                "C1": rep.C1,
                "C2": rep.C2,
                "span_regular": rep.span_regular,
                "span_margin": rep.span_margin,
                "condition_flags": rep.condition_flags,
                "projection": _projection_results(rep.P_sum) if rep.P_sum else None,
            }
        else:
            q = sum_normal_family(members)
            results = {"projection": _projection_results(q), "members": len(members)}
    _emit(_report("family", inputs, results, seed=args.seed), args.out)
    return 0


def _series_csv(series) -> str:
    cols = series.columns
    buf = io.StringIO()
    buf.write(",".join(cols) + "\n")
    for row in series.rows:
        buf.write(",".join(f"{float(row[c]):.17g}" for c in cols) + "\n")
    return buf.getvalue()


def cmd_scenario(args) -> int:
    if args.list:
        results = {
            "scenarios": [
                {"name": n, "description": d, "detail": detail}
                for n, d, detail in list_scenarios()
            ]
        }
        _emit(_report("scenario", [], results), None)
        return 0
    if not args.name:
        raise ParseError("scenario name required (or use --list)")
    sizes = DEFAULT_SIZES
    if args.sizes:
        try:
            sizes = [int(tok) for tok in args.sizes.split(",") if tok.strip()]
        except ValueError as exc:
            raise ParseError(f"bad --sizes value: {exc}") from exc
    scenario = Scenario(name=args.name, sizes=tuple(sizes))
    series = run_scenario(scenario, seed=args.seed)
    results = {
        "scenario": series.scenario,
        "sizes": list(scenario.sizes),
        "rows": series.rows,
        "verdict": series.verdict,
    }
    fmt, out = _resolve_out(args.out)
    _emit(
        _report("scenario", [], results, seed=args.seed),
        out,
        fmt=fmt,
        csv_text=_series_csv(series),
    )
    return 0


def _resolve_out(raw: str | None):
    """--out accepts 'json', 'csv', or a destination path."""
    if raw is None:
        return "json", None
    if raw in ("json", "csv"):
        return raw, None
    return ("csv" if raw.lower().endswith(".csv") else "json"), raw


def cmd_verify(args) -> int:
    if args.trials <= 0:
        raise ParseError("--trials must be positive")
    report = run_suite(args.suite, seed=args.seed, trials=args.trials)
    _emit(_report("verify", [], report, seed=args.seed), args.out)
    return 0 if report["passed"] else 1


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="kreinlab",
        description="Finite-dimensional Krein space toolkit: classification, projections, family sums, truncation ladders.",
    )
    ap.add_argument("--version", action="version", version=f"kreinlab {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("classify", help="classify a subspace and decompose it")
    p.add_argument("space", help="matrix file with the fundamental symmetry J")
    p.add_argument("subspace", help="matrix file whose columns span the subspace")
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("project", help="build a projection onto a subspace")
    p.add_argument("space")
    p.add_argument("subspace")
    p.add_argument("--mode", choices=["selfadjoint", "normal", "oblique"], default="selfadjoint")
    p.add_argument("--kernel", default=None, help="kernel span file (oblique mode)")
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_project)

    p = sub.add_parser("family", help="analyze a family of projections / operators")
    p.add_argument("space")
    p.add_argument("family_dir", help="directory of matrix files (E*/T* prefixes for qpr)")
    p.add_argument("--kind", choices=["regular", "normal", "qpr"], default="regular")
    p.add_argument("--budget", type=int, default=15)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_family)

    p = sub.add_parser("scenario", help="run a truncation-ladder scenario")
    p.add_argument("name", nargs="?", default=None)
    p.add_argument("--sizes", default=None, help="comma-separated ladder sizes")
    p.add_argument("--out", default=None, help="json, csv, or an output path")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--list", action="store_true", help="list registered scenarios")
    p.set_defaults(func=cmd_scenario)

    p = sub.add_parser("verify", help="run randomized property suites")
    p.add_argument("--suite", choices=list(SUITES), default="all")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--trials", type=int, default=200)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_verify)
    return ap


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code not in (0, None) else 0
    try:
        return args.func(args)
    except KreinLabError as exc:
        payload = {
            "command": args.command,
            "version": __version__,
            "error": str(exc),
            "violated": exc.violated,
        }
        sys.stdout.write(json.dumps(payload, sort_keys=True, indent=2) + "\n")
        return exc.exit_code


if __name__ == "__main__":
    raise SystemExit(main())
