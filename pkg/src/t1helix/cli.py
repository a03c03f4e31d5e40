"""Command-line front end: ``t1helix {verify, curve, classify, sweep}``.

Exit codes: 0 all checks pass, 1 a check fails (or analysis raises), 2 the
configuration or command line is invalid.
"""

from __future__ import annotations

import argparse
import csv
import io
import itertools
import json
import math
import sys

import numpy as np

from .config import ConfigError, RunConfig, load_config
from .curves import build_sample, causal_character
from .errors import T1HelixError
from .gnat import (MetricParams, StructureClass, signature_case, structure_class, t1_signature)
from .helix import analyze, slant_closed_form, theorem_admissibility
from .suites import SUITES, run_suite, thread_count

EXIT_OK, EXIT_FAIL, EXIT_CONFIG = 0, 1, 2
BASES = {"riemannian": (2, 0), "lorentzian": (1, 1)}


def _num(v) -> str:
    return format(float(v), ".17g")


def _clean(obj):
    """JSON-safe copy: NaN and infinities become null, numpy scalars become floats."""
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        return float(obj) if math.isfinite(obj) else None
    return obj


def _dump_json(obj, out) -> None:
    out.write(json.dumps(_clean(obj), indent=2, sort_keys=True, allow_nan=False))
    out.write("\n")


def _table(rows: list[list[str]], out) -> None:
    widths = [max(len(r[i]) for r in rows) for i in range(len(rows[0]))]
    for r in rows:
        out.write("  ".join(c.ljust(w) for c, w in zip(r, widths)).rstrip() + "\n")


def _load(path: str | None) -> RunConfig:
    return load_config(path) if path else RunConfig()


# -- verify -----------------------------------------------------------------------------------


def cmd_verify(args, out) -> int:
    result = run_suite(args.suite, args.tol_scale, args.seed, thread_count())
    if args.json:
        _dump_json(result.to_json(timing=args.timing), out)
    else:
        rows = [["check", "status", "residual", "tol", "runtime_s"]]
        for c in result.checks:
            rows.append([c.name, "PASS" if c.passed else "FAIL", f"{c.residual:.3e}",
                         "-" if c.tol is None else f"{c.tol:.1e}", f"{c.runtime:.3f}"])
        _table(rows, out)
        for c in result.checks:
            if c.error:
                out.write(f"{c.name}: {c.error}\n")
        n = sum(c.passed for c in result.checks)
        out.write(f"{args.suite}: {n}/{len(result.checks)} checks passed\n")
    return result.exit_code


# -- curve ------------------------------------------------------------------------------------


def _require_spec(cfg: RunConfig):
    if cfg.spec is None:
        raise ConfigError(f"{cfg.path or '<config>'}: no [curve] section")
    return cfg.spec


def curve_table(cfg: RunConfig, embed: bool = False) -> tuple[list[str], np.ndarray]:
    spec = _require_spec(cfg)
    sample = build_sample(spec, cfg.params)
    p = sample.params
    cols = [sample.t, sample.x[:, 0], sample.x[:, 1]]
    header = ["t", "x0", "x1"]
    if embed:
        E = spec.surface.embed(sample.x)
        cols += [E[:, 0], E[:, 1], E[:, 2]]
        header += ["e0", "e1", "e2"]
    cols += [sample.V[:, 0], sample.V[:, 1], causal_character(p, sample).astype(float),
             sample.sigma, slant_closed_form(p, sample)]
    header += ["V0", "V1", "eps_lambda", "sigma", "theta"]
    return header, np.column_stack(cols)


def write_csv(header, data, out) -> None:
    out.write(",".join(header) + "\n")
    for row in data:
        out.write(",".join(_num(v) for v in row) + "\n")


def cmd_curve(args, out) -> int:
    cfg = _load(args.spec or args.config)
    header, data = curve_table(cfg, args.embed)
    if args.out and args.out != "-":
        with open(args.out, "w", encoding="utf-8", newline="\n") as fh:
            write_csv(header, data, fh)
    else:
        write_csv(header, data, out)
    return EXIT_OK


# -- classify ---------------------------------------------------------------------------------


def classify_config(cfg: RunConfig, tol_scale: float = 1.0) -> dict:
    spec = _require_spec(cfg)
    sample = build_sample(spec, cfg.params)
    tol = cfg.tol.scaled(tol_scale)
    report = analyze(sample.params, sample, tol.constancy, tol.match)
    body = report.to_json()
    body["curve"] = spec.name
    body["params"] = sample.params.as_dict()
    body["surface"] = {"kind": spec.surface.kind.value, "curvature": spec.surface.gauss_curvature}
    return body


def cmd_classify(args, out) -> int:
    cfg = _load(args.spec or args.config)
    body = classify_config(cfg, args.tol_scale)
    if args.json:
        _dump_json(body, out)
        return EXIT_OK
    th = body["theta"]
    rows = [["field", "value"],
            ["curve", body["curve"]],
            ["family", body["family"]],
            ["causal", str(body["causal"])],
            ["torsion", body["torsion"]],
            ["helix", str(body["helix"])],
            ["theta", f"{th['mean']:.12g}"],
            ["matched_theorem", body["matched_theorem"]],
            ["constants_match", str(body["constants_match"])]]
    for k in sorted(body["measured"]):
        rows.append([f"measured.{k}", f"{body['measured'][k]:.12g}"])
    for k in sorted(body["predicted"]):
        rows.append([f"predicted.{k}", f"{body['predicted'][k]:.12g}"])
    for c in body["checks"]:
        rows.append([f"check.{c['name']}", f"{'PASS' if c['pass'] else 'FAIL'} {c['residual']:.3e}"])
    _table(rows, out)
    for note in body["notes"]:
        out.write(f"note: {note}\n")
    return EXIT_OK


# -- sweep ------------------------------------------------------------------------------------


def _grid(raw: str, what: str) -> list[float]:
    try:
        vals = [float(v) for v in raw.replace(" ", ",").split(",") if v]
    except ValueError:
        raise ConfigError(f"--{what}: expected comma-separated numbers, got {raw!r}") from None
    if not vals or not all(math.isfinite(v) for v in vals):
        raise ConfigError(f"--{what}: need at least one finite value")
    return vals


def sweep_rows(a, c, d, kappa, bases) -> list[dict]:
    rows = []
    for av, cv, dv, kv, base in itertools.product(a, c, d, kappa, bases):
        p = MetricParams(av, cv, dv)
        row = {"a": av, "c": cv, "d": dv, "kappa": kv, "base": base,
               "alpha": p.alpha, "phi": p.phi, "nondegenerate": p.nondegenerate,
               "kaluza_klein": dv == 0}
        if p.nondegenerate:
            sig = t1_signature(p, BASES[base])
            case, _ = signature_case(p, BASES[base])
            cls = structure_class(p)
            kc = None
            if cls is not StructureClass.NEITHER:
                kc = math.isclose(kv, p.alpha / p.a**2, rel_tol=1e-12, abs_tol=1e-14)
            row.update(epsilon=p.eps, signature=f"({sig[0]},{sig[1]})", signature_case=case,
                       structure_class=cls.value, k_contact=kc)
            row.update({f"{k}_admissible": v for k, v in theorem_admissibility(p).items()})
        rows.append(row)
    return rows


SWEEP_COLUMNS = ["a", "c", "d", "kappa", "base", "alpha", "phi", "nondegenerate", "epsilon",
                 "signature", "signature_case", "structure_class", "k_contact", "kaluza_klein",
                 "Geod_admissible", "Hor0_admissible", "HorT_admissible", "Obl0_admissible",
                 "OblT_admissible", "NullHor_admissible", "NullObl_admissible"]


def _cell(v) -> str:
    if v is None:
        return ""
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return _num(v)
    return str(v)


def cmd_sweep(args, out) -> int:
    cfg = _load(args.config)
    src = {k: cfg.get("sweep", k) for k in ("a", "c", "d", "curvature", "base")}
    a = _grid(args.a or src["a"] or "1", "a")
    c = _grid(args.c or src["c"] or "0", "c")
    d = _grid(args.d or src["d"] or "0", "d")
    kappa = _grid(args.kappa or src["curvature"] or "1", "kappa")
    base = args.base or src["base"] or "riemannian"
    bases = list(BASES) if base == "both" else [base]
    if any(b not in BASES for b in bases):
        raise ConfigError(f"base must be riemannian, lorentzian or both, got {base!r}")
    rows = sweep_rows(a, c, d, kappa, bases)
    if args.json:
        _dump_json({"rows": rows}, out)
    elif args.format == "csv":
        # signatures such as "(2,1)" contain commas, so quote where needed
        w = csv.writer(out, lineterminator="\n")
        w.writerow(SWEEP_COLUMNS)
        for r in rows:
            w.writerow([_cell(r.get(k)) for k in SWEEP_COLUMNS])
    else:
        cols = ["a", "c", "d", "kappa", "base", "signature", "structure_class", "k_contact",
                "kaluza_klein", "HorT_admissible", "Obl0_admissible"]
        table = [cols] + [[_cell(r.get(k)) if not isinstance(r.get(k), float) else f"{r[k]:g}"
                           for k in cols] for r in rows]
        _table(table, out)
    return EXIT_OK


# -- entry point ------------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", default=argparse.SUPPRESS, help="INI-style run configuration")
    common.add_argument("--json", action="store_true", default=argparse.SUPPRESS,
                        help="machine-readable output")
    common.add_argument("--tol-scale", type=float, default=argparse.SUPPRESS,
                        help="multiply every tolerance by this factor")

    parser = argparse.ArgumentParser(prog="t1helix", parents=[common],
                                     description="Helices on unit tangent bundles of surfaces.")
    sub = parser.add_subparsers(dest="command", required=True)

    v = sub.add_parser("verify", parents=[common], help="run a verification suite")
    v.add_argument("--suite", default="all", choices=("all",) + SUITES)
    v.add_argument("--seed", type=int, default=0, help="seed for randomized checks")
    v.add_argument("--timing", action="store_true", help="include runtimes in JSON output")
    v.set_defaults(func=cmd_verify)

    c = sub.add_parser("curve", parents=[common], help="sample a curve and write CSV")
    c.add_argument("--spec", help="curve spec file")
    c.add_argument("--out", help="output CSV path (default: stdout)")
    c.add_argument("--embed", action="store_true", help="add ambient embedding columns e0, e1, e2")
    c.set_defaults(func=cmd_curve)

    k = sub.add_parser("classify", parents=[common], help="classify a curve")
    k.add_argument("--spec", help="curve spec file")
    k.set_defaults(func=cmd_classify)

    s = sub.add_parser("sweep", parents=[common], help="parameter sweep over a, c, d and curvature")
    s.add_argument("--a", help="comma-separated values of a")
    s.add_argument("--c", help="comma-separated values of c")
    s.add_argument("--d", help="comma-separated values of d")
    s.add_argument("--kappa", help="comma-separated base curvatures")
    s.add_argument("--base", choices=("riemannian", "lorentzian", "both"))
    s.add_argument("--format", choices=("table", "csv"), default="table")
    s.set_defaults(func=cmd_sweep)
    return parser


def main(argv=None, out=None) -> int:
    out = sys.stdout if out is None else out
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_CONFIG if exc.code else EXIT_OK
    for name, default in (("config", None), ("json", False), ("tol_scale", 1.0)):
        if not hasattr(args, name):
            setattr(args, name, default)
    if not (math.isfinite(args.tol_scale) and args.tol_scale > 0):
        sys.stderr.write("t1helix: error: --tol-scale must be positive\n")
        return EXIT_CONFIG
    try:
        return args.func(args, out)
    except ConfigError as exc:
        sys.stderr.write(f"t1helix: config error: {exc}\n")
        return EXIT_CONFIG
    except (T1HelixError, ValueError) as exc:
        sys.stderr.write(f"t1helix: error: {type(exc).__name__}: {exc}\n")
        return EXIT_FAIL
    except BrokenPipeError:
        sys.stderr.close()
        return EXIT_OK


def run(argv) -> tuple[int, str]:
    """Run the CLI in-process and capture stdout."""
    buf = io.StringIO()
    code = main(argv, buf)
    return code, buf.getvalue()


if __name__ == "__main__":
    sys.exit(main())
