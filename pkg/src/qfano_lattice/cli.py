"""Command-line interface.

Exit statuses: 0 pass, 1 verification failure, 2 config/parse error,
3 internal invariant breach.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import sys
from fractions import Fraction
from pathlib import Path

from .errors import ConfigError, LatticeError, ParityViolation
from .lattice import ExactMatrix, smith_normal_form
from .models import WeilClass, weil_to_blowup_coords
from .pipeline import SCHEMA_VERSION, build_standard_scenario, load_config, run_scenario, sweep_configs
from .degeneration import compatibility_kernel

EXIT_OK, EXIT_FAIL, EXIT_CONFIG, EXIT_INTERNAL = 0, 1, 2, 3

SWEEP_FIELDS = ["h3", "N", "r", "d", "pairing", "determinant", "unimodular", "HX3", "closed_form", "a", "passed"]


def _write_json(path, payload):
    Path(path).write_text(json.dumps(payload, indent=2) + "\n", encoding="utf-8")


def cmd_run(args) -> int:
    cfg = load_config(args.config)
    report = run_scenario(cfg)
    print(report.render_text())
    if args.json:
        _write_json(args.json, report.to_dict())
    if args.figure and report.cube_contributions and report.invariants is not None:
        from .plotting import plot_cube_contributions

        plot_cube_contributions(report.cube_contributions, report.invariants.HX3, args.figure,
                                title=f"{cfg.name}: H^3 by component")
    return report.exit_status


def _sweep_row(report) -> dict:
    sc, m = report.scenario, report.metrics
    return {
        "h3": sc["h3"],
        "N": sc["N"],
        "r": sc["r"],
        "d": m.get("d"),
        "pairing": m.get("pairing"),
        "determinant": m.get("determinant"),
        "unimodular": m.get("unimodular"),
        "HX3": m.get("HX3"),
        "closed_form": str(2 * Fraction(sc["h3"])),
        "a": m.get("a"),
        "passed": report.passed,
    }


def cmd_sweep(args) -> int:
    rows, reports = [], []
    for cfg in sweep_configs(args.h3_max, args.n_max, tuple(args.r)):
        report = run_scenario(cfg)
        reports.append(report)
        rows.append(_sweep_row(report))
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=SWEEP_FIELDS, lineterminator="\n")
    writer.writeheader()
    writer.writerows(rows)
    if args.csv:
        Path(args.csv).write_text(buf.getvalue(), encoding="utf-8")
    else:
        sys.stdout.write(buf.getvalue())
    if args.json:
        _write_json(args.json, {"schemaVersion": SCHEMA_VERSION, "rows": rows,
                                "reports": [r.to_dict() for r in reports]})
    if args.figure:
        from .plotting import plot_sweep

        plot_sweep(rows, args.figure)
    failed = sum(not r["passed"] for r in rows)
    print(f"# {len(rows) - failed}/{len(rows)} scenarios passed", file=sys.stderr)
    if any(r.internal_error for r in reports):
        return EXIT_INTERNAL
    return EXIT_OK if not failed else EXIT_FAIL


def cmd_kernel(args) -> int:
    cfg = load_config(args.config)
    ps = build_standard_scenario(cfg.scenario, cfg.d_override, cfg.b_scale)
    kern = compatibility_kernel(ps.fiber, args.q)
    labels = ps.fiber.labels(args.q)
    print(f"G^{args.q}(W0): rank {kern.lattice.rank} inside Z^{len(labels)}")
    print("coordinates: " + " ".join(labels))
    for name, g in zip(kern.lattice.labels, kern.basis):
        print(f"{name}: " + " ".join(str(x) for x in g.flat()))
    if args.json:
        _write_json(args.json, {"schemaVersion": SCHEMA_VERSION, "degree": args.q, "labels": list(labels),
                                "basis": [list(g.flat()) for g in kern.basis]})
    return EXIT_OK


def cmd_coords(args) -> int:
    try:
        k = int(args.k)
        mult = tuple(int(x) for x in args.mult.split(",") if x.strip())
    except ValueError as exc:
        raise ConfigError(f"cannot parse coordinates: {exc}") from exc
    try:
        coords = weil_to_blowup_coords(WeilClass(k, mult))
    except ParityViolation as exc:
        print(f"ParityViolation: {exc}")
        return EXIT_FAIL
    k0, *cs = coords
    expr = f"{k0}*B0" + "".join(f" {'-' if c < 0 else '+'} {abs(c)}*e{i}" for i, c in enumerate(cs, 1) if c)
    print(f"({k0}; {', '.join(str(c) for c in cs)})    = {expr}")
    return EXIT_OK


def read_matrix_file(path) -> ExactMatrix:
    """Plain text, one row per line, whitespace-separated integers."""
    try:
        lines = Path(path).read_text(encoding="utf-8").splitlines()
    except OSError as exc:
        raise ConfigError(f"cannot read matrix file {path}: {exc}") from exc
    rows = []
    for n, line in enumerate(lines, 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        try:
            rows.append([int(x) for x in line.split()])
        except ValueError as exc:
            raise ConfigError(f"{path}:{n}: not an integer row") from exc
    if not rows:
        raise ConfigError(f"{path}: no matrix rows")
    if len({len(r) for r in rows}) != 1:
        raise ConfigError(f"{path}: rows have different lengths")
    return ExactMatrix.from_rows(rows)


def _fmt(m: ExactMatrix) -> str:
    return "\n".join("  " + " ".join(f"{int(x):>4d}" for x in r) for r in m.entries) or "  (empty)"


def cmd_snf(args) -> int:
    a = read_matrix_file(args.matrix_file)
    dec = smith_normal_form(a)
    print(f"elementary divisors: {list(dec.elementary_divisors)}  (rank {dec.rank})")
    print("S =\n" + _fmt(dec.S))
    print("U =\n" + _fmt(dec.U))
    print("V =\n" + _fmt(dec.V))
    if args.json:
        _write_json(args.json, {
            "schemaVersion": SCHEMA_VERSION,
            "diagonal": list(dec.diagonal),
            "S": [[int(x) for x in r] for r in dec.S.entries],
            "U": [[int(x) for x in r] for r in dec.U.entries],
            "V": [[int(x) for x in r] for r in dec.V.entries],
        })
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="qfano-lattice", description=__doc__.splitlines()[0])
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="full verification run for one scenario config")
    run.add_argument("config", help="JSON config path or bundled name (e.g. takagi-4-4)")
    run.add_argument("--json", metavar="PATH", help="write the machine-readable report")
    run.add_argument("--figure", metavar="PATH", help="render per-component H^3 contributions")
    run.set_defaults(func=cmd_run)

    sw = sub.add_parser("sweep", help="run the pipeline over a grid of scenarios, emit CSV")
    sw.add_argument("--h3-max", type=Fraction, default=Fraction(10))
    sw.add_argument("--n-max", type=int, default=6)
    sw.add_argument("--r", type=int, nargs="+", default=[1, 3])
    sw.add_argument("--csv", metavar="PATH", help="write CSV here instead of stdout")
    sw.add_argument("--json", metavar="PATH")
    sw.add_argument("--figure", metavar="PATH", help="render H_X^3 against h^3")
    sw.set_defaults(func=cmd_sweep)

    ke = sub.add_parser("kernel", help="basis of the compatibility kernel G^q(W0)")
    ke.add_argument("config")
    ke.add_argument("--q", type=int, choices=(2, 4), default=2)
    ke.add_argument("--json", metavar="PATH")
    ke.set_defaults(func=cmd_kernel)

    co = sub.add_parser("coords", help="Weil class k*h with multiplicities -> (B0, e_i) coordinates")
    co.add_argument("k")
    co.add_argument("mult", help="comma-separated multiplicities q1,...,qN")
    co.set_defaults(func=cmd_coords)

    snf = sub.add_parser("snf", help="Smith normal form of an integer matrix file")
    snf.add_argument("matrix_file")
    snf.add_argument("--json", metavar="PATH")
    snf.set_defaults(func=cmd_snf)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_CONFIG if exc.code else EXIT_OK
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except LatticeError as exc:
        print(f"{type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
