"""Command-line front end: ``irs-circuit {forward,invert,sweep,table,verify}``.

Exit codes: 0 success, 2 usage/parse error, 3 degenerate circuit,
4 infeasible target, 5 verification failure.

Defaults for the cell parameters, capacitance window and output options can
come from a flat ``key = value`` config file (``--config`` or the
``IRS_CIRCUIT_CONFIG`` environment variable); explicit flags win.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
import tempfile
from dataclasses import dataclass, field
from pathlib import Path

from .circuit import OperatingPoint, UnitCellParams, phase_shift, reflection_amplitude, unit_cell_impedance
from .errors import (
    AllCapacitancesValid,
    DegenerateCircuit,
    InfeasibleTarget,
    InvalidCount,
    InvalidParameter,
    NoRootInRange,
    UndefinedPhase,
)
from .inverse import (
    DEFAULT_RESIDUAL_TOL,
    DEFAULT_WINDOW,
    AmplitudeTarget,
    PhaseTarget,
    capacitance_from_amplitude,
    capacitance_from_phase,
    design_table,
)
from .oracle import SamplingRanges, equivalence_sweep, roundtrip_check
from .sweep import SweepSpec, run_sweep, to_csv, to_json
from .units import UnitError, parse_quantity, parser_for

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_DEGENERATE = 3
EXIT_INFEASIBLE = 4
EXIT_VERIFY = 5

CONFIG_ENV = "IRS_CIRCUIT_CONFIG"

CONFIG_KINDS = {
    "l1": "inductance",
    "l2": "inductance",
    "r": "resistance",
    "z0": "resistance",
    "c_min": "capacitance",
    "c_max": "capacitance",
    "phase_tol": "angle",
    "magnitude_tol": "dimensionless",
    "residual_tol": "dimensionless",
    "format": None,
    "output": None,
}


class UsageError(Exception):
    pass


@dataclass
class CliConfig:
    params: UnitCellParams = field(default_factory=UnitCellParams)
    window: tuple[float, float] = DEFAULT_WINDOW
    format: str | None = None
    output: str | None = None
    phase_tol: float = 1e-9
    magnitude_tol: float = 1e-9
    residual_tol: float = DEFAULT_RESIDUAL_TOL


def read_config(path: str | os.PathLike) -> dict[str, object]:
    values: dict[str, object] = {}
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = (part.strip() for part in line.partition("="))
        if not sep or key not in CONFIG_KINDS:
            raise UsageError(f"{path}:{lineno}: expected 'key = value' with key in {sorted(CONFIG_KINDS)}")
        kind = CONFIG_KINDS[key]
        try:
            values[key] = parse_quantity(value, kind) if kind else value
        except UnitError as exc:
            raise UsageError(f"{path}:{lineno}: {exc}") from None
    return values


def resolve_config(args: argparse.Namespace) -> CliConfig:
    path = getattr(args, "config", None) or os.environ.get(CONFIG_ENV)
    try:
        file_values = read_config(path) if path else {}
    except OSError as exc:
        raise UsageError(f"cannot read config file: {exc}") from None

    def pick(name, default):
        flag = getattr(args, name, None)
        if flag is not None:
            return flag
        return file_values.get(name, default)

    base = UnitCellParams()
    try:
        params = UnitCellParams(
            l1=pick("l1", base.l1), l2=pick("l2", base.l2), r=pick("r", base.r), z0=pick("z0", base.z0)
        )
    except InvalidParameter as exc:
        raise UsageError(str(exc)) from None
    window = (pick("c_min", DEFAULT_WINDOW[0]), pick("c_max", DEFAULT_WINDOW[1]))
    if not 0 < window[0] < window[1]:
        raise UsageError(f"capacitance window must satisfy 0 < c_min < c_max (got {window})")
    return CliConfig(
        params=params,
        window=window,
        format=pick("format", None),
        output=pick("output", None),
        phase_tol=pick("phase_tol", 1e-9),
        magnitude_tol=pick("magnitude_tol", 1e-9),
        residual_tol=pick("residual_tol", DEFAULT_RESIDUAL_TOL),
    )


def fmt(x: float) -> str:
    return format(x, ".17g")


def emit(text: str, output: str | None) -> None:
    """Write to stdout, or atomically replace ``output``."""
    if not output or output == "-":
        sys.stdout.write(text)
        return
    target = Path(output)
    fd, tmp = tempfile.mkstemp(prefix=f".{target.name}.", dir=target.parent or ".")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, target)
    except BaseException:
        Path(tmp).unlink(missing_ok=True)
        raise


def _state_lines(theta: float, rho: float) -> list[str]:
    return [f"theta_rad = {fmt(theta)}", f"theta_deg = {fmt(math.degrees(theta))}", f"rho = {fmt(rho)}"]


def cmd_forward(args: argparse.Namespace, cfg: CliConfig) -> int:
    try:
        op = OperatingPoint(args.c, args.f)
    except InvalidParameter as exc:
        raise UsageError(str(exc)) from None
    unit_cell_impedance(cfg.params, op)  # surfaces the lossless pole
    rho = reflection_amplitude(cfg.params, op)
    try:
        theta = phase_shift(cfg.params, op)
    except UndefinedPhase:
        theta = None
    if (cfg.format or "text") == "json":
        emit(json.dumps({"theta_rad": theta, "theta_deg": None if theta is None else math.degrees(theta),
                         "rho": rho}, indent=2) + "\n", cfg.output)
    else:
        lines = _state_lines(theta, rho) if theta is not None else ["theta_rad = undefined", f"rho = {fmt(rho)}"]
        emit("\n".join(lines) + "\n", cfg.output)
    return EXIT_OK


def cmd_invert(args: argparse.Namespace, cfg: CliConfig) -> int:
    try:
        if args.kind == "phase":
            if args.theta is None:
                raise UsageError("invert phase requires --theta")
            target = PhaseTarget(args.theta, cfg.params, args.f)
        else:
            if args.rho is None:
                raise UsageError("invert amplitude requires --rho")
            target = AmplitudeTarget(args.rho, cfg.params, args.f)
    except InvalidParameter as exc:
        raise UsageError(str(exc)) from None

    try:
        if args.kind == "phase":
            sol = capacitance_from_phase(target, cfg.window, strict_window=args.strict_window,
                                         tol=cfg.residual_tol, convention=args.convention)
        else:
            sol = capacitance_from_amplitude(target, cfg.window, strict_window=args.strict_window,
                                             tol=cfg.residual_tol)
    except AllCapacitancesValid as exc:
        print(f"all capacitances valid: {exc}")
        return EXIT_OK
    except NoRootInRange as exc:
        print(f"error: no root in window: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except InfeasibleTarget as exc:
        print(f"error: infeasible target: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE

    lines = [f"candidate_F = {fmt(c)}  residual = {fmt(r)}" for c, r in zip(sol.c_candidates, sol.residuals)]
    lines += [
        f"c_selected_F = {fmt(sol.c_selected)}",
        f"c_selected_pF = {fmt(sol.c_selected * 1e12)}",
        f"residual = {fmt(sol.residual)}",
        *_state_lines(sol.achieved.phase, sol.achieved.magnitude),
        f"in_range = {str(sol.in_range).lower()}",
    ]
    emit("\n".join(lines) + "\n", cfg.output)
    if not sol.in_range:
        print(f"warning: selected capacitance lies outside window {cfg.window}", file=sys.stderr)
    return EXIT_OK


def cmd_sweep(args: argparse.Namespace, cfg: CliConfig) -> int:
    kind = {"capacitance": "capacitance", "frequency": "frequency", "phase": "angle",
            "amplitude": "dimensionless"}[args.variable]
    try:
        start, stop = parse_quantity(args.start, kind), parse_quantity(args.stop, kind)
    except UnitError as exc:
        raise UsageError(str(exc)) from None
    fixed = args.c if args.variable == "frequency" else args.f
    if fixed is None:
        raise UsageError("--c is required for frequency sweeps" if args.variable == "frequency"
                         else "--f is required for this sweep")
    try:
        spec = SweepSpec(
            variable=args.variable,
            start=start,
            stop=stop,
            fixed=fixed,
            params=cfg.params,
            steps=args.steps,
            outputs=tuple(o.strip() for o in args.outputs.split(",") if o.strip()),
            window=cfg.window,
            convention=args.convention,
        )
    except InvalidParameter as exc:
        raise UsageError(str(exc)) from None
    curve = run_sweep(spec)
    emit(to_json(curve) if cfg.format == "json" else to_csv(curve), cfg.output)
    return EXIT_OK


TABLE_COLUMNS = ["theta_deg", "rho", "f_GHz", "c_theta_pF", "c_rho_pF", "theta_achieved_deg",
                 "rho_achieved", "discrepancy", "error"]


def _read_rows(path: str) -> list[tuple[float, float, float] | str]:
    rows: list[tuple[float, float, float] | str] = []
    for rec in csv.reader(io.StringIO(Path(path).read_text())):
        if not rec or all(not cell.strip() for cell in rec):
            continue
        if len(rec) != 3:
            rows.append(f"expected 3 fields theta_deg,rho,f_GHz (got {len(rec)})")
            continue
        try:
            rows.append((math.radians(float(rec[0])), float(rec[1]), float(rec[2]) * 1e9))
        except ValueError:
            if not rows and rec[0].strip().lower().startswith("theta"):
                continue  # header
            rows.append(f"non-numeric row {rec!r}")
    return rows


def cmd_table(args: argparse.Namespace, cfg: CliConfig) -> int:
    try:
        parsed = _read_rows(args.rows)
    except OSError as exc:
        raise UsageError(f"cannot read rows file: {exc}") from None
    valid = [r for r in parsed if not isinstance(r, str)]
    results = iter(design_table(valid, cfg.params, cfg.window))

    records = []
    for item in parsed:
        if isinstance(item, str):
            records.append({k: None for k in TABLE_COLUMNS} | {"error": item})
            continue
        row = next(results)
        records.append({
            "theta_deg": math.degrees(row.theta),
            "rho": row.rho,
            "f_GHz": row.f / 1e9,
            "c_theta_pF": None if row.c_theta is None else row.c_theta * 1e12,
            "c_rho_pF": None if row.c_rho is None else row.c_rho * 1e12,
            "theta_achieved_deg": None if row.achieved is None else math.degrees(row.achieved.phase),
            "rho_achieved": None if row.achieved is None else row.achieved.magnitude,
            "discrepancy": row.discrepancy,
            "error": "; ".join(row.errors) or None,
        })

    if cfg.format == "json":
        text = json.dumps({"rows": records}, indent=2) + "\n"
    else:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(TABLE_COLUMNS)
        for rec in records:
            w.writerow(["" if rec[k] is None else (fmt(rec[k]) if isinstance(rec[k], float) else rec[k])
                        for k in TABLE_COLUMNS])
        text = buf.getvalue()
    emit(text, cfg.output)
    if records and all(rec["c_theta_pF"] is None for rec in records):
        return EXIT_INFEASIBLE
    return EXIT_OK


def cmd_verify(args: argparse.Namespace, cfg: CliConfig) -> int:
    if args.n < 1:
        raise UsageError(f"-n must be >= 1 (got {args.n})")
    ranges = SamplingRanges(z0=cfg.params.z0)
    try:
        eq = equivalence_sweep(args.n, ranges, args.seed, phase_tol=cfg.phase_tol, magnitude_tol=cfg.magnitude_tol)
        rt = roundtrip_check(args.roundtrips, args.seed, ranges, tol=cfg.residual_tol)
    except InvalidCount as exc:
        raise UsageError(str(exc)) from None
    report = {"equivalence": eq.to_dict(), "roundtrip": rt.to_dict(), "ok": eq.ok and rt.ok}
    emit(json.dumps(report, indent=2, sort_keys=True) + "\n", cfg.output)
    return EXIT_OK if report["ok"] else EXIT_VERIFY


def _add_params(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("unit cell")
    g.add_argument("--l1", type=parser_for("inductance"), help="bottom-layer inductance, e.g. 2.3nH")
    g.add_argument("--l2", type=parser_for("inductance"), help="top-layer inductance, e.g. 0.56nH")
    g.add_argument("--r", type=parser_for("resistance"), help="loss resistance in ohms")
    g.add_argument("--z0", type=parser_for("resistance"), help="reference impedance (default 377 ohm)")


def _add_common(p: argparse.ArgumentParser, formats: tuple[str, ...]) -> None:
    p.add_argument("--config", help=f"key = value config file (default: ${CONFIG_ENV})")
    p.add_argument("--format", choices=formats, default=None, help="output format")
    p.add_argument("-o", "--output", help="write to this file (atomically) instead of stdout")


def _add_window(p: argparse.ArgumentParser) -> None:
    p.add_argument("--c-min", dest="c_min", type=parser_for("capacitance"), help="window lower edge (0.47pF)")
    p.add_argument("--c-max", dest="c_max", type=parser_for("capacitance"), help="window upper edge (2.35pF)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="irs-circuit",
        description="Reflection phase/amplitude of a varactor-tuned IRS unit cell, and its inverse.",
        epilog="Bare numbers are SI; suffixes nH, pF, GHz, ohm, deg, rad are accepted. "
        "Exit codes: 0 ok, 2 usage, 3 degenerate circuit, 4 infeasible target, 5 verification failure.",
    )
    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")

    p = sub.add_parser("forward", help="phase and amplitude at one operating point",
                       description="Print theta (rad and deg) and rho for the given C and f.")
    _add_params(p)
    p.add_argument("--c", type=parser_for("capacitance"), required=True, help="varactor capacitance, e.g. 1.6pF")
    p.add_argument("--f", type=parser_for("frequency"), required=True, help="incident frequency, e.g. 2.4GHz")
    _add_common(p, ("text", "json"))
    p.set_defaults(func=cmd_forward)

    p = sub.add_parser("invert", help="capacitance for a target phase or amplitude",
                       description="Solve for the capacitance that realizes --theta or --rho; "
                       "prints every candidate, the selection, and its forward-verified residual.")
    p.add_argument("kind", choices=("phase", "amplitude"))
    p.add_argument("--theta", type=parser_for("angle"), help="target phase, e.g. -80deg or 1.2rad")
    p.add_argument("--rho", type=float, help="target amplitude in [0, 1]")
    p.add_argument("--f", type=parser_for("frequency"), required=True, help="incident frequency")
    p.add_argument("--strict-window", action="store_true", help="fail unless a root lies in the window")
    p.add_argument("--convention", choices=("full", "principal"), default="full",
                   help="compare phases on the full circle or modulo pi")
    _add_params(p)
    _add_window(p)
    _add_common(p, ("text",))
    p.set_defaults(func=cmd_invert)

    p = sub.add_parser("sweep", help="curve data over C, f, target phase or target amplitude",
                       description="Uniform sweep including both endpoints; CSV or JSON output.")
    p.add_argument("--variable", choices=("capacitance", "frequency", "phase", "amplitude"), required=True)
    p.add_argument("--start", required=True, help="first grid value (units per variable)")
    p.add_argument("--stop", required=True, help="last grid value")
    p.add_argument("--steps", type=int, default=1024)
    p.add_argument("--c", type=parser_for("capacitance"), help="fixed capacitance (frequency sweeps)")
    p.add_argument("--f", type=parser_for("frequency"), help="fixed frequency (all other sweeps)")
    p.add_argument("--outputs", default="theta,rho", help="comma list from theta,rho,c_theta,c_rho")
    p.add_argument("--convention", choices=("full", "principal"), default="full")
    _add_params(p)
    _add_window(p)
    _add_common(p, ("csv", "json"))
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("table", help="design table from (theta_deg, rho, f_GHz) rows",
                       description="Design one capacitance per row of a theta_deg,rho,f_GHz CSV file.")
    p.add_argument("rows", help="CSV file with columns theta_deg,rho,f_GHz (header optional)")
    _add_params(p)
    _add_window(p)
    _add_common(p, ("csv", "json"))
    p.set_defaults(func=cmd_table)

    p = sub.add_parser("verify", help="check closed forms against the complex-arithmetic oracle",
                       description="Random equivalence sweep plus round-trip inversions; exit 5 on any failure.")
    p.add_argument("-n", type=int, default=10_000, help="number of random points")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--roundtrips", type=int, default=100)
    p.add_argument("--phase-tol", dest="phase_tol", type=float)
    p.add_argument("--magnitude-tol", dest="magnitude_tol", type=float)
    p.add_argument("--z0", type=parser_for("resistance"))
    _add_common(p, ("json",))
    p.set_defaults(func=cmd_verify)
    return parser


# Options whose values may legitimately start with "-" (e.g. --theta -80deg).
SIGNED_OPTIONS = {"--theta", "--start", "--stop"}


def _glue_signed(argv: list[str]) -> list[str]:
    out, i = [], 0
    while i < len(argv):
        tok = argv[i]
        if tok in SIGNED_OPTIONS and i + 1 < len(argv) and argv[i + 1].startswith("-"):
            out.append(f"{tok}={argv[i + 1]}")
            i += 2
            continue
        out.append(tok)
        i += 1
    return out


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(_glue_signed(list(sys.argv[1:] if argv is None else argv)))
    try:
        cfg = resolve_config(args)
        return args.func(args, cfg)
    except UsageError as exc:
        parser.exit(EXIT_USAGE, f"{parser.prog} {args.command}: error: {exc}\n")
    except DegenerateCircuit as exc:
        print(f"error: degenerate circuit: {exc}", file=sys.stderr)
        return EXIT_DEGENERATE


if __name__ == "__main__":
    sys.exit(main())
