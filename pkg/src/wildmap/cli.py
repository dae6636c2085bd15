"""Command-line front end.

Subcommands mirror the library surface:

    build      validate a configuration and construct its first branches
    plot       sample the graph; SVG (with a data CSV alongside) or CSV
    orbit      iterate one start point, write the orbit as CSV
    basin      Monte Carlo convergence statistics as JSON
    cylinder   exact itinerary-cylinder interval and measure as JSON
    measure    certified bounds on the depth-n core measure as JSON
    dichotomy  exact per-branch minimum slopes for c >= 2
    verify     per-branch property checks and exact stretch ratios

Rationals on the command line are ``num/den`` strings ("3/2"); finite
decimal strings ("1.5", "1e-6") are converted exactly.  Exit codes:
0 success, 2 usage or validation failure, 3 numeric or resource failure.
A JSON config file (--config) may supply defaults; explicit flags win.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction
from pathlib import Path

from .cylinders import core_measure, cylinder_interval, cylinder_measure
from .errors import (
    ConstructionError,
    ConvergenceError,
    DomainError,
    PrecisionError,
    ResourceLimitError,
    ScheduleExhausted,
    WildmapError,
)
from .mapcore import ExpansionConfig, FullBranchMap, ProportionSchedule, validate
from .orbits import basin_sample, iterate
from .plotting import render_graph_svg, sample_graph, write_graph_csv
from .rational import format_rational, parse_rational
from .verify import check_branch_properties, check_expansion_ratios, dichotomy_scan

_USAGE_ERRORS = (DomainError, ConstructionError, ScheduleExhausted)
_NUMERIC_ERRORS = (ConvergenceError, ResourceLimitError, PrecisionError)


def _rational_arg(text: str) -> Fraction:
    try:
        return parse_rational(text)
    except DomainError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _int_list_arg(text: str) -> list[int]:
    try:
        return [int(tok) for tok in text.split(",") if tok.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers: {text!r}") from None


def _label_list_arg(text: str) -> list[str]:
    items = [tok.strip() for tok in text.split(",") if tok.strip()]
    if not items:
        raise argparse.ArgumentTypeError(f"expected comma-separated values: {text!r}")
    return items


def _write_json(payload: dict, out: str | None) -> None:
    text = json.dumps(payload, indent=2, sort_keys=True) + "\n"
    if out is None or out == "-":
        sys.stdout.write(text)
    else:
        Path(out).write_text(text)


def _add_map_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--c", type=_rational_arg, default=None,
                        help="breakpoint base c > 1 (default 3/2)")
    parser.add_argument("--beta", type=_rational_arg, default=None,
                        help="proportion defect: p_n = 1 - beta*2^-n (default 1/2)")
    parser.add_argument("--p-table", dest="p_table", default=None,
                        help="JSON file with an explicit list of proportions")
    parser.add_argument("--strict", action="store_true", default=None,
                        help="require the uniformly expanding regime and a certified schedule")
    parser.add_argument("--quad-tol", dest="quad_tol", type=float, default=None,
                        help="quadrature/inversion tolerance (default 1e-12)")
    parser.add_argument("--config", default=None,
                        help="JSON file of flag defaults; explicit flags win")


_MAP_DEFAULTS = {"c": Fraction(3, 2), "beta": Fraction(1, 2), "quad_tol": 1e-12, "strict": False}


def _apply_config_file(args: argparse.Namespace) -> None:
    if getattr(args, "config", None) is None:
        return
    try:
        payload = json.loads(Path(args.config).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise DomainError(f"cannot read config file {args.config}: {exc}") from exc
    if not isinstance(payload, dict):
        raise DomainError(f"config file {args.config} must hold a JSON object")
    for key, value in payload.items():
        dest = key.replace("-", "_")
        if not hasattr(args, dest):
            raise DomainError(f"config file key {key!r} matches no flag")
        if getattr(args, dest) is None:
            if dest in ("c", "beta"):
                value = parse_rational(value)
            setattr(args, dest, value)


def _build_config(args: argparse.Namespace) -> ExpansionConfig:
    c = args.c if args.c is not None else _MAP_DEFAULTS["c"]
    if getattr(args, "p_table", None):
        try:
            entries = json.loads(Path(args.p_table).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise DomainError(f"cannot read proportion table {args.p_table}: {exc}") from exc
        schedule = ProportionSchedule.from_table([parse_rational(v) for v in entries])
    else:
        beta = args.beta if args.beta is not None else _MAP_DEFAULTS["beta"]
        schedule = ProportionSchedule.geometric_to_one(beta)
    return ExpansionConfig(
        c=c,
        schedule=schedule,
        strict=bool(args.strict) if args.strict is not None else _MAP_DEFAULTS["strict"],
        quad_tol=args.quad_tol if args.quad_tol is not None else _MAP_DEFAULTS["quad_tol"],
    )


def _echo_params(config: ExpansionConfig) -> dict:
    return {
        "c": format_rational(config.c),
        "schedule": config.schedule.describe(),
        "strict": config.strict,
        "quad_tol": config.quad_tol,
    }


# ---------------------------------------------------------------------------
# Subcommands
# ---------------------------------------------------------------------------


def _cmd_build(args) -> int:
    config = _build_config(args)
    report = validate(config, max_branch=args.branches)
    payload = report.to_json_dict()
    payload["parameters"] = _echo_params(config)
    if report.ok:
        m = FullBranchMap(config)
        for n in range(1, args.branches + 1):
            m.branch(n)
        payload["branches_built"] = args.branches
    print(report.render_table())
    if args.out:
        _write_json(payload, args.out)
    if not report.ok and config.strict:
        failures = ", ".join(f"{c.name} ({c.detail})" for c in report.failures())
        print(f"strict validation failed: {failures}", file=sys.stderr)
        return 2
    for warning in report.warnings():
        print(f"warning: {warning.name}: {warning.detail}", file=sys.stderr)
    return 0


def _cmd_plot(args) -> int:
    config = _build_config(args)
    m = FullBranchMap(config)
    samples = sample_graph(m, branches=args.branches, per_branch=args.samples_per_branch)
    out = Path(args.out) if args.out else Path(f"map.{args.format}")
    if args.format == "csv":
        with out.open("w") as fh:
            write_graph_csv(samples, fh)
        print(f"wrote {out}")
        return 0
    render_graph_svg(m, samples, out)
    data_out = out.with_suffix(".csv")
    with data_out.open("w") as fh:
        write_graph_csv(samples, fh)
    print(f"wrote {out} and {data_out}")
    return 0


def _cmd_orbit(args) -> int:
    config = _build_config(args)
    m = FullBranchMap(config)
    x0 = parse_rational(args.x0) if args.mode == "exact-affine" else float(parse_rational(args.x0))
    record = iterate(m, x0, steps=args.steps, mode=args.mode)
    if args.out and args.out != "-":
        with Path(args.out).open("w") as fh:
            record.to_csv(fh)
        summary = record.summary_dict()
        summary["parameters"] = _echo_params(config)
        _write_json(summary, None)
    else:
        record.to_csv(sys.stdout)
    return 0


def _cmd_basin(args) -> int:
    config = _build_config(args)
    m = FullBranchMap(config)
    delta_labels = args.delta
    deltas = [float(parse_rational(d)) for d in delta_labels]
    stats = basin_sample(
        m,
        count=args.samples,
        checkpoints=args.checkpoints,
        seed=args.seed,
        deltas=deltas,
        threads=args.threads,
    )
    payload = stats.to_json_dict(params=_echo_params(config))
    payload["delta_labels"] = delta_labels
    _write_json(payload, args.out)
    return 0


def _cmd_cylinder(args) -> int:
    config = _build_config(args)
    m = FullBranchMap(config)
    cyl = cylinder_interval(m, args.seq)
    payload = cyl.to_json_dict()
    if cyl.exact:
        payload["measure"] = format_rational(cylinder_measure(m, args.seq))
    payload["parameters"] = _echo_params(config)
    _write_json(payload, args.out)
    return 0


def _cmd_measure(args) -> int:
    config = _build_config(args)
    m = FullBranchMap(config)
    report = core_measure(m, depth=args.depth, k_max=args.kmax, tol=args.tol)
    payload = report.to_json_dict()
    payload["parameters"] = _echo_params(config)
    _write_json(payload, args.out)
    return 0


def _cmd_dichotomy(args) -> int:
    config = _build_config(args)
    m = FullBranchMap(config)
    scan = dichotomy_scan(m, n_branches=args.branches, eps=args.eps)
    print(scan.render_table())
    if args.out:
        payload = scan.to_json_dict()
        payload["parameters"] = _echo_params(config)
        _write_json(payload, args.out)
    return 0


def _cmd_verify(args) -> int:
    config = _build_config(args)
    m = FullBranchMap(config)
    branches = range(1, args.branches + 1)
    report = check_branch_properties(m, branches=branches, grid=args.grid, tol=args.tol)
    ratios = [check_expansion_ratios(m, n) for n in branches]
    print(report.render_table())
    ratios_ok = all(r.ok for r in ratios)
    print(f"exact stretch ratios: {'all hold' if ratios_ok else 'VIOLATED'}")
    if args.out:
        _write_json(
            {
                "properties": report.to_json_dict(),
                "ratios": [r.to_json_dict() for r in ratios],
                "parameters": _echo_params(config),
            },
            args.out,
        )
    return 0 if (report.passed and ratios_ok) else 2


# ---------------------------------------------------------------------------
# Parser
# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="wildmap",
        description="Expanding full-branch interval maps with an attracting origin: "
        "construction, exact cylinder geometry, and orbit statistics.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("build", help="validate a configuration and build branches")
    _add_map_flags(p)
    p.add_argument("--branches", type=int, default=12)
    p.add_argument("--out", default=None, help="write the validation report JSON here")
    p.set_defaults(func=_cmd_build)

    p = sub.add_parser("plot", help="sample the graph and render it")
    _add_map_flags(p)
    p.add_argument("--branches", type=int, default=6)
    p.add_argument("--samples-per-branch", dest="samples_per_branch", type=int, default=200)
    p.add_argument("--format", choices=("svg", "csv"), default="svg")
    p.add_argument("--out", default=None)
    p.set_defaults(func=_cmd_plot)

    p = sub.add_parser("orbit", help="iterate one start point")
    _add_map_flags(p)
    p.add_argument("--x0", required=True)
    p.add_argument("--steps", type=int, default=100)
    p.add_argument("--mode", choices=("float", "exact-affine"), default="float")
    p.add_argument("--out", default=None, help="CSV path; '-' or omitted writes CSV to stdout")
    p.set_defaults(func=_cmd_orbit)

    p = sub.add_parser("basin", help="Monte Carlo convergence statistics")
    _add_map_flags(p)
    p.add_argument("--samples", type=int, default=10000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--checkpoints", type=_int_list_arg, default=[10, 100, 1000])
    p.add_argument("--delta", type=_label_list_arg, default=["1e-6"])
    p.add_argument("--threads", type=int, default=1)
    p.add_argument("--out", default=None)
    p.set_defaults(func=_cmd_basin)

    p = sub.add_parser("cylinder", help="itinerary-cylinder interval and measure")
    _add_map_flags(p)
    p.add_argument("--seq", type=_int_list_arg, required=True,
                   help="comma-separated branch indices, e.g. 1,2")
    p.add_argument("--out", default=None)
    p.set_defaults(func=_cmd_cylinder)

    p = sub.add_parser("measure", help="certified core-measure bounds")
    _add_map_flags(p)
    p.add_argument("--depth", type=int, required=True)
    p.add_argument("--kmax", type=int, default=40)
    p.add_argument("--tol", type=float, default=None)
    p.add_argument("--out", default=None)
    p.set_defaults(func=_cmd_measure)

    p = sub.add_parser("dichotomy", help="per-branch minimum slopes for c >= 2")
    _add_map_flags(p)
    p.add_argument("--branches", type=int, default=40)
    p.add_argument("--eps", type=_rational_arg, default=None)
    p.add_argument("--out", default=None)
    p.set_defaults(func=_cmd_dichotomy)

    p = sub.add_parser("verify", help="branch property checks and exact ratios")
    _add_map_flags(p)
    p.add_argument("--branches", type=int, default=30)
    p.add_argument("--grid", type=int, default=1000)
    p.add_argument("--tol", type=float, default=1e-9)
    p.add_argument("--out", default=None)
    p.set_defaults(func=_cmd_verify)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        _apply_config_file(args)
        return args.func(args)
    except _NUMERIC_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except _USAGE_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
