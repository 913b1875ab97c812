"""Command-line front end: calibration, pmf evaluation, metrics, scans, sampling.

Emits plot-ready CSV or JSON.  The reported loss excludes the central node,
so pmf support is {0, ..., N}.  Every file output is paired with a run
manifest (embedded in JSON documents, sidecar `<file>.manifest.json` next to
CSV files, stderr when streaming CSV to stdout); reruns with identical flags
produce byte-identical data payloads, with only manifest timestamps differing.

Exit codes: 0 success, 2 argument or domain error, 3 I/O error.
"""

from __future__ import annotations

import argparse
import datetime
import json
import os
import sys
from dataclasses import asdict, dataclass, field

from . import __version__
from .core_model import (
    AdmissibilityError,
    ModelConfig,
    calibrate,
    rho_bounds,
    rho_to_q,
)
from .distribution import loss_pmf
from .metrics import GridSpec, risk_report, scan_rho
from .oracle import GENERATOR_NAME, sample

OUTDIR_ENV = "DANDELION_RISK_OUTDIR"


@dataclass
class RunManifest:
    """Provenance record accompanying every data payload."""

    command: str
    parameters: dict
    tool_version: str = __version__
    seed: int | None = None
    timestamp: str = field(
        default_factory=lambda: datetime.datetime.now(datetime.timezone.utc).isoformat()
    )

    def to_json(self) -> str:
        return json.dumps(asdict(self), sort_keys=True)


def _fmt(x) -> str:
    # repr gives the shortest round-trip decimal form for floats.
    return repr(float(x)) if isinstance(x, float) else str(x)


def _resolve_output(path: str) -> str:
    outdir = os.environ.get(OUTDIR_ENV)
    if outdir and not os.path.isabs(path):
        return os.path.join(outdir, path)
    return path


def _emit(payload: str, manifest: RunManifest, output: str | None,
          embedded: bool) -> None:
    """Write the payload; attach the manifest per format conventions."""
    if output is None:
        sys.stdout.write(payload)
        if not embedded:
            sys.stderr.write(manifest.to_json() + "\n")
        return
    path = _resolve_output(output)
    try:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(payload)
        if not embedded:
            with open(path + ".manifest.json", "w", encoding="utf-8") as fh:
                fh.write(manifest.to_json() + "\n")
    except OSError as exc:
        raise _IOFailure(f"cannot write output file {path!r}: {exc}") from exc


class _IOFailure(Exception):
    pass


def _csv_rows(header: list[str], rows) -> str:
    lines = [",".join(header)]
    lines.extend(",".join(_fmt(v) for v in row) for row in rows)
    return "\n".join(lines) + "\n"


def _json_document(manifest: RunManifest, data) -> str:
    return json.dumps({"manifest": asdict(manifest), "data": data}, sort_keys=True) + "\n"


# --- subcommands --------------------------------------------------------------


def _cmd_calibrate(args) -> int:
    cfg = ModelConfig(n_credits=args.n, p=args.p, rho=args.rho)
    params = calibrate(cfg)
    bounds = rho_bounds(args.p)
    print(f"alpha   = {_fmt(params.alpha)}")
    print(f"alpha0  = {_fmt(params.alpha0)}")
    print(f"beta    = {_fmt(params.beta)}")
    print(f"log_z   = {_fmt(params.log_z)}")
    print(f"q       = {_fmt(cfg.q)}")
    print(f"rho_interval = ({_fmt(bounds.lower)}, {_fmt(bounds.upper)})")
    return 0


def _cmd_pmf(args) -> int:
    cfg = ModelConfig(n_credits=args.n, p=args.p, rho=args.rho)
    pmf = loss_pmf(cfg)
    manifest = RunManifest(
        command="pmf",
        parameters={"p": args.p, "rho": args.rho, "n": args.n, "format": args.format},
    )
    if args.format == "csv":
        payload = _csv_rows(
            ["l", "mass", "log_mass"],
            (
                (int(l), float(pmf.mass[l]), float(pmf.log_mass[l]))
                for l in range(pmf.n + 1)
            ),
        )
        _emit(payload, manifest, args.output, embedded=False)
    else:
        data = {
            "l": list(range(pmf.n + 1)),
            "mass": [float(v) for v in pmf.mass],
            "log_mass": [float(v) for v in pmf.log_mass],
        }
        _emit(_json_document(manifest, data), manifest, args.output, embedded=True)
    return 0


def _cmd_metrics(args) -> int:
    cfg = ModelConfig(n_credits=args.n, p=args.p, rho=args.rho)
    report = risk_report(loss_pmf(cfg), level=args.level)
    manifest = RunManifest(
        command="metrics",
        parameters={"p": args.p, "rho": args.rho, "n": args.n, "level": args.level},
    )
    data = asdict(report)
    data["peaks"] = list(report.peaks)
    _emit(_json_document(manifest, data), manifest, args.output, embedded=True)
    return 0


def _cmd_scan(args) -> int:
    spec = GridSpec(count=args.points, margin=args.margin)
    result = scan_rho(
        args.p,
        args.n,
        grid_spec=spec,
        level=args.level,
        jump_threshold=args.jump_threshold,
    )
    manifest = RunManifest(
        command="scan",
        parameters={
            "p": args.p,
            "n": args.n,
            "points": args.points,
            "margin": args.margin,
            "level": args.level,
            "jump_threshold": args.jump_threshold,
            "format": args.format,
        },
    )
    if args.format == "csv":
        rows = (
            (
                float(rho),
                rep.var_value,
                rep.mode,
                float(rep.mode_prob),
                float(rep.mean),
                float(rep.variance),
            )
            for rho, rep in zip(result.rho_grid, result.reports)
        )
        payload = _csv_rows(
            ["rho", "var", "mode", "mode_prob", "mean", "variance"], rows
        )
        star = "" if result.rho_star is None else _fmt(result.rho_star)
        payload += f"# rho_star = {star}\n# jump_size = {result.jump_size}\n"
        _emit(payload, manifest, args.output, embedded=False)
    else:
        data = {
            "rho": [float(r) for r in result.rho_grid],
            "var": [rep.var_value for rep in result.reports],
            "mode": [rep.mode for rep in result.reports],
            "mode_prob": [float(rep.mode_prob) for rep in result.reports],
            "mean": [float(rep.mean) for rep in result.reports],
            "variance": [float(rep.variance) for rep in result.reports],
            "rho_star": result.rho_star,
            "jump_size": result.jump_size,
        }
        _emit(_json_document(manifest, data), manifest, args.output, embedded=True)
    return 0


def _cmd_sample(args) -> int:
    cfg = ModelConfig(n_credits=args.n, p=args.p, rho=args.rho)
    draws = sample(cfg, args.count, args.seed)
    manifest = RunManifest(
        command="sample",
        parameters={
            "p": args.p,
            "rho": args.rho,
            "n": args.n,
            "count": args.count,
            "generator": GENERATOR_NAME,
            "format": args.format,
        },
        seed=args.seed,
    )
    if args.format == "csv":
        payload = _csv_rows(
            ["draw_index", "l0", "loss"],
            ((i, int(row[0]), int(row[1])) for i, row in enumerate(draws)),
        )
        _emit(payload, manifest, args.output, embedded=False)
    else:
        data = {
            "draw_index": list(range(len(draws))),
            "l0": [int(v) for v in draws[:, 0]],
            "loss": [int(v) for v in draws[:, 1]],
        }
        _emit(_json_document(manifest, data), manifest, args.output, embedded=True)
    return 0


# --- parser -------------------------------------------------------------------


def _add_model_flags(parser, with_rho=True):
    parser.add_argument("--p", type=float, required=True,
                        help="Default probability shared by all nodes, in (0,1).")
    if with_rho:
        parser.add_argument("--rho", type=float, required=True,
                            help="Central correlation; must lie strictly inside "
                                 "the admissible interval for p.")
    parser.add_argument("--n", type=int, required=True,
                        help="Number of non-central credits (loss support is 0..n; "
                             "the central node is excluded from the loss).")


def _add_output_flags(parser, formats=("csv", "json")):
    parser.add_argument("--format", choices=list(formats), default=formats[0],
                        help="Output format (default: %(default)s).")
    parser.add_argument("--output", "-o", default=None,
                        help="Output file path; stdout when omitted. Relative "
                             f"paths resolve under ${OUTDIR_ENV} when set.")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="dandelion-risk",
        description="Star-graph Ising credit-risk model: exact loss "
                    "distributions, risk metrics, correlation scans, and "
                    "sampling. The loss counts defaulted non-central credits "
                    "only (support 0..N).",
        epilog=f"Exit codes: 0 ok, 2 argument/domain error, 3 I/O error. "
               f"Set ${OUTDIR_ENV} to redirect relative output paths.",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    cal = sub.add_parser("calibrate", help="Print natural parameters and log Z.")
    _add_model_flags(cal)
    cal.set_defaults(func=_cmd_calibrate)

    pmf = sub.add_parser("pmf", help="Emit the exact loss pmf (l, mass, log_mass).")
    _add_model_flags(pmf)
    _add_output_flags(pmf)
    pmf.set_defaults(func=_cmd_pmf)

    met = sub.add_parser("metrics", help="Emit VaR, mode, moments, peaks as JSON.")
    _add_model_flags(met)
    met.add_argument("--level", type=float, default=0.99,
                     help="VaR confidence level in (0,1) (default: %(default)s).")
    _add_output_flags(met, formats=("json",))
    met.set_defaults(func=_cmd_metrics)

    scan = sub.add_parser("scan", help="Sweep rho and emit per-point risk metrics.")
    _add_model_flags(scan, with_rho=False)
    scan.add_argument("--points", type=int, default=201,
                      help="Grid size, >= 3 (default: %(default)s).")
    scan.add_argument("--margin", type=float, default=1e-3,
                      help="Distance kept from each open rho bound "
                           "(default: %(default)s).")
    scan.add_argument("--level", type=float, default=0.99,
                      help="VaR confidence level (default: %(default)s).")
    scan.add_argument("--jump-threshold", type=int, default=10,
                      help="Smallest adjacent mode change reported as a "
                           "discontinuity (default: %(default)s).")
    _add_output_flags(scan)
    scan.set_defaults(func=_cmd_scan)

    smp = sub.add_parser("sample", help="Draw (l0, loss) pairs with a seeded RNG.")
    _add_model_flags(smp)
    smp.add_argument("--count", type=int, required=True, help="Number of draws, >= 1.")
    smp.add_argument("--seed", type=int, default=0,
                     help="RNG seed; fully determines the stream "
                          "(default: %(default)s).")
    _add_output_flags(smp)
    smp.set_defaults(func=_cmd_sample)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except AdmissibilityError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except _IOFailure as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    raise SystemExit(main())
