from __future__ import annotations

import argparse
import logging
import math
import sys
from dataclasses import replace
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, TextIO

from esdsim.channels import ChannelKind, evolve_werner_analytic, evolve_werner_kraus, p_of_t
from esdsim.config import Settings, load_config
from esdsim.entanglement import concurrence_eig, concurrence_x
from esdsim.errors import ConfigError, DomainError, EsdSimError, NumericalError, UnsupportedChannelError
from esdsim.esd import critical_probability, critical_time
from esdsim.scan import (
    ScanConfig,
    ScanRow,
    caption_predicate,
    evaluation_payload,
    figure_dataset,
    figure_spec,
    render_json,
    rows_payload,
    scan_surface,
    write_csv,
    write_json,
    write_text,
)
from esdsim.states import WernerLikeParams, extract_x, werner_like


logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_NUMERICAL = 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    """ArgumentParser that reports usage problems as exceptions instead of exiting with 2."""

    def error(self, message: str) -> None:  # type: ignore[override]
        raise UsageError(f"{self.prog}: {message}")


def _add_state_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--r", type=float, required=True, help="mixing weight r in [0, 1]")
    angle = parser.add_mutually_exclusive_group(required=True)
    angle.add_argument("--theta", type=float, help="Bell-like angle in radians")
    angle.add_argument("--theta-deg", type=float, help="Bell-like angle in degrees")


def _add_output_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("-o", "--output", type=Path, help="write to this file instead of stdout")
    parser.add_argument("--json", action="store_true", help="emit JSON")


def _add_channel_flag(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--channel", choices=[k.value for k in ChannelKind], required=True)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="esdsim", description="Two-qubit entanglement dynamics in local noisy channels")
    parser.add_argument("--config", type=Path, help="directory holding config.json / config.local.json")
    parser.add_argument("--threads", type=int, help="worker threads for scans (0 = one per CPU)")
    parser.add_argument("-v", "--verbose", action="count", default=0, help="more logging (repeatable)")
    parser.add_argument("-q", "--quiet", action="store_true", help="only log errors")
    sub = parser.add_subparsers(dest="command", required=True)

    evolve = sub.add_parser("evolve", help="evolve a Werner-like state through a channel")
    _add_channel_flag(evolve)
    _add_state_flags(evolve)
    when = evolve.add_mutually_exclusive_group(required=True)
    when.add_argument("--p", type=float, help="channel probability in [0, 1]")
    when.add_argument("--t", type=float, help="time; requires --gamma, p = 1 - exp(-gamma t / 2)")
    evolve.add_argument("--gamma", type=float, help="decay rate used with --t")
    evolve.add_argument("--kraus", action="store_true", help="apply Kraus operators and use the eigenvalue concurrence")
    _add_output_flags(evolve)

    conc = sub.add_parser("concurrence", help="concurrence of the initial Werner-like state")
    _add_state_flags(conc)
    _add_output_flags(conc)

    pc = sub.add_parser("pc", help="critical probability of entanglement sudden death")
    _add_channel_flag(pc)
    _add_state_flags(pc)
    pc.add_argument("--method", choices=["analytic", "bisect"], default="analytic")
    pc.add_argument("--tol", type=float, help="bisection interval width")
    pc.add_argument("--gamma", type=float, help="also report the critical time for this decay rate")
    _add_output_flags(pc)

    scan = sub.add_parser("scan", help="concurrence over a theta x p grid")
    _add_channel_flag(scan)
    scan.add_argument("--r", required=True, help="mixing weight, or a comma separated list")
    scan.add_argument("--theta-start", type=float)
    scan.add_argument("--theta-stop", type=float)
    scan.add_argument("--theta-steps", type=int)
    scan.add_argument("--p-steps", type=int)
    scan.add_argument("--format", choices=["csv", "json"])
    scan.add_argument("--digits", type=int, help="significant digits in CSV (default: exact round trip)")
    _add_output_flags(scan)

    figure = sub.add_parser("figure", help="reproduce one of the six figure datasets")
    figure.add_argument("number", type=int, help="figure number 1..6")
    figure.add_argument("--theta-start", type=float, help="theta axis start (surface figures)")
    figure.add_argument("--theta-stop", type=float, help="theta axis stop (surface figures)")
    figure.add_argument("--theta-steps", type=int)
    figure.add_argument("--p-steps", type=int)
    figure.add_argument("--format", choices=["csv", "json"])
    figure.add_argument("--digits", type=int, help="significant digits in CSV (default: exact round trip)")
    _add_output_flags(figure)

    return parser


def _theta(args: argparse.Namespace) -> float:
    if args.theta_deg is not None:
        return math.radians(args.theta_deg)
    return args.theta


def _params(args: argparse.Namespace) -> WernerLikeParams:
    try:
        return WernerLikeParams(r=args.r, theta=_theta(args))
    except DomainError as exc:
        raise UsageError(f"--r/--theta: {exc}") from exc


def _emit(text: str, output: Optional[Path], stdout: TextIO) -> None:
    write_text(text, output if output is not None else stdout)


def _key_values(values: Dict[str, Any]) -> str:
    return "\n".join(f"{key}={value}" for key, value in values.items()) + "\n"


def _cmd_evolve(args: argparse.Namespace, settings: Settings, stdout: TextIO) -> None:
    params = _params(args)
    kind = ChannelKind(args.channel)
    if args.p is not None:
        p = args.p
    else:
        if args.gamma is None:
            raise UsageError("--t requires --gamma")
        p = p_of_t(args.gamma, args.t)

    if args.kraus:
        rho = evolve_werner_kraus(kind, params, p)
        xe = extract_x(rho)
        c = concurrence_eig(rho, settings.eig_tol)
    else:
        xe = evolve_werner_analytic(kind, params, p)
        c = concurrence_x(xe)

    payload = evaluation_payload(kind, params.r, params.theta, p, xe, c)
    if args.json:
        _emit(render_json(payload), args.output, stdout)
    else:
        _emit(_key_values({"channel": kind.label, "r": params.r, "theta": params.theta, "p": p, "concurrence": c}), args.output, stdout)


def _cmd_concurrence(args: argparse.Namespace, settings: Settings, stdout: TextIO) -> None:
    params = _params(args)
    rho = werner_like(params)
    xe = extract_x(rho)
    values = {
        "r": params.r,
        "theta": params.theta,
        "x_elements": xe.as_dict(),
        "concurrence": concurrence_x(xe),
        "concurrence_eig": concurrence_eig(rho, settings.eig_tol),
    }
    if args.json:
        _emit(render_json(values), args.output, stdout)
    else:
        values.pop("x_elements")
        _emit(_key_values(values), args.output, stdout)


def _cmd_pc(args: argparse.Namespace, settings: Settings, stdout: TextIO) -> None:
    params = _params(args)
    kind = ChannelKind(args.channel)
    tol = args.tol if args.tol is not None else settings.tol
    result = critical_probability(kind, params, args.method, tol)

    values: Dict[str, Any] = {
        "channel": kind.label,
        "r": params.r,
        "theta": params.theta,
        "method": args.method,
        "status": result.status.value,
        "pc": result.pc,
    }
    if args.gamma is not None:
        values["tc"] = critical_time(result, args.gamma)

    if args.json:
        _emit(render_json(values), args.output, stdout)
    else:
        _emit(_key_values(values), args.output, stdout)


def _parse_r_list(raw: str) -> List[float]:
    try:
        return [float(item) for item in raw.split(",") if item.strip()]
    except ValueError as exc:
        raise UsageError(f"--r: cannot parse {raw!r} as a comma separated list of numbers") from exc


def _or_default(value: Any, default: Any) -> Any:
    return value if value is not None else default


def _digits(args: argparse.Namespace) -> Optional[int]:
    if args.digits is not None and args.digits < 1:
        raise UsageError(f"--digits must be >= 1, got {args.digits}")
    return args.digits


def _write_rows(kind: ChannelKind, rows: List[ScanRow], fmt: str, digits: Optional[int], output: Optional[Path], stdout: TextIO) -> None:
    target = output if output is not None else stdout
    if fmt == "json":
        write_json(rows_payload(kind, rows), target)
    else:
        write_csv(rows, target, digits)


def _cmd_scan(args: argparse.Namespace, settings: Settings, stdout: TextIO) -> None:
    digits = _digits(args)
    fmt = "json" if args.json else (args.format or settings.output_format)
    cfg = ScanConfig(
        kind=ChannelKind(args.channel),
        r_values=tuple(_parse_r_list(args.r)),
        theta_start=_or_default(args.theta_start, settings.theta_start),
        theta_stop=_or_default(args.theta_stop, settings.theta_stop),
        theta_steps=_or_default(args.theta_steps, settings.theta_steps),
        p_steps=_or_default(args.p_steps, settings.p_steps),
        output=args.output,
        fmt=fmt,
    )
    rows = scan_surface(cfg, settings.worker_count)
    _write_rows(cfg.kind, rows, cfg.fmt, digits, cfg.output, stdout)


def _cmd_figure(args: argparse.Namespace, settings: Settings, stdout: TextIO) -> None:
    try:
        spec = figure_spec(args.number)
    except DomainError as exc:
        raise UsageError(f"figure: {exc}") from exc
    digits = _digits(args)
    fmt = "json" if args.json else (args.format or settings.output_format)
    rows = figure_dataset(
        spec,
        theta_start=_or_default(args.theta_start, settings.theta_start),
        theta_stop=_or_default(args.theta_stop, settings.theta_stop),
        theta_steps=_or_default(args.theta_steps, settings.theta_steps),
        p_steps=_or_default(args.p_steps, settings.p_steps),
        threads=settings.worker_count,
    )
    if caption_predicate(spec.figure_number, rows):
        logger.info("figure %d: caption claim holds on %d rows", spec.figure_number, len(rows))
    else:
        logger.warning("figure %d: caption claim does not hold on this grid", spec.figure_number)
    _write_rows(spec.kind, rows, fmt, digits, args.output, stdout)


_COMMANDS = {
    "evolve": _cmd_evolve,
    "concurrence": _cmd_concurrence,
    "pc": _cmd_pc,
    "scan": _cmd_scan,
    "figure": _cmd_figure,
}


def _log_level(args: argparse.Namespace, settings: Settings) -> int:
    if args.quiet:
        return logging.ERROR
    if args.verbose >= 2:
        return logging.DEBUG
    if args.verbose == 1:
        return logging.INFO
    return settings.logging_level


def cli_main(argv: Optional[Sequence[str]] = None, stdout: Optional[TextIO] = None, stderr: Optional[TextIO] = None) -> int:
    stdout = stdout if stdout is not None else sys.stdout
    stderr = stderr if stderr is not None else sys.stderr
    parser = build_parser()

    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        print(exc, file=stderr)
        return EXIT_USAGE
    except SystemExit as exc:  # --help
        return int(exc.code or 0)

    try:
        settings = load_config(args.config)
        if args.threads is not None:
            if args.threads < 0:
                raise UsageError(f"--threads must be >= 0, got {args.threads}")
            settings = replace(settings, threads=args.threads)
        logging.basicConfig(
            level=_log_level(args, settings),
            format="%(levelname)s %(name)s: %(message)s",
            stream=stderr,
            force=True,
        )
        _COMMANDS[args.command](args, settings, stdout)
    except UsageError as exc:
        print(f"esdsim: {exc}", file=stderr)
        return EXIT_USAGE
    except (ConfigError, DomainError, UnsupportedChannelError) as exc:
        print(f"esdsim {args.command}: {exc}", file=stderr)
        return EXIT_USAGE
    except NumericalError as exc:
        print(f"esdsim {args.command}: numerical failure: {exc}", file=stderr)
        return EXIT_NUMERICAL
    except EsdSimError as exc:
        print(f"esdsim {args.command}: {exc}", file=stderr)
        return EXIT_NUMERICAL
    return EXIT_OK
