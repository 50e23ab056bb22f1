""" Epstein zeta zeros, Hecke L-functions and the random model from the command line """
from __future__ import annotations

from argparse import ArgumentParser, Namespace
import csv
import importlib
import io
import itertools
import json
import logging
from pathlib import Path
import sys
from typing import Any, NoReturn, Sequence

from epstein_zeros.asymptotics import MainTermParams, main_term_report
from epstein_zeros.constants import (
    DEFAULT_PRIME_CUTOFF,
    DEFAULT_REL_ERR,
    DEFAULT_SAMPLES,
    DEFAULT_SEED,
    EXIT_FAILED,
    EXIT_INVALID,
    EXIT_NUMERIC,
    EXIT_OK,
    SCHEMA_VERSION,
)
from epstein_zeros.epstein import CombinationSpec, evaluate_many, functional_residual
from epstein_zeros.exceptions import InvalidInputError, NumericalError
from epstein_zeros.manifest import (
    STATUS_FAIL,
    STATUS_PASS,
    RunManifest,
    append_manifest,
    merge_reports,
)
from epstein_zeros.quadforms import ClassGroup, class_group
from epstein_zeros.randmodel import (
    build_instance,
    char_function_probe,
    covariance_matrix,
    gaussian_prediction,
    ks_critical,
    mc_estimate,
    relabel_statistic,
    soc_slope,
    soc_sum,
)
from epstein_zeros.reproduce import ReproduceConfig, groups, reproduce, write_bundle
from epstein_zeros.special import Tolerance
from epstein_zeros.util import (
    complex_json,
    parse_complex,
    parse_vector,
    very_verbose,
)
from epstein_zeros.version import __version__
from epstein_zeros.zeroscan import (
    Rectangle,
    ScanTarget,
    compare_main_term,
    conjecture_probe,
    count_above,
    dh_search,
    grid_count,
    littlewood_check,
    locate_zeros,
    winding_number,
)

_LOGGER = logging.getLogger(__name__)


class _ArgumentParser(ArgumentParser):
    """Reports usage errors as invalid input instead of exiting."""

    def error(self, message: str) -> NoReturn:
        self.print_usage(sys.stderr)
        raise InvalidInputError(message)


def _logs_install(level, **kw) -> None:
    try:
        module = importlib.import_module(kw.get("logmodule", "coloredlogs"))
        module.install(level=level, **kw)
    except Exception:  # pylint: disable=broad-except
        logging.basicConfig(level=level)


def _parsed(text: str, kind: Any, what: str) -> Any:
    try:
        return kind(text)
    except ValueError as ex:
        raise InvalidInputError(f"Cannot parse {what} from {text!r}: {ex}") from ex


def _tolerance(args: Namespace) -> Tolerance:
    try:
        return Tolerance(args.tol)
    except ValueError as ex:
        raise InvalidInputError(str(ex)) from ex


def _combination(args: Namespace) -> tuple[CombinationSpec, ClassGroup]:
    group = class_group(args.disc)
    if args.class_index is not None and args.coeffs:
        raise InvalidInputError("Provide either --class-index or --coeffs, not both")
    if args.class_index is not None:
        spec = CombinationSpec.from_class(group, args.class_index)
    elif args.coeffs:
        coefficients = _parsed(
            args.coeffs, lambda text: parse_vector(text, parse_complex), "coefficients"
        )
        spec = CombinationSpec.from_coefficients(coefficients, group=group)
    else:
        raise InvalidInputError("Missing --class-index or --coeffs")
    if args.normalize:
        spec = spec.normalize()
    return spec, group


def _flat_row(payload: dict[str, Any], prefix: str = "") -> dict[str, Any]:
    row: dict[str, Any] = {}
    for key, value in payload.items():
        name = f"{prefix}{key}"
        if isinstance(value, dict):
            row.update(_flat_row(value, f"{name}."))
        elif isinstance(value, list):
            row[name] = json.dumps(value, sort_keys=True)
        else:
            row[name] = value
    return row


def _render(args: Namespace, payload: dict[str, Any], rows: list[dict[str, Any]] | None) -> str:
    if args.format == "json":
        return json.dumps(payload, indent=2, sort_keys=True) + "\n"
    rows = rows if rows is not None else [_flat_row(payload)]
    fields: list[str] = []
    for row in rows:
        fields.extend(key for key in row if key not in fields)
    buffer = io.StringIO()
    writer = csv.DictWriter(buffer, fieldnames=fields, lineterminator="\n")
    writer.writeheader()
    writer.writerows(rows)
    return buffer.getvalue()


def _emit(
    args: Namespace,
    payload: dict[str, Any],
    rows: list[dict[str, Any]] | None = None,
) -> None:
    """Prints payload and records its digest; written to --out when given."""
    payload = {"schema": SCHEMA_VERSION, "version": __version__, "command": args.command, **payload}
    text = _render(args, payload, rows)
    print(text, end="")
    manifest: RunManifest = args.manifest
    if args.out:
        path = Path(args.out) / f"{args.command}.{args.format}"
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w", encoding="utf-8") as stream:
            stream.write(text)
        manifest.record_file(path)
    else:
        manifest.record_output("stdout", text)


def _run_forms_command(args: Namespace) -> int:
    group = class_group(args.disc)
    rows = []
    for index, form in enumerate(group.forms):
        row: dict[str, Any] = {"class": index, "a": form.a, "b": form.b, "c": form.c}
        for j in range(group.h):
            row[f"chi{j}.re"] = float(group.chars[j, index].real)
            row[f"chi{j}.im"] = float(group.chars[j, index].imag)
        rows.append(row)
    _emit(
        args,
        {
            "group": group.to_json(),
            "J": group.J,
            "xi": group.xi(),
            "units": {"chars": "values chi_j(A_k), row j, column k"},
        },
        rows,
    )
    return EXIT_OK


def _run_eval_command(args: Namespace) -> int:
    spec, group = _combination(args)
    tol = _tolerance(args)
    points = [_parsed(text, parse_complex, "s") for text in args.s]
    values = evaluate_many(spec, group, points, tol, args.threads)
    rows = []
    for point, value in zip(points, values):
        rows.append(
            {
                "s": complex_json(point),
                "value": complex_json(value),
                "completed_residual": functional_residual(spec, group, point, tol),
            }
        )
    _emit(
        args,
        {
            "spec": spec.to_json(),
            "rows": rows,
            "units": {
                "value": "F_J(s) = sum_j b_j L_j(s)",
                "scale": spec.scale,
                "completed_residual": "relative, |G(s) - G(1-s)| / max(|G(s)|, 1)",
            },
        },
        [_flat_row(row) for row in rows],
    )
    return EXIT_OK


def _run_zeros_command(args: Namespace) -> int:
    spec, group = _combination(args)
    target = ScanTarget.from_spec(spec, group, _tolerance(args))
    units = {"location": "s = sigma + i t", "residual": "|F(rho)| / scale", "scale": target.scale}
    if args.off_line is not None:
        found = dh_search(target, args.off_line, threads=args.threads)
        payload = {"t_max": args.off_line, "zeros": [zero.to_json() for zero in found]}
        _emit(args, {**payload, "units": units}, [zero.to_json() for zero in found])
        return EXIT_OK
    if args.above is not None:
        theta, height = args.above
        if args.compare:
            comparison = compare_main_term(target, theta, height, threads=args.threads)
            _emit(args, {"comparison": comparison.to_json(), "units": units})
            return EXIT_OK
        strip = count_above(target, theta, height, locate=not args.count_only, threads=args.threads)
        rows = strip.report.to_rows() if strip.report is not None else None
        _emit(args, {"strip": strip.to_json(), "units": units}, rows)
        return EXIT_OK
    if args.rect is None:
        raise InvalidInputError("Missing --rect, --above or --off-line")
    rect = Rectangle(*args.rect)
    if args.count_only:
        payload: dict[str, Any] = {
            "rect": rect.to_json(),
            "winding": winding_number(target, rect, threads=args.threads),
        }
        rows = None
    else:
        report = locate_zeros(target, rect, threads=args.threads)
        payload = {"report": report.to_json()}
        rows = report.to_rows()
    if args.oracle:
        payload["oracle"] = grid_count(target, rect)
    _emit(args, {**payload, "units": units}, rows)
    return EXIT_OK


def _run_littlewood_command(args: Namespace) -> int:
    spec, group = _combination(args)
    target = ScanTarget.from_spec(spec, group, _tolerance(args))
    report = littlewood_check(
        target, args.sigma0, args.t1, args.t2, sigma1=args.sigma1, threads=args.threads
    )
    _emit(
        args,
        {
            "littlewood": report.to_json(),
            "units": {"sides": "2 pi sum (beta - sigma0) and its contour integral form"},
        },
    )
    return EXIT_OK


def _run_probe_command(args: Namespace) -> int:
    spec, group = _combination(args)
    report = conjecture_probe(
        spec,
        group,
        args.theta,
        args.height,
        n_nodes=args.nodes,
        window=args.window,
        P=args.primes,
        n_samples=args.samples,
        seed=args.seed,
        tol=_tolerance(args),
        threads=args.threads,
    )
    _emit(
        args,
        {
            "spec": spec.to_json(),
            "probe": report.to_json(),
            "units": {"means": "log |F_J| averaged over t and over the model"},
        },
    )
    return EXIT_OK


def _run_mainterm_command(args: Namespace) -> int:
    xi = _parsed(args.xi, lambda text: parse_vector(text, int), "xi")
    b = _parsed(args.b, lambda text: parse_vector(text, parse_complex), "b")
    if args.L is not None:
        params = MainTermParams.from_L(xi, b, args.L)
    elif args.theta is not None and args.height is not None:
        params = MainTermParams.from_theta_T(xi, b, args.theta, args.height)
    else:
        raise InvalidInputError("Provide --L or both --theta and --height")
    _emit(
        args,
        {
            "mainterm": main_term_report(params),
            "units": {
                "L": "theta * log log T",
                "expt_main": "E log |F_J(sigma_T : X)| main term",
                "zero_density_main": "number of zeros, T < Im rho < 2T",
            },
        },
    )
    return EXIT_OK


def _run_mc_command(args: Namespace) -> int:
    spec, group = _combination(args)
    model = build_instance(spec, group, args.primes, args.seed)
    estimate = mc_estimate(model, args.sigma, args.samples, args.threads)
    payload: dict[str, Any] = {
        **estimate.to_json(),
        "sigma": args.sigma,
        "spec": spec.to_json(),
        "units": {"mean": "E log |F_J(sigma : X)|", "tail_scale": "truncation heuristic"},
    }
    if args.x is not None or args.y is not None:
        size = spec.J
        x = _parsed(args.x or ",".join(["0"] * size), parse_vector, "x")
        y = _parsed(args.y or ",".join(["0"] * size), parse_vector, "y")
        if len(x) != size or len(y) != size:
            raise InvalidInputError(f"x and y need J={size} entries")
        probe = char_function_probe(model, args.sigma, x, y, args.samples, args.threads)
        payload["char_function"] = {
            "x": x,
            "y": y,
            "value": complex_json(probe.value),
            "stderr": probe.stderr,
            "gaussian": gaussian_prediction(model, args.sigma, x, y),
        }
    if args.relabel:
        statistic, pvalue = relabel_statistic(model, args.sigma, args.samples, args.threads)
        payload["relabel"] = {
            "ks": statistic,
            "pvalue": pvalue,
            "critical_1pct": ks_critical(args.samples, args.samples),
        }
    _emit(args, payload)
    return EXIT_OK


def _run_soc_command(args: Namespace) -> int:
    spec, group = _combination(args)
    model = build_instance(spec, group, args.primes, args.seed)
    sigmas = _parsed(args.sigmas, parse_vector, "sigmas")
    rows = []
    for j, l in itertools.product(spec.characters, repeat=2):
        slope, intercept = soc_slope(model, j, l, sigmas, tail=args.tail)
        row: dict[str, Any] = {"j": j, "l": l, "slope": slope, "intercept": intercept}
        for sigma in sigmas:
            row[f"sum@{sigma:g}"] = soc_sum(model, j, l, sigma, args.tail)
        rows.append(row)
    _emit(
        args,
        {
            "P": model.P,
            "sigmas": sigmas,
            "tail": args.tail,
            "spec": spec.to_json(),
            "pairs": rows,
            "covariance": covariance_matrix(model, sigmas[-1], args.tail).tolist(),
            "units": {"slope": "d soc / d log(1/(2 sigma - 1))"},
        },
        rows,
    )
    return EXIT_OK


def _run_reproduce_command(args: Namespace) -> int:
    config = ReproduceConfig(
        seed=args.seed,
        threads=args.threads,
        quick=args.quick,
        calibration=Path(args.calibration) if args.calibration else None,
    )
    report = reproduce(config, args.filter, recalibrate=args.recalibrate)
    manifest: RunManifest = args.manifest
    manifest.criteria = report.statuses()
    manifest.timing.update(report.timing())
    if args.out:
        manifest.outputs.update(write_bundle(report, args.out))
    summary = {
        "status": STATUS_PASS if report.passed else STATUS_FAIL,
        "failing": report.failing,
        "criteria": report.statuses(),
    }
    print(json.dumps(summary, indent=2, sort_keys=True))
    if not report.passed:
        _LOGGER.error("Failing criteria: %s", ", ".join(report.failing))
        return EXIT_FAILED
    return EXIT_OK


def _run_report_command(args: Namespace) -> int:
    summary = merge_reports(args.paths)
    print(json.dumps(summary, indent=2, sort_keys=True))
    return EXIT_FAILED if summary["status"] == STATUS_FAIL else EXIT_OK


def _add_standard_options(parser: ArgumentParser) -> None:
    parser.add_argument("--seed", type=int, default=DEFAULT_SEED, help="random stream seed")
    parser.add_argument("--threads", type=int, default=1, help="worker threads")
    parser.add_argument(
        "--tol", type=float, default=DEFAULT_REL_ERR, help="relative error of evaluations"
    )
    parser.add_argument("--out", help="directory for payloads and manifests.jsonl", default=None)
    parser.add_argument(
        "--format", choices=("json", "csv"), default="json", help="output format"
    )


def _add_combination_options(parser: ArgumentParser) -> None:
    parser.add_argument("--disc", type=int, required=True, help="fundamental discriminant D < 0")
    parser.add_argument("--class-index", type=int, default=None, dest="class_index",
                        help="form class A: decompose E(s, Q_A)")
    parser.add_argument("--coeffs", default=None,
                        help="explicit b_j over merged characters, e.g. 1,0.5+0.5j")
    parser.add_argument("--normalize", action="store_true",
                        help="scale coefficients to sum |b_j|^2 = 1")


def _add_model_options(parser: ArgumentParser) -> None:
    parser.add_argument("--primes", type=int, default=DEFAULT_PRIME_CUTOFF,
                        help="prime cutoff P of the Euler product")
    parser.add_argument("--samples", type=int, default=DEFAULT_SAMPLES,
                        help="Monte Carlo sample count")


def cli(argv: Sequence[str] | None = None) -> int:
    """Command line interface for the library"""
    if argv is None:
        argv = sys.argv[1:]
    parser = _configure_argparser()
    try:
        args = parser.parse_args(argv)
    except InvalidInputError as ex:
        _LOGGER.error("%s", ex)
        return EXIT_INVALID

    log_level = int(args.loglevel) if args.loglevel.isdigit() else args.loglevel
    if "verbose" in args and args.verbose:
        very_verbose(True)
    _logs_install(
        level=log_level,
        level_styles=dict(
            debug=dict(color="green"),
            verbose=dict(color="blue"),
            info=dict(),
            warning=dict(color="yellow"),
            error=dict(color="red"),
            critical=dict(color="red", bold=True),
        ),
    )

    commands = {
        "forms": _run_forms_command,
        "eval": _run_eval_command,
        "zeros": _run_zeros_command,
        "littlewood": _run_littlewood_command,
        "probe": _run_probe_command,
        "mainterm": _run_mainterm_command,
        "mc": _run_mc_command,
        "soc": _run_soc_command,
        "reproduce": _run_reproduce_command,
        "report": _run_report_command,
    }

    function = commands.get(args.command, lambda _: 1)
    if args.command not in commands:
        parser.print_help()
        return function(args)

    config = {key: value for key, value in vars(args).items() if key != "command"}
    args.manifest = RunManifest.start(args.command, argv, getattr(args, "seed", DEFAULT_SEED), config)
    try:
        code = function(args)
    except InvalidInputError as ex:
        _LOGGER.error("%s", ex)
        code = EXIT_INVALID
    except NumericalError as ex:
        _LOGGER.error("%s", ex)
        code = EXIT_NUMERIC
    if getattr(args, "out", None) and args.command != "report":
        args.manifest.finish(STATUS_PASS if code == EXIT_OK else STATUS_FAIL)
        append_manifest(args.manifest, args.out)
    return code


def _configure_argparser():
    parser = _ArgumentParser(
        prog="epstein-zeros-cli",
        description=(
            "Evaluates Epstein zeta functions and Hecke L-functions of imaginary"
            " quadratic fields, counts their zeros and checks the random model."
        ),
    )

    parser.add_argument(
        "--log",
        help="sets the logging level (DEBUG, INFO, WARNING, ERROR or numeric 0-50) ",
        default="WARNING",
        dest="loglevel",
    )
    parser.add_argument(
        "--verbose",
        help="activates very verbose logging",
        action="store_true",
        dest="verbose",
    )
    subparsers = parser.add_subparsers(metavar="subcommand", help="", dest="command")

    parser_forms = subparsers.add_parser(
        "forms",
        help="lists reduced forms and characters",
        description="Lists the class group of a discriminant with its character table.",
    )
    _add_standard_options(parser_forms)
    parser_forms.add_argument("--disc", type=int, required=True, help="fundamental discriminant D < 0")

    parser_eval = subparsers.add_parser(
        "eval",
        help="evaluates a combination of Hecke L-functions",
        description="Evaluates F_J(s) and its functional equation residual.",
    )
    _add_standard_options(parser_eval)
    _add_combination_options(parser_eval)
    parser_eval.add_argument("--s", action="append", required=True,
                             help='evaluation point "re,im" (repeatable)')

    parser_zeros = subparsers.add_parser(
        "zeros",
        help="counts and locates zeros",
        description="Counts zeros in a rectangle by the argument principle.",
    )
    _add_standard_options(parser_zeros)
    _add_combination_options(parser_zeros)
    mode = parser_zeros.add_mutually_exclusive_group()
    mode.add_argument("--rect", nargs=4, type=float, metavar=("S0", "S1", "T0", "T1"),
                      help="rectangle [S0, S1] x [T0, T1]")
    mode.add_argument("--above", nargs=2, type=float, metavar=("THETA", "T"),
                      help="zeros with Re s > sigma_T and T < Im s < 2T")
    mode.add_argument("--off-line", type=float, default=None, dest="off_line", metavar="TMAX",
                      help="searches zeros with Re s > 1 up to height TMAX")
    parser_zeros.add_argument("--count-only", action="store_true", dest="count_only")
    parser_zeros.add_argument("--oracle", action="store_true",
                              help="cross-checks the count by grid subdivision")
    parser_zeros.add_argument("--compare", action="store_true",
                              help="with --above, compares the count to the main term")

    parser_littlewood = subparsers.add_parser(
        "littlewood",
        help="checks Littlewood's lemma on a strip",
        description="Compares sum of (beta - sigma0) to the log-modulus contour integrals.",
    )
    _add_standard_options(parser_littlewood)
    _add_combination_options(parser_littlewood)
    parser_littlewood.add_argument("--sigma0", type=float, required=True)
    parser_littlewood.add_argument("--t1", type=float, required=True)
    parser_littlewood.add_argument("--t2", type=float, required=True)
    parser_littlewood.add_argument("--sigma1", type=float, default=None,
                                   help="right edge, default is the zero-free abscissa")

    parser_probe = subparsers.add_parser(
        "probe",
        help="compares line averages with the random model",
        description="Averages log |F_J(sigma_T + it)| and compares with E log |F_J(sigma_T : X)|.",
    )
    _add_standard_options(parser_probe)
    _add_combination_options(parser_probe)
    _add_model_options(parser_probe)
    parser_probe.add_argument("--theta", type=float, required=True)
    parser_probe.add_argument("--height", type=float, required=True, help="height T")
    parser_probe.add_argument("--nodes", type=int, default=2048, help="quadrature nodes")
    parser_probe.add_argument("--window", type=float, default=None,
                              help="averaging window, default T")

    parser_mainterm = subparsers.add_parser(
        "mainterm",
        help="computes main-term constants",
        description="Main terms of E log |F_J| and of the zero count above sigma_T.",
    )
    _add_standard_options(parser_mainterm)
    parser_mainterm.add_argument("--xi", required=True, help="xi values, e.g. 4,2")
    parser_mainterm.add_argument("--b", required=True, help="coefficients, e.g. 1,1")
    parser_mainterm.add_argument("--theta", type=float, default=None)
    parser_mainterm.add_argument("--height", type=float, default=None, help="height T")
    parser_mainterm.add_argument("--L", type=float, default=None, help="theta log log T")

    parser_mc = subparsers.add_parser(
        "mc",
        help="Monte Carlo over the random Euler product",
        description="Estimates E log |F_J(sigma : X)| and optional distribution probes.",
    )
    _add_standard_options(parser_mc)
    _add_combination_options(parser_mc)
    _add_model_options(parser_mc)
    parser_mc.add_argument("--sigma", type=float, required=True)
    parser_mc.add_argument("--x", default=None, help="characteristic function argument x")
    parser_mc.add_argument("--y", default=None, help="characteristic function argument y")
    parser_mc.add_argument("--relabel", action="store_true",
                           help="KS test of log |F| against conjugate relabelling")

    parser_soc = subparsers.add_parser(
        "soc",
        help="sums over primes of character products",
        description="Sums of a_j(p) a_l(p) / p^(2 sigma) and their growth rates.",
    )
    _add_standard_options(parser_soc)
    _add_combination_options(parser_soc)
    parser_soc.add_argument("--primes", type=int, default=DEFAULT_PRIME_CUTOFF)
    parser_soc.add_argument("--sigmas", default="0.51,0.505,0.502,0.501")
    parser_soc.add_argument("--tail", action="store_true",
                            help="adds the prime number theorem tail beyond P")

    parser_reproduce = subparsers.add_parser(
        "reproduce",
        help="runs the acceptance pipeline",
        description="Runs every acceptance criterion and writes a report bundle to --out.",
    )
    _add_standard_options(parser_reproduce)
    parser_reproduce.add_argument("--filter", nargs="+", default=None,
                                  help=f"groups or criteria to run ({', '.join(groups())})")
    parser_reproduce.add_argument("--quick", action="store_true",
                                  help="scaled-down sample sizes and heights")
    parser_reproduce.add_argument("--recalibrate", action="store_true",
                                  help="recomputes and saves envelope constants first")
    parser_reproduce.add_argument("--calibration", default=None,
                                  help="calibration file, default is the packaged fixture")

    parser_report = subparsers.add_parser(
        "report",
        help="merges run manifests",
        description="Merges manifests.jsonl files into one summary.",
    )
    parser_report.add_argument("paths", nargs="*", help="manifest files or directories")

    return parser


if __name__ == "__main__":
    sys.exit(cli(sys.argv[1:]))
