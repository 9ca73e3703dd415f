"""
CurrentKit Command-Line Interface

Runs every library operation from the shell and emits a versioned JSON
report (or a Markdown table view of it).

Exit status: 0 on success, 2 on invalid input, 3 when a resource cap is hit,
4 when an internal postcondition fails.

Usage:
    python cli.py intersect --surface punctured_torus --current '[["a", 1]]' --class b --radius 6
    python cli.py liouville-check --surface sphere3 --max-len 6
    python cli.py sphere3-verify --radius 8

Author: Harsh
"""

import argparse
import json
import logging
import sys
import time
from typing import Any, Callable, Dict, List, Optional, TextIO

import yaml
from dotenv import load_dotenv

from currentkit import __version__
from currentkit.config_loader import ConfigLoader, load_config
from currentkit.currents import (
    CountingSettings,
    DiscreteCurrent,
    class_length,
    enumerate_classes,
    intersection_number,
    liouville_length,
    pairing,
    parse_class,
    self_intersection_result,
    somewhat_short,
    systole_scan,
)
from currentkit.decomposition import (
    decompose,
    reconstruction_gap,
    support_components,
    support_graph,
    zero_detector,
    zero_intersection_graph,
)
from currentkit.errors import CurrentKitError, InputError
from currentkit.export_utils import (
    build_report,
    export_to_json,
    export_to_markdown,
    save_export_file,
    validate_report,
)
from currentkit.hyp_core import Geodesic, axis_geodesic
from currentkit.length_functions import (
    LengthTable,
    length_table,
    representation_for,
    trichotomy_classify,
)
from currentkit.logging_config import setup_from_config
from currentkit import sphere3
from currentkit.surface_group import SurfacePresentation, builtin, evaluate
from currentkit.surgery import simplify_to_simple, surgery_report

logger = logging.getLogger("currentkit.cli")


def _common_options() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--surface", default="punctured_torus", help="Built-in surface name")
    common.add_argument("--presentation-file", help="JSON file with a custom surface presentation")
    common.add_argument("--radius", type=int, help="Ball radius for counts, or word length for scans")
    common.add_argument("--count-radius", type=int, help="Ball radius of the counts inside scans")
    common.add_argument("--tolerance", type=float, help="Boundary-point or zero tolerance")
    common.add_argument("--threads", type=int, help="Worker threads (results do not depend on it)")
    common.add_argument("--format", choices=("json", "table"), help="Output format")
    common.add_argument("--config", default="config.yaml", help="Path to config.yaml")
    common.add_argument("--output", help="Write the report to this file instead of stdout")
    common.add_argument("--log-level", help="Override the configured logging level")
    return common


def build_parser() -> argparse.ArgumentParser:
    """Argument parser with one subcommand per operation."""
    common = _common_options()
    parser = argparse.ArgumentParser(prog="currentkit", description="Geodesic currents on hyperbolic surfaces")
    parser.add_argument("--version", action="version", version=f"currentkit {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def command(name: str, help_text: str) -> argparse.ArgumentParser:
        return sub.add_parser(name, parents=[common], help=help_text)

    p = command("intersect", "i(mu, delta_c)")
    p.add_argument("--current", required=True)
    p.add_argument("--class", dest="class_word", required=True)

    p = command("pairing", "i(mu, nu) for two currents")
    p.add_argument("--current", required=True)
    p.add_argument("--other-current", required=True)
    p.add_argument("--check-symmetry", action="store_true")

    p = command("selfint", "Double points of a closed geodesic")
    p.add_argument("--class", dest="class_word", required=True)

    p = command("somewhat-short", "Is a geodesic crossed by the support of mu?")
    p.add_argument("--current", required=True)
    p.add_argument("--class", dest="class_word", help="Use the axis of this class")
    p.add_argument("--endpoints", help="Boundary angles 'phi1,phi2' of the geodesic")

    p = command("liouville-check", "Compare i(L, delta_c) with hyperbolic length")
    p.add_argument("--max-len", type=int, default=6)

    p = command("systole", "Systole estimate and bilipschitz constants")
    p.add_argument("--current", required=True)
    p.add_argument("--simple-only", action="store_true")

    p = command("decompose", "Special curves and pieces of a discrete current")
    p.add_argument("--current", required=True)
    p.add_argument("--check-reconstruction", action="store_true")

    p = command("surgery", "Resolve one double point of a class")
    p.add_argument("--current", required=True)
    p.add_argument("--class", dest="class_word", required=True)

    p = command("simplify", "Reduce a class to a simple one by surgery")
    p.add_argument("--current", required=True)
    p.add_argument("--class", dest="class_word", required=True)
    p.add_argument("--max-steps", type=int)

    command("sphere3-verify", "Thrice-punctured sphere verification suite")

    for name, help_text in (("lengths", "Length table of a representation"),
                            ("trichotomy", "Special curves and pieces of a length function")):
        p = command(name, help_text)
        p.add_argument("--rep", choices=("sym_power", "diagonal", "file"), default="sym_power")
        p.add_argument("--dimension", type=int, default=3, help="n for sym_power (SL(n)) or diagonal (Sp(2n))")
        p.add_argument("--rep-file", help="JSON representation for --rep file")
        p.add_argument("--max-len", type=int, default=4)
        p.add_argument("--no-normalize", action="store_true")
        if name == "trichotomy":
            p.add_argument("--table-file", help="JSON list of [word, length] pairs instead of a representation")

    p = command("enumerate", "List classes up to a word length")
    p.add_argument("--max-len", type=int, default=4)
    p.add_argument("--simple-only", action="store_true")
    p.add_argument("--primitive", action="store_true")
    p.add_argument("--include-peripheral", action="store_true")
    return parser


def load_surface(args: argparse.Namespace) -> SurfacePresentation:
    """
    Resolve --surface / --presentation-file.

    Raises:
        InputError: when the presentation file cannot be read
    """
    if args.presentation_file:
        try:
            with open(args.presentation_file, "r", encoding="utf-8") as f:
                data = json.load(f)
        except (OSError, json.JSONDecodeError) as e:
            raise InputError(f"Cannot read presentation file {args.presentation_file}: {e}") from e
        return SurfacePresentation.from_dict(data)
    return builtin(args.surface)


def _read_text(path: str) -> str:
    try:
        with open(path, "r", encoding="utf-8") as f:
            return f.read()
    except OSError as e:
        raise InputError(f"Cannot read {path}: {e}") from e


class Job:
    """
    Resolved configuration of one command: flags layered over config.yaml.

    The echoed configuration leaves out the thread count, which never
    changes a result.
    """

    def __init__(self, args: argparse.Namespace, config: ConfigLoader):
        self.args = args
        self.config = config
        self.surface = load_surface(args)
        counting = config.get_counting_config()
        runtime = config.get_runtime_config()
        self.radius = args.radius if args.radius is not None else counting["radius"]
        self.count_radius = args.count_radius if args.count_radius is not None else counting["count_radius"]
        self.candidate_radius = args.radius if args.radius is not None else counting["candidate_radius"]
        self.threads = args.threads if args.threads is not None else runtime["threads"]
        self.output_format = args.format or runtime["output_format"]
        self.tolerance = args.tolerance
        self.settings = CountingSettings.from_config(config)

    def current(self, text: str) -> DiscreteCurrent:
        return DiscreteCurrent.from_json(text, self.surface, self.settings.tol_class)

    def to_dict(self) -> Dict[str, Any]:
        echo = {
            key: value for key, value in vars(self.args).items()
            if key not in ("output", "log_level", "threads") and value is not None
        }
        echo.update({
            "surface": self.surface.name,
            "radius": self.radius,
            "count_radius": self.count_radius,
            "candidate_radius": self.candidate_radius,
            "format": self.output_format,
            "counting": {
                "stabilization_margin": self.settings.margin,
                "max_attempts": self.settings.max_attempts,
                "jitter": self.settings.jitter,
                "tol_pt": self.settings.tol_pt,
                "tol_class": self.settings.tol_class,
                "element_cap": self.config.get_element_cap(),
            },
        })
        return echo


def cmd_intersect(job: Job) -> Dict[str, Any]:
    mu = job.current(job.args.current)
    c = parse_class(job.args.class_word, job.surface)
    return intersection_number(mu, c, job.surface, job.radius, job.settings).to_dict(job.surface)


def cmd_pairing(job: Job) -> Dict[str, Any]:
    mu = job.current(job.args.current)
    nu = job.current(job.args.other_current)
    value = pairing(mu, nu, job.surface, job.radius, job.args.check_symmetry, job.settings)
    return {"value": value, "radius": job.radius}


def cmd_selfint(job: Job) -> Dict[str, Any]:
    c = parse_class(job.args.class_word, job.surface)
    result = self_intersection_result(c, job.surface, job.radius, job.settings)
    report = result.to_dict(job.surface)
    report["self_intersection"] = int(result.value) // 2
    return report


def cmd_somewhat_short(job: Job) -> Dict[str, Any]:
    mu = job.current(job.args.current)
    if job.args.endpoints:
        try:
            phi1, phi2 = (float(v) for v in job.args.endpoints.split(","))
        except ValueError as e:
            raise InputError(f"--endpoints expects 'phi1,phi2', got {job.args.endpoints!r}") from e
        g = Geodesic.from_angles(phi1, phi2)
    elif job.args.class_word:
        g = axis_geodesic(evaluate(parse_class(job.args.class_word, job.surface).word, job.surface))
    else:
        raise InputError("somewhat-short needs --class or --endpoints")
    kwargs = {"tol": job.tolerance} if job.tolerance is not None else {}
    certificate = somewhat_short(mu, g, job.surface, job.radius, job.settings, **kwargs)
    return certificate.to_dict(job.surface)


def cmd_liouville_check(job: Job) -> Dict[str, Any]:
    classes = enumerate_classes(
        job.surface, job.args.max_len, non_peripheral=False, count_radius=job.count_radius,
        threads=job.threads, settings=job.settings,
    )
    errors = [abs(liouville_length(c, job.surface) - class_length(c, job.surface)) for c in classes]
    worst = max(errors, default=0.0)
    tolerance = job.tolerance if job.tolerance is not None else 1e-9
    return {"classes_checked": len(classes), "max_error": worst, "tolerance": tolerance, "passed": worst < tolerance}


def cmd_systole(job: Job) -> Dict[str, Any]:
    mu = job.current(job.args.current)
    scan = systole_scan(
        mu, job.surface, job.candidate_radius, job.count_radius, job.args.simple_only, job.threads, job.settings
    )
    return scan.to_dict(job.surface)


def cmd_decompose(job: Job) -> Dict[str, Any]:
    mu = job.current(job.args.current)
    report = decompose(mu, job.surface, job.candidate_radius, job.count_radius, job.threads, job.settings)
    graph = support_graph(mu, job.surface, job.count_radius, job.settings)
    result = report.to_dict(job.surface)
    result["support_components"] = [
        [job.surface.format(c.word) for c in comp] for comp in support_components(graph)
    ]
    assigned = sum(p.weight for p in report.pieces) + sum(w for _, w in report.atoms_on_special)
    result["mass_conserved"] = abs(assigned - mu.total_weight) <= 1e-12 * max(1.0, mu.total_weight)
    zero = zero_detector(mu, job.surface, job.candidate_radius, job.count_radius, job.threads, job.settings)
    result["zero_detector"] = zero.to_dict(job.surface)
    _, regions = zero_intersection_graph(mu, job.surface, job.candidate_radius, job.count_radius, job.threads, job.settings)
    result["zero_regions"] = [
        {"classes": [job.surface.format(c.word) for c in r.classes], "somewhat_short_region": r.somewhat_short_region}
        for r in regions
    ]
    if job.args.check_reconstruction:
        result["reconstruction_gap"] = reconstruction_gap(report, job.surface, job.count_radius, job.settings)
    return result


def cmd_surgery(job: Job) -> Dict[str, Any]:
    mu = job.current(job.args.current)
    c = parse_class(job.args.class_word, job.surface)
    return surgery_report(mu, c, job.surface, job.radius, job.settings)


def cmd_simplify(job: Job) -> Dict[str, Any]:
    mu = job.current(job.args.current)
    c = parse_class(job.args.class_word, job.surface)
    max_steps = job.args.max_steps or job.config.get_surgery_max_steps()
    result = simplify_to_simple(mu, c, job.surface, job.radius, max_steps, job.settings)
    report = result.to_dict(job.surface)
    report["intersection_before"] = intersection_number(mu, c, job.surface, job.radius, job.settings).value
    report["intersection_after"] = intersection_number(mu, result.result, job.surface, job.radius, job.settings).value
    return report


def cmd_sphere3_verify(job: Job) -> Dict[str, Any]:
    radius = job.args.radius if job.args.radius is not None else 6
    return sphere3.verify(radius, job.count_radius, threads=job.threads, settings=job.settings)


def _length_table(job: Job) -> LengthTable:
    text = _read_text(job.args.rep_file) if job.args.rep_file else None
    rep = representation_for(job.args.rep, job.surface, job.args.dimension, text)
    classes = enumerate_classes(
        job.surface, job.args.max_len, primitive=True, count_radius=job.count_radius,
        threads=job.threads, settings=job.settings,
    )
    family = job.config.get_filling_family(job.surface.name)
    return length_table(rep, classes, family, normalize=not job.args.no_normalize, threads=job.threads)


def cmd_lengths(job: Job) -> Dict[str, Any]:
    return _length_table(job).to_dict(job.surface)


def cmd_trichotomy(job: Job) -> Dict[str, Any]:
    if job.args.table_file:
        try:
            pairs = json.loads(_read_text(job.args.table_file))
        except json.JSONDecodeError as e:
            raise InputError(f"Length table is not valid JSON: {e}") from e
        table = LengthTable.from_pairs(pairs, job.surface)
    else:
        table = _length_table(job)
    zero_tol = job.tolerance if job.tolerance is not None else job.config.get_zero_tolerance()
    report = trichotomy_classify(table, job.surface, job.count_radius, job.settings, zero_tol)
    return report.to_dict(job.surface)


def cmd_enumerate(job: Job) -> Dict[str, Any]:
    classes = enumerate_classes(
        job.surface, job.args.max_len, non_peripheral=not job.args.include_peripheral,
        primitive=job.args.primitive, simple=job.args.simple_only, count_radius=job.count_radius,
        threads=job.threads, settings=job.settings,
    )
    return {
        "count": len(classes),
        "classes": [{"class": job.surface.format(c.word), "length": class_length(c, job.surface)} for c in classes],
    }


COMMANDS: Dict[str, Callable[[Job], Dict[str, Any]]] = {
    "intersect": cmd_intersect,
    "pairing": cmd_pairing,
    "selfint": cmd_selfint,
    "somewhat-short": cmd_somewhat_short,
    "liouville-check": cmd_liouville_check,
    "systole": cmd_systole,
    "decompose": cmd_decompose,
    "surgery": cmd_surgery,
    "simplify": cmd_simplify,
    "sphere3-verify": cmd_sphere3_verify,
    "lengths": cmd_lengths,
    "trichotomy": cmd_trichotomy,
    "enumerate": cmd_enumerate,
}


def _load_config(path: str) -> ConfigLoader:
    ConfigLoader.reset()
    try:
        return load_config(path)
    except FileNotFoundError:
        if path != "config.yaml":
            raise InputError(f"Configuration file not found: {path}")
        return ConfigLoader.from_mapping({})


def _emit(report: Dict[str, Any], output_format: str, output: Optional[str], stream: TextIO) -> None:
    problems = validate_report(report)
    if problems:
        logger.error(f"Report does not match the published layout: {problems}")
    text = export_to_json(report) if output_format == "json" else export_to_markdown(report)
    if output:
        path = save_export_file(text, output, output_format)
        logger.info(f"Report written to {path}")
    else:
        stream.write(text + "\n")


def _error_result(e: Exception) -> Dict[str, Any]:
    return {
        "error": {
            "type": type(e).__name__,
            "message": str(e),
            "diagnostics": getattr(e, "diagnostics", {}),
        }
    }


def run(args: argparse.Namespace, stream: TextIO = sys.stdout) -> int:
    """
    Execute one parsed command and emit its report.

    Returns:
        Process exit status
    """
    start = time.perf_counter()
    output_format = args.format or "json"
    config_echo: Dict[str, Any] = {"command": args.command}
    try:
        config = _load_config(args.config)
        setup_from_config(config.get_logging_config(), level=args.log_level)
        job = Job(args, config)
        output_format = job.output_format
        config_echo = job.to_dict()
        logger.info(f"Running {args.command} on {job.surface.name}")
        result = COMMANDS[args.command](job)
        status = 0
    except CurrentKitError as e:
        logger.error(f"{type(e).__name__}: {e}", exc_info=True)
        result = _error_result(e)
        status = e.exit_code
    except (yaml.YAMLError, ValueError) as e:
        logger.error(f"Invalid input: {type(e).__name__}: {e}")
        result = _error_result(e)
        status = InputError.exit_code
    report = build_report(args.command, config_echo, result, time.perf_counter() - start)
    _emit(report, output_format, args.output, stream)
    return status


def main(argv: Optional[List[str]] = None, stream: TextIO = sys.stdout) -> int:
    """Parse arguments, run the command and return its exit status."""
    try:
        load_dotenv()
    except Exception as e:
        print(f"Note: Could not load .env file: {str(e)}", file=sys.stderr)
    args = build_parser().parse_args(argv)
    return run(args, stream)


if __name__ == "__main__":
    sys.exit(main())
