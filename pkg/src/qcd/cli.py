"""Command-line front end: `qcd <command> [options]`.

Every verdict printed here comes from a library call. Data goes to stdout
(or --out), diagnostics to stderr.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence

from banded import BandedOperator, WeightRule
from bundles import (
    JetSection,
    derivative_identity_check,
    frame_from_right_inverse,
    gram_data,
    operator_equivalence,
    rigidity_check,
)
from canonical import (
    ad_theta_equivalent,
    canonical_matrix,
    complex_rep_equivalence,
    curvature_grid,
    disc_grid,
    order_stability,
)
from catalog import CNDU_BASE, TCI_EXPECTED, TCI_REGIONS, cndu_pair, cndu_section, tci_operator
from config import RunConfig, load_run_config
from errors import ConfigError, QcdError
from logger import ConsoleLoggerFactory, LoggerFactory, set_default_factory
from qcore import parse, reduced_complex
from qlinalg import QMatrix
from reporting import (
    CANONICAL_HEADER,
    CURVATURE_HEADER,
    SHIFT_HEADER,
    SPECTRUM_HEADER,
    TCI_HEADER,
    as_matrix,
    canonical_rows,
    curvature_rows,
    dump_csv,
    dump_json,
    emit,
    load_operator,
    shift_rows,
    spectrum_rows,
    tci_rows,
)
from shifts import bn_probe, rsp
from spectra import right_eigen_classes, s_point_membership
from suite import run_suite

SAME_CURVATURE_TOL = 1e-8


@dataclass
class CommandOutput:
    payload: Dict[str, Any]
    header: Optional[List[str]] = None
    rows: List[List[Any]] = field(default_factory=list)
    exit_code: int = 0


def parse_tolerances(items: Optional[Sequence[str]]) -> Dict[str, float]:
    tolerances = {}
    for item in items or []:
        name, sep, value = item.partition("=")
        if not sep:
            raise ConfigError(f"--tol expects name=value, got '{item}'")
        try:
            tolerances[name.strip()] = float(value)
        except ValueError as e:
            raise ConfigError(f"tolerance '{name}' is not a number: {value!r}") from e
    return tolerances


def parse_quaternion(text: str, flag: str):
    try:
        return parse(text)
    except ValueError as e:
        raise ConfigError(f"{flag}: cannot parse quaternion '{text}': {e}") from e


def resolve_config(args: argparse.Namespace) -> RunConfig:
    cfg = load_run_config(args.config)
    return cfg.with_overrides(
        n=args.n,
        k=args.k,
        format=args.format,
        seed=args.seed,
        workers=args.workers,
        tolerances=parse_tolerances(args.tol),
    )


def _require(args: argparse.Namespace, *names: str) -> None:
    for name in names:
        if getattr(args, name, None) is None:
            raise ConfigError(f"--{name} is required for '{args.command}'")


def _frame(matrix, cfg: RunConfig, base, factory: LoggerFactory):
    return frame_from_right_inverse(
        matrix, base, cfg.k, cfg.tol("pinv_cutoff"), cfg.tol("gap"), cfg.tol("guard"), cfg.tol("guard_radius"), factory
    )


def run_example(name: str, cfg: RunConfig, logger_factory: Optional[LoggerFactory] = None) -> CommandOutput:
    """Reproduce a worked example: 'tci' (kernel dimensions) or 'cndu' (same curvature, not equivalent)."""
    if name == "tci":
        op = tci_operator()
        sizes = [cfg.n // 2, cfg.n, 2 * cfg.n]
        reports = {
            region: bn_probe(op, samples, sizes, cfg.tol("membership"), cfg.tol("decay"), cfg.workers, logger_factory)
            for region, samples in TCI_REGIONS.items()
        }
        regions = {region: {"n": report.n, "expected": TCI_EXPECTED[region]} for region, report in reports.items()}
        verdict = "; ".join(f"{region}: n={info['n']}" for region, info in regions.items())
        return CommandOutput(
            {"example": "tci", "verdict": verdict, "regions": regions, "sizes": sizes, "rows": tci_rows(reports)},
            TCI_HEADER,
            tci_rows(reports),
        )

    if name == "cndu":
        sections = {which: cndu_section(which, cfg.n) for which in ("t", "t_tilde")}
        grid = curvature_grid(sections, disc_grid(1j, 0.5, 21, min_imag=0.5), cfg.tol("curvature_step"),
                              cfg.workers, logger_factory)
        difference = max(abs(r.samples["t"].value - r.samples["t_tilde"].value) for r in grid)
        formula_difference = max(abs(r.samples["t"].formula_value - r.samples["t_tilde"].formula_value) for r in grid)
        same_curvature = max(difference, formula_difference) < SAME_CURVATURE_TOL

        t, t_tilde = (op.truncate(cfg.n) for op in cndu_pair())
        reps = {
            name: canonical_matrix(matrix, CNDU_BASE, cfg.k, tol=cfg.tol("scalar"), logger_factory=logger_factory)
            for name, matrix in (("t", t), ("t_tilde", t_tilde))
        }
        ad = ad_theta_equivalent(reps["t"], reps["t_tilde"])
        equivalence = operator_equivalence(t, t_tilde, CNDU_BASE, cfg.k, cfg.tol("congruence"),
                                           cfg.tol("intertwine"), cfg.seed, logger_factory)
        complex_rep = complex_rep_equivalence(t, t_tilde, CNDU_BASE, cfg.k, tol=cfg.tol("congruence"),
                                              intertwine_tol=cfg.tol("intertwine"), seed=cfg.seed,
                                              logger_factory=logger_factory)
        stability = order_stability(t, t_tilde, CNDU_BASE, cfg.k, cfg.tol("congruence"), cfg.tol("intertwine"),
                                    cfg.seed, logger_factory)
        verdict = (
            f"same curvature: {str(same_curvature).lower()}; "
            f"quaternion unitarily equivalent: {str(equivalence.equivalent).lower()}"
        )
        rows = curvature_rows(grid)
        return CommandOutput(
            {
                "example": "cndu",
                "verdict": verdict,
                "same_curvature": same_curvature,
                "max_curvature_difference": difference,
                "max_formula_difference": formula_difference,
                "quaternion_unitarily_equivalent": equivalence.equivalent,
                "ad_theta": {"equivalent": ad.equivalent, "theta": ad.theta, "reason": ad.reason},
                "complex_rep_equivalent": complex_rep.equivalent,
                "stable_across_orders": {"orders": stability.orders, "stable": stability.stable},
                "canonical": {which: rep.entries for which, rep in reps.items()},
                "curvature": rows,
            },
            CURVATURE_HEADER,
            rows,
        )

    raise ConfigError(f"unknown example '{name}', expected tci or cndu")


def cmd_spectrum(args, cfg: RunConfig, factory: LoggerFactory) -> CommandOutput:
    _require(args, "operator", "s")
    op = load_operator(args.operator)
    results = [
        s_point_membership(op, parse_quaternion(text, "--s"), cfg.tol("membership"),
                           n=cfg.n if isinstance(op, BandedOperator) else None,
                           decay_tol=cfg.tol("decay"), logger_factory=factory)
        for text in args.s
    ]
    payload = {
        "operator": args.operator,
        "points": [
            {"s": r.s, "sigma_min": r.sigma_min, "kernel_dim_h": r.kernel_dim_H, "member": r.member,
             "surjectivity": r.surjectivity, "method": r.method}
            for r in results
        ],
    }
    if isinstance(op, QMatrix):
        classes = right_eigen_classes(op, cfg.tol("pairing"), factory)
        payload["eigen_classes"] = [q.to_text() for q in classes]
    return CommandOutput(payload, SPECTRUM_HEADER, spectrum_rows(results))


def cmd_shift(args, cfg: RunConfig, factory: LoggerFactory) -> CommandOutput:
    rule = WeightRule.parse(args.weights)
    report = rsp(rule, args.n_max)
    payload = {"weights": rule.name, "n_max": args.n_max, "estimate": report.estimate, "sequence": report.sequence}
    return CommandOutput(payload, SHIFT_HEADER, shift_rows(report.sequence))


def cmd_frame(args, cfg: RunConfig, factory: LoggerFactory) -> CommandOutput:
    _require(args, "operator")
    matrix = as_matrix(load_operator(args.operator), cfg.n)
    base = parse_quaternion(args.base, "--base")
    frame = _frame(matrix, cfg, base, factory)
    table = gram_data(frame)
    payload = {
        "base": frame.base,
        "rank": frame.rank,
        "order": frame.order,
        "spectral_gap": frame.spectral_gap,
        "jets": frame.jets,
        "gram": {"complex_part": table.complex_part, "j_part": table.j_part},
        "derivative_residual": derivative_identity_check(matrix, frame).max_residual,
    }
    return CommandOutput(payload)


def cmd_rigidity(args, cfg: RunConfig, factory: LoggerFactory) -> CommandOutput:
    _require(args, "operator", "other")
    base = parse_quaternion(args.base, "--base")
    first = _frame(as_matrix(load_operator(args.operator), cfg.n), cfg, base, factory)
    second = _frame(as_matrix(load_operator(args.other), cfg.n), cfg, base, factory)
    result = rigidity_check(first, second, cfg.tol("congruence"), factory)
    payload = {
        "congruent": result.congruent,
        "base_deviation": result.base_deviation,
        "full_deviation": result.full_deviation,
        "full_table_agrees": result.full_table_agrees,
        "isometry_residual": result.isometry_residual,
    }
    return CommandOutput(payload)


def cmd_canonical(args, cfg: RunConfig, factory: LoggerFactory) -> CommandOutput:
    _require(args, "operator")
    matrix = as_matrix(load_operator(args.operator), cfg.n)
    base = parse_quaternion(args.base, "--base")
    rep = canonical_matrix(matrix, base, cfg.k, frame=_frame(matrix, cfg, base, factory), tol=cfg.tol("scalar"),
                           logger_factory=factory)
    payload = {
        "base": rep.base,
        "entries": rep.entries,
        "diagonal_residual": rep.diagonal_residual,
        "lower_residual": rep.lower_residual,
    }
    return CommandOutput(payload, CANONICAL_HEADER, canonical_rows(rep))


def cmd_curvature(args, cfg: RunConfig, factory: LoggerFactory) -> CommandOutput:
    base = parse_quaternion(args.base, "--base")
    centre = reduced_complex(base)
    if args.operator is None:
        sections = {which: cndu_section(which, cfg.n) for which in ("t", "t_tilde")}
    else:
        sections = {"t": JetSection(_frame(as_matrix(load_operator(args.operator), cfg.n), cfg, base, factory))}
        if args.other is not None:
            other = as_matrix(load_operator(args.other), cfg.n)
            sections["t_tilde"] = JetSection(_frame(other, cfg, base, factory))
    points = disc_grid(centre, args.radius, args.steps, min_imag=args.min_imag)
    grid = curvature_grid(sections, points, cfg.tol("curvature_step"), cfg.workers, factory)
    rows = curvature_rows(grid)
    return CommandOutput({"centre": centre, "radius": args.radius, "rows": rows}, CURVATURE_HEADER, rows)


def cmd_equiv(args, cfg: RunConfig, factory: LoggerFactory) -> CommandOutput:
    _require(args, "operator", "other")
    base = parse_quaternion(args.base, "--base")
    t1 = as_matrix(load_operator(args.operator), cfg.n)
    t2 = as_matrix(load_operator(args.other), cfg.n)
    options = dict(tol=cfg.tol("congruence"), intertwine_tol=cfg.tol("intertwine"), seed=cfg.seed,
                   logger_factory=factory)
    result = operator_equivalence(t1, t2, base, cfg.k, **options)
    payload: Dict[str, Any] = {
        "quaternion_unitarily_equivalent": result.equivalent,
        "residual": result.residual,
        "reason": result.reason,
    }
    first = _frame(t1, cfg, base, factory)
    if first.rank == 1:
        complex_rep = complex_rep_equivalence(t1, t2, base, cfg.k, **options)
        payload["complex_rep_equivalent"] = complex_rep.equivalent
        payload["theta0"] = complex_rep.theta0
        try:
            rep1 = canonical_matrix(t1, base, cfg.k, frame=first, tol=cfg.tol("scalar"), logger_factory=factory)
            rep2 = canonical_matrix(t2, base, cfg.k, frame=_frame(t2, cfg, base, factory), tol=cfg.tol("scalar"),
                                   logger_factory=factory)
        except QcdError as e:
            factory.create_logger("cli").error(f"canonical comparison skipped: {e}")
        else:
            ad = ad_theta_equivalent(rep1, rep2)
            payload["ad_theta"] = {"equivalent": ad.equivalent, "theta": ad.theta, "reason": ad.reason}
    stability = order_stability(t1, t2, base, cfg.k, options["tol"], options["intertwine_tol"], cfg.seed, factory)
    payload["stable_across_orders"] = {
        "orders": stability.orders,
        "quaternionic": stability.quaternionic,
        "ad_theta": stability.ad_theta,
        "stable": stability.stable,
    }
    return CommandOutput(payload)


def cmd_example(args, cfg: RunConfig, factory: LoggerFactory) -> CommandOutput:
    return run_example(args.name, cfg, factory)


def cmd_suite(args, cfg: RunConfig, factory: LoggerFactory) -> CommandOutput:
    report = run_suite(cfg, factory)
    return CommandOutput(report.summary(), exit_code=report.exit_code)


COMMANDS = {
    "example": cmd_example,
    "suite": cmd_suite,
    "spectrum": cmd_spectrum,
    "shift": cmd_shift,
    "frame": cmd_frame,
    "rigidity": cmd_rigidity,
    "canonical": cmd_canonical,
    "curvature": cmd_curvature,
    "equiv": cmd_equiv,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--n", type=int, help="truncation size N")
    common.add_argument("--k", type=int, help="jet order K")
    common.add_argument("--tol", action="append", metavar="NAME=VALUE", help="override a tolerance (repeatable)")
    common.add_argument("--seed", type=int, help="random seed for fixtures")
    common.add_argument("--workers", type=int, help="thread pool size for sweeps")
    common.add_argument("--format", choices=["json", "csv"], help="output format")
    common.add_argument("--out", help="output file (default stdout)")
    common.add_argument("--config", help="YAML run configuration")

    parser = argparse.ArgumentParser(prog="qcd", description="Quaternionic Cowen-Douglas operator toolkit")
    sub = parser.add_subparsers(dest="command", required=True)

    example = sub.add_parser("example", parents=[common], help="reproduce a worked example")
    example.add_argument("name", choices=["tci", "cndu"])
    sub.add_parser("suite", parents=[common], help="run the acceptance suite")

    spectrum = sub.add_parser("spectrum", parents=[common], help="S-spectrum membership at points")
    spectrum.add_argument("--operator")
    spectrum.add_argument("--s", action="append", help="quaternion point (repeatable)")

    shift = sub.add_parser("shift", parents=[common], help="root products of a weight rule")
    shift.add_argument("--weights", default="const:1")
    shift.add_argument("--n-max", dest="n_max", type=int, default=1000)

    for name, text in (("frame", "jet frame and Gram data"), ("canonical", "canonical matrix at a point")):
        p = sub.add_parser(name, parents=[common], help=text)
        p.add_argument("--operator")
        p.add_argument("--base", default="i")

    for name, text in (("rigidity", "congruence of two frames"), ("equiv", "unitary equivalence of two operators")):
        p = sub.add_parser(name, parents=[common], help=text)
        p.add_argument("--operator")
        p.add_argument("--other")
        p.add_argument("--base", default="i")

    curvature = sub.add_parser("curvature", parents=[common], help="curvature over a disc grid")
    curvature.add_argument("--operator")
    curvature.add_argument("--other")
    curvature.add_argument("--base", default="i")
    curvature.add_argument("--radius", type=float, default=0.5)
    curvature.add_argument("--steps", type=int, default=21)
    curvature.add_argument("--min-imag", dest="min_imag", type=float, default=None)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    factory = ConsoleLoggerFactory(stream=sys.stderr)
    set_default_factory(factory)
    logger = factory.create_logger("cli")
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)

    try:
        cfg = resolve_config(args)
        output = COMMANDS[args.command](args, cfg, factory)
        if cfg.format == "csv":
            if output.header is None:
                raise ConfigError(f"'{args.command}' has no CSV form, use --format json")
            text = dump_csv(output.header, output.rows)
        else:
            text = dump_json(output.payload)
        emit(text, args.out)
    except QcdError as e:
        logger.error(f"{type(e).__name__}: {e}")
        return e.exit_code
    if "verdict" in output.payload:
        logger.log(output.payload["verdict"])
    return output.exit_code


if __name__ == "__main__":
    sys.exit(main())
