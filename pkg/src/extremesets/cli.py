"""Command-line interface.

Every subcommand prints a short human report, or one JSON record per result
with ``--json``.  Machine output is byte-stable across runs unless
``--timing`` is given.

Exit codes: 0 extreme found / ok, 2 usage error, 3 not extreme, 4 inconclusive.
"""
from __future__ import annotations

import argparse
import json
import logging
import math
import sys
import time
from fractions import Fraction

from . import catalog as cat
from .cyclotomic import exact_extremality_check
from .equivalence import enumerate_class_representatives, uses_full_automorphism_group
from .groups import GroupSpec, format_element, format_elements, parse_elements, parse_group
from .measures import PhaseMeasure, dual_measure, format_turn, is_extreme_numeric, parse_masses, sup_transform
from .search import (
    CertifiedNotExtreme,
    ExtremeFound,
    Inconclusive,
    Objective,
    SearchConfig,
    coefficient_certificate,
    psc_lower_bound,
    run_search,
)
from .structure import coset_union_decomposition, passes_difference_test, sumset_decomposition

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_NOT_EXTREME = 3
EXIT_INCONCLUSIVE = 4


class UsageError(Exception):
    pass


class Output:
    """Collects records and renders them in human or machine form."""

    def __init__(self, as_json: bool, timing: bool):
        self.as_json = as_json
        self.timing = timing

    def emit(self, command: str, inputs: dict, verdict, bounds=None, witness=None,
             seconds: float | None = None, details=None, text: str = "") -> None:
        if self.as_json:
            record = {
                "command": command,
                "inputs": inputs,
                "verdict": verdict,
                "bounds": bounds,
                "witness": witness,
                "timing": {"seconds": round(seconds, 3)} if self.timing and seconds is not None else None,
            }
            if details is not None:
                record["details"] = _strip_timing(details) if not self.timing else details
            print(json.dumps(record, sort_keys=True))
        else:
            print(text)
            if self.timing and seconds is not None:
                print(f"  time: {seconds:.3f}s")


def _strip_timing(obj):
    if isinstance(obj, dict):
        return {k: _strip_timing(v) for k, v in obj.items() if k != "seconds"}
    if isinstance(obj, list):
        return [_strip_timing(v) for v in obj]
    return obj


# -- argument helpers ------------------------------------------------------------


def _group(args) -> GroupSpec:
    if not getattr(args, "group", None):
        raise UsageError("--group is required")
    return parse_group(args.group)


def _set(args, G: GroupSpec) -> list:
    if not getattr(args, "set", None):
        raise UsageError("--set is required")
    return parse_elements(G, args.set)


def _measure(args, G: GroupSpec) -> PhaseMeasure:
    points = _set(args, G)
    if getattr(args, "masses", None):
        turns, mags = parse_masses(args.masses)
    else:
        turns, mags = (Fraction(0),) * len(points), ()
    if len(turns) != len(points):
        raise UsageError(f"{len(points)} points but {len(turns)} masses")
    return PhaseMeasure(G, tuple(points), turns, mags)


def _representatives(args, G: GroupSpec) -> list[tuple]:
    if getattr(args, "set", None):
        return [tuple(_set(args, G))]
    if args.size is None:
        raise UsageError("give --set or --size")
    return [c.representative for c in enumerate_class_representatives(G, args.size)]


def _config(args, objective: Objective | None = None) -> SearchConfig:
    return SearchConfig(
        mesh_start=args.mesh_start,
        mesh_max=args.mesh_max,
        refinement_factor=args.refinement_factor,
        precision=args.precision,
        memory_budget=args.ram_mb << 20,
        objective=objective or Objective.parse(args.objective),
        workers=args.threads,
        checkpoint=args.checkpoint,
    )


def _measure_inputs(mu: PhaseMeasure) -> dict:
    inputs = {
        "group": mu.group.literal(),
        "set": format_elements(mu.points),
        "masses": ",".join(format_turn(t) for t in mu.turns),
    }
    if not mu.is_unimodular:
        inputs["magnitudes"] = ",".join(str(m) for m in mu.magnitudes)
    return inputs


# -- subcommands -------------------------------------------------------------------


def cmd_verify(args, out: Output) -> int:
    G = _group(args)
    mu = _measure(args, G)
    t0 = time.perf_counter()
    verdict = exact_extremality_check(mu)
    sup = sup_transform(mu)
    seconds = time.perf_counter() - t0
    bounds = {"sup_transform": round(sup, 12), "sqrt_size": round(math.sqrt(mu.size), 12)}
    witness = None
    if not verdict.extreme:
        witness = {
            "element": format_element(verdict.witness),
            "exponents": [str(t) for t in verdict.coefficient.exponents()],
        }
    name = "Extreme" if verdict.extreme else "NotExtreme"
    out.emit("verify", _measure_inputs(mu), name, bounds, witness, seconds,
             text=f"{verdict.describe()}\n  max |transform| = {sup:.12g}, sqrt(N) = {math.sqrt(mu.size):.12g}")
    return EXIT_OK if verdict.extreme else EXIT_NOT_EXTREME


def _search_record(report) -> tuple[str, dict, dict | None]:
    v = report.verdict
    bounds = {
        "best_value": report.best_value,
        "kept": report.kept,
        "discarded": report.discarded,
        "mesh_reached": report.mesh_reached,
    }
    witness = None
    if isinstance(v, ExtremeFound):
        witness = {"set": format_elements(v.measure.points), "masses": ",".join(format_turn(t) for t in v.measure.turns)}
    elif isinstance(v, CertifiedNotExtreme):
        bounds.update(lower_bound=v.lower_bound, epsilon=v.epsilon_used, certificate_mesh=v.mesh)
    return v.name, bounds, witness


def _exit_for(verdict) -> int:
    if isinstance(verdict, ExtremeFound):
        return EXIT_OK
    if isinstance(verdict, CertifiedNotExtreme):
        return EXIT_NOT_EXTREME
    return EXIT_INCONCLUSIVE


def cmd_search(args, out: Output) -> int:
    G = _group(args)
    E = _set(args, G)
    config = _config(args)
    t0 = time.perf_counter()
    report = run_search(G, E, config)
    seconds = time.perf_counter() - t0
    name, bounds, witness = _search_record(report)
    inputs = {
        "group": G.literal(),
        "set": format_elements(report.set),
        "objective": config.objective.value,
        "mesh_start": config.mesh_start,
        "mesh_max": config.mesh_max,
    }
    lines = [f"{name} on {format_elements(report.set)} in Z({G.literal()})"]
    if witness:
        lines.append(f"  masses {witness['masses']}")
    if isinstance(report.verdict, CertifiedNotExtreme):
        lines.append(f"  min score {report.verdict.lower_bound:.9g} exceeds window {report.verdict.epsilon_used:.9g}"
                     f" at mesh {report.verdict.mesh}")
    elif isinstance(report.verdict, Inconclusive):
        lines.append(f"  {report.verdict.reason}")
    lines.append(f"  best {report.best_value:.9g}, mesh {report.mesh_reached}, discarded {report.discarded}")
    out.emit("search", inputs, name, bounds, witness, seconds, {"passes": report.passes}, "\n".join(lines))
    return _exit_for(report.verdict)


def cmd_psc(args, out: Output) -> int:
    """Transform-objective search on each class representative, plus optional
    rigorous certificates."""
    G = _group(args)
    config = _config(args, Objective.TRANSFORM)
    for E in _representatives(args, G):
        t0 = time.perf_counter()
        report = run_search(G, E, config)
        bounds = {"upper_bound": report.best_value, "mesh_reached": report.mesh_reached,
                  "discarded": report.discarded}
        details = {"passes": report.passes}
        verdict = "Inconclusive"
        if args.lower_bound is not None:
            lb = psc_lower_bound(G, E, args.lower_bound, memory_budget=config.memory_budget)
            bounds.update(lower_bound=lb.lower_bound, lower_bound_target=lb.target,
                          lower_bound_discarded=lb.discarded)
            details["lower_bound_passes"] = lb.passes
            if lb.lower_bound > math.sqrt(len(E)):
                verdict = "CertifiedNotExtreme"
        if args.certify:
            cert = coefficient_certificate(G, E, memory_budget=config.memory_budget)
            bounds.update(coefficient_certified=cert.certified, coefficient_bound=cert.bound,
                          coefficient_mesh=cert.final_mesh)
            details["certificate_passes"] = cert.passes
            if cert.certified:
                verdict = "CertifiedNotExtreme"
        if report.best_measure is not None and exact_extremality_check(report.best_measure).extreme:
            verdict = "ExtremeFound"
        seconds = time.perf_counter() - t0
        text = f"{format_elements(E)}: PSC <= {report.best_value:.9g}"
        if "lower_bound" in bounds:
            text += f", PSC >= {bounds['lower_bound']:.9g}"
        if "coefficient_certified" in bounds:
            text += f", coefficient certificate {'holds' if bounds['coefficient_certified'] else 'failed'}"
        out.emit("psc", {"group": G.literal(), "set": format_elements(E), "mesh_max": config.mesh_max},
                 verdict, bounds, None, seconds, details, text)
    return EXIT_OK


def cmd_classes(args, out: Output) -> int:
    G = _group(args)
    if args.size is None:
        raise UsageError("--size is required")
    t0 = time.perf_counter()
    reps = enumerate_class_representatives(G, args.size)
    if args.filter == "difference":
        reps = [c for c in reps if passes_difference_test(G, c.representative)]
    seconds = time.perf_counter() - t0
    inputs = {"group": G.literal(), "size": args.size, "filter": args.filter}
    for c in reps:
        out.emit("classes", inputs, "class", None, None, None,
                 {"representative": format_elements(c.representative), "exact": c.exact},
                 format_elements(c.representative))
    exact = uses_full_automorphism_group(G)
    out.emit("classes", inputs, "count", {"count": len(reps)}, None, seconds, {"exact": exact},
             f"{len(reps)} classes" + ("" if exact else " (automorphisms only partly generated)"))
    return EXIT_OK


def cmd_filter(args, out: Output) -> int:
    G = _group(args)
    inputs = {"group": G.literal(), "size": args.size, "set": args.set}
    passed = 0
    for E in _representatives(args, G):
        ok = passes_difference_test(G, E)
        passed += ok
        out.emit("filter", {**inputs, "set": format_elements(E)}, "pass" if ok else "fail", None, None, None,
                 text=f"{format_elements(E)}  {'pass' if ok else 'fail'}")
    return EXIT_OK


def cmd_decompose(args, out: Output) -> int:
    G = _group(args)
    E = _set(args, G)
    cosets = coset_union_decomposition(G, E)
    sums = sumset_decomposition(G, E)
    details = {
        "coset_union": None if cosets is None else {
            "subgroup": format_elements(cosets[0].elements),
            "representatives": format_elements(cosets[1]),
        },
        "sumsets": [{"A": format_elements(A), "B": format_elements(B)} for A, B in sums],
    }
    lines = []
    if cosets is None:
        lines.append("not a union of N cosets of an N-element subgroup")
    else:
        lines.append(f"cosets of {{{format_elements(cosets[0].elements)}}} at {format_elements(cosets[1])}")
    lines += [f"sumset {{{format_elements(A)}}} + {{{format_elements(B)}}}" for A, B in sums]
    if not sums:
        lines.append("no sumset decomposition")
    out.emit("decompose", {"group": G.literal(), "set": format_elements(E)},
             "decomposed" if cosets or sums else "indecomposable", None, None, None, details, "\n".join(lines))
    return EXIT_OK


def cmd_dual(args, out: Output) -> int:
    G = _group(args)
    mu = _measure(args, G)
    nu = dual_measure(mu)
    values = [complex(round(v.real, 12) + 0.0, round(v.imag, 12) + 0.0) for v in nu.values]
    extreme = is_extreme_numeric(nu)
    details = {"scale": nu.metadata["scale_text"], "masses": [[v.real, v.imag] for v in values]}
    text = "\n".join(f"{format_element(G.element(i))}: {v.real:+.12f} {v.imag:+.12f}i" for i, v in enumerate(values))
    text += f"\ndual measure is {'extreme' if extreme else 'not extreme'}"
    out.emit("dual", _measure_inputs(mu), "Extreme" if extreme else "NotExtreme", None, None, None, details, text)
    return EXIT_OK if extreme else EXIT_NOT_EXTREME


def cmd_catalog(args, out: Output) -> int:
    entries = cat.load_catalog(args.catalog)
    if args.provenance:
        entries = cat.filter_provenance(entries, args.provenance)
    if args.action == "list":
        for e in entries:
            for m in e.measures:
                line = cat.format_measure_line(e, m)
                out.emit("catalog list", {"catalog": args.catalog}, "entry", None, None, None, {"line": line}, line)
        return EXIT_OK
    t0 = time.perf_counter()
    summary = cat.verify_all(entries, args.threads)
    seconds = time.perf_counter() - t0
    record = summary.to_record()
    text = [f"{summary.verified} of {summary.measures} measures verified in {summary.entries} entries; "
            f"{len(summary.expected_failures)} entries with annotated failures"]
    for r in summary.unexpected:
        text.append(f"UNEXPECTED {r.entry.group.literal()} {format_elements(r.entry.set)}")
    out.emit("catalog verify-all", {"catalog": args.catalog, "provenance": args.provenance},
             "ok" if summary.ok else "failed", {k: record[k] for k in ("entries", "measures", "verified", "expected_failures")},
             record["unexpected"] or None, seconds, None, "\n".join(text))
    return EXIT_OK if summary.ok else EXIT_NOT_EXTREME


# -- parser ----------------------------------------------------------------------------


def _common(suppress: bool) -> argparse.ArgumentParser:
    d = argparse.SUPPRESS if suppress else None
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--group", default=d, help="cyclic orders, e.g. 12 or 2,4")
    p.add_argument("--set", default=d, help="elements, e.g. 0,1,2,4 or (0,1);(1,3)")
    p.add_argument("--masses", default=d, help="turns p/q aligned with --set, or mag:turn pairs")
    p.add_argument("--json", action="store_true", default=d if suppress else False, help="machine-readable output")
    p.add_argument("--timing", action="store_true", default=d if suppress else False, help="report wall-clock times")
    p.add_argument("--threads", type=int, default=d if suppress else 1)
    p.add_argument("--checkpoint", default=d, help="resumable search state file")
    p.add_argument("-v", "--verbose", action="store_true", default=d if suppress else False)
    return p


def _search_options(p: argparse.ArgumentParser, mesh_max: int = 64) -> None:
    p.add_argument("--mesh-start", type=int)
    p.add_argument("--mesh-max", type=int, default=mesh_max)
    p.add_argument("--refinement-factor", type=int, default=2)
    p.add_argument("--precision", type=float, default=1e-7)
    p.add_argument("--ram-mb", type=int, default=1024)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="extremesets", parents=[_common(False)],
                                     description="Search for and verify extreme measures on finite abelian groups.")
    sub = parser.add_subparsers(dest="command", required=True)
    common = [_common(True)]

    p = sub.add_parser("verify", parents=common, help="exact check of a measure")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("search", parents=common, help="grid search for an extreme measure on a set")
    _search_options(p)
    p.add_argument("--objective", default="residual", help="residual (findx) or transform (findbest)")
    p.set_defaults(func=cmd_search)

    p = sub.add_parser("psc", parents=common, help="bounds on the pseudo-Sidon constant")
    _search_options(p, mesh_max=256)
    p.add_argument("--size", type=int)
    p.add_argument("--lower-bound", type=float, metavar="TARGET",
                   help="run branch and bound for a rigorous lower bound, aiming at TARGET")
    p.add_argument("--certify", action="store_true", help="run the per-coefficient certificate")
    p.set_defaults(func=cmd_psc)

    p = sub.add_parser("classes", parents=common, help="representatives of subset classes")
    p.add_argument("--size", type=int)
    p.add_argument("--filter", choices=["difference"])
    p.set_defaults(func=cmd_classes)

    p = sub.add_parser("filter", parents=common, help="difference test on class representatives")
    p.add_argument("--size", type=int)
    p.set_defaults(func=cmd_filter)

    p = sub.add_parser("decompose", parents=common, help="coset-union and sumset decompositions")
    p.set_defaults(func=cmd_decompose)

    p = sub.add_parser("dual", parents=common, help="dual of a measure on the whole group")
    p.set_defaults(func=cmd_dual)

    p = sub.add_parser("catalog", parents=common, help="the shipped catalog of extreme measures")
    p.add_argument("action", choices=["verify-all", "list"])
    p.add_argument("--catalog", help="catalog file (default: shipped catalog)")
    p.add_argument("--provenance", help="only measures with this source label")
    p.set_defaults(func=cmd_catalog)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s", stream=sys.stderr)
    out = Output(args.json, args.timing)
    try:
        return args.func(args, out)
    except (UsageError, ValueError) as exc:
        print(f"extremesets {args.command}: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
