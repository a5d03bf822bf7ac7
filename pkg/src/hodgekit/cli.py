"""Command-line entry point.

Data goes to stdout, diagnostics to stderr.  Exit codes: 0 success, 1 a
mathematical check failed (structured reason on stderr), 2 parse/validation
error (JSON diagnostic on stderr).
"""

from __future__ import annotations

import argparse
import json
import sys

from .filtrations import FiltrationError
from .io import (
    RecordError,
    Structure,
    _filtration_to_json,
    load_json,
    matrix_to_json,
    scan_to_csv,
    scan_to_json,
    scenario_from_json,
    structure_from_json,
    structure_to_json,
)
from .linalg import LinAlgError
from .mhs import (
    MHSError,
    Stratum,
    classify_membership,
    deligne_bigrading,
    delta_split,
    mixed_hodge_metric,
)
from .orbits import OrbitError, decay_scan, horizontality_check, orbit_eval
from .scalars import parse_scalar
from .scenarios import UnknownScenario, scenario_list, scenario_run
from .weights import (
    WeightError,
    admissible_pipeline,
    monodromy_filtration,
    relative_weight_filtration,
)


def _emit(payload, args) -> None:
    sys.stdout.write(json.dumps(payload, indent=2, sort_keys=True) + "\n")


def _load_structure(path: str) -> Structure:
    return structure_from_json(load_json(path))


def _need(st: Structure, pol: bool = False, nilpotent: bool = False) -> Structure:
    if pol and st.pol is None:
        raise RecordError("this command needs polarization data in the record")
    if nilpotent and st.n_op is None:
        raise RecordError('this command needs a "nilpotent" block in the record')
    return st


def _pieces_json(big) -> dict:
    return {
        f"{p},{q}": [[str(x) for x in v] for v in s.basis]
        for (p, q), s in sorted(big.pieces.items())
    }


def _derived_blocks(st: Structure) -> dict:
    out = admissible_pipeline(st.f, st.w, st.n_op)
    return {
        "relative_weight_filtration": _filtration_to_json(out.relw.jumps),
        "deligne_grading": {
            "grading": matrix_to_json(out.y),
            "relative_grading": matrix_to_json(out.rel_y),
        },
        "sl2_triple": {
            "n_minus": matrix_to_json(out.triple.n_minus),
            "y": matrix_to_json(out.triple.y),
            "n_plus": matrix_to_json(out.triple.n_plus),
        },
    }


def _cmd_mhs(args) -> int:
    st = _load_structure(args.file)
    if args.action == "check":
        if st.pol is not None:
            stratum = classify_membership(st.f, st.w, st.pol)
            _emit({"membership": stratum.value}, args)
            return 0 if stratum is Stratum.IN_M else 1
        deligne_bigrading(st.f, st.w)
        _emit({"mhs": True}, args)
        return 0
    if args.action == "bigrading":
        big = deligne_bigrading(st.f, st.w)
        _emit(
            {
                "pieces": _pieces_json(big),
                "grading": matrix_to_json(big.grading()),
                "split_real": big.is_split_real(),
            },
            args,
        )
        return 0
    if args.action == "metric":
        _need(st, pol=True)
        gram = mixed_hodge_metric(st.f, st.w, st.pol)
        _emit({"gram": matrix_to_json(gram)}, args)
        return 0
    if args.action == "delta-split":
        delta, f_hat = delta_split(st.f, st.w)
        _emit(
            {
                "delta": matrix_to_json(delta),
                "split_filtration": _filtration_to_json(f_hat.jumps),
            },
            args,
        )
        return 0
    raise RecordError(f"unknown mhs action {args.action!r}")


def _cmd_weights(args) -> int:
    st = _need(_load_structure(args.file), nilpotent=True)
    if args.action == "monodromy":
        m = monodromy_filtration(st.n_op)
        _emit({"monodromy_filtration": _filtration_to_json(m.jumps)}, args)
        return 0
    if args.action == "relative":
        m = relative_weight_filtration(st.n_op, st.w)
        _emit({"relative_weight_filtration": _filtration_to_json(m.jumps)}, args)
        return 0
    blocks = _derived_blocks(st)
    if args.action == "sl2":
        _emit({"sl2_triple": blocks["sl2_triple"]}, args)
        return 0
    if args.action == "deligne-grading":
        _emit({"deligne_grading": blocks["deligne_grading"]}, args)
        return 0
    if args.action == "admissible":
        record = structure_to_json(st)
        record.update(blocks)
        _emit(record, args)
        return 0
    raise RecordError(f"unknown weights action {args.action!r}")


def _cmd_orbit(args) -> int:
    if args.action == "eval":
        st = _need(_load_structure(args.file), nilpotent=True)
        z = parse_scalar(args.z)
        moved = orbit_eval(st.f, st.n_op, z)
        _emit({"hodge_filtration": _filtration_to_json(moved.jumps)}, args)
        return 0
    sc = scenario_from_json(load_json(args.file))
    if args.action == "horizontality":
        ok, witness = horizontality_check(sc)
        _emit({"horizontal": ok, "witness": witness}, args)
        return 0 if ok else 1
    if args.action == "scan":
        exact = True if args.exact else None
        result = decay_scan(sc, tolerance=args.tolerance, exact=exact)
        is_exact = exact if exact is not None else sc.sample_kind == "s_abs"
        if args.format == "csv":
            sys.stdout.write(scan_to_csv(result, is_exact))
            sys.stderr.write(
                json.dumps(
                    {
                        "slope": result.slope,
                        "log_coeff": result.log_coeff,
                        "intercept": result.intercept,
                    }
                )
                + "\n"
            )
        else:
            _emit(scan_to_json(result, is_exact), args)
        if args.plot:
            from .plotting import render_scan

            render_scan(result, args.plot, title=sc.name)
            sys.stderr.write(json.dumps({"figure": args.plot}) + "\n")
        return 0
    raise RecordError(f"unknown orbit action {args.action!r}")


def _cmd_scenario(args) -> int:
    if args.action == "list":
        _emit(scenario_list(), args)
        return 0
    if args.action == "run":
        report = scenario_run(args.name)
        _emit(report, args)
        return 0 if report.get("passed", False) else 1
    raise RecordError(f"unknown scenario action {args.action!r}")


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hodgekit",
        description="Exact computations with filtered structures and decay scans.",
    )
    parser.add_argument("--format", choices=["json", "csv"], default="json")
    parser.add_argument("--tolerance", type=float, default=1e-12)
    parser.add_argument("--exact", action="store_true", help="force the exact scan path")
    sub = parser.add_subparsers(dest="command", required=True)

    p_mhs = sub.add_parser("mhs", help="filtration-pair computations")
    p_mhs.add_argument("action", choices=["check", "bigrading", "metric", "delta-split"])
    p_mhs.add_argument("file")
    p_mhs.set_defaults(func=_cmd_mhs)

    p_w = sub.add_parser("weights", help="weight-filtration machinery")
    p_w.add_argument(
        "action",
        choices=["monodromy", "relative", "sl2", "deligne-grading", "admissible"],
    )
    p_w.add_argument("file")
    p_w.set_defaults(func=_cmd_weights)

    p_o = sub.add_parser("orbit", help="orbit evaluation and decay scans")
    p_o.add_argument("action", choices=["eval", "scan", "horizontality"])
    p_o.add_argument("file")
    p_o.add_argument("--z", default="i", help='evaluation point, e.g. "1/2+2i"')
    p_o.add_argument("--plot", metavar="PATH", help="also render the scan to a figure file")
    p_o.set_defaults(func=_cmd_orbit)

    p_s = sub.add_parser("scenario", help="bundled scenario suites")
    p_s.add_argument("action", choices=["list", "run"])
    p_s.add_argument("name", nargs="?", default="all")
    p_s.set_defaults(func=_cmd_scenario)

    return parser


def run(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return 2 if e.code not in (0, None) else 0
    try:
        return args.func(args)
    except (RecordError, FiltrationError, ValueError) as e:
        sys.stderr.write(json.dumps({"error": str(e), "kind": "parse"}) + "\n")
        return 2
    except UnknownScenario as e:
        sys.stderr.write(json.dumps({"error": str(e), "kind": "unknown-scenario"}) + "\n")
        return 2
    except (MHSError, WeightError, OrbitError, LinAlgError) as e:
        reason = {"error": str(e), "kind": "math", "type": type(e).__name__}
        clause = getattr(e, "clause", None)
        if clause is not None:
            reason["clause"] = clause
        sys.stderr.write(json.dumps(reason) + "\n")
        return 1


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
