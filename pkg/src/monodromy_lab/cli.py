"""Command-line surface: JSON in, JSON/CSV out.

Exit codes: 0 success or positive verdict; 1 negative mathematical verdict
(not admissible, no relative filtration, membership violation, tolerance
missed); 2 malformed input.
"""

from __future__ import annotations

import argparse
import csv
import io
import sys
from fractions import Fraction
from importlib import resources

from . import io_json
from .asymptotics import BoundarySetup, sweep
from .cones import check_admissible
from .deligne import build_sl2_data, deligne_splitting
from .direct_images import check_prop68, cohomology, check_AY_membership, lefschetz_is_isomorphism
from .errors import MonodromyLabError, SchemaError
from .logpoint import check_membership, classification_isomorphism, is_semisimple, is_simple
from .monodromy import rmf
from .ratios import RatioPath, geometric_schedule, path_samples, psi

EXIT_OK = 0
EXIT_NEGATIVE = 1
EXIT_INPUT = 2


def _read_document(args) -> dict:
    if getattr(args, "preset", None):
        ref = resources.files("monodromy_lab").joinpath(f"presets/{args.preset}.json")
        if not ref.is_file():
            raise SchemaError(f"unknown preset {args.preset!r}")
        return io_json.loads(ref.read_text())
    if not getattr(args, "infile", None):
        raise SchemaError("one of --in or --preset is required")
    try:
        with open(args.infile, "r", encoding="utf-8") as handle:
            return io_json.loads(handle.read())
    except OSError as exc:
        raise SchemaError(f"cannot read {args.infile}: {exc}") from exc


def _emit(args, text: str):
    if getattr(args, "out", None):
        with open(args.out, "w", encoding="utf-8", newline="") as handle:
            handle.write(text)
    else:
        sys.stdout.write(text)


def _expect_kind(doc, kind):
    if doc.get("kind") != kind:
        raise SchemaError(f"expected a {kind!r} document, got {doc.get('kind')!r}")


def cmd_check(args) -> int:
    doc = _read_document(args)
    _expect_kind(doc, "logpoint_object")
    obj = io_json.logpoint_object_from_json(doc)
    report = check_membership(obj)
    payload = {
        "format": io_json.FORMAT,
        "kind": "membership_report",
        "ok": bool(report),
        "violations": report.violations,
        "notes": report.notes,
    }
    if report.family is not None:
        payload["family"] = [
            {"face_rays": [list(r) for r in face.rays],
             "filtration": io_json.filtration_to_json(filt)}
            for face, filt in report.family.items()
        ]
    _emit(args, io_json.dumps(payload))
    return EXIT_OK if report else EXIT_NEGATIVE


def cmd_classify(args) -> int:
    doc = _read_document(args)
    _expect_kind(doc, "logpoint_object")
    obj = io_json.logpoint_object_from_json(doc)
    report = check_membership(obj)
    if not report:
        _emit(args, io_json.dumps({
            "format": io_json.FORMAT, "kind": "classification",
            "ok": False, "violations": report.violations,
        }))
        return EXIT_NEGATIVE
    parts, model, iso = classification_isomorphism(obj)
    from .linalg import kernel as mat_kernel

    bijective = model.dim == obj.dim and (obj.dim == 0 or mat_kernel(iso).dim == 0)
    payload = {
        "format": io_json.FORMAT,
        "kind": "classification",
        "ok": bool(bijective),
        "parts": [{"r": r, "rank": f.rows, "frobenius": io_json.matrix_to_json(f)}
                  for r, f in parts],
        "simple": is_simple(obj) if obj.weights.jumps() and len(obj.weights.jumps()) == 1 else False,
        "semisimple": bijective and all_parts_semisimple(parts),
    }
    _emit(args, io_json.dumps(payload))
    return EXIT_OK if bijective else EXIT_NEGATIVE


def all_parts_semisimple(parts) -> bool:
    from .linalg import is_semisimple_operator

    return all(f.rows == 0 or is_semisimple_operator(f) for _, f in parts)


def cmd_rmf(args) -> int:
    doc = _read_document(args)
    _expect_kind(doc, "rmf_problem")
    field, filt, nil = io_json.rmf_problem_from_json(doc)
    result = rmf(filt, nil)
    if result is None:
        _emit(args, io_json.dumps({
            "format": io_json.FORMAT, "kind": "rmf_result", "exists": False,
        }))
        return EXIT_NEGATIVE
    payload = {
        "format": io_json.FORMAT,
        "kind": "rmf_result",
        "exists": True,
        "jumps": [{"weight": w, "dimension": s.dim} for w, s in result.steps],
        "filtration": io_json.filtration_to_json(result),
    }
    _emit(args, io_json.dumps(payload))
    return EXIT_OK


def cmd_check_admissible(args) -> int:
    doc = _read_document(args)
    _expect_kind(doc, "cone_action")
    action = io_json.cone_action_from_json(doc)
    result = check_admissible(action)
    if not result:
        _emit(args, io_json.dumps({
            "format": io_json.FORMAT, "kind": "admissibility",
            "admissible": False, "condition": result.condition,
            "faces": [[list(r) for r in f.rays] for f in result.faces],
            "detail": result.detail,
        }))
        return EXIT_NEGATIVE
    payload = {
        "format": io_json.FORMAT,
        "kind": "admissibility",
        "admissible": True,
        "family": [
            {"face_rays": [list(r) for r in face.rays],
             "filtration": io_json.filtration_to_json(filt)}
            for face, filt in result.items()
        ],
    }
    _emit(args, io_json.dumps(payload))
    return EXIT_OK


def cmd_deligne_split(args) -> int:
    doc = _read_document(args)
    _expect_kind(doc, "deligne_splitting_problem")
    nil, weights, relative, grading = io_json.deligne_splitting_problem_from_json(doc)
    split = deligne_splitting(nil, weights, relative, grading)
    _emit(args, io_json.dumps({
        "format": io_json.FORMAT, "kind": "deligne_splitting",
        "splitting": io_json.splitting_to_json(split),
    }))
    return EXIT_OK


def cmd_sl2_data(args) -> int:
    doc = _read_document(args)
    _expect_kind(doc, "deligne_system")
    system = io_json.deligne_system_from_json(doc)
    data = build_sl2_data(system)
    _emit(args, io_json.dumps({
        "format": io_json.FORMAT,
        "kind": "sl2_data",
        "gradings": [io_json.splitting_to_json(g) for g in data.gradings],
        "nhats": [io_json.matrix_to_json(m) for m in data.nhats],
    }))
    return EXIT_OK


def _parse_schedule(spec: str):
    if not spec.startswith("geometric:"):
        raise SchemaError("schedule must look like geometric:BASE")
    try:
        base = Fraction(spec.split(":", 1)[1])
    except ValueError as exc:
        raise SchemaError(f"bad schedule base: {exc}") from exc
    return base


def cmd_ratios(args) -> int:
    doc = _read_document(args)
    _expect_kind(doc, "ratio_point")
    point = io_json.ratio_point_from_json(doc)
    payload = {
        "format": io_json.FORMAT,
        "kind": "ratio_report",
        "length": point.length,
        "rank_one": point.is_rank_one(),
        "markers": [list(m) for m in point.markers()],
        "witnesses": [[str(x) for x in w] for w in point.witnesses],
    }
    if args.evaluate:
        f = tuple(int(x) for x in args.evaluate[0].split(","))
        g = tuple(int(x) for x in args.evaluate[1].split(","))
        val = point.evaluate(f, g)
        payload["evaluation"] = {"f": list(f), "g": list(g),
                                 "value": "inf" if val == float("inf") else str(val)}
    if args.samples:
        base = _parse_schedule(args.schedule)
        path = RatioPath(point, geometric_schedule(point.length, base, args.samples))
        gens = point.monoid.generators
        sampled = []
        for nu, ys in path_samples(path):
            pairs = {}
            for i, fgen in enumerate(gens):
                for j, ggen in enumerate(gens):
                    if i != j:
                        v = nu.evaluate(fgen, ggen)
                        pairs[f"r(g{i},g{j})"] = "inf" if v == float("inf") else str(v)
            sampled.append({"ys": [str(y) for y in ys], "values": pairs})
        payload["samples"] = sampled
    _emit(args, io_json.dumps(payload))
    return EXIT_OK


def cmd_asymptote(args) -> int:
    doc = _read_document(args)
    _expect_kind(doc, "asymptote_setup")
    obj, mu = io_json.asymptote_setup_from_json(doc)
    setup = BoundarySetup(obj, mu)
    base = _parse_schedule(args.schedule)
    path = RatioPath(mu, geometric_schedule(mu.length, base, args.decades))
    rows = sweep(setup, path)
    n = mu.length
    if args.format == "json":
        payload = {
            "format": io_json.FORMAT,
            "kind": "convergence_table",
            "limit": io_json.matrix_to_json(setup.limit_operator()),
            "rows": [
                {"ys": [str(y) for y in r.ys],
                 "ratios": [str(c) for c in r.ratios],
                 "distance": io_json.float_repr(r.distance)}
                for r in rows
            ],
        }
        _emit(args, io_json.dumps(payload))
    else:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        header = [f"y{j}" for j in range(1, n + 1)]
        header += [f"ratio{j}" for j in range(1, n)]
        header += ["distance"]
        writer.writerow(header)
        for r in rows:
            writer.writerow([str(y) for y in r.ys] + [str(c) for c in r.ratios]
                            + [io_json.float_repr(r.distance)])
        _emit(args, buf.getvalue())
    if args.tolerance is not None and rows and rows[-1].distance > args.tolerance:
        return EXIT_NEGATIVE
    return EXIT_OK


def cmd_pushforward(args) -> int:
    doc = _read_document(args)
    _expect_kind(doc, "elliptic_rep")
    rep = io_json.elliptic_rep_from_json(doc)
    result = cohomology(rep)
    pieces = []
    for piece in result.pieces():
        membership = check_AY_membership(piece)
        pieces.append({
            "degree": piece.degree,
            "dimension": piece.obj.dim,
            "weights": [{"weight": w, "dimension": s.dim} for w, s in piece.obj.weights.steps],
            "frobenius_weights": list(piece.obj.grading.weights()),
            "member": bool(membership),
            "violations": membership.violations,
        })
    unipotent = rep.gamma1.is_unipotent()
    payload = {
        "format": io_json.FORMAT,
        "kind": "pushforward_report",
        "euler_characteristic": result.euler_characteristic(),
        "cohomology": pieces,
        "gamma1_unipotent": unipotent,
    }
    if unipotent:
        payload["lefschetz_isomorphism"] = lefschetz_is_isomorphism(rep, result)
        report = check_prop68(rep)
        payload["conditions"] = {
            "all_cohomology_members": report.all_cohomology_members,
            "h0_member": report.h0_member,
            "lefschetz_isomorphism": report.lefschetz_isomorphism,
            "is_pullback": report.is_pullback,
            "equivalent": report.equivalent,
        }
    _emit(args, io_json.dumps(payload))
    ok = all(p["member"] for p in pieces)
    return EXIT_OK if ok else EXIT_NEGATIVE


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="monodromy-lab",
        description="Exact weight-filtration computations with a JSON/CSV surface.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, preset=True):
        p.add_argument("--in", dest="infile", help="input JSON document")
        p.add_argument("--out", help="output path (default: stdout)")
        if preset:
            p.add_argument("--preset", help="name of a packaged preset document")

    p = sub.add_parser("check", help="log-point membership report")
    common(p)
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("classify", help="symmetric-power decomposition of a pure object")
    common(p)
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("rmf", help="relative monodromy filtration")
    common(p)
    p.set_defaults(func=cmd_rmf)

    p = sub.add_parser("check-admissible", help="cone-action admissibility and its family")
    common(p)
    p.set_defaults(func=cmd_check_admissible)

    p = sub.add_parser("deligne-split", help="splitting of W adapted to a grading of M")
    common(p)
    p.set_defaults(func=cmd_deligne_split)

    p = sub.add_parser("sl2-data", help="gradings and lowering operators of a system")
    common(p)
    p.set_defaults(func=cmd_sl2_data)

    p = sub.add_parser("ratios", help="validate/evaluate/sample a ratio point")
    common(p)
    p.add_argument("--evaluate", nargs=2, metavar=("F", "G"),
                   help="monoid elements as comma-separated exponents")
    p.add_argument("--samples", type=int, default=0, help="number of rank-one samples")
    p.add_argument("--schedule", default="geometric:10")
    p.set_defaults(func=cmd_ratios)

    p = sub.add_parser("asymptote", help="convergence table along a rank-one path")
    common(p)
    p.add_argument("--setup", dest="infile_setup", help=argparse.SUPPRESS)
    p.add_argument("--schedule", default="geometric:10")
    p.add_argument("--decades", type=int, default=8)
    p.add_argument("--tolerance", type=float, default=None)
    p.add_argument("--format", choices=("json", "csv"), default="csv")
    p.set_defaults(func=cmd_asymptote)

    p = sub.add_parser("pushforward", help="higher direct images of a fiber representation")
    common(p)
    p.add_argument("--rep", dest="infile_rep", help=argparse.SUPPRESS)
    p.add_argument("--report", dest="out_report", help=argparse.SUPPRESS)
    p.set_defaults(func=cmd_pushforward)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    # --setup/--rep/--report are documented aliases of --in/--out
    if getattr(args, "infile_setup", None):
        args.infile = args.infile_setup
    if getattr(args, "infile_rep", None):
        args.infile = args.infile_rep
    if getattr(args, "out_report", None):
        args.out = args.out_report
    try:
        return args.func(args)
    except SchemaError as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except MonodromyLabError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NEGATIVE


if __name__ == "__main__":
    sys.exit(main())
