"""JSON (de)serialization for every document the command line speaks.

All documents carry {"format": "monodromy-lab/1", "kind": ...}.  Exact
rationals are "p/q" strings; quadratic scalars are {"a": "p/q", "b": "p/q"}
with the field declared once per document.  Dumping is canonical (sorted keys,
two-space indent, trailing newline), so emit/ingest round-trips are
bit-identical.
"""

from __future__ import annotations

import json
from fractions import Fraction

from .cones import Cone, ConeAction, SharpMonoid
from .deligne import DeligneSystem
from .direct_images import EllipticRep
from .errors import SchemaError
from .filtration import Filtration, Splitting
from .linalg import Mat, Subspace
from .logpoint import LogPointObject
from .ratios import RatioPoint
from .scalars import QQ, QuadraticField

FORMAT = "monodromy-lab/1"


def _fail(path, msg):
    raise SchemaError(f"{path}: {msg}")


def field_to_json(field):
    if getattr(field, "is_quadratic", False):
        return {"kind": "quadratic", "d": field.d, "embedding": field.embedding}
    return {"kind": "rational"}


def field_from_json(doc, path="field"):
    if not isinstance(doc, dict) or "kind" not in doc:
        _fail(path, "expected a field object with a 'kind'")
    if doc["kind"] == "rational":
        return QQ
    if doc["kind"] == "quadratic":
        try:
            return QuadraticField(int(doc["d"]), doc.get("embedding", "+"))
        except (KeyError, ValueError) as exc:
            _fail(path, str(exc))
    _fail(path, f"unknown field kind {doc['kind']!r}")


def scalar_to_json(field, x):
    x = field.coerce(x)
    if getattr(field, "is_quadratic", False):
        return {"a": str(x.a), "b": str(x.b)}
    return str(x)


def scalar_from_json(field, doc, path="scalar"):
    try:
        if isinstance(doc, dict):
            if not getattr(field, "is_quadratic", False):
                _fail(path, "quadratic scalar in a rational document")
            return field.element(Fraction(doc.get("a", "0")), Fraction(doc.get("b", "0")))
        return field.coerce(Fraction(str(doc)))
    except (ValueError, ZeroDivisionError) as exc:
        _fail(path, f"bad scalar {doc!r}: {exc}")


def matrix_to_json(m: Mat):
    return [[scalar_to_json(m.field, x) for x in row] for row in m.entries]


def matrix_from_json(field, doc, path="matrix"):
    if not isinstance(doc, list):
        _fail(path, "expected a list of rows")
    return Mat(field, [[scalar_from_json(field, x, f"{path}[{i}][{j}]")
                        for j, x in enumerate(row)] for i, row in enumerate(doc)])


def vectors_from_json(field, doc, ambient, path="basis"):
    out = []
    if not isinstance(doc, list):
        _fail(path, "expected a list of vectors")
    for i, row in enumerate(doc):
        if len(row) != ambient:
            _fail(f"{path}[{i}]", f"vector length {len(row)} != ambient {ambient}")
        out.append([scalar_from_json(field, x, f"{path}[{i}][{j}]") for j, x in enumerate(row)])
    return out


def filtration_to_json(f: Filtration):
    return [{"weight": w, "basis": [[scalar_to_json(f.field, x) for x in v] for v in s.basis]}
            for w, s in f.steps]


def filtration_from_json(field, doc, ambient, path="filtration"):
    if not isinstance(doc, list):
        _fail(path, "expected a list of steps")
    steps = []
    for i, step in enumerate(doc):
        if "weight" not in step or "basis" not in step:
            _fail(f"{path}[{i}]", "step needs 'weight' and 'basis'")
        vecs = vectors_from_json(field, step["basis"], ambient, f"{path}[{i}].basis")
        steps.append((int(step["weight"]), Subspace(field, ambient, vecs)))
    return Filtration(field, ambient, steps)


def splitting_to_json(s: Splitting):
    return [{"weight": w, "basis": [[scalar_to_json(s.field, x) for x in v] for v in p.basis]}
            for w, p in s.parts]


def splitting_from_json(field, doc, ambient, path="splitting"):
    if not isinstance(doc, list):
        _fail(path, "expected a list of parts")
    parts = []
    for i, part in enumerate(doc):
        if "weight" not in part or "basis" not in part:
            _fail(f"{path}[{i}]", "part needs 'weight' and 'basis'")
        vecs = vectors_from_json(field, part["basis"], ambient, f"{path}[{i}].basis")
        parts.append((int(part["weight"]), Subspace(field, ambient, vecs)))
    return Splitting(field, ambient, parts)


def monoid_to_json(m: SharpMonoid):
    return {"ambient_rank": m.rank, "generators": [list(g) for g in m.generators]}


def monoid_from_json(doc, path="monoid"):
    if not isinstance(doc, dict) or "ambient_rank" not in doc or "generators" not in doc:
        _fail(path, "expected {'ambient_rank', 'generators'}")
    return SharpMonoid(int(doc["ambient_rank"]), doc["generators"])


def logpoint_object_to_json(obj: LogPointObject):
    return {
        "format": FORMAT,
        "kind": "logpoint_object",
        "field": field_to_json(obj.field),
        "monoid": monoid_to_json(obj.monoid),
        "rays": [list(r) for r in obj.cone.rays],
        "dimension": obj.dim,
        "weight_filtration": filtration_to_json(obj.weights),
        "nilpotents": [matrix_to_json(n) for n in obj.nilpotents],
        "frobenius": matrix_to_json(obj.frobenius),
        "q": str(obj.q),
        "frobenius_grading": splitting_to_json(obj.grading),
    }


def logpoint_object_from_json(doc, path="object"):
    for key in ("field", "monoid", "dimension", "weight_filtration",
                "nilpotents", "frobenius", "q", "frobenius_grading"):
        if key not in doc:
            _fail(path, f"missing '{key}'")
    field = field_from_json(doc["field"], f"{path}.field")
    monoid = monoid_from_json(doc["monoid"], f"{path}.monoid")
    dim = int(doc["dimension"])
    weights = filtration_from_json(field, doc["weight_filtration"], dim, f"{path}.weight_filtration")
    nil = [matrix_from_json(field, m, f"{path}.nilpotents[{i}]") for i, m in enumerate(doc["nilpotents"])]
    frob = matrix_from_json(field, doc["frobenius"], f"{path}.frobenius")
    grading = splitting_from_json(field, doc["frobenius_grading"], dim, f"{path}.frobenius_grading")
    try:
        q = Fraction(str(doc["q"]))
    except ValueError as exc:
        _fail(f"{path}.q", str(exc))
    if "rays" in doc:
        expect = [list(r) for r in monoid.dual_cone().rays]
        if [list(map(int, r)) for r in doc["rays"]] != expect:
            _fail(f"{path}.rays", f"rays must be listed in canonical order {expect}")
    return LogPointObject(monoid, field, weights, nil, frob, q, grading)


def cone_action_to_json(action: ConeAction):
    return {
        "format": FORMAT,
        "kind": "cone_action",
        "field": field_to_json(action.field),
        "monoid": monoid_to_json(action.cone.monoid),
        "rays": [list(r) for r in action.cone.rays],
        "dimension": action.dim,
        "base_filtration": filtration_to_json(action.base),
        "nilpotents": [matrix_to_json(n) for n in action.ray_mats],
    }


def cone_action_from_json(doc, path="action"):
    for key in ("field", "monoid", "dimension", "base_filtration", "nilpotents"):
        if key not in doc:
            _fail(path, f"missing '{key}'")
    field = field_from_json(doc["field"], f"{path}.field")
    monoid = monoid_from_json(doc["monoid"], f"{path}.monoid")
    dim = int(doc["dimension"])
    base = filtration_from_json(field, doc["base_filtration"], dim, f"{path}.base_filtration")
    nil = [matrix_from_json(field, m, f"{path}.nilpotents[{i}]") for i, m in enumerate(doc["nilpotents"])]
    return ConeAction(monoid.dual_cone(), field, base, nil)


def rmf_problem_to_json(field, filtration: Filtration, nilpotent: Mat):
    return {
        "format": FORMAT,
        "kind": "rmf_problem",
        "field": field_to_json(field),
        "dimension": filtration.ambient,
        "filtration": filtration_to_json(filtration),
        "nilpotent": matrix_to_json(nilpotent),
    }


def rmf_problem_from_json(doc, path="problem"):
    for key in ("field", "dimension", "filtration", "nilpotent"):
        if key not in doc:
            _fail(path, f"missing '{key}'")
    field = field_from_json(doc["field"], f"{path}.field")
    dim = int(doc["dimension"])
    filt = filtration_from_json(field, doc["filtration"], dim, f"{path}.filtration")
    nil = matrix_from_json(field, doc["nilpotent"], f"{path}.nilpotent")
    return field, filt, nil


def ratio_point_to_json(point: RatioPoint):
    return {
        "format": FORMAT,
        "kind": "ratio_point",
        "monoid": monoid_to_json(point.monoid),
        "chain": [{"rays": [list(r) for r in face.rays]} for face in point.chain],
        "witnesses": [[str(x) for x in w] for w in point.witnesses],
    }


def ratio_point_from_json(doc, cone: Cone | None = None, path="mu"):
    for key in ("monoid", "chain", "witnesses"):
        if key not in doc:
            _fail(path, f"missing '{key}'")
    monoid = monoid_from_json(doc["monoid"], f"{path}.monoid")
    cone = monoid.dual_cone() if cone is None else cone
    chain = []
    for i, entry in enumerate(doc["chain"]):
        if "rays" not in entry:
            _fail(f"{path}.chain[{i}]", "missing 'rays'")
        chain.append(cone.face_of_rays([tuple(map(int, r)) for r in entry["rays"]]))
    witnesses = [[Fraction(str(x)) for x in w] for w in doc["witnesses"]]
    return RatioPoint(cone, chain, witnesses)


def asymptote_setup_to_json(obj: LogPointObject, mu: RatioPoint):
    return {
        "format": FORMAT,
        "kind": "asymptote_setup",
        "object": logpoint_object_to_json(obj),
        "mu": ratio_point_to_json(mu),
    }


def asymptote_setup_from_json(doc, path="setup"):
    if "object" not in doc or "mu" not in doc:
        _fail(path, "missing 'object' or 'mu'")
    obj = logpoint_object_from_json(doc["object"], f"{path}.object")
    mu = ratio_point_from_json(doc["mu"], obj.cone, f"{path}.mu")
    return obj, mu


def elliptic_rep_to_json(e: EllipticRep):
    return {
        "format": FORMAT,
        "kind": "elliptic_rep",
        "field": field_to_json(e.field),
        "dimension": e.dim,
        "weight_filtration": filtration_to_json(e.weights),
        "gamma0": matrix_to_json(e.gamma0),
        "gamma1": matrix_to_json(e.gamma1),
        "gamma2": matrix_to_json(e.gamma2),
        "frobenius": matrix_to_json(e.frobenius),
        "q": str(e.q),
        "frobenius_grading": splitting_to_json(e.grading),
    }


def elliptic_rep_from_json(doc, path="rep"):
    for key in ("field", "dimension", "weight_filtration", "gamma0", "gamma1",
                "gamma2", "frobenius", "q", "frobenius_grading"):
        if key not in doc:
            _fail(path, f"missing '{key}'")
    field = field_from_json(doc["field"], f"{path}.field")
    dim = int(doc["dimension"])
    weights = filtration_from_json(field, doc["weight_filtration"], dim, f"{path}.weight_filtration")
    mats = {k: matrix_from_json(field, doc[k], f"{path}.{k}")
            for k in ("gamma0", "gamma1", "gamma2", "frobenius")}
    grading = splitting_from_json(field, doc["frobenius_grading"], dim, f"{path}.frobenius_grading")
    return EllipticRep(field, weights, mats["gamma0"], mats["gamma1"], mats["gamma2"],
                       mats["frobenius"], Fraction(str(doc["q"])), grading)


def deligne_splitting_problem_from_json(doc, path="problem"):
    for key in ("field", "dimension", "nilpotent", "weight_filtration",
                "relative_filtration", "grading"):
        if key not in doc:
            _fail(path, f"missing '{key}'")
    field = field_from_json(doc["field"], f"{path}.field")
    dim = int(doc["dimension"])
    return (
        matrix_from_json(field, doc["nilpotent"], f"{path}.nilpotent"),
        filtration_from_json(field, doc["weight_filtration"], dim, f"{path}.weight_filtration"),
        filtration_from_json(field, doc["relative_filtration"], dim, f"{path}.relative_filtration"),
        splitting_from_json(field, doc["grading"], dim, f"{path}.grading"),
    )


def deligne_system_to_json(s: DeligneSystem):
    return {
        "format": FORMAT,
        "kind": "deligne_system",
        "field": field_to_json(s.field),
        "dimension": s.dim,
        "filtrations": [filtration_to_json(f) for f in s.filtrations],
        "operators": [matrix_to_json(m) for m in s.operators],
        "grading": splitting_to_json(s.grading),
    }


def deligne_system_from_json(doc, path="system"):
    for key in ("field", "dimension", "filtrations", "operators", "grading"):
        if key not in doc:
            _fail(path, f"missing '{key}'")
    field = field_from_json(doc["field"], f"{path}.field")
    dim = int(doc["dimension"])
    filts = [filtration_from_json(field, f, dim, f"{path}.filtrations[{i}]")
             for i, f in enumerate(doc["filtrations"])]
    ops = [matrix_from_json(field, m, f"{path}.operators[{i}]")
           for i, m in enumerate(doc["operators"])]
    grading = splitting_from_json(field, doc["grading"], dim, f"{path}.grading")
    return DeligneSystem(field, filts, ops, grading)


def dumps(doc) -> str:
    return json.dumps(doc, sort_keys=True, indent=2) + "\n"


def loads(text: str):
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"not valid JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise SchemaError("top-level document must be an object")
    if doc.get("format") != FORMAT:
        raise SchemaError(f"missing or unsupported format key (want {FORMAT!r})")
    return doc


def float_repr(x: float) -> str:
    return format(float(x), ".17g")
