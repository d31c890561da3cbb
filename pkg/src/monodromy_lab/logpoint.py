"""Weight-filtered Frobenius + monodromy representations over a finite-field
log point: membership checking, abelian-category operations with strictness,
and the standard-log-point classification through symmetric powers.

Frobenius convention: F is geometric, so declared Frobenius-weight-w parts
carry F-eigenvalues of archimedean size q^{w/2}, and the structural
commutation law is N F = q F N for every monodromy logarithm N.  Declared
weights are an input contract; the checker verifies every internal consistency
law exactly and additionally pins eigenvalue magnitudes whenever the spectrum
is rational.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from fractions import Fraction

from .cones import Cone, ConeAction, SharpMonoid, check_admissible
from .errors import (
    DimensionMismatch,
    MembershipLost,
    NotPureError,
    NotStandardLogPoint,
    PreconditionViolated,
)
from .filtration import (
    Filtration,
    Splitting,
    kron_mat,
    sum_filtration,
    sum_splitting,
    tensor_filtration,
    tensor_splitting,
)
from .linalg import (
    Mat,
    Subquotient,
    Subspace,
    image as mat_image,
    is_semisimple_operator,
    kernel as mat_kernel,
    rational_roots,
)
from .scalars import QQ


class LogPointObject:
    """Stalk data of a weight-filtered sheaf on a log point.

    ``nilpotents`` lists the monodromy logarithm for each ray of the dual cone
    of the monoid, in the cone's canonical ray order.
    """

    __slots__ = ("monoid", "cone", "field", "dim", "weights", "nilpotents",
                 "frobenius", "q", "grading")

    def __init__(self, monoid: SharpMonoid, field, weights: Filtration,
                 nilpotents, frobenius: Mat, q, grading: Splitting):
        cone = monoid.dual_cone()
        nilpotents = tuple(nilpotents)
        dim = weights.ambient
        if grading.ambient != dim or frobenius.rows != dim or frobenius.cols != dim:
            raise DimensionMismatch("object data sizes disagree")
        if len(nilpotents) != len(cone.rays):
            raise PreconditionViolated("one nilpotent per dual-cone ray is required")
        object.__setattr__(self, "monoid", monoid)
        object.__setattr__(self, "cone", cone)
        object.__setattr__(self, "field", field)
        object.__setattr__(self, "dim", dim)
        object.__setattr__(self, "weights", weights)
        object.__setattr__(self, "nilpotents", nilpotents)
        object.__setattr__(self, "frobenius", frobenius)
        object.__setattr__(self, "q", Fraction(q))
        object.__setattr__(self, "grading", grading)

    def __setattr__(self, *a):
        raise AttributeError("LogPointObject is immutable")

    def action(self) -> ConeAction:
        return ConeAction(self.cone, self.field, self.weights, self.nilpotents)

    def is_standard(self) -> bool:
        return self.monoid.rank == 1 and self.cone.rays == ((1,),)

    def monodromy_log(self) -> Mat:
        """The single monodromy logarithm over the standard log point."""
        if not self.is_standard():
            raise NotStandardLogPoint("object does not live over the standard log point")
        return self.nilpotents[0]

    def w_pure_weight(self):
        js = self.weights.jumps()
        return js[0] if len(js) == 1 else None


@dataclass
class MembershipReport:
    ok: bool
    violations: list = dc_field(default_factory=list)
    notes: list = dc_field(default_factory=list)
    family: object = None

    def __bool__(self):
        return self.ok


def check_membership(obj: LogPointObject) -> MembershipReport:
    """Verify the log-point membership conditions exactly.

    Order: structural Frobenius laws, cone admissibility (producing the family
    (W(τ))_τ), the Frobenius-weight condition on the graded pieces of W(σ),
    and Frobenius stability of every W(τ).
    """
    report = MembershipReport(ok=True)
    field = obj.field
    q = field.coerce(obj.q)
    try:
        finv = obj.frobenius.inverse()
        del finv
    except ZeroDivisionError:
        report.ok = False
        report.violations.append("frobenius is not invertible")
        return report
    for idx, n_op in enumerate(obj.nilpotents):
        if not (n_op * obj.frobenius == q * (obj.frobenius * n_op)):
            report.ok = False
            report.violations.append(f"ray {idx}: commutation N F = q F N fails")
    for w, part in obj.grading.parts:
        for v in part.basis:
            if not part.contains(obj.frobenius.apply(v)):
                report.ok = False
                report.violations.append(f"frobenius does not preserve the weight-{w} part")
                break
    _check_magnitudes(obj, report)
    for idx, n_op in enumerate(obj.nilpotents):
        for w, part in obj.grading.parts:
            target = obj.grading.part(w - 2)
            for v in part.basis:
                out = n_op.apply(v)
                if any(x != 0 for x in out) and not target.contains(out):
                    report.ok = False
                    report.violations.append(
                        f"ray {idx}: monodromy does not shift weight {w} to {w - 2}"
                    )
                    break
    if not report.ok:
        return report
    try:
        action = obj.action()
    except PreconditionViolated as exc:
        report.ok = False
        report.violations.append(f"cone action invalid: {exc}")
        return report
    fam = check_admissible(action)
    if not fam:
        report.ok = False
        report.violations.append(
            f"not admissible: {fam.condition} at {[sorted(f.vanish) for f in fam.faces]}"
        )
        return report
    report.family = fam
    w_sigma = fam.at(obj.cone.full_face)
    if not obj.grading.splits(w_sigma):
        report.ok = False
        report.violations.append(
            "frobenius grading does not split W(sigma) weight for weight"
        )
    for face, filt in fam.items():
        for w, step in filt.steps:
            for v in step.basis:
                if not step.contains(obj.frobenius.apply(v)):
                    report.ok = False
                    report.violations.append(
                        f"W(tau) at face {sorted(face.vanish)} is not frobenius-stable"
                    )
                    break
    return report


def _check_magnitudes(obj: LogPointObject, report: MembershipReport):
    """Pin |eigenvalue| = q^{w/2} when the relevant spectrum is rational."""
    if obj.field.is_quadratic:
        report.notes.append("eigenvalue magnitudes not verified over a quadratic field")
        return
    q = Fraction(obj.q)
    for w, part in obj.grading.parts:
        sub = Subquotient.of_subspace(part)
        fw = sub.induced_operator(obj.frobenius)
        scaled = (Fraction(q) ** (-w)) * (fw * fw)
        roots, rest = rational_roots(scaled.char_poly())
        if rest and len(rest) > 1:
            report.notes.append(f"weight {w}: spectrum not rational; magnitudes not verified")
            continue
        for root in roots:
            if root != 1 and root != -1:
                report.ok = False
                report.violations.append(
                    f"weight {w}: eigenvalue magnitude is not q^{{{w}/2}}"
                )
                return


class LogPointMorphism:
    """Equivariant filtered map: commutes with F and all monodromy logs, filtered for W."""

    __slots__ = ("source", "target", "mat")

    def __init__(self, source: LogPointObject, target: LogPointObject, mat: Mat):
        if source.monoid != target.monoid or source.q != target.q:
            raise PreconditionViolated("objects live over different log points")
        if mat.cols != source.dim or mat.rows != target.dim:
            raise DimensionMismatch("matrix shape mismatch")
        if not (mat * source.frobenius == target.frobenius * mat):
            raise PreconditionViolated("map does not commute with frobenius")
        for a, b in zip(source.nilpotents, target.nilpotents):
            if not (mat * a == b * mat):
                raise PreconditionViolated("map does not commute with the monodromy")
        for w, step in source.weights.steps:
            for v in step.basis:
                if not target.weights.at(w).contains(mat.apply(v)):
                    raise PreconditionViolated("map is not filtered for W")
        object.__setattr__(self, "source", source)
        object.__setattr__(self, "target", target)
        object.__setattr__(self, "mat", mat)

    def __setattr__(self, *a):
        raise AttributeError("LogPointMorphism is immutable")


def _induced_object(obj: LogPointObject, subq: Subquotient) -> LogPointObject:
    parts = []
    total = 0
    for w, part in obj.grading.parts:
        ind = subq.induced_subspace(part)
        if ind.dim:
            parts.append((w, ind))
            total += ind.dim
    if total != subq.dim:
        raise MembershipLost("frobenius grading does not descend to the subquotient")
    out = LogPointObject(
        obj.monoid,
        obj.field,
        obj.weights.restrict_to(subq),
        [subq.induced_operator(n) for n in obj.nilpotents],
        subq.induced_operator(obj.frobenius),
        obj.q,
        Splitting(obj.field, subq.dim, parts),
    )
    rep = check_membership(out)
    if not rep:
        raise MembershipLost("; ".join(rep.violations))
    return out


def kernel_object(mor: LogPointMorphism):
    subq = Subquotient.of_subspace(mat_kernel(mor.mat))
    return _induced_object(mor.source, subq), subq


def image_object(mor: LogPointMorphism):
    subq = Subquotient.of_subspace(mat_image(mor.mat))
    return _induced_object(mor.target, subq), subq


def cokernel_object(mor: LogPointMorphism):
    subq = Subquotient.quotient(mor.target.field, mor.target.dim, mat_image(mor.mat))
    return _induced_object(mor.target, subq), subq


def morphism_is_strict(mor: LogPointMorphism, fam_src, fam_tgt) -> bool:
    """Image of W(τ)_w equals image ∩ W(τ)_w, for every face and weight."""
    img = mat_image(mor.mat)
    for face, filt in fam_src.items():
        tgt_filt = fam_tgt.at(face)
        weights = set(filt.jumps()) | set(tgt_filt.jumps())
        for w in weights:
            pushed = filt.at(w).apply(mor.mat)
            meet = img.intersect(tgt_filt.at(w))
            if pushed != meet:
                return False
    return True


def weight_sequences_exact(mor: LogPointMorphism, fam_src, fam_tgt) -> bool:
    """dim W(τ)_w(source) = dim W(τ)_w(kernel) + dim W(τ)_w(image-as-subobject)."""
    ker = mat_kernel(mor.mat)
    img = mat_image(mor.mat)
    for face, filt in fam_src.items():
        tgt_filt = fam_tgt.at(face)
        weights = set(filt.jumps()) | set(tgt_filt.jumps())
        for w in weights:
            lhs = filt.at(w).dim
            k = filt.at(w).intersect(ker).dim
            i = tgt_filt.at(w).intersect(img).dim
            if lhs != k + i:
                return False
    return True


# ----------------------------------------------------------------------------
# Standard-log-point constructions


def standard_monoid() -> SharpMonoid:
    return SharpMonoid(1, [[1]])


def build_Sr(r: int, q, field=QQ) -> LogPointObject:
    """r-th symmetric power of the basic 2-dimensional degeneration.

    Basis: monomials of e2-degree j (j = 0..r); the monodromy log is the
    derivation sending e2 to e1; F has eigenvalue q^j on degree j; W is pure
    of weight r.
    """
    if r < 0:
        raise PreconditionViolated("negative symmetric power")
    q = Fraction(q)
    n = r + 1
    nil = [[field.zero] * n for _ in range(n)]
    for j in range(1, n):
        nil[j - 1][j] = field.coerce(j)
    frob = [[field.coerce(q ** j) if i == j else field.zero for j in range(n)] for i in range(n)]
    grading = Splitting(
        field, n,
        [(2 * j, Subspace(field, n, [[field.one if k == j else field.zero for k in range(n)]]))
         for j in range(n)],
    )
    return LogPointObject(
        standard_monoid(), field, Filtration.pure(field, n, r),
        [Mat(field, nil)], Mat(field, frob), q, grading,
    )


def unit_object(q, field=QQ) -> LogPointObject:
    return build_Sr(0, q, field)


def tate_twist(obj: LogPointObject, n: int) -> LogPointObject:
    """F ↦ q^{-n} F, all weights shifted by -2n, monodromy unchanged."""
    factor = obj.field.coerce(Fraction(obj.q) ** (-n))
    return LogPointObject(
        obj.monoid, obj.field, obj.weights.shift(-2 * n), obj.nilpotents,
        factor * obj.frobenius, obj.q, obj.grading.shift(-2 * n),
    )


def direct_sum(a: LogPointObject, b: LogPointObject) -> LogPointObject:
    if a.monoid != b.monoid or a.q != b.q:
        raise PreconditionViolated("objects live over different log points")
    field = a.field
    mats = []
    for na, nb in zip(a.nilpotents, b.nilpotents):
        rows = [list(na.entries[i]) + [field.zero] * b.dim for i in range(a.dim)]
        rows += [[field.zero] * a.dim + list(nb.entries[i]) for i in range(b.dim)]
        mats.append(Mat(field, rows))
    frows = [list(a.frobenius.entries[i]) + [field.zero] * b.dim for i in range(a.dim)]
    frows += [[field.zero] * a.dim + list(b.frobenius.entries[i]) for i in range(b.dim)]
    return LogPointObject(
        a.monoid, field, sum_filtration(a.weights, b.weights), mats,
        Mat(field, frows), a.q, sum_splitting(a.grading, b.grading),
    )


def tensor(a: LogPointObject, b: LogPointObject) -> LogPointObject:
    if a.monoid != b.monoid or a.q != b.q:
        raise PreconditionViolated("objects live over different log points")
    field = a.field
    ida = Mat.identity(field, a.dim)
    idb = Mat.identity(field, b.dim)
    mats = [kron_mat(na, idb) + kron_mat(ida, nb) for na, nb in zip(a.nilpotents, b.nilpotents)]
    return LogPointObject(
        a.monoid, field, tensor_filtration(a.weights, b.weights), mats,
        kron_mat(a.frobenius, b.frobenius), a.q,
        tensor_splitting(a.grading, b.grading),
    )


def _require_pure_standard(obj: LogPointObject) -> int:
    if not obj.is_standard():
        raise NotStandardLogPoint("classification needs the standard log point")
    w = obj.w_pure_weight()
    if w is None:
        raise NotPureError("object is not W-pure")
    return w


def psi_minus(obj: LogPointObject):
    """Parts H_r = Ker(N: weight (w-r) part → weight (w-r-2) part).

    Returns [(r, subspace, F-matrix on it)], F untwisted.
    """
    w = _require_pure_standard(obj)
    n_op = obj.monodromy_log()
    out = []
    for pw, part in obj.grading.parts:
        r = w - pw
        sub = part.intersect(mat_kernel(n_op))
        if sub.dim:
            if r < 0:
                raise MembershipLost("kernel vectors above the central weight")
            subq = Subquotient.of_subspace(sub)
            out.append((r, sub, subq.induced_operator(obj.frobenius)))
    return sorted(out, key=lambda t: t[0])


def psi_plus(obj: LogPointObject):
    """Primitive parts H_r = Ker(N^{r+1}: weight (w+r) part → ...), Tate-twisted.

    Returns [(r, subspace, q^{-r} F on it)].
    """
    w = _require_pure_standard(obj)
    n_op = obj.monodromy_log()
    q = Fraction(obj.q)
    out = []
    for pw, part in obj.grading.parts:
        r = pw - w
        if r < 0:
            continue
        sub = part.intersect(mat_kernel(n_op ** (r + 1)))
        if sub.dim:
            subq = Subquotient.of_subspace(sub)
            fmat = obj.field.coerce(q ** (-r)) * subq.induced_operator(obj.frobenius)
            out.append((r, sub, fmat))
    return sorted(out, key=lambda t: t[0])


def phi(parts, q, weight: int, field=QQ) -> LogPointObject:
    """⊕_r S_r ⊗ H_r from abstract parts [(r, F-matrix)], W pure of ``weight``."""
    q = Fraction(q)
    blocks = []
    for r, fmat in sorted(parts, key=lambda t: t[0]):
        if fmat.rows == 0:
            continue
        s_r = build_Sr(r, q, field)
        h_dim = fmat.rows
        n_block = kron_mat(s_r.monodromy_log(), Mat.identity(field, h_dim))
        f_block = kron_mat(s_r.frobenius, fmat)
        grading = [
            (weight - r + 2 * j, [j * h_dim + k for k in range(h_dim)])
            for j in range(r + 1)
        ]
        blocks.append((n_block, f_block, grading, (r + 1) * h_dim))
    total = sum(b[3] for b in blocks)
    if total == 0:
        return LogPointObject(
            standard_monoid(), field, Filtration(field, 0, []), [Mat.zeros(field, 0)],
            Mat.zeros(field, 0), q, Splitting(field, 0, []),
        )
    nil = [[field.zero] * total for _ in range(total)]
    frob = [[field.zero] * total for _ in range(total)]
    grading_vecs: dict[int, list] = {}
    offset = 0
    for n_block, f_block, grading, size in blocks:
        for i in range(size):
            for j in range(size):
                nil[offset + i][offset + j] = n_block.entries[i][j]
                frob[offset + i][offset + j] = f_block.entries[i][j]
        for gw, idxs in grading:
            for k in idxs:
                vec = [field.zero] * total
                vec[offset + k] = field.one
                grading_vecs.setdefault(gw, []).append(vec)
        offset += size
    split = Splitting(field, total, [(w, Subspace(field, total, vs)) for w, vs in grading_vecs.items()])
    return LogPointObject(
        standard_monoid(), field, Filtration.pure(field, total, weight),
        [Mat(field, nil)], Mat(field, frob), q, split,
    )


def classification_isomorphism(obj: LogPointObject):
    """(parts, model, iso) where iso: Φ(Ψ⁺(obj)) → obj sends the degree-(i, j)
    monomial tensor x to j! N^i(x).

    For a W-pure object this is the classification through the primitive
    parts.  Mixed objects are handled by refining the primitive parts by the
    weight filtration (H_{w,r} = primitive part of weight w+r inside W_w); the
    resulting map is an isomorphism exactly when W is split by the strings,
    e.g. for direct sums of pure objects.
    """
    if not obj.is_standard():
        raise NotStandardLogPoint("classification needs the standard log point")
    n_op = obj.monodromy_log()
    field = obj.field
    q = Fraction(obj.q)
    if obj.dim == 0:
        return [], phi([], obj.q, 0, field), Mat.zeros(field, 0)
    pieces = []  # (w, r, subspace with chosen basis vectors)
    used = Subspace.zero(field, obj.dim)
    for w in obj.weights.jumps():
        w_step = obj.weights.at(w)
        for pw, part in obj.grading.parts:
            r = pw - w
            if r < 0:
                continue
            inter = part.intersect(mat_kernel(n_op ** (r + 1))).intersect(w_step)
            chosen = []
            for v in inter.basis:
                red = used.reduce(v)
                if any(x != 0 for x in red):
                    chosen.append(red)
                    used = used.add(Subspace(field, obj.dim, [red]))
            if chosen:
                pieces.append((w, r, Subspace(field, obj.dim, chosen)))
    blocks = []
    model = None
    for w, r, sub in sorted(pieces, key=lambda t: (t[0], t[1])):
        subq = Subquotient.of_subspace(sub)
        fmat = field.coerce(q ** (-r)) * subq.induced_operator(obj.frobenius)
        blocks.append((w, r, sub, fmat))
        piece_model = phi([(r, fmat)], obj.q, w, field)
        model = piece_model if model is None else direct_sum(model, piece_model)
    if model is None:
        model = phi([], obj.q, 0, field)
    cols = []
    for w, r, sub, _ in blocks:
        powers = [Mat.identity(field, obj.dim)]
        for _ in range(r):
            powers.append(powers[-1] * n_op)
        fact = 1
        for j in range(r + 1):
            i = r - j
            if j > 0:
                fact *= j
            for v in sub.basis:
                cols.append([field.coerce(fact) * x for x in powers[i].apply(v)])
    iso = Mat(field, list(zip(*cols))) if cols else Mat.zeros(field, obj.dim, 0)
    parts = [(r, fmat) for _, r, _, fmat in blocks]
    return parts, model, iso


def is_isomorphism(mor: LogPointMorphism) -> bool:
    if mor.source.dim != mor.target.dim:
        return False
    if mat_kernel(mor.mat).dim != 0:
        return False
    # filtered bijection with filtered inverse
    inv = mor.mat.inverse()
    try:
        LogPointMorphism(mor.target, mor.source, inv)
    except PreconditionViolated:
        return False
    return True


def hom_space(a: LogPointObject, b: LogPointObject):
    """Basis of the space of morphisms a -> b, as matrices.

    Solves the exact linear system: commutation with Frobenius and every
    monodromy log, plus W-filteredness expressed through annihilators.
    """
    if a.monoid != b.monoid or a.q != b.q:
        return []
    field = a.field
    ns, nt = a.dim, b.dim
    if ns == 0 or nt == 0:
        return []
    unknowns = ns * nt

    def idx(i, j):
        return i * ns + j

    rows = []

    def add_commutation(src_op, tgt_op):
        # (tgt_op @ phi - phi @ src_op)[i][j] = 0
        for i in range(nt):
            for j in range(ns):
                row = [field.zero] * unknowns
                for k in range(nt):
                    row[idx(k, j)] = row[idx(k, j)] + tgt_op.entries[i][k]
                for k in range(ns):
                    row[idx(i, k)] = row[idx(i, k)] - src_op.entries[k][j]
                rows.append(row)

    add_commutation(a.frobenius, b.frobenius)
    for na, nb in zip(a.nilpotents, b.nilpotents):
        add_commutation(na, nb)
    for w, step in a.weights.steps:
        ann = b.weights.at(w).annihilator()
        for v in step.basis:
            for u in ann.basis:
                row = [field.zero] * unknowns
                for i in range(nt):
                    for j in range(ns):
                        row[idx(i, j)] = row[idx(i, j)] + u[i] * v[j]
                rows.append(row)
    from .linalg import kernel as _kernel

    basis = _kernel(Mat(field, rows)).basis if rows else []
    return [Mat(field, [[vec[idx(i, j)] for j in range(ns)] for i in range(nt)]) for vec in basis]


def is_simple(obj: LogPointObject) -> bool:
    """Simple iff the classification has exactly one part and it has rank 1."""
    parts = psi_plus(obj)
    nonzero = [(r, s, f) for r, s, f in parts if s.dim]
    return len(nonzero) == 1 and nonzero[0][1].dim == 1


def is_semisimple(obj: LogPointObject) -> bool:
    """Semisimple iff every classification part is a semisimple F-module."""
    for _, _, fmat in psi_plus(obj):
        if fmat.rows and not is_semisimple_operator(fmat):
            return False
    return True
