"""Higher direct images for the degenerate elliptic fiber: representations of
the two-generator translation part with Frobenius and boundary monodromy, the
standard two-step complex, cohomology with its induced log-point structure,
and the membership/Lefschetz criteria.

The complex uses the group-difference matrices; Frobenius and the boundary
monodromy are not chain-equivariant for those, so their cohomology actions are
induced through the exact chain isomorphism onto the logarithm complex
(theta = (1, diag(u1^{-1}, u2^{-1}), (u1 u2)^{-1}) with u_i = (g_i - 1)/N_i),
composed with the Fitting projector onto the part where the first translation
acts unipotently; the complementary part is exactly acyclic.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .errors import (
    ComplexNotClosed,
    DimensionMismatch,
    NotUnipotentError,
    PreconditionViolated,
    SpectrumNotSplit,
)
from .filtration import Filtration, Splitting
from .linalg import (
    Mat,
    Subquotient,
    Subspace,
    generalized_eigenspaces,
    image as mat_image,
    induced_map,
    kernel as mat_kernel,
    nilpotent_exp,
    nilpotent_log,
)
from .logpoint import LogPointObject, LogPointMorphism, check_membership, standard_monoid, tate_twist


class EllipticRep:
    """(V, W, gamma0, gamma1, gamma2, F, q, grading) with the fiber relations.

    gamma0 and gamma2 are unipotent; gamma1 may have any invertible spectrum.
    Relations (geometric-Frobenius form): F commutes with gamma1,
    log(gamma2) F = q F log(gamma2), log(gamma0) F = q F log(gamma0),
    gamma0 gamma1 gamma0^{-1} = gamma1 gamma2, gamma0 gamma2 = gamma2 gamma0,
    gamma1 gamma2 = gamma2 gamma1.
    """

    __slots__ = ("field", "dim", "weights", "gamma0", "gamma1", "gamma2",
                 "frobenius", "q", "grading")

    def __init__(self, field, weights: Filtration, gamma0: Mat, gamma1: Mat,
                 gamma2: Mat, frobenius: Mat, q, grading: Splitting):
        dim = weights.ambient
        for m in (gamma0, gamma1, gamma2, frobenius):
            if m.rows != dim or m.cols != dim:
                raise DimensionMismatch("operator size mismatch")
        if not gamma0.is_unipotent():
            raise NotUnipotentError("gamma0 must be unipotent")
        if not gamma2.is_unipotent():
            raise NotUnipotentError("gamma2 must be unipotent")
        q = Fraction(q)
        qf = field.coerce(q)
        n0 = nilpotent_log(gamma0)
        n2 = nilpotent_log(gamma2)
        checks = [
            (gamma1 * frobenius == frobenius * gamma1, "F does not commute with gamma1"),
            (n2 * frobenius == qf * (frobenius * n2), "log(gamma2) F = q F log(gamma2) fails"),
            (n0 * frobenius == qf * (frobenius * n0), "log(gamma0) F = q F log(gamma0) fails"),
            (gamma0 * gamma1 == gamma1 * gamma2 * gamma0, "gamma0 gamma1 gamma0^-1 = gamma1 gamma2 fails"),
            (gamma0 * gamma2 == gamma2 * gamma0, "gamma0 does not commute with gamma2"),
            (gamma1 * gamma2 == gamma2 * gamma1, "gamma1 does not commute with gamma2"),
        ]
        for ok, msg in checks:
            if not ok:
                raise PreconditionViolated(msg)
        for m in (gamma0, gamma1, gamma2, frobenius):
            for w, step in weights.steps:
                for v in step.basis:
                    if not step.contains(m.apply(v)):
                        raise PreconditionViolated("an operator moves the weight filtration")
        for w, part in grading.parts:
            lower = grading.part(w - 2)
            for v in part.basis:
                if not part.contains(frobenius.apply(v)):
                    raise PreconditionViolated("F does not preserve the grading")
                if not part.contains(gamma1.apply(v)):
                    raise PreconditionViolated("gamma1 does not preserve the grading")
                for n_op in (n0, n2):
                    out = n_op.apply(v)
                    if any(x != 0 for x in out) and not lower.contains(out):
                        raise PreconditionViolated("monodromy log is not of grading degree -2")
        object.__setattr__(self, "field", field)
        object.__setattr__(self, "dim", dim)
        object.__setattr__(self, "weights", weights)
        object.__setattr__(self, "gamma0", gamma0)
        object.__setattr__(self, "gamma1", gamma1)
        object.__setattr__(self, "gamma2", gamma2)
        object.__setattr__(self, "frobenius", frobenius)
        object.__setattr__(self, "q", q)
        object.__setattr__(self, "grading", grading)

    def __setattr__(self, *a):
        raise AttributeError("EllipticRep is immutable")


def standard_complex(e: EllipticRep):
    """(d0, d1): d0 h = ((g1-1)h, (g2-1)h), d1 (h1,h2) = (1-g2)h1 + (g1-1)h2."""
    field = e.field
    n = e.dim
    one = Mat.identity(field, n)
    a = e.gamma1 - one
    b = e.gamma2 - one
    d0 = Mat(field, [list(a.entries[i]) for i in range(n)] + [list(b.entries[i]) for i in range(n)])
    d1 = Mat(field, [list((-b).entries[i]) + list(a.entries[i]) for i in range(n)])
    if not (d1 * d0).is_zero():
        raise ComplexNotClosed("d1 d0 != 0; the translation operators cannot commute")
    return d0, d1


def _fitting_unipotent(e: EllipticRep):
    """Subspace where gamma1 is unipotent, and its complement (both invariant)."""
    field = e.field
    n = e.dim
    shifted = e.gamma1 - Mat.identity(field, n)
    power = shifted ** max(n, 1)
    v1 = mat_kernel(power)
    rest = mat_image(power)
    for m in (e.gamma0, e.gamma1, e.gamma2, e.frobenius):
        for space in (v1, rest):
            for v in space.basis:
                if not space.contains(m.apply(v)):
                    raise PreconditionViolated("Fitting parts are not invariant (bug)")
    return v1, rest


def _restrict(e: EllipticRep, subspace: Subspace) -> EllipticRep:
    subq = Subquotient.of_subspace(subspace)
    parts = []
    for w, part in e.grading.parts:
        ind = subq.induced_subspace(part)
        if ind.dim:
            parts.append((w, ind))
    return EllipticRep(
        e.field,
        e.weights.restrict_to(subq),
        subq.induced_operator(e.gamma0),
        subq.induced_operator(e.gamma1),
        subq.induced_operator(e.gamma2),
        subq.induced_operator(e.frobenius),
        e.q,
        Splitting(e.field, subq.dim, parts),
    )


def _unipotent_series_u(n_op: Mat) -> Mat:
    """u with exp(N) - 1 = N u: u = sum_k N^k/(k+1)!; unipotent, commutes with N."""
    field = n_op.field
    n = n_op.rows
    out = Mat.identity(field, n)
    term = Mat.identity(field, n)
    fact = 1
    for k in range(1, n + 1):
        term = term * n_op
        fact *= (k + 1)
        out = out + Fraction(1, fact) * term
    return out


def _block_diag(field, blocks):
    total = sum(b.rows for b in blocks)
    rows = []
    off = 0
    for b in blocks:
        for i in range(b.rows):
            row = [field.zero] * total
            for j in range(b.cols):
                row[off + j] = b.entries[i][j]
            rows.append(row)
        off += b.cols
    return Mat(field, rows)


def _block2(field, a, b, c, d):
    """[[a, b], [c, d]] of equal square blocks."""
    n = a.rows
    rows = []
    for i in range(n):
        rows.append(list(a.entries[i]) + list(b.entries[i]))
    for i in range(n):
        rows.append(list(c.entries[i]) + list(d.entries[i]))
    return Mat(field, rows)


@dataclass
class CohomologyPiece:
    """One H^i: the defining subquotient plus its induced log-point object."""

    degree: int
    subquotient: Subquotient
    obj: LogPointObject


@dataclass
class CohomologyResult:
    h0: CohomologyPiece
    h1: CohomologyPiece
    h2: CohomologyPiece

    def pieces(self):
        return (self.h0, self.h1, self.h2)

    def euler_characteristic(self) -> int:
        return self.h0.obj.dim - self.h1.obj.dim + self.h2.obj.dim


def cohomology(e: EllipticRep) -> CohomologyResult:
    """H^0 = ker d0, H^1 = ker d1/im d0, H^2 = coker d1, with induced
    monodromy, Frobenius, weight filtration (image convention) and grading."""
    field = e.field
    n = e.dim
    d0, d1 = standard_complex(e)
    sq = [
        Subquotient.of_subspace(mat_kernel(d0)),
        Subquotient(mat_kernel(d1), mat_image(d0)),
        Subquotient.quotient(field, n, mat_image(d1)),
    ]
    v1, _ = _fitting_unipotent(e)
    eu = _restrict(e, v1)
    d0u, d1u = standard_complex(eu)
    squ = [
        Subquotient.of_subspace(mat_kernel(d0u)),
        Subquotient(mat_kernel(d1u), mat_image(d0u)),
        Subquotient.quotient(field, eu.dim, mat_image(d1u)),
    ]
    for a, b in zip(sq, squ):
        if a.dim != b.dim:
            raise PreconditionViolated("non-unipotent part is not acyclic (bug)")
    # chain maps: projector onto the unipotent part, then theta to the log complex
    proj = _fitting_projector(e, v1)
    n1 = nilpotent_log(eu.gamma1)
    n2 = nilpotent_log(eu.gamma2)
    u1 = _unipotent_series_u(n1)
    u2 = _unipotent_series_u(n2)
    m = eu.dim
    theta = [
        Mat.identity(field, m),
        _block_diag(field, [u1.inverse(), u2.inverse()]),
        (u1 * u2).inverse(),
    ]
    d0l = Mat(field, [list(n1.entries[i]) for i in range(m)] + [list(n2.entries[i]) for i in range(m)])
    d1l = Mat(field, [list((-n2).entries[i]) + list(n1.entries[i]) for i in range(m)])
    if not (theta[1] * d0u == d0l * theta[0]) or not (theta[2] * d1u == d1l * theta[1]):
        raise PreconditionViolated("chain comparison failed (bug)")
    sql = [
        Subquotient.of_subspace(mat_kernel(d0l)),
        Subquotient(mat_kernel(d1l), mat_image(d0l)),
        Subquotient.quotient(field, m, mat_image(d1l)),
    ]
    # level maps on chains
    zero_m = Mat.zeros(field, m)
    q_scal = field.coerce(e.q)
    g0_levels = [
        eu.gamma0,
        _block2(field, eu.gamma0, -eu.gamma0, zero_m, eu.gamma0),
        eu.gamma0,
    ]
    f_levels = [
        eu.frobenius,
        _block_diag(field, [eu.frobenius, q_scal * eu.frobenius]),
        q_scal * eu.frobenius,
    ]
    proj_levels = [proj, _block_diag(field, [proj, proj]), proj]
    pieces = []
    for i in range(3):
        comp = induced_map(theta[i] * proj_levels[i], sq[i], sql[i])
        try:
            comp_inv = comp.inverse()
        except ZeroDivisionError as exc:
            raise PreconditionViolated("cohomology comparison is not invertible (bug)") from exc
        g0_log = induced_map(g0_levels[i], sql[i])
        f_log = induced_map(f_levels[i], sql[i])
        g0_act = comp_inv * g0_log * comp
        f_act = comp_inv * f_log * comp
        # weight filtration: image convention W_w H^i = im H^i(W_{w-i} H)
        steps = []
        weights = sorted({w + i for w in e.weights.jumps()} | {e.weights.min_jump + i - 1})
        for w in weights:
            cw = _chain_weight_subspace(e, i, w)
            steps.append((w, sq[i].induced_subspace(cw)))
        filt = Filtration(field, sq[i].dim, steps)
        # grading through the log-side chain grading
        parts: dict[int, list] = {}
        for w in sorted({pw + shift for pw, _ in eu.grading.parts for shift in (0, 2)} | set(p for p, _ in eu.grading.parts)):
            cp = _chain_grading_subspace(eu, i, w)
            ind = sql[i].induced_subspace(cp)
            for vec in ind.basis:
                back = comp_inv.apply(vec)
                parts.setdefault(w, []).append(back)
        split_parts = [
            (w, Subspace(field, sq[i].dim, vs)) for w, vs in parts.items()
            if any(any(x != 0 for x in v) for v in vs)
        ]
        grading = Splitting(field, sq[i].dim, split_parts)
        n_act = nilpotent_log(g0_act)
        obj = LogPointObject(
            standard_monoid(), field, filt, [n_act], f_act, e.q, grading,
        )
        pieces.append(CohomologyPiece(i, sq[i], obj))
    return CohomologyResult(*pieces)


def _fitting_projector(e: EllipticRep, v1: Subspace) -> Mat:
    """Projector onto the gamma1-unipotent part, in its coordinates."""
    field = e.field
    subq = Subquotient.of_subspace(v1)
    shifted = e.gamma1 - Mat.identity(field, e.dim)
    rest = mat_image(shifted ** max(e.dim, 1))
    cols = []
    basis = list(v1.basis) + list(rest.basis)
    bmat = Mat(field, list(zip(*basis))) if basis else Mat.zeros(field, e.dim, 0)
    binv = bmat.inverse()
    for j in range(e.dim):
        coords = binv.apply([field.one if k == j else field.zero for k in range(e.dim)])
        vec = [field.zero] * e.dim
        for c, b in zip(coords[: v1.dim], v1.basis):
            vec = [x + c * y for x, y in zip(vec, b)]
        cols.append(subq.project(tuple(vec)))
    return Mat(field, list(zip(*cols))) if cols else Mat.zeros(field, v1.dim, 0)


def _chain_weight_subspace(e: EllipticRep, level: int, w: int) -> Subspace:
    """W_{w-level} of the level-th term of the complex (tensor convention)."""
    field = e.field
    n = e.dim
    base = e.weights.at(w - level)
    if level == 0:
        return base
    if level == 1:
        vecs = [tuple(v) + (field.zero,) * n for v in base.basis]
        vecs += [(field.zero,) * n + tuple(v) for v in base.basis]
        return Subspace(field, 2 * n, vecs)
    return base


def _chain_grading_subspace(e: EllipticRep, level: int, w: int) -> Subspace:
    """Frobenius-weight-w part of the level-th term (e1 twist 0, e2 twist 2)."""
    field = e.field
    n = e.dim
    if level == 0:
        return e.grading.part(w)
    if level == 1:
        first = e.grading.part(w)
        second = e.grading.part(w - 2)
        vecs = [tuple(v) + (field.zero,) * n for v in first.basis]
        vecs += [(field.zero,) * n + tuple(v) for v in second.basis]
        return Subspace(field, 2 * n, vecs)
    return e.grading.part(w - 2)


def eigen_decompose(e: EllipticRep, roots):
    """Summands on the generalized eigenspaces of gamma1, each closed under
    gamma0, gamma2, F."""
    spaces = generalized_eigenspaces(e.gamma1, roots)
    out = []
    for c, space in spaces:
        for m in (e.gamma0, e.gamma2, e.frobenius):
            for v in space.basis:
                if not space.contains(m.apply(v)):
                    raise SpectrumNotSplit("eigenspace is not stable under the operators")
        out.append((c, _restrict(e, space)))
    return out


def check_AY_membership(piece: CohomologyPiece):
    """Delegate to the log-point membership of the induced object."""
    return check_membership(piece.obj)


def lefschetz_map(e: EllipticRep, result: CohomologyResult | None = None):
    """The identity-induced map H^0(H) -> H^2(H(1)).

    Returns (matrix, source object, twisted target object).
    """
    if not e.gamma1.is_unipotent():
        raise NotUnipotentError("Lefschetz map needs gamma1 unipotent")
    result = cohomology(e) if result is None else result
    src = result.h0
    tgt = result.h2
    cols = [tgt.subquotient.project(v) for v in src.subquotient.num.basis]
    mat = Mat(e.field, list(zip(*cols))) if cols else Mat.zeros(e.field, tgt.obj.dim, 0)
    return mat, src.obj, tate_twist(tgt.obj, 1)


def lefschetz_is_isomorphism(e: EllipticRep, result: CohomologyResult | None = None) -> bool:
    """Bijective and compatible with Frobenius and the boundary monodromy."""
    mat, src, tgt = lefschetz_map(e, result)
    if src.dim != tgt.dim or (src.dim and mat_kernel(mat).dim != 0):
        return False
    if not (mat * src.frobenius == tgt.frobenius * mat):
        return False
    if not (mat * src.nilpotents[0] == tgt.nilpotents[0] * mat):
        return False
    return True


def lefschetz_in_category(e: EllipticRep, result: CohomologyResult | None = None) -> bool:
    """The Lefschetz map is an isomorphism of log-point objects (with W and grading)."""
    mat, src, tgt = lefschetz_map(e, result)
    try:
        mor = LogPointMorphism(src, tgt, mat)
    except PreconditionViolated:
        return False
    from .logpoint import is_isomorphism

    return is_isomorphism(mor)


@dataclass
class PushforwardReport:
    """Prop-style equivalence report for a gamma1-unipotent representation."""

    vacuous: bool
    all_cohomology_members: bool
    h0_member: bool
    lefschetz_isomorphism: bool
    is_pullback: bool
    equivalent: bool
    lefschetz_in_category: bool | None = None


def check_prop68(e: EllipticRep) -> PushforwardReport:
    """Evaluate the four pushforward conditions and report their agreement."""
    if not e.gamma1.is_unipotent():
        result = cohomology(_restrict(e, mat_kernel((e.gamma1 - Mat.identity(e.field, e.dim)) ** e.dim)))
        if all(p.obj.dim == 0 for p in result.pieces()):
            return PushforwardReport(True, True, True, True, False, True)
    result = cohomology(e)
    members = [bool(check_AY_membership(p)) for p in result.pieces()]
    cond_i = all(members)
    cond_ii = members[0]
    cond_iii = lefschetz_is_isomorphism(e, result)
    one = Mat.identity(e.field, e.dim)
    cond_iv = (e.gamma1 == one) and (e.gamma2 == one)
    if cond_iv:
        base = LogPointObject(
            standard_monoid(), e.field, e.weights, [nilpotent_log(e.gamma0)],
            e.frobenius, e.q, e.grading,
        )
        cond_iv = bool(check_membership(base))
    equivalent = len({cond_i, cond_ii, cond_iii, cond_iv}) == 1
    in_cat = lefschetz_in_category(e, result) if equivalent and cond_i else None
    return PushforwardReport(False, cond_i, cond_ii, cond_iii, cond_iv, equivalent, in_cat)


def tensor_rep(a: EllipticRep, b: EllipticRep) -> EllipticRep:
    """Tensor product representation (validated, so unipotence is re-enforced)."""
    if a.q != b.q:
        raise PreconditionViolated("representations with different q")
    from .filtration import kron_mat, tensor_filtration, tensor_splitting

    return EllipticRep(
        a.field,
        tensor_filtration(a.weights, b.weights),
        kron_mat(a.gamma0, b.gamma0),
        kron_mat(a.gamma1, b.gamma1),
        kron_mat(a.gamma2, b.gamma2),
        kron_mat(a.frobenius, b.frobenius),
        a.q,
        tensor_splitting(a.grading, b.grading),
    )


def direct_sum_rep(a: EllipticRep, b: EllipticRep) -> EllipticRep:
    if a.q != b.q:
        raise PreconditionViolated("representations with different q")
    from .filtration import sum_filtration, sum_splitting

    field = a.field

    def block(x, y):
        rows = [list(x.entries[i]) + [field.zero] * b.dim for i in range(a.dim)]
        rows += [[field.zero] * a.dim + list(y.entries[i]) for i in range(b.dim)]
        return Mat(field, rows)

    return EllipticRep(
        field,
        sum_filtration(a.weights, b.weights),
        block(a.gamma0, b.gamma0),
        block(a.gamma1, b.gamma1),
        block(a.gamma2, b.gamma2),
        block(a.frobenius, b.frobenius),
        a.q,
        sum_splitting(a.grading, b.grading),
    )


# ----------------------------------------------------------------------------
# builders


def constant(q, field=None) -> EllipticRep:
    from .scalars import QQ

    field = QQ if field is None else field
    one = Mat.identity(field, 1)
    return EllipticRep(
        field, Filtration.pure(field, 1, 0), one, one, one, one, q,
        Splitting.pure(field, 1, 0),
    )


def example_615(q, field=None) -> EllipticRep:
    """Two-dimensional unipotent gamma1-representation with trivial gamma0, F."""
    from .scalars import QQ

    field = QQ if field is None else field
    one = Mat.identity(field, 2)
    g1 = Mat(field, [[1, 1], [0, 1]])
    return EllipticRep(
        field, Filtration.pure(field, 2, 0), one, g1, one, one, q,
        Splitting.pure(field, 2, 0),
    )


def pullback_from_Y(obj: LogPointObject) -> EllipticRep:
    """Trivial translation action; gamma0 = exp(N), F and W from the object."""
    if not obj.is_standard():
        raise PreconditionViolated("pullbacks come from the standard log point")
    one = Mat.identity(obj.field, obj.dim)
    return EllipticRep(
        obj.field, obj.weights, nilpotent_exp(obj.monodromy_log()), one, one,
        obj.frobenius, obj.q, obj.grading,
    )


def s1_pullback(q, field=None) -> EllipticRep:
    from .logpoint import build_Sr
    from .scalars import QQ

    field = QQ if field is None else field
    return pullback_from_Y(build_Sr(1, q, field))
