"""Deligne splittings, multi-filtration systems, and their torus/lowering data.

``deligne_splitting`` realizes the unique grading of W compatible with a given
grading of the relative filtration whose off-degree operator components are
primitive: starting from any compatible splitting it solves one exact square
linear system per degree (ad(N0)^d on the degree (-d, 0) block, an isomorphism
by sl(2) weight theory) and conjugates by the resulting unipotent.  The final
grading is re-verified against the characterization before being returned.

``build_sl2_data`` runs the downward induction producing the gradings of each
filtration in a system and the degree-zero components of the operators; the
purity and commutation laws the asymptotic theory consumes are checked before
the data is handed out.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import (
    DimensionMismatch,
    InternalInconsistency,
    PreconditionViolated,
    ValidationFailed,
)
from .filtration import Filtration, Splitting, any_splitting, multigrading
from .linalg import (
    Mat,
    Subquotient,
    Subspace,
    commutator,
    nilpotent_exp,
    solve,
)
from .monodromy import verify_rmf


@dataclass(frozen=True)
class Violation:
    clause: str
    where: tuple
    message: str

    def __bool__(self):
        return False


class DeligneSystem:
    """(V, W^0..W^n, N_1..N_n, Y): iterated relative filtrations with a grading."""

    __slots__ = ("field", "dim", "filtrations", "operators", "grading")

    def __init__(self, field, filtrations, operators, grading: Splitting):
        filtrations = tuple(filtrations)
        operators = tuple(operators)
        if len(filtrations) != len(operators) + 1:
            raise DimensionMismatch("need one more filtration than operators")
        dim = grading.ambient
        for f in filtrations:
            if f.ambient != dim:
                raise DimensionMismatch("filtration ambient mismatch")
        for op in operators:
            if op.rows != dim or op.cols != dim:
                raise DimensionMismatch("operator size mismatch")
        object.__setattr__(self, "field", field)
        object.__setattr__(self, "dim", dim)
        object.__setattr__(self, "filtrations", filtrations)
        object.__setattr__(self, "operators", operators)
        object.__setattr__(self, "grading", grading)

    def __setattr__(self, *a):
        raise AttributeError("DeligneSystem is immutable")

    @property
    def n(self) -> int:
        return len(self.operators)


@dataclass(frozen=True)
class SL2Data:
    """Gradings Y^0..Y^n of the system's filtrations and the operators N̂_j.

    N̂_j is the component of N_j of degree zero for Y^1..Y^{j-1}; it is purely
    of degree -2 for Y^i with j <= i <= n, and the N̂_j commute.
    """

    gradings: tuple
    nhats: tuple

    def tau_weights(self, j: int):
        return self.gradings[j].weights()


def deligne_splitting(n_op: Mat, w_filt: Filtration, m_filt: Filtration, grading: Splitting) -> Splitting:
    """The unique splitting of W compatible with the given splitting of M
    whose positive-codegree components of N are primitive.

    Preconditions (verified): M is the relative monodromy filtration of N with
    respect to W; the grading splits M, keeps W, and N is purely of degree -2
    for it.
    """
    field = n_op.field
    dim = n_op.rows
    if dim == 0:
        return Splitting(field, 0, [])
    if not verify_rmf(w_filt, n_op, m_filt):
        raise PreconditionViolated("M is not the relative monodromy filtration of (W, N)")
    if not grading.splits(m_filt):
        raise PreconditionViolated("grading does not split M")
    if not grading.keeps_filtration(w_filt):
        raise PreconditionViolated("grading is not compatible with W")
    if not n_op.is_zero() and not grading.is_pure_degree(n_op, -2):
        raise PreconditionViolated("operator is not purely of degree -2 for the grading")

    # initial splitting of W compatible with the grading: split W within each part
    parts: dict[int, list] = {}
    for v, q in grading.parts:
        sub = Subquotient.of_subspace(q)
        w_local = w_filt.restrict_to(sub)
        local = any_splitting(w_local)
        for w, p in local.parts:
            parts.setdefault(w, []).extend(sub.lift(vec) for vec in p.basis)
    current = Splitting(field, dim, [(w, Subspace(field, dim, vs)) for w, vs in parts.items()])

    span = (w_filt.max_jump - w_filt.min_jump) if w_filt.steps else 0
    for d in range(1, span + 1):
        comps = current.operator_components(n_op)
        n0 = comps.get(0, Mat.zeros(field, dim))
        nd = comps.get(-d, Mat.zeros(field, dim))
        defect = _ad_power(n0, d - 1, nd)
        if defect.is_zero():
            continue
        eta = _solve_degree_block(current, grading, n0, d, defect)
        u = nilpotent_exp(eta)
        uinv = u.inverse()
        new_parts = []
        for w, p in current.parts:
            new_parts.append((w, Subspace(field, dim, [u.apply(v) for v in p.basis])))
        current = Splitting(field, dim, new_parts)
        del uinv
    # verification of the characterization
    if not current.splits(w_filt):
        raise InternalInconsistency("splitting lost W")
    if not current.compatible_with(grading):
        raise InternalInconsistency("splitting lost compatibility")
    comps = current.operator_components(n_op)
    n0 = comps.get(0, Mat.zeros(field, dim))
    for d_chk, comp in comps.items():
        if d_chk > 0:
            raise InternalInconsistency("operator has a positive-degree component")
        d_abs = -d_chk
        if d_abs >= 1 and not _ad_power(n0, d_abs - 1, comp).is_zero():
            raise InternalInconsistency("primitivity failed after correction")
    return current


def _ad_power(n0: Mat, k: int, x: Mat) -> Mat:
    out = x
    for _ in range(k):
        out = commutator(n0, out)
    return out


def _solve_degree_block(current: Splitting, grading: Splitting, n0: Mat, d: int, defect: Mat) -> Mat:
    """Solve ad(N0)^d(eta) = -defect with eta of bidegree (-d, 0).

    The block is square and invertible on valid input (sl(2) raising/lowering
    between opposite weights); failure is an internal inconsistency.
    """
    field = n0.field
    dim = n0.rows
    pieces = multigrading([current, grading])
    basis = [(lbl, v) for lbl, s in pieces for v in s.basis]
    p = Mat(field, list(zip(*[v for _, v in basis])))
    pinv = p.inverse()

    def bidegree_slots(dw, dv):
        slots = []
        for i, (li, _) in enumerate(basis):
            for j, (lj, _) in enumerate(basis):
                if li[0] - lj[0] == dw and li[1] - lj[1] == dv:
                    slots.append((i, j))
        return slots

    dom = bidegree_slots(-d, 0)
    cod = bidegree_slots(-d, -2 * d)
    if len(dom) != len(cod):
        raise InternalInconsistency("bidegree blocks are not square")
    if not dom:
        raise InternalInconsistency("empty bidegree block with nonzero defect")
    n0b = pinv * n0 * p
    defect_b = pinv * defect * p
    cols = []
    for (i, j) in dom:
        e = [[field.zero] * dim for _ in range(dim)]
        e[i][j] = field.one
        img = Mat(field, e)
        for _ in range(d):
            img = n0b * img - img * n0b
        cols.append([img.entries[a][b] for (a, b) in cod])
    target = [-defect_b.entries[a][b] for (a, b) in cod]
    sol = solve(Mat(field, list(zip(*cols))), target)
    if sol is None:
        raise InternalInconsistency("degree block is singular; input was not a valid pair")
    eta_b = [[field.zero] * dim for _ in range(dim)]
    for c, (i, j) in zip(sol, dom):
        eta_b[i][j] = c
    return p * Mat(field, eta_b) * pinv


def validate_system(s: DeligneSystem) -> Violation | None:
    """Exact check of every system clause; returns the first violation."""
    field = s.field
    n = s.n
    w = s.filtrations
    ops = s.operators
    y = s.grading
    for a in range(n):
        for b in range(a + 1, n):
            if not commutator(ops[a], ops[b]).is_zero():
                return Violation("commuting", (a + 1, b + 1), "operators do not commute")
    for j, op in enumerate(ops, start=1):
        if not op.is_nilpotent():
            return Violation("nilpotent", (j,), "operator is not nilpotent")
    if not y.splits(w[n]):
        return Violation("grading-splits-top", (n,), "grading does not split the top filtration")
    for j in range(0, n + 1):
        if not y.keeps_filtration(w[j]):
            return Violation("grading-compatible", (j,), "grading does not keep a filtration")
    for j, op in enumerate(ops, start=1):
        if not op.is_zero() and not y.is_pure_degree(op, -2):
            return Violation("weight-minus-two", (j,), "operator is not pure of degree -2 for the grading")
    for i in range(0, n + 1):
        for j, op in enumerate(ops, start=1):
            for jw, step in w[i].steps:
                for v in step.basis:
                    if not step.contains(op.apply(v)):
                        return Violation("preserves", (i, j, jw), "operator moves a filtration step")
                    if i >= j:
                        target = w[i].at(jw - 2)
                        if not target.contains(op.apply(v)):
                            return Violation(
                                "lowers-by-two", (i, j, jw),
                                "operator does not lower the later filtration by 2",
                            )
    # relative-filtration clauses on pieces of the earlier filtrations
    for j in range(1, n + 1):
        for i in range(0, j):
            for jw in w[i].jumps():
                u = Subquotient.of_subspace(w[i].at(jw))
                try:
                    ok = verify_rmf(
                        w[j - 1].restrict_to(u),
                        u.induced_operator(ops[j - 1]),
                        w[j].restrict_to(u),
                    )
                except PreconditionViolated:
                    ok = False
                if not ok:
                    return Violation(
                        "relative-filtration", (i, j, jw),
                        "restriction is not the relative monodromy filtration",
                    )
    return None


def build_sl2_data(s: DeligneSystem) -> SL2Data:
    """Downward induction producing (Y^0..Y^n, N̂_1..N̂_n); validated first."""
    bad = validate_system(s)
    if bad:
        raise ValidationFailed(f"{bad.clause} at {bad.where}: {bad.message}")
    n = s.n
    gradings = [None] * (n + 1)
    gradings[n] = s.grading
    for j in range(n - 1, -1, -1):
        gradings[j] = deligne_splitting(
            s.operators[j], s.filtrations[j], s.filtrations[j + 1], gradings[j + 1]
        )
    nhats = []
    for j in range(1, n + 1):
        op = s.operators[j - 1]
        if j == 1:
            nhat = op
        else:
            inner = gradings[1:j]
            nhat = _multidegree_zero(inner, op)
        nhats.append(nhat)
    # purity and commutation laws
    for j in range(1, n + 1):
        nhat = nhats[j - 1]
        if nhat.is_zero():
            continue
        for i in range(1, j):
            if not gradings[i].is_pure_degree(nhat, 0):
                raise InternalInconsistency("degree-zero component has stray weights")
        for i in range(j, n + 1):
            if not gradings[i].is_pure_degree(nhat, -2):
                raise InternalInconsistency("lowering operator not pure of weight -2")
    for a in range(n):
        for b in range(a + 1, n):
            if not commutator(nhats[a], nhats[b]).is_zero():
                raise InternalInconsistency("lowering operators do not commute")
    return SL2Data(tuple(gradings), tuple(nhats))


def _multidegree_zero(splittings, m: Mat) -> Mat:
    field = m.field
    dim = m.rows
    pieces = multigrading(list(splittings))
    basis = [(lbl, v) for lbl, s in pieces for v in s.basis]
    p = Mat(field, list(zip(*[v for _, v in basis])))
    pinv = p.inverse()
    a = pinv * m * p
    keep = [[field.zero] * dim for _ in range(dim)]
    for i in range(dim):
        for j in range(dim):
            if a.entries[i][j] != 0 and basis[i][0] == basis[j][0]:
                keep[i][j] = a.entries[i][j]
    return p * Mat(field, keep) * pinv


def system_from_admissible(family, chain, picks, grading: Splitting) -> DeligneSystem:
    """Assemble the system W^j := W(σ_j), N_j := h(pick_j) from a face chain.

    ``chain`` is σ_0 ⊆ σ_1 ⊊ ... ⊊ σ_n with picks interior to σ_1..σ_n; the
    assembled system is validated before being returned.
    """
    action = family.action
    faces = list(chain)
    for a, b in zip(faces, faces[1:]):
        if not (b.contains_face(a) and a.vanish != b.vanish):
            raise PreconditionViolated("chain is not strictly increasing")
    picks = list(picks)
    if len(picks) != len(faces) - 1:
        raise PreconditionViolated("need one interior pick per chain step above the base")
    for face, pick in zip(faces[1:], picks):
        if not face.is_interior(pick):
            raise PreconditionViolated("pick is not interior to its face")
    filts = [family.at(f) for f in faces]
    ops = [action.operator(p) for p in picks]
    system = DeligneSystem(action.field, filts, ops, grading)
    bad = validate_system(system)
    if bad:
        raise ValidationFailed(f"{bad.clause} at {bad.where}: {bad.message}")
    return system


class DeligneMorphism:
    """Linear map commuting with the operators, filtered for every W^j,
    homogeneous of degree zero for the gradings."""

    __slots__ = ("source", "target", "mat")

    def __init__(self, source: DeligneSystem, target: DeligneSystem, mat: Mat):
        if source.n != target.n:
            raise DimensionMismatch("systems of different lengths")
        if mat.cols != source.dim or mat.rows != target.dim:
            raise DimensionMismatch("matrix shape mismatch")
        for a, b in zip(source.operators, target.operators):
            if not (mat * a == b * mat):
                raise PreconditionViolated("map does not commute with the operators")
        for fs, ft in zip(source.filtrations, target.filtrations):
            for w, step in fs.steps:
                for v in step.basis:
                    if not ft.at(w).contains(mat.apply(v)):
                        raise PreconditionViolated("map is not filtered")
        for w, part in source.grading.parts:
            tpart = target.grading.part(w)
            for v in part.basis:
                if not tpart.contains(mat.apply(v)):
                    raise PreconditionViolated("map is not graded")
        object.__setattr__(self, "source", source)
        object.__setattr__(self, "target", target)
        object.__setattr__(self, "mat", mat)

    def __setattr__(self, *a):
        raise AttributeError("DeligneMorphism is immutable")


def _induced_system(sys_: DeligneSystem, subq: Subquotient) -> DeligneSystem:
    filts = [f.restrict_to(subq) for f in sys_.filtrations]
    ops = [subq.induced_operator(op) for op in sys_.operators]
    grading = sys_.grading.restrict_to(subq)
    out = DeligneSystem(sys_.field, filts, ops, grading)
    bad = validate_system(out)
    if bad:
        raise ValidationFailed(
            f"induced system violates {bad.clause} at {bad.where} (abelian-category failure)"
        )
    return out


def kernel_system(mor: DeligneMorphism):
    """Kernel with induced data, plus the subquotient identifying it."""
    from .linalg import kernel as _kernel

    k = _kernel(mor.mat)
    subq = Subquotient.of_subspace(k)
    return _induced_system(mor.source, subq), subq


def cokernel_system(mor: DeligneMorphism):
    from .linalg import image as _image

    subq = Subquotient.quotient(mor.target.field, mor.target.dim, _image(mor.mat))
    return _induced_system(mor.target, subq), subq


def tate_twist_system(s: DeligneSystem, k: int) -> DeligneSystem:
    """Shift every filtration and the grading by -2k (operators unchanged)."""
    return DeligneSystem(
        s.field,
        [f.shift(-2 * k) for f in s.filtrations],
        s.operators,
        s.grading.shift(-2 * k),
    )
