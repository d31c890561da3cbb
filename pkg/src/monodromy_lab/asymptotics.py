"""Numerical verification of the convergence of conjugated monodromy operators.

A boundary setup packages a member object, a boundary point of its ratio
space, the marker generators and flag-adapted dual bases, and the exact
torus/lowering data of the induced multi-filtration system.  Along rank-one
points converging to the boundary, the conjugate t(ν)^{-1} N(ν) t(ν) is
compared with the exact limit Σ N̂_j in sup norm; conjugation factors are kept
exact whenever their half-integer exponents are integral.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import inf, sqrt

from .deligne import DeligneSystem, SL2Data, build_sl2_data
from .errors import NotRankOne, PreconditionViolated
from .filtration import multigrading
from .linalg import Mat, Subspace, solve
from .logpoint import LogPointObject, check_membership
from .parallel import parallel_map
from .ratios import RatioPath, RatioPoint, path_samples
from .scalars import QQ


@dataclass(frozen=True)
class ConvergenceRow:
    """One sample: schedule weights, ratio coordinates, sup-norm distance."""

    ys: tuple
    ratios: tuple
    distance: float


class BoundarySetup:
    def __init__(self, obj: LogPointObject, mu: RatioPoint, adapted=None):
        rep = check_membership(obj)
        if not rep:
            raise PreconditionViolated("object is not a member: " + "; ".join(rep.violations))
        if mu.cone != obj.cone:
            raise PreconditionViolated("boundary point lives on a different cone")
        self.obj = obj
        self.family = rep.family
        self.mu = mu
        self.action = rep.family.action
        chain = [obj.cone.zero_face] + list(mu.chain)
        filts = [rep.family.at(f) for f in chain]
        ops = [self.action.operator(w) for w in mu.witnesses]
        self.system = DeligneSystem(obj.field, filts, ops, obj.grading)
        self.sl2: SL2Data = build_sl2_data(self.system)
        self.chain = chain
        self.markers = mu.markers()
        self.adapted = adapted if adapted is not None else _adapted_basis(mu)
        self.duals = _dual_basis(mu, self.adapted)
        # simultaneous weight data for the torus gradings Y^1..Y^n
        self.n = mu.length
        inner = list(self.sl2.gradings[1:])
        pieces = multigrading(inner) if inner else []
        basis = [(lbl, v) for lbl, s in pieces for v in s.basis]
        self.tau_weights = tuple(lbl for lbl, _ in basis)
        self.basis_mat = Mat(obj.field, list(zip(*[v for _, v in basis])))
        self.basis_inv = self.basis_mat.inverse()

    def limit_operator(self) -> Mat:
        """Σ N̂_j, the exact limit."""
        out = Mat.zeros(self.obj.field, self.obj.dim)
        for nhat in self.sl2.nhats:
            out = out + nhat
        return out


def _adapted_basis(mu: RatioPoint):
    """Per level j, generators forming a basis of the j-th graded piece of the
    monoid's group span (first-in-input-order, independent modulo the next face)."""
    gens = mu.monoid.generators
    duals = mu.dual_faces()
    out = []
    for j in range(1, len(duals)):
        upper = duals[j - 1]
        lower = duals[j]
        lower_vecs = [[Fraction(x) for x in gens[i]] for i in sorted(lower)]
        span = Subspace(QQ, mu.monoid.rank, lower_vecs)
        chosen = []
        for i in range(len(gens)):
            if i in upper and i not in lower:
                red = span.reduce([Fraction(x) for x in gens[i]])
                if any(x != 0 for x in red):
                    chosen.append(gens[i])
                    span = span.add(Subspace(QQ, mu.monoid.rank, [[Fraction(x) for x in gens[i]]]))
        out.append(tuple(chosen))
    return tuple(out)


def _dual_basis(mu: RatioPoint, adapted):
    """Dual basis vectors N_{j,λ} in the span of σ_j, one per adapted generator."""
    flat = [g for level in adapted for g in level]
    m = mu.monoid.rank
    if len(flat) != m:
        raise PreconditionViolated("adapted basis does not span the monoid group")
    bmat = Mat(QQ, list(zip(*[[Fraction(x) for x in g] for g in flat])))
    binv = bmat.inverse()
    duals = []
    idx = 0
    for j, level in enumerate(adapted):
        face = mu.chain[j]
        span = face.span_subspace()
        level_duals = []
        for _ in level:
            vec = tuple(binv.entries[idx])
            if not span.contains(vec):
                raise PreconditionViolated("dual basis vector leaves the face span")
            level_duals.append(vec)
            idx += 1
        duals.append(tuple(level_duals))
    return tuple(duals)


def n_of_nu(setup: BoundarySetup, nu: RatioPoint) -> Mat:
    """Exact image of the rank-one direction normalized against the top marker."""
    if not nu.is_rank_one():
        raise NotRankOne("direction is not rank one")
    witness = nu.witnesses[0]
    f_top = setup.markers[-1]
    scale = sum(Fraction(a) * Fraction(b) for a, b in zip(f_top, witness))
    if scale <= 0:
        raise PreconditionViolated("witness does not pair positively with the top marker")
    normalized = tuple(Fraction(x) / scale for x in witness)
    return setup.action.operator(normalized)


def n_of_nu_expansion(setup: BoundarySetup, nu: RatioPoint) -> Mat:
    """Σ_{j,λ} ν(f_{j,λ}, f_n) h(N_{j,λ}): the flag-adapted expansion."""
    if not nu.is_rank_one():
        raise NotRankOne("direction is not rank one")
    f_top = setup.markers[-1]
    out = Mat.zeros(setup.obj.field, setup.obj.dim)
    for level, level_duals in zip(setup.adapted, setup.duals):
        for g, dual in zip(level, level_duals):
            coeff = nu.evaluate(g, f_top)
            if coeff == inf:
                raise PreconditionViolated("rank-one evaluation returned infinity")
            if coeff != 0:
                out = out + setup.obj.field.coerce(coeff) * setup.action.operator(dual)
    return out


def ratio_coordinates(setup: BoundarySetup, nu: RatioPoint) -> tuple:
    """c_j = ν(f_{j+1}, f_j) for j = 1..n-1 (exact, finite, positive)."""
    out = []
    for j in range(setup.n - 1):
        val = nu.evaluate(setup.markers[j + 1], setup.markers[j])
        if val == inf or val == 0:
            raise NotRankOne("marker ratio degenerates; point is not rank one")
        out.append(val)
    return tuple(out)


def conjugated_operator(setup: BoundarySetup, nu: RatioPoint):
    """Entries of t(ν)^{-1} N(ν) t(ν) in the torus-adapted basis.

    Returns (entries, exact_flags): entries are exact field elements where all
    conjugation exponents are integral, floats otherwise.
    """
    field = setup.obj.field
    ratios = ratio_coordinates(setup, nu)
    a = setup.basis_inv * n_of_nu(setup, nu) * setup.basis_mat
    dim = setup.obj.dim
    entries = [[None] * dim for _ in range(dim)]
    exact = [[True] * dim for _ in range(dim)]
    for p in range(dim):
        for q in range(dim):
            val = a.entries[p][q]
            if val == 0:
                entries[p][q] = field.zero
                continue
            wq = setup.tau_weights[q]
            wp = setup.tau_weights[p]
            all_integral = True
            factor_exact = Fraction(1)
            factor_float = 1.0
            for j in range(setup.n - 1):
                num = wq[j] - wp[j]
                c = ratios[j]
                if num % 2 == 0:
                    factor_exact *= Fraction(c) ** (num // 2)
                    factor_float *= float(c) ** (num // 2)
                else:
                    all_integral = False
                    factor_float *= sqrt(float(c)) ** num
            if all_integral:
                entries[p][q] = val * field.coerce(factor_exact)
            else:
                entries[p][q] = field.real_value(val) * factor_float
                exact[p][q] = False
    return entries, exact


def distance_to_limit(setup: BoundarySetup, nu: RatioPoint) -> float:
    entries, _ = conjugated_operator(setup, nu)
    field = setup.obj.field
    limit = setup.basis_inv * setup.limit_operator() * setup.basis_mat
    worst = 0.0
    for p in range(setup.obj.dim):
        for q in range(setup.obj.dim):
            e = entries[p][q]
            ev = e if isinstance(e, float) else field.real_value(e)
            worst = max(worst, abs(ev - field.real_value(limit.entries[p][q])))
    return worst


def sweep(setup: BoundarySetup, path: RatioPath, count: int | None = None):
    """Convergence table along the path; the last distance must be minimal."""
    if path.point != setup.mu:
        raise PreconditionViolated("path does not converge to the setup's boundary point")
    samples = path_samples(path, count)

    def row(sample):
        nu, ys = sample
        return ConvergenceRow(ys, ratio_coordinates(setup, nu), distance_to_limit(setup, nu))

    rows = parallel_map(row, samples)
    if rows and any(r.distance < rows[-1].distance for r in rows):
        raise PreconditionViolated("distance is not minimized at the final sample")
    return rows


def lowering_weights_exact(setup: BoundarySetup) -> bool:
    """Rays of each chain face act purely in weight -2 for the later gradings."""
    for j in range(1, setup.n + 1):
        face = setup.chain[j]
        for ray in face.rays:
            op = setup.action.operator(tuple(Fraction(x) for x in ray))
            if op.is_zero():
                continue
            for i in range(j, setup.n + 1):
                if not setup.sl2.gradings[i].is_pure_degree(op, -2):
                    return False
    return True
