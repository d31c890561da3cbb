"""Sharp monoids, dual cones and faces, cone actions, and admissibility.

Monoids are given by integer generators spanning the ambient lattice; the dual
cone, its extreme rays, and the face lattice are enumerated exactly from
generator-vanishing subsets with a supporting-hyperplane test.  The
admissibility checker produces the face-indexed family of relative filtrations
and verifies all of its coherence conditions through the monodromy oracle.

Interior-independence of the relative filtrations is established by sampling:
two rational interior points per face, plus (over a quadratic field) points
with the embedding-positive root in each coordinate.  The field-valued samples
are what detect embedding-dependent degenerations, which never occur at
rational points.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from math import gcd, lcm

from .errors import ConeMismatch, NotInteriorError, PreconditionViolated
from .filtration import (
    Filtration,
    dual_filtration,
    sum_filtration,
    tensor_filtration,
    kron_mat,
)
from .linalg import Mat, Subquotient, Subspace, commutator, kernel, rref, solve
from .monodromy import rmf, verify_rmf
from .parallel import parallel_map
from .scalars import QQ


def _dotv(a, b):
    return sum(Fraction(x) * Fraction(y) for x, y in zip(a, b))


def _primitive(vec):
    """Scale a rational vector to a primitive integer vector (same direction)."""
    den = lcm(*[Fraction(x).denominator for x in vec]) if vec else 1
    ints = [int(Fraction(x) * den) for x in vec]
    g = 0
    for x in ints:
        g = gcd(g, abs(x))
    if g > 1:
        ints = [x // g for x in ints]
    return tuple(ints)


def _extreme_rays(ineq_rows, eq_rows, m):
    """Extreme rays of {x in R^m : ineq·x >= 0, eq·x = 0}; cone must be pointed."""
    if m == 0:
        return []
    field = QQ
    if eq_rows:
        basis = kernel(Mat(field, eq_rows)).basis
    else:
        basis = Subspace.full(field, m).basis
    k = len(basis)
    if k == 0:
        return []
    # inequalities in the k coordinates of the kernel basis
    a_rows = [[_dotv(row, b) for b in basis] for row in ineq_rows]
    a_rows = [r for r in a_rows if any(x != 0 for x in r)]
    lineality = kernel(Mat(field, a_rows)) if a_rows else Subspace.full(field, k)
    if lineality.dim > 0:
        raise PreconditionViolated("cone is not pointed; rays are undefined")

    def feasible(y):
        return all(_dotv(r, y) >= 0 for r in a_rows)

    def active_rank(y):
        act = [r for r in a_rows if _dotv(r, y) == 0]
        if not act:
            return 0
        return len(rref(act, field)[0])

    found = set()
    idx = range(len(a_rows))
    for subset in combinations(idx, k - 1) if k >= 1 else []:
        rows = [a_rows[i] for i in subset]
        ker = kernel(Mat(field, rows)) if rows else Subspace.full(field, k)
        if ker.dim != 1:
            continue
        d = ker.basis[0]
        for cand in (d, tuple(-x for x in d)):
            if feasible(cand) and active_rank(cand) == k - 1:
                amb = [sum((Fraction(c) * Fraction(b[i]) for c, b in zip(cand, basis)), Fraction(0)) for i in range(m)]
                found.add(_primitive(amb))
                break
    return sorted(found)


class SharpMonoid:
    """Finitely generated sharp monoid, by generators spanning the lattice."""

    __slots__ = ("rank", "generators")

    def __init__(self, rank: int, generators):
        gens = tuple(tuple(int(x) for x in g) for g in generators)
        for g in gens:
            if len(g) != rank:
                raise PreconditionViolated("generator length does not match rank")
        if rank > 0:
            span = rref([[Fraction(x) for x in g] for g in gens], QQ)[0]
            if len(span) != rank:
                raise PreconditionViolated(
                    "generators must span the ambient lattice (lower-rank monoids are out of scope)"
                )
        object.__setattr__(self, "rank", rank)
        object.__setattr__(self, "generators", gens)

    def __setattr__(self, *a):
        raise AttributeError("SharpMonoid is immutable")

    def dual_cone(self) -> "Cone":
        return Cone(self)

    def is_sharp(self) -> bool:
        """No nonzero invertible elements: the dual cone is full-dimensional."""
        if self.rank == 0:
            return True
        rays = _extreme_rays([list(g) for g in self.generators], [], self.rank)
        return len(rref([[Fraction(x) for x in r] for r in rays], QQ)[0]) == self.rank

    def __eq__(self, other):
        return (
            isinstance(other, SharpMonoid)
            and self.rank == other.rank
            and self.generators == other.generators
        )

    def __hash__(self):
        return hash((self.rank, self.generators))

    def __repr__(self):
        return f"SharpMonoid(rank {self.rank}, gens {list(self.generators)})"


class Cone:
    """Dual cone Hom(S, R_{>=0}) of a sharp monoid, with its face lattice."""

    __slots__ = ("monoid", "rays", "_face_cache")

    def __init__(self, monoid: SharpMonoid):
        if not monoid.is_sharp():
            raise PreconditionViolated("monoid is not sharp")
        rays = _extreme_rays([list(g) for g in monoid.generators], [], monoid.rank)
        object.__setattr__(self, "monoid", monoid)
        object.__setattr__(self, "rays", tuple(rays))
        object.__setattr__(self, "_face_cache", None)

    def __setattr__(self, *a):
        raise AttributeError("Cone is immutable")

    @property
    def rank(self):
        return self.monoid.rank

    def contains(self, v) -> bool:
        return all(_dotv(g, v) >= 0 for g in self.monoid.generators)

    def faces(self) -> tuple:
        """All faces, including {0} and the cone itself."""
        if self._face_cache is not None:
            return self._face_cache
        gens = self.monoid.generators
        m = self.rank
        seen = {}
        subsets = [()]
        for r in range(1, len(gens) + 1):
            subsets.extend(combinations(range(len(gens)), r))
        for sub in subsets:
            eqs = [list(gens[i]) for i in sub]
            rays = _extreme_rays([list(g) for g in gens], eqs, m)
            vanish = frozenset(
                i for i, g in enumerate(gens)
                if all(_dotv(g, r) == 0 for r in rays)
            ) if rays else frozenset(range(len(gens)))
            if vanish not in seen:
                seen[vanish] = Face(self, vanish, tuple(rays))
        faces = tuple(sorted(seen.values(), key=lambda f: (f.dim, f.rays)))
        object.__setattr__(self, "_face_cache", faces)
        return faces

    def face_of_rays(self, rays) -> "Face":
        """The face whose ray set matches the given rays (exact)."""
        target = tuple(sorted(_primitive(r) for r in rays))
        for f in self.faces():
            if f.rays == target:
                return f
        raise PreconditionViolated("no face has the given rays")

    @property
    def zero_face(self) -> "Face":
        return [f for f in self.faces() if f.dim == 0][0]

    @property
    def full_face(self) -> "Face":
        return self.faces()[-1]

    def __eq__(self, other):
        return isinstance(other, Cone) and self.monoid == other.monoid

    def __hash__(self):
        return hash(self.monoid)

    def __repr__(self):
        return f"Cone(rays {list(self.rays)})"


class Face:
    """A face of the dual cone: its rays and the monoid generators vanishing on it."""

    __slots__ = ("cone", "vanish", "rays")

    def __init__(self, cone: Cone, vanish: frozenset, rays: tuple):
        object.__setattr__(self, "cone", cone)
        object.__setattr__(self, "vanish", vanish)
        object.__setattr__(self, "rays", tuple(sorted(rays)))

    def __setattr__(self, *a):
        raise AttributeError("Face is immutable")

    @property
    def dim(self) -> int:
        if not self.rays:
            return 0
        return len(rref([[Fraction(x) for x in r] for r in self.rays], QQ)[0])

    def contains_face(self, other: "Face") -> bool:
        return self.vanish <= other.vanish

    def span_subspace(self) -> Subspace:
        return Subspace(QQ, self.cone.rank, [[Fraction(x) for x in r] for r in self.rays])

    def interior_element(self):
        """Sum of the rays: a rational point interior to the face."""
        m = self.cone.rank
        out = [Fraction(0)] * m
        for r in self.rays:
            out = [a + b for a, b in zip(out, r)]
        return tuple(out)

    def interior_samples(self, field):
        """Interior points used for independence checks, in the given field.

        Always the all-ones and 1..k ray combinations; over a quadratic field
        also combinations involving the embedding-positive root, which probe
        directions a rational sample cannot reach.
        """
        k = len(self.rays)
        if k == 0:
            return [tuple(field.zero for _ in range(self.cone.rank))]
        weight_sets = [[field.one] * k, [field.coerce(i) for i in range(1, k + 1)]]
        if getattr(field, "is_quadratic", False):
            root = field.sqrt_gen
            if root.sign() < 0:
                root = -root
            for i in range(k):
                ws = [field.one] * k
                ws[i] = root
                weight_sets.append(ws)
        out = []
        for ws in weight_sets:
            v = [field.zero] * self.cone.rank
            for w, r in zip(ws, self.rays):
                v = [a + w * field.coerce(x) for a, x in zip(v, r)]
            out.append(tuple(v))
        return out

    def is_interior(self, v) -> bool:
        """v lies in the cone and vanishes on exactly this face's generators.

        Accepts vectors over Q or over a quadratic field; positivity is the
        exact sign under the field's real embedding.
        """
        gens = self.cone.monoid.generators
        if not self.rays:
            return all(x == 0 for x in v)
        field = None
        for x in v:
            if hasattr(x, "field"):
                field = x.field
                break
        for i, g in enumerate(gens):
            val = sum((x * int(c) for x, c in zip(v, g)), 0 * v[0])
            if i in self.vanish:
                if val != 0:
                    return False
            else:
                pos = val > 0 if field is None else field.is_positive(val)
                if not pos:
                    return False
        # must lie in the span of the face
        if field is None:
            return self.span_subspace().contains([Fraction(x) for x in v])
        span_rows = [[field.coerce(x) for x in r] for r in self.rays]
        mat = Mat(field, list(zip(*span_rows)))
        return solve(mat, list(v)) is not None

    def __eq__(self, other):
        return isinstance(other, Face) and self.cone == other.cone and self.vanish == other.vanish

    def __hash__(self):
        return hash((self.cone, self.vanish))

    def __repr__(self):
        return f"Face(rays {list(self.rays)})"


class ConeAction:
    """Linear map from the span of a cone into commuting nilpotents preserving W."""

    __slots__ = ("cone", "field", "base", "ray_mats", "components")

    def __init__(self, cone: Cone, field, base: Filtration, ray_mats):
        ray_mats = tuple(ray_mats)
        if len(ray_mats) != len(cone.rays):
            raise PreconditionViolated("one operator per ray is required")
        dim = base.ambient
        for nm in ray_mats:
            if nm.rows != dim or nm.cols != dim:
                raise PreconditionViolated("operator size mismatch")
            if not nm.is_nilpotent():
                raise PreconditionViolated("ray operator is not nilpotent")
            for w, s in base.steps:
                for v in s.basis:
                    if not s.contains(nm.apply(v)):
                        raise PreconditionViolated("ray operator does not preserve W")
        for a, b in combinations(ray_mats, 2):
            if not commutator(a, b).is_zero():
                raise PreconditionViolated("ray operators do not commute")
        components = _linear_extension(cone, field, ray_mats, dim)
        object.__setattr__(self, "cone", cone)
        object.__setattr__(self, "field", field)
        object.__setattr__(self, "base", base)
        object.__setattr__(self, "ray_mats", ray_mats)
        object.__setattr__(self, "components", components)

    def __setattr__(self, *a):
        raise AttributeError("ConeAction is immutable")

    @property
    def dim(self):
        return self.base.ambient

    def operator(self, v) -> Mat:
        """h(v) = Σ_j v_j A_j for any v in the span of the cone."""
        out = Mat.zeros(self.field, self.dim)
        for x, comp in zip(v, self.components):
            x = self.field.coerce(x)
            if x != 0:
                out = out + x * comp
        return out


def _linear_extension(cone, field, ray_mats, dim):
    """Component matrices A_j with Σ ray_j A_j = N_ray, checked for consistency."""
    m = cone.rank
    if m == 0:
        return ()
    # entrywise solve: for each (i, j) entry, system over the ray coordinates
    ray_rows = [[field.coerce(x) for x in r] for r in cone.rays]
    coeff = Mat(field, ray_rows)  # rows: rays, cols: ambient coords
    comps = [[[field.zero] * dim for _ in range(dim)] for _ in range(m)]
    for i in range(dim):
        for j in range(dim):
            target = [nm.entries[i][j] for nm in ray_mats]
            sol = solve(coeff, target)
            if sol is None:
                raise PreconditionViolated("ray operators are not consistent with a linear action")
            for k in range(m):
                comps[k][i][j] = sol[k]
    mats = tuple(Mat(field, c) for c in comps)
    for r, nm in zip(cone.rays, ray_mats):
        out = Mat.zeros(field, dim)
        for x, comp in zip(r, mats):
            out = out + field.coerce(x) * comp
        if out != nm:
            raise PreconditionViolated("linear extension failed to reproduce a ray operator")
    return mats


@dataclass(frozen=True)
class NotAdmissible:
    """Certificate for a failed admissibility check."""

    condition: str
    faces: tuple
    detail: str = ""

    def __bool__(self):
        return False


class AdmissibleFamily:
    """The face-indexed family (W(τ))_τ of an admissible action."""

    def __init__(self, action: ConeAction, filtrations: dict):
        self.action = action
        self._by_vanish = filtrations

    def at(self, face: Face) -> Filtration:
        return self._by_vanish[face.vanish]

    def items(self):
        for face in self.action.cone.faces():
            yield face, self.at(face)

    def __bool__(self):
        return True


def check_admissible(action: ConeAction):
    """Compute (W(τ))_τ and verify every admissibility clause exactly.

    Returns an AdmissibleFamily, or a NotAdmissible certificate naming the
    failing condition and face(s).
    """
    cone = action.cone
    w0 = action.base
    faces = cone.faces()
    filts = {}
    for face in faces:
        samples = face.interior_samples(action.field)
        m = rmf(w0, action.operator(samples[0]))
        if m is None:
            return NotAdmissible(
                "relative-filtration-existence", (face,),
                "no relative monodromy filtration for an interior element",
            )
        for extra in samples[1:]:
            if not verify_rmf(w0, action.operator(extra), m):
                return NotAdmissible(
                    "interior-independence", (face,),
                    "relative filtration depends on the interior sample",
                )
        filts[face.vanish] = m
    # (iii-2)
    if filts[cone.zero_face.vanish] != w0:
        return NotAdmissible("base-filtration", (cone.zero_face,), "W({0}) differs from W")
    # (iii-1): every ray of the cone preserves every W(τ)
    for face in faces:
        wt = filts[face.vanish]
        for nm in action.ray_mats:
            for w, s in wt.steps:
                for v in s.basis:
                    if not s.contains(nm.apply(v)):
                        return NotAdmissible("stability", (face,), "a cone operator moves W(τ)")
    # (iii-3): all pairs τ ⊇ τ', all τ'', all weights
    def check_triple(args):
        tau, tau_p, tau_pp = args
        w_tau = filts[tau.vanish]
        w_p = filts[tau_p.vanish]
        w_pp = filts[tau_pp.vanish]
        n_int = action.operator(tau.interior_samples(action.field)[0])
        for w in w_pp.jumps():
            u = Subquotient.of_subspace(w_pp.at(w))
            try:
                ok = verify_rmf(
                    w_p.restrict_to(u), u.induced_operator(n_int), w_tau.restrict_to(u)
                )
            except PreconditionViolated:
                ok = False
            if not ok:
                return (tau, tau_p, tau_pp, w)
        return None

    triples = [
        (tau, tau_p, tau_pp)
        for tau in faces
        for tau_p in faces
        if tau.contains_face(tau_p)
        for tau_pp in faces
        if tau_p.contains_face(tau_pp)
    ]
    for res in parallel_map(check_triple, triples):
        if res is not None:
            tau, tau_p, tau_pp, w = res
            return NotAdmissible(
                "relative-filtration-triple", (tau, tau_p, tau_pp),
                f"restriction to weight {w} fails the relative axioms",
            )
    return AdmissibleFamily(action, filts)


def tensor(a: ConeAction, b: ConeAction) -> ConeAction:
    if a.cone != b.cone:
        raise ConeMismatch("actions live on different cones")
    field = a.field
    ida = Mat.identity(field, a.dim)
    idb = Mat.identity(field, b.dim)
    mats = [kron_mat(na, idb) + kron_mat(ida, nb) for na, nb in zip(a.ray_mats, b.ray_mats)]
    return ConeAction(a.cone, field, tensor_filtration(a.base, b.base), mats)


def dual(a: ConeAction) -> ConeAction:
    mats = [-(nm.transpose()) for nm in a.ray_mats]
    return ConeAction(a.cone, a.field, dual_filtration(a.base), mats)


def direct_sum(a: ConeAction, b: ConeAction) -> ConeAction:
    if a.cone != b.cone:
        raise ConeMismatch("actions live on different cones")
    field = a.field
    mats = []
    for na, nb in zip(a.ray_mats, b.ray_mats):
        rows = []
        for i in range(a.dim):
            rows.append(list(na.entries[i]) + [field.zero] * b.dim)
        for i in range(b.dim):
            rows.append([field.zero] * a.dim + list(nb.entries[i]))
        mats.append(Mat(field, rows))
    return ConeAction(a.cone, field, sum_filtration(a.base, b.base), mats)
