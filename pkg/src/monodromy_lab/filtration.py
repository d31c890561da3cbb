"""Finite increasing filtrations and gradings (splittings) of exact spaces.

A filtration is stored sparsely by jump weights; the top step must be the full
space.  A splitting is a weight-indexed direct sum decomposition.  Induction to
subquotients renormalizes everything to the subquotient's canonical basis.
"""

from __future__ import annotations

from itertools import product

from .errors import DimensionMismatch, PreconditionViolated
from .linalg import Mat, Subquotient, Subspace, rref, simultaneous_pieces


class Filtration:
    __slots__ = ("field", "ambient", "steps")

    def __init__(self, field, ambient, steps):
        """steps: iterable of (weight, Subspace); normalized to strict jumps."""
        items = sorted(steps, key=lambda t: t[0])
        norm = []
        prev = Subspace.zero(field, ambient)
        for w, s in items:
            if s.ambient != ambient:
                raise DimensionMismatch("filtration step in wrong ambient space")
            if not s.contains_space(prev):
                raise PreconditionViolated(f"filtration not monotone at weight {w}")
            if s.dim > prev.dim:
                norm.append((w, s))
                prev = s
        if ambient > 0:
            if not norm or not norm[-1][1].is_full():
                raise PreconditionViolated("filtration does not exhaust the space")
        object.__setattr__(self, "field", field)
        object.__setattr__(self, "ambient", ambient)
        object.__setattr__(self, "steps", tuple(norm))

    def __setattr__(self, *a):
        raise AttributeError("Filtration is immutable")

    @classmethod
    def pure(cls, field, ambient, weight):
        if ambient == 0:
            return cls(field, 0, [])
        return cls(field, ambient, [(weight, Subspace.full(field, ambient))])

    def at(self, w) -> Subspace:
        out = Subspace.zero(self.field, self.ambient)
        for jw, s in self.steps:
            if jw <= w:
                out = s
            else:
                break
        return out

    def jumps(self) -> tuple:
        return tuple(w for w, _ in self.steps)

    @property
    def min_jump(self):
        return self.steps[0][0] if self.steps else 0

    @property
    def max_jump(self):
        return self.steps[-1][0] if self.steps else 0

    def gr(self, w) -> Subquotient:
        return Subquotient(self.at(w), self.at(w - 1))

    def gr_dims(self) -> dict:
        return {w: self.gr(w).dim for w in self.jumps()}

    def shift(self, k: int) -> "Filtration":
        return Filtration(self.field, self.ambient, [(w + k, s) for w, s in self.steps])

    def restrict_to(self, subq: Subquotient) -> "Filtration":
        """Induced filtration on a subquotient, in its canonical coordinates."""
        steps = [(w, subq.induced_subspace(s)) for w, s in self.steps]
        return Filtration(self.field, subq.dim, steps)

    def __eq__(self, other):
        return (
            isinstance(other, Filtration)
            and self.ambient == other.ambient
            and self.steps == other.steps
        )

    def __repr__(self):
        inner = ", ".join(f"{w}:{s.dim}" for w, s in self.steps)
        return f"Filtration({inner} of {self.ambient})"


class Splitting:
    __slots__ = ("field", "ambient", "parts")

    def __init__(self, field, ambient, parts):
        """parts: iterable of (weight, Subspace); must be a direct sum of the space."""
        items = sorted(((w, s) for w, s in parts if not s.is_zero()), key=lambda t: t[0])
        weights = [w for w, _ in items]
        if len(set(weights)) != len(weights):
            raise PreconditionViolated("duplicate weights in splitting")
        total = sum(s.dim for _, s in items)
        stacked = [v for _, s in items for v in s.basis]
        if total != ambient or len(rref(stacked, field)[0]) != ambient:
            raise PreconditionViolated("splitting parts do not decompose the space")
        object.__setattr__(self, "field", field)
        object.__setattr__(self, "ambient", ambient)
        object.__setattr__(self, "parts", tuple(items))

    def __setattr__(self, *a):
        raise AttributeError("Splitting is immutable")

    @classmethod
    def pure(cls, field, ambient, weight):
        if ambient == 0:
            return cls(field, 0, [])
        return cls(field, ambient, [(weight, Subspace.full(field, ambient))])

    def weights(self) -> tuple:
        return tuple(w for w, _ in self.parts)

    def part(self, w) -> Subspace:
        for pw, s in self.parts:
            if pw == w:
                return s
        return Subspace.zero(self.field, self.ambient)

    def shift(self, k: int) -> "Splitting":
        return Splitting(self.field, self.ambient, [(w + k, s) for w, s in self.parts])

    def filtration_of(self) -> Filtration:
        steps = []
        acc = Subspace.zero(self.field, self.ambient)
        for w, s in self.parts:
            acc = acc.add(s)
            steps.append((w, acc))
        return Filtration(self.field, self.ambient, steps)

    def splits(self, f: Filtration) -> bool:
        """Weight-matched splitting: F_w = ⊕_{v<=w} parts(v) for every w."""
        return self.filtration_of() == f

    def keeps_filtration(self, f: Filtration) -> bool:
        """Torus compatibility: F_w = ⊕_v (F_w ∩ parts(v)) for every jump w."""
        for w in f.jumps():
            fw = f.at(w)
            acc = Subspace.zero(self.field, self.ambient)
            for _, p in self.parts:
                acc = acc.add(fw.intersect(p))
            if acc != fw:
                return False
        return True

    def compatible_with(self, other: "Splitting") -> bool:
        """True when V = ⊕_{u,v} (parts(u) ∩ other.parts(v))."""
        total = 0
        for (_, a), (_, b) in product(self.parts, other.parts):
            total += a.intersect(b).dim
        return total == self.ambient

    def restrict_to(self, subq: Subquotient) -> "Splitting":
        """Induced splitting on a subquotient (raises when parts do not descend)."""
        parts = [(w, subq.induced_subspace(s)) for w, s in self.parts]
        return Splitting(self.field, subq.dim, parts)

    def basis_by_weight(self):
        """List of (weight, vector) running through an adapted basis."""
        return [(w, v) for w, s in self.parts for v in s.basis]

    def weight_of(self, v):
        """Weight of a vector lying in a single part; None if mixed."""
        for w, s in self.parts:
            if s.contains(v):
                return w
        return None

    def change_of_basis(self) -> Mat:
        """Matrix whose columns are the adapted basis (standard -> adapted)."""
        cols = [v for _, v in self.basis_by_weight()]
        return Mat(self.field, list(zip(*cols)))

    def operator_components(self, m: Mat) -> dict:
        """Decompose m by grading degree: m = Σ_δ comp[δ], comp[δ](P_w) ⊆ P_{w+δ}."""
        if m.rows != self.ambient or m.cols != self.ambient:
            raise DimensionMismatch("operator size does not match the splitting")
        basis = self.basis_by_weight()
        p = self.change_of_basis()
        pinv = p.inverse()
        a = pinv * m * p
        out: dict[int, list] = {}
        n = self.ambient
        for i in range(n):
            for j in range(n):
                if a.entries[i][j] != 0:
                    delta = basis[i][0] - basis[j][0]
                    blk = out.setdefault(delta, [[self.field.zero] * n for _ in range(n)])
                    blk[i][j] = a.entries[i][j]
        return {delta: p * Mat(self.field, blk) * pinv for delta, blk in out.items()}

    def component(self, m: Mat, delta: int) -> Mat:
        return self.operator_components(m).get(delta, Mat.zeros(self.field, self.ambient))

    def is_pure_degree(self, m: Mat, delta: int) -> bool:
        comps = self.operator_components(m)
        return all(d == delta for d in comps)

    def __eq__(self, other):
        return (
            isinstance(other, Splitting)
            and self.ambient == other.ambient
            and self.parts == other.parts
        )

    def __repr__(self):
        inner = ", ".join(f"{w}:{s.dim}" for w, s in self.parts)
        return f"Splitting({inner} of {self.ambient})"


def multigrading(splittings) -> list:
    """Simultaneous pieces [(weight tuple, Subspace)] of several splittings."""
    if not splittings:
        raise PreconditionViolated("need at least one splitting")
    field = splittings[0].field
    ambient = splittings[0].ambient
    lists = [list(s.parts) for s in splittings]
    return simultaneous_pieces(field, ambient, lists)


def multidegree_component(splittings, m: Mat, degrees) -> Mat:
    """Component of m of the given degree for each splitting simultaneously."""
    pieces = multigrading(splittings)
    field = splittings[0].field
    n = splittings[0].ambient
    basis = [(w, v) for w, s in pieces for v in s.basis]
    p = Mat(field, list(zip(*[v for _, v in basis])))
    pinv = p.inverse()
    a = pinv * m * p
    keep = [[field.zero] * n for _ in range(n)]
    for i in range(n):
        for j in range(n):
            if a.entries[i][j] != 0:
                delta = tuple(wi - wj for wi, wj in zip(basis[i][0], basis[j][0]))
                if delta == tuple(degrees):
                    keep[i][j] = a.entries[i][j]
    return p * Mat(field, keep) * pinv


def any_splitting(f: Filtration) -> Splitting:
    """A deterministic splitting of a filtration (echelon complements)."""
    parts = []
    for w in f.jumps():
        q = f.gr(w)
        parts.append((w, Subspace(f.field, f.ambient, q.basis)))
    return Splitting(f.field, f.ambient, parts)


def tensor_filtration(f: Filtration, g: Filtration) -> Filtration:
    """(f ⊗ g)_w = Σ_{a+b=w} f_a ⊗ g_b on the Kronecker-ordered product space."""
    field = f.field
    n, m = f.ambient, g.ambient
    weights = sorted({a + b for a in f.jumps() for b in g.jumps()})
    steps = []
    for w in weights:
        vecs = []
        for a in f.jumps():
            gb = g.at(w - a)
            for u in f.at(a).basis:
                for v in gb.basis:
                    vecs.append(_kron(u, v, field))
        steps.append((w, Subspace(field, n * m, vecs)))
    return Filtration(field, n * m, steps)


def tensor_splitting(s: Splitting, t: Splitting) -> Splitting:
    field = s.field
    n, m = s.ambient, t.ambient
    acc: dict[int, list] = {}
    for a, pa in s.parts:
        for b, pb in t.parts:
            vecs = acc.setdefault(a + b, [])
            for u in pa.basis:
                for v in pb.basis:
                    vecs.append(_kron(u, v, field))
    return Splitting(field, n * m, [(w, Subspace(field, n * m, vs)) for w, vs in acc.items()])


def dual_filtration(f: Filtration) -> Filtration:
    """(f*)_w = annihilator of f_{-w-1}; pure weight a dualizes to pure -a."""
    steps = []
    cuts = sorted({-w for w in f.jumps()} | {-w - 1 for w in f.jumps()})
    for w in cuts:
        steps.append((w, f.at(-w - 1).annihilator()))
    return Filtration(f.field, f.ambient, steps)


def dual_splitting(s: Splitting) -> Splitting:
    """Dual grading: weight -w part is the annihilator of the other parts."""
    parts = []
    for w, p in s.parts:
        others = Subspace.zero(s.field, s.ambient)
        for w2, p2 in s.parts:
            if w2 != w:
                others = others.add(p2)
        parts.append((-w, others.annihilator()))
    return Splitting(s.field, s.ambient, parts)


def sum_filtration(f: Filtration, g: Filtration) -> Filtration:
    field = f.field
    n, m = f.ambient, g.ambient
    weights = sorted(set(f.jumps()) | set(g.jumps()))
    steps = []
    for w in weights:
        vecs = [tuple(u) + (field.zero,) * m for u in f.at(w).basis]
        vecs += [(field.zero,) * n + tuple(v) for v in g.at(w).basis]
        steps.append((w, Subspace(field, n + m, vecs)))
    return Filtration(field, n + m, steps)


def sum_splitting(s: Splitting, t: Splitting) -> Splitting:
    field = s.field
    n, m = s.ambient, t.ambient
    acc: dict[int, list] = {}
    for w, p in s.parts:
        acc.setdefault(w, []).extend(tuple(u) + (field.zero,) * m for u in p.basis)
    for w, p in t.parts:
        acc.setdefault(w, []).extend((field.zero,) * n + tuple(v) for v in p.basis)
    return Splitting(field, n + m, [(w, Subspace(field, n + m, vs)) for w, vs in acc.items()])


def _kron(u, v, field):
    return tuple(a * b for a in u for b in v)


def kron_mat(a: Mat, b: Mat) -> Mat:
    field = a.field
    rows = []
    for i in range(a.rows):
        for k in range(b.rows):
            rows.append([a.entries[i][j] * b.entries[k][l] for j in range(a.cols) for l in range(b.cols)])
    return Mat(field, rows)
