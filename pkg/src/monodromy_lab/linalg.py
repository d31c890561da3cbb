"""Exact linear algebra: matrices, canonical subspaces, subquotients.

Vectors are tuples of field elements.  Subspaces are stored by their reduced
row echelon basis, which makes equality syntactic and every construction
canonical.  Matrices act on column vectors: ``m.apply(v)[i] = sum_j m[i][j] v[j]``.
"""

from __future__ import annotations

from fractions import Fraction
from itertools import product
from math import lcm

from .errors import (
    DimensionMismatch,
    NotNilpotentError,
    PreconditionViolated,
    SpectrumNotSplit,
)
from .scalars import QQ


def _as_tuple_vec(field, v):
    return tuple(field.coerce(x) for x in v)


def rref(rows, field):
    """Reduced row echelon form.  Returns (rows, pivot_columns); zero rows dropped."""
    work = [list(r) for r in rows]
    if not work:
        return (), ()
    ncols = len(work[0])
    pivots = []
    r = 0
    for c in range(ncols):
        pr = None
        for i in range(r, len(work)):
            if work[i][c] != 0:
                pr = i
                break
        if pr is None:
            continue
        work[r], work[pr] = work[pr], work[r]
        inv = field.one / work[r][c]
        work[r] = [x * inv for x in work[r]]
        for i in range(len(work)):
            if i != r and work[i][c] != 0:
                f = work[i][c]
                work[i] = [a - f * b for a, b in zip(work[i], work[r])]
        pivots.append(c)
        r += 1
        if r == len(work):
            break
    out = tuple(tuple(row) for row in work[:r])
    return out, tuple(pivots)


class Mat:
    """Dense exact matrix over a fixed field."""

    __slots__ = ("field", "rows", "cols", "entries")

    def __init__(self, field, entries):
        rows = tuple(tuple(field.coerce(x) for x in row) for row in entries)
        if rows:
            ncols = len(rows[0])
            if any(len(r) != ncols for r in rows):
                raise DimensionMismatch("ragged matrix")
        else:
            ncols = 0
        object.__setattr__(self, "field", field)
        object.__setattr__(self, "rows", len(rows))
        object.__setattr__(self, "cols", ncols)
        object.__setattr__(self, "entries", rows)

    def __setattr__(self, *a):
        raise AttributeError("Mat is immutable")

    @classmethod
    def identity(cls, field, n):
        return cls(field, [[field.one if i == j else field.zero for j in range(n)] for i in range(n)])

    @classmethod
    def zeros(cls, field, m, n=None):
        n = m if n is None else n
        return cls(field, [[field.zero] * n for _ in range(m)])

    def __getitem__(self, ij):
        i, j = ij
        return self.entries[i][j]

    def __add__(self, other):
        self._same_shape(other)
        return Mat(self.field, [[a + b for a, b in zip(r1, r2)] for r1, r2 in zip(self.entries, other.entries)])

    def __sub__(self, other):
        self._same_shape(other)
        return Mat(self.field, [[a - b for a, b in zip(r1, r2)] for r1, r2 in zip(self.entries, other.entries)])

    def __neg__(self):
        return Mat(self.field, [[-a for a in r] for r in self.entries])

    def _same_shape(self, other):
        if self.rows != other.rows or self.cols != other.cols:
            raise DimensionMismatch(f"{self.rows}x{self.cols} vs {other.rows}x{other.cols}")

    def __mul__(self, other):
        if isinstance(other, Mat):
            if self.cols != other.rows:
                raise DimensionMismatch(f"{self.rows}x{self.cols} times {other.rows}x{other.cols}")
            ot = list(zip(*other.entries)) if other.entries else []
            return Mat(
                self.field,
                [[_dot(r, c, self.field) for c in ot] for r in self.entries],
            )
        # scalar multiple
        s = self.field.coerce(other)
        return Mat(self.field, [[s * a for a in r] for r in self.entries])

    def __rmul__(self, other):
        s = self.field.coerce(other)
        return Mat(self.field, [[s * a for a in r] for r in self.entries])

    def __pow__(self, k: int):
        if self.rows != self.cols:
            raise DimensionMismatch("power of a non-square matrix")
        out = Mat.identity(self.field, self.rows)
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def apply(self, v):
        if len(v) != self.cols:
            raise DimensionMismatch("vector length does not match columns")
        v = _as_tuple_vec(self.field, v)
        return tuple(_dot(r, v, self.field) for r in self.entries)

    def transpose(self):
        return Mat(self.field, list(zip(*self.entries)) if self.entries else [])

    def is_zero(self) -> bool:
        return all(x == 0 for r in self.entries for x in r)

    def is_nilpotent(self) -> bool:
        if self.rows != self.cols:
            return False
        return (self ** self.rows).is_zero()

    def is_unipotent(self) -> bool:
        return (self - Mat.identity(self.field, self.rows)).is_nilpotent()

    def inverse(self) -> "Mat":
        if self.rows != self.cols:
            raise DimensionMismatch("inverse of a non-square matrix")
        n = self.rows
        aug = [list(self.entries[i]) + [self.field.one if j == i else self.field.zero for j in range(n)] for i in range(n)]
        red, piv = rref(aug, self.field)
        if list(piv[:n]) != list(range(n)) or len(piv) < n or any(p >= n for p in piv[:n]):
            raise ZeroDivisionError("singular matrix")
        return Mat(self.field, [row[n:] for row in red])

    def trace(self):
        return sum((self.entries[i][i] for i in range(self.rows)), self.field.zero)

    def char_poly(self):
        """Characteristic polynomial coefficients [c0, ..., c_{n-1}, 1] of det(xI - A).

        Faddeev–LeVerrier; exact over any field of characteristic zero.
        """
        n = self.rows
        field = self.field
        coeffs = [field.zero] * n + [field.one]
        m = Mat.identity(field, n)
        for k in range(1, n + 1):
            m = self * m
            c = -(m.trace() / k)
            coeffs[n - k] = c
            m = m + c * Mat.identity(field, n)
        return coeffs

    def __eq__(self, other):
        return (
            isinstance(other, Mat)
            and self.rows == other.rows
            and self.cols == other.cols
            and self.entries == other.entries
        )

    def __hash__(self):
        return hash((self.rows, self.cols, self.entries))

    def __repr__(self):
        return "Mat(" + "; ".join(" ".join(str(x) for x in r) for r in self.entries) + ")"


def _dot(r, c, field):
    acc = field.zero
    for a, b in zip(r, c):
        acc = acc + a * b
    return acc


def commutator(a: Mat, b: Mat) -> Mat:
    return a * b - b * a


class Subspace:
    """Subspace of the coordinate space, held in reduced echelon form."""

    __slots__ = ("field", "ambient", "basis", "pivots")

    def __init__(self, field, ambient, vectors=()):
        vecs = [_as_tuple_vec(field, v) for v in vectors]
        for v in vecs:
            if len(v) != ambient:
                raise DimensionMismatch("vector length does not match ambient dimension")
        basis, pivots = rref(vecs, field)
        object.__setattr__(self, "field", field)
        object.__setattr__(self, "ambient", ambient)
        object.__setattr__(self, "basis", basis)
        object.__setattr__(self, "pivots", pivots)

    def __setattr__(self, *a):
        raise AttributeError("Subspace is immutable")

    @classmethod
    def zero(cls, field, ambient):
        return cls(field, ambient, ())

    @classmethod
    def full(cls, field, ambient):
        return cls(field, ambient, Mat.identity(field, ambient).entries)

    @property
    def dim(self) -> int:
        return len(self.basis)

    def is_zero(self) -> bool:
        return not self.basis

    def is_full(self) -> bool:
        return self.dim == self.ambient

    def reduce(self, v):
        """Reduce v modulo this subspace (kill pivot coordinates)."""
        v = list(_as_tuple_vec(self.field, v))
        for row, p in zip(self.basis, self.pivots):
            if v[p] != 0:
                f = v[p]
                v = [a - f * b for a, b in zip(v, row)]
        return tuple(v)

    def contains(self, v) -> bool:
        return all(x == 0 for x in self.reduce(v))

    def contains_space(self, other: "Subspace") -> bool:
        return all(self.contains(v) for v in other.basis)

    def coordinates(self, v):
        """Coefficients of v in the canonical basis; None if not contained."""
        v = _as_tuple_vec(self.field, v)
        coords = []
        residue = list(v)
        for row, p in zip(self.basis, self.pivots):
            c = residue[p]
            coords.append(c)
            if c != 0:
                residue = [a - c * b for a, b in zip(residue, row)]
        if any(x != 0 for x in residue):
            return None
        return tuple(coords)

    def intersect(self, other: "Subspace") -> "Subspace":
        if self.ambient != other.ambient:
            raise DimensionMismatch("intersect: different ambient spaces")
        if self.is_zero() or other.is_zero():
            return Subspace.zero(self.field, self.ambient)
        # solve sum a_i u_i = sum b_j w_j
        cols = [list(u) for u in self.basis] + [[-x for x in w] for w in other.basis]
        m = Mat(self.field, list(zip(*cols)))
        ker = kernel(m)
        vecs = []
        for k in ker.basis:
            coeffs = k[: self.dim]
            vec = [self.field.zero] * self.ambient
            for c, u in zip(coeffs, self.basis):
                vec = [a + c * b for a, b in zip(vec, u)]
            vecs.append(vec)
        return Subspace(self.field, self.ambient, vecs)

    def add(self, other: "Subspace") -> "Subspace":
        if self.ambient != other.ambient:
            raise DimensionMismatch("sum: different ambient spaces")
        return Subspace(self.field, self.ambient, list(self.basis) + list(other.basis))

    def apply(self, m: Mat) -> "Subspace":
        """Image of this subspace under the operator m."""
        return Subspace(self.field, m.rows, [m.apply(v) for v in self.basis])

    def annihilator(self) -> "Subspace":
        """All functionals (as coordinate vectors) vanishing on this subspace."""
        if self.is_zero():
            return Subspace.full(self.field, self.ambient)
        return kernel(Mat(self.field, self.basis))

    def __eq__(self, other):
        return (
            isinstance(other, Subspace)
            and self.ambient == other.ambient
            and self.basis == other.basis
        )

    def __hash__(self):
        return hash((self.ambient, self.basis))

    def __repr__(self):
        return f"Subspace(dim {self.dim} of {self.ambient})"


def kernel(m: Mat) -> Subspace:
    """{v : m v = 0} in canonical form."""
    red, piv = rref(m.entries, m.field)
    field = m.field
    n = m.cols
    free = [c for c in range(n) if c not in piv]
    vecs = []
    for fc in free:
        v = [field.zero] * n
        v[fc] = field.one
        for row, p in zip(red, piv):
            v[p] = -row[fc]
        vecs.append(v)
    return Subspace(field, n, vecs)


def image(m: Mat) -> Subspace:
    """Column space of m, as vectors in the target space."""
    return Subspace(m.field, m.rows, list(zip(*m.entries)) if m.entries else [])


def intersect(a: Subspace, b: Subspace) -> Subspace:
    return a.intersect(b)


def subspace_sum(a: Subspace, b: Subspace) -> Subspace:
    return a.add(b)


def solve(m: Mat, target) -> tuple | None:
    """One solution of m x = target, or None when inconsistent."""
    target = _as_tuple_vec(m.field, target)
    if len(target) != m.rows:
        raise DimensionMismatch("target length does not match rows")
    aug = [list(r) + [t] for r, t in zip(m.entries, target)]
    red, piv = rref(aug, m.field)
    n = m.cols
    x = [m.field.zero] * n
    for row, p in zip(red, piv):
        if p == n:
            return None
        x[p] = row[n]
    return tuple(x)


class Subquotient:
    """num/den for subspaces den ⊆ num, with a canonical representative basis.

    The representatives are the echelon basis of num reduced modulo den and
    re-echelonized, so equal subquotients have equal bases.
    """

    __slots__ = ("field", "ambient", "num", "den", "basis")

    def __init__(self, num: Subspace, den: Subspace):
        if num.ambient != den.ambient:
            raise DimensionMismatch("subquotient: ambient mismatch")
        if not num.contains_space(den):
            raise PreconditionViolated("subquotient: denominator not contained in numerator")
        field = num.field
        reduced = [den.reduce(v) for v in num.basis]
        basis, _ = rref([v for v in reduced if any(x != 0 for x in v)], field)
        object.__setattr__(self, "field", field)
        object.__setattr__(self, "ambient", num.ambient)
        object.__setattr__(self, "num", num)
        object.__setattr__(self, "den", den)
        object.__setattr__(self, "basis", basis)

    def __setattr__(self, *a):
        raise AttributeError("Subquotient is immutable")

    @classmethod
    def of_subspace(cls, s: Subspace) -> "Subquotient":
        return cls(s, Subspace.zero(s.field, s.ambient))

    @classmethod
    def quotient(cls, field, ambient, den: Subspace) -> "Subquotient":
        return cls(Subspace.full(field, ambient), den)

    @property
    def dim(self) -> int:
        return len(self.basis)

    def project(self, v):
        """Coordinates of the class of v (v must lie in num)."""
        if not self.num.contains(v):
            raise PreconditionViolated("vector not in the numerator subspace")
        w = self.den.reduce(v)
        rep = Subspace(self.field, self.ambient, self.basis) if self.basis else None
        if rep is None:
            return ()
        coords = rep.coordinates(w)
        if coords is None:
            raise PreconditionViolated("reduction left the representative span (bug)")
        return coords

    def lift(self, coords):
        if len(coords) != self.dim:
            raise DimensionMismatch("coordinate length mismatch")
        vec = [self.field.zero] * self.ambient
        for c, b in zip(coords, self.basis):
            c = self.field.coerce(c)
            vec = [a + c * x for a, x in zip(vec, b)]
        return tuple(vec)

    def induced_subspace(self, s: Subspace) -> Subspace:
        """Image of (s ∩ num + den)/den in the coordinate space of the quotient."""
        inter = s.intersect(self.num)
        vecs = [self.project(v) for v in inter.basis]
        return Subspace(self.field, self.dim, vecs)

    def induced_operator(self, m: Mat) -> Mat:
        """Matrix of m on num/den; requires m(num) ⊆ num and m(den) ⊆ den."""
        for v in self.num.basis:
            if not self.num.contains(m.apply(v)):
                raise PreconditionViolated("operator does not preserve the numerator")
        for v in self.den.basis:
            if not self.den.contains(m.apply(v)):
                raise PreconditionViolated("operator does not preserve the denominator")
        cols = [self.project(m.apply(b)) for b in self.basis]
        if not cols:
            return Mat.zeros(self.field, 0, 0)
        return Mat(self.field, list(zip(*cols)))

    def __eq__(self, other):
        return (
            isinstance(other, Subquotient)
            and self.num == other.num
            and self.den == other.den
        )

    def __repr__(self):
        return f"Subquotient(dim {self.dim})"


def induced_map(m: Mat, sub: Subquotient, quot: Subquotient | None = None) -> Mat:
    """Matrix of m from the subquotient ``sub`` to ``quot`` (defaults to sub)."""
    quot = sub if quot is None else quot
    cols = []
    for b in sub.basis:
        w = m.apply(b)
        cols.append(quot.project(w))
    if not cols:
        return Mat.zeros(m.field, quot.dim, 0)
    return Mat(m.field, list(zip(*cols)))


def generalized_eigenspaces(m: Mat, roots) -> list:
    """[(c, ker (m - c)^n)] for the supplied roots; they must exhaust the spectrum."""
    if m.rows != m.cols:
        raise DimensionMismatch("eigenspaces of a non-square matrix")
    field = m.field
    n = m.rows
    seen = []
    for c in roots:
        c = field.coerce(c)
        if c not in seen:
            seen.append(c)
    out = []
    total = 0
    for c in seen:
        shifted = m - c * Mat.identity(field, n)
        space = kernel(shifted ** max(n, 1))
        out.append((c, space))
        total += space.dim
    if total != n:
        raise SpectrumNotSplit(
            f"supplied roots span {total} of {n} dimensions; spectrum does not split"
        )
    return out


def nilpotent_log(u: Mat) -> Mat:
    """log of a unipotent matrix by the finite series; exact."""
    n = u.rows
    x = u - Mat.identity(u.field, n)
    if not x.is_nilpotent():
        raise NotNilpotentError("matrix is not unipotent")
    out = Mat.zeros(u.field, n)
    term = Mat.identity(u.field, n)
    for k in range(1, n + 1):
        term = term * x
        coeff = Fraction((-1) ** (k + 1), k)
        out = out + coeff * term
    return out


def nilpotent_exp(x: Mat) -> Mat:
    """exp of a nilpotent matrix by the finite series; exact."""
    n = x.rows
    if not x.is_nilpotent():
        raise NotNilpotentError("matrix is not nilpotent")
    out = Mat.identity(x.field, n)
    term = Mat.identity(x.field, n)
    fact = 1
    for k in range(1, n + 1):
        term = term * x
        fact *= k
        out = out + Fraction(1, fact) * term
    return out


def poly_derivative(p):
    return [c * k for k, c in enumerate(p)][1:] if len(p) > 1 else []


def poly_gcd(p, q, field):
    """Monic gcd of polynomials with coefficients in the field."""
    a, b = [field.coerce(c) for c in p], [field.coerce(c) for c in q]

    def norm(u):
        while u and u[-1] == 0:
            u.pop()
        return u

    a, b = norm(a), norm(b)
    while b:
        # a mod b
        while len(a) >= len(b) and a:
            f = a[-1] / b[-1]
            shift = len(a) - len(b)
            for i, c in enumerate(b):
                a[i + shift] = a[i + shift] - f * c
            a = norm(a)
        a, b = b, a
    if a:
        lead = a[-1]
        a = [c / lead for c in a]
    return a


def min_poly(m: Mat):
    """Minimal polynomial coefficients (monic, low to high), exact."""
    n = m.rows
    field = m.field
    powers = [Mat.identity(field, n)]
    for _ in range(n):
        powers.append(powers[-1] * m)
    flat = [[p.entries[i][j] for i in range(n) for j in range(n)] for p in powers]
    for deg in range(1, n + 2):
        cols = flat[:deg]
        mat = Mat(field, list(zip(*cols)))
        target = [-x for x in flat[deg]] if deg < len(flat) else None
        if target is None:
            break
        sol = solve(mat, target)
        if sol is not None:
            return list(sol) + [field.one]
    raise PreconditionViolated("minimal polynomial not found (bug)")


def is_semisimple_operator(m: Mat) -> bool:
    """Diagonalizable over the algebraic closure: squarefree minimal polynomial."""
    p = min_poly(m)
    dp = poly_derivative(p)
    g = poly_gcd(p, dp, m.field)
    return len(g) == 1


def rational_roots(p):
    """All rational roots (with multiplicity) of a polynomial over Q.

    Returns (roots, deflated) where deflated has no rational roots left.
    """
    coeffs = [Fraction(c) for c in p]
    while coeffs and coeffs[-1] == 0:
        coeffs.pop()
    roots = []
    # factor out x = 0
    while coeffs and coeffs[0] == 0:
        roots.append(Fraction(0))
        coeffs = coeffs[1:]
    if len(coeffs) <= 1:
        return roots, coeffs

    def divisors(k):
        k = abs(k)
        out = set()
        i = 1
        while i * i <= k:
            if k % i == 0:
                out.add(i)
                out.add(k // i)
            i += 1
        return out or {1}

    changed = True
    while changed and len(coeffs) > 1:
        changed = False
        den = lcm(*[c.denominator for c in coeffs])
        ints = [int(c * den) for c in coeffs]
        lead, const = ints[-1], ints[0]
        if const == 0:
            roots.append(Fraction(0))
            coeffs = coeffs[1:]
            changed = True
            continue
        candidates = set()
        for pnum in divisors(const):
            for qden in divisors(lead):
                candidates.add(Fraction(pnum, qden))
                candidates.add(Fraction(-pnum, qden))
        for cand in sorted(candidates):
            val = Fraction(0)
            for c in reversed(coeffs):
                val = val * cand + c
            if val == 0:
                roots.append(cand)
                # synthetic division
                out = [Fraction(0)] * (len(coeffs) - 1)
                acc = Fraction(0)
                for i in range(len(coeffs) - 1, 0, -1):
                    acc = coeffs[i] + acc * cand
                    out[i - 1] = acc
                coeffs = out
                changed = True
                break
    return roots, coeffs


def simultaneous_pieces(field, ambient, subspace_lists):
    """Common refinements ∩_k S_{k, w_k} over choices w_k, with a spanning check.

    ``subspace_lists`` is a list of lists of (label, Subspace).  Returns a list
    of (labels tuple, Subspace) for the nonzero intersections; raises
    PreconditionViolated when the pieces do not sum directly to the full space.
    """
    pieces = []
    total = 0
    for combo in product(*subspace_lists):
        inter = Subspace.full(field, ambient)
        for _, s in combo:
            inter = inter.intersect(s)
            if inter.is_zero():
                break
        if not inter.is_zero():
            pieces.append((tuple(lbl for lbl, _ in combo), inter))
            total += inter.dim
    if total != ambient:
        raise PreconditionViolated("pieces do not span: gradings are not simultaneous")
    stacked = [v for _, s in pieces for v in s.basis]
    if len(rref(stacked, field)[0]) != ambient:
        raise PreconditionViolated("pieces are not independent")
    return pieces
