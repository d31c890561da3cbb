"""The space of ratios of a sharp monoid: face chains with interior witnesses.

Points are stored in family form: a strictly increasing chain of faces of the
dual cone ending at the cone, with a rational interior witness per face.
Witnesses are normalized so the chain's marker generators evaluate to 1, and
reduced modulo the span of the previous face, which makes equality syntactic.
Evaluation r(f, g) follows the dual chain of monoid faces: the first level at
which the pair separates decides which witness measures it.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import inf

from .cones import Cone, Face, SharpMonoid, _dotv
from .errors import NotInteriorError, NotRankOne, PreconditionViolated, UndefinedPair
from .linalg import Mat, Subspace, solve
from .scalars import QQ

INF = inf


def _reduce_mod_span(vec, rays):
    """Canonical representative of vec modulo the rational span of the rays."""
    if not rays:
        return tuple(Fraction(x) for x in vec)
    span = Subspace(QQ, len(vec), [[Fraction(x) for x in r] for r in rays])
    return span.reduce([Fraction(x) for x in vec])


class RatioPoint:
    """A point of the ratio space in canonical family form."""

    __slots__ = ("monoid", "cone", "chain", "witnesses", "reduced")

    def __init__(self, cone: Cone, chain, witnesses):
        chain = tuple(chain)
        witnesses = tuple(tuple(Fraction(x) for x in wv) for wv in witnesses)
        if len(chain) != len(witnesses):
            raise PreconditionViolated("one witness per chain face is required")
        if chain:
            if chain[-1] != cone.full_face:
                raise PreconditionViolated("chain must end at the full cone")
            prev = None
            for face in chain:
                if prev is not None and not (face.contains_face(prev) and face.vanish != prev.vanish):
                    raise PreconditionViolated("chain is not strictly increasing")
                prev = face
            if chain[0].dim == 0:
                raise PreconditionViolated("chain starts above the zero face")
        elif cone.rank != 0:
            raise PreconditionViolated("nontrivial monoid needs a nonempty chain")
        for face, wv in zip(chain, witnesses):
            if not face.is_interior(wv):
                raise NotInteriorError("witness is not interior to its face")
        # normalize: witness_j scaled so the marker evaluates to 1, then reduced
        markers = _markers(cone, chain)
        normed = []
        reduced = []
        for j, (face, wv) in enumerate(zip(chain, witnesses)):
            val = _dotv(markers[j], wv)
            if val <= 0:
                raise PreconditionViolated("marker does not pair positively with witness")
            scaled = tuple(Fraction(x) / val for x in wv)
            normed.append(scaled)
            prev_rays = chain[j - 1].rays if j > 0 else ()
            reduced.append(_reduce_mod_span(scaled, prev_rays))
        object.__setattr__(self, "monoid", cone.monoid)
        object.__setattr__(self, "cone", cone)
        object.__setattr__(self, "chain", chain)
        object.__setattr__(self, "witnesses", tuple(normed))
        object.__setattr__(self, "reduced", tuple(reduced))

    def __setattr__(self, *a):
        raise AttributeError("RatioPoint is immutable")

    @property
    def length(self) -> int:
        return len(self.chain)

    def markers(self):
        """Marker generators f_j (first generator leaving each monoid face)."""
        return _markers(self.cone, self.chain)

    def dual_faces(self):
        """Generator-index sets of the decreasing monoid-face chain S^(0) ⊇ ... ⊇ S^(n)."""
        out = [frozenset(range(len(self.monoid.generators)))]
        out.extend(face.vanish for face in self.chain)
        return out

    def evaluate(self, f, g):
        """r(f, g) in [0, ∞]; exact Fraction when finite, math.inf otherwise."""
        f = tuple(int(x) for x in f)
        g = tuple(int(x) for x in g)
        if all(x == 0 for x in f) and all(x == 0 for x in g):
            raise UndefinedPair("r(1,1) is undefined")
        rays = self.cone.rays
        for v in (f, g):
            if any(_dotv(v, r) < 0 for r in rays):
                raise PreconditionViolated("arguments must pair nonnegatively with the cone")
        for j, face in enumerate(self.chain):
            fv = _dotv(f, self.witnesses[j])
            gv = _dotv(g, self.witnesses[j])
            in_face_f = all(_dotv(f, r) == 0 for r in face.rays)
            in_face_g = all(_dotv(g, r) == 0 for r in face.rays)
            if in_face_f and in_face_g:
                continue
            if gv == 0:
                return INF
            return fv / gv
        raise PreconditionViolated("pair vanishes on the full cone; not monoid elements")

    def is_rank_one(self) -> bool:
        return self.length == 1

    def rank_one_criterion(self) -> bool:
        """Finiteness/positivity of r on all generator pairs (the openness test)."""
        gens = self.monoid.generators
        for f in gens:
            for g in gens:
                v = self.evaluate(f, g)
                if v == INF or v == 0:
                    return False
        return True

    def __eq__(self, other):
        return (
            isinstance(other, RatioPoint)
            and self.cone == other.cone
            and tuple(f.vanish for f in self.chain) == tuple(f.vanish for f in other.chain)
            and self.reduced == other.reduced
        )

    def __hash__(self):
        return hash((self.cone, tuple(f.vanish for f in self.chain), self.reduced))

    def __repr__(self):
        return f"RatioPoint(chain dims {[f.dim for f in self.chain]})"


def _markers(cone: Cone, chain) -> list:
    """f_j: the first generator (input order) in S^(j-1) but not in S^(j)."""
    gens = cone.monoid.generators
    prev = frozenset(range(len(gens)))
    out = []
    for face in chain:
        cur = face.vanish
        pick = None
        for i in range(len(gens)):
            if i in prev and i not in cur:
                pick = gens[i]
                break
        if pick is None:
            raise PreconditionViolated("no marker generator separates consecutive faces")
        out.append(pick)
        prev = cur
    return out


def psi(cone: Cone, witness) -> RatioPoint:
    """Class of a single interior direction: the rank-one point ψ(N)."""
    if not cone.full_face.is_interior(tuple(Fraction(x) for x in witness)):
        raise NotInteriorError("vector is not interior to the cone")
    return RatioPoint(cone, [cone.full_face], [witness])


def is_rank_one(point: RatioPoint) -> bool:
    return point.is_rank_one()


@dataclass(frozen=True)
class RatioPath:
    """Base point plus a schedule of positive weight tuples with growing gaps."""

    point: RatioPoint
    schedule: tuple

    def __post_init__(self):
        n = self.point.length
        for ys in self.schedule:
            if len(ys) != n:
                raise PreconditionViolated("schedule tuple length must match chain length")
            if any(Fraction(y) <= 0 for y in ys):
                raise PreconditionViolated("schedule weights must be positive")
        # gaps y_j/y_{j+1} may stay constant (a stalled path) but never shrink
        for prev, cur in zip(self.schedule, self.schedule[1:]):
            for j in range(n - 1):
                if Fraction(cur[j]) * Fraction(prev[j + 1]) < Fraction(prev[j]) * Fraction(cur[j + 1]):
                    raise PreconditionViolated("successive ratios y_j/y_{j+1} must not decrease")


def geometric_schedule(n: int, base, steps: int) -> tuple:
    """y_j(t) = base^{t(n-j)} for t = 1..steps."""
    base = Fraction(base)
    if base <= 1:
        raise PreconditionViolated("base must exceed 1")
    return tuple(tuple(base ** (t * (n - j)) for j in range(1, n + 1)) for t in range(1, steps + 1))


def path_samples(path: RatioPath, count: int | None = None) -> list:
    """Rank-one samples ψ(Σ y_j N_j) with their schedule rows."""
    rows = path.schedule if count is None else path.schedule[:count]
    out = []
    for ys in rows:
        vec = [Fraction(0)] * path.point.cone.rank
        for y, wv in zip(ys, path.point.witnesses):
            y = Fraction(y)
            vec = [a + y * b for a, b in zip(vec, wv)]
        out.append((psi(path.point.cone, vec), tuple(Fraction(y) for y in ys)))
    return out
