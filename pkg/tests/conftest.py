"""Shared constructors for the test corpus."""

from fractions import Fraction

import pytest

from monodromy_lab.cones import ConeAction, SharpMonoid
from monodromy_lab.filtration import Filtration, Splitting, kron_mat
from monodromy_lab.linalg import Mat, Subspace
from monodromy_lab.logpoint import LogPointObject, build_Sr, standard_monoid
from monodromy_lab.scalars import QQ, QuadraticField

Q = 5


@pytest.fixture(scope="session")
def q():
    return Q


def basic_nilpotent(field=QQ):
    """N(e2) = e1 on a 2-dimensional space."""
    return Mat(field, [[0, 1], [0, 0]])


def jordan_block(size, field=QQ):
    return Mat(field, [[1 if j == i + 1 else 0 for j in range(size)] for i in range(size)])


def mixed_extension(q=Q):
    """2-dim member with W redeclared as its own monodromy filtration.

    W jumps {0, 2}, N(v2) = v1, F = diag(1, q): the weight-0 unit line is a
    subobject; the quotient is a weight-2 line of Frobenius eigenvalue q.
    """
    return LogPointObject(
        standard_monoid(), QQ,
        Filtration(QQ, 2, [(0, Subspace(QQ, 2, [[1, 0]])), (2, Subspace.full(QQ, 2))]),
        [basic_nilpotent()], Mat(QQ, [[1, 0], [0, q]]), q,
        Splitting(QQ, 2, [(0, Subspace(QQ, 2, [[1, 0]])), (2, Subspace(QQ, 2, [[0, 1]]))]),
    )


def square_monoid():
    return SharpMonoid(2, [[1, 0], [0, 1]])


def product_grading(q=Q):
    """Frobenius data of the 4-dim product of two basic degenerations."""
    grading = Splitting(QQ, 4, [
        (0, Subspace(QQ, 4, [[1, 0, 0, 0]])),
        (2, Subspace(QQ, 4, [[0, 1, 0, 0], [0, 0, 1, 0]])),
        (4, Subspace(QQ, 4, [[0, 0, 0, 1]])),
    ])
    frob = Mat(QQ, [[1, 0, 0, 0], [0, q, 0, 0], [0, 0, q, 0], [0, 0, 0, q * q]])
    return grading, frob


def bidegeneration_object(q=Q, coupled=False):
    """4-dim member over the square monoid.

    Uncoupled: rays act by N⊗1 and 1⊗N.  Coupled: the second ray acts by
    N⊗1 + 1⊗N (the Kunneth square of fibers with parameters t·π and π).
    """
    nj = basic_nilpotent()
    i2 = Mat.identity(QQ, 2)
    na = kron_mat(nj, i2)
    nb = kron_mat(i2, nj)
    grading, frob = product_grading(q)
    second = na + nb if coupled else nb
    # canonical ray order is ((0,1), (1,0)): the (0,1) ray carries `second`
    return LogPointObject(
        square_monoid(), QQ, Filtration.pure(QQ, 4, 2),
        [second, na], frob, q, grading,
    )


def sqrt2_action(embedding):
    """Rank-2 action with a1 = 1, a2 = sqrt(2) over Q(sqrt 2)."""
    field = QuadraticField(2, embedding)
    root = field.sqrt_gen
    cone = square_monoid().dual_cone()
    base = Filtration.pure(field, 2, 1)
    # ray order ((0,1), (1,0)): a2 = sqrt2 on the (0,1) ray, a1 = 1 on (1,0)
    return ConeAction(cone, field, base, [
        Mat(field, [[0, root], [0, 0]]),
        Mat(field, [[0, 1], [0, 0]]),
    ])


def sqrt2_object(embedding, q=Q):
    act = sqrt2_action(embedding)
    field = act.field
    return LogPointObject(
        square_monoid(), field, Filtration.pure(field, 2, 1), act.ray_mats,
        Mat(field, [[1, 0], [0, q]]), q,
        Splitting(field, 2, [(0, Subspace(field, 2, [[1, 0]])),
                             (2, Subspace(field, 2, [[0, 1]]))]),
    )


def frobenius_splitting_s1(field=QQ):
    return Splitting(field, 2, [(0, Subspace(field, 2, [[1, 0]])),
                                (2, Subspace(field, 2, [[0, 1]]))])
