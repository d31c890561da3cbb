from fractions import Fraction

import pytest

from monodromy_lab.errors import PreconditionViolated
from monodromy_lab.filtration import (
    Filtration,
    Splitting,
    any_splitting,
    dual_filtration,
    multigrading,
    sum_filtration,
    tensor_filtration,
)
from monodromy_lab.linalg import Mat, Subquotient, Subspace
from monodromy_lab.monodromy import rmf
from monodromy_lab.scalars import QQ

from conftest import basic_nilpotent, frobenius_splitting_s1


def test_pure_filtration_gr():
    f = Filtration.pure(QQ, 2, 1)
    assert f.gr(1).dim == 2
    assert f.gr(0).dim == 0 and f.gr(2).dim == 0


def test_gr_of_grading_induced_filtration():
    s = frobenius_splitting_s1()
    f = s.filtration_of()
    for w in (0, 2):
        assert f.gr(w).dim == s.part(w).dim


def test_two_step_gr_dimensions():
    # relative filtration of the 3-dim instance: jumps at 0 (dim 1) and 2 (dim 3)
    w = Filtration(QQ, 3, [(0, Subspace(QQ, 3, [[1, 0, 0]])), (2, Subspace.full(QQ, 3))])
    n = Mat(QQ, [[0, 0, 1], [0, 0, 0], [0, 0, 0]])
    m = rmf(w, n)
    assert m.gr_dims() == {0: 1, 2: 2}


def test_gr_dims_sum_to_ambient():
    w = Filtration(QQ, 3, [(0, Subspace(QQ, 3, [[1, 0, 0]])), (2, Subspace.full(QQ, 3))])
    assert sum(w.gr(j).dim for j in w.jumps()) == 3


def test_splitting_splits_own_filtration():
    s = frobenius_splitting_s1()
    assert s.splits(s.filtration_of())


def test_frobenius_grading_splits_s1_relative_filtration():
    s = frobenius_splitting_s1()
    m = rmf(Filtration.pure(QQ, 2, 1), basic_nilpotent())
    assert s.splits(m)


def test_non_adapted_grading_fails_splits():
    bad = Splitting(QQ, 2, [(0, Subspace(QQ, 2, [[0, 1]])), (2, Subspace(QQ, 2, [[1, 0]]))])
    m = rmf(Filtration.pure(QQ, 2, 1), basic_nilpotent())
    assert not bad.splits(m)


def test_compatibility_with_itself_and_counterexample():
    s = frobenius_splitting_s1()
    assert s.compatible_with(s)
    a = Splitting(QQ, 2, [(0, Subspace(QQ, 2, [[1, 0]])), (1, Subspace(QQ, 2, [[0, 1]]))])
    b = Splitting(QQ, 2, [(0, Subspace(QQ, 2, [[1, 1]])), (1, Subspace(QQ, 2, [[1, -1]]))])
    # sum of pairwise intersections is 0-dimensional: no common bigrading
    assert not a.compatible_with(b)


def test_induce_identity_and_pure():
    f = Filtration.pure(QQ, 3, 1)
    sub = Subquotient.of_subspace(Subspace(QQ, 3, [[1, 0, 0], [0, 1, 0]]))
    assert f.restrict_to(sub) == Filtration.pure(QQ, 2, 1)
    full = Subquotient.of_subspace(Subspace.full(QQ, 3))
    assert f.restrict_to(full) == Filtration.pure(QQ, 3, 1)


def test_induced_filtration_on_kernel_of_strict_morphism():
    # N: basic degeneration; ker N = weight-0 line of the relative filtration
    m = rmf(Filtration.pure(QQ, 2, 1), basic_nilpotent())
    sub = Subquotient.of_subspace(Subspace(QQ, 2, [[1, 0]]))
    assert m.restrict_to(sub) == Filtration.pure(QQ, 1, 0)


def test_filtration_validation():
    with pytest.raises(PreconditionViolated):
        Filtration(QQ, 2, [(0, Subspace(QQ, 2, [[1, 0]]))])  # never reaches full
    with pytest.raises(PreconditionViolated):
        Splitting(QQ, 2, [(0, Subspace(QQ, 2, [[1, 0]]))])


def test_dual_and_tensor_filtrations():
    pure1 = Filtration.pure(QQ, 2, 1)
    assert dual_filtration(pure1) == Filtration.pure(QQ, 2, -1)
    t = tensor_filtration(pure1, pure1)
    assert t == Filtration.pure(QQ, 4, 2)
    mixed = Filtration(QQ, 2, [(0, Subspace(QQ, 2, [[1, 0]])), (2, Subspace.full(QQ, 2))])
    d = dual_filtration(mixed)
    assert d.gr_dims() == {-2: 1, 0: 1}
    s = sum_filtration(pure1, mixed)
    assert s.gr_dims() == {0: 1, 1: 2, 2: 1}


def test_operator_components_decompose():
    s = frobenius_splitting_s1()
    n = basic_nilpotent()
    comps = s.operator_components(n)
    assert set(comps) == {-2}
    assert comps[-2] == n
    assert s.is_pure_degree(n, -2)


def test_any_splitting_splits():
    mixed = Filtration(QQ, 3, [(0, Subspace(QQ, 3, [[1, 0, 0]])), (2, Subspace.full(QQ, 3))])
    s = any_splitting(mixed)
    assert s.splits(mixed)


def test_multigrading_refines():
    s = frobenius_splitting_s1()
    t = Splitting(QQ, 2, [(1, Subspace(QQ, 2, [[1, 0]])), (3, Subspace(QQ, 2, [[0, 1]]))])
    pieces = multigrading([s, t])
    assert sorted(lbl for lbl, _ in pieces) == [(0, 1), (2, 3)]
