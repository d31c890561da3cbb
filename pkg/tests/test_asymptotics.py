from fractions import Fraction

import pytest

from monodromy_lab.asymptotics import (
    BoundarySetup,
    conjugated_operator,
    distance_to_limit,
    lowering_weights_exact,
    n_of_nu,
    n_of_nu_expansion,
    ratio_coordinates,
    sweep,
)
from monodromy_lab.errors import NotRankOne, PreconditionViolated
from monodromy_lab.filtration import Filtration, Splitting, kron_mat
from monodromy_lab.linalg import Mat, Subspace
from monodromy_lab.logpoint import LogPointObject
from monodromy_lab.ratios import RatioPath, RatioPoint, geometric_schedule, psi
from monodromy_lab.scalars import QQ

from conftest import Q, bidegeneration_object, sqrt2_object, square_monoid


def boundary(cone):
    ray_t = [f for f in cone.faces() if f.rays == ((1, 0),)][0]
    return RatioPoint(cone, [ray_t, cone.full_face], [(1, 0), (1, 1)])


def coupled_setup():
    obj = bidegeneration_object(coupled=True)
    return BoundarySetup(obj, boundary(obj.cone))


def expected_limit():
    nj = Mat(QQ, [[0, 1], [0, 0]])
    i2 = Mat.identity(QQ, 2)
    nhat2 = Mat(QQ, [[0, 1, 0, 0], [0, 0, 0, 0], [0, 0, 0, 1], [0, 0, 0, 0]])
    return kron_mat(nj, i2) + nhat2


def test_markers_and_adapted_basis():
    setup = coupled_setup()
    assert setup.markers == [(1, 0), (0, 1)]
    assert setup.adapted == (((1, 0),), ((0, 1),))
    assert setup.duals == (((Fraction(1), Fraction(0)),), ((Fraction(0), Fraction(1)),))


def test_limit_is_the_sum_of_lowering_operators():
    setup = coupled_setup()
    assert setup.limit_operator() == expected_limit()


def test_n_of_nu_normalization_and_trivial_case():
    setup = coupled_setup()
    nu = psi(setup.obj.cone, (1, 1))
    direct = n_of_nu(setup, nu)
    # h((1,1)) already sends the top marker to 1
    assert direct == setup.action.operator((1, 1))
    # scaling the witness does not change the image
    assert n_of_nu(setup, psi(setup.obj.cone, (3, 3))) == direct


def test_rank_two_expansion_formula():
    """N(nu) = y * h(N_ray_t) + h(N_ray_pi) in the dual-ray basis."""
    setup = coupled_setup()
    for y in (Fraction(7), Fraction(19, 3)):
        nu = psi(setup.obj.cone, (y, 1))
        direct = n_of_nu(setup, nu)
        assert direct == setup.action.operator((y, 1))
        assert direct == n_of_nu_expansion(setup, nu)


def test_n_of_nu_rejects_boundary_points():
    setup = coupled_setup()
    with pytest.raises(NotRankOne):
        n_of_nu(setup, setup.mu)


def test_t_exponent_structure_exact_quarter():
    """With ratio 1/4, conjugation factors are integer powers of 2."""
    setup = coupled_setup()
    nu = psi(setup.obj.cone, (4, 1))
    assert ratio_coordinates(setup, nu) == (Fraction(1, 5),)
    entries, exact = conjugated_operator(setup, nu)
    for p in range(4):
        for q_ in range(4):
            assert exact[p][q_]  # tau-weights differ by even numbers here


def test_hand_conjugation_oracle_distance_law():
    """Frozen oracle: along the geometric path the distance is exactly 1/R
    with R = 1 + 10^t (the single error entry carries ratio^{-1})."""
    setup = coupled_setup()
    path = RatioPath(setup.mu, geometric_schedule(2, 10, 6))
    rows = sweep(setup, path)
    for t, row in enumerate(rows, start=1):
        r_val = 1 + 10 ** t
        assert row.ratios == (Fraction(1, r_val),)
        assert abs(row.distance - 1.0 / r_val) < 1e-15 * r_val


def test_acceptance_style_sweep():
    setup = coupled_setup()
    rows = sweep(setup, RatioPath(setup.mu, geometric_schedule(2, 10, 8)))
    assert len(rows) == 8
    assert all(a.distance > b.distance for a, b in zip(rows, rows[1:]))
    assert rows[-1].distance < 1e-6


def test_uncoupled_product_conjugates_exactly():
    obj = bidegeneration_object(coupled=False)
    setup = BoundarySetup(obj, boundary(obj.cone))
    rows = sweep(setup, RatioPath(setup.mu, geometric_schedule(2, 10, 4)))
    assert all(r.distance == 0.0 for r in rows)


def test_zero_monodromy_distance_identically_zero():
    monoid = square_monoid()
    obj = LogPointObject(monoid, QQ, Filtration.pure(QQ, 2, 0),
                         [Mat.zeros(QQ, 2), Mat.zeros(QQ, 2)],
                         Mat.identity(QQ, 2), Q, Splitting.pure(QQ, 2, 0))
    setup = BoundarySetup(obj, boundary(obj.cone))
    rows = sweep(setup, RatioPath(setup.mu, geometric_schedule(2, 10, 3)))
    assert [r.distance for r in rows] == [0.0, 0.0, 0.0]


def test_quadratic_instance_converges():
    obj = sqrt2_object("+")
    setup = BoundarySetup(obj, boundary(obj.cone))
    assert setup.limit_operator() == setup.sl2.nhats[0] + setup.sl2.nhats[1]
    rows = sweep(setup, RatioPath(setup.mu, geometric_schedule(2, 10, 8)))
    assert all(a.distance > b.distance for a, b in zip(rows, rows[1:]))
    assert rows[-1].distance < 1e-6


def test_lowering_weights_exact_on_corpus():
    for setup in (
        coupled_setup(),
        BoundarySetup(bidegeneration_object(), boundary(bidegeneration_object().cone)),
        BoundarySetup(sqrt2_object("+"), boundary(sqrt2_object("+").cone)),
    ):
        assert lowering_weights_exact(setup)


def test_adapted_basis_independence():
    """A different flag-adapted generator basis gives the same expansion."""
    obj = bidegeneration_object(coupled=True)
    mu = boundary(obj.cone)
    default = BoundarySetup(obj, mu)
    other = BoundarySetup(obj, mu, adapted=(((1, 0),), ((1, 1),)))
    for wit in ((3, 1), (10, 1)):
        nu = psi(obj.cone, wit)
        assert n_of_nu_expansion(default, nu) == n_of_nu_expansion(other, nu)
        assert n_of_nu_expansion(other, nu) == n_of_nu(other, nu)
    assert other.limit_operator() == default.limit_operator()


def test_class_invariant_witnesses():
    """Equivalent boundary witnesses give the same limit operator."""
    obj = bidegeneration_object(coupled=True)
    cone = obj.cone
    ray_t = [f for f in cone.faces() if f.rays == ((1, 0),)][0]
    mu1 = RatioPoint(cone, [ray_t, cone.full_face], [(1, 0), (1, 1)])
    mu2 = RatioPoint(cone, [ray_t, cone.full_face], [(5, 0), (4, 1)])
    s1 = BoundarySetup(obj, mu1)
    s2 = BoundarySetup(obj, mu2)
    assert mu1 == mu2
    assert s1.limit_operator() == s2.limit_operator()


def test_sweep_requires_matching_base_point():
    setup = coupled_setup()
    other = psi(setup.obj.cone, (1, 1))
    with pytest.raises(PreconditionViolated):
        sweep(setup, RatioPath(other, ((1,), (2,))))


def test_rank_one_boundary_sweep_is_constant():
    obj = bidegeneration_object(coupled=True)
    nu = psi(obj.cone, (2, 1))
    setup = BoundarySetup(obj, nu)
    rows = sweep(setup, RatioPath(nu, ((1,), (3,), (9,))))
    assert len(rows) == 3
    first = rows[0].distance
    assert all(r.distance == first for r in rows)
