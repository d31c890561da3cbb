from fractions import Fraction

import pytest

from monodromy_lab.cones import check_admissible
from monodromy_lab.deligne import (
    DeligneMorphism,
    DeligneSystem,
    SL2Data,
    build_sl2_data,
    cokernel_system,
    deligne_splitting,
    kernel_system,
    system_from_admissible,
    tate_twist_system,
    validate_system,
)
from monodromy_lab.errors import PreconditionViolated, ValidationFailed
from monodromy_lab.filtration import Filtration, Splitting, any_splitting, kron_mat
from monodromy_lab.linalg import Mat, Subspace, commutator
from monodromy_lab.monodromy import rmf
from monodromy_lab.scalars import QQ

from conftest import (
    basic_nilpotent,
    bidegeneration_object,
    frobenius_splitting_s1,
    product_grading,
    square_monoid,
)


def s1_system():
    n = basic_nilpotent()
    w0 = Filtration.pure(QQ, 2, 1)
    w1 = rmf(w0, n)
    return DeligneSystem(QQ, [w0, w1], [n], frobenius_splitting_s1())


def test_deligne_splitting_pure_base():
    n = basic_nilpotent()
    w = Filtration.pure(QQ, 2, 1)
    m = rmf(w, n)
    y = frobenius_splitting_s1()
    out = deligne_splitting(n, w, m, y)
    assert out == Splitting.pure(QQ, 2, 1)


def test_deligne_splitting_already_bigraded():
    """Operator with only the degree-0 component: the input splitting survives."""
    n = Mat(QQ, [[0, 0, 1, 0], [0, 0, 0, 1], [0, 0, 0, 0], [0, 0, 0, 0]])
    w = Filtration(QQ, 4, [
        (0, Subspace(QQ, 4, [[1, 0, 0, 0], [0, 0, 1, 0]])),
        (1, Subspace.full(QQ, 4)),
    ])
    m = rmf(w, n)
    assert m is not None
    y = any_splitting(m)
    out = deligne_splitting(n, w, m, y)
    assert out.splits(w)
    assert out.compatible_with(y)
    comps = out.operator_components(n)
    assert set(comps) == {0}


def four_dim_degree_one_instance():
    """W jumps {0,1}; N: b -> a, d -> a; the naive complement carries a
    nonzero degree-1 component which the correction must kill."""
    a, b, c, d = range(4)
    n_rows = [[Fraction(0)] * 4 for _ in range(4)]
    n_rows[a][b] = Fraction(1)
    n_rows[a][d] = Fraction(1)
    n = Mat(QQ, n_rows)
    w = Filtration(QQ, 4, [
        (0, Subspace(QQ, 4, [[1, 0, 0, 0], [0, 1, 0, 0]])),
        (1, Subspace.full(QQ, 4)),
    ])
    m = Filtration(QQ, 4, [
        (-1, Subspace(QQ, 4, [[1, 0, 0, 0]])),
        (1, Subspace.full(QQ, 4)),
    ])
    y = Splitting(QQ, 4, [
        (-1, Subspace(QQ, 4, [[1, 0, 0, 0]])),
        (1, Subspace(QQ, 4, [[0, 1, 0, 0], [0, 0, 1, 0], [0, 0, 0, 1]])),
    ])
    return n, w, m, y


def test_deligne_splitting_kills_degree_one_component():
    n, w, m, y = four_dim_degree_one_instance()
    assert rmf(w, n) == m
    # the naive echelon complement (c, d) leaves the d -> a component in
    # degree 1; the correction must move d to d - b
    naive = Splitting(QQ, 4, [
        (0, Subspace(QQ, 4, [[1, 0, 0, 0], [0, 1, 0, 0]])),
        (1, Subspace(QQ, 4, [[0, 0, 1, 0], [0, 0, 0, 1]])),
    ])
    assert not naive.component(n, -1).is_zero()
    out = deligne_splitting(n, w, m, y)
    assert out.splits(w) and out.compatible_with(y)
    comps = out.operator_components(n)
    assert all(delta <= 0 for delta in comps)
    assert comps.get(-1) is None  # primitivity at degree 1 forces a zero component
    # frozen expected splitting: weight-1 part spanned by c and d - b
    expected = Splitting(QQ, 4, [
        (0, Subspace(QQ, 4, [[1, 0, 0, 0], [0, 1, 0, 0]])),
        (1, Subspace(QQ, 4, [[0, 0, 1, 0], [0, -1, 0, 1]])),
    ])
    assert out == expected


def test_deligne_splitting_unique_from_any_initial():
    """Exhaustive oracle over all compatible splittings of the 4-dim instance."""
    n, w, m, y = four_dim_degree_one_instance()
    out = deligne_splitting(n, w, m, y)
    # all compatible splittings: weight-1 part spanned by c + beta*b, d + gamma*b
    matches = []
    for beta in range(-2, 3):
        for gamma in range(-2, 3):
            cand = Splitting(QQ, 4, [
                (0, Subspace(QQ, 4, [[1, 0, 0, 0], [0, 1, 0, 0]])),
                (1, Subspace(QQ, 4, [[0, beta, 1, 0], [0, gamma, 0, 1]])),
            ])
            comps = cand.operator_components(n)
            if all(delta == 0 or
                   _ad_power_zero(comps.get(0, Mat.zeros(QQ, 4)), -delta, comp)
                   for delta, comp in comps.items()):
                matches.append(cand)
    assert matches == [out]


def _ad_power_zero(n0, d, comp):
    out = comp
    for _ in range(d - 1):
        out = commutator(n0, out)
    return out.is_zero()


def test_validate_s1_system_and_sl2_data():
    system = s1_system()
    assert validate_system(system) is None
    data = build_sl2_data(system)
    assert data.gradings[0] == Splitting.pure(QQ, 2, 1)
    assert data.nhats[0] == basic_nilpotent()


def test_validate_detects_bad_grading():
    n = basic_nilpotent()
    w0 = Filtration.pure(QQ, 2, 1)
    w1 = rmf(w0, n)
    bad_y = Splitting(QQ, 2, [(0, Subspace(QQ, 2, [[0, 1]])), (2, Subspace(QQ, 2, [[1, 0]]))])
    bad = DeligneSystem(QQ, [w0, w1], [n], bad_y)
    violation = validate_system(bad)
    assert violation is not None


def test_zero_length_system():
    y = frobenius_splitting_s1()
    system = DeligneSystem(QQ, [y.filtration_of()], [], y)
    assert validate_system(system) is None
    bad = DeligneSystem(QQ, [Filtration.pure(QQ, 2, 1)], [], y)
    assert validate_system(bad) is not None


def bidegeneration_system(coupled=False):
    obj = bidegeneration_object(coupled=coupled)
    fam = check_admissible(obj.action())
    cone = obj.cone
    ray_t = [f for f in cone.faces() if f.rays == ((1, 0),)][0]
    chain = [cone.zero_face, ray_t, cone.full_face]
    return fam, system_from_admissible(fam, chain, [(1, 0), (1, 1)], obj.grading)


def test_bidegeneration_sl2_data_product_basis_oracle():
    _, system = bidegeneration_system()
    data = build_sl2_data(system)
    nj = basic_nilpotent()
    i2 = Mat.identity(QQ, 2)
    assert data.nhats[0] == kron_mat(nj, i2)
    assert data.nhats[1] == kron_mat(i2, nj)
    assert commutator(data.nhats[0], data.nhats[1]).is_zero()


def test_coupled_bidegeneration_sl2_data():
    _, system = bidegeneration_system(coupled=True)
    data = build_sl2_data(system)
    nj = basic_nilpotent()
    i2 = Mat.identity(QQ, 2)
    assert data.nhats[0] == kron_mat(nj, i2)
    expected = Mat(QQ, [[0, 1, 0, 0], [0, 0, 0, 0], [0, 0, 0, 1], [0, 0, 0, 0]])
    assert data.nhats[1] == expected
    # lowering operators have pure weight -2 for the later gradings
    for j, nhat in enumerate(data.nhats, start=1):
        for i in range(j, 3):
            assert data.gradings[i].is_pure_degree(nhat, -2)


def test_all_zero_operators_system():
    w = Filtration.pure(QQ, 3, 0)
    y = Splitting.pure(QQ, 3, 0)
    system = DeligneSystem(QQ, [w, w, w], [Mat.zeros(QQ, 3), Mat.zeros(QQ, 3)], y)
    data = build_sl2_data(system)
    assert all(nhat.is_zero() for nhat in data.nhats)
    assert all(g == y for g in data.gradings)


def test_perturbation_by_earlier_face_span():
    """N_2 mod the span of the first face does not change the data."""
    fam, system = bidegeneration_system(coupled=True)
    data = build_sl2_data(system)
    obj = bidegeneration_object(coupled=True)
    cone = obj.cone
    ray_t = [f for f in cone.faces() if f.rays == ((1, 0),)][0]
    chain = [cone.zero_face, ray_t, cone.full_face]
    for shift in (1, 2, 3):
        other = system_from_admissible(fam, chain, [(1, 0), (1 + shift, 1)], obj.grading)
        data2 = build_sl2_data(other)
        assert data2.nhats == data.nhats
        assert data2.gradings == data.gradings


def test_rescaling_scales_the_lowering_operator():
    fam, system = bidegeneration_system()
    data = build_sl2_data(system)
    obj = bidegeneration_object()
    cone = obj.cone
    ray_t = [f for f in cone.faces() if f.rays == ((1, 0),)][0]
    chain = [cone.zero_face, ray_t, cone.full_face]
    scaled = system_from_admissible(fam, chain, [(1, 0), (3, 3)], obj.grading)
    data2 = build_sl2_data(scaled)
    assert data2.nhats[1] == 3 * data.nhats[1]
    assert data2.gradings == data.gradings


def test_sigma_j_rays_lower_later_gradings_by_two():
    fam, system = bidegeneration_system(coupled=True)
    data = build_sl2_data(system)
    obj = bidegeneration_object(coupled=True)
    action = obj.action()
    cone = obj.cone
    ray_t = [f for f in cone.faces() if f.rays == ((1, 0),)][0]
    chain = [cone.zero_face, ray_t, cone.full_face]
    for j, face in enumerate(chain):
        for ray in face.rays:
            op = action.operator([Fraction(x) for x in ray])
            if op.is_zero():
                continue
            for i in range(max(j, 1), 3):
                assert data.gradings[i].is_pure_degree(op, -2)


def test_kernel_of_identity_is_zero():
    system = s1_system()
    ident = DeligneMorphism(system, system, Mat.identity(QQ, 2))
    ker, _ = kernel_system(ident)
    assert ker.dim == 0


def test_quotient_to_weight_two_line():
    """The graded projection of the basic system onto its top line; the kernel
    is the weight-0 line (the filtered-with-operator form of the basic exact
    sequence)."""
    n = basic_nilpotent()
    m = rmf(Filtration.pure(QQ, 2, 1), n)
    y = frobenius_splitting_s1()
    source = DeligneSystem(QQ, [m, m], [n], y)
    assert validate_system(source) is None
    target = DeligneSystem(
        QQ, [Filtration.pure(QQ, 1, 2), Filtration.pure(QQ, 1, 2)],
        [Mat.zeros(QQ, 1)], Splitting.pure(QQ, 1, 2),
    )
    proj = DeligneMorphism(source, target, Mat(QQ, [[0, 1]]))
    ker, _ = kernel_system(proj)
    assert ker.dim == 1
    assert ker.filtrations[0] == Filtration.pure(QQ, 1, 0)
    coker, _ = cokernel_system(proj)
    assert coker.dim == 0


def test_cokernel_of_strict_inclusion():
    n = basic_nilpotent()
    m = rmf(Filtration.pure(QQ, 2, 1), n)
    y = frobenius_splitting_s1()
    big = DeligneSystem(QQ, [m, m], [n], y)
    line = DeligneSystem(
        QQ, [Filtration.pure(QQ, 1, 0), Filtration.pure(QQ, 1, 0)],
        [Mat.zeros(QQ, 1)], Splitting.pure(QQ, 1, 0),
    )
    inc = DeligneMorphism(line, big, Mat(QQ, [[1], [0]]))
    coker, _ = cokernel_system(inc)
    assert coker.dim == 1
    assert coker.filtrations[0] == Filtration.pure(QQ, 1, 2)
    # strictness: image of each filtration step equals image ∩ step
    from monodromy_lab.linalg import image as mat_image

    img = mat_image(inc.mat)
    for fs, ft in zip(line.filtrations, big.filtrations):
        for w in set(fs.jumps()) | set(ft.jumps()):
            pushed = fs.at(w).apply(inc.mat)
            assert pushed == img.intersect(ft.at(w))


def test_tate_twist_system_shifts():
    system = s1_system()
    twisted = tate_twist_system(system, 1)
    assert twisted.filtrations[0] == system.filtrations[0].shift(-2)
    assert validate_system(twisted) is None
