import random
from fractions import Fraction
from math import inf

import pytest

from monodromy_lab.cones import SharpMonoid
from monodromy_lab.errors import NotInteriorError, PreconditionViolated, UndefinedPair
from monodromy_lab.ratios import (
    RatioPath,
    RatioPoint,
    geometric_schedule,
    path_samples,
    psi,
)

from conftest import square_monoid


def square_cone():
    return square_monoid().dual_cone()


def boundary_point():
    cone = square_cone()
    ray_t = [f for f in cone.faces() if f.rays == ((1, 0),)][0]
    return RatioPoint(cone, [ray_t, cone.full_face], [(1, 0), (1, 1)])


def test_symmetric_interior_point():
    p = psi(square_cone(), (1, 1))
    assert p.evaluate((1, 0), (0, 1)) == 1
    assert p.is_rank_one() and p.rank_one_criterion()


def test_psi_scaling_class():
    cone = square_cone()
    assert psi(cone, (2, 1)) == psi(cone, (4, 2))
    assert psi(cone, (2, 1)).evaluate((1, 0), (0, 1)) == 2


def test_line_monoid_single_class():
    cone = SharpMonoid(1, [[1]]).dual_cone()
    assert psi(cone, (1,)) == psi(cone, (7,))


def test_boundary_point_endpoint_values():
    mu = boundary_point()
    assert mu.evaluate((1, 0), (0, 1)) == inf
    assert mu.evaluate((0, 1), (1, 0)) == 0
    assert not mu.is_rank_one()
    assert not mu.rank_one_criterion()


def test_undefined_pair():
    with pytest.raises(UndefinedPair):
        boundary_point().evaluate((0, 0), (0, 0))


def test_psi_requires_interior():
    with pytest.raises(NotInteriorError):
        psi(square_cone(), (1, 0))


def _random_monoid_element(rng):
    return (rng.randrange(0, 4), rng.randrange(0, 4))


def test_axioms_on_generator_pairs():
    rng = random.Random(5)
    points = [psi(square_cone(), (1, 1)), psi(square_cone(), (3, 2)), boundary_point()]
    for point in points:
        for _ in range(80):
            f, g, h = (_random_monoid_element(rng) for _ in range(3))
            if f == (0, 0) or g == (0, 0) or h == (0, 0):
                continue
            rfg, rgf = point.evaluate(f, g), point.evaluate(g, f)
            # (i) r(f,g) = r(g,f)^{-1} in [0,∞]
            if rfg == inf:
                assert rgf == 0
            elif rfg == 0:
                assert rgf == inf
            else:
                assert rgf == 1 / rfg
            # (ii) multiplicativity when not 0·∞
            rgh, rfh = point.evaluate(g, h), point.evaluate(f, h)
            if {rfg, rgh} != {0, inf} and rfg not in (0, inf) and rgh not in (0, inf):
                assert rfh == rfg * rgh
            # (iii) additivity in the first slot
            fg = tuple(a + b for a, b in zip(f, g))
            lhs = point.evaluate(fg, h)
            if rfh == inf or rgh == inf:
                assert lhs == inf
            else:
                assert lhs == rfh + rgh


def test_interval_bijection_round_trip():
    """Constructible points of the square-monoid ratio space correspond to
    their value at the generator pair."""
    cone = square_cone()
    q1, q2 = (1, 0), (0, 1)
    values = {}
    for a, b in [(1, 1), (2, 1), (1, 2), (5, 3)]:
        values[psi(cone, (a, b))] = Fraction(a, b)
    ray_t = [f for f in cone.faces() if f.rays == ((1, 0),)][0]
    ray_p = [f for f in cone.faces() if f.rays == ((0, 1),)][0]
    values[RatioPoint(cone, [ray_t, cone.full_face], [(1, 0), (1, 1)])] = inf
    values[RatioPoint(cone, [ray_p, cone.full_face], [(0, 1), (1, 1)])] = Fraction(0)
    seen = {}
    for point, expected in values.items():
        got = point.evaluate(q1, q2)
        assert got == expected
        seen[got] = point
    # distinct values, and value determines the stored point among these
    assert len(seen) == len(values)
    for point, expected in values.items():
        assert seen[expected] == point


def test_equivalence_rescale_and_shift():
    cone = square_cone()
    ray_t = [f for f in cone.faces() if f.rays == ((1, 0),)][0]
    base = RatioPoint(cone, [ray_t, cone.full_face], [(1, 0), (1, 1)])
    rescaled = RatioPoint(cone, [ray_t, cone.full_face], [(4, 0), (3, 3)])
    shifted = RatioPoint(cone, [ray_t, cone.full_face], [(1, 0), (9, 1)])
    assert base == rescaled
    assert base == shifted
    gens = [(1, 0), (0, 1), (1, 1), (2, 1)]
    for f in gens:
        for g in gens:
            assert base.evaluate(f, g) == shifted.evaluate(f, g)


def test_length_two_chain_fails_rank_one_criterion():
    mu = boundary_point()
    assert mu.rank_one_criterion() is False


def test_geometric_path_converges_to_endpoint():
    mu = boundary_point()
    path = RatioPath(mu, geometric_schedule(2, 10, 6))
    samples = path_samples(path)
    assert len(samples) == 6
    vals = [nu.evaluate((1, 0), (0, 1)) for nu, _ in samples]
    assert vals == sorted(vals)
    assert vals[-1] > 10**5
    for nu, _ in samples:
        assert nu.is_rank_one() and nu.rank_one_criterion()
    # convergence on the other generator pair as well: r(q2,q1) -> mu's 0
    down = [nu.evaluate((0, 1), (1, 0)) for nu, _ in samples]
    assert down == sorted(down, reverse=True)


def test_constant_schedule_stays_at_interior_class():
    mu = boundary_point()
    path = RatioPath(mu, ((1, 1), (1, 1)))
    samples = path_samples(path)
    assert samples[0][0] == samples[1][0]
    assert samples[0][0] == psi(square_cone(), (2, 1))


def test_rank_one_path_is_constant_in_class():
    cone = square_cone()
    nu = psi(cone, (2, 3))
    path = RatioPath(nu, ((2,), (5,), (11,)))
    samples = path_samples(path)
    assert all(pt == nu for pt, _ in samples)


def test_path_validation():
    mu = boundary_point()
    with pytest.raises(PreconditionViolated):
        RatioPath(mu, ((1, 1), (1, 2)))  # gap shrinks
    with pytest.raises(PreconditionViolated):
        RatioPath(mu, ((0, 1),))
    with pytest.raises(PreconditionViolated):
        RatioPath(mu, ((1, 1, 1),))
