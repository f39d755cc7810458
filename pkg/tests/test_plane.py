import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from g3agm.errors import CommonComponent, DegenerateLine, ZeroForm
from g3agm.forms import HomogeneousForm, monomials
from g3agm.numkernel import ToleranceProfile
from g3agm.plane import (TangencyConstraint, expand_multiset, fit_form_constrained, intersect,
                         line_through, match_points, meet, point_distance, points_on_line,
                         polar_conic, proj_point, tangent_line, third_point)

P = ToleranceProfile()
seeds = st.integers(min_value=0, max_value=2**32 - 1)
CIRCLE = HomogeneousForm.from_dict({(2, 0, 0): 1, (0, 2, 0): 1, (0, 0, 2): -1})
# y^2 z = x^3 - x z^2
ELLIPTIC = HomogeneousForm.from_dict({(0, 2, 1): 1, (3, 0, 0): -1, (1, 0, 2): 1})


def random_form(rng, degree):
    n = len(monomials(degree, 3))
    return HomogeneousForm(degree, 3, rng.normal(size=n) + 1j * rng.normal(size=n))


def random_point_on(F, rng):
    p, q = rng.normal(size=3), rng.normal(size=3)
    return points_on_line(F, p, q, P)[0][0]


def test_proj_point_is_canonical():
    p = proj_point([0, -2j, 1])
    assert abs(np.linalg.norm(p) - 1) < 1e-15
    assert p[1].imag == 0 and p[1].real > 0
    assert point_distance(p, [0, 5j, -2.5]) < 1e-15


def test_meet_and_join():
    L = line_through([1, 0, 0], [0, 1, 0])
    assert point_distance(L.coeffs, [0, 0, 1]) < 1e-15
    assert point_distance(meet(L, HomogeneousForm.linear([1, -1, 0])), [1, 1, 0]) < 1e-15


def test_line_against_circle():
    pts = intersect(HomogeneousForm.linear([1, 0, 0]), CIRCLE, P)
    assert [m for _, m in pts] == [1, 1]
    dist, _ = match_points([p for p, _ in pts], [[0, 1, 1], [0, 1, -1]])
    assert dist < 1e-12


def test_tangent_line_meets_circle_twice():
    pts = intersect(HomogeneousForm.linear([1, 0, -1]), CIRCLE, P)
    assert len(pts) == 1 and pts[0][1] == 2
    assert point_distance(pts[0][0], [1, 0, 1]) < 1e-7


@pytest.mark.parametrize("degrees", [(1, 4), (2, 3), (2, 2), (3, 3), (2, 4)])
def test_bezout_totals(degrees):
    rng = np.random.default_rng(sum(degrees))
    F, G = (random_form(rng, d) for d in degrees)
    pts = intersect(F, G, P)
    assert sum(m for _, m in pts) == degrees[0] * degrees[1]
    assert max(max(F.residual(p), G.residual(p)) for p, _ in pts) < 1e-9


def test_cubic_conic_matches_swapped_order():
    rng = np.random.default_rng(8)
    E, Q = random_form(rng, 3), random_form(rng, 2)
    a = expand_multiset(intersect(E, Q, P))
    b = expand_multiset(intersect(Q, E, P))
    assert len(a) == 6
    assert match_points(a, b)[0] < 1e-9


def test_intersection_with_common_component_raises():
    L = HomogeneousForm.linear([1, 1, 1])
    with pytest.raises(CommonComponent):
        intersect(L * HomogeneousForm.linear([1, 0, 0]), L * HomogeneousForm.linear([0, 1, 0]), P)


def test_polar_of_fermat_cubic():
    E = HomogeneousForm.from_dict({(3, 0, 0): 1, (0, 3, 0): 1, (0, 0, 3): 1})
    assert polar_conic(E, [1, 0, 0]).distance(HomogeneousForm.from_dict({(2, 0, 0): 1})) < 1e-15


def test_polar_of_triple_point_is_zero():
    cone = HomogeneousForm.from_dict({(3, 0, 0): 1, (0, 3, 0): 1})
    with pytest.raises(ZeroForm):
        polar_conic(cone, [0, 0, 1])


@settings(max_examples=100, deadline=None)
@given(seeds)
def test_polar_euler_identity_and_linearity(seed):
    rng = np.random.default_rng(seed)
    E = random_form(rng, 3)
    t, s = rng.normal(size=(2, 3)) + 1j * rng.normal(size=(2, 3))
    assert abs(polar_conic(E, t)(t) - 3 * E(t)) <= 1e-12 * E.norm() * np.linalg.norm(t) ** 3 * 10
    lhs = polar_conic(E, 2 * t + s).coeffs
    rhs = 2 * polar_conic(E, t).coeffs + polar_conic(E, s).coeffs
    assert np.linalg.norm(lhs - rhs) < 1e-12 * np.linalg.norm(lhs)


def test_polar_contact_points_have_tangents_through_t():
    rng = np.random.default_rng(4)
    E = random_form(rng, 3)
    t = random_point_on(E, rng)
    pts = expand_multiset(intersect(polar_conic(E, t), E, P))
    pts.sort(key=lambda p: point_distance(p, t))
    for p in pts[2:]:
        assert tangent_line(E, p).residual(t) < 1e-9


def test_third_point_on_elliptic_curve():
    r = third_point(ELLIPTIC, [0, 0, 1], [1, 0, 1], P)
    assert point_distance(r, [-1, 0, 1]) < 1e-15


def test_third_point_requires_distinct_points():
    with pytest.raises(DegenerateLine):
        third_point(ELLIPTIC, [0, 0, 1], [0, 0, 2], P)


def test_third_point_requires_points_on_curve():
    with pytest.raises(ValueError):
        third_point(ELLIPTIC, [0, 0, 1], [1, 1, 1], P)


@settings(max_examples=30, deadline=None)
@given(seeds)
def test_third_point_on_random_secant(seed):
    rng = np.random.default_rng(seed)
    E = random_form(rng, 3)
    p, q = random_point_on(E, rng), random_point_on(E, rng)
    r = third_point(E, p, q, P)
    assert E.residual(r) < 1e-10
    assert abs(np.linalg.det(np.array([p, q, r]))) < 1e-10


def test_conic_through_five_circle_points():
    pts = [[1, 0, 1], [0, 1, 1], [-1, 0, 1], [0, -1, 1], [3, 4, 5]]
    Q, cert = fit_form_constrained(2, pts, (), P)
    assert Q.distance(CIRCLE) < 1e-13 and cert.claimed_rank == 5


def test_cubic_from_nine_points():
    rng = np.random.default_rng(9)
    E = random_form(rng, 3)
    pts = [random_point_on(E, rng) for _ in range(9)]
    F, cert = fit_form_constrained(3, pts, (), P)
    assert F.distance(E) < 1e-8


def test_tangency_constraint_fixes_tangent():
    # circle through (1:0:1) with tangent x = z there, plus three more points
    T = TangencyConstraint([1, 0, 1], HomogeneousForm.linear([1, 0, -1]))
    Q, _ = fit_form_constrained(2, [[0, 1, 1], [-1, 0, 1], [0, -1, 1]], [T], P)
    assert Q.distance(CIRCLE) < 1e-13


def test_tangency_point_must_lie_on_line():
    with pytest.raises(ValueError):
        TangencyConstraint([1, 1, 1], HomogeneousForm.linear([1, 0, 0])).check(P)


@settings(max_examples=20, deadline=None)
@given(seeds)
def test_fit_is_projectively_equivariant(seed):
    rng = np.random.default_rng(seed)
    E = random_form(rng, 3)
    pts = [random_point_on(E, rng) for _ in range(12)]
    A = rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))
    F, _ = fit_form_constrained(3, pts, (), P)
    G, _ = fit_form_constrained(3, [A @ p for p in pts], (), P)
    # G(A p) = F(p) up to scale
    assert G.transform(A).distance(F) < 1e-7
