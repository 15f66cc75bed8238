from fractions import Fraction
from itertools import product as iproduct

import pytest
from hypothesis import given, settings, strategies as st

from egzkit.exact_core import integer_affine_solve, lp_maximize
from egzkit.polytopes import (
    NotInPolytope,
    Polytope,
    classify_hollow_polygon,
    crit_check,
    fast_hollow_check,
    integer_points,
    is_hollow,
    is_integer_point,
    product,
    search_hollow,
    unimodular_canonical_form,
)
from egzkit.zerosum import hollow_to_weak_egz


def support_of(points, z):
    """Vertices carrying positive weight in some convex representation of z.

    The union of these supports is the vertex set of the smallest face that
    contains z. Each weight is maximized by a separate exact LP, so this is
    independent of the facet description used by Polytope.
    """
    k = len(points)
    A_eq = [[1] * k] + [[p[j] for p in points] for j in range(len(z))]
    b_eq = [1] + list(z)
    sup = []
    for i in range(k):
        res = lp_maximize([int(i == j) for j in range(k)], A_eq=A_eq, b_eq=b_eq)
        if res.status == "infeasible":
            return None
        if res.value > 0:
            sup.append(points[i])
    return sup


def oracle_integer_points(points):
    """Integer points by definition, scanning Z^d in the bounding box."""
    pts = sorted(set(tuple(points)))
    d = len(pts[0])
    found = []
    for z in iproduct(*[range(min(p[j] for p in pts), max(p[j] for p in pts) + 1) for j in range(d)]):
        face = support_of(pts, z)
        if face is None:
            continue
        if integer_affine_solve(face, z) is not None:
            found.append(z)
    return found


def test_hull_drops_interior_point():
    P = Polytope([(0, 0), (1, 0), (0, 1), (Fraction(1, 2), Fraction(1, 2))])
    assert len(P.vertices) == 3


def test_unit_square_face_count():
    P = Polytope([(0, 0), (1, 0), (0, 1), (1, 1)])
    dims = sorted(F.dim for F in P.faces)
    assert dims == [0, 0, 0, 0, 1, 1, 1, 1, 2]


def test_single_point_polytope():
    P = Polytope([(3, 4)])
    assert P.dim == 0 and len(P.faces) == 1


def test_vertices_are_integer_points():
    P = Polytope([(0, 0), (3, 1), (1, 4), (Fraction(1, 2), 2)])
    assert all(is_integer_point(P, v).integer for v in P.vertices)


def test_integer_point_examples():
    T = Polytope([(0, 0), (3, 0), (0, 3)])
    rep = is_integer_point(T, (1, 1))
    assert not rep.integer and rep.face == (0, 1, 2)
    T2 = Polytope([(0, 0), (2, 0), (0, 2)])
    rep = is_integer_point(T2, (1, 1))
    assert not rep.integer and len(rep.face) == 2
    with pytest.raises(NotInPolytope):
        is_integer_point(T, (5, 5))


def test_scaled_square_is_hollow():
    # vertices generate 2Z^2 and every edge lattice skips the midpoints
    P = Polytope([(0, 0), (2, 0), (0, 2), (2, 2)])
    assert [z for z, _ in integer_points(P)] == sorted(P.vertices)
    assert oracle_integer_points([(0, 0), (2, 0), (0, 2), (2, 2)]) == sorted((int(a), int(b)) for a, b in P.vertices)


def test_edge_lattice_of_thin_triangle():
    pts = [(0, 0), (1, 0), (1, 2)]
    assert oracle_integer_points(pts) == sorted(pts)
    assert len(integer_points(Polytope(pts))) == 3


def test_non_hollow_pentagon_witness():
    pts = [(0, 0), (1, 0), (2, 1), (1, 2), (0, 1)]
    oracle = oracle_integer_points(pts)
    assert oracle == sorted(pts + [(1, 1)])
    rep = is_hollow(Polytope(pts))
    assert not rep.hollow and rep.witness[0] == (1, 1)


def test_hollow_examples():
    assert is_hollow(Polytope(list(iproduct((0, 1), repeat=3)))).hollow
    Z = Polytope([(0, 0), (1, 0), (-1, 1), (2, 1)])
    assert is_hollow(Z).hollow
    assert oracle_integer_points([(0, 0), (1, 0), (-1, 1), (2, 1)]) == sorted([(0, 0), (1, 0), (-1, 1), (2, 1)])


def test_classify_examples():
    assert classify_hollow_polygon(Polytope([(0, 0), (1, 0), (0, 1), (1, 1)])) == {"class": "Trapezoid", "parallelogram": True}
    assert classify_hollow_polygon(Polytope([(0, 0), (1, 0), (0, 1)]))["class"] == "Triangle"
    assert classify_hollow_polygon(Polytope([(0, 0), (1, 0), (-1, 1), (2, 1)]))["class"] == "Trapezoid"
    assert classify_hollow_polygon(Polytope([(0, 0), (1, 0), (2, 1), (1, 2), (0, 1)]))["class"] == "NotHollow"
    assert classify_hollow_polygon(Polytope([(0, 0), (3, 1)]))["class"] == "Segment"


def test_products():
    seg = Polytope([(0,), (1,)])
    assert product(seg, seg).vertices == Polytope([(0, 0), (1, 0), (0, 1), (1, 1)]).vertices
    sq = Polytope([(0, 0), (1, 0), (0, 1), (1, 1)])
    Q = product(sq, sq)
    assert len(Q.vertices) == 16 and Q.dim == 4 and is_hollow(Q).hollow
    prism = product(Polytope([(0, 0), (1, 0), (0, 1)]), seg)
    assert len(prism.vertices) == 6


def test_crit_examples():
    seg = Polytope([(0,), (2,)])
    r = crit_check(seg, (1,), range(10, 21))
    assert not r.cond1
    assert r.cond2 == {n: n % 2 == 0 for n in range(10, 21)}
    r = crit_check(Polytope([(0,), (1,)]), (0,), range(3, 8))
    assert r.cond1 and all(r.cond2.values())
    T = Polytope([(0, 0), (3, 0), (0, 3)])
    r = crit_check(T, (1, 1), range(50, 61))
    assert not r.cond1
    assert all(not r.cond2[n] for n in range(50, 61) if n % 3)


def test_crit_construction_matches_oracle():
    P = Polytope([(0, 0), (3, 1), (1, 3), (-1, 2)])
    q = (1, 1)
    r = crit_check(P, q, range(1, 1))
    window = range(r.n0 + 1, r.n0 + 30)
    r = crit_check(P, q, window)
    assert r.cond1
    for n in window:
        alpha = r.construction[n]
        assert min(alpha) >= 0 and sum(alpha) == n
        assert all(sum(a * v[j] for a, v in zip(alpha, P.vertices)) == n * q[j] for j in range(2))
        assert r.cond2[n]


def test_search_small_boxes():
    r = search_hollow(2, 1, 4)
    square = unimodular_canonical_form([(0, 0), (1, 0), (0, 1), (1, 1)])
    assert [unimodular_canonical_form([tuple(int(a) for a in v) for v in P.vertices]) for P in r.polytopes] == [square]
    assert search_hollow(2, 3, 5).polytopes == []


def test_hollow_to_weak_egz_examples():
    vecs, ok = hollow_to_weak_egz(Polytope([(0, 0), (1, 0), (0, 1), (1, 1)]), 7)
    assert sorted(v.coords for v in vecs) == [(0, 0), (0, 1), (1, 0), (1, 1)] and ok
    vecs, ok = hollow_to_weak_egz(Polytope([(0,), (1,)]), 5)
    assert [v.coords for v in vecs] == [(0,), (1,)] and ok
    vecs, ok = hollow_to_weak_egz(Polytope([(0, 0), (2, 0), (0, 2)]), 7)
    assert sorted(v.coords for v in vecs) == [(0, 0), (0, 1), (1, 0)] and ok
    with pytest.raises(ValueError):
        hollow_to_weak_egz(Polytope([(0, 0), (1, 0), (2, 1), (1, 2), (0, 1)]), 7)


small = st.lists(st.tuples(st.integers(0, 3), st.integers(0, 3)), min_size=1, max_size=6)


@settings(max_examples=40, deadline=None)
@given(small)
def test_integer_points_match_definition_oracle(pts):
    P = Polytope(pts)
    got = sorted(tuple(int(a) for a in z) for z, _ in integer_points(P))
    assert got == oracle_integer_points([tuple(int(a) for a in v) for v in P.vertices])
    verts = [tuple(int(a) for a in v) for v in P.vertices]
    assert fast_hollow_check(verts) == (True, is_hollow(P).hollow)


@settings(max_examples=40, deadline=None)
@given(small, st.integers(-2, 2), st.integers(-2, 2), st.integers(1, 3))
def test_integer_points_invariant_under_unimodular_maps_and_scaling(pts, a, t, s):
    P = Polytope(pts)
    f = lambda q: (q[0] + a * q[1] + t, q[1])
    g = lambda q: (Fraction(s, 2) * q[0], Fraction(s, 2) * q[1])
    base = [z for z, _ in integer_points(P)]
    Q = Polytope([f(v) for v in P.vertices])
    assert sorted(z for z, _ in integer_points(Q)) == sorted(f(z) for z in base)
    R = Polytope([g(v) for v in P.vertices])
    assert sorted(z for z, _ in integer_points(R)) == sorted(g(z) for z in base)
    assert is_hollow(R).hollow == is_hollow(P).hollow


@settings(max_examples=25, deadline=None)
@given(st.lists(st.tuples(st.integers(0, 2), st.integers(0, 2), st.integers(0, 2)), min_size=4, max_size=7))
def test_fast_check_agrees_in_three_dimensions(pts):
    P = Polytope(pts)
    verts = [tuple(int(a) for a in v) for v in P.vertices]
    assert fast_hollow_check(verts) == (True, is_hollow(P).hollow)
    if len(set(pts)) > len(verts):
        assert fast_hollow_check(sorted(set(pts)))[0] is False
