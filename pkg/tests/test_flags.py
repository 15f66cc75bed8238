from fractions import Fraction
from itertools import combinations, product

import pytest
from hypothesis import given, settings, strategies as st

from egzkit.exact_core import lattice_member, minimal_affine_lattice
from egzkit.flags import (
    AffineMap,
    ConvexFlag,
    FlagPoint,
    binary_tree,
    centerpoint,
    centrality_trace,
    convex_combine,
    from_polytope,
    helly_constants,
    integer_proper_points,
    interval_with_duplicated_endpoints,
    is_hollow_flag,
    point_of_polytope,
    polytope_centerpoint,
    sunflower,
    validate_flag,
    verify_helly,
    weak_hull_member,
)
from egzkit.polytopes import Polytope, search_hollow
from oracles import closed_halfspace_weight

SQUARE = Polytope([(0, 0), (1, 0), (0, 1), (1, 1)])


def compositions(total, parts):
    if parts == 1:
        yield (total,)
        return
    for a in range(total + 1):
        for rest in compositions(total - a, parts - 1):
            yield (a,) + rest


def grid_violation(F, A, proper, den=6):
    """Search convex combinations with coefficients in (1/den)Z for an integer proper point."""
    proper = set(proper)
    for ks in compositions(den, len(A)):
        if max(ks) == den:
            continue
        q = convex_combine(F, A, [Fraction(k, den) for k in ks])
        if q in proper:
            return ks, q
    return None


def brute_integer_points_all_proper(F):
    """Every integer coordinate vector of every node, for flags where all points are proper."""
    out = set()
    for x in F.nodes:
        P = F.polytopes[x]
        box = [range(int(min(v[j] for v in P.vertices)), int(max(v[j] for v in P.vertices)) + 1)
               for j in range(P.ambient_dim)]
        for z in product(*box):
            if P.contains(z):
                out.add(FlagPoint(x, z))
    return out


def weak_hull_by_functionals(F, S, q):
    """Weak hull membership straight from the functional definition, for flags of 1-dimensional nodes."""
    for y in F.nodes:
        if not F.leq(q.base, y):
            continue
        for xi in (-1, 0, 1):
            val = xi * F.image(q, y)[0]
            if not any(F.leq(s.base, y) and xi * F.image(s, y)[0] >= val for s in S):
                return False
    return True


def test_constructors_are_valid():
    for F in (binary_tree(1), binary_tree(2), interval_with_duplicated_endpoints(),
              sunflower([(0, 0), (1, 0), (1, 1), (0, 1)]), from_polytope(SQUARE)):
        assert validate_flag(F) == {"valid": True, "violations": []}
    assert len(from_polytope(SQUARE).nodes) == 9
    T = binary_tree(1)
    assert len(T.nodes) == 3 and all(T.polytopes[x] == Polytope([(0,), (1,)]) for x in T.nodes)
    assert T.image(FlagPoint("r1", (Fraction(1, 3),)), "r") == (1,)


def test_missing_supremum_is_named():
    unit = Polytope([(0,), (1,)])
    ident = AffineMap.identity(1)
    order = [("m1", "u"), ("m1", "v"), ("m2", "u"), ("m2", "v"), ("u", "t"), ("v", "t")]
    F = ConvexFlag({x: unit for x in ("t", "u", "v", "m1", "m2")}, order, {e: ident for e in order})
    rep = validate_flag(F)
    assert not rep["valid"] and "no supremum for m1 and m2" in rep["violations"]


def test_validation_catches_broken_maps():
    unit = Polytope([(0,), (1,)])
    F = ConvexFlag({"t": unit, "m": unit}, [("m", "t")], {("m", "t"): AffineMap.make([[2]], [0])})
    assert any("image of P_m" in v for v in validate_flag(F)["violations"])
    order = [("a", "b"), ("b", "t"), ("a", "t")]
    maps = {("a", "b"): AffineMap.identity(1), ("b", "t"): AffineMap.identity(1),
            ("a", "t"): AffineMap.make([[-1]], [1])}
    F = ConvexFlag({"t": unit, "b": unit, "a": unit}, order, maps)
    assert any("functorial" in v for v in validate_flag(F)["violations"])


def test_convex_combination_examples():
    F = from_polytope(Polytope([(0,), (1,)]))
    a, b = FlagPoint("F0", (0,)), FlagPoint("F1", (1,))
    assert convex_combine(F, [a, b], [Fraction(1, 2)] * 2) == FlagPoint("F0_1", (Fraction(1, 2),))
    assert convex_combine(F, [a, b], [1, 0]) == a
    iv = interval_with_duplicated_endpoints()
    zero, zero_top = FlagPoint("F0", (0,)), FlagPoint("F0_1", (0,))
    assert convex_combine(iv, [zero_top, zero], [Fraction(1, 2)] * 2) == zero_top


def test_weak_hull_examples():
    iv = interval_with_duplicated_endpoints()
    zero, zero_top = FlagPoint("F0", (0,)), FlagPoint("F0_1", (0,))
    assert weak_hull_member(iv, [zero], zero_top)
    assert not weak_hull_member(iv, [zero_top], zero)
    F = from_polytope(Polytope([(0,), (1,)]))
    mid = FlagPoint("F0_1", (Fraction(1, 2),))
    assert weak_hull_member(F, [FlagPoint("F0", (0,)), FlagPoint("F1", (1,))], mid)


def test_weak_hull_matches_functional_definition():
    for F in (interval_with_duplicated_endpoints(), binary_tree(1)):
        I = integer_proper_points(F)
        for r in range(1, 4):
            for S in combinations(I, r):
                for q in I:
                    assert weak_hull_member(F, list(S), q) == weak_hull_by_functionals(F, S, q)


def test_integer_proper_points():
    assert [q.coords for q in integer_proper_points(from_polytope(SQUARE))] == sorted(SQUARE.vertices)
    for d in (1, 2):
        T = binary_tree(d)
        assert set(integer_proper_points(T)) == brute_integer_points_all_proper(T)
    assert len(integer_proper_points(binary_tree(1))) == 6
    iv = integer_proper_points(interval_with_duplicated_endpoints())
    assert sorted(iv) == sorted([FlagPoint("F0", (0,)), FlagPoint("F1", (1,)),
                                 FlagPoint("F0_1", (0,)), FlagPoint("F0_1", (1,))])


@pytest.mark.parametrize("make,L", [
    (interval_with_duplicated_endpoints, 2),
    (lambda: binary_tree(1), 4),
    (lambda: binary_tree(2), 8),
    (lambda: from_polytope(SQUARE), 4),
])
def test_helly_constant_values(make, L):
    F = make()
    rep = helly_constants(F)
    assert rep.L == L == len(rep.witness_set)
    assert rep.L_geometric <= rep.L
    I = rep.proper_points
    assert grid_violation(F, rep.witness_set, I) is None
    # every reported obstruction is a genuine nontrivial integer proper combination
    for v in rep.violating_combinations:
        assert max(v["alphas"]) < 1 and convex_combine(F, v["points"], v["alphas"]) == v["result"]
        assert v["result"] in I
    if len(I) <= 6:
        for B in combinations(I, L + 1):
            assert grid_violation(F, list(B), I) is not None


def test_geometric_helly_can_be_smaller():
    rep = helly_constants(binary_tree(2))
    assert (rep.L, rep.L_geometric) == (8, 2)


def test_hollow_polytopes_have_helly_constant_equal_to_vertex_count():
    found = search_hollow(2, 2, 4).polytopes + [Polytope(list(product((0, 1), repeat=3)))]
    assert found
    for P in found:
        rep = helly_constants(from_polytope(P))
        assert rep.L == rep.L_geometric == len(P.vertices)


def test_verify_helly_examples():
    F = from_polytope(SQUARE)
    v1, v2, v3 = (point_of_polytope(F, SQUARE, q) for q in [(0, 0), (1, 0), (1, 1)])
    got = verify_helly(F, [[v1, v2], [v2, v3]])
    assert got.hypothesis and got.point == v2
    everything = integer_proper_points(F)
    got = verify_helly(F, [everything, [v1, v3]])
    assert got.hypothesis and got.point in (v1, v3)
    seg = from_polytope(Polytope([(0,), (1,)]))
    got = verify_helly(seg, [[FlagPoint("F0", (0,))], [FlagPoint("F1", (1,))]])
    assert not got.hypothesis and got.point is None


def test_polytope_centerpoint_examples():
    r = polytope_centerpoint(Polytope([(0,), (3,)]), [(0,), (3,)], [1, 2])
    assert r.point == (3,) and r.face == ((3,),)
    r = polytope_centerpoint(Polytope([(0,), (2,)]), [(0,), (1,), (2,)], [1, 1, 1])
    assert r.point == (1,)
    r = polytope_centerpoint(SQUARE, SQUARE.vertices, [1] * 4)
    assert r.point in SQUARE.vertices
    assert closed_halfspace_weight(SQUARE.vertices, [1] * 4, r.point) >= 1


def test_centerpoint_of_single_point():
    F = from_polytope(SQUARE)
    v = point_of_polytope(F, SQUARE, (1, 0))
    assert centerpoint(F, [(v, 5)]).point == v


def test_hollow_flag_examples():
    seg = Polytope([(0,), (1,)])
    assert is_hollow_flag(from_polytope(seg)).hollow
    F = from_polytope(Polytope([(0,), (2,)]))
    assert is_hollow_flag(F).hollow
    lat = dict(F.lattices)
    lat["F0_1"] = minimal_affine_lattice([(0,), (1,)])
    rep = is_hollow_flag(F.with_lattices(lat))
    assert not rep.hollow and rep.violation["condition"] == 1 and rep.violation["point"] == ["1"]
    rep = is_hollow_flag(binary_tree(1))
    assert not rep.hollow and rep.violation["condition"] == 2


def test_non_good_face_is_reported():
    # the vertex node maps into the middle of the top segment, so the face {0} is not good
    unit = Polytope([(0,), (1,)])
    pts = {"t": Polytope([(0,), (2,)]), "a": Polytope([(0,)]), "b": Polytope([(2,)]), "m": Polytope([(1,)])}
    order = [("a", "t"), ("b", "t"), ("m", "t")]
    maps = {e: AffineMap.identity(1) for e in order}
    F = ConvexFlag(pts, order, maps)
    assert is_hollow_flag(F).hollow
    pts["t"] = unit
    pts["b"] = Polytope([(1,)])
    pts["m"] = Polytope([(0,)])
    F = ConvexFlag(pts, order, maps)
    rep = is_hollow_flag(F)
    assert not rep.hollow and rep.violation["condition"] == 3


def test_json_round_trip():
    F = sunflower([(0, 0), (2, 0), (2, 1), (0, 1)])
    G = ConvexFlag.from_json(F.to_json())
    assert G.to_json() == F.to_json() and validate_flag(G)["valid"]


pts2 = st.lists(st.tuples(st.integers(0, 3), st.integers(0, 3)), min_size=1, max_size=5, unique=True)


@settings(max_examples=25, deadline=None)
@given(pts2, st.data())
def test_polytope_centerpoint_properties(points, data):
    weights = data.draw(st.lists(st.integers(1, 4), min_size=len(points), max_size=len(points)))
    P = Polytope(points)
    r = polytope_centerpoint(P, points, weights)
    L = {0: 1, 1: 2, 2: 4}[P.dim]
    assert closed_halfspace_weight(points, weights, r.point) * L >= sum(weights)
    on = [q for q in points if Polytope(list(r.face)).contains(q)]
    assert lattice_member(minimal_affine_lattice(on), r.point)


@settings(max_examples=20, deadline=None)
@given(st.lists(st.tuples(st.integers(0, 2), st.integers(0, 2)), min_size=1, max_size=4, unique=True), st.data())
def test_centrality_trace_matches_halfspace_oracle(points, data):
    P = Polytope([(0, 0), (2, 0), (0, 2), (2, 2)])
    F = from_polytope(P, lattice_points=points)
    weighted = [(point_of_polytope(F, P, q), 1) for q in points]
    I = integer_proper_points(F)
    q = data.draw(st.sampled_from(I))
    for y, val in centrality_trace(F, weighted, q):
        imgs = [F.image(p, y) for p, _ in weighted if F.leq(p.base, y)]
        expect = closed_halfspace_weight(imgs, [1] * len(imgs), F.image(q, y)) if imgs else 0
        assert val == expect


@settings(max_examples=40, deadline=None)
@given(st.lists(st.sampled_from(range(6)), min_size=3, max_size=3), st.lists(st.integers(0, 4), min_size=3, max_size=3))
def test_convex_combination_is_associative(idx, ks):
    if sum(ks) == 0 or ks[0] + ks[1] == 0:
        return
    F = binary_tree(1)
    I = integer_proper_points(F)
    pts = [I[i] for i in idx]
    a = [Fraction(k, sum(ks)) for k in ks]
    one = convex_combine(F, pts, a)
    s = a[0] + a[1]
    mid = convex_combine(F, pts[:2], [a[0] / s, a[1] / s])
    assert convex_combine(F, [mid, pts[2]], [s, a[2]]) == one
