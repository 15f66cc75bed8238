import itertools
import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from egzkit.balanced import HypothesisError
from egzkit.decomposition import (
    FlagDecomposition,
    Growth,
    _lattice_of_points,
    _lll,
    analyze_faces,
    cleanup,
    decompose,
    flag_helly_bridge,
    is_complete_element,
    lift_point,
    refine_complete,
    refine_good,
    single_node,
    slab_table,
    trivial_decomposition,
    validate_decomposition,
    wstr_verify,
)
from egzkit.exact_core import centered
from egzkit.flags import integer_proper_points
from egzkit.polytopes import Polytope
from egzkit.zerosum import FpMultiset, find_zero_sum


class Const:
    """g(k) = value for every k."""

    def __init__(self, value):
        self.value = value

    def __call__(self, k):
        return self.value

    def power(self, i, k):
        return k if i == 0 else self.value


def brute_best_slab(points, p, K, excluded):
    """Heaviest slab over linear parts outside span(excluded), by direct count."""
    k = len(next(iter(points)))
    span = set()
    for coefs in itertools.product(range(p), repeat=len(excluded)):
        span.add(tuple(sum(c * e[j] for c, e in zip(coefs, excluded)) % p for j in range(k)))
    best = 0
    for a in itertools.product(range(p), repeat=k):
        if a in span or not any(a):
            continue
        for c in range(p):
            m = sum(w for t, w in points.items() if abs(centered(sum(x * y for x, y in zip(a, t)) + c, p)) <= K)
            best = max(best, m)
    return best


P11 = 11
UNIFORM = {(a, b): 1 for a in range(P11) for b in range(P11)}


def test_growth_parse():
    g = Growth.parse("affine:8,64")
    assert g(1) == 72 and g.power(2, 1) == 8 * 72 + 64 and g.describe() == "affine:8,64"
    with pytest.raises(ValueError):
        Growth.parse("poly:2")


def test_trivial_decomposition_is_valid():
    f = {(1, 2): 3, (0, 0): 1}
    D = trivial_decomposition(f, 5, 2)
    rep = validate_decomposition(D, f)
    assert rep.valid and rep.sharpness == 0
    assert rep.gaps == {"n0": 4} and rep.reduced == {"n0": True}
    tab = analyze_faces(D, Fraction(1, 4))["n0"]
    assert len(tab.faces) == 1 and tab.faces[0].good and tab.faces[0].large


def test_condition_violations_are_located():
    f = {(1, 2): 3, (0, 0): 1}
    D = trivial_decomposition(f, 5, 2)
    D.nodes["n0"].f[(1, 2)] = 4
    rep = validate_decomposition(D, f)
    assert not rep.valid and rep.violations[0] == {"condition": 1, "point": [1, 2], "F": 4, "f": 3}
    D = single_node({(0,): 1, (3,): 1}, 11, 1, [(1,)], [0])
    D.nodes["n0"].poly = Polytope([(0,), (2,)])
    rep = validate_decomposition(D, {(0,): 1, (3,): 1})
    assert [v["condition"] for v in rep.violations] == [2]


def test_analyze_faces_examples():
    f = {(0, 0): 1, (1, 0): 1, (0, 1): 1}
    D = single_node(f, P11, 2, [(1, 0), (0, 1)], [0, 0])
    tab = analyze_faces(D, Fraction(1, 2))["n0"]
    # edges: 2 >= 3/2 and each vertex 1 <= 2/2; the triangle fails since an edge has 2 > 3/2
    assert [(fi.dim, fi.weight) for fi in tab.faces if fi.large] == [(1, 2)] * 3
    # bottom node carries the fiber of 1 only; the vertex {0} is supported by the top
    f = {(0,): 3, (1,): 3}
    D = refine_good(single_node(f, P11, 1, [(1,)], [0]), "n0", [(1,)], f).decomposition
    tab = {tuple(fi.vertices): fi for fi in analyze_faces(D, Fraction(1, 10))["n0"].faces}
    zero, one = tab[((0,),)], tab[((1,),)]
    assert zero.support_node == "n0" and not zero.good
    assert one.support_node == "n1" and one.good


def test_completeness_examples():
    D = single_node(UNIFORM, P11, 2, [(1, 0)], [0])
    v = is_complete_element(D, "n0", Const(3), Fraction(1, 4))
    assert v.complete and v.fraction == Fraction(7, 11)
    band = {(a, b % P11): 1 for a in range(P11) for b in (-1, 0, 1)}
    D = single_node(band, P11, 2, [(1, 0)], [0])
    v = is_complete_element(D, "n0", Const(3), Fraction(1, 4))
    assert not v.complete and v.fraction == 1 and v.functional == ((0, 1), 0)
    D = single_node({(0, 0): 2}, P11, 2, [(1, 0), (0, 1)], [0, 0])
    assert is_complete_element(D, "n0", Const(3), Fraction(1, 4)).vacuous
    D = trivial_decomposition({(0,): 1}, 7, 1)
    D.nodes["n0"].dirs = ()
    assert is_complete_element(D, "n0", Const(3), Fraction(1, 4)).vacuous


def test_completeness_matches_brute_force():
    rng = random.Random(3)
    p = 7
    for _ in range(8):
        f = {(rng.randrange(p), rng.randrange(p)): rng.randint(1, 3) for _ in range(rng.randint(2, 12))}
        D = single_node(f, p, 2, [(1, 2)], [0])
        v = is_complete_element(D, "n0", Const(1), Fraction(1, 3))
        best = brute_best_slab(f, p, 1, [(1, 2)])
        assert v.fraction == Fraction(best, sum(f.values()))
        assert v.complete == (Fraction(best, sum(f.values())) < Fraction(2, 3))


def test_completeness_requires_reduced_node():
    f = {(0,): 3, (1,): 3}
    D = refine_good(single_node(f, P11, 1, [(1,)], [0]), "n0", [(1,)], f).decomposition
    D.nodes["n0"].f = {}
    with pytest.raises(ValueError):
        is_complete_element(D, "n0", Const(3), Fraction(1, 4))


def test_slab_table_direct():
    rng = random.Random(2)
    p, K = 13, 2
    T = [(rng.randrange(p), rng.randrange(p)) for _ in range(15)]
    w = [rng.randint(1, 4) for _ in T]
    A = [(1, 0), (2, 5), (0, 7)]
    tab = slab_table(T, w, A, p, K)
    for i, a in enumerate(A):
        for c in range(p):
            direct = sum(wi for t, wi in zip(T, w) if abs(centered(a[0] * t[0] + a[1] * t[1] + c, p)) <= K)
            assert tab[i, c] == direct


def test_refine_good_examples():
    f = {(0, 1): 1, (3, 3): 2}
    D = trivial_decomposition(f, 5, 2)
    res = refine_good(D, "n0", [()], f)
    assert res.trace["noop"] and set(res.decomposition.nodes) == {"n0"}
    f = {(0,): 3, (1,): 3}
    res = refine_good(single_node(f, P11, 1, [(1,)], [0]), "n0", [(1,)], f)
    E = res.decomposition
    new = E.nodes["n1"]
    assert new.base == (1,) and new.dirs == () and new.f == {(1,): 3}
    assert E.order == [("n1", "n0")]
    assert validate_decomposition(E, f).valid
    with pytest.raises(ValueError):
        refine_good(E, "n0", [(2,)], f)


def test_refine_complete_examples():
    res = refine_complete(trivial_decomposition(UNIFORM, P11, 2), "n0", Const(3), Fraction(1, 27), UNIFORM)
    assert res.trace["l"] == 0
    band = {(a % P11, b): 1 for a in (-1, 0, 1) for b in range(P11)}
    res = refine_complete(trivial_decomposition(band, P11, 2), "n0", Const(3), Fraction(1, 27), band)
    assert res.trace["l"] == 1
    assert res.trace["functionals"][0]["linear"] == [1, 0] and res.trace["functionals"][0]["constant"] == 0
    E = res.decomposition
    hat = res.trace["new_nodes"]["n0"]
    assert E.nodes[hat].r == 1 and E.nodes[hat].M == ((1, 0),)
    assert validate_decomposition(E, band).valid
    assert is_complete_element(E, hat, Const(3), Fraction(1, 27)).complete
    with pytest.raises(HypothesisError):
        refine_complete(trivial_decomposition(band, P11, 2), "n0", Const(3), Fraction(1, 4))


def test_cleanup_examples():
    f = {(0,): 999, (1,): 1}
    D = single_node(f, 101, 1, [(1,)], [0], K=2)
    res = cleanup(D, Fraction(1, 10), f)
    assert [r[2] for r in res.trace["removed"]] == [1]
    assert res.decomposition.total() == 999 >= 900
    f = {(0,): 5, (1,): 5}
    D = single_node(f, 101, 1, [(1,)], [0])
    res = cleanup(D, Fraction(1, 10), f)
    assert res.trace["removed"] == [] and res.decomposition.nodes["n0"].f == D.nodes["n0"].f


def test_decompose_two_points():
    f = {(0,): 1, (1,): 1}
    res = decompose(f, 101, 1)
    assert res.terminated
    D = res.decomposition
    mins = [x for x in D.nodes if not any(a == x for _, a in D.order)]
    top = [x for x in D.nodes if not any(a == x for a, _ in D.order)]
    assert len(top) == 1 and D.nodes[top[0]].poly.vertices == ((0,), (1,))
    assert sorted(D.nodes[x].base for x in mins if not D.nodes[x].dirs) == [(0,), (1,)]
    c = res.conclusions
    assert c["sharp"] and c["completeness"]["holds"] and c["large_gap"]["holds"] and c["boundedness"]["holds"]
    assert Fraction(c["sharpness"]) <= 2 * res.delta0


def test_decompose_uniform_stays_trivial_for_modest_growth():
    res = decompose(UNIFORM, P11, 2, g=Growth(1, 1))
    assert res.terminated and len(res.steps) == 1 and res.steps[0]["case"] == 3
    assert list(res.decomposition.nodes) == ["n0"]
    res = decompose(UNIFORM, P11, 2)
    assert res.terminated and res.conclusions["completeness"]["holds"]


def test_decompose_boolean_square():
    f = {(a, b): P11 - 1 for a in (0, 1) for b in (0, 1)}
    res = decompose(f, P11, 2)
    D = res.decomposition
    assert res.terminated and validate_decomposition(D, f).valid
    top = [x for x in D.nodes if not any(a == x for a, _ in D.order)]
    assert sorted(D.nodes[top[0]].poly.vertices) == [(0, 0), (0, 1), (1, 0), (1, 1)]
    points = [x for x in D.nodes if D.nodes[x].dirs == ()]
    assert sorted(D.nodes[x].base for x in points) == sorted(f)
    assert res.conclusions["good_large_monotonicity_violations"] == []


def test_decompose_budget_reports_nontermination():
    f = {(a, b): P11 - 1 for a in (0, 1) for b in (0, 1)}
    res = decompose(f, P11, 2, max_steps=2)
    assert not res.terminated and "nontermination" in res.conclusions


def test_decomposition_json_round_trip():
    f = {(0,): 1, (1,): 1}
    D = decompose(f, 13, 1).decomposition
    E = FlagDecomposition.from_json(D.to_json())
    assert E.to_json() == D.to_json()
    assert validate_decomposition(E, f).valid


def test_lattice_of_points():
    o, B, spread = _lattice_of_points([(0, 0), (2, 2), (4, 4)])
    assert B in ([(1, 1)], [(-1, -1)]) and o == (2, 2) and spread == 4
    o, B, spread = _lattice_of_points([(1, 3)])
    assert o == (1, 3) and B == [] and spread == 0
    assert sorted(map(abs, _lll([(1, 0), (7, 1)])[1])) == [0, 1]


def test_bridge_examples():
    f = {(0, 0): 4, (1, 0): 4, (0, 1): 4, (1, 1): 4, (2, 0): 4}
    D = decompose(f, 5, 2).decomposition
    pts = integer_proper_points(D.flag())
    assert len(pts) >= 5
    for S in itertools.islice(itertools.combinations(pts, 5), 40):
        out = flag_helly_bridge(D, S)
        assert out.point is not None and sum(out.alphas) == 5 and max(out.alphas) < 5
        flag = D.flag()
        assert flag.in_lattice(out.point) and flag.in_omega(out.point)
    D = decompose({(0,): 1, (1,): 1}, 7, 1).decomposition
    pts = integer_proper_points(D.flag())
    out = flag_helly_bridge(D, pts[:2])
    X = FpMultiset(7, 1, tuple((w, 6) for w in sorted(set(out.lifts))))
    assert (out.point is None) == (find_zero_sum(X) is None)


def test_lift_point_is_preimage():
    D = decompose({(a, b): 1 for a in range(3) for b in range(3)}, 7, 2).decomposition
    for q in integer_proper_points(D.flag())[:20]:
        w = lift_point(D, q)
        assert D.lift(q.base, w) == tuple(int(a) for a in q.coords)


def test_wstr_examples():
    S = [(0,), (1,)]
    D = decompose({v: 6 for v in S}, 7, 1).decomposition
    out = wstr_verify(S, D)
    assert out["accepted"] and out["oracle"] is True
    S = [(0,), (1,), (2,)]
    D = decompose({v: 6 for v in S}, 7, 1).decomposition
    out = wstr_verify(S, D)
    assert not out["accepted"] and not out["hollow"]
    assert find_zero_sum(FpMultiset(7, 1, tuple((v, 6) for v in S))) is not None
    S = [(a, b) for a in (0, 1) for b in (0, 1)]
    D = decompose({v: 4 for v in S}, 5, 2).decomposition
    out = wstr_verify(S, D)
    assert out["accepted"] and out["oracle"] is True


@settings(max_examples=25, deadline=None)
@given(st.sampled_from([5, 7, 11]), st.integers(1, 2), st.data())
def test_decompose_closure_and_conclusions(p, d, data):
    support = data.draw(st.sets(st.tuples(*[st.integers(0, p - 1)] * d), min_size=1, max_size=10))
    f = {v: data.draw(st.integers(1, p - 1)) for v in sorted(support)}
    res = decompose(f, p, d)
    assert res.terminated
    c = res.conclusions
    assert c["valid"] and c["sharp"] and c["completeness"]["holds"] and c["large_gap"]["holds"]
    assert c["good_large_monotonicity_violations"] == []
    rep = validate_decomposition(res.decomposition, f)
    for y, x in res.decomposition.order:
        assert rep.levels[y] >= rep.levels[x]


@settings(max_examples=25, deadline=None)
@given(st.sampled_from([7, 11]), st.data())
def test_refinements_preserve_validity(p, data):
    support = data.draw(st.sets(st.tuples(st.integers(0, p - 1), st.integers(0, p - 1)), min_size=2, max_size=12))
    f = {v: data.draw(st.integers(1, 3)) for v in sorted(support)}
    D = single_node(f, p, 2, [(1, 0)], [0])
    for fc in D.nodes["n0"].poly.faces:
        verts = D.nodes["n0"].poly.face_vertices(fc)
        E = refine_good(D, "n0", verts, f).decomposition
        assert validate_decomposition(E, f).valid
    total = sum(f.values())
    delta = Fraction(1, 3 ** 4)
    E = refine_complete(D, "n0", Const(1), delta, f).decomposition
    assert validate_decomposition(E, f).valid
    assert E.total() >= total - sum(3 ** i for i in (1, 2)) * delta * total
