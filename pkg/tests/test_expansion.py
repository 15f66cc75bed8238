import random
from decimal import Decimal
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from egzkit.balanced import HypothesisError
from egzkit.exact_core import DimensionError, FpLinearFunctional, centered
from egzkit.expansion import (
    PairSequence,
    _short_dependences,
    best_slabs,
    expand_step,
    loomis_whitney_check,
    thick_zero_sum,
    thickness_check,
    thickness_profile,
    thin_zero_sum,
    tube_zero_sum,
)
from egzkit.zerosum import FpMultiset, find_zero_sum


def ms(p, vecs):
    return FpMultiset.from_vectors(p, [tuple(v) for v in vecs])


def test_thickness_examples():
    band = {(a % 11, b): 1 for a in range(-2, 3) for b in range(11)}
    v1 = FpLinearFunctional((1, 0), 0, 11)
    out = thickness_check(band, v1, 2, Fraction(1, 4))
    assert out.thin and out.fraction == 1
    uniform = ms(11, [(i,) for i in range(11)])
    out = thickness_check(uniform, FpLinearFunctional((1,), 0, 11), 2, Fraction(1, 4))
    assert not out.thin and out.fraction == Fraction(5, 11)
    assert thickness_check({}, v1, 2, Fraction(1, 4)).fraction == 1
    prof = thickness_profile(band, [v1, FpLinearFunctional((0, 1), 0, 11)], 2, Fraction(1, 4))
    assert [v.verdict for _, v in prof.entries] == ["thin", "thick"]


def test_best_slabs_matches_direct_count():
    rng = random.Random(5)
    p, K = 11, 2
    pts = [(rng.randrange(p), rng.randrange(p)) for _ in range(20)]
    ws = [rng.randint(1, 3) for _ in pts]
    parts = [(1, 0), (0, 1), (3, 7)]
    masses, consts = best_slabs(pts, ws, parts, p, K)
    for a, mass, c in zip(parts, masses, consts):
        direct = max(sum(w for q, w in zip(pts, ws)
                         if abs(centered(a[0] * q[0] + a[1] * q[1] + c0, p)) <= K) for c0 in range(p))
        assert mass == direct
        xi = FpLinearFunctional(a, int(c), p)
        assert sum(w for q, w in zip(pts, ws) if abs(centered(xi(q), p)) <= K) == mass


def test_loomis_whitney_examples():
    cube = [(a, b, c) for a in (0, 1) for b in (0, 1) for c in (0, 1)]
    out = loomis_whitney_check(cube)
    assert (out["lhs"], out["rhs"], out["projection_sizes"]) == (64, 64, [4, 4, 4])
    out = loomis_whitney_check([(1, 0, 0), (0, 1, 0), (0, 0, 1)])
    assert (out["lhs"], out["rhs"]) == (9, 27)
    out = loomis_whitney_check([(2, 5)])
    assert (out["lhs"], out["rhs"]) == (1, 1)
    with pytest.raises(DimensionError):
        loomis_whitney_check([(1,)])


def test_expand_step_examples():
    st1 = expand_step({(0,)}, [(1,)], "basis", 7)
    assert st1.element == (1,) and st1.size_after == 2
    st2 = expand_step({(0, 0), (1, 0)}, [(1, 0), (0, 1)], "basis", 7)
    # e1 gives 3 points, e2 gives 4; only e2 clears (sqrt 2 + 1/6)^2 ~ 2.49
    assert st2.element == (0, 1) and st2.size_after == 4
    assert st2.bound > Decimal("2.49") and st2.bound < Decimal("2.50")
    st3 = expand_step({(a,) for a in range(5)}, [(1,), (2,)], "slab", 5)
    assert st3.size_after == st3.size_before == 5
    with pytest.raises(HypothesisError):
        expand_step({(0, 0)}, [(1, 0), (2, 0)], "basis", 7)
    with pytest.raises(HypothesisError):
        expand_step({(a,) for a in range(4)}, [(1,)], "basis", 7)


def test_thick_examples():
    X = ms(5, [(a,) for a in range(5)] * 2)
    res = thick_zero_sum(X, 2, Fraction(1, 4))
    assert res.certificate is not None and res.certificate.verify(X)
    assert find_zero_sum(X) is not None
    res = thick_zero_sum(ms(5, [(0,)] * 6), 2, Fraction(1, 4))
    assert res.certificate.chosen == (((0,), 5),)
    X = ms(3, [(0,), (0,), (1,), (1,)])
    res = thick_zero_sum(X, 1, Fraction(1, 4))
    assert res.certificate is None and res.trace["status"] == "stall"
    assert find_zero_sum(X) is None


def test_thin_examples():
    X = ms(11, [(-1 % 11,)] * 8 + [(0,)] * 8 + [(1,)] * 8)
    res = thin_zero_sum(X, 1, Fraction(1, 11))
    assert res.certificate is not None and res.certificate.verify(X)
    assert dict(res.certificate.chosen) == {(10,): 3, (0,): 5, (1,): 3}
    X = ms(11, [(10,)] * 12 + [(1,)] * 12)
    assert thin_zero_sum(X, 1, Fraction(1, 11)).certificate.chosen == (((1,), 11),)
    assert thin_zero_sum(ms(11, [(0,)] * 11), 1, Fraction(1, 11)).certificate.chosen == (((0,), 11),)
    with pytest.raises(DimensionError):
        thin_zero_sum(ms(5, [(0, 0, 0, 0)] * 5), 1, Fraction(1, 4))
    with pytest.raises(HypothesisError):
        thin_zero_sum(ms(11, [(3,)] * 11), 1, Fraction(1, 4))


def test_tube_examples():
    X = ms(7, [(a, y) for a in (0, 1) for y in range(7)] * 3)
    res = tube_zero_sum(X, 1, Fraction(1, 4))
    assert res.certificate is not None and res.certificate.verify(X)
    assert find_zero_sum(X) is not None
    X = ms(7, [(0, y) for y in range(7)] * 2)
    res = tube_zero_sum(X, 1, Fraction(1, 4))
    assert res.trace["reduced_to_fiber"] == 0 and res.certificate.verify(X)
    X = ms(5, [(a, b) for a in (0, 1) for b in (0, 1)] * 4)
    assert tube_zero_sum(X, 1, Fraction(1, 4)).certificate is None
    assert find_zero_sum(X) is None
    with pytest.raises(DimensionError):
        tube_zero_sum(ms(5, [(0,)] * 5), 1, Fraction(1, 4))


def test_tube_interior_route_uses_dependence_pairs():
    rng = random.Random(11)
    hits = 0
    for _ in range(40):
        X = ms(7, [(rng.choice((6, 0, 1)), rng.randrange(7)) for _ in range(30)])
        res = tube_zero_sum(X, 1, Fraction(1, 4))
        if res.certificate is not None and "steps" in res.trace and res.trace["steps"]:
            assert res.certificate.verify(X)
            hits += 1
    assert hits > 0


def test_short_dependences():
    lams = _short_dependences([-1, 0, 1], 4)
    assert lams[0] == (-1, 2, -1)
    for lam in lams:
        assert sum(lam) == 0 and -lam[0] + lam[2] == 0 and sum(map(abs, lam)) <= 4
    # brute force over the box
    brute = {(a, b, -a - b) for a in range(-4, 5) for b in range(-4, 5)
             if -a + (-a - b) == 0 and (a or b) and abs(a) + abs(b) + abs(a + b) <= 4}
    assert set(lams) == brute


@settings(max_examples=40, deadline=None)
@given(st.sampled_from([5, 7]), st.lists(st.tuples(st.integers(0, 6), st.integers(0, 6)), min_size=2, max_size=8))
def test_pair_sequence_is_minkowski_sum(p, raw):
    draws = [tuple(a % p for a in v) for v in raw]
    seq = PairSequence(p, 2)
    for i in range(0, len(draws) - 1, 2):
        seq.add(i, i + 1, draws)
        assert seq.Y == seq.minkowski(draws)
    for y, idx in seq.reps.items():
        assert tuple(sum(draws[i][j] for i in idx) % p for j in range(2)) == y
        assert len(idx) == len(seq.pairs)


@settings(max_examples=60, deadline=None)
@given(st.sampled_from([11, 13]), st.integers(2, 3), st.data())
def test_basis_expansion_bound_holds(p, d, data):
    size = data.draw(st.integers(1, 12))
    Y = data.draw(st.sets(st.tuples(*[st.integers(0, p - 1)] * d), min_size=1, max_size=size))
    if 2 ** d * len(Y) > p ** d:
        return
    E = [tuple(int(i == j) for j in range(d)) for i in range(d)]
    step = expand_step(Y, E, "basis", p)
    assert step.size_after >= step.bound


@settings(max_examples=60, deadline=None)
@given(st.sets(st.tuples(st.integers(-3, 3), st.integers(-3, 3), st.integers(-3, 3)), min_size=1, max_size=20))
def test_loomis_whitney_property(A):
    assert loomis_whitney_check(A)["holds"]


@settings(max_examples=30, deadline=None)
@given(st.sampled_from([5, 7]), st.integers(1, 2), st.data())
def test_pipeline_certificates_verify(p, d, data):
    n = data.draw(st.integers(p, 3 * p))
    vecs = data.draw(st.lists(st.tuples(*[st.integers(-1, 1)] * d), min_size=n, max_size=n))
    X = ms(p, [tuple(a % p for a in v) for v in vecs])
    oracle = find_zero_sum(X)
    runs = [thick_zero_sum(X, 1, Fraction(1, 4)), thin_zero_sum(X, 1, Fraction(1, 4))]
    if d == 2:
        runs.append(tube_zero_sum(X, 1, Fraction(1, 4)))
    for res in runs:
        if res.certificate is not None:
            assert res.certificate.verify(X) and oracle is not None
        if oracle is None:
            assert res.certificate is None
