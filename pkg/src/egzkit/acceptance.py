"""Acceptance criteria as runnable checks.

Each check returns (passed, detail). Oracles are brute force and written
inline so they share no code path with the routine under test.
"""
import itertools
import math
import random
import time
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import comb

from .balanced import HypothesisError, WeightedPointSet, check_balanced, integer_balanced, max_centrality, \
    rational_balanced
from .decomposition import decompose, flag_helly_bridge, wstr_verify
from .exact_core import DimensionError, lattice_member, lp_maximize, minimal_affine_lattice
from .expansion import expand_step, loomis_whitney_check, thick_zero_sum, thin_zero_sum, tube_zero_sum
from .flags import binary_tree, from_polytope, helly_constants, integer_proper_points, \
    interval_with_duplicated_endpoints, polytope_centerpoint
from .polytopes import Polytope, classify_hollow_polygon, crit_check, is_hollow, product, search_hollow
from .zerosum import FpMultiset, boolean_cube_multiset, egz_constant, find_zero_sum, hollow_to_weak_egz, \
    weak_egz_check, weak_egz_constant

BRIDGE_SUBSETS = 400  # 5-subsets checked per decomposition in criterion 17


@dataclass(frozen=True)
class Criterion:
    number: int
    title: str
    limit: float  # seconds
    check: object


# ------------------------------------------------------------ brute oracles

def _has_zero_sum(vectors, n):
    """Some n of the vectors (by position) sum to zero mod n."""
    d = len(vectors[0])
    return any(all(sum(v[j] for v in S) % n == 0 for j in range(d))
               for S in itertools.combinations(vectors, n))


def _weak_ok(vectors, p):
    """The only length-p zero combinations of the set are p copies of one vector."""
    d = len(vectors[0])
    for S in itertools.combinations_with_replacement(vectors, p):
        if len(set(S)) > 1 and all(sum(v[j] for v in S) % p == 0 for j in range(d)):
            return False
    return True


def _min_closed_weight(points, weights, c):
    """Least weight of a closed halfspace with c on its boundary, by one LP per subset."""
    d = len(c)
    us = [tuple(Fraction(a) - Fraction(b) for a, b in zip(q, c)) for q in points]
    best = Fraction(0)
    idx = range(len(points))
    for r in range(1, len(points) + 1):
        for N in itertools.combinations(idx, r):
            w = sum(weights[i] for i in N)
            if w <= best:
                continue
            A, b = [], []
            for i in idx:
                row = list(us[i]) + [-a for a in us[i]]
                if i in N:
                    A.append(row)
                    b.append(-1)
                else:
                    A.append([-a for a in row])
                    b.append(0)
            if lp_maximize([0] * (2 * d), A, b).status != "infeasible":
                best = w
    return sum(weights) - best


def _is_trapezoid(vertices):
    """Some pair of opposite sides of the convex quadrilateral is parallel.

    Diagonals cross and are never parallel, so testing all three pairings works.
    """
    a, b, c, d = vertices
    for (p, q), (r, s) in (((a, b), (c, d)), ((a, c), (b, d)), ((a, d), (b, c))):
        u, v = (q[0] - p[0], q[1] - p[1]), (s[0] - r[0], s[1] - r[1])
        if u[0] * v[1] == u[1] * v[0]:
            return True
    return False


def _cyclic(vertices):
    cx = sum(float(v[0]) for v in vertices) / len(vertices)
    cy = sum(float(v[1]) for v in vertices) / len(vertices)
    return sorted(vertices, key=lambda v: math.atan2(float(v[1]) - cy, float(v[0]) - cx))


# ------------------------------------------------------------ shared work

@lru_cache(maxsize=None)
def _search2(k, jobs=1):
    return search_hollow(2, 3, k, jobs=jobs)


@lru_cache(maxsize=None)
def _search3(k, jobs=1):
    return search_hollow(3, 2, k, jobs=jobs)


# ------------------------------------------------------------ criteria

def c1(jobs):
    got = {}
    for n in (2, 3, 4, 5, 7):
        s, W = egz_constant(n, 1)
        vecs = [v for v, m in W.elements for _ in range(m)]
        got[n] = s
        if s != 2 * n - 1 or len(vecs) != s - 1 or _has_zero_sum(vecs, n):
            return False, f"n={n}: s={s}"
    return True, f"s(Z_n) = {got}"


def c2(jobs):
    got = {}
    for n in (2, 3):
        s, W = egz_constant(n, 2)
        vecs = [v for v, m in W.elements for _ in range(m)]
        got[n] = s
        if s != 4 * n - 3 or len(vecs) != s - 1 or _has_zero_sum(vecs, n):
            return False, f"n={n}: s={s}"
    return True, f"s(Z_n^2) = {got}"


def c3(jobs):
    got = {}
    for d in (1, 2, 3):
        s, W = egz_constant(2, d)
        vecs = [v for v, m in W.elements for _ in range(m)]
        got[d] = s
        if s != 2 ** d + 1 or len(vecs) != s - 1 or _has_zero_sum(vecs, 2):
            return False, f"d={d}: s={s}"
    return True, f"s(Z_2^d) = {got}"


def c4(jobs):
    cases = [(p, 1, 2) for p in (3, 5, 7)] + [(p, 2, 4) for p in (3, 5, 7)] + [(2, 2, 4), (2, 3, 8)]
    for p, d, expect in cases:
        w, S = weak_egz_constant(p, d)
        vecs = [tuple(v.coords) for v in S]
        if w != expect or len(vecs) != w or not _weak_ok(vecs, p) or weak_egz_check(S, p) is not None:
            return False, f"w(F_{p}^{d}) = {w}, expected {expect}"
        if w > comb(2 * d - 1, d) + 1:
            return False, f"w(F_{p}^{d}) = {w} above the binomial bound"
    return True, f"{len(cases)} values match, all within C(2d-1,d)+1"


def c5(jobs):
    for n, d in ((3, 1), (3, 2), (5, 2)):
        X = boolean_cube_multiset(n, d)
        vecs = [v for v, m in X.elements for _ in range(m)]
        if len(vecs) != 2 ** d * (n - 1) or find_zero_sum(X) is not None:
            return False, f"(n,d)=({n},{d}): zero-sum found"
        # brute force over multiplicity vectors
        cube = [v for v, _ in X.elements]
        for counts in itertools.product(range(n), repeat=len(cube)):
            if sum(counts) == n and all(sum(c * v[j] for c, v in zip(counts, cube)) % n == 0 for j in range(d)):
                return False, f"(n,d)=({n},{d}): brute force found a zero-sum"
    return True, "boolean cube witnesses have no zero-sum for (3,1),(3,2),(5,2)"


def c6(jobs):
    found = {}
    for k in range(3, 9):
        r = _search2(k, jobs)
        if not r.complete:
            return False, f"k={k}: search incomplete"
        found[k] = r.polytopes
    big = sum(len(found[k]) for k in range(5, 9))
    quads = found[4]
    classes = [classify_hollow_polygon(P)["class"] for P in quads]
    trap = all(c == "Trapezoid" for c in classes) and all(_is_trapezoid(list(P.vertices)) for P in quads)
    hollow = all(is_hollow(P).hollow for k in (3, 4) for P in found[k])
    L2 = max(k for k in found if found[k])
    ok = big == 0 and trap and hollow and L2 == 4
    return ok, f"{len(quads)} hollow quadrilaterals, all Trapezoid={trap}; >=5 vertices: {big}; L(2)={L2}"


def c7(jobs):
    r9, r10 = _search3(9, jobs), _search3(10, jobs)
    hollow = all(is_hollow(P).hollow and len(P.vertices) == 9 for P in r9.polytopes)
    ok = len(r9.polytopes) >= 1 and hollow and r10.complete and not r10.polytopes
    return ok, (f"box 2: {len(r9.polytopes)} hollow 9-vertex polytopes, {len(r10.polytopes)} with 10 "
                f"(evidence only, box-bounded)")


def _area2(P):
    vs = _cyclic(list(P.vertices))
    return abs(sum(vs[i][0] * vs[(i + 1) % len(vs)][1] - vs[(i + 1) % len(vs)][0] * vs[i][1]
                   for i in range(len(vs))))


def c8(jobs):
    sq = Polytope([(0, 0), (1, 0), (0, 1), (1, 1)])
    Q = product(sq, sq)
    if not (len(Q.vertices) == 16 and is_hollow(Q).hollow):
        return False, "square x square is not hollow"
    # best found: largest vertex count, then largest area, then first found
    quads = sorted(_search2(4, jobs).polytopes, key=lambda P: -_area2(P))
    A, B = quads[0], quads[1]
    R = product(A, B)
    ok = len(R.vertices) <= 16 and is_hollow(R).hollow
    return ok, f"square^2 hollow; product of quads {[tuple(map(int, v)) for v in A.vertices]} x second best hollow={ok}"


def c9(jobs):
    polys = [P for k in (3, 4) for P in _search2(k, jobs).polytopes] + list(_search3(9, jobs).polytopes)
    bad = 0
    for P in polys:
        for p in (7, 11):
            vecs, ok = hollow_to_weak_egz(P, p)
            if not ok or not _weak_ok([tuple(v.coords) for v in vecs], p):
                bad += 1
    return bad == 0, f"{len(polys)} polytopes x p in {{7,11}}: {bad} failures"


def c10(jobs):
    sq = Polytope([(0, 0), (1, 0), (0, 1), (1, 1)])
    got = {
        "interval": helly_constants(interval_with_duplicated_endpoints()).L,
        "binary_tree(1)": helly_constants(binary_tree(1)).L,
        "binary_tree(2)": helly_constants(binary_tree(2)).L,
        "square": helly_constants(from_polytope(sq)).L,
    }
    expect = {"interval": 2, "binary_tree(1)": 4, "binary_tree(2)": 8, "square": 4}
    return got == expect, f"L = {got}"


def c11(jobs):
    rng = random.Random(11)
    done = bad = 0
    while done < 100:
        pts = list({(rng.randint(-3, 3), rng.randint(-3, 3)) for _ in range(rng.randint(1, 6))})
        P = Polytope(pts)
        # q: random convex combination of the vertices with small denominator
        den = rng.randint(1, 3)
        ks = [rng.randint(0, den) for _ in P.vertices]
        if not sum(ks):
            continue
        q = tuple(sum(Fraction(k) * v[j] for k, v in zip(ks, P.vertices)) / sum(ks) for j in range(2))
        r = crit_check(P, q, range(1, 1))
        window = range(r.n0 + 1, r.n0 + 51)
        r = crit_check(P, q, window)
        for n, alpha in r.oracle.items():
            if sum(alpha) != n or min(alpha) < 0 or any(
                    sum(a * v[j] for a, v in zip(alpha, P.vertices)) != n * q[j] for j in range(2)):
                bad += 1
        always = all(r.cond2[n] for n in window)
        if r.cond1 != always:
            bad += 1
        done += 1
    return bad == 0, f"100 polytopes, window of 50 above n0: {bad} discrepancies"


def c12(jobs):
    rng = random.Random(12)
    done = tried = bad = 0
    while done < 200:
        tried += 1
        d = rng.choice([1, 2])
        pts = list({tuple(rng.randint(-3, 3) for _ in range(d)) for _ in range(rng.randint(d + 1, 6))})
        S = WeightedPointSet(pts, [rng.randint(1, 4) for _ in pts])
        c = tuple(rng.randint(-1, 1) for _ in range(d))
        eps = Fraction(1, rng.choice([2, 3, 4]))
        try:
            theta = max_centrality(S, c)
            if theta == 0:
                continue
            beta = rational_balanced(S, c, theta)
            n0 = integer_balanced(S, c, theta, eps, 10 ** 12, beta=beta).n0
        except (HypothesisError, DimensionError):
            continue
        start = int(n0) + 1
        for n in range(start, start + 200):
            out = integer_balanced(S, c, theta, eps, n, beta=beta)
            a = out.alphas
            # balance equations checked directly
            ok = sum(a) == n and min(a) > 0 and all(
                sum(x * q[j] for x, q in zip(a, S.points)) == n * c[j] for j in range(d))
            ok = ok and all(x <= (1 + eps) * n * w / (theta * S.total) for x, w in zip(a, S.weights))
            ok = ok and check_balanced(S, c, a, n, theta, eps, out.mu)
            bad += not ok
        done += 1
    return bad == 0, f"200 instances ({tried} drawn) x 200 values of n: {bad} violations"


def c13(jobs):
    rng = random.Random(13)
    bad = 0
    for i in range(100):
        d = 1 if i < 30 else 2
        pts = sorted({tuple(rng.randint(0, 3) for _ in range(d)) for _ in range(rng.randint(1, 6))})
        ws = [rng.randint(1, 4) for _ in pts]
        P = Polytope(pts)
        r = polytope_centerpoint(P, pts, ws)
        L = {0: 1, 1: 2, 2: 4}[P.dim]
        central = _min_closed_weight(pts, ws, r.point) * L >= sum(ws)
        face = Polytope(list(r.face))
        on = [q for q in pts if face.contains(q)]
        member = P.contains(r.point) and lattice_member(minimal_affine_lattice(on), r.point)
        bad += not (central and member)
    return bad == 0, f"100 instances (30 in d=1, 70 in d=2): {bad} failures"


def c14(jobs):
    rng = random.Random(14)
    lw_bad = lem_bad = 0
    for _ in range(1000):
        p, d = rng.choice([11, 13]), rng.choice([2, 3])
        A = {tuple(rng.randrange(p) for _ in range(d)) for _ in range(rng.randint(1, 60))}
        out = loomis_whitney_check(A)
        sizes = [len({v[:i] + v[i + 1:] for v in A}) for i in range(d)]
        rhs = 1
        for s in sizes:
            rhs *= s
        lw_bad += not (out["holds"] and len(A) ** (d - 1) <= rhs)
    for _ in range(1000):
        p, d = rng.choice([11, 13]), rng.choice([2, 3])
        while True:
            E = [tuple(rng.randrange(p) for _ in range(d)) for _ in range(d)]
            if _det_mod(E, p):
                break
        cap = (p // 2) ** d
        Y = {tuple(rng.randrange(p) for _ in range(d)) for _ in range(rng.randint(1, min(cap, 80)))}
        st = expand_step(Y, E, "basis", p)
        best = max(len(Y | {tuple((a + b) % p for a, b in zip(y, e)) for y in Y}) for e in E)
        # (x + 1/(3d))^d <= |Y + {0,e}| with x^d = |Y|, as (|Y'|^(1/d) - |Y|^(1/d)) >= 1/(3d)
        lem_bad += not (st.size_after == best and best ** (1 / d) - len(Y) ** (1 / d) >= 1 / (3 * d) - 1e-12)
    return lw_bad == 0 and lem_bad == 0, f"1000 + 1000 instances: {lw_bad} LW, {lem_bad} growth violations"


def _det_mod(E, p):
    if len(E) == 2:
        return (E[0][0] * E[1][1] - E[0][1] * E[1][0]) % p
    a, b, c = E
    return (a[0] * (b[1] * c[2] - b[2] * c[1]) - a[1] * (b[0] * c[2] - b[2] * c[0])
            + a[2] * (b[0] * c[1] - b[1] * c[0])) % p


def c15(jobs):
    rng = random.Random(15)
    pipes = {"thick": thick_zero_sum, "thin": thin_zero_sum, "tube": tube_zero_sum}
    stats = {k: {"runs": 0, "cert": 0, "stall": 0, "false": 0, "impossible": 0, "absent": 0} for k in pipes}
    for name, fn in pipes.items():
        while stats[name]["runs"] < 200:
            p = rng.choice([5, 7, 11])
            d = 2 if name == "tube" else rng.choice([1, 2])
            n = rng.randint(p, (2 ** d + 1) * p)
            spread = rng.choice([1, 2, p // 2])
            vecs = [tuple(rng.randint(-spread, spread) % p for _ in range(d)) for _ in range(n)]
            X = FpMultiset.from_vectors(p, vecs)
            oracle = find_zero_sum(X)
            res = fn(X, spread, Fraction(1, 4))
            s = stats[name]
            s["runs"] += 1
            s["absent"] += oracle is None
            if res.certificate is not None:
                s["cert"] += 1
                if not res.certificate.verify(X) or not _cert_sums_to_zero(res.certificate, X):
                    s["false"] += 1
                if oracle is None:
                    s["impossible"] += 1
            elif oracle is not None:
                s["stall"] += 1
    ok = all(s["false"] == 0 and s["impossible"] == 0 for s in stats.values())
    rates = ", ".join(f"{k} stall {s['stall']}/{s['runs']} (oracle absent on {s['absent']})" for k, s in stats.items())
    return ok, f"0 false certificates required; {rates}"


def _cert_sums_to_zero(cert, X):
    avail = dict(X.elements)
    p, d = X.n, X.dim
    if sum(m for _, m in cert.chosen) != p:
        return False
    if any(m > avail.get(v, 0) for v, m in cert.chosen):
        return False
    return all(sum(m * v[j] for v, m in cert.chosen) % p == 0 for j in range(d))


def _corpus(count, seed):
    rng = random.Random(seed)
    for _ in range(count):
        p = rng.choice([5, 7, 11, 13, 31, 101])
        d = rng.choice([1, 2])
        n = rng.randint(1, min(64, p ** d))
        f = {}
        while len(f) < n:
            f[tuple(rng.randrange(p) for _ in range(d))] = rng.randint(1, p - 1)
        yield f, p, d


def c16(jobs):
    fails = []
    steps = 0
    for i, (f, p, d) in enumerate(_corpus(100, 16)):
        res = decompose(f, p, d, check=True)
        c = res.conclusions
        steps = max(steps, len(res.steps))
        ok = (res.terminated and c["valid"] and c["sharp"] and c["boundedness"]["holds"]
              and c["completeness"]["holds"] and c["large_gap"]["holds"])
        if not ok:
            fails.append(i)
    return not fails, f"100 instances, max steps {steps}, failing: {fails or 'none'}"


def c17(jobs):
    rng = random.Random(17)
    checked = vacuous = bad = 0
    for _ in range(50):
        f = {}
        for _ in range(rng.randint(2, 10)):
            f[(rng.randrange(5), rng.randrange(5))] = rng.randint(1, 4)
        D = decompose(f, 5, 2).decomposition
        flag = D.flag()
        pts = integer_proper_points(flag)
        if len(pts) < 5:
            vacuous += 1
            continue
        subsets = list(itertools.combinations(range(len(pts)), 5)) if comb(len(pts), 5) <= BRIDGE_SUBSETS else [
            tuple(sorted(rng.sample(range(len(pts)), 5))) for _ in range(BRIDGE_SUBSETS)]
        for idx in subsets:
            out = flag_helly_bridge(D, [pts[i] for i in idx])
            checked += 1
            if out.point is None or sum(out.alphas) != 5 or max(out.alphas) >= 5 or not (
                    flag.in_lattice(out.point) and flag.in_omega(out.point)):
                bad += 1
    return bad == 0, (f"50 multisets, {checked} 5-subsets (<= {BRIDGE_SUBSETS} per flag), "
                      f"{vacuous} flags with < 5 points, {bad} failures")


def c18(jobs):
    out = []
    for S, p, d in (([(0,), (1,)], 7, 1), ([(0, 0), (1, 0), (0, 1), (1, 1)], 5, 2)):
        D = decompose({v: p - 1 for v in S}, p, d).decomposition
        r = wstr_verify(S, D)
        # the certificate says the S-multiset with p-1 copies each has no zero-sum
        brute = not _has_zero_sum([v for v in S for _ in range(p - 1)], p)
        out.append(r["accepted"] and r["oracle"] is True and brute)
    return all(out), f"two points in F_7: {out[0]}; boolean square in F_5^2: {out[1]}"


CRITERIA = [
    Criterion(1, "s(Z_n) = 2n-1, n in {2,3,4,5,7}", 10, c1),
    Criterion(2, "s(Z_n^2) = 4n-3, n in {2,3}", 120, c2),
    Criterion(3, "s(Z_2^d) = 2^d+1, d <= 3", 60, c3),
    Criterion(4, "weak EGZ constants and binomial bound", 120, c4),
    Criterion(5, "boolean cube lower bounds", 60, c5),
    Criterion(6, "hollow polygons in box 3, L(2) = 4", 300, c6),
    Criterion(7, "hollow 3-polytopes in box 2 (evidence)", 1800, c7),
    Criterion(8, "products of hollow polytopes", 120, c8),
    Criterion(9, "hollow polytopes give weak EGZ sets", 120, c9),
    Criterion(10, "Helly constants of example flags", 60, c10),
    Criterion(11, "crit_check equivalence", 300, c11),
    Criterion(12, "integer balanced coefficients", 300, c12),
    Criterion(13, "polytope centerpoints", 300, c13),
    Criterion(14, "Loomis-Whitney and basis growth guards", 300, c14),
    Criterion(15, "pipelines vs zero-sum oracle", 900, c15),
    Criterion(16, "decompose corpus", 1200, c16),
    Criterion(17, "Helly bridge on F_5^2", 300, c17),
    Criterion(18, "hollow-flag certificate round trip", 120, c18),
]


def run_criterion(crit: Criterion, jobs=1) -> dict:
    t = time.perf_counter()
    try:
        passed, detail = crit.check(jobs)
    except Exception as e:  # a crash is a failed criterion, reported as such
        passed, detail = False, f"{type(e).__name__}: {e}"
    seconds = time.perf_counter() - t
    if seconds > crit.limit:
        passed, detail = False, f"{detail}; over the {crit.limit:.0f} s budget"
    return {"number": crit.number, "title": crit.title, "passed": bool(passed),
            "seconds": seconds, "detail": detail}
