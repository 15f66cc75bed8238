"""Slab thickness, set expansion steps and the zero-sum pipelines built on them.

Three pipelines look for p elements of a multiset X over F_p^d with zero sum:

* thick: grow two Minkowski sums of pairs until together they cover F_p^d,
  then finish with arbitrary remaining elements;
* thin: X sits in a small box, so a central lattice point of its hull and a
  balanced integer combination give the zero sum directly;
* tube (d = 2): one coordinate is small. The projection is balanced first and
  then lifted to F_p^2 by sums over dependence pairs, which live in the fiber
  over zero.

Every certificate is checked against X before it is returned. None of the
asymptotic guarantees apply at the sizes tested here, so a pipeline may stall;
a stall returns no certificate plus a trace that says where it stopped.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from decimal import Decimal, localcontext
from fractions import Fraction
from itertools import product as iproduct

import numpy as np

from .balanced import (
    HypothesisError,
    WeightedPointSet,
    balanced_attempt,
    dependence_lattice,
)
from .exact_core import (
    DimensionError,
    FpLinearFunctional,
    centered,
    fp_rank,
    rat_str,
    to_rat,
)
from .flags import HOLLOW_VERTEX_BOUND, polytope_centerpoint
from .polytopes import Polytope
from .zerosum import FpMultiset, ZeroSumCertificate

# Constant recorded with every slab-mode expansion step; far too large to assert at these sizes.
C0 = 10 ** 10


# ---------------------------------------------------------------- thickness

def _weighted(f):
    if isinstance(f, FpMultiset):
        return list(f.elements)
    return [(tuple(v), w) for v, w in f.items()]


@dataclass(frozen=True)
class ThicknessVerdict:
    thin: bool
    fraction: Fraction  # mass of the K-slab over the total mass

    @property
    def verdict(self):
        return "thin" if self.thin else "thick"


@dataclass
class ThicknessProfile:
    K: int
    eps: Fraction
    entries: list = field(default_factory=list)  # (functional, ThicknessVerdict)

    def to_json(self):
        return {"K": self.K, "epsilon": rat_str(self.eps),
                "entries": [{"coefficients": list(xi.coefficients), "constant": xi.constant,
                             "verdict": v.verdict, "fraction": rat_str(v.fraction)} for xi, v in self.entries]}


def in_slab(xi: FpLinearFunctional, v, K) -> bool:
    return abs(centered(xi(v), xi.p)) <= K


def thickness_check(f, xi: FpLinearFunctional, K, eps) -> ThicknessVerdict:
    """Thin along xi iff the K-slab of xi carries at least (1 - eps) of the mass."""
    eps = to_rat(eps)
    items = _weighted(f)
    total = sum((Fraction(w) for _, w in items), Fraction(0))
    if total == 0:
        return ThicknessVerdict(True, Fraction(1))
    inside = sum((Fraction(w) for v, w in items if in_slab(xi, v, K)), Fraction(0))
    frac = inside / total
    return ThicknessVerdict(frac >= 1 - eps, frac)


def thickness_profile(f, functionals, K, eps) -> ThicknessProfile:
    prof = ThicknessProfile(K, to_rat(eps))
    for xi in functionals:
        prof.entries.append((xi, thickness_check(f, xi, K, eps)))
    return prof


def best_slabs(points, weights, linear_parts, p, K):
    """For each linear part a: the heaviest K-slab over all constant terms.

    Returns (masses, constants) as integer arrays; the constant is the least
    one attaining the maximum. Weights must be integers.
    """
    A = np.asarray(linear_parts, dtype=np.int64).reshape(len(linear_parts), -1)
    P = np.asarray(points, dtype=np.int64).reshape(len(points), -1)
    w = np.asarray(weights, dtype=np.int64)
    m = A.shape[0]
    if m == 0:
        return np.zeros(0, dtype=np.int64), np.zeros(0, dtype=np.int64)
    width = 2 * K + 1
    if width >= p:
        return np.full(m, int(w.sum())), np.zeros(m, dtype=np.int64)
    vals = (A @ P.T) % p
    hist = np.zeros((m, p), dtype=np.int64)
    rows = np.repeat(np.arange(m), P.shape[0])
    np.add.at(hist, (rows, vals.ravel()), np.tile(w, m))
    # window centred at s covers residues s-K..s+K (cyclically)
    ext = np.concatenate([hist[:, p - K:], hist, hist[:, :K]], axis=1)
    csum = np.concatenate([np.zeros((m, 1), dtype=np.int64), np.cumsum(ext, axis=1)], axis=1)
    window = csum[:, width:width + p] - csum[:, :p]
    centers = np.argmax(window, axis=1)
    return window[np.arange(m), centers], (-centers) % p


def loomis_whitney_check(A):
    """|A|^(d-1) <= product of the sizes of the d coordinate projections."""
    pts = {tuple(int(a) for a in v) for v in A}
    if not pts:
        raise ValueError("A must be nonempty")
    d = len(next(iter(pts)))
    if d < 2:
        raise DimensionError("the inequality needs d >= 2")
    sizes = [len({v[:i] + v[i + 1:] for v in pts}) for i in range(d)]
    lhs = len(pts) ** (d - 1)
    rhs = 1
    for s in sizes:
        rhs *= s
    out = {"holds": lhs <= rhs, "lhs": lhs, "rhs": rhs, "projection_sizes": sizes}
    assert out["holds"], f"Loomis-Whitney violated: {out}"
    return out


# ---------------------------------------------------------------- expansion

@dataclass
class ExpandStep:
    element: tuple
    Y: frozenset
    size_before: int
    size_after: int
    bound: Fraction | Decimal | None  # asserted bound (basis mode) or recorded bound (slab mode)
    mode: str

    def to_json(self):
        return {"mode": self.mode, "element": list(self.element), "size_before": self.size_before,
                "size_after": self.size_after, "bound": None if self.bound is None else str(self.bound)}


def _shift(Y, v, p):
    return {tuple((a + b) % p for a, b in zip(y, v)) for y in Y}


def _basis_bound(size, d):
    """(x + 1/(3d))^d with x^d = size."""
    with localcontext() as ctx:
        ctx.prec = 60
        x = Decimal(size) ** (Decimal(1) / d)
        return (x + Decimal(1) / (3 * d)) ** d


def expand_step(Y, source, mode, p, K=None, eps=None) -> ExpandStep:
    """Add the element of source that enlarges Y or (Y + v) the most.

    mode "basis": source is a basis E of F_p^d and |Y| <= (p/2)^d; the growth
    to (x + 1/(3d))^d, x^d = |Y|, is asserted. mode "slab": source is any
    multiset of vectors and |Y| <= p^d / 2 (or Y is everything); the growth factor 1 + K eps/(C0 p)
    is only recorded. Ties go to the lexicographically least element.
    """
    Y = {tuple(int(a) % p for a in y) for y in Y}
    if not Y:
        raise HypothesisError("Y must be nonempty")
    d = len(next(iter(Y)))
    cands = sorted({tuple(int(a) % p for a in v) for v in source})
    if not cands:
        raise HypothesisError("no candidate elements")
    if mode == "basis":
        if len(cands) != d or fp_rank([list(v) for v in cands], p) != d:
            raise HypothesisError("E must be a basis of F_p^d")
        if 2 ** d * len(Y) > p ** d:
            raise HypothesisError("|Y| exceeds (p/2)^d")
    elif mode == "slab":
        # a saturated Y is allowed and simply does not grow
        if 2 * len(Y) > p ** d and len(Y) < p ** d:
            raise HypothesisError("|Y| exceeds p^d / 2")
    else:
        raise ValueError(f"unknown mode {mode!r}")
    best, best_new = None, None
    for v in cands:
        new = Y | _shift(Y, v, p)
        if best_new is None or len(new) > len(best_new):
            best, best_new = v, new
    if mode == "basis":
        bound = _basis_bound(len(Y), d)
        assert len(best_new) >= bound, f"basis expansion bound failed: {len(best_new)} < {bound}"
    else:
        bound = None
        if K is not None and eps is not None:
            bound = (1 + Fraction(K) * to_rat(eps) / (C0 * p)) * len(Y)
        assert len(best_new) >= len(Y)
    return ExpandStep(best, frozenset(best_new), len(Y), len(best_new), bound, mode)


# ---------------------------------------------------------------- pipelines

@dataclass
class PipelineResult:
    certificate: ZeroSumCertificate | None
    trace: dict

    def to_json(self):
        return {"certificate": None if self.certificate is None else self.certificate.to_json(),
                "trace": self.trace}


def _finish(X, counts, trace):
    chosen = tuple(sorted((v, c) for v, c in counts.items() if c))
    cert = ZeroSumCertificate(X.n, chosen)
    if not cert.verify(X):
        raise AssertionError(f"{trace['pipeline']} pipeline produced an invalid certificate")
    trace["status"] = "certificate"
    return PipelineResult(cert, trace)


def _stall(trace, reason):
    trace["status"] = "stall"
    trace["reason"] = reason
    return PipelineResult(None, trace)


def _heavy_point(X):
    for v, m in X.elements:
        if m >= X.n:
            return v
    return None


@dataclass
class PairSequence:
    """Disjoint pairs of draws and the Minkowski sum of the pairs.

    reps maps each element of Y to the draws that produce it.
    """
    p: int
    d: int
    pairs: list = field(default_factory=list)
    reps: dict = field(default_factory=dict)

    def __post_init__(self):
        if not self.reps:
            self.reps = {(0,) * self.d: ()}

    @property
    def Y(self):
        return set(self.reps)

    def add(self, i, j, draws):
        a, b = draws[i], draws[j]
        new = {}
        for v, idx in ((a, i), (b, j)):
            for y in sorted(self.reps):
                s = tuple((s1 + s2) % self.p for s1, s2 in zip(y, v))
                if s not in new:
                    new[s] = self.reps[y] + (idx,)
        self.pairs.append((i, j))
        self.reps = new

    def minkowski(self, draws):
        Y = {(0,) * self.d}
        for i, j in self.pairs:
            Y = _shift(Y, draws[i], self.p) | _shift(Y, draws[j], self.p)
        return Y


def _affine_basis(draws, avail, p, d):
    x0 = avail[0]
    chosen, rows = [], []
    for i in avail[1:]:
        diff = [(a - b) % p for a, b in zip(draws[i], draws[x0])]
        if fp_rank(rows + [diff], p) > len(rows):
            rows.append(diff)
            chosen.append(i)
            if len(rows) == d:
                return x0, chosen
    return None


def _accumulate(draws, used, budget, p, d, K, eps, steps, label):
    seq = PairSequence(p, d)
    # basis mode while the basis growth bound applies
    while len(seq.pairs) < budget and 2 ** d * len(seq.reps) <= p ** d:
        avail = [i for i in range(len(draws)) if i not in used]
        if len(avail) < d + 1:
            break
        basis = _affine_basis(draws, avail, p, d)
        if basis is None:
            break
        x0, rest = basis
        E = {tuple((a - b) % p for a, b in zip(draws[i], draws[x0])): i for i in rest}
        st = expand_step(seq.Y, list(E), "basis", p)
        i = E[st.element]
        seq.add(x0, i, draws)
        used.update((x0, i))
        steps.append({"sequence": label, "mode": "basis", "pair": [list(draws[x0]), list(draws[i])],
                      "size": len(seq.reps), "bound": str(st.bound)})
    # slab mode on the difference multiset of the unused draws
    while len(seq.pairs) < budget and 2 * len(seq.reps) <= p ** d:
        avail = [i for i in range(len(draws)) if i not in used]
        diffs = {}
        for i in avail:
            for j in avail:
                if draws[i] != draws[j]:
                    diffs.setdefault(tuple((a - b) % p for a, b in zip(draws[i], draws[j])), (j, i))
        if not diffs:
            break
        st = expand_step(seq.Y, list(diffs), "slab", p, K, eps)
        if st.size_after == st.size_before:
            break
        j, i = diffs[st.element]
        seq.add(j, i, draws)
        used.update((i, j))
        steps.append({"sequence": label, "mode": "slab", "pair": [list(draws[j]), list(draws[i])],
                      "size": len(seq.reps)})
    return seq


def thick_zero_sum(X: FpMultiset, K, eps) -> PipelineResult:
    p, d = X.n, X.dim
    trace = {"pipeline": "thick", "p": p, "d": d, "K": K, "epsilon": rat_str(to_rat(eps)), "steps": []}
    v = _heavy_point(X)
    if v is not None:
        trace["fast_path"] = list(v)
        return _finish(X, {v: p}, trace)
    draws = X.vectors()
    m_max = min(len(draws) - p, p)
    if m_max < 0:
        return _stall(trace, "fewer than p elements")
    used = set()
    seq1 = _accumulate(draws, used, m_max // 2, p, d, K, eps, trace["steps"], "first")
    seq2 = _accumulate(draws, used, m_max - len(seq1.pairs), p, d, K, eps, trace["steps"], "second")
    m = len(seq1.pairs) + len(seq2.pairs)
    trace["sizes"] = [len(seq1.reps), len(seq2.reps)]
    trace["cauchy_davenport"] = len(seq1.reps) + len(seq2.reps) > p ** d
    rest = [i for i in range(len(draws)) if i not in used]
    if len(rest) < p - m:
        return _stall(trace, "not enough unused elements to complete")
    # any p - m unused draws may close the sum; try consecutive windows in draw order
    for k in range(len(rest) - (p - m) + 1):
        tail = rest[k:k + p - m]
        target = tuple(-sum(draws[i][j] for i in tail) % p for j in range(d))
        for y1 in sorted(seq1.reps):
            y2 = tuple((a - b) % p for a, b in zip(target, y1))
            if y2 in seq2.reps:
                counts = {}
                for i in seq1.reps[y1] + seq2.reps[y2] + tuple(tail):
                    counts[draws[i]] = counts.get(draws[i], 0) + 1
                trace["tail_offset"] = k
                return _finish(X, counts, trace)
    return _stall(trace, "completion target not in the sum of the two Minkowski sets")


def _lift(v, p):
    return tuple(centered(a, p) for a in v)


def thin_zero_sum(X: FpMultiset, K, eps) -> PipelineResult:
    p, d = X.n, X.dim
    eps = to_rat(eps)
    if d > 3:
        raise DimensionError("the thin pipeline needs d <= 3")
    trace = {"pipeline": "thin", "p": p, "d": d, "K": K, "epsilon": rat_str(eps)}
    if any(abs(a) > K for v, _ in X.elements for a in _lift(v, p)):
        raise HypothesisError("X is not inside the K-box")
    v = _heavy_point(X)
    if v is not None:
        trace["fast_path"] = list(v)
        return _finish(X, {v: p}, trace)
    mu = eps / 2 / (2 * K) ** d
    kept = [(_lift(v, p), m, v) for v, m in X.elements if m >= mu * p]
    trace["dropped"] = [list(v) for v, m in X.elements if m < mu * p]
    if not kept:
        return _stall(trace, "every point has low multiplicity")
    pts = [q for q, _, _ in kept]
    weight = {q: m for q, m, _ in kept}
    orig = {q: v for q, _, v in kept}
    P = Polytope(pts)
    L = HOLLOW_VERTEX_BOUND[P.dim]
    cp = polytope_centerpoint(P, pts, [weight[q] for q in pts])
    q = tuple(int(a) for a in cp.point)
    face = [tuple(int(a) for a in s) for s in cp.face_points]
    size = sum(weight.values())
    size_face = sum(weight[s] for s in face)
    theta = Fraction(size, L * size_face)
    trace.update({"centerpoint": list(q), "L": L, "face_points": [list(s) for s in face], "theta": rat_str(theta)})
    return _balanced_certificate(X, face, weight, orig, q, theta, eps / 2, trace)


def _balanced_certificate(X, face, weight, orig, q, theta, eps, trace):
    p = X.n
    if len(face) == 1:
        if weight[face[0]] < p:
            return _stall(trace, "central vertex has multiplicity below p")
        return _finish(X, {orig[face[0]]: p}, trace)
    from .exact_core import minimal_affine_lattice

    lat = minimal_affine_lattice(face)
    coords = [lat.coords(s) for s in face]
    S = WeightedPointSet(coords, [weight[s] for s in face])
    try:
        bal = balanced_attempt(S, lat.coords(q), theta, eps, p)
    except HypothesisError as err:
        return _stall(trace, f"balanced combination unavailable: {err}")
    if bal is None:
        return _stall(trace, "balanced construction misses its bounds at this p")
    trace["alphas"] = list(bal.alphas)
    trace["n0"] = rat_str(bal.n0)
    if any(a > weight[s] for a, s in zip(bal.alphas, face)):
        return _stall(trace, "a coefficient exceeds the multiplicity of its point")
    return _finish(X, {orig[s]: a for s, a in zip(face, bal.alphas)}, trace)


# ---------------------------------------------------------------- tube case

@dataclass(frozen=True)
class DependencePair:
    lam: tuple  # dependence vector indexed like the fibers
    J1: tuple  # draw indices
    J2: tuple
    sigma: tuple  # sigma(J1) - sigma(J2) mod p

    def pattern(self, fiber_of):
        out = {}
        for i in self.J1:
            out.setdefault(fiber_of[i], [0, 0])[0] += 1
        for i in self.J2:
            out.setdefault(fiber_of[i], [0, 0])[1] += 1
        return {a: tuple(c) for a, c in out.items()}


def _short_dependences(C, T, cap=400):
    """Integer lambda over the fibers C with sum 0, sum lambda_a a = 0 and |lambda|_1 <= T."""
    k = len(C)
    found = []
    a1, a2 = C[-2], C[-1]
    for head in iproduct(range(-T, T + 1), repeat=k - 2):
        n1 = sum(abs(x) for x in head)
        if n1 > T:
            continue
        s0 = -sum(head)
        s1 = -sum(x * a for x, a in zip(head, C))
        # l1 + l2 = s0, a1 l1 + a2 l2 = s1
        num = s1 - a1 * s0
        if num % (a2 - a1):
            continue
        l2 = num // (a2 - a1)
        lam = head + (s0 - l2, l2)
        if any(lam) and n1 + abs(lam[-2]) + abs(lam[-1]) <= T:
            found.append(lam)
    found.sort(key=lambda l: (sum(abs(x) for x in l), l))
    return found[:cap]


def tube_zero_sum(X: FpMultiset, K, eps, T=None) -> PipelineResult:
    """d = 2 with a small first coordinate: balance the projection, lift by dependence pairs."""
    p, d = X.n, X.dim
    eps = to_rat(eps)
    if d != 2:
        raise DimensionError("the tube pipeline is implemented for d = 2 with one thin coordinate")
    trace = {"pipeline": "tube", "p": p, "d": d, "t": 1, "K": K, "epsilon": rat_str(eps), "steps": []}
    if any(abs(centered(v[0], p)) > K for v, _ in X.elements):
        raise HypothesisError("first coordinate of X is not inside [-K, K]")
    v = _heavy_point(X)
    if v is not None:
        trace["fast_path"] = list(v)
        return _finish(X, {v: p}, trace)
    draws = X.vectors()
    fibers = {}
    for i, w in enumerate(draws):
        fibers.setdefault(centered(w[0], p), []).append(i)
    mu = eps / 2 / (2 * K)
    trace["dropped_fibers"] = sorted(a for a, idx in fibers.items() if len(idx) < mu * p)
    fibers = {a: idx for a, idx in fibers.items() if len(idx) >= mu * p}
    if not fibers:
        return _stall(trace, "every fiber has low multiplicity")
    C = sorted(fibers)
    if len(C) == 1:
        return _fiber_route(X, draws, fibers[C[0]], C[0], K, eps, trace)
    omega = {a: len(fibers[a]) for a in C}
    P = Polytope([(a,) for a in C])
    cp = polytope_centerpoint(P, [(a,) for a in C], [omega[a] for a in C])
    q = int(cp.point[0])
    trace["centerpoint"] = q
    if len(cp.face_points) == 1:
        return _fiber_route(X, draws, fibers[q], q, K, eps, trace)
    theta = Fraction(1, HOLLOW_VERTEX_BOUND[1])
    S = WeightedPointSet([(a,) for a in C], [omega[a] for a in C])
    try:
        bal = balanced_attempt(S, (q,), theta, eps / 2, p)
    except HypothesisError as err:
        return _stall(trace, f"balanced combination unavailable: {err}")
    if bal is None:
        return _stall(trace, "balanced construction misses its bounds at this p")
    alpha = dict(zip(C, bal.alphas))
    trace["alphas"] = {str(a): alpha[a] for a in C}
    if any(alpha[a] > omega[a] for a in C):
        return _stall(trace, "a coefficient exceeds its fiber size")
    basis = dependence_lattice([(a,) for a in C])
    R = max((abs(x) for e in basis for x in e), default=1)
    if T is None:
        T = 8 * R
    lams = _short_dependences(C, T)
    trace["R"], trace["T"], trace["dependences"] = R, T, len(lams)
    return _lift_pairs(X, draws, fibers, C, alpha, lams, trace)


def _fiber_route(X, draws, idx, a, K, eps, trace):
    """All mass on one fiber {a} x F_p: solve the one-dimensional problem there."""
    p = X.n
    trace["reduced_to_fiber"] = a
    counts = {}
    for i in idx:
        counts[(draws[i][1],)] = counts.get((draws[i][1],), 0) + 1
    sub = FpMultiset(p, 1, tuple(counts.items()))
    res = thick_zero_sum(sub, K, eps)
    trace["fiber_trace"] = res.trace
    if res.certificate is None:
        return _stall(trace, "fiber pipeline stalled")
    return _finish(X, {(a % p, y[0]): c for y, c in res.certificate.chosen}, trace)


def _lift_pairs(X, draws, fibers, C, alpha, lams, trace):
    p = X.n
    fiber_of = {i: a for a in C for i in fibers[a]}
    free = {a: list(fibers[a]) for a in C}  # unused draws per fiber, in order
    use1 = {a: 0 for a in C}
    use2 = {a: 0 for a in C}
    pairs = []
    sums = {0: ()}  # subset sums of the pair differences -> pair indices
    while len(sums) < p:
        best = None
        for lam in lams:
            need = dict(zip(C, lam))
            if any(use1[a] + x > alpha[a] for a, x in need.items() if x > 0):
                continue
            if any(use2[a] - x > len(fibers[a]) - alpha[a] for a, x in need.items() if x < 0):
                continue
            if any(abs(x) > len(free[a]) for a, x in need.items()):
                continue
            J1 = [i for a, x in need.items() if x > 0 for i in free[a][:x]]
            J2 = [i for a, x in need.items() if x < 0 for i in free[a][:-x]]
            for J1c, J2c in _pair_variants(need, free, J1, J2, draws):
                first = sum(draws[i][0] for i in J1c) - sum(draws[i][0] for i in J2c)
                assert sum(centered(draws[i][0], p) for i in J1c) == sum(centered(draws[i][0], p) for i in J2c), \
                    "pair difference left the zero fiber"
                assert first % p == 0
                s = (sum(draws[i][1] for i in J1c) - sum(draws[i][1] for i in J2c)) % p
                grow = len(set(sums) | {(z + s) % p for z in sums})
                key = (-grow, sum(abs(x) for x in lam), lam, s)
                if best is None or key < best[0]:
                    best = (key, DependencePair(lam, tuple(J1c), tuple(J2c), (0, s)))
        if best is None or -best[0][0] == len(sums):
            break
        pair = best[1]
        k = len(pairs)
        pairs.append(pair)
        new = dict(sums)
        for z in sorted(sums):
            new.setdefault((z + pair.sigma[1]) % p, sums[z] + (k,))
        sums = new
        for i in pair.J1:
            free[fiber_of[i]].remove(i)
            use1[fiber_of[i]] += 1
        for i in pair.J2:
            free[fiber_of[i]].remove(i)
            use2[fiber_of[i]] += 1
        trace["steps"].append({"lambda": list(pair.lam), "sigma": list(pair.sigma), "size": len(sums)})
    trace["covered"] = len(sums)
    D = [i for a in C for i in free[a][:alpha[a] - use1[a]]]
    u0 = [sum(draws[i][j] for pr in pairs for i in pr.J1) for j in range(2)]
    u1 = [sum(draws[i][j] for i in D) for j in range(2)]
    assert (u0[0] + u1[0]) % p == 0, "sum of the lifted combination is not in the zero fiber"
    need = (u0[1] + u1[1]) % p
    if need not in sums:
        return _stall(trace, "pair sums do not reach the required correction")
    flip = set(sums[need])
    chosen = list(D)
    for k, pr in enumerate(pairs):
        chosen.extend(pr.J2 if k in flip else pr.J1)
    assert len(chosen) == p, "lifted combination does not have p elements"
    counts = {}
    for i in chosen:
        counts[draws[i]] = counts.get(draws[i], 0) + 1
    return _finish(X, counts, trace)


def _pair_variants(need, free, J1, J2, draws):
    """The default choice plus single swaps that change the second coordinate."""
    yield J1, J2
    for a, x in need.items():
        if x == 0:
            continue
        k = abs(x)
        J = J1 if x > 0 else J2
        last = free[a][k - 1]
        seen = {draws[last][1]}
        for w in free[a][k:]:
            y = draws[w][1]
            if y in seen:
                continue
            seen.add(y)
            swapped = [w if i == last else i for i in J]
            yield (swapped, J2) if x > 0 else (J1, swapped)
