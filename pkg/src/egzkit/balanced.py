"""Central points and balanced convex combinations with integer coefficients.

Given weighted points S and a point c deep inside conv S, the goal is to
write n * (1, c) as a nonnegative integer combination of the (1, q) whose
coefficients are all comparable to n * weight(q).
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import lcm

from .exact_core import (
    Constraint,
    DimensionError,
    dot,
    integer_affine_solve,
    lattice_member,
    minimal_affine_lattice,
    nullspace,
    rational_interior_point,
    rvec,
    solve_linear,
    to_rat,
    vsub,
    rat_str,
)


class HypothesisError(ValueError):
    """The inputs do not meet the requirements of the construction."""


class NTooSmall(ValueError):
    def __init__(self, n, n0):
        super().__init__(f"n = {n} does not exceed n0 = {rat_str(n0)}")
        self.n, self.n0 = n, n0


@dataclass(frozen=True)
class WeightedPointSet:
    points: tuple
    weights: tuple

    def __post_init__(self):
        pts = tuple(rvec(q) for q in self.points)
        ws = tuple(to_rat(w) for w in self.weights)
        if len(pts) != len(ws):
            raise ValueError("one weight per point is required")
        if len(set(pts)) != len(pts):
            raise ValueError("points must be distinct")
        if any(w <= 0 for w in ws):
            raise ValueError("weights must be positive")
        if pts and any(len(q) != len(pts[0]) for q in pts):
            raise DimensionError("points have different dimensions")
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "weights", ws)

    @property
    def total(self):
        return sum(self.weights, Fraction(0))

    @property
    def dim(self):
        return len(self.points[0])


# --------------------------------------------------------------- centrality

def _plane_coords(vectors, normal):
    """Coordinates of vectors lying in normal^perp, in a fixed basis of it."""
    basis = nullspace([normal])
    rows = [list(col) for col in zip(*basis)]  # d x (d-1)
    return [solve_linear(rows, u) for u in vectors]


def _min_closed_weight(us, ws, d):
    """Least weight of {u : xi.u >= 0} over nonzero xi."""
    zero = sum((w for u, w in zip(us, ws) if not any(u)), Fraction(0))
    nz = [(u, w) for u, w in zip(us, ws) if any(u)]
    if not nz:
        return zero
    if d == 1:
        pos = sum((w for u, w in nz if u[0] > 0), Fraction(0))
        neg = sum((w for u, w in nz if u[0] < 0), Fraction(0))
        return zero + min(pos, neg)
    crit = []
    if d == 2:
        for u, _ in nz:
            crit.append((-u[1], u[0]))
    elif d == 3:
        for i in range(len(nz)):
            for j in range(i + 1, len(nz)):
                a, b = nz[i][0], nz[j][0]
                x = (a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0])
                if any(x):
                    crit.append(x)
        if not crit:
            a = nz[0][0]
            e = next(e for e in ((1, 0, 0), (0, 1, 0), (0, 0, 1))
                     if any((a[1] * e[2] - a[2] * e[1], a[2] * e[0] - a[0] * e[2], a[0] * e[1] - a[1] * e[0])))
            crit.append((a[1] * e[2] - a[2] * e[1], a[2] * e[0] - a[0] * e[2], a[0] * e[1] - a[1] * e[0]))
    else:
        raise DimensionError("centrality is implemented for dimension at most 3")
    best = None
    for xi0 in crit:
        for sgn in (1, -1):
            xi = tuple(sgn * a for a in xi0)
            strict = Fraction(0)
            bu, bw = [], []
            for u, w in zip(us, ws):
                v = dot(xi, u)
                if v > 0:
                    strict += w
                elif v == 0:
                    bu.append(u)
                    bw.append(w)
            # tilt xi slightly: boundary points then split by a lower-dimensional problem
            val = strict + _min_closed_weight(_plane_coords(bu, xi), bw, d - 1)
            if best is None or val < best:
                best = val
    return best


def max_centrality(S: WeightedPointSet, c) -> Fraction:
    """Largest theta for which c is theta-central: min over closed halfspaces containing c."""
    c = rvec(c)
    if len(c) != S.dim:
        raise DimensionError("center and points have different dimensions")
    if S.dim > 3:
        raise DimensionError("centrality is implemented for dimension at most 3")
    us = [vsub(q, c) for q in S.points]
    return _min_closed_weight(us, list(S.weights), S.dim) / S.total


def _interior_of_hull(S: WeightedPointSet, c) -> bool:
    from .polytopes import Polytope

    P = Polytope(list(S.points))
    if P.dim != S.dim or not P.contains(c):
        return False
    return len(P.minimal_face(c)) == len(P.vertices) and all(
        dot(a, c) < b for a, b in P.facets)


def rational_balanced(S: WeightedPointSet, c, theta, check=True):
    """Positive rationals beta with sum 1, sum beta q = c, beta_q < omega(q) / (theta x)."""
    c = rvec(c)
    theta = to_rat(theta)
    if theta <= 0:
        raise HypothesisError("theta must be positive")
    if check:
        if not _interior_of_hull(S, c):
            raise HypothesisError("center is not an interior point of the hull")
        if max_centrality(S, c) < theta:
            raise HypothesisError("center is not theta-central")
    k = len(S.points)
    x = S.total
    ineqs = []
    for i in range(k):
        e = [int(i == j) for j in range(k)]
        ineqs.append(Constraint.make(e, ">", 0))
        ineqs.append(Constraint.make(e, "<", S.weights[i] / (theta * x)))
    eqs = [Constraint.make([1] * k, "=", 1)]
    for j in range(S.dim):
        eqs.append(Constraint.make([q[j] for q in S.points], "=", c[j]))
    beta = rational_interior_point(ineqs, eqs)
    if beta is None:
        if check:
            raise AssertionError("no balanced rational coefficients although the hypotheses hold")
        return None
    return beta


@dataclass(frozen=True)
class BalancedCoefficients:
    alphas: tuple
    n: int
    mu: Fraction
    epsilon: Fraction
    theta: Fraction
    n0: Fraction
    m: int
    C: int
    beta: tuple
    delta: tuple

    def to_json(self):
        return {"kind": "balanced_coefficients", "alphas": list(self.alphas), "n": self.n,
                "mu": rat_str(self.mu), "epsilon": rat_str(self.epsilon), "theta": rat_str(self.theta),
                "n0": rat_str(self.n0), "m": self.m, "C": self.C,
                "beta": [rat_str(b) for b in self.beta], "delta": list(self.delta)}


def check_balanced(S: WeightedPointSet, c, alphas, n, theta, epsilon, mu=None):
    """Exact check of sum a_q (1, q) = n (1, c) and mu n <= a_q <= (1+eps)(theta x)^-1 n w(q)."""
    c = rvec(c)
    theta, epsilon = to_rat(theta), to_rat(epsilon)
    if sum(alphas) != n or any(a < 0 for a in alphas):
        return False
    for j in range(S.dim):
        if sum(a * q[j] for a, q in zip(alphas, S.points)) != n * c[j]:
            return False
    x = S.total
    for a, w in zip(alphas, S.weights):
        if a > (1 + epsilon) * n * w / (theta * x):
            return False
        if mu is not None and a < mu * n:
            return False
    return True


def balanced_threshold(S: WeightedPointSet, beta, delta, theta, epsilon):
    m = lcm(*[b.denominator for b in beta])
    C = max(abs(d) for d in delta)
    x = S.total
    n0 = 2 * C * m * m + C * m * to_rat(theta) / to_rat(epsilon) * max(x / w for w in S.weights)
    return m, C, n0


def _prepare(S: WeightedPointSet, c, theta, epsilon, beta):
    if epsilon <= 0:
        raise HypothesisError("epsilon must be positive")
    if any(a.denominator != 1 for q in S.points for a in q):
        raise HypothesisError("points must be integral")
    if not lattice_member(minimal_affine_lattice(list(S.points)), c):
        raise HypothesisError("center is not in the lattice generated by the points")
    if beta is None:
        beta = rational_balanced(S, c, theta)
    delta = integer_affine_solve(list(S.points), c)
    return beta, delta


def _construct(S, c, theta, epsilon, n, beta, delta):
    m, C, n0 = balanced_threshold(S, beta, delta, theta, epsilon)
    a, r = divmod(n, m)
    alphas = tuple(int(a * m * b + r * d) for b, d in zip(beta, delta))
    mu = Fraction(min(alphas), n)
    return BalancedCoefficients(alphas, n, mu, epsilon, theta, n0, m, C, tuple(beta), tuple(delta))


def integer_balanced(S: WeightedPointSet, c, theta, epsilon, n, beta=None):
    """Nonnegative integers alpha_q balanced against the weights, for n > n0."""
    c = rvec(c)
    theta, epsilon = to_rat(theta), to_rat(epsilon)
    beta, delta = _prepare(S, c, theta, epsilon, beta)
    out = _construct(S, c, theta, epsilon, n, beta, delta)
    if n <= out.n0:
        raise NTooSmall(n, out.n0)
    if not (out.mu > 0 and check_balanced(S, c, out.alphas, n, theta, epsilon, out.mu)):
        raise AssertionError("balanced construction violated its guarantee")
    return out


def balanced_attempt(S: WeightedPointSet, c, theta, epsilon, n, beta=None):
    """Run the same construction for any n; None if the exact bounds fail.

    Below n0 nothing is guaranteed, but the output is still checked exactly.
    """
    c = rvec(c)
    theta, epsilon = to_rat(theta), to_rat(epsilon)
    beta, delta = _prepare(S, c, theta, epsilon, beta)
    out = _construct(S, c, theta, epsilon, n, beta, delta)
    if not check_balanced(S, c, out.alphas, n, theta, epsilon):
        return None
    return out


def integer_balanced_auto(S: WeightedPointSet, c, epsilon, n):
    """integer_balanced with theta set to the exact centrality of c."""
    return integer_balanced(S, c, max_centrality(S, c), epsilon, n)


def dependence_lattice(points):
    """Integer basis of {gamma : sum gamma_q = 0, sum gamma_q q = 0}."""
    from .exact_core import _hnf_rows

    pts = [rvec(q) for q in points]
    den = lcm(*[a.denominator for q in pts for a in q]) if pts else 1
    cols = [[1] + [int(a * den) for a in q] for q in pts]
    _, _, _, kernel = _hnf_rows(cols, track=True)
    return [tuple(k) for k in kernel]


def perturb(S: WeightedPointSet, c, coeffs: BalancedCoefficients, gamma):
    """Add a dependence vector to the coefficients and re-validate the bounds."""
    gamma = tuple(int(g) for g in gamma)
    if sum(gamma) != 0 or any(sum(g * q[j] for g, q in zip(gamma, S.points)) != 0 for j in range(S.dim)):
        raise HypothesisError("perturbation is not a dependence among the points")
    alphas = tuple(a + g for a, g in zip(coeffs.alphas, gamma))
    mu = Fraction(min(alphas), coeffs.n) if coeffs.n else Fraction(0)
    if mu <= 0 or not check_balanced(S, c, alphas, coeffs.n, coeffs.theta, coeffs.epsilon):
        return None
    return BalancedCoefficients(alphas, coeffs.n, mu, coeffs.epsilon, coeffs.theta, coeffs.n0,
                                coeffs.m, coeffs.C, coeffs.beta, coeffs.delta)
