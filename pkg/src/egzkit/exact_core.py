"""Exact rational linear algebra, affine lattices and F_p arithmetic.

Everything here works on ``fractions.Fraction`` and Python integers. Vectors
are plain tuples; the small value classes are frozen so they can be hashed
and shared between threads.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import reduce
from math import gcd, lcm


class DimensionError(ValueError):
    pass


# ---------------------------------------------------------------- rationals

def to_rat(x) -> Fraction:
    """Parse an int, Fraction or "a/b" string into a reduced Fraction."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, bool):
        raise TypeError("booleans are not rationals")
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x.strip())
    raise TypeError(f"cannot read {x!r} as an exact rational")


def rat_str(x: Fraction) -> str:
    x = to_rat(x)
    if x.denominator == 1:
        return str(x.numerator)
    return f"{x.numerator}/{x.denominator}"


def rvec(v) -> tuple:
    return tuple(to_rat(a) for a in v)


def vec_str(v) -> list:
    return [rat_str(a) for a in v]


def vadd(u, v):
    return tuple(a + b for a, b in zip(u, v))


def vsub(u, v):
    return tuple(a - b for a, b in zip(u, v))


def vscale(c, v):
    return tuple(c * a for a in v)


def dot(u, v):
    return sum((a * b for a, b in zip(u, v)), Fraction(0))


def lin_comb(coeffs, vectors, dim=None):
    if dim is None:
        dim = len(vectors[0])
    out = [Fraction(0)] * dim
    for c, v in zip(coeffs, vectors):
        if c:
            for j in range(dim):
                out[j] += c * v[j]
    return tuple(out)


def common_denominator(rows) -> int:
    den = 1
    for r in rows:
        for a in r:
            den = lcm(den, to_rat(a).denominator)
    return den


def _check_dims(points):
    if not points:
        raise ValueError("need at least one point")
    d = len(points[0])
    for q in points:
        if len(q) != d:
            raise DimensionError(f"expected dimension {d}, got {len(q)}")
    return d


# ------------------------------------------------------- rational echelon

def rref(rows):
    """Reduced row echelon form over Q. Returns (rows, pivot_columns)."""
    m = [list(map(to_rat, r)) for r in rows]
    if not m:
        return [], []
    ncols = len(m[0])
    pivots = []
    r = 0
    for c in range(ncols):
        piv = next((i for i in range(r, len(m)) if m[i][c] != 0), None)
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        inv = 1 / m[r][c]
        m[r] = [a * inv for a in m[r]]
        for i in range(len(m)):
            if i != r and m[i][c] != 0:
                f = m[i][c]
                m[i] = [a - f * b for a, b in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
        if r == len(m):
            break
    return [tuple(row) for row in m[:r]], pivots


def rank(rows) -> int:
    return len(rref(rows)[1])


def nullspace(rows, ncols=None):
    """Basis of {x : A x = 0} over Q, one vector per free column."""
    if not rows:
        n = ncols or 0
        return [tuple(Fraction(int(i == j)) for j in range(n)) for i in range(n)]
    red, piv = rref(rows)
    n = len(rows[0])
    free = [j for j in range(n) if j not in piv]
    basis = []
    for f in free:
        x = [Fraction(0)] * n
        x[f] = Fraction(1)
        for r, pc in zip(red, piv):
            x[pc] = -r[f]
        basis.append(tuple(x))
    return basis


def solve_linear(rows, rhs):
    """One rational solution of A x = b (free variables zero), or None."""
    n = len(rows[0]) if rows else 0
    aug = [tuple(r) + (to_rat(b),) for r, b in zip(rows, rhs)]
    red, piv = rref(aug)
    if n in piv:
        return None
    x = [Fraction(0)] * n
    for r, pc in zip(red, piv):
        x[pc] = r[n]
    return tuple(x)


def affine_hull(points):
    """(origin, direction basis in reduced echelon form) of the affine span."""
    _check_dims(points)
    o = rvec(points[0])
    diffs = [vsub(rvec(q), o) for q in points[1:]]
    red, _ = rref(diffs) if diffs else ([], [])
    return o, red


def affine_dimension(points) -> int:
    return len(affine_hull(points)[1])


def affine_coordinates(points):
    """Re-express points in coordinates of their affine hull.

    Returns (coords, origin, directions) where each coordinate vector has
    length equal to the affine dimension and q = origin + sum c_i dir_i.
    """
    o, dirs = affine_hull(points)
    _, piv = rref(dirs) if dirs else ([], [])
    coords = []
    for q in points:
        diff = vsub(rvec(q), o)
        # dirs are reduced echelon: coordinates are read at pivot columns
        coords.append(tuple(diff[c] for c in piv))
    return coords, o, dirs


# ----------------------------------------------------- integer row reduction

def _hnf_rows(rows, track=False):
    """Integer Hermite normal form of the row lattice.

    Rows are integer lists. Returns (basis_rows, pivots, transform, kernel)
    where basis_rows = transform * rows and kernel rows span the integer
    relations among the input rows. Pivots are positive and entries above
    each pivot are reduced into [0, pivot).
    """
    m = [list(r) for r in rows]
    k = len(m)
    n = len(m[0]) if m else 0
    u = [[int(i == j) for j in range(k)] for i in range(k)] if track else None
    r = 0
    pivots = []
    for c in range(n):
        if r >= k:
            break
        while True:
            nz = [i for i in range(r, k) if m[i][c] != 0]
            if not nz:
                break
            i0 = min(nz, key=lambda i: (abs(m[i][c]), i))
            m[r], m[i0] = m[i0], m[r]
            if track:
                u[r], u[i0] = u[i0], u[r]
            done = True
            for i in range(r + 1, k):
                if m[i][c]:
                    q = m[i][c] // m[r][c]
                    m[i] = [a - q * b for a, b in zip(m[i], m[r])]
                    if track:
                        u[i] = [a - q * b for a, b in zip(u[i], u[r])]
                    if m[i][c]:
                        done = False
            if done:
                break
        if r < k and m[r][c] != 0:
            if m[r][c] < 0:
                m[r] = [-a for a in m[r]]
                if track:
                    u[r] = [-a for a in u[r]]
            for i in range(r):
                q = m[i][c] // m[r][c]
                if q:
                    m[i] = [a - q * b for a, b in zip(m[i], m[r])]
                    if track:
                        u[i] = [a - q * b for a, b in zip(u[i], u[r])]
            pivots.append(c)
            r += 1
    basis = [tuple(row) for row in m[:r]]
    if not track:
        return basis, pivots, None, None
    return basis, pivots, [tuple(x) for x in u[:r]], [tuple(x) for x in u[r:]]


# ------------------------------------------------------------ affine lattices

@dataclass(frozen=True)
class AffineLattice:
    """origin + Z-span(basis); basis kept in canonical echelon form."""

    ambient_dim: int
    origin: tuple
    basis: tuple = ()

    @property
    def rank(self) -> int:
        return len(self.basis)

    def pivots(self):
        return [next(j for j, a in enumerate(b) if a != 0) for b in self.basis]

    def coords(self, q):
        """Integer-or-rational coefficients k with q = origin + k*basis, or None."""
        if len(q) != self.ambient_dim:
            raise DimensionError("point and lattice dimensions differ")
        diff = list(vsub(rvec(q), self.origin))
        ks = []
        for b, pc in zip(self.basis, self.pivots()):
            k = diff[pc] / b[pc]
            ks.append(k)
            if k:
                diff = [a - k * x for a, x in zip(diff, b)]
        if any(diff):
            return None
        return tuple(ks)

    def __contains__(self, q):
        return lattice_member(self, q)

    def point(self, ks):
        return vadd(self.origin, lin_comb(ks, self.basis, self.ambient_dim)) if self.basis else self.origin

    def to_json(self):
        return {"origin": vec_str(self.origin), "basis": [vec_str(b) for b in self.basis]}

    @classmethod
    def from_json(cls, obj):
        origin = rvec(obj["origin"])
        return minimal_affine_lattice([origin] + [vadd(origin, rvec(b)) for b in obj.get("basis", [])])


def _integer_hnf_of_rational_rows(rows):
    den = common_denominator(rows)
    ints = [[int(a * den) for a in r] for r in rows]
    return den, ints


def minimal_affine_lattice(points) -> AffineLattice:
    """Smallest affine lattice containing the points."""
    d = _check_dims(points)
    pts = [rvec(q) for q in points]
    o = pts[0]
    diffs = [vsub(q, o) for q in pts[1:]]
    diffs = [v for v in diffs if any(v)]
    if not diffs:
        return AffineLattice(d, o, ())
    den, ints = _integer_hnf_of_rational_rows(diffs)
    hnf, pivots, _, _ = _hnf_rows(ints)
    basis = tuple(tuple(Fraction(a, den) for a in r) for r in hnf)
    # reduce the origin so equal lattices have equal representations
    origin = list(o)
    for b, pc in zip(basis, pivots):
        k = (origin[pc] / b[pc]).__floor__()
        if k:
            origin = [a - k * x for a, x in zip(origin, b)]
    return AffineLattice(d, tuple(origin), basis)


def lattice_member(L: AffineLattice, q) -> bool:
    ks = L.coords(q)
    return ks is not None and all(k.denominator == 1 for k in ks)


def lattice_contains_lattice(big: AffineLattice, small: AffineLattice) -> bool:
    if not lattice_member(big, small.origin):
        return False
    return all(lattice_member(big, vadd(small.origin, b)) for b in small.basis)


def _size_reduce(x, kernel):
    # greedy shortening of an integer solution by integer kernel vectors
    x = list(x)
    if not kernel:
        return x
    improved = True
    passes = 0
    while improved and passes < 50:
        improved = False
        passes += 1
        for kv in kernel:
            kk = sum(a * a for a in kv)
            if kk == 0:
                continue
            t = round(Fraction(sum(a * b for a, b in zip(x, kv)), kk))
            for cand in (t, t - 1, t + 1):
                if cand == 0:
                    continue
                y = [a - cand * b for a, b in zip(x, kv)]
                if (max(map(abs, y)), sum(a * a for a in y)) < (max(map(abs, x)), sum(a * a for a in x)):
                    x = y
                    improved = True
                    break
    return x


def integer_affine_solve(points, target):
    """Integer c with sum(c) = 1 and sum c_i q_i = target, or None."""
    _check_dims(list(points) + [target])
    pts = [rvec(q) for q in points]
    t = rvec(target)
    if len(pts) == 1:
        return (1,) if pts[0] == t else None
    o = pts[0]
    diffs = [vsub(q, o) for q in pts[1:]]
    rhs = vsub(t, o)
    den = common_denominator(diffs + [rhs])
    ints = [[int(a * den) for a in r] for r in diffs]
    b = [int(a * den) for a in rhs]
    hnf, pivots, u, kernel = _hnf_rows(ints, track=True)
    ks = []
    rem = list(b)
    for row, pc in zip(hnf, pivots):
        if rem[pc] % row[pc]:
            return None
        k = rem[pc] // row[pc]
        ks.append(k)
        if k:
            rem = [a - k * x for a, x in zip(rem, row)]
    if any(rem):
        return None
    x = [0] * len(diffs)
    for k, urow in zip(ks, u):
        for j, a in enumerate(urow):
            x[j] += k * a
    # fold the first coefficient into the kernel picture so reduction sees it
    full_kernel = [tuple([-sum(kv)] + list(kv)) for kv in kernel]
    full = [1 - sum(x)] + x
    full = _size_reduce(full, full_kernel)
    return tuple(int(a) for a in full)


# --------------------------------------------------------------- exact LP

class LPResult:
    __slots__ = ("status", "x", "value")

    def __init__(self, status, x=None, value=None):
        self.status = status
        self.x = x
        self.value = value

    def __repr__(self):
        return f"LPResult({self.status!r}, value={self.value})"


def _pivot(T, basis, r, c):
    piv = T[r][c]
    row = T[r]
    if piv != 1:
        inv = 1 / piv
        row = [a * inv for a in row]
        T[r] = row
    nz = [(j, b) for j, b in enumerate(row) if b]
    for i, other in enumerate(T):
        if i != r:
            f = other[c]
            if f:
                new = list(other)
                for j, b in nz:
                    new[j] = other[j] - f * b
                T[i] = new
    basis[r] = c


def _simplex(T, basis, ncols, allowed):
    """Maximize the objective in the last row of T (stored as -c). Bland's rule."""
    m = len(T) - 1
    while True:
        obj = T[m]
        c = next((j for j in range(ncols) if allowed[j] and obj[j] < 0), None)
        if c is None:
            return "optimal"
        best = None
        for i in range(m):
            a = T[i][c]
            if a > 0:
                ratio = T[i][-1] / a
                key = (ratio, basis[i])
                if best is None or key < best[0]:
                    best = (key, i)
        if best is None:
            return "unbounded"
        _pivot(T, basis, best[1], c)


def lp_maximize(c, A_ub=(), b_ub=(), A_eq=(), b_eq=()):
    """Maximize c.x subject to A_ub x <= b_ub, A_eq x = b_eq, x >= 0.

    Two-phase exact simplex with Bland's rule.
    """
    n = len(c)
    rows = []
    for a, b in zip(A_ub, b_ub):
        rows.append((list(map(to_rat, a)), to_rat(b), True))
    for a, b in zip(A_eq, b_eq):
        rows.append((list(map(to_rat, a)), to_rat(b), False))
    n_slack = sum(1 for r in rows if r[2])
    m = len(rows)
    # columns: x (n), slacks, artificials (m), rhs
    total = n + n_slack + m
    T = []
    basis = []
    s = 0
    for i, (a, b, ineq) in enumerate(rows):
        row = a + [Fraction(0)] * (n_slack + m) + [b]
        if ineq:
            row[n + s] = Fraction(1)
            s += 1
        if b < 0:
            row = [-v for v in row]
        row[n + n_slack + i] = Fraction(1)
        T.append(row)
        basis.append(n + n_slack + i)
    # phase one: maximize -sum(artificials)
    obj = [Fraction(0)] * (total + 1)
    for i in range(m):
        obj = [o - v for o, v in zip(obj, T[i])]
    for i in range(m):
        obj[n + n_slack + i] = Fraction(0)
    T.append(obj)
    allowed = [True] * total
    _simplex(T, basis, total, allowed)
    if T[m][-1] != 0:
        return LPResult("infeasible")
    # drive artificials out of the basis where possible
    for i in range(m):
        if basis[i] >= n + n_slack:
            j = next((j for j in range(n + n_slack) if T[i][j] != 0), None)
            if j is not None:
                _pivot(T, basis, i, j)
    for j in range(n + n_slack, total):
        allowed[j] = False
    # phase two objective
    obj = [Fraction(0)] * (total + 1)
    for j in range(n):
        obj[j] = -to_rat(c[j])
    for i in range(m):
        bj = basis[i]
        if bj < n and obj[bj] != 0:
            f = obj[bj]
            obj = [o - f * v for o, v in zip(obj, T[i])]
    T[m] = obj
    status = _simplex(T, basis, total, allowed)
    if status == "unbounded":
        return LPResult("unbounded")
    x = [Fraction(0)] * n
    for i in range(m):
        if basis[i] < n:
            x[basis[i]] = T[i][-1]
    return LPResult("optimal", tuple(x), T[m][-1])


@dataclass(frozen=True)
class Constraint:
    """coeffs . x  (op)  rhs  with op in  <, <=, >, >=, =."""

    coeffs: tuple
    op: str
    rhs: Fraction

    @classmethod
    def make(cls, coeffs, op, rhs=0):
        if op not in ("<", "<=", ">", ">=", "=", "=="):
            raise ValueError(f"unknown comparison {op!r}")
        return cls(rvec(coeffs), "=" if op == "==" else op, to_rat(rhs))

    def holds(self, x) -> bool:
        v = dot(self.coeffs, x)
        return {"<": v < self.rhs, "<=": v <= self.rhs, ">": v > self.rhs,
                ">=": v >= self.rhs, "=": v == self.rhs}[self.op]


def rational_interior_point(inequalities, equalities=()):
    """A rational point meeting every constraint, strict ones strictly; else None.

    Variables are free. One shared slack t in [0, 1] is added to every strict
    constraint and maximized; the system is strictly feasible iff t* > 0.
    """
    cons = list(inequalities) + [c if c.op == "=" else Constraint(c.coeffs, "=", c.rhs) for c in equalities]
    if not cons:
        return ()
    n = len(cons[0].coeffs)
    # x = xp - xm ; last variable is t
    A_ub, b_ub, A_eq, b_eq = [], [], [], []
    any_strict = False
    for con in cons:
        a = list(con.coeffs)
        split = a + [-v for v in a]
        if con.op == "=":
            A_eq.append(split + [0])
            b_eq.append(con.rhs)
            continue
        sign = 1 if con.op in ("<", "<=") else -1
        row = [sign * v for v in split]
        strict = con.op in ("<", ">")
        any_strict |= strict
        A_ub.append(row + [1 if strict else 0])
        b_ub.append(sign * con.rhs)
    A_ub.append([0] * (2 * n) + [1])
    b_ub.append(1)
    obj = [0] * (2 * n) + [1]
    res = lp_maximize(obj, A_ub, b_ub, A_eq, b_eq)
    if res.status != "optimal":
        return None
    if any_strict and res.value <= 0:
        return None
    x = tuple(res.x[i] - res.x[n + i] for i in range(n))
    return x


# ------------------------------------------------------------- F_p helpers

def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    f = 3
    while f * f <= n:
        if n % f == 0:
            return False
        f += 2
    return True


@dataclass(frozen=True, order=True)
class FpVec:
    p: int
    coords: tuple

    def __post_init__(self):
        object.__setattr__(self, "coords", tuple(int(a) % self.p for a in self.coords))

    @property
    def dim(self):
        return len(self.coords)

    def __add__(self, other):
        return FpVec(self.p, tuple(a + b for a, b in zip(self.coords, other.coords)))

    def __sub__(self, other):
        return FpVec(self.p, tuple(a - b for a, b in zip(self.coords, other.coords)))

    def __mul__(self, k):
        return FpVec(self.p, tuple(k * a for a in self.coords))

    __rmul__ = __mul__

    def is_zero(self):
        return not any(self.coords)

    def lift(self):
        """Centered integer representative in [-(p-1)/2, p/2]."""
        return tuple(centered(a, self.p) for a in self.coords)


def centered(a: int, p: int) -> int:
    a %= p
    return a - p if a > p // 2 else a


@dataclass(frozen=True)
class FpLinearFunctional:
    coefficients: tuple
    constant: int
    p: int

    def __post_init__(self):
        object.__setattr__(self, "coefficients", tuple(int(a) % self.p for a in self.coefficients))
        object.__setattr__(self, "constant", int(self.constant) % self.p)

    def __call__(self, v) -> int:
        coords = v.coords if isinstance(v, FpVec) else v
        if len(coords) != len(self.coefficients):
            raise DimensionError("functional and vector dimensions differ")
        return (sum(a * b for a, b in zip(self.coefficients, coords)) + self.constant) % self.p

    def is_constant(self):
        return not any(self.coefficients)


def gcd_list(xs):
    return reduce(gcd, xs, 0)


# ------------------------------------------------------- linear algebra mod p

def fp_rref(rows, p):
    """Reduced row echelon form over F_p; returns (rows, pivot columns)."""
    M = [[a % p for a in r] for r in rows]
    pivots = []
    r = 0
    ncols = len(M[0]) if M else 0
    for c in range(ncols):
        piv = next((i for i in range(r, len(M)) if M[i][c]), None)
        if piv is None:
            continue
        M[r], M[piv] = M[piv], M[r]
        inv = pow(M[r][c], -1, p)
        M[r] = [a * inv % p for a in M[r]]
        for i in range(len(M)):
            if i != r and M[i][c]:
                f = M[i][c]
                M[i] = [(a - f * b) % p for a, b in zip(M[i], M[r])]
        pivots.append(c)
        r += 1
        if r == len(M):
            break
    return [tuple(row) for row in M[:r]], pivots


def fp_rank(rows, p) -> int:
    return len(fp_rref(rows, p)[1]) if rows else 0


def fp_nullspace(rows, ncols, p):
    """Basis of {x : rows . x = 0} over F_p."""
    if not rows:
        return [tuple(int(i == j) for j in range(ncols)) for i in range(ncols)]
    R, piv = fp_rref(rows, p)
    out = []
    for free in (c for c in range(ncols) if c not in piv):
        x = [0] * ncols
        x[free] = 1
        for row, c in zip(R, piv):
            x[c] = -row[free] % p
        out.append(tuple(x))
    return out


def fp_solve(rows, rhs, p):
    """One solution of rows . x = rhs over F_p (free variables zero), or None."""
    ncols = len(rows[0]) if rows else 0
    R, piv = fp_rref([list(r) + [b] for r, b in zip(rows, rhs)], p)
    if ncols in piv:
        return None
    x = [0] * ncols
    for row, c in zip(R, piv):
        x[c] = row[ncols]
    return tuple(x)


def fp_lex_least_solution(rows, rhs, p, ncols=None):
    """The lexicographically least solution of rows . x = rhs over F_p, or None."""
    ncols = len(rows[0]) if rows else ncols
    rows, rhs = [list(r) for r in rows], list(rhs)
    if rows and fp_solve(rows, rhs, p) is None:
        return None
    x = []
    for j in range(ncols):
        for a in range(p):
            trial = rows + [[int(i == j) for i in range(ncols)]]
            if fp_solve(trial, rhs + [a], p) is not None:
                rows, rhs = trial, rhs + [a]
                x.append(a)
                break
    return tuple(x)
