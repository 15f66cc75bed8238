"""Exact rational polytopes, their faces and integer points, and hollowness.

A point q of P counts as an integer point when it lies in the affine lattice
generated by the vertices of the smallest face of P containing q. A polytope
is hollow when its vertices are its only integer points.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property, lru_cache
from itertools import combinations, product as iproduct
from math import gcd

from .exact_core import (
    AffineLattice,
    Constraint,
    DimensionError,
    _check_dims,
    _hnf_rows,
    affine_hull,
    dot,
    integer_affine_solve,
    lattice_member,
    lp_maximize,
    minimal_affine_lattice,
    nullspace,
    rational_interior_point,
    rref,
    rvec,
    vec_str,
    vsub,
)

MAX_HULL_DIM = 6
DEFAULT_ENUM_CAP = 10 ** 6


class EnumerationTooLarge(RuntimeError):
    pass


class NotInPolytope(ValueError):
    pass


def _primitive(v):
    den = 1
    for a in v:
        den = den * a.denominator // gcd(den, a.denominator)
    ints = [int(a * den) for a in v]
    g = 0
    for a in ints:
        g = gcd(g, a)
    return tuple(a // g for a in ints) if g else tuple(ints)


def _extreme_indices(local):
    """Indices of the vertices of a full-dimensional hull in dimension 1 or 2 (monotone chain)."""
    order = sorted(range(len(local)), key=lambda i: local[i])
    if len(local[0]) == 1:
        return sorted({order[0], order[-1]})

    def cross(o, a, b):
        return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])

    hull = []
    for seq in (order, order[::-1]):
        chain = []
        for i in seq:
            while len(chain) >= 2 and cross(local[chain[-2]], local[chain[-1]], local[i]) <= 0:
                chain.pop()
            chain.append(i)
        hull.extend(chain[:-1])
    return sorted(set(hull))


@dataclass(frozen=True)
class Face:
    vertex_subset: tuple  # indices into the polytope's vertex list
    dim: int
    supporting_functional: tuple | None  # ambient normal maximized exactly on the face


class Polytope:
    """Convex hull of finitely many rational points, with its face lattice."""

    def __init__(self, points):
        d = _check_dims(points)
        pts = sorted(set(rvec(q) for q in points))
        self.ambient_dim = d
        o, dirs = affine_hull(pts)
        self.dim = len(dirs)
        if self.dim > MAX_HULL_DIM:
            raise DimensionError(f"hull dimension {self.dim} exceeds {MAX_HULL_DIM}")
        _, piv = rref(dirs) if dirs else ([], [])
        self._origin, self._dirs, self._piv = o, dirs, piv
        # equations n.q = n.o cutting out the affine hull
        self.equations = tuple((n, dot(n, o)) for n in (nullspace(dirs, d) if dirs else nullspace([], d)))
        local = [self._local(q) for q in pts]
        if self.dim in (1, 2) and len(pts) > self.dim + 1:
            keep = _extreme_indices(local)
            pts, local = [pts[i] for i in keep], [local[i] for i in keep]
        facets = self._local_facets(local)
        on = [[i for i, c in enumerate(local) if dot(a, c) == b] for a, b in facets]
        verts = []
        for i, c in enumerate(local):
            tight = [facets[f][0] for f in range(len(facets)) if i in on[f]]
            if self.dim == 0 or (tight and len(rref(tight)[1]) == self.dim):
                verts.append(i)
        self.vertices = tuple(pts[i] for i in verts)
        remap = {i: k for k, i in enumerate(verts)}
        self._local_vertices = [local[i] for i in verts]
        self._local_facet_list = facets
        self._facet_sets = [frozenset(remap[i] for i in s if i in remap) for s in on]
        self.facets = tuple(self._ambient_functional(a, b) for a, b in facets)
        self._lattices = {}

    # coordinates on the affine hull
    def _local(self, q):
        diff = vsub(q, self._origin)
        return tuple(diff[c] for c in self._piv)

    def _ambient_functional(self, a, b):
        normal = [Fraction(0)] * self.ambient_dim
        for coef, c in zip(a, self._piv):
            normal[c] = coef
        return tuple(normal), b + dot(normal, self._origin)

    def _local_facets(self, local):
        k = self.dim
        if k == 0:
            return []
        out = {}
        for sub in combinations(range(len(local)), k):
            base = local[sub[0]]
            diffs = [vsub(local[i], base) for i in sub[1:]]
            if diffs and len(rref(diffs)[1]) < k - 1:
                continue
            ns = nullspace(diffs, k) if diffs else nullspace([], k)
            if len(ns) != 1:
                continue
            a = _primitive(ns[0])
            b = dot(a, base)
            vals = [dot(a, c) for c in local]
            if all(v <= b for v in vals):
                out[(a, b)] = None
            if all(v >= b for v in vals):
                na = tuple(-x for x in a)
                out[(na, -b)] = None
        return sorted(((tuple(map(Fraction, a)), Fraction(b)) for a, b in out), key=lambda f: (f[0], f[1]))

    # ---------------------------------------------------------------- faces
    @cached_property
    def faces(self):
        n = len(self.vertices)
        full = frozenset(range(n))
        found = {full}
        frontier = [s for s in set(self._facet_sets) if s]
        found.update(frontier)
        while frontier:
            new = []
            for a in frontier:
                for b in set(self._facet_sets):
                    c = a & b
                    if c and c not in found:
                        found.add(c)
                        new.append(c)
            frontier = new
        faces = []
        for s in found:
            idx = tuple(sorted(s))
            dim = len(affine_hull([self.vertices[i] for i in idx])[1])
            if s == full:
                func = None
            else:
                normal = [Fraction(0)] * self.ambient_dim
                for f, fs in enumerate(self._facet_sets):
                    if s <= fs:
                        normal = [x + y for x, y in zip(normal, self.facets[f][0])]
                func = tuple(normal)
            faces.append(Face(idx, dim, func))
        faces.sort(key=lambda F: (F.dim, F.vertex_subset))
        return tuple(faces)

    def face_vertices(self, face):
        return [self.vertices[i] for i in face.vertex_subset]

    def face_lattice(self, subset) -> AffineLattice:
        subset = tuple(subset)
        L = self._lattices.get(subset)
        if L is None:
            L = minimal_affine_lattice([self.vertices[i] for i in subset])
            self._lattices[subset] = L
        return L

    # -------------------------------------------------------- membership
    def contains(self, q) -> bool:
        q = rvec(q)
        if len(q) != self.ambient_dim:
            raise DimensionError("point and polytope dimensions differ")
        if any(dot(n, q) != b for n, b in self.equations):
            return False
        return all(dot(a, q) <= b for a, b in self.facets)

    def minimal_face(self, q) -> tuple:
        """Vertex indices of the smallest face containing q."""
        if not self.contains(q):
            raise NotInPolytope(f"{vec_str(q)} is not in the polytope")
        q = rvec(q)
        s = frozenset(range(len(self.vertices)))
        for (a, b), fs in zip(self.facets, self._facet_sets):
            if dot(a, q) == b:
                s = s & fs
        return tuple(sorted(s))

    def to_json(self):
        return {"ambient_dim": self.ambient_dim, "vertices": [vec_str(v) for v in self.vertices]}

    @classmethod
    def from_json(cls, obj):
        verts = [rvec(v) for v in obj["vertices"]]
        if any(len(v) != obj["ambient_dim"] for v in verts):
            raise DimensionError("vertex length differs from ambient_dim")
        return cls(verts)

    def __repr__(self):
        return f"Polytope(dim={self.dim}, vertices={[vec_str(v) for v in self.vertices]})"

    def __eq__(self, other):
        return isinstance(other, Polytope) and self.vertices == other.vertices

    def __hash__(self):
        return hash(self.vertices)


def hull_and_faces(points) -> Polytope:
    return Polytope(points)


# ---------------------------------------------------------- integer points

@dataclass(frozen=True)
class IntegerPointReport:
    integer: bool
    face: tuple
    lattice: AffineLattice


def is_integer_point(P: Polytope, q) -> IntegerPointReport:
    face = P.minimal_face(q)
    L = P.face_lattice(face)
    return IntegerPointReport(lattice_member(L, q), face, L)


def _lattice_points_in_box(L: AffineLattice, lo, hi, cap):
    """Points of L inside the box [lo, hi], using the echelon basis."""
    piv = L.pivots()
    out = []
    count = [0]

    def rec(j, point):
        if j == len(L.basis):
            if all(l <= a <= h for a, l, h in zip(point, lo, hi)):
                out.append(point)
            return
        b = L.basis[j]
        c = piv[j]
        # coordinate c only depends on coefficients up to j
        a0 = point[c]
        k1 = (lo[c] - a0) / b[c]
        k2 = (hi[c] - a0) / b[c]
        kmin, kmax = min(k1, k2).__ceil__(), max(k1, k2).__floor__()
        count[0] += max(0, kmax - kmin + 1)
        if count[0] > cap:
            raise EnumerationTooLarge("integer point enumeration exceeded its cap")
        for k in range(kmin, kmax + 1):
            rec(j + 1, tuple(x + k * y for x, y in zip(point, b)))

    rec(0, L.origin)
    return out


def integer_points(P: Polytope, cap=DEFAULT_ENUM_CAP):
    """All integer points of P as sorted (point, minimal face) pairs."""
    out = {}
    for i, v in enumerate(P.vertices):
        out[v] = (i,)
    for F in P.faces:
        if F.dim == 0:
            continue
        verts = P.face_vertices(F)
        lo = [min(v[j] for v in verts) for j in range(P.ambient_dim)]
        hi = [max(v[j] for v in verts) for j in range(P.ambient_dim)]
        L = P.face_lattice(F.vertex_subset)
        for z in _lattice_points_in_box(L, lo, hi, cap):
            if z in out or not P.contains(z):
                continue
            if P.minimal_face(z) == F.vertex_subset:
                out[z] = F.vertex_subset
    return sorted(out.items())


@dataclass(frozen=True)
class HollownessReport:
    hollow: bool
    witness: tuple | None = None  # (point, face vertex indices)
    lattice: AffineLattice | None = None

    def to_json(self, P=None):
        out = {"kind": "hollowness_report", "hollow": self.hollow}
        if self.witness is not None:
            point, face = self.witness
            out["witness"] = {"point": vec_str(point), "face": list(face),
                              "lattice": self.lattice.to_json()}
        return out


def is_hollow(P: Polytope, cap=DEFAULT_ENUM_CAP) -> HollownessReport:
    verts = set(P.vertices)
    extra = [(z, F) for z, F in integer_points(P, cap) if z not in verts]
    if not extra:
        return HollownessReport(True)
    z, F = extra[0]
    return HollownessReport(False, (z, F), P.face_lattice(F))


def lattice_coordinates(P: Polytope):
    """Vertices written in a basis of their minimal affine lattice (integers)."""
    L = minimal_affine_lattice(list(P.vertices))
    return [tuple(int(k) for k in L.coords(v)) for v in P.vertices]


# ---------------------------------------------------------------- products

def product(P1: Polytope, P2: Polytope) -> Polytope:
    return Polytope([u + v for u in P1.vertices for v in P2.vertices])


# ----------------------------------------------------------------- 2D class

def classify_hollow_polygon(P: Polytope) -> dict:
    if P.ambient_dim != 2:
        raise DimensionError("classification needs a polygon in the plane")
    rep = is_hollow(P)
    if not rep.hollow:
        return {"class": "NotHollow", "witness": vec_str(rep.witness[0])}
    n = len(P.vertices)
    if P.dim == 0:
        return {"class": "Point"}
    if P.dim == 1:
        return {"class": "Segment"}
    assert n <= 4, "hollow polygon with more than four vertices"
    if n == 3:
        return {"class": "Triangle"}
    edges = [F for F in P.faces if F.dim == 1]
    dirs = []
    for F in edges:
        a, b = P.face_vertices(F)
        dirs.append(vsub(b, a))
    parallel = [(i, j) for i, j in combinations(range(len(dirs)), 2)
                if dirs[i][0] * dirs[j][1] - dirs[i][1] * dirs[j][0] == 0]
    assert parallel, "hollow quadrilateral without a parallel pair of edges"
    return {"class": "Trapezoid", "parallelogram": len(parallel) == 2}


# ------------------------------------------------------------- crit check

def _integer_solutions(columns, rhs):
    """(particular, kernel) integer solutions of sum x_i col_i = rhs, or None."""
    ints = [[int(a) for a in c] for c in columns]
    hnf, piv, u, kernel = _hnf_rows(ints, track=True)
    rem = list(int(a) for a in rhs)
    ks = []
    for row, pc in zip(hnf, piv):
        if rem[pc] % row[pc]:
            return None
        k = rem[pc] // row[pc]
        ks.append(k)
        rem = [a - k * x for a, x in zip(rem, row)]
    if any(rem):
        return None
    x = [0] * len(columns)
    for k, urow in zip(ks, u):
        for j, a in enumerate(urow):
            x[j] += k * a
    return x, kernel


def nonnegative_integer_solution(columns, rhs):
    """Exact search for x >= 0 integer with sum x_i col_i = rhs.

    Integer solutions form x0 + kernel lattice; coordinates along the kernel
    are enumerated one at a time between exact LP bounds.
    """
    den = 1
    for c in list(columns) + [rhs]:
        for a in c:
            den = den * Fraction(a).denominator // gcd(den, Fraction(a).denominator)
    cols = [[Fraction(a) * den for a in c] for c in columns]
    b = [Fraction(a) * den for a in rhs]
    sol = _integer_solutions(cols, b)
    if sol is None:
        return None
    x0, kernel = sol
    k = len(kernel)
    m = len(x0)
    if k == 0:
        return tuple(x0) if all(a >= 0 for a in x0) else None

    def bounds(fixed, j):
        # x0 + sum t_i kernel_i >= 0 with t_0..t_{j-1} fixed; range of t_j
        base = [x0[i] + sum(t * kernel[l][i] for l, t in enumerate(fixed)) for i in range(m)]
        free = list(range(j, k))
        A = [[-kernel[l][i] for l in free] for i in range(m)]
        # t split into positive and negative parts for the LP
        A2 = [row + [-a for a in row] for row in A]
        e = [0] * len(free)
        e[0] = 1
        obj_max = e + [-a for a in e]
        obj_min = [-a for a in obj_max]
        hi = lp_maximize(obj_max, A2, base)
        lo = lp_maximize(obj_min, A2, base)
        if hi.status == "infeasible":
            return None
        if hi.status == "unbounded" or lo.status == "unbounded":
            raise EnumerationTooLarge("unbounded kernel direction")
        return (-lo.value).__ceil__(), hi.value.__floor__()

    def rec(fixed):
        j = len(fixed)
        if j == k:
            x = [x0[i] + sum(t * kernel[l][i] for l, t in enumerate(fixed)) for i in range(m)]
            return tuple(x) if all(a >= 0 for a in x) else None
        rng = bounds(fixed, j)
        if rng is None or rng[0] > rng[1]:
            return None
        lo, hi = rng
        mid = (lo + hi) // 2
        order = sorted(range(lo, hi + 1), key=lambda t: (abs(t - mid), t))
        for t in order:
            got = rec(fixed + [t])
            if got is not None:
                return got
        return None

    return rec([])


@dataclass
class CritReport:
    cond1: bool
    face: tuple
    m0: int
    b: tuple
    c: tuple | None
    K: int
    n0: int
    cond2: dict = field(default_factory=dict)
    construction: dict = field(default_factory=dict)
    oracle: dict = field(default_factory=dict)

    def to_json(self):
        return {"kind": "crit_report", "cond1": self.cond1, "m0": self.m0, "K": self.K, "n0": self.n0,
                "b": list(self.b), "c": None if self.c is None else list(self.c),
                "cond2": {str(n): v for n, v in sorted(self.cond2.items())},
                "coefficients": {str(n): list(a) for n, a in sorted(self.construction.items())}}


def crit_check(P: Polytope, q, n_window) -> CritReport:
    """Compare integrality of q with solvability of sum a_i (q_i, 1) = n (q, 1), a >= 0."""
    q = rvec(q)
    if not P.contains(q):
        raise NotInPolytope("q is outside the polytope")
    rep = is_integer_point(P, q)
    face = rep.face
    fv = [P.vertices[i] for i in face]
    # positive convex weights on the face vertices
    k = len(fv)
    ineqs = [Constraint.make([int(i == j) for j in range(k)], ">", 0) for i in range(k)]
    eqs = [Constraint.make([1] * k, "=", 1)]
    for j in range(P.ambient_dim):
        eqs.append(Constraint.make([v[j] for v in fv], "=", q[j]))
    beta = rational_interior_point(ineqs, eqs)
    assert beta is not None
    m0 = 1
    for x in beta:
        m0 = m0 * x.denominator // gcd(m0, x.denominator)
    b = tuple(int(x * m0) for x in beta)
    c = integer_affine_solve(fv, q) if rep.integer else None
    K = max(abs(x) for x in c) if c else 1
    n0 = 2 * K * m0 * m0
    report = CritReport(rep.integer, face, m0, b, c, K, n0)
    cols = [tuple(v) + (1,) for v in P.vertices]
    for n in n_window:
        target = tuple(n * a for a in q) + (n,)
        alpha = nonnegative_integer_solution(cols, target)
        report.cond2[n] = alpha is not None
        if alpha is not None:
            report.oracle[n] = alpha
        if c is not None and n > n0:
            kk, r = divmod(n, m0)
            local = [kk * bi + r * ci for bi, ci in zip(b, c)]
            full = [0] * len(P.vertices)
            for i, a in zip(face, local):
                full[i] = a
            report.construction[n] = tuple(full)
    return report


# -------------------------------------------------------- unimodular forms

def _canon_order(img):
    return (max((abs(a) for p in img for a in p), default=0), img)


def _int_rank(vectors):
    return len(rref([list(map(Fraction, v)) for v in vectors])[1]) if vectors else 0


def unimodular_canonical_form(points):
    """Canonical image of an integer point set under x -> U x + t, U in GL(Z).

    Each choice of base point and ordered independent difference vectors fixes
    U through the Hermite form of those vectors; the least image (smallest
    coordinates first, then lexicographic) over all choices is returned.
    """
    pts = sorted(set(tuple(int(a) for a in p) for p in points))
    d = len(pts[0])
    k = _int_rank([[a - b for a, b in zip(p, pts[0])] for p in pts[1:]])
    best = None
    for v0 in pts:
        diffs = [tuple(a - b for a, b in zip(p, v0)) for p in pts]
        nz = [w for w in diffs if any(w)]
        for tup in _independent_tuples(nz, k):
            U = _transform_for_columns([list(t) for t in tup], d)
            img = tuple(sorted(tuple(sum(U[i][j] * w[j] for j in range(d)) for i in range(d)) for w in diffs))
            if best is None or _canon_order(img) < _canon_order(best):
                best = img
    if best is None:
        best = (tuple(0 for _ in range(d)),)
    return best


def _independent_tuples(vectors, k):
    from itertools import permutations

    if k == 0:
        yield ()
        return
    for tup in permutations(vectors, k):
        if k == len(tup[0]):
            if _det([list(t) for t in tup]):
                yield tup
        elif _int_rank(tup) == k:
            yield tup


def _transform_for_columns(cols, d):
    """Unimodular U (d x d) with U [cols] in column Hermite form."""
    # row-reduce the d x k matrix whose columns are cols, tracking U
    k = len(cols)
    mat = [[cols[j][i] for j in range(k)] + [int(i == l) for l in range(d)] for i in range(d)]
    hnf, piv, u, kernel = _hnf_rows([row[:k] for row in mat], track=True)
    U = [list(r) for r in u] + [list(r) for r in kernel]
    return U


# ------------------------------------------------------------ hollow search
#
# Every vertex subset of a hollow polytope spans a hollow polytope, and
# convex position is inherited too, so hollow vertex sets of size k are
# exactly the one-point extensions of hollow sets of size k - 1. The search
# grows sets level by level inside the box, deduplicating by the symmetry
# group of the box, and uses an integer-only hollowness test.

@lru_cache(maxsize=None)
def _int_lattice(points):
    o = points[0]
    diffs = [[a - b for a, b in zip(p, o)] for p in points[1:]]
    diffs = [v for v in diffs if any(v)]
    if not diffs:
        return o, (), ()
    hnf, piv, _, _ = _hnf_rows(diffs)
    return o, tuple(hnf), tuple(piv)


def _int_member(points, z):
    o, hnf, piv = _int_lattice(points)
    diff = [a - b for a, b in zip(z, o)]
    for row, pc in zip(hnf, piv):
        if diff[pc] % row[pc]:
            return False
        k = diff[pc] // row[pc]
        if k:
            diff = [a - k * x for a, x in zip(diff, row)]
    return not any(diff)


def _det(rows):
    if len(rows) > 3:
        return sum((-1) ** j * rows[0][j] * _det([r[:j] + r[j + 1:] for r in rows[1:]])
                   for j in range(len(rows)) if rows[0][j])
    if len(rows) == 1:
        return rows[0][0]
    if len(rows) == 2:
        return rows[0][0] * rows[1][1] - rows[0][1] * rows[1][0]
    a, b, c = rows
    return (a[0] * (b[1] * c[2] - b[2] * c[1]) - a[1] * (b[0] * c[2] - b[2] * c[0])
            + a[2] * (b[0] * c[1] - b[1] * c[0]))


def _int_facets(pts, k):
    facets = set()
    if k == 1:
        xs = [p[0] for p in pts]
        return [((1,), max(xs)), ((-1,), -min(xs))]
    for sub in combinations(pts, k):
        base = sub[0]
        diffs = [[a - b for a, b in zip(p, base)] for p in sub[1:]]
        if k == 2:
            n = (-diffs[0][1], diffs[0][0])
        elif k == 3:
            u, v = diffs
            n = (u[1] * v[2] - u[2] * v[1], u[2] * v[0] - u[0] * v[2], u[0] * v[1] - u[1] * v[0])
        else:
            # generalized cross product via signed maximal minors
            n = tuple((-1) ** j * _det([r[:j] + r[j + 1:] for r in diffs]) for j in range(k))
        if not any(n):
            continue
        g = 0
        for a in n:
            g = gcd(g, a)
        n = tuple(a // g for a in n)
        b = sum(a * x for a, x in zip(n, base))
        vals = [sum(a * x for a, x in zip(n, p)) for p in pts]
        if max(vals) == b:
            facets.add((n, b))
        if min(vals) == b:
            facets.add((tuple(-a for a in n), -b))
    return sorted(facets)


def _project_full(points):
    """Integer points mapped injectively onto pivot coordinates of their hull."""
    o = points[0]
    diffs = [[Fraction(a - b) for a, b in zip(p, o)] for p in points[1:]]
    _, piv = rref(diffs) if diffs else ([], [])
    return [tuple(p[c] for c in piv) for p in points], len(piv)


def fast_hollow_check(points):
    """(convex_position, hollow) for a set of integer points, integers only.

    Candidates for non-vertex integer points are the integer points of the
    bounding box, since every face lattice sits inside Z^d.
    """
    pts, k = _project_full([tuple(p) for p in points])
    if k == 0:
        return len(pts) == 1, True
    facets = _int_facets(pts, k)
    on = [frozenset(i for i, p in enumerate(pts) if sum(a * x for a, x in zip(n, p)) == b) for n, b in facets]
    for i in range(len(pts)):
        tight = [facets[f][0] for f in range(len(facets)) if i in on[f]]
        if not any(_det(list(c)) for c in combinations(tight, k)):
            return False, False
    vset = set(pts)
    lo = [min(p[j] for p in pts) for j in range(k)]
    hi = [max(p[j] for p in pts) for j in range(k)]
    full = frozenset(range(len(pts)))
    for z in iproduct(*[range(l, h + 1) for l, h in zip(lo, hi)]):
        if z in vset:
            continue
        s = full
        inside = True
        for (n, b), fs in zip(facets, on):
            v = sum(a * x for a, x in zip(n, z))
            if v > b:
                inside = False
                break
            if v == b:
                s = s & fs
        if not inside:
            continue
        face = tuple(sorted(pts[i] for i in s))
        if _int_member(face, z):
            return True, False
    return True, True


def box_symmetries(d, box):
    """Signed coordinate permutations of [0, box]^d, as maps on grid indices."""
    from itertools import permutations

    grid = list(iproduct(range(box + 1), repeat=d))
    index = {p: i for i, p in enumerate(grid)}
    maps = []
    for perm in permutations(range(d)):
        for flips in iproduct((False, True), repeat=d):
            img = [index[tuple(box - p[perm[j]] if flips[j] else p[perm[j]] for j in range(d))] for p in grid]
            maps.append(img)
    return grid, maps


def _mask_key(mask, maps):
    bits = [i for i in range(mask.bit_length()) if mask >> i & 1]
    best = None
    for m in maps:
        img = 0
        for i in bits:
            img |= 1 << m[i]
        if best is None or img < best:
            best = img
    return best


def _extend_chunk(args):
    reps, prev, box, d = args
    grid, maps = box_symmetries(d, box)
    prev = set(prev)
    out = {}
    checked = 0
    for S in reps:
        bits = [i for i in range(len(grid)) if S >> i & 1]
        for z in range(len(grid)):
            if S >> z & 1:
                continue
            T = S | 1 << z
            key = _mask_key(T, maps)
            if key in out:
                continue
            # every one-point deletion must itself be hollow
            if prev and not all(_mask_key(T & ~(1 << i), maps) in prev for i in bits):
                out[key] = False
                continue
            checked += 1
            convex, hollow = fast_hollow_check([grid[i] for i in range(len(grid)) if key >> i & 1])
            out[key] = convex and hollow
    return [k for k, v in out.items() if v], checked


@dataclass
class SearchResult:
    d: int
    box: int
    k: int
    polytopes: list
    level_counts: dict
    checked: int
    complete: bool
    claim: str

    def to_json(self):
        return {"kind": "hollow_search", "d": self.d, "box": self.box, "num_vertices": self.k,
                "complete": self.complete, "claim": self.claim, "checked": self.checked,
                "level_counts": {str(a): b for a, b in sorted(self.level_counts.items())},
                "polytopes": [p.to_json() for p in self.polytopes]}


SEARCH_CHUNKS = 16


def search_hollow(d, box, k, jobs=1, max_checks=5 * 10 ** 7):
    """All hollow k-vertex polytopes with vertices in [0, box]^d, up to unimodular maps."""
    if d > 3:
        raise DimensionError("hollow search is implemented for d <= 3")
    grid, maps = box_symmetries(d, box)
    level = sorted({_mask_key(1 << i, maps) for i in range(len(grid))})
    counts = {1: len(level)}
    checked = 0
    complete = True
    for size in range(2, k + 1):
        if not level:
            counts[size] = 0
            continue
        # fixed chunking keeps the work counter independent of the worker count
        nchunks = SEARCH_CHUNKS
        chunks = [(tuple(level[i::nchunks]), tuple(level) if size > 2 else (), box, d) for i in range(nchunks)]
        chunks = [c for c in chunks if c[0]]
        if jobs > 1:
            from concurrent.futures import ProcessPoolExecutor
            with ProcessPoolExecutor(max_workers=jobs) as ex:
                results = list(ex.map(_extend_chunk, chunks))
        else:
            results = [_extend_chunk(c) for c in chunks]
        merged = set()
        for good, n in results:
            merged.update(good)
            checked += n
        level = sorted(merged)
        counts[size] = len(level)
        if checked > max_checks and size < k:
            complete = False
            break
    found = level if complete else []
    canon = {}
    for S in found:
        pts = [grid[i] for i in range(len(grid)) if S >> i & 1]
        canon.setdefault(unimodular_canonical_form(pts), pts)
    polys = [Polytope(list(key)) for key in sorted(canon, key=_canon_order)]
    claim = "exhaustive within the box"
    if d == 3 and k >= 10:
        claim = "box-bounded evidence only: absence inside [0, box]^3 does not bound all hollow polytopes"
    return SearchResult(d, box, k, polys, counts, checked, complete, claim)
