"""Convex flags: posets of polytopes glued by affine maps.

A flag stores one polytope P_x per node, a lattice per node and an affine map
psi_{x,y}: A_y -> A_x for every covering pair y < x. Maps between other
comparable pairs are composed along chains. The set of proper points is the
convex hull of a finite list of generator points.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations

from .balanced import _min_closed_weight
from .exact_core import (
    AffineLattice,
    DimensionError,
    integer_affine_solve,
    lattice_member,
    lp_maximize,
    minimal_affine_lattice,
    rat_str,
    rvec,
    vec_str,
    vsub,
)
from .polytopes import Polytope, _lattice_points_in_box, DEFAULT_ENUM_CAP
from .zerosum import BudgetExceeded

# Largest vertex count of a hollow polytope in dimensions 0..3.
HOLLOW_VERTEX_BOUND = {0: 1, 1: 2, 2: 4, 3: 9}


@dataclass(frozen=True, order=True)
class FlagPoint:
    base: str
    coords: tuple

    def __post_init__(self):
        object.__setattr__(self, "coords", rvec(self.coords))

    def to_json(self):
        return {"node": self.base, "coords": vec_str(self.coords)}

    @classmethod
    def from_json(cls, obj):
        return cls(obj["node"], rvec(obj["coords"]))

    def __repr__(self):
        return f"FlagPoint({self.base}, {vec_str(self.coords)})"


@dataclass(frozen=True)
class AffineMap:
    matrix: tuple  # rows indexed by target coordinates
    offset: tuple

    @classmethod
    def make(cls, matrix, offset):
        return cls(tuple(rvec(r) for r in matrix), rvec(offset))

    @classmethod
    def identity(cls, d):
        return cls.make([[int(i == j) for j in range(d)] for i in range(d)], [0] * d)

    def __call__(self, v):
        return tuple(sum((a * b for a, b in zip(row, v)), Fraction(0)) + o
                     for row, o in zip(self.matrix, self.offset))

    def linear(self, v):
        return tuple(sum((a * b for a, b in zip(row, v)), Fraction(0)) for row in self.matrix)

    def after(self, other: "AffineMap") -> "AffineMap":
        """self o other."""
        cols = list(zip(*other.matrix)) if other.matrix else []
        m = [[sum((a * b for a, b in zip(row, col)), Fraction(0)) for col in cols] for row in self.matrix]
        return AffineMap.make(m, self(other.offset))


class ConvexFlag:
    """Nodes with polytopes, lattices and maps; omega lists the generators of the proper points."""

    def __init__(self, polytopes, order, maps, lattices=None, omega=None):
        self.nodes = list(polytopes)
        self.polytopes = {x: (P if isinstance(P, Polytope) else Polytope(P)) for x, P in polytopes.items()}
        self.order = [tuple(e) for e in order]
        self.edge_maps = {tuple(k): (m if isinstance(m, AffineMap) else AffineMap.make(*m)) for k, m in maps.items()}
        if lattices is None:
            lattices = {x: minimal_affine_lattice(list(P.vertices)) for x, P in self.polytopes.items()}
        self.lattices = dict(lattices)
        self.omega = [g if isinstance(g, FlagPoint) else FlagPoint(*g) for g in (omega or [])]
        self._index = {x: i for i, x in enumerate(self.nodes)}
        for y, x in self.order:
            if y not in self._index or x not in self._index:
                raise ValueError(f"order edge {y} < {x} names an unknown node")
        self._up = {x: self._upset(x) for x in self.nodes}
        self._psi = {}
        self._omega_cache = {}

    def dim(self, x):
        return self.polytopes[x].ambient_dim

    def _upset(self, x):
        seen, stack = {x}, [x]
        while stack:
            y = stack.pop()
            for a, b in self.order:
                if a == y and b not in seen:
                    seen.add(b)
                    stack.append(b)
        return frozenset(seen)

    def leq(self, y, x):
        return x in self._up[y]

    def sup(self, xs):
        xs = list(xs)
        if not xs:
            return None
        common = frozenset.intersection(*[self._up[x] for x in xs])
        least = [m for m in common if common <= self._up[m]]
        return least[0] if len(least) == 1 else None

    def minimal_nodes(self):
        return [x for x in self.nodes if not any(b == x for _, b in self.order)]

    def depth(self, x):
        """Length of the longest chain from x upwards."""
        best = 0
        for a, b in self.order:
            if a == x:
                best = max(best, 1 + self.depth(b))
        return best

    def psi(self, x, y) -> AffineMap:
        """The map A_y -> A_x for y <= x."""
        key = (x, y)
        if key in self._psi:
            return self._psi[key]
        if not self.leq(y, x):
            raise ValueError(f"{y} is not below {x}")
        if x == y:
            out = AffineMap.identity(self.dim(x))
        else:
            z = next(b for a, b in self.order if a == y and self.leq(b, x))
            out = self.psi(x, z).after(self.edge_maps[(y, z)])
        self._psi[key] = out
        return out

    def image(self, q: FlagPoint, y):
        return self.psi(y, q.base)(q.coords)

    def projection(self, q: FlagPoint, y) -> FlagPoint:
        return FlagPoint(y, self.image(q, y))

    def in_lattice(self, q: FlagPoint) -> bool:
        for y in self._up[q.base]:
            L = self.lattices[y]
            if L is None or not lattice_member(L, self.image(q, y)):
                return False
        return True

    def in_omega(self, q: FlagPoint) -> bool:
        """q is a convex combination of generators whose bases have supremum base(q)."""
        if q not in self._omega_cache:
            self._omega_cache[q] = self._in_omega(q)
        return self._omega_cache[q]

    def _in_omega(self, q):
        x = q.base
        gens = [g for g in self.omega if self.leq(g.base, x)]
        if q in gens:
            return True
        if not gens:
            return False
        cols = [self.image(g, x) for g in gens]
        k = len(gens)
        A_eq = [[1] * k] + [[c[j] for c in cols] for j in range(self.dim(x))]
        b_eq = [1] + list(q.coords)
        used = []
        # one LP per base: can that base carry positive weight?
        for b in sorted({g.base for g in gens}, key=self._index.get):
            res = lp_maximize([int(g.base == b) for g in gens], A_eq=A_eq, b_eq=b_eq)
            if res.status == "infeasible":
                return False
            if res.value > 0:
                used.append(b)
        return self.sup(used) == x

    def with_lattices(self, lattices):
        return ConvexFlag(self.polytopes, self.order, self.edge_maps, lattices, self.omega)

    def with_omega(self, omega):
        return ConvexFlag(self.polytopes, self.order, self.edge_maps, self.lattices, omega)

    def all_points_omega(self):
        """Generators whose hull is every point of the flag."""
        return [FlagPoint(x, v) for x in self.nodes for v in self.polytopes[x].vertices]

    def to_json(self):
        nodes = []
        for x in self.nodes:
            L = self.lattices.get(x)
            nodes.append({"id": x, "ambient_dim": self.dim(x),
                          "vertices": [vec_str(v) for v in self.polytopes[x].vertices],
                          "lattice": None if L is None else L.to_json()})
        maps = [{"from": y, "to": x, "matrix": [vec_str(r) for r in m.matrix], "offset": vec_str(m.offset)}
                for (y, x), m in self.edge_maps.items()]
        return {"nodes": nodes, "order": [list(e) for e in self.order], "maps": maps,
                "omega": [g.to_json() for g in self.omega]}

    @classmethod
    def from_json(cls, obj):
        polys, lats = {}, {}
        for n in obj["nodes"]:
            verts = [rvec(v) for v in n["vertices"]]
            if any(len(v) != n["ambient_dim"] for v in verts):
                raise DimensionError(f"node {n['id']}: vertex length differs from ambient_dim")
            polys[n["id"]] = Polytope(verts)
            lat = n.get("lattice")
            lats[n["id"]] = None if lat is None else AffineLattice.from_json(lat)
        maps = {(m["from"], m["to"]): AffineMap.make(m["matrix"], m["offset"]) for m in obj["maps"]}
        omega = [FlagPoint.from_json(g) for g in obj.get("omega", [])]
        return cls(polys, obj["order"], maps, lats, omega)


# ------------------------------------------------------------- validation

def validate_flag(F: ConvexFlag) -> dict:
    problems = []
    for x in F.nodes:
        if any(y != x and F.leq(y, x) and F.leq(x, y) for y in F.nodes):
            problems.append(f"order has a cycle through {x}")
    for y, x in F.order:
        if (y, x) not in F.edge_maps:
            problems.append(f"no map for {y} < {x}")
            continue
        m = F.edge_maps[(y, x)]
        if len(m.matrix) != F.dim(x) or any(len(r) != F.dim(y) for r in m.matrix) or len(m.offset) != F.dim(x):
            problems.append(f"map {y} -> {x} has the wrong shape")
    for a, b in combinations(F.nodes, 2):
        if F.sup([a, b]) is None:
            problems.append(f"no supremum for {a} and {b}")
    if problems:
        return {"valid": False, "violations": problems}
    # functoriality: every covering step y < z must agree with the composed map into x
    for y, z in F.order:
        for x in F._up[z]:
            if F.psi(x, y) != F.psi(x, z).after(F.edge_maps[(y, z)]):
                problems.append(f"maps are not functorial on {y} < {z} < {x}")
    for y in F.nodes:
        for x in F._up[y]:
            f = F.psi(x, y)
            Px = F.polytopes[x]
            if not all(Px.contains(f(v)) for v in F.polytopes[y].vertices):
                problems.append(f"image of P_{y} is not inside P_{x}")
            Ly, Lx = F.lattices.get(y), F.lattices.get(x)
            if Ly is None:
                continue
            if Lx is None:
                problems.append(f"lattice of {y} maps into the empty lattice of {x}")
                continue
            o = f(Ly.origin)
            if not lattice_member(Lx, o) or not all(
                    lattice_member(Lx, tuple(a + b for a, b in zip(o, f.linear(v)))) for v in Ly.basis):
                problems.append(f"lattice of {y} does not map into the lattice of {x}")
    for g in F.omega:
        if g.base not in F.polytopes or not F.polytopes[g.base].contains(g.coords):
            problems.append(f"generator {g} is not a point of its node")
    return {"valid": not problems, "violations": problems}


# ----------------------------------------------------------- constructors

def _node_id(idx):
    return "F" + "_".join(str(i) for i in idx)


def from_polytope(P: Polytope, lattice_points=None) -> ConvexFlag:
    """Face flag of P; proper points are generated by the vertices.

    Lattices default to the minimal lattice of each face's vertices. When
    lattice_points is given, each face gets the minimal lattice of the
    points lying on it (empty when there are none).
    """
    if not isinstance(P, Polytope):
        P = Polytope(P)
    faces = P.faces
    ids = [_node_id(f.vertex_subset) for f in faces]
    polys = {i: Polytope(P.face_vertices(f)) for i, f in zip(ids, faces)}
    order, maps = [], {}
    ident = AffineMap.identity(P.ambient_dim)
    for f, i in zip(faces, ids):
        for g, j in zip(faces, ids):
            if g.dim == f.dim + 1 and set(f.vertex_subset) <= set(g.vertex_subset):
                order.append((i, j))
                maps[(i, j)] = ident
    if lattice_points is None:
        lats = {i: P.face_lattice(f.vertex_subset) for i, f in zip(ids, faces)}
    else:
        pts = [rvec(q) for q in lattice_points]
        lats = {}
        for i in ids:
            on = [q for q in pts if polys[i].contains(q)]
            lats[i] = minimal_affine_lattice(on) if on else None
    omega = [FlagPoint(_node_id(f.vertex_subset), P.vertices[f.vertex_subset[0]]) for f in faces if f.dim == 0]
    return ConvexFlag(polys, order, maps, lats, omega)


def point_of_polytope(F: ConvexFlag, P: Polytope, q) -> FlagPoint:
    """The proper point of a face flag sitting at q, based at the smallest face containing q."""
    return FlagPoint(_node_id(P.minimal_face(q)), rvec(q))


def binary_tree(d: int) -> ConvexFlag:
    """Binary strings of length <= d; each string sits below its prefixes.

    Every node carries [0, 1] and the map from s+a to s collapses [0, 1]
    onto the endpoint a. All points are proper.
    """
    unit = Polytope([(0,), (1,)])
    names = [""]
    for _ in range(d):
        names += [s + a for s in names if len(s) == len(names[-1]) for a in "01"]
    ids = {s: "r" + s for s in names}
    order, maps = [], {}
    for s in names:
        if s:
            order.append((ids[s], ids[s[:-1]]))
            maps[(ids[s], ids[s[:-1]])] = AffineMap.make([[0]], [int(s[-1])])
    F = ConvexFlag({ids[s]: unit for s in names}, order, maps)
    return F.with_omega(F.all_points_omega())


def interval_with_duplicated_endpoints() -> ConvexFlag:
    """Face flag of [0, 1] where every point is proper, so endpoints also exist at the top node."""
    F = from_polytope(Polytope([(0,), (1,)]))
    return F.with_omega(F.all_points_omega())


def sunflower(polygon) -> ConvexFlag:
    """Core polygon with a unit-square petal on every edge, petals glued along unit segments.

    polygon lists the core vertices in cyclic order; petal i projects onto
    the edge from vertex i-1 to vertex i.
    """
    v = [rvec(q) for q in polygon]
    n = len(v)
    if n < 3:
        raise ValueError("a sunflower needs at least three petals")
    core = Polytope(v)
    if len(core.vertices) != n or core.dim != 2:
        raise ValueError("polygon vertices must be in convex position in the plane")
    square = Polytope([(0, 0), (1, 0), (0, 1), (1, 1)])
    unit = Polytope([(0,), (1,)])
    polys = {"a": core}
    order, maps = [], {}
    for i in range(n):
        b, c = f"b{i}", f"c{i}"
        polys[b] = square
        polys[c] = unit
        e = vsub(v[i], v[i - 1])
        maps[(b, "a")] = AffineMap.make([[e[0], 0], [e[1], 0]], v[i - 1])
        order.append((b, "a"))
    for i in range(n):
        c, b, b_next = f"c{i}", f"b{i}", f"b{(i + 1) % n}"
        maps[(c, b)] = AffineMap.make([[0], [1]], [1, 0])
        maps[(c, b_next)] = AffineMap.make([[0], [1]], [0, 0])
        order += [(c, b), (c, b_next)]
    F = ConvexFlag(polys, order, maps)
    return F.with_omega(F.all_points_omega())


# ------------------------------------------------------------ operations

def convex_combine(F: ConvexFlag, points, alphas) -> FlagPoint:
    alphas = [Fraction(a) for a in alphas]
    if len(alphas) != len(points) or any(a < 0 for a in alphas) or sum(alphas) != 1:
        raise ValueError("coefficients must be nonnegative and sum to 1")
    used = [(q, a) for q, a in zip(points, alphas) if a > 0]
    x = F.sup([q.base for q, _ in used])
    if x is None:
        raise ValueError("the bases have no supremum")
    coords = [Fraction(0)] * F.dim(x)
    for q, a in used:
        coords = [c + a * t for c, t in zip(coords, F.image(q, x))]
    out = FlagPoint(x, tuple(coords))
    assert F.polytopes[x].contains(out.coords), "convex combination left the polytope"
    return out


def weak_hull_member(F: ConvexFlag, S, q: FlagPoint, cache=None) -> bool:
    x = q.base
    cols = sorted({F.image(s, x) for s in S if F.leq(s.base, x)})
    if not cols:
        return False
    if cache is not None:
        key = (x, tuple(cols), q.coords)
        if key not in cache:
            cache[key] = weak_hull_member(F, S, q)
        return cache[key]
    k = len(cols)
    A_eq = [[1] * k] + [[c[j] for c in cols] for j in range(F.dim(x))]
    return lp_maximize([0] * k, A_eq=A_eq, b_eq=[1] + list(q.coords)).status != "infeasible"


def integer_proper_points(F: ConvexFlag, cap=DEFAULT_ENUM_CAP):
    """Integer proper points, deepest base nodes first, then by coordinates."""
    out = []
    for x in F.nodes:
        L = F.lattices.get(x)
        if L is None:
            continue
        P = F.polytopes[x]
        lo = [min(v[j] for v in P.vertices) for j in range(P.ambient_dim)]
        hi = [max(v[j] for v in P.vertices) for j in range(P.ambient_dim)]
        for z in _lattice_points_in_box(L, lo, hi, cap):
            q = FlagPoint(x, z)
            if P.contains(z) and F.in_omega(q) and F.in_lattice(q):
                out.append(q)
    return sort_points(F, out)


def sort_points(F: ConvexFlag, points):
    depth = {x: F.depth(x) for x in F.nodes}
    return sorted(points, key=lambda q: (-depth[q.base], q.coords, F._index[q.base]))


def _positive_combination(cols, target):
    """Coefficients alpha > 0 with sum 1 and sum alpha_i cols_i = target, or None.

    One LP: maximize t subject to alpha_i >= t.
    """
    k = len(cols)
    A_ub = [[int(i == j) for j in range(k)] + [0] for i in range(k)]
    A_ub = [[-a for a in row[:k]] + [1] for row in A_ub] + [[0] * k + [1]]
    b_ub = [0] * k + [1]
    A_eq = [[1] * k + [0]] + [[c[j] for c in cols] + [0] for j in range(len(target))]
    res = lp_maximize([0] * k + [1], A_ub, b_ub, A_eq, [1] + list(target))
    if res.status != "optimal" or res.value <= 0:
        return None
    return tuple(res.x[:k])


def _violation(F: ConvexFlag, T, targets):
    """A full-support convex combination of T equal to one of the targets."""
    x = F.sup([t.base for t in T])
    cols = [F.image(t, x) for t in T]
    for r in targets.get(x, ()):
        alpha = _positive_combination(cols, r.coords)
        if alpha is not None:
            return {"points": list(T), "alphas": list(alpha), "result": r}
    return None


def helly_violation(F: ConvexFlag, points, proper=None):
    """None when no nontrivial convex combination of the points is integer and proper."""
    if len(set(points)) < len(points):
        q = next(p for p in points if points.count(p) > 1)
        return {"points": [q, q], "alphas": [Fraction(1, 2)] * 2, "result": q}
    proper = integer_proper_points(F) if proper is None else proper
    targets = {}
    for r in proper:
        targets.setdefault(r.base, []).append(r)
    for size in range(2, len(points) + 1):
        for T in combinations(points, size):
            v = _violation(F, T, targets)
            if v is not None:
                return v
    return None


@dataclass
class HellyReport:
    L: int
    L_geometric: int
    witness_set: list
    violating_combinations: list = field(default_factory=list)
    proper_points: list = field(default_factory=list)

    def to_json(self):
        return {"kind": "helly_report", "L": self.L, "L_geometric": self.L_geometric,
                "witness_set": [q.to_json() for q in self.witness_set],
                "violating_combinations": [
                    {"points": [q.to_json() for q in v["points"]], "alphas": [rat_str(a) for a in v["alphas"]],
                     "result": v["result"].to_json()} for v in self.violating_combinations],
                "proper_points": [q.to_json() for q in self.proper_points]}


def _helly_search(F, I, max_checks):
    """Largest index sets of I with no nontrivial integer proper combination, level by level."""
    targets = {}
    for r in I:
        targets.setdefault(r.base, []).append(r)
    memo = {}
    checks = [0]

    def bad(T):
        if T not in memo:
            checks[0] += 1
            if checks[0] > max_checks:
                raise BudgetExceeded("Helly constant search exceeded its budget")
            memo[T] = _violation(F, [I[i] for i in T], targets)
        return memo[T]

    level = [(i,) for i in range(len(I))]
    best = level[:1]
    while level:
        good = set(level)
        nxt = []
        for A in level:
            for j in range(A[-1] + 1, len(I)):
                B = A + (j,)
                if any(B[:t] + B[t + 1:] not in good for t in range(len(B) - 1)):
                    continue
                hit = None
                for size in range(1, len(A) + 1):
                    for sub in combinations(A, size):
                        hit = bad(sub + (j,))
                        if hit:
                            break
                    if hit:
                        break
                if not hit:
                    nxt.append(B)
        if nxt:
            best = nxt
        level = nxt
    # why the first witness cannot grow: a violation for each added point
    W = best[0]
    violations = []
    for j in range(len(I)):
        if j in W:
            continue
        B = tuple(sorted(W + (j,)))
        for size in range(2, len(B) + 1):
            hit = next((bad(T) for T in combinations(B, size) if j in T and bad(T)), None)
            if hit:
                violations.append(hit)
                break
    return best, violations


def _geometric_helly(F, I, max_subsets, start):
    """Largest weakly convex S with no other integer proper point in its weak hull.

    Sizes are tried downwards from start, which must bound the answer.
    """
    count = 0
    cache = {}
    for size in range(min(start, len(I)), 0, -1):
        for S in combinations(I, size):
            count += 1
            if count > max_subsets:
                raise BudgetExceeded("geometric Helly search exceeded its budget")
            S = list(S)
            if any(weak_hull_member(F, S, r, cache) for r in I if r not in S):
                continue
            if any(weak_hull_member(F, S[:i] + S[i + 1:], s, cache) for i, s in enumerate(S)):
                continue
            return size, S
    return 0, []


def helly_constants(F: ConvexFlag, max_checks=10 ** 6, max_subsets=10 ** 5) -> HellyReport:
    I = integer_proper_points(F)
    if not I:
        return HellyReport(0, 0, [], [], [])
    best, violations = _helly_search(F, I, max_checks)
    Lg, _ = _geometric_helly(F, I, max_subsets, len(best[0]))
    return HellyReport(len(best[0]), Lg, [I[i] for i in best[0]], violations, I)


@dataclass
class HellyCheck:
    hypothesis: bool
    point: FlagPoint | None
    failing_subfamily: list | None = None


def verify_helly(F: ConvexFlag, family, L=None) -> HellyCheck:
    I = integer_proper_points(F)
    if L is None:
        L = helly_constants(F).L
    family = [list(S) for S in family]

    def common(sets):
        for q in I:
            if all(weak_hull_member(F, S, q) for S in sets):
                return q
        return None

    for sub in combinations(range(len(family)), min(L, len(family))):
        if common([family[i] for i in sub]) is None:
            return HellyCheck(False, None, list(sub))
    q = common(family)
    if q is None:
        raise AssertionError("Helly hypothesis holds but no common integer proper point exists")
    return HellyCheck(True, q)


# ------------------------------------------------------------ centerpoints

@dataclass
class CenterpointResult:
    point: FlagPoint
    trace: list  # (node, least closed halfspace weight) per node above the point
    threshold: Fraction


def centrality_trace(F: ConvexFlag, weighted, q: FlagPoint):
    """Least weight on the closed side of a functional through q, per node above base(q)."""
    trace = []
    for y in sorted(F._up[q.base], key=F._index.get):
        d = F.dim(y)
        if d > 3:
            raise DimensionError("functional enumeration is implemented for node dimension at most 3")
        qy = F.image(q, y)
        us, ws = [], []
        for p, w in weighted:
            if F.leq(p.base, y):
                us.append(vsub(F.image(p, y), qy))
                ws.append(Fraction(w))
        trace.append((y, _min_closed_weight(us, ws, d) if us else Fraction(0)))
    return trace


def centerpoint(F: ConvexFlag, weighted, L=None) -> CenterpointResult:
    weighted = [(p, Fraction(w)) for p, w in weighted]
    pts = [p for p, _ in weighted]
    if len(set(pts)) != len(pts):
        raise ValueError("points must be distinct")
    if any(w < 0 for _, w in weighted):
        raise ValueError("weights must be nonnegative")
    for p in pts:
        if not (F.in_omega(p) and F.in_lattice(p)):
            raise ValueError(f"{p} is not an integer proper point")
    if L is None:
        L = helly_constants(F).L
    need = sum((w for _, w in weighted), Fraction(0)) / L
    for q in integer_proper_points(F):
        trace = centrality_trace(F, weighted, q)
        if all(v >= need for _, v in trace):
            return CenterpointResult(q, trace, need)
    raise AssertionError("no central integer proper point although one must exist")


@dataclass
class PolytopeCenterpoint:
    point: tuple
    face: tuple  # vertices of the smallest face containing the point
    lattice_combination: tuple  # integer affine coefficients over the points on that face
    face_points: list
    threshold: Fraction

    def to_json(self):
        return {"kind": "polytope_centerpoint", "point": vec_str(self.point),
                "face": [vec_str(v) for v in self.face],
                "face_points": [vec_str(v) for v in self.face_points],
                "lattice_combination": list(self.lattice_combination), "threshold": rat_str(self.threshold)}


def polytope_centerpoint(P: Polytope, points, weights) -> PolytopeCenterpoint:
    """A 1/L(d)-central point lying in the lattice of the given points on its smallest face."""
    if P.ambient_dim > 3:
        raise DimensionError("polytope centerpoints are implemented for dimension at most 3")
    pts = [rvec(q) for q in points]
    if not all(P.contains(q) for q in pts):
        raise ValueError("all points must lie in the polytope")
    F = from_polytope(P, lattice_points=pts)
    weighted = [(point_of_polytope(F, P, q), w) for q, w in zip(pts, weights)]
    res = centerpoint(F, weighted, L=HOLLOW_VERTEX_BOUND[P.dim])
    q = res.point.coords
    face = P.face_vertices(next(f for f in P.faces if _node_id(f.vertex_subset) == res.point.base))
    Gamma = Polytope(face)
    on = [s for s in pts if Gamma.contains(s)]
    comb = integer_affine_solve(on, q)
    assert comb is not None, "centerpoint is not in the lattice of the points on its face"
    return PolytopeCenterpoint(q, tuple(face), comb, on, res.threshold)


# -------------------------------------------------------------- hollowness

@dataclass
class HollowFlagReport:
    hollow: bool
    violation: dict | None = None


def face_support_node(F: ConvexFlag, x, face_vertices, omega):
    """sup of the bases of proper points over x whose image at x lies on the face."""
    Gamma = Polytope(face_vertices)
    bases = [g.base for g in omega if F.leq(g.base, x) and Gamma.contains(F.image(g, x))]
    return F.sup(bases) if bases else None


def is_hollow_flag(F: ConvexFlag, cap=DEFAULT_ENUM_CAP) -> HollowFlagReport:
    minimal = set(F.minimal_nodes())
    for x in F.nodes:
        P = F.polytopes[x]
        if (P.dim == 0) != (x in minimal):
            return HollowFlagReport(False, {"condition": 2, "node": x, "dim": P.dim, "minimal": x in minimal})
    for x in F.nodes:
        P, L = F.polytopes[x], F.lattices.get(x)
        if P.dim == 0 or L is None:
            continue
        lo = [min(v[j] for v in P.vertices) for j in range(P.ambient_dim)]
        hi = [max(v[j] for v in P.vertices) for j in range(P.ambient_dim)]
        for z in _lattice_points_in_box(L, lo, hi, cap):
            # relative interior: the smallest face containing z is P itself
            if P.contains(z) and len(P.minimal_face(z)) == len(P.vertices):
                return HollowFlagReport(False, {"condition": 1, "node": x, "point": vec_str(z)})
    omega = [FlagPoint(x, F.polytopes[x].vertices[0]) for x in sorted(minimal, key=F._index.get)]
    for x in F.nodes:
        P = F.polytopes[x]
        for f in P.faces:
            verts = P.face_vertices(f)
            xg = face_support_node(F, x, verts, omega)
            if xg is None:
                continue
            Gamma = Polytope(verts)
            psi = F.psi(x, xg)
            if not all(Gamma.contains(psi(v)) for v in F.polytopes[xg].vertices):
                return HollowFlagReport(False, {"condition": 3, "node": x, "face": [vec_str(v) for v in verts],
                                                "support_node": xg})
    return HollowFlagReport(True)
