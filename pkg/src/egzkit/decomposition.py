"""Flag decompositions of weight functions on F_p^d.

A decomposition is a convex flag whose node x carries an affine subspace V_x
of F_p^d, an affine map phi_x from V_x onto Z^r / p Z^r, and a weight function
f_x supported on V_x. Lattices are always Z^r with the standard basis, so
sublattices are re-coordinatized and the connecting maps psi are integer
affine maps. A point v of V_x is lifted to Z^r by taking centered residues of
phi_x(v); the polytope P_x is the hull of the lifts of the support of
F_x = sum of f_y over y <= x.

The refinement operations, the clean-up step and the three-case loop follow
the construction of a complete decomposition. Every operation re-validates
its output.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import product as iproduct

import numpy as np

from .balanced import HypothesisError
from .exact_core import (
    AffineLattice,
    DimensionError,
    _hnf_rows,
    centered,
    fp_lex_least_solution,
    fp_nullspace,
    fp_rank,
    fp_rref,
    fp_solve,
    nullspace,
    rat_str,
    rvec,
    solve_linear,
    to_rat,
    vec_str,
)
from .flags import AffineMap, ConvexFlag, FlagPoint, convex_combine, face_support_node, is_hollow_flag, validate_flag
from .polytopes import Polytope
from .zerosum import BudgetExceeded, FpMultiset, find_zero_sum

COMPLETENESS_CAP = 10 ** 6  # linear parts enumerated per completeness check


# ------------------------------------------------------------------ growth

@dataclass(frozen=True)
class Growth:
    """g(k) = a k + b."""
    a: int = 8
    b: int = 64

    def __call__(self, k):
        return self.a * k + self.b

    def power(self, i, k):
        for _ in range(i):
            k = self(k)
        return k

    def describe(self):
        return f"affine:{self.a},{self.b}"

    @classmethod
    def parse(cls, text):
        kind, _, args = text.partition(":")
        if kind != "affine":
            raise ValueError(f"unknown growth function {text!r}")
        a, b = (int(s) for s in args.split(","))
        if a < 0 or b < 0 or (a == 0 and b == 0):
            raise ValueError("growth must be nondecreasing and positive")
        return cls(a, b)


# ------------------------------------------------------------ F_p helpers

def _mat_vec(M, v, p):
    return tuple(sum(a * b for a, b in zip(row, v)) % p for row in M)


def _echelon_space(base, dirs, p):
    """Canonical (base, directions): reduced echelon directions, base zero on pivots."""
    if not dirs:
        return tuple(a % p for a in base), ()
    R, piv = fp_rref([list(r) for r in dirs], p)
    b = [a % p for a in base]
    for row, c in zip(R, piv):
        if b[c]:
            f = b[c]
            b = [(x - f * y) % p for x, y in zip(b, row)]
    return tuple(b), tuple(tuple(r) for r in R)


def _coords_in_space(base, dirs, v, p):
    """t with v = base + sum t_i dirs_i, for v in the space (echelon dirs)."""
    piv = [next(j for j, a in enumerate(r) if a) for r in dirs]
    return tuple((v[c] - base[c]) % p for c in piv)


def _in_space(base, dirs, v, p):
    t = _coords_in_space(base, dirs, v, p)
    w = list(base)
    for ti, r in zip(t, dirs):
        w = [(a + ti * b) % p for a, b in zip(w, r)]
    return tuple(w) == tuple(a % p for a in v)


def _restrict(M, dirs, p):
    """Rows of M written as functionals on the direction coordinates t."""
    return [tuple(sum(a * b for a, b in zip(row, dcol)) % p for dcol in dirs) for row in M]


# ---------------------------------------------------------- data structures

@dataclass
class Node:
    id: str
    base: tuple  # point of V_x
    dirs: tuple  # echelon direction basis of V_x
    M: tuple  # r rows of length d: phi_x(v) = M v + c (mod p)
    c: tuple
    f: dict  # v -> positive integer weight, v in V_x
    K: int
    poly: Polytope | None = None

    @property
    def r(self):
        return len(self.M)

    @property
    def dim_V(self):
        return len(self.dirs)


@dataclass(frozen=True)
class FpRepresentation:
    p: int
    d: int
    spaces: dict  # node -> (base, dirs)
    phi: dict  # node -> (matrix, offset)


class FlagDecomposition:
    def __init__(self, p, d, nodes, order, maps, counter=None):
        self.p, self.d = p, d
        self.nodes = {n.id: n for n in nodes}
        self.order = [tuple(e) for e in order]
        self.maps = dict(maps)
        self.counter = counter if counter is not None else len(self.nodes)
        self._flag = None

    # -- bookkeeping
    def new_id(self):
        self.counter += 1
        return f"n{self.counter}"

    def copy(self):
        nodes = [Node(n.id, n.base, n.dirs, n.M, n.c, dict(n.f), n.K, n.poly) for n in self.nodes.values()]
        return FlagDecomposition(self.p, self.d, nodes, list(self.order), dict(self.maps), self.counter)

    def touch(self):
        self._flag = None

    @property
    def representation(self):
        return FpRepresentation(self.p, self.d, {x: (n.base, n.dirs) for x, n in self.nodes.items()},
                                {x: (n.M, n.c) for x, n in self.nodes.items()})

    def phi(self, x, v):
        n = self.nodes[x]
        return tuple((a + b) % self.p for a, b in zip(_mat_vec(n.M, v, self.p), n.c))

    def lift(self, x, v):
        return tuple(centered(a, self.p) for a in self.phi(x, v))

    def flag(self) -> ConvexFlag:
        if self._flag is None:
            polys = {x: n.poly for x, n in self.nodes.items()}
            lats = {x: AffineLattice(n.r, (Fraction(0),) * n.r,
                                     tuple(tuple(Fraction(int(i == j)) for j in range(n.r)) for i in range(n.r)))
                    for x, n in self.nodes.items()}
            self._flag = ConvexFlag(polys, self.order, self.maps, lats, self.generators())
        return self._flag

    def generators(self):
        out = set()
        for x, n in self.nodes.items():
            for v in n.f:
                out.add(FlagPoint(x, self.lift(x, v)))
        return sorted(out)

    def leq(self, y, x):
        if y == x:
            return True
        up, seen = [y], {y}
        while up:
            z = up.pop()
            for a, b in self.order:
                if a == z and b not in seen:
                    if b == x:
                        return True
                    seen.add(b)
                    up.append(b)
        return False

    def psi(self, x, y):
        """Composite map Z^{r_y} -> Z^{r_x} along any chain from y up to x."""
        if x == y:
            return AffineMap.identity(self.nodes[x].r)
        for a, b in self.order:
            if a == y and self.leq(b, x):
                return self.psi(x, b).after(self.maps[(a, b)])
        raise ValueError(f"{y} is not below {x}")

    def below(self, x):
        return [y for y in self.nodes if self.leq(y, x)]

    def total(self, x=None):
        if x is None:
            return sum(sum(n.f.values()) for n in self.nodes.values())
        return sum(sum(self.nodes[y].f.values()) for y in self.below(x))

    def support(self, x):
        """(v, weight) of F_x."""
        out = {}
        for y in self.below(x):
            for v, w in self.nodes[y].f.items():
                out[v] = out.get(v, 0) + w
        return out

    def fstar(self, x):
        """Lattice point -> f*(q) at node x."""
        out = {}
        for v, w in self.support(x).items():
            q = self.lift(x, v)
            out[q] = out.get(q, 0) + w
        return out

    def level(self, x):
        n = self.nodes[x]
        return (self.d - n.dim_V, n.r)

    def rebuild_polytopes(self):
        for x, n in self.nodes.items():
            pts = list(self.fstar(x))
            n.poly = Polytope(pts) if pts else None
        self.touch()

    def sup(self, xs):
        ups = [z for z in self.nodes if all(self.leq(y, z) for y in xs)]
        least = [z for z in ups if all(self.leq(z, u) for u in ups)]
        return least[0] if least else None

    def reduced(self, x):
        users = [y for y in self.below(x) if self.nodes[y].f]
        return bool(users) and self.sup(users) == x

    # -- serialization
    def to_json(self):
        out = self.flag().to_json()
        out.update({
            "kind": "flag_decomposition", "p": self.p, "d": self.d, "counter": self.counter,
            "spaces": {x: {"base": list(n.base), "directions": [list(r) for r in n.dirs]}
                       for x, n in self.nodes.items()},
            "phi": {x: {"matrix": [list(r) for r in n.M], "offset": list(n.c)} for x, n in self.nodes.items()},
            "f": {x: [{"vec": list(v), "w": w} for v, w in sorted(n.f.items())] for x, n in self.nodes.items()},
            "E_basis": {x: {"origin": [0] * n.r, "basis": [[int(i == j) for j in range(n.r)] for i in range(n.r)]}
                        for x, n in self.nodes.items()},
            "K": {x: n.K for x, n in self.nodes.items()},
        })
        return out

    @classmethod
    def from_json(cls, obj):
        p, d = int(obj["p"]), int(obj["d"])
        nodes = []
        for item in obj["nodes"]:
            x = item["id"]
            sp, ph = obj["spaces"][x], obj["phi"][x]
            if len(sp["base"]) != d:
                raise DimensionError(f"node {x}: base has length {len(sp['base'])}, expected {d}")
            base, dirs = _echelon_space(tuple(sp["base"]), [tuple(r) for r in sp["directions"]], p)
            f = {tuple(e["vec"]): int(e["w"]) for e in obj["f"].get(x, [])}
            verts = [rvec(v) for v in item["vertices"]]
            n = Node(x, base, dirs, tuple(tuple(int(a) % p for a in r) for r in ph["matrix"]),
                     tuple(int(a) % p for a in ph["offset"]), f, int(obj["K"][x]),
                     Polytope(verts) if verts else None)
            nodes.append(n)
        maps = {(m["from"], m["to"]): AffineMap.make(m["matrix"], m["offset"]) for m in obj["maps"]}
        return cls(p, d, nodes, obj["order"], maps, obj.get("counter"))


def trivial_decomposition(f, p, d) -> FlagDecomposition:
    """One node: V = F_p^d, zero-dimensional lattice, f_x = f."""
    f = {tuple(int(a) % p for a in v): int(w) for v, w in _weights(f).items() if w}
    dirs = tuple(tuple(int(i == j) for j in range(d)) for i in range(d))
    D = FlagDecomposition(p, d, [Node("n0", (0,) * d, dirs, (), (), f, 1)], [], {}, 0)
    D.rebuild_polytopes()
    return D


def single_node(f, p, d, M, c, base=None, dirs=None, K=None) -> FlagDecomposition:
    """A one-node decomposition with a given phi, for experiments and tests."""
    if dirs is None:
        dirs = [tuple(int(i == j) for j in range(d)) for i in range(d)]
    base, dirs = _echelon_space(tuple(base or (0,) * d), [tuple(r) for r in dirs], p)
    f = {tuple(int(a) % p for a in v): int(w) for v, w in _weights(f).items() if w}
    n = Node("n0", base, dirs, tuple(tuple(int(a) % p for a in r) for r in M), tuple(int(a) % p for a in c), f, 1)
    D = FlagDecomposition(p, d, [n], [], {}, 0)
    D.rebuild_polytopes()
    if K is None:
        K = max([1] + [abs(a) for q in D.fstar("n0") for a in q])
    n.K = K
    return D


def _weights(f):
    if isinstance(f, FpMultiset):
        return dict(f.elements)
    return dict(f)


# --------------------------------------------------------------- validation

@dataclass
class DecompositionReport:
    valid: bool
    violations: list
    sharpness: Fraction
    gaps: dict
    reduced: dict
    levels: dict
    K: dict
    faces: dict | None = None
    completeness: dict | None = None

    def to_json(self):
        out = {"kind": "decomposition_report", "valid": self.valid, "violations": self.violations,
               "sharpness": rat_str(self.sharpness), "gaps": self.gaps, "reduced": self.reduced,
               "levels": {x: list(l) for x, l in self.levels.items()}, "K": self.K}
        if self.faces is not None:
            out["faces"] = {x: t.to_json() for x, t in self.faces.items()}
        if self.completeness is not None:
            out["completeness"] = {x: c.to_json() for x, c in self.completeness.items()}
        return out


def validate_decomposition(D: FlagDecomposition, f, eps=None, g=None, delta=None) -> DecompositionReport:
    """Check every invariant of an F_p-represented flag decomposition of f."""
    p = D.p
    f = {tuple(int(a) % p for a in v): int(w) for v, w in _weights(f).items()}
    problems = []
    F = {}
    for x, n in D.nodes.items():
        for v, w in n.f.items():
            if w <= 0:
                problems.append({"condition": "weights", "node": x, "point": list(v)})
            if not _in_space(n.base, n.dirs, v, p):
                problems.append({"condition": "support", "node": x, "point": list(v)})
            F[v] = F.get(v, 0) + w
    for v, w in sorted(F.items()):
        if w > f.get(v, 0):
            problems.append({"condition": 1, "point": list(v), "F": w, "f": f.get(v, 0)})
    # representation: surjective phi, nested spaces, phi_y = psi o phi_x
    for x, n in D.nodes.items():
        if fp_rank(_restrict(n.M, n.dirs, p), p) != n.r if n.r else False:
            problems.append({"condition": "surjective", "node": x})
    flag_ok = True
    for y, x in D.order:
        ny, nx = D.nodes[y], D.nodes[x]
        if not _in_space(nx.base, nx.dirs, ny.base, p) or any(
                not _in_space(nx.base, nx.dirs, tuple((a + b) % p for a, b in zip(ny.base, r)), p) for r in ny.dirs):
            problems.append({"condition": "nested", "lower": y, "upper": x})
            continue
        psi = D.maps.get((y, x))
        if psi is None or any(a.denominator != 1 for row in psi.matrix for a in row) or any(
                a.denominator != 1 for a in psi.offset):
            problems.append({"condition": "integral map", "lower": y, "upper": x})
            flag_ok = False
            continue
        pts = [ny.base] + [tuple((a + b) % p for a, b in zip(ny.base, r)) for r in ny.dirs]
        for v in pts:
            lhs = D.phi(x, v)
            rhs = tuple(int(a) % p for a in psi(D.phi(y, v)))
            if lhs != rhs:
                problems.append({"condition": "phi consistency", "lower": y, "upper": x})
                break
        for v in D.support(y):
            if tuple(int(a) for a in psi(D.lift(y, v))) != D.lift(x, v):
                problems.append({"condition": "lift consistency", "lower": y, "upper": x, "point": list(v)})
                break
    # condition 2 and boundedness
    gaps, levels, Ks, red = {}, {}, {}, {}
    for x, n in D.nodes.items():
        fs = D.fstar(x)
        levels[x] = D.level(x)
        Ks[x] = n.K
        if not fs:
            problems.append({"condition": "empty node", "node": x})
            flag_ok = False
            continue
        hull = Polytope(list(fs))
        if n.poly is None or set(hull.vertices) != set(n.poly.vertices):
            problems.append({"condition": 2, "node": x,
                             "claimed": None if n.poly is None else [vec_str(v) for v in n.poly.vertices],
                             "hull": [vec_str(v) for v in hull.vertices]})
            flag_ok = False
        if any(abs(a) > n.K for v in hull.vertices for a in v):
            problems.append({"condition": "K-bounded", "node": x, "K": n.K})
        gaps[x] = min(fs.values())
    if flag_ok:
        flag = D.flag()
        fv = validate_flag(flag)
        if not fv["valid"]:
            problems.extend({"condition": "flag", "detail": s} for s in fv["violations"])
        else:
            for y, x in D.order:
                if D.nodes[y].K < D.nodes[x].K:
                    problems.append({"condition": "K decreasing", "lower": y, "upper": x})
                if levels[y] < levels[x]:
                    problems.append({"condition": "level monotone", "lower": y, "upper": x})
            for x in D.nodes:
                red[x] = D.reduced(x)
    total_f = sum(f.values())
    sharp = Fraction(total_f - sum(F.values()), total_f) if total_f else Fraction(0)
    rep = DecompositionReport(not problems, problems, sharp, gaps, red, levels, Ks)
    if not problems and eps is not None:
        rep.faces = analyze_faces(D, eps)
    if not problems and g is not None and delta is not None:
        rep.completeness = {x: is_complete_element(D, x, g, delta) for x in D.nodes if red.get(x)}
    return rep


def assert_valid(D, f, what):
    rep = validate_decomposition(D, f)
    assert rep.valid, f"{what} produced an invalid decomposition: {rep.violations[:3]}"
    return rep


# ------------------------------------------------------------------- faces

@dataclass
class FaceInfo:
    vertices: tuple
    dim: int
    weight: int
    support_node: str | None
    good: bool
    large: bool

    def to_json(self):
        return {"vertices": [vec_str(v) for v in self.vertices], "dim": self.dim, "weight": self.weight,
                "support_node": self.support_node, "good": self.good, "large": self.large}


@dataclass
class FaceTable:
    node: str
    element_weight: int
    large_element: bool
    faces: list

    def to_json(self):
        return {"node": self.node, "element_weight": self.element_weight, "large_element": self.large_element,
                "faces": [fi.to_json() for fi in self.faces]}


def analyze_faces(D: FlagDecomposition, eps) -> dict:
    """Per node: weight, support node x_Gamma, goodness and eps-largeness of every face."""
    eps = to_rat(eps)
    flag = D.flag()
    omega = flag.omega
    total = D.total()
    out = {}
    for x, n in D.nodes.items():
        P = n.poly
        fs = D.fstar(x)
        faces = sorted(P.faces, key=lambda fc: (fc.dim, fc.vertex_subset))
        weights = {}
        for fc in faces:
            G = Polytope(P.face_vertices(fc))
            weights[fc.vertex_subset] = sum(w for q, w in fs.items() if G.contains(q))
        infos = []
        for fc in faces:
            verts = tuple(P.face_vertices(fc))
            w = weights[fc.vertex_subset]
            subs = [weights[g.vertex_subset] for g in faces
                    if g.vertex_subset != fc.vertex_subset and set(g.vertex_subset) <= set(fc.vertex_subset)]
            large = w >= eps * total and all(s <= (1 - eps) * w for s in subs)
            xg = face_support_node(flag, x, list(verts), omega)
            good = False
            if xg is not None:
                psi = flag.psi(x, xg)
                G = Polytope(list(verts))
                good = all(G.contains(psi(v)) for v in D.nodes[xg].poly.vertices)
            infos.append(FaceInfo(verts, fc.dim, w, xg, good, large))
        n_large = sum(fi.large for fi in infos)
        if eps > 0:
            assert n_large <= (1 / eps) ** (2 * P.ambient_dim + 1), "large-face count bound violated"
        wx = sum(fs.values())
        out[x] = FaceTable(x, wx, wx >= eps * total, infos)
    return out


# ------------------------------------------------------------ completeness

@dataclass
class CompletenessVerdict:
    complete: bool
    K: int  # slab half-width g(K(x))
    fraction: Fraction | None = None  # heaviest slab fraction over admissible functionals
    functional: tuple | None = None  # (linear part on V_x coordinates, constant)
    ambient: tuple | None = None  # the same functional on F_p^d
    vacuous: bool = False

    def to_json(self):
        return {"complete": self.complete, "K": self.K, "vacuous": self.vacuous,
                "fraction": None if self.fraction is None else rat_str(self.fraction),
                "functional": None if self.functional is None else
                {"linear": list(self.functional[0]), "constant": self.functional[1]},
                "ambient": None if self.ambient is None else
                {"linear": list(self.ambient[0]), "constant": self.ambient[1]}}


def slab_table(T, w, A, p, K):
    """masses[i, c] = weight of {t : |a_i . t + c| <= K} (centered residues)."""
    T = np.asarray(T, dtype=np.int64).reshape(len(T), -1)
    A = np.asarray(A, dtype=np.int64).reshape(len(A), -1)
    w = np.asarray(w, dtype=np.int64)
    m = A.shape[0]
    width = 2 * K + 1
    if width >= p:
        return np.full((m, p), int(w.sum()), dtype=np.int64)
    vals = (A @ T.T) % p
    hist = np.zeros((m, p), dtype=np.int64)
    np.add.at(hist, (np.repeat(np.arange(m), T.shape[0]), vals.ravel()), np.tile(w, m))
    ext = np.concatenate([hist[:, p - K:], hist, hist[:, :K]], axis=1)
    csum = np.concatenate([np.zeros((m, 1), dtype=np.int64), np.cumsum(ext, axis=1)], axis=1)
    window = csum[:, width:width + p] - csum[:, :p]  # window[s] covers s-K..s+K
    # constant c moves the window to s = -c
    return window[:, (-np.arange(p)) % p]


def _to_ambient(n: Node, a, c, p):
    """Functional a.t + c on V_x coordinates as an ambient functional on F_p^d."""
    piv = [next(j for j, x in enumerate(r) if x) for r in n.dirs]
    lin = [0] * len(n.base)
    for ai, pc in zip(a, piv):
        lin[pc] = (lin[pc] + ai) % p
    const = (c - sum(l * b for l, b in zip(lin, n.base))) % p
    return tuple(lin), const


def _heaviest_slabs(D, x, K, excluded_rows, cap=COMPLETENESS_CAP):
    """Best (fraction, a, c) over linear parts a outside span(excluded_rows), ties lexicographic."""
    p, n = D.p, D.nodes[x]
    k = n.dim_V
    supp = D.support(x)
    total = sum(supp.values())
    if p ** k > cap:
        raise BudgetExceeded(f"completeness scan needs {p ** k} linear parts (cap {cap})")
    pts = sorted(supp)
    T = [_coords_in_space(n.base, n.dirs, v, p) for v in pts]
    w = [supp[v] for v in pts]
    A = np.array(list(iproduct(range(p), repeat=k)), dtype=np.int64).reshape(-1, k)
    if excluded_rows:
        R, piv = fp_rref([list(r) for r in excluded_rows], p)
        resid = A.copy()
        for row, pc in zip(R, piv):
            resid = (resid - np.outer(resid[:, pc], np.array(row, dtype=np.int64))) % p
        A = A[np.any(resid != 0, axis=1)]
    else:
        A = A[np.any(A != 0, axis=1)]
    if A.shape[0] == 0:
        return None
    best = None
    for start in range(0, A.shape[0], 4096):
        chunk = A[start:start + 4096]
        masses = slab_table(T, w, chunk, p, K)
        top = masses.max()
        if best is None or top > best[0]:
            i, c = np.argwhere(masses == top)[0]
            best = (int(top), tuple(int(a) for a in chunk[i]), int(c))
    return Fraction(best[0], total), best[1], best[2]


def is_complete_element(D: FlagDecomposition, x, g, delta, cap=COMPLETENESS_CAP) -> CompletenessVerdict:
    """Is F_x (g(K(x)), delta)-thick along every functional that is not constant on fibers of phi_x?"""
    delta = to_rat(delta)
    if not D.reduced(x):
        raise ValueError(f"node {x} is not reduced")
    p, n = D.p, D.nodes[x]
    K = g(n.K)
    W = _restrict(n.M, n.dirs, p)
    if n.dim_V == 0 or (W and fp_rank(W, p) == n.dim_V):
        return CompletenessVerdict(True, K, vacuous=True)
    frac, a, c = _heaviest_slabs(D, x, K, W, cap)
    complete = frac < 1 - delta
    return CompletenessVerdict(complete, K, frac, (a, c), _to_ambient(n, a, c, p))


# ------------------------------------------------------------ poset helpers

def _induced_order(D: FlagDecomposition, keep):
    """Covering relation and composed maps of the subposet keep."""
    keep = [x for x in D.nodes if x in keep]
    order, maps = [], {}
    for y in keep:
        ups = [x for x in keep if x != y and D.leq(y, x)]
        for x in ups:
            if not any(z != x and D.leq(z, x) for z in ups):
                order.append((y, x))
                maps[(y, x)] = D.psi(x, y)
    return order, maps


def _subdecomposition(D, keep):
    order, maps = _induced_order(D, keep)
    nodes = [D.nodes[x] for x in D.nodes if x in keep]
    return FlagDecomposition(D.p, D.d, nodes, order, maps, D.counter)


# ------------------------------------------------------------------ lattices

def _lll(basis):
    """Exact LLL reduction (delta 3/4) of integer row vectors."""
    b = [list(map(Fraction, v)) for v in basis]
    n = len(b)
    if n <= 1:
        return [tuple(int(a) for a in v) for v in b]

    def gso():
        bs, mu = [], [[Fraction(0)] * n for _ in range(n)]
        for i in range(n):
            v = list(b[i])
            for j in range(i):
                den = sum(a * a for a in bs[j])
                mu[i][j] = sum(a * c for a, c in zip(b[i], bs[j])) / den
                v = [a - mu[i][j] * c for a, c in zip(v, bs[j])]
            bs.append(v)
        return bs, mu

    k = 1
    bs, mu = gso()
    while k < n:
        for j in range(k - 1, -1, -1):
            q = round(mu[k][j])
            if q:
                b[k] = [a - q * c for a, c in zip(b[k], b[j])]
                bs, mu = gso()
        nk = sum(a * a for a in bs[k])
        nk1 = sum(a * a for a in bs[k - 1])
        if nk >= (Fraction(3, 4) - mu[k][k - 1] ** 2) * nk1:
            k += 1
        else:
            b[k], b[k - 1] = b[k - 1], b[k]
            bs, mu = gso()
            k = max(k - 1, 1)
    return [tuple(int(a) for a in v) for v in b]


def _lattice_of_points(points):
    """(origin, basis, spread) of Z^r intersected with the affine hull of integer points.

    The basis is LLL-reduced and the origin sits at the middle of the points'
    coordinate box, so coordinates are recovered from residues whenever the
    spread is below p.
    """
    pts = [tuple(int(a) for a in q) for q in points]
    r = len(pts[0])
    o = pts[0]
    dirs = [tuple(Fraction(a - b) for a, b in zip(q, o)) for q in pts[1:]]
    dirs = [v for v in dirs if any(v)]
    normals = nullspace(dirs, r) if dirs else [tuple(Fraction(int(i == j)) for j in range(r)) for i in range(r)]
    if not normals:
        kernel = [tuple(int(i == j) for j in range(r)) for i in range(r)]
    else:
        den = 1
        for nv in normals:
            for a in nv:
                den = den * a.denominator // __import__("math").gcd(den, a.denominator)
        cols = [[int(nv[j] * den) for nv in normals] for j in range(r)]
        _, _, _, kernel = _hnf_rows(cols, track=True)
    basis = _lll(kernel) if kernel else []
    if basis:
        us = [_coords_in_lattice(o, basis, q) for q in pts]
        lo = [min(u[i] for u in us) for i in range(len(basis))]
        hi = [max(u[i] for u in us) for i in range(len(basis))]
        shift = [(a + b) // 2 for a, b in zip(lo, hi)]
        o = tuple(a + sum(s * b[j] for s, b in zip(shift, basis)) for j, a in enumerate(o))
        spread = max(b - a for a, b in zip(lo, hi))
    else:
        spread = 0
    return o, basis, spread


def _coords_in_lattice(o, basis, t):
    if not basis:
        assert tuple(t) == tuple(o)
        return ()
    rows = [list(col) for col in zip(*basis)]
    u = solve_linear(rows, [a - b for a, b in zip(t, o)])
    assert u is not None and all(a.denominator == 1 for a in u), "point is not in the sublattice"
    return tuple(int(a) for a in u)


def _fp_left_inverse(B, p):
    """L (s x r) with L B = I mod p, for an r x s integer matrix B (given as s column vectors)."""
    s = len(B)
    cols = [list(b) for b in B]  # B^T, s x r
    L = []
    for i in range(s):
        row = fp_solve(cols, [int(i == j) for j in range(s)], p)
        assert row is not None, "sublattice basis is not independent mod p"
        L.append(row)
    return L


# ----------------------------------------------------------- first refinement

@dataclass
class RefinementResult:
    decomposition: FlagDecomposition
    trace: dict


def refine_good(D: FlagDecomposition, x, face, f=None) -> RefinementResult:
    """Make the face of P_x with the given vertices good by splitting off nodes over its lattice."""
    p = D.p
    flag = D.flag()
    Px = D.nodes[x].poly
    face = tuple(rvec(v) for v in face)
    verts = set(Px.vertices)
    if not set(face) <= verts or not any(set(Px.face_vertices(fc)) == set(face) for fc in Px.faces):
        raise ValueError("not a face of P_x")
    xg = face_support_node(flag, x, list(face), flag.omega)
    G = Polytope(list(face))
    psi = flag.psi(x, xg)
    trace = {"operation": "refine_good", "node": x, "face": [vec_str(v) for v in face], "support_node": xg}
    if all(G.contains(psi(v)) for v in D.nodes[xg].poly.vertices):
        trace["noop"] = True
        return RefinementResult(D.copy(), trace)
    # move to x_Gamma and the face of its polytope over Gamma
    x = xg
    face = tuple(v for v in D.nodes[x].poly.vertices if G.contains(psi(v)))
    Gx = Polytope(list(face))
    trace["acting_node"] = x
    trace["acting_face"] = [vec_str(v) for v in face]

    def in_gamma(v):
        return Gx.contains(D.lift(x, v))

    S = [y for y in D.below(x) if any(in_gamma(v) for v in D.support(y))]
    E = D.copy()
    hat, frames = {}, {}
    for y in S:
        ny = D.nodes[y]
        pts = sorted({D.lift(y, v) for v in D.support(y) if in_gamma(v)})
        o, B, spread = _lattice_of_points(pts)
        if spread >= p:
            raise HypothesisError(f"sublattice coordinates at {y} spread over {spread} >= p; p is too small")
        # V_hat = phi_y^{-1}(o + B F_p^s) inside V_y
        C = fp_nullspace([list(b) for b in B], ny.r, p) if B else [tuple(int(i == j) for j in range(ny.r))
                                                                    for i in range(ny.r)]
        CM = [tuple(sum(ci * ny.M[i][j] for i, ci in enumerate(crow)) % p for j in range(D.d)) for crow in C]
        rhs = [sum(ci * (oi - cy) for ci, oi, cy in zip(crow, o, ny.c)) % p for crow in C]
        if C:
            rows = _restrict(CM, ny.dirs, p)
            target = [(b - sum(a * v for a, v in zip(row, ny.base))) % p for row, b in zip(CM, rhs)]
            t0 = fp_solve(rows, target, p)
            assert t0 is not None, "support points lie outside the subspace they define"
            kern = fp_nullspace(rows, ny.dim_V, p)
        else:
            t0, kern = (0,) * ny.dim_V, [tuple(int(i == j) for j in range(ny.dim_V)) for i in range(ny.dim_V)]
        base = list(ny.base)
        for ti, dv in zip(t0, ny.dirs):
            base = [(a + ti * b) % p for a, b in zip(base, dv)]
        dirs = [tuple(sum(ki * dv[j] for ki, dv in zip(kv, ny.dirs)) % p for j in range(D.d)) for kv in kern]
        base, dirs = _echelon_space(tuple(base), dirs, p)
        L = _fp_left_inverse(B, p) if B else []
        M = tuple(tuple(sum(l * ny.M[i][j] for i, l in enumerate(lrow)) % p for j in range(D.d)) for lrow in L)
        c = tuple(sum(l * (cy - oi) for l, cy, oi in zip(lrow, ny.c, o)) % p for lrow in L)
        moved = {v: w for v, w in ny.f.items() if in_gamma(v)}
        for v in moved:
            del E.nodes[y].f[v]
        hid = E.new_id()
        hat[y] = hid
        frames[y] = (o, B)
        E.nodes[hid] = Node(hid, base, dirs, M, c, moved, 0)
        E.maps[(hid, y)] = AffineMap.make([[b[j] for b in B] for j in range(ny.r)] if B else [[]] * ny.r
                                          if ny.r else [], o)
        E.order.append((hid, y))
    for y1, y2 in D.order:
        if y1 in hat and y2 in hat:
            o1, B1 = frames[y1]
            o2, B2 = frames[y2]
            m = D.maps[(y1, y2)]
            cols = [_coords_in_lattice(o2, B2, tuple(int(a) for a in m(_embed(o1, B1, e)))) for e in
                    [tuple(int(i == j) for j in range(len(B1))) for i in range(len(B1))]]
            off = _coords_in_lattice(o2, B2, tuple(int(a) for a in m(o1)))
            mat = [[cols[j][i] - off[i] for j in range(len(B1))] for i in range(len(B2))]
            E.maps[(hat[y1], hat[y2])] = AffineMap.make(mat, off)
            E.order.append((hat[y1], hat[y2]))
    E.touch()
    # hats with no weight of their own still carry weight from below; drop those carrying nothing
    E.rebuild_polytopes()
    empty = [h for h in hat.values() if E.nodes[h].poly is None]
    if empty:
        E = _subdecomposition(E, [z for z in E.nodes if z not in empty])
    _assign_hat_K(E, D, list(hat.values()), trace)
    trace["new_nodes"] = {y: hat[y] for y in S}
    trace["size_before"], trace["size_after"] = len(D.nodes), len(E.nodes)
    assert len(E.nodes) <= 2 * len(D.nodes)
    if f is not None:
        assert_valid(E, f, "refine_good")
        tab = analyze_faces(E, 0)
        xt = tab[trace["node"]]
        assert any(set(fi.vertices) == set(rvec(v) for v in trace_face(trace)) and fi.good for fi in xt.faces), \
            "face is still not good after refinement"
    return RefinementResult(E, trace)


def trace_face(trace):
    return [rvec(v) for v in trace["face"]]


def _embed(o, B, u):
    return tuple(a + sum(ui * b[j] for ui, b in zip(u, B)) for j, a in enumerate(o))


def _assign_hat_K(E, D, hats, trace):
    """K for new nodes: achieved coordinate bound, raised to keep K decreasing."""
    achieved = {}
    for h in hats:
        n = E.nodes[h]
        achieved[h] = max([1] + [abs(a) for v in n.poly.vertices for a in v])
    pending = set(hats)
    while pending:
        for h in sorted(pending):
            ups = [z for z in E.nodes if z != h and E.leq(h, z)]
            if any(z in pending for z in ups):
                continue
            E.nodes[h].K = max([achieved[h]] + [E.nodes[z].K for z in ups])
            pending.discard(h)
            break
    trace["K_new"] = {h: E.nodes[h].K for h in hats}
    trace["K_achieved"] = achieved


# ---------------------------------------------------------- second refinement

def refine_complete(D: FlagDecomposition, x, g, delta, f=None) -> RefinementResult:
    """Split off copies of the nodes below x along a maximal sequence of thin functionals."""
    p, d = D.p, D.d
    delta = to_rat(delta)
    total = D.total()
    Fx = D.total(x)
    if Fx < 3 ** (d + 1) * delta * total:
        raise HypothesisError("F_x(V_x) is below 3^(d+1) delta F(V)")
    n = D.nodes[x]
    K0 = max(m.K for m in D.nodes.values())
    span = [list(r) for r in _restrict(n.M, n.dirs, p)]
    xis = []  # (t-coordinate linear part, constant, half-width)
    trace = {"operation": "refine_complete", "node": x, "K0": K0, "delta": rat_str(delta), "functionals": []}
    i = 1
    while n.dim_V and fp_rank(span, p) < n.dim_V if span else n.dim_V:
        Ki = g.power(i, K0)
        best = _heaviest_slabs(D, x, Ki, [tuple(r) for r in span])
        if best is None or best[0] < 1 - 3 ** i * delta:
            break
        frac, a, c = best
        xis.append((a, c, Ki))
        span.append(list(a))
        lin, const = _to_ambient(n, a, c, p)
        trace["functionals"].append({"linear": list(lin), "constant": const, "K": Ki, "fraction": rat_str(frac)})
        i += 1
    l = len(xis)
    trace["l"] = l
    if l == 0:
        return RefinementResult(D.copy(), trace)
    amb = [_to_ambient(n, a, c, p) for a, c, _ in xis]

    def in_omega(v):
        return all(abs(centered(sum(u * w for u, w in zip(lin, v)) + const, p)) <= Ki
                   for (lin, const), (_, _, Ki) in zip(amb, xis))

    E = D.copy()
    below = D.below(x)
    hat, keep_xi = {}, {}
    removed = 0
    for y in below:
        ny = D.nodes[y]
        rows = [list(r) for r in _restrict(ny.M, ny.dirs, p)]
        kept = []
        for j, (lin, const) in enumerate(amb):
            cand = _restrict([lin], ny.dirs, p)[0]
            if fp_rank(rows + [list(cand)], p) > fp_rank(rows, p) if rows or any(cand) else False:
                rows.append(list(cand))
                kept.append(j)
        keep_xi[y] = kept
        M = ny.M + tuple(amb[j][0] for j in kept)
        c = ny.c + tuple(amb[j][1] for j in kept)
        fy = {v: w for v, w in ny.f.items() if in_omega(v)}
        removed += sum(ny.f.values()) - sum(fy.values())
        E.nodes[y].f = {}
        hid = E.new_id()
        hat[y] = hid
        E.nodes[hid] = Node(hid, ny.base, ny.dirs, M, c, fy, max(g.power(l, K0), K0))
        proj = [[int(i == j) for j in range(ny.r + len(kept))] for i in range(ny.r)]
        E.maps[(hid, y)] = AffineMap.make(proj, [0] * ny.r)
        E.order.append((hid, y))
    for y1, y2 in D.order:
        if y1 in hat and y2 in hat:
            E.maps[(hat[y1], hat[y2])] = _extend_map(D, y1, y2, keep_xi, amb)
            E.order.append((hat[y1], hat[y2]))
    E.touch()
    E.rebuild_polytopes()
    empty = [z for z in E.nodes if E.nodes[z].poly is None]
    if empty:
        E = _subdecomposition(E, [z for z in E.nodes if z not in empty])
    trace["removed_weight"] = removed
    trace["new_nodes"] = dict(hat)
    assert removed <= sum(3 ** j for j in range(1, l + 1)) * delta * Fx, "strip removal exceeds its bound"
    assert len(E.nodes) <= 2 * len(D.nodes)
    if f is not None:
        assert_valid(E, f, "refine_complete")
        xr = _reduced_rep(E, hat[x])
        if xr is not None:
            v = is_complete_element(E, xr, g, delta)
            assert v.complete, f"refined node {xr} is not complete: {v}"
    return RefinementResult(E, trace)


def _extend_map(D, y1, y2, keep_xi, amb):
    """psi_{y2,y1} extended by the kept functionals; missing ones are written through y1's coordinates."""
    p = D.p
    n1 = D.nodes[y1]
    m = D.maps[(y1, y2)]
    r1 = n1.r
    k1, k2 = keep_xi[y1], keep_xi[y2]
    width = r1 + len(k1)
    mat = [list(row) + [0] * len(k1) for row in m.matrix]
    off = list(m.offset)
    rows = [list(r) for r in _restrict(n1.M, n1.dirs, p)] + [list(_restrict([amb[j][0]], n1.dirs, p)[0]) for j in k1]
    consts = list(n1.c) + [amb[j][1] for j in k1]
    for j in k2:
        if j in k1:
            row = [0] * width
            row[r1 + k1.index(j)] = 1
            mat.append(row)
            off.append(0)
            continue
        target = _restrict([amb[j][0]], n1.dirs, p)[0]
        coef = fp_solve([list(col) for col in zip(*rows)], list(target), p) if rows else ()
        assert coef is not None, "dropped functional is not determined on the lower node"
        # xi_j = sum coef_i * coord_i + const on V_y1 (mod p)
        base_val = (sum(a * b for a, b in zip(amb[j][0], n1.base)) + amb[j][1]) % p
        coord_base = [(sum(a * b for a, b in zip(r, n1.base)) + cc) % p
                      for r, cc in zip(list(n1.M) + [amb[i][0] for i in k1], consts)]
        const = (base_val - sum(a * b for a, b in zip(coef, coord_base))) % p
        mat.append([centered(a, p) for a in coef])
        off.append(centered(const, p))
    return AffineMap.make(mat, off)


def _reduced_rep(E, x):
    users = [y for y in E.below(x) if E.nodes[y].f]
    return E.sup(users) if users else None


# ----------------------------------------------------------------- clean-up

def cleanup(D: FlagDecomposition, alpha, f=None) -> RefinementResult:
    """Remove light fibers, drop empty and non-reduced nodes, rebuild polytopes."""
    alpha = to_rat(alpha)
    E = D.copy()
    d = D.d
    total = D.total()
    size = len(D.nodes)
    removed = []
    changed = True
    while changed:
        changed = False
        for x in list(E.nodes):
            thr = alpha * Fraction(1, (2 * E.nodes[x].K) ** d) / size * total
            fs = E.fstar(x)
            light = sorted(q for q, w in fs.items() if 0 < w <= thr)
            if not light:
                continue
            light = set(light)
            for y in E.below(x):
                ny = E.nodes[y]
                drop = [v for v in ny.f if E.lift(x, v) in light]
                for v in drop:
                    removed.append((x, list(E.lift(x, v)), ny.f.pop(v)))
            changed = True
    E.touch()
    nonzero = [x for x in E.nodes if E.total(x) > 0]
    E = _subdecomposition(E, nonzero)
    E.rebuild_polytopes()
    kept = [x for x in E.nodes if E.reduced(x)]
    lost = sum(sum(E.nodes[x].f.values()) for x in E.nodes if x not in kept)
    assert lost == 0, "a non-reduced node carries weight"
    gaps_before = {x: min(E.fstar(x).values()) for x in kept}
    R = _subdecomposition(E, kept)
    R.rebuild_polytopes()
    # the reduced nodes form a convex subposet
    for a in kept:
        for b in kept:
            s = E.sup([a, b])
            assert s in kept, f"sup of reduced nodes {a}, {b} is not reduced"
    new_total = R.total()
    assert new_total >= (1 - alpha) * total, "clean-up removed too much weight"
    for x in R.nodes:
        gap = min(R.fstar(x).values())
        assert gap == gaps_before[x], "gap changed when passing to reduced nodes"
        assert gap > alpha * Fraction(1, (2 * R.nodes[x].K) ** d) / size * total, "gap below the clean-up bound"
    trace = {"operation": "cleanup", "alpha": rat_str(alpha), "removed": removed,
             "dropped_nodes": [x for x in D.nodes if x not in R.nodes], "weight_before": total,
             "weight_after": new_total}
    if f is not None:
        assert_valid(R, f, "cleanup")
    return RefinementResult(R, trace)


# ------------------------------------------------------------- main loop

@dataclass
class DecompositionResult:
    decomposition: FlagDecomposition
    terminated: bool
    steps: list
    eps: Fraction
    delta: Fraction  # delta of the final (stopping) step
    delta0: Fraction
    growth: Growth
    conclusions: dict

    def to_json(self):
        return {"kind": "decomposition_run", "terminated": self.terminated, "epsilon": rat_str(self.eps),
                "delta": rat_str(self.delta), "delta0": rat_str(self.delta0), "growth": self.growth.describe(),
                "steps": self.steps, "conclusions": self.conclusions,
                "decomposition": self.decomposition.to_json()}


def default_parameters(d):
    eps = Fraction(1, 4 ** d) / 2
    return eps, eps / 3 ** (d + 1) / 2


def _pick(D, candidates):
    """Minimal node (w.r.t. the order) among candidates of minimal level; ties by creation."""
    best_level = min(D.level(x) for x in candidates)
    pool = [x for x in candidates if D.level(x) == best_level]
    minimal = [x for x in pool if not any(y != x and D.leq(y, x) for y in pool)]
    return min(minimal, key=lambda x: int(x[1:]))


def good_large_counts(D, eps):
    return {x: sum(fi.good and fi.large for fi in t.faces) for x, t in analyze_faces(D, eps).items()}


def decompose(f, p, d, eps=None, delta0=None, g=None, max_steps=200, check=True) -> DecompositionResult:
    """Refine the trivial decomposition until every large face is good and every large node complete."""
    e0, dl0 = default_parameters(d)
    eps = e0 if eps is None else to_rat(eps)
    delta0 = dl0 if delta0 is None else to_rat(delta0)
    g = g or Growth()
    fw = {tuple(int(a) % p for a in v): int(w) for v, w in _weights(f).items() if w}
    D = trivial_decomposition(fw, p, d)
    steps = []
    terminated = False
    i = 0
    delta = delta0
    monotone = []
    while i < max_steps:
        i += 1
        delta = delta0 / 3 ** ((d + 1) * i)
        table = analyze_faces(D, eps)
        bad = [(x, fi) for x, t in table.items() for fi in t.faces if fi.large and not fi.good]
        before = good_large_counts(D, eps)
        if bad:
            x = _pick(D, sorted({x for x, _ in bad}))
            fi = next(fi for y, fi in bad if y == x)
            res = refine_good(D, x, fi.vertices, fw if check else None)
            step = {"step": i, "case": 1, "node": x, "face": [vec_str(v) for v in fi.vertices]}
        else:
            incomplete = [x for x, t in table.items() if t.large_element and
                          not is_complete_element(D, x, g, delta).complete]
            if not incomplete:
                steps.append({"step": i, "case": 3, "delta": rat_str(delta)})
                terminated = True
                break
            x = _pick(D, incomplete)
            res = refine_complete(D, x, g, delta, fw if check else None)
            step = {"step": i, "case": 2, "node": x}
        cl = cleanup(res.decomposition, delta ** 2 * eps, fw if check else None)
        D = cl.decomposition
        after = good_large_counts(D, eps)
        for y, cnt in before.items():
            if y != x and y in after and y not in res.trace.get("new_nodes", {}) and after[y] < cnt:
                monotone.append({"step": i, "node": y, "before": cnt, "after": after[y]})
        step.update({"delta": rat_str(delta), "refinement": _short(res.trace), "cleanup_removed": len(
            cl.trace["removed"]), "nodes": len(D.nodes), "weight": D.total()})
        steps.append(step)
    conclusions = theorem_conclusions(D, fw, eps, g, delta, delta0) if terminated else {
        "nontermination": f"step budget of {max_steps} exhausted"}
    if terminated:
        conclusions["good_large_monotonicity_violations"] = monotone
    return DecompositionResult(D, terminated, steps, eps, delta, delta0, g, conclusions)


def _short(trace):
    return {k: v for k, v in trace.items() if k not in ("removed",)}


def theorem_conclusions(D, f, eps, g, delta, delta0):
    """Boundedness, completeness and large gap at the achieved constants."""
    rep = validate_decomposition(D, f)
    total_f = sum(f.values())
    table = analyze_faces(D, eps)
    comp_fail = []
    for x, t in table.items():
        for fi in t.faces:
            if fi.large and not fi.good:
                comp_fail.append({"node": x, "face": [vec_str(v) for v in fi.vertices], "reason": "large face not good"})
        if t.large_element:
            v = is_complete_element(D, x, g, delta)
            if not v.complete:
                comp_fail.append({"node": x, "reason": "large node not complete", "verdict": v.to_json()})
    gap_fail = []
    for x, n in D.nodes.items():
        bound = delta ** 3 * Fraction(1, (2 * n.K) ** D.d) * total_f
        if rep.gaps.get(x, 0) < bound:
            gap_fail.append({"node": x, "gap": rep.gaps.get(x), "bound": rat_str(bound)})
    return {
        "valid": rep.valid,
        "violations": rep.violations,
        "sharpness": rat_str(rep.sharpness),
        "sharp": rep.sharpness <= 2 * delta0,
        "boundedness": {"holds": rep.valid and not any(v["condition"] == "K-bounded" for v in rep.violations),
                        "K_max": max(n.K for n in D.nodes.values()), "nodes": len(D.nodes)},
        "completeness": {"holds": not comp_fail, "failures": comp_fail, "delta": rat_str(delta)},
        "large_gap": {"holds": not gap_fail, "failures": gap_fail},
    }


# --------------------------------------------------------- Helly bridge

@dataclass
class BridgeResult:
    point: FlagPoint | None
    alphas: tuple | None
    lifts: list

    def to_json(self):
        return {"point": None if self.point is None else self.point.to_json(),
                "alphas": None if self.alphas is None else list(self.alphas),
                "lifts": [list(w) for w in self.lifts]}


def lift_point(D: FlagDecomposition, q: FlagPoint):
    """Lexicographically least w in V_x with phi_x(w) = q (mod p)."""
    p, n = D.p, D.nodes[q.base]
    if any(a.denominator != 1 for a in q.coords):
        raise ValueError("point is not integral")
    ann = fp_nullspace([list(r) for r in n.dirs], D.d, p) if n.dirs else [
        tuple(int(i == j) for j in range(D.d)) for i in range(D.d)]
    rows = [list(a) for a in ann] + [list(r) for r in n.M]
    rhs = [sum(a * b for a, b in zip(row, n.base)) % p for row in ann] + [
        (int(a) - c) % p for a, c in zip(q.coords, n.c)]
    if not rows:
        return tuple(n.base)
    w = fp_lex_least_solution(rows, rhs, p, D.d)
    assert w is not None, "point has no preimage"
    return w


def flag_helly_bridge(D: FlagDecomposition, points) -> BridgeResult:
    """A nontrivial integer proper combination of the points, found through a zero-sum of their lifts."""
    p = D.p
    flag = D.flag()
    points = list(points)
    lifts = [lift_point(D, q) for q in points]
    groups = {}
    for i, w in enumerate(lifts):
        groups.setdefault(w, []).append(i)
    X = FpMultiset(p, D.d, tuple((w, len(idx) * (p - 1)) for w, idx in sorted(groups.items())))
    cert = find_zero_sum(X)
    if cert is None:
        return BridgeResult(None, None, lifts)
    alphas = [0] * len(points)
    for w, cnt in cert.chosen:
        for i in groups[w]:
            take = min(cnt, p - 1)
            alphas[i] = take
            cnt -= take
        assert cnt == 0
    assert sum(alphas) == p and max(alphas) < p
    q = convex_combine(flag, points, [Fraction(a, p) for a in alphas])
    assert flag.in_lattice(q), "bridge combination is not an integer point"
    assert flag.in_omega(q), "bridge combination is not a proper point"
    return BridgeResult(q, tuple(alphas), lifts)


# ------------------------------------------------- hollow certificate check

def wstr_verify(S, D: FlagDecomposition, oracle_limit=10 ** 7) -> dict:
    """Check a hollow-flag certificate for the set S and cross-check with the zero-sum oracle."""
    p = D.p
    S = sorted({tuple(int(a) % p for a in v) for v in S})
    flag = D.flag()
    hollow = is_hollow_flag(flag)
    minimal = flag.minimal_nodes()
    bij = {}
    bij_ok = len(minimal) == len(S)
    for x in minimal:
        n = D.nodes[x]
        if n.dirs or n.base not in S or n.base in bij:
            bij_ok = False
            continue
        bij[n.base] = x
    bij_ok = bij_ok and len(bij) == len(S)
    bounded = all(abs(a) <= n.K for n in D.nodes.values() for v in n.poly.vertices for a in v)
    out = {"kind": "wstr_report", "hollow": hollow.hollow, "hollow_violation": hollow.violation,
           "bijection": bij_ok, "map": {str(list(v)): x for v, x in bij.items()}, "K_bounded": bounded,
           "K": max(n.K for n in D.nodes.values())}
    out["certificate"] = hollow.hollow and bij_ok and bounded
    out["oracle"] = None
    if out["certificate"] and p * (p ** D.d) * len(S) <= oracle_limit:
        X = FpMultiset(p, D.d, tuple((v, p - 1) for v in S))
        out["oracle"] = find_zero_sum(X) is None
    out["accepted"] = out["certificate"] and out["oracle"] is not False
    return out
