"""Zero-sum search over Z_n^d and the EGZ / weak EGZ constants.

All searches share one bounded-knapsack table: ``reach[c]`` is the set of
partial sums (a boolean array over Z_n^d) reachable with exactly ``c``
chosen elements.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from itertools import product
from math import comb

import numpy as np

from .exact_core import FpVec, is_prime

DEFAULT_STATE_CAP = 10 ** 8


class BudgetExceeded(RuntimeError):
    """A search would exceed its configured state or node budget."""


# ------------------------------------------------------------- data types

@dataclass(frozen=True)
class FpMultiset:
    n: int
    dim: int
    elements: tuple  # ((vec, mult), ...) sorted by vec

    def __post_init__(self):
        if self.n < 2:
            raise ValueError("modulus must be at least 2")
        merged = {}
        for vec, mult in self.elements:
            vec = tuple(int(a) % self.n for a in vec)
            if len(vec) != self.dim:
                raise ValueError(f"vector {vec} has dimension {len(vec)}, expected {self.dim}")
            if mult < 1:
                raise ValueError("multiplicities must be positive")
            if vec in merged:
                raise ValueError(f"vector {vec} listed twice")
            merged[vec] = int(mult)
        object.__setattr__(self, "elements", tuple(sorted(merged.items())))

    @classmethod
    def from_vectors(cls, n, vectors, dim=None):
        counts = {}
        for v in vectors:
            v = tuple(int(a) % n for a in v)
            counts[v] = counts.get(v, 0) + 1
        if dim is None:
            dim = len(next(iter(counts))) if counts else 1
        return cls(n, dim, tuple(counts.items()))

    @property
    def size(self):
        return sum(m for _, m in self.elements)

    def vectors(self):
        return [v for v, m in self.elements for _ in range(m)]

    def to_json(self):
        return {"n": self.n, "dim": self.dim,
                "elements": [{"vec": list(v), "mult": m} for v, m in self.elements]}

    @classmethod
    def from_json(cls, obj):
        return cls(int(obj["n"]), int(obj["dim"]),
                   tuple((tuple(e["vec"]), int(e["mult"])) for e in obj["elements"]))


@dataclass(frozen=True)
class ZeroSumCertificate:
    n: int
    chosen: tuple  # ((vec, count), ...)
    input_digest: str | None = None

    def verify(self, X: FpMultiset | None = None) -> bool:
        if sum(c for _, c in self.chosen) != self.n or any(c <= 0 for _, c in self.chosen):
            return False
        if not self.chosen:
            return False
        d = len(self.chosen[0][0])
        for j in range(d):
            if sum(c * v[j] for v, c in self.chosen) % self.n:
                return False
        if X is not None:
            mult = dict(X.elements)
            if any(c > mult.get(tuple(v), 0) for v, c in self.chosen):
                return False
        return True

    def to_json(self):
        out = {"kind": "zero_sum_certificate", "n": self.n,
               "chosen": [{"vec": list(v), "count": c} for v, c in self.chosen]}
        if self.input_digest is not None:
            out["input_digest"] = self.input_digest
        return out

    @classmethod
    def from_json(cls, obj):
        return cls(int(obj["n"]), tuple((tuple(e["vec"]), int(e["count"])) for e in obj["chosen"]),
                   obj.get("input_digest"))


@dataclass(frozen=True)
class WeakEgzViolation:
    p: int
    alphas: tuple  # ((vec, alpha), ...), alpha >= 0

    def verify(self) -> bool:
        if sum(a for _, a in self.alphas) != self.p or any(a >= self.p or a < 0 for _, a in self.alphas):
            return False
        d = len(self.alphas[0][0])
        return all(sum(a * v[j] for v, a in self.alphas) % self.p == 0 for j in range(d))

    def to_json(self):
        return {"kind": "weak_egz_violation", "p": self.p,
                "alphas": [{"vec": list(v), "alpha": a} for v, a in self.alphas]}


# -------------------------------------------------------- group plumbing

class _Group:
    """Z_n^d with elements indexed in mixed radix (first coordinate fastest)."""

    def __init__(self, n, d):
        self.n, self.d = n, d
        self.size = n ** d
        self.shape = (n,) * d
        self.elements = [tuple(reversed(t)) for t in product(range(n), repeat=d)]
        self._radix = [n ** j for j in range(d)]
        # translate[v] is an index array with (S + v)[translate[v]] == S
        self._shift_cache = {}

    def index(self, v):
        return sum(int(a) % self.n * r for a, r in zip(v, self._radix))

    def shift_perm(self, vi):
        perm = self._shift_cache.get(vi)
        if perm is None:
            v = self.elements[vi]
            perm = np.array([self.index(tuple(a + b for a, b in zip(g, v))) for g in self.elements])
            self._shift_cache[vi] = perm
        return perm

    def shifted(self, arr, vi):
        # works on the last axis, so a whole reach table shifts at once
        out = np.empty_like(arr)
        out[..., self.shift_perm(vi)] = arr
        return out


def _suffix_tables(G, items, n):
    """tables[i][c] = boolean array of sums reachable from items[i:] using exactly c."""
    m = len(items)
    tables = [None] * (m + 1)
    base = np.zeros((n + 1, G.size), dtype=bool)
    base[0, 0] = True
    tables[m] = base
    for i in range(m - 1, -1, -1):
        vi, mult = items[i]
        nxt = tables[i + 1]
        cur = nxt.copy()
        layer = nxt
        for k in range(1, min(mult, n) + 1):
            layer = G.shifted(layer, vi)
            cur[k:] |= layer[: n + 1 - k]
        tables[i] = cur
    return tables


def _lex_least_choice(G, items, n):
    """Counts per item for the lexicographically least sorted n-sequence summing to 0."""
    tables = _suffix_tables(G, items, n)
    if not tables[0][n, 0]:
        return None
    counts = []
    need_c, need_s = n, 0
    for i, (vi, mult) in enumerate(items):
        chosen = None
        for k in range(min(mult, need_c), -1, -1):
            # remaining sum after taking k copies of item i
            rest = G.index(tuple(a - k * b for a, b in zip(G.elements[need_s], G.elements[vi])))
            if tables[i + 1][need_c - k, rest]:
                chosen = (k, rest)
                break
        k, need_s = chosen
        need_c -= k
        counts.append(k)
    return counts


def _state_count(X: FpMultiset, n):
    return len(X.elements) * (n + 1) * n ** X.dim


def find_zero_sum(X: FpMultiset, n: int | None = None, state_cap=DEFAULT_STATE_CAP, input_digest=None):
    """An n-element zero-sum sub-multiset of X, or None.

    Among all solutions, the one whose sorted vector sequence is
    lexicographically least is returned.
    """
    n = X.n if n is None else n
    if n < 2:
        raise ValueError("n must be at least 2")
    if X.n % n:
        raise ValueError("modulus of the multiset must be a multiple of n")
    if _state_count(X, n) > state_cap:
        raise BudgetExceeded(f"zero-sum table needs {_state_count(X, n)} states, cap is {state_cap}")
    G = _Group(n, X.dim)
    items = [(G.index(v), m) for v, m in X.elements]
    counts = _lex_least_choice(G, items, n)
    if counts is None:
        return None
    chosen = tuple((tuple(a % n for a in v), k) for (v, _), k in zip(X.elements, counts) if k)
    cert = ZeroSumCertificate(n, chosen, input_digest)
    assert cert.verify()
    return cert


def weak_egz_check(vectors, p: int):
    """A combination sum(alpha v) = 0 with sum(alpha) = p and every alpha < p, or None."""
    if not is_prime(p):
        raise ValueError(f"{p} is not prime")
    vecs = [tuple(v.coords) if isinstance(v, FpVec) else tuple(int(a) % p for a in v) for v in vectors]
    if len(set(vecs)) != len(vecs):
        raise ValueError("weak EGZ sets must consist of distinct vectors")
    if not vecs:
        return None
    X = FpMultiset(p, len(vecs[0]), tuple((v, p - 1) for v in vecs))
    cert = find_zero_sum(X, p)
    if cert is None:
        return None
    got = dict(cert.chosen)
    return WeakEgzViolation(p, tuple((v, got.get(v, 0)) for v in vecs))


# ---------------------------------------------------------- affine group

def _invertible_matrices(n, d):
    from math import gcd
    mats = []
    for entries in product(range(n), repeat=d * d):
        M = [entries[i * d:(i + 1) * d] for i in range(d)]
        if gcd(_det(M) % n, n) == 1:
            mats.append(M)
    return mats


def _det(M):
    d = len(M)
    if d == 1:
        return M[0][0]
    return sum((-1) ** j * M[0][j] * _det([row[:j] + row[j + 1:] for row in M[1:]]) for j in range(d))


def canonical_form(vectors, n):
    """Lexicographically least sorted image of a multiset under x -> Mx + t."""
    vectors = [tuple(v) for v in vectors]
    if not vectors:
        return ()
    d = len(vectors[0])
    if n ** (d * d) > 10 ** 5:
        return tuple(sorted(vectors))
    best = None
    for M in _invertible_matrices(n, d):
        img = [tuple(sum(M[i][j] * v[j] for j in range(d)) % n for i in range(d)) for v in vectors]
        for t in set(img):
            cand = tuple(sorted(tuple((a - b) % n for a, b in zip(w, t)) for w in img))
            if best is None or cand < best:
                best = cand
    return best


# ------------------------------------------------------------- constants

@dataclass
class _SearchState:
    best_size: int = -1
    best: tuple = ()
    nodes: int = 0
    node_cap: int = DEFAULT_STATE_CAP
    stats: dict = field(default_factory=dict)


def _add_copies(G, reach, vi, k, n):
    """reach after adding k copies of element vi (each usable independently)."""
    out = reach.copy()
    layer = reach
    for j in range(1, k + 1):
        layer = G.shifted(layer, vi)
        out[j:] |= layer[: n + 1 - j]
    return out


def egz_constant(n: int, d: int, state_cap=DEFAULT_STATE_CAP):
    """(s, extremal multiset) with s = 1 + largest size of a multiset in Z_n^d
    without an n-term zero sum.

    Exhaustive search over multiplicity vectors. Translation invariance lets
    us assume 0 carries the largest multiplicity.
    """
    if n < 2 or d < 1:
        raise ValueError("need n >= 2 and d >= 1")
    G = _Group(n, d)
    if G.size * (n + 1) > state_cap:
        raise BudgetExceeded("group too large for the configured budget")
    st = _SearchState(node_cap=state_cap)
    reach0 = np.zeros((n + 1, G.size), dtype=bool)
    reach0[0, 0] = True
    mults = [0] * G.size

    def dfs(i, reach, size, cap):
        st.nodes += 1
        if st.nodes * G.size > st.node_cap:
            raise BudgetExceeded("egz search exceeded its node budget")
        if size > st.best_size:
            st.best_size = size
            st.best = tuple(mults)
        if i == G.size or size + cap * (G.size - i) <= st.best_size:
            return
        for k in range(cap, -1, -1):
            if k:
                nr = _add_copies(G, reach, i, k, n)
                if nr[n, 0]:
                    continue
            else:
                nr = reach
            mults[i] = k
            dfs(i + 1, nr, size + k, cap)
            mults[i] = 0

    for k0 in range(n - 1, 0, -1):
        if k0 * G.size <= st.best_size:
            break
        r = _add_copies(G, reach0, 0, k0, n)
        mults[0] = k0
        dfs(1, r, k0, k0)
        mults[0] = 0
    witness = [G.elements[i] for i, m in enumerate(st.best) for _ in range(m)]
    canon = canonical_form(witness, n)
    return st.best_size + 1, FpMultiset.from_vectors(n, canon, d)


def weak_egz_constant(p: int, d: int, state_cap=DEFAULT_STATE_CAP):
    """(w, maximal set) for F_p^d, searching distinct-vector sets containing 0.

    The search stops once a set reaches the a priori bound C(2d-1, d) + 1.
    """
    if not is_prime(p):
        raise ValueError(f"{p} is not prime")
    G = _Group(p, d)
    bound = comb(2 * d - 1, d) + 1
    st = _SearchState(node_cap=state_cap)
    reach0 = np.zeros((p + 1, G.size), dtype=bool)
    reach0[0, 0] = True
    chosen = []

    def dfs(start, reach):
        st.nodes += 1
        if st.nodes * G.size > st.node_cap:
            raise BudgetExceeded("weak EGZ search exceeded its node budget")
        if len(chosen) > st.best_size:
            st.best_size = len(chosen)
            st.best = tuple(chosen)
        if st.best_size >= bound:
            return
        for i in range(start, G.size):
            if len(chosen) + (G.size - i) <= st.best_size:
                return
            nr = _add_copies(G, reach, i, p - 1, p)
            if nr[p, 0]:
                continue
            chosen.append(i)
            dfs(i + 1, nr)
            chosen.pop()
            if st.best_size >= bound:
                return

    chosen.append(0)
    dfs(1, _add_copies(G, reach0, 0, p - 1, p))
    vecs = [G.elements[i] for i in st.best]
    canon = canonical_form(vecs, p)
    return st.best_size, [FpVec(p, v) for v in canon]


def boolean_cube_multiset(n: int, d: int) -> FpMultiset:
    """{0,1}^d with every point repeated n-1 times."""
    return FpMultiset(n, d, tuple((v, n - 1) for v in product((0, 1), repeat=d)))


def hollow_to_weak_egz(P, p: int):
    """Vertices of a hollow polytope in lattice coordinates, reduced mod p.

    Returns (vectors, is_weak_egz) where the flag records whether
    weak_egz_check found no violation at this p.
    """
    from .polytopes import is_hollow, lattice_coordinates

    if not is_hollow(P).hollow:
        raise ValueError("polytope is not hollow")
    coords = lattice_coordinates(P)
    vecs = [FpVec(p, tuple(int(a) for a in c)) for c in coords]
    if len(set(vecs)) != len(vecs):
        # two vertices collide mod p, so p is below the threshold for P
        return vecs, False
    return vecs, weak_egz_check(vecs, p) is None
