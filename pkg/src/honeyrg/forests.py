"""Forest and jungle interpolation, Gallavotti-Nicolo trees, multi-arch systems and rings.

All power-counting identities are checked on integer exponents of ``gamma``.
Interpolation integrals over the weakening parameters are evaluated exactly:
the integrand is a polynomial of minima of the ``w`` variables, which becomes
a polynomial on each ordering simplex; a Duffy map sends every simplex to the
unit cube where a Gauss-Legendre rule of sufficient degree is exact.
"""

import itertools
import json
import math
from dataclasses import dataclass, field

import networkx as nx
import numpy as np

from .quadrature import gauss_legendre

MAX_FOREST_N = 7


# ----------------------------------------------------------------------------
# forests

def pairs(n):
    """Links of ``{0..n-1}`` in lexicographic order."""
    return list(itertools.combinations(range(n), 2))


class _DSU:
    def __init__(self, n):
        self.p = list(range(n))

    def find(self, a):
        while self.p[a] != a:
            self.p[a] = self.p[self.p[a]]
            a = self.p[a]
        return a

    def union(self, a, b):
        a, b = self.find(a), self.find(b)
        if a == b:
            return False
        self.p[b] = a
        return True


@dataclass(frozen=True)
class Forest:
    """Acyclic edge set over ``n`` vertices (edges are sorted pairs)."""

    n: int
    edges: tuple

    def __post_init__(self):
        d = _DSU(self.n)
        for a, b in self.edges:
            if not (0 <= a < b < self.n):
                raise ValueError(f"bad edge {(a, b)}")
            if not d.union(a, b):
                raise ValueError("edge set contains a cycle")

    @property
    def is_spanning_tree(self):
        return len(self.edges) == self.n - 1

    def components(self):
        d = _DSU(self.n)
        for a, b in self.edges:
            d.union(a, b)
        return [d.find(i) for i in range(self.n)]

    def path(self, i, j):
        """Edges on the unique path from ``i`` to ``j`` (``None`` if disconnected)."""
        adj = {v: [] for v in range(self.n)}
        for a, b in self.edges:
            adj[a].append(b)
            adj[b].append(a)
        prev = {i: None}
        stack = [i]
        while stack:
            v = stack.pop()
            for u in adj[v]:
                if u not in prev:
                    prev[u] = v
                    stack.append(u)
        if j not in prev:
            return None
        out = []
        while j != i:
            a, b = sorted((j, prev[j]))
            out.append((a, b))
            j = prev[j]
        return out


def enumerate_forests(n):
    """All forests on ``n`` labelled vertices, the empty one included."""
    if not 1 <= n <= MAX_FOREST_N:
        raise ValueError(f"n must be in [1, {MAX_FOREST_N}]")
    links = pairs(n)
    out = []

    def rec(start, chosen, parent):
        out.append(Forest(n, tuple(chosen)))
        for idx in range(start, len(links)):
            a, b = links[idx]
            p = list(parent)

            def find(x):
                while p[x] != x:
                    x = p[x]
                return x
            ra, rb = find(a), find(b)
            if ra == rb:
                continue
            p[rb] = ra
            rec(idx + 1, chosen + [(a, b)], p)

    rec(0, [], list(range(n)))
    return out


def enumerate_spanning_trees(n):
    return [f for f in enumerate_forests(n) if f.is_spanning_tree]


def weakening_matrix(forest, w, previous=None):
    """Matrix of weakening parameters of ``forest`` for edge weights ``w``.

    Parameters
    ----------
    forest : Forest
    w : mapping edge -> float in [0, 1] (or sequence aligned with ``forest.edges``)
    previous : Forest, optional
        Lower layer of a jungle; pairs it connects get 1 and only the new edges
        of ``forest`` enter the infimum.
    """
    if not isinstance(w, dict):
        w = dict(zip(forest.edges, w))
    n = forest.n
    X = np.eye(n)
    prev_comp = previous.components() if previous is not None else None
    new = set(forest.edges) - (set(previous.edges) if previous is not None else set())
    for i in range(n):
        for j in range(i + 1, n):
            if prev_comp is not None and prev_comp[i] == prev_comp[j]:
                X[i, j] = X[j, i] = 1.0
                continue
            p = forest.path(i, j)
            if p is None:
                continue
            X[i, j] = X[j, i] = min(w[e] for e in p if e in new)
    return X


# ----------------------------------------------------------------------------
# polynomials in link variables

class EdgePolynomial:
    """Polynomial with real coefficients in ``nvars`` variables.

    ``terms`` maps exponent tuples to coefficients.
    """

    def __init__(self, nvars, terms=None):
        self.nvars = nvars
        self.terms = {}
        for k, v in (terms or {}).items():
            k = tuple(int(e) for e in k)
            if len(k) != nvars:
                raise ValueError("exponent length mismatch")
            if v != 0:
                self.terms[k] = self.terms.get(k, 0.0) + float(v)

    @classmethod
    def constant(cls, nvars, c):
        return cls(nvars, {(0,) * nvars: c})

    @classmethod
    def variable(cls, nvars, i):
        e = [0] * nvars
        e[i] = 1
        return cls(nvars, {tuple(e): 1.0})

    def __add__(self, other):
        if not isinstance(other, EdgePolynomial):
            other = EdgePolynomial.constant(self.nvars, other)
        out = dict(self.terms)
        for k, v in other.terms.items():
            out[k] = out.get(k, 0.0) + v
        return EdgePolynomial(self.nvars, out)

    __radd__ = __add__

    def __mul__(self, other):
        if not isinstance(other, EdgePolynomial):
            return EdgePolynomial(self.nvars, {k: v * other for k, v in self.terms.items()})
        out = {}
        for k1, v1 in self.terms.items():
            for k2, v2 in other.terms.items():
                k = tuple(a + b for a, b in zip(k1, k2))
                out[k] = out.get(k, 0.0) + v1 * v2
        return EdgePolynomial(self.nvars, out)

    __rmul__ = __mul__

    @property
    def degree(self):
        return max((sum(k) for k in self.terms), default=0)

    def derivative(self, i):
        out = {}
        for k, v in self.terms.items():
            if k[i] > 0:
                kk = list(k)
                kk[i] -= 1
                out[tuple(kk)] = out.get(tuple(kk), 0.0) + v * k[i]
        return EdgePolynomial(self.nvars, out)

    def __call__(self, x):
        """Evaluate at ``x`` of shape ``(..., nvars)``."""
        x = np.asarray(x, dtype=float)
        out = np.zeros(x.shape[:-1])
        for k, v in self.terms.items():
            t = np.full(x.shape[:-1], v)
            for i, e in enumerate(k):
                if e:
                    t = t * x[..., i] ** e
            out = out + t
        return out


def random_polynomial(nvars, degree, rng, nterms=8):
    """Random polynomial of total degree at most ``degree``."""
    terms = {}
    for _ in range(nterms):
        d = int(rng.integers(0, degree + 1))
        e = np.zeros(nvars, dtype=int)
        for i in rng.integers(0, nvars, size=d):
            e[i] += 1
        terms[tuple(e)] = terms.get(tuple(e), 0.0) + rng.normal()
    return EdgePolynomial(nvars, terms)


def product_polynomial(a):
    """``prod_l (1 + a_l x_l)``."""
    p = EdgePolynomial.constant(len(a), 1.0)
    for i, ai in enumerate(a):
        p = p * (EdgePolynomial.variable(len(a), i) * ai + 1.0)
    return p


def truncated_exp_polynomial(coef, order=3):
    """Taylor polynomial of ``exp(sum_l c_l x_l)`` to the given order."""
    lin = EdgePolynomial(len(coef), {})
    for i, c in enumerate(coef):
        lin = lin + EdgePolynomial.variable(len(coef), i) * c
    out = EdgePolynomial.constant(len(coef), 1.0)
    term = EdgePolynomial.constant(len(coef), 1.0)
    for k in range(1, order + 1):
        term = term * lin * (1.0 / k)
        out = out + term
    return out


# ----------------------------------------------------------------------------
# forest and jungle formulas

def _simplex_rule(k, degree):
    """Nodes and weights for the unit cube in ``w`` split by orderings.

    Returns a list of ``(W, weight)`` with ``W`` of shape ``(q, k)``.  Exact for
    polynomials of degree ``<= degree`` in each ordered variable.
    """
    if k == 0:
        return [(np.zeros((1, 0)), np.ones(1))]
    m = (degree + k) // 2 + 1
    x, wg = gauss_legendre(m)
    u1, wu = 0.5 * (x + 1), 0.5 * wg
    grids = np.meshgrid(*([u1] * k), indexing="ij")
    U = np.stack([g.ravel() for g in grids], axis=1)
    WU = np.prod(np.stack(np.meshgrid(*([wu] * k), indexing="ij")), axis=0).ravel()
    # w_(k) = u_k, w_(k-1) = u_k u_{k-1}, ... ; jacobian prod u_i^{i-1}
    cum = np.cumprod(U[:, ::-1], axis=1)[:, ::-1]
    jac = np.prod(U ** np.arange(k)[None, :], axis=1)
    out = []
    for perm in itertools.permutations(range(k)):
        W = np.empty_like(cum)
        W[:, list(perm)] = cum
        out.append((W, WU * jac))
    return out


def _x_of_w(forest, W, pair_index, previous=None):
    """Weakened link variables at quadrature nodes ``W`` (shape ``(q, |F|)``)."""
    q = W.shape[0]
    X = np.zeros((q, len(pair_index)))
    eidx = {e: i for i, e in enumerate(forest.edges)}
    prev_comp = previous.components() if previous is not None else None
    new = set(forest.edges) - (set(previous.edges) if previous is not None else set())
    for (i, j), col in pair_index.items():
        if prev_comp is not None and prev_comp[i] == prev_comp[j]:
            X[:, col] = 1.0
            continue
        p = forest.path(i, j)
        if p is None:
            continue
        cols = [eidx[e] for e in p if e in new]
        X[:, col] = W[:, cols].min(axis=1)
    return X


def bkar_evaluate(f, n, check=True):
    """Right-hand side of the forest formula for a polynomial ``f`` of the links.

    Parameters
    ----------
    f : EdgePolynomial
        Polynomial in ``n (n-1) / 2`` link variables ordered as :func:`pairs`.
    n : int

    Returns
    -------
    (rhs, lhs) : floats, the forest sum and ``f(1)``.
    """
    P = pairs(n)
    if f.nvars != len(P):
        raise ValueError("polynomial must have one variable per link")
    pidx = {p: i for i, p in enumerate(P)}
    total = []
    for F in enumerate_forests(n):
        g = f
        for e in F.edges:
            g = g.derivative(pidx[e])
        if not g.terms:
            continue
        for W, wt in _simplex_rule(len(F.edges), f.degree):
            X = _x_of_w(F, W, pidx)
            total.append(float(np.dot(wt, g(X))))
    return math.fsum(total), float(f(np.ones(len(P))))


@dataclass(frozen=True)
class Jungle:
    """Nested forests ``F_1 <= ... <= F_m`` on the same vertex set."""

    layers: tuple

    def __post_init__(self):
        for a, b in zip(self.layers, self.layers[1:]):
            if not set(a.edges) <= set(b.edges):
                raise ValueError("jungle layers must be nested")


def enumerate_jungles(n, m):
    """All ``m``-layer jungles over ``n`` vertices."""
    forests = enumerate_forests(n)
    by_set = [(set(F.edges), F) for F in forests]
    out = []

    def rec(chain):
        if len(chain) == m:
            out.append(Jungle(tuple(chain)))
            return
        base = set(chain[-1].edges) if chain else set()
        for s, F in by_set:
            if base <= s:
                rec(chain + [F])
    rec([])
    return out


def bkar_jungle_evaluate(f, n, m):
    """Layered forest formula for ``f`` of ``m`` blocks of link variables.

    Variable ``k * |P_n| + i`` is link ``i`` of layer ``k``.  Layer ``k`` is
    differentiated along ``F_k minus F_{k-1}`` and evaluated at the weakening
    matrix of ``F_k`` relative to ``F_{k-1}``.
    """
    P = pairs(n)
    nP = len(P)
    if f.nvars != m * nP:
        raise ValueError("polynomial must have m blocks of link variables")
    pidx = {p: i for i, p in enumerate(P)}
    total = []
    for J in enumerate_jungles(n, m):
        top = J.layers[-1]
        g = f
        prev = None
        for k, F in enumerate(J.layers):
            new = set(F.edges) - (set(prev.edges) if prev is not None else set())
            for e in sorted(new):
                g = g.derivative(k * nP + pidx[e])
            prev = F
        if not g.terms:
            continue
        for W, wt in _simplex_rule(len(top.edges), f.degree):
            # parameters live on the edges of the final forest
            eidx = {e: i for i, e in enumerate(top.edges)}
            X = np.zeros((W.shape[0], m * nP))
            prev = None
            for k, F in enumerate(J.layers):
                Wk = W[:, [eidx[e] for e in F.edges]] if F.edges else np.zeros((W.shape[0], 0))
                X[:, k * nP:(k + 1) * nP] = _x_of_w(F, Wk, pidx, prev)
                prev = F
            total.append(float(np.dot(wt, g(X))))
    return math.fsum(total), float(f(np.ones(m * nP)))


# ----------------------------------------------------------------------------
# Gallavotti-Nicolo trees

class MalformedTree(ValueError):
    pass


@dataclass
class GNNode:
    r: int
    k: int
    vertices: frozenset
    n_ext: int
    children: list = field(default_factory=list)
    parent: int = None


@dataclass
class GNTree:
    """Multiscale structure over ``n`` bare and counter-term vertices.

    ``fields`` lists ``(vertex, r_f)``; ``tree_lines`` lists ``(u, v, r_l)``;
    ``nodes`` are the connected components ``G_r^k`` of the forests
    ``F_r = {l : r_l <= r}`` for ``r = 0..rmax``.  External fields of the whole
    graph carry ``r_f = rmax + 1``.  A field is external to every component at
    levels ``r < r_f`` that contains its vertex.
    """

    n: int
    rmax: int
    valence: tuple
    fields: list
    tree_lines: list
    loop_lines: list = field(default_factory=list)
    nodes: list = field(default_factory=list)

    def __post_init__(self):
        if not self.nodes:
            self.nodes = self._build_nodes()
        self.validate()

    def components_at(self, r):
        d = _DSU(self.n)
        for u, v, rl in self.tree_lines:
            if rl <= r:
                d.union(u, v)
        groups = {}
        for v in range(self.n):
            groups.setdefault(d.find(v), set()).add(v)
        return sorted((frozenset(g) for g in groups.values()), key=min)

    def _build_nodes(self):
        nodes = []
        prev = {}
        for r in range(self.rmax + 1):
            cur = {}
            for k, comp in enumerate(self.components_at(r)):
                ne = sum(1 for v, rf in self.fields if v in comp and rf > r)
                idx = len(nodes)
                nodes.append(GNNode(r, k + 1, comp, ne))
                cur[comp] = idx
                for c, ci in prev.items():
                    if c <= comp:
                        nodes[idx].children.append(ci)
                        nodes[ci].parent = idx
            prev = cur
        return nodes

    def c(self, r):
        return sum(1 for nd in self.nodes if nd.r == r)

    def validate(self):
        counts = [0] * self.n
        for v, rf in self.fields:
            if not 0 <= rf <= self.rmax + 1:
                raise MalformedTree("field index out of range")
            counts[v] += 1
        if tuple(counts) != tuple(self.valence):
            raise MalformedTree("field counts do not match vertex valences")
        if len(self.tree_lines) != self.n - 1:
            raise MalformedTree("spanning tree needs n - 1 lines")
        d = _DSU(self.n)
        for u, v, rl in self.tree_lines:
            if not d.union(u, v):
                raise MalformedTree("tree lines contain a cycle")
            if not 0 <= rl <= self.rmax:
                raise MalformedTree("tree line scale out of range")
        for nd in self.nodes:
            if nd.n_ext % 2:
                raise MalformedTree(f"odd number of external fields at node r={nd.r}")
            for ci in nd.children:
                if self.nodes[ci].r >= nd.r:
                    raise MalformedTree("child index must be below its parent")
            inner = [rl for u, v, rl in self.tree_lines if u in nd.vertices and v in nd.vertices]
            if any(rl > nd.r for rl in inner):
                raise MalformedTree("internal tree line above node scale")
        roots = [nd for nd in self.nodes if nd.parent is None and nd.r == self.rmax]
        if len(roots) != 1 or len(roots[0].vertices) != self.n:
            raise MalformedTree("root must be the unique component at rmax")

    def to_dict(self):
        return {
            "n": self.n, "rmax": self.rmax, "valence": list(self.valence),
            "fields": [list(x) for x in self.fields],
            "tree_lines": [list(x) for x in self.tree_lines],
            "loop_lines": [list(x) for x in self.loop_lines],
            "nodes": [{"r": nd.r, "k": nd.k, "vertices": sorted(nd.vertices), "n_ext": nd.n_ext,
                       "children": nd.children} for nd in self.nodes],
        }


def power_counting_identity_check(t):
    """Integer exponents of both identities.

    Returns ``(lhs1, rhs1, lhs2, rhs2)``: ``lhs1 = -sum_f r_f`` and
    ``rhs1 = -sum_{r,k} |e(G_r^k)|`` are exponents of ``gamma^{1/2}``;
    ``lhs2 = 2 sum_l r_l`` and ``rhs2 = -2 rmax - 2 + 2 sum_r c(r)`` are
    exponents of ``gamma``.
    """
    lhs1 = -sum(rf for _, rf in t.fields)
    rhs1 = -sum(nd.n_ext for nd in t.nodes)
    lhs2 = 2 * sum(rl for _, _, rl in t.tree_lines)
    rhs2 = -2 * t.rmax - 2 + 2 * sum(t.c(r) for r in range(t.rmax + 1))
    return lhs1, rhs1, lhs2, rhs2


def two_vertex_tree(r=1, rmax=1):
    """Two bare vertices joined by one tree line at scale ``r``."""
    fields = [(0, r), (1, r)] + [(v, rmax + 1) for v in (0, 1) for _ in range(3)]
    return GNTree(2, rmax, (4, 4), fields, [(0, 1, r)])


def enumerate_gn_trees(n, rmax, valence=None):
    """All GN trees from spanning trees of ``K_n`` with scale labels in ``[0, rmax]``.

    Each tree line carries its two fields at ``r_l``; every other field is
    external (``rmax + 1``).  Size ``n^{n-2} (rmax + 1)^{n-1}``; ``n <= 5``,
    ``rmax <= 6``.
    """
    if not 1 <= n <= 5 or not 0 <= rmax <= 6:
        raise ValueError("need 1 <= n <= 5 and 0 <= rmax <= 6")
    valence = tuple(valence or [4] * n)
    out = []
    trees = enumerate_spanning_trees(n) if n > 1 else [Forest(1, ())]
    for T in trees:
        for labels in itertools.product(range(rmax + 1), repeat=n - 1):
            lines = [(u, v, r) for (u, v), r in zip(T.edges, labels)]
            used = [0] * n
            fields = []
            for u, v, r in lines:
                fields += [(u, r), (v, r)]
                used[u] += 1
                used[v] += 1
            if any(used[v] > valence[v] for v in range(n)):
                continue
            fields += [(v, rmax + 1) for v in range(n) for _ in range(valence[v] - used[v])]
            out.append(GNTree(n, rmax, valence, fields, lines))
    return out


def random_gn_tree(n, rmax, rng, n_counter=0, quadruped=False):
    """Random GN tree from nested partitions with explicit fields.

    A node at scale ``r > 0`` splits its vertices into 2..4 children;
    multi-vertex children get a scale drawn in ``[0, r)``, and a node at
    scale 0 splits into single vertices.  Children are joined by a random
    spanning tree of lines at scale ``r`` and a random number of loop lines at
    scale ``r``; leftover fields at the root are external (``rmax + 1``).

    Parameters
    ----------
    n : int
        Total number of vertices (at most 6); the last ``n_counter`` are
        two-field counter-term vertices, the others four-field bare vertices.
    rmax : int
        Root scale (at most 8).
    quadruped : bool
        Every multi-vertex node, the root included, has four external fields.
    """
    if not 1 <= n <= 6 or not 0 <= rmax <= 8:
        raise ValueError("need 1 <= n <= 6 and 0 <= rmax <= 8")
    if quadruped and n_counter:
        raise ValueError("quadruped trees contain bare vertices only")
    valence = tuple([4] * (n - n_counter) + [2] * n_counter)

    for _ in range(500):
        fields, tree_lines, loop_lines = [], [], []

        def grow(verts, r):
            if len(verts) == 1:
                return [verts[0]] * valence[verts[0]]
            # at scale 0 the children are the vertices themselves
            kids = [[v] for v in verts] if r == 0 else _random_partition(verts, rng)
            slots = []
            for kid in kids:
                s = grow(kid, int(rng.integers(0, r))) if len(kid) > 1 else grow(kid, 0)
                if not s:
                    raise _Retry()
                slots.append([int(x) for x in rng.permutation(s)])
            order = rng.permutation(len(slots))
            for pos in range(1, len(slots)):
                a = order[pos]
                cand = [order[q] for q in range(pos) if slots[order[q]]]
                if not slots[a] or not cand:
                    raise _Retry()
                b = cand[int(rng.integers(len(cand)))]
                u, v = slots[a].pop(), slots[b].pop()
                tree_lines.append((min(u, v), max(u, v), r))
                fields.extend([(u, r), (v, r)])
            rest = [x for s in slots for x in s]
            rest = [int(x) for x in rng.permutation(rest)]
            if quadruped:
                nloop = (len(rest) - 4) // 2
                if nloop < 0:
                    raise _Retry()
            else:
                nloop = int(rng.integers(0, len(rest) // 2 + 1))
            for _ in range(nloop):
                u, v = rest.pop(), rest.pop()
                loop_lines.append((u, v, r))
                fields.extend([(u, r), (v, r)])
            return rest

        try:
            rest = grow(list(range(n)), rmax)
        except _Retry:
            continue
        fields.extend((v, rmax + 1) for v in rest)
        return GNTree(n, rmax, valence, fields, tree_lines, loop_lines)
    raise RuntimeError("could not draw a tree")


class _Retry(Exception):
    pass


def _random_partition(verts, rng):
    k = int(rng.integers(2, min(4, len(verts)) + 1))
    labels = np.concatenate([np.arange(k), rng.integers(0, k, size=len(verts) - k)])
    labels = rng.permutation(labels)
    return [[v for v, l in zip(verts, labels) if l == c] for c in range(k)]


def distinct_nodes(t):
    """GN nodes with repeated components (same vertex set and fields) merged."""
    seen = {}
    for i, nd in enumerate(t.nodes):
        key = nd.vertices
        if key not in seen:
            seen[key] = i
    return [t.nodes[i] for i in sorted(seen.values())]


def classify_nodes(t):
    """Split multi-vertex nodes by external-field count.

    Returns ``(bipeds, quadrupeds, convergent)`` lists of distinct nodes;
    nodes with no external field (vacuum) and single vertices are omitted.
    """
    b, q, c = [], [], []
    for nd in distinct_nodes(t):
        if len(nd.vertices) < 2 or nd.n_ext == 0:
            continue
        {2: b, 4: q}.get(nd.n_ext, c).append(nd)
    return b, q, c


def quadruped_recursion_check(t):
    """``(sum_q d_q, |Q| + n - 1)`` for a quadruped tree.

    ``d_q`` counts the maximal sub-quadrupeds of ``q``: nearest quadruped
    descendants (distinct components) and bare vertices not inside them.
    """
    _, Q, _ = classify_nodes(t)
    sets = [nd.vertices for nd in Q]
    total = 0
    for s in sets:
        below = [u for u in sets if u < s]
        maximal = [u for u in below if not any(u < w for w in below)]
        covered = set().union(*maximal) if maximal else set()
        total += len(maximal) + len(s - covered)
    return total, len(Q) + t.n - 1


# ----------------------------------------------------------------------------
# multi-arch systems

@dataclass(frozen=True)
class ArchSystem:
    """Ordered arches ``(start packet, arrival packet)`` over packets ``1..p``."""

    p: int
    arches: tuple

    def __post_init__(self):
        reach = 1
        for a, k in self.arches:
            if not (1 <= a <= reach < k <= self.p):
                raise ValueError(f"invalid arch {(a, k)} after reaching {reach}")
            reach = k
        if self.arches and reach != self.p:
            raise ValueError("arch system must arrive at the last packet")

    @property
    def q(self):
        """Interpolation exponents: arches ``r > t`` starting inside block ``t - 1``."""
        out = []
        reach = [1] + [k for _, k in self.arches]
        for t in range(len(self.arches)):
            out.append(sum(1 for a, _ in self.arches[t + 1:] if a <= reach[t]))
        return tuple(out)

    @property
    def nesting(self):
        return tuple(qt > 0 for qt in self.q)

    def to_dict(self):
        return {"p": self.p, "arches": [list(a) for a in self.arches], "q": list(self.q)}


def enumerate_arch_systems(p):
    """All complete arch systems over ``p`` packets (``p <= 6``)."""
    if not 2 <= p <= 6:
        raise ValueError("p must be in [2, 6]")
    out = []

    def rec(reach, arches):
        if reach == p:
            out.append(ArchSystem(p, tuple(arches)))
            return
        for a in range(1, reach + 1):
            for k in range(reach + 1, p + 1):
                rec(k, arches + [(a, k)])
    rec(1, [])
    return out


def interpolation_weight(a):
    """``prod_t int_0^1 s^{q_t} ds = prod_t 1 / (q_t + 1)``."""
    return float(np.prod([1.0 / (qt + 1) for qt in a.q])) if a.arches else 1.0


def numeric_interpolation_weight(a, nodes=8):
    """Tensor Gauss-Legendre integral of ``prod_t s_t^{q_t}`` over the unit cube."""
    m = len(a.arches)
    if m == 0:
        return 1.0
    x, w = gauss_legendre(nodes)
    s, ws = 0.5 * (x + 1), 0.5 * w
    total = 1.0
    for qt in a.q:
        total *= float(np.dot(ws, s ** qt))
    return total


def gram_packet_matrix(sizes, rng, dim=None, coupling=1.0):
    """Random Gram matrix ``<A_f, B_g>`` with fields grouped into packets.

    Returns ``(M, packet)`` where ``packet[i]`` is the packet (1-based) of
    row ``i`` and column ``i``.  ``coupling`` scales cross-packet entries;
    0 gives a block-diagonal matrix.
    """
    packet = np.repeat(np.arange(1, len(sizes) + 1), sizes)
    n = packet.size
    dim = dim or n
    A, B = rng.normal(size=(n, dim)), rng.normal(size=(n, dim))
    M = A @ B.T / np.sqrt(dim)
    cross = packet[:, None] != packet[None, :]
    M[cross] *= coupling
    return M, packet


def _interp_factor(packet_r, packet_c, blocks):
    """Entry multipliers as monomials: exponent of each ``s_t`` per entry."""
    E = np.zeros((len(blocks),) + (packet_r.size, packet_c.size), dtype=int)
    for t, B in enumerate(blocks):
        inr = packet_r[:, None] <= B
        inc = packet_c[None, :] <= B
        E[t] = inr ^ inc
    return E


def arch_expansion_terms(M, packet, monotone=True, max_arches=None):
    """Expand ``det M`` along the multi-arch interpolation.

    Each term is ``(kind, arches, value)`` where ``kind`` is 'reducible'
    (first interpolation at 0), 'partial' (a later interpolation at 0) or
    'complete' (the arches reach the last packet).  With ``monotone=False``
    arches may also arrive inside the current block (negative control).
    """
    M = np.asarray(M, dtype=float)
    n = M.shape[0]
    p = int(packet.max())
    max_arches = p if max_arches is None else max_arches
    terms = []

    def det_at(replaced, blocks, svals):
        # matrix with interpolated entries and replaced rows
        Ms = np.broadcast_to(M, (svals.shape[0], n, n)).copy()
        E = _interp_factor(packet, packet, blocks)
        for t in range(len(blocks)):
            Ms *= svals[:, t, None, None] ** E[t][None]
        for i, j in replaced:
            Ms[:, i, :] = 0.0
            Ms[:, i, j] = 1.0
        return np.linalg.det(Ms)

    def line_factor(i, j, blocks, svals):
        # d/ds_t of the chosen entry after t interpolations, divided by M_ij
        E = _interp_factor(packet, packet, blocks)
        t = len(blocks) - 1
        f = np.ones(svals.shape[0])
        for u in range(t):
            f *= svals[:, u] ** E[u][i, j]
        return f * M[i, j]

    def integrate(replaced, blocks, chosen, s_last_zero):
        m = len(blocks) - (1 if s_last_zero else 0)
        nn = n + 2
        x, w = gauss_legendre(nn)
        s1, w1 = 0.5 * (x + 1), 0.5 * w
        if m == 0:
            S = np.zeros((1, len(blocks)))
            W = np.ones(1)
        else:
            grids = np.meshgrid(*([s1] * m), indexing="ij")
            S = np.stack([g.ravel() for g in grids], axis=1)
            W = np.prod(np.stack(np.meshgrid(*([w1] * m), indexing="ij")), axis=0).ravel()
            if s_last_zero:
                S = np.concatenate([S, np.zeros((S.shape[0], 1))], axis=1)
        val = det_at(replaced, blocks, S)
        for t, (i, j) in enumerate(chosen):
            val = val * line_factor(i, j, blocks[:t + 1], S[:, :t + 1])
        return float(np.dot(W, val))

    def rec(reach, blocks, replaced, chosen, arches):
        blocks_next = blocks + [reach]
        # term where this interpolation parameter is set to zero
        kind = "reducible" if not blocks else "partial"
        terms.append((kind, tuple(arches), integrate(replaced, blocks_next, chosen, True)))
        if len(arches) >= max_arches:
            return
        used_r = {i for i, _ in replaced}
        used_c = {j for _, j in replaced}
        for i in range(n):
            for j in range(n):
                if i in used_r or j in used_c:
                    continue
                a, b = packet[i], packet[j]
                inside_i, inside_j = a <= reach, b <= reach
                if inside_i == inside_j:
                    if monotone or a == b or not inside_i:
                        continue
                    start, arrive = min(a, b), max(a, b)
                else:
                    start, arrive = (a, b) if inside_i else (b, a)
                nreach = max(reach, arrive)
                newc = chosen + [(i, j)]
                newa = arches + [(int(start), int(arrive))]
                newr = replaced + [(i, j)]
                if nreach == p:
                    terms.append(("complete", tuple(newa), integrate(newr, blocks_next, newc, False)))
                else:
                    rec(nreach, blocks_next, newr, newc, newa)

    rec(1, [], [], [], [])
    return terms


def arch_determinant_oracle(M, packet, monotone=True):
    """``(det M, sum of expansion terms, max abs error)``."""
    terms = arch_expansion_terms(M, packet, monotone)
    lhs = float(np.linalg.det(M))
    rhs = math.fsum(v for _, _, v in terms)
    return lhs, rhs, abs(lhs - rhs)


# ----------------------------------------------------------------------------
# rings

class NotTwoParticleIrreducible(ValueError):
    pass


@dataclass
class RingStructure:
    paths: tuple
    lines: tuple

    def vertices(self, i):
        return self.paths[i]


def ring_select(edges, y, z):
    """Two internally vertex-disjoint ``y``-``z`` paths of minimal total scale.

    Parameters
    ----------
    edges : sequence of ``(u, v, scale)``
        Tree and loop lines; parallel lines allowed.
    y, z : hashable
        External vertices.
    """
    G = nx.MultiGraph()
    for idx, (u, v, sc) in enumerate(edges):
        G.add_edge(u, v, key=idx, scale=sc)
    if y not in G or z not in G:
        raise NotTwoParticleIrreducible("external vertices missing")
    # two-particle irreducibility in the y-z channel: three line-disjoint paths
    H = nx.Graph()
    for u, v, k in G.edges(keys=True):
        H.add_edge(("e", k), u, capacity=1)
        H.add_edge(("e", k), v, capacity=1)
    D = nx.DiGraph()
    for a, b in H.edges():
        D.add_edge(a, b, capacity=1)
        D.add_edge(b, a, capacity=1)
    if nx.maximum_flow_value(D, y, z) < 3:
        raise NotTwoParticleIrreducible("fewer than three line-disjoint paths")
    # vertex-split network, one intermediate node per line direction
    F = nx.DiGraph()
    for v in G.nodes:
        F.add_edge(("in", v), ("out", v), capacity=2 if v in (y, z) else 1, weight=0)
    for u, v, k, d in G.edges(keys=True, data=True):
        for a, b in ((u, v), (v, u)):
            F.add_edge(("out", a), ("line", k, a, b), capacity=1, weight=int(d["scale"]) + 1)
            F.add_edge(("line", k, a, b), ("in", b), capacity=1, weight=0)
    F.nodes[("in", y)]["demand"] = -2
    F.nodes[("out", z)]["demand"] = 2
    try:
        flow = nx.min_cost_flow(F)
    except nx.NetworkXUnfeasible as exc:
        raise NotTwoParticleIrreducible("no two vertex-disjoint paths") from exc
    paths, lines = [], []
    for _ in range(2):
        cur, vpath, lpath = ("out", y), [y], []
        while cur != ("out", z):
            nxt = next(b for b, f in flow[cur].items() if f > 0)
            flow[cur][nxt] -= 1
            if nxt[0] == "line":
                lpath.append(nxt[1])
            elif nxt[0] == "in":
                vpath.append(nxt[1])
            cur = nxt
        paths.append(tuple(vpath))
        lines.append(tuple(lpath))
    return RingStructure(tuple(paths), tuple(lines))


def dump_json(obj, path):
    """Write forests, trees or arch systems as JSON."""
    def enc(o):
        if isinstance(o, Forest):
            return {"n": o.n, "edges": [list(e) for e in o.edges]}
        if isinstance(o, (GNTree, ArchSystem)):
            return o.to_dict()
        if isinstance(o, (list, tuple)):
            return [enc(x) for x in o]
        return o
    with open(path, "w") as fh:
        json.dump(enc(obj), fh, indent=1, sort_keys=True)
