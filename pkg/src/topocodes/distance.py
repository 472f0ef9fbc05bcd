"""Minimum distances: combinatorial systoles, color-code distance search,
bounds from shrunk lattices and injectivity radius, planarity certificates
and the refinement inequality for face-centered triangulations."""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass, field
from typing import Sequence

import networkx as nx

from .color import FaceColoring, shrunk_lattice_with_edges, validate_coloring
from .css import CssCode, face_matrix, face_vertex_matrix, incidence_matrix
from .errors import (InequalityViolation, InfeasibleSize, LemmaViolation, NotInKernel,
                     ValidationFailure)
from .gf2 import (BitMatrix, EchelonForm, bits, echelon, from_indices, kernel_basis, popcount, rank,
                  span_elements)
from .tiling import CombinatorialMap, dual_map

INF = math.inf

DEFAULT_WEIGHT_CAP = 20
DEFAULT_NODE_LIMIT = 5_000_000
GRAY_MAX_DIM = 20


@dataclass
class DistanceReport:
    """Exact value or certified interval for a distance or systole.

    ``INF`` (``math.inf``) marks an empty set of nontrivial objects, e.g. the
    systole of a sphere. ``certificate`` holds the support (edge or vertex
    indices) of a minimum-weight witness when one is known.
    """

    lower: float
    upper: float
    value_exact: float | None = None
    methods: list[str] = field(default_factory=list)
    certificate: list[int] | None = None
    k_zero: bool = False
    notes: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.lower > self.upper:
            raise ValidationFailure(f"lower bound {self.lower} above upper bound {self.upper}")
        if self.value_exact is not None and not (self.lower == self.upper == self.value_exact):
            raise ValidationFailure("exact value must equal both bounds")

    @classmethod
    def exact(cls, value: float, method: str, certificate: list[int] | None = None,
              **kw) -> "DistanceReport":
        return cls(value, value, value, [method], certificate, **kw)

    @property
    def is_exact(self) -> bool:
        return self.value_exact is not None

    def to_json(self) -> dict:
        def num(x):
            return "inf" if x == INF else (None if x is None else int(x))

        return {
            "value_exact": num(self.value_exact),
            "lower": num(self.lower),
            "upper": num(self.upper),
            "methods": list(self.methods),
            "certificate": self.certificate,
            "k_zero": self.k_zero,
            "notes": self.notes,
        }


# ---- combinatorial systole ---------------------------------------------------------

def _adjacency(m: CombinatorialMap) -> list[list[tuple[int, int]]]:
    """Per vertex, the ``(neighbour, edge)`` pairs; a loop appears twice."""
    adj: list[list[tuple[int, int]]] = [[] for _ in range(m.n_vertices)]
    for e, (d, d2) in enumerate(m.edges):
        u, w = m.vertex_of[d], m.vertex_of[d2]
        adj[u].append((w, e))
        adj[w].append((u, e))
    return adj


def _better(w: int, vec: int, best_w: float, best_vec: int | None) -> bool:
    if w != best_w:
        return w < best_w
    # equal weight: smaller sorted edge list wins, for reproducible certificates
    return best_vec is None or bits(vec) < bits(best_vec)


def shortest_nontrivial_cycle(m: CombinatorialMap, boundaries: EchelonForm | None = None,
                              roots: Sequence[int] | None = None) -> tuple[float, int | None]:
    """Weight and edge vector of a shortest cycle outside the face space.

    For every root a breadth-first tree is grown; each non-tree edge closes
    the cycle ``path(x) + xy + path(y)``. Candidates are taken in order of
    ``dist(x) + dist(y) + 1`` and the scan stops once that reaches the best
    weight found so far. The reported weight is the popcount of the cycle
    vector, which can undercut the nominal length when the two paths share
    a prefix.
    """
    if boundaries is None:
        boundaries = echelon(face_matrix(m))
    adj = _adjacency(m)
    best_w: float = INF
    best_vec: int | None = None
    for root in (range(m.n_vertices) if roots is None else roots):
        limit = best_w
        dist = {root: 0}
        path = {root: 0}
        tree_edge = {root: -1}
        queue = deque([root])
        candidates: list[tuple[int, int, int, int]] = []
        while queue:
            u = queue.popleft()
            du = dist[u]
            if 2 * du + 1 > limit:
                # every cycle closed from here is too long
                continue
            for w, e in adj[u]:
                if e == tree_edge[u]:
                    continue
                if w not in dist:
                    dist[w] = du + 1
                    path[w] = path[u] ^ (1 << e)
                    tree_edge[w] = e
                    queue.append(w)
                elif e != tree_edge[w] or w == u:
                    candidates.append((du + dist[w] + 1, e, u, w))
        candidates.sort()
        seen_edges = set()
        for length, e, u, w in candidates:
            if length > best_w:
                break
            if e in seen_edges and u != w:
                continue
            seen_edges.add(e)
            vec = path[u] ^ path[w] ^ (1 << e)
            if vec == 0 or boundaries.contains(vec):
                continue
            wt = popcount(vec)
            if _better(wt, vec, best_w, best_vec):
                best_w, best_vec = wt, vec
    return best_w, best_vec


def homology_rank(m: CombinatorialMap, boundaries: EchelonForm | None = None) -> int:
    """Dimension of the first homology over F2 (cycle space modulo faces)."""
    if boundaries is None:
        boundaries = echelon(face_matrix(m))
    n_comp = len(m.components)
    cycle_dim = m.n_edges - m.n_vertices + n_comp
    return cycle_dim - boundaries.rank


def combinatorial_systole(m: CombinatorialMap) -> DistanceReport:
    """Length of the shortest cycle that is not a sum of faces."""
    boundaries = echelon(face_matrix(m))
    if homology_rank(m, boundaries) == 0:
        return DistanceReport(INF, INF, INF, ["systole-bfs"], None, k_zero=True)
    w, vec = shortest_nontrivial_cycle(m, boundaries)
    if vec is None:
        raise ValidationFailure("nontrivial homology but no nontrivial cycle found")
    return DistanceReport.exact(w, "systole-bfs", bits(vec))


def verify_cycle_certificate(m: CombinatorialMap, edges: Sequence[int]) -> bool:
    """True when the edge set is a cycle (even degrees) that is not a sum of faces."""
    vec = from_indices(edges)
    if incidence_matrix(m).mul_vec(vec):
        return False
    return not echelon(face_matrix(m)).contains(vec)


def surface_distance(m: CombinatorialMap) -> DistanceReport:
    """Minimum of the systoles of the tiling and of its dual."""
    primal = combinatorial_systole(m)
    dual = combinatorial_systole(dual_map(m))
    if primal.k_zero:
        return DistanceReport(INF, INF, INF, ["systole-bfs"], None, k_zero=True)
    side, rep = ("primal", primal) if primal.value_exact <= dual.value_exact else ("dual", dual)
    return DistanceReport.exact(rep.value_exact, "systole-bfs", rep.certificate,
                                notes={"side": side, "primal": primal.value_exact,
                                       "dual": dual.value_exact})


# ---- color-code distance ----------------------------------------------------------------

def is_logical(h_rows: Sequence[int], stab: EchelonForm, vec: int) -> bool:
    """``vec`` is in ker H but not in the row space of H."""
    return all(popcount(r & vec) % 2 == 0 for r in h_rows) and not stab.contains(vec)


def _gray_search(checks: BitMatrix, stabs: BitMatrix) -> tuple[int, int] | None:
    """Minimum over the whole kernel of ``checks`` by Gray-code enumeration."""
    basis = kernel_basis(checks).rows
    stab = echelon(stabs)
    best_w, best = INF, None
    for v in span_elements(basis):
        if v and popcount(v) <= best_w and not stab.contains(v):
            if _better(popcount(v), v, best_w, best):
                best_w, best = popcount(v), v
    return None if best is None else (best_w, best)


class _BranchSearch:
    """Depth-first search for a minimum-weight element of ker H outside row(H).

    A set S of chosen columns grows one column at a time; the branching
    step takes a check with odd overlap and tries each still-free column of
    it, forbidding earlier siblings. The smallest column of the target is
    fixed at the root, with every smaller column forbidden, so each support
    is reached from exactly one root. A minimum logical never strictly
    contains another kernel element, so branches that close up inside
    row(H) are dropped.
    """

    def __init__(self, h_rows: Sequence[int], ncols: int, node_limit: int,
                 stab_rows: Sequence[int] | None = None):
        self.h_rows = list(h_rows)
        self.stab = echelon(self.h_rows if stab_rows is None else list(stab_rows), ncols)
        self.ncols = ncols
        self.col_flip = [0] * ncols
        for i, r in enumerate(self.h_rows):
            for j in bits(r):
                self.col_flip[j] |= 1 << i
        self.max_col = max((popcount(c) for c in self.col_flip), default=1) or 1
        self.node_limit = node_limit
        self.nodes = 0
        self.limit: float = INF
        self.best: int | None = None

    def run(self, limit: float) -> None:
        """Find the lightest logical of weight below ``limit``, if any."""
        self.limit = limit
        for root in range(self.ncols):
            if self.limit <= 1:
                return
            blocked = (1 << (root + 1)) - 1
            self._dfs(1 << root, 1, self.col_flip[root], blocked)

    def _dfs(self, s: int, size: int, odd: int, blocked: int) -> None:
        self.nodes += 1
        if self.nodes > self.node_limit:
            raise InfeasibleSize(f"search exceeded {self.node_limit} nodes")
        if not odd:
            if size < self.limit and not self.stab.contains(s):
                self.limit, self.best = size, s
            return
        # each further column fixes at most max_col odd checks
        if size + -(-popcount(odd) // self.max_col) >= self.limit:
            return
        free = None
        for i in bits(odd):
            cand = self.h_rows[i] & ~blocked
            if free is None or popcount(cand) < popcount(free):
                free = cand
                if popcount(cand) <= 1:
                    break
        for j in bits(free):
            self._dfs(s | (1 << j), size + 1, odd ^ self.col_flip[j], blocked | (1 << j))
            blocked |= 1 << j


def color_distance_exact(code: CssCode, weight_cap: int = DEFAULT_WEIGHT_CAP,
                         node_limit: int = DEFAULT_NODE_LIMIT,
                         seed: Sequence[int] | None = None) -> DistanceReport:
    """Exact minimum weight of ker H minus row(H) for a color code.

    Small kernels are enumerated outright; otherwise a branch-and-bound
    search looks for logicals of weight at most ``weight_cap``. ``seed`` is
    an optional known logical (e.g. a lifted shrunk-lattice cycle) whose
    weight primes the bound. Raises InfeasibleSize when the search gives
    up; its ``lower`` attribute then holds a certified lower bound or None.
    """
    if code.kind != "color":
        raise ValueError("color_distance_exact expects a color code")
    h = code.h_x
    if code.k == 0:
        return DistanceReport(INF, INF, INF, ["bruteforce"], None, k_zero=True)
    if h.ncols - code.rank_x <= GRAY_MAX_DIM:
        w, vec = _gray_search(h, h)
        return DistanceReport.exact(w, "bruteforce", bits(vec))
    search = _BranchSearch(h.rows, h.ncols, node_limit)
    seed_vec = None
    if seed is not None:
        seed_vec = from_indices(seed)
        if not is_logical(h.rows, search.stab, seed_vec):
            raise NotInKernel("seed vector is not a logical operator")
    limit = weight_cap + 1
    if seed_vec is not None:
        limit = min(limit, popcount(seed_vec))
    try:
        search.run(limit)
    except InfeasibleSize as exc:
        exc.lower = None
        raise
    if search.best is not None:
        vec = search.best
    elif seed_vec is not None and popcount(seed_vec) <= weight_cap + 1:
        vec = seed_vec
    else:
        exc = InfeasibleSize(f"no logical of weight <= {weight_cap}")
        exc.lower = weight_cap + 1
        raise exc
    return DistanceReport.exact(popcount(vec), "bruteforce", bits(vec),
                                notes={"nodes": search.nodes})


def min_weight_logical(checks: BitMatrix, stabs: BitMatrix, weight_cap: int = DEFAULT_WEIGHT_CAP,
                       node_limit: int = DEFAULT_NODE_LIMIT) -> tuple[float, list[int] | None]:
    """Lightest vector in ker(checks) outside row(stabs); ``(INF, None)`` if none.

    Requires ``checks @ stabs.T == 0``. Raises InfeasibleSize like
    ``color_distance_exact``.
    """
    if not checks.matmul_t(stabs).is_zero():
        raise ValueError("checks and stabilizers are not orthogonal")
    kdim = checks.ncols - rank(checks)
    if kdim == rank(stabs):
        return INF, None
    if kdim <= GRAY_MAX_DIM:
        w, vec = _gray_search(checks, stabs)
        return w, bits(vec)
    search = _BranchSearch(checks.rows, checks.ncols, node_limit, stabs.rows)
    search.run(weight_cap + 1)
    if search.best is None:
        exc = InfeasibleSize(f"no logical of weight <= {weight_cap}")
        exc.lower = weight_cap + 1
        raise exc
    return popcount(search.best), bits(search.best)


def css_distance_exact(code: CssCode, weight_cap: int = DEFAULT_WEIGHT_CAP,
                       node_limit: int = DEFAULT_NODE_LIMIT) -> DistanceReport:
    """Exact distance of any CSS code from its matrices alone."""
    if code.k == 0:
        return DistanceReport(INF, INF, INF, ["bruteforce"], None, k_zero=True)
    sides = [("z", code.h_x, code.h_z)]
    if code.h_x is not code.h_z:
        sides.append(("x", code.h_z, code.h_x))
    found, floor = [], INF
    for side, checks, stabs in sides:
        try:
            w, cert = min_weight_logical(checks, stabs, weight_cap, node_limit)
            found.append((w, side, cert))
        except InfeasibleSize as exc:
            floor = min(floor, exc.lower)
    if not found or min(found)[0] >= floor:
        # every side is above the cap
        exc = InfeasibleSize(f"no logical of weight <= {weight_cap}")
        exc.lower = floor
        raise exc
    w, side, cert = min(found)
    notes = {"side": side} if len(sides) == 2 else {}
    return DistanceReport.exact(w, "bruteforce", cert, notes=notes)


def max_face_length(m: CombinatorialMap) -> int:
    return max(len(f) for f in m.faces)


def shrunk_systoles(m: CombinatorialMap, coloring: FaceColoring) -> list[tuple[float, list[int]]]:
    """Per color, the shrunk-lattice systole and the lifted base-vertex support
    of a shortest nontrivial cycle (empty when the systole is infinite)."""
    out = []
    for c in (0, 1, 2):
        shrunk, origin = shrunk_lattice_with_edges(m, coloring, c)
        rep = combinatorial_systole(shrunk)
        if rep.k_zero:
            out.append((INF, []))
            continue
        lift = []
        for e in rep.certificate:
            lift.extend(m.edge_endpoints(origin[e]))
        out.append((rep.value_exact, sorted(lift)))
    return out


def color_distance_bounds(m: CombinatorialMap, coloring: FaceColoring, verified_r: int = 0,
                          exact: DistanceReport | None = None) -> DistanceReport:
    """Upper bound twice the smallest shrunk-lattice systole, lower bound
    ``ceil(r / (3M))`` with M the longest face."""
    validate_coloring(m, coloring)
    if verified_r < 0:
        raise ValueError("verified radius must be non-negative")
    systoles = shrunk_systoles(m, coloring)
    best_c = min(range(3), key=lambda c: systoles[c][0])
    upper = 2 * systoles[best_c][0]
    big_m = max_face_length(m)
    lower = -(-verified_r // (3 * big_m))
    methods = ["shrunk-upper", "radius-lower"]
    notes = {"shrunk_systoles": [s if s != INF else "inf" for s, _ in systoles],
             "M": big_m, "verified_r": verified_r}
    cert = systoles[best_c][1] or None
    if lower > upper:
        raise ValidationFailure(f"radius lower bound {lower} exceeds shrunk upper bound {upper}")
    if exact is not None and exact.is_exact:
        if not lower <= exact.value_exact <= upper:
            raise ValidationFailure(f"exact distance {exact.value_exact} outside [{lower}, {upper}]")
        return DistanceReport(exact.value_exact, exact.value_exact, exact.value_exact,
                              methods + exact.methods, exact.certificate, notes=notes)
    return DistanceReport(lower, upper, None, methods, cert, notes=notes)


def color_distance(m: CombinatorialMap, coloring: FaceColoring, code: CssCode,
                   verified_r: int = 0, weight_cap: int = DEFAULT_WEIGHT_CAP,
                   node_limit: int = DEFAULT_NODE_LIMIT) -> DistanceReport:
    """Exact distance when the search finishes, certified bounds otherwise.

    The lifted shortest shrunk-lattice cycle seeds the exact search.
    """
    bounds = color_distance_bounds(m, coloring, verified_r)
    seed = bounds.certificate
    if seed is not None and not is_logical(code.h_x.rows, echelon(code.h_x), from_indices(seed)):
        seed = None
    try:
        exact = color_distance_exact(code, weight_cap, node_limit, seed)
    except InfeasibleSize as exc:
        lo = max(bounds.lower, getattr(exc, "lower", None) or 0)
        return DistanceReport(lo, bounds.upper, None, bounds.methods, bounds.certificate,
                              notes=dict(bounds.notes, exact_search=str(exc)))
    return color_distance_bounds(m, coloring, verified_r, exact)


# ---- planarity certificate ----------------------------------------------------------------

@dataclass(frozen=True)
class PlanarityResult:
    planar: bool
    in_stabilizer: bool
    faces: tuple[int, ...]
    reason: str = ""


def planarity_certificate(x: int | Sequence[int], m: CombinatorialMap, coloring: FaceColoring,
                          stab: EchelonForm | None = None,
                          vertex_space: EchelonForm | None = None) -> PlanarityResult:
    """Decide whether the faces touching the support of ``x`` sit in a disc.

    F(x) is the subgraph of the dual induced by the faces meeting ``x``. It
    counts as planar when it is a planar graph and every one of its cycles
    bounds in the dual (lies in the span of the vertex stars). A planar
    F(x) forces ``x`` into the row space of H; a breach raises LemmaViolation.
    """
    h = face_vertex_matrix(m)
    if not isinstance(x, int):
        x = from_indices(x)
    if h.mul_vec(x):
        raise NotInKernel("x is not in the kernel of H")
    if stab is None:
        stab = echelon(h)
    in_stab = stab.contains(x)
    fo = m.face_of
    touched = sorted({fo[d] for v in bits(x) for d in m.vertices[v]})
    tset = set(touched)
    g = nx.MultiGraph()
    g.add_nodes_from(touched)
    dual_edges = []
    for e, (d, d2) in enumerate(m.edges):
        f, f2 = fo[d], fo[d2]
        if f in tset and f2 in tset:
            g.add_edge(f, f2, key=e)
            dual_edges.append((f, f2, e))
    planar, _ = nx.check_planarity(nx.Graph(g))
    reason = "" if planar else "not a planar graph"
    if planar and dual_edges:
        if vertex_space is None:
            vertex_space = echelon(incidence_matrix(m))
        for cyc in _fundamental_cycles(touched, dual_edges):
            if not vertex_space.contains(cyc):
                planar, reason = False, "wraps a handle"
                break
    if planar and not in_stab:
        raise LemmaViolation("F(x) is planar but x is not in the row space of H")
    return PlanarityResult(planar, in_stab, tuple(touched), reason)


def _fundamental_cycles(nodes: Sequence[int], edges: Sequence[tuple[int, int, int]]) -> list[int]:
    """Edge vectors of the fundamental cycles of a spanning forest."""
    adj: dict[int, list[tuple[int, int]]] = {v: [] for v in nodes}
    for f, f2, e in edges:
        adj[f].append((f2, e))
        if f2 != f:
            adj[f2].append((f, e))
    path: dict[int, int] = {}
    tree: set[int] = set()
    for s in nodes:
        if s in path:
            continue
        path[s] = 0
        queue = deque([s])
        while queue:
            u = queue.popleft()
            for w, e in adj[u]:
                if w not in path:
                    path[w] = path[u] ^ (1 << e)
                    tree.add(e)
                    queue.append(w)
    return [path[f] ^ path[f2] ^ (1 << e) for f, f2, e in edges if e not in tree]


# ---- triangulation refinement -------------------------------------------------------------

def face_centered_triangulation(m: CombinatorialMap) -> CombinatorialMap:
    """Add a vertex inside every face and join it to the corners of the face.

    Every flag ``f`` of the input yields three flags of the triangle on its
    edge and face: on the old edge, on the spoke at the old vertex, and on
    the spoke at the center.
    """
    from .tiling import from_flags

    a0, a1, a2 = m.flag_involutions
    n = len(a0)
    t0, t1, t2 = [0] * (3 * n), [0] * (3 * n), [0] * (3 * n)
    for f in range(n):
        e, s, c = 3 * f, 3 * f + 1, 3 * f + 2
        t0[e] = 3 * a0[f]
        t0[s], t0[c] = c, s
        t1[e], t1[s] = s, e
        t1[c] = 3 * a0[f] + 2
        t2[e] = 3 * a2[f]
        t2[s] = 3 * a1[f] + 1
        t2[c] = 3 * a1[f] + 2
    return from_flags(t0, t1, t2, multi_component=m.multi_component)


@dataclass(frozen=True)
class RefinementReport:
    csyst_g: float
    csyst_t: float
    m: int
    ratio: float | None
    holds: bool
    skipped: bool = False

    def to_json(self) -> dict:
        return {k: ("inf" if v == INF else v) for k, v in self.__dict__.items()}


def refinement_inequality_check(g: CombinatorialMap, m: int | None = None) -> RefinementReport:
    """Check ``csyst(G) <= (m/4) csyst(T)`` for the face-centered triangulation T.

    ``m`` defaults to the longest face of G. Raises InequalityViolation when
    the inequality fails; spheres (no nontrivial cycle) are skipped.
    """
    m = max_face_length(g) if m is None else m
    sg = combinatorial_systole(g)
    if sg.k_zero:
        return RefinementReport(INF, INF, m, None, True, skipped=True)
    t = face_centered_triangulation(g)
    st = combinatorial_systole(t)
    a, b = sg.value_exact, st.value_exact
    holds = 4 * a <= m * b
    rep = RefinementReport(a, b, m, a / b, holds)
    if not holds:
        raise InequalityViolation(f"csyst(G)={a} > ({m}/4)*csyst(T)={m * b / 4}")
    return rep
