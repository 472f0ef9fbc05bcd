"""Face 3-colorings of trivalent tilings, bipartite double covers and shrunk
lattices.

Colors are 0 (red), 1 and 2. For Cayley tilings red is reserved for the
``b``-faces; the alternating faces split into the two other colors.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Sequence

import networkx as nx

from .errors import InvalidColoring, InvalidMap, MissingLabels, NotACover, NotTrivalent, OddFace
from .tiling import CombinatorialMap, flags_to_map, untwist

RED = 0


@dataclass(frozen=True)
class FaceColoring:
    """One color in {0, 1, 2} per face, indexed like ``map.faces``."""

    colors: tuple[int, ...]

    def __len__(self) -> int:
        return len(self.colors)

    def __getitem__(self, f: int) -> int:
        return self.colors[f]

    def faces_of_color(self, c: int) -> list[int]:
        return [f for f, x in enumerate(self.colors) if x == c]

    def to_json(self) -> list[int]:
        return list(self.colors)

    @classmethod
    def from_json(cls, data: Sequence[int]) -> "FaceColoring":
        return cls(tuple(int(x) for x in data))


@dataclass(frozen=True)
class ColoringRefusal:
    """Why no 3-coloring exists.

    ``reason`` is ``"odd-face"`` (``cycle`` lists the faces around an odd
    face), ``"odd-cycle"`` (``cycle`` is an odd cycle of the face adjacency
    graph) or ``"conflict"`` (forced propagation clashed; ``cycle`` holds
    the faces that collided at ``vertex``).
    """

    reason: str
    cycle: tuple[int, ...]
    vertex: int | None = None

    def __bool__(self) -> bool:
        return False


@dataclass(frozen=True)
class FaceAdjacency:
    """Graph on the alternating faces; one edge per tiling edge they share."""

    nodes: tuple[int, ...]
    edges: tuple[tuple[int, int], ...]
    _graph: nx.MultiGraph = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        g = nx.MultiGraph()
        g.add_nodes_from(self.nodes)
        g.add_edges_from(self.edges)
        object.__setattr__(self, "_graph", g)

    @property
    def graph(self) -> nx.MultiGraph:
        return self._graph

    def degree(self, f: int) -> int:
        return self._graph.degree(f)

    def is_regular(self, k: int) -> bool:
        return all(d == k for _, d in self._graph.degree())


def _oriented(m: CombinatorialMap) -> CombinatorialMap:
    m = untwist(m)
    if m.is_twisted:
        raise InvalidMap("face colorings are only handled on orientable maps")
    return m


def _require_trivalent(m: CombinatorialMap) -> None:
    if not m.is_trivalent():
        bad = next(v for v, darts in enumerate(m.vertices) if len(darts) != 3)
        raise NotTrivalent(f"vertex {bad} has degree {m.degree(bad)}")


def face_classes(m: CombinatorialMap) -> list[str]:
    """``"b"`` for faces traced by b-darts, ``"ab"`` for the alternating ones."""
    if m.labels is None:
        raise MissingLabels("face classes need generator labels")
    return ["b" if all(m.labels[d] == "b" for d in f) else "ab" for f in m.faces]


def face_adjacency(m: CombinatorialMap, classes: Sequence[str] | None = None) -> FaceAdjacency:
    """Adjacency graph of the ``"ab"`` faces (the length-2m faces of a Cayley tiling).

    ``classes`` overrides the label-derived face classes. An edge bordered
    twice by the same face becomes a self-loop.
    """
    m = _oriented(m)
    if classes is None:
        classes = face_classes(m)
    elif len(classes) != m.n_faces:
        raise MissingLabels(f"{len(classes)} face classes for {m.n_faces} faces")
    fo = m.face_of
    nodes = tuple(f for f, c in enumerate(classes) if c == "ab")
    edges = []
    for d, e in m.edges:
        f, g = fo[d], fo[e]
        if classes[f] == "ab" and classes[g] == "ab":
            edges.append((f, g))
    return FaceAdjacency(nodes, tuple(edges))


def validate_coloring(m: CombinatorialMap, coloring: FaceColoring) -> None:
    """Raise InvalidColoring unless faces sharing an edge differ in color and
    every vertex sees all three colors."""
    m = _oriented(m)
    if len(coloring) != m.n_faces:
        raise InvalidColoring(f"{len(coloring)} colors for {m.n_faces} faces")
    if any(c not in (0, 1, 2) for c in coloring.colors):
        raise InvalidColoring("colors must be 0, 1 or 2")
    fo = m.face_of
    for d, e in m.edges:
        if coloring[fo[d]] == coloring[fo[e]]:
            raise InvalidColoring(f"faces {fo[d]} and {fo[e]} share an edge and a color")
    for v, darts in enumerate(m.vertices):
        seen = {coloring[fo[d]] for d in darts}
        if len(darts) == 3 and len(seen) != 3:
            raise InvalidColoring(f"vertex {v} sees colors {sorted(seen)}")


def _odd_face_refusal(m: CombinatorialMap) -> ColoringRefusal | None:
    fo = m.face_of
    for f, darts in enumerate(m.faces):
        if len(darts) % 2:
            return ColoringRefusal("odd-face", tuple(fo[m.alpha[d]] for d in darts))
    return None


def _odd_cycle(g: nx.MultiGraph) -> list[int] | None:
    """An odd cycle of ``g`` as a node list, or None when ``g`` is bipartite."""
    side: dict[int, int] = {}
    parent: dict[int, int | None] = {}
    for s in g.nodes:
        if s in side:
            continue
        side[s], parent[s] = 0, None
        queue = deque([s])
        while queue:
            u = queue.popleft()
            for w in g.neighbors(u):
                if w not in side:
                    side[w], parent[w] = 1 - side[u], u
                    queue.append(w)
                elif side[w] == side[u]:
                    return _close_cycle(parent, u, w)
    return None


def _close_cycle(parent: dict, u: int, w: int) -> list[int]:
    pu, pw = [u], [w]
    while pu[-1] is not None:
        pu.append(parent[pu[-1]])
    while pw[-1] is not None:
        pw.append(parent[pw[-1]])
    pu.pop(), pw.pop()
    common = set(pu) & set(pw)
    # both walks climb the same BFS tree; cut them at the lowest common ancestor
    i = next(k for k, x in enumerate(pu) if x in common)
    j = pw.index(pu[i])
    return pu[:i + 1] + pw[:j][::-1]


def _propagate(m: CombinatorialMap) -> FaceColoring | ColoringRefusal:
    """Forced coloring: once one vertex is colored, every edge fixes the third
    face at its other end, so a connected component has at most one coloring
    up to permuting colors."""
    fo = m.face_of
    color = [-1] * m.n_faces
    vdone = [False] * m.n_vertices
    for start in range(m.n_vertices):
        if vdone[start]:
            continue
        fs = [fo[d] for d in m.vertices[start]]
        if len(set(fs)) < 3:
            return ColoringRefusal("conflict", tuple(fs), start)
        for c, f in enumerate(fs):
            if color[f] == -1:
                color[f] = c
        vdone[start] = True
        queue = deque([start])
        while queue:
            v = queue.popleft()
            for d in m.vertices[v]:
                w = m.vertex_of[m.alpha[d]]
                if vdone[w]:
                    continue
                fs = [fo[x] for x in m.vertices[w]]
                known = {color[f] for f in fs if color[f] != -1}
                for f in fs:
                    if color[f] == -1 and len(known) == 2:
                        color[f] = 3 - sum(known)
                        known.add(color[f])
                vdone[w] = True
                queue.append(w)
    if -1 in color:
        return ColoringRefusal("conflict", tuple(f for f, c in enumerate(color) if c == -1))
    for v, darts in enumerate(m.vertices):
        fs = [fo[d] for d in darts]
        if len({color[f] for f in fs}) != 3:
            return ColoringRefusal("conflict", tuple(fs), v)
    return FaceColoring(tuple(color))


def is_three_colorable(m: CombinatorialMap) -> FaceColoring | ColoringRefusal:
    """A face 3-coloring of a trivalent tiling, or a refusal with a witness.

    Labelled tilings go through the bipartition of the face adjacency graph:
    b-faces are red and the two sides of the bipartition get colors 1 and 2.
    Unlabelled tilings use forced propagation from one vertex per component.
    """
    m = _oriented(m)
    _require_trivalent(m)
    odd = _odd_face_refusal(m)
    if odd is not None:
        return odd
    if m.labels is None:
        return _propagate(m)
    classes = face_classes(m)
    adj = face_adjacency(m, classes)
    cycle = _odd_cycle(adj.graph)
    if cycle is not None:
        return ColoringRefusal("odd-cycle", tuple(cycle))
    side = nx.bipartite.color(nx.Graph(adj.graph))
    colors = tuple(RED if cls == "b" else 1 + side[f] for f, cls in enumerate(classes))
    out = FaceColoring(colors)
    validate_coloring(m, out)
    return out


# ---- double cover ------------------------------------------------------------------

def double_cover(m: CombinatorialMap) -> CombinatorialMap:
    """Bipartite double cover: dart ``d`` lifts to ``2d`` (layer 0) and ``2d+1``
    (layer 1); every edge crosses layers and rotations stay in their layer.

    Each face of even length lifts to two faces of the same length. The
    cover of a bipartite tiling falls apart into two copies and is flagged
    multi-component.
    """
    for f in m.faces:
        if len(f) % 2:
            raise OddFace(f"face of odd length {len(f)}")
    n = m.n_darts
    alpha = [0] * (2 * n)
    sigma = [0] * (2 * n)
    for d in range(n):
        for i in (0, 1):
            alpha[2 * d + i] = 2 * m.alpha[d] + 1 - i
            sigma[2 * d + i] = 2 * m.sigma[d] + i
    labels = None if m.labels is None else [x for x in m.labels for _ in (0, 1)]
    twist = None if m.twist is None else [t for t in m.twist for _ in (0, 1)]
    split = is_bipartite(m)
    return CombinatorialMap(alpha, sigma, labels=labels, twist=twist,
                            multi_component=split or m.multi_component)


def is_bipartite(m: CombinatorialMap) -> bool:
    g = nx.MultiGraph()
    g.add_nodes_from(range(m.n_vertices))
    g.add_edges_from(m.edge_endpoints(e) for e in range(m.n_edges))
    return nx.is_bipartite(g)


def layer(d: int) -> int:
    """Layer of a cover dart."""
    return d & 1


def check_cover(cover: CombinatorialMap) -> None:
    """Raise NotACover unless ``cover`` has the dart layout of ``double_cover``."""
    n = cover.n_darts
    if n % 4:
        raise NotACover("dart count is not twice that of a map")
    for d in range(0, n, 2):
        a0, a1 = cover.alpha[d], cover.alpha[d + 1]
        s0, s1 = cover.sigma[d], cover.sigma[d + 1]
        if a0 % 2 != 1 or a1 != a0 - 1:
            raise NotACover(f"edge at dart {d} does not cross layers")
        if s0 % 2 != 0 or s1 != s0 + 1:
            raise NotACover(f"rotation at dart {d} leaves its layer")


def color_cover_faces(cover: CombinatorialMap) -> FaceColoring:
    """3-coloring of a double cover of a labelled Cayley tiling.

    b-faces are red. An alternating face has all its a-darts in one layer
    ``i`` and gets color ``1 + i``.
    """
    if cover.labels is None:
        raise MissingLabels("cover faces are colored from generator labels")
    check_cover(cover)
    cover = _oriented(cover)
    colors = []
    for darts in cover.faces:
        if all(cover.labels[d] == "b" for d in darts):
            colors.append(RED)
            continue
        layers = {layer(d) for d in darts if cover.labels[d] == "a"}
        if len(layers) != 1:
            raise NotACover("a-darts of an alternating face sit in both layers")
        colors.append(1 + layers.pop())
    out = FaceColoring(tuple(colors))
    validate_coloring(cover, out)
    return out


# ---- shrunk lattices ------------------------------------------------------------------

def shrunk_lattice(m: CombinatorialMap, coloring: FaceColoring, c: int) -> CombinatorialMap:
    """Contract every face of color ``c`` to a vertex.

    Edges are the edges of ``m`` bordered on both sides by faces of the two
    other colors; faces are the non-c faces, at half their length. Built on
    flags: only flags of kept edges survive, a0 and a2 are inherited and the
    new a1 is ``a1 . a0 . a1``.
    """
    return shrunk_lattice_with_edges(m, coloring, c)[0]


def shrunk_lattice_with_edges(m: CombinatorialMap, coloring: FaceColoring,
                              c: int) -> tuple[CombinatorialMap, list[int]]:
    """``shrunk_lattice`` plus, for each of its edges, the edge of ``m`` it came from."""
    m = _oriented(m)
    _require_trivalent(m)
    if c not in (0, 1, 2):
        raise InvalidColoring(f"no color {c}")
    validate_coloring(m, coloring)
    fo = m.face_of
    keep = [coloring[fo[d]] != c and coloring[fo[m.alpha[d]]] != c for d in range(m.n_darts)]
    a0, a1, a2 = m.flag_involutions
    flags = [f for f in range(2 * m.n_darts) if keep[f >> 1]]
    if not flags:
        raise InvalidColoring(f"color {c} leaves no edges")
    index = {f: i for i, f in enumerate(flags)}
    n0 = [index[a0[f]] for f in flags]
    n1 = [index[a1[a0[a1[f]]]] for f in flags]
    n2 = [index[a2[f]] for f in flags]
    shrunk, dart = flags_to_map(n0, n1, n2, multi_component=m.multi_component)
    origin = [0] * shrunk.n_edges
    for i, f in enumerate(flags):
        origin[shrunk.edge_of[dart[i]]] = m.edge_of[f >> 1]
    return shrunk, origin
