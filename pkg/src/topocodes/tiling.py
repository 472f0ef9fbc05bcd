"""Tilings of closed surfaces as combinatorial maps.

A map is given by two permutations of the dart set ``0..N-1``: ``alpha``
pairs the two darts of an edge and ``sigma`` turns counterclockwise around
a vertex. Vertices are sigma-orbits, edges alpha-orbits and faces the orbits
of ``phi = sigma . alpha`` (apply alpha first).

Non-orientable surfaces need one more bit per edge: a *twisted* edge
reverses the sense of rotation when a face walk crosses it. Internally the
general case is handled through flags (dart, side) and the three flag
involutions of a generalized map, which is also how duals, face-centered
triangulations and shrunk lattices are built.
"""

from __future__ import annotations

import json
from collections import deque
from dataclasses import dataclass
from functools import cached_property
from pathlib import Path
from typing import Sequence

from .errors import Disconnected, InvalidInvolution, InvalidMap, IoFailure

INVERSE_LABEL = {"a": "a", "b": "B", "B": "b"}


class CombinatorialMap:
    """Immutable dart-based tiling.

    Parameters
    ----------
    alpha, sigma
        Edge involution and vertex rotation as integer sequences.
    labels
        Optional generator label per dart (``"a"``, ``"b"`` or ``"B"``).
    twist
        Optional per-dart flag, equal on both darts of an edge. ``None`` or
        all-false means an ordinary (orientable) rotation system.
    multi_component
        Allow more than one connected component.
    """

    def __init__(self, alpha: Sequence[int], sigma: Sequence[int], labels=None, twist=None,
                 multi_component: bool = False):
        self.alpha = tuple(int(x) for x in alpha)
        self.sigma = tuple(int(x) for x in sigma)
        self.labels = tuple(labels) if labels is not None else None
        if twist is not None and any(twist):
            self.twist = tuple(bool(t) for t in twist)
        else:
            self.twist = None
        self.multi_component = bool(multi_component)

    def __repr__(self):
        return (f"CombinatorialMap(darts={self.n_darts}, V={self.n_vertices}, "
                f"E={self.n_edges}, F={self.n_faces})")

    def __eq__(self, other):
        if not isinstance(other, CombinatorialMap):
            return NotImplemented
        return (self.alpha, self.sigma, self.labels, self.twist) == (
            other.alpha, other.sigma, other.labels, other.twist)

    def __hash__(self):
        return hash((self.alpha, self.sigma))

    @property
    def n_darts(self) -> int:
        return len(self.alpha)

    @property
    def is_twisted(self) -> bool:
        return self.twist is not None

    def is_twisted_dart(self, d: int) -> bool:
        return self.twist is not None and self.twist[d]

    @cached_property
    def sigma_inv(self) -> tuple[int, ...]:
        inv = [0] * self.n_darts
        for d, s in enumerate(self.sigma):
            inv[s] = d
        return tuple(inv)

    @cached_property
    def phi(self) -> tuple[int, ...]:
        return tuple(self.sigma[self.alpha[d]] for d in range(self.n_darts))

    # ---- cells -------------------------------------------------------------

    @cached_property
    def vertices(self) -> list[list[int]]:
        """Sigma-orbits, each listed counterclockwise from its smallest dart."""
        return _orbits(self.sigma)

    @cached_property
    def vertex_of(self) -> tuple[int, ...]:
        return _orbit_index(self.vertices, self.n_darts)

    @cached_property
    def edges(self) -> list[tuple[int, int]]:
        return [(d, self.alpha[d]) for d in range(self.n_darts) if d < self.alpha[d]]

    @cached_property
    def edge_of(self) -> tuple[int, ...]:
        out = [0] * self.n_darts
        for i, (d, e) in enumerate(self.edges):
            out[d] = out[e] = i
        return tuple(out)

    @cached_property
    def faces(self) -> list[list[int]]:
        """Face boundary walks as dart lists.

        Each dart in a walk is the dart along which the walk leaves a vertex.
        For untwisted maps these are exactly the phi-orbits, ordered by their
        smallest dart.
        """
        if not self.is_twisted:
            return _orbits(self.phi)
        a0, a1, _ = self.flag_involutions
        seen = [False] * (2 * self.n_darts)
        out = []
        for f0 in range(2 * self.n_darts):
            if seen[f0]:
                continue
            walk = []
            f = f0
            while True:
                walk.append(f >> 1)
                seen[f] = seen[a0[f]] = True
                f = a1[a0[f]]
                if f == f0:
                    break
            out.append(walk)
        return out

    @cached_property
    def face_of(self) -> tuple[int, ...]:
        """Face index of each dart; only defined for untwisted maps."""
        if self.is_twisted:
            raise InvalidMap("face_of is undefined on twisted maps; use faces")
        return _orbit_index(self.faces, self.n_darts)

    @property
    def n_vertices(self) -> int:
        return len(self.vertices)

    @property
    def n_edges(self) -> int:
        return self.n_darts // 2

    @property
    def n_faces(self) -> int:
        return len(self.faces)

    @property
    def euler_characteristic(self) -> int:
        return self.n_vertices - self.n_edges + self.n_faces

    def edge_endpoints(self, e: int) -> tuple[int, int]:
        d, d2 = self.edges[e]
        return self.vertex_of[d], self.vertex_of[d2]

    def face_edges(self, f: int) -> list[int]:
        return [self.edge_of[d] for d in self.faces[f]]

    def face_vertices(self, f: int) -> list[int]:
        return [self.vertex_of[d] for d in self.faces[f]]

    def degree(self, v: int) -> int:
        return len(self.vertices[v])

    def is_trivalent(self) -> bool:
        return all(len(v) == 3 for v in self.vertices)

    @cached_property
    def components(self) -> list[list[int]]:
        """Dart sets of the connected components."""
        return _components(self.alpha, self.sigma)

    # ---- flags -------------------------------------------------------------

    @cached_property
    def flag_involutions(self) -> tuple[list[int], list[int], list[int]]:
        """``(a0, a1, a2)`` on flags ``2*d + side``.

        a0 moves to the other end of the edge, a1 to the neighbouring edge
        in the same corner, a2 to the other side of the same dart.
        """
        n = self.n_darts
        a0 = [0] * (2 * n)
        a1 = [0] * (2 * n)
        a2 = [0] * (2 * n)
        for d in range(n):
            t = self.is_twisted_dart(d)
            for s in (0, 1):
                f = 2 * d + s
                a0[f] = 2 * self.alpha[d] + (s if t else 1 - s)
                a2[f] = f ^ 1
            a1[2 * d + 1] = 2 * self.sigma[d]
            a1[2 * self.sigma[d]] = 2 * d + 1
        return a0, a1, a2

    # ---- serialization -----------------------------------------------------

    def to_json(self) -> dict:
        out = {"darts": self.n_darts, "alpha": list(self.alpha), "sigma": list(self.sigma)}
        if self.labels is not None:
            out["labels"] = list(self.labels)
        if self.twist is not None:
            out["twist"] = [int(t) for t in self.twist]
        if self.multi_component:
            out["multi_component"] = True
        return out

    @classmethod
    def from_json(cls, data: dict) -> "CombinatorialMap":
        try:
            n = int(data["darts"])
            alpha, sigma = data["alpha"], data["sigma"]
        except (KeyError, TypeError) as exc:
            raise InvalidMap(f"missing tiling field: {exc}") from exc
        if len(alpha) != n or len(sigma) != n:
            raise InvalidMap(f"alpha/sigma length differs from darts={n}")
        return cls(alpha, sigma, labels=data.get("labels"), twist=data.get("twist"),
                   multi_component=data.get("multi_component", False))


def _orbits(perm: Sequence[int]) -> list[list[int]]:
    seen = [False] * len(perm)
    out = []
    for start in range(len(perm)):
        if seen[start]:
            continue
        orbit = []
        x = start
        while not seen[x]:
            seen[x] = True
            orbit.append(x)
            x = perm[x]
        out.append(orbit)
    return out


def _orbit_index(orbits: list[list[int]], n: int) -> tuple[int, ...]:
    out = [0] * n
    for i, orb in enumerate(orbits):
        for x in orb:
            out[x] = i
    return tuple(out)


def _components(*perms: Sequence[int]) -> list[list[int]]:
    n = len(perms[0])
    comp = [-1] * n
    out = []
    for start in range(n):
        if comp[start] != -1:
            continue
        cid = len(out)
        comp[start] = cid
        members = [start]
        stack = [start]
        while stack:
            x = stack.pop()
            for p in perms:
                y = p[x]
                if comp[y] == -1:
                    comp[y] = cid
                    members.append(y)
                    stack.append(y)
        out.append(sorted(members))
    return out


def _is_permutation(p: Sequence[int], n: int) -> bool:
    return len(p) == n and sorted(p) == list(range(n))


# ---- validation ---------------------------------------------------------------

@dataclass(frozen=True)
class TilingStats:
    v_count: int
    e_count: int
    f_count: int
    euler_char: int
    orientable: bool
    genus_or_crosscap: int
    max_face_len: int
    max_vertex_degree: int
    warnings: tuple[str, ...] = ()


def validate_map(m: CombinatorialMap, require_connected: bool = True) -> TilingStats:
    """Check the map invariants and return its cell counts."""
    n = m.n_darts
    if n % 2:
        raise InvalidInvolution(f"odd dart count {n}")
    if not _is_permutation(m.alpha, n):
        raise InvalidInvolution("alpha is not a permutation of the darts")
    for d in range(n):
        if m.alpha[d] == d:
            raise InvalidInvolution(f"alpha fixes dart {d}")
        if m.alpha[m.alpha[d]] != d:
            raise InvalidInvolution(f"alpha is not an involution at dart {d}")
    if not _is_permutation(m.sigma, n):
        raise InvalidMap("sigma is not a permutation of the darts")
    if m.labels is not None:
        if len(m.labels) != n:
            raise InvalidMap("labels length differs from dart count")
        for d in range(n):
            if INVERSE_LABEL.get(m.labels[d]) != m.labels[m.alpha[d]]:
                raise InvalidMap(f"labels of dart {d} and its partner are not mutually inverse")
    if m.twist is not None:
        if len(m.twist) != n:
            raise InvalidMap("twist length differs from dart count")
        for d in range(n):
            if m.twist[d] != m.twist[m.alpha[d]]:
                raise InvalidMap(f"twist differs on the two darts of edge at {d}")
    if require_connected and not m.multi_component and len(m.components) > 1:
        raise Disconnected(f"map has {len(m.components)} components")

    chi = m.euler_characteristic
    orient = orientability(m)
    g = (2 * len(m.components) - chi) // 2 if orient else 2 * len(m.components) - chi
    face_lens = [len(f) for f in m.faces]
    warnings = []
    short = sum(1 for x in face_lens if x < 3)
    if short:
        warnings.append(f"{short} face(s) of length < 3")
    return TilingStats(
        v_count=m.n_vertices, e_count=m.n_edges, f_count=m.n_faces, euler_char=chi,
        orientable=orient, genus_or_crosscap=g,
        max_face_len=max(face_lens, default=0),
        max_vertex_degree=max((len(v) for v in m.vertices), default=0),
        warnings=tuple(warnings),
    )


def _vertex_signs(m: CombinatorialMap) -> list[int] | None:
    """Local orientation per vertex making every edge untwisted, or None."""
    sign = [-1] * m.n_vertices
    for root in range(m.n_vertices):
        if sign[root] != -1:
            continue
        sign[root] = 0
        queue = deque([root])
        while queue:
            v = queue.popleft()
            for d in m.vertices[v]:
                w = m.vertex_of[m.alpha[d]]
                want = sign[v] ^ int(m.is_twisted_dart(d))
                if sign[w] == -1:
                    sign[w] = want
                    queue.append(w)
                elif sign[w] != want:
                    return None
    return sign


def orientability(m: CombinatorialMap) -> bool:
    """Whether faces can be oriented coherently.

    Local orientations are propagated across edges from a root vertex; the
    surface is orientable iff no edge ever demands a contradictory flip.
    """
    if not m.is_twisted:
        return True
    return _vertex_signs(m) is not None


def untwist(m: CombinatorialMap) -> CombinatorialMap:
    """Equivalent twist-free map for an orientable input (identity otherwise)."""
    if not m.is_twisted:
        return m
    sign = _vertex_signs(m)
    if sign is None:
        return m
    sigma = list(m.sigma)
    for v, darts in enumerate(m.vertices):
        if sign[v]:
            for d in darts:
                sigma[m.sigma[d]] = d
    return CombinatorialMap(m.alpha, sigma, labels=m.labels, multi_component=m.multi_component)


def from_flags(a0: Sequence[int], a1: Sequence[int], a2: Sequence[int],
               multi_component: bool = False) -> CombinatorialMap:
    """Rebuild a dart map from generalized-map involutions.

    Darts are a2-orbits. Around each vertex, sides are assigned by walking
    ``a2 . a1``; an edge is twisted when a0 keeps the side. Orientable
    results are untwisted before returning.
    """
    return flags_to_map(a0, a1, a2, multi_component)[0]


def flags_to_map(a0: Sequence[int], a1: Sequence[int], a2: Sequence[int],
                 multi_component: bool = False) -> tuple[CombinatorialMap, list[int]]:
    """``from_flags`` that also returns the dart carrying each flag."""
    nflags = len(a0)
    side = [-1] * nflags
    dart = [-1] * nflags
    sigma: list[int] = []
    for f in range(nflags):
        if side[f] != -1:
            continue
        ring = []
        g = f
        while True:
            d = len(sigma)
            sigma.append(-1)
            side[g], side[a2[g]] = 0, 1
            dart[g] = dart[a2[g]] = d
            ring.append(d)
            g = a2[a1[g]]
            if g == f:
                break
            if side[g] != -1:
                raise InvalidMap("flag involutions do not form a generalized map")
        # the walk runs clockwise
        for i in range(len(ring)):
            sigma[ring[(i + 1) % len(ring)]] = ring[i]
    n = len(sigma)
    alpha = [0] * n
    twist = [False] * n
    for f in range(nflags):
        if side[f] == 0:
            g = a0[f]
            alpha[dart[f]] = dart[g]
            twist[dart[f]] = side[g] == 0
    return untwist(CombinatorialMap(alpha, sigma, twist=twist, multi_component=multi_component)), dart


def dual_map(m: CombinatorialMap) -> CombinatorialMap:
    """Dual tiling: vertices and faces exchanged, edges kept.

    Untwisted maps use ``sigma' = phi`` with the same alpha, so the dart and
    edge numbering carry over and the dual of the dual is the input itself.
    """
    if not m.is_twisted:
        return CombinatorialMap(m.alpha, m.phi, multi_component=m.multi_component)
    a0, a1, a2 = m.flag_involutions
    return from_flags(a2, a1, a0, multi_component=m.multi_component)


# ---- canonical forms / isomorphism ---------------------------------------------

def canonical_code(m: CombinatorialMap, root: int) -> tuple:
    """Relabel darts in breadth-first order from ``root`` (alpha, then sigma)."""
    idx = {root: 0}
    order = [root]
    i = 0
    while i < len(order):
        d = order[i]
        i += 1
        for nb in (m.alpha[d], m.sigma[d]):
            if nb not in idx:
                idx[nb] = len(order)
                order.append(nb)
    labels = m.labels
    return tuple(
        (idx[m.alpha[d]], idx[m.sigma[d]], labels[d] if labels else None, m.is_twisted_dart(d))
        for d in order
    )


def _flag_code(invs, root: int) -> tuple:
    idx = {root: 0}
    order = [root]
    i = 0
    while i < len(order):
        f = order[i]
        i += 1
        for inv in invs:
            g = inv[f]
            if g not in idx:
                idx[g] = len(order)
                order.append(g)
    return tuple(tuple(idx[inv[f]] for inv in invs) for f in order)


def is_isomorphic(m1: CombinatorialMap, m2: CombinatorialMap, use_labels: bool = False) -> bool:
    """Rooted-traversal isomorphism test for connected maps.

    Untwisted maps are compared rotation-preservingly; twisted ones through
    their flag involutions.
    """
    if m1.n_darts != m2.n_darts:
        return False
    if m1.n_darts == 0:
        return True
    if m1.is_twisted or m2.is_twisted:
        c1 = _flag_code(m1.flag_involutions, 0)
        invs2 = m2.flag_involutions
        return any(_flag_code(invs2, r) == c1 for r in range(2 * m2.n_darts))
    if not use_labels:
        m1 = CombinatorialMap(m1.alpha, m1.sigma)
        m2 = CombinatorialMap(m2.alpha, m2.sigma)
    c1 = canonical_code(m1, 0)
    return any(canonical_code(m2, r) == c1 for r in range(m2.n_darts))


# ---- file helpers ---------------------------------------------------------------

def load_map(path: str | Path) -> CombinatorialMap:
    try:
        with open(path) as fh:
            data = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise IoFailure(str(exc)) from exc
    return CombinatorialMap.from_json(data)


def save_map(m: CombinatorialMap, path: str | Path) -> None:
    try:
        with open(path, "w") as fh:
            json.dump(m.to_json(), fh)
    except OSError as exc:
        raise IoFailure(str(exc)) from exc
