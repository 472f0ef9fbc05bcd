"""Cayley tilings of triangle-group quotients.

The group ``<a, b | a^2, b^l, (ab)^m, extra...>`` is enumerated with a
Todd-Coxeter coset table over the trivial subgroup, which yields the right
regular action. Vertices of the tiling are group elements; every vertex
carries three darts labelled ``b``, ``a``, ``B`` in that counterclockwise
order, so the faces come out as the ``b``-cycles (length l) and the
alternating ``a``/``B`` cycles (length 2m).

Balls of the infinite planar tiling are grown by the same face-completion
machinery restricted to a finite depth, and compared with balls of finite
tilings to certify the injectivity radius.
"""

from __future__ import annotations

import json
import re
from collections import deque
from dataclasses import dataclass, field
from functools import lru_cache
from importlib import resources
from pathlib import Path
from typing import Iterable, Sequence

from .errors import CatalogMiss, DegenerateQuotient, Overflow, RelatorViolation, ResourceExceeded
from .tiling import CombinatorialMap

GENS = ("a", "b", "B")
_COL = {"a": 0, "b": 1, "B": 2}
_INV = (0, 2, 1)
# dart slot k at a vertex; sigma cycles b -> a -> B -> b
ROTATION = ("b", "a", "B")
_SLOT = {"b": 0, "a": 1, "B": 2}

DEFAULT_MAX_COSETS = 1_000_000


# ---- presentations -----------------------------------------------------------

_TOKEN = re.compile(r"\s*(?:([abB])|(\()|(\))|\^\s*(\d+))")


def parse_word(text: str) -> list[str]:
    """Parse ``"(aBab)^4"``-style words over a, b, B into a letter list."""
    pos = 0
    stack: list[list[str]] = [[]]
    last: list[str] | None = None
    text = text.strip()
    while pos < len(text):
        mt = _TOKEN.match(text, pos)
        if not mt:
            raise ValueError(f"bad relator syntax at {text[pos:]!r}")
        pos = mt.end()
        letter, opening, closing, power = mt.groups()
        if letter:
            last = [letter]
            stack[-1].extend(last)
        elif opening:
            stack.append([])
            last = None
        elif closing:
            if len(stack) == 1:
                raise ValueError(f"unbalanced ')' in {text!r}")
            last = stack.pop()
            stack[-1].extend(last)
        else:
            if last is None:
                raise ValueError(f"exponent without a base in {text!r}")
            k = int(power)
            del stack[-1][len(stack[-1]) - len(last):]
            stack[-1].extend(last * k)
            last = None
    if len(stack) != 1:
        raise ValueError(f"unbalanced '(' in {text!r}")
    return stack[0]


def word_inverse(word: Sequence[str]) -> list[str]:
    inv = {"a": "a", "b": "B", "B": "b"}
    return [inv[x] for x in reversed(word)]


@dataclass(frozen=True)
class TrianglePresentation:
    ell: int
    m: int
    extra_relators: tuple[str, ...] = ()

    def __post_init__(self):
        if self.ell < 3 or self.m < 3:
            raise ValueError("need l >= 3 and m >= 3")
        if 2 * (self.ell + self.m) >= self.ell * self.m:
            raise ValueError(f"(l, m) = ({self.ell}, {self.m}) is not hyperbolic: 1/l + 1/m >= 1/2")
        for w in self.extra_relators:
            if not parse_word(w):
                raise ValueError(f"empty relator {w!r}")

    @property
    def max_face(self) -> int:
        return max(self.ell, 2 * self.m)

    def base_relators(self) -> list[list[str]]:
        return [["a", "a"], ["b"] * self.ell, ["a", "b"] * self.m]

    def relators(self) -> list[list[str]]:
        return self.base_relators() + [parse_word(w) for w in self.extra_relators]


# ---- coset enumeration ---------------------------------------------------------

class _CosetTable:
    """Coset table with union-find coincidence handling (HLT plus deductions)."""

    def __init__(self, relators: list[list[int]], max_cosets: int):
        self.rels = relators
        self.max_cosets = max_cosets
        self.table: list[list[int]] = [[-1, -1, -1]]
        self.parent = [0]
        self.depth = [0]
        self.deductions: deque[tuple[int, int]] = deque()
        # cyclic conjugates of every relator and its inverse, keyed by first letter
        self.by_first: dict[int, list[list[int]]] = {0: [], 1: [], 2: []}
        seen = set()
        for r in relators:
            for w in (r, [_INV[x] for x in reversed(r)]):
                for i in range(len(w)):
                    c = tuple(w[i:] + w[:i])
                    if c not in seen:
                        seen.add(c)
                        self.by_first[c[0]].append(list(c))

    def rep(self, c: int) -> int:
        p = self.parent
        root = c
        while p[root] != root:
            root = p[root]
        while p[c] != root:
            p[c], c = root, p[c]
        return root

    def alive(self, c: int) -> bool:
        return self.parent[c] == c

    def n_alive(self) -> int:
        return sum(1 for c in range(len(self.parent)) if self.parent[c] == c)

    def define(self, c: int, x: int) -> None:
        n = len(self.table)
        if n >= self.max_cosets:
            raise Overflow(f"coset limit {self.max_cosets} reached")
        self.table.append([-1, -1, -1])
        self.parent.append(n)
        self.depth.append(self.depth[c] + 1)
        self.table[c][x] = n
        self.table[n][_INV[x]] = c
        self.deductions.append((c, x))

    def _set(self, c: int, x: int, d: int) -> None:
        self.table[c][x] = d
        self.table[d][_INV[x]] = c
        self.deductions.append((c, x))

    def _merge(self, k: int, l: int, queue: list[int]) -> None:
        k, l = self.rep(k), self.rep(l)
        if k == l:
            return
        if k > l:
            k, l = l, k
        self.parent[l] = k
        self.depth[k] = min(self.depth[k], self.depth[l])
        queue.append(l)

    def coincidence(self, a: int, b: int) -> None:
        queue: list[int] = []
        self._merge(a, b, queue)
        i = 0
        t = self.table
        while i < len(queue):
            e = queue[i]
            i += 1
            for x in range(3):
                f = t[e][x]
                if f == -1:
                    continue
                if t[f][_INV[x]] == e:
                    t[f][_INV[x]] = -1
                e1, f1 = self.rep(e), self.rep(f)
                if t[e1][x] != -1:
                    self._merge(f1, t[e1][x], queue)
                elif t[f1][_INV[x]] != -1:
                    self._merge(e1, t[f1][_INV[x]], queue)
                else:
                    self._set(e1, x, f1)

    def scan_and_fill(self, c: int, w: list[int]) -> None:
        t = self.table
        f, i = c, 0
        b, j = c, len(w) - 1
        while True:
            while i <= j and t[f][w[i]] != -1:
                f = t[f][w[i]]
                i += 1
            if i > j:
                # the forward scan met the backward one
                if f != b:
                    self.coincidence(f, b)
                return
            while j >= i and t[b][_INV[w[j]]] != -1:
                b = t[b][_INV[w[j]]]
                j -= 1
            if j < i:
                self.coincidence(f, b)
                return
            if i == j:
                self._set(f, w[i], b)
                return
            self.define(f, w[i])

    def scan(self, c: int, w: list[int]) -> None:
        """Scan without defining: deduce a single gap or report a coincidence."""
        t = self.table
        f, i = c, 0
        b, j = c, len(w) - 1
        while i <= j and t[f][w[i]] != -1:
            f = t[f][w[i]]
            i += 1
        if i > j:
            if f != c:
                self.coincidence(f, c)
            return
        while j >= i and t[b][_INV[w[j]]] != -1:
            b = t[b][_INV[w[j]]]
            j -= 1
        if j < i:
            self.coincidence(f, b)
        elif i == j:
            self._set(f, w[i], b)

    def process_deductions(self) -> None:
        while self.deductions:
            c, x = self.deductions.popleft()
            if not self.alive(c):
                continue
            for w in self.by_first[x]:
                if not self.alive(c):
                    break
                self.scan(c, w)
            d = self.table[c][x]
            if d != -1 and self.alive(d):
                for w in self.by_first[_INV[x]]:
                    if not self.alive(d):
                        break
                    self.scan(d, w)

    def complete(self, c: int) -> None:
        for w in self.rels:
            if not self.alive(c):
                return
            self.scan_and_fill(c, w)
            if len(self.deductions) > 4096:
                self.deductions.clear()
            else:
                self.process_deductions()

    def run(self) -> None:
        c = 0
        while c < len(self.table):
            if self.alive(c):
                self.complete(c)
            c += 1

    def run_felsch(self, max_depth: int) -> None:
        """Fill gaps one at a time in breadth-first order, deducing after each.

        Only cosets at recorded depth below ``max_depth`` get new neighbours,
        which keeps the table a finite piece of an infinite Cayley graph.
        """
        c = 0
        while c < len(self.table):
            for x in range(3):
                if not self.alive(c) or self.depth[c] >= max_depth:
                    break
                if self.table[c][x] == -1:
                    self.define(c, x)
                    self.process_deductions()
            c += 1

    def standardize(self) -> list[list[int]]:
        """Live cosets renumbered in breadth-first order from coset 0."""
        order = {0: 0}
        queue = [0]
        i = 0
        t = self.table
        while i < len(queue):
            c = queue[i]
            i += 1
            for x in (1, 0, 2):
                d = t[c][x]
                if d == -1:
                    continue
                d = self.rep(d)
                if d not in order:
                    order[d] = len(queue)
                    queue.append(d)
        return [[order[self.rep(t[c][x])] if t[c][x] != -1 else -1 for x in range(3)] for c in queue]


def _encode(word: Sequence[str]) -> list[int]:
    return [_COL[x] for x in word]


@dataclass(frozen=True)
class FiniteGroupTable:
    """Right multiplication by a, b and B on the elements ``0..order-1`` (0 is 1)."""

    mult_a: tuple[int, ...]
    mult_b: tuple[int, ...]
    mult_B: tuple[int, ...]

    @property
    def order(self) -> int:
        return len(self.mult_a)

    def column(self, g: str) -> tuple[int, ...]:
        return {"a": self.mult_a, "b": self.mult_b, "B": self.mult_B}[g]

    def act(self, x: int, word: Iterable[str]) -> int:
        for g in word:
            x = self.column(g)[x]
        return x

    def element_order(self, word: Sequence[str], limit: int | None = None) -> int:
        """Order of the group element represented by ``word``."""
        limit = limit or self.order
        x, k = self.act(0, word), 1
        while x != 0:
            x = self.act(x, word)
            k += 1
            if k > limit:
                raise RelatorViolation("element order exceeds the group order")
        return k

    def satisfies(self, word: Sequence[str]) -> bool:
        return all(self.act(x, word) == x for x in range(self.order))

    def check(self, pres: TrianglePresentation) -> None:
        """Raise RelatorViolation unless the table is a transitive action
        satisfying every relator."""
        n = self.order
        for name in GENS:
            if sorted(self.column(name)) != list(range(n)):
                raise RelatorViolation(f"multiplication by {name} is not a permutation")
        for x in range(n):
            if self.mult_B[self.mult_b[x]] != x:
                raise RelatorViolation("mult_B is not the inverse of mult_b")
        for w in pres.relators():
            if not self.satisfies(w):
                raise RelatorViolation(f"relator {''.join(w)} does not hold")
        seen = {0}
        stack = [0]
        while stack:
            x = stack.pop()
            for name in GENS:
                y = self.column(name)[x]
                if y not in seen:
                    seen.add(y)
                    stack.append(y)
        if len(seen) != n:
            raise RelatorViolation("action is not transitive")

    def to_json(self) -> dict:
        return {"a": list(self.mult_a), "b": list(self.mult_b), "B": list(self.mult_B)}


def coset_enumerate(pres: TrianglePresentation, max_cosets: int = DEFAULT_MAX_COSETS) -> FiniteGroupTable:
    """Finite quotient of T(l, m) cut out by the extra relators.

    Raises Overflow when the table does not close within ``max_cosets`` and
    DegenerateQuotient when the quotient is too small to carry the tiling
    (order below 4m) or when b, ab do not keep their full orders l, m.
    """
    if not pres.extra_relators:
        raise Overflow("T(l, m) is infinite without extra relators")
    ct = _CosetTable([_encode(w) for w in pres.relators()], max_cosets)
    ct.run()
    rows = ct.standardize()
    cols = list(zip(*rows)) if rows else [(), (), ()]
    if any(-1 in col for col in cols):
        raise Overflow("coset table is incomplete")
    grp = FiniteGroupTable(tuple(cols[0]), tuple(cols[1]), tuple(cols[2]))
    grp.check(pres)
    if grp.order < 4 * pres.m:
        raise DegenerateQuotient(f"order {grp.order} < 4m = {4 * pres.m}")
    if grp.mult_a[0] == 0:
        raise DegenerateQuotient("a collapses to the identity")
    ob = grp.element_order(["b"])
    oab = grp.element_order(["a", "b"])
    if ob != pres.ell or oab != pres.m:
        raise DegenerateQuotient(f"orders of b, ab are {ob}, {oab} instead of {pres.ell}, {pres.m}")
    return grp


# ---- tilings -----------------------------------------------------------------

def cayley_tiling(grp: FiniteGroupTable, pres: TrianglePresentation) -> CombinatorialMap:
    """Trivalent map on the group elements with darts ``3*g + slot``.

    Slots are ``b, a, B`` in counterclockwise order; the a-dart of g pairs
    with the a-dart of ga and the b-dart of g with the B-dart of gb.
    """
    if grp.order < 2:
        raise DegenerateQuotient("trivial group")
    grp.check(pres)
    n = grp.order
    alpha = [0] * (3 * n)
    sigma = [0] * (3 * n)
    for g in range(n):
        b, a, B = 3 * g, 3 * g + 1, 3 * g + 2
        sigma[b], sigma[a], sigma[B] = a, B, b
        alpha[a] = 3 * grp.mult_a[g] + 1
        alpha[b] = 3 * grp.mult_b[g] + 2
        alpha[B] = 3 * grp.mult_B[g]
        if alpha[a] == a:
            raise RelatorViolation(f"element {g} is fixed by a")
    return CombinatorialMap(alpha, sigma, labels=list(ROTATION) * n)


def face_kinds(m: CombinatorialMap) -> list[str]:
    """``"b"`` for faces made of b-darts, ``"ab"`` for the alternating ones."""
    from .errors import MissingLabels

    if m.labels is None:
        raise MissingLabels("face kinds need generator labels")
    return ["b" if all(m.labels[d] == "b" for d in f) else "ab" for f in m.faces]


# ---- balls ------------------------------------------------------------------------

@dataclass
class Ball:
    """Finite piece of a labelled trivalent tiling around vertex 0.

    Darts follow the Cayley layout (``3*v + slot``); ``alpha[d] == -1`` marks a
    pendant dart leaving the ball.
    """

    alpha: list[int]
    sigma: list[int]
    labels: list[str]
    dist: list[int]
    radius: int
    boundary: list[bool] = field(default_factory=list)

    @property
    def n_vertices(self) -> int:
        return len(self.dist)

    @property
    def n_darts(self) -> int:
        return len(self.alpha)

    def vertex_of_dart(self, d: int) -> int:
        return d // 3

    def darts_at(self, v: int) -> list[int]:
        return [3 * v, 3 * v + 1, 3 * v + 2]

    def edges(self) -> list[tuple[int, int]]:
        return [(d // 3, self.alpha[d] // 3) for d in range(self.n_darts)
                if self.alpha[d] > d]


@lru_cache(maxsize=32)
def _planar_table(ell: int, m: int, depth: int, max_cosets: int) -> tuple[tuple[int, ...], ...]:
    pres = TrianglePresentation(ell, m)
    ct = _CosetTable([_encode(w) for w in pres.base_relators()], max_cosets)
    ct.run_felsch(depth)
    return tuple(tuple(r) for r in ct.standardize())


def infinite_ball(pres: TrianglePresentation, r: int, margin: int | None = None,
                  max_cosets: int = 2_000_000) -> Ball:
    """Radius-r ball of the planar tiling of T(l, m) around the identity.

    Faces are completed around every vertex out to depth ``r + margin``
    (default: the longest face length), then the induced ball of radius r
    is cut out. Only the three face relators are used, so vertices are
    identified exactly when a chain of closed faces forces it.
    """
    if r < 0:
        raise ValueError("radius must be non-negative")
    margin = pres.max_face // 2 + 1 if margin is None else margin
    try:
        rows = _planar_table(pres.ell, pres.m, r + margin, max_cosets)
    except Overflow as exc:
        raise ResourceExceeded(f"ball of radius {r} needs more than {max_cosets} cosets") from exc
    # rows are in BFS order, so distances are monotone along the table
    dist = [-1] * len(rows)
    dist[0] = 0
    queue = deque([0])
    while queue:
        c = queue.popleft()
        if dist[c] == r:
            continue
        for x in range(3):
            d = rows[c][x]
            if d != -1 and dist[d] == -1:
                dist[d] = dist[c] + 1
                queue.append(d)
    keep = [c for c in range(len(rows)) if dist[c] != -1]
    index = {c: i for i, c in enumerate(keep)}
    alpha, sigma, labels = [], [], []
    boundary = []
    for c in keep:
        v = index[c]
        row = rows[c]
        for slot, g in enumerate(ROTATION):
            nb = row[_COL[g]]
            if nb == -1 or nb not in index:
                alpha.append(-1)
            else:
                partner = {"a": "a", "b": "B", "B": "b"}[g]
                alpha.append(3 * index[nb] + _SLOT[partner])
            sigma.append(3 * v + (slot + 1) % 3)
            labels.append(g)
        boundary.append(any(alpha[3 * v + k] == -1 for k in range(3)))
    return Ball(alpha, sigma, labels, [dist[c] for c in keep], r, boundary)


# ---- injectivity radius ------------------------------------------------------------

@dataclass(frozen=True)
class VerifiedRadius:
    r: int
    method: str = "ball-isomorphism"
    roots_checked: int = 0


def _vertex_darts(obj, v: int) -> list[int]:
    if isinstance(obj, Ball):
        return obj.darts_at(v)
    return obj.vertices[v]


def _dart_vertex(obj, d: int) -> int:
    if isinstance(obj, Ball):
        return d // 3
    return obj.vertex_of[d]


def _distances(obj, root: int, r: int) -> dict[int, int]:
    dist = {root: 0}
    queue = deque([root])
    while queue:
        v = queue.popleft()
        if dist[v] == r:
            continue
        for d in _vertex_darts(obj, v):
            e = obj.alpha[d]
            if e == -1:
                continue
            w = _dart_vertex(obj, e)
            if w not in dist:
                dist[w] = dist[v] + 1
                queue.append(w)
    return dist


def ball_code(obj, root_dart: int, r: int, use_labels: bool) -> tuple:
    """Canonical code of the induced radius-r ball around the root dart's vertex.

    Vertices are numbered breadth-first. With labels, each vertex lists its
    neighbours in b, a, B order; without labels, in rotation order starting
    from the dart through which it was first reached (the root starts at
    ``root_dart``). Neighbours outside the ball are coded as -1.
    """
    root = _dart_vertex(obj, root_dart)
    dist = _distances(obj, root, r)
    idx = {root: 0}
    start = {root: root_dart}
    order = [root]
    code = []
    i = 0
    while i < len(order):
        v = order[i]
        i += 1
        darts = _vertex_darts(obj, v)
        if use_labels:
            darts = sorted(darts, key=lambda d: _SLOT[obj.labels[d]])
        else:
            s = start[v]
            darts = [s]
            x = obj.sigma[s]
            while x != s:
                darts.append(x)
                x = obj.sigma[x]
        entry = []
        for d in darts:
            e = obj.alpha[d]
            if e == -1:
                entry.append(-1)
                continue
            w = _dart_vertex(obj, e)
            if w not in dist:
                entry.append(-1)
                continue
            if w not in idx:
                idx[w] = len(order)
                start[w] = e
                order.append(w)
            entry.append(idx[w])
        code.append(tuple(entry))
    return tuple(code)


def _reference_codes(pres: TrianglePresentation, r: int, use_labels: bool) -> tuple:
    ball = infinite_ball(pres, r)
    return ball_code(ball, 0, r, use_labels)


def verify_injectivity_radius(obj, pres: TrianglePresentation, roots: Sequence[int] | None = None,
                              max_r: int = 64) -> VerifiedRadius:
    """Largest r such that the radius-r ball at every root vertex matches the
    radius-r ball of the planar tiling.

    ``obj`` is a CombinatorialMap (labelled or not) or a Ball. Comparison is
    label-respecting when the input carries labels and rotation-respecting
    otherwise. ``roots`` defaults to every vertex; one root suffices for a
    vertex-transitive tiling.
    """
    use_labels = getattr(obj, "labels", None) is not None
    n_vertices = obj.n_vertices
    if roots is None:
        roots = range(n_vertices)
    roots = list(roots)
    if isinstance(obj, Ball):
        max_r = min(max_r, obj.radius)
    # the radius-0 ball is a single vertex and always matches
    best = 0
    for r in range(1, max_r + 1):
        ref = _reference_codes(pres, r, use_labels)
        ok = True
        for v in roots:
            darts = _vertex_darts(obj, v)
            if use_labels:
                candidates = [darts[0]]
            else:
                candidates = darts
            if not any(ball_code(obj, d, r, use_labels) == ref for d in candidates):
                ok = False
                break
        if not ok:
            break
        best = r
        if not isinstance(obj, Ball) and len(_distances(obj, roots[0], r)) == n_vertices:
            # the ball already covers the whole finite tiling; the next radius
            # cannot match an infinite one
            break
    return VerifiedRadius(best, roots_checked=len(roots))


# ---- catalog -----------------------------------------------------------------------

@dataclass(frozen=True)
class CatalogEntry:
    ell: int
    m: int
    relators: tuple[str, ...]
    note: str = ""
    order: int | None = None

    @property
    def presentation(self) -> TrianglePresentation:
        return TrianglePresentation(self.ell, self.m, self.relators)


def load_catalog(path: str | Path | None = None) -> list[CatalogEntry]:
    if path is None:
        text = resources.files("topocodes").joinpath("catalog.json").read_text()
    else:
        text = Path(path).read_text()
    out = []
    for item in json.loads(text):
        out.append(CatalogEntry(int(item["l"]), int(item["m"]), tuple(item["relators"]),
                                item.get("note", ""), item.get("order")))
    return out


def catalog_lookup(ell: int, m: int, path: str | Path | None = None) -> list[CatalogEntry]:
    found = [e for e in load_catalog(path) if e.ell == ell and e.m == m]
    if not found:
        raise CatalogMiss(f"no catalog relators for (l, m) = ({ell}, {m})")
    return found
