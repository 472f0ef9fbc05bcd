"""Small reference tilings: polyhedra, square/triangular/hexagonal tori,
brick walls and a Klein bottle."""

from __future__ import annotations

from typing import Sequence

from .errors import InvalidMap
from .tiling import CombinatorialMap


def from_faces(faces: Sequence[Sequence[int]]) -> CombinatorialMap:
    """Map from coherently oriented faces given as vertex cycles.

    Every directed edge ``(u, v)`` must occur in exactly one face, and its
    reverse in exactly one other; simple graphs only.
    """
    darts: dict[tuple[int, int], int] = {}
    nxt: dict[int, tuple[int, int]] = {}
    for face in faces:
        for i, u in enumerate(face):
            key = (u, face[(i + 1) % len(face)])
            if key in darts:
                raise InvalidMap(f"directed edge {key} used twice")
            darts[key] = len(darts)
    for face in faces:
        L = len(face)
        for i in range(L):
            d = darts[(face[i], face[(i + 1) % L])]
            nxt[d] = (face[(i + 1) % L], face[(i + 2) % L])
    n = len(darts)
    alpha = [0] * n
    sigma = [0] * n
    for (u, v), d in darts.items():
        if (v, u) not in darts:
            raise InvalidMap(f"edge {(u, v)} has no reverse")
        alpha[d] = darts[(v, u)]
    for (u, v), d in darts.items():
        # sigma = phi . alpha, phi being the face successor
        sigma[d] = darts[nxt[alpha[d]]]
    return CombinatorialMap(alpha, sigma)


def tetrahedron() -> CombinatorialMap:
    return from_faces([(0, 1, 2), (0, 2, 3), (0, 3, 1), (1, 3, 2)])


def cube() -> CombinatorialMap:
    return from_faces([
        (0, 3, 2, 1), (4, 5, 6, 7), (0, 1, 5, 4),
        (1, 2, 6, 5), (2, 3, 7, 6), (3, 0, 4, 7),
    ])


def _square_grid(L: int, M: int, flip: bool) -> CombinatorialMap:
    # darts 4*v + k with k = E, N, W, S (counterclockwise)
    def vid(i, j):
        return (i % L) + L * (j % M)

    n = 4 * L * M
    alpha = [0] * n
    sigma = [0] * n
    twist = [False] * n
    for j in range(M):
        for i in range(L):
            v = vid(i, j)
            for k in range(4):
                sigma[4 * v + k] = 4 * v + (k + 1) % 4
            up = vid(i, j + 1)
            alpha[4 * v + 1] = 4 * up + 3
            alpha[4 * up + 3] = 4 * v + 1
            if flip and i == L - 1:
                right = vid(0, M - 1 - j)
                twist[4 * v] = twist[4 * right + 2] = True
            else:
                right = vid(i + 1, j)
            alpha[4 * v] = 4 * right + 2
            alpha[4 * right + 2] = 4 * v
    return CombinatorialMap(alpha, sigma, twist=twist if flip else None)


def square_torus(L: int, M: int | None = None) -> CombinatorialMap:
    """L x M square lattice with periodic boundaries (toric code tiling)."""
    return _square_grid(L, L if M is None else M, flip=False)


def klein_bottle(L: int, M: int | None = None) -> CombinatorialMap:
    """Square lattice glued periodically vertically and with a flip horizontally."""
    return _square_grid(L, L if M is None else M, flip=True)


def triangular_torus(L: int) -> CombinatorialMap:
    if L < 3:
        raise ValueError("triangular torus needs L >= 3")

    def vid(i, j):
        return (i % L) + L * (j % L)

    faces = []
    for j in range(L):
        for i in range(L):
            faces.append((vid(i, j), vid(i + 1, j), vid(i, j + 1)))
            faces.append((vid(i + 1, j), vid(i + 1, j + 1), vid(i, j + 1)))
    return from_faces(faces)


def hex_torus(L: int) -> CombinatorialMap:
    """Honeycomb with L*L hexagons, as the dual of the triangular torus.

    Hexagon ``i + L*j`` sits at triangular-lattice site ``(i, j)``; faces are
    3-colorable iff ``L % 3 == 0``.
    """
    from .tiling import dual_map

    return dual_map(triangular_torus(L))


def brick_torus(W: int, H: int) -> CombinatorialMap:
    """Trivalent brick wall on a W x H grid with periodic boundaries.

    Vertex (i, j) links horizontally to both neighbours and vertically up
    when ``i + j`` is even, down otherwise. H must be even. For even W all
    faces are hexagons and the graph is bipartite; for odd W one column of
    faces turns into squares and octagons and the graph has odd cycles.
    """
    if H % 2:
        raise ValueError("brick torus needs an even height")

    def vid(i, j):
        return (i % W) + W * (j % H)

    # darts 3*v + k: k=0 right, 1 vertical, 2 left
    n = 3 * W * H
    alpha = [0] * n
    sigma = [0] * n
    for j in range(H):
        for i in range(W):
            v = vid(i, j)
            r, vert, left = 3 * v, 3 * v + 1, 3 * v + 2
            if (i + j) % 2 == 0:
                # right, up, left counterclockwise
                sigma[r], sigma[vert], sigma[left] = vert, left, r
                above = vid(i, j + 1)
                alpha[vert] = 3 * above + 1
                alpha[3 * above + 1] = vert
            else:
                # right, left, down
                sigma[r], sigma[left], sigma[vert] = left, vert, r
            right = vid(i + 1, j)
            alpha[r] = 3 * right + 2
            alpha[3 * right + 2] = r
    return CombinatorialMap(alpha, sigma)
