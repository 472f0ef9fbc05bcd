"""CSS codes from tilings: surface codes (qubits on edges) and color codes
(qubits on vertices of a trivalent 3-colored tiling)."""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

from .color import FaceColoring, validate_coloring
from .errors import NotTrivalent, ValidationFailure
from .gf2 import BitMatrix, bits, rank
from .tiling import CombinatorialMap


@dataclass(frozen=True)
class CssCode:
    """Pair of parity-check matrices on the same ``n`` columns.

    Orthogonality is not enforced here so that broken pairs can be handed
    to ``css_validate``; the tiling builders always validate.
    """

    h_x: BitMatrix
    h_z: BitMatrix
    kind: str
    chi: int | None = None
    components: int = 1
    source: str = ""

    def __post_init__(self):
        if self.h_x.ncols != self.h_z.ncols:
            raise ValueError("H_X and H_Z must have the same number of columns")

    @property
    def n(self) -> int:
        return self.h_x.ncols

    @cached_property
    def rank_x(self) -> int:
        return rank(self.h_x)

    @cached_property
    def rank_z(self) -> int:
        return self.rank_x if self.h_z is self.h_x else rank(self.h_z)

    @property
    def k(self) -> int:
        return self.n - self.rank_x - self.rank_z

    @property
    def k_expected(self) -> int | None:
        """Dimension predicted from the Euler characteristic."""
        if self.chi is None:
            return None
        if self.kind == "surface":
            return 2 * self.components - self.chi
        if self.kind == "color":
            return 4 * self.components - 2 * self.chi
        return None

    def sidecar(self) -> dict:
        return {
            "n": self.n,
            "k": self.k,
            "kind": self.kind,
            "chi": self.chi,
            "row_weight_max": max(self.h_x.row_weights() + self.h_z.row_weights(), default=0),
            "col_weight_max": max(self.h_x.col_weights() + self.h_z.col_weights(), default=0),
        }


def incidence_matrix(m: CombinatorialMap) -> BitMatrix:
    """Vertex by edge incidence; a loop meets its vertex twice and cancels."""
    return BitMatrix.from_support([[m.edge_of[d] for d in darts] for darts in m.vertices], m.n_edges)


def face_matrix(m: CombinatorialMap) -> BitMatrix:
    """Face by edge incidence, with multiplicity taken mod 2."""
    return BitMatrix.from_support([m.face_edges(f) for f in range(m.n_faces)], m.n_edges)


def face_vertex_matrix(m: CombinatorialMap) -> BitMatrix:
    """Face by vertex incidence (0/1, a face meeting a vertex twice still counts once)."""
    rows = []
    for f in range(m.n_faces):
        v = 0
        for u in m.face_vertices(f):
            v |= 1 << u
        rows.append(v)
    return BitMatrix(tuple(rows), m.n_vertices)


def _check_k(code: CssCode) -> CssCode:
    if code.k < 0 or code.k != code.k_expected:
        raise ValidationFailure(
            f"{code.kind} code: rank gives k={code.k}, Euler characteristic gives {code.k_expected}")
    if not code.h_x.matmul_t(code.h_z).is_zero():
        raise ValidationFailure(f"{code.kind} code: H_X and H_Z are not orthogonal")
    return code


def _n_components(m: CombinatorialMap) -> int:
    return len(m.components) if m.multi_component else 1


def surface_code(m: CombinatorialMap, source: str = "") -> CssCode:
    """Qubits on edges, X checks on vertices, Z checks on faces."""
    code = CssCode(incidence_matrix(m), face_matrix(m), "surface", m.euler_characteristic,
                   _n_components(m), source)
    return _check_k(code)


def color_code(m: CombinatorialMap, coloring: FaceColoring, source: str = "") -> CssCode:
    """Qubits on vertices; every face is both an X and a Z check."""
    if not m.is_trivalent():
        raise NotTrivalent("color codes need a trivalent tiling")
    validate_coloring(m, coloring)
    h = face_vertex_matrix(m)
    code = CssCode(h, h, "color", m.euler_characteristic, _n_components(m), source)
    return _check_k(code)


@dataclass
class CssReport:
    orthogonal: bool
    violations: list[tuple[int, int]] = field(default_factory=list)
    k: int = 0
    k_expected: int | None = None
    faces_are_cycles: bool = True
    x_row_weight_max: int = 0
    z_row_weight_max: int = 0
    x_col_weight_max: int = 0
    z_col_weight_max: int = 0
    problems: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.problems

    def to_json(self) -> dict:
        out = dict(self.__dict__)
        out["violations"] = [list(v) for v in self.violations]
        out["ok"] = self.ok
        return out


def css_validate(code: CssCode) -> CssReport:
    """Check orthogonality, the Euler prediction of k and LDPC weights.

    ``violations`` lists ``(x_row, z_row)`` pairs with odd overlap.
    """
    prod = code.h_x.matmul_t(code.h_z)
    violations = [(i, j) for i, row in enumerate(prod.rows) for j in bits(row)]
    rep = CssReport(orthogonal=not violations, violations=violations, k=code.k,
                    k_expected=code.k_expected)
    if violations:
        rep.problems.append(f"{len(violations)} non-orthogonal row pairs")
    if rep.k_expected is not None and rep.k != rep.k_expected:
        rep.problems.append(f"k={rep.k} but the Euler characteristic predicts {rep.k_expected}")
    if rep.k < 0:
        rep.problems.append("negative dimension")
    if code.kind == "surface":
        # a face row lies in ker H_X exactly when it is orthogonal to every vertex row
        rep.faces_are_cycles = not violations
    rep.x_row_weight_max = max(code.h_x.row_weights(), default=0)
    rep.z_row_weight_max = max(code.h_z.row_weights(), default=0)
    rep.x_col_weight_max = max(code.h_x.col_weights(), default=0)
    rep.z_col_weight_max = max(code.h_z.col_weights(), default=0)
    return rep
