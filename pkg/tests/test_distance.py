import math
import random

import pytest
from hypothesis import given, strategies as st

import topocodes.distance as distance
from oracles import brute_force_css_distance, brute_force_systole, is_boundary, short_cycles
from topocodes.color import color_cover_faces, double_cover, is_three_colorable
from topocodes.css import color_code, face_vertex_matrix, surface_code
from topocodes.distance import (INF, DistanceReport, color_distance, color_distance_bounds,
                                color_distance_exact, combinatorial_systole, css_distance_exact,
                                face_centered_triangulation, is_logical, min_weight_logical,
                                planarity_certificate, refinement_inequality_check, shrunk_systoles,
                                surface_distance, verify_cycle_certificate)
from topocodes.errors import (InequalityViolation, InfeasibleSize, NotInKernel, ValidationFailure)
from topocodes.gf2 import bits, echelon, from_indices
from topocodes.hyperbolic import TrianglePresentation, cayley_tiling, coset_enumerate
from topocodes.lattices import (brick_torus, cube, hex_torus, klein_bottle, square_torus,
                                tetrahedron, triangular_torus)
from topocodes.tiling import dual_map, validate_map


def cayley(ell, m, rel):
    pres = TrianglePresentation(ell, m, (rel,))
    return cayley_tiling(coset_enumerate(pres), pres)


def colored(t):
    col = is_three_colorable(t)
    if not col:
        t = double_cover(t)
        col = color_cover_faces(t)
    return t, col


SMALL_COLOR = [lambda: hex_torus(3), lambda: cayley(4, 6, "(abb)^2"), lambda: cayley(6, 4, "(abb)^2"),
               lambda: brick_torus(6, 2)]


# ---- systoles ----------------------------------------------------------------------

def test_square_torus_systole():
    rep = combinatorial_systole(square_torus(3))
    assert rep.value_exact == 3 and rep.methods == ["systole-bfs"]
    assert verify_cycle_certificate(square_torus(3), rep.certificate)


def test_sphere_systole_infinite():
    rep = combinatorial_systole(tetrahedron())
    assert rep.value_exact == INF and rep.k_zero
    assert surface_distance(cube()).k_zero
    assert rep.to_json()["upper"] == "inf"


@pytest.mark.parametrize("L", [3, 4, 5])
def test_square_torus_family(L):
    m = square_torus(L)
    rep = combinatorial_systole(m)
    assert rep.value_exact == L
    if L <= 4:
        assert brute_force_systole(m) == L


@pytest.mark.parametrize("build", [
    lambda: square_torus(3), lambda: square_torus(4), lambda: square_torus(3, 4),
    lambda: klein_bottle(3), lambda: klein_bottle(4), lambda: dual_map(klein_bottle(3)),
    lambda: triangular_torus(3), lambda: hex_torus(3), lambda: hex_torus(4), lambda: brick_torus(3, 2),
    lambda: cayley(4, 6, "(abb)^2"), lambda: cayley(6, 4, "(abb)^2"), lambda: cayley(4, 8, "(abb)^2"),
    tetrahedron, cube])
def test_systole_matches_brute_force(build):
    m = build()
    want = brute_force_systole(m)
    got = combinatorial_systole(m)
    assert got.value_exact == (INF if want is None else want)
    if want is not None:
        assert verify_cycle_certificate(m, got.certificate)
        assert len(got.certificate) == want


def test_hurwitz_surface_distance():
    t = cayley(3, 7, "(aBab)^4")
    rep = surface_distance(t)
    assert rep.value_exact == 4
    assert rep.notes == {"side": "dual", "primal": 16, "dual": 4}
    d = dual_map(t)
    assert verify_cycle_certificate(d, rep.certificate)
    # no nontrivial cycle of weight <= 3 on either side
    for m in (t, d):
        assert all(is_boundary(m, c) for c in short_cycles(m, 3))


def test_surface_distance_dual_invariant():
    for m in (square_torus(3, 5), hex_torus(3), klein_bottle(4)):
        a = surface_distance(m)
        b = surface_distance(dual_map(dual_map(m)))
        assert a.value_exact == b.value_exact
        assert surface_distance(dual_map(m)).value_exact == a.value_exact


def test_css_distance_matches_systole():
    for L in (3, 4):
        code = surface_code(square_torus(L))
        rep = css_distance_exact(code)
        assert rep.value_exact == L
    kb = klein_bottle(3)
    assert css_distance_exact(surface_code(kb)).value_exact == surface_distance(kb).value_exact


def test_css_distance_cap():
    code = surface_code(cayley(3, 7, "(aBab)^4"))
    rep = css_distance_exact(code, weight_cap=5)
    assert rep.value_exact == 4 and rep.notes["side"] == "x"
    with pytest.raises(InfeasibleSize) as info:
        css_distance_exact(code, weight_cap=3)
    assert info.value.lower == 4


def test_report_invariants():
    with pytest.raises(ValidationFailure):
        DistanceReport(5, 4)
    with pytest.raises(ValidationFailure):
        DistanceReport(3, 5, 4)
    assert DistanceReport.exact(3, "bruteforce").is_exact


# ---- color code distance ----------------------------------------------------------------

@pytest.mark.parametrize("build", SMALL_COLOR)
def test_color_distance_matches_kernel_enumeration(build, monkeypatch):
    t, col = colored(build())
    code = color_code(t, col)
    want = brute_force_css_distance(code.h_x.rows, code.h_x.rows, code.n)
    rep = color_distance_exact(code)
    assert rep.value_exact == want
    assert is_logical(code.h_x.rows, echelon(code.h_x), from_indices(rep.certificate))
    # the branch-and-bound path agrees
    monkeypatch.setattr(distance, "GRAY_MAX_DIM", -1)
    assert color_distance_exact(code).value_exact == want


@pytest.mark.parametrize("build,expected", [
    (lambda: cayley(8, 3, "(abaBB)^2"), 4), (lambda: cayley(8, 3, "(abaB)^3"), 6),
    (lambda: cayley(4, 5, "(abaB)^3"), 6), (lambda: hex_torus(6), 8), (lambda: hex_torus(9), 12)])
def test_color_distance_regression(build, expected):
    t, col = colored(build())
    code = color_code(t, col)
    rep = color_distance(t, col, code)
    assert rep.value_exact == expected
    assert rep.upper == expected


def test_color_distance_k_zero():
    t = cube()
    code = color_code(t, is_three_colorable(t))
    rep = color_distance_exact(code)
    assert rep.k_zero and rep.value_exact == INF


def test_face_row_is_not_logical():
    t = hex_torus(3)
    code = color_code(t, is_three_colorable(t))
    stab = echelon(code.h_x)
    for row in code.h_x.rows:
        assert not is_logical(code.h_x.rows, stab, row)


def test_seed_and_node_limit():
    t, col = colored(cayley(8, 3, "(abaB)^3"))
    code = color_code(t, col)
    with pytest.raises(NotInKernel):
        color_distance_exact(code, seed=[0])
    with pytest.raises(InfeasibleSize):
        color_distance_exact(code, node_limit=10)
    rep = color_distance(t, col, code, verified_r=5, node_limit=10)
    assert not rep.is_exact
    assert rep.lower == 1 and rep.upper == 6


def test_weight_cap_gives_lower_bound():
    t, col = colored(cayley(8, 3, "(abaB)^3"))
    code = color_code(t, col)
    with pytest.raises(InfeasibleSize) as info:
        color_distance_exact(code, weight_cap=4)
    assert info.value.lower == 5


def test_min_weight_logical_rejects_non_orthogonal():
    code = surface_code(square_torus(3))
    with pytest.raises(ValueError):
        min_weight_logical(code.h_x, code.h_x)


# ---- bounds -------------------------------------------------------------------------------

def test_bounds_hex_torus():
    t = hex_torus(3)
    col = is_three_colorable(t)
    rep = color_distance_bounds(t, col, 0)
    assert rep.lower == 0
    exact = color_distance_exact(color_code(t, col))
    assert exact.value_exact <= rep.upper
    assert rep.upper == 2 * min(s for s, _ in shrunk_systoles(t, col))


def test_lifted_cycle_is_logical():
    for t in (hex_torus(6), cayley(8, 3, "(abaBB)^2")):
        t, col = colored(t)
        code = color_code(t, col)
        stab = echelon(code.h_x)
        for s, lift in shrunk_systoles(t, col):
            assert len(lift) == 2 * s
            assert is_logical(code.h_x.rows, stab, from_indices(lift))


def test_lower_bound_grows_with_radius():
    t, col = colored(cayley(8, 3, "(abaB)^4"))
    lows = [color_distance_bounds(t, col, r).lower for r in (0, 24, 48, 72)]
    assert lows == [0, 1, 2, 3]


def test_inconsistent_bounds_raise():
    t = hex_torus(3)
    col = is_three_colorable(t)
    with pytest.raises(ValidationFailure):
        color_distance_bounds(t, col, verified_r=1000)
    with pytest.raises(ValueError):
        color_distance_bounds(t, col, verified_r=-1)


# ---- planarity certificates ----------------------------------------------------------------

def test_planarity_examples():
    t = hex_torus(3)
    col = is_three_colorable(t)
    # on the 3x3 torus a face and its neighbours already wrap around
    assert not planarity_certificate(face_vertex_matrix(t).rows[0], t, col).planar
    big = hex_torus(6)
    big_col = is_three_colorable(big)
    one = planarity_certificate(face_vertex_matrix(big).rows[0], big, big_col)
    assert one.planar and one.in_stabilizer and len(one.faces) == 7
    zero = planarity_certificate(0, t, col)
    assert zero.planar and zero.in_stabilizer and zero.faces == ()
    cert = color_distance_exact(color_code(t, col)).certificate
    res = planarity_certificate(cert, t, col)
    assert not res.planar and not res.in_stabilizer
    with pytest.raises(NotInKernel):
        planarity_certificate([0], t, col)


def test_planarity_hyperbolic_certificates():
    for base in (cayley(8, 3, "(abaB)^3"), cayley(4, 5, "(abaB)^3")):
        t, col = colored(base)
        cert = color_distance_exact(color_code(t, col)).certificate
        assert not planarity_certificate(cert, t, col).planar


def test_planarity_random_stabilizers():
    t = hex_torus(6)
    col = is_three_colorable(t)
    h = face_vertex_matrix(t)
    stab = echelon(h)
    rng = random.Random(7)
    for _ in range(40):
        picks = rng.sample(range(h.nrows), rng.randint(1, 3))
        x = 0
        for i in picks:
            x ^= h.rows[i]
        res = planarity_certificate(x, t, col, stab=stab)
        assert res.in_stabilizer


# ---- triangulation refinement ----------------------------------------------------------------

def test_face_centered_counts():
    t = face_centered_triangulation(square_torus(3))
    assert (t.n_vertices, t.n_edges, t.n_faces, t.euler_characteristic) == (18, 54, 36, 0)
    t = face_centered_triangulation(tetrahedron())
    assert (t.n_vertices, t.n_edges, t.n_faces, t.euler_characteristic) == (8, 18, 12, 2)


@given(st.sampled_from(["sq", "kb", "hex", "brick", "cube"]), st.integers(3, 5))
def test_face_centered_triangulation_properties(kind, L):
    g = {"sq": lambda: square_torus(L), "kb": lambda: klein_bottle(L), "hex": lambda: hex_torus(L),
         "brick": lambda: brick_torus(L, 2), "cube": cube}[kind]()
    t = face_centered_triangulation(g)
    validate_map(t)
    assert t.n_faces == 2 * g.n_edges
    assert t.euler_characteristic == g.euler_characteristic
    assert all(len(f) == 3 for f in t.faces)
    assert t.n_vertices == g.n_vertices + g.n_faces


def test_refinement_examples():
    rep = refinement_inequality_check(square_torus(3))
    assert (rep.csyst_g, rep.m, rep.csyst_t) == (3, 4, 3) and rep.holds
    assert refinement_inequality_check(hex_torus(3)).holds
    assert refinement_inequality_check(tetrahedron()).skipped
    hur = refinement_inequality_check(cayley(3, 7, "(aBab)^4"))
    assert (hur.csyst_g, hur.csyst_t, hur.m) == (16, 8, 14)


def test_refinement_fails_on_triangles():
    # cycles of G survive in T unchanged, so csyst(T) = csyst(G) and m/4 < 1
    with pytest.raises(InequalityViolation):
        refinement_inequality_check(triangular_torus(3))
