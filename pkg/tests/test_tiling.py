import json
import random

import pytest
from hypothesis import given, strategies as st

from oracles import orientable_by_signs
from topocodes.errors import Disconnected, InvalidInvolution, InvalidMap, IoFailure
from topocodes.lattices import (brick_torus, cube, from_faces, hex_torus, klein_bottle, square_torus,
                                tetrahedron, triangular_torus)
from topocodes.tiling import (CombinatorialMap, dual_map, from_flags, is_isomorphic, load_map,
                              orientability, save_map, untwist, validate_map)


def relabel(m, perm):
    """Same map with dart d renamed perm[d]."""
    inv = {p: d for d, p in enumerate(perm)}
    n = m.n_darts
    alpha = [perm[m.alpha[inv[i]]] for i in range(n)]
    sigma = [perm[m.sigma[inv[i]]] for i in range(n)]
    labels = [m.labels[inv[i]] for i in range(n)] if m.labels else None
    twist = [m.twist[inv[i]] for i in range(n)] if m.twist else None
    return CombinatorialMap(alpha, sigma, labels=labels, twist=twist)


def test_tetrahedron_stats():
    s = validate_map(tetrahedron())
    assert (s.v_count, s.e_count, s.f_count, s.euler_char) == (4, 6, 4, 2)
    assert s.orientable and s.genus_or_crosscap == 0


def test_square_torus_stats():
    s = validate_map(square_torus(3))
    assert (s.v_count, s.e_count, s.f_count, s.euler_char) == (9, 18, 9, 0)
    assert s.orientable and s.genus_or_crosscap == 1
    assert s.max_face_len == 4 and s.max_vertex_degree == 4


def test_klein_bottle_stats():
    s = validate_map(klein_bottle(3))
    assert s.euler_char == 0
    assert not s.orientable
    assert s.genus_or_crosscap == 2


def test_alpha_fixed_point_rejected():
    with pytest.raises(InvalidInvolution):
        validate_map(CombinatorialMap([0, 1], [1, 0]))


def test_alpha_not_involution_rejected():
    with pytest.raises(InvalidInvolution):
        validate_map(CombinatorialMap([1, 2, 3, 0], [0, 1, 2, 3]))


def test_odd_dart_count_rejected():
    with pytest.raises(InvalidInvolution):
        validate_map(CombinatorialMap([1, 0, 2], [0, 1, 2]))


def test_disconnected_rejected():
    t = tetrahedron()
    n = t.n_darts
    two = CombinatorialMap(list(t.alpha) + [a + n for a in t.alpha],
                           list(t.sigma) + [s + n for s in t.sigma])
    with pytest.raises(Disconnected):
        validate_map(two)
    assert validate_map(two, require_connected=False).euler_char == 4


def test_bad_labels_rejected():
    t = tetrahedron()
    with pytest.raises(InvalidMap):
        validate_map(CombinatorialMap(t.alpha, t.sigma, labels=["a"] * (t.n_darts - 1) + ["b"]))


def test_short_faces_warned():
    # a single loop on the sphere: two faces of length 1
    s = validate_map(CombinatorialMap([1, 0], [1, 0]))
    assert s.euler_char == 2
    assert s.warnings


@pytest.mark.parametrize("build", [lambda: square_torus(3), tetrahedron, cube, lambda: hex_torus(3),
                                   lambda: triangular_torus(3), lambda: klein_bottle(3)])
def test_dual_twice_isomorphic(build):
    m = build()
    d = dual_map(m)
    assert d.euler_characteristic == m.euler_characteristic
    assert (d.n_vertices, d.n_faces) == (m.n_faces, m.n_vertices)
    assert is_isomorphic(dual_map(d), m)


def test_self_dual_examples():
    assert is_isomorphic(dual_map(square_torus(3)), square_torus(3))
    assert is_isomorphic(dual_map(tetrahedron()), tetrahedron())
    assert not is_isomorphic(dual_map(hex_torus(3)), hex_torus(3))


def test_dual_of_untwisted_keeps_alpha():
    m = square_torus(4)
    d = dual_map(m)
    assert d.alpha == m.alpha and d.sigma == m.phi


@pytest.mark.parametrize("build,expected", [
    (lambda: square_torus(3), True), (lambda: klein_bottle(3), False),
    (tetrahedron, True), (lambda: klein_bottle(4), False), (lambda: hex_torus(3), True)])
def test_orientability_against_sign_search(build, expected):
    m = build()
    assert orientability(m) is expected
    if m.n_vertices <= 16:
        assert orientable_by_signs(m) is expected


def test_untwist_removes_spurious_twists():
    m = square_torus(3)
    # switching vertex 0: reverse its rotation and twist its edges
    darts0 = m.vertices[0]
    sigma = list(m.sigma)
    for d in darts0:
        sigma[m.sigma[d]] = d
    twist = [d in darts0 or m.alpha[d] in darts0 for d in range(m.n_darts)]
    t = CombinatorialMap(m.alpha, sigma, twist=twist)
    assert orientability(t)
    assert t.n_faces == m.n_faces
    u = untwist(t)
    assert u.twist is None
    assert is_isomorphic(u, m)
    # twisting without reversing is a different embedding
    t2 = CombinatorialMap(m.alpha, m.sigma, twist=twist)
    assert untwist(t2).n_faces == t2.n_faces != m.n_faces


def test_flag_involutions_and_rebuild():
    for m in (square_torus(3), klein_bottle(3), hex_torus(3)):
        a0, a1, a2 = m.flag_involutions
        for inv in (a0, a1, a2):
            assert all(inv[inv[f]] == f and inv[f] != f for f in range(len(inv)))
        # a0 and a2 commute on every flag
        assert all(a0[a2[f]] == a2[a0[f]] for f in range(len(a0)))
        back = from_flags(a0, a1, a2)
        assert is_isomorphic(back, m)


@given(st.integers(2, 6), st.integers(2, 6))
def test_square_torus_euler(L, M):
    m = square_torus(L, M)
    s = validate_map(m)
    assert (s.v_count, s.e_count, s.f_count) == (L * M, 2 * L * M, L * M)
    assert s.euler_char == 0 and s.orientable


@given(st.integers(3, 6))
def test_klein_bottle_never_orientable(L):
    s = validate_map(klein_bottle(L))
    assert s.euler_char == 0 and not s.orientable


@given(st.integers(2, 5), st.sampled_from([2, 4]))
def test_brick_torus_trivalent(W, H):
    m = brick_torus(W, H)
    assert m.is_trivalent()
    assert 2 * m.n_edges == 3 * m.n_vertices
    assert m.euler_characteristic == 0


@given(st.randoms(use_true_random=False))
def test_isomorphism_invariant_under_relabeling(rnd):
    m = hex_torus(3)
    perm = list(range(m.n_darts))
    rnd.shuffle(perm)
    r = relabel(m, perm)
    assert is_isomorphic(r, m)
    assert validate_map(r) == validate_map(m)


def test_isomorphism_distinguishes():
    assert not is_isomorphic(square_torus(3, 4), square_torus(2, 6))
    assert not is_isomorphic(square_torus(3), klein_bottle(3))


def test_from_faces_cube():
    m = cube()
    assert (m.n_vertices, m.n_edges, m.n_faces) == (8, 12, 6)
    with pytest.raises(Exception):
        from_faces([[0, 1, 2], [0, 1, 2], [0, 1, 2]])


def test_json_roundtrip(tmp_path):
    for m in (square_torus(3), klein_bottle(3)):
        path = tmp_path / "m.json"
        save_map(m, path)
        back = load_map(path)
        assert back == m
    data = json.loads(path.read_text())
    assert set(data) >= {"darts", "alpha", "sigma"}


def test_load_errors(tmp_path):
    with pytest.raises(IoFailure):
        load_map(tmp_path / "missing.json")
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    with pytest.raises(IoFailure):
        load_map(bad)
    bad.write_text('{"alpha": [1, 0]}')
    with pytest.raises(InvalidMap):
        load_map(bad)
    bad.write_text('{"darts": 4, "alpha": [1, 0], "sigma": [0, 1]}')
    with pytest.raises(InvalidMap):
        load_map(bad)


def test_components_flag():
    m = square_torus(2)
    assert len(m.components) == 1
    rng = random.Random(3)
    perm = list(range(m.n_darts))
    rng.shuffle(perm)
    assert len(relabel(m, perm).components) == 1
