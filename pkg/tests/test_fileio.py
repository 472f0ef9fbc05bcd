import pytest
from hypothesis import given, strategies as st

from topocodes.color import is_three_colorable
from topocodes.css import color_code, surface_code
from topocodes.errors import IoFailure
from topocodes.fileio import (alist_text, matrixmarket_text, parse_alist, parse_matrixmarket,
                              read_alist, read_matrixmarket, write_alist, write_matrixmarket)
from topocodes.gf2 import BitMatrix
from topocodes.lattices import hex_torus, square_torus


@st.composite
def matrices(draw):
    ncols = draw(st.integers(1, 12))
    rows = draw(st.lists(st.integers(0, (1 << ncols) - 1), min_size=1, max_size=8))
    return BitMatrix(tuple(rows), ncols)


@given(matrices())
def test_alist_roundtrip(m):
    assert parse_alist(alist_text(m)) == m


@given(matrices())
def test_matrixmarket_roundtrip(m):
    assert parse_matrixmarket(matrixmarket_text(m)) == m


def test_toric_alist_header():
    h_z = surface_code(square_torus(3)).h_z
    lines = alist_text(h_z).splitlines()
    assert lines[0].split() == ["18", "9"]
    assert lines[1].split() == ["2", "4"]
    assert lines[2].split() == ["2"] * 18
    assert lines[3].split() == ["4"] * 9
    # 1-based indices
    assert min(int(x) for x in lines[4].split()) >= 1


def test_alist_layout_is_mackay():
    m = BitMatrix.from_support([[0, 2], [1]], 3)
    assert alist_text(m) == "3 2\n1 2\n1 1 1\n2 1\n1\n2\n1\n1 3\n2 0\n"


def test_hex_torus_matrixmarket_entries():
    t = hex_torus(3)
    h = color_code(t, is_three_colorable(t)).h_x
    text = matrixmarket_text(h)
    header = [ln for ln in text.splitlines() if not ln.startswith("%")][0].split()
    assert int(header[2]) == 6 * t.n_faces
    assert "pattern" in text.splitlines()[0]


def test_file_roundtrip(tmp_path):
    h = surface_code(square_torus(4)).h_x
    write_alist(h, tmp_path / "h.alist")
    write_matrixmarket(h, tmp_path / "h.mtx")
    assert read_alist(tmp_path / "h.alist") == h
    assert read_matrixmarket(tmp_path / "h.mtx") == h


def test_malformed(tmp_path):
    with pytest.raises(IoFailure):
        parse_alist("3 2\n1 2\n")
    with pytest.raises(IoFailure):
        # column section says 3 ones, row section only 2
        parse_alist("3 2\n1 2\n1 1 1\n2 1\n1 0\n2 0\n1 0\n1 0\n2 0\n")
    with pytest.raises(IoFailure):
        parse_matrixmarket("not a matrix")
    with pytest.raises(IoFailure):
        read_alist(tmp_path / "missing.alist")
    with pytest.raises(IoFailure):
        write_alist(BitMatrix((1,), 1), tmp_path / "no" / "dir.alist")
