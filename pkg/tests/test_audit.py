import json
import math

import pytest

from topocodes.audit import (COLUMNS, CSV_VERSION, AuditRow, FamilyEntry, audit_family, export,
                             hz_path, load_family, parse_family, read_code_json)
from topocodes.color import is_three_colorable
from topocodes.css import color_code, surface_code
from topocodes.errors import CatalogMiss, IoFailure
from topocodes.fileio import read_alist, read_matrixmarket
from topocodes.gf2 import rank
from topocodes.lattices import hex_torus, square_torus


def rows_of(text):
    return [ln.split(",") for ln in text.splitlines() if ln and not ln.startswith("#")]


def test_toric_family():
    res = audit_family([{"torus": L, "label": f"t{L}"} for L in (3, 4, 5, 6)])
    assert not res.errors
    for L, row in zip((3, 4, 5, 6), res.rows):
        assert (row.n, row.k, row.d_exact) == (2 * L * L, 2, L)
        assert row.ratio_bpt == 1
        assert row.ratio_gromov == pytest.approx(1 / math.log(2) ** 2)


def test_hyperbolic_surface_family_rate():
    res = audit_family([{"l": 3, "m": 7, "label": "h"}])
    assert [r.label for r in res.rows] == ["h-168", "h-1092"]
    for r in res.rows:
        v = 2 * r.n // 3
        assert v % 42 == 0 and r.k == 2 + v // 42
    assert [r.d_exact for r in res.rows] == [4, 6]


def test_color_family_rate_formula():
    res = audit_family([{"l": 8, "m": 3, "label": "c"}, {"l": 4, "m": 5, "relators": ["(abb)^5"],
                                                          "label": "c45"}], color=True)
    assert not res.errors
    for r in res.rows:
        assert r.k * r.ell * r.m == (r.ell * r.m - 2 * r.m - 2 * r.ell) * r.n + 4 * r.ell * r.m


def test_csv_format_and_order():
    res = audit_family([{"torus": 4, "label": "b"}, {"torus": 3, "label": "a"}, {"hex": 3, "label": "h"}])
    text = res.csv_text()
    lines = text.splitlines()
    assert lines[0] == CSV_VERSION
    assert lines[1].startswith("#") and "ln" in lines[1]
    assert lines[2] == ",".join(COLUMNS)
    body = rows_of(text)[1:]
    keys = [(int(b[3]), b[0]) for b in body]
    assert keys == sorted(keys) and len(keys) == 3
    assert all(b[-1] == "" for b in body)
    assert all(b[1] == "" and b[2] == "" for b in body)


def test_csv_bit_identical():
    fam = [{"l": 8, "m": 3, "label": "c"}]
    a = audit_family(fam, color=True).csv_text()
    b = audit_family(fam, color=True).csv_text()
    assert a == b
    assert audit_family(fam, color=True).csv_text(timing=True) != a


def test_row_errors_recorded():
    res = audit_family([{"l": 3, "m": 7, "relators": ["(aBab)^4"], "label": "odd"},
                        {"hex": 3, "label": "ok"}], color=True)
    assert [r.label for r in res.rows] == ["ok"]
    assert res.errors and res.errors[0][0] == "odd"
    assert "# error odd: OddFace" in res.csv_text()


def test_catalog_miss():
    with pytest.raises(CatalogMiss):
        parse_family([{"l": 5, "m": 5}])


def test_parse_family_expands_catalog():
    entries = parse_family([{"l": 8, "m": 3, "label": "x"}])
    assert [e.label for e in entries] == ["x-48", "x-96", "x-336"]
    assert entries[0] == FamilyEntry("x-48", 8, 3, ("(abaBB)^2",))


def test_load_family(tmp_path):
    p = tmp_path / "fam.json"
    p.write_text(json.dumps([{"torus": 3, "label": "t"}]))
    assert load_family(p) == [FamilyEntry("t", torus=3)]
    with pytest.raises(IoFailure):
        load_family(tmp_path / "none.json")


def test_ratio_nulls():
    row = AuditRow("x", None, None, (), 10, 1, 3, 3, 3, None)
    assert row.ratio_bpt == pytest.approx(0.9) and row.ratio_gromov is None
    row = AuditRow("x", None, None, (), 10, 2, 3, math.inf, None, None)
    assert row.d_used == 3
    row = AuditRow("s", None, None, (), 6, 0, math.inf, math.inf, math.inf, None)
    assert row.ratio_bpt is None


def test_export_roundtrip(tmp_path):
    code = surface_code(square_torus(3))
    files = export(code, "alist", tmp_path / "t.alist")
    assert files == [tmp_path / "t.alist", tmp_path / "t.hz.alist"]
    assert read_alist(files[0]) == code.h_x and read_alist(files[1]) == code.h_z
    # the (n, k) of the row is re-derivable from the files
    hx, hz = read_alist(files[0]), read_alist(files[1])
    assert hx.ncols - rank(hx) - rank(hz) == 2
    files = export(code, "matrixmarket", tmp_path / "t.mtx")
    assert read_matrixmarket(files[1]) == code.h_z
    export(code, "json", tmp_path / "t.json")
    back = read_code_json(tmp_path / "t.json")
    assert back.h_x == code.h_x and back.h_z == code.h_z and back.k == 2


def test_export_color_single_matrix(tmp_path):
    t = hex_torus(3)
    code = color_code(t, is_three_colorable(t))
    assert export(code, "alist", tmp_path / "c.alist") == [tmp_path / "c.alist"]
    assert hz_path(tmp_path / "c.alist").name == "c.hz.alist"
    with pytest.raises(ValueError):
        export(code, "csv", tmp_path / "c.csv")
