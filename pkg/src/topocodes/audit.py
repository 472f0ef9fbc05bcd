"""End-to-end family audits and code export.

Each family entry is built, turned into a surface or color code, and its
distance is computed or bounded. Rows carry the ratios ``k d^2 / n`` and
``k d^2 / ((ln k)^2 n)``.
"""

from __future__ import annotations

import csv
import io
import json
import math
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

from . import fileio
from .color import FaceColoring, color_cover_faces, double_cover, is_three_colorable
from .css import CssCode, color_code, surface_code
from .distance import DEFAULT_NODE_LIMIT, DEFAULT_WEIGHT_CAP, INF, color_distance, surface_distance
from .errors import IoFailure, TopoError
from .gf2 import BitMatrix, bits
from .hyperbolic import (TrianglePresentation, catalog_lookup, cayley_tiling, coset_enumerate,
                         verify_injectivity_radius)
from .lattices import hex_torus, square_torus

CSV_VERSION = "# topo-audit v1"
CSV_NOTE = "# ratio_gromov = k*d^2/((ln k)^2*n), natural log; ratios use d_exact, else d_lo"
COLUMNS = ("label", "l", "m", "n", "k", "d_lo", "d_hi", "d_exact", "verified_r",
           "ratio_bpt", "ratio_gromov", "ms")


@dataclass(frozen=True)
class FamilyEntry:
    label: str
    ell: int | None = None
    m: int | None = None
    relators: tuple[str, ...] = ()
    torus: int | None = None
    hex: int | None = None


@dataclass
class AuditRow:
    label: str
    ell: int | None
    m: int | None
    relators: tuple[str, ...]
    n: int
    k: int
    d_lo: float
    d_hi: float
    d_exact: float | None
    verified_r: int | None
    kind: str = "surface"
    construction: str = ""
    ms: float | None = None

    @property
    def d_used(self) -> float:
        return self.d_exact if self.d_exact is not None else self.d_lo

    @property
    def ratio_bpt(self) -> float | None:
        d = self.d_used
        if d == INF or self.n == 0:
            return None
        return self.k * d * d / self.n

    @property
    def ratio_gromov(self) -> float | None:
        bpt = self.ratio_bpt
        if bpt is None or self.k < 2:
            return None
        return bpt / math.log(self.k) ** 2


def _fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, float):
        if x == INF:
            return "inf"
        if x.is_integer():
            return str(int(x))
        return f"{x:.6f}"
    return str(x)


def parse_family(data: Sequence[dict]) -> list[FamilyEntry]:
    """Family entries; hyperbolic entries without relators expand to every
    catalog quotient for their (l, m)."""
    out = []
    for i, item in enumerate(data):
        label = str(item.get("label", f"entry{i}"))
        if "torus" in item:
            out.append(FamilyEntry(label, torus=int(item["torus"])))
        elif "hex" in item:
            out.append(FamilyEntry(label, hex=int(item["hex"])))
        else:
            ell, m = int(item["l"]), int(item["m"])
            rels = tuple(item.get("relators") or ())
            if rels:
                out.append(FamilyEntry(label, ell, m, rels))
            else:
                for e in catalog_lookup(ell, m):
                    out.append(FamilyEntry(f"{label}-{e.order}", ell, m, e.relators))
    return out


def load_family(path: str | Path) -> list[FamilyEntry]:
    try:
        data = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise IoFailure(f"cannot read family file: {exc}") from exc
    return parse_family(data)


def _color_tiling(tiling):
    """Direct coloring when it exists, otherwise the double cover."""
    col = is_three_colorable(tiling)
    if isinstance(col, FaceColoring):
        return tiling, col, "direct"
    cover = double_cover(tiling)
    return cover, color_cover_faces(cover), "cover"


def audit_entry(entry: FamilyEntry, color: bool = False, exact_cap: int = DEFAULT_WEIGHT_CAP,
                node_limit: int = DEFAULT_NODE_LIMIT) -> AuditRow:
    t0 = time.perf_counter()
    verified_r = None
    pres = None
    if entry.torus is not None:
        tiling = square_torus(entry.torus)
    elif entry.hex is not None:
        tiling = hex_torus(entry.hex)
    else:
        pres = TrianglePresentation(entry.ell, entry.m, entry.relators)
        tiling = cayley_tiling(coset_enumerate(pres), pres)
    construction = "tiling"
    if color:
        tiling, coloring, construction = _color_tiling(tiling)
        if pres is not None:
            # Cayley tilings are vertex-transitive; covers need every root
            roots = [0] if construction == "direct" else None
            verified_r = verify_injectivity_radius(tiling, pres, roots=roots).r
        code = color_code(tiling, coloring, source=entry.label)
        rep = color_distance(tiling, coloring, code, verified_r or 0, exact_cap, node_limit)
    else:
        if pres is not None:
            verified_r = verify_injectivity_radius(tiling, pres, roots=[0]).r
        code = surface_code(tiling, source=entry.label)
        rep = surface_distance(tiling)
    ms = (time.perf_counter() - t0) * 1000.0
    return AuditRow(entry.label, entry.ell, entry.m, entry.relators, code.n, code.k,
                    rep.lower, rep.upper, rep.value_exact, verified_r, code.kind, construction, ms)


@dataclass
class AuditResult:
    rows: list[AuditRow]
    errors: list[tuple[str, str]] = field(default_factory=list)

    def csv_text(self, timing: bool = False) -> str:
        buf = io.StringIO()
        buf.write(CSV_VERSION + "\n")
        buf.write(CSV_NOTE + "\n")
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(COLUMNS)
        for r in self.rows:
            w.writerow([r.label, _fmt(r.ell), _fmt(r.m), r.n, r.k, _fmt(r.d_lo), _fmt(r.d_hi),
                        _fmt(r.d_exact), _fmt(r.verified_r), _fmt(r.ratio_bpt),
                        _fmt(r.ratio_gromov), _fmt(round(r.ms, 1)) if timing and r.ms is not None else ""])
        for label, msg in self.errors:
            buf.write(f"# error {label}: {msg}\n")
        return buf.getvalue()


def audit_family(entries: Iterable[FamilyEntry | dict], color: bool = False,
                 exact_cap: int = DEFAULT_WEIGHT_CAP,
                 node_limit: int = DEFAULT_NODE_LIMIT) -> AuditResult:
    """Run every entry; failures are recorded and the run goes on.

    Rows come out sorted by n, then label. Raises CatalogMiss up front for
    a hyperbolic entry with no relators and no catalog match.
    """
    entries = list(entries)
    if entries and isinstance(entries[0], dict):
        entries = parse_family(entries)
    rows, errors = [], []
    for e in entries:
        try:
            rows.append(audit_entry(e, color, exact_cap, node_limit))
        except (TopoError, ValueError) as exc:
            errors.append((e.label, f"{type(exc).__name__}: {exc}"))
    rows.sort(key=lambda r: (r.n, r.label))
    errors.sort()
    return AuditResult(rows, errors)


# ---- export ----------------------------------------------------------------------

def export(code: CssCode, fmt: str, path: str | Path) -> list[Path]:
    """Write the code's matrices; returns the files written.

    ``alist`` and ``matrixmarket`` write H_X to ``path`` and, when H_Z
    differs, H_Z next to it with an ``.hz`` infix. ``json`` writes both
    matrices as row supports plus the code parameters.
    """
    path = Path(path)
    written = [path]
    if fmt == "json":
        data = dict(code.sidecar(), h_x=[bits(r) for r in code.h_x.rows],
                    h_z=[bits(r) for r in code.h_z.rows])
        try:
            path.write_text(json.dumps(data, indent=1) + "\n")
        except OSError as exc:
            raise IoFailure(str(exc)) from exc
        return written
    writers = {"alist": fileio.write_alist, "matrixmarket": fileio.write_matrixmarket}
    if fmt not in writers:
        raise ValueError(f"unknown export format {fmt!r}")
    writers[fmt](code.h_x, path)
    if code.h_z != code.h_x:
        hz = hz_path(path)
        writers[fmt](code.h_z, hz)
        written.append(hz)
    return written


def hz_path(path: str | Path) -> Path:
    path = Path(path)
    return path.with_name(path.stem + ".hz" + path.suffix)


def read_code_json(path: str | Path) -> CssCode:
    try:
        data = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise IoFailure(str(exc)) from exc
    n = data["n"]
    hx = BitMatrix.from_support(data["h_x"], n)
    hz = BitMatrix.from_support(data["h_z"], n)
    if data.get("kind") == "color" and hx == hz:
        hz = hx
    return CssCode(hx, hz, data.get("kind", "surface"), data.get("chi"))

