"""Command line interface: ``topocodes <command> ...``."""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import fileio
from .audit import audit_family, export, hz_path, load_family, read_code_json
from .color import (ColoringRefusal, FaceColoring, check_cover, color_cover_faces, double_cover,
                    is_three_colorable)
from .css import CssCode, color_code, css_validate, surface_code
from .distance import (DEFAULT_NODE_LIMIT, DEFAULT_WEIGHT_CAP, DistanceReport, color_distance_bounds,
                       color_distance_exact, css_distance_exact, surface_distance)
from .errors import InfeasibleSize, NotACover, TopoError
from .hyperbolic import (DEFAULT_MAX_COSETS, TrianglePresentation, cayley_tiling, coset_enumerate,
                         infinite_ball, verify_injectivity_radius)
from .tiling import load_map, save_map, validate_map


def _write_json(data, path: str | None) -> None:
    text = json.dumps(data, indent=1) + "\n"
    if path is None:
        sys.stdout.write(text)
    else:
        Path(path).write_text(text)


def _stats_json(stats) -> dict:
    return {
        "V": stats.v_count, "E": stats.e_count, "F": stats.f_count, "chi": stats.euler_char,
        "orientable": stats.orientable, "genus_or_crosscap": stats.genus_or_crosscap,
        "max_face_len": stats.max_face_len, "max_vertex_degree": stats.max_vertex_degree,
        "warnings": list(stats.warnings),
    }


def cmd_build(args) -> int:
    pres = TrianglePresentation(args.l, args.m, tuple(args.relator))
    grp = coset_enumerate(pres, args.max_cosets)
    tiling = cayley_tiling(grp, pres)
    save_map(tiling, args.out)
    _write_json(dict(order=grp.order, **_stats_json(validate_map(tiling))), None)
    return 0


def cmd_ball(args) -> int:
    ball = infinite_ball(TrianglePresentation(args.l, args.m), args.r)
    _write_json({
        "darts": ball.n_darts, "alpha": ball.alpha, "sigma": ball.sigma, "labels": ball.labels,
        "radius": ball.radius, "dist": ball.dist, "boundary": ball.boundary,
    }, args.out)
    return 0


def cmd_verify_radius(args) -> int:
    tiling = load_map(args.tiling)
    roots = [0] if args.one_root else None
    vr = verify_injectivity_radius(tiling, TrianglePresentation(args.l, args.m), roots=roots)
    _write_json({"r": vr.r, "method": vr.method, "roots_checked": vr.roots_checked}, args.out)
    return 0


def cmd_cover(args) -> int:
    cover = double_cover(load_map(args.tiling))
    save_map(cover, args.out)
    _write_json(dict(multi_component=cover.multi_component,
                     **_stats_json(validate_map(cover, require_connected=not cover.multi_component))),
                None)
    return 0


def cmd_color(args) -> int:
    tiling = load_map(args.tiling)
    coloring = None
    if tiling.labels is not None:
        try:
            check_cover(tiling)
            coloring = color_cover_faces(tiling)
        except NotACover:
            coloring = None
    if coloring is None:
        res = is_three_colorable(tiling)
        if isinstance(res, ColoringRefusal):
            _write_json({"colorable": False, "reason": res.reason, "witness": list(res.cycle),
                         "vertex": res.vertex}, None)
            return 2
        coloring = res
    _write_json(coloring.to_json(), args.out)
    return 0


def _load_coloring(path: str) -> FaceColoring:
    return FaceColoring.from_json(json.loads(Path(path).read_text()))


def cmd_code(args) -> int:
    tiling = load_map(args.tiling)
    if args.type == "surface":
        code = surface_code(tiling, source=args.tiling)
    else:
        if args.coloring:
            coloring = _load_coloring(args.coloring)
        else:
            res = is_three_colorable(tiling)
            if isinstance(res, ColoringRefusal):
                print(f"error: faces are not 3-colorable ({res.reason}); build the double cover first",
                      file=sys.stderr)
                return 2
            coloring = res
        code = color_code(tiling, coloring, source=args.tiling)
    report = css_validate(code)
    if not report.ok:
        print("error: " + "; ".join(report.problems), file=sys.stderr)
        return 1
    out = Path(args.out)
    written = export(code, args.format, out)
    side = code.sidecar()
    side.update(tiling=str(Path(args.tiling).resolve()),
                coloring=str(Path(args.coloring).resolve()) if args.coloring else None,
                h_z=str(written[1]) if len(written) > 1 else None, format=args.format)
    _write_json(side, str(_sidecar_path(out)))
    _write_json(side, None)
    return 0


def _sidecar_path(out: Path) -> Path:
    return out.with_name(out.name + ".json")


def _load_code(path: str) -> tuple[CssCode, dict]:
    p = Path(path)
    side_path = _sidecar_path(p)
    side = json.loads(side_path.read_text()) if side_path.exists() else {}
    if p.suffix == ".json" or side.get("format") == "json":
        code = read_code_json(p)
        return code, side or code.sidecar()
    reader = fileio.read_matrixmarket if side.get("format") == "matrixmarket" else fileio.read_alist
    hx = reader(p)
    hz_file = side.get("h_z")
    if hz_file is None and hz_path(p).exists():
        hz_file = str(hz_path(p))
    hz = reader(hz_file) if hz_file else hx
    kind = side.get("kind", "color" if hz is hx else "surface")
    return CssCode(hx, hz, kind, side.get("chi")), side


def cmd_distance(args) -> int:
    code, side = _load_code(args.code)
    if args.method == "exact":
        try:
            if code.kind == "color":
                rep = color_distance_exact(code, args.weight_cap, args.node_limit)
            else:
                rep = css_distance_exact(code, args.weight_cap, args.node_limit)
        except InfeasibleSize as exc:
            lo = getattr(exc, "lower", None) or 0
            rep = DistanceReport(lo, float("inf"), None, ["bruteforce"], None,
                                 notes={"exact_search": str(exc)})
    elif args.method == "systole":
        if not side.get("tiling"):
            print("error: systole needs the tiling recorded in the code side-car", file=sys.stderr)
            return 2
        rep = surface_distance(load_map(side["tiling"]))
    else:
        if code.kind != "color" or not side.get("tiling"):
            print("error: bounds need a color code with its tiling", file=sys.stderr)
            return 2
        tiling = load_map(side["tiling"])
        coloring = _load_coloring(side["coloring"]) if side.get("coloring") else is_three_colorable(tiling)
        rep = color_distance_bounds(tiling, coloring, args.verified_r)
    _write_json(rep.to_json(), args.out)
    return 0


def cmd_audit(args) -> int:
    entries = load_family(args.family)
    result = audit_family(entries, color=args.color, exact_cap=args.exact_cap,
                          node_limit=args.node_limit)
    text = result.csv_text(timing=args.timing)
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="topocodes", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("build", help="enumerate a triangle-group quotient and tile it")
    s.add_argument("--l", type=int, required=True)
    s.add_argument("--m", type=int, required=True)
    s.add_argument("--relator", action="append", required=True, help="extra relator, e.g. '(aBab)^4'")
    s.add_argument("--max-cosets", type=int, default=DEFAULT_MAX_COSETS)
    s.add_argument("--out", required=True)
    s.set_defaults(func=cmd_build)

    s = sub.add_parser("ball", help="ball of the infinite planar tiling")
    s.add_argument("--l", type=int, required=True)
    s.add_argument("--m", type=int, required=True)
    s.add_argument("--r", type=int, required=True)
    s.add_argument("--out")
    s.set_defaults(func=cmd_ball)

    s = sub.add_parser("verify-radius", help="largest radius whose balls match the planar tiling")
    s.add_argument("tiling")
    s.add_argument("--l", type=int, required=True)
    s.add_argument("--m", type=int, required=True)
    s.add_argument("--one-root", action="store_true", help="check vertex 0 only (vertex-transitive input)")
    s.add_argument("--out")
    s.set_defaults(func=cmd_verify_radius)

    s = sub.add_parser("cover", help="bipartite double cover")
    s.add_argument("tiling")
    s.add_argument("--out", required=True)
    s.set_defaults(func=cmd_cover)

    s = sub.add_parser("color", help="3-color the faces of a trivalent tiling or cover")
    s.add_argument("tiling")
    s.add_argument("--out")
    s.set_defaults(func=cmd_color)

    s = sub.add_parser("code", help="surface or color code matrices")
    s.add_argument("tiling")
    s.add_argument("--type", choices=("surface", "color"), required=True)
    s.add_argument("--coloring")
    s.add_argument("--format", choices=("alist", "matrixmarket", "json"), default="alist")
    s.add_argument("--out", required=True)
    s.set_defaults(func=cmd_code)

    s = sub.add_parser("distance", help="exact distance, systole or bounds")
    s.add_argument("code")
    s.add_argument("--method", choices=("exact", "systole", "bounds"), default="exact")
    s.add_argument("--weight-cap", type=int, default=DEFAULT_WEIGHT_CAP)
    s.add_argument("--node-limit", type=int, default=DEFAULT_NODE_LIMIT)
    s.add_argument("--verified-r", type=int, default=0)
    s.add_argument("--out")
    s.set_defaults(func=cmd_distance)

    s = sub.add_parser("audit", help="build and measure a family of codes")
    s.add_argument("family")
    s.add_argument("--out")
    s.add_argument("--color", action="store_true")
    s.add_argument("--exact-cap", type=int, default=DEFAULT_WEIGHT_CAP)
    s.add_argument("--node-limit", type=int, default=DEFAULT_NODE_LIMIT)
    s.add_argument("--timing", action="store_true", help="fill the ms column (breaks bit-identical output)")
    s.set_defaults(func=cmd_audit)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except TopoError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
