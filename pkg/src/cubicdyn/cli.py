"""Command-line front end: analyze, sweep, tables, map, counts, figure."""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from concurrent.futures import ProcessPoolExecutor
from importlib import resources

import mpmath

from . import __version__
from .orbitspec import OrbitData, OrbitDataError, canonical_orbit_data, charpoly_complex, dynamical_degree
from .realhomology import charpoly_real, real_spectral_summary, verify_appendix_phi
from .realization import classify_table_row, realizability

EXIT_OK, EXIT_USAGE, EXIT_NUMERIC = 0, 2, 3
SWEEP_FIELDS = ["orbit_data", "verdict", "delta", "rho_R", "growth", "status", "table", "table_row",
                "table_status", "phi_audit", "reciprocal"]


class UsageError(Exception):
    pass


def tool_info(precision: int) -> dict:
    return {"name": "cubicdyn", "version": __version__, "precision_digits": precision}


def load_schema(name: str) -> dict:
    return json.loads(resources.files("cubicdyn").joinpath("schemas", f"{name}.schema.json").read_text())


def _coeffs(p) -> list:
    return [int(c) for c in p.coeffs]


# -- core report builders --------------------------------------------------------------------

def analysis_core(od: OrbitData, precision: int = 30) -> dict:
    """Everything that needs no explicit map; deterministic for fixed precision."""
    v = realizability(od)
    d = dynamical_degree(od)
    rep = {
        "orbit_data": str(od),
        "lengths": list(od.lengths),
        "sigma": od.sigma_name,
        "verdict": v.to_dict(),
        "delta": None if d is None else {"value": mpmath.nstr(d.mp(precision), precision),
                                         "digits": precision},
        "chi": _coeffs(charpoly_complex(od)),
        "chi_R": None,
        "growth": None,
        "entropy_status": "no_delta" if d is None else None,
        "table_row": None,
        "appendix_audit": None,
    }
    if v.realizable:
        s = real_spectral_summary(od)
        rep["chi_R"] = _coeffs(s.chi_r)
        rep["growth"] = s.growth.to_dict()
        rep["rho_R"] = {"value": f"{s.rho_r:.12g}", "digits": 12}
        rep["entropy_status"] = s.status
        rep["reciprocal"] = s.chi_r.is_reciprocal()
    if d is not None:
        rep["table_row"] = classify_table_row(od).to_dict()
    rep["appendix_audit"] = verify_appendix_phi(od).to_dict()
    return rep


def map_section(od: OrbitData, dps: int) -> dict:
    from .explicitmaps import (build_map, cubic_residual, fixed_points, lefschetz_fixed_count,
                               normal_frame, to_frame, verify_orbit_data)
    from .lefschetz import holomorphic_lefschetz_check

    with mpmath.workdps(dps):
        cm = build_map(od, dps)
        expected = lefschetz_fixed_count(od)
        fps = fixed_points(cm.map, expected)
        P = normal_frame(cm)
        points = []
        for r in fps:
            entry = r.to_dict()
            if not r.is_cusp:
                entry["normal_frame"] = to_frame(P, r.location).to_list(15)
            else:
                entry["normal_frame"] = ["1", "1", "1"]
            points.append(entry)
        return {
            "precision_digits": dps,
            "system_residual": mpmath.nstr(cm.residual, 5),
            "cubic_residual": mpmath.nstr(cubic_residual(cm), 5),
            "orbit_residual": mpmath.nstr(verify_orbit_data(cm), 5),
            "map": cm.map.to_dict(),
            "fixed_points": points,
            "holomorphic_lefschetz_residual": mpmath.nstr(holomorphic_lefschetz_check(fps, expected), 5),
        }


def certificate_section(od: OrbitData, n_max: int, fix_plus: int) -> dict:
    from .lefschetz import all_real_certificate, alternative_bookkeeping

    period = _unit_period(od)
    ns = list(range(period, n_max + 1, period))
    table = all_real_certificate(od, ns, fix_plus)
    out = table.to_dict()
    out["step"] = period
    out["bookkeeping"] = [alternative_bookkeeping(od, n) for n in ns[:3]]
    return out


def _unit_period(od: OrbitData) -> int:
    """lcm of the orders of the roots of unity dividing chi and chi_R."""
    from math import lcm

    from .polylab import cyclotomic_split

    orders = cyclotomic_split(charpoly_complex(od)).orders() + cyclotomic_split(charpoly_real(od)).orders()
    return lcm(*orders) if orders else 1


def _sweep_row(args) -> dict:
    od, precision = args
    try:
        rep = analysis_core(od, precision)
    except Exception as exc:  # recorded inline, sweep continues
        return {"orbit_data": str(od), "verdict": "error", "status": f"error: {exc}"}
    tr = rep["table_row"] or {}
    growth = rep["growth"]
    gtxt = ""
    if growth:
        gtxt = {"exponential": f"exponential({growth['rho']:.10g})",
                "periodic": f"periodic({growth['order']})",
                "polynomial": f"polynomial({growth['degree']})"}[growth["kind"]]
    return {
        "orbit_data": rep["orbit_data"],
        "verdict": rep["verdict"]["kind"],
        "delta": rep["delta"]["value"][:14] if rep["delta"] else "",
        "rho_R": rep.get("rho_R", {}).get("value", ""),
        "growth": gtxt,
        "status": rep["entropy_status"] if rep["verdict"]["kind"] == "realizable" else rep["verdict"]["kind"],
        "table": tr.get("table", ""),
        "table_row": tr.get("row") or "",
        "table_status": tr.get("status", ""),
        "phi_audit": rep["appendix_audit"]["status"],
        "reciprocal": "" if "reciprocal" not in rep else str(rep["reciprocal"]).lower(),
    }


def sweep(max_sum: int, sigmas, parallel: int = 1, precision: int = 30, min_sum: int = 3) -> list:
    """Rows in canonical order regardless of the worker count."""
    ods = canonical_orbit_data(max_sum, tuple(sigmas), min_sum)
    jobs = [(od, precision) for od in ods]
    if parallel > 1:
        with ProcessPoolExecutor(max_workers=parallel) as pool:
            rows = list(pool.map(_sweep_row, jobs, chunksize=8))
    else:
        rows = [_sweep_row(j) for j in jobs]
    return rows


# -- output helpers ----------------------------------------------------------------------------

def _dump_json(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True)


def _dump_csv(rows, fields) -> str:
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=fields, lineterminator="\n", extrasaction="ignore")
    w.writeheader()
    for r in rows:
        w.writerow(r)
    return buf.getvalue()


def _parse_od(text: str) -> OrbitData:
    try:
        return OrbitData.parse(text)
    except OrbitDataError as exc:
        raise UsageError(str(exc)) from exc


def _text_report(rep: dict) -> str:
    lines = [f"orbit data      {rep['orbit_data']}",
             f"verdict         {rep['verdict']['kind']}"]
    for a, b in rep["verdict"]["witnesses"]:
        lines.append(f"  coincidence   {a} = {b}")
    lines.append(f"delta           {rep['delta']['value'] if rep['delta'] else '-'}")
    lines.append(f"chi             {rep['chi']}")
    if rep["chi_R"] is not None:
        lines.append(f"chi_R           {rep['chi_R']}")
        lines.append(f"rho_R           {rep['rho_R']['value']}")
        g = rep["growth"]
        lines.append(f"growth          {g['kind']} " + str({k: v for k, v in g.items() if k != 'kind' and v is not None}))
    lines.append(f"entropy status  {rep['entropy_status']}")
    if rep["table_row"]:
        tr = rep["table_row"]
        lines.append(f"table row       {tr['table']} {tr['row']} -> {tr['status']}")
    lines.append(f"appendix audit  {rep['appendix_audit']['status']}"
                 + (f" ({rep['appendix_audit']['formula']})" if rep["appendix_audit"]["formula"] else ""))
    if "map" in rep:
        m = rep["map"]
        lines.append(f"map residuals   system {m['system_residual']}, cubic {m['cubic_residual']}, "
                     f"orbits {m['orbit_residual']}")
        for p in m["fixed_points"]:
            lines.append(f"  fixed point   {p['normal_frame']} {p['kind']} |mu| = {p['moduli']}")
        lines.append(f"  holomorphic Lefschetz residual {m['holomorphic_lefschetz_residual']}")
    if "certificate" in rep:
        c = rep["certificate"]
        lines.append(f"all-real certificate (Fix+ = {c['fix_plus_hypothesis']}): "
                     f"{'pass' if c['all_certified'] else 'fail'}")
        for r in c["rows"]:
            lines.append(f"  n={r['n']:<4d} complex {r['complex_count']:<10d} index sum {r['real_index_sum']}")
    return "\n".join(lines) + "\n"


# -- commands ------------------------------------------------------------------------------------

def cmd_analyze(args) -> tuple:
    od = _parse_od(args.od)
    rep = {"tool": tool_info(args.precision)}
    rep.update(analysis_core(od, args.precision))
    if args.with_map:
        if rep["verdict"]["kind"] != "realizable":
            rep["map"] = None
        else:
            rep["map"] = map_section(od, max(args.precision, 64))
    if args.certify_real:
        rep["certificate"] = certificate_section(od, args.n_max, args.fix_plus)
    if args.csv:
        return _dump_csv([_sweep_row((od, args.precision))], SWEEP_FIELDS), rep
    if args.json:
        return _dump_json(rep) + "\n", rep
    return _text_report(rep), rep


def cmd_sweep(args) -> tuple:
    sigmas = [s.strip() for s in args.sigmas.split(",") if s.strip()]
    for s in sigmas:
        if s not in ("id", "12", "123"):
            raise UsageError(f"unknown sigma family {s!r}; use id, 12, 123")
    rows = sweep(args.max_sum, sigmas, args.parallel, args.precision, args.min_sum)
    if args.json:
        doc = {"tool": tool_info(args.precision), "max_sum": args.max_sum, "sigmas": sigmas, "rows": rows}
        return _dump_json(doc) + "\n", doc
    return _dump_csv(rows, SWEEP_FIELDS), rows


def cmd_tables(args) -> tuple:
    from .realhomology import audit_report

    ods = [od for od in canonical_orbit_data(args.max_sum, ("id", "12", "123"), 3)
           if dynamical_degree(od) is not None]
    rows = [classify_table_row(od).to_dict() | {"orbit_data": str(od)} for od in ods]
    audit = audit_report(ods).to_dict()
    doc = {"tool": tool_info(args.precision), "max_sum": args.max_sum, "rows": rows, "audit": audit}
    if args.json:
        return _dump_json(doc) + "\n", doc
    if args.csv:
        flat = [{"orbit_data": r["orbit_data"], "table": r["table"], "row": r["row"] or "",
                 "status": r["status"], "phi_audit": a["status"], "formula": a["formula"] or ""}
                for r, a in zip(rows, audit["entries"])]
        return _dump_csv(flat, ["orbit_data", "table", "row", "status", "phi_audit", "formula"]), doc
    lines = [f"{r['orbit_data']:<14} {r['table']:<8} {str(r['row']):<26} {r['status']:<10} {a['status']}"
             for r, a in zip(rows, audit["entries"])]
    lines.append("summary " + json.dumps(audit["summary"], sort_keys=True))
    return "\n".join(lines) + "\n", doc


def cmd_map(args) -> tuple:
    from .explicitmaps import (CUSP, build_map, fixed_points, fixed_points_csv, gamma, iterate,
                               lefschetz_fixed_count, trajectory_csv)
    od = _parse_od(args.od)
    if not realizability(od).realizable:
        rep = {"tool": tool_info(args.precision), "orbit_data": str(od), "verdict": realizability(od).to_dict()}
        return (_dump_json(rep) + "\n" if args.json else f"{od}: {rep['verdict']['kind']}\n"), rep
    dps = max(args.precision, 64)
    with mpmath.workdps(dps):
        cm = build_map(od, dps)
        rep = {"tool": tool_info(dps)}
        rep.update(map_section(od, dps))
        if args.iterate is not None:
            start = CUSP if args.iterate == "cusp" else gamma(mpmath.mpf(args.iterate))
            traj = iterate(cm.map, start, args.steps)
            rep["trajectory"] = [p.to_list(15) for p in traj]
            if args.csv:
                return trajectory_csv(traj), rep
        if args.csv:
            return fixed_points_csv(fixed_points(cm.map, lefschetz_fixed_count(od))), rep
    if args.json:
        return _dump_json(rep) + "\n", rep
    return _dump_json(rep["map"]) + "\n", rep


def cmd_counts(args) -> tuple:
    from .lefschetz import all_real_certificate, fix_count_table

    od = _parse_od(args.od)
    if args.certify_real:
        table = all_real_certificate(od, range(_unit_period(od), args.n_max + 1, _unit_period(od)), args.fix_plus)
    else:
        table = fix_count_table(od, range(1, args.n_max + 1))
    doc = {"tool": tool_info(args.precision)} | table.to_dict()
    if args.json:
        return _dump_json(doc) + "\n", doc
    return table.to_csv(), doc


def cmd_figure(args) -> tuple:
    from .explicitmaps import multiplier_vs_n, multiplier_vs_n_csv

    if args.name != "multiplier-vs-n":
        raise UsageError(f"unknown figure {args.name!r}; available: multiplier-vs-n")
    rows = multiplier_vs_n(4, args.n_max)
    doc = {"tool": tool_info(args.precision), "figure": args.name,
           "rows": [{"n": n, "abs_mu_small": mpmath.nstr(v, 12)} for n, v in rows]}
    if args.json:
        return _dump_json(doc) + "\n", doc
    return multiplier_vs_n_csv(rows), doc


# -- argument parsing ------------------------------------------------------------------------------

class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--json", action="store_true", help="emit JSON")
    common.add_argument("--csv", action="store_true", help="emit CSV")
    common.add_argument("--precision", type=int, default=30, metavar="DIGITS",
                        help="decimal digits for reported numerics (default 30)")

    p = _Parser(prog="cubicdyn", description=__doc__)
    p.add_argument("--version", action="version", version=f"cubicdyn {__version__}")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    a = sub.add_parser("analyze", parents=[common], help="full pipeline for one orbit data")
    a.add_argument("od", help="orbit data, e.g. 1,1,8:123")
    a.add_argument("--with-map", action="store_true", help="construct the explicit quadratic map")
    a.add_argument("--certify-real", action="store_true", help="run the all-real periodic point certificate")
    a.add_argument("--n-max", type=int, default=40)
    a.add_argument("--fix-plus", type=int, default=2, help="hypothesised number of index +1 fixed points")
    a.set_defaults(func=cmd_analyze)

    s = sub.add_parser("sweep", parents=[common], help="all canonical orbit data up to a total length")
    s.add_argument("--max-sum", type=int, required=True)
    s.add_argument("--min-sum", type=int, default=3)
    s.add_argument("--sigmas", default="id,12,123", help="comma separated subset of id,12,123")
    s.add_argument("--parallel", type=int, default=1, metavar="K")
    s.set_defaults(func=cmd_sweep)

    t = sub.add_parser("tables", parents=[common], help="classify realizability table rows and audit formulas")
    t.add_argument("--max-sum", type=int, default=14)
    t.set_defaults(func=cmd_tables)

    m = sub.add_parser("map", parents=[common], help="construct, iterate and find fixed points")
    m.add_argument("od")
    m.add_argument("--iterate", default=None, metavar="X|cusp",
                   help="iterate from gamma(X) on the cubic or from the cusp")
    m.add_argument("--steps", type=int, default=10)
    m.set_defaults(func=cmd_map)

    c = sub.add_parser("counts", parents=[common], help="Lefschetz periodic point tables")
    c.add_argument("od")
    c.add_argument("--n-max", type=int, default=20)
    c.add_argument("--certify-real", action="store_true")
    c.add_argument("--fix-plus", type=int, default=2)
    c.set_defaults(func=cmd_counts)

    f = sub.add_parser("figure", parents=[common], help="figure datasets")
    f.add_argument("name", help="multiplier-vs-n")
    f.add_argument("--n-max", type=int, default=30)
    f.set_defaults(func=cmd_figure)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if getattr(args, "json", False) and getattr(args, "csv", False):
            raise UsageError("--json and --csv are mutually exclusive")
        if args.precision < 5 or args.precision > 500:
            raise UsageError("--precision must lie in 5..500")
        text, _ = args.func(args)
    except UsageError as exc:
        print(f"cubicdyn: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ArithmeticError, ValueError) as exc:
        print(f"cubicdyn: numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    sys.stdout.write(text)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
