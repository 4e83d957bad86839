"""Command line: quartic <command> ...

Exit codes: 0 success, 1 a verification suite failed, 2 a classification
failed its verification, 64 usage error (including unknown regimes).
"""
from __future__ import annotations

import argparse
import csv
import json
import sys
import time
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import List, Optional

from .algebra import frac_str

SCHEMA_VERSION = 1
EX_USAGE = 64
G_HARD_CAP = 8


@dataclass
class RunConfig:
    rmax: float = 20.0
    hmin: float = 1e-6
    hmax: float = 0.05
    trace_tol: float = 1e-9
    G: int = 3
    J: int = 16
    fmt: str = "json"
    workers: int = 1

    def __post_init__(self):
        for name in ("rmax", "hmin", "hmax", "trace_tol"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")
        if self.hmin > self.hmax:
            raise ValueError("hmin > hmax")
        if not 0 <= self.G <= G_HARD_CAP:
            raise ValueError(f"G must be in [0, {G_HARD_CAP}]")
        if self.J < 1 or self.workers < 1:
            raise ValueError("J and workers must be >= 1")


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EX_USAGE, f"{self.prog}: error: {message}\n")


def _first4(counts):
    """Genus 0..3 entries; censuses at small j stop before genus 3."""
    return (list(counts) + [0] * 4)[:4]


def _emit(obj, out: Optional[str]):
    text = json.dumps({"schemaVersion": SCHEMA_VERSION, **obj}, indent=1, ensure_ascii=False)
    if out:
        Path(out).write_text(text + "\n")
    else:
        print(text)


# ---------------------------------------------------------------- commands

def cmd_classify(a) -> int:
    from .phase import VerificationMismatch, boundary_distance, classify
    sigma = complex(a.re, a.im)
    try:
        reg = classify(sigma, verify=a.verify)
    except VerificationMismatch as exc:
        print(f"VerificationMismatch: {exc}", file=sys.stderr)
        if a.json:
            _emit({"sigma": [a.re, a.im], "claimed": str(exc.claimed), "report": exc.report.as_dict()}, None)
        return 2
    cid, d = boundary_distance(sigma)
    if a.json:
        _emit({"sigma": [a.re, a.im], "regime": str(reg), "nearestBoundary": cid, "distance": d,
               "verified": bool(a.verify)}, None)
    else:
        print(str(reg))
        print(f"nearest boundary {cid} at distance {d:.6g}")
    return 0


def cmd_trace(a) -> int:
    from .model import PhaseRegime
    from .quaddiff import build_qd, critical_graph, render_svg, write_graph_csv, write_json
    try:
        regime = PhaseRegime.parse(a.regime)
    except ValueError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EX_USAGE
    if regime.cuts == 0:
        print(f"usage error: trace needs OneCut, TwoCut or ThreeCut, got {regime}", file=sys.stderr)
        return EX_USAGE
    cfg = RunConfig(rmax=a.rmax)
    qd = build_qd(complex(*a.sigma), regime)
    g = critical_graph(qd, rmax=cfg.rmax)
    out = Path(a.out)
    ext = out.suffix.lower()
    if ext == ".csv":
        write_graph_csv(g, out)
    elif ext == ".svg":
        render_svg(g, out)
    elif ext == ".json":
        write_json(g, out)
    else:
        print("usage error: output must end in .csv, .svg or .json", file=sys.stderr)
        return EX_USAGE
    print(f"{len(g.trajectories)} trajectories, connections {g.connections}, "
          f"census complete {g.census_report()['complete']} -> {out}")
    return 0


def cmd_phase_boundary(a) -> int:
    from .phase import render_phase_svg, trace_boundary
    try:
        c = trace_boundary(a.curve)
    except ValueError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EX_USAGE
    if not a.out:
        _emit({"curves": [c.as_dict()]}, None)
        return 0
    out = Path(a.out)
    ext = out.suffix.lower()
    if ext == ".csv":
        with open(out, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["curve", "re", "im"])
            for z in c.points:
                w.writerow([c.id, float(z.real), float(z.imag)])
    elif ext == ".svg":
        render_phase_svg(out, show_fake=a.show_fake)
    else:
        _emit({"curves": [c.as_dict()]}, str(out))
    print(f"{c.id}: {len(c.points)} points from {c.points[0]:.6g} to {c.points[-1]:.6g} -> {out}")
    return 0


def cmd_genus_counts(a) -> int:
    from .maps import closed_form_count, enumerate_census
    rows = []
    for j in range(1, a.j + 1):
        row = {"j": j, "closedForm": [closed_form_count(j, g) for g in range(4)]}
        if a.enumerate:
            t = time.time()
            cen = enumerate_census(j, allow_hard_cap=a.allow_hard_cap, workers=a.workers)
            row["enumerated"] = _first4(cen.counts)
            row["totalConnected"] = cen.total_connected
            row["seconds"] = round(time.time() - t, 3)
        rows.append(row)
    _emit({"counts": rows}, a.out)
    return 0


def cmd_series(a) -> int:
    from .topo import free_energy_series
    if a.genus > G_HARD_CAP:
        print(f"usage error: genus above cap {G_HARD_CAP}", file=sys.stderr)
        return EX_USAGE
    fs = free_energy_series(a.genus, a.order)
    coeffs = fs.coeffs[a.genus][: a.order + 1]
    _emit({"genus": a.genus, "order": a.order, "variable": "u",
           "coefficients": [frac_str(Fraction(c)) for c in coeffs]}, a.out)
    return 0


def cmd_constants(a) -> int:
    from .maps import c2g_constants, kg_constant
    C = c2g_constants(a.genus)
    _emit({"C2g": {str(2 * g): str(C[g]) for g in range(a.genus + 1)},
           "Kg": {str(g): str(kg_constant(g)) for g in range(a.genus + 1)}}, a.out)
    return 0


def _suite(full: bool) -> List[tuple]:
    """(name, callable returning (ok, detail)) pairs of quick invariants."""
    import numpy as np
    from . import endpoints as ep
    from .gfunction import support_measure
    from .maps import c2g_constants, closed_form_count, enumerate_census
    from .model import ONE_CUT, TWO_CUT
    from .phase import classify
    from .quaddiff import build_qd, critical_graph
    from .topo import free_energy_series

    def census():
        J = 4 if full else 3
        bad = [j for j in range(1, J + 1)
               if _first4(enumerate_census(j).counts) != [closed_form_count(j, g) for g in range(4)]]
        return not bad, f"j<= {J}, mismatches {bad}"

    def series():
        fs = free_energy_series(3, 10)
        bad = [(j, g) for g in range(4) for j in range(1, 11) if fs.count(j, g) != closed_form_count(j, g)]
        return not bad, f"mismatches {bad}"

    def constants():
        C = c2g_constants(3)
        ok = str(C[1]) == "1/1728"
        return ok, f"C2 = {C[1]}"

    def endpoint_ids():
        rng = np.random.default_rng(7)
        worst = 0.0
        for _ in range(20):
            s = complex(*rng.uniform(-4, 4, 2))
            try:
                worst = max(worst, max(ep.one_cut(s).residuals()))
            except ep.OnBranchCut:
                pass
        return worst < 1e-10, f"one-cut residual {worst:.2e}"

    def three_cut():
        t = ep.three_cut(-1 + 2j)
        r = max(t.gap_residuals())
        return r < 1e-8, f"gap residual {r:.2e}"

    def graph():
        g = critical_graph(build_qd(1, ONE_CUT))
        ok = g.connected("b1", "-b1") and g.census_report()["complete"]
        return ok, f"sigma=1 connections {g.connections}"

    def measure():
        m = support_measure(-3, TWO_CUT)
        return abs(m.total_mass - 1) < 1e-6, f"sigma=-3 mass {m.total_mass:.12f}"

    def phase():
        got = [str(classify(s)) for s in (1, -3, -1 + 2j, 1 + 3.92j, -2)]
        want = ["OneCut", "TwoCut", "ThreeCut", "OneCut", "MultiCritical(-2)"]
        return got == want, f"{got}"

    return [("map census", census), ("genus series", series), ("constants", constants),
            ("one-cut identities", endpoint_ids), ("three-cut gaps", three_cut),
            ("critical graph", graph), ("two-cut mass", measure), ("phase classifier", phase)]


def cmd_verify(a) -> int:
    failed = 0
    for name, fn in _suite(a.all):
        t = time.time()
        try:
            ok, detail = fn()
        except Exception as exc:            # report, do not abort the suite
            ok, detail = False, f"{type(exc).__name__}: {exc}"
        failed += not ok
        print(f"{'PASS' if ok else 'FAIL'}  {name:<20s} {detail}  ({time.time() - t:.1f}s)")
    return 0 if failed == 0 else 1


# ---------------------------------------------------------------- parser

def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="quartic", description="Complex quartic model: phases, trajectories, map counts.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    c = sub.add_parser("classify", help="phase of sigma")
    c.add_argument("re", type=float)
    c.add_argument("im", type=float)
    c.add_argument("--verify", action="store_true")
    c.add_argument("--json", action="store_true")
    c.set_defaults(fn=cmd_classify)

    t = sub.add_parser("trace", help="critical graph export")
    t.add_argument("--sigma", nargs=2, type=float, required=True, metavar=("RE", "IM"))
    t.add_argument("--regime", required=True)
    t.add_argument("--out", required=True)
    t.add_argument("--rmax", type=float, default=20.0)
    t.set_defaults(fn=cmd_trace)

    b = sub.add_parser("phase-boundary", help="boundary polylines")
    b.add_argument("--curve", required=True)
    b.add_argument("--out")
    b.add_argument("--show-fake", action="store_true")
    b.set_defaults(fn=cmd_phase_boundary)

    g = sub.add_parser("genus-counts", help="4-valent map counts by genus")
    g.add_argument("--j", type=int, default=4)
    g.add_argument("--enumerate", action="store_true")
    g.add_argument("--allow-hard-cap", action="store_true")
    g.add_argument("--workers", type=int, default=1)
    g.add_argument("--out")
    g.set_defaults(fn=cmd_genus_counts)

    s = sub.add_parser("series", help="exact coefficients of f_2g(u)")
    s.add_argument("--genus", type=int, required=True)
    s.add_argument("--order", type=int, default=12)
    s.add_argument("--out")
    s.set_defaults(fn=cmd_series)

    k = sub.add_parser("constants", help="C_2g and K_g")
    k.add_argument("--genus", type=int, default=3)
    k.add_argument("--out")
    k.set_defaults(fn=cmd_constants)

    v = sub.add_parser("verify", help="quick invariant suite")
    v.add_argument("--all", action="store_true")
    v.set_defaults(fn=cmd_verify)
    return p


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    return args.fn(args)


if __name__ == "__main__":
    sys.exit(main())
