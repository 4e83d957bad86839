"""Critical graph of the quadratic differential at one sigma, with a census printout.

    python3 scripts/trace_graph.py -1 2 --out graph.svg
"""
import argparse

from quartic.phase import classify
from quartic.model import PhaseRegime
from quartic.quaddiff import build_qd, critical_graph, render_svg, write_graph_csv

p = argparse.ArgumentParser()
p.add_argument("re", type=float)
p.add_argument("im", type=float)
p.add_argument("--regime", help="default: the classified regime")
p.add_argument("--rmax", type=float, default=20.0)
p.add_argument("--out", default="graph.svg")
a = p.parse_args()

s = complex(a.re, a.im)
reg = PhaseRegime.parse(a.regime) if a.regime else classify(s)
if reg.cuts == 0:
    raise SystemExit(f"{s} is {reg}; pass --regime explicitly")
g = critical_graph(build_qd(s, reg), rmax=a.rmax)
rep = g.census_report()
print(f"sigma={s} {reg}: {len(g.trajectories)} trajectories")
print("connections:", g.connections)
print(f"rays {rep['count']} complete={rep['complete']} max angle deviation {rep['maxDeviation']:.1e}")
print(f"z -> -z symmetry error {g.symmetry_error():.1e}")
if a.out.endswith(".csv"):
    write_graph_csv(g, a.out)
else:
    render_svg(g, a.out)
print("wrote", a.out)
