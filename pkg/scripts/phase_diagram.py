"""Phase diagram of the sigma plane: boundary curves, shaded regions, flip bisections.

    python3 scripts/phase_diagram.py --out phase.svg [--show-fake] [--grid 41]
"""
import argparse
import json

from quartic.phase import bisect_flip, boundary_curves, phase_grid, psi, render_phase_svg

p = argparse.ArgumentParser()
p.add_argument("--out", default="phase.svg")
p.add_argument("--show-fake", action="store_true")
p.add_argument("--grid", type=int, default=0, help="also dump an n x n regime grid as JSON")
a = p.parse_args()

curves = boundary_curves()
for cid, c in curves.items():
    print(f"{cid:5s} boundary={c.boundary!s:5s} points={len(c.points):5d} "
          f"level residual {c.level_residual():.1e}")

render_phase_svg(a.out, show_fake=a.show_fake)
print("wrote", a.out)

print("one/three flip on -1+iy: y =", round(bisect_flip(lambda y: complex(-1, y), 1.6, 1.9), 6))
print("two/three flip on -3+iy: y =", round(bisect_flip(lambda y: complex(-3, y), 1.3, 1.7), 6))
print("flip on x+4i: x =", round(bisect_flip(lambda x: complex(x, 4), -1.5, -0.8), 6))
print("Re Psi(1+3.92i) =", psi(1 + 3.92j).real)

if a.grid:
    path = a.out.rsplit(".", 1)[0] + "-grid.json"
    with open(path, "w") as fh:
        json.dump(phase_grid(n=a.grid), fh)
    print("wrote", path)
