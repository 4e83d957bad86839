"""Brute-force 4-valent map census against the closed forms, plus asymptotic ratios.

    python3 scripts/census.py --j 4 [--j5] [--workers 4]
"""
import argparse
import time

from quartic.maps import asymptotic_ratio, closed_form_count, enumerate_census

p = argparse.ArgumentParser()
p.add_argument("--j", type=int, default=4)
p.add_argument("--j5", action="store_true", help="include j=5 (minutes)")
p.add_argument("--workers", type=int, default=1)
a = p.parse_args()

js = list(range(1, a.j + 1)) + ([5] if a.j5 and a.j < 5 else [])
for j in js:
    t = time.time()
    c = enumerate_census(j, allow_hard_cap=(j == 5), workers=a.workers)
    want = [closed_form_count(j, g) for g in range(4)]
    got = (list(c.counts) + [0] * 4)[:4]
    print(f"j={j} counts {got} closed {want} {'ok' if got == want else 'MISMATCH'} "
          f"connected {c.total_connected} of {c.total_pairings} ({time.time() - t:.1f}s)")

print("\nN_j(g) / leading asymptotic")
for g in range(4):
    print(f"g={g}", "  ".join(f"j={j}: {float(asymptotic_ratio(j, g)):.5f}" for j in (50, 100, 200)))
