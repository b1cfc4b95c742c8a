"""Interpolation rates of the spacetime element.

The element couples a Hermite-style x-direction (values plus edge slopes)
with Lagrange time levels.  Interpolating the smooth field
sin(pi x) exp(-t) and measuring three norms of the defect shows the
expected powers of h: p+1 for the field itself, at least p for the time
derivative and p-1 for the second space derivative.
"""

from schrodinger_dpg.harness import run_interp_study

for p in (3, 4):
    table = run_interp_study(p, (2, 4, 8, 16))
    print(f"\np = {p}")
    print("  level      h        ||w-Pw||     ||d_t(w-Pw)||  ||d_xx(w-Pw)||")
    for r in table.rows:
        print(f"  {r.level:5d}  {r.h:.5f}  {r.err_l2:.6e}  {r.err_dt:.6e}  "
              f"{r.err_dxx:.6e}")
    s = table.slopes()
    print(f"  slopes: {s[0]:.2f}, {s[1]:.2f}, {s[2]:.2f} "
          f"(bounds {p + 1}, {p}, {p - 1})")
