"""A square-integrable solution whose H^1 norm diverges.

Forcing each sine mode at its own resonant frequency with 1/k amplitudes
produces mode profiles u_k(t) = -i t exp(i omega_k^2 t)/k.  The solution
norm stays bounded as more modes are kept (it converges to pi^2/18 for
T=1), while the spatial-gradient norm grows linearly in the truncation
count: the classical obstruction to first-order reformulations of the
Schrodinger equation, and the reason the solver discretizes the second
order operator directly.

The quadrature columns evolve each mode by the Duhamel integral instead
of the closed form, cross-checking the time-integration machinery.
"""

import numpy as np

from schrodinger_dpg.harness import run_oracle

table = run_oracle((1, 2, 5, 10, 20, 50), T=1.0)
limit = np.pi**2 / 18.0

print("   M    ||U_M||^2 (closed)   ||U_M||^2 (quad)   "
      "||d_x U_M||^2 (closed)   ||d_x U_M||^2 (quad)")
for r in table.rows:
    print(f"  {r.M:3d}   {r.u_norm_sq_closed:.12f}    {r.u_norm_sq_quad:.12f}"
          f"    {r.grad_norm_sq_closed:18.8f}    {r.grad_norm_sq_quad:18.8f}")
print(f"\n||U_M||^2 stays below pi^2/18 = {limit:.12f}")
print("the gradient column grows by pi^2/3 per mode: "
      f"{np.pi**2 / 3.0:.8f}")
