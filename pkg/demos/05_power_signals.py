# Power signals t^delta: the ratio H / alpha0^delta against its window bound.

import numpy as np

from zetaladder.interactions import power_bound, power_ratio, zt_power_signal

L, U = 1e6, 0.5
for d in (-1000, -1, 0, 1, 1000):
    rep = zt_power_signal(d, L, U)
    print(f"delta={d:>6}: ratio {rep.lhs:.12f}  |ratio-1| {rep.raw_residual:.3e}"
          f"  bound {rep.extras['bound']:.3e}")

# The bound is uniform over alpha0 in the window.

alphas = np.linspace(L, L + U, 6)
print([f"{power_ratio(1000, L, U, a) - 1:+.3e}" for a in alphas])

# Large |delta| needs larger L: the bound is about |delta| U / L.

for Lx in (1e4, 1e5, 1e6, 1e7):
    print(f"L={Lx:g}: bound for delta=1000 is {power_bound(1000, Lx, U):.3e}")
