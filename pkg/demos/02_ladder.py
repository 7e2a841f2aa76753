# Jacob's ladder phi1 from the Hardy-Littlewood integral.

import math

import numpy as np

from zetaladder.hl_integral import IntegralCheckpointTable, default_table_path, hl_I
from zetaladder.ladder import Ladder

# The table of I(t) on a grid of multiples of 10 is built once and reused.

table = IntegralCheckpointTable(path=default_table_path())
table.extend_to(10_000)
table.save()
print(f"table rows {len(table)}, last t {table.last_t:g}, file {table.path}")

lad = Ladder(table)
c = lad.cfg.constants.c

# phi1(T) solves V(y) = I(T); T - phi1(T) follows the gap law (1-c) T / ln T.

print("T        I(T)             phi1(T)          gap ratio")
for T in (1000.0, 2000.0, 5000.0, 10_000.0):
    p = lad.phi1(T)
    ratio = (T - p) * math.log(T) / ((1 - c) * T)
    print(f"{T:<8g} {hl_I(T, table):<16.6f} {p:<16.8f} {ratio:.4f}")

# Reverse iteration lifts [T, T+U] into segments further up.

chain = lad.reverse_iterates(2000.0, 0.5, 3)
for r in range(chain.k + 1):
    lo, hi = chain.segment(r)
    print(f"r={r}  [{lo:.6f}, {hi:.6f}]  width {hi - lo:.6f}")

# omega is the exact Jacobian of the change of variables: phi1' = Z^2 / omega.

t, h = 3000.3, 1e-3
fd = (lad.phi1(t + h) - lad.phi1(t - h)) / (2 * h)
print(f"phi1'({t}) = {fd:.8f}, Z^2/omega = {lad.z_tilde_sq(t):.8f}")
print("omega(1e4) / ln(1e4) =", lad.omega(1e4) / math.log(1e4))
print("monotone on a grid:", bool(np.all(np.diff([lad.phi1(x) for x in np.linspace(500, 9000, 30)]) > 0)))
