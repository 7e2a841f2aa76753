# Mean-value abscissae and the factorization record for one test function.

import math

from zetaladder.factorizer import Factorizer
from zetaladder.functions import F1_SIN2, ONE, PI, library
from zetaladder.hl_integral import IntegralCheckpointTable, default_table_path
from zetaladder.ladder import Ladder

fz = Factorizer(Ladder(IntegralCheckpointTable(path=default_table_path())))
T, U = PI * 700 + 0.3, 0.5

# The weighted integrand on the k-th lifted segment integrates back to int f.

for k in (1, 2):
    print(f"k={k}: int g_k = {fz.integrate_weighted(F1_SIN2, T, U, k):.12f},"
          f" int f = {F1_SIN2.increment(T, U):.12f}")

# The record: alpha from f, beta from f = 1, products and residuals.

rec = fz.factorization_check(F1_SIN2, T, U, 2)
print(rec.to_kv())

# beta is shared by every function at the same (T, U, k).

for fn in library().values():
    base = fn.base
    Tf = base * (700 if base == PI else 350) + 0.3
    r = fz.factorization_check(fn, Tf, U, 1)
    print(f"{fn.id:<8} residual_exact {r.residual_exact:.2e}  corrected {r.residual_zeta_corrected:.2e}"
          f"  Omega {r.omega_correction:.10f}  beta {r.beta[0]:.6f}")

# f = 1 gives e itself; alpha gaps follow the gap law.

e = fz.e_set(T, U, 2)
print(f"{len(e.roots)} roots for f = 1, representative {e.representative:.8f}")
print("alpha gaps", [round(b - a, 3) for a, b in zip(rec.alpha, rec.alpha[1:])],
      "law", round((1 - fz.cfg.constants.c) * T / math.log(T), 3))
print("one:", fz.integrate_weighted(ONE, T, U, 2))
