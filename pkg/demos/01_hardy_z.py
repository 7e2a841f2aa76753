# Hardy Z on the critical line: the fast evaluator against a slow oracle.

import numpy as np

from zetaladder.config import EvalConfig
from zetaladder.zeta_eval import Z_oracle, hardy_Z, local_spectrum, riemann_siegel_Z

# Below t_switch the evaluator sums Euler-Maclaurin in float64; above it,
# Riemann-Siegel with up to two correction terms.

cfg = EvalConfig()
ts = np.array([14.134725, 30.0, 100.0, 1000.0, 4321.5])
print("t          Z(t)               oracle")
for t in ts:
    print(f"{t:<10} {hardy_Z(t): .15f}  {Z_oracle(t, cfg.oracle_precision)[0]: .15f}")

# Each correction term buys a factor of about t^(-1/2).

t = np.linspace(500, 510, 200)
ref = np.array([Z_oracle(x, 25)[0] for x in t])
for m in (0, 1, 2):
    err = np.max(np.abs(riemann_siegel_Z(t, m) - ref))
    print(f"m={m}: max error {err:.2e}, bound {cfg.rs_error_constants[m] * 500 ** (-(2 * m + 1) / 4):.2e}")

# Near a base point x, Z is a bank of oscillators sum (2/sqrt n) cos(t w_n + psi).

bank = local_spectrum(3000.0, 2.0)
grid = np.linspace(3000.0, 3002.0, 100)
print(f"{len(bank.n)} oscillators, top frequency {bank.frequency[0]:.4f}")
print(f"reconstruction gap {np.max(np.abs(bank.reconstruct(grid) - hardy_Z(grid))):.2e}"
      f" <= bound {bank.remainder_bound:.2e}")
