# Interaction identities: raw products versus omega-corrected products.

from zetaladder.factorizer import Factorizer
from zetaladder.hl_integral import IntegralCheckpointTable, default_table_path
from zetaladder.interactions import (pairwise_interaction, second_level, trig_identity,
                                     triple_interaction)
from zetaladder.ladder import Ladder

fz = Factorizer(Ladder(IntegralCheckpointTable(path=default_table_path())))
L, U, mu = 700, 0.5, 0.3

# cos^2(a2) P2 + sin^2(a1) P1 is 1 once each P is divided by its Omega.

rep = trig_identity(fz, L, U, mu)
print(f"trig: lhs {rep.lhs:.12f}  raw {rep.raw_residual:.2e}  corrected {rep.corrected_residual:.2e}")
for d in ("cos", "sin"):
    r = pairwise_interaction(fz, L, U, mu, direction=d)
    print(f"pair_{d}: raw {r.raw_residual:.2e}  corrected {r.corrected_residual:.2e}")

# Three systems, and the closure of the three rearrangements.

tri = triple_interaction(fz, L, U, mu)
print(f"triple: corrected {tri.corrected_residual:.2e}  closure {tri.extras['closure']:.1e}")

# Second level: the beta products of f4 and f5 cancel exactly.

sec = second_level(fz, 350, U, mu, 1)
print(f"second_level: beta ratio {sec.extras['beta_cancellation']!r}"
      f"  coefficient {sec.rhs:.10f}  printed {sec.extras['printed_coefficient']:.10f}"
      f"  corrected {sec.corrected_residual:.2e}")

# The raw residual is Omega - 1; across placements it scatters around 1e-7.

for j in range(5):
    r = trig_identity(fz, 1400 + j, U, mu)
    print(f"L={1400 + j}: raw {r.raw_residual:.3e}")
