# A small sweep through the library: reports, convergence table and manifest.

import json
import subprocess
import sys
import tempfile
from pathlib import Path

out = Path(tempfile.mkdtemp(prefix="zetaladder-sweep-"))
spec = out / "sweep.txt"
spec.write_text("""\
identities = trig, pair_cos, second_level_pair, power_signal
L = 700, 1400
mu = 0.3, 0.7
placements = 2
delta = -1000, 1000
power_L = 1000000
""")

# mu = 0.7 violates 2mu+U <= pi/2 - eps for the pi family; those points are rejected.

subprocess.run([sys.executable, "-m", "zetaladder", "sweep", str(spec), "--out", str(out)], check=False)

print((out / "convergence.tsv").read_text())
man = json.loads((out / "manifest.json").read_text())
print({k: man[k] for k in ("c0", "omega_id", "d_policy", "f5_variant")})
print(sorted(p.name for p in out.iterdir()))
