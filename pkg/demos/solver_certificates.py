"""
Inside the solver
=================

Every answer comes with a certificate recomputed from scratch: the
primal residual, eigenvalue margins of both sides and the duality gap.
The iteration log shows the gap closing.
"""
import sys

import numpy as np

from cbnorm import check, solve
from cbnorm.linalg import random_density
from cbnorm.programs import build_fidelity_sdp
from cbnorm.sdp import strict_feasibility_probe

rng = np.random.default_rng(0)
P, Q = random_density(3, rng), random_density(3, rng)
p = build_fidelity_sdp(P, Q)

sol = solve(p, trace=sys.stdout)
print(check(p, sol))

# Strict feasibility holds for full-rank inputs and fails on the primal
# side once P is singular.
for name, P_ in (("full rank", P), ("rank one", random_density(3, rng, rank=1))):
    rep = strict_feasibility_probe(build_fidelity_sdp(P_, Q))
    print("%-9s primal margin %.2e  dual margin %.2e" % (name, rep.primal_margin, rep.dual_margin))
