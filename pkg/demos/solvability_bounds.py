"""
How far the dual feasible set is from its boundary
==================================================

Both norm programs come with an explicit dual point that stays feasible
under any Hermitian perturbation up to a radius ``epsilon``, and with a
bound ``R`` on the trace of dual solutions worth considering.
"""
import numpy as np

from cbnorm.channels import random_choi, random_stinespring
from cbnorm.diagnostics import solvability_report, verify_interior_point
from cbnorm.programs import diamond_norm, dual_parts

rng = np.random.default_rng(2)

for rep in (random_stinespring(2, 2, 3, rng), random_choi(2, 3, rng)):
    r = solvability_report(rep)
    print(r.program)
    print("  epsilon %.6f   R %.4f" % (r.epsilon, r.r_bound))
    print("  ball of radius epsilon feasible:", verify_interior_point(r.program, rep, r.epsilon))
    print("  ball of radius 100*epsilon feasible:", verify_interior_point(r.program, rep, 100 * r.epsilon))
    lam0, lam1, Y0, Y1 = dual_parts(diamond_norm(rep))
    print("  trace of the optimal dual point %.4f" % (lam0 + lam1 + np.trace(Y0 + Y1).real))
