"""
Fidelity as a semidefinite program
==================================

The fidelity of two positive semidefinite operators is the largest real
trace of ``X`` for which ``[[P, X], [X*, Q]]`` stays positive semidefinite.
This script solves that program, compares it with the closed form
``||sqrt(P) sqrt(Q)||_1`` and looks at the dual side.
"""
import numpy as np

from cbnorm import fidelity_direct, fidelity_sdp
from cbnorm.linalg import random_density
from cbnorm.oracles import commuting_fidelity_oracle
from cbnorm.programs import alberti_check, contraction_norm, fidelity_dual_operator, offdiagonal_block

rng = np.random.default_rng(7)

##############################################################################
# Commuting operators reduce to a classical overlap.
p, q = [0.5, 0.5], [0.25, 0.75]
res = fidelity_sdp(np.diag(p), np.diag(q))
print("commuting pair:  sdp %.9f   sum sqrt(p q) %.9f" % (res.value, commuting_fidelity_oracle(p, q)))

##############################################################################
# A random pair of density operators.  The certificate brackets the value.
P, Q = random_density(4, rng), random_density(4, rng)
res = fidelity_sdp(P, Q)
lo, hi = res.certificate.value_interval
print("random pair:     sdp %.9f   direct %.9f" % (res.value, fidelity_direct(P, Q)))
print("                 interval [%.10f, %.10f], %d iterations" % (lo, hi, res.solution.iterations))

##############################################################################
# The optimal off-diagonal block factors as sqrt(P) K sqrt(Q) with K a contraction.
X = offdiagonal_block(res)
print("||K||_inf =", round(contraction_norm(P, X, Q), 9))

##############################################################################
# Any positive definite Y gives an upper bound sqrt(<P,Y><Q,Y^-1>);
# the solver's dual operator makes it tight.
for Y in (np.eye(4), rng.standard_normal((4, 4))):
    Y = Y @ Y.T + 0.1 * np.eye(4)
    print("random Y bound  %.6f" % alberti_check(P, Q, Y)[0])
value, lam = alberti_check(P, Q, fidelity_dual_operator(res))
print("dual witness    %.9f  (balancing factor %.3f)" % (value, lam))
