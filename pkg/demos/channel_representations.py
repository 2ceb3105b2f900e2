"""
Three ways to write down a linear map
=====================================

A map on matrices can be given by its Choi matrix, by a pair of
Stinespring operators ``Phi(X) = Tr_Z(A0 X A1*)``, or by Kraus pairs.
The conversions below are exact up to rounding.
"""
import numpy as np

from cbnorm import adjoint, apply, choi_from_stinespring, stinespring_from_choi
from cbnorm.channels import StinespringPair, random_channel, transpose_map

rng = np.random.default_rng(3)

##############################################################################
# The transpose map.  Its Choi matrix is the swap operator, and it needs
# two different Kraus families because it is not completely positive.
T = transpose_map(2)
print("J(transpose) =\n", T.J.real)
E = [np.outer(np.eye(2)[i], np.eye(2)[j]) for i in range(2) for j in range(2)]
pair = StinespringPair.from_kraus(E, [e.T for e in E])
print("from Kraus pairs matches:", np.allclose(choi_from_stinespring(pair).J, T.J))

X = rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2))
print("apply(T, X) == X^T:", np.allclose(apply(T, X), X.T))

##############################################################################
# A random channel: Stinespring -> Choi -> Stinespring.
S = random_channel(2, 3, 2, rng)
J = choi_from_stinespring(S)
S2 = stinespring_from_choi(J)
rho = np.diag([0.3, 0.7])
print("environment size after round trip:", S2.k)
print("same output:", np.allclose(apply(S, rho), apply(S2, rho)))
print("trace preserved:", np.isclose(np.trace(apply(J, rho)), 1))

##############################################################################
# The adjoint satisfies <Y, Phi(X)> = <Phi*(Y), X>.
Y = rng.standard_normal((3, 3))
lhs = np.vdot(Y, apply(J, X))
rhs = np.vdot(apply(adjoint(J), Y), X)
print("adjoint identity holds:", np.isclose(lhs, rhs))
