"""
Completely bounded spectral norm
================================

The spectral-norm analogue is the diamond norm of the adjoint map, so
it needs no program of its own.
"""
import numpy as np

from cbnorm import adjoint, cb_spectral_norm, diamond_norm
from cbnorm.channels import identity_map, random_channel, random_choi, stinespring_from_choi

rng = np.random.default_rng(5)

print("identity map: %.9f" % cb_spectral_norm(identity_map(2)).value)

# A trace-preserving channel is unital in the adjoint picture: its
# spectral norm need not be 1, while its trace norm is.
S = random_channel(2, 2, 2, rng)
print("channel: trace-norm %.6f  spectral-norm %.6f" % (diamond_norm(S).value, cb_spectral_norm(S).value))

c = random_choi(2, 2, rng)
via_choi = cb_spectral_norm(c).value
via_pair = diamond_norm(stinespring_from_choi(adjoint(c))).value
print("random map: via Choi %.9f  via Stinespring %.9f" % (via_choi, via_pair))
