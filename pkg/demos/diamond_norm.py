"""
Completely bounded trace norm
=============================

The diamond norm is computed by two different programs: one built on a
Stinespring pair (maximum output fidelity) and one built on the Choi
matrix.  Independent oracles bound it from below (rank-one inputs) and,
for completely positive maps, give it in closed form.
"""
import time

import numpy as np

from cbnorm import choi_from_stinespring, diamond_norm, max_output_fidelity
from cbnorm.channels import ChoiMatrix, random_channel, random_stinespring, transpose_map
from cbnorm.oracles import AscentConfig, cp_diamond_oracle, rank_one_ascent

rng = np.random.default_rng(11)

##############################################################################
# The transpose map on n-dimensional matrices has norm n.
for n in (2, 3):
    t0 = time.perf_counter()
    res = diamond_norm(transpose_map(n))
    lower, _ = rank_one_ascent(transpose_map(n))
    print("transpose n=%d: sdp %.9f  ascent %.9f  (%.2fs)" % (n, res.value, lower, time.perf_counter() - t0))

##############################################################################
# Channels have norm 1 whichever representation is used.
S = random_channel(2, 2, 3, rng)
J = choi_from_stinespring(S)
print("channel: stinespring %.9f  choi %.9f  closed form %.9f"
      % (diamond_norm(S).value, diamond_norm(J).value, cp_diamond_oracle(J)))

##############################################################################
# A general Stinespring pair: both programs agree.
S = random_stinespring(2, 2, 3, rng)
a = max_output_fidelity(S)
b = diamond_norm(choi_from_stinespring(S))
print("pair:    stinespring %.9f  choi %.9f  |diff| %.1e" % (a.value, b.value, abs(a.value - b.value)))

##############################################################################
# Lower and upper bounds close up on a random Choi matrix.
c = ChoiMatrix(rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4)), 2, 2)
res = diamond_norm(c)
lower, (u, v) = rank_one_ascent(c, AscentConfig(restarts=16, seed=1))
print("sandwich: ascent %.9f <= dual bound %.9f" % (lower, res.certificate.value_interval[1]))
