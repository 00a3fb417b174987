"""The residual Z_p action on L(p) and its Borel cohomology.

Z_{p^2} acts freely on S^{2m-1}; the subgroup Z_p gives the quotient L(p),
and the quotient group Z_p acts freely on L(p) with orbit space L(p^2).
For a free action the Borel cohomology equals the cohomology of the orbit
space, and this script computes both sides independently.

Run with ``python demos/02_orbit_space_borel.py``.
"""

from __future__ import annotations

from lenscoh.complexes import borel_cohomology_dims, cohomology_dims, underlying_complex
from lenscoh.spaces import LensParams, lens_complex, residual_action_complex, standard_resolution

# %% The Z_p-complex obtained by folding the Z_{p^2} sphere complex.
p, m = 3, 3
P = LensParams(p, m, p * p)
C = residual_action_complex(P)
print("underlying space has the cohomology of L(3):", cohomology_dims(underlying_complex(C), p))

# %% Borel construction: the standard periodic resolution tensored over Z_p
# with C, cohomology computed through degree D.
D = 14
W = standard_resolution(p, D + 1)
borel = borel_cohomology_dims(W, C, p, D)
orbit = (cohomology_dims(lens_complex(P), p) + [0] * (D + 1))[: D + 1]
print("Borel:", borel)
print("L(9): ", orbit)
print("equal:", borel == orbit)

# %% Weights do not matter: another choice of rotation weights gives the
# same dimensions.
Q = LensParams(p, m, p * p, (1, 2, 4))
print("weights (1, 2, 4):", borel_cohomology_dims(W, residual_action_complex(Q), p, D) == borel)
