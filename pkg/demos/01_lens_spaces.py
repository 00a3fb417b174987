"""Lens spaces and their mod-p cohomology rings.

Run with ``python demos/01_lens_spaces.py``.
"""

from __future__ import annotations

import numpy as np

from lenscoh.complexes import cohomology_dims, homology_ranks_over_Z
from lenscoh.products import lens_ring, ring_of_group
from lenscoh.rings import case_ii_family, match_presentation
from lenscoh.spaces import LensParams, lens_complex

# %% The cellular chain complex of L^5(9; 1, 1, 1) has one cell per dimension.
# Its boundaries alternate between 0 and multiplication by n.
P = LensParams(p=3, m=3, n=9)
L = lens_complex(P)
print("boundaries:", [int(L.d(i)[0, 0]) for i in range(1, L.top + 1)])
print("integral homology:", homology_ranks_over_Z(L))

# %% With Z_3 coefficients every boundary vanishes, so each degree up to 5
# carries one class.
print("dim H^j(L; Z_3):", cohomology_dims(L, 3))

# %% The ring is the truncation of H*(B Z_9; Z_3) at the top cell.
R = lens_ring(P)
for d, labels in enumerate(R.labels):
    print(d, labels)

# %% The presentation Z_3[x, z]/<x^2, z^3> is found by search and certified.
certs = match_presentation(R, case_ii_family(3, 3))
print("certificate:", certs[0].to_json())

# %% The Bockstein tells L(9) apart from L(3): it kills x when n = p^2 and
# sends x to z when n = p.
for n in (3, 9):
    Rn = lens_ring(LensParams(3, 3, n))
    print(f"n={n}: beta(x) =", Rn.beta(1, Rn.generator("x")[1]))

# %% The same contrast already shows up for the classifying spaces.
for n in (3, 9):
    G = ring_of_group(n, 3, 4)
    print(f"B Z_{n}: beta(s) =", G.beta(1, G.generator("s")[1]), "labels", [l[0] for l in G.labels])

# %% Cup products of two odd classes: s^2 over Z_n picks up n(n-1)/2, which
# vanishes mod p whenever p divides n.
G = ring_of_group(9, 3, 4)
s = G.generator("s")[1]
print("s*s in B Z_9:", G.product(1, s, 1, s), np.array_equal(G.product(1, s, 1, s), G.zero(2)))
