"""Running the symbolic Leray-Serre spectral sequence through every branch.

For a free Z_p action on a space with the mod-p cohomology of L^{2m-1}(p),
E_2 = H*(B Z_p) (x) H*(L) is generated by s, t and a, b.  Each branch fixes
the first differentials; the derivation law then forces everything else or
produces an identity that fails mod p.

Run with ``python demos/03_spectral_sequence_cases.py``.
"""

from __future__ import annotations

from lenscoh.rings import case_i_family, match_presentation, poincare_series
from lenscoh.spectral import explore_cases, run_branch, tot_ring

# %% p does not divide m: only the branch with d_2(a) = t is consistent.
for res in explore_cases(3, 4):
    print(f"{res.name:14s} {res.classification:26s} {res.message}")

# %% m = 2p: the branch with d_2(b) = t a is also consistent; its two
# alternatives either contradict themselves or leave classes in high degree.
print()
for res in explore_cases(3, 6):
    print(f"{res.name:14s} {res.classification:26s} {res.message}")

# %% The E_inf page of the case (i) branch, row by row (row l, column k).
res = run_branch(3, 6, "case1")
for l, row in enumerate(res.final.dims_table(12)):
    print(f"l={l:2d}", "".join(".x"[d] for d in row))
print("total dims:", res.e_infinity_dims)

# %% The associated graded ring and its presentation with every constant 0.
T = tot_ring(res.final)
print("checks:", T.checks)
certs = match_presentation(T.ring, case_i_family(3, 2))
print("constants:", certs[0].constants)
print("Poincare series of the family:", poincare_series(case_i_family(3, 2)))
