"""Boundary residues and the toric analogue.

Each double point adds two residue integrals of -1/6 (times 16/N^2); for
N = 4 they account for 136 - 128 = 8.  On P^2 the same mechanism shows up
as 2 Vol(Delta_sing) = 1 - 1/3.
"""
from bdivisor import residue_consistency, residue_integral, toric_volume_check

for eps in (1e-1, 1e-2, 1e-3):
    print(f"I({eps:g}) = {residue_integral(eps):.12f}")
rep = residue_consistency(4)
print("C.C =", rep.details["C.C"], " residues =", rep.details["residue_total"], " total =", rep.computed)

for method in ("exact", "quadrature", "montecarlo"):
    r = toric_volume_check(method)
    print(f"{method:>10}: 2 Vol(Delta_sing) = {r.computed}  (pass={r.passed})")
