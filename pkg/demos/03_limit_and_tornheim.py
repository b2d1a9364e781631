"""The limit 16 N p_N / 3 through the coprime Tornheim sum.

Sums over all coprime pairs up to a window M give an exact lower estimate
of the coprime sum; the tail majorant 2 zeta(2) / (3 M^3) closes the gap.
"""
import mpmath

from bdivisor import bdv_limit, coprime_tornheim, tornheim_222, zeta_even

for M in (25, 50, 100, 200):
    est = bdv_limit(4, M)
    lo, hi = est.interval
    print(f"M={M:>4}: bdv^2 in [{mpmath.nstr(lo, 12)}, {mpmath.nstr(hi, 12)}]  target {est.target}")

cop = coprime_tornheim(300)
full = tornheim_222(300)
print("coprime sum  :", mpmath.nstr(cop.partial_sum, 15), "+ tail <=", mpmath.nstr(cop.tail_bound, 3))
print("zeta(2,2;2)  :", mpmath.nstr(full.partial_sum, 15), "vs zeta(6)/3 =", mpmath.nstr(zeta_even(6) / 3, 15))
