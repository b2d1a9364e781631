"""Cusp-form dimensions against the b-divisor volume (Hilbert-Samuel).

dim / (l^2 / 2) approaches 128 from below for N = 4.  The gap shrinks
like 48 / l plus lower order class-number terms, so l * gap stays above 48.
"""
from bdivisor import dim_cusp

print(f"{'l':>5} {'dim':>10} {'ratio':>12} {'gap':>9} {'l*gap':>8} {'50/l':>6}")
for ell in (1, 5, 25, 50, 100, 200, 400):
    r = dim_cusp(4, ell)
    print(f"{ell:>5} {int(r.dim):>10} {float(r.ratio):>12.5f} {float(r.gap):>9.4f} "
          f"{float(r.gap) * ell:>8.2f} {50 / ell:>6.2f}")
