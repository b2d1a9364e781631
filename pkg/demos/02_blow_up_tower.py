"""Blowing up the double points one Stern-Brocot level at a time.

Each blow-up at a point of type (n, m) and multiplicity mu lowers the
self-intersection by mu^2 / (n m (n+m))^2.  The table compares the scalar
recursion with the full lattice computation and shows the gap to 128.
"""
from bdivisor import convergence_table, lattice_self_intersection, recursion_self_intersection

N = 4
print(f"{'depth':>5} {'nodes':>6} {'self-int (float)':>18} {'gap':>12}  lattice == recursion")
for row in convergence_table(N, 6):
    d = row["depth"]
    same = lattice_self_intersection(N, d) == recursion_self_intersection(N, d)
    print(f"{d:>5} {row['nodes']:>6} {float(row['self_int']):>18.10f} {float(row['gap']):>12.3e}  {same}")
