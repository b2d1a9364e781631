"""theta_{1,1}, its invariant norm and the vanishing orders along the boundary."""
import mpmath

from bdivisor import GroupElement, ModularPoint, check_invariance, theta11, vanishing_order
from bdivisor.jacobi import random_group_elements

pt = ModularPoint(0.1 + 1.1j, 0.3 + 0.2j)
print("theta(tau, z)      =", mpmath.nstr(theta11(pt), 12))
print("theta(tau, -z)     =", mpmath.nstr(theta11(ModularPoint(pt.tau, -pt.z)), 12))

for g in [GroupElement(0, -1, 1, 0), GroupElement(lam=1, mu=-2)] + random_group_elements(3, 1, pt):
    r = check_invariance(g, pt)
    print(f"{(g.a, g.b, g.c, g.d, g.lam, g.mu)!s:>24}: relative change {r.details['rel_diff']}")

print("vanishing orders of theta along Theta_{1,nu}, N=4:",
      [str(vanishing_order(4, nu)) for nu in range(5)])
