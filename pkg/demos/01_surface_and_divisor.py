"""The base model E(4) and the divisor of theta^8 on it.

Builds the intersection table of the toroidal compactification, prints the
coefficients of C and checks C.C = 136.
"""
from bdivisor import base_model, cusp_count, genus, intersect, jacobi_divisor
from bdivisor.surface import ZERO_SECTION, fiber

N = 4
model = base_model(N)
print(f"E({N}): {cusp_count(N)} cusps, X({N}) has genus {genus(N)}, "
      f"{len(model.components)} components, {len(model.singular_points)} double points")

C = jacobi_divisor(model)
print("coefficient of H:", C[ZERO_SECTION])
print("coefficients along one 4-gon:", [str(C[fiber(1, nu)]) for nu in range(N)])
print("C.C =", intersect(C, C))
