"""What the oracle side of the library computes, on the two workhorse families.

Everything here is deterministic: no sampling, just quadrature and search.
"""

import numpy as np

from kmarkets import (
    Constant,
    PowerSimulated,
    UniformJoint,
    expected_revenue,
    optimal_3pd_policy,
    optimal_uniform_price,
    price_at,
    welfare,
)

print("== U[0,1]^2 baseline ==")
p, r = optimal_uniform_price(UniformJoint())
print(f"best single price {p}  revenue {r}")
print(f"welfare at that price {welfare(UniformJoint(), Constant(p)):.6f}")
print()

spec = PowerSimulated()
print("== power family F(y|x) = y^(x+1) ==")
p_uni, r_uni = optimal_uniform_price(spec)
pol = optimal_3pd_policy(spec)
r_3pd = expected_revenue(spec, pol)
print(f"best single price   {p_uni:.9f}  revenue {r_uni:.9f}")
print(f"best per-x policy   revenue {r_3pd:.9f}")
print(f"discrimination gain {r_3pd - r_uni:.3e}")
print()

# the pointwise optimum has a closed form here, so compare a few points
print("x      computed     (x+2)^(-1/(x+1))")
for x in (0.0, 0.25, 0.5, 0.75, 1.0):
    closed = (x + 2.0) ** (-1.0 / (x + 1.0))
    print(f"{x:.2f}   {price_at(pol, x):.8f}   {closed:.8f}")
err = np.abs(
    np.interp(np.linspace(0, 1, 101), pol.x_grid, pol.prices)
    - (np.linspace(0, 1, 101) + 2.0) ** (-1.0 / (np.linspace(0, 1, 101) + 1.0))
).max()
print(f"max policy error on a 101-point grid: {err:.2e}")
