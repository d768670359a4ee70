"""
Exact cyclotomic and real-cyclotomic polynomials
================================================

Everything downstream starts from integer polynomials, so we build them
exactly and look at a few of their quirks.
"""

# %%
# Cyclotomic polynomials come from exact division of x^n - 1 by the
# cyclotomic factors of the proper divisors of n. Heights stay 1 until
# n has three distinct odd primes.
from cyclocond.intpoly import (
    chebyshev_T,
    cyclotomic,
    height_A,
    real_cyclotomic,
    reduced_r,
    scaled_R,
    star_R,
)

for n in (12, 15, 105):
    phi = cyclotomic(n)
    print("Phi_%d: degree %d, height %d" % (n, phi.degree, height_A(n)))
print("Phi_105 has a coefficient -2:", min(cyclotomic(105).coeffs))

# %%
# The minimal polynomial of 2cos(2pi/n) is read off the palindromic
# coefficient vector of Phi_n, using x^j + x^-j = R_j(x + 1/x).
for n in (12, 20, 52):
    print("Phi_%d^+ =" % n, real_cyclotomic(n))

# %%
# R_i(x) = 2 T_i(x/2) is monic with integer coefficients. Its constant
# term is 2cos(i pi/2): zero for odd i and +-2 for even i.
for i in range(7):
    print("R_%d(x) = %-28s  R_%d(0) = %d" % (i, scaled_R(i), i, scaled_R(i).constant_term))

# %%
# Subtracting that constant gives R_i^*, which is divisible by x; the
# quotients r_i^* form the basis behind the well-conditioned matrix.
for i in range(1, 6):
    print("R*_%d = %-22s r*_%d = %s" % (i, star_R(i), i - 1, reduced_r(i - 1)))

# %%
# Chebyshev polynomials T_i have leading coefficient 2^(i-1), which is
# why the monomial basis loses so much precision at large degree.
print("T_10 =", chebyshev_T(10))
print("largest coefficient of r*_507 has", max(abs(c) for c in reduced_r(507).coeffs).bit_length(), "bits")
