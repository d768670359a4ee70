"""
Exponential versus polynomial conditioning
==========================================

The Vandermonde matrix on the roots of Phi_{4p}^+ becomes hopelessly
ill-conditioned as p grows. Replacing the monomials by the integer basis
r_i^* keeps the condition number polynomial in p.
"""

# %%
# Frobenius condition numbers at 256 bits, escalating precision when the
# inversion residual is not small enough.
import mpmath

from cyclocond.construct import cond_vandermonde_real, factorize
from cyclocond.mpnum import cond

print("%5s %14s %14s %10s %14s" % ("p", "cond(V)", "2^((p-1)/2)", "cond(U)", "p^3(p+1)(2p-1)^2"))
for p in (5, 13, 29, 53, 101):
    v = cond_vandermonde_real(p)
    u = cond(factorize(p).U4p).cond
    bound = p ** 3 * (p + 1) * (2 * p - 1) ** 2
    print("%5d %14s %14s %10s %14s" % (p, mpmath.nstr(v.cond, 5), mpmath.nstr(v.lower_bound, 5),
                                       mpmath.nstr(u, 6), mpmath.nstr(bound, 5)))

# %%
# The quasi-Vandermonde matrix is far below its proven bound, and the
# plain Vandermonde matrix is far above its exponential lower bound.
# Both statements are finite checks, not asymptotic proofs.

# %%
# Scaled isometry: at n = 2^l the roots of unity give orthogonal rows, so
# the condition number is exactly phi(n).
from cyclocond.construct import cond_vandermonde_cyclotomic

for n in (4, 16, 64):
    print("n=%d cond=%s" % (n, mpmath.nstr(cond_vandermonde_cyclotomic(n).cond, 12)))
