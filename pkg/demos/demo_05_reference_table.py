"""
Reproducing a reference conditioning table
==========================================

The reference figures for Cond(U_{4p}) match to four digits for
p <= 257. The Vandermonde figures do not, and this script shows why:
they were computed on the halved nodes and in double precision.
Set FULL = True to include p = 509 (about six minutes).
"""

# %%
import mpmath

from cyclocond.construct import conditioning_table

FULL = False
primes = (13, 101, 127, 257, 509) if FULL else (13, 101, 127)
rows = conditioning_table(primes, half_scale=True)

fmt = "%5s %12s %12s %12s %12s %10s %10s"
print(fmt % ("p", "V (psi)", "V (halved)", "V (float64)", "V ref", "U", "U ref"))
for r in rows:
    print(fmt % (r.p, mpmath.nstr(r.cond_V, 4), mpmath.nstr(r.cond_V_half, 4),
                 "%.3g" % r.cond_V_float64, r.reference_V, mpmath.nstr(r.cond_U, 7), r.reference_U))

# %%
# At p = 13 the halved nodes reproduce the reference Vandermonde figure
# to five digits, while the nodes 2cos(2k pi/52) give a value eight times
# larger. From p = 101 on, double precision saturates near 1e19, which
# is what the reference column shows for p = 101 and 127.

# %%
# The reference U figure listed for p = 509 (18491.2) is not reproduced:
# every route gives 6623.5 there. It agrees to 0.02% with the value at
# p = 1009 instead (18495.3), uncomment to check (about a minute).
# from cyclocond.construct import factorize
# from cyclocond.mpnum import cond
# print(mpmath.nstr(cond(factorize(1009).U4p).cond, 8))
