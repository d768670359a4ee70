"""
Noise through the embedding
===========================

A PLWE error vector lives in coefficient space. Moving it to the
canonical embedding multiplies it by U_{4p}; moving back multiplies by the
inverse. We measure how much Gaussian errors grow either way.
"""

# %%
import mpmath

from cyclocond.lwe import LweParams, ModPoly, plwe_sample, run_noise_experiment

params = LweParams.with_default_modulus(13, 3.2, seed=1)
print(params)

# %%
# A sample (a, b = a s + e) satisfies b - a s = e exactly in the ring.
s = ModPoly.from_ints(range(12), params.q, params.p)
a, b, e = plwe_sample(s, params)
print("error:", e)
print("b - a s == e:", (b - a * s) == ModPoly.from_ints(e, params.q, params.p))

# %%
# 2000 errors through U, U^-1 and, for contrast, the plain Vandermonde
# matrix on the same nodes.
out = run_noise_experiment(params, 2000)
for label, stats in (("U", out["forward"]), ("U^-1", out["inverse"]),
                     ("V", out["contrast"]["forward"]), ("V^-1", out["contrast"]["inverse"])):
    print("%-5s max ratio %-10s Frobenius bound %s" % (
        label, mpmath.nstr(mpmath.mpf(stats["max_ratio"]), 6), mpmath.nstr(mpmath.mpf(stats["frobenius_bound"]), 6)))

# %%
# Going back through V^-1 amplifies errors by far more than U^-1 does.
# Already at p = 13 the gap is more than an order of magnitude.
