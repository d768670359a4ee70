"""
Walking through the K_{4p}^+ factorization
==========================================

For p = 7 we build every matrix of the chain, check the two
factorizations numerically and compare each condition number with its
bound.
"""

# %%
import mpmath

from cyclocond.construct import diagonal_norm_bounds, factorize, transition_to_power_basis, verify_bounds

p = 7
fact = factorize(p)


def show(name, M, digits=4):
    print(name)
    for row in M.tolist():
        print("  " + " ".join("%9s" % mpmath.nstr(v, digits) for v in row))


# %%
# Q lists the node 0 first, so its first row is (2cos(i pi/2))_i. The
# last entry epsilon is +-2 for every odd prime.
show("Q_28", fact.Q4p)
print("epsilon =", fact.epsilon, " r =", fact.r_vector)

# %%
# F subtracts the first row from the others, C clears the first row. The
# product is block diagonal with a 2 in the corner.
show("F Q C", fact.F @ fact.Q4p @ fact.C)
print("||FQC - M||_F =", mpmath.nstr(fact.residual_FQC, 3))

# %%
# The lower block N factors as P U with P the diagonal of nodes.
show("U_28", fact.U4p)
print("||PU - N||_F =", mpmath.nstr(fact.residual_PU, 3))
print(diagonal_norm_bounds(fact)["P_inv_ok"], "-> ||P^-1|| bound holds")

# %%
# Every bound of the chain, and the unimodular change of basis that makes
# u -> U u a lattice isomorphism.
for r in verify_bounds(p, fact=fact):
    print("%-4s cond %-10s bound %-8s %s" % (r.name, mpmath.nstr(r.cond, 6), r.bound, r.bound_satisfied))
for row in transition_to_power_basis(p):
    print(row)
