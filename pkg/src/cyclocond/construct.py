"""Nodes, Vandermonde and quasi-Vandermonde matrices, and the K_{4p}^+ factorization.

Index conventions used by every builder here:

* rows are indexed by nodes, columns by polynomial degree;
* for n = 4p the retained nodes are psi_j = 2cos(j*pi/(2p)) for odd j != p,
  in increasing j. They coincide with 2*x_k, x_k = cos((2k-1)pi/(2p)), for
  k != (p+1)/2, again in increasing k;
* Q_{4p} lists the degenerate node 0 first, followed by the retained nodes
  in that same order.

Entries of Q_{4p}, N_{4p} and U_{4p} are the values of exact integer
polynomials (see :mod:`cyclocond.intpoly`). Two evaluation routes exist:
``"recurrence"`` runs the three-term Chebyshev recurrence in ball arithmetic
(fast and numerically stable on [-2, 2]); ``"horner"`` evaluates the exact
monomial coefficients with enough guard bits to absorb the cancellation.
Both are certified by the ball radius before rounding to working precision.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Sequence

import mpmath
from flint import acb, arb, fmpq, fmpz_mat, fmpz_poly

from .intpoly import (
    IntPolynomial,
    chebyshev_T,
    coefficient_matrix,
    euler_phi,
    half_angle_cos,
    height_A,
    prime_factors,
    radical,
    reduced_r,
    scaled_R,
    star_R,
)
from .mpnum import (
    DEFAULT_PRECISION,
    CondReport,
    PrecMatrix,
    PrecScalar,
    cond,
    cond_exact,
    frobenius_norm,
    invert,
    working_precision,
)

__all__ = [
    "NodeSet",
    "Factorization",
    "is_odd_prime",
    "chebyshev_nodes",
    "psi_nodes",
    "roots_of_unity_nodes",
    "vandermonde",
    "quasi_vandermonde",
    "tchebycheff_matrix",
    "kuian_matrix",
    "kuian_reference",
    "cond_vandermonde_real",
    "cond_vandermonde_chebyshev",
    "cond_vandermonde_cyclotomic",
    "machine_precision_vandermonde_cond",
    "evaluate_polynomials",
    "build_Q4p",
    "build_F",
    "build_C",
    "r_vector",
    "factorize",
    "verify_bounds",
    "diagonal_norm_bounds",
    "transition_to_power_basis",
    "REFERENCE_TABLE",
    "TableRow",
    "table_row",
    "conditioning_table",
]

GUARD_BITS = 32


def is_odd_prime(p) -> bool:
    return isinstance(p, int) and p > 2 and prime_factors(p) == [p]


def _require_odd_prime(p) -> None:
    if not is_odd_prime(p):
        raise ValueError("expected an odd prime, got %r" % (p,))


# ---------------------------------------------------------------------------
# nodes


@dataclass(frozen=True)
class NodeSet:
    """Ordered evaluation nodes with the residue each one came from.

    ``kind`` is one of ``"chebyshev"`` (scale * cos((2k-1)pi/(2N))),
    ``"chebyshev_q"`` (the same, zero node first), ``"psi_real"``
    (2cos(2k pi/n)) or ``"roots_of_unity"`` (exp(2 pi i k/n)).
    ``excluded`` lists indices deliberately dropped from the natural range.
    """

    n_or_p: int
    nodes: tuple[PrecScalar, ...]
    provenance: tuple[int, ...]
    excluded: tuple[int, ...]
    kind: str
    precision_bits: int
    scale: int = 1

    def __len__(self) -> int:
        return len(self.nodes)

    def values(self) -> list:
        return [s.value for s in self.nodes]

    def to_mpmath(self) -> list:
        return [s.to_mpmath() for s in self.nodes]

    def rebuild(self, bits: int) -> NodeSet:
        """Recompute the same nodes from their trigonometric definition at ``bits``."""
        if self.kind == "chebyshev":
            full = chebyshev_nodes(self.n_or_p, bits, scale=self.scale)
            return full.without(self.excluded) if self.excluded else full
        if self.kind == "chebyshev_q":
            return _q_nodes(self.n_or_p, bits)
        if self.kind == "psi_real":
            return psi_nodes(self.n_or_p, bits)
        if self.kind == "roots_of_unity":
            return roots_of_unity_nodes(self.n_or_p, bits)
        raise ValueError("unknown node kind %r" % self.kind)

    def without(self, indices: Sequence[int]) -> NodeSet:
        drop = set(indices)
        keep = [i for i, k in enumerate(self.provenance) if k not in drop]
        return NodeSet(self.n_or_p, tuple(self.nodes[i] for i in keep),
                       tuple(self.provenance[i] for i in keep),
                       tuple(sorted(set(self.excluded) | drop)), self.kind,
                       self.precision_bits, self.scale)


def chebyshev_nodes(N: int, precision: int = DEFAULT_PRECISION, scale: int = 1) -> NodeSet:
    """x_k = scale * cos((2k-1) pi / (2N)) for k = 1..N, strictly decreasing."""
    if N < 1:
        raise ValueError("N must be positive")
    with working_precision(precision):
        vals = []
        for k in range(1, N + 1):
            if 2 * (2 * k - 1) == 2 * N:
                v = arb(0)
            else:
                v = (arb.cos_pi_fmpq(fmpq(2 * k - 1, 2 * N)) * scale).mid()
            vals.append(PrecScalar(v, precision))
    return NodeSet(N, tuple(vals), tuple(range(1, N + 1)), (), "chebyshev", precision, scale)


def psi_nodes(n: int, precision: int = DEFAULT_PRECISION) -> NodeSet:
    """psi_k = 2cos(2k pi/n) for k in (Z/n)^*/{+-1}, k increasing in 1..n/2.

    These are the roots of Phi_n^+. Residues in 1..n/2 sharing a factor with n
    are recorded in ``excluded``.
    """
    if n < 5:
        raise ValueError("psi_nodes requires n >= 5")
    ks = [k for k in range(1, n // 2 + 1) if math.gcd(k, n) == 1]
    excluded = tuple(k for k in range(1, n // 2 + 1) if math.gcd(k, n) != 1)
    with working_precision(precision):
        vals = tuple(PrecScalar((2 * arb.cos_pi_fmpq(fmpq(2 * k, n))).mid(), precision) for k in ks)
    return NodeSet(n, vals, tuple(ks), excluded, "psi_real", precision)


def roots_of_unity_nodes(n: int, precision: int = DEFAULT_PRECISION) -> NodeSet:
    """Primitive n-th roots of unity exp(2 pi i k/n), gcd(k, n) = 1, k increasing."""
    if n < 1:
        raise ValueError("n must be positive")
    ks = [k for k in range(1, n + 1) if math.gcd(k, n) == 1]
    with working_precision(precision):
        vals = tuple(PrecScalar(acb(arb.cos_pi_fmpq(fmpq(2 * k, n)), arb.sin_pi_fmpq(fmpq(2 * k, n))).mid(),
                                precision) for k in ks)
    return NodeSet(n, vals, tuple(ks), (), "roots_of_unity", precision)


# ---------------------------------------------------------------------------
# polynomial evaluation


def _round(values, bits):
    with working_precision(bits):
        return [v.mid() for v in values]


def _check_radius(v, bits) -> bool:
    if v.is_exact():
        return True
    mag = abs(v.mid())
    rad = v.rad()
    scale = mag if mag > 1 else arb(1)
    return bool(rad < scale * arb(2) ** (-bits - 2))


def evaluate_polynomials(polys: Sequence[IntPolynomial], nodes: NodeSet, precision: int | None = None):
    """Rows of values polys[j](node_i), evaluated from exact coefficients.

    Guard bits cover the coefficient height and node magnitude, and are
    doubled until every ball is tight enough to round to ``precision`` bits.
    """
    bits = precision or nodes.precision_bits
    fpolys = [fmpz_poly(list(p.coeffs)) for p in polys]
    max_deg = max((p.degree for p in polys), default=0)
    max_height = max((p.height() for p in polys), default=1)
    guard = GUARD_BITS + max_height.bit_length() + 2 * max(max_deg, 1)
    src = nodes.rebuild(bits + guard) if nodes.precision_bits < bits + guard else nodes
    for _ in range(8):
        with working_precision(bits + guard):
            rows = []
            ok = True
            for x in src.values():
                row = [f(x) for f in fpolys]
                ok = ok and all(_check_radius(v, bits) for v in row)
                rows.append(row)
        if ok:
            return [_round(r, bits) for r in rows]
        guard *= 2
        src = nodes.rebuild(bits + guard)
    raise ArithmeticError("polynomial evaluation did not reach %d bits" % bits)


def _chebyshev_values(nodes: NodeSet, count: int, bits: int):
    """For each node x, [R_0(x), ..., R_{count-1}(x)] by R_i = x R_{i-1} - R_{i-2}."""
    guard = GUARD_BITS + 2 * max(count, 1).bit_length()
    src = nodes.rebuild(bits + guard)
    for _ in range(8):
        out = []
        ok = True
        with working_precision(bits + guard):
            for x in src.values():
                vals = [arb(2), x]
                for _i in range(2, count):
                    vals.append(x * vals[-1] - vals[-2])
                vals = vals[:count]
                ok = ok and all(_check_radius(v, bits) for v in vals)
                out.append(vals)
        if ok:
            return out
        guard *= 2
        src = nodes.rebuild(bits + guard)
    raise ArithmeticError("recurrence evaluation did not reach %d bits" % bits)


def _family_rows(family: str, nodes: NodeSet, count: int, bits: int, method: str):
    """Values of R_i (family "R"), R_{i+1}^* ("Rstar") or r_i^* ("rstar"), i < count."""
    if method == "horner":
        polys = {
            "R": [scaled_R(i) for i in range(count)],
            "Rstar": [star_R(i + 1) for i in range(count)],
            "rstar": [reduced_r(i) for i in range(count)],
        }[family]
        return evaluate_polynomials(polys, nodes, bits)
    if method != "recurrence":
        raise ValueError("method must be 'recurrence' or 'horner'")
    R = _chebyshev_values(nodes, count + 1, bits)
    rows = []
    with working_precision(bits + GUARD_BITS):
        for vals in R:
            if family == "R":
                row = vals[:count]
            elif family == "Rstar":
                row = [vals[i] - 2 * half_angle_cos(i) for i in range(1, count + 1)]
            else:
                # r_i^* = R_i - r_{i-2}^*, r_0^* = 1, r_1^* = x
                row = []
                for i in range(count):
                    if i == 0:
                        row.append(arb(1))
                    elif i == 1:
                        row.append(vals[1])
                    else:
                        row.append(vals[i] - row[i - 2])
            rows.append(row)
    return [_round(r, bits) for r in rows]


# ---------------------------------------------------------------------------
# matrix builders


def vandermonde(nodes: NodeSet) -> PrecMatrix:
    """Row i is (1, t_i, t_i^2, ..., t_i^(m-1)) for the m nodes t_i."""
    if len(nodes) == 0:
        raise ValueError("empty node set")
    bits = nodes.precision_bits
    m = len(nodes)
    with working_precision(bits + GUARD_BITS):
        rows = []
        for x in nodes.values():
            row = [arb(1) if not isinstance(x, acb) else acb(1)]
            for _ in range(1, m):
                row.append(row[-1] * x)
            rows.append(row)
    with working_precision(bits):
        rows = [[v.mid() for v in r] for r in rows]
    return PrecMatrix.from_rows(rows, bits, source=lambda b: vandermonde(nodes.rebuild(b)))


def quasi_vandermonde(polys: Sequence[IntPolynomial], nodes: NodeSet) -> PrecMatrix:
    """Matrix (p_j(t_i)) with rows indexed by nodes, columns by polynomials."""
    rows = evaluate_polynomials(polys, nodes)
    return PrecMatrix.from_rows(rows, nodes.precision_bits,
                                source=lambda b: quasi_vandermonde(polys, nodes.rebuild(b)))


def tchebycheff_matrix(N: int, precision: int = DEFAULT_PRECISION) -> PrecMatrix:
    """V_N = (T_i(x_k)), rows k = 1..N, columns i = 0..N-1."""
    nodes = chebyshev_nodes(N, precision)
    with working_precision(precision + GUARD_BITS):
        rows = []
        for x in nodes.values():
            vals = [arb(1), x]
            for _ in range(2, N):
                vals.append(2 * x * vals[-1] - vals[-2])
            rows.append(vals[:N])
    return PrecMatrix.from_rows(_round_rows(rows, precision), precision,
                                source=lambda b: tchebycheff_matrix(N, b))


def _round_rows(rows, bits):
    with working_precision(bits):
        return [[v.mid() for v in r] for r in rows]


def kuian_matrix(N: int, precision: int = DEFAULT_PRECISION) -> PrecMatrix:
    """W_N = (P_i(x_k)) with P_0 = T_0/sqrt(pi), P_j = sqrt(2/pi) T_j."""
    nodes = chebyshev_nodes(N, precision)
    with working_precision(precision + GUARD_BITS):
        c0 = 1 / arb.pi().sqrt()
        c1 = (2 / arb.pi()).sqrt()
        rows = []
        for x in nodes.values():
            vals = [arb(1), x]
            for _ in range(2, N):
                vals.append(2 * x * vals[-1] - vals[-2])
            vals = vals[:N]
            rows.append([vals[0] * c0] + [v * c1 for v in vals[1:]])
    return PrecMatrix.from_rows(_round_rows(rows, precision), precision,
                                source=lambda b: kuian_matrix(N, b))


def kuian_reference(N: int, precision: int = DEFAULT_PRECISION) -> CondReport:
    """cond(W_N), which equals N exactly."""
    if N < 1:
        raise ValueError("N must be positive")
    return cond(kuian_matrix(N, precision), name="W_N").with_bounds(bound=N)


# ---------------------------------------------------------------------------
# Vandermonde conditioning


def cond_vandermonde_real(p: int, precision: int = DEFAULT_PRECISION) -> CondReport:
    """cond of the Vandermonde matrix on the roots of Phi_{4p}^+.

    Carries the exponential lower bound 2^((p-1)/2) for symmetric nodes.
    """
    _require_odd_prime(p)
    V = vandermonde(psi_nodes(4 * p, precision))
    return cond(V, name="V_Phi4p+", p=p).with_bounds(lower_bound=_pow2_half(p - 1))


def _pow2_half(k: int):
    """2^(k/2) exactly when k is even, otherwise at the current mpmath precision."""
    return 2 ** (k // 2) if k % 2 == 0 else mpmath.sqrt(2) ** k


def cond_vandermonde_chebyshev(p: int, precision: int = DEFAULT_PRECISION) -> CondReport:
    """cond of the Vandermonde matrix on cos((2k-1)pi/(2p)), k != (p+1)/2.

    These are the roots of Phi_{4p}^+ halved. The machine-precision figures
    commonly quoted for V_{Phi_{4p}^+} were evaluated on these nodes.
    """
    _require_odd_prime(p)
    nodes = chebyshev_nodes(p, precision).without([(p + 1) // 2])
    return cond(vandermonde(nodes), name="V_chebyshev", p=p).with_bounds(lower_bound=_pow2_half(p - 1))


def machine_precision_vandermonde_cond(p: int, nodes: str = "chebyshev") -> float:
    """Frobenius cond of the same Vandermonde matrix computed in IEEE double.

    Rounding saturates this near 1e16..1e20 once the true value exceeds the
    double range of reliable inversion; useful only to explain published
    double-precision figures.
    """
    import numpy as np

    ks = np.array([k for k in range(1, p + 1) if k != (p + 1) // 2])
    x = np.cos((2 * ks - 1) * np.pi / (2 * p))
    if nodes == "psi":
        x = 2 * x
    V = np.vander(x, p - 1, increasing=True)
    return float(np.linalg.cond(V, "fro"))


def cond_vandermonde_cyclotomic(n: int, precision: int = DEFAULT_PRECISION) -> CondReport:
    """cond of the Vandermonde matrix on the primitive n-th roots of unity.

    ``bound`` is 2 rad(n) n^(2^k+k+2) A(n) with k the number of primes dividing
    n; ``refined_bound`` is 4 phi(rad(n)) m^k, attached when k <= 3.
    """
    if n < 3:
        raise ValueError("n must be at least 3")
    V = vandermonde(roots_of_unity_nodes(n, precision))
    rep = cond(V, name="V_Phi_n")
    k = len(prime_factors(n))
    m = euler_phi(n)
    rad = radical(n)
    bound = 2 * rad * n ** (2 ** k + k + 2) * height_A(n)
    refined = 4 * euler_phi(rad) * m ** k if k <= 3 else None
    return rep.with_bounds(bound=bound, refined_bound=refined)


# ---------------------------------------------------------------------------
# the K_{4p}^+ chain


def r_vector(p: int) -> tuple[int, ...]:
    """Tail of the first row of C: r_i = -cos(i pi/2), i = 1..p-1."""
    return tuple(-half_angle_cos(i) for i in range(1, p))


def build_F(p: int) -> list[list[int]]:
    """Identity with -1 down the rest of the first column."""
    return [[1 if i == j else (-1 if j == 0 and i > 0 else 0) for j in range(p)] for i in range(p)]


def build_C(p: int) -> list[list[int]]:
    """Identity with r_vector(p) along the rest of the first row."""
    r = r_vector(p)
    return [[1 if i == j else (r[j - 1] if i == 0 and j > 0 else 0) for j in range(p)] for i in range(p)]


def _q_nodes(p: int, precision: int) -> NodeSet:
    """The p nodes 2x_k with the zero node (k = (p+1)/2) moved to the front."""
    full = chebyshev_nodes(p, precision, scale=2)
    z = (p + 1) // 2 - 1
    order = [z] + [i for i in range(p) if i != z]
    return NodeSet(p, tuple(full.nodes[i] for i in order), tuple(full.provenance[i] for i in order),
                   (), "chebyshev_q", precision, 2)


def build_Q4p(p: int, precision: int = DEFAULT_PRECISION, method: str = "recurrence") -> PrecMatrix:
    """Q_{4p} = (R_i(2x_k)), p x p, with the degenerate node 0 as the first row.

    The first row is (2cos(i pi/2))_i exactly.
    """
    _require_odd_prime(p)
    rows = _family_rows("R", _q_nodes(p, precision), p, precision, method)
    Q = PrecMatrix.from_rows(rows, precision, source=lambda b: build_Q4p(p, b, method))
    if Q.submatrix(0, 1, 0, p).tolist()[0] != [2 * half_angle_cos(i) for i in range(p)]:
        raise ArithmeticError("first row of Q_%d is not (2cos(i pi/2))" % (4 * p))
    return Q


@dataclass(frozen=True, eq=False)
class Factorization:
    """Q_{4p}, F, C, M_{4p} = F Q C = diag(2, N_{4p}) and N_{4p} = P U_{4p}.

    ``M4p`` is the structural block matrix built from exact polynomial values;
    ``residual_FQC`` measures how far the numerical product F Q C is from it,
    and ``residual_PU`` how far P U is from N.
    """

    p: int
    precision_bits: int
    Q4p: PrecMatrix
    F: PrecMatrix
    C: PrecMatrix
    M4p: PrecMatrix
    N4p: PrecMatrix
    P: PrecMatrix
    U4p: PrecMatrix
    epsilon: int
    r_vector: tuple[int, ...]
    residual_FQC: mpmath.mpf
    residual_PU: mpmath.mpf
    F_int: tuple[tuple[int, ...], ...] = field(repr=False, default=())
    C_int: tuple[tuple[int, ...], ...] = field(repr=False, default=())
    nodes: NodeSet | None = field(repr=False, default=None)

    @property
    def residual_tolerance(self) -> mpmath.mpf:
        return mpmath.ldexp(1, -(self.precision_bits // 2)) * self.p

    @cached_property
    def U_inverse(self):
        return invert(self.U4p)

    def to_json(self) -> dict:
        return {
            "p": self.p,
            "precision_bits": self.precision_bits,
            "convention": "rows: node 0 then 2cos((2k-1)pi/(2p)) for k != (p+1)/2 in increasing k; "
                          "columns: polynomial degree",
            "epsilon": self.epsilon,
            "r_vector": list(self.r_vector),
            "residual_FQC": mpmath.nstr(self.residual_FQC, 17),
            "residual_PU": mpmath.nstr(self.residual_PU, 17),
            "Q4p": self.Q4p.to_json(),
            "F": self.F.to_json(),
            "C": self.C.to_json(),
            "M4p": self.M4p.to_json(),
            "N4p": self.N4p.to_json(),
            "P": self.P.to_json(),
            "U4p": self.U4p.to_json(),
        }


def factorize(p: int, precision: int = DEFAULT_PRECISION, method: str = "recurrence") -> Factorization:
    """Build the full chain for K_{4p}^+ and cross-check both factorizations."""
    _require_odd_prime(p)
    Q = build_Q4p(p, precision, method)
    F_int = build_F(p)
    C_int = build_C(p)
    F = PrecMatrix.from_rows(F_int, precision)
    C = PrecMatrix.from_rows(C_int, precision)

    first = (Q @ C).submatrix(0, 1, 0, p).tolist()[0]
    if first != [2] + [0] * (p - 1):
        raise ArithmeticError("first row of Q C is not (2, 0, ..., 0)")

    nodes = psi_nodes(4 * p, precision)
    n_rows = _family_rows("Rstar", nodes, p - 1, precision, method)
    u_rows = _family_rows("rstar", nodes, p - 1, precision, method)
    N = PrecMatrix.from_rows(n_rows, precision)
    U = PrecMatrix.from_rows(u_rows, precision,
                             source=lambda b: factorize(p, b, method).U4p)
    M = PrecMatrix.from_rows([[2] + [0] * (p - 1)] + [[0] + r for r in n_rows], precision)
    P = PrecMatrix.diag(list(nodes.nodes), precision)

    residual_fqc = frobenius_norm(F @ Q @ C - M)
    residual_pu = frobenius_norm(P @ U - N)
    fact = Factorization(
        p=p, precision_bits=precision, Q4p=Q, F=F, C=C, M4p=M, N4p=N, P=P, U4p=U,
        epsilon=2 * half_angle_cos(p - 1), r_vector=r_vector(p),
        residual_FQC=residual_fqc, residual_PU=residual_pu,
        F_int=tuple(map(tuple, F_int)), C_int=tuple(map(tuple, C_int)), nodes=nodes,
    )
    tol = fact.residual_tolerance
    if residual_fqc >= tol or residual_pu >= tol:
        raise ArithmeticError("factorization residuals too large for p=%d: FQC=%s PU=%s"
                              % (p, mpmath.nstr(residual_fqc, 5), mpmath.nstr(residual_pu, 5)))
    return fact


def verify_bounds(p: int, precision: int = DEFAULT_PRECISION, fact: Factorization | None = None,
                  method: str = "recurrence") -> list[CondReport]:
    """Condition numbers of Q, N, U, F, C and V_p against their polynomial bounds."""
    _require_odd_prime(p)
    fact = fact or factorize(p, precision, method)
    two_p = 2 * p - 1
    reports = [
        cond(fact.Q4p, name="Q4p", p=p).with_bounds(bound=p * (p + 1)),
        cond(fact.N4p, name="N4p", p=p).with_bounds(bound=p * (p + 1) * two_p ** 2),
        cond(fact.U4p, name="U4p", p=p).with_bounds(bound=p ** 3 * (p + 1) * two_p ** 2),
        cond_exact(fact.F_int, precision, name="F", p=p).with_bounds(bound=two_p),
        cond_exact(fact.C_int, precision, name="C", p=p).with_bounds(bound=two_p),
        cond(tchebycheff_matrix(p, precision), name="V_N", p=p).with_bounds(bound=p * (p + 1)),
    ]
    return reports


def diagonal_norm_bounds(fact: Factorization) -> dict:
    """||P||_F against 2 sqrt(p) and ||P^-1||_F against p sqrt(p-1)/2."""
    p = fact.p
    with mpmath.workprec(fact.precision_bits):
        nodes = [s.to_mpmath() for s in fact.nodes.nodes]
        norm_p = mpmath.sqrt(mpmath.fsum(x ** 2 for x in nodes))
        norm_pinv = mpmath.sqrt(mpmath.fsum(1 / x ** 2 for x in nodes))
        bound_p = 2 * mpmath.sqrt(p)
        bound_pinv = p * mpmath.sqrt(p - 1) / 2
    return {
        "norm_P": norm_p,
        "bound_P": bound_p,
        "norm_P_inv": norm_pinv,
        "bound_P_inv": bound_pinv,
        "P_ok": bool(norm_p <= bound_p),
        "P_inv_ok": bool(norm_pinv <= bound_pinv) if p >= 5 else None,
    }


def transition_to_power_basis(p: int) -> list[list[int]]:
    """Column i holds the monomial coefficients of r_i^*, i = 0..p-2.

    Unit upper triangular; its determinant is checked to be exactly 1.
    """
    _require_odd_prime(p)
    m = p - 1
    T = coefficient_matrix([reduced_r(i) for i in range(m)], m)
    if fmpz_mat(T).det() != 1:
        raise ArithmeticError("transition matrix for p=%d is not unimodular" % p)
    return T


# ---------------------------------------------------------------------------
# conditioning table


# Published reference figures per prime: (cond of V_{Phi_{4p}^+}, cond of U_{4p}).
REFERENCE_TABLE = {
    13: ("1.43e4", "25.92"),
    101: ("1.06e19", "583.1"),
    127: ("1.35e19", "823.3"),
    257: ("6.89e23", "2374.05"),
    509: ("4.29e27", "18491.2"),
}
DEFAULT_TABLE_PRIMES = tuple(REFERENCE_TABLE)


@dataclass(frozen=True)
class TableRow:
    """One prime's conditioning figures.

    ``cond_V`` is the high-precision value on the psi nodes and is the
    authoritative one. ``cond_V_float64`` repeats the computation in IEEE
    double on the halved nodes, which is how the published V figures behave.
    ``v_flag`` is True when the reference V figure and ``cond_V`` differ by
    more than a factor of 10; ``u_rel_err`` compares ``cond_U`` with the
    reference U figure.
    """

    p: int
    degree: int
    bound_term: int
    cond_V: mpmath.mpf | None = None
    cond_V_precision: int | None = None
    cond_V_half: mpmath.mpf | None = None
    cond_V_float64: float | None = None
    cond_U: mpmath.mpf | None = None
    reference_V: str | None = None
    reference_U: str | None = None
    v_flag: bool | None = None
    u_rel_err: mpmath.mpf | None = None
    error: str | None = None

    CSV_HEADER = ("prime", "degree", "cond_V", "cond_V_half", "cond_V_float64", "cond_U", "bound_4p6",
                  "reference_V", "reference_U", "v_flag", "u_rel_err", "error")

    def to_dict(self) -> dict:
        from .mpnum import _fmt

        bits = self.cond_V_precision or DEFAULT_PRECISION
        return {
            "prime": self.p,
            "degree": self.degree,
            "cond_V": _fmt(self.cond_V, bits),
            "cond_V_precision": self.cond_V_precision,
            "cond_V_half": _fmt(self.cond_V_half, DEFAULT_PRECISION),
            "cond_V_float64": None if self.cond_V_float64 is None else repr(self.cond_V_float64),
            "cond_U": _fmt(self.cond_U, DEFAULT_PRECISION),
            "bound_4p6": str(self.bound_term),
            "reference_V": self.reference_V,
            "reference_U": self.reference_U,
            "v_flag": self.v_flag,
            "u_rel_err": None if self.u_rel_err is None else mpmath.nstr(self.u_rel_err, 6),
            "error": self.error,
        }

    def csv_row(self) -> tuple:
        d = self.to_dict()
        return tuple("" if d[k] is None else d[k] for k in
                     ("prime", "degree", "cond_V", "cond_V_half", "cond_V_float64", "cond_U", "bound_4p6",
                      "reference_V", "reference_U", "v_flag", "u_rel_err", "error"))


def table_row(p: int, precision: int = DEFAULT_PRECISION, half_scale: bool = False) -> TableRow:
    """Compute one row; numerical failures are recorded in ``error`` instead of raised."""
    _require_odd_prime(p)
    ref_v, ref_u = REFERENCE_TABLE.get(p, (None, None))
    row = dict(p=p, degree=p - 1, bound_term=4 * p ** 6, reference_V=ref_v, reference_U=ref_u)
    errors = []
    try:
        row["cond_V_float64"] = machine_precision_vandermonde_cond(p)
    except Exception as exc:  # numpy may overflow for large p
        errors.append("V_float64: %s" % exc)
    try:
        fact = factorize(p, precision)
        row["cond_U"] = cond(fact.U4p, name="U4p", p=p).cond
    except ArithmeticError as exc:
        errors.append("U: %s" % exc)
    try:
        rep = cond_vandermonde_real(p, precision)
        row["cond_V"], row["cond_V_precision"] = rep.cond, rep.precision_used
    except ArithmeticError as exc:
        errors.append("V: %s" % exc)
    if half_scale:
        try:
            row["cond_V_half"] = cond_vandermonde_chebyshev(p, precision).cond
        except ArithmeticError as exc:
            errors.append("V_half: %s" % exc)
    if ref_v is not None and row.get("cond_V") is not None:
        with mpmath.workprec(64):
            row["v_flag"] = bool(abs(mpmath.log10(row["cond_V"] / mpmath.mpf(ref_v))) > 1)
    if ref_u is not None and row.get("cond_U") is not None:
        with mpmath.workprec(64):
            row["u_rel_err"] = abs(row["cond_U"] / mpmath.mpf(ref_u) - 1)
    return TableRow(**row, error="; ".join(errors) or None)


def conditioning_table(primes: Sequence[int] = DEFAULT_TABLE_PRIMES, precision: int = DEFAULT_PRECISION,
                       half_scale: bool = False) -> list[TableRow]:
    return [table_row(p, precision, half_scale) for p in primes]
