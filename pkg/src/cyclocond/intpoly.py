"""Exact integer polynomials and the polynomial families used throughout.

Everything here is exact: coefficients are Python ints, no floating point is
involved. Families provided:

* ``cyclotomic(n)``       -- Phi_n(x)
* ``real_cyclotomic(n)``  -- Phi_n^+(y), minimal polynomial of 2cos(2pi/n)
* ``chebyshev_T(i)``      -- T_i(x)
* ``scaled_R(i)``         -- R_i(x) = 2 T_i(x/2)
* ``star_R(i)``           -- R_i^*(x) = R_i(x) - cos(i pi/2) R_0(x)
* ``reduced_r(i)``        -- r_i^*(x) = R_{i+1}^*(x) / x
"""

from __future__ import annotations

import json
import math
import threading
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Sequence

__all__ = [
    "IntPolynomial",
    "ArithmeticInvariants",
    "cyclotomic",
    "height_A",
    "radical",
    "euler_phi",
    "prime_factors",
    "arithmetic_invariants",
    "chebyshev_T",
    "scaled_R",
    "star_R",
    "reduced_r",
    "real_cyclotomic",
    "half_angle_cos",
]


@dataclass(frozen=True)
class IntPolynomial:
    """Polynomial with arbitrary-precision integer coefficients.

    ``coeffs[i]`` is the coefficient of ``x**i``. Trailing zeros are stripped
    on construction, so the zero polynomial has ``coeffs == ()`` and degree -1.
    """

    coeffs: tuple[int, ...]

    def __init__(self, coeffs: Iterable[int] = ()):
        c = [int(v) for v in coeffs]
        while c and c[-1] == 0:
            c.pop()
        object.__setattr__(self, "coeffs", tuple(c))

    @classmethod
    def x(cls) -> IntPolynomial:
        return cls((0, 1))

    @classmethod
    def constant(cls, c: int) -> IntPolynomial:
        return cls((c,))

    @classmethod
    def monomial(cls, k: int, c: int = 1) -> IntPolynomial:
        return cls([0] * k + [c])

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    @property
    def leading(self) -> int:
        return self.coeffs[-1] if self.coeffs else 0

    @property
    def constant_term(self) -> int:
        return self.coeffs[0] if self.coeffs else 0

    def is_zero(self) -> bool:
        return not self.coeffs

    def is_monic(self) -> bool:
        return self.leading == 1

    def height(self) -> int:
        """Largest coefficient in absolute value (0 for the zero polynomial)."""
        return max((abs(c) for c in self.coeffs), default=0)

    def __getitem__(self, i: int) -> int:
        return self.coeffs[i] if 0 <= i < len(self.coeffs) else 0

    def __len__(self) -> int:
        return len(self.coeffs)

    def __iter__(self):
        return iter(self.coeffs)

    # arithmetic

    def __add__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return other
        n = max(len(self), len(other))
        return IntPolynomial(self[i] + other[i] for i in range(n))

    __radd__ = __add__

    def __neg__(self) -> IntPolynomial:
        return IntPolynomial(-c for c in self.coeffs)

    def __sub__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, int):
            return IntPolynomial(c * other for c in self.coeffs)
        other = _coerce(other)
        if other is NotImplemented:
            return other
        if self.is_zero() or other.is_zero():
            return IntPolynomial()
        out = [0] * (len(self) + len(other) - 1)
        for i, a in enumerate(self.coeffs):
            if a:
                for j, b in enumerate(other.coeffs):
                    out[i + j] += a * b
        return IntPolynomial(out)

    __rmul__ = __mul__

    def __pow__(self, k: int) -> IntPolynomial:
        if k < 0:
            raise ValueError("negative exponent")
        result, base = IntPolynomial((1,)), self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def divmod(self, divisor: IntPolynomial) -> tuple[IntPolynomial, IntPolynomial]:
        """Long division by a polynomial with leading coefficient +-1."""
        if divisor.is_zero():
            raise ZeroDivisionError("division by the zero polynomial")
        lead = divisor.leading
        if lead not in (1, -1):
            raise ValueError("divisor must have leading coefficient +-1 for integer division")
        rem = list(self.coeffs)
        dd = divisor.degree
        if len(rem) - 1 < dd:
            return IntPolynomial(), self
        quot = [0] * (len(rem) - dd)
        dc = divisor.coeffs
        for k in range(len(rem) - 1, dd - 1, -1):
            c = rem[k] * lead
            if c:
                quot[k - dd] = c
                off = k - dd
                for j in range(dd + 1):
                    rem[off + j] -= c * dc[j]
        return IntPolynomial(quot), IntPolynomial(rem[:dd])

    def __mod__(self, divisor: IntPolynomial) -> IntPolynomial:
        return self.divmod(divisor)[1]

    def divexact(self, divisor: IntPolynomial) -> IntPolynomial:
        """Exact quotient; raises ArithmeticError when the division leaves a remainder."""
        if divisor.degree == 0:
            d = divisor.leading
            if any(c % d for c in self.coeffs):
                raise ArithmeticError("inexact division by constant %d" % d)
            return IntPolynomial(c // d for c in self.coeffs)
        q, r = self.divmod(divisor)
        if not r.is_zero():
            raise ArithmeticError("inexact polynomial division")
        return q

    def shift_down(self) -> IntPolynomial:
        """Divide by x; the constant term must vanish."""
        if self.constant_term != 0:
            raise ArithmeticError("polynomial has nonzero constant term; not divisible by x")
        return IntPolynomial(self.coeffs[1:])

    def compose(self, inner: IntPolynomial) -> IntPolynomial:
        result = IntPolynomial()
        for c in reversed(self.coeffs):
            result = result * inner + c
        return result

    def __call__(self, x):
        """Horner evaluation; works for int, Fraction, mpmath and flint scalars."""
        acc = 0 * x
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def __eq__(self, other) -> bool:
        if isinstance(other, int):
            other = IntPolynomial((other,))
        if not isinstance(other, IntPolynomial):
            return NotImplemented
        return self.coeffs == other.coeffs

    def __hash__(self) -> int:
        return hash(self.coeffs)

    def __repr__(self) -> str:
        return "IntPolynomial(%r)" % (list(self.coeffs),)

    def __str__(self) -> str:
        if self.is_zero():
            return "0"
        terms = []
        for k in range(self.degree, -1, -1):
            c = self.coeffs[k]
            if not c:
                continue
            sign = "-" if c < 0 else "+"
            a = abs(c)
            if k == 0:
                body = str(a)
            else:
                mono = "x" if k == 1 else "x^%d" % k
                body = mono if a == 1 else "%d*%s" % (a, mono)
            terms.append((sign, body))
        first_sign, first = terms[0]
        out = ("-" if first_sign == "-" else "") + first
        for sign, body in terms[1:]:
            out += " %s %s" % (sign, body)
        return out

    # serialization

    def to_json(self) -> dict:
        return {"coeffs": [str(c) for c in self.coeffs]}

    @classmethod
    def from_json(cls, data: dict | str) -> IntPolynomial:
        if isinstance(data, str):
            data = json.loads(data)
        return cls(int(c) for c in data["coeffs"])


def _coerce(value):
    if isinstance(value, IntPolynomial):
        return value
    if isinstance(value, int):
        return IntPolynomial((value,))
    return NotImplemented


# ---------------------------------------------------------------------------
# arithmetic functions


def prime_factors(n: int) -> list[int]:
    """Distinct prime divisors of n in increasing order (trial division)."""
    if n < 1:
        raise ValueError("n must be positive")
    out, d = [], 2
    while d * d <= n:
        if n % d == 0:
            out.append(d)
            while n % d == 0:
                n //= d
        d += 1 if d == 2 else 2
    if n > 1:
        out.append(n)
    return out


def radical(n: int) -> int:
    return math.prod(prime_factors(n))


def euler_phi(n: int) -> int:
    result = n
    for q in prime_factors(n):
        result = result // q * (q - 1)
    return result


def _divisors(n: int) -> list[int]:
    small = [d for d in range(1, math.isqrt(n) + 1) if n % d == 0]
    return sorted(set(small + [n // d for d in small]))


@lru_cache(maxsize=None)
def cyclotomic(n: int) -> IntPolynomial:
    """The n-th cyclotomic polynomial.

    Computed as (x^n - 1) divided exactly by Phi_d for every proper divisor d.
    """
    if not isinstance(n, int) or n < 1:
        raise ValueError("cyclotomic index must be a positive integer, got %r" % (n,))
    poly = IntPolynomial([-1] + [0] * (n - 1) + [1])
    for d in _divisors(n)[:-1]:
        poly = poly.divexact(cyclotomic(d))
    return poly


def height_A(n: int) -> int:
    """Maximum absolute coefficient of Phi_n."""
    return cyclotomic(n).height()


@dataclass(frozen=True)
class ArithmeticInvariants:
    n: int
    phi_n: int
    rad_n: int
    A_n: int
    k: int


def arithmetic_invariants(n: int) -> ArithmeticInvariants:
    return ArithmeticInvariants(
        n=n, phi_n=euler_phi(n), rad_n=radical(n), A_n=height_A(n), k=len(prime_factors(n))
    )


# ---------------------------------------------------------------------------
# Chebyshev families


_CHEBYSHEV: list[IntPolynomial] = [IntPolynomial((1,)), IntPolynomial((0, 1))]
_CHEBYSHEV_LOCK = threading.Lock()


def chebyshev_T(i: int) -> IntPolynomial:
    """T_i via T_{i+1} = 2x T_i - T_{i-1}, cached iteratively."""
    if i < 0:
        raise ValueError("degree must be nonnegative")
    if i < len(_CHEBYSHEV):
        return _CHEBYSHEV[i]
    with _CHEBYSHEV_LOCK:
        two_x = IntPolynomial((0, 2))
        while len(_CHEBYSHEV) <= i:
            _CHEBYSHEV.append(two_x * _CHEBYSHEV[-1] - _CHEBYSHEV[-2])
    return _CHEBYSHEV[i]


def half_angle_cos(i: int) -> int:
    """cos(i*pi/2) as an exact integer in {-1, 0, 1}."""
    return (1, 0, -1, 0)[i % 4]


@lru_cache(maxsize=None)
def scaled_R(i: int) -> IntPolynomial:
    """R_i(x) = 2*T_i(x/2), an integer polynomial, monic for i >= 1.

    Its constant term is 2*cos(i*pi/2): 0 for odd i, +2 for i = 0 mod 4 and
    -2 for i = 2 mod 4.
    """
    t = chebyshev_T(i)
    out = []
    for k, c in enumerate(t.coeffs):
        num = 2 * c
        q, r = divmod(num, 1 << k)
        if r:
            raise ArithmeticError("2*T_%d(x/2) has a non-integral coefficient at x^%d" % (i, k))
        out.append(q)
    poly = IntPolynomial(out)
    if poly.constant_term != 2 * half_angle_cos(i):
        raise ArithmeticError("R_%d(0) != 2cos(%d*pi/2)" % (i, i))
    return poly


@lru_cache(maxsize=None)
def star_R(i: int) -> IntPolynomial:
    """R_i^*(x) = R_i(x) - cos(i*pi/2) R_0(x): monic, degree i, zero constant term."""
    if i < 1:
        raise ValueError("star_R is defined for i >= 1")
    poly = scaled_R(i) - 2 * half_angle_cos(i)
    if poly.constant_term != 0 or not poly.is_monic() or poly.degree != i:
        raise ArithmeticError("R_%d^* is not monic of degree %d without constant term" % (i, i))
    return poly


@lru_cache(maxsize=None)
def reduced_r(i: int) -> IntPolynomial:
    """r_i^*(x) = R_{i+1}^*(x) / x, monic of degree i."""
    if i < 0:
        raise ValueError("degree must be nonnegative")
    return star_R(i + 1).shift_down()


# ---------------------------------------------------------------------------
# maximal real subfield


@lru_cache(maxsize=None)
def real_cyclotomic(n: int) -> IntPolynomial:
    """Minimal polynomial of 2cos(2*pi/n), of degree phi(n)/2.

    Uses the palindromic symmetry of Phi_n together with
    x^j + x^-j = R_j(x + 1/x); integer arithmetic only.
    """
    if not isinstance(n, int) or n <= 4:
        raise ValueError("real_cyclotomic requires n >= 5, got %r" % (n,))
    c = cyclotomic(n).coeffs
    if c != c[::-1]:
        raise ArithmeticError("Phi_%d is not palindromic" % n)
    m = (len(c) - 1) // 2
    poly = IntPolynomial((c[m],))
    for j in range(1, m + 1):
        poly = poly + scaled_R(j) * c[m + j]
    return poly


def as_fraction_eval(poly: IntPolynomial, z: Fraction) -> Fraction:
    """Exact rational evaluation (Horner over Fractions)."""
    acc = Fraction(0)
    for c in reversed(poly.coeffs):
        acc = acc * z + c
    return acc


def coefficient_matrix(polys: Sequence[IntPolynomial], size: int) -> list[list[int]]:
    """Column i holds the coefficients of polys[i] in the monomial basis."""
    return [[polys[i][j] for i in range(len(polys))] for j in range(size)]
