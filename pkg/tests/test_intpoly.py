import json
import math
import random
from fractions import Fraction

import mpmath
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cyclocond.intpoly import (
    IntPolynomial,
    arithmetic_invariants,
    as_fraction_eval,
    chebyshev_T,
    cyclotomic,
    euler_phi,
    height_A,
    radical,
    real_cyclotomic,
    reduced_r,
    scaled_R,
    star_R,
)


def numeric_expand(roots, dps=60):
    """Oracle: expand prod (x - r) numerically and round coefficients to integers."""
    with mpmath.workdps(dps):
        coeffs = [mpmath.mpc(1)]
        for r in roots:
            nxt = [mpmath.mpc(0)] * (len(coeffs) + 1)
            for i, c in enumerate(coeffs):
                nxt[i + 1] += c
                nxt[i] -= c * r
            coeffs = nxt
        out = []
        for c in coeffs:
            assert abs(c.imag) < mpmath.mpf(10) ** (-dps // 2)
            v = int(mpmath.nint(c.real))
            assert abs(c.real - v) < mpmath.mpf(10) ** (-dps // 2)
            out.append(v)
        return out


def primitive_roots(n, dps=60):
    with mpmath.workdps(dps):
        return [mpmath.expjpi(mpmath.mpf(2 * k) / n) for k in range(1, n + 1) if math.gcd(k, n) == 1]


def real_roots(n, dps=60):
    with mpmath.workdps(dps):
        return [2 * mpmath.cos(2 * k * mpmath.pi / n) for k in range(1, n // 2 + 1) if math.gcd(k, n) == 1]


class TestIntPolynomial:
    def test_zero_has_degree_minus_one(self):
        assert IntPolynomial().degree == -1
        assert IntPolynomial([0, 0]).degree == -1

    def test_trailing_zeros_stripped(self):
        assert IntPolynomial([1, 2, 0, 0]).coeffs == (1, 2)

    def test_arithmetic(self):
        x = IntPolynomial.x()
        assert (x + 1) * (x - 1) == IntPolynomial([-1, 0, 1])
        assert (x + 1) ** 3 == IntPolynomial([1, 3, 3, 1])
        assert (x * x + 1).compose(x + 1) == IntPolynomial([2, 2, 1])

    def test_divmod(self):
        x = IntPolynomial.x()
        q, r = (x ** 3 + 2 * x + 5).divmod(x ** 2 + 1)
        assert q == x and r == IntPolynomial([5, 1])

    def test_divexact_rejects_remainder(self):
        with pytest.raises(ArithmeticError):
            IntPolynomial([1, 0, 1]).divexact(IntPolynomial([1, 1]))

    def test_str(self):
        assert str(IntPolynomial([1, 0, -8, 0, 8])) == "8*x^4 - 8*x^2 + 1"

    def test_json_roundtrip_bigints(self):
        p = IntPolynomial([3 ** 200, -1, 0, 7])
        data = json.loads(json.dumps(p.to_json()))
        assert all(isinstance(c, str) for c in data["coeffs"])
        assert IntPolynomial.from_json(data) == p


class TestArithmetic:
    def test_radical_phi(self):
        assert radical(12) == 6
        assert euler_phi(52) == 24
        assert radical(1) == 1

    @pytest.mark.parametrize("n", range(1, 200))
    def test_phi_matches_gcd_count(self, n):
        assert euler_phi(n) == sum(1 for j in range(1, n + 1) if math.gcd(j, n) == 1)

    def test_invariants_record(self):
        inv = arithmetic_invariants(105)
        assert (inv.phi_n, inv.rad_n, inv.A_n, inv.k) == (48, 105, 2, 3)


class TestCyclotomic:
    def test_small(self):
        assert cyclotomic(1) == IntPolynomial([-1, 1])
        assert cyclotomic(2) == IntPolynomial([1, 1])
        assert cyclotomic(12) == IntPolynomial([1, 0, -1, 0, 1])

    def test_rejects_zero(self):
        with pytest.raises(ValueError):
            cyclotomic(0)

    @pytest.mark.parametrize("n", [3, 5, 8, 12, 15, 20, 21, 30, 36, 42])
    def test_against_numeric_root_expansion(self, n):
        assert list(cyclotomic(n).coeffs) == numeric_expand(primitive_roots(n))

    def test_heights(self):
        assert height_A(12) == 1
        assert height_A(2) == 1
        assert height_A(105) == 2

    @pytest.mark.parametrize("n", [1, 7, 30, 64, 105, 128])
    def test_monic_and_divides(self, n):
        phi = cyclotomic(n)
        assert phi.is_monic() and phi.degree == euler_phi(n)
        xn = IntPolynomial([-1] + [0] * (n - 1) + [1])
        assert (xn % phi).is_zero()


class TestChebyshev:
    def test_values(self):
        assert chebyshev_T(0) == IntPolynomial([1])
        assert chebyshev_T(2) == IntPolynomial([-1, 0, 2])
        assert chebyshev_T(4) == IntPolynomial([1, 0, -8, 0, 8])

    def test_T4_against_cosine(self):
        with mpmath.workdps(40):
            theta = mpmath.pi / 7
            assert abs(chebyshev_T(4)(mpmath.cos(theta)) - mpmath.cos(4 * theta)) < mpmath.mpf(10) ** -35

    @pytest.mark.parametrize("i", range(1, 30))
    def test_leading_coefficient(self, i):
        assert chebyshev_T(i).leading == 2 ** (i - 1) and chebyshev_T(i).degree == i


class TestScaledFamilies:
    def test_scaled_R(self):
        assert scaled_R(0) == IntPolynomial([2])
        assert scaled_R(1) == IntPolynomial([0, 1])
        assert scaled_R(2) == IntPolynomial([-2, 0, 1])

    def test_R2_identity_at_two(self):
        z = Fraction(2)
        assert z ** 2 + 1 / z ** 2 == as_fraction_eval(scaled_R(2), z + 1 / z) == Fraction(17, 4)

    def test_star_R(self):
        assert star_R(1) == IntPolynomial([0, 1])
        assert star_R(2) == IntPolynomial([0, 0, 1])
        assert star_R(4) == IntPolynomial([0, 0, -4, 0, 1])
        with pytest.raises(ValueError):
            star_R(0)

    def test_reduced_r(self):
        assert reduced_r(0) == IntPolynomial([1])
        assert reduced_r(1) == IntPolynomial([0, 1])
        assert reduced_r(3) == IntPolynomial([0, -4, 0, 1])

    @pytest.mark.parametrize("i", range(0, 65))
    def test_constant_term_parity(self, i):
        expected = 0 if i % 2 else (2 if i % 4 == 0 else -2)
        assert scaled_R(i).constant_term == expected

    @pytest.mark.parametrize("i", range(1, 65))
    def test_star_and_reduced(self, i):
        s = star_R(i)
        assert s.constant_term == 0 and s.is_monic() and s.degree == i
        assert reduced_r(i - 1) * IntPolynomial.x() == s

    @pytest.mark.parametrize("i", range(2, 65))
    def test_reduced_r_recurrence(self, i):
        # r_i^* = R_i - r_{i-2}^*, used by the fast evaluation route
        assert reduced_r(i) == scaled_R(i) - reduced_r(i - 2)

    def test_R_matches_three_term_recurrence(self):
        x = IntPolynomial.x()
        a, b = IntPolynomial([2]), x
        for i in range(2, 65):
            a, b = b, x * b - a
            assert scaled_R(i) == b

    @pytest.mark.parametrize("i", range(0, 65))
    def test_chebyshev_definitions_agree(self, i):
        rng = random.Random(i)
        prec = 200
        for _ in range(20):
            with mpmath.workprec(prec):
                x = mpmath.cos(mpmath.mpf(rng.random()) * mpmath.pi)
            # the monomial form cancels about i bits, so evaluate it with guard bits
            with mpmath.workprec(prec + 2 * i + 16):
                algebraic = chebyshev_T(i)(x)
                trig = mpmath.cos(i * mpmath.acos(x))
            assert abs(algebraic - trig) < mpmath.ldexp(1, -(prec - 8))


@settings(max_examples=100, deadline=None)
@given(num=st.integers(-10 ** 6, 10 ** 6).filter(lambda v: v != 0), den=st.integers(1, 10 ** 6),
       i=st.integers(0, 64))
def test_symmetric_power_identity(num, den, i):
    z = Fraction(num, den)
    assert z ** i + z ** (-i) == as_fraction_eval(scaled_R(i), z + 1 / z)


class TestRealCyclotomic:
    def test_examples(self):
        assert real_cyclotomic(12) == IntPolynomial([-3, 0, 1])
        assert real_cyclotomic(8) == IntPolynomial([-2, 0, 1])
        assert real_cyclotomic(20) == IntPolynomial([5, 0, -5, 0, 1])

    @pytest.mark.parametrize("n", [8, 12, 20, 28, 36, 52])
    def test_against_numeric_expansion(self, n):
        assert list(real_cyclotomic(n).coeffs) == numeric_expand(real_roots(n))

    def test_rejects_small_n(self):
        with pytest.raises(ValueError):
            real_cyclotomic(4)

    @pytest.mark.parametrize("n", [8, 12, 20, 52, 404])
    def test_vanishes_at_nodes(self, n):
        f = real_cyclotomic(n)
        assert f.degree == euler_phi(n) // 2 and f.is_monic()
        with mpmath.workprec(128):
            for k in range(1, n):
                if math.gcd(k, n) == 1:
                    v = f(2 * mpmath.cos(2 * k * mpmath.pi / n))
                    # Horner rounding is relative to the size of the partial sums
                    scale = sum(abs(c) * 2 ** j for j, c in enumerate(f.coeffs))
                    assert abs(v) < mpmath.ldexp(1, -100) * max(f.height(), scale * 2 ** -20)

    @pytest.mark.parametrize("n", [8, 12, 20, 52, 404])
    def test_palindromic_lift(self, n):
        # x^m Phi_n^+(x + 1/x) = Phi_n(x), with denominators cleared
        f = real_cyclotomic(n)
        m = f.degree
        x = IntPolynomial.x()
        lifted = IntPolynomial()
        for j, b in enumerate(f.coeffs):
            lifted = lifted + (x * x + 1) ** j * x ** (m - j) * b
        assert lifted == cyclotomic(n)


def test_high_degree_without_recursion_limit():
    # cold cache, degree well past the default recursion limit
    r = reduced_r(1500)
    assert r.degree == 1500 and r.is_monic()
    assert chebyshev_T(1200).leading == 2 ** 1199
