import json
import math
import random

import mpmath
import pytest

from cyclocond.construct import (
    build_C,
    build_F,
    build_Q4p,
    chebyshev_nodes,
    cond_vandermonde_chebyshev,
    cond_vandermonde_cyclotomic,
    cond_vandermonde_real,
    diagonal_norm_bounds,
    factorize,
    is_odd_prime,
    kuian_reference,
    machine_precision_vandermonde_cond,
    psi_nodes,
    quasi_vandermonde,
    r_vector,
    table_row,
    tchebycheff_matrix,
    transition_to_power_basis,
    vandermonde,
    verify_bounds,
)
from cyclocond.intpoly import IntPolynomial, reduced_r, scaled_R
from cyclocond.mpnum import PrecMatrix, cond, cond_exact, frobenius_norm, invert

SMALL_PRIMES = [3, 5, 7, 11, 13, 17, 19, 23]
PRIMES_TO_101 = [p for p in range(5, 102) if is_odd_prime(p)]
TOL = mpmath.ldexp(1, -240)


def close(a, b, tol=TOL):
    with mpmath.workprec(300):
        return abs(a - b) <= tol * max(1, abs(b))


class TestNodes:
    def test_chebyshev_small(self):
        with mpmath.workprec(256):
            v = chebyshev_nodes(3).to_mpmath()
            assert close(v[0], mpmath.sqrt(3) / 2) and abs(v[1]) < TOL and close(v[2], -mpmath.sqrt(3) / 2)
            assert abs(chebyshev_nodes(1).to_mpmath()[0]) < TOL
            v = chebyshev_nodes(2).to_mpmath()
            assert close(v[0], mpmath.sqrt(2) / 2) and close(v[1], -mpmath.sqrt(2) / 2)

    @pytest.mark.parametrize("N", [1, 2, 7, 40])
    def test_chebyshev_strictly_decreasing(self, N):
        v = chebyshev_nodes(N).to_mpmath()
        assert all(a > b for a, b in zip(v, v[1:]))

    def test_psi_small(self):
        with mpmath.workprec(256):
            ns = psi_nodes(12)
            assert ns.provenance == (1, 5)
            v = ns.to_mpmath()
            assert close(v[0], mpmath.sqrt(3)) and close(v[1], -mpmath.sqrt(3))
            v = psi_nodes(8).to_mpmath()
            assert close(v[0], mpmath.sqrt(2)) and close(v[1], -mpmath.sqrt(2))

    @pytest.mark.parametrize("n", [8, 12, 20, 36, 52, 404])
    def test_psi_symmetric_when_4_divides(self, n):
        v = sorted(psi_nodes(n).to_mpmath())
        assert all(close(a + b, 0) for a, b in zip(v, reversed(v)))

    @pytest.mark.parametrize("p", PRIMES_TO_101)
    def test_psi_equals_doubled_chebyshev(self, p):
        psi = psi_nodes(4 * p).to_mpmath()
        cheb = chebyshev_nodes(p)
        assert (p + 1) // 2 in range(1, p + 1)
        zero = cheb.to_mpmath()[(p + 1) // 2 - 1]
        assert abs(zero) < mpmath.ldexp(1, -248)
        with mpmath.workprec(300):
            doubled = [2 * x for x in cheb.without([(p + 1) // 2]).to_mpmath()]
            assert len(psi) == len(doubled) == p - 1
            tol = mpmath.ldexp(1, -(256 - 8))
            # same order too: increasing k on both sides
            assert all(abs(a - b) <= tol for a, b in zip(psi, doubled))


class TestVandermonde:
    def test_shapes(self):
        ns = psi_nodes(12)
        V = vandermonde(ns)
        assert V.shape == (2, 2)
        W = vandermonde(chebyshev_nodes(1))
        assert W.tolist() == [[1]]

    def test_pm_one(self):
        from cyclocond.construct import NodeSet
        from cyclocond.mpnum import PrecScalar
        ns = NodeSet(0, (PrecScalar.of(1), PrecScalar.of(-1)), (0, 1), (), "chebyshev", 256)
        assert vandermonde(ns).tolist() == [[1, 1], [1, -1]]

    @pytest.mark.parametrize("l", range(2, 7))
    def test_scaled_isometry(self, l):
        n = 2 ** l
        rep = cond_vandermonde_cyclotomic(n)
        assert close(rep.cond, n // 2, mpmath.ldexp(1, -200))

    def test_n12_refined(self):
        rep = cond_vandermonde_cyclotomic(12)
        assert rep.refined_bound == 128 and rep.refined_bound_satisfied and rep.bound_satisfied

    @pytest.mark.parametrize("n", [9, 15, 21, 30])
    def test_general_bound(self, n):
        assert cond_vandermonde_cyclotomic(n).bound_satisfied

    def test_against_mpmath_oracle(self):
        p = 7
        with mpmath.workdps(80):
            x = [2 * mpmath.cos(2 * k * mpmath.pi / 28) for k in range(1, 14) if math.gcd(k, 28) == 1]
            V = mpmath.matrix([[xi ** j for j in range(len(x))] for xi in x])
            expected = mpmath.mnorm(V, "f") * mpmath.mnorm(V ** -1, "f")
            assert close(cond_vandermonde_real(p).cond, expected, mpmath.ldexp(1, -200))

    @pytest.mark.parametrize("p", [5, 7, 11, 13, 29])
    def test_gautschi(self, p):
        rep = cond_vandermonde_real(p)
        assert rep.lower_bound_satisfied

    def test_half_scale_convention(self):
        assert abs(cond_vandermonde_chebyshev(13).cond / mpmath.mpf("1.43e4") - 1) < 0.02

    def test_machine_emulation_is_finite(self):
        assert 1e4 < machine_precision_vandermonde_cond(13) < 1e5


class TestQuasiVandermonde:
    def test_evaluate_polynomials_matches_mpmath(self):
        polys = [scaled_R(i) for i in range(9)]
        ns = psi_nodes(36)
        M = quasi_vandermonde(polys, ns).tolist()
        with mpmath.workprec(400):
            for r, x in zip(M, ns.to_mpmath()):
                for i, v in enumerate(r):
                    assert abs(v - polys[i](x)) < mpmath.ldexp(1, -240)

    @pytest.mark.parametrize("seed", range(6))
    def test_random_monic_family_invertible(self, seed):
        rng = random.Random(seed)
        p = rng.choice([5, 7, 11, 13])
        m = p - 1
        polys = [IntPolynomial([rng.randint(-5, 5) for _ in range(i)] + [1]) for i in range(m)]
        A = quasi_vandermonde(polys, psi_nodes(4 * p))
        res = invert(A)
        assert res.residual < mpmath.ldexp(1, -res.precision_used // 2)

    @pytest.mark.parametrize("p", [5, 13, 31, 61])
    def test_scalar_surgery(self, p):
        Rm = quasi_vandermonde([scaled_R(i) for i in range(p)], psi_nodes_with_zero(p))
        assert close(cond(Rm).cond, cond(tchebycheff_matrix(p)).cond, mpmath.ldexp(1, -128))

    @pytest.mark.parametrize("N", [1, 2, 3, 10, 40])
    def test_kuian(self, N):
        assert close(kuian_reference(N).cond, N, mpmath.ldexp(1, -200))

    @pytest.mark.parametrize("N", [2, 5, 17, 50])
    def test_tchebycheff_bound(self, N):
        assert cond(tchebycheff_matrix(N)).cond <= N * (N + 1)


def psi_nodes_with_zero(p):
    from cyclocond.construct import _q_nodes
    return _q_nodes(p, 256)


class TestFactorization:
    def test_p3(self):
        f = factorize(3)
        with mpmath.workprec(256):
            s3 = mpmath.sqrt(3)
            U = f.U4p.tolist()
            assert U[0][0] == 1 and U[1][0] == 1
            assert close(U[0][1], s3) and close(U[1][1], -s3)
            Q = f.Q4p.tolist()
            assert Q[0] == [2, 0, -2]
            assert close(Q[1][1], s3) and close(Q[1][2], 1) and close(Q[2][1], -s3)
        assert f.epsilon == -2

    def test_epsilon(self):
        assert factorize(5).epsilon == 2
        assert factorize(3).epsilon == -2
        assert factorize(13).epsilon == 2
        assert factorize(7).epsilon == -2

    @pytest.mark.parametrize("p", SMALL_PRIMES)
    def test_first_row(self, p):
        row = build_Q4p(p).tolist()[0]
        assert row == [2 * round(math.cos(i * math.pi / 2)) for i in range(p)]

    @pytest.mark.parametrize("p", SMALL_PRIMES)
    def test_F_C_structure(self, p):
        F, C = build_F(p), build_C(p)
        assert cond_exact(F).size == p
        from flint import fmpz_mat
        assert fmpz_mat(F).det() == 1 and fmpz_mat(C).det() == 1
        assert [F[i][0] for i in range(1, p)] == [-1] * (p - 1)
        assert tuple(C[0][1:]) == r_vector(p)
        assert r_vector(p)[:4] == (0, 1, 0, -1)[: p - 1]

    @pytest.mark.parametrize("p", SMALL_PRIMES + [101])
    def test_block_structure_and_residuals(self, p):
        f = factorize(p)
        M = f.M4p.tolist()
        assert M[0][0] == 2
        assert all(v == 0 for v in M[0][1:]) and all(M[i][0] == 0 for i in range(1, p))
        tol = mpmath.ldexp(1, -128) * p
        assert f.residual_FQC < tol and f.residual_PU < tol

    @pytest.mark.parametrize("p", [5, 13, 31])
    def test_U_entries_from_exact_polynomials(self, p):
        f = factorize(p)
        U = f.U4p.tolist()
        with mpmath.workprec(600):
            xs = [2 * mpmath.cos((2 * k - 1) * mpmath.pi / (2 * p)) for k in range(1, p + 1) if k != (p + 1) // 2]
            for r, x in zip(U, xs):
                for i, v in enumerate(r):
                    assert abs(v - reduced_r(i)(x)) < mpmath.ldexp(1, -240) * max(1, abs(v))

    def test_evaluation_routes_agree(self):
        a = factorize(31, method="recurrence").U4p
        b = factorize(31, method="horner").U4p
        assert frobenius_norm(a - b) < mpmath.ldexp(1, -230)

    def test_json(self):
        d = json.loads(json.dumps(factorize(5).to_json()))
        assert d["epsilon"] == 2 and d["r_vector"] == [0, 1, 0, -1]
        assert d["U4p"]["precision_bits"] == 256
        assert "convention" in d
        U = PrecMatrix.from_json(d["U4p"])
        assert U.tolist() == factorize(5).U4p.tolist()

    @pytest.mark.parametrize("p", [5, 7, 13, 47])
    def test_norm_P(self, p):
        nb = diagonal_norm_bounds(factorize(p))
        assert nb["P_ok"] and nb["P_inv_ok"]

    def test_norm_P_inverse_not_claimed_for_p3(self):
        assert diagonal_norm_bounds(factorize(3))["P_inv_ok"] is None

    def test_rejects_non_prime(self):
        for bad in (1, 2, 4, 9, 15):
            with pytest.raises(ValueError):
                factorize(bad)


class TestVerifyBounds:
    def test_p13(self):
        reps = verify_bounds(13)
        assert [r.name for r in reps] == ["Q4p", "N4p", "U4p", "F", "C", "V_N"]
        assert all(r.bound_satisfied for r in reps)
        u = reps[2]
        assert abs(u.cond / mpmath.mpf("25.92") - 1) < 0.01
        assert u.bound == 13 ** 3 * 14 * 25 ** 2

    def test_F_C_exact_values(self):
        reps = {r.name: r for r in verify_bounds(13)}
        assert reps["F"].cond == 25
        assert reps["C"].cond == 19

    @pytest.mark.parametrize("p", [5, 7, 11, 17, 29, 53])
    def test_all_bounds(self, p):
        assert all(r.all_satisfied for r in verify_bounds(p))

    def test_p101_U(self):
        reps = verify_bounds(101)
        assert abs(reps[2].cond / mpmath.mpf("583.1") - 1) < 0.01


class TestTransition:
    def test_p3(self):
        assert transition_to_power_basis(3) == [[1, 0], [0, 1]]

    def test_p5(self):
        assert transition_to_power_basis(5) == [[1, 0, -3, 0], [0, 1, 0, -4], [0, 0, 1, 0], [0, 0, 0, 1]]

    @pytest.mark.parametrize("p", [7, 31, 61])
    def test_unit_upper_triangular(self, p):
        T = transition_to_power_basis(p)
        for i in range(p - 1):
            assert T[i][i] == 1
            assert all(T[i][j] == 0 for j in range(i))


class TestTable:
    def test_row_13(self):
        r = table_row(13)
        assert r.degree == 12 and r.bound_term == 4 * 13 ** 6
        assert abs(r.cond_U / mpmath.mpf("25.92") - 1) < 0.01
        assert r.error is None
        d = r.to_dict()
        json.dumps(d)
        assert d["bound_4p6"] == "19307236"

    def test_bound_term_509(self):
        assert abs(4 * 509 ** 6 / 6.95e16 - 1) < 0.005
