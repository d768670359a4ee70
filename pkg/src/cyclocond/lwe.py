"""PLWE samples over Z_q[x]/(Phi_{4p}^+) and the noise-transfer experiment.

Error vectors are drawn from the integer Gaussian D_{Z,sigma} (mass
proportional to exp(-x^2 / (2 sigma^2))) and pushed through U_{4p}, its
inverse, and for contrast through the plain Vandermonde matrix of
Phi_{4p}^+. Every random stream is derived from ``(seed, index)`` with
numpy's SeedSequence, so runs are reproducible trial by trial.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import mpmath
import numpy as np
from flint import arb

from .construct import Factorization, factorize, is_odd_prime, psi_nodes, vandermonde
from .intpoly import IntPolynomial, prime_factors, real_cyclotomic
from .mpnum import DEFAULT_PRECISION, PrecMatrix, _fmt, frobenius_norm, invert, to_mpf, working_precision

__all__ = [
    "LweParams",
    "ModPoly",
    "NoiseStats",
    "default_modulus",
    "discrete_gaussian_vector",
    "plwe_sample",
    "embed_forward",
    "embed_inverse",
    "round_to_lattice",
    "noise_amplification",
    "run_noise_experiment",
]

TAIL_CUT = 12


def _is_prime(q: int) -> bool:
    return q >= 2 and prime_factors(q) == [q]


def default_modulus(p: int) -> int:
    """Smallest prime q >= 2^14 with q = 1 (mod 4p)."""
    step = 4 * p
    q = (1 << 14) + (1 - (1 << 14)) % step
    while not _is_prime(q):
        q += step
    return q


@dataclass(frozen=True)
class LweParams:
    p: int
    q: int
    sigma: float
    seed: int = 0

    def __post_init__(self):
        if not is_odd_prime(self.p):
            raise ValueError("p must be an odd prime, got %r" % (self.p,))
        if not (isinstance(self.q, int) and self.q > 2 and _is_prime(self.q)):
            raise ValueError("q must be a prime > 2, got %r" % (self.q,))
        if not self.sigma > 0:
            raise ValueError("sigma must be positive")
        if not 0 <= self.seed < 2 ** 64:
            raise ValueError("seed must fit in 64 bits")

    @classmethod
    def with_default_modulus(cls, p: int, sigma: float, seed: int = 0) -> LweParams:
        return cls(p, default_modulus(p), sigma, seed)

    @property
    def dim(self) -> int:
        return self.p - 1

    def to_dict(self) -> dict:
        return {"p": self.p, "q": self.q, "sigma": self.sigma, "dim": self.dim, "seed": self.seed}


def _balanced(c: int, q: int) -> int:
    c %= q
    return c - q if c > q // 2 else c


@dataclass(frozen=True)
class ModPoly:
    """Element of Z_q[x]/(Phi_{4p}^+) with balanced coefficients in [-(q-1)/2, (q-1)/2]."""

    coeffs: tuple[int, ...]
    modulus: int
    p: int

    @classmethod
    def from_ints(cls, coeffs: Sequence[int], q: int, p: int) -> ModPoly:
        """Reduce an arbitrary integer polynomial into the ring."""
        dim = p - 1
        poly = IntPolynomial(int(c) for c in coeffs) % real_cyclotomic(4 * p)
        return cls(tuple(_balanced(poly[i], q) for i in range(dim)), q, p)

    @classmethod
    def zero(cls, q: int, p: int) -> ModPoly:
        return cls((0,) * (p - 1), q, p)

    def __post_init__(self):
        if len(self.coeffs) != self.p - 1:
            raise ValueError("expected %d coefficients" % (self.p - 1))
        half = (self.modulus - 1) // 2
        if any(not -half <= c <= half for c in self.coeffs):
            raise ValueError("coefficients must be balanced mod %d" % self.modulus)

    def _check(self, other: ModPoly):
        if (self.modulus, self.p) != (other.modulus, other.p):
            raise ValueError("ring mismatch")

    def __add__(self, other: ModPoly) -> ModPoly:
        self._check(other)
        return ModPoly(tuple(_balanced(a + b, self.modulus) for a, b in zip(self.coeffs, other.coeffs)),
                       self.modulus, self.p)

    def __sub__(self, other: ModPoly) -> ModPoly:
        self._check(other)
        return ModPoly(tuple(_balanced(a - b, self.modulus) for a, b in zip(self.coeffs, other.coeffs)),
                       self.modulus, self.p)

    def __mul__(self, other: ModPoly) -> ModPoly:
        self._check(other)
        prod = IntPolynomial(self.coeffs) * IntPolynomial(other.coeffs)
        return ModPoly.from_ints(prod.coeffs, self.modulus, self.p)

    def add_error(self, e: Sequence[int]) -> ModPoly:
        return self + ModPoly.from_ints(e, self.modulus, self.p)


def _rng(seed) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def discrete_gaussian_vector(sigma: float, dim: int, seed=0) -> np.ndarray:
    """``dim`` iid samples of D_{Z,sigma}, by rejection from the uniform law on |x| <= ceil(12 sigma)."""
    if not sigma > 0:
        raise ValueError("sigma must be positive")
    if dim < 1:
        raise ValueError("dim must be positive")
    rng = _rng(seed)
    tail = math.ceil(TAIL_CUT * sigma)
    out = np.empty(0, dtype=np.int64)
    batch = max(16, 2 * dim * (2 * tail + 1) // max(1, int(sigma * 2.5)))
    while out.size < dim:
        x = rng.integers(-tail, tail + 1, size=batch)
        u = rng.random(batch)
        keep = x[u < np.exp(-(x.astype(float) ** 2) / (2 * sigma * sigma))]
        out = np.concatenate([out, keep])
    return out[:dim]


def _stream(params: LweParams, index: int, purpose: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence([params.seed, index, purpose]))


def plwe_sample(secret: ModPoly, params: LweParams, index: int = 0, error: Sequence[int] | None = None):
    """One PLWE sample (a, b = a*s + e); e is returned for test oracles only."""
    if secret.modulus != params.q or secret.p != params.p:
        raise ValueError("secret does not live in the parameter ring")
    half = (params.q - 1) // 2
    a_coeffs = _stream(params, index, 0).integers(-half, half + 1, size=params.dim)
    a = ModPoly(tuple(int(c) for c in a_coeffs), params.q, params.p)
    if error is None:
        error = discrete_gaussian_vector(params.sigma, params.dim, _stream(params, index, 1))
    e = [int(c) for c in error]
    b = (a * secret).add_error(e)
    return a, b, e


# ---------------------------------------------------------------------------
# embeddings


def _as_columns(values, dim: int, bits: int) -> PrecMatrix:
    rows = [list(values)] if _is_single(values) else [list(v) for v in values]
    if any(len(r) != dim for r in rows):
        raise ValueError("expected vectors of length %d" % dim)
    return PrecMatrix.from_rows(rows, bits).transpose()


def _columns_out(M: PrecMatrix, single: bool):
    cols = M.transpose().tolist()
    out = np.array(cols, dtype=object)
    return out[0] if single else out


def _is_single(values) -> bool:
    if isinstance(values, np.ndarray):
        return values.ndim == 1
    return not hasattr(values[0], "__len__")


def embed_forward(coeffs, fact: Factorization) -> np.ndarray:
    """U_{4p} u: coordinates in the basis {r_i^*(psi)} to the canonical embedding.

    Accepts one vector of length p-1 or a 2-D batch with one vector per row.
    """
    single = _is_single(coeffs)
    X = _as_columns(coeffs, fact.p - 1, fact.precision_bits)
    return _columns_out(fact.U4p @ X, single)


def embed_inverse(vec, fact: Factorization) -> np.ndarray:
    """U_{4p}^{-1} v, near-integral whenever v lies in the embedded lattice."""
    single = _is_single(vec)
    X = _as_columns(vec, fact.p - 1, fact.precision_bits)
    return _columns_out(fact.U_inverse.inverse @ X, single)


def round_to_lattice(vec) -> tuple[np.ndarray, mpmath.mpf]:
    """Nearest integer vector(s) and the largest rounding distance."""
    arr = np.asarray(vec, dtype=object)
    ints = np.vectorize(lambda v: int(mpmath.nint(v)), otypes=[object])(arr)
    dist = max((abs(v - i) for v, i in zip(arr.ravel(), ints.ravel())), default=mpmath.mpf(0))
    return ints, dist


# ---------------------------------------------------------------------------
# noise experiment


@dataclass(frozen=True)
class NoiseStats:
    trials: int
    mean_ratio: mpmath.mpf
    max_ratio: mpmath.mpf
    frobenius_bound: mpmath.mpf
    direction: str
    matrix: str = "U4p"
    precision_bits: int = DEFAULT_PRECISION

    @property
    def within_bound(self) -> bool:
        return bool(self.max_ratio <= self.frobenius_bound * (1 + mpmath.ldexp(1, -32)))

    def to_dict(self) -> dict:
        return {
            "matrix": self.matrix,
            "direction": self.direction,
            "trials": self.trials,
            "mean_ratio": _fmt(self.mean_ratio, self.precision_bits),
            "max_ratio": _fmt(self.max_ratio, self.precision_bits),
            "frobenius_bound": _fmt(self.frobenius_bound, self.precision_bits),
            "within_bound": self.within_bound,
        }


def _error_batch(params: LweParams, trials: int) -> np.ndarray:
    return np.array([discrete_gaussian_vector(params.sigma, params.dim, _stream(params, t, 1))
                     for t in range(trials)], dtype=np.int64)


def _ratios(A: PrecMatrix, E: np.ndarray) -> list:
    """||A e|| / ||e|| for each nonzero row e of E (Euclidean norms)."""
    keep = [i for i in range(E.shape[0]) if np.any(E[i])]
    if not keep:
        return []
    Ek = E[keep]
    X = PrecMatrix.from_rows([[int(v) for v in row] for row in Ek], A.precision_bits).transpose()
    Y = A @ X
    bits = A.precision_bits
    out = []
    with working_precision(bits):
        for j, row in enumerate(Ek):
            num = arb(0)
            for i in range(Y.rows):
                v = Y.data[i, j]
                num += v * v
            den = arb(int(np.dot(row.astype(object), row.astype(object))))
            out.append(to_mpf((num / den).sqrt(), bits))
    return out


def _stats(ratios, bound, direction, matrix, trials, bits=DEFAULT_PRECISION) -> NoiseStats:
    with mpmath.workprec(bits):
        mean = mpmath.fsum(ratios) / len(ratios) if ratios else mpmath.mpf(0)
    return NoiseStats(trials, mean, max(ratios, default=mpmath.mpf(0)), bound, direction, matrix, bits)


def noise_amplification(params: LweParams, trials: int, fact: Factorization | None = None,
                        precision: int = DEFAULT_PRECISION) -> tuple[NoiseStats, NoiseStats]:
    """Empirical ||U e||/||e|| and ||U^-1 e||/||e|| over ``trials`` Gaussian errors."""
    if trials < 1:
        raise ValueError("trials must be positive")
    fact = fact or factorize(params.p, precision)
    E = _error_batch(params, trials)
    U, Uinv = fact.U4p, fact.U_inverse.inverse
    bits = fact.precision_bits
    fwd = _stats(_ratios(U, E), frobenius_norm(U), "forward", "U4p", trials, bits)
    inv = _stats(_ratios(Uinv, E), frobenius_norm(Uinv), "inverse", "U4p", trials, bits)
    return fwd, inv


def run_noise_experiment(params: LweParams, trials: int, precision: int = DEFAULT_PRECISION,
                         dump_trials: bool = False) -> dict:
    """Quasi-Vandermonde statistics next to the plain Vandermonde contrast.

    The contrast matrix is the Vandermonde matrix of Phi_{4p}^+, whose
    exponential conditioning the quasi-Vandermonde construction avoids.
    """
    fact = factorize(params.p, precision)
    E = _error_batch(params, trials)
    U, Uinv = fact.U4p, fact.U_inverse.inverse
    V = vandermonde(psi_nodes(4 * params.p, precision))
    v_inv = invert(V)
    Vinv = v_inv.inverse
    V = v_inv.matrix

    vbits = v_inv.precision_used

    u_fwd = _ratios(U, E)
    u_inv = _ratios(Uinv, E)
    v_fwd = _ratios(V, E)
    v_inv_r = _ratios(Vinv, E)
    fu, fui = frobenius_norm(U), frobenius_norm(Uinv)
    fv, fvi = frobenius_norm(V), frobenius_norm(Vinv)
    with mpmath.workprec(vbits):
        cu, cv = fu * fui, fv * fvi
    out = {
        "params": params.to_dict(),
        "trials": trials,
        "precision_bits": precision,
        "forward": _stats(u_fwd, fu, "forward", "U4p", trials, precision).to_dict(),
        "inverse": _stats(u_inv, fui, "inverse", "U4p", trials, precision).to_dict(),
        "u_frobenius": _fmt(fu, precision),
        "u_inv_frobenius": _fmt(fui, precision),
        "cond_u": _fmt(cu, precision),
        "contrast": {
            "forward": _stats(v_fwd, fv, "forward", "V_Phi4p+", trials, vbits).to_dict(),
            "inverse": _stats(v_inv_r, fvi, "inverse", "V_Phi4p+", trials, vbits).to_dict(),
            "v_frobenius": _fmt(fv, vbits),
            "v_inv_frobenius": _fmt(fvi, vbits),
            "cond_v": _fmt(cv, vbits),
        },
    }
    if dump_trials:
        nz = [i for i in range(E.shape[0]) if np.any(E[i])]
        out["trial_rows"] = [
            {"trial": t, "error_norm_sq": int(np.dot(E[t].astype(object), E[t].astype(object))),
             "u_forward": _fmt(a, precision), "u_inverse": _fmt(b, precision),
             "v_forward": _fmt(c, vbits), "v_inverse": _fmt(d, vbits)}
            for t, a, b, c, d in zip(nz, u_fwd, u_inv, v_fwd, v_inv_r)
        ]
    return out
