"""Extended-precision scalars and dense matrices.

Matrices are backed by python-flint ``arb_mat`` / ``acb_mat``. Entries are
kept as exact midpoints (ball radii are dropped after every operation), so a
PrecMatrix behaves like an ordinary floating-point matrix with a mantissa of
``precision_bits`` bits. Inversion is LU with partial pivoting on those
midpoints; correctness is certified afterwards by the residual
``||A A^-1 - I||_F`` and, when that is too large, by recomputing at doubled
precision.

flint keeps its working precision in a process-wide context, so every
operation here runs inside :func:`working_precision`, which serializes
precision switches behind a lock.
"""

from __future__ import annotations

import json
import numbers
import threading
from contextlib import contextmanager
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, Sequence

import mpmath
from flint import acb, acb_mat, arb, arb_mat, ctx, fmpq, fmpq_mat, fmpz, fmpz_mat

__all__ = [
    "DEFAULT_PRECISION",
    "MAX_ESCALATIONS",
    "PrecScalar",
    "PrecMatrix",
    "InverseResult",
    "CondReport",
    "SingularMatrixError",
    "PrecisionExhaustedError",
    "working_precision",
    "to_mpf",
    "frobenius_norm",
    "max_entry_norm",
    "invert",
    "cond",
    "cond_exact",
    "sci",
]

DEFAULT_PRECISION = 256
MAX_ESCALATIONS = 4

_PREC_LOCK = threading.RLock()


class SingularMatrixError(ArithmeticError):
    """The matrix is singular to working precision."""


class PrecisionExhaustedError(ArithmeticError):
    """Inversion did not meet its residual target after every escalation."""


@contextmanager
def working_precision(bits: int):
    if bits < 2:
        raise ValueError("precision must be at least 2 bits")
    with _PREC_LOCK:
        old = ctx.prec
        ctx.prec = int(bits)
        try:
            yield
        finally:
            ctx.prec = old


def _ball(value, bits: int):
    """Convert a scalar to an exact-midpoint arb/acb at the current precision."""
    if isinstance(value, PrecScalar):
        value = value.value
    if isinstance(value, (arb, acb)):
        return value.mid()
    if isinstance(value, (bool, numbers.Integral)) and not isinstance(value, (int, fmpz)):
        value = int(value)  # numpy and other integer types
    elif isinstance(value, numbers.Real) and not isinstance(value, (float, Fraction, mpmath.mpf)):
        value = float(value)
    if isinstance(value, (int, fmpz)):
        return arb(value)
    if isinstance(value, Fraction):
        return arb(fmpq(value.numerator, value.denominator))
    if isinstance(value, fmpq):
        return arb(value)
    if isinstance(value, complex):
        return acb(value.real, value.imag)
    if isinstance(value, float):
        return arb(value)
    if isinstance(value, mpmath.mpf):
        return _mpf_to_arb(value)
    if isinstance(value, mpmath.mpc):
        return acb(_mpf_to_arb(value.real), _mpf_to_arb(value.imag))
    if isinstance(value, str):
        with mpmath.workprec(bits):
            return _mpf_to_arb(mpmath.mpf(value))
    raise TypeError("cannot convert %r to an extended-precision scalar" % (value,))


def _mpf_to_arb(x: mpmath.mpf):
    sign, man, exp, _ = x._mpf_
    if not man:
        return arb(0)
    man = int(man)
    return arb((fmpz(-man if sign else man), fmpz(int(exp))))


def to_mpf(x, bits: int | None = None) -> mpmath.mpf:
    """Exact conversion of a real arb midpoint to an mpmath number."""
    if isinstance(x, PrecScalar):
        x = x.value
    if isinstance(x, acb):
        raise TypeError("complex value; use to_mpc")
    m, e = x.mid().man_exp()
    prec = bits or max(ctx.prec, int(m).bit_length())
    return mpmath.mpf((int(m), int(e)), prec=prec) if int(m) else mpmath.mpf(0)


def to_mpc(z, bits: int | None = None) -> mpmath.mpc:
    if isinstance(z, PrecScalar):
        z = z.value
    if isinstance(z, arb):
        return mpmath.mpc(to_mpf(z, bits))
    return mpmath.mpc(to_mpf(z.real, bits), to_mpf(z.imag, bits))


def _decimal(x, bits: int) -> str:
    """Decimal string that round-trips at ``bits`` of precision."""
    v = to_mpf(x, bits)
    return mpmath.libmp.to_str(v._mpf_, mpmath.libmp.repr_dps(bits))


@dataclass(frozen=True)
class PrecScalar:
    """A real or complex number carried at a stated working precision.

    Binary operations run at the larger of the two operand precisions.
    """

    value: object
    precision_bits: int = DEFAULT_PRECISION

    @classmethod
    def of(cls, value, precision_bits: int = DEFAULT_PRECISION) -> PrecScalar:
        with working_precision(precision_bits):
            return cls(_ball(value, precision_bits), precision_bits)

    @property
    def is_complex(self) -> bool:
        return isinstance(self.value, acb)

    def _binop(self, other, op):
        if isinstance(other, PrecScalar):
            bits = max(self.precision_bits, other.precision_bits)
            rhs = other.value
        else:
            bits = self.precision_bits
            rhs = None
        with working_precision(bits):
            if rhs is None:
                rhs = _ball(other, bits)
            return PrecScalar(op(self.value, rhs).mid(), bits)

    def __add__(self, other):
        return self._binop(other, lambda a, b: a + b)

    def __radd__(self, other):
        return self._binop(other, lambda a, b: b + a)

    def __sub__(self, other):
        return self._binop(other, lambda a, b: a - b)

    def __rsub__(self, other):
        return self._binop(other, lambda a, b: b - a)

    def __mul__(self, other):
        return self._binop(other, lambda a, b: a * b)

    def __rmul__(self, other):
        return self._binop(other, lambda a, b: b * a)

    def __truediv__(self, other):
        return self._binop(other, lambda a, b: a / b)

    def __neg__(self):
        return PrecScalar(-self.value, self.precision_bits)

    def __abs__(self):
        with working_precision(self.precision_bits):
            return PrecScalar(abs(self.value).mid(), self.precision_bits)

    def to_mpmath(self):
        with working_precision(self.precision_bits):
            if self.is_complex:
                return to_mpc(self.value, self.precision_bits)
            return to_mpf(self.value, self.precision_bits)

    def __float__(self) -> float:
        return float(self.to_mpmath())

    def __complex__(self) -> complex:
        return complex(self.to_mpmath())

    def __repr__(self) -> str:
        return "PrecScalar(%s, %d bits)" % (mpmath.nstr(self.to_mpmath(), 20), self.precision_bits)


@dataclass(frozen=True, eq=False)
class PrecMatrix:
    """Dense real or complex matrix at a fixed working precision.

    ``source``, when given, rebuilds the same matrix at another precision from
    its exact or trigonometric definition; :func:`invert` uses it when it has
    to escalate.
    """

    data: object
    precision_bits: int
    source: Callable[[int], "PrecMatrix"] | None = field(default=None, repr=False)

    def __post_init__(self):
        if self.data.nrows() < 1 or self.data.ncols() < 1:
            raise ValueError("matrices must have at least one row and column")
        with working_precision(self.precision_bits):
            object.__setattr__(self, "data", self.data.mid())

    # construction

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence], precision_bits: int = DEFAULT_PRECISION,
                  source: Callable[[int], PrecMatrix] | None = None) -> PrecMatrix:
        rows = [list(r) for r in rows]
        if not rows or not rows[0]:
            raise ValueError("matrices must have at least one row and column")
        ncols = len(rows[0])
        if any(len(r) != ncols for r in rows):
            raise ValueError("ragged rows")
        with working_precision(precision_bits):
            entries = [_ball(v, precision_bits) for r in rows for v in r]
            if any(isinstance(e, acb) for e in entries):
                data = acb_mat(len(rows), ncols, [acb(e) for e in entries])
            else:
                data = arb_mat(len(rows), ncols, entries)
        return cls(data, precision_bits, source)

    @classmethod
    def identity(cls, n: int, precision_bits: int = DEFAULT_PRECISION) -> PrecMatrix:
        with working_precision(precision_bits):
            m = arb_mat(n, n)
            for i in range(n):
                m[i, i] = 1
        return cls(m, precision_bits, lambda b: PrecMatrix.identity(n, b))

    @classmethod
    def diag(cls, values: Sequence, precision_bits: int = DEFAULT_PRECISION) -> PrecMatrix:
        n = len(values)
        rows = [[values[i] if i == j else 0 for j in range(n)] for i in range(n)]
        return cls.from_rows(rows, precision_bits)

    # shape / access

    @property
    def rows(self) -> int:
        return self.data.nrows()

    @property
    def cols(self) -> int:
        return self.data.ncols()

    @property
    def shape(self) -> tuple[int, int]:
        return self.rows, self.cols

    @property
    def is_complex(self) -> bool:
        return isinstance(self.data, acb_mat)

    @property
    def is_square(self) -> bool:
        return self.rows == self.cols

    def __getitem__(self, ij) -> PrecScalar:
        i, j = ij
        return PrecScalar(self.data[i, j], self.precision_bits)

    def entries(self) -> list:
        return self.data.entries()

    def _wrap(self, data, bits=None) -> PrecMatrix:
        bits = bits or self.precision_bits
        with working_precision(bits):
            return PrecMatrix(data.mid(), bits)

    # arithmetic

    def _other(self, other: PrecMatrix):
        bits = max(self.precision_bits, other.precision_bits)
        a, b = self.data, other.data
        if isinstance(a, acb_mat) and not isinstance(b, acb_mat):
            b = acb_mat(b)
        elif isinstance(b, acb_mat) and not isinstance(a, acb_mat):
            a = acb_mat(a)
        return a, b, bits

    def __matmul__(self, other: PrecMatrix) -> PrecMatrix:
        if self.cols != other.rows:
            raise ValueError("shape mismatch %s @ %s" % (self.shape, other.shape))
        a, b, bits = self._other(other)
        with working_precision(bits):
            return PrecMatrix((a * b).mid(), bits)

    def __add__(self, other: PrecMatrix) -> PrecMatrix:
        a, b, bits = self._other(other)
        with working_precision(bits):
            return PrecMatrix((a + b).mid(), bits)

    def __sub__(self, other: PrecMatrix) -> PrecMatrix:
        a, b, bits = self._other(other)
        with working_precision(bits):
            return PrecMatrix((a - b).mid(), bits)

    def __mul__(self, scalar) -> PrecMatrix:
        bits = self.precision_bits
        if isinstance(scalar, PrecScalar):
            bits = max(bits, scalar.precision_bits)
        with working_precision(bits):
            s = _ball(scalar, bits)
            data = self.data
            if isinstance(s, acb) and not isinstance(data, acb_mat):
                data = acb_mat(data)
            return PrecMatrix((data * s).mid(), bits)

    __rmul__ = __mul__

    def __neg__(self) -> PrecMatrix:
        return PrecMatrix(-self.data, self.precision_bits)

    def transpose(self) -> PrecMatrix:
        return PrecMatrix(self.data.transpose(), self.precision_bits)

    def submatrix(self, r0: int, r1: int, c0: int, c1: int) -> PrecMatrix:
        rows = [[self.data[i, j] for j in range(c0, c1)] for i in range(r0, r1)]
        return PrecMatrix.from_rows(rows, self.precision_bits)

    def permute_rows(self, perm: Sequence[int]) -> PrecMatrix:
        """Row i of the result is row perm[i] of self."""
        if sorted(perm) != list(range(self.rows)):
            raise ValueError("not a permutation of the rows")
        rows = [[self.data[k, j] for j in range(self.cols)] for k in perm]
        return PrecMatrix.from_rows(rows, self.precision_bits)

    def at_precision(self, bits: int) -> PrecMatrix:
        """The same matrix at another precision, rebuilt from its source if known."""
        if self.source is not None:
            return self.source(bits)
        with working_precision(bits):
            data = acb_mat(self.data) if self.is_complex else arb_mat(self.data)
        return PrecMatrix(data, bits)

    # conversion

    def tolist(self) -> list[list]:
        with working_precision(self.precision_bits):
            conv = to_mpc if self.is_complex else to_mpf
            return [[conv(self.data[i, j], self.precision_bits) for j in range(self.cols)]
                    for i in range(self.rows)]

    def to_numpy(self):
        import numpy as np

        dtype = complex if self.is_complex else float
        return np.array([[dtype(v) for v in row] for row in self.tolist()], dtype=dtype)

    def to_json(self) -> dict:
        with working_precision(self.precision_bits):
            def enc(v):
                if self.is_complex:
                    return [_decimal(v.real, self.precision_bits), _decimal(v.imag, self.precision_bits)]
                return _decimal(v, self.precision_bits)

            entries = [[enc(self.data[i, j]) for j in range(self.cols)] for i in range(self.rows)]
        return {
            "rows": self.rows,
            "cols": self.cols,
            "precision_bits": self.precision_bits,
            "complex": self.is_complex,
            "entries": entries,
        }

    @classmethod
    def from_json(cls, data: dict | str) -> PrecMatrix:
        if isinstance(data, str):
            data = json.loads(data)
        bits = int(data["precision_bits"])
        with mpmath.workprec(bits):
            if data.get("complex"):
                rows = [[mpmath.mpc(mpmath.mpf(re), mpmath.mpf(im)) for re, im in row]
                        for row in data["entries"]]
            else:
                rows = [[mpmath.mpf(v) for v in row] for row in data["entries"]]
        return cls.from_rows(rows, bits)

    def __repr__(self) -> str:
        kind = "complex" if self.is_complex else "real"
        return "PrecMatrix(%dx%d %s, %d bits)" % (self.rows, self.cols, kind, self.precision_bits)


# ---------------------------------------------------------------------------
# norms


def _frobenius_sq(data):
    total = arb(0)
    if isinstance(data, acb_mat):
        for z in data.entries():
            total += z.real ** 2 + z.imag ** 2
    else:
        for x in data.entries():
            total += x * x
    return total


def frobenius_norm(A: PrecMatrix) -> mpmath.mpf:
    """sqrt(sum |a_ij|^2)."""
    with working_precision(A.precision_bits):
        return to_mpf(_frobenius_sq(A.data).sqrt(), A.precision_bits)


def max_entry_norm(A: PrecMatrix) -> mpmath.mpf:
    """Largest entry modulus, max |a_ij| (an entrywise norm, not the operator inf-norm)."""
    with working_precision(A.precision_bits):
        best = arb(0)
        for v in A.data.entries():
            a = abs(v).mid()
            if a > best:
                best = a
        return to_mpf(best, A.precision_bits)


# ---------------------------------------------------------------------------
# inversion and conditioning


@dataclass(frozen=True)
class InverseResult:
    inverse: PrecMatrix
    residual: mpmath.mpf
    precision_used: int
    escalations: int = 0
    matrix: PrecMatrix | None = field(default=None, repr=False)


def _identity_like(data):
    n = data.nrows()
    eye = acb_mat(n, n) if isinstance(data, acb_mat) else arb_mat(n, n)
    for i in range(n):
        eye[i, i] = 1
    return eye


def _invert_once(A: PrecMatrix):
    with working_precision(A.precision_bits):
        eye = _identity_like(A.data)
        try:
            X = A.data.solve(eye, algorithm="approx")
        except ZeroDivisionError as exc:
            raise SingularMatrixError("matrix is singular to working precision (%d bits)"
                                      % A.precision_bits) from exc
        X = X.mid()
        for v in X.entries():
            if not v.is_finite():
                raise SingularMatrixError("matrix is singular to working precision (%d bits)"
                                          % A.precision_bits)
        R = (A.data * X).mid() - eye
        residual = to_mpf(_frobenius_sq(R.mid()).sqrt(), A.precision_bits)
        return PrecMatrix(X, A.precision_bits), residual


def invert(A: PrecMatrix, target_residual=None, max_escalations: int = MAX_ESCALATIONS) -> InverseResult:
    """Invert a square matrix, certifying the result by its residual.

    Solves A X = I by LU with partial pivoting at A's precision and measures
    ``||A X - I||_F``. If that exceeds ``target_residual`` (default
    ``2**(-precision/2)``) the precision is doubled, A is rebuilt from its
    source when it has one, and the solve is repeated, at most
    ``max_escalations`` times.
    """
    if not A.is_square:
        raise ValueError("cannot invert a %dx%d matrix" % A.shape)
    fixed_target = target_residual is not None
    current = A
    for attempt in range(max_escalations + 1):
        bits = current.precision_bits
        target = mpmath.mpf(target_residual) if fixed_target else mpmath.ldexp(1, -(bits // 2))
        X, residual = _invert_once(current)
        if residual <= target:
            return InverseResult(X, residual, bits, attempt, current)
        if attempt < max_escalations:
            current = current.at_precision(2 * bits)
    raise PrecisionExhaustedError(
        "residual %s above target after %d escalations (last precision %d bits)"
        % (mpmath.nstr(residual, 5), max_escalations, current.precision_bits))


def _fmt(x, bits: int = 64) -> str | None:
    """Full decimal string for reals (enough digits to round-trip ``bits``); ints verbatim."""
    if x is None:
        return None
    if isinstance(x, int):
        return str(x)
    with mpmath.workprec(bits):
        v = +mpmath.mpf(x)
    return mpmath.libmp.to_str(v._mpf_, mpmath.libmp.repr_dps(bits))


def sci(x, digits: int = 6) -> str:
    """Scientific notation with ``digits`` significant digits, for human-readable output."""
    if x is None:
        return "-"
    v = x if isinstance(x, mpmath.mpf) else mpmath.mpf(x)
    if not mpmath.isfinite(v):
        return str(v)
    if v == 0:
        return "0"
    e = int(mpmath.floor(mpmath.log10(abs(v))))
    m = v / mpmath.mpf(10) ** e
    if abs(mpmath.nint(m * 10 ** (digits - 1))) >= 10 ** digits:
        e += 1
        m = v / mpmath.mpf(10) ** e
    return "%se%+03d" % (mpmath.nstr(m, digits, strip_zeros=False, min_fixed=-1, max_fixed=2), e)


@dataclass(frozen=True)
class CondReport:
    """Frobenius condition number of one matrix, with optional bounds.

    ``bound`` is an upper bound that should hold; ``lower_bound`` a lower bound
    the condition number should exceed; ``refined_bound`` a second, sharper
    upper bound where one is known. Each satisfied flag is None when the
    corresponding bound is absent.
    """

    frobenius: mpmath.mpf
    frobenius_inverse: mpmath.mpf
    cond: mpmath.mpf
    residual: mpmath.mpf
    precision_used: int
    name: str = ""
    p: int | None = None
    size: int | None = None
    bound: mpmath.mpf | int | None = None
    bound_satisfied: bool | None = None
    lower_bound: mpmath.mpf | int | None = None
    lower_bound_satisfied: bool | None = None
    refined_bound: mpmath.mpf | int | None = None
    refined_bound_satisfied: bool | None = None

    def with_bounds(self, bound=None, lower_bound=None, refined_bound=None) -> CondReport:
        """Attach bounds; comparisons allow a relative slack of 2**(-precision/2) for rounding."""
        from dataclasses import replace

        slack = mpmath.ldexp(1, -(self.precision_used // 2))
        kw = {}
        if bound is not None:
            kw.update(bound=bound, bound_satisfied=bool(self.cond <= mpmath.mpf(bound) * (1 + slack)))
        if lower_bound is not None:
            kw.update(lower_bound=lower_bound,
                      lower_bound_satisfied=bool(self.cond > mpmath.mpf(lower_bound) * (1 - slack)))
        if refined_bound is not None:
            kw.update(refined_bound=refined_bound,
                      refined_bound_satisfied=bool(self.cond <= mpmath.mpf(refined_bound) * (1 + slack)))
        return replace(self, **kw)

    @property
    def all_satisfied(self) -> bool:
        flags = (self.bound_satisfied, self.lower_bound_satisfied, self.refined_bound_satisfied)
        return all(f is not False for f in flags)

    def to_dict(self) -> dict:
        b = self.precision_used
        out = {
            "name": self.name,
            "p": self.p,
            "size": self.size,
            "precision_used": self.precision_used,
            "frobenius": _fmt(self.frobenius, b),
            "frobenius_inverse": _fmt(self.frobenius_inverse, b),
            "cond": _fmt(self.cond, b),
            "residual": _fmt(self.residual, 64),
            "bound": _fmt(self.bound, b),
            "bound_satisfied": self.bound_satisfied,
            "lower_bound": _fmt(self.lower_bound, b),
            "lower_bound_satisfied": self.lower_bound_satisfied,
            "refined_bound": _fmt(self.refined_bound, b),
            "refined_bound_satisfied": self.refined_bound_satisfied,
        }
        return out

    CSV_HEADER = ("p", "matrix_name", "cond", "bound", "satisfied")

    def csv_row(self) -> tuple:
        sat = self.bound_satisfied if self.bound is not None else self.lower_bound_satisfied
        bound = self.bound if self.bound is not None else self.lower_bound
        return (self.p if self.p is not None else "", self.name, _fmt(self.cond, self.precision_used),
                _fmt(bound, self.precision_used) if bound is not None else "", "" if sat is None else sat)


def cond(A: PrecMatrix, target_residual=None, name: str = "", p: int | None = None) -> CondReport:
    """Frobenius condition number ||A||_F * ||A^-1||_F."""
    inv = invert(A, target_residual)
    B = inv.matrix
    fa = frobenius_norm(B)
    fi = frobenius_norm(inv.inverse)
    with mpmath.workprec(inv.precision_used):
        c = fa * fi
    return CondReport(fa, fi, c, inv.residual, inv.precision_used, name=name, p=p, size=A.rows)


def cond_exact(rows: Sequence[Sequence[int]], precision_bits: int = DEFAULT_PRECISION,
               name: str = "", p: int | None = None) -> CondReport:
    """Condition number of an integer matrix, inverted exactly over the rationals."""
    M = fmpz_mat([[int(v) for v in r] for r in rows])
    if M.nrows() != M.ncols():
        raise ValueError("cannot invert a non-square matrix")
    if M.det() == 0:
        raise SingularMatrixError("integer matrix is singular")
    Minv = M.inv()
    sq = sum((fmpq(v) ** 2 for v in M.entries()), fmpq(0))
    sq_inv = sum((v ** 2 for v in fmpq_mat(Minv).entries()), fmpq(0))
    with mpmath.workprec(precision_bits):
        fa = mpmath.sqrt(mpmath.mpf(int(sq.p)) / int(sq.q))
        fi = mpmath.sqrt(mpmath.mpf(int(sq_inv.p)) / int(sq_inv.q))
        c = mpmath.sqrt(mpmath.mpf(int((sq * sq_inv).p)) / int((sq * sq_inv).q))
    return CondReport(fa, fi, c, mpmath.mpf(0), precision_bits, name=name, p=p, size=M.nrows())


def exact_inverse(rows: Sequence[Sequence[int]]) -> list[list[Fraction]]:
    Minv = fmpz_mat([[int(v) for v in r] for r in rows]).inv()
    return [[Fraction(int(Minv[i, j].p), int(Minv[i, j].q)) for j in range(Minv.ncols())]
            for i in range(Minv.nrows())]
