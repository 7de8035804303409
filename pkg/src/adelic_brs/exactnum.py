"""Exact scalar arithmetic.

Rationals are plain :class:`fractions.Fraction` values.  This module adds
p-adic valuation, absolute value and fractional/integer parts on rationals,
and :class:`QuadReal`, an exact real number of the form ``sum c_n * sqrt(n)``
with rational ``c_n`` and squarefree ``n``.  Signs, comparisons and floors of
``QuadReal`` values are certified by interval refinement, so they are exact.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Mapping, Sequence, Union

Rational = Fraction
RationalLike = Union[int, Fraction]

_SIGN_START_BITS = 64


class _PadicInfinity:
    """Valuation of zero: larger than every integer."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "PADIC_INF"

    def __eq__(self, other):
        return other is self

    def __hash__(self):
        return hash("PADIC_INF")

    def __lt__(self, other):
        return False

    def __le__(self, other):
        return other is self

    def __gt__(self, other):
        return other is not self

    def __ge__(self, other):
        return True

    def __add__(self, other):
        return self

    __radd__ = __add__

    def __reduce__(self):
        return (_PadicInfinity, ())


PADIC_INF = _PadicInfinity()


@lru_cache(maxsize=1024)
def is_prime(p: int) -> bool:
    if not isinstance(p, int) or p < 2:
        return False
    if p < 4:
        return True
    if p % 2 == 0:
        return False
    for q in range(3, math.isqrt(p) + 1, 2):
        if p % q == 0:
            return False
    return True


def _require_prime(p) -> None:
    if not is_prime(p):
        raise ValueError(f"{p!r} is not a prime")


def _int_val(n: int, p: int) -> int:
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v


def padic_val(x: RationalLike, p: int):
    """Return v with x = p**v * a/b, p dividing neither a nor b.

    Zero has valuation :data:`PADIC_INF`.
    """
    _require_prime(p)
    x = Fraction(x)
    if x == 0:
        return PADIC_INF
    return _int_val(abs(x.numerator), p) - _int_val(x.denominator, p)


def padic_abs(x: RationalLike, p: int) -> Fraction:
    v = padic_val(x, p)
    if v is PADIC_INF:
        return Fraction(0)
    return Fraction(p) ** (-v)


def padic_frac(x: RationalLike, p: int) -> Fraction:
    """p-adic fractional part of a rational, as a rational in [0, 1).

    Computed by a modular inverse: for x = u / (p**k * b) with p not dividing
    u*b, the result is (u * b**-1 mod p**k) / p**k.
    """
    _require_prime(p)
    x = Fraction(x)
    den = x.denominator
    if den % p:
        return Fraction(0)
    k = _int_val(den, p)
    pk = p**k
    b = den // pk
    r = (x.numerator * pow(b, -1, pk)) % pk
    return Fraction(r, pk)


def padic_floor(x: RationalLike, p: int) -> Fraction:
    """p-adic integer part: x minus its p-adic fractional part."""
    x = Fraction(x)
    return x - padic_frac(x, p)


def padic_digits(x: RationalLike, p: int, count: int) -> tuple[int, list[int]]:
    """First ``count`` digits of the p-adic expansion of a nonzero rational.

    Returns ``(N, digits)`` with ``x = sum(digits[i] * p**(N + i)) + O(p**(N + count))``.
    """
    _require_prime(p)
    x = Fraction(x)
    if x == 0:
        raise ValueError("zero has no leading digit")
    v = padic_val(x, p)
    unit = x / Fraction(p) ** v
    a, b = unit.numerator, unit.denominator
    binv = pow(b, -1, p)
    digits = []
    for _ in range(count):
        d = (a * binv) % p
        digits.append(d)
        a = (a - d * b) // p
    return v, digits


def padic_frac_by_digits(x: RationalLike, p: int) -> Fraction:
    """Fractional part summed digit by digit; slow reference for :func:`padic_frac`."""
    x = Fraction(x)
    if x == 0:
        return Fraction(0)
    v = padic_val(x, p)
    if v >= 0:
        return Fraction(0)
    start, digits = padic_digits(x, p, -v)
    return sum(
        (Fraction(d) * Fraction(p) ** (start + i) for i, d in enumerate(digits)),
        Fraction(0),
    )


@lru_cache(maxsize=4096)
def squarefree_decomposition(n: int) -> tuple[int, int]:
    """Return (s, f) with n = s*s*f and f squarefree."""
    if n <= 0:
        raise ValueError("expected a positive integer")
    s, f = 1, 1
    q = 2
    while q * q <= n:
        e = 0
        while n % q == 0:
            n //= q
            e += 1
        s *= q ** (e // 2)
        if e % 2:
            f *= q
        q += 1 if q == 2 else 2
    return s, f * n


def is_squarefree(n: int) -> bool:
    return isinstance(n, int) and n > 0 and squarefree_decomposition(n)[0] == 1


@dataclass(frozen=True)
class Interval:
    """Closed interval with dyadic rational endpoints."""

    lo: Fraction
    hi: Fraction
    precision: int = 0

    def __post_init__(self):
        if self.lo > self.hi:
            raise ValueError("empty interval")

    @property
    def width(self) -> Fraction:
        return self.hi - self.lo

    @property
    def midpoint(self) -> Fraction:
        return (self.lo + self.hi) / 2

    def contains(self, x) -> bool:
        if isinstance(x, Interval):
            return self.lo <= x.lo and x.hi <= self.hi
        return self.lo <= x <= self.hi

    def overlaps(self, other: "Interval") -> bool:
        return self.lo <= other.hi and other.lo <= self.hi

    def __add__(self, other):
        if isinstance(other, Interval):
            return Interval(self.lo + other.lo, self.hi + other.hi,
                            min(self.precision, other.precision))
        other = Fraction(other)
        return Interval(self.lo + other, self.hi + other, self.precision)

    __radd__ = __add__

    def __neg__(self):
        return Interval(-self.hi, -self.lo, self.precision)

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c: RationalLike) -> "Interval":
        c = Fraction(c)
        a, b = self.lo * c, self.hi * c
        return Interval(min(a, b), max(a, b), self.precision)

    def square(self) -> "Interval":
        a, b = self.lo * self.lo, self.hi * self.hi
        if self.lo <= 0 <= self.hi:
            return Interval(Fraction(0), max(a, b), self.precision)
        return Interval(min(a, b), max(a, b), self.precision)

    def __float__(self):
        return float(self.midpoint)


@lru_cache(maxsize=8192)
def _scaled_sqrt_floor(n: int, bits: int) -> int:
    # floor(sqrt(n) * 2**bits); strict upper bound is this + 1 for nonsquare n
    return math.isqrt(n << (2 * bits))


class QuadReal:
    """Exact element of a multi-quadratic field, ``sum c_n * sqrt(n)``.

    Keys are squarefree positive integers, key 1 being the rational part.
    Instances are immutable and hashable; a rational-valued ``QuadReal``
    compares and hashes equal to the corresponding ``Fraction``.
    """

    __slots__ = ("_terms", "_hash", "_sign")

    def __init__(self, value: Union[RationalLike, "QuadReal", Mapping] = 0):
        if isinstance(value, QuadReal):
            terms = value._terms
        elif isinstance(value, Mapping):
            terms = {}
            for n, c in value.items():
                n = int(n)
                c = Fraction(c)
                s, f = squarefree_decomposition(n)
                terms[f] = terms.get(f, Fraction(0)) + c * s
            terms = {n: c for n, c in terms.items() if c}
        elif isinstance(value, (int, Fraction)):
            value = Fraction(value)
            terms = {1: value} if value else {}
        else:
            raise TypeError(f"cannot build QuadReal from {type(value).__name__}")
        self._terms = terms
        self._hash = None
        self._sign = None

    @classmethod
    def _raw(cls, terms: dict) -> "QuadReal":
        obj = cls.__new__(cls)
        obj._terms = terms
        obj._hash = None
        obj._sign = None
        return obj

    @classmethod
    def sqrt(cls, r: RationalLike) -> "QuadReal":
        """Exact square root of a nonnegative rational."""
        r = Fraction(r)
        if r < 0:
            raise ValueError("square root of a negative rational")
        if r == 0:
            return cls()
        s, f = squarefree_decomposition(r.numerator * r.denominator)
        return cls._raw({f: Fraction(s, r.denominator)})

    # -- structure ---------------------------------------------------------

    @property
    def terms(self) -> dict:
        return dict(self._terms)

    def coefficient(self, n: int) -> Fraction:
        return self._terms.get(n, Fraction(0))

    def radicands(self) -> tuple[int, ...]:
        return tuple(sorted(n for n in self._terms if n != 1))

    def is_zero(self) -> bool:
        return not self._terms

    def is_rational(self) -> bool:
        return all(n == 1 for n in self._terms)

    def is_integer(self) -> bool:
        return self.is_rational() and self.coefficient(1).denominator == 1

    def to_fraction(self) -> Fraction:
        if not self.is_rational():
            raise ValueError(f"{self} is irrational")
        return self.coefficient(1)

    # -- arithmetic --------------------------------------------------------

    @staticmethod
    def _coerce(other):
        if isinstance(other, QuadReal):
            return other
        if isinstance(other, (int, Fraction)):
            return QuadReal(other)
        return None

    def __add__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        terms = dict(self._terms)
        for n, c in other._terms.items():
            s = terms.get(n, 0) + c
            if s:
                terms[n] = s
            else:
                terms.pop(n, None)
        return QuadReal._raw(terms)

    __radd__ = __add__

    def __neg__(self):
        return QuadReal._raw({n: -c for n, c in self._terms.items()})

    def __pos__(self):
        return self

    def __sub__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return other + (-self)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            if not other:
                return QuadReal._raw({})
            return QuadReal._raw({n: c * other for n, c in self._terms.items()})
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        terms: dict = {}
        for a, ca in self._terms.items():
            for b, cb in other._terms.items():
                g = math.gcd(a, b)
                key = (a // g) * (b // g)
                terms[key] = terms.get(key, 0) + ca * cb * g
        return QuadReal._raw({n: c for n, c in terms.items() if c})

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, QuadReal):
            if not other.is_rational():
                raise TypeError("division by an irrational QuadReal is not supported")
            other = other.to_fraction()
        if not isinstance(other, (int, Fraction)):
            return NotImplemented
        if not other:
            raise ZeroDivisionError("QuadReal division by zero")
        inv = 1 / Fraction(other)
        return QuadReal._raw({n: c * inv for n, c in self._terms.items()})

    def __abs__(self):
        return -self if self.sign() < 0 else self

    # -- comparison --------------------------------------------------------

    def __eq__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return self._terms == other._terms

    def __hash__(self):
        if self._hash is None:
            if self.is_rational():
                self._hash = hash(self.coefficient(1))
            else:
                self._hash = hash(frozenset(self._terms.items()))
        return self._hash

    def _cmp(self, other) -> int:
        other = self._coerce(other)
        if other is None:
            raise TypeError
        return quad_sign(self - other)

    def __lt__(self, other):
        return self._cmp(other) < 0

    def __le__(self, other):
        return self._cmp(other) <= 0

    def __gt__(self, other):
        return self._cmp(other) > 0

    def __ge__(self, other):
        return self._cmp(other) >= 0

    def sign(self) -> int:
        return quad_sign(self)

    def floor(self) -> int:
        return quad_floor_frac(self)[0]

    def frac(self) -> "QuadReal":
        return quad_floor_frac(self)[1]

    def __float__(self):
        return float(quad_eval(self, 64).midpoint)

    # -- text --------------------------------------------------------------

    def to_string(self) -> str:
        """Sparse coefficient list ``n:num/den`` joined by ``;`` (zero is ``1:0/1``)."""
        if not self._terms:
            return "1:0/1"
        return ";".join(
            f"{n}:{c.numerator}/{c.denominator}" for n, c in sorted(self._terms.items())
        )

    @classmethod
    def from_string(cls, text: str) -> "QuadReal":
        text = text.strip()
        terms = {}
        if text:
            for item in text.split(";"):
                n, sep, c = item.partition(":")
                if not sep:
                    raise ValueError(f"malformed coefficient entry {item!r}")
                n = int(n)
                if not is_squarefree(n):
                    raise ValueError(f"radicand {n} is not squarefree")
                terms[n] = terms.get(n, Fraction(0)) + Fraction(c)
        return cls(terms)

    def __str__(self):
        if not self._terms:
            return "0"
        parts = []
        for n, c in sorted(self._terms.items()):
            if n == 1:
                body = str(abs(c))
            elif abs(c) == 1:
                body = f"√{n}"
            elif abs(c).denominator == 1:
                body = f"{abs(c)}√{n}"
            else:
                body = f"({abs(c)})√{n}"
            parts.append(("-" if c < 0 else "+", body))
        first_sign, first = parts[0]
        out = ("-" if first_sign == "-" else "") + first
        for s, body in parts[1:]:
            out += f" {s} {body}"
        return out

    def __repr__(self):
        return f"QuadReal({self.to_string()!r})"

    def __reduce__(self):
        return (QuadReal._raw, (self._terms,))


def _scaled_bounds(s: QuadReal, bits: int) -> tuple[int, int]:
    """Integers lo, hi with lo <= s * 2**bits <= hi."""
    lo = hi = 0
    for n, c in s._terms.items():
        a, b = c.numerator, c.denominator
        if n == 1:
            v = a << bits
            lo += v // b
            hi += -((-v) // b)
            continue
        r = _scaled_sqrt_floor(n, bits)
        if a > 0:
            lo += (a * r) // b
            hi += -((-a * (r + 1)) // b)
        else:
            lo += (a * (r + 1)) // b
            hi += -((-a * r) // b)
    return lo, hi


def quad_eval(s: QuadReal, precision: int) -> Interval:
    """Dyadic interval of width at most 2**(1 - precision) containing ``s``."""
    if precision < 1:
        raise ValueError("precision must be at least 1 bit")
    s = QuadReal(s)
    if s.is_zero():
        return Interval(Fraction(0), Fraction(0), precision)
    mass = sum(abs(c) for c in s._terms.values())
    slack = (math.ceil(mass) + 2 * len(s._terms) + 2).bit_length()
    bits = precision + slack
    lo, hi = _scaled_bounds(s, bits)
    scale = 1 << bits
    return Interval(Fraction(lo, scale), Fraction(hi, scale), precision)


def quad_sign(s: QuadReal) -> int:
    """Exact sign of ``s``: zero structurally, otherwise by interval refinement."""
    if not isinstance(s, QuadReal):
        s = QuadReal(s)
    if s._sign is not None:
        return s._sign
    terms = s._terms
    if not terms:
        result = 0
    elif len(terms) == 1 and 1 in terms:
        result = 1 if terms[1] > 0 else -1
    else:
        bits = _SIGN_START_BITS
        while True:
            lo, hi = _scaled_bounds(s, bits)
            if lo > 0:
                result = 1
                break
            if hi < 0:
                result = -1
                break
            bits *= 2
    s._sign = result
    return result


def quad_floor_frac(s: QuadReal) -> tuple[int, QuadReal]:
    """Return (floor(s), s - floor(s)) with the fractional part in [0, 1)."""
    s = QuadReal(s)
    if s.is_rational():
        q = s.coefficient(1)
        k = q.numerator // q.denominator
        return k, QuadReal(q - k)
    mass = sum(abs(c) for c in s._terms.values())
    bits = _SIGN_START_BITS + math.ceil(mass).bit_length()
    lo, hi = _scaled_bounds(s, bits)
    k = lo >> bits
    if (hi >> bits) != k:
        # interval straddles k + 1: decide exactly
        if quad_sign(s - (k + 1)) >= 0:
            k += 1
    return k, s - k


def quad_floor(s: QuadReal) -> int:
    return quad_floor_frac(s)[0]


def quad_ceil(s: QuadReal) -> int:
    return -quad_floor_frac(-QuadReal(s))[0]


def as_quad(x) -> QuadReal:
    return x if isinstance(x, QuadReal) else QuadReal(x)


def rational_rank(M: Sequence[Sequence[RationalLike]]) -> int:
    """Rank over Q by fraction-free (Bareiss) elimination."""
    rows = []
    for row in M:
        row = [Fraction(x) for x in row]
        lcm = 1
        for x in row:
            lcm = lcm * x.denominator // math.gcd(lcm, x.denominator)
        rows.append([int(x * lcm) for x in row])
    if not rows:
        return 0
    ncols = len(rows[0])
    rank = 0
    prev = 1
    for col in range(ncols):
        pivot = next((r for r in range(rank, len(rows)) if rows[r][col]), None)
        if pivot is None:
            continue
        rows[rank], rows[pivot] = rows[pivot], rows[rank]
        p = rows[rank][col]
        for r in range(rank + 1, len(rows)):
            f = rows[r][col]
            rows[r] = [(p * rows[r][c] - f * rows[rank][c]) // prev for c in range(ncols)]
        prev = p
        rank += 1
        if rank == len(rows):
            break
    return rank


def left_kernel(M: Sequence[Sequence[RationalLike]]) -> list[list[Fraction]]:
    """Basis of {c : c @ M = 0} by Gauss-Jordan elimination over Q."""
    m = len(M)
    if m == 0:
        return []
    ncols = len(M[0])
    # solve M^T c = 0
    A = [[Fraction(M[i][j]) for i in range(m)] for j in range(ncols)]
    pivots = []
    r = 0
    for c in range(m):
        pr = next((i for i in range(r, len(A)) if A[i][c]), None)
        if pr is None:
            continue
        A[r], A[pr] = A[pr], A[r]
        inv = 1 / A[r][c]
        A[r] = [x * inv for x in A[r]]
        for i in range(len(A)):
            if i != r and A[i][c]:
                f = A[i][c]
                A[i] = [x - f * y for x, y in zip(A[i], A[r])]
        pivots.append(c)
        r += 1
    free = [c for c in range(m) if c not in pivots]
    basis = []
    for fc in free:
        v = [Fraction(0)] * m
        v[fc] = Fraction(1)
        for i, pc in enumerate(pivots):
            v[pc] = -A[i][fc]
        basis.append(v)
    return basis


def primitive_integer_vector(v: Iterable[RationalLike]) -> list[int]:
    """Scale a nonzero rational vector to a primitive integer vector, first nonzero entry positive."""
    v = [Fraction(x) for x in v]
    lcm = 1
    for x in v:
        lcm = lcm * x.denominator // math.gcd(lcm, x.denominator)
    ints = [int(x * lcm) for x in v]
    g = 0
    for x in ints:
        g = math.gcd(g, x)
    if g == 0:
        raise ValueError("zero vector")
    ints = [x // g for x in ints]
    lead = next(x for x in ints if x)
    return [-x for x in ints] if lead < 0 else ints
