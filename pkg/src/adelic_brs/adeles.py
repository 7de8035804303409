"""Adele vectors over a finite prime set, the lattice Gamma_Q, and characters.

An adele scalar is stored as an exact real part (:class:`QuadReal`) plus one
rational per prime of the ambient :class:`PrimeSet`.  Characters of the
adelic torus are evaluated through their exact phase, a ``QuadReal`` taken
modulo 1; only the final exponential is numeric.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Mapping, Sequence

import mpmath

from .exactnum import (
    Interval,
    QuadReal,
    as_quad,
    is_prime,
    left_kernel,
    padic_frac,
    primitive_integer_vector,
    quad_eval,
    quad_floor_frac,
    rational_rank,
)


@dataclass(frozen=True)
class PrimeSet:
    """Finite, sorted, duplicate-free set of primes."""

    primes: tuple[int, ...]

    def __post_init__(self):
        primes = tuple(int(p) for p in self.primes)
        if not primes:
            raise ValueError("prime set must be nonempty")
        bad = [p for p in primes if not is_prime(p)]
        if bad:
            raise ValueError(f"not prime: {bad}")
        if len(set(primes)) != len(primes):
            raise ValueError(f"duplicate primes in {primes}")
        object.__setattr__(self, "primes", tuple(sorted(primes)))

    @classmethod
    def of(cls, *primes: int) -> "PrimeSet":
        return cls(tuple(primes))

    def __iter__(self):
        return iter(self.primes)

    def __len__(self):
        return len(self.primes)

    def __contains__(self, p):
        return p in self.primes

    def index(self, p: int) -> int:
        return self.primes.index(p)

    def __str__(self):
        return "{" + ",".join(map(str, self.primes)) + "}"


def gamma_check(x, primes: Iterable[int]) -> bool:
    """True iff the denominator of ``x`` factors over ``primes``."""
    den = Fraction(x).denominator
    for p in primes:
        while den % p == 0:
            den //= p
    return den == 1


@dataclass(frozen=True)
class AdeleScalar:
    primes: PrimeSet
    real: QuadReal
    parts: tuple[Fraction, ...]

    def __post_init__(self):
        object.__setattr__(self, "real", as_quad(self.real))
        parts = tuple(Fraction(x) for x in self.parts)
        if len(parts) != len(self.primes):
            raise ValueError("need exactly one p-adic part per prime")
        object.__setattr__(self, "parts", parts)

    def part(self, p: int) -> Fraction:
        return self.parts[self.primes.index(p)]

    def __add__(self, other: "AdeleScalar") -> "AdeleScalar":
        _same_primes(self.primes, other.primes)
        return AdeleScalar(self.primes, self.real + other.real,
                           tuple(a + b for a, b in zip(self.parts, other.parts)))

    def __neg__(self):
        return AdeleScalar(self.primes, -self.real, tuple(-a for a in self.parts))

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c) -> "AdeleScalar":
        c = Fraction(c)
        return AdeleScalar(self.primes, self.real * c, tuple(a * c for a in self.parts))


def _same_primes(a: PrimeSet, b: PrimeSet) -> None:
    if a != b:
        raise ValueError(f"ambient prime sets differ: {a} vs {b}")


def diagonal_embed(gamma, primes: PrimeSet) -> AdeleScalar:
    """The adele (gamma, gamma, ...) for gamma in Gamma_Q."""
    gamma = Fraction(gamma)
    if not gamma_check(gamma, primes):
        raise ValueError(f"{gamma} is not in Z[1/p : p in {primes}]")
    return AdeleScalar(primes, QuadReal(gamma), (gamma,) * len(primes))


@dataclass(frozen=True)
class GammaVector:
    primes: PrimeSet
    entries: tuple[Fraction, ...]

    def __post_init__(self):
        entries = tuple(Fraction(x) for x in self.entries)
        for j, x in enumerate(entries):
            if not gamma_check(x, self.primes):
                raise ValueError(f"gamma[{j}] = {x} is not in Gamma_{self.primes}")
        object.__setattr__(self, "entries", entries)

    @property
    def dim(self) -> int:
        return len(self.entries)

    def is_zero(self) -> bool:
        return not any(self.entries)

    def __getitem__(self, j):
        return self.entries[j]

    def __iter__(self):
        return iter(self.entries)

    def __neg__(self):
        return GammaVector(self.primes, tuple(-x for x in self.entries))

    def __add__(self, other: "GammaVector"):
        _same_primes(self.primes, other.primes)
        return GammaVector(self.primes, tuple(a + b for a, b in zip(self.entries, other.entries)))

    def embed(self) -> "AdeleVector":
        return AdeleVector(self.primes, tuple(diagonal_embed(x, self.primes) for x in self.entries))


@dataclass(frozen=True)
class AdeleVector:
    primes: PrimeSet
    coords: tuple[AdeleScalar, ...]

    def __post_init__(self):
        coords = tuple(self.coords)
        if not coords:
            raise ValueError("dimension must be at least 1")
        for c in coords:
            _same_primes(self.primes, c.primes)
        object.__setattr__(self, "coords", coords)

    @classmethod
    def build(cls, primes: PrimeSet, reals: Sequence, parts: Mapping[int, Sequence] | None = None):
        """Build from real coordinates and ``{p: [x_p1, ..., x_pd]}`` (missing primes are 0)."""
        parts = dict(parts or {})
        unknown = set(parts) - set(primes)
        if unknown:
            raise ValueError(f"p-parts given for primes outside {primes}: {sorted(unknown)}")
        d = len(reals)
        for p, xs in parts.items():
            if len(xs) != d:
                raise ValueError(f"{p}-adic part has length {len(xs)}, expected {d}")
        coords = tuple(
            AdeleScalar(primes, as_quad(reals[j]),
                        tuple(Fraction(parts[p][j]) if p in parts else Fraction(0) for p in primes))
            for j in range(d)
        )
        return cls(primes, coords)

    @classmethod
    def zero(cls, primes: PrimeSet, d: int) -> "AdeleVector":
        return cls.build(primes, [0] * d)

    @property
    def dim(self) -> int:
        return len(self.coords)

    @property
    def real(self) -> tuple[QuadReal, ...]:
        return tuple(c.real for c in self.coords)

    def part(self, p: int) -> tuple[Fraction, ...]:
        i = self.primes.index(p)
        return tuple(c.parts[i] for c in self.coords)

    def __add__(self, other: "AdeleVector") -> "AdeleVector":
        self._check(other)
        return AdeleVector(self.primes, tuple(a + b for a, b in zip(self.coords, other.coords)))

    def __sub__(self, other: "AdeleVector") -> "AdeleVector":
        self._check(other)
        return AdeleVector(self.primes, tuple(a - b for a, b in zip(self.coords, other.coords)))

    def __neg__(self):
        return AdeleVector(self.primes, tuple(-a for a in self.coords))

    def scale(self, c) -> "AdeleVector":
        return AdeleVector(self.primes, tuple(a.scale(c) for a in self.coords))

    def scale_coords(self, factors: Sequence) -> "AdeleVector":
        """Multiply coordinate j by ``factors[j]`` at every place."""
        if len(factors) != self.dim:
            raise ValueError("one factor per coordinate expected")
        return AdeleVector(self.primes, tuple(a.scale(f) for a, f in zip(self.coords, factors)))

    def restrict(self, indices: Sequence[int]) -> "AdeleVector":
        return AdeleVector(self.primes, tuple(self.coords[j] for j in indices))

    def _check(self, other):
        _same_primes(self.primes, other.primes)
        if self.dim != other.dim:
            raise ValueError(f"dimension mismatch: {self.dim} vs {other.dim}")

    def in_fundamental_domain(self) -> bool:
        for c in self.coords:
            if c.real.sign() < 0 or (c.real - 1).sign() >= 0:
                return False
            if any(part.denominator % p == 0 for p, part in zip(self.primes, c.parts)):
                return False
        return True


def reduce_mod_gamma(x: AdeleVector) -> tuple[AdeleVector, GammaVector]:
    """Representative of ``x`` in [0,1)^d x prod Z_p^d and the Gamma_Q^d shift removed."""
    primes = x.primes
    coords, shifts = [], []
    for c in x.coords:
        g0 = sum((padic_frac(a, p) for p, a in zip(primes, c.parts)), Fraction(0))
        real = c.real - g0
        m, real = quad_floor_frac(real)
        shift = g0 + m
        coords.append(AdeleScalar(primes, real, tuple(a - shift for a in c.parts)))
        shifts.append(shift)
    return AdeleVector(primes, tuple(coords)), GammaVector(primes, tuple(shifts))


def _check_dims(gamma: GammaVector, x: AdeleVector):
    _same_primes(gamma.primes, x.primes)
    if gamma.dim != x.dim:
        raise ValueError(f"dimension mismatch: gamma has {gamma.dim}, point has {x.dim}")


def character_phase(gamma: GammaVector, x: AdeleVector) -> QuadReal:
    """Unreduced phase sum_j (gamma_j x_inf,j - sum_p {gamma_j x_p,j}_p)."""
    _check_dims(gamma, x)
    total = QuadReal()
    rational = Fraction(0)
    for g, c in zip(gamma.entries, x.coords):
        if not g:
            continue
        total = total + c.real * g
        for p, a in zip(x.primes, c.parts):
            rational -= padic_frac(g * a, p)
    return total + rational


def theta(gamma: GammaVector, alpha: AdeleVector) -> QuadReal:
    """Rotation number of the character gamma along the orbit of alpha."""
    return character_phase(gamma, alpha)


def phase_mod1(gamma: GammaVector, x: AdeleVector) -> QuadReal:
    return quad_floor_frac(character_phase(gamma, x))[1]


@dataclass(frozen=True)
class ComplexInterval:
    re: Interval
    im: Interval

    def __add__(self, other: "ComplexInterval") -> "ComplexInterval":
        return ComplexInterval(self.re + other.re, self.im + other.im)

    def scale(self, c) -> "ComplexInterval":
        return ComplexInterval(self.re.scale(c), self.im.scale(c))

    @property
    def width(self) -> Fraction:
        return max(self.re.width, self.im.width)

    def abs_squared(self) -> Interval:
        return self.re.square() + self.im.square()

    def overlaps(self, other: "ComplexInterval") -> bool:
        return self.re.overlaps(other.re) and self.im.overlaps(other.im)

    def __complex__(self):
        return complex(float(self.re), float(self.im))


@lru_cache(maxsize=16)
def _iv_context(bits: int):
    ctx = type(mpmath.iv)()
    ctx.prec = bits
    return ctx


def _mpf_to_fraction(m) -> Fraction:
    sign, man, exp, _ = m
    v = Fraction(int(man)) * (Fraction(2) ** exp)
    return -v if sign else v


def _iv_to_interval(x, precision: int) -> Interval:
    lo, hi = x._mpi_
    return Interval(_mpf_to_fraction(lo), _mpf_to_fraction(hi), precision)


def _iv_from_interval(ctx, iv: Interval):
    # outward rounding in the interval context keeps the enclosure valid
    def enclose(q: Fraction):
        return ctx.mpf(q.numerator) / ctx.mpf(q.denominator)

    return ctx.mpf([enclose(iv.lo).a, enclose(iv.hi).b])


def expi2pi(phase: QuadReal, precision: int) -> ComplexInterval:
    """Enclosure of e(phase) = exp(2 pi i phase)."""
    bits = precision + 16
    ctx = _iv_context(bits)
    t = _iv_from_interval(ctx, quad_eval(phase, bits))
    arg = 2 * ctx.pi * t
    return ComplexInterval(_iv_to_interval(ctx.cos(arg), precision),
                           _iv_to_interval(ctx.sin(arg), precision))


def character_eval(gamma: GammaVector, x: AdeleVector, precision: int = 64) -> ComplexInterval:
    """Enclosure of psi_gamma(x); the phase is reduced mod 1 exactly first."""
    return expi2pi(phase_mod1(gamma, x), precision)


def weyl_phases(gamma: GammaVector, alpha: AdeleVector, N: int, path: str = "theta") -> list[QuadReal]:
    """Exact phases of psi_gamma(n alpha) mod 1 for n = 1..N.

    ``path="theta"`` uses {n * theta}; ``path="orbit"`` evaluates the character
    on the reduced orbit point n*alpha mod Gamma_Q^d.
    """
    if N < 0:
        raise ValueError("N must be nonnegative")
    if path == "theta":
        th = theta(gamma, alpha)
        return [quad_floor_frac(th * n)[1] for n in range(1, N + 1)]
    if path == "orbit":
        out = []
        x = AdeleVector.zero(alpha.primes, alpha.dim)
        for _ in range(N):
            x, _shift = reduce_mod_gamma(x + alpha)
            out.append(phase_mod1(gamma, x))
        return out
    raise ValueError(f"unknown path {path!r}")


def weyl_sum(gamma: GammaVector, alpha: AdeleVector, N: int, precision: int = 64,
             path: str = "theta") -> ComplexInterval:
    """Enclosure of (1/N) sum_{n=1}^{N} psi_gamma(n alpha)."""
    if N < 1:
        raise ValueError("N must be at least 1")
    zero = Interval(Fraction(0), Fraction(0), precision)
    acc = ComplexInterval(zero, zero)
    for ph in weyl_phases(gamma, alpha, N, path):
        acc = acc + expi2pi(ph, precision)
    return acc.scale(Fraction(1, N))


def geometric_abs_squared(th: QuadReal, N: int, precision: int = 64) -> Interval:
    """Enclosure of |(1/N) sum_{n=1}^N e(n th)|^2 = sin^2(pi N th) / (N sin(pi th))^2."""
    th = quad_floor_frac(th)[1]
    if th.is_zero():
        return Interval(Fraction(1), Fraction(1), precision)
    bits = precision + 16 + N.bit_length()
    ctx = _iv_context(bits)
    t = _iv_from_interval(ctx, quad_eval(th, bits))
    num = ctx.sin(ctx.pi * N * t)
    den = N * ctx.sin(ctx.pi * t)
    return _iv_to_interval((num * num) / (den * den), precision)


@dataclass(frozen=True)
class ErgodicityResult:
    """Verdict on Q-independence of 1, alpha_inf,1, ..., alpha_inf,d.

    When dependent, ``relation`` and ``constant`` are integers with
    ``sum relation[j] * alpha_inf,j + constant == 0``.
    """

    ergodic: bool
    rank: int
    dim: int
    relation: tuple[int, ...] | None = None
    constant: int | None = None

    def verify(self, reals: Sequence[QuadReal]) -> bool:
        if self.ergodic:
            return self.relation is None
        total = QuadReal(self.constant)
        for c, a in zip(self.relation, reals):
            total = total + as_quad(a) * c
        return total.is_zero() and any(self.relation)

    def describe(self) -> str:
        if self.ergodic:
            return f"ergodic (rank {self.rank} = d)"
        rel = ", ".join(str(c) for c in self.relation)
        return f"non-ergodic: relation ({rel}), constant {self.constant}"


def _real_coords(alpha) -> list[QuadReal]:
    if isinstance(alpha, AdeleVector):
        return list(alpha.real)
    return [as_quad(a) for a in alpha]


def check_ergodic(alpha) -> ErgodicityResult:
    """Decide whether rotation by ``alpha`` (or by the given real parts) is ergodic."""
    reals = _real_coords(alpha)
    d = len(reals)
    radicands = sorted({n for a in reals for n in a.radicands()})
    M = [[a.coefficient(n) for n in radicands] for a in reals]
    rank = rational_rank(M) if radicands else 0
    if rank == d:
        return ErgodicityResult(True, rank, d)
    if radicands:
        kernel = left_kernel(M)
        c = kernel[0]
    else:
        c = [Fraction(1)] + [Fraction(0)] * (d - 1)
    const = -sum((cj * a.coefficient(1) for cj, a in zip(c, reals)), Fraction(0))
    ints = primitive_integer_vector(list(c) + [const])
    return ErgodicityResult(False, rank, d, tuple(ints[:-1]), ints[-1])
