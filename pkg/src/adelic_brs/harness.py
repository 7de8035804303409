"""Empirical verification: Birkhoff sums, lemma-chain checks, volume enumeration."""

from __future__ import annotations

import csv
import itertools
import random
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence, TextIO

from .adeles import AdeleVector, GammaVector, PrimeSet, check_ergodic, gamma_check, reduce_mod_gamma, theta
from .brs import (
    AdelicPolytope,
    BRSSet,
    RotationSpec,
    VolumeSpec,
    chi_A,
    chi_B,
    chi_PB,
    construct_brs,
    volume_of,
)
from .exactnum import (
    QuadReal,
    as_quad,
    padic_abs,
    padic_frac,
    padic_val,
    quad_ceil,
    quad_eval,
    quad_floor,
    quad_sign,
)
from .intlat import Parallelotope


def format_quad(x, precision: int = 64) -> str:
    """Decimal rendering of an exact value, correct to about ``precision`` bits."""
    iv = quad_eval(as_quad(x), precision)
    digits = max(1, int((precision - 1) * 0.30103))
    mid = iv.midpoint
    scaled = round(mid * 10**digits)
    sign = "-" if scaled < 0 else ""
    q, r = divmod(abs(scaled), 10**digits)
    return f"{sign}{q}.{r:0{digits}d}"


# -- Birkhoff sums -------------------------------------------------------------

@dataclass(frozen=True)
class OrbitSeries:
    """Counts chi(x0 + n alpha) for n < n_max and the discrepancy S_N = sum - N V.

    Counts and V are exact; ``deviations`` holds S_0..S_{n_max} as floats for
    reporting.
    """

    volume: QuadReal
    step_counts: tuple[int, ...]
    stride: int
    deviations: tuple[float, ...] = field(repr=False)

    @classmethod
    def from_counts(cls, volume: QuadReal, counts: Sequence[int], stride: int = 1) -> "OrbitSeries":
        v = quad_eval(volume, 160).midpoint
        devs, total = [0.0], 0
        for n, c in enumerate(counts, start=1):
            total += c
            devs.append(float(total - n * v))
        return cls(volume, tuple(counts), max(1, int(stride)), tuple(devs))

    @property
    def n_max(self) -> int:
        return len(self.step_counts)

    def cumulative(self, N: int) -> int:
        return sum(self.step_counts[:N])

    def S(self, N: int) -> QuadReal:
        """Exact S_N."""
        return QuadReal(self.cumulative(N)) - self.volume * N

    @property
    def max_abs(self) -> float:
        return max(abs(x) for x in self.deviations)

    @property
    def argmax(self) -> int:
        m = self.max_abs
        return next(i for i, x in enumerate(self.deviations) if abs(x) == m)

    def max_abs_between(self, lo: int, hi: int) -> float:
        """max |S_N| over lo <= N <= hi."""
        hi = min(hi, self.n_max)
        return max(abs(x) for x in self.deviations[lo:hi + 1])

    def sample_points(self) -> list[int]:
        pts = list(range(0, self.n_max + 1, self.stride))
        if pts[-1] != self.n_max:
            pts.append(self.n_max)
        return pts

    def rows(self, precision: int = 64) -> list[tuple]:
        out, total, last = [], 0, 0
        for N in self.sample_points():
            total += sum(self.step_counts[last:N])
            last = N
            NV = self.volume * N
            out.append((N, total, format_quad(NV, precision), format_quad(QuadReal(total) - NV, precision)))
        return out

    def to_csv(self, fh: TextIO, precision: int = 64) -> None:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["N", "count", "N_times_V", "S_N"])
        w.writerows(self.rows(precision))


def _target(target) -> tuple[AdelicPolytope, QuadReal]:
    if isinstance(target, BRSSet):
        return target.A, target.volume
    if isinstance(target, AdelicPolytope):
        return target, target.volume
    raise TypeError("expected a BRSSet or AdelicPolytope")


def _alpha(rot) -> AdeleVector:
    return rot.alpha if isinstance(rot, RotationSpec) else rot


def _chunk_counts(args) -> list[int]:
    polytope, alpha, x0, start, stop, method = args
    x, _ = reduce_mod_gamma(x0 + alpha.scale(start))
    out = []
    for _ in range(start, stop):
        out.append(polytope.count(x, method))
        x, _ = reduce_mod_gamma(x + alpha)
    return out


def _splits(n: int, parts: int) -> list[tuple[int, int]]:
    parts = max(1, min(parts, n)) if n else 1
    edges = [n * i // parts for i in range(parts + 1)]
    return list(zip(edges, edges[1:]))


def orbit_counts(target, rot, x0: AdeleVector | None = None, n_max: int = 0, partitions: int = 1,
                 workers: int = 1, method: str = "auto") -> list[int]:
    """chi(x0 + n alpha) for 0 <= n < n_max, independent of the partition of the range."""
    polytope, _ = _target(target)
    alpha = _alpha(rot)
    if x0 is None:
        x0 = AdeleVector.zero(alpha.primes, alpha.dim)
    if n_max <= 0:
        return []
    jobs = [(polytope, alpha, x0, a, b, method) for a, b in _splits(n_max, max(partitions, workers))]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            chunks = list(pool.map(_chunk_counts, jobs))
    else:
        chunks = [_chunk_counts(j) for j in jobs]
    return [c for chunk in chunks for c in chunk]


def birkhoff_series(target, rot, x0: AdeleVector | None = None, n_max: int = 0, stride: int = 1,
                    partitions: int = 1, workers: int = 1, method: str = "auto") -> OrbitSeries:
    _, volume = _target(target)
    counts = orbit_counts(target, rot, x0, n_max, partitions, workers, method)
    return OrbitSeries.from_counts(volume, counts, stride)


@dataclass(frozen=True)
class EnvelopeResult:
    early_max: float
    late_max: float
    bound: float
    ok: bool


def envelope_check(series: OrbitSeries, early: int = 1000, late: tuple[int, int] = (10_000, 100_000),
                   factor: float = 3.0, slack: float = 3.0) -> EnvelopeResult:
    """Heuristic boundedness test: late max |S_N| <= factor * early max |S_N| + slack."""
    e = series.max_abs_between(0, early)
    l = series.max_abs_between(*late)
    bound = factor * e + slack
    return EnvelopeResult(e, l, bound, l <= bound)


# -- lemma chain ----------------------------------------------------------------

@dataclass
class LemmaChainReport:
    ok: bool
    n_checked: int
    volume: QuadReal
    violation: dict | None = None
    count_histogram: dict = field(default_factory=dict)

    def summary(self) -> str:
        status = "ok" if self.ok else "VIOLATION"
        return f"lemma chain {status}: n = 0..{self.n_checked - 1}, V = {self.volume}"


def lemma_chain_check(spec: VolumeSpec, rot: RotationSpec, n_test: int, method: str = "auto",
                      brs: BRSSet | None = None) -> LemmaChainReport:
    """Compare chi_A(n alpha), chi_B(n D^-1 alpha) and chi_PB({n beta}) for n = 0..n_test."""
    brs = brs or construct_brs(spec, rot)
    alpha = rot.alpha
    hist: dict = {}
    if brs.is_whole_space:
        for n in range(n_test + 1):
            cA = chi_A(brs, alpha.scale(n), method)
            hist[cA] = hist.get(cA, 0) + 1
            if cA != brs.multiplicity:
                return LemmaChainReport(False, n + 1, brs.volume,
                                        {"n": n, "chi_A": cA, "expected": brs.multiplicity}, hist)
        return LemmaChainReport(True, n_test + 1, brs.volume, None, hist)
    scaled = brs.block_alpha(alpha)
    for n in range(n_test + 1):
        x = alpha.scale(n)
        cA = chi_A(brs, x, method)
        xb = scaled.scale(n)
        cB = chi_B(brs, xb, method)
        y = [(b * n).frac() for b in brs.beta]
        cP = chi_PB(brs.P_B, y, method)
        hist[cA] = hist.get(cA, 0) + 1
        if not cA == cB == cP:
            state = {
                "n": n, "chi_A": cA, "chi_B": cB, "chi_PB": cP,
                "gamma": [str(g) for g in spec.gamma], "eta": spec.eta,
                "delta": list(brs.delta), "g": list(brs.g), "eta_prime": brs.eta_prime,
                "beta": [b.to_string() for b in brs.beta],
                "orbit_point_real": [r.to_string() for r in x.real],
                "beta_orbit": [v.to_string() for v in y],
            }
            return LemmaChainReport(False, n + 1, brs.volume, state, hist)
    return LemmaChainReport(True, n_test + 1, brs.volume, None, hist)


# -- randomized exact suites ------------------------------------------------------

def random_gamma(rng: random.Random, primes: PrimeSet, max_exp: int = 6, num_bound: int = 10**6) -> Fraction:
    den = 1
    for p in primes:
        den *= p ** rng.randint(0, max_exp)
    return Fraction(rng.randint(-num_bound, num_bound), den)


def integrality_failures(primes: PrimeSet, count: int, rng: random.Random) -> list[Fraction]:
    """Random lambda in Gamma_Q with lambda - sum_p {lambda}_p not an integer."""
    bad = []
    for _ in range(count):
        lam = random_gamma(rng, primes)
        r = lam - sum((padic_frac(lam, p) for p in primes), Fraction(0))
        if r.denominator != 1:
            bad.append(lam)
    return bad


def random_rational(rng: random.Random, num_bound: int = 10**6, den_bound: int = 10**4) -> Fraction:
    # mix in prime powers so that small primes divide denominators often
    den = rng.randint(1, den_bound) * rng.choice([1, 2, 4, 8, 3, 9, 27, 5, 25, 7, 11, 121, 6, 12, 30])
    return Fraction(rng.randint(-num_bound, num_bound), den)


def padic_property_failures(count: int, rng: random.Random, primes: Sequence[int] = (2, 3, 5, 7, 11)) -> list:
    """Exact p-adic identities on random rationals; returns the failing cases."""
    bad = []
    for _ in range(count):
        x = random_rational(rng)
        y = random_rational(rng)
        for p in primes:
            f = padic_frac(x, p)
            den = f.denominator
            while den % p == 0:
                den //= p
            integral = padic_val(x, p) >= 0
            ok = (
                0 <= f < 1
                and den == 1
                and padic_val(x - f, p) >= 0
                and ((f == 0) == integral)
                and padic_abs(x * y, p) == padic_abs(x, p) * padic_abs(y, p)
                and padic_abs(x + y, p) <= max(padic_abs(x, p), padic_abs(y, p))
            )
            if not ok:
                bad.append((x, y, p))
    return bad


_RADICALS = (2, 3, 5, 6, 7)


def random_rotation(rng: random.Random, d: int, primes: PrimeSet, radicals: Sequence[int] = _RADICALS,
                    max_tries: int = 1000) -> RotationSpec:
    """Random ergodic rotation with real parts built from square roots of ``radicals``."""
    for _ in range(max_tries):
        reals = []
        for _ in range(d):
            terms = {1: Fraction(rng.randint(-5, 5), rng.randint(1, 6))}
            for n in rng.sample(list(radicals), rng.randint(1, 2)):
                terms[n] = Fraction(rng.choice([-3, -2, -1, 1, 2, 3]), rng.randint(1, 3))
            reals.append(QuadReal(terms))
        if not check_ergodic(reals).ergodic:
            continue
        parts = {p: [Fraction(rng.randint(-20, 20), rng.randint(1, 12)) for _ in range(d)] for p in primes}
        return RotationSpec.of(AdeleVector.build(primes, reals, parts))
    raise RuntimeError("could not draw an ergodic rotation")


def smooth_numbers(bound: int, primes: Iterable[int]) -> list[int]:
    primes = list(primes)
    return [n for n in range(1, bound + 1) if gamma_check(Fraction(1, n), primes)]


def random_volume_spec(rng: random.Random, rot: RotationSpec, height: int = 100,
                       eta_range: tuple[int, int] = (-3, 3), zero_prob: float = 0.0,
                       max_tries: int = 10_000) -> VolumeSpec:
    """Random (gamma, eta) with positive volume; |numerators| and denominators bounded by ``height``."""
    dens = smooth_numbers(height, rot.primes)
    for _ in range(max_tries):
        gam = []
        for _ in range(rot.dim):
            if rng.random() < zero_prob:
                gam.append(Fraction(0))
                continue
            num = 0
            while num == 0:
                num = rng.randint(-height, height)
            gam.append(Fraction(num, rng.choice(dens)))
        if not any(gam):
            continue
        spec = VolumeSpec(GammaVector(rot.primes, tuple(gam)), rng.randint(*eta_range))
        if quad_sign(volume_of(spec, rot.alpha)) > 0:
            return spec
    raise RuntimeError("no admissible volume label found")


# -- volume enumeration ------------------------------------------------------------

@dataclass(frozen=True)
class VolumeEntry:
    gamma: tuple[Fraction, ...]
    eta: int
    volume: QuadReal


@dataclass(frozen=True)
class VolumeList:
    entries: tuple[VolumeEntry, ...]
    height: int
    eta_range: tuple[int, int] | None
    v_cap: QuadReal | None

    def volumes(self) -> list[QuadReal]:
        return [e.volume for e in self.entries]

    def to_csv(self, fh: TextIO, precision: int = 64) -> None:
        d = len(self.entries[0].gamma) if self.entries else 0
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["V_numeric"] + [f"gamma_{j + 1}" for j in range(d)] + ["eta", "V_exact_expression"])
        for e in self.entries:
            w.writerow([format_quad(e.volume, precision)] + [str(g) for g in e.gamma]
                       + [e.eta, e.volume.to_string()])


def gamma_candidates(height: int, primes: PrimeSet) -> list[Fraction]:
    """Elements of Gamma_Q with |numerator| <= height and denominator <= height."""
    dens = smooth_numbers(max(1, height), primes)
    vals = {Fraction(n, q) for q in dens for n in range(-height, height + 1)}
    return sorted(vals)


def enumerate_volumes(rot: RotationSpec, height: int, eta_range: tuple[int, int] | None = None,
                      v_cap=None) -> VolumeList:
    """Distinct volumes theta(gamma) + eta in [0, v_cap] over a bounded label box.

    Without ``eta_range`` every eta giving a volume in [0, v_cap] is used, so
    the result is the complete set of such volumes for gammas in the box.
    """
    alpha = rot.alpha
    if eta_range is None and v_cap is None:
        raise ValueError("need eta_range or v_cap")
    cap = as_quad(v_cap) if v_cap is not None else None
    cands = gamma_candidates(height, rot.primes)
    found: dict = {}
    for gam in itertools.product(cands, repeat=rot.dim):
        th = theta(GammaVector(rot.primes, gam), alpha)
        if eta_range is not None:
            etas = range(eta_range[0], eta_range[1] + 1)
        else:
            etas = range(quad_ceil(-th), quad_floor(cap - th) + 1)
        for eta in etas:
            V = th + eta
            if quad_sign(V) < 0 or (cap is not None and V > cap):
                continue
            if V not in found:
                found[V] = VolumeEntry(tuple(gam), eta, V)
    entries = sorted(found.values(), key=lambda e: e.volume)
    return VolumeList(tuple(entries), height, eta_range, cap)


# -- controls and diagnostics -------------------------------------------------------

def control_box(volume, d: int, primes: PrimeSet) -> AdelicPolytope:
    """[0, V) x [0, 1)^(d-1) x prod Z_p^d."""
    v = as_quad(volume)
    if quad_sign(v) <= 0:
        raise ValueError("control volume must be positive")
    spans = tuple(tuple(v if (i == j == 0) else QuadReal(int(i == j)) for j in range(d)) for i in range(d))
    return AdelicPolytope(primes, Parallelotope(spans), (1,) * d)


def control_series(volume, rot: RotationSpec, n_max: int, stride: int = 1, **kw) -> OrbitSeries:
    box = control_box(volume, rot.dim, rot.primes)
    return birkhoff_series(box, rot, None, n_max, stride, **kw)


@dataclass(frozen=True)
class TransferEstimate:
    """Finite-window minimum of prefix sums; a non-convergent surrogate for a liminf."""

    exact: QuadReal
    argmin: int
    n_window: int

    @property
    def value(self) -> float:
        return float(self.exact)


def transfer_estimate(target, rot, x: AdeleVector, n_window: int) -> TransferEstimate:
    """min over 1 <= N <= n_window of sum_{n<N} (chi(x + n alpha) - V)."""
    if n_window < 1:
        raise ValueError("n_window must be at least 1")
    polytope, V = _target(target)
    counts = _chunk_counts((polytope, _alpha(rot), x, 0, n_window, "auto"))
    best, arg, total = None, 0, 0
    for N, c in enumerate(counts, start=1):
        total += c
        s = QuadReal(total) - V * N
        if best is None or s < best:
            best, arg = s, N
    return TransferEstimate(best, arg, n_window)


def coboundary_residual(target, rot, x: AdeleVector, n_window: int) -> QuadReal:
    """g(x) - g(x + alpha) - (chi(x) - V) for the windowed estimate g."""
    polytope, V = _target(target)
    alpha = _alpha(rot)
    g0 = transfer_estimate(target, rot, x, n_window).exact
    g1 = transfer_estimate(target, rot, x + alpha, n_window).exact
    return g0 - g1 - (QuadReal(polytope.count(x)) - V)


# -- showcase configurations -----------------------------------------------------------

def _fractional_spec(rot: RotationSpec, gamma: Sequence) -> VolumeSpec:
    """Label (gamma, eta) with eta chosen so that V = {theta(gamma)}."""
    g = GammaVector(rot.primes, tuple(Fraction(x) for x in gamma))
    return VolumeSpec(g, -quad_floor(theta(g, rot.alpha)))


def showcase_configs() -> list[tuple[str, RotationSpec, VolumeSpec]]:
    """Five fixed (rotation, label) pairs used for long orbit runs."""
    S = QuadReal.sqrt
    P2, P3, P23 = PrimeSet.of(2), PrimeSet.of(3), PrimeSet.of(2, 3)
    out = []
    rot = RotationSpec.of(AdeleVector.build(P2, [S(2)], {2: [0]}))
    out.append(("interval sqrt2-1", rot, VolumeSpec(GammaVector(P2, (Fraction(1),)), -1)))
    rot = RotationSpec.of(AdeleVector.build(P2, [S(2)], {2: [Fraction(1, 2)]}))
    out.append(("dyadic half", rot, VolumeSpec(GammaVector(P2, (Fraction(1, 2),)), 1)))
    rot = RotationSpec.of(AdeleVector.build(P3, [S(5)], {3: [Fraction(1, 3)]}))
    out.append(("triadic", rot, _fractional_spec(rot, [Fraction(2, 3)])))
    rot = RotationSpec.of(AdeleVector.build(P23, [S(2), S(3)],
                                            {2: [Fraction(1, 2), 0], 3: [0, Fraction(1, 3)]}))
    out.append(("plane {2,3}", rot, _fractional_spec(rot, [Fraction(1, 2), Fraction(-1, 3)])))
    rot = RotationSpec.of(AdeleVector.build(P2, [S(2), S(3), S(5) + Fraction(1, 7)], {2: [Fraction(1, 4), 0, 1]}))
    out.append(("space, one zero label", rot, _fractional_spec(rot, [1, 0, Fraction(3, 2)])))
    return out
