"""Construction of polytopal bounded remainder sets on the adelic torus.

Given a rotation alpha with 1, alpha_inf,1, ..., alpha_inf,d independent over
Q and a volume label (gamma, eta), :func:`construct_brs` builds the set

    A = P_A x prod_p (delta_1 Z_p x ... x delta_d Z_p)

together with the auxiliary data (delta, g, beta, eta', P_B) through which
the set is related to a rotation of the real torus R^d / Z^d.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .adeles import AdeleVector, ErgodicityResult, GammaVector, PrimeSet, check_ergodic, theta
from .exactnum import QuadReal, as_quad, padic_abs, padic_frac, quad_sign
from .intlat import Parallelotope, count_lattice_translates, unimodular_completion


class NotRepresentable(ValueError):
    """The requested (gamma, eta) label gives a negative volume."""


class NonErgodicRotation(ValueError):
    """The rotation fails the independence hypothesis."""

    def __init__(self, result: ErgodicityResult):
        super().__init__(result.describe())
        self.result = result


class ConstructionError(AssertionError):
    """An exact identity of the construction failed; indicates an arithmetic bug."""


@dataclass(frozen=True)
class RotationSpec:
    alpha: AdeleVector
    certificate: ErgodicityResult

    @classmethod
    def of(cls, alpha: AdeleVector) -> "RotationSpec":
        return cls(alpha, check_ergodic(alpha))

    @property
    def ergodic(self) -> bool:
        return self.certificate.ergodic

    @property
    def primes(self) -> PrimeSet:
        return self.alpha.primes

    @property
    def dim(self) -> int:
        return self.alpha.dim


@dataclass(frozen=True)
class VolumeSpec:
    gamma: GammaVector
    eta: int

    def __post_init__(self):
        object.__setattr__(self, "eta", int(self.eta))


def denominator_of(gamma, primes: PrimeSet) -> tuple[int, int]:
    """(delta, g): delta is the product of |gamma|_p over p with |gamma|_p > 1, g = gamma * delta."""
    gamma = Fraction(gamma)
    delta = Fraction(1)
    for p in primes:
        a = padic_abs(gamma, p)
        if a > 1:
            delta *= a
    g = gamma * delta
    if delta.denominator != 1 or g.denominator != 1:
        raise ValueError(f"{gamma} is not in Gamma_{primes}")
    return int(delta), int(g)


def volume_of(spec: VolumeSpec, alpha: AdeleVector) -> QuadReal:
    return theta(spec.gamma, alpha) + spec.eta


def beta_eta(spec: VolumeSpec, alpha: AdeleVector) -> tuple[tuple[QuadReal, ...], int]:
    """The real rotation beta and the integer eta' with V = g . beta + eta'."""
    primes = alpha.primes
    if any(x == 0 for x in spec.gamma):
        raise ValueError("beta_eta needs every gamma_j nonzero")
    beta, eta_p = [], Fraction(spec.eta)
    for gj, c in zip(spec.gamma, alpha.coords):
        delta, g = denominator_of(gj, primes)
        frac_sum = Fraction(0)
        for p, a in zip(primes, c.parts):
            f = padic_frac(a / delta, p)
            frac_sum += f
            eta_p += g * f - padic_frac(g * a / delta, p)
        beta.append(c.real / delta - frac_sum)
    if eta_p.denominator != 1:
        raise ConstructionError(f"eta' = {eta_p} is not an integer")
    eta_p = int(eta_p)
    gs = [denominator_of(gj, primes)[1] for gj in spec.gamma]
    V = volume_of(spec, alpha)
    rhs = sum((b * g for b, g in zip(beta, gs)), QuadReal()) + eta_p
    if rhs != V:
        raise ConstructionError(f"V = {V} but g.beta + eta' = {rhs}")
    return tuple(beta), eta_p


def spanning_data(g: Sequence[int], eta_prime: int) -> tuple[tuple[int, tuple[int, ...]], ...]:
    """(m_i, z_i) with v_i = m_i * beta + z_i for the spanning vectors of P_B."""
    A = unimodular_completion(g)
    G = sum(a * x for a, x in zip(A[0], g))
    rows = [(G, tuple(eta_prime * a for a in A[0]))]
    rows += [(0, tuple(r)) for r in A[1:]]
    return tuple(rows)


def build_PB(g: Sequence[int], eta_prime: int, beta: Sequence[QuadReal]) -> Parallelotope:
    """Parallelotope of volume g . beta + eta' spanned by vectors in Z beta + Z^d.

    v_1 = G beta + eta' a_1 and v_i = a_i (i >= 2), where (a_i) is a
    unimodular completion of g with a_1 . g = G.  Only the first row is
    irrational, so the determinant is eta' + G (beta . g / G) = g . beta + eta'.
    """
    g = [int(x) for x in g]
    if not any(g):
        raise ValueError("build_PB needs g != 0")
    beta = [as_quad(b) for b in beta]
    spans = tuple(
        tuple(b * m + z for b, z in zip(beta, zs)) for m, zs in spanning_data(g, eta_prime)
    )
    P = Parallelotope(spans)
    V = sum((b * x for b, x in zip(beta, g)), QuadReal()) + eta_prime
    if quad_sign(V) <= 0:
        raise ValueError("g . beta + eta' must be positive")
    if P.det != V:
        raise ConstructionError(f"det(P_B) = {P.det} differs from {V}")
    return P


@dataclass(frozen=True)
class AdelicPolytope:
    """Multiset  multiplicity * (P x prod_p prod_j radii[j] Z_p)  on the adelic torus."""

    primes: PrimeSet
    real: Parallelotope
    radii: tuple[int, ...]
    multiplicity: int = 1

    def __post_init__(self):
        radii = tuple(int(r) for r in self.radii)
        if len(radii) != self.real.dim:
            raise ValueError("one radius per coordinate expected")
        if any(r < 1 for r in radii):
            raise ValueError("radii must be positive integers")
        object.__setattr__(self, "radii", radii)

    @property
    def dim(self) -> int:
        return self.real.dim

    @property
    def volume(self) -> QuadReal:
        """Haar measure: real volume times prod |radius|_p over the ambient primes."""
        ball = Fraction(1)
        for r in self.radii:
            for p in self.primes:
                ball *= padic_abs(r, p)
        return self.real.volume * (ball * self.multiplicity)

    def count(self, x: AdeleVector, method: str = "auto") -> int:
        """Number of gamma in Gamma_Q^d with x + gamma in the set."""
        if x.primes != self.primes or x.dim != self.dim:
            raise ValueError("point does not live on this torus")
        if self.multiplicity == 0:
            return 0
        y = []
        for c, delta in zip(x.coords, self.radii):
            # x_p + gamma in delta Z_p for all p forces gamma = delta (k + offset)
            offset = Fraction(0)
            for p, a in zip(self.primes, c.parts):
                offset += padic_frac(-a / delta, p)
            y.append(c.real + offset * delta)
        return self.multiplicity * count_lattice_translates(self.real, y, self.radii, method)


def unit_cube(d: int) -> Parallelotope:
    return Parallelotope(tuple(tuple(QuadReal(int(i == j)) for j in range(d)) for i in range(d)))


@dataclass(frozen=True)
class BRSSet:
    """A constructed bounded remainder set with its construction record.

    ``A`` is the set itself on the full d-dimensional torus.  The remaining
    fields describe the block of coordinates with gamma_j != 0 and are None
    when gamma = 0 (then A is ``multiplicity`` copies of the whole torus).
    """

    spec: VolumeSpec
    primes: PrimeSet
    volume: QuadReal
    A: AdelicPolytope
    block: tuple[int, ...]
    zero_coords: tuple[int, ...]
    delta: tuple[int, ...] = ()
    g: tuple[int, ...] = ()
    beta: tuple[QuadReal, ...] = ()
    eta_prime: int | None = None
    P_B: Parallelotope | None = None
    P_A: Parallelotope | None = None
    spanning: tuple = ()

    @property
    def dim(self) -> int:
        return self.A.dim

    @property
    def multiplicity(self) -> int:
        return self.A.multiplicity

    @property
    def is_whole_space(self) -> bool:
        return not self.block

    @property
    def is_empty(self) -> bool:
        return self.A.multiplicity == 0

    @property
    def B(self) -> AdelicPolytope | None:
        if self.P_B is None:
            return None
        return AdelicPolytope(self.primes, self.P_B, (1,) * len(self.block))

    def block_alpha(self, alpha: AdeleVector) -> AdeleVector:
        """D^-1 alpha restricted to the nonzero-gamma block."""
        return alpha.restrict(self.block).scale_coords([Fraction(1, dj) for dj in self.delta])


def construct_brs(spec: VolumeSpec, rot: RotationSpec) -> BRSSet:
    if not rot.ergodic:
        raise NonErgodicRotation(rot.certificate)
    alpha = rot.alpha
    if spec.gamma.primes != rot.primes or spec.gamma.dim != rot.dim:
        raise ValueError("volume label and rotation live on different tori")
    d, primes = rot.dim, rot.primes
    V = volume_of(spec, alpha)
    if quad_sign(V) < 0:
        raise NotRepresentable(f"volume {V} is negative")
    block = tuple(j for j in range(d) if spec.gamma[j] != 0)
    zeros = tuple(j for j in range(d) if spec.gamma[j] == 0)
    if not block:
        A = AdelicPolytope(primes, unit_cube(d), (1,) * d, spec.eta)
        return BRSSet(spec, primes, V, A, block, zeros)

    sub_spec = VolumeSpec(GammaVector(primes, tuple(spec.gamma[j] for j in block)), spec.eta)
    sub_alpha = alpha.restrict(block)
    dg = [denominator_of(x, primes) for x in sub_spec.gamma]
    delta = tuple(x for x, _ in dg)
    g = tuple(x for _, x in dg)
    beta, eta_p = beta_eta(sub_spec, sub_alpha)
    P_B = build_PB(g, eta_p, beta)
    P_A = P_B.scaled(delta)
    radii = [1] * d
    for j, dj in zip(block, delta):
        radii[j] = dj
    A = AdelicPolytope(primes, P_A.embedded(d, block), tuple(radii))
    out = BRSSet(spec, primes, V, A, block, zeros, delta, g, beta, eta_p, P_B, P_A,
                 spanning_data(g, eta_p))
    failed = [k for k, ok in verify_construction(out, alpha).items() if not ok]
    if failed:
        raise ConstructionError(f"construction identities failed: {failed}")
    return out


def verify_construction(brs: BRSSet, alpha: AdeleVector) -> dict[str, bool]:
    """Exact checks of the volume identities and of the spanning lattice."""
    V = brs.volume
    checks = {"volume_formula": V == volume_of(brs.spec, alpha)}
    checks["haar_volume"] = brs.A.volume == V
    if brs.is_whole_space:
        return checks
    prod_delta = math.prod(brs.delta)
    checks["g_beta_eta"] = sum((b * x for b, x in zip(brs.beta, brs.g)), QuadReal()) + brs.eta_prime == V
    checks["det_PB"] = brs.P_B.det == V
    checks["det_PA"] = brs.P_A.det == V * prod_delta
    in_lattice = True
    for row, (m, z) in zip(brs.P_B.spans, brs.spanning):
        expect = tuple(b * m + zi for b, zi in zip(brs.beta, z))
        in_lattice &= row == expect and isinstance(m, int) and all(isinstance(zi, int) for zi in z)
    checks["spans_in_lattice"] = in_lattice
    return checks


def chi_A(brs: BRSSet, x: AdeleVector, method: str = "auto") -> int:
    return brs.A.count(x, method)


def chi_B(brs: BRSSet, x: AdeleVector, method: str = "auto") -> int:
    """Count for B = P_B x prod Z_p^d at a point of the nonzero-gamma block."""
    if brs.B is None:
        raise ValueError("B is only defined when some gamma_j is nonzero")
    return brs.B.count(x, method)


def chi_PB(P_B: Parallelotope, y: Sequence, method: str = "auto") -> int:
    """Multiset indicator of P_B on R^d / Z^d."""
    return count_lattice_translates(P_B, y, method=method)


# -- serialization -----------------------------------------------------------

def _qstr(x: QuadReal) -> str:
    return as_quad(x).to_string()


def _parallelotope_to_dict(P: Parallelotope) -> dict:
    return {
        "spans": [[_qstr(x) for x in row] for row in P.spans],
        "anchor": [_qstr(x) for x in P.anchor],
    }


def _parallelotope_from_dict(data: dict) -> Parallelotope:
    return Parallelotope(
        tuple(tuple(QuadReal.from_string(x) for x in row) for row in data["spans"]),
        tuple(QuadReal.from_string(x) for x in data["anchor"]),
    )


def brs_to_dict(brs: BRSSet) -> dict:
    out = {
        "primes": list(brs.primes),
        "dim": brs.dim,
        "gamma": [str(x) for x in brs.spec.gamma],
        "eta": brs.spec.eta,
        "volume": _qstr(brs.volume),
        "volume_text": str(brs.volume),
        "block": list(brs.block),
        "zero_coords": list(brs.zero_coords),
        "A": {
            **_parallelotope_to_dict(brs.A.real),
            "radii": list(brs.A.radii),
            "multiplicity": brs.A.multiplicity,
        },
    }
    if not brs.is_whole_space:
        out.update({
            "delta": list(brs.delta),
            "g": list(brs.g),
            "beta": [_qstr(b) for b in brs.beta],
            "eta_prime": brs.eta_prime,
            "P_B": _parallelotope_to_dict(brs.P_B),
            "P_A": _parallelotope_to_dict(brs.P_A),
            "spanning": [{"beta_coeff": m, "offset": list(z)} for m, z in brs.spanning],
        })
    return out


def brs_from_dict(data: dict) -> BRSSet:
    primes = PrimeSet(tuple(data["primes"]))
    spec = VolumeSpec(GammaVector(primes, tuple(Fraction(x) for x in data["gamma"])), data["eta"])
    A = AdelicPolytope(primes, _parallelotope_from_dict(data["A"]), tuple(data["A"]["radii"]),
                       data["A"]["multiplicity"])
    kw = {}
    if data["block"]:
        kw = dict(
            delta=tuple(data["delta"]),
            g=tuple(data["g"]),
            beta=tuple(QuadReal.from_string(b) for b in data["beta"]),
            eta_prime=data["eta_prime"],
            P_B=_parallelotope_from_dict(data["P_B"]),
            P_A=_parallelotope_from_dict(data["P_A"]),
            spanning=tuple((int(s["beta_coeff"]), tuple(int(z) for z in s["offset"]))
                           for s in data["spanning"]),
        )
    return BRSSet(spec, primes, QuadReal.from_string(data["volume"]), A,
                  tuple(data["block"]), tuple(data["zero_coords"]), **kw)
