"""Integer lattice algebra and half-open parallelotopes with exact entries."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Sequence

from .exactnum import QuadReal, as_quad, quad_ceil, quad_floor, quad_sign


def egcd(a: int, b: int) -> tuple[int, int, int]:
    """Return (g, x, y) with a*x + b*y = g = gcd(a, b) >= 0."""
    x0, y0, x1, y1 = 1, 0, 0, 1
    while b:
        q, r = divmod(a, b)
        a, b = b, r
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    if a < 0:
        return -a, -x0, -y0
    return a, x0, y0


def gcd_vector(g: Sequence[int]) -> tuple[int, tuple[int, ...]]:
    """gcd G of a nonzero integer vector and a row a with a . g = G."""
    g = [int(x) for x in g]
    if not any(g):
        raise ValueError("gcd_vector needs a nonzero vector")
    G, coeffs = 0, []
    for x in g:
        G, s, t = egcd(G, x)
        coeffs = [c * s for c in coeffs] + [t]
    return G, tuple(coeffs)


def unimodular_completion(g: Sequence[int]) -> tuple[tuple[int, ...], ...]:
    """Integer matrix A with det A = 1, A g = (gcd(g), 0, ..., 0).

    Row 1 is a Bezout row for g; rows 2..d are a basis of the integer
    vectors orthogonal to g.  For d = 1 the only such matrix is [1], so
    there the first entry of A g is g itself (negative when g is).  Built
    as a product of 2x2 unimodular row operations that fold each entry of g
    into the first one.
    """
    g = [int(x) for x in g]
    d = len(g)
    if not any(g):
        raise ValueError("unimodular_completion needs a nonzero vector")
    U = [[int(i == j) for j in range(d)] for i in range(d)]
    h = list(g)
    for k in range(1, d):
        a, b = h[0], h[k]
        if b == 0:
            continue
        G, x, y = egcd(a, b)
        # [[x, y], [-b/G, a/G]] has determinant 1
        r0 = [x * u + y * v for u, v in zip(U[0], U[k])]
        rk = [(-b // G) * u + (a // G) * v for u, v in zip(U[0], U[k])]
        U[0], U[k] = r0, rk
        h[0], h[k] = G, 0
    if h[0] < 0 and d > 1:
        # flipping two rows keeps det = +1
        U[0] = [-u for u in U[0]]
        U[1] = [-u for u in U[1]]
    return tuple(tuple(r) for r in U)


def integer_det(M: Sequence[Sequence[int]]) -> int:
    """Determinant of an integer matrix by Bareiss elimination."""
    A = [[int(x) for x in row] for row in M]
    n = len(A)
    if n == 0:
        return 1
    sign, prev = 1, 1
    for k in range(n - 1):
        if A[k][k] == 0:
            swap = next((i for i in range(k + 1, n) if A[i][k]), None)
            if swap is None:
                return 0
            A[k], A[swap] = A[swap], A[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                A[i][j] = (A[i][j] * A[k][k] - A[i][k] * A[k][j]) // prev
        prev = A[k][k]
    return sign * A[n - 1][n - 1]


def rational_det(M: Sequence[Sequence]) -> Fraction:
    """Determinant over Q by Gaussian elimination."""
    A = [[Fraction(x) for x in row] for row in M]
    n = len(A)
    det = Fraction(1)
    for k in range(n):
        p = next((i for i in range(k, n) if A[i][k]), None)
        if p is None:
            return Fraction(0)
        if p != k:
            A[k], A[p] = A[p], A[k]
            det = -det
        det *= A[k][k]
        for i in range(k + 1, n):
            f = A[i][k] / A[k][k]
            if f:
                A[i] = [a - f * b for a, b in zip(A[i], A[k])]
    return det


def _is_int_entry(x) -> bool:
    if isinstance(x, int):
        return True
    if isinstance(x, Fraction):
        return x.denominator == 1
    return as_quad(x).is_integer()


def _to_int(x) -> int:
    if isinstance(x, int):
        return x
    if isinstance(x, Fraction):
        return int(x)
    return int(as_quad(x).to_fraction())


def integer_cofactor_row(rows: Sequence[Sequence[int]], skip: int, d: int) -> list[int]:
    """c with det(M) = x . c, where M has the given integer rows and x in row ``skip``."""
    c = []
    for k in range(d):
        minor = [[r[j] for j in range(d) if j != k] for r in rows]
        c.append((-1) ** (skip + k) * integer_det(minor))
    return c


def det_oneirr(M: Sequence[Sequence]) -> QuadReal:
    """Exact determinant of a matrix with at most one non-integer row.

    Cofactor expansion along that row, with the integer cofactors computed
    fraction-free.
    """
    d = len(M)
    bad = [i for i, row in enumerate(M) if not all(_is_int_entry(x) for x in row)]
    if len(bad) > 1:
        raise ValueError("det_oneirr accepts at most one non-integer row")
    r = bad[0] if bad else 0
    others = [[_to_int(x) for x in row] for i, row in enumerate(M) if i != r]
    c = integer_cofactor_row(others, r, d)
    total = QuadReal()
    for x, ck in zip(M[r], c):
        if ck:
            total = total + as_quad(x) * ck
    return total


def det_quad(M: Sequence[Sequence]) -> QuadReal:
    """Determinant of a small QuadReal matrix by Laplace expansion along row 0."""
    M = [[as_quad(x) for x in row] for row in M]
    return _laplace(M, tuple(range(len(M))))


def _laplace(M, cols) -> QuadReal:
    depth = len(M) - len(cols)
    if not cols:
        return QuadReal(1)
    if len(cols) == 1:
        return M[depth][cols[0]]
    total = QuadReal()
    for i, c in enumerate(cols):
        x = M[depth][c]
        if x.is_zero():
            continue
        sub = _laplace(M, cols[:i] + cols[i + 1:])
        term = x * sub
        total = total + term if i % 2 == 0 else total - term
    return total


def quad_cofactor_row(M: Sequence[Sequence[QuadReal]], r: int) -> list[QuadReal]:
    """c with det(M with row r replaced by x) = x . c."""
    d = len(M)
    rest = [row for i, row in enumerate(M) if i != r]
    c = []
    for k in range(d):
        minor = [[row[j] for j in range(d) if j != k] for row in rest]
        m = _laplace(minor, tuple(range(d - 1))) if d > 1 else QuadReal(1)
        c.append(m if (r + k) % 2 == 0 else -m)
    return c


def _dot(x: Sequence[QuadReal], c: Sequence) -> QuadReal:
    total = QuadReal()
    for a, b in zip(x, c):
        if b:
            total = total + a * b
    return total


@dataclass(frozen=True)
class _Fiber:
    """Data for counting points of a lattice translate in a one-irrational-row parallelotope."""

    normal: tuple[int, ...]   # primitive integer normal h to the integer rows, oriented
    height: QuadReal          # h . w > 0 where w is the remaining row
    index: int                # index of the integer-row lattice in its saturation


@dataclass(frozen=True)
class Parallelotope:
    """Half-open span {anchor + sum t_i spans[i] : t_i in [0, 1)} in R^d."""

    spans: tuple[tuple[QuadReal, ...], ...]
    anchor: tuple[QuadReal, ...] | None = None
    _cache: dict = field(default_factory=dict, init=False, repr=False, compare=False, hash=False)

    def __post_init__(self):
        spans = tuple(tuple(as_quad(x) for x in row) for row in self.spans)
        d = len(spans)
        if d == 0 or any(len(row) != d for row in spans):
            raise ValueError("need d spanning vectors of length d")
        anchor = self.anchor
        anchor = tuple(QuadReal() for _ in range(d)) if anchor is None else tuple(as_quad(a) for a in anchor)
        if len(anchor) != d:
            raise ValueError("anchor dimension mismatch")
        object.__setattr__(self, "spans", spans)
        object.__setattr__(self, "anchor", anchor)
        if self.det.is_zero():
            raise ValueError("degenerate parallelotope (zero determinant)")

    @property
    def dim(self) -> int:
        return len(self.spans)

    @cached_property
    def irrational_rows(self) -> tuple[int, ...]:
        return tuple(i for i, row in enumerate(self.spans) if not all(x.is_integer() for x in row))

    @cached_property
    def det(self) -> QuadReal:
        if len(self.irrational_rows) <= 1:
            return det_oneirr(self.spans)
        return det_quad(self.spans)

    @property
    def volume(self) -> QuadReal:
        return abs(self.det)

    @cached_property
    def _cramer(self):
        # N_i(x) = x . cof[i] = det(spans with row i <- x); membership is 0 <= N_i < det
        sgn = quad_sign(self.det)
        cof = [quad_cofactor_row(self.spans, i) for i in range(self.dim)]
        if sgn < 0:
            cof = [[-c for c in row] for row in cof]
        return cof, abs(self.det)

    def contains(self, x: Sequence) -> bool:
        return parallelotope_contains(self, x)

    def box(self) -> tuple[tuple[QuadReal, QuadReal], ...]:
        """Exact per-coordinate extrema of the closure."""
        out = []
        for j in range(self.dim):
            lo = hi = self.anchor[j]
            for row in self.spans:
                v = row[j]
                s = quad_sign(v)
                if s < 0:
                    lo = lo + v
                elif s > 0:
                    hi = hi + v
            out.append((lo, hi))
        return tuple(out)

    def fiber(self, scale: tuple[int, ...]) -> _Fiber | None:
        key = ("fiber", scale)
        if key not in self._cache:
            self._cache[key] = _build_fiber(self, scale)
        return self._cache[key]

    def scaled(self, factors: Sequence) -> "Parallelotope":
        """Image under the diagonal map x_j -> factors[j] * x_j."""
        spans = tuple(tuple(x * f for x, f in zip(row, factors)) for row in self.spans)
        anchor = tuple(x * f for x, f in zip(self.anchor, factors))
        return Parallelotope(spans, anchor)

    def embedded(self, d: int, block: Sequence[int]) -> "Parallelotope":
        """Product of this parallelotope (placed on ``block``) with unit intervals elsewhere."""
        block = list(block)
        if len(block) != self.dim:
            raise ValueError("block size mismatch")
        rows = []
        for row in self.spans:
            full = [QuadReal()] * d
            for j, x in zip(block, row):
                full[j] = x
            rows.append(tuple(full))
        for j in range(d):
            if j not in block:
                rows.append(tuple(QuadReal(int(i == j)) for i in range(d)))
        anchor = [QuadReal()] * d
        for j, a in zip(block, self.anchor):
            anchor[j] = a
        return Parallelotope(tuple(rows), tuple(anchor))


def _build_fiber(P: Parallelotope, scale: tuple[int, ...]) -> _Fiber | None:
    d = P.dim
    irr = P.irrational_rows
    if len(irr) > 1:
        return None
    r = irr[0] if irr else 0
    ints = []
    for i, row in enumerate(P.spans):
        if i == r:
            continue
        vec = []
        for x, s in zip(row, scale):
            v = x.to_fraction() / s
            if v.denominator != 1:
                return None
            vec.append(int(v))
        ints.append(vec)
    c = integer_cofactor_row(ints, r, d)
    idx = 0
    for x in c:
        idx = math.gcd(idx, x)
    h = [x // idx for x in c]
    w = [x / s for x, s in zip(P.spans[r], scale)]
    height = _dot(w, h)
    if quad_sign(height) < 0:
        h = [-x for x in h]
        height = -height
    return _Fiber(tuple(h), height, idx)


def parallelotope_contains(P: Parallelotope, x: Sequence) -> bool:
    """Exact half-open membership via Cramer sign tests."""
    if len(x) != P.dim:
        raise ValueError("dimension mismatch")
    y = [as_quad(a) - b for a, b in zip(x, P.anchor)]
    cof, delta = P._cramer
    for c in cof:
        n = _dot(y, c)
        if quad_sign(n) < 0 or quad_sign(n - delta) >= 0:
            return False
    return True


def _count_fiber(fib: _Fiber, z: Sequence[QuadReal]) -> int:
    # z + k lies in the cell iff 0 <= h.z + h.k < height, and each admissible
    # value of h.k contributes exactly `index` lattice points
    phi = _dot(z, fib.normal)
    return fib.index * (quad_ceil(fib.height - phi) - quad_ceil(-phi))


def _count_box(P: Parallelotope, y: Sequence[QuadReal], scale: tuple[int, ...]) -> int:
    ranges = []
    for (lo, hi), yj, s in zip(P.box(), y, scale):
        kmin = quad_ceil((lo - yj) / s)
        kmax = quad_floor((hi - yj) / s)
        if kmax < kmin:
            return 0
        ranges.append(range(kmin, kmax + 1))
    count = 0
    for k in itertools.product(*ranges):
        if parallelotope_contains(P, [yj + s * kj for yj, s, kj in zip(y, scale, k)]):
            count += 1
    return count


def count_lattice_translates(P: Parallelotope, y: Sequence, scale: Sequence[int] | None = None,
                             method: str = "auto") -> int:
    """#{k in Z^d : y + D k in P} for the diagonal matrix D = diag(scale) (default identity).

    ``method="box"`` enumerates the exact bounding box and tests membership;
    ``method="fiber"`` uses the closed form available when at most one
    spanning row is non-integral and the integer rows lie in D Z^d;
    ``"auto"`` picks the closed form when it applies.
    """
    d = P.dim
    if len(y) != d:
        raise ValueError("dimension mismatch")
    scale = tuple(int(s) for s in scale) if scale is not None else (1,) * d
    if any(s < 1 for s in scale):
        raise ValueError("scale entries must be positive integers")
    y = [as_quad(a) for a in y]
    if method in ("auto", "fiber"):
        fib = P.fiber(scale)
        if fib is not None:
            z = [(a - b) / s for a, b, s in zip(y, P.anchor, scale)]
            return _count_fiber(fib, z)
        if method == "fiber":
            raise ValueError("closed-form count needs one irrational row and lattice-aligned integer rows")
    elif method != "box":
        raise ValueError(f"unknown method {method!r}")
    return _count_box(P, y, scale)
