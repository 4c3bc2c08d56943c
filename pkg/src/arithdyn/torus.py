"""Heights on the split torus and monomial pushforwards.

A torus point is a tuple of nonzero coordinates, each an exact rational or
an AlgebraicNumber; its height is the sum of coordinate heights.  Monomial
maps z -> z_1^a_1 ... z_k^a_k push rational points forward exactly; for
algebraic coordinates the image is returned as the complex cloud of
conjugate products, with an exact product polynomial (companion-matrix
Kronecker product characteristic polynomial) when the combined degree stays
at or below 16.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .algebraic import AlgebraicNumber, height_algebraic
from .errors import InvalidInputError
from .green import EmpiricalMeasure
from .polyforms import IntPoly

EXACT_PRODUCT_DEGREE_CAP = 16


def coordinate_height(c):
    if isinstance(c, AlgebraicNumber):
        return height_algebraic(c)
    q = Fraction(c)
    if q == 0:
        raise InvalidInputError("torus coordinates must be nonzero")
    return math.log(max(abs(q.numerator), q.denominator))


@dataclass(frozen=True)
class TorusPoint:
    coords: tuple  # Fractions and/or AlgebraicNumbers, all nonzero

    def __init__(self, coords):
        clean = []
        for c in coords:
            if isinstance(c, AlgebraicNumber):
                if c.minpoly(0) == 0:
                    raise InvalidInputError("torus coordinates must be nonzero")
                clean.append(c)
            else:
                q = Fraction(c)
                if q == 0:
                    raise InvalidInputError("torus coordinates must be nonzero")
                clean.append(q)
        if not clean:
            raise InvalidInputError("torus point needs at least one coordinate")
        object.__setattr__(self, "coords", tuple(clean))

    @property
    def dim(self):
        return len(self.coords)


def torus_height(x: TorusPoint):
    """Sum of the coordinate heights."""
    return sum(coordinate_height(c) for c in x.coords)


# ---------------------------------------------------------------------------
# exact product polynomials via companion matrices
# ---------------------------------------------------------------------------

def _companion(poly: IntPoly):
    """Companion matrix of the monicized polynomial, exact Fractions."""
    d = poly.degree
    lead = Fraction(poly.lead)
    m = [[Fraction(0)] * d for _ in range(d)]
    for i in range(1, d):
        m[i][i - 1] = Fraction(1)
    for i in range(d):
        m[i][d - 1] = -Fraction(poly.coeffs[i]) / lead
    return m


def _kron(a, b):
    ra, rb = len(a), len(b)
    out = [[Fraction(0)] * (ra * rb) for _ in range(ra * rb)]
    for i in range(ra):
        for j in range(ra):
            if a[i][j] == 0:
                continue
            for k in range(rb):
                for l in range(rb):
                    if b[k][l] != 0:
                        out[i * rb + k][j * rb + l] = a[i][j] * b[k][l]
    return out


def _mat_inverse(a):
    n = len(a)
    aug = [row[:] + [Fraction(1) if i == j else Fraction(0)
                     for j in range(n)] for i, row in enumerate(a)]
    for col in range(n):
        piv = next((r for r in range(col, n) if aug[r][col] != 0), None)
        if piv is None:
            raise InvalidInputError("coordinate is zero (singular companion)")
        aug[col], aug[piv] = aug[piv], aug[col]
        pv = aug[col][col]
        aug[col] = [x / pv for x in aug[col]]
        for r in range(n):
            if r != col and aug[r][col] != 0:
                f = aug[r][col]
                aug[r] = [x - f * y for x, y in zip(aug[r], aug[col])]
    return [row[n:] for row in aug]


def _charpoly(a):
    """Characteristic polynomial det(X I - A) by Faddeev-LeVerrier."""
    n = len(a)
    coeffs = [Fraction(1)]  # X^n downwards
    m = [[Fraction(0)] * n for _ in range(n)]
    for k in range(1, n + 1):
        # M_k = A M_{k-1} + c_{k-1} I
        m = _mat_mul(a, m)
        for i in range(n):
            m[i][i] += coeffs[-1]
        am = _mat_mul(a, m)
        c = -sum(am[i][i] for i in range(n)) / k
        coeffs.append(c)
    low_first = list(reversed(coeffs))
    den = math.lcm(*(f.denominator for f in low_first))
    return IntPoly([int(f * den) for f in low_first]).primitive()


def _mat_mul(a, b):
    n = len(a)
    out = [[Fraction(0)] * n for _ in range(n)]
    for i in range(n):
        for k in range(n):
            if a[i][k] == 0:
                continue
            aik = a[i][k]
            for j in range(n):
                if b[k][j] != 0:
                    out[i][j] += aik * b[k][j]
    return out


def _product_polynomial(coords, exponents):
    """Exact integer polynomial annihilating prod coord_i^a_i.

    Multiplication by the product acts on the tensor of the coordinate
    rings; its characteristic polynomial is computed exactly.  The result
    annihilates the value but may be reducible or non-squarefree; callers
    take the squarefree part.
    """
    mat = [[Fraction(1)]]
    for c, a in zip(coords, exponents):
        if a == 0:
            continue
        if isinstance(c, AlgebraicNumber):
            comp = _companion(c.minpoly)
        else:
            comp = [[Fraction(c)]]
        if a < 0:
            comp = _mat_inverse(comp)
            a = -a
        pw = _mat_pow(comp, a)
        mat = _kron(mat, pw)
    return _charpoly(mat)


def _mat_pow(a, e):
    n = len(a)
    out = [[Fraction(1) if i == j else Fraction(0) for j in range(n)]
           for i in range(n)]
    base = a
    while e:
        if e & 1:
            out = _mat_mul(out, base)
        base = _mat_mul(base, base)
        e >>= 1
    return out


@dataclass
class PushforwardResult:
    rational: Fraction | None       # exact value when all coordinates rational
    cloud: EmpiricalMeasure | None  # conjugate-product cloud otherwise
    minpoly: IntPoly | None         # exact annihilating polynomial if computed
    height: float | None            # exact/certified height when available
    bound: float                    # sum |a_i| max_i h(x_i)

    @property
    def height_available(self):
        return self.height is not None


def monomial_pushforward(x: TorusPoint, exponents):
    """Image of x under z -> prod z_i^(a_i), with the height bound report.

    Rational coordinates give the exact product; algebraic ones give the
    complex cloud of conjugate products (all mixed conjugate choices) plus,
    when the combined degree is at most 16, an exact annihilating
    polynomial whose squarefree part certifies the height.
    """
    a = tuple(int(e) for e in exponents)
    if len(a) != x.dim or all(e == 0 for e in a):
        raise InvalidInputError("exponent tuple must be nonzero, length k")
    bound = sum(abs(e) for e in a) * max(coordinate_height(c) for c in x.coords)
    if all(isinstance(c, Fraction) for c in x.coords):
        val = Fraction(1)
        for c, e in zip(x.coords, a):
            val *= Fraction(c) ** e
        h = math.log(max(abs(val.numerator), val.denominator))
        return PushforwardResult(val, None, None, h, bound)

    # complex cloud over all conjugate combinations
    clouds = []
    for c, e in zip(x.coords, a):
        if e == 0:
            continue
        if isinstance(c, AlgebraicNumber):
            vals = [rt.value ** e for rt in c.conjugates()]
        else:
            vals = [complex(Fraction(c)) ** e]
        clouds.append(vals)
    prods = [1 + 0j]
    for vals in clouds:
        prods = [p * v for p in prods for v in vals]
    cloud = EmpiricalMeasure(prods)

    total_deg = 1
    for c in x.coords:
        total_deg *= c.degree if isinstance(c, AlgebraicNumber) else 1
    if total_deg <= EXACT_PRODUCT_DEGREE_CAP:
        poly = _product_polynomial(x.coords, a).squarefree_part()
        xi = AlgebraicNumber(poly)
        return PushforwardResult(None, cloud, poly, height_algebraic(xi), bound)
    return PushforwardResult(None, cloud, None, None, bound)


@dataclass
class SubadditivityReport:
    h_alpha: float
    h_beta: float
    h_product: float | None
    holds: bool | None
    note: str


def subadditivity_check(alpha, beta):
    """Check h(alpha beta) <= h(alpha) + h(beta).

    Exact for rationals; via the exact product polynomial for algebraic
    inputs of combined degree <= 16; skipped with a notice beyond that.
    """
    pt = TorusPoint((alpha, beta))
    ha = coordinate_height(pt.coords[0])
    hb = coordinate_height(pt.coords[1])
    res = monomial_pushforward(pt, (1, 1))
    if res.height is None:
        return SubadditivityReport(ha, hb, None, None,
                                   "combined degree exceeds the exact cap")
    slack = 1e-9
    return SubadditivityReport(ha, hb, res.height,
                               res.height <= ha + hb + slack, "checked")
