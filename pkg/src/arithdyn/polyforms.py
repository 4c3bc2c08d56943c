"""Exact integer/rational polynomial arithmetic and a certified root finder.

Univariate polynomials are dense coefficient tuples, low degree first, over
Python ints or Fractions.  Binary forms of degree d store the coefficient of
X^(d-i) Y^i at index i.  Resultants are Sylvester-map determinants computed
by fraction-free (Bareiss) elimination, so every resultant and cofactor is
exact.  The root finder runs Aberth-Ehrlich in mpmath, doubling precision
until a posteriori Weierstrass inclusion disks are pairwise disjoint and
smaller than the requested tolerance.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import mpmath as mpm
import numpy as np

from .errors import DegenerateMapError, InvalidInputError, RepeatedRootError


# ---------------------------------------------------------------------------
# integer polynomials
# ---------------------------------------------------------------------------

def _trim(coeffs):
    cs = list(coeffs)
    while cs and cs[-1] == 0:
        cs.pop()
    return tuple(cs)


@dataclass(frozen=True)
class IntPoly:
    """Dense univariate polynomial, coefficients low degree first.

    Coefficients may be ints or Fractions; exact constructors normalize
    nothing beyond trimming trailing zeros, so `primitive()` must be called
    where content-1 / positive-leading-coefficient form is required.
    """

    coeffs: tuple

    def __init__(self, coeffs):
        object.__setattr__(self, "coeffs", _trim(coeffs))

    @property
    def degree(self):
        return len(self.coeffs) - 1 if self.coeffs else -1

    def is_zero(self):
        return not self.coeffs

    def __getitem__(self, k):
        return self.coeffs[k] if 0 <= k <= self.degree else 0

    @property
    def lead(self):
        if self.is_zero():
            raise InvalidInputError("zero polynomial has no leading coefficient")
        return self.coeffs[-1]

    def __call__(self, x):
        acc = 0
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def __add__(self, other):
        n = max(len(self.coeffs), len(other.coeffs))
        return IntPoly([self[k] + other[k] for k in range(n)])

    def __sub__(self, other):
        n = max(len(self.coeffs), len(other.coeffs))
        return IntPoly([self[k] - other[k] for k in range(n)])

    def __neg__(self):
        return IntPoly([-c for c in self.coeffs])

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return IntPoly([c * other for c in self.coeffs])
        if self.is_zero() or other.is_zero():
            return IntPoly(())
        out = [0] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a == 0:
                continue
            for j, b in enumerate(other.coeffs):
                out[i + j] += a * b
        return IntPoly(out)

    __rmul__ = __mul__

    def __eq__(self, other):
        return isinstance(other, IntPoly) and self.coeffs == other.coeffs

    def __hash__(self):
        return hash(self.coeffs)

    def derivative(self):
        return IntPoly([k * c for k, c in enumerate(self.coeffs)][1:])

    def content(self):
        """gcd of the coefficients (of numerators/denominators for Fractions)."""
        if self.is_zero():
            return 0
        if any(isinstance(c, Fraction) for c in self.coeffs):
            den = math.lcm(*(Fraction(c).denominator for c in self.coeffs))
            num = math.gcd(*(int(Fraction(c) * den) for c in self.coeffs))
            return Fraction(num, den)
        return math.gcd(*(abs(int(c)) for c in self.coeffs))

    def primitive(self):
        """Content-1 integer polynomial with positive leading coefficient."""
        if self.is_zero():
            return self
        c = self.content()
        cs = [Fraction(x) / c for x in self.coeffs]
        assert all(f.denominator == 1 for f in cs)
        cs = [int(f) for f in cs]
        if cs[-1] < 0:
            cs = [-x for x in cs]
        return IntPoly(cs)

    def divmod(self, other):
        """Exact division with remainder over Q."""
        if other.is_zero():
            raise ZeroDivisionError("polynomial division by zero")
        q = [Fraction(0)] * max(self.degree - other.degree + 1, 1)
        r = [Fraction(c) for c in self.coeffs]
        db, lb = other.degree, Fraction(other.lead)
        while len(r) - 1 >= db and any(r):
            while r and r[-1] == 0:
                r.pop()
            if len(r) - 1 < db:
                break
            t = r[-1] / lb
            k = len(r) - 1 - db
            q[k] = t
            for i, b in enumerate(other.coeffs):
                r[k + i] -= t * Fraction(b)
        return IntPoly(q), IntPoly(r)

    def exact_div(self, other):
        q, r = self.divmod(other)
        if not r.is_zero():
            raise InvalidInputError("division is not exact")
        return IntPoly([int(c) if Fraction(c).denominator == 1 else c
                        for c in q.coeffs])

    def gcd(self, other):
        """Monic gcd over Q, returned as a primitive integer polynomial."""
        a, b = self, other
        while not b.is_zero():
            _, r = a.divmod(b)
            a, b = b, r
        if a.is_zero():
            return a
        den = math.lcm(*(Fraction(c).denominator for c in a.coeffs))
        return IntPoly([int(Fraction(c) * den) for c in a.coeffs]).primitive()

    def is_squarefree(self):
        if self.degree <= 0:
            return not self.is_zero()
        return self.gcd(self.derivative()).degree == 0

    def squarefree_part(self):
        g = self.gcd(self.derivative())
        if g.degree == 0:
            return self.primitive()
        return self.exact_div(g).primitive()

    def reversed(self):
        """X^d P(1/X); same Mahler measure as P."""
        return IntPoly(tuple(reversed(self.coeffs)))

    def naive_height(self):
        return max(abs(c) for c in self.coeffs)

    def to_json(self):
        return [str(c) for c in self.coeffs]

    @classmethod
    def from_json(cls, data):
        return cls([int(s) for s in data])

    def __str__(self):
        if self.is_zero():
            return "0"
        parts = []
        for k in range(self.degree, -1, -1):
            c = self[k]
            if c == 0:
                continue
            mono = "" if k == 0 else ("X" if k == 1 else f"X^{k}")
            cs = "" if (abs(c) == 1 and k > 0) else str(abs(c))
            parts.append(("-" if c < 0 else ("+" if parts else "")) + cs + mono)
        return " ".join(parts)


def poly_from_roots(roots):
    """prod (X - r) with exact coefficients."""
    p = IntPoly((1,))
    for r in roots:
        p = p * IntPoly((-r, 1))
    return p


# ---------------------------------------------------------------------------
# binary forms
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class BinaryForm:
    """Homogeneous form of degree d in X, Y; coeffs[i] multiplies X^(d-i) Y^i."""

    degree: int
    coeffs: tuple

    def __init__(self, degree, coeffs):
        coeffs = tuple(coeffs)
        if degree < 0 or len(coeffs) != degree + 1:
            raise InvalidInputError("coefficient count must be degree + 1")
        object.__setattr__(self, "degree", degree)
        object.__setattr__(self, "coeffs", coeffs)

    def is_zero(self):
        return all(c == 0 for c in self.coeffs)

    def __call__(self, x, y):
        # Horner in x/y-free form: sum c_i x^(d-i) y^i, stable for exact types
        d = self.degree
        acc = 0
        xp = [1]
        for _ in range(d):
            xp.append(xp[-1] * x)
        yp = 1
        for i, c in enumerate(self.coeffs):
            if c != 0:
                acc += c * xp[d - i] * yp
            yp = yp * y
        return acc

    def content(self):
        nz = [abs(int(c)) for c in self.coeffs]
        return math.gcd(*nz) if nz else 0

    def compose(self, F, G):
        """Substitute X -> F, Y -> G; result has degree d*deg(F)."""
        if F.degree != G.degree:
            raise InvalidInputError("substituted forms must share a degree")
        d, e = self.degree, F.degree
        zero = BinaryForm(0, (0,))
        acc = None
        fp = [BinaryForm(0, (1,))]
        gp = [BinaryForm(0, (1,))]
        for _ in range(d):
            fp.append(_form_mul(fp[-1], F))
            gp.append(_form_mul(gp[-1], G))
        for i, c in enumerate(self.coeffs):
            term = _form_scale(_form_mul(fp[d - i], gp[i]), c)
            acc = term if acc is None else _form_add(acc, term)
        if acc.degree != d * e:
            acc = BinaryForm(d * e, tuple(acc.coeffs) + (0,) * (d * e - acc.degree))
        return acc

    def dehomogenized(self):
        """U(t, 1) as IntPoly (variable t = X/Y), low degree first."""
        return IntPoly(tuple(reversed(self.coeffs)))

    def to_json(self):
        return {"degree": self.degree, "coeffs": [str(c) for c in self.coeffs]}

    @classmethod
    def from_json(cls, data):
        return cls(int(data["degree"]), [int(s) for s in data["coeffs"]])


def _form_mul(a, b):
    d = a.degree + b.degree
    out = [0] * (d + 1)
    for i, ca in enumerate(a.coeffs):
        if ca == 0:
            continue
        for j, cb in enumerate(b.coeffs):
            out[i + j] += ca * cb
    return BinaryForm(d, out)


def _form_add(a, b):
    if a.degree != b.degree:
        raise InvalidInputError("cannot add forms of different degrees")
    return BinaryForm(a.degree, tuple(x + y for x, y in zip(a.coeffs, b.coeffs)))


def _form_scale(a, c):
    return BinaryForm(a.degree, tuple(c * x for x in a.coeffs))


def form_from_poly(poly, degree):
    """Homogenize an IntPoly in t = X/Y to a BinaryForm of the given degree."""
    if poly.degree > degree:
        raise InvalidInputError("degree too small to homogenize")
    cs = [0] * (degree + 1)
    for k, c in enumerate(poly.coeffs):
        cs[degree - k] = c  # t^k -> X^k Y^(degree-k), index = degree-k
    return BinaryForm(degree, cs)


# ---------------------------------------------------------------------------
# determinants, resultants, cofactors
# ---------------------------------------------------------------------------

def _bareiss_det(rows):
    """Fraction-free determinant of a square integer matrix."""
    m = [list(r) for r in rows]
    n = len(m)
    sign = 1
    prev = 1
    for k in range(n - 1):
        if m[k][k] == 0:
            for i in range(k + 1, n):
                if m[i][k] != 0:
                    m[k], m[i] = m[i], m[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) // prev
            m[i][k] = 0
        prev = m[k][k]
    return sign * m[n - 1][n - 1]


def _sylvester_map_matrix(U, V):
    """Matrix of (A, B) -> A U + B V on degree d-1 pairs, monomial bases.

    Row j is the coefficient of X^(2d-1-j) Y^j; columns 0..d-1 come from
    A = X^(d-1-i) Y^i, columns d..2d-1 from B likewise.
    """
    d = U.degree
    n = 2 * d
    mat = [[0] * n for _ in range(n)]
    for i in range(d):
        for k in range(d + 1):
            mat[i + k][i] = U.coeffs[k]
            mat[i + k][d + i] = V.coeffs[k]
    return mat


def resultant(U, V):
    """Sylvester-map determinant; zero iff U, V share a projective root."""
    if U.degree != V.degree or U.degree < 1:
        raise InvalidInputError("resultant needs two forms of equal degree >= 1")
    return _bareiss_det(_sylvester_map_matrix(U, V))


def _solve_int_linear(mat, rhs):
    """Solve an integer system exactly (Fraction Gauss); unique solution."""
    n = len(mat)
    a = [[Fraction(x) for x in row] + [Fraction(rhs[i])] for i, row in enumerate(mat)]
    for col in range(n):
        piv = next((r for r in range(col, n) if a[r][col] != 0), None)
        if piv is None:
            raise DegenerateMapError("singular Sylvester system")
        a[col], a[piv] = a[piv], a[col]
        pv = a[col][col]
        a[col] = [x / pv for x in a[col]]
        for r in range(n):
            if r != col and a[r][col] != 0:
                f = a[r][col]
                a[r] = [x - f * y for x, y in zip(a[r], a[col])]
    return [a[r][n] for r in range(n)]


def nullstellensatz_cofactors(U, V):
    """Integer cofactors with A U + B V = Res(U,V) X^(2d-1) (and Y^(2d-1)).

    Returns (A_X, B_X, A_Y, B_Y, r).  By Cramer's rule the solution of the
    Sylvester system against r e_j is an adjugate column, hence integral.
    """
    d = U.degree
    r = resultant(U, V)
    if r == 0:
        raise DegenerateMapError("zero resultant: forms share a projective root")
    mat = _sylvester_map_matrix(U, V)
    n = 2 * d

    def solve(target_row):
        rhs = [0] * n
        rhs[target_row] = r
        sol = _solve_int_linear(mat, rhs)
        assert all(f.denominator == 1 for f in sol)
        a = BinaryForm(d - 1, [int(f) for f in sol[:d]])
        b = BinaryForm(d - 1, [int(f) for f in sol[d:]])
        return a, b

    ax, bx = solve(0)
    ay, by = solve(n - 1)
    return ax, bx, ay, by, r


def resultant_univariate(P, Q):
    """Classical Sylvester resultant of two IntPolys (exact integer)."""
    m, n = P.degree, Q.degree
    if m < 0 or n < 0:
        return 0
    if m == 0:
        return P.lead ** n
    if n == 0:
        return Q.lead ** m
    size = m + n
    mat = [[0] * size for _ in range(size)]
    # rows: coefficient of X^(size-1-j); first n rows shifts of P, next m of Q
    for i in range(n):
        for k in range(m + 1):
            mat[i + k][i] = P.coeffs[m - k]
    for i in range(m):
        for k in range(n + 1):
            mat[i + k][n + i] = Q.coeffs[n - k]
    return _bareiss_det(mat)


def discriminant(P):
    """Exact discriminant: (-1)^(d(d-1)/2) Res(P, P') / lead(P)."""
    d = P.degree
    if d < 2:
        raise InvalidInputError("discriminant needs degree >= 2")
    res = resultant_univariate(P, P.derivative())
    sign = -1 if (d * (d - 1) // 2) % 2 else 1
    val = Fraction(sign * res, P.lead)
    return int(val) if val.denominator == 1 else val


# ---------------------------------------------------------------------------
# cyclotomic polynomials
# ---------------------------------------------------------------------------

def euler_phi(n):
    out, m = n, n
    p = 2
    while p * p <= m:
        if m % p == 0:
            out -= out // p
            while m % p == 0:
                m //= p
        p += 1
    if m > 1:
        out -= out // m
    return out


@lru_cache(maxsize=None)
def cyclotomic(n):
    """Phi_n by exact division of X^n - 1 by Phi_m over proper divisors m | n."""
    if n < 1:
        raise InvalidInputError("cyclotomic index must be >= 1")
    num = IntPoly((-1,) + (0,) * (n - 1) + (1,))
    for m in range(1, n):
        if n % m == 0:
            num = num.exact_div(cyclotomic(m))
    assert num.degree == euler_phi(n)
    return num


# ---------------------------------------------------------------------------
# p-adic valuations
# ---------------------------------------------------------------------------

def vp(q, p):
    """p-adic valuation of a rational; vp(0) is +infinity (not an error)."""
    if p < 2:
        raise InvalidInputError("p must be a prime")
    q = Fraction(q)
    if q == 0:
        return math.inf
    n = 0
    num, den = q.numerator, q.denominator
    while num % p == 0:
        num //= p
        n += 1
    while den % p == 0:
        den //= p
        n -= 1
    return n


@dataclass(frozen=True)
class PadicValuation:
    """Typed (prime, valuation) pair; value None encodes +infinity."""

    prime: int
    value: object  # int or math.inf

    @classmethod
    def of(cls, q, p):
        return cls(p, vp(q, p))

    @property
    def is_infinite(self):
        return self.value == math.inf

    def absolute_value(self):
        return 0.0 if self.is_infinite else float(self.prime) ** (-self.value)


# ---------------------------------------------------------------------------
# certified complex roots
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class CertifiedRoot:
    value: complex
    radius: float


def _initial_guesses(coeffs):
    d = len(coeffs) - 1
    try:
        fs = [float(c) for c in reversed(coeffs)]
        if all(math.isfinite(f) for f in fs) and fs[0] != 0:
            z = np.roots(fs)
            if len(z) == d and np.all(np.isfinite(z)):
                return [complex(w) for w in z]
    except (OverflowError, np.linalg.LinAlgError):
        pass
    # Cauchy-circle fallback
    lead = abs(Fraction(coeffs[-1]))
    R = 1 + max(abs(Fraction(c)) / lead for c in coeffs[:-1])
    return [complex(R) * complex(math.cos(2 * math.pi * (k + 0.25) / d),
                                 math.sin(2 * math.pi * (k + 0.25) / d))
            for k in range(d)]


def _mpc_poly(coeffs):
    return [mpm.mpf(c.numerator) / mpm.mpf(c.denominator) for c in coeffs]


def certified_roots_mp(coeffs, tol):
    """Aberth-Ehrlich with a posteriori Weierstrass disks.

    `coeffs` are exact Fractions low->high of a squarefree polynomial.
    Returns (list of mpc, list of float radii); union of the returned disks
    contains all roots and disks are pairwise disjoint, so each contains
    exactly one.
    """
    d = len(coeffs) - 1
    lead = coeffs[-1]
    monic = [c / lead for c in coeffs]
    guesses = _initial_guesses(coeffs)
    dps = max(30, int(-math.log10(tol)) + 15)
    for _ in range(8):
        with mpm.workdps(dps):
            cs = _mpc_poly(monic)
            dcs = [k * cs[k] for k in range(1, d + 1)]
            zz = [mpm.mpc(w) for w in guesses]

            def ev(cl, x):
                acc = mpm.mpc(0)
                for c in reversed(cl):
                    acc = acc * x + c
                return acc

            eps = mpm.mpf(10) ** (-dps + 6)
            for _ in range(120):
                moved = mpm.mpf(0)
                for i in range(d):
                    p = ev(cs, zz[i])
                    dp = ev(dcs, zz[i])
                    s = mpm.mpc(0)
                    for j in range(d):
                        if j != i:
                            s += 1 / (zz[i] - zz[j])
                    if dp == 0:
                        zz[i] += eps * (1 + abs(zz[i]))
                        moved = max(moved, eps)
                        continue
                    nwt = p / dp
                    den = 1 - nwt * s
                    corr = nwt if den == 0 else nwt / den
                    zz[i] -= corr
                    moved = max(moved, abs(corr))
                if moved < eps:
                    break

            radii = []
            for i in range(d):
                num = ev(cs, zz[i])
                den = mpm.mpc(1)
                for j in range(d):
                    if j != i:
                        den *= zz[i] - zz[j]
                if den == 0:
                    radii = None
                    break
                radii.append(d * abs(num / den))
            if radii is not None:
                disjoint = all(abs(zz[i] - zz[j]) > radii[i] + radii[j]
                               for i in range(d) for j in range(i + 1, d))
                if disjoint and max(radii, default=mpm.mpf(0)) < tol:
                    return zz, [float(r) for r in radii]
            guesses = [complex(w) for w in zz]
        dps *= 2
    raise RepeatedRootError(
        "root certification failed; inputs may be non-squarefree or "
        "ill-conditioned beyond the precision ladder")


def complex_roots(P, tol=1e-12):
    """Certified complex roots of a squarefree IntPoly.

    Raises RepeatedRootError for non-squarefree input (deflate with
    P.exact_div(P.gcd(P.derivative())) and retry).  The returned multiset is
    closed under conjugation up to tol.
    """
    if P.degree < 1:
        raise InvalidInputError("need degree >= 1")
    if not P.is_squarefree():
        raise RepeatedRootError(
            "polynomial has a repeated root; deflate by gcd(P, P') first")
    coeffs = [Fraction(c) for c in P.coeffs]
    zz, radii = certified_roots_mp(coeffs, tol)
    roots = [CertifiedRoot(complex(z), r + abs(complex(z)) * 1e-16 + 1e-300)
             for z, r in zip(zz, radii)]
    # conjugation closure sanity (real coefficients force it)
    for rt in roots:
        if abs(rt.value.imag) > tol:
            if not any(abs(o.value - rt.value.conjugate()) <= 4 * (o.radius + rt.radius) + tol
                       for o in roots):
                raise RepeatedRootError("conjugate symmetry violated beyond tol")
    return roots
