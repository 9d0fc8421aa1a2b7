"""Exact number-field arithmetic and the lattice/ideal toolbox.

Covers: absolute fields Q(alpha) and relative composites F(zeta_k) on a
bi-power basis, integral LLL reduction, LLL-based recognition of complex
numbers as field elements, Kummer-Dedekind factorization of rational primes
in the equation order (with a Dedekind-criterion gate), valuations via
inverse-ideal powers, generator search through the Minkowski embedding, unit
tests, and budgeted integer factorization.

All ideal arithmetic happens inside the equation order Z[gamma] of a
primitive element; primes dividing the index [O_F : Z[gamma]] are rejected
with UnsupportedPrime rather than handled.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field as dfield
from fractions import Fraction
from math import comb, gcd

from .mpnum import ComplexBall, PrecisionContext, PrecisionError

__all__ = [
    "NumberField", "FieldElement", "RelativeField", "RelElement",
    "UnsupportedPrime", "NoFit", "IdealLattice", "lll_reduce",
    "recognize", "adjoin_root_of_unity", "factor_prime_dedekind",
    "ideal_valuation", "generator_search", "unit_test", "factor_integer",
    "charpoly", "norm",
]


class UnsupportedPrime(ArithmeticError):
    """The prime divides the index of the equation order."""


class NoFit(Exception):
    """Recognition did not find a field element (a status, not a failure)."""


# ---------------------------------------------------------------------------
# dense polynomial helpers over Fraction


def poly_trim(p):
    while p and p[-1] == 0:
        p.pop()
    return p


def poly_mul(a, b):
    out = [Fraction(0)] * (len(a) + len(b) - 1) if a and b else []
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] += x * y
    return poly_trim(out)


def poly_divmod(a, b):
    """Division with remainder; b need not be monic."""
    a = list(a)
    q = [Fraction(0)] * max(0, len(a) - len(b) + 1)
    inv = 1 / Fraction(b[-1])
    for i in range(len(a) - len(b), -1, -1):
        c = a[i + len(b) - 1] * inv
        if c:
            q[i] = c
            for j, y in enumerate(b):
                a[i + j] -= c * y
    return poly_trim(q), poly_trim(a[:len(b) - 1])


def poly_gcd(a, b):
    a, b = list(a), list(b)
    while b:
        a, b = b, poly_divmod(a, b)[1]
    if a:
        lead = a[-1]
        a = [c / lead for c in a]
    return a


def poly_deriv(a):
    return poly_trim([i * c for i, c in enumerate(a)][1:])


def poly_eval(a, x):
    acc = None
    for c in reversed(a):
        acc = c if acc is None else acc * x + c
    return acc if acc is not None else Fraction(0)


def resultant_int(f, g):
    """Resultant of integer polynomials via Bareiss on the Sylvester matrix."""
    m, n = len(f) - 1, len(g) - 1
    if m < 0 or n < 0:
        return 0
    size = m + n
    M = [[0] * size for _ in range(size)]
    for i in range(n):
        for j, c in enumerate(reversed(f)):
            M[i][i + j] = int(c)
    for i in range(m):
        for j, c in enumerate(reversed(g)):
            M[n + i][i + j] = int(c)
    return _bareiss_det(M)


def _bareiss_det(M):
    M = [row[:] for row in M]
    n = len(M)
    sign = 1
    prev = 1
    for k in range(n - 1):
        if M[k][k] == 0:
            for i in range(k + 1, n):
                if M[i][k]:
                    M[k], M[i] = M[i], M[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                M[i][j] = (M[i][j] * M[k][k] - M[i][k] * M[k][j]) // prev
        prev = M[k][k]
    return sign * M[n - 1][n - 1]


# ---------------------------------------------------------------------------
# absolute number field


class FieldElement:
    __slots__ = ("field", "coeffs")

    def __init__(self, field, coeffs):
        self.field = field
        self.coeffs = tuple(Fraction(c) for c in coeffs)

    def _coerce(self, other):
        if isinstance(other, FieldElement):
            if other.field is not self.field:
                raise ValueError("elements of different fields")
            return other
        if isinstance(other, (int, Fraction)):
            return self.field.from_rational(other)
        return None

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return FieldElement(self.field, [a + b for a, b in zip(self.coeffs, o.coeffs)])

    __radd__ = __add__

    def __neg__(self):
        return FieldElement(self.field, [-a for a in self.coeffs])

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return FieldElement(self.field, [a - b for a, b in zip(self.coeffs, o.coeffs)])

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self.field.mul(self, o)

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self * o.inverse()

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o * self.inverse()

    def __pow__(self, n: int):
        if n < 0:
            return self.inverse() ** (-n)
        result = self.field.one()
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def inverse(self):
        return self.field.inv(self)

    def __eq__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self.coeffs == o.coeffs

    def __hash__(self):
        return hash((id(self.field), self.coeffs))

    def is_zero(self):
        return all(c == 0 for c in self.coeffs)

    def embed(self, ctx: PrecisionContext) -> ComplexBall:
        basis = self.field.basis_embeddings(ctx)
        acc = ctx.zero()
        for c, w in zip(self.coeffs, basis):
            if c:
                acc = acc + w * c
        return acc

    def height(self) -> int:
        h = 1
        for c in self.coeffs:
            h = max(h, abs(c.numerator), c.denominator)
        return h

    def __repr__(self):
        return "FieldElement(%s)" % (list(map(str, self.coeffs)),)


class NumberField:
    """Q(alpha) for alpha a root of a monic irreducible integer polynomial,
    with a distinguished complex embedding.  Degree 1 gives plain Q."""

    def __init__(self, min_poly, root_seed=("0", "0"), name="F"):
        mp = [Fraction(c) for c in min_poly]
        if not mp or mp[-1] != 1:
            raise ValueError("min_poly must be monic, ascending coefficients")
        self.min_poly = tuple(mp)
        self.degree = len(mp) - 1
        self.name = name
        self.root_seed = (str(root_seed[0]), str(root_seed[1]))
        self._root_cache: dict[int, object] = {}
        self._basis_cache: dict[int, list] = {}
        self._allroot_cache: dict[int, list] = {}
        # reduction table: x^(d+t) mod min_poly for t = 0..d-2
        d = self.degree
        red = []
        cur = [-c for c in mp[:-1]]
        red.append(tuple(cur))
        for _ in range(d - 2):
            cur = [Fraction(0)] + cur
            lead = cur[d] if len(cur) > d else Fraction(0)
            cur = [cur[i] - lead * mp[i] for i in range(d)]
            red.append(tuple(cur))
        self._reduction = red

    # -- constructors -------------------------------------------------------

    def element(self, coeffs) -> FieldElement:
        coeffs = list(coeffs)
        if len(coeffs) != self.degree:
            raise ValueError("coefficient vector of wrong length")
        return FieldElement(self, coeffs)

    def from_rational(self, q) -> FieldElement:
        return FieldElement(self, [Fraction(q)] + [Fraction(0)] * (self.degree - 1))

    def zero(self):
        return self.from_rational(0)

    def one(self):
        return self.from_rational(1)

    def gen(self):
        if self.degree == 1:
            return self.from_rational(-self.min_poly[0])
        return self.element([0, 1] + [0] * (self.degree - 2))

    # -- arithmetic ---------------------------------------------------------

    def mul(self, a: FieldElement, b: FieldElement) -> FieldElement:
        d = self.degree
        if d == 1:
            return FieldElement(self, [a.coeffs[0] * b.coeffs[0]])
        raw = [Fraction(0)] * (2 * d - 1)
        for i, x in enumerate(a.coeffs):
            if x:
                for j, y in enumerate(b.coeffs):
                    if y:
                        raw[i + j] += x * y
        out = list(raw[:d])
        for t in range(d, 2 * d - 1):
            c = raw[t]
            if c:
                row = self._reduction[t - d]
                for i in range(d):
                    out[i] += c * row[i]
        return FieldElement(self, out)

    def inv(self, a: FieldElement) -> FieldElement:
        if a.is_zero():
            raise ZeroDivisionError("field element is zero")
        if self.degree == 1:
            return FieldElement(self, [1 / a.coeffs[0]])
        # extended Euclid in Q[x]
        r0, r1 = list(self.min_poly), poly_trim(list(a.coeffs))
        s0, s1 = [], [Fraction(1)]
        while len(r1) > 1:
            q, r = poly_divmod(r0, r1)
            r0, r1 = r1, r
            s0, s1 = s1, poly_trim([(s0[i] if i < len(s0) else 0)
                                    - c for i, c in enumerate(poly_mul(q, s1))])
            if not r1:
                raise ZeroDivisionError("element not invertible (reducible modulus?)")
        c = r1[0]
        out = [x / c for x in s1] + [Fraction(0)] * (self.degree - len(s1))
        return FieldElement(self, out[:self.degree])

    # -- embeddings ---------------------------------------------------------

    def root(self, ctx: PrecisionContext):
        """Distinguished embedding of the generator, Newton-refined."""
        key = ctx.digits + ctx.guard
        if key not in self._root_cache:
            mp = ctx.mp
            x = mp.mpc(mp.mpf(self.root_seed[0]), mp.mpf(self.root_seed[1]))
            if self.degree == 1:
                c0 = self.min_poly[0]
                self._root_cache[key] = mp.mpc(mp.mpf(-c0.numerator) / c0.denominator)
            else:
                coeffs = [mp.mpf(c.numerator) / c.denominator for c in self.min_poly]
                dcoeffs = [i * c for i, c in enumerate(coeffs)][1:]

                def ev(cs, t):
                    acc = mp.mpc(0)
                    for c in reversed(cs):
                        acc = acc * t + c
                    return acc

                for _ in range(200):
                    fx = ev(coeffs, x)
                    dx = ev(dcoeffs, x)
                    step = fx / dx
                    x = x - step
                    if abs(step) < mp.mpf(10) ** (-(ctx.digits + ctx.guard - 2)):
                        break
                self._root_cache[key] = x
        return self._root_cache[key]

    def root_ball(self, ctx: PrecisionContext) -> ComplexBall:
        r = self.root(ctx)
        return ctx.ball_mid_rad(r, 8 * ctx.ulp(r))

    def basis_embeddings(self, ctx: PrecisionContext):
        key = ctx.digits + ctx.guard
        if key not in self._basis_cache:
            r = self.root_ball(ctx)
            out = [ctx.one()]
            for _ in range(self.degree - 1):
                out.append(out[-1] * r)
            self._basis_cache[key] = out
        return self._basis_cache[key]

    def all_roots(self, dps: int = 60):
        """All complex roots of min_poly, deterministically ordered."""
        if dps not in self._allroot_cache:
            import mpmath
            if self.degree == 1:
                self._allroot_cache[dps] = [mpmath.mpc(-self.min_poly[0])]
            else:
                old = mpmath.mp.dps
                try:
                    mpmath.mp.dps = dps
                    coeffs = [mpmath.mpf(int(c.numerator)) / int(c.denominator)
                              for c in reversed(self.min_poly)]
                    roots = mpmath.polyroots(coeffs, maxsteps=200, extraprec=120)
                finally:
                    mpmath.mp.dps = old
                roots = sorted(roots, key=lambda r: (mpmath.nstr(r.real, 25),
                                                     mpmath.nstr(r.imag, 25)))
                self._allroot_cache[dps] = roots
        return self._allroot_cache[dps]

    # -- interface shared with RelativeField --------------------------------

    @property
    def abs_degree(self):
        return self.degree

    def from_abs_vector(self, vec):
        return self.element(vec)

    def to_abs_vector(self, x):
        return list(x.coeffs)

    def random_element(self, rng, height=10):
        return self.element([Fraction(rng.randint(-height, height)) for _ in range(self.degree)])

    def __repr__(self):
        return "NumberField(%s, deg %d)" % (self.name, self.degree)


# ---------------------------------------------------------------------------
# relative composite  F(beta), used for F(zeta_k)


class RelElement:
    __slots__ = ("field", "comps")

    def __init__(self, field, comps):
        self.field = field
        self.comps = tuple(comps)  # base-field elements, length e

    def _coerce(self, other):
        if isinstance(other, RelElement):
            if other.field is not self.field:
                raise ValueError("elements of different fields")
            return other
        if isinstance(other, (int, Fraction)):
            return self.field.from_rational(other)
        if isinstance(other, FieldElement) and other.field is self.field.base:
            return self.field.from_base(other)
        return None

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return RelElement(self.field, [a + b for a, b in zip(self.comps, o.comps)])

    __radd__ = __add__

    def __neg__(self):
        return RelElement(self.field, [-a for a in self.comps])

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self.field.mul(self, o)

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self * o.inverse()

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o * self.inverse()

    def __pow__(self, n: int):
        if n < 0:
            return self.inverse() ** (-n)
        result = self.field.one()
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def inverse(self):
        return self.field.inv(self)

    def __eq__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self.comps == o.comps

    def __hash__(self):
        return hash((id(self.field), self.comps))

    def is_zero(self):
        return all(c.is_zero() for c in self.comps)

    def embed(self, ctx: PrecisionContext) -> ComplexBall:
        zv = self.field.ext_root_ball(ctx)
        acc = ctx.zero()
        power = ctx.one()
        for c in self.comps:
            if not c.is_zero():
                acc = acc + c.embed(ctx) * power
            power = power * zv
        return acc

    def height(self) -> int:
        return max(c.height() for c in self.comps)

    def __repr__(self):
        return "RelElement(%s)" % (list(self.comps),)


class RelativeField:
    """base(beta) where beta has monic minimal polynomial ext_poly over base.

    For composites F(zeta_k) the extension root is exp(2 pi i/k); bi-power
    basis is {alpha^a beta^b} flattened b-major.
    """

    def __init__(self, base: NumberField, ext_poly, ext_root_fn, name="F_k"):
        self.base = base
        self.ext_poly = tuple(ext_poly)  # base elements, ascending, monic
        self.rel_degree = len(ext_poly) - 1
        if self.rel_degree < 1:
            raise ValueError("extension degree must be >= 1")
        self.abs_degree = base.degree * self.rel_degree
        self.name = name
        self._ext_root_fn = ext_root_fn
        self._ext_root_cache: dict[int, ComplexBall] = {}
        self._basis_cache: dict[int, list] = {}
        self._eq_order = None
        e = self.rel_degree
        # reduction of beta^(e+t)
        red = []
        if e >= 1:
            cur = [-c for c in self.ext_poly[:-1]]
            red.append(tuple(cur))
            for _ in range(e - 2):
                cur = [base.zero()] + cur
                lead = cur[e] if len(cur) > e else base.zero()
                cur = [cur[i] - lead * self.ext_poly[i] for i in range(e)]
                red.append(tuple(cur))
        self._reduction = red

    # -- constructors -------------------------------------------------------

    def element(self, comps) -> RelElement:
        comps = list(comps)
        if len(comps) != self.rel_degree:
            raise ValueError("component vector of wrong length")
        return RelElement(self, comps)

    def from_base(self, x: FieldElement) -> RelElement:
        return RelElement(self, [x] + [self.base.zero()] * (self.rel_degree - 1))

    def from_rational(self, q) -> RelElement:
        return self.from_base(self.base.from_rational(q))

    def zero(self):
        return self.from_rational(0)

    def one(self):
        return self.from_rational(1)

    def ext_gen(self) -> RelElement:
        if self.rel_degree == 1:
            return self.from_base(-self.ext_poly[0])
        comps = [self.base.zero()] * self.rel_degree
        comps[1] = self.base.one()
        return RelElement(self, comps)

    def base_gen(self) -> RelElement:
        return self.from_base(self.base.gen())

    # -- arithmetic ---------------------------------------------------------

    def mul(self, a: RelElement, b: RelElement) -> RelElement:
        e = self.rel_degree
        if e == 1:
            return RelElement(self, [a.comps[0] * b.comps[0]])
        raw = [self.base.zero()] * (2 * e - 1)
        for i, x in enumerate(a.comps):
            if not x.is_zero():
                for j, y in enumerate(b.comps):
                    if not y.is_zero():
                        raw[i + j] = raw[i + j] + x * y
        out = list(raw[:e])
        for t in range(e, 2 * e - 1):
            c = raw[t]
            if not c.is_zero():
                row = self._reduction[t - e]
                for i in range(e):
                    out[i] = out[i] + c * row[i]
        return RelElement(self, out)

    def inv(self, a: RelElement) -> RelElement:
        if a.is_zero():
            raise ZeroDivisionError("field element is zero")
        if self.rel_degree == 1:
            return RelElement(self, [a.comps[0].inverse()])
        # extended Euclid in base[y]
        def trim(p):
            while p and p[-1].is_zero():
                p.pop()
            return p

        def pmul(p, q):
            if not p or not q:
                return []
            out = [self.base.zero()] * (len(p) + len(q) - 1)
            for i, x in enumerate(p):
                if not x.is_zero():
                    for j, y in enumerate(q):
                        out[i + j] = out[i + j] + x * y
            return trim(out)

        def pdivmod(p, q):
            p = list(p)
            inv_lead = q[-1].inverse()
            quo = [self.base.zero()] * max(0, len(p) - len(q) + 1)
            for i in range(len(p) - len(q), -1, -1):
                c = p[i + len(q) - 1] * inv_lead
                if not c.is_zero():
                    quo[i] = c
                    for j, y in enumerate(q):
                        p[i + j] = p[i + j] - c * y
            return trim(quo), trim(p[:len(q) - 1])

        r0 = list(self.ext_poly)
        r1 = trim(list(a.comps))
        s0, s1 = [], [self.base.one()]
        while len(r1) > 1:
            q, r = pdivmod(r0, r1)
            r0, r1 = r1, r
            qs1 = pmul(q, s1)
            news = [(s0[i] if i < len(s0) else self.base.zero())
                    - (qs1[i] if i < len(qs1) else self.base.zero())
                    for i in range(max(len(s0), len(qs1)))]
            s0, s1 = s1, trim(news)
            if not r1:
                raise ZeroDivisionError("not invertible (reducible extension?)")
        c_inv = r1[0].inverse()
        out = [x * c_inv for x in s1]
        out += [self.base.zero()] * (self.rel_degree - len(out))
        return RelElement(self, out[:self.rel_degree])

    # -- embeddings ---------------------------------------------------------

    def ext_root_ball(self, ctx: PrecisionContext) -> ComplexBall:
        key = ctx.digits + ctx.guard
        if key not in self._ext_root_cache:
            self._ext_root_cache[key] = self._ext_root_fn(ctx)
        return self._ext_root_cache[key]

    def basis_embeddings(self, ctx: PrecisionContext):
        """Balls for the bi-power basis alpha^a beta^b, index b*deg(base)+a."""
        key = ctx.digits + ctx.guard
        if key not in self._basis_cache:
            alpha = self.base.basis_embeddings(ctx)
            zv = self.ext_root_ball(ctx)
            out = []
            power = ctx.one()
            for _ in range(self.rel_degree):
                out.extend(a * power for a in alpha)
                power = power * zv
            self._basis_cache[key] = out
        return self._basis_cache[key]

    def from_abs_vector(self, vec) -> RelElement:
        d0 = self.base.degree
        comps = [self.base.element(vec[b * d0:(b + 1) * d0]) for b in range(self.rel_degree)]
        return RelElement(self, comps)

    def to_abs_vector(self, x: RelElement):
        out = []
        for c in x.comps:
            out.extend(c.coeffs)
        return out

    def random_element(self, rng, height=10):
        return self.element([self.base.random_element(rng, height)
                             for _ in range(self.rel_degree)])

    def __repr__(self):
        return "RelativeField(%s, deg %d over %r)" % (self.name, self.rel_degree, self.base)


# ---------------------------------------------------------------------------
# charpoly / norm through the absolute multiplication matrix


def abs_mul_matrix(x):
    """Columns: x * (basis element), in the absolute basis."""
    F = x.field
    d = F.abs_degree
    if isinstance(F, NumberField):
        basis = [F.element([Fraction(1 if i == j else 0) for i in range(d)])
                 for j in range(d)]
    else:
        basis = []
        for b in range(F.rel_degree):
            for a in range(F.base.degree):
                vec = [Fraction(0)] * d
                vec[b * F.base.degree + a] = Fraction(1)
                basis.append(F.from_abs_vector(vec))
    cols = [F.to_abs_vector(x * e) for e in basis]
    return [[cols[j][i] for j in range(d)] for i in range(d)]


def charpoly(x) -> list[Fraction]:
    """Characteristic polynomial of multiplication by x (monic, ascending),
    via the Berkowitz division-free algorithm."""
    M = abs_mul_matrix(x)
    n = len(M)
    if n == 0:
        return [Fraction(1)]
    # Berkowitz: iteratively build the charpoly via Toeplitz products
    vect = [Fraction(-M[0][0]), Fraction(1)]  # charpoly of leading 1x1 (ascending)
    for r in range(1, n):
        # principal (r+1)x(r+1) block
        a = M[r][r]
        Rrow = [M[r][j] for j in range(r)]
        Ccol = [M[i][r] for i in range(r)]
        Ablk = [[M[i][j] for j in range(r)] for i in range(r)]
        # c_k = R A^{k-2} C
        cvals = [Fraction(-1), a]  # entries T_0 = -1? use Samuelson-Berkowitz
        # powers of A applied to C
        vec = Ccol[:]
        prods = [sum(R * v for R, v in zip(Rrow, vec))]
        for _ in range(r - 1):
            vec = [sum(Ablk[i][j] * vec[j] for j in range(r)) for i in range(r)]
            prods.append(sum(R * v for R, v in zip(Rrow, vec)))
        # Toeplitz column: [-1? ] Samuelson recursion:
        # p_new(t) related by convolution with [1, -a, -RC, -RAC, ...]
        conv = [Fraction(1), -a] + [-p for p in prods]
        # vect is ascending; convert to descending for convolution clarity
        vd = list(reversed(vect))
        out = [Fraction(0)] * (len(vd) + len(conv) - 1)
        for i, u in enumerate(conv):
            if u:
                for j, w in enumerate(vd):
                    out[i + j] += u * w
        out = out[:r + 2]
        vect = list(reversed(out))
    # normalize monic
    lead = vect[-1]
    return [c / lead for c in vect]


def norm(x) -> Fraction:
    """N(x) as the determinant of the multiplication matrix (fraction-free
    Bareiss after clearing denominators)."""
    M = abs_mul_matrix(x)
    d = len(M)
    den = 1
    for row in M:
        for c in row:
            den = den * c.denominator // gcd(den, c.denominator)
    IM = [[int(c * den) for c in row] for row in M]
    return Fraction(_bareiss_det(IM), den ** d)


def unit_test(x, F=None) -> bool:
    """True iff x is an algebraic integer of norm +-1."""
    if x.is_zero():
        return False
    cp = charpoly(x)
    for c in cp:
        if c.denominator != 1:
            return False
    return abs(cp[0]) == 1


# ---------------------------------------------------------------------------
# integral LLL (de Weger / Cohen alg. 2.6.7), delta = 99/100


def lll_reduce(rows, delta_num: int = 99, delta_den: int = 100):
    """LLL-reduce integer rows in place (returns a new list of lists).

    Zero/dependent rows are not supported; rows must be linearly independent.
    """
    b = [list(map(int, r)) for r in rows]
    n = len(b)
    if n == 0:
        return []
    m = len(b[0])

    def dot(u, v):
        return sum(x * y for x, y in zip(u, v))

    lam = [[0] * n for _ in range(n)]
    d = [0] * (n + 1)
    d[0] = 1

    def incremental_gram(k):
        for j in range(k + 1):
            u = dot(b[k], b[j])
            for i in range(j):
                u = (d[i + 1] * u - lam[k][i] * lam[j][i]) // d[i]
            if j < k:
                lam[k][j] = u
            else:
                if u == 0:
                    raise ValueError("LLL input rows are linearly dependent")
                d[k + 1] = u

    def red(k, l):
        if 2 * abs(lam[k][l]) > d[l + 1]:
            q = (2 * lam[k][l] + d[l + 1]) // (2 * d[l + 1])
            b[k] = [x - q * y for x, y in zip(b[k], b[l])]
            lam[k][l] -= q * d[l + 1]
            for i in range(l):
                lam[k][i] -= q * lam[l][i]

    def swap(k, kmax):
        b[k], b[k - 1] = b[k - 1], b[k]
        for j in range(k - 1):
            lam[k][j], lam[k - 1][j] = lam[k - 1][j], lam[k][j]
        lam_v = lam[k][k - 1]
        Bv = (d[k - 1] * d[k + 1] + lam_v * lam_v) // d[k]
        for i in range(k + 1, kmax + 1):
            t = lam[i][k]
            lam[i][k] = (d[k + 1] * lam[i][k - 1] - lam_v * t) // d[k]
            lam[i][k - 1] = (Bv * t + lam_v * lam[i][k]) // d[k + 1]
        d[k] = Bv

    kmax = 0
    incremental_gram(0)
    k = 1
    while k < n:
        if k > kmax:
            kmax = k
            incremental_gram(k)
        red(k, k - 1)
        if delta_den * d[k + 1] * d[k - 1] < delta_num * d[k] * d[k] \
                - delta_den * lam[k][k - 1] * lam[k][k - 1]:
            swap(k, kmax)
            k = max(1, k - 1)
        else:
            for l in range(k - 2, -1, -1):
                red(k, l)
            k += 1
    return b


# ---------------------------------------------------------------------------
# recognition


@dataclass
class Recognized:
    element: object
    denominator: int
    residual: object
    height: int


def _fit_relation(x: ComplexBall, basis_balls, ctx: PrecisionContext,
                  fit_digits: int, candidates: int = 3):
    """Integer relation c0*x + sum c_j w_j ~ 0 via LLL.  Yields (c0, cvec)."""
    scale = 10 ** fit_digits
    mp = ctx.mp

    def icol(ball):
        return (int(mp.nint(mp.re(ball.mid) * scale)),
                int(mp.nint(mp.im(ball.mid) * scale)))

    d = len(basis_balls)
    rows = []
    for j, w in enumerate(basis_balls):
        re, im = icol(w)
        rows.append([1 if t == j else 0 for t in range(d + 1)] + [re, im])
    re, im = icol(x)
    rows.append([0] * d + [1, re, im])
    red = lll_reduce(rows)
    out = []
    for v in red[:candidates]:
        c0 = v[d]
        if c0 != 0:
            out.append((c0, v[:d]))
    return out


def recognize(x: ComplexBall, F, ctx: PrecisionContext,
              height_bound: int = 10 ** 6) -> Recognized:
    """Fit the ball x into the field F; raises NoFit on failure.

    The fit is built from ~0.6 P digits, the residual is checked at full
    precision, and the candidate is re-verified at 1.5x precision through a
    fresh embedding of the field basis.
    """
    P = ctx.digits
    if x.rad > ctx.rmpf(10) ** (-int(0.6 * P)):
        raise NoFit("input ball too wide for recognition at %d digits" % P)
    basis = F.basis_embeddings(ctx)
    fit_digits = int(0.6 * P)
    # spurious LLL relations agree with x to roughly fit_digits digits;
    # genuine elements agree to x's full accuracy, so demand far more than
    # the fit could fabricate
    threshold = max(ctx.rmpf(10) ** (-int(0.8 * P)),
                    x.rad * ctx.rmpf(10) ** 10)
    for c0, cvec in _fit_relation(x, basis, ctx, fit_digits):
        coeffs = [Fraction(-c, c0) for c in cvec]
        cand = F.from_abs_vector(coeffs)
        h = cand.height()
        if h > height_bound:
            continue
        resid = (cand.embed(ctx) - x).abs_upper()
        if resid > threshold:
            continue
        # independent re-verification at elevated precision
        hi_ctx = ctx.scaled(1.5)
        resid_hi = cand.embed(hi_ctx) - hi_ctx.ball_mid_rad(
            hi_ctx.mp.mpc(ctx.mp.nstr(ctx.mp.re(x.mid), P + 10),
                          ctx.mp.nstr(ctx.mp.im(x.mid), P + 10)), x.rad)
        if resid_hi.abs_upper() > ctx.rmpf(10) ** (-int(0.5 * P)) + 2 * x.rad:
            continue
        return Recognized(cand, c0, resid, h)
    raise NoFit("no lattice relation within bounds")


# ---------------------------------------------------------------------------
# adjoining a root of unity


def adjoin_root_of_unity(F: NumberField, k: int, ctx: PrecisionContext) -> RelativeField:
    """F(zeta_k) with the embedding zeta_k -> exp(2 pi i/k).

    The relative degree is found by an LLL fit of the minimal polynomial of
    zeta_k over F, then verified exactly by dividing the k-th cyclotomic
    polynomial in F[y].  Returns a RelativeField even in the degenerate
    linear case (zeta_k in F).
    """
    import sympy

    def ext_root_fn(c):
        return c.root_of_unity(1, k)

    phi = sympy.polys.specialpolys.cyclotomic_poly(k, sympy.Symbol("y"))
    phi_coeffs = [Fraction(int(c)) for c in reversed(sympy.Poly(phi).all_coeffs())]
    phik_deg = len(phi_coeffs) - 1

    zeta = ctx.root_of_unity(1, k)
    divisors = sorted({e for e in range(1, phik_deg + 1) if phik_deg % e == 0})
    for e in divisors:
        # fit zeta^e over the candidate basis {alpha^a zeta^b : b < e}
        basis = []
        alpha = F.basis_embeddings(ctx)
        power = ctx.one()
        for b in range(e):
            basis.extend(a * power for a in alpha)
            power = power * zeta
        target = zeta ** e
        fits = _fit_relation(target, basis, ctx, int(0.6 * ctx.digits))
        g = None
        for c0, cvec in fits:
            coeffs = [Fraction(-c, c0) for c in cvec]
            # candidate: y^e - sum_{b} (sum_a coeffs alpha^a) y^b
            comps = [F.element(coeffs[b * F.degree:(b + 1) * F.degree]) for b in range(e)]
            cand = [-c for c in comps] + [F.one()]
            resid = target
            power = ctx.one()
            for b in range(e):
                resid = resid - comps[b].embed(ctx) * power
                power = power * zeta
            if resid.abs_upper() < ctx.rmpf(10) ** (-int(0.5 * ctx.digits)):
                g = cand
                break
        if g is None:
            continue
        # exact verification: g divides Phi_k in F[y]
        phi_f = [F.from_rational(c) for c in phi_coeffs]

        def trim(p):
            while p and p[-1].is_zero():
                p.pop()
            return p

        p = list(phi_f)
        quo_len = len(p) - len(g) + 1
        ok = True
        if quo_len < 0:
            ok = False
        else:
            for i in range(quo_len - 1, -1, -1):
                c = p[i + len(g) - 1]
                if not c.is_zero():
                    for j, y in enumerate(g):
                        p[i + j] = p[i + j] - c * y
            ok = not trim(p)
        if ok:
            return RelativeField(F, g, ext_root_fn, name="%s(zeta_%d)" % (F.name, k))
    raise PrecisionError("could not determine the degree of zeta_%d over %s "
                         "(raise precision)" % (k, F.name))


# ---------------------------------------------------------------------------
# equation order and ideals


class EquationOrder:
    """Z[gamma] for a primitive element gamma of the field, with conversion
    matrices between the working basis and the gamma power basis."""

    def __init__(self, field, gamma, gamma_minpoly):
        self.field = field
        self.gamma = gamma
        self.min_poly = [int(c) for c in gamma_minpoly]  # ascending, monic
        self.degree = len(self.min_poly) - 1
        d = self.degree
        # transformation: columns = abs vectors of gamma^t
        cols = []
        power = field.from_rational(1) if isinstance(field, NumberField) \
            else field.one()
        for _ in range(d):
            cols.append(field.to_abs_vector(power))
            power = power * gamma
        self.T = [[cols[j][i] for j in range(d)] for i in range(d)]
        self.Tinv = _fraction_matrix_inverse(self.T)
        # reduction rows for gamma-basis multiplication (integral: the
        # minimal polynomial is monic with integer coefficients)
        mp = [int(c) for c in self.min_poly]
        red = []
        cur = [-c for c in mp[:-1]]
        red.append(tuple(cur))
        for _ in range(d - 2):
            cur = [0] + cur
            lead = cur[d] if len(cur) > d else 0
            cur = [cur[i] - lead * mp[i] for i in range(d)]
            red.append(tuple(cur))
        self._reduction = red
        self._disc = None

    def disc(self) -> int:
        if self._disc is None:
            f = self.min_poly
            fp = [i * c for i, c in enumerate(f)][1:]
            res = resultant_int(f, fp)
            n = self.degree
            self._disc = (-1) ** (n * (n - 1) // 2) * res
        return self._disc

    def to_gamma(self, x):
        """Field element -> rational vector on the gamma power basis."""
        vec = self.field.to_abs_vector(x)
        return [sum(self.Tinv[i][j] * vec[j] for j in range(self.degree))
                for i in range(self.degree)]

    def from_gamma(self, vec):
        abs_vec = [sum(self.T[i][j] * Fraction(vec[j]) for j in range(self.degree))
                   for i in range(self.degree)]
        return self.field.from_abs_vector(abs_vec)

    def gamma_mul(self, a, b):
        """Product of two gamma-basis vectors (integer or Fraction entries)."""
        d = self.degree
        raw = [0] * (2 * d - 1)
        for i, x in enumerate(a):
            if x:
                for j, y in enumerate(b):
                    if y:
                        raw[i + j] += x * y
        out = list(raw[:d])
        for t in range(d, 2 * d - 1):
            c = raw[t]
            if c:
                row = self._reduction[t - d]
                for i in range(d):
                    out[i] += c * row[i]
        return out


def _fraction_matrix_inverse(M):
    n = len(M)
    A = [[Fraction(M[i][j]) for j in range(n)] + [Fraction(1 if i == j else 0)
         for j in range(n)] for i in range(n)]
    for c in range(n):
        piv = next((r for r in range(c, n) if A[r][c] != 0), None)
        if piv is None:
            raise ValueError("singular matrix")
        A[c], A[piv] = A[piv], A[c]
        inv = 1 / A[c][c]
        A[c] = [x * inv for x in A[c]]
        for r in range(n):
            if r != c and A[r][c]:
                f = A[r][c]
                A[r] = [x - f * y for x, y in zip(A[r], A[c])]
    return [row[n:] for row in A]


def hnf_rows(rows, d):
    """Row-style Hermite normal form (upper triangular, positive pivots) of
    the lattice spanned by integer rows; returns d x d matrix."""
    work = [list(map(int, r)) for r in rows if any(r)]
    basis = [None] * d
    for row in work:
        while True:
            piv = next((i for i, x in enumerate(row) if x), None)
            if piv is None:
                break
            if basis[piv] is None:
                basis[piv] = row
                break
            g = gcd(basis[piv][piv], row[piv])
            # combine so that basis[piv][piv] becomes g
            a, b = basis[piv][piv], row[piv]
            # extended gcd
            x0, x1, y0, y1 = 1, 0, 0, 1
            aa, bb = a, b
            while bb:
                q = aa // bb
                aa, bb = bb, aa - q * bb
                x0, x1 = x1, x0 - q * x1
                y0, y1 = y1, y0 - q * y1
            new_basis = [x0 * u + y0 * v for u, v in zip(basis[piv], row)]
            new_row = [(-b // g) * u + (a // g) * v for u, v in zip(basis[piv], row)]
            basis[piv] = new_basis
            row = new_row
    if any(b is None for b in basis):
        raise ValueError("rows do not span a full-rank lattice")
    # make pivots positive, then reduce above-diagonal entries column by
    # column from the left (later subtractions must not disturb earlier ones)
    for i in range(d):
        if basis[i][i] < 0:
            basis[i] = [-x for x in basis[i]]
    for j in range(d):
        for i in range(j + 1, d):
            q = basis[j][i] // basis[i][i]
            if q:
                basis[j] = [u - q * v for u, v in zip(basis[j], basis[i])]
    return [list(map(int, b)) for b in basis]


@dataclass
class IdealLattice:
    """Integral ideal of the equation order, as an HNF sublattice (rows in
    the gamma power basis).  For primes, gen_element keeps the second
    generator g(gamma) of the two-element representation (p, g(gamma))."""

    order: EquationOrder
    hnf: list
    p: int | None = None
    residue_degree: int | None = None
    ramification: int | None = None
    label: str = ""
    gen_element: object = None
    _norm: int | None = dfield(default=None, repr=False)

    def norm(self) -> int:
        if self._norm is None:
            n = 1
            for i in range(len(self.hnf)):
                n *= self.hnf[i][i]
            self._norm = n
        return self._norm

    def contains_vector(self, vec) -> bool:
        # rows are upper triangular (pivot at [i][i], entries to the right):
        # peel coefficients in ascending pivot order
        v = [Fraction(x) for x in vec]
        for i in range(len(self.hnf)):
            q = v[i] / self.hnf[i][i]
            if q.denominator != 1:
                return False
            for j in range(i, len(v)):
                v[j] -= q * self.hnf[i][j]
        return all(x == 0 for x in v)

    def contains_element(self, x) -> bool:
        vec = self.order.to_gamma(x)
        if any(c.denominator != 1 for c in vec):
            return False
        return self.contains_vector([int(c) for c in vec])

    def mul(self, other: "IdealLattice") -> "IdealLattice":
        rows = []
        for u in self.hnf:
            for v in other.hnf:
                rows.append(self.order.gamma_mul(u, v))
        return IdealLattice(self.order, hnf_rows(rows, self.order.degree),
                            label="(%s)*(%s)" % (self.label, other.label))

    def __eq__(self, other):
        return isinstance(other, IdealLattice) and self.order is other.order \
            and self.hnf == other.hnf


def principal_ideal(order: EquationOrder, x) -> IdealLattice:
    """x * Z[gamma] for x with integral gamma coordinates (scaled if not)."""
    vec = order.to_gamma(x)
    den = 1
    for c in vec:
        den = den * c.denominator // gcd(den, c.denominator)
    scaled = [int(c * den) for c in vec]
    if den != 1:
        raise ValueError("element is not in the equation order")
    d = order.degree
    rows = []
    power = [1 if i == 0 else 0 for i in range(d)]
    for _ in range(d):
        rows.append(order.gamma_mul(scaled, power))
        power = order.gamma_mul(power, [0, 1] + [0] * (d - 2)) if d > 1 else power
    return IdealLattice(order, hnf_rows(rows, d), label="principal")


def _gf_factor(coeffs_asc, p):
    """Factor a monic integer polynomial mod p; returns [(asc coeffs, mult)]."""
    from sympy.polys.galoistools import gf_factor
    from sympy.polys.domains import ZZ
    dense_desc = [ZZ(int(c) % p) for c in reversed(coeffs_asc)]
    lc, factors = gf_factor(dense_desc, p, ZZ)
    out = []
    for f, mult in factors:
        asc = [int(c) % p for c in reversed(f)]
        out.append((asc, int(mult)))
    out.sort(key=lambda t: (len(t[0]), t[0]))
    return out


def factor_prime_dedekind(p: int, F, ctx: PrecisionContext | None = None,
                          order: EquationOrder | None = None):
    """Kummer-Dedekind factorization of p in the equation order of F.

    Returns a list of IdealLattice with residue degrees and ramification
    indices.  Raises UnsupportedPrime when p divides the index, detected by
    the Dedekind criterion."""
    order = order or equation_order(F)
    f = order.min_poly
    d = order.degree
    factors = _gf_factor(f, p)
    # Dedekind criterion (only needed when p^2 | disc, but cheap to run)
    disc = order.disc()
    if disc % (p * p) == 0:
        gstar = [1]
        hstar = [1]
        for fac, mult in factors:
            gstar = _zpoly_mul(gstar, fac)
            hm = fac
            for _ in range(mult - 1):
                hstar = _zpoly_mul(hstar, hm) if False else hstar
        # h* = product of fac^(mult-1)? No: f = prod fac^mult, define
        # g* = prod fac, h* = f/g* mod p; compute h* by division mod p
        hstar = _zpoly_divmod_modp(f, gstar, p)[0]
        gh = _zpoly_mul(gstar, hstar)
        Fstar = [(int(a) - int(b)) // p for a, b in
                 zip(_pad(f, len(gh)), _pad(gh, len(f)))] if len(gh) <= len(f) else \
                [(int(a) - int(b)) // p for a, b in zip(_pad(f, len(gh)), gh)]
        Fbar = [c % p for c in Fstar]
        g1 = _zpoly_gcd_modp(Fbar, [c % p for c in gstar], p)
        g2 = _zpoly_gcd_modp(g1, [c % p for c in hstar], p)
        if len(g2) - 1 > 0:
            raise UnsupportedPrime("p=%d divides the index of the equation order" % p)
    out = []
    for fac, mult in factors:
        # ideal (p, g_i(gamma))
        rows = []
        for t in range(d):
            row = [0] * d
            row[t] = p
            rows.append(row)
        # g_i(gamma) as a gamma-basis vector (Horner with reduction)
        gv = [0] * d
        for c in reversed(fac):
            gv = order.gamma_mul(gv, [0, 1] + [0] * (d - 2)) if d > 1 else [0]
            gv[0] += c % p
        power = [1 if i == 0 else 0 for i in range(d)]
        for _ in range(d):
            rows.append(order.gamma_mul(gv, power))
            power = order.gamma_mul(power, [0, 1] + [0] * (d - 2)) if d > 1 else power
        hnf = hnf_rows(rows, d)
        ideal = IdealLattice(order, hnf, p=p, residue_degree=len(fac) - 1,
                             ramification=mult, label="(%d, g)" % p,
                             gen_element=order.from_gamma(gv))
        if ideal.norm() != p ** (len(fac) - 1):
            raise ArithmeticError("norm of prime ideal is not p^f; bad factorization")
        out.append(ideal)
    if sum(i.residue_degree * i.ramification for i in out) != d:
        raise ArithmeticError("sum e_i f_i != degree")
    return out


def _pad(p, n):
    return list(p) + [0] * (n - len(p))


def _zpoly_mul(a, b):
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] += x * y
    return out


def _zpoly_divmod_modp(a, b, p):
    a = [c % p for c in a]
    b = [c % p for c in b]
    while b and b[-1] == 0:
        b.pop()
    inv = pow(b[-1], -1, p)
    q = [0] * max(0, len(a) - len(b) + 1)
    for i in range(len(a) - len(b), -1, -1):
        c = (a[i + len(b) - 1] * inv) % p
        if c:
            q[i] = c
            for j, y in enumerate(b):
                a[i + j] = (a[i + j] - c * y) % p
    while a and a[-1] == 0:
        a.pop()
    return q, a


def _zpoly_gcd_modp(a, b, p):
    a = [c % p for c in a]
    b = [c % p for c in b]
    while a and a[-1] == 0:
        a.pop()
    while b and b[-1] == 0:
        b.pop()
    while b:
        a, b = b, _zpoly_divmod_modp(a, b, p)[1]
    if a:
        inv = pow(a[-1], -1, p)
        a = [(c * inv) % p for c in a]
    return a or [0]


_order_cache: dict[int, EquationOrder] = {}


def equation_order(F) -> EquationOrder:
    """Equation order Z[gamma] for a primitive element gamma with squarefree
    integral charpoly.  gamma = alpha for absolute fields, alpha + t*zeta
    for composites (smallest t that works)."""
    key = id(F)
    if key in _order_cache:
        return _order_cache[key]
    if isinstance(F, NumberField):
        gamma = F.gen()
        cp = charpoly(gamma)
        order = EquationOrder(F, gamma, cp)
    else:
        for t in range(1, 40):
            gamma = F.ext_gen() + F.base_gen() * t if F.rel_degree > 1 else \
                F.base_gen() + F.ext_gen() * t
            cp = charpoly(gamma)
            if any(c.denominator != 1 for c in cp):
                continue
            der = poly_deriv(list(cp))
            if len(poly_gcd(list(cp), der)) == 1:
                order = EquationOrder(F, gamma, cp)
                break
        else:
            raise ArithmeticError("no primitive element found")
    _order_cache[key] = order
    return order


def ideal_valuation(x, P: IdealLattice) -> int:
    """v_P(x) for a nonzero field element x (signed; denominators handled by
    additivity)."""
    if x.is_zero():
        raise ZeroDivisionError("valuation of zero")
    order = P.order
    vec = order.to_gamma(x)
    den = 1
    for c in vec:
        den = den * c.denominator // gcd(den, c.denominator)
    y = [int(c * den) for c in vec]
    p = P.p
    vp_den = 0
    while den % p == 0:
        den //= p
        vp_den += 1
    v_num = _integral_valuation(y, P)
    return v_num - P.ramification * vp_den


def _inverse_lattice(P: IdealLattice):
    """Lattice L with P^{-1} = L/p: {y : y*P subset Z[gamma]} * p."""
    order = P.order
    d = order.degree
    p = P.p
    # solve for c in (Z/p)^d: for each basis row b of P, gamma-mul(c, b) = 0 mod p
    # build the big matrix: rows indexed by (basis rows x coords), cols = c
    rows = []
    for b in P.hnf:
        # multiplication by b as a matrix acting on c
        cols = []
        for t in range(d):
            unit = [1 if i == t else 0 for i in range(d)]
            cols.append(order.gamma_mul(unit, b))
        for coord in range(d):
            rows.append([cols[t][coord] % p for t in range(d)])
    null = _nullspace_modp(rows, d, p)
    gens = [[p if i == t else 0 for i in range(d)] for t in range(d)]
    gens.extend([[int(c) for c in v] for v in null])
    return hnf_rows(gens, d)


def _nullspace_modp(rows, d, p):
    M = [row[:] for row in rows]
    pivots = {}
    r = 0
    for c in range(d):
        piv = next((i for i in range(r, len(M)) if M[i][c] % p), None)
        if piv is None:
            continue
        M[r], M[piv] = M[piv], M[r]
        inv = pow(M[r][c], -1, p)
        M[r] = [(x * inv) % p for x in M[r]]
        for i in range(len(M)):
            if i != r and M[i][c]:
                f = M[i][c]
                M[i] = [(x - f * y) % p for x, y in zip(M[i], M[r])]
        pivots[c] = r
        r += 1
    free = [c for c in range(d) if c not in pivots]
    out = []
    for fc in free:
        v = [0] * d
        v[fc] = 1
        for c, rr in pivots.items():
            v[c] = (-M[rr][fc]) % p
        out.append(v)
    return out


def _anti_uniformizer(P: IdealLattice):
    """Element a in P^{-1} with v_P(a) = -1 and v >= 0 at the other primes
    over p: any row of p * P^{-1} that is nonzero mod p, divided by p."""
    if getattr(P, "_anti", None) is not None:
        return P._anti
    p = P.p
    Lam = _inverse_lattice(P)
    for row in Lam:
        if any(c % p for c in row):
            a = [Fraction(c, p) for c in row]
            P._anti = a
            return a
    raise ArithmeticError("inverse ideal is trivial; not a prime away from "
                          "the index")


def _p_integral(coords, p: int) -> bool:
    return all(c.denominator % p for c in coords)


def _integral_valuation(y, P: IdealLattice) -> int:
    """v_P(y) for p-integral y: multiply by an anti-uniformizer until a
    p-denominator appears."""
    order = P.order
    p = P.p
    a = _anti_uniformizer(P)
    cur = [Fraction(c) for c in y]
    v = 0
    while True:
        cur = order.gamma_mul(cur, a)
        if not _p_integral(cur, p):
            return v
        v += 1
        if v > 100000:
            raise ArithmeticError("runaway valuation")


def generator_search(I: IdealLattice, F, budget: int = 200):
    """Search for a generator of I: LLL-reduce the Minkowski embedding, then
    test the reduced rows and small +-1 combinations of the shortest four
    (a generator need not be the very shortest vector: the unit orbit skews
    the T2 geometry).

    Returns g with |N(g)| = N(I) (which forces g*O = I given g in I), or
    None when inconclusive within budget."""
    if budget <= 0:
        return None
    import itertools as _it
    import mpmath
    order = I.order
    d = order.degree
    # working precision must cover the lattice entry sizes; the embedding
    # runs through rational gamma coordinates whose numerators scale with
    # the prime
    entry_digits = len(str(abs(I.norm()))) + 30
    work_dps = max(80, entry_digits + 40)
    roots = _minpoly_roots(order, dps=work_dps)
    scale = 1 << 120
    # search in the working-basis order (bi-power for composites), where the
    # natural small generators live; the gamma equation order can have a
    # large index that excludes them
    if I.p is not None and I.gen_element is not None:
        F = order.field
        basis_elems = []
        for t in range(d):
            vec = [Fraction(0)] * d
            vec[t] = Fraction(1)
            basis_elems.append(F.from_abs_vector(vec))
        gen_rows = []
        for b in basis_elems:
            gen_rows.append([int(c * 1) for c in F.to_abs_vector(b * I.p)])
            prod = F.to_abs_vector(I.gen_element * b)
            assert all(c.denominator == 1 for c in prod)
            gen_rows.append([int(c) for c in prod])
        lattice = hnf_rows(gen_rows, d)

        def to_element(coords):
            return F.from_abs_vector([Fraction(c) for c in coords])

        def embed_row(vec):
            gcoords = order.to_gamma(to_element(vec))
            row = []
            with mpmath.workdps(work_dps):
                for rt in roots:
                    val = mpmath.mpc(0)
                    for c in reversed(gcoords):
                        val = val * rt + mpmath.mpf(c.numerator) / c.denominator
                    row.append(int(mpmath.nint(mpmath.re(val) * scale)))
                    row.append(int(mpmath.nint(mpmath.im(val) * scale)))
            return row
    else:
        lattice = I.hnf

        def to_element(coords):
            return order.from_gamma(list(coords))

        def embed_row(vec):
            row = []
            with mpmath.workdps(work_dps):
                for rt in roots:
                    val = mpmath.mpc(0)
                    for c in reversed(vec):
                        val = val * rt + c
                    row.append(int(mpmath.nint(mpmath.re(val) * scale)))
                    row.append(int(mpmath.nint(mpmath.im(val) * scale)))
            return row

    rows = [embed_row(b) + [int(x) for x in b] for b in lattice]
    emb_cols = 2 * len(roots)
    target = abs(I.norm())
    seen = set()
    candidates = []

    def add_from(reduced):
        for v in reduced:
            candidates.append(v[emb_cols:])
        head = reduced[:min(6, len(reduced))]
        for eps in _it.product((0, 1, -1), repeat=len(head)):
            if sum(abs(e) for e in eps) < 2:
                continue
            combo = [sum(e * v[c] for e, v in zip(eps, head))
                     for c in range(emb_cols, len(reduced[0]))]
            candidates.append(combo)
        head = reduced[:min(3, len(reduced))]
        for eps in _it.product((-2, -1, 0, 1, 2), repeat=len(head)):
            if max(abs(e) for e in eps) < 2:
                continue
            combo = [sum(e * v[c] for e, v in zip(eps, head))
                     for c in range(emb_cols, len(reduced[0]))]
            candidates.append(combo)

    add_from(lll_reduce(rows))
    # a couple of re-randomized reductions diversify the short vectors
    import random as _random
    rng = _random.Random(1)
    for _ in range(2):
        shuffled = rows[:]
        rng.shuffle(shuffled)
        add_from(lll_reduce(shuffled))
    tested = 0
    for coords in candidates:
        if tested >= budget:
            break
        key = tuple(coords)
        if key in seen or not any(coords):
            continue
        seen.add(key)
        g = to_element(coords)
        tested += 1
        if abs(norm(g)) == target:
            return g
    return None


def _minpoly_roots(order: EquationOrder, dps: int = 60):
    import mpmath
    old = mpmath.mp.dps
    try:
        mpmath.mp.dps = dps
        coeffs = [mpmath.mpf(c) for c in reversed(order.min_poly)]
        roots = mpmath.polyroots(coeffs, maxsteps=300, extraprec=150)
        roots = sorted(roots, key=lambda r: (mpmath.nstr(mpmath.re(r), 25),
                                             mpmath.nstr(mpmath.im(r), 25)))
    finally:
        mpmath.mp.dps = old
    return roots


# ---------------------------------------------------------------------------
# integer factorization (budgeted)


@dataclass
class FactorRecord:
    factor: int
    exponent: int
    certified_prime: bool


def factor_integer(n: int, budget_seconds: float = 30.0) -> list[FactorRecord]:
    """Trial division + perfect powers + Pollard rho / p-1 within a time
    budget; primality by strong pseudoprime + Lucas (sympy.isprime).
    Unfactored composites are flagged certified_prime=False."""
    import sympy

    if n == 0:
        raise ValueError("cannot factor zero")
    n = abs(n)
    out: dict[int, int] = {}
    deadline = time.monotonic() + budget_seconds

    def add(p, e):
        out[p] = out.get(p, 0) + e

    stack = []
    for p in sympy.primerange(2, 100000):
        while n % p == 0:
            add(p, 1)
            n //= p
        if n == 1:
            break
    if n > 1:
        stack.append((n, 1))
    hard = []
    while stack:
        m, mult = stack.pop()
        if m == 1:
            continue
        if sympy.isprime(m):
            add(m, mult)
            continue
        pp = sympy.perfect_power(m)
        if pp:
            base, e = pp
            stack.append((int(base), mult * int(e)))
            continue
        if time.monotonic() > deadline:
            hard.append((m, mult))
            continue
        divisor = None
        for attempt in range(6):
            if time.monotonic() > deadline:
                break
            divisor = sympy.pollard_rho(m, seed=1234 + attempt)
            if divisor:
                break
            divisor = sympy.pollard_pm1(m, B=10000 * (attempt + 1), seed=42)
            if divisor:
                break
        if divisor and 1 < divisor < m:
            stack.append((int(divisor), mult))
            stack.append((m // int(divisor), mult))
        else:
            hard.append((m, mult))
    records = [FactorRecord(p, e, True) for p, e in sorted(out.items())]
    records.extend(FactorRecord(m, e, False) for m, e in sorted(hard))
    return records
