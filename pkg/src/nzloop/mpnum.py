"""Arbitrary-precision complex ball arithmetic and the special functions used
throughout the pipeline: Bernoulli polynomials, non-positive polylogarithms,
cyclic quantum dilogarithms, finite q-Pochhammer symbols and branch-fixed
roots.

Balls are midpoint/radius pairs built on top of mpmath.  Every operation
inflates the radius by a first-order error bound plus a few ulps, so a ball
computed from exact inputs encloses the exact value.  Radii are not tight;
they only need to certify ~P-10 digits at working precision P.

Half-integer power series in hbar are represented with doubled exponents so
that all bookkeeping stays integral.
"""

from __future__ import annotations

from fractions import Fraction
import mpmath

__all__ = [
    "PrecisionError",
    "PrecisionContext",
    "ComplexBall",
    "HalfPowerSeries",
    "BallRing",
    "RationalRing",
    "bernoulli_poly",
    "neg_polylog",
    "neg_polylog_coeffs",
    "cyclic_dilog",
    "q_pochhammer",
    "principal_root",
]


class PrecisionError(ArithmeticError):
    """Raised when a branch cut straddle or a zero divisor makes the result
    meaningless at the current working precision."""


class PrecisionContext:
    """Working precision for ball arithmetic.

    digits: decimal precision P of the final answers (P >= 50).
    guard: extra digits carried internally.
    """

    def __init__(self, digits: int = 300, guard: int = 30):
        if digits < 50:
            raise ValueError("precision must be at least 50 digits")
        self.digits = digits
        self.guard = guard
        self.mp = mpmath.ctx_mp.MPContext()
        self.mp.dps = digits + guard
        self.prec_bits = self.mp.prec
        # low-precision context for radii (exponent range is unbounded)
        self._rmp = mpmath.ctx_mp.MPContext()
        self._rmp.prec = 20

    def scaled(self, factor: float) -> "PrecisionContext":
        return PrecisionContext(int(self.digits * factor), self.guard)

    # -- constructors -------------------------------------------------------

    def _to_mpf(self, x):
        if isinstance(x, Fraction):
            if x.denominator == 1:
                return self.mp.mpf(x.numerator), True
            return self.mp.mpf(x.numerator) / x.denominator, False
        if isinstance(x, int):
            return self.mp.mpf(x), True
        if isinstance(x, str):
            return self.mp.mpf(x), False
        return self.mp.mpf(x), False

    def ball(self, re, im=0) -> "ComplexBall":
        re_m, re_exact = self._to_mpf(re)
        im_m, im_exact = self._to_mpf(im)
        mid = self.mp.mpc(re_m, im_m)
        rad = self._rmp.mpf(0)
        if not (re_exact and im_exact):
            rad = self.ulp(mid)
        return ComplexBall(self, mid, rad)

    def ball_mid_rad(self, mid, rad) -> "ComplexBall":
        return ComplexBall(self, self.mp.mpc(mid), self._rmp.mpf(rad))

    def zero(self) -> "ComplexBall":
        return ComplexBall(self, self.mp.mpc(0), self._rmp.mpf(0))

    def one(self) -> "ComplexBall":
        return ComplexBall(self, self.mp.mpc(1), self._rmp.mpf(0))

    def pi_ball(self) -> "ComplexBall":
        return ComplexBall(self, self.mp.mpc(self.mp.pi), self.ulp(self.mp.pi))

    def i_ball(self) -> "ComplexBall":
        return ComplexBall(self, self.mp.mpc(0, 1), self._rmp.mpf(0))

    def root_of_unity(self, num: int, den: int) -> "ComplexBall":
        """exp(2 pi i num/den) as a ball."""
        mid = self.mp.expjpi(self.mp.mpf(2 * num) / den)
        return ComplexBall(self, mid, 4 * self.ulp(mid))

    # -- error bookkeeping --------------------------------------------------

    def ulp(self, x):
        m = self.mp.mag(x)
        if m == self.mp.ninf or m < -(1 << 30):
            return self._rmp.mpf(0)
        return self._rmp.mpf(2) ** (int(m) - self.prec_bits + 4)

    def rmpf(self, x):
        return self._rmp.mpf(x)

    def tol(self, drop: int = 10):
        """10^-(P-drop), the default comparison tolerance."""
        return self._rmp.mpf(10) ** (-(self.digits - drop))


class ComplexBall:
    """Complex midpoint-radius ball.  Immutable."""

    __slots__ = ("ctx", "mid", "rad")

    def __init__(self, ctx: PrecisionContext, mid, rad):
        self.ctx = ctx
        self.mid = mid
        self.rad = rad

    # -- helpers ------------------------------------------------------------

    def _coerce(self, other):
        if isinstance(other, ComplexBall):
            return other
        if isinstance(other, (int, Fraction)):
            return self.ctx.ball(other)
        if isinstance(other, (float, complex)):
            c = complex(other)
            return self.ctx.ball(repr(c.real), repr(c.imag))
        return NotImplemented

    def abs_mid(self):
        return abs(self.mid)

    def abs_upper(self):
        return self.ctx._rmp.mpf(abs(self.mid)) + self.rad

    def abs_lower(self):
        lo = self.ctx._rmp.mpf(abs(self.mid)) - self.rad
        return lo if lo > 0 else self.ctx._rmp.mpf(0)

    def contains_zero(self) -> bool:
        return self.ctx._rmp.mpf(abs(self.mid)) <= self.rad

    def overlaps(self, other: "ComplexBall") -> bool:
        d = self.ctx._rmp.mpf(abs(self.mid - other.mid))
        return d <= self.rad + other.rad

    def is_exact_zero(self) -> bool:
        return self.mid == 0 and self.rad == 0

    # -- arithmetic ---------------------------------------------------------

    def __add__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        mid = self.mid + o.mid
        rad = self.rad + o.rad + self.ctx.ulp(mid)
        return ComplexBall(self.ctx, mid, rad)

    __radd__ = __add__

    def __neg__(self):
        return ComplexBall(self.ctx, -self.mid, self.rad)

    def __sub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        mid = self.mid - o.mid
        rad = self.rad + o.rad + self.ctx.ulp(mid)
        return ComplexBall(self.ctx, mid, rad)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return o - self

    def __mul__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        mid = self.mid * o.mid
        rmp = self.ctx._rmp
        rad = (rmp.mpf(abs(self.mid)) * o.rad + rmp.mpf(abs(o.mid)) * self.rad
               + self.rad * o.rad + self.ctx.ulp(mid))
        return ComplexBall(self.ctx, mid, rad)

    __rmul__ = __mul__

    def inverse(self) -> "ComplexBall":
        rmp = self.ctx._rmp
        a = rmp.mpf(abs(self.mid))
        if a <= self.rad:
            raise PrecisionError("division by a ball containing zero")
        mid = 1 / self.mid
        rad = self.rad / (a * (a - self.rad)) + self.ctx.ulp(mid)
        return ComplexBall(self.ctx, mid, rad)

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return self * o.inverse()

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return o * self.inverse()

    def __pow__(self, n: int):
        if not isinstance(n, int):
            return NotImplemented
        if n < 0:
            return self.inverse() ** (-n)
        result = self.ctx.one()
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def conjugate(self) -> "ComplexBall":
        return ComplexBall(self.ctx, self.ctx.mp.conj(self.mid), self.rad)

    # -- transcendental -----------------------------------------------------

    def _check_cut(self):
        """Principal log/sqrt/root guard for the cut (-inf, 0].

        A ball whose imaginary part is indistinguishable from zero but whose
        real part is clearly negative sits ON the cut as far as the working
        precision can tell (symmetric data lands there exactly): the closed
        upper branch (arg = +pi) is chosen deterministically and the
        canonicalized midpoint is returned.  A ball containing zero, or
        genuinely straddling with a nonzero-but-covered imaginary part near
        zero real part, raises instead.  Returns the midpoint to use."""
        rmp = self.ctx._rmp
        im = self.ctx.mp.im(self.mid)
        re = self.ctx.mp.re(self.mid)
        if rmp.mpf(abs(im)) <= self.rad:
            if re < -self.rad:
                # on the cut: canonicalize to the upper side
                return self.ctx.mp.mpc(re, abs(im))
            if rmp.mpf(abs(re)) <= self.rad:
                raise PrecisionError("ball straddles the principal branch cut")
        return self.mid

    def exp(self) -> "ComplexBall":
        mid = self.ctx.mp.exp(self.mid)
        rmp = self.ctx._rmp
        r = self.rad
        growth = rmp.mpf(abs(mid)) * (rmp.exp(r) - 1) if r != 0 else rmp.mpf(0)
        return ComplexBall(self.ctx, mid, growth + 4 * self.ctx.ulp(mid))

    def log(self) -> "ComplexBall":
        use = self._check_cut()
        rmp = self.ctx._rmp
        a = rmp.mpf(abs(use))
        if a <= self.rad:
            raise PrecisionError("log of a ball containing zero")
        mid = self.ctx.mp.log(use)
        rad = self.rad / (a - self.rad) + 4 * self.ctx.ulp(mid)
        return ComplexBall(self.ctx, mid, rad)

    def sqrt(self) -> "ComplexBall":
        use = self._check_cut()
        rmp = self.ctx._rmp
        a = rmp.mpf(abs(use))
        if a <= self.rad:
            raise PrecisionError("sqrt of a ball containing zero")
        mid = self.ctx.mp.sqrt(use)
        rad = self.rad / (2 * rmp.sqrt(a - self.rad)) + 4 * self.ctx.ulp(mid)
        return ComplexBall(self.ctx, mid, rad)

    def root(self, k: int) -> "ComplexBall":
        return principal_root(self, k)

    def real_ball(self) -> "ComplexBall":
        return ComplexBall(self.ctx, self.ctx.mp.mpc(self.ctx.mp.re(self.mid)), self.rad)

    # -- io -----------------------------------------------------------------

    def __repr__(self):
        return "ComplexBall(%s +/- %s)" % (self.ctx.mp.nstr(self.mid, 20),
                                           self.ctx._rmp.nstr(self.rad, 3))

    def serialize(self, digits: int | None = None) -> dict:
        d = digits or self.ctx.digits
        return {
            "re": self.ctx.mp.nstr(self.ctx.mp.re(self.mid), d),
            "im": self.ctx.mp.nstr(self.ctx.mp.im(self.mid), d),
            "rad": self.ctx._rmp.nstr(self.rad, 3),
            "digits": d,
        }


# ---------------------------------------------------------------------------
# coefficient rings for HalfPowerSeries


class BallRing:
    """Coefficient ring adapter: ComplexBall at a fixed precision."""

    exact = False

    def __init__(self, ctx: PrecisionContext):
        self.ctx = ctx

    def zero(self):
        return self.ctx.zero()

    def one(self):
        return self.ctx.one()

    def from_fraction(self, q: Fraction):
        return self.ctx.ball(q)

    def is_zero(self, x, drop: int = 20) -> bool:
        return x.abs_upper() < self.ctx.tol(drop)


class RationalRing:
    """Exact rational coefficients."""

    exact = True

    def zero(self):
        return Fraction(0)

    def one(self):
        return Fraction(1)

    def from_fraction(self, q: Fraction):
        return q

    def is_zero(self, x, drop: int = 0) -> bool:
        return x == 0


class HalfPowerSeries:
    """Truncated formal series in hbar^(1/2).

    Exponents are stored doubled: coefficient of hbar^(n2/2) sits at key n2.
    `hi` is the doubled truncation order: the series is known modulo
    hbar^((hi+1)/2).  Coefficients live in an arbitrary ring (balls, exact
    field elements, rationals) provided through a ring adapter.
    """

    __slots__ = ("ring", "coeffs", "hi")

    def __init__(self, ring, coeffs: dict, hi: int):
        self.ring = ring
        self.hi = hi
        self.coeffs = {n2: c for n2, c in coeffs.items() if n2 <= hi}

    # -- constructors -------------------------------------------------------

    @classmethod
    def constant(cls, ring, value, hi: int):
        return cls(ring, {0: value}, hi)

    @classmethod
    def monomial(cls, ring, value, n2: int, hi: int):
        return cls(ring, {n2: value}, hi)

    def lowest(self) -> int | None:
        live = [n2 for n2, c in self.coeffs.items() if not self.ring.is_zero(c)]
        return min(live) if live else None

    def coeff(self, n2: int):
        if n2 > self.hi:
            raise ValueError("coefficient beyond truncation order")
        return self.coeffs.get(n2, self.ring.zero())

    # -- arithmetic ---------------------------------------------------------

    def __add__(self, other):
        if not isinstance(other, HalfPowerSeries):
            return NotImplemented
        hi = min(self.hi, other.hi)
        out = dict(self.coeffs)
        for n2, c in other.coeffs.items():
            out[n2] = out[n2] + c if n2 in out else c
        return HalfPowerSeries(self.ring, out, hi)

    def __neg__(self):
        return HalfPowerSeries(self.ring, {k: -c for k, c in self.coeffs.items()}, self.hi)

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if not isinstance(other, HalfPowerSeries):
            return self.scale(other)
        lo_a = min(self.coeffs, default=0)
        lo_b = min(other.coeffs, default=0)
        hi = min(self.hi + lo_b, other.hi + lo_a)
        out = {}
        for na, ca in self.coeffs.items():
            for nb, cb in other.coeffs.items():
                n = na + nb
                if n > hi:
                    continue
                p = ca * cb
                out[n] = out[n] + p if n in out else p
        return HalfPowerSeries(self.ring, out, hi)

    def scale(self, c):
        return HalfPowerSeries(self.ring, {k: v * c for k, v in self.coeffs.items()}, self.hi)

    def shift(self, n2: int):
        """Multiply by hbar^(n2/2)."""
        return HalfPowerSeries(self.ring, {k + n2: v for k, v in self.coeffs.items()},
                               self.hi + n2)

    def truncate(self, hi: int):
        return HalfPowerSeries(self.ring, self.coeffs, min(hi, self.hi))

    def exp(self):
        """exp of a series with valuation >= 1/2."""
        lo = self.lowest()
        if lo is not None and lo < 1:
            raise ValueError("exp requires valuation >= hbar^(1/2)")
        one = HalfPowerSeries.constant(self.ring, self.ring.one(), self.hi)
        result = one
        term = one
        p = 1
        while p <= self.hi:
            term = term * self * Fraction(1, p)
            if term.lowest() is None:
                break
            result = result + term
            p += 1
        return result

    def log1(self):
        """log of a series with constant term 1."""
        u = self - HalfPowerSeries.constant(self.ring, self.ring.one(), self.hi)
        lo = u.lowest()
        if lo is not None and lo < 1:
            raise ValueError("log1 requires 1 + O(hbar^(1/2))")
        result = HalfPowerSeries(self.ring, {}, self.hi)
        term = None
        p = 1
        while p <= self.hi:
            term = u if term is None else term * u
            if term.lowest() is None:
                break
            result = result + term.scale(self.ring.from_fraction(Fraction((-1) ** (p + 1), p)))
            p += 1
        return result

    def integer_powers_only(self, drop: int = 20) -> bool:
        return all(n2 % 2 == 0 or self.ring.is_zero(c, drop)
                   for n2, c in self.coeffs.items())

    def __repr__(self):
        items = ", ".join("h^%s/2: %r" % (n2, c) for n2, c in sorted(self.coeffs.items()))
        return "HalfPowerSeries(%s | hi=%s)" % (items, self.hi)


# ---------------------------------------------------------------------------
# special functions


_bernoulli_cache: dict[int, Fraction] = {}


def _bernoulli_number(n: int) -> Fraction:
    # B_1 = -1/2 per the generating function t e^{xt}/(e^t - 1); sympy >= 1.12
    # switched to the B_1 = +1/2 convention, so pin it here.
    if n == 1:
        return Fraction(-1, 2)
    if n not in _bernoulli_cache:
        import sympy
        b = sympy.bernoulli(n)
        _bernoulli_cache[n] = Fraction(int(b.p), int(b.q))
    return _bernoulli_cache[n]


def bernoulli_poly(n: int, x: Fraction) -> Fraction:
    """B_n(x) exactly, via B_n(x) = sum C(n,t) B_t x^(n-t).

    Convention B_1 = -1/2, so B_1(x) = x - 1/2 and B_1(1) = 1/2.
    """
    from math import comb
    x = Fraction(x)
    acc = Fraction(0)
    for t in range(n + 1):
        acc += comb(n, t) * _bernoulli_number(t) * x ** (n - t)
    return acc


_polylog_numerators: dict[int, list[int]] = {0: [0, 1]}


def neg_polylog_coeffs(l: int) -> list[int]:
    """Numerator coefficients (ascending) of Li_l = A(x)/(1-x)^(1-l), l <= 0."""
    if l > 0:
        raise ValueError("only non-positive orders have rational form")
    m = -l
    top = max(_polylog_numerators)
    while top < m:
        a = _polylog_numerators[top]
        # A_{t+1} = x * (A'(x)(1-x) + (t+1) A(x))
        d = [i * a[i] for i in range(1, len(a))]
        out = [0] * (len(a) + 1)
        for i, c in enumerate(d):
            out[i + 1] += c
            out[i + 2] -= c
        for i, c in enumerate(a):
            out[i + 1] += (top + 1) * c
        while out and out[-1] == 0:
            out.pop()
        top += 1
        _polylog_numerators[top] = out
    return _polylog_numerators[m]


def neg_polylog(l: int, x):
    """Li_l(x) for l <= 1.

    For l <= 0 this is an exact rational function valid over any ring
    (balls, field elements, rationals); Li_1 = -log(1-x) needs balls.
    """
    if l > 1:
        raise ValueError("neg_polylog only handles l <= 1")
    if l == 1:
        one = x.ctx.one() if isinstance(x, ComplexBall) else Fraction(1)
        return -((one - x).log())
    coeffs = neg_polylog_coeffs(l)
    num = None
    for c in reversed(coeffs):
        num = c if num is None else num * x + c
    if isinstance(num, int):
        num = x * 0 + num
    one = x * 0 + 1
    den = (one - x)
    m = -l
    return num * (den ** (m + 1)).inverse() if isinstance(x, ComplexBall) \
        else num / den ** (m + 1)


def q_pochhammer(a, q, m: int):
    """Finite (a; q)_m = prod_{r=0}^{m-1} (1 - a q^r)."""
    one = a * 0 + 1
    result = one
    power = one
    for _ in range(m):
        result = result * (one - a * power)
        power = power * q
    return result


def cyclic_dilog(variant: str, k: int, x, zeta):
    """Cyclic quantum dilogarithm D_k / D*_k.

    D_k(x) = prod_{s=1}^{k-1} (1 - zeta^s x)^s,
    D*_k(x) = prod_{s=1}^{k-1} (1 - zeta^-s x)^s.
    zeta must be a primitive k-th root of unity in the same ring as x.
    """
    if variant not in ("D", "D*"):
        raise ValueError("variant must be 'D' or 'D*'")
    one = x * 0 + 1
    result = one
    if k == 1:
        return result
    zpow = one
    zinv = None
    if variant == "D*":
        if isinstance(zeta, ComplexBall):
            zinv = zeta.inverse()
        else:
            zinv = 1 / zeta
    step = zeta if variant == "D" else zinv
    for s in range(1, k):
        zpow = zpow * step
        factor = one - zpow * x
        if isinstance(factor, ComplexBall) and factor.contains_zero():
            raise PrecisionError("vanishing cyclic dilogarithm factor")
        if not isinstance(factor, ComplexBall) and factor == 0:
            raise ZeroDivisionError("vanishing cyclic dilogarithm factor")
        result = result * factor ** s
    return result


def principal_root(x: ComplexBall, k: int) -> ComplexBall:
    """Principal k-th root exp(log(x)/k).  Errors out if the ball straddles
    the branch cut at the current precision."""
    if k <= 0:
        raise ValueError("k must be positive")
    if k == 1:
        return x
    return (x.log() * Fraction(1, k)).exp()
