"""Special functions, ball arithmetic and half-power series."""

import random
from fractions import Fraction

import pytest

from nzloop.mpnum import (PrecisionContext, PrecisionError, HalfPowerSeries,
                          RationalRing, bernoulli_poly, neg_polylog,
                          cyclic_dilog, q_pochhammer, principal_root)


@pytest.fixture(scope="module")
def ctx():
    return PrecisionContext(120)


def test_bernoulli_examples():
    assert bernoulli_poly(0, Fraction(3, 7)) == 1
    assert bernoulli_poly(1, Fraction(1)) == Fraction(1, 2)
    assert bernoulli_poly(1, Fraction(2, 5)) == Fraction(2, 5) - Fraction(1, 2)
    assert bernoulli_poly(2, Fraction(1, 2)) == Fraction(-1, 12)


def test_neg_polylog_examples():
    assert neg_polylog(0, Fraction(2)) == -2
    assert neg_polylog(-1, Fraction(1, 2)) == 2
    assert neg_polylog(-2, Fraction(-1)) == 0


def test_neg_polylog_pole():
    with pytest.raises(ZeroDivisionError):
        neg_polylog(0, Fraction(1))


def test_polylog_derivative_recurrence():
    # Li_{l-1} = x d/dx Li_l as rational functions, on random rationals
    rng = random.Random(1)
    h = Fraction(1, 10 ** 12)
    for _ in range(40):
        x = Fraction(rng.randint(-40, 40), rng.randint(1, 19))
        if x in (0, 1) or x + h == 1:
            continue
        for l in (0, -1, -2):
            d = (neg_polylog(l, x + h) - neg_polylog(l, x - h)) / (2 * h)
            exact = neg_polylog(l - 1, x) / x if x else 0
            assert abs(d - exact) < Fraction(1, 10 ** 8)


def test_polylog_multiplication_formula():
    # sum_{s=1}^k Li_l(zeta^s w) = k^{1-l} Li_l(w^k): verified exactly with
    # cyclotomic arithmetic replaced by grouping over w-powers is not
    # available here, so check the l <= 0 cases through the rational form on
    # k-th powers: evaluate both sides with high-precision balls.
    ctx = PrecisionContext(80)
    rng = random.Random(2)
    cases = 0
    while cases < 200:
        k = rng.randint(1, 8)
        w = Fraction(rng.randint(-30, 30), rng.randint(1, 13))
        if w == 0 or w ** k == 1:
            continue
        wb = ctx.ball(w)
        zeta = ctx.root_of_unity(1, k)
        for l in (0, -1, -2, -3):
            lhs = ctx.zero()
            skip = False
            for s in range(1, k + 1):
                arg = zeta ** s * wb
                if (1 - arg).contains_zero():
                    skip = True
                    break
                lhs = lhs + neg_polylog(l, arg)
            if skip:
                continue
            rhs = ctx.ball(k) ** (1 - l) * neg_polylog(l, ctx.ball(w ** k))
            assert (lhs - rhs).abs_upper() < ctx.tol(10)
        cases += 1


def test_cyclic_dilog_trivial_and_k2(ctx):
    x = ctx.ball(Fraction(3, 7))
    assert (cyclic_dilog("D", 1, x, ctx.one()) - 1).abs_upper() < ctx.tol()
    # D_2(x) = 1 + x
    z2 = ctx.ball(-1)
    assert (cyclic_dilog("D", 2, x, z2) - (1 + x)).abs_upper() < ctx.tol()


@pytest.mark.parametrize("k", range(2, 13))
def test_cyclic_dilog_identities(ctx, k):
    """Lemma-style identities cd1-cd4 at random rational arguments."""
    rng = random.Random(100 + k)
    zeta = ctx.root_of_unity(1, k)
    tol = ctx.tol(10)
    for _ in range(18):
        x = ctx.ball(Fraction(rng.randint(-20, 20), rng.randint(2, 17)),
                     Fraction(rng.randint(-20, 20), rng.randint(2, 17)))
        def close(u, v):
            scale = max(ctx.rmpf(1), u.abs_upper(), v.abs_upper())
            return (u - v).abs_upper() < tol * scale

        try:
            Dx = cyclic_dilog("D", k, x, zeta)
            Dsx = cyclic_dilog("D*", k, x, zeta)
            # cd1
            assert close(cyclic_dilog("D", k, x * zeta, zeta),
                         Dx * (1 - x) ** k / (1 - x ** k))
            # cd2
            assert close(cyclic_dilog("D*", k, x * zeta.inverse(), zeta),
                         Dsx * (1 - x) ** k / (1 - x ** k))
            # cd3
            assert close(Dsx * cyclic_dilog("D", k, x * zeta, zeta),
                         (1 - x ** k) ** (k - 1))
            # cd4 with the corrected constant
            # (-1)^{k(k-1)/2} e^{2 pi i (k-1)(2k-1)/6}; the printed constant
            # e^{2 pi i (k^2-1)/3} agrees with it up to sign
            C = ctx.root_of_unity((k - 1) * (2 * k - 1), 6)
            if (k * (k - 1) // 2) % 2:
                C = -C
            paper_C = ctx.root_of_unity(k * k - 1, 3)
            assert ((C * C) - paper_C * paper_C).abs_upper() < tol
            assert close(Dx, C * x ** (k * (k - 1) // 2)
                         * cyclic_dilog("D*", k, x.inverse(), zeta))
        except (PrecisionError, ZeroDivisionError):
            continue


def test_q_pochhammer_basics(ctx):
    a = ctx.ball(Fraction(2, 5), Fraction(1, 3))
    q = ctx.root_of_unity(1, 7)
    assert (q_pochhammer(a, q, 0) - 1).abs_upper() < ctx.tol()
    assert (q_pochhammer(a, q, 1) - (1 - a)).abs_upper() < ctx.tol()
    # telescoping identity: (zq; q)_{m+1}/(zq^2; q)_m = 1 - zq
    rng = random.Random(3)
    for _ in range(30):
        m = rng.randint(0, 6)
        z = ctx.ball(Fraction(rng.randint(-9, 9), rng.randint(2, 9)),
                     Fraction(rng.randint(1, 9), rng.randint(2, 9)))
        lhs = q_pochhammer(z * q, q, m + 1) / q_pochhammer(z * q * q, q, m)
        assert (lhs - (1 - z * q)).abs_upper() < ctx.tol(8)


def test_principal_root(ctx):
    assert (principal_root(ctx.one(), 5) - 1).abs_upper() < ctx.tol()
    z6 = ctx.root_of_unity(1, 6)
    r = principal_root(z6, 2)
    z12 = ctx.root_of_unity(1, 12)
    assert (r - z12).abs_upper() < ctx.tol()
    # result^k encloses x
    x = ctx.ball(Fraction(-3, 7), Fraction(5, 9))
    for k in (2, 3, 7):
        assert (principal_root(x, k) ** k - x).contains_zero()


def test_branch_cut_handling(ctx):
    # a ball covering zero raises
    bad = ctx.ball_mid_rad(ctx.mp.mpc(10 ** -40, 10 ** -50), ctx.rmpf(10) ** -10)
    with pytest.raises(PrecisionError):
        bad.log()
    # a ball on the negative real axis takes the closed upper branch
    oncut = ctx.ball_mid_rad(ctx.mp.mpc(-2, -(10 ** -200)), ctx.rmpf(10) ** -150)
    val = oncut.log()
    assert (val - (ctx.ball(2).log() + ctx.pi_ball() * ctx.i_ball())).contains_zero()


def test_ball_radius_through_deep_trees():
    ctx = PrecisionContext(120)
    x = ctx.ball(Fraction(3, 7), Fraction(2, 11))
    y = x
    for i in range(100):
        y = y * x + x - y / (x + 2)
    assert y.rad < ctx.rmpf(10) ** (-(ctx.digits - 5))


def test_ball_enclosure_under_rational_ops():
    ctx1 = PrecisionContext(60)
    ctx2 = PrecisionContext(200)
    q1, q2 = Fraction(22, 7), Fraction(-3, 13)
    v1 = (ctx1.ball(q1) * ctx1.ball(q2) + ctx1.ball(q1)).inverse()
    v2 = (ctx2.ball(q1) * ctx2.ball(q2) + ctx2.ball(q1)).inverse()
    exact = 1 / (q1 * q2 + q1)
    for v, c in ((v1, ctx1), (v2, ctx2)):
        assert (v - c.ball(exact)).contains_zero()


def test_series_arithmetic_and_exp_log():
    r = RationalRing()
    s = HalfPowerSeries(r, {1: Fraction(1), 3: Fraction(-2, 3)}, 8)
    e = s.exp()
    assert e.coeff(0) == 1
    assert (e.log1() - s).lowest() is None
    t = HalfPowerSeries(r, {-2: Fraction(5), 2: Fraction(1)}, 8)
    prod = s * t
    assert prod.coeff(-1) == 5
    with pytest.raises(ValueError):
        t.exp()


def test_series_truncation_semantics():
    r = RationalRing()
    a = HalfPowerSeries(r, {0: Fraction(1), 2: Fraction(1)}, 4)
    b = HalfPowerSeries(r, {2: Fraction(1)}, 10)
    prod = a * b
    assert prod.hi == 6  # known modulo hbar^(7/2)
    with pytest.raises(ValueError):
        prod.coeff(8)
