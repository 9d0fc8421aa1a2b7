"""Higher-loop engine: vertex factors, diagram evaluation, loop series, the
Wick-contraction oracle, complex volume."""

import itertools
import random
from fractions import Fraction

import pytest

from nzloop.mpnum import PrecisionContext, RationalRing, HalfPowerSeries
from nzloop.field import NumberField
from nzloop.nzdata import load_bundled_datum
from nzloop.oneloop import LevelContext
from nzloop.graphs import enumerate_diagrams, canonical_key_and_aut, Diagram
from nzloop.perturb import (PerturbationContext, FieldRing, vertex_factor,
                            gamma0, evaluate_diagram, connected_sum,
                            loop_series, wick_oracle, wick_expectation,
                            complex_volume)


@pytest.fixture(scope="module")
def ctx():
    return PrecisionContext(120)


@pytest.fixture(scope="module")
def d41():
    return load_bundled_datum("4_1")


@pytest.fixture(scope="module")
def d52():
    return load_bundled_datum("5_2")


def synthetic_pctx(seed, k=1, N=2, n_max=3):
    """Exact rational perturbation data: random symmetric integer B^-1 A,
    random B^-1 nu, and shapes; at k = 2 the shapes are squares of rationals
    so every theta is rational and all arithmetic stays in Q."""
    rng = random.Random(seed)
    Q = NumberField([0, 1], ("0", "0"), "Q")
    ring = FieldRing(Q)
    while True:
        BinvA = [[0] * N for _ in range(N)]
        for i in range(N):
            for j in range(i, N):
                BinvA[i][j] = BinvA[j][i] = rng.randint(-3, 3)
        Binvnu = [rng.randint(-2, 2) for _ in range(N)]
        f = [rng.randint(-1, 1) for _ in range(N)]
        if k == 1:
            theta = [Fraction(rng.randint(2, 9), rng.randint(2, 9) + 7)
                     for _ in range(N)]
            zs = theta
        else:
            theta = [Fraction(rng.randint(2, 9), rng.randint(11, 19))
                     for _ in range(N)]
            zs = [t * t for t in theta]
        if any(z in (0, 1) for z in zs):
            continue
        zeta = Q.from_rational(1 if k == 1 else -1)
        zp = [Q.from_rational(1 / (1 - z)) for z in zs]
        theta_inv = [Q.from_rational(1 / t) for t in theta]
        try:
            return PerturbationContext(ring, k, N, BinvA, Binvnu, f, zeta,
                                       theta_inv, zp, n_max=n_max)
        except ArithmeticError:
            continue  # singular Hessian; retry


def test_vertex_factor_examples_k1(d41):
    p = PerturbationContext.exact_k1(d41, n_max=3)
    F = d41.field
    z = d41.shapes_exact()[0]
    one = F.one()
    # Gamma^(3) leading term: -z/(1-z)^2 at hbar^-1
    g3 = vertex_factor(p, 3, 0, 0)
    lead = g3.coeff(-2)
    assert lead == -z * ((one - z) ** 2).inverse()
    # Gamma^(1) at hbar^0 with nu = 0: (1/2)(1-z)^{-1}
    g1 = vertex_factor(p, 1, 0, 0)
    assert g1.coeff(0) == ((one - z) * 2).inverse()
    # Gamma^(4) leading: -z(1+z)/(1-z)^3 at hbar^-1
    g4 = vertex_factor(p, 4, 0, 0)
    assert g4.coeff(-2) == -z * (one + z) * ((one - z) ** 3).inverse()


def test_vertex_factor_m_periodicity(ctx, d41):
    lvl = LevelContext(d41, 3, ctx)
    p = PerturbationContext.from_level(lvl, n_max=3)
    for j in (0, 1, 2, 3, 4):
        a = vertex_factor(p, j, 0, 1)
        b = vertex_factor(p, j, 0, 1 + 3)
        for n2 in set(a.coeffs) | set(b.coeffs):
            diff = a.coeffs.get(n2, ctx.zero()) - b.coeffs.get(n2, ctx.zero())
            assert diff.abs_upper() < ctx.tol(10)


def test_trivial_diagram_is_gamma0(d41):
    p = PerturbationContext.exact_k1(d41, n_max=3)
    g0 = gamma0(p, (0, 0))
    # no diagrams: the connected sum over the empty diagram set is Gamma^(0)
    acc = connected_sum(p, (0, 0), diagrams=())
    assert all((acc.coeffs[k] - g0.coeffs[k]).is_zero() for k in acc.coeffs)


def test_center_diagram_evaluation_formula(d41):
    """The dumbbell evaluates to (1/8) sum_{i,i'} P_ii G3_i P_ii' G3_i' P_i'i'."""
    p = PerturbationContext.exact_k1(d41, n_max=3)
    key, aut = canonical_key_and_aut([[1, 1], [1, 1]])
    D = Diagram(adj=((1, 1), (1, 1)), key=key, aut=aut)
    val = evaluate_diagram(p, D, (0, 0))
    N = p.N
    g3 = [vertex_factor(p, 3, i, 0) for i in range(N)]
    acc = None
    for i in range(N):
        for i2 in range(N):
            term = (g3[i] * g3[i2]).scale(p.P0[i][i] * p.P0[i][i2] * p.P0[i2][i2])
            term = term.shift(6)
            acc = term if acc is None else acc + term
    acc = acc.scale(p.ring.from_fraction(Fraction(1, 8)))
    for n2 in range(0, min(val.hi, acc.hi) + 1):
        assert (val.coeff(n2) - acc.coeff(n2)).is_zero()


def test_theta_graph_single_index():
    """N = 1: the theta graph collapses to (1/12) (Gamma^(3))^2 Pi^3."""
    p = synthetic_pctx(21, k=1, N=1)
    key, aut = canonical_key_and_aut([[0, 3], [3, 0]])
    D = Diagram(adj=((0, 3), (3, 0)), key=key, aut=aut)
    val = evaluate_diagram(p, D, (0,))
    g3 = vertex_factor(p, 3, 0, 0)
    expect = (g3 * g3).scale(p.P0[0][0] ** 3).shift(6)
    expect = expect.scale(p.ring.from_fraction(Fraction(1, 12)))
    for n2 in range(0, min(val.hi, expect.hi) + 1):
        assert (val.coeff(n2) - expect.coeff(n2)).is_zero()


def test_diagram_low_order_vanishing():
    """[D]_m has no terms below hbar^(b1 + d1 + d2 - 1)."""
    p = synthetic_pctx(22, k=1, N=2)
    for D in enumerate_diagrams(3):
        val = evaluate_diagram(p, D, (0, 0))
        low = val.lowest()
        if low is not None:
            assert low >= 2 * (D.loop_number - 1)


def test_two_loop_term_by_term(ctx, d41):
    """The assembled n = 2 evaluation matches the explicit six-diagram
    formula with factors 1/8, 1/8, 1/12, 1/2, 1/2, 1/2."""
    lvl = LevelContext(d41, 2, ctx)
    p = PerturbationContext.from_level(lvl, n_max=2)
    N = p.N
    m = (1, 0)
    g = {j: [vertex_factor(p, j, i, m[i]) for i in range(N)] for j in (1, 2, 3, 4)}
    P0 = p.P0

    def hb(series, power2, scalar):
        return series.shift(power2).scale(scalar)

    total = gamma0(p, m)
    acc = None
    for i in range(N):
        t = hb(g[4][i], 4, P0[i][i] * P0[i][i] * Fraction(1, 8))
        acc = t if acc is None else acc + t
    for i in range(N):
        for j in range(N):
            acc = acc + hb(g[3][i] * g[3][j], 6,
                           P0[i][i] * P0[i][j] * P0[j][j] * Fraction(1, 8))
            acc = acc + hb(g[3][i] * g[3][j], 6,
                           P0[i][j] ** 3 * Fraction(1, 12))
            acc = acc + hb(g[1][i] * g[3][j], 4,
                           P0[i][j] * P0[j][j] * Fraction(1, 2))
            acc = acc + hb(g[1][i] * g[1][j], 2, P0[i][j] * Fraction(1, 2))
    for i in range(N):
        acc = acc + hb(g[2][i], 2, P0[i][i] * Fraction(1, 2))
    total = total + acc
    engine = connected_sum(p, m)
    diff = total - engine
    assert all(c.abs_upper() < ctx.tol(15) for c in diff.coeffs.values())


def test_loop_series_4_1_exact(d41):
    p = PerturbationContext.exact_k1(d41, n_max=3)
    ls = loop_series(p, with_tau=False)
    F = d41.field
    alpha = F.gen()
    assert ls.S[2] == (11 * alpha - 10) / 108
    assert ls.S[3] == F.from_rational(Fraction(-1, 54))


def test_loop_series_5_2_exact(d52):
    p = PerturbationContext.exact_k1(d52, n_max=3)
    ls = loop_series(p, with_tau=False)
    F = d52.field
    a = F.gen()
    assert ls.S[3] == (a * a * 465 - a * 465 + 54) / 24334


def test_wick_oracle_matches_diagrams_exact_k1(d41):
    p = PerturbationContext.exact_k1(d41, n_max=3)
    ls = loop_series(p, with_tau=False)
    wo = wick_oracle(p)
    for n in (2, 3):
        assert (ls.S[n] - wo.S[n]).is_zero()


@pytest.mark.parametrize("k", [1, 2])
def test_wick_oracle_matches_diagrams_synthetic(k):
    """Per-m exact equality of exp(connected sum) and <f> in rational
    arithmetic, 100 random data per level (200 total)."""
    diagrams = enumerate_diagrams(3)
    for case in range(100):
        p = synthetic_pctx(1000 * k + case, k=k, N=2, n_max=3)
        for m in itertools.product(range(k), repeat=2):
            lhs = connected_sum(p, m, diagrams).exp()
            rhs = wick_expectation(p, m)
            for n2 in range(0, p.hi + 1):
                assert (lhs.coeff(n2) - rhs.coeff(n2)).is_zero(), (case, m, n2)


def test_wick_oracle_ball_overlap_k2(ctx, d41):
    lvl = LevelContext(d41, 2, ctx)
    p = PerturbationContext.from_level(lvl, n_max=3)
    ls = loop_series(p, with_tau=False)
    wo = wick_oracle(p)
    for n in (2, 3):
        assert ls.S[n].overlaps(wo.S[n])
        assert (ls.S[n] - wo.S[n]).abs_upper() < ctx.tol(20)


def test_phi_plus_integer_powers_and_constant(ctx, d41):
    lvl = LevelContext(d41, 3, ctx)
    p = PerturbationContext.from_level(lvl, n_max=3)
    ls = loop_series(p, with_tau=False)
    assert ls.phi_plus.integer_powers_only()
    assert (ls.phi_plus.coeff(0) - 1).abs_upper() < ctx.tol(20)


def test_phi_plus_theta_invariance(ctx, d41, d52):
    """Coefficients of phi^+ do not depend on the k-th root choices."""
    for datum, k in ((d41, 2), (d41, 3), (d52, 2)):
        base = loop_series(PerturbationContext.from_level(
            LevelContext(datum, k, ctx), n_max=3), with_tau=False)
        for shift_idx in range(datum.N):
            shifts = tuple(1 if i == shift_idx else 0 for i in range(datum.N))
            other = loop_series(PerturbationContext.from_level(
                LevelContext(datum, k, ctx, theta_shifts=shifts), n_max=3),
                with_tau=False)
            for n in (2, 3):
                assert (base.S[n] - other.S[n]).abs_upper() < ctx.tol(20), \
                    (datum.name, k, shift_idx)


def test_S_values_recognized_match_tables(ctx, d41):
    from nzloop.recognition import field_tower, element_from_golden, load_golden
    from nzloop.field import recognize
    g = load_golden("4_1")
    for k in (2, 3):
        lvl = LevelContext(d41, k, ctx)
        p = PerturbationContext.from_level(lvl, n_max=3)
        ls = loop_series(p, with_tau=False)
        F_k = field_tower(d41.field, k, ctx)
        for n, table in ((2, g["S2"]), (3, g["S3"])):
            rec = recognize(ls.S[n], F_k, ctx, height_bound=10 ** 9)
            assert rec.element == element_from_golden(table[str(k)], F_k)


def test_complex_volume(ctx, d41, d52):
    import math
    pi2_6 = math.pi ** 2 / 6
    for datum, vol in ((d41, 2.029883212819307), (d52, 2.8281220883307831)):
        v = complex_volume(LevelContext(datum, 1, ctx))
        im = float(ctx.mp.im(v.mid))
        assert abs(abs(im) - vol) < 1e-9
        if datum.name == "4_1":
            # amphichiral: Chern-Simons part vanishes mod pi^2/6
            re = float(ctx.mp.re(v.mid))
            assert abs(re / pi2_6 - round(re / pi2_6)) < 1e-9
        # explicit 1/k prefactor
        v3 = complex_volume(LevelContext(datum, 3, ctx))
        assert (v3 * 3 - v).abs_upper() < ctx.tol(20)


def test_diagram_census_dump():
    from nzloop.perturb import diagram_census_dump
    dump = diagram_census_dump(2)
    assert len(dump) == 6
    assert sorted(d["symmetry_factor"] for d in dump) == [2, 2, 2, 8, 8, 12]
    assert all(d["loop_number"] <= 2 for d in dump)
