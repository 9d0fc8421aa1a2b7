"""Acceptance suite: one test per criterion, each printing a PASS line.

Tolerances: tau_num = 10^-(P-30) at working precision P = 300 unless a
criterion states otherwise.  The 5_2 level-7 end-to-end criterion runs at
500 digits.
"""

import itertools
import json
import os
import time
from fractions import Fraction

import pytest

from nzloop.mpnum import PrecisionContext
from nzloop.field import norm, unit_test, recognize, ideal_valuation
from nzloop.nzdata import (load_bundled_datum, validate, rotate_quad,
                           solve_flattening)
from nzloop.oneloop import LevelContext, tau_level_k, tau1_squared_exact
from nzloop.graphs import enumerate_diagrams
from nzloop.perturb import PerturbationContext, loop_series, wick_oracle
from nzloop.recognition import (field_tower, fit_with_root_scan,
                                unit_power_decompose, norm_table_entry,
                                load_golden, element_from_golden, verify_golden)

P = 300


@pytest.fixture(scope="module")
def ctx():
    return PrecisionContext(P)


def report(name, ok, extra=""):
    line = "ACCEPTANCE %-34s %s %s" % (name, "PASS" if ok else "FAIL", extra)
    print(line)
    assert ok, line


# -- [PRIMARY] diagram census -------------------------------------------------

def test_diagram_census():
    t0 = time.time()
    counts = {n: len(enumerate_diagrams(n)) for n in (2, 3, 4, 5)}
    elapsed = time.time() - t0
    ok = counts == {2: 6, 3: 40, 4: 331, 5: 3700} and elapsed < 300
    report("diagram census n=2..5", ok, "counts=%s %.1fs" % (counts, elapsed))


@pytest.mark.skipif(not os.environ.get("NZLOOP_N6"),
                    reason="opt-in (NZLOOP_N6=1): about a minute")
def test_diagram_census_n6():
    t0 = time.time()
    count = len(enumerate_diagrams(6))
    ok = count == 53758 and time.time() - t0 < 7200
    report("diagram census n=6 (opt-in)", ok, "count=%d" % count)


# -- [PRIMARY] 2-loop structure ------------------------------------------------

def test_two_loop_structure(ctx):
    from collections import Counter
    diagrams = enumerate_diagrams(2)
    factors = Counter(D.symmetry_factor for D in diagrams)
    ok = factors == Counter({8: 2, 12: 1, 2: 3})
    # term-by-term match of the assembled n=2 evaluation against the explicit
    # six-diagram formula is asserted in test_perturb.py::test_two_loop_term_by_term;
    # re-run its core here on a second m value
    d = load_bundled_datum("4_1")
    lvl = LevelContext(d, 2, ctx)
    p = PerturbationContext.from_level(lvl, n_max=2)
    from nzloop.perturb import connected_sum, gamma0, vertex_factor
    m = (0, 1)
    N = p.N
    g = {j: [vertex_factor(p, j, i, m[i]) for i in range(N)] for j in (1, 2, 3, 4)}
    acc = gamma0(p, m)
    for i in range(N):
        acc = acc + g[4][i].shift(4).scale(p.P0[i][i] ** 2 * Fraction(1, 8))
        acc = acc + g[2][i].shift(2).scale(p.P0[i][i] * Fraction(1, 2))
    for i in range(N):
        for j in range(N):
            acc = acc + (g[3][i] * g[3][j]).shift(6).scale(
                p.P0[i][i] * p.P0[i][j] * p.P0[j][j] * Fraction(1, 8))
            acc = acc + (g[3][i] * g[3][j]).shift(6).scale(
                p.P0[i][j] ** 3 * Fraction(1, 12))
            acc = acc + (g[1][i] * g[3][j]).shift(4).scale(
                p.P0[i][j] * p.P0[j][j] * Fraction(1, 2))
            acc = acc + (g[1][i] * g[1][j]).shift(2).scale(
                p.P0[i][j] * Fraction(1, 2))
    engine = connected_sum(p, m)
    diff = acc - engine
    ok = ok and all(c.abs_upper() < ctx.tol(30) for c in diff.coeffs.values())
    report("2-loop structure {1/8,1/8,1/12,1/2,1/2,1/2}", ok)


# -- [PRIMARY] 4_1 exact k=1 ----------------------------------------------------

def test_4_1_exact_k1():
    t0 = time.time()
    d = load_bundled_datum("4_1")
    F = d.field
    alpha = F.gen()
    tinv, _ = tau1_squared_exact(d)
    p1 = PerturbationContext.exact_k1(d, n_max=3)
    ls = loop_series(p1, with_tau=False)
    ok = (tinv in (2 * alpha - 1, -(2 * alpha - 1))
          and ls.S[2] == (alpha * 11 - 10) / 108
          and ls.S[3] == F.from_rational(Fraction(-1, 54))
          and time.time() - t0 < 60)
    report("4_1 exact k=1 (tau, S2, S3)", ok, "%.1fs" % (time.time() - t0))


# -- [PRIMARY] 4_1 levels -------------------------------------------------------

def test_4_1_levels(ctx):
    t0 = time.time()
    d = load_bundled_datum("4_1")
    golden = load_golden("4_1")
    F = d.field
    tau1 = tau_level_k(LevelContext(d, 1, ctx)).tau
    ok = True
    details = []
    # S2, S3 recognized for k = 2..5
    for k in (2, 3, 4, 5):
        F_k = field_tower(F, k, ctx)
        p = PerturbationContext.from_level(LevelContext(d, k, ctx), n_max=3)
        ls = loop_series(p, with_tau=False)
        for n, table in ((2, golden["S2"]), (3, golden["S3"])):
            rec = recognize(ls.S[n], F_k, ctx, height_bound=10 ** 9)
            good = rec.element == element_from_golden(table[str(k)], F_k)
            ok = ok and good
            if not good:
                details.append("S%d k=%d" % (n, k))
    # norm table for k in {2,4,5,7,8,10}
    for k in (2, 4, 5, 7, 8, 10):
        F_k = field_tower(F, k, ctx)
        tauk = tau_level_k(LevelContext(d, k, ctx)).tau
        res = norm_table_entry(tauk, tau1, k, F_k, ctx, height_bound=10 ** 30)
        target = Fraction(1)
        for prime, e in golden["norm_tables"][str(k)]:
            target *= Fraction(int(prime)) ** int(Fraction(e) * k)
        good = abs(res.norm) == target
        ok = ok and good
        if not good:
            details.append("norm k=%d" % k)
    elapsed = time.time() - t0
    ok = ok and elapsed < 600
    report("4_1 levels (S k=2..5, norms)", ok,
           "%.0fs %s" % (elapsed, ";".join(details)))


# -- [PRIMARY] 5_2 and (-2,3,7) --------------------------------------------------

@pytest.mark.parametrize("name,tau_target_coeffs", [
    ("5_2", ("-2", "3", "0")),
    ("m016", ("-4", "10", "-6")),
])
def test_5_2_and_m016_exact_k1(ctx, name, tau_target_coeffs):
    d = load_bundled_datum(name)
    golden = load_golden(name)
    F = d.field
    target = F.element([Fraction(c) for c in tau_target_coeffs])
    tinv, _ = tau1_squared_exact(d)
    ok = tinv in (target, -target)
    differs = bool(d.meta.get("presentation_differs"))
    p1 = PerturbationContext.exact_k1(d, n_max=3)
    ls = loop_series(p1, with_tau=False)
    s2t = element_from_golden(golden["S2"]["1"], F)
    s3t = element_from_golden(golden["S3"]["1"], F)
    ok = ok and ls.S[3] == s3t
    diff = ls.S[2] - s2t
    if differs:
        vec = diff.coeffs
        good2 = all(c == 0 for c in vec[1:]) and (vec[0] * 24).denominator == 1
        note = "S2 shift %s (presentation differs)" % (vec[0],)
    else:
        good2 = diff.is_zero()
        note = "S2 exact"
    ok = ok and good2
    report("%s exact k=1" % name, ok, note)


@pytest.mark.parametrize("name,levels", [("5_2", (2, 3, 4, 5)),
                                         ("m016", (2, 3, 4, 5))])
def test_5_2_m016_norm_entries(ctx, name, levels):
    t0 = time.time()
    d = load_bundled_datum(name)
    golden = load_golden(name)
    tau1 = tau_level_k(LevelContext(d, 1, ctx)).tau
    ok = True
    bad = []
    for k in levels:
        F_k = field_tower(d.field, k, ctx)
        tauk = tau_level_k(LevelContext(d, k, ctx)).tau
        res = norm_table_entry(tauk, tau1, k, F_k, ctx, height_bound=10 ** 40)
        target = Fraction(1)
        for prime, e in golden["norm_tables"][str(k)]:
            target *= Fraction(int(prime)) ** int(Fraction(e) * k)
        good = abs(res.norm) == target
        ok = ok and good
        if not good:
            bad.append(k)
    report("%s norm entries k<=5" % name, ok,
           "%.0fs %s" % (time.time() - t0, bad))


# -- [PRIMARY] 5_2 k=7 end-to-end (the worked example) ---------------------------

def test_5_2_k7_end_to_end():
    t0 = time.time()
    ctx500 = PrecisionContext(500)
    d = load_bundled_datum("5_2")
    golden = load_golden("5_2")
    sample = golden["sample"]
    F7 = field_tower(d.field, 7, ctx500)
    tau7 = tau_level_k(LevelContext(d, 7, ctx500)).tau
    tau1 = tau_level_k(LevelContext(d, 1, ctx500)).tau
    x = (tau7 / tau1) ** 7
    res = fit_with_root_scan(x, F7, 7, ctx500, height_bound=10 ** 14)
    ok = res.ell == sample["ell"]
    # numeric value against the printed digits: the computed x matches the
    # printed one to >= 15 significant digits up to a 24k-th root of unity
    # (global branch convention); the modulus matches directly.
    mp = ctx500.mp
    printed = mp.mpc(mp.mpf(sample["x_re"]), mp.mpf(sample["x_im"]))
    ok = ok and abs(abs(x.mid) / abs(printed) - 1) < 1e-15
    twists = [t for t in range(24 * 7)
              if abs(x.mid * mp.expjpi(mp.mpf(-2 * t) / 168) - printed)
              / abs(printed) < 1e-15]
    ok = ok and len(twists) == 1
    # exact norm
    target = Fraction(1)
    for prime, e in sample["norm_factors"]:
        target *= Fraction(int(prime)) ** int(e)
    ok = ok and abs(res.norm) == target
    # decomposition: beta generates p_43^2 * p_big, epsilon is a unit
    dec = unit_power_decompose(res.exact, F7, 7, ctx500,
                               known_factors=[43, 6007111235971721])
    ok = ok and dec.status.get("k_divisible") and dec.status.get("all_principal")
    ok = ok and dec.status.get("unit_verified") and dec.status.get("identity_exact")
    by_p = {Pid.p: v for Pid, v in dec.factorization}
    ok = ok and by_p.get(43) == 14 and by_p.get(6007111235971721) == 7
    # the printed primes match the computed ones at the valuation level
    for part in golden["decomp"]["7"]["beta"]:
        gen = element_from_golden(part["generator"], F7)
        vals = {Pid.p: ideal_valuation(gen, Pid) for Pid, _ in dec.factorization}
        plabel = int(part["label"].split(",")[0])
        ok = ok and vals.get(plabel) == 1 and sum(vals.values()) == 1
    elapsed = time.time() - t0
    ok = ok and elapsed < 1800
    report("5_2 k=7 end-to-end (500 digits)", ok,
           "%.0fs ell=%s twist=%s" % (elapsed, res.ell, twists))


# -- [PRIMARY] 6_1 ----------------------------------------------------------------

def test_6_1(ctx):
    try:
        d = load_bundled_datum("6_1")
    except FileNotFoundError:
        report("6_1 (N=4)", False, "no bundled datum")
    golden = load_golden("6_1")
    F = d.field
    tinv, _ = tau1_squared_exact(d)
    target = element_from_golden([golden["tau1_inv_sq"]], F)
    ok = tinv in (target, -target)
    ok = ok and abs(norm(tinv)) == 257
    p1 = PerturbationContext.exact_k1(d, n_max=3)
    ls = loop_series(p1, with_tau=False)
    s3t = element_from_golden(golden["S3"]["1"], F)
    ok = ok and ls.S[3] == s3t
    s2t = element_from_golden(golden["S2"]["1"], F)
    diff = ls.S[2] - s2t
    if d.meta.get("presentation_differs"):
        vec = diff.coeffs
        ok = ok and all(c == 0 for c in vec[1:]) and (vec[0] * 24).denominator == 1
        note = "S2 shift %s" % (vec[0],)
    else:
        ok = ok and diff.is_zero()
        note = "S2 exact"
    tau1 = tau_level_k(LevelContext(d, 1, ctx)).tau
    for k in (2, 3, 4):
        F_k = field_tower(F, k, ctx)
        tauk = tau_level_k(LevelContext(d, k, ctx)).tau
        res = norm_table_entry(tauk, tau1, k, F_k, ctx, height_bound=10 ** 30)
        target_n = Fraction(1)
        for prime, e in golden["norm_tables"][str(k)]:
            target_n *= Fraction(int(prime)) ** int(Fraction(e) * k)
        ok = ok and abs(res.norm) == target_n
    report("6_1 (k=1 exact, norms k=2..4)", ok, note)


# -- [PRIMARY] property suites ----------------------------------------------------
# The >= 200-case randomized suites live in the module tests and run in the
# same pytest invocation:
#   - Lemma-style cyclic dilog identities: test_mpnum.py (11 k-values x 18 draws)
#   - k-periodicity of a_m: test_oneloop.py::test_a_term_k_periodicity (200)
#   - Galois-shift ratio constancy: test_oneloop.py::test_galois_shift_check
#   - polylog multiplication formula: test_mpnum.py (200, exact targets)
#   - wick oracle == loop series: test_perturb.py (200 exact + ball overlap)
#   - theta invariance: test_perturb.py::test_phi_plus_theta_invariance and
#     test_oneloop.py::test_tau_theta_covariance
#   - rotate_quad validity + order 3: test_nzdata.py
#   - recognize o embed identity: test_field.py::test_recognition_roundtrip
# Here: the eps * beta^k exact identity across every decomposition computed
# on the bundled knots.

def test_property_eps_beta_identity(ctx):
    ok = True
    notes = []
    for name, ks in (("4_1", (2, 4, 5)), ("5_2", (2, 3)), ("m016", (3,))):
        d = load_bundled_datum(name)
        tau1 = tau_level_k(LevelContext(d, 1, ctx)).tau
        for k in ks:
            F_k = field_tower(d.field, k, ctx)
            tauk = tau_level_k(LevelContext(d, k, ctx)).tau
            res = norm_table_entry(tauk, tau1, k, F_k, ctx, height_bound=10 ** 40)
            dec = unit_power_decompose(res.exact, F_k, k, ctx)
            if dec.status.get("k_divisible"):
                good = dec.status.get("identity_exact") and \
                    dec.status.get("unit_verified")
            else:
                # fractional exponents: eps = x / prod gen^v must be a unit
                good = dec.epsilon is not None and unit_test(dec.epsilon)
            ok = ok and bool(good)
            if not good:
                notes.append("%s k=%d" % (name, k))
    report("eps * beta^k identity on decompositions", ok, ";".join(notes))


# -- [PRIMARY] ambiguity observations (report-only, non-blocking) ------------------

def test_ambiguity_observations_nonblocking():
    d = load_bundled_datum("5_2")
    F = d.field
    base_t, _ = tau1_squared_exact(d)
    p1 = PerturbationContext.exact_k1(d, n_max=3)
    base = loop_series(p1, with_tau=False)
    lines = []
    count = 0
    for assignment in itertools.product(range(3), repeat=d.N):
        if not any(assignment) or count >= 4:
            continue
        g = d
        for i, r in enumerate(assignment):
            for _ in range(r):
                g = rotate_quad(g, i)
        if abs(g.det_B()) != 1:
            continue
        f, f2 = solve_flattening(g.A, g.B, g.nu)
        g = g.copy(f=f, f2=f2)
        count += 1
        t_inv, _ = tau1_squared_exact(g)
        ratio = (t_inv * base_t.inverse())
        tau12_ok = (ratio ** 6 == F.one()) or (ratio ** 6 == -F.one())
        pg = PerturbationContext.exact_k1(g, n_max=3)
        lsg = loop_series(pg, with_tau=False)
        dS2 = lsg.S[2] - base.S[2]
        s2_ok = all(c == 0 for c in dS2.coeffs[1:]) and \
            (dS2.coeffs[0] * 24).denominator == 1
        s3_ok = (lsg.S[3] - base.S[3]).is_zero()
        lines.append("gauge %s: (tau^2)^6 invariant=%s S2 shift=%s S3 equal=%s"
                     % (assignment, tau12_ok, dS2.coeffs[0], s3_ok))
    print("AMBIGUITY OBSERVATIONS (report-only):")
    for line in lines:
        print("  " + line)
    report("ambiguity observations executed", count > 0, "%d gauges" % count)
