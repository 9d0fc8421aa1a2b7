"""Recognition pipeline: root-of-unity scans, decompositions, golden data."""

from fractions import Fraction

import pytest

from nzloop.mpnum import PrecisionContext
from nzloop.field import NoFit, norm, unit_test
from nzloop.nzdata import load_bundled_datum
from nzloop.oneloop import LevelContext, tau_level_k
from nzloop.recognition import (field_tower, fit_with_root_scan,
                                unit_power_decompose, norm_table_entry,
                                norm_display, load_golden, golden_names,
                                element_from_golden, verify_golden)


@pytest.fixture(scope="module")
def ctx():
    return PrecisionContext(300)


@pytest.fixture(scope="module")
def d41():
    return load_bundled_datum("4_1")


@pytest.fixture(scope="module")
def taus41(ctx, d41):
    out = {}
    for k in (1, 2, 4):
        out[k] = tau_level_k(LevelContext(d41, k, ctx)).tau
    return out


def test_scan_trivial_element(ctx, d41):
    F2 = field_tower(d41.field, 2, ctx)
    res = fit_with_root_scan(ctx.one(), F2, 2, ctx)
    assert res.ell == 0
    assert res.exact == F2.one()
    assert res.norm == 1


def test_scan_finds_shifted_element(ctx, d41):
    F2 = field_tower(d41.field, 2, ctx)
    x = element_from_golden([["-1", "2"]], F2)  # 2 alpha - 1
    shifted = x.embed(ctx) * ctx.root_of_unity(5, 48)
    res = fit_with_root_scan(shifted, F2, 2, ctx)
    assert res.ell == 5 and res.exact == x


def test_norm_table_entries_4_1(ctx, d41, taus41):
    golden = load_golden("4_1")
    for k in (2, 4):
        F_k = field_tower(d41.field, k, ctx)
        res = norm_table_entry(taus41[k], taus41[1], k, F_k, ctx)
        target = Fraction(1)
        for p, e in golden["norm_tables"][str(k)]:
            target *= Fraction(int(p)) ** (int(Fraction(e) * k))
        assert abs(res.norm) == target


def test_norm_scan_ell_independence(ctx, d41, taus41):
    """|N(x_{k,l})| is independent of l (up to nothing: the scan divides by
    roots of unity, which have norm +-1)."""
    F2 = field_tower(d41.field, 2, ctx)
    x = (taus41[2] / taus41[1]) ** 2
    base = None
    hits = 0
    z48 = ctx.root_of_unity(1, 48)
    cur = x
    from nzloop.field import recognize
    for ell in range(48):
        try:
            rec = recognize(cur, F2, ctx, height_bound=10 ** 8)
            n = abs(norm(rec.element))
            if base is None:
                base = n
            assert n == base
            hits += 1
        except NoFit:
            pass
        cur = cur / z48
    assert hits >= 2


def test_decompose_trivial(ctx, d41):
    F2 = field_tower(d41.field, 2, ctx)
    res = unit_power_decompose(F2.one(), F2, 2, ctx)
    assert res.factorization == []
    assert res.epsilon == F2.one()
    assert res.status["unit_verified"]


def test_decompose_4_1_k2(ctx, d41, taus41):
    F2 = field_tower(d41.field, 2, ctx)
    res = norm_table_entry(taus41[2], taus41[1], 2, F2, ctx)
    dec = unit_power_decompose(res.exact, F2, 2, ctx)
    assert dec.status["k_divisible"] and dec.status["all_principal"]
    assert dec.status["unit_verified"] and dec.status["identity_exact"]
    assert dec.epsilon is not None and unit_test(dec.epsilon)
    # beta generates the same ideal as the printed 2 alpha - 1
    assert len(dec.beta_parts) == 1
    g, e = dec.beta_parts[0]
    assert e == 1 and abs(norm(g)) == 3


def test_decompose_fractional_exponent_m016(ctx):
    """(-2,3,7) at k = 2: (x) = p_2 with p_2 inert of norm 2^3; e = 1 is
    not divisible by k = 2 and the fractional exponent 1/2 is reported
    verbatim (the printed beta_2 = p_{2^3}^{1/2})."""
    d = load_bundled_datum("m016")
    F2 = field_tower(d.field, 2, ctx)
    tau2 = tau_level_k(LevelContext(d, 2, ctx)).tau
    tau1 = tau_level_k(LevelContext(d, 1, ctx)).tau
    res = norm_table_entry(tau2, tau1, 2, F2, ctx)
    assert abs(res.norm) == 8
    dec = unit_power_decompose(res.exact, F2, 2, ctx)
    assert not dec.status["k_divisible"]
    assert dec.status["all_principal"]
    assert [e for _, e in dec.beta_parts] == [Fraction(1, 2)]
    assert dec.epsilon is not None and unit_test(dec.epsilon)


def test_norm_display():
    assert norm_display(Fraction(8), 2) == [(2, Fraction(3, 2))]
    assert norm_display(Fraction(39733 ** 2 * 39733 ** 12), 7, known_factors=[39733]) \
        == [(39733, Fraction(2))]
    assert norm_display(Fraction(1), 3) == []


def test_verify_golden_4_1(ctx, d41):
    golden = load_golden("4_1")
    rep = verify_golden(d41, golden, ctx, levels=[2], decomp_levels=[2])
    assert rep["ok"], rep["checks"]
    names = {c["name"] for c in rep["checks"]}
    assert {"tau1_inv_sq", "S2 k=1", "S3 k=1", "norm k=2",
            "decomp k=2 beta", "S2 k=2"} <= names


def test_verify_golden_detects_corruption(ctx, d41):
    golden = load_golden("4_1")
    import copy
    bad = copy.deepcopy(golden)
    bad["S3"]["1"] = ["-1/55", "0"]
    rep = verify_golden(d41, bad, ctx, levels=[])
    assert not rep["ok"]
    failing = [c for c in rep["checks"] if not c["ok"]]
    assert any(c["name"] == "S3 k=1" for c in failing)


def test_golden_bundle_complete():
    names = golden_names()
    assert {"4_1", "5_2", "m016", "6_1"} <= set(names)
    for n in names:
        g = load_golden(n)
        assert "tau1_inv_sq" in g and "norm_tables" in g
