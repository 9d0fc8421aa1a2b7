"""The arithmetic recognition pipeline: root-of-unity scan + LLL fit of
tau-ratios and loop coefficients into F(zeta_k), norms, prime-ideal
factorization, the unit x k-th power decomposition, and verification against
the bundled golden data.

x_{k,l} = tau_k^k / (tau_1^k zeta_{24k}^l) lies in F_k for some l; the scan
returns the smallest such l.  The decomposition factors the ideal (x) into
primes, and when every exponent is divisible by k and every prime yields a
generator, writes x = eps * beta^k with eps a unit.  Fractional exponents
e/k are reported verbatim (k-th roots of non-k-power ideals do occur).
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field as dfield
from fractions import Fraction
from pathlib import Path

from .mpnum import ComplexBall, PrecisionContext
from .field import (NumberField, RelativeField, adjoin_root_of_unity, recognize,
                    NoFit, UnsupportedPrime, charpoly, norm, unit_test,
                    factor_prime_dedekind, ideal_valuation, generator_search,
                    principal_ideal, equation_order, factor_integer)

__all__ = [
    "RecognitionResult", "field_tower", "fit_with_root_scan",
    "unit_power_decompose", "norm_table_entry", "norm_display",
    "load_golden", "golden_names", "element_from_golden", "verify_golden",
]

GOLDEN_DIR = Path(__file__).parent / "data" / "golden"

def _coprime(a: int, b: int) -> bool:
    from math import gcd
    return gcd(a, b) == 1


_tower_cache: dict = {}


def field_tower(F: NumberField, k: int, ctx: PrecisionContext) -> RelativeField:
    key = (id(F), k, ctx.digits)
    if key not in _tower_cache:
        _tower_cache[key] = adjoin_root_of_unity(F, k, ctx)
    return _tower_cache[key]


@dataclass
class RecognitionResult:
    exact: object = None
    ell: int | None = None
    residual: float | None = None
    norm: Fraction | None = None
    factorization: list = dfield(default_factory=list)  # (IdealLattice, exponent)
    beta_parts: list = dfield(default_factory=list)     # (generator, Fraction exp)
    beta: object = None
    epsilon: object = None
    status: dict = dfield(default_factory=dict)

    def as_dict(self):
        out = {"ell": self.ell, "residual": self.residual,
               "status": dict(self.status)}
        if self.exact is not None:
            out["element"] = _element_coeff_strings(self.exact)
        if self.norm is not None:
            out["norm"] = str(self.norm)
        if self.factorization:
            out["factorization"] = [
                {"p": P.p, "f": P.residue_degree, "norm": P.norm(), "exponent": e}
                for P, e in self.factorization]
        if self.beta_parts:
            out["beta"] = [{"generator": _element_coeff_strings(g),
                            "exponent": str(e)} for g, e in self.beta_parts]
        if self.epsilon is not None:
            out["epsilon"] = _element_coeff_strings(self.epsilon)
        return out


def _element_coeff_strings(x):
    if hasattr(x, "comps"):
        return [[str(c) for c in comp.coeffs] for comp in x.comps]
    return [[str(c) for c in x.coeffs]]


def fit_with_root_scan(x_num: ComplexBall, F_k, k: int, ctx: PrecisionContext,
                       height_bound: int = 10 ** 6, ell_bound: int | None = None
                       ) -> RecognitionResult:
    """Scan l = 0..24k-1 and recognize x_num / zeta_{24k}^l in F_k; smallest
    successful l wins.  Raises NoFit when the whole scan fails."""
    bound = 24 * k if ell_bound is None else ell_bound
    zeta24k = ctx.root_of_unity(1, 24 * k)
    cur = x_num
    for ell in range(bound):
        try:
            rec = recognize(cur, F_k, ctx, height_bound=height_bound)
            return RecognitionResult(exact=rec.element, ell=ell,
                                     residual=float(rec.residual),
                                     norm=norm(rec.element),
                                     status={"recognized": True})
        except NoFit:
            cur = cur / zeta24k
    raise NoFit("no element of F_k within the root-of-unity scan")


def unit_power_decompose(x, F_k, k: int, ctx: PrecisionContext | None = None,
                         factor_budget: float = 30.0,
                         known_factors: list | None = None) -> RecognitionResult:
    """Factor the fractional ideal (x), test k-divisibility of the exponents,
    search generators, and write x = eps * prod gen^{e} with eps a unit.

    known_factors: optional list of primes of N(x) (skips integer
    factorization: used when the golden data pins huge factors)."""
    if x.is_zero():
        raise ZeroDivisionError("cannot decompose zero")
    order = equation_order(F_k)
    nx = norm(x)
    result = RecognitionResult(exact=x, norm=nx)
    # the ideal (x) is supported exactly on the primes dividing the
    # numerator or denominator of N(x); basis-conversion denominators are
    # handled inside ideal_valuation and do not enter here
    targets = set()
    unfactored = []
    nval = abs(nx.numerator) * nx.denominator
    if known_factors:
        rest = nval
        for p in known_factors:
            while rest % p == 0:
                rest //= p
            targets.add(int(p))
        if rest != 1:
            unfactored.append(rest)
    else:
        for rec in factor_integer(nval, budget_seconds=factor_budget):
            if rec.certified_prime:
                targets.add(rec.factor)
            else:
                unfactored.append(rec.factor)
    result.status["factor_certified"] = not unfactored
    if unfactored:
        result.status["unfactored"] = [str(u) for u in unfactored]
    factorization = []
    try:
        for p in sorted(targets):
            for P in factor_prime_dedekind(p, F_k, order=order):
                v = ideal_valuation(x, P)
                if v:
                    factorization.append((P, v))
    except UnsupportedPrime as exc:
        result.status["unsupported_prime"] = str(exc)
        return result
    result.factorization = factorization
    # norm bookkeeping: sum v * f * log p == log |N(x)|
    check = Fraction(1)
    for P, v in factorization:
        check *= Fraction(P.p) ** (v * P.residue_degree)
    if not unfactored and check != abs(nx):
        result.status["norm_mismatch"] = True
        return result
    result.status["k_divisible"] = all(v % k == 0 for _, v in factorization)
    gens = []
    all_principal = True
    for P, v in factorization:
        g = generator_search(P, F_k)
        if g is None:
            all_principal = False
            gens.append((None, Fraction(v, k)))
        else:
            gens.append((g, Fraction(v, k)))
    result.status["all_principal"] = all_principal
    if not all_principal or unfactored:
        result.beta_parts = [(g, e) for g, e in gens]
        return result
    result.beta_parts = gens
    # eps = x / prod gen^v  (exact division; unit when everything matched)
    eps = x
    for (g, e), (P, v) in zip(gens, factorization):
        eps = eps / g ** v
    result.epsilon = eps
    result.status["unit_verified"] = unit_test(eps)
    if result.status["k_divisible"]:
        beta = F_k.one()
        for g, e in gens:
            beta = beta * g ** int(e)
        result.beta = beta
        # identity eps * beta^k = x, exactly
        result.status["identity_exact"] = (result.epsilon * beta ** k == x)
    return result


def norm_display(n: Fraction, k: int, factor_budget: float = 20.0,
                 known_factors: list | None = None):
    """|n|^(1/k) as a factored display: list of (prime, Fraction exponent)."""
    n = abs(n)
    assert n.denominator == 1
    n = n.numerator
    if n == 1:
        return []
    out = []
    if known_factors:
        rest = n
        for p in known_factors:
            e = 0
            while rest % p == 0:
                rest //= p
                e += 1
            if e:
                out.append((int(p), Fraction(e, k)))
        if rest != 1:
            out.append((rest, Fraction(1, k)))
        return out
    for rec in factor_integer(n, budget_seconds=factor_budget):
        out.append((rec.factor, Fraction(rec.exponent, k)))
    return out


def norm_table_entry(tau_k: ComplexBall, tau_1: ComplexBall, k: int,
                     F_k, ctx: PrecisionContext,
                     height_bound: int = 10 ** 40) -> RecognitionResult:
    """Recognize x_{k,l} = tau_k^k/(tau_1^k zeta_{24k}^l) and report |N(x)|;
    the display value is |N|^{1/k} (flagged non-integral when the k-th root
    is irrational)."""
    x = (tau_k / tau_1) ** k
    res = fit_with_root_scan(x, F_k, k, ctx, height_bound=height_bound)
    res.status["display"] = [[str(p), str(e)] for p, e in norm_display(res.norm, k)]
    return res


# ---------------------------------------------------------------------------
# golden data


def golden_names():
    return sorted(p.stem for p in GOLDEN_DIR.glob("*.json"))


def load_golden(name: str) -> dict:
    path = GOLDEN_DIR / ("%s.json" % name)
    return json.loads(path.read_text())


def element_from_golden(coeff_rows, F_k, twist: int = 1):
    """Rows over zeta powers, each a list over alpha powers, rational strings.
    A flat list of strings is read as a single zeta^0 row.

    twist applies the Galois substitution zeta -> zeta^twist: published
    tables fix some primitive k-th root of unity, and recognition results at
    zeta = e^{2 pi i/k} may land on a conjugate (Remark-style equivalence)."""
    if coeff_rows and isinstance(coeff_rows[0], str):
        coeff_rows = [coeff_rows]
    if isinstance(F_k, NumberField):
        assert len(coeff_rows) == 1
        return F_k.element([Fraction(c) for c in coeff_rows[0]])
    base = F_k.base
    zeta = F_k.ext_gen() ** twist
    acc = F_k.zero()
    power = F_k.one()
    for row in coeff_rows:
        acc = acc + F_k.from_base(base.element([Fraction(c) for c in row])) * power
        power = power * zeta
    return acc


def _norm_value_from_factors(factors, k: int) -> Fraction:
    """Table entry prod p^e (e possibly fractional) -> |N(x)| = entry^k."""
    acc = Fraction(1)
    for p, e in factors:
        ek = Fraction(str(e)) * k
        assert ek.denominator == 1, "table entry must have integral N(x)"
        acc *= Fraction(int(p)) ** int(ek)
    return acc


def verify_golden(datum, golden: dict, ctx: PrecisionContext,
                  levels: list | None = None, n_max: int = 3,
                  decomp_levels: list | None = None,
                  presentation_differs: bool = False,
                  factor_budget: float = 30.0) -> dict:
    """Compare computed invariants against a golden record.

    S_2 is compared modulo additive (1/(24k)) Z when presentation_differs
    (different triangulation/gauge than the printed data), exactly
    otherwise.  epsilon/beta are accepted at the ideal level.  Returns a
    report dict; raises nothing."""
    from .oneloop import LevelContext, tau_level_k, tau1_squared_exact
    from .perturb import PerturbationContext, loop_series

    report = {"knot": golden["knot"], "checks": [], "ok": True}

    def add(name, ok, detail=""):
        report["checks"].append({"name": name, "ok": bool(ok), "detail": detail})
        if not ok:
            report["ok"] = False

    F = datum.field
    # k = 1 exact invariants
    if "tau1_inv_sq" in golden:
        tinv, _ = tau1_squared_exact(datum)
        target = element_from_golden([golden["tau1_inv_sq"]], F)
        ok = (tinv == target) or (tinv == -target)
        add("tau1_inv_sq", ok, "computed %s" % (tinv.coeffs,))
    exact_S = None
    if "S2" in golden and "1" in golden["S2"]:
        p1 = PerturbationContext.exact_k1(datum, n_max=n_max)
        ls = loop_series(p1, with_tau=False)
        exact_S = ls
        t2 = element_from_golden([golden["S2"]["1"]], F)
        diff = ls.S[2] - t2
        if presentation_differs:
            c = diff.coeffs
            ok = all(x == 0 for x in c[1:]) and (c[0] * 24).denominator == 1
            detail = "shift %s" % (c[0],)
        else:
            ok = diff.is_zero()
            detail = "exact"
        add("S2 k=1", ok, detail)
    if "S3" in golden and "1" in golden["S3"]:
        if exact_S is None:
            p1 = PerturbationContext.exact_k1(datum, n_max=n_max)
            exact_S = loop_series(p1, with_tau=False)
        t3 = element_from_golden([golden["S3"]["1"]], F)
        add("S3 k=1", (exact_S.S[3] - t3).is_zero(),
            "computed %s" % (exact_S.S[3].coeffs,))

    # tau at k = 1 numerically, reused by all levels
    lvl1 = LevelContext(datum, 1, ctx)
    tau1 = tau_level_k(lvl1).tau

    norm_ks = levels if levels is not None else \
        sorted(int(s) for s in golden.get("norm_tables", {}))
    for k in norm_ks:
        ks = str(k)
        if ks not in golden.get("norm_tables", {}):
            continue
        if k == 1:
            continue
        F_k = field_tower(F, k, ctx)
        lvl = LevelContext(datum, k, ctx)
        tauk = tau_level_k(lvl).tau
        entry = golden["norm_tables"][ks]
        target_norm = _norm_value_from_factors(entry, k)
        try:
            res = norm_table_entry(tauk, tau1, k, F_k, ctx)
            ok = abs(res.norm) == target_norm
            add("norm k=%d" % k, ok,
                "|N(x)| = %s vs %s (ell=%s)" % (abs(res.norm), target_norm, res.ell))
        except NoFit:
            add("norm k=%d" % k, False, "recognition failed")
            continue
        dl = decomp_levels or []
        if k in dl and "decomp" in golden and ks in golden["decomp"]:
            gd = golden["decomp"][ks]
            dec = unit_power_decompose(
                res.exact, F_k, k, ctx, factor_budget=factor_budget,
                known_factors=[int(p) for p, _ in gd.get("norm_primes", [])] or None)
            # beta at the ideal level: the printed generators (after a common
            # Galois twist zeta -> zeta^t) must generate exactly the ideal
            # (x)^(1/k): checked through valuations at the computed primes
            # plus global norm bookkeeping.
            golden_parts = gd.get("beta", [])
            ok_beta = False
            twist_used = None
            for t in [u for u in range(1, k + 1) if _coprime(u, k)]:
                gens = [(element_from_golden(part["generator"], F_k, twist=t),
                         Fraction(part["exponent"])) for part in golden_parts]
                nrm = Fraction(1)
                for g_el, e in gens:
                    ek = e * k
                    if ek.denominator != 1:
                        nrm = None
                        break
                    nrm *= abs(norm(g_el)) ** int(ek)
                if nrm is None or nrm != abs(dec.norm):
                    continue
                good = True
                for P, v in dec.factorization:
                    total = sum(e * ideal_valuation(g_el, P) for g_el, e in gens)
                    if total * k != v:
                        good = False
                        break
                if good:
                    ok_beta = True
                    twist_used = t
                    break
            add("decomp k=%d beta" % k, ok_beta,
                "twist %s" % twist_used if ok_beta else
                "printed generators do not match the computed primes")
            if dec.epsilon is not None:
                add("decomp k=%d unit" % k, dec.status.get("unit_verified", False),
                    "")
                if "epsilon" in gd:
                    eps_target = element_from_golden(gd["epsilon"], F_k,
                                                     twist=twist_used or 1)
                    add("decomp k=%d eps ideal-level" % k,
                        unit_test(eps_target), "printed epsilon is a unit")
                    report.setdefault("eps_exact_match", {})[k] = \
                        (dec.epsilon == eps_target)

    # S tables at k >= 2 (recognized)
    s_ks = levels if levels is not None else \
        sorted(int(s) for s in golden.get("S2", {}))
    for k in s_ks:
        ks = str(k)
        if k == 1 or ks not in golden.get("S2", {}):
            continue
        F_k = field_tower(F, k, ctx)
        lvl = LevelContext(datum, k, ctx)
        p = PerturbationContext.from_level(lvl, n_max=n_max)
        ls = loop_series(p, with_tau=False)
        try:
            rec2 = recognize(ls.S[2], F_k, ctx, height_bound=10 ** 9)
            t2 = element_from_golden(golden["S2"][ks], F_k)
            diff = rec2.element - t2
            if presentation_differs:
                vec = F_k.to_abs_vector(diff)
                ok = all(x == 0 for x in vec[1:]) and (vec[0] * 24 * k).denominator == 1
                add("S2 k=%d" % k, ok, "shift %s" % (vec[0],))
            else:
                add("S2 k=%d" % k, diff.is_zero(), "exact")
        except NoFit:
            add("S2 k=%d" % k, False, "recognition failed")
        if ks in golden.get("S3", {}):
            try:
                rec3 = recognize(ls.S[3], F_k, ctx, height_bound=10 ** 9)
                t3 = element_from_golden(golden["S3"][ks], F_k)
                add("S3 k=%d" % k, (rec3.element - t3).is_zero(), "exact")
            except NoFit:
                add("S3 k=%d" % k, False, "recognition failed")
    return report
