"""Development tool: generate bundled NZ-datum fixtures from the local
census engine, identify knots by their printed invariants, and freeze JSON.

Not part of either deliverable package; imports both.
"""

import json
import sys
import itertools
from fractions import Fraction
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "exporter" / "src"))

import mpmath

from nzloop.mpnum import PrecisionContext
from nzloop.field import NumberField, recognize, NoFit
from nzloop.nzdata import (NZDatum, ShapeValue, validate, find_unimodular_gauge,
                           rotate_quad, solve_flattening, polish_shapes,
                           datum_to_json)
from nzloop.oneloop import tau1_squared_exact, LevelContext
from nzloop.perturb import PerturbationContext, loop_series
from nzexport.localtri import enumerate_census
from nzexport.nz_extract import extract_candidates

FIELDS = {
    "4_1": dict(min_poly=[1, -1, 1], root=("0.5", "0.866025403784438646763723170752936183471402626905190314027903"),
                volume=2.029883212819307250042405108549),
    "5_2": dict(min_poly=[1, 0, -1, 1],
                root=("0.877438833123346321902188778576", "-0.744861766619744233939398339274"),
                volume=2.828122088330783162763898809276),
    "6_1": dict(min_poly=[1, 3, 1, -2, 1],
                root=("1.50410835318528783821668211086", "-1.22685163979709658855041313411"),
                volume=3.163963228883143983991475796277),
}


def raw_to_datum(rd, name, field_info, digits=340):
    ctx = PrecisionContext(digits)
    F = NumberField(field_info["min_poly"], field_info["root"], name)
    mpmath.mp.dps = 70
    shapes = [ShapeValue(mpmath.nstr(mpmath.re(z), 60), mpmath.nstr(mpmath.im(z), 60), 60)
              for z in rd.shapes]
    d = NZDatum(name=name, N=rd.n, A=tuple(tuple(r) for r in rd.A),
                B=tuple(tuple(r) for r in rd.B), nu=tuple(rd.nu),
                shapes=shapes, f=(0,) * rd.n, f2=(0,) * rd.n, field=F)
    g = find_unimodular_gauge(d)
    if g is None:
        return None
    f, f2 = solve_flattening(g.A, g.B, g.nu)
    g = g.copy(f=f, f2=f2)
    g = polish_shapes(g, ctx)
    # exact shapes by recognition
    exact = []
    for s in g.shapes:
        try:
            r = recognize(s.ball(ctx), F, ctx, height_bound=10 ** 8)
        except NoFit:
            return None
        exact.append(r.element)
    g = g.copy(shapes=[ShapeValue(s.numeric_re, s.numeric_im, s.digits, e)
                       for s, e in zip(g.shapes, exact)])
    rep = validate(g, digits)
    if not rep.valid or rep.multiplicative_exact is not True:
        return None
    return g


def gauge_variants(datum, max_count=90):
    """All quad assignments keeping |det B| = 1, as datums with canonical
    flattening."""
    out = []
    n = datum.N
    for assignment in itertools.product(range(3), repeat=n):
        d = datum
        for i, r in enumerate(assignment):
            for _ in range(r):
                d = rotate_quad(d, i)
        if abs(d.det_B()) == 1:
            f, f2 = solve_flattening(d.A, d.B, d.nu)
            out.append(d.copy(f=f, f2=f2))
            if len(out) >= max_count:
                break
    return out


def exact_invariants(datum, n_max=3):
    tinv, tsq = tau1_squared_exact(datum)
    p = PerturbationContext.exact_k1(datum, n_max=n_max)
    ls = loop_series(p, with_tau=False)
    return tinv, ls.S[2], ls.S[3]


def main():
    out_dir = Path(__file__).resolve().parents[1] / "src" / "nzloop" / "data" / "nz"
    name = sys.argv[1] if len(sys.argv) > 1 else "4_1"
    N = {"4_1": 2, "5_2": 3, "6_1": 4}[name]
    info = FIELDS[name]
    print("census N=%d ..." % N)
    cands = enumerate_census(N)
    print("%d gluings" % len(cands))
    hits = []
    for tri in cands:
        for rd in extract_candidates(tri, tries=60):
            if abs(rd.volume - info["volume"]) > 1e-6:
                continue
            d = raw_to_datum(rd, name, info)
            if d is None:
                continue
            tinv, S2, S3 = exact_invariants(d)
            hits.append((d, tinv, S2, S3, tri))
            print("candidate: tau1^-2 =", tinv.coeffs, " S2 =", S2.coeffs,
                  " S3 =", S3.coeffs)
    with open("/tmp/fixture_hits_%s.json" % name, "w") as fh:
        json.dump([{"datum": datum_to_json(d),
                    "tau_inv_sq": [str(c) for c in t.coeffs],
                    "S2": [str(c) for c in s2.coeffs],
                    "S3": [str(c) for c in s3.coeffs],
                    "tri": tri.as_json()}
                   for (d, t, s2, s3, tri) in hits], fh, indent=1)
    print("wrote /tmp/fixture_hits_%s.json with %d hits" % (name, len(hits)))


if __name__ == "__main__":
    main()
