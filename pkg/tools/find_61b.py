"""Second-pass 6_1 hunt with diagnostics: rescan volume-matching classes with
more Newton tries and report why raw_to_datum rejects candidates."""

import json
import sys
import time
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "exporter" / "src"))
sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "tools"))

import mpmath

from nzexport.localtri import enumerate_census
from nzexport.nz_extract import extract_candidates
from make_fixtures import exact_invariants, FIELDS
from find_61 import canon_sig, VOL61

from nzloop.mpnum import PrecisionContext
from nzloop.field import NumberField, recognize, NoFit
from nzloop.nzdata import (NZDatum, ShapeValue, validate, find_unimodular_gauge,
                           solve_flattening, polish_shapes, datum_to_json)


def diagnose_raw(rd, name, field_info, digits=340):
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
        return None, "no unimodular gauge"
    f, f2 = solve_flattening(g.A, g.B, g.nu)
    g = g.copy(f=f, f2=f2)
    g = polish_shapes(g, ctx)
    exact = []
    for s in g.shapes:
        try:
            r = recognize(s.ball(ctx), F, ctx, height_bound=10 ** 8)
        except NoFit:
            return None, "shape not in the 6_1 field"
        exact.append(r.element)
    g = g.copy(shapes=[ShapeValue(s.numeric_re, s.numeric_im, s.digits, e)
                       for s, e in zip(g.shapes, exact)])
    rep = validate(g, digits)
    if not rep.valid or rep.multiplicative_exact is not True:
        return None, "validation failed: %s" % rep.errors
    return g, "ok"


def main():
    t0 = time.time()
    tris = enumerate_census(4)
    seen = {}
    for tri in tris:
        sig = canon_sig(tri)
        if sig not in seen:
            seen[sig] = tri
    classes = list(seen.values())
    print("%d classes (%.0fs)" % (len(classes), time.time() - t0), flush=True)
    info = FIELDS["6_1"]
    hits = []
    for idx, tri in enumerate(classes):
        cands = extract_candidates(tri, dps=40, tries=30, )
        vols = [rd.volume for rd in cands if abs(rd.volume - VOL61) < 1e-5]
        if not vols:
            continue
        print("class %d: volume match" % idx, flush=True)
        for rd in extract_candidates(tri, dps=60, tries=80):
            if abs(rd.volume - VOL61) > 1e-6:
                continue
            d, why = diagnose_raw(rd, "6_1", info)
            print("  candidate: %s" % why, flush=True)
            if d is None:
                continue
            tinv, S2, S3 = exact_invariants(d)
            print("  tau^-2=%s" % (tinv.coeffs,), flush=True)
            print("  S2=%s" % (S2.coeffs,), flush=True)
            print("  S3=%s" % (S3.coeffs,), flush=True)
            hits.append((d, tinv, S2, S3, tri))
    with open("/tmp/fixture_hits_6_1b.json", "w") as fh:
        json.dump([{"datum": datum_to_json(d),
                    "tau_inv_sq": [str(c) for c in t.coeffs],
                    "S2": [str(c) for c in s2.coeffs],
                    "S3": [str(c) for c in s3.coeffs],
                    "tri": tri.as_json()}
                   for (d, t, s2, s3, tri) in hits], fh, indent=1)
    print("wrote %d hits (%.0fs)" % (len(hits), time.time() - t0), flush=True)


if __name__ == "__main__":
    main()
