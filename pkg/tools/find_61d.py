"""Fourth-pass 6_1 hunt: rescan all N=4 classes demanding the full complete
structure (both peripheral holonomies parabolic) and the 6_1 volume, with
many Newton tries; then identify via exact invariants."""

import json
import sys
import time
from fractions import Fraction
from math import gcd
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "exporter" / "src"))
sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "tools"))

import mpmath

from nzexport.localtri import Triangulation, gluing_rows, cusp_rows
from nzexport.nz_extract import (_reduce_row, _row_rank, solve_geometric,
                                 bloch_wigner)
from find_61 import VOL61
from find_61c import get_classes, extract_with_row
from make_fixtures import raw_to_datum, exact_invariants, FIELDS


def holonomy_is_parabolic(row, zs, tol=1e-20):
    n = len(zs)
    P = mpmath.mpc(1)
    for i in range(n):
        a, b, c = row[3 * i], row[3 * i + 1], row[3 * i + 2]
        z = zs[i]
        if a:
            P *= z ** a
        if b:
            P *= (1 - z) ** (-b)
        if c:
            P *= ((z - 1) / z) ** c
    return min(abs(P - 1), abs(P + 1)) < tol


def main():
    t0 = time.time()
    classes = get_classes()
    print("%d classes (%.0fs)" % (len(classes), time.time() - t0), flush=True)
    info = FIELDS["6_1"]
    hits = []
    for idx, tri in enumerate(classes):
        if idx % 25 == 0:
            print("scan %d/%d (%.0fs)" % (idx, len(classes), time.time() - t0),
                  flush=True)
        n = tri.n
        erows = [r for r, _ in gluing_rows(tri)]
        crows = cusp_rows(tri)
        base = [_reduce_row(r) for r in erows]
        basis2 = []
        for cr in crows:
            cand = base + [_reduce_row(r) for r in basis2] + [_reduce_row(cr)]
            if _row_rank(cand) > _row_rank(base + [_reduce_row(r) for r in basis2]):
                basis2.append(cr)
            if len(basis2) == 2:
                break
        if len(basis2) < 2:
            continue
        u, v = basis2
        mpmath.mp.dps = 40
        rows = erows[:n - 1] + [u]
        found_complete = None
        for sign in (1, -1):
            for zs in solve_geometric(rows, [1] * (n - 1) + [sign], n,
                                      tries=100, dps=40):
                vol = sum(bloch_wigner(z) for z in zs)
                if abs(vol - VOL61) > 1e-5:
                    continue
                if not (holonomy_is_parabolic(u, zs) and
                        holonomy_is_parabolic(v, zs)):
                    continue
                found_complete = zs
                break
            if found_complete:
                break
        if not found_complete:
            continue
        print("complete structure with 6_1 volume at class %d (%.0fs)"
              % (idx, time.time() - t0), flush=True)
        done = 0
        for a, b in [(1, 0), (0, 1), (1, 1), (1, -1), (-1, 1), (2, 1), (1, 2)]:
            if gcd(abs(a), abs(b)) != 1:
                continue
            w0 = [a * x + b * y for x, y in zip(u, v)]
            for rd in extract_with_row(tri, w0, tries=60):
                if not (holonomy_is_parabolic(u, [mpmath.mpc(z) for z in rd.shapes])
                        and holonomy_is_parabolic(v, [mpmath.mpc(z) for z in rd.shapes])):
                    continue
                d = raw_to_datum(rd, "6_1", info)
                if d is None:
                    print("  combo (%d,%d): rejected in normalization" % (a, b),
                          flush=True)
                    continue
                tinv, S2, S3 = exact_invariants(d)
                print("  combo (%d,%d): tau=%s" % (a, b, tinv.coeffs), flush=True)
                print("    S2=%s" % (S2.coeffs,), flush=True)
                print("    S3=%s" % (S3.coeffs,), flush=True)
                hits.append((d, tinv, S2, S3, tri))
                done += 1
                break
            if done >= 4:
                break
    from nzloop.nzdata import datum_to_json
    with open("/tmp/fixture_hits_6_1d.json", "w") as fh:
        json.dump([{"datum": datum_to_json(d),
                    "tau_inv_sq": [str(c) for c in t.coeffs],
                    "S2": [str(c) for c in s2.coeffs],
                    "S3": [str(c) for c in s3.coeffs],
                    "tri": tri.as_json()}
                   for (d, t, s2, s3, tri) in hits], fh, indent=1)
    print("wrote %d hits (%.0fs)" % (len(hits), time.time() - t0), flush=True)


if __name__ == "__main__":
    main()
