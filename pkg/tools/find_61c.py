"""Third-pass 6_1 hunt: for volume-matching classes, try many peripheral
rows (fundamental-cycle combinations, plus edge-row additions) so that a
Z-nondegenerate gauge exists; identify by exact invariants."""

import itertools
import json
import sys
import time
from fractions import Fraction
from math import gcd
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "exporter" / "src"))
sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "tools"))

import mpmath

from nzexport.localtri import enumerate_census, Triangulation, gluing_rows, cusp_rows
from nzexport.nz_extract import (extract_candidates, _reduce_row, _row_rank,
                                 RawDatum, solve_geometric, bloch_wigner)
from make_fixtures import raw_to_datum, exact_invariants, FIELDS, gauge_variants
from find_61 import canon_sig, VOL61

CLASS_CACHE = Path("/tmp/n4_classes.json")


def get_classes():
    if CLASS_CACHE.exists():
        data = json.loads(CLASS_CACHE.read_text())
        return [Triangulation.from_json(o) for o in data]
    tris = enumerate_census(4)
    seen = {}
    for tri in tris:
        sig = canon_sig(tri)
        if sig not in seen:
            seen[sig] = tri
    classes = list(seen.values())
    CLASS_CACHE.write_text(json.dumps([t.as_json() for t in classes]))
    return classes


def extract_with_row(tri, cusp_row, dps=60, tries=40):
    n = tri.n
    erows = [r for r, _ in gluing_rows(tri)]
    base = [_reduce_row(r) for r in erows[:n - 1]]
    if _row_rank(base + [_reduce_row(cusp_row)]) != n:
        return []
    rows = erows[:n - 1] + [cusp_row]
    out = []
    for sign in (1, -1):
        targets = [1] * (n - 1) + [sign]
        for zs in solve_geometric(rows, targets, n, tries=tries, dps=dps):
            vol = sum(bloch_wigner(z) for z in zs)
            if abs(vol - VOL61) > 1e-6:
                continue
            mpmath.mp.dps = dps
            ipi = mpmath.mpc(0, mpmath.pi)
            nu, ok = [], True
            for row, tgt in zip(rows, targets):
                acc = sum(row[3 * i] * mpmath.log(zs[i])
                          - row[3 * i + 1] * mpmath.log(1 - zs[i])
                          + row[3 * i + 2] * mpmath.log((zs[i] - 1) / zs[i])
                          for i in range(n))
                rho = acc / ipi
                ri = int(mpmath.nint(mpmath.re(rho)))
                if abs(rho - ri) > 1e-25:
                    ok = False
                    break
                nu.append(ri - sum(row[3 * i + 1] for i in range(n)))
            if not ok:
                continue
            A = [[rows[j][3 * i] - rows[j][3 * i + 1] for i in range(n)]
                 for j in range(n)]
            B = [[rows[j][3 * i + 2] - rows[j][3 * i + 1] for i in range(n)]
                 for j in range(n)]
            ABt = [[sum(A[x][t] * B[y][t] for t in range(n)) for y in range(n)]
                   for x in range(n)]
            if any(ABt[x][y] != ABt[y][x] for x in range(n) for y in range(n)):
                continue
            out.append(RawDatum(n, A, B, nu, zs, vol, rows, cusp_row))
    return out


def main():
    t0 = time.time()
    classes = get_classes()
    print("%d classes (%.0fs)" % (len(classes), time.time() - t0), flush=True)
    info = FIELDS["6_1"]
    hits = []
    for idx, tri in enumerate(classes):
        quick = extract_candidates(tri, dps=40, tries=25)
        if not any(abs(rd.volume - VOL61) < 1e-5 for rd in quick):
            continue
        print("class %d: volume match (%.0fs)" % (idx, time.time() - t0), flush=True)
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
        combos = []
        for a, b in [(1, 0), (0, 1), (1, 1), (1, -1), (-1, 1), (2, 1), (1, 2),
                     (-1, -1), (2, -1), (-1, 2), (3, 1), (1, 3), (3, 2), (2, 3)]:
            if gcd(abs(a), abs(b)) != 1:
                continue
            combos.append([a * x + b * y for x, y in zip(u, v)])
        found_here = 0
        for cno, w0 in enumerate(combos):
            rows_to_try = [w0]
            for c1 in (0, 1, -1):
                for c2 in (0, 1, -1):
                    if (c1, c2) == (0, 0):
                        continue
                    rows_to_try.append([w + c1 * e1 + c2 * e2 for w, e1, e2
                                        in zip(w0, erows[0], erows[1])])
            for row in rows_to_try:
                for rd in extract_with_row(tri, row, tries=30):
                    d = raw_to_datum(rd, "6_1", info)
                    if d is None:
                        continue
                    tinv, S2, S3 = exact_invariants(d)
                    print("  candidate (combo %d): tau=%s" % (cno, tinv.coeffs),
                          flush=True)
                    print("    S2=%s" % (S2.coeffs,), flush=True)
                    print("    S3=%s" % (S3.coeffs,), flush=True)
                    hits.append((d, tinv, S2, S3, tri))
                    found_here += 1
                    break
                if found_here >= 3:
                    break
            if found_here >= 3:
                break
    from nzloop.nzdata import datum_to_json
    with open("/tmp/fixture_hits_6_1c.json", "w") as fh:
        json.dump([{"datum": datum_to_json(d),
                    "tau_inv_sq": [str(c) for c in t.coeffs],
                    "S2": [str(c) for c in s2.coeffs],
                    "S3": [str(c) for c in s3.coeffs],
                    "tri": tri.as_json()}
                   for (d, t, s2, s3, tri) in hits], fh, indent=1)
    print("wrote %d hits (%.0fs)" % (len(hits), time.time() - t0), flush=True)


if __name__ == "__main__":
    main()
