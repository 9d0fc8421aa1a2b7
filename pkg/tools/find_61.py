"""Targeted 6_1 search: enumerate the N=4 census, dedupe up to combinatorial
isomorphism, cheap low-precision geometric filtering, then full extraction
and invariant identification."""

import json
import sys
import time
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "exporter" / "src"))
sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "tools"))

from nzexport.localtri import enumerate_census
from nzexport.nz_extract import extract_candidates
from make_fixtures import raw_to_datum, exact_invariants, FIELDS

VOL61 = 3.163963228883143983991475796277


def canon_sig(tri):
    """Canonical signature: minimal BFS encoding over all starts/relabelings."""
    import itertools
    n = tri.n
    best = None
    perms = list(itertools.permutations(range(4)))
    for t0 in range(n):
        for p0 in perms:
            new_index = {t0: 0}
            vert_map = {t0: p0}
            order = [t0]
            encoding = []
            qi = 0
            while qi < len(order):
                t = order[qi]
                qi += 1
                pm = vert_map[t]
                inv = [0] * 4
                for i, v in enumerate(pm):
                    inv[v] = i
                for f_new in range(4):
                    f_old = inv[f_new]
                    t2, f2, g = tri.gluings[(t, f_old)]
                    if t2 not in new_index:
                        new_index[t2] = len(order)
                        comp = [0] * 4
                        for v_old in range(4):
                            comp[pm[v_old]] = g[v_old]
                        vm2 = [0] * 4
                        for newv in range(4):
                            vm2[comp[newv]] = newv
                        vert_map[t2] = tuple(vm2)
                        order.append(t2)
                    pm2 = vert_map[t2]
                    enc = (new_index[t2],) + tuple(pm2[g[inv[w]]] for w in range(4))
                    encoding.append(enc)
            sig = tuple(encoding)
            if best is None or sig < best:
                best = sig
    return best


def main():
    t0 = time.time()
    print("enumerating N=4 census ...", flush=True)
    tris = enumerate_census(4)
    print("%d raw gluings (%.0fs)" % (len(tris), time.time() - t0), flush=True)
    seen = {}
    for tri in tris:
        sig = canon_sig(tri)
        if sig not in seen:
            seen[sig] = tri
    classes = list(seen.values())
    print("%d iso classes (%.0fs)" % (len(classes), time.time() - t0), flush=True)
    hits = []
    info = FIELDS["6_1"]
    for idx, tri in enumerate(classes):
        if idx % 50 == 0:
            print("scan %d/%d (%.0fs)" % (idx, len(classes), time.time() - t0),
                  flush=True)
        cands = extract_candidates(tri, dps=40, tries=12)
        if not any(abs(rd.volume - VOL61) < 1e-5 for rd in cands):
            continue
        print("volume hit at class %d" % idx, flush=True)
        for rd in extract_candidates(tri, dps=60, tries=60):
            if abs(rd.volume - VOL61) > 1e-6:
                continue
            d = raw_to_datum(rd, "6_1", info)
            if d is None:
                continue
            tinv, S2, S3 = exact_invariants(d)
            hits.append((d, tinv, S2, S3, tri))
            print("candidate: tau^-2=%s S2=%s S3=%s" %
                  (tinv.coeffs, S2.coeffs, S3.coeffs), flush=True)
        if len(hits) >= 6:
            break
    from nzloop.nzdata import datum_to_json
    with open("/tmp/fixture_hits_6_1.json", "w") as fh:
        json.dump([{"datum": datum_to_json(d),
                    "tau_inv_sq": [str(c) for c in t.coeffs],
                    "S2": [str(c) for c in s2.coeffs],
                    "S3": [str(c) for c in s3.coeffs],
                    "tri": tri.as_json()}
                   for (d, t, s2, s3, tri) in hits], fh, indent=1)
    print("wrote %d hits (%.0fs)" % (len(hits), time.time() - t0), flush=True)


if __name__ == "__main__":
    main()
