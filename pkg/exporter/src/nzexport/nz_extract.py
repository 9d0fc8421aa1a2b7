"""From a triangulation to Neumann-Zagier data: pick N-1 edge rows plus one
peripheral row, solve the (multiplicative) gluing equations numerically,
locate the geometric solution, fix logarithm branches there, and eliminate
z' to obtain (A, B, nu) with numeric shapes.

The peripheral row only needs to impose parabolic holonomy; any primitive
peripheral curve does, so the first fundamental-cycle row independent of the
edge rows is used.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass
from fractions import Fraction

import mpmath

from .localtri import Triangulation, gluing_rows, cusp_rows

__all__ = ["RawDatum", "extract_candidates", "bloch_wigner", "solve_geometric"]


@dataclass
class RawDatum:
    """(A, B, nu) with numeric shapes, before gauge normalization."""

    n: int
    A: list
    B: list
    nu: list
    shapes: list          # mpmath mpc values
    volume: float
    rows_used: list
    cusp_row: list

    def as_json(self, digits=60):
        mpmath.mp.dps = digits + 10
        return {
            "name": "census",
            "N": self.n,
            "A": self.A, "B": self.B, "nu": self.nu,
            "f": [0] * self.n, "f2": [0] * self.n,
            "shapes_numeric": [{"re": mpmath.nstr(mpmath.re(z), digits),
                                "im": mpmath.nstr(mpmath.im(z), digits),
                                "digits": digits} for z in self.shapes],
            "meta": {"volume": float(self.volume), "flattening_unset": True},
        }


def bloch_wigner(z) -> float:
    """D(z) = Im Li_2(z) + arg(1-z) log|z|."""
    z = mpmath.mpc(z)
    return float(mpmath.im(mpmath.polylog(2, z)) + mpmath.arg(1 - z) * mpmath.log(abs(z)))


def _row_rank(rows):
    M = [[Fraction(x) for x in r] for r in rows]
    rank = 0
    cols = len(M[0]) if M else 0
    r = 0
    for c in range(cols):
        piv = next((i for i in range(r, len(M)) if M[i][c] != 0), None)
        if piv is None:
            continue
        M[r], M[piv] = M[piv], M[r]
        inv = 1 / M[r][c]
        M[r] = [x * inv for x in M[r]]
        for i in range(len(M)):
            if i != r and M[i][c]:
                fct = M[i][c]
                M[i] = [x - fct * y for x, y in zip(M[i], M[r])]
        r += 1
        rank += 1
    return rank


def _reduce_row(row3):
    """(a, b, c) blocks -> (a - b | c - b) per tetrahedron."""
    n = len(row3) // 3
    a = [row3[3 * i] - row3[3 * i + 1] for i in range(n)]
    c = [row3[3 * i + 2] - row3[3 * i + 1] for i in range(n)]
    return a + c


def solve_geometric(rows, rhs_signs, n, tries=120, dps=60, seed=7):
    """Newton-solve prod z^a z'^b z''^c = target over C^n; return solutions
    with all shapes strictly in the upper half plane."""
    mpmath.mp.dps = dps
    rng = random.Random(seed)
    sols = []

    def f_and_j(zs):
        F = []
        J = [[mpmath.mpc(0)] * n for _ in range(len(rows))]
        for j, (row, tgt) in enumerate(zip(rows, rhs_signs)):
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
            F.append(P - tgt)
            for i in range(n):
                a, b, c = row[3 * i], row[3 * i + 1], row[3 * i + 2]
                z = zs[i]
                J[j][i] = P * (a / z + b / (1 - z) + c / (z * (z - 1)))
        return F, J

    for attempt in range(tries):
        zs = [mpmath.mpc(rng.uniform(-1.5, 2.5), rng.uniform(0.05, 2.0))
              for _ in range(n)]
        ok = False
        for _ in range(80):
            try:
                F, J = f_and_j(zs)
            except ZeroDivisionError:
                break
            err = max(abs(v) for v in F)
            if err < mpmath.mpf(10) ** (-dps + 12):
                ok = True
                break
            try:
                delta = mpmath.lu_solve(mpmath.matrix(J), mpmath.matrix(F))
            except ZeroDivisionError:
                break
            step = [delta[i] for i in range(n)]
            # damped step to help global convergence
            scale = 1
            if max(abs(s) for s in step) > 1:
                scale = 0.5
            zs = [zs[i] - scale * step[i] for i in range(n)]
            if any(abs(z) > 1e6 or abs(z) < 1e-9 or abs(z - 1) < 1e-9 for z in zs):
                break
        if not ok:
            continue
        if not all(mpmath.im(z) > 1e-8 for z in zs):
            continue
        if any(abs(z) < 1e-6 or abs(z - 1) < 1e-6 for z in zs):
            continue
        # dedupe
        found = False
        for s in sols:
            if max(abs(a - b) for a, b in zip(s, zs)) < 1e-20:
                found = True
                break
        if not found:
            sols.append(zs)
    return sols


def extract_candidates(tri: Triangulation, dps=60, tries=120):
    """All geometric NZ data extractable from the triangulation: one per
    (cusp-row candidate, geometric solution, cusp sign)."""
    n = tri.n
    erows = [r for r, _ in gluing_rows(tri)]
    crows = cusp_rows(tri)
    out = []
    base = [_reduce_row(r) for r in erows[:n - 1]]
    cusp_used = None
    for cr in crows:
        red = _reduce_row(cr)
        if _row_rank(base + [red]) == n:
            cusp_used = cr
            break
    if cusp_used is None:
        return out
    rows = erows[:n - 1] + [cusp_used]
    for cusp_sign in (1, -1):
        targets = [1] * (n - 1) + [cusp_sign]
        sols = solve_geometric(rows, targets, n, tries=tries, dps=dps)
        for zs in sols:
            vol = sum(bloch_wigner(z) for z in zs)
            if vol < 0.1:
                continue
            # branch bookkeeping at the solution
            mpmath.mp.dps = dps
            ipi = mpmath.mpc(0, mpmath.pi)
            nu = []
            okay = True
            for row, tgt in zip(rows, targets):
                acc = mpmath.mpc(0)
                for i in range(n):
                    a, b, c = row[3 * i], row[3 * i + 1], row[3 * i + 2]
                    z = zs[i]
                    acc += a * mpmath.log(z) - b * mpmath.log(1 - z) \
                        + c * mpmath.log((z - 1) / z)
                rho = acc / ipi
                rho_int = int(mpmath.nint(mpmath.re(rho)))
                if abs(rho - rho_int) > 1e-25:
                    okay = False
                    break
                nu.append(rho_int - sum(row[3 * i + 1] for i in range(n)))
            if not okay:
                continue
            A = [[rows[j][3 * i] - rows[j][3 * i + 1] for i in range(n)]
                 for j in range(n)]
            B = [[rows[j][3 * i + 2] - rows[j][3 * i + 1] for i in range(n)]
                 for j in range(n)]
            # Neumann-Zagier symmetry check
            ABt = [[sum(A[x][t] * B[y][t] for t in range(n)) for y in range(n)]
                   for x in range(n)]
            if any(ABt[x][y] != ABt[y][x] for x in range(n) for y in range(n)):
                continue
            out.append(RawDatum(n, A, B, nu, zs, vol, rows, cusp_used))
    return out
