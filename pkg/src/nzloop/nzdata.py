"""Neumann-Zagier data: model, validation, quad (gauge) rotations, the
unimodular-gauge search, the canonical flattening solver and JSON I/O.

A datum is (A, B, nu, z, f, f'') with A, B integer N x N matrices, nu, f, f''
integer vectors, and z the tuple of tetrahedron shapes (exact field elements
when available, always with a numeric seed).  Validity means: A B^T symmetric,
(A B) of full rank, A f + B f'' = nu, and z solving the gluing equations
z^A z''^B = (-1)^nu.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field as dfield
from fractions import Fraction
from pathlib import Path

from .mpnum import ComplexBall, PrecisionContext
from .field import NumberField, FieldElement, _bareiss_det

__all__ = [
    "ShapeValue", "NZDatum", "ValidationReport", "validate", "rotate_quad",
    "find_unimodular_gauge", "solve_flattening", "datum_to_json",
    "datum_from_json", "load_bundled_datum", "bundled_names", "polish_shapes",
]

DATA_DIR = Path(__file__).parent / "data" / "nz"


@dataclass
class ShapeValue:
    """One tetrahedron shape: optional exact vector over the trace-field
    power basis plus a decimal seed for the distinguished embedding."""

    numeric_re: str
    numeric_im: str
    digits: int
    exact: FieldElement | None = None

    def ball(self, ctx: PrecisionContext) -> ComplexBall:
        if self.exact is not None:
            return self.exact.embed(ctx)
        b = ctx.ball(self.numeric_re, self.numeric_im)
        seed_rad = ctx.rmpf(10) ** (-(self.digits - 2))
        return ctx.ball_mid_rad(b.mid, max(b.rad, seed_rad))


@dataclass
class NZDatum:
    name: str
    N: int
    A: tuple
    B: tuple
    nu: tuple
    shapes: list
    f: tuple
    f2: tuple
    field: NumberField | None = None
    meta: dict = dfield(default_factory=dict)

    # -- linear algebra helpers ---------------------------------------------

    def det_B(self) -> int:
        return _bareiss_det([list(r) for r in self.B])

    def B_inverse(self):
        n = self.N
        M = [[Fraction(self.B[i][j]) for j in range(n)] for i in range(n)]
        from .field import _fraction_matrix_inverse
        return _fraction_matrix_inverse(M)

    def BinvA(self):
        Bi = self.B_inverse()
        n = self.N
        return [[sum(Bi[i][t] * self.A[t][j] for t in range(n)) for j in range(n)]
                for i in range(n)]

    def Binv_nu(self):
        Bi = self.B_inverse()
        n = self.N
        return [sum(Bi[i][t] * self.nu[t] for t in range(n)) for i in range(n)]

    def shapes_ball(self, ctx: PrecisionContext):
        return [s.ball(ctx) for s in self.shapes]

    def shapes_exact(self):
        if any(s.exact is None for s in self.shapes):
            return None
        return [s.exact for s in self.shapes]

    def copy(self, **kw):
        init = dict(name=self.name, N=self.N, A=self.A, B=self.B, nu=self.nu,
                    shapes=list(self.shapes), f=self.f, f2=self.f2,
                    field=self.field, meta=dict(self.meta))
        init.update(kw)
        return NZDatum(**init)


@dataclass
class ValidationReport:
    ab_symmetric: bool
    rank_ok: bool
    det_B: int
    z_nondegenerate: bool
    flattening_ok: bool
    gluing_residual: float
    gluing_ok: bool
    multiplicative_exact: bool | None
    shape_embedding_ok: bool | None
    errors: list

    @property
    def valid(self) -> bool:
        return (self.ab_symmetric and self.rank_ok and self.flattening_ok
                and self.gluing_ok and not self.errors)

    def as_dict(self):
        return {
            "ab_symmetric": self.ab_symmetric,
            "rank_ok": self.rank_ok,
            "det_B": self.det_B,
            "z_nondegenerate": self.z_nondegenerate,
            "flattening_ok": self.flattening_ok,
            "gluing_residual": self.gluing_residual,
            "gluing_ok": self.gluing_ok,
            "multiplicative_exact": self.multiplicative_exact,
            "shape_embedding_ok": self.shape_embedding_ok,
            "errors": self.errors,
            "valid": self.valid,
        }


def _rank(rows):
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
                f = M[i][c]
                M[i] = [x - f * y for x, y in zip(M[i], M[r])]
        r += 1
        rank += 1
    return rank


def validate(datum: NZDatum, precision: int = 300) -> ValidationReport:
    """Check all datum invariants at the given decimal precision."""
    errors = []
    n = datum.N
    for M, nm in ((datum.A, "A"), (datum.B, "B")):
        if len(M) != n or any(len(r) != n for r in M):
            raise ValueError("%s is not %d x %d" % (nm, n, n))
    if len(datum.nu) != n or len(datum.f) != n or len(datum.f2) != n:
        raise ValueError("vector of wrong length")
    if len(datum.shapes) != n:
        raise ValueError("need one shape per tetrahedron")

    ABt = [[sum(datum.A[i][t] * datum.B[j][t] for t in range(n)) for j in range(n)]
           for i in range(n)]
    ab_symmetric = all(ABt[i][j] == ABt[j][i] for i in range(n) for j in range(n))
    rank_ok = _rank([list(datum.A[i]) + list(datum.B[i]) for i in range(n)]) == n
    detB = datum.det_B()
    z_nondeg = abs(detB) == 1
    flattening_ok = all(
        sum(datum.A[j][i] * datum.f[i] + datum.B[j][i] * datum.f2[i] for i in range(n))
        == datum.nu[j] for j in range(n))

    ctx = PrecisionContext(precision)
    zs = datum.shapes_ball(ctx)
    resid = ctx.rmpf(0)
    gluing_ok = True
    mult_exact = None
    shape_ok = None
    try:
        logs = [z.log() for z in zs]
        logspp = [(1 - z.inverse()).log() for z in zs]
        two_pi = ctx.pi_ball() * 2
        for j in range(n):
            acc = ctx.zero()
            for i in range(n):
                acc = acc + logs[i] * datum.A[j][i] + logspp[i] * datum.B[j][i]
            acc = acc - ctx.pi_ball() * ctx.i_ball() * datum.nu[j]
            # distance to the nearest multiple of 2 pi i
            ratio = acc / (two_pi * ctx.i_ball())
            nearest = ctx.mp.nint(ctx.mp.re(ratio.mid))
            dev = (acc - two_pi * ctx.i_ball() * int(nearest)).abs_upper()
            resid = max(resid, dev)
        gluing_ok = resid < ctx.tol(10)
    except Exception as exc:  # degenerate shapes: z in {0,1}
        errors.append("gluing check failed: %s" % exc)
        gluing_ok = False

    exact = datum.shapes_exact()
    if exact is not None:
        try:
            F = datum.field
            one = F.one()
            acc_ok = True
            for j in range(n):
                prod = one
                for i in range(n):
                    zi = exact[i]
                    if zi.is_zero() or zi == one:
                        raise ZeroDivisionError("shape is 0 or 1")
                    zpp = one - zi.inverse()
                    prod = prod * zi ** datum.A[j][i] * zpp ** datum.B[j][i]
                if prod != F.from_rational((-1) ** (datum.nu[j] % 2)):
                    acc_ok = False
            mult_exact = acc_ok
            if not acc_ok:
                errors.append("exact gluing equations fail")
            shape_ok = all(
                (s.exact.embed(ctx) - ctx.ball(s.numeric_re, s.numeric_im)).abs_upper()
                < ctx.rmpf(10) ** (-(min(s.digits, precision) - 10))
                for s in datum.shapes)
            if not shape_ok:
                errors.append("exact shapes disagree with numeric seeds")
        except ZeroDivisionError as exc:
            errors.append(str(exc))
            mult_exact = False
    if not ab_symmetric:
        errors.append("A B^T is not symmetric")
    if not rank_ok:
        errors.append("(A B) is rank deficient")
    if not flattening_ok:
        errors.append("A f + B f'' != nu")
    if not gluing_ok and not any("gluing" in e for e in errors):
        errors.append("gluing residual too large")
    return ValidationReport(ab_symmetric, rank_ok, detB, z_nondeg, flattening_ok,
                            float(resid), gluing_ok, mult_exact, shape_ok, errors)


def rotate_quad(datum: NZDatum, i: int) -> NZDatum:
    """Rotate tetrahedron i's distinguished shape z -> z' = 1/(1-z).

    Column i of A becomes -B_i, column i of B becomes A_i - B_i, nu becomes
    nu - B_i, and the flattening triple rotates (f, f'') -> (1-f-f'', f)."""
    n = datum.N
    if not (0 <= i < n):
        raise IndexError("tetrahedron index out of range")
    A = [list(r) for r in datum.A]
    B = [list(r) for r in datum.B]
    nu = list(datum.nu)
    for j in range(n):
        a, b = A[j][i], B[j][i]
        A[j][i] = -b
        B[j][i] = a - b
        nu[j] -= b
    f = list(datum.f)
    f2 = list(datum.f2)
    f[i], f2[i] = 1 - f[i] - f2[i], f[i]
    shapes = list(datum.shapes)
    old = shapes[i]
    new_exact = None
    if old.exact is not None:
        one = old.exact.field.one()
        new_exact = (one - old.exact).inverse()
    import mpmath
    prec_ctx = PrecisionContext(max(50, old.digits))
    zb = old.ball(prec_ctx)
    znew = (1 - zb).inverse()
    shapes[i] = ShapeValue(
        prec_ctx.mp.nstr(prec_ctx.mp.re(znew.mid), old.digits),
        prec_ctx.mp.nstr(prec_ctx.mp.im(znew.mid), old.digits),
        old.digits, new_exact)
    return datum.copy(A=tuple(tuple(r) for r in A), B=tuple(tuple(r) for r in B),
                      nu=tuple(nu), f=tuple(f), f2=tuple(f2), shapes=shapes)


def find_unimodular_gauge(datum: NZDatum, budget: int = 3 ** 12,
                          seed: int = 0):
    """Search the 3^N quad assignments for |det B| = 1.

    Exhaustive in lexicographic order for N <= 12; randomized greedy descent
    with restarts beyond.  Returns the rotated datum or None after budget
    exhaustion."""
    import itertools
    import random

    n = datum.N
    A0 = [[datum.A[j][i] for j in range(n)] for i in range(n)]  # columns
    B0 = [[datum.B[j][i] for j in range(n)] for i in range(n)]

    def detB_for(assignment):
        cols = []
        for i, r in enumerate(assignment):
            a, b = A0[i], B0[i]
            for _ in range(r):
                a, b = [-x for x in b], [x - y for x, y in zip(a, b)]
            cols.append(b)
        return _bareiss_det([[cols[i][j] for i in range(n)] for j in range(n)])

    def apply(assignment):
        out = datum
        for i, r in enumerate(assignment):
            for _ in range(r):
                out = rotate_quad(out, i)
        return out

    if n <= 12:
        visits = 0
        for assignment in itertools.product(range(3), repeat=n):
            if visits >= budget:
                return None
            visits += 1
            if abs(detB_for(assignment)) == 1:
                return apply(assignment)
        return None
    rng = random.Random(seed)
    visits = 0
    while visits < budget:
        cur = [rng.randrange(3) for _ in range(n)]
        best = abs(detB_for(cur))
        visits += 1
        improved = True
        while improved and visits < budget:
            improved = False
            for i in range(n):
                for r in (1, 2):
                    cand = list(cur)
                    cand[i] = (cand[i] + r) % 3
                    visits += 1
                    val = abs(detB_for(cand))
                    if val == 1:
                        return apply(cand)
                    if 0 < val < best or (best == 0 and val > 0):
                        cur, best = cand, val
                        improved = True
    return None


def solve_flattening(A, B, nu):
    """Canonical flattening f = 0, f'' = B^{-1} nu (requires |det B| = 1)."""
    n = len(A)
    det = _bareiss_det([list(r) for r in B])
    if abs(det) != 1:
        raise ValueError("B is not unimodular; no canonical flattening")
    from .field import _fraction_matrix_inverse
    Bi = _fraction_matrix_inverse([[Fraction(B[i][j]) for j in range(n)]
                                   for i in range(n)])
    f2 = [sum(Bi[i][t] * nu[t] for t in range(n)) for i in range(n)]
    assert all(x.denominator == 1 for x in f2)
    return tuple([0] * n), tuple(int(x) for x in f2)


def polish_shapes(datum: NZDatum, ctx: PrecisionContext) -> NZDatum:
    """Newton-refine numeric shapes against the logarithmic gluing equations,
    keeping the branch determined by the seed."""
    mp = ctx.mp
    n = datum.N
    zs = [s.ball(PrecisionContext(max(50, s.digits))).mid for s in datum.shapes]
    zs = [mp.mpc(z) for z in zs]
    ipi = mp.mpc(0, mp.pi)
    # fix 2 pi i branch offsets from the seed
    offsets = []
    for j in range(n):
        acc = sum(datum.A[j][i] * mp.log(zs[i]) + datum.B[j][i] * mp.log(1 - 1 / zs[i])
                  for i in range(n)) - ipi * datum.nu[j]
        offsets.append(int(mp.nint(mp.im(acc) / (2 * mp.pi))))
    for _ in range(200):
        Fv = []
        for j in range(n):
            acc = sum(datum.A[j][i] * mp.log(zs[i]) + datum.B[j][i] * mp.log(1 - 1 / zs[i])
                      for i in range(n)) - ipi * datum.nu[j] - 2 * ipi * offsets[j]
            Fv.append(acc)
        if max(abs(v) for v in Fv) < mp.mpf(10) ** (-(ctx.digits + ctx.guard - 5)):
            break
        J = mp.matrix(n, n)
        for j in range(n):
            for i in range(n):
                J[j, i] = datum.A[j][i] / zs[i] + datum.B[j][i] / (zs[i] * (zs[i] - 1))
        delta = mp.lu_solve(J, mp.matrix(Fv))
        zs = [zs[i] - delta[i] for i in range(n)]
    digits = ctx.digits
    shapes = [ShapeValue(mp.nstr(mp.re(z), digits), mp.nstr(mp.im(z), digits),
                         digits, s.exact)
              for z, s in zip(zs, datum.shapes)]
    return datum.copy(shapes=shapes)


# ---------------------------------------------------------------------------
# JSON serialization (schema of the External Interfaces section)


def _frac_str(q: Fraction) -> str:
    return "%d/%d" % (q.numerator, q.denominator) if q.denominator != 1 \
        else str(q.numerator)


def _parse_frac(s) -> Fraction:
    return Fraction(str(s))


def datum_to_json(datum: NZDatum) -> dict:
    out = {
        "name": datum.name,
        "N": datum.N,
        "A": [list(r) for r in datum.A],
        "B": [list(r) for r in datum.B],
        "nu": list(datum.nu),
        "f": list(datum.f),
        "f2": list(datum.f2),
        "shapes_numeric": [
            {"re": s.numeric_re, "im": s.numeric_im, "digits": s.digits}
            for s in datum.shapes],
    }
    if datum.field is not None:
        out["field"] = {
            "min_poly": [int(c) for c in datum.field.min_poly],
            "root_re": datum.field.root_seed[0],
            "root_im": datum.field.root_seed[1],
        }
    if all(s.exact is not None for s in datum.shapes):
        out["shapes_exact"] = [[_frac_str(c) for c in s.exact.coeffs]
                               for s in datum.shapes]
    if datum.meta:
        out["meta"] = datum.meta
    return out


def datum_from_json(obj: dict) -> NZDatum:
    field = None
    if "field" in obj:
        fi = obj["field"]
        field = NumberField([int(c) for c in fi["min_poly"]],
                            (fi["root_re"], fi["root_im"]),
                            name=obj.get("name", "F"))
    shapes = []
    exacts = obj.get("shapes_exact")
    for idx, s in enumerate(obj["shapes_numeric"]):
        exact = None
        if exacts is not None and field is not None:
            exact = field.element([_parse_frac(c) for c in exacts[idx]])
        shapes.append(ShapeValue(s["re"], s["im"], int(s["digits"]), exact))
    return NZDatum(
        name=obj["name"], N=int(obj["N"]),
        A=tuple(tuple(int(x) for x in r) for r in obj["A"]),
        B=tuple(tuple(int(x) for x in r) for r in obj["B"]),
        nu=tuple(int(x) for x in obj["nu"]),
        shapes=shapes,
        f=tuple(int(x) for x in obj["f"]),
        f2=tuple(int(x) for x in obj["f2"]),
        field=field,
        meta=obj.get("meta", {}),
    )


def bundled_names():
    return sorted(p.stem for p in DATA_DIR.glob("*.json"))


def load_bundled_datum(name: str) -> NZDatum:
    path = DATA_DIR / ("%s.json" % name)
    if not path.exists():
        raise FileNotFoundError("no bundled datum named %r" % name)
    return datum_from_json(json.loads(path.read_text()))
