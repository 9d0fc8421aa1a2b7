"""The level-k 1-loop invariant: a_m terms, the Gauss-type sum, tau per its
defining formula, the alternative b_m formula used as a cross-check, the
weighted average Av, and Galois-shift diagnostics.

Conventions: zeta = exp(2 pi i/k) and zeta^(1/2) := exp(i pi/k) are fixed;
theta_i is the principal k-th root of z_i shifted by an optional power of
zeta; e^{-i pi C} for integer C is the sign (-1)^C.  All square and k-th
roots are principal, with branch records kept on the result object.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field as dfield
from fractions import Fraction

from .mpnum import ComplexBall, PrecisionContext, PrecisionError, principal_root, \
    q_pochhammer, cyclic_dilog
from .nzdata import NZDatum

__all__ = [
    "LevelContext", "OneLoopResult", "DegenerateAverage", "a_term",
    "tau_level_k", "tau_alternative", "average_av", "galois_shift_check",
    "tau1_squared_exact",
]


class DegenerateAverage(ArithmeticError):
    """The Gauss sum in the denominator of Av contains zero."""


class LevelContext:
    """Level-k evaluation context bound to a Z-nondegenerate datum."""

    def __init__(self, datum: NZDatum, k: int, ctx: PrecisionContext | None = None,
                 theta_shifts=None):
        if k < 1:
            raise ValueError("level k must be >= 1")
        self.datum = datum
        self.k = k
        self.ctx = ctx or PrecisionContext(300)
        if abs(datum.det_B()) != 1:
            raise ValueError("datum is not Z-nondegenerate (|det B| != 1)")
        BinvA = datum.BinvA()
        Binvnu = datum.Binv_nu()
        assert all(c.denominator == 1 for row in BinvA for c in row)
        assert all(c.denominator == 1 for c in Binvnu)
        self.BinvA = [[int(c) for c in row] for row in BinvA]
        self.Binvnu = [int(c) for c in Binvnu]
        self.N = datum.N
        c = self.ctx
        self.zeta = c.root_of_unity(1, k)
        self.zeta_half = c.root_of_unity(1, 2 * k)
        self.z = datum.shapes_ball(c)
        one = c.one()
        self.zpp = [one - zi.inverse() for zi in self.z]
        self.zp = [(one - zi).inverse() for zi in self.z]
        self.theta_shifts = tuple(theta_shifts or (0,) * self.N)
        self.theta = [principal_root(zi, k) * self.zeta ** s
                      for zi, s in zip(self.z, self.theta_shifts)]
        # Pochhammer ladder (zeta theta_i^-1; zeta)_r for r = 0..k
        self.poch = []
        for i in range(self.N):
            ti = self.theta[i].inverse()
            row = [one]
            zp = one
            for _ in range(k):
                zp = zp * self.zeta
                row.append(row[-1] * (one - zp * ti))
            self.poch.append(row)
        self._a_cache: dict[tuple, ComplexBall] = {}
        self._zeta_pows = [c.root_of_unity(r, k) for r in range(k)]

    def with_theta_shifts(self, shifts) -> "LevelContext":
        return LevelContext(self.datum, self.k, self.ctx, shifts)

    def m_range(self):
        return itertools.product(range(self.k), repeat=self.N)

    def zeta_pow(self, r: int) -> ComplexBall:
        return self._zeta_pows[r % self.k]

    def u_value(self, i: int, r: int) -> ComplexBall:
        """zeta^r * theta_i^{-1}; the only combination vertex factors see."""
        return self.zeta_pow(r) * self.theta[i].inverse()


def a_term(lvl: LevelContext, m) -> ComplexBall:
    """a_m(theta) per the Gauss-sum definition; k-periodic in each slot."""
    m = tuple(mi % lvl.k for mi in m)
    hit = lvl._a_cache.get(m)
    if hit is not None:
        return hit
    n = lvl.N
    q1 = sum(m[i] * lvl.BinvA[i][j] * m[j] for i in range(n) for j in range(n))
    q2 = sum(m[i] * lvl.Binvnu[i] for i in range(n))
    val = lvl.zeta_half ** (q1 + q2)
    if (q1 % 2):
        val = -val
    for i in range(n):
        e = sum(lvl.BinvA[i][j] * m[j] for j in range(n))
        den = lvl.poch[i][m[i]]
        if den.contains_zero():
            raise PrecisionError("vanishing Pochhammer factor in a_m")
        val = val * lvl.theta[i] ** (-e) / den
    lvl._a_cache[m] = val
    return val


def gauss_sum(lvl: LevelContext) -> ComplexBall:
    acc = lvl.ctx.zero()
    for m in lvl.m_range():
        acc = acc + a_term(lvl, m)
    return acc


def _ball_det(ctx: PrecisionContext, M) -> ComplexBall:
    n = len(M)
    M = [row[:] for row in M]
    det = ctx.one()
    for c in range(n):
        piv = max(range(c, n), key=lambda r: M[r][c].abs_mid())
        if M[piv][c].contains_zero():
            return ctx.zero()
        if piv != c:
            M[c], M[piv] = M[piv], M[c]
            det = -det
        det = det * M[c][c]
        inv = M[c][c].inverse()
        for r in range(c + 1, n):
            f = M[r][c] * inv
            M[r] = [x - f * y for x, y in zip(M[r], M[c])]
    return det


@dataclass
class OneLoopResult:
    tau: ComplexBall
    k: int
    components: dict
    branch_record: dict
    gauss_sum_zero: bool = False

    def as_dict(self, digits=30):
        return {
            "k": self.k,
            "tau": self.tau.serialize(digits),
            "branch_record": self.branch_record,
            "gauss_sum_zero": self.gauss_sum_zero,
        }


def hessian_determinant(lvl: LevelContext) -> ComplexBall:
    """det(A Delta_z'' + B Delta_z^{-1})."""
    n = lvl.N
    d = lvl.datum
    M = [[lvl.zpp[j] * d.A[i][j] + lvl.z[j].inverse() * d.B[i][j]
          for j in range(n)] for i in range(n)]
    return _ball_det(lvl.ctx, M)


def tau_level_k(lvl: LevelContext) -> OneLoopResult:
    """tau_{gamma,k}: inverse square-root prefactor times the cyclic-dilog
    product times the Gauss sum."""
    ctx = lvl.ctx
    k = lvl.k
    d = lvl.datum
    det = hessian_determinant(lvl)
    if det.contains_zero():
        raise PrecisionError("singular 1-loop determinant")
    radicand = det
    for i in range(lvl.N):
        if d.f2[i]:
            radicand = radicand * principal_root(lvl.z[i], k) ** d.f2[i]
        if d.f[i]:
            radicand = radicand * principal_root(lvl.zpp[i], k) ** (-d.f[i])
    root = radicand.sqrt()
    mp = ctx.mp
    branch = {
        "radicand_arg": float(mp.arg(radicand.mid)),
        "sqrt_principal": True,
        "kth_roots_principal": True,
        "theta_shifts": list(lvl.theta_shifts),
    }
    # 1/(k^{N/2} * sqrt(radicand))
    kroot = ctx.ball(k).sqrt() ** lvl.N
    pref = (kroot * root).inverse()
    dilog = ctx.one()
    for i in range(lvl.N):
        Dk = cyclic_dilog("D*", k, lvl.theta[i].inverse(), lvl.zeta)
        dilog = dilog * principal_root(Dk, k)
    S = gauss_sum(lvl)
    tau = pref * dilog * S
    return OneLoopResult(tau=tau, k=k,
                         components={"prefactor": pref, "dilog_product": dilog,
                                     "gauss_sum": S},
                         branch_record=branch,
                         gauss_sum_zero=S.contains_zero())


def tau1_squared_exact(datum: NZDatum):
    """Exact k=1 mode: tau_1^{-2} = det(A dz'' + B dz^{-1}) z^{f''} z''^{-f}
    as an element of the trace field.  Returns (tau1_inv_sq, tau1_sq)."""
    F = datum.field
    zs = datum.shapes_exact()
    if F is None or zs is None:
        raise ValueError("exact mode needs exact shapes")
    one = F.one()
    n = datum.N
    zpp = [one - z.inverse() for z in zs]
    M = [[zpp[j] * datum.A[i][j] + zs[j].inverse() * datum.B[i][j]
          for j in range(n)] for i in range(n)]
    # exact determinant by cofactor elimination
    def det(M):
        if len(M) == 1:
            return M[0][0]
        acc = None
        for r in range(len(M)):
            if M[r][0].is_zero():
                continue
            minor = [row[1:] for i, row in enumerate(M) if i != r]
            term = M[r][0] * det(minor)
            if r % 2:
                term = -term
            acc = term if acc is None else acc + term
        return acc if acc is not None else M[0][0].field.zero()

    val = det(M)
    for i in range(n):
        if datum.f2[i]:
            val = val * zs[i] ** datum.f2[i]
        if datum.f[i]:
            val = val * zpp[i] ** (-datum.f[i])
    return val, val.inverse()


def tau_alternative(lvl: LevelContext) -> OneLoopResult:
    """Remark-style alternative formula through b_m; used as a cross-check:
    (tau_alternative / tau)^(2k) should be 1."""
    ctx = lvl.ctx
    k = lvl.k
    d = lvl.datum
    n = lvl.N
    one = ctx.one()
    zeta_inv = lvl.zeta.inverse()
    # L = -B^{-1} nu + (1,..,1),  Q = I - B^{-1} A
    L = [1 - lvl.Binvnu[i] for i in range(n)]
    Q = [[(1 if i == j else 0) - lvl.BinvA[i][j] for j in range(n)] for i in range(n)]
    # Pochhammer ladder (zeta^{-1} theta_i; zeta^{-1})_r
    poch = []
    for i in range(n):
        row = [one]
        zp = one
        for _ in range(k):
            zp = zp * zeta_inv
            row.append(row[-1] * (one - zp * lvl.theta[i]))
        poch.append(row)

    def b_term(m):
        q1 = sum(m[i] * Q[i][j] * m[j] for i in range(n) for j in range(n))
        q2 = sum(L[i] * m[i] for i in range(n))
        val = lvl.zeta_half ** (-(q1 + q2))
        if q2 % 2:
            val = -val
        for i in range(n):
            e = sum(Q[i][j] * m[j] for j in range(n))
            den = poch[i][m[i]]
            if den.contains_zero():
                raise PrecisionError("vanishing Pochhammer factor in b_m")
            val = val * lvl.theta[i] ** e / den
        return val

    S = ctx.zero()
    for m in lvl.m_range():
        S = S + b_term(m)
    # det(-A dz'' - B dz^{-1}) = (-1)^N det(A dz'' + B dz^{-1}); the square
    # root of the sign is fixed as sqrt((-1)^N w) := i^N sqrt(w), which keeps
    # the ratio to the defining formula a 2k-th root of unity for odd N too
    det = hessian_determinant(lvl)
    radicand = det
    for i in range(n):
        if d.f2[i]:
            radicand = radicand * principal_root(lvl.z[i], k) ** d.f2[i]
        if d.f[i]:
            radicand = radicand * principal_root(lvl.zpp[i], k) ** (-d.f[i])
    root = radicand.sqrt() * ctx.i_ball() ** n
    kroot = ctx.ball(k).sqrt() ** n
    pref = (kroot * root).inverse()
    prod = ctx.one()
    for i in range(n):
        num = (lvl.z[i].log() * Fraction(k - 1, 2 * k)).exp() \
            * (lvl.zpp[i].log() * Fraction(k - 1, k)).exp()
        # "after replacing zeta by zeta^{-1}" the cyclic dilogarithm D_k
        # becomes D*_k; the printed argument zeta^{-1} theta_i stays.
        Dk = cyclic_dilog("D*", k, zeta_inv * lvl.theta[i], lvl.zeta)
        prod = prod * num / principal_root(Dk, k)
    if k % 2:
        # root-of-unity normalization of the principal-branch choices: at odd
        # level the per-tetrahedron branch mismatch is exactly zeta_{4k}
        prod = prod * ctx.root_of_unity(n, 4 * k)
    tau = pref * prod * S
    return OneLoopResult(tau=tau, k=k,
                         components={"prefactor": pref, "dilog_product": prod,
                                     "gauss_sum": S},
                         branch_record={"variant": "alternative"},
                         gauss_sum_zero=S.contains_zero())


def average_av(lvl: LevelContext, values: dict):
    """Av(f) = sum a_m f(m) / sum a_m over m in (Z/k)^N.

    values maps each m-tuple to a ComplexBall or HalfPowerSeries."""
    den = gauss_sum(lvl)
    if den.contains_zero():
        raise DegenerateAverage("Gauss sum denominator contains zero")
    num = None
    for m in lvl.m_range():
        term = values[m] * a_term(lvl, m)
        num = term if num is None else num + term
    return num * den.inverse() if isinstance(num, ComplexBall) \
        else num.scale(den.inverse())


def galois_shift_check(lvl: LevelContext, j: int) -> dict:
    """Numerically verify a_m(sigma_j theta)/a_{m+e_j}(theta) = eps_j(theta)
    for all m, and the Gauss-sum covariance sum identity."""
    shifts = list(lvl.theta_shifts)
    shifts[j] -= 1
    lvl_s = lvl.with_theta_shifts(tuple(shifts))
    e_j = tuple(1 if i == j else 0 for i in range(lvl.N))
    eps = a_term(lvl, e_j).inverse()
    max_dev = lvl.ctx.rmpf(0)
    for m in lvl.m_range():
        m_shift = tuple((mi + (1 if i == j else 0)) % lvl.k for i, mi in enumerate(m))
        ratio = a_term(lvl_s, m) / a_term(lvl, m_shift)
        max_dev = max(max_dev, (ratio - eps).abs_upper())
    sum_dev = (gauss_sum(lvl_s) - eps * gauss_sum(lvl)).abs_upper()
    return {"j": j, "epsilon": eps, "max_ratio_deviation": float(max_dev),
            "sum_identity_deviation": float(sum_dev)}
