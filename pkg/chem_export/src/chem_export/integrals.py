"""One- and two-electron integrals over contracted Cartesian Gaussians via
the McMurchie-Davidson scheme (Hermite expansions + Boys function)."""

from __future__ import annotations

import math

import numpy as np
from scipy.special import hyp1f1

from .basis import Shell


def boys(n: int, x: float) -> float:
    return float(hyp1f1(n + 0.5, n + 1.5, -x)) / (2.0 * n + 1.0)


def _hermite_e(l1: int, l2: int, a: float, b: float, ab: float) -> np.ndarray:
    """E[i, j, t] coefficients for one Cartesian direction; ab = A - B."""
    p = a + b
    mu = a * b / p
    e = np.zeros((l1 + 1, l2 + 1, l1 + l2 + 2))
    e[0, 0, 0] = math.exp(-mu * ab * ab)
    pa = -b * ab / p * -1.0  # P - A = -(b/p)(A-B) ... kept explicit below
    # P = (aA + bB)/p; P - A = -(b/p)(A-B), P - B = (a/p)(A-B)
    pa = -(b / p) * ab
    pb = (a / p) * ab
    for i in range(l1 + 1):
        for j in range(l2 + 1):
            if i == 0 and j == 0:
                continue
            if j == 0:
                # build from (i-1, 0)
                for t in range(i + j + 1):
                    val = pa * e[i - 1, 0, t]
                    if t > 0:
                        val += e[i - 1, 0, t - 1] / (2.0 * p)
                    if t + 1 <= i + j:
                        val += (t + 1) * e[i - 1, 0, t + 1]
                    e[i, 0, t] = val
            else:
                for t in range(i + j + 1):
                    val = pb * e[i, j - 1, t]
                    if t > 0:
                        val += e[i, j - 1, t - 1] / (2.0 * p)
                    if t + 1 <= i + j:
                        val += (t + 1) * e[i, j - 1, t + 1]
                    e[i, j, t] = val
    return e


def _hermite_coulomb(tmax: int, umax: int, vmax: int, p: float, pc) -> np.ndarray:
    """R_{t,u,v} tensor for the Hermite Coulomb integrals."""
    x = p * (pc[0] ** 2 + pc[1] ** 2 + pc[2] ** 2)
    nmax = tmax + umax + vmax
    fn = [boys(n, x) for n in range(nmax + 1)]
    r = np.zeros((nmax + 1, tmax + 1, umax + 1, vmax + 1))
    for n in range(nmax + 1):
        r[n, 0, 0, 0] = (-2.0 * p) ** n * fn[n]
    for t in range(tmax + 1):
        for u in range(umax + 1):
            for v in range(vmax + 1):
                if t == u == v == 0:
                    continue
                for n in range(nmax - (t + u + v) + 1):
                    if t > 0:
                        val = pc[0] * r[n + 1, t - 1, u, v]
                        if t > 1:
                            val += (t - 1) * r[n + 1, t - 2, u, v]
                    elif u > 0:
                        val = pc[1] * r[n + 1, t, u - 1, v]
                        if u > 1:
                            val += (u - 1) * r[n + 1, t, u - 2, v]
                    else:
                        val = pc[2] * r[n + 1, t, u, v - 1]
                        if v > 1:
                            val += (v - 1) * r[n + 1, t, u, v - 2]
                    r[n, t, u, v] = val
    return r[0]


def _pair_data(sa: Shell, sb: Shell, ia: int, ib: int):
    a = sa.exponents[ia]
    b = sb.exponents[ib]
    p = a + b
    pxyz = tuple((a * sa.center[k] + b * sb.center[k]) / p for k in range(3))
    es = [
        _hermite_e(sa.angular[k], sb.angular[k], a, b, sa.center[k] - sb.center[k])
        for k in range(3)
    ]
    return a, b, p, pxyz, es


def overlap(sa: Shell, sb: Shell) -> float:
    out = 0.0
    for ia, ca in enumerate(sa.coefficients):
        for ib, cb in enumerate(sb.coefficients):
            a, b, p, _, es = _pair_data(sa, sb, ia, ib)
            val = 1.0
            for k in range(3):
                val *= es[k][sa.angular[k], sb.angular[k], 0]
            out += ca * cb * val * (math.pi / p) ** 1.5
    return out


def _overlap_1d(e, i, j):
    return e[i, j, 0]


def kinetic(sa: Shell, sb: Shell) -> float:
    out = 0.0
    la, lb = sa.angular, sb.angular
    for ia, ca in enumerate(sa.coefficients):
        for ib, cb in enumerate(sb.coefficients):
            a, b, p, _, _ = _pair_data(sa, sb, ia, ib)
            # 1D overlaps with shifted angular momenta on center B
            s = []
            t = []
            for k in range(3):
                lbk = lb[k]
                e_plus = _hermite_e(la[k], lbk + 2, a, b, sa.center[k] - sb.center[k])
                s_0 = e_plus[la[k], lbk, 0]
                s_p2 = e_plus[la[k], lbk + 2, 0]
                s_m2 = e_plus[la[k], lbk - 2, 0] if lbk >= 2 else 0.0
                tk = -2.0 * b * b * s_p2 + b * (2 * lbk + 1) * s_0
                if lbk >= 2:
                    tk -= 0.5 * lbk * (lbk - 1) * s_m2
                s.append(s_0)
                t.append(tk)
            val = t[0] * s[1] * s[2] + s[0] * t[1] * s[2] + s[0] * s[1] * t[2]
            out += ca * cb * val * (math.pi / p) ** 1.5
    return out


def nuclear_attraction(sa: Shell, sb: Shell, charges) -> float:
    """Sum over nuclei of -Z <a| 1/r_C |b>."""
    out = 0.0
    la, lb = sa.angular, sb.angular
    for ia, ca in enumerate(sa.coefficients):
        for ib, cb in enumerate(sb.coefficients):
            a, b, p, pxyz, es = _pair_data(sa, sb, ia, ib)
            tmax, umax, vmax = (la[k] + lb[k] for k in range(3))
            for z, cxyz in charges:
                pc = tuple(pxyz[k] - cxyz[k] for k in range(3))
                r = _hermite_coulomb(tmax, umax, vmax, p, pc)
                val = 0.0
                for t in range(tmax + 1):
                    et = es[0][la[0], lb[0], t]
                    if et == 0.0:
                        continue
                    for u in range(umax + 1):
                        eu = es[1][la[1], lb[1], u]
                        if eu == 0.0:
                            continue
                        for v in range(vmax + 1):
                            ev = es[2][la[2], lb[2], v]
                            if ev == 0.0:
                                continue
                            val += et * eu * ev * r[t, u, v]
                out -= z * ca * cb * val * 2.0 * math.pi / p
    return out


def electron_repulsion(sa: Shell, sb: Shell, sc: Shell, sd: Shell) -> float:
    """(ab|cd) in chemist notation."""
    la, lb, lc, ld = sa.angular, sb.angular, sc.angular, sd.angular
    out = 0.0
    for ia, ca in enumerate(sa.coefficients):
        for ib, cb in enumerate(sb.coefficients):
            a, b, p, pxyz, e_ab = _pair_data(sa, sb, ia, ib)
            t1 = [la[k] + lb[k] for k in range(3)]
            for ic, cc in enumerate(sc.coefficients):
                for idd, cd in enumerate(sd.coefficients):
                    c, d, q, qxyz, e_cd = _pair_data(sc, sd, ic, idd)
                    t2 = [lc[k] + ld[k] for k in range(3)]
                    alpha = p * q / (p + q)
                    pq = tuple(pxyz[k] - qxyz[k] for k in range(3))
                    r = _hermite_coulomb(
                        t1[0] + t2[0], t1[1] + t2[1], t1[2] + t2[2], alpha, pq
                    )
                    val = 0.0
                    for t in range(t1[0] + 1):
                        et = e_ab[0][la[0], lb[0], t]
                        if et == 0.0:
                            continue
                        for u in range(t1[1] + 1):
                            eu = e_ab[1][la[1], lb[1], u]
                            if eu == 0.0:
                                continue
                            for v in range(t1[2] + 1):
                                ev = e_ab[2][la[2], lb[2], v]
                                if ev == 0.0:
                                    continue
                                for tt in range(t2[0] + 1):
                                    ftt = e_cd[0][lc[0], ld[0], tt]
                                    if ftt == 0.0:
                                        continue
                                    for uu in range(t2[1] + 1):
                                        fuu = e_cd[1][lc[1], ld[1], uu]
                                        if fuu == 0.0:
                                            continue
                                        for vv in range(t2[2] + 1):
                                            fvv = e_cd[2][lc[2], ld[2], vv]
                                            if fvv == 0.0:
                                                continue
                                            sign = (-1.0) ** (tt + uu + vv)
                                            val += (
                                                et * eu * ev * ftt * fuu * fvv
                                                * sign
                                                * r[t + tt, u + uu, v + vv]
                                            )
                    pref = 2.0 * math.pi**2.5 / (p * q * math.sqrt(p + q))
                    out += ca * cb * cc * cd * pref * val
    return out


def integral_tables(shells: list[Shell], charges):
    """Full S, T, V matrices and the (pq|rs) ERI tensor in the AO basis."""
    n = len(shells)
    s = np.zeros((n, n))
    t = np.zeros((n, n))
    v = np.zeros((n, n))
    for i in range(n):
        for j in range(i, n):
            s[i, j] = s[j, i] = overlap(shells[i], shells[j])
            t[i, j] = t[j, i] = kinetic(shells[i], shells[j])
            v[i, j] = v[j, i] = nuclear_attraction(shells[i], shells[j], charges)
    eri = np.zeros((n, n, n, n))
    for i in range(n):
        for j in range(i + 1):
            for k in range(n):
                for l in range(k + 1):
                    if (i * (i + 1) // 2 + j) < (k * (k + 1) // 2 + l):
                        continue
                    val = electron_repulsion(shells[i], shells[j], shells[k], shells[l])
                    for a, b in ((i, j), (j, i)):
                        for c, d in ((k, l), (l, k)):
                            eri[a, b, c, d] = val
                            eri[c, d, a, b] = val
    return s, t, v, eri
