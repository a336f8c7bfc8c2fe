"""Pure-Python structured QR sweep (fallback for the compiled ``_kernel``).

Both implementations share one signature::

    sweep(band, z, w, f, g, sinv, lo, hi, shift, rk, rg, rs)
        -> (nrefl, phase, lower_gap, upper_gap, finite)

During a sweep the active window is copied into a widened band ``wb``
(offsets ``WLO..WHI``) that absorbs the transient bulges.  Entries right of
the widened band are read from the generators; entries left of it are zero.
"""

from __future__ import annotations

import math

import numpy as np

WLO = -5
WHI = 9
WWIDTH = WHI - WLO + 1
BLO = -2


def _formula_rows(n):
    return max(0, 2 * ((n + 1) // 2) - 4)


def _upper(i, n, nf):
    if i < nf:
        return 2 * ((i + 2) // 2) + 1
    return n - 1


def _lower(i):
    return max(0, i - 1 if i % 2 == 0 else i - 2)


TINY = 1e-280
HUGE = 1e280
RESCALE = 2.0**600


def _rescale(r):
    # exact power-of-two factor that brings subnormal or huge magnitudes to the normal range
    if r < TINY:
        return RESCALE
    if r > HUGE:
        return 1.0 / RESCALE
    return 1.0


def reflector(x, y):
    """``(gamma, s, r)`` with ``[[g, s], [conj(s), -conj(g)]] @ (x, y) = (r, 0)``."""
    r = abs(complex(abs(x), abs(y)))  # libm hypot, as in the compiled kernel
    if r == 0.0:
        return 1.0 + 0j, 0j, 0.0
    t = _rescale(r)
    if t != 1.0:
        x = complex(x.real * t, x.imag * t)
        y = complex(y.real * t, y.imag * t)
        r = abs(complex(abs(x), abs(y)))
    # componentwise division: numpy's complex/float rounds differently
    return complex(x.real / r, -x.imag / r), complex(y.real / r, -y.imag / r), r


def sweep(band, z, w, f, g, sinv, lo, hi, shift, rk, rg, rs):
    n = band.shape[0]
    nf = _formula_rows(n)
    m = hi - lo
    shift = complex(shift)
    sinv = complex(sinv)
    wb = np.zeros((n, WWIDTH), dtype=complex)

    def formula(i, j):
        return -sinv * f[i] * g[j].conjugate() - z[i] * w[j].conjugate()

    for i in range(lo, hi):
        lc, uc = _lower(i), _upper(i, n, nf)
        for off in range(WLO, WHI + 1):
            j = i + off
            if j < lo or j >= hi:
                continue
            if lc <= j <= uc:
                wb[i, off - WLO] = band[i, j - i - BLO]
            elif j > i:
                wb[i, off - WLO] = formula(i, j)

    def get(i, j):
        off = j - i
        if off < WLO:
            return 0j
        if off > WHI:
            return formula(i, j)
        return wb[i, off - WLO]

    def put(i, j, v):
        off = j - i
        if WLO <= off <= WHI:
            wb[i, off - WLO] = v

    count = [0]

    def apply(k, gam, s):
        cg = gam.conjugate()
        cs = s.conjugate()
        for j in range(max(lo, k + WLO), min(hi, k + 2 + WHI)):
            a = get(k, j)
            b = get(k + 1, j)
            put(k, j, gam * a + s * b)
            put(k + 1, j, cs * a - cg * b)
        for v in (z, f):
            a, b = v[k], v[k + 1]
            v[k] = gam * a + s * b
            v[k + 1] = cs * a - cg * b
        for i in range(max(lo, k - WHI), min(hi, k + 2 - WLO)):
            a = get(i, k)
            b = get(i, k + 1)
            put(i, k, a * cg + b * cs)
            put(i, k + 1, a * s - b * gam)
        for v in (g, w):
            a, b = v[k], v[k + 1]
            v[k] = gam * a + s * b
            v[k + 1] = cs * a - cg * b
        c = count[0]
        rk[c] = k
        rg[c] = gam
        rs[c] = s
        count[0] = c + 1

    def rot(gam, s, a, b):
        return gam * a + s * b, s.conjugate() * a - gam.conjugate() * b

    def explicit_col(k, rows, qrow):
        # column k of Q_t^H (A - shift I), from the last row of the previous factor
        out = []
        for a in range(rows):
            acc = 0j
            for c in range(3):
                col = k - 2 + c
                if col < lo or qrow[c] == 0:
                    continue
                v = get(k + a, col)
                if k + a == col:
                    v -= shift
                acc += v * qrow[c].conjugate()
            out.append(acc)
        return out

    # leading reflector from the shifted first column
    gam, s, _ = reflector(wb[lo, -WLO] - shift, wb[lo + 1, -1 - WLO])
    apply(lo, gam, s)
    qrow = (0j, s.conjugate(), -gam)
    r_last = 0j

    ntriples_end = m - 2 if m % 2 == 0 else m - 3
    for l in range(1, ntriples_end, 2):
        k = lo + l
        x = explicit_col(k, 3, qrow)
        blk = [[x[a]] + [get(k + a, k + b) for b in (1, 2)] for a in range(3)]
        blk[1][1] -= shift
        blk[2][2] -= shift
        g1, s1, _ = reflector(blk[1][0], blk[2][0])
        for b in range(3):
            blk[1][b], blk[2][b] = rot(g1, s1, blk[1][b], blk[2][b])
        g2, s2, _ = reflector(blk[0][0], blk[1][0])
        for b in range(3):
            blk[0][b], blk[1][b] = rot(g2, s2, blk[0][b], blk[1][b])
        g3, s3, _ = reflector(blk[1][1], blk[2][1])
        for b in range(1, 3):
            blk[1][b], blk[2][b] = rot(g3, s3, blk[1][b], blk[2][b])
        r_last = blk[2][2]
        apply(k + 1, g1, s1)
        apply(k, g2, s2)
        apply(k + 1, g3, s3)
        cs1 = s1.conjugate()
        qrow = (
            cs1 * s2.conjugate(),
            -cs1 * g2 * g3.conjugate() - g1 * s3.conjugate(),
            -cs1 * g2 * s3 + g1 * g3,
        )

    if m % 2 == 1:
        k = hi - 2
        x = explicit_col(k, 2, qrow)
        gam, s, _ = reflector(x[0], x[1])
        _, r_last = rot(gam, s, get(k, k + 1), get(k + 1, k + 1) - shift)
        apply(k, gam, s)

    # diagonal phase so that the last diagonal entry of R is real nonnegative
    ar = abs(r_last)
    phase = 1.0 + 0j
    if ar > 0.0:
        t = _rescale(ar)
        r_last = complex(r_last.real * t, r_last.imag * t)
        ar = abs(r_last)
        phase = complex(r_last.real / ar, r_last.imag / ar)
    if phase != 1.0:
        t = hi - 1
        cph = phase.conjugate()
        for off in range(WLO, WHI + 1):
            j = t + off
            if lo <= j < hi:
                wb[t, off - WLO] *= cph
            i = t - off
            if lo <= i < hi:
                wb[i, off - WLO] *= phase
        for v in (z, w, f, g):
            v[t] *= cph

    lower_gap = 0.0
    upper_gap = 0.0
    finite = True
    for i in range(lo, hi):
        lc, uc = _lower(i), _upper(i, n, nf)
        for off in range(WLO, WHI + 1):
            j = i + off
            if j < lo or j >= hi:
                continue
            v = wb[i, off - WLO]
            if lc <= j <= uc:
                band[i, j - i - BLO] = v
                if not (math.isfinite(v.real) and math.isfinite(v.imag)):
                    finite = False
            elif j < i:
                lower_gap = max(lower_gap, abs(v))
            else:
                upper_gap = max(upper_gap, abs(v - formula(i, j)))
    return count[0], phase, lower_gap, upper_gap, finite
