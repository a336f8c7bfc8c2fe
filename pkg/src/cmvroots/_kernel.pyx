# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled structured QR sweep; same contract as :mod:`cmvroots._kernel_py`."""

import numpy as np
cimport numpy as cnp
from libc.math cimport hypot, isfinite

cnp.import_array()

cdef extern from *:
    """
    #if defined(__SSE2__) || defined(_M_X64)
    #include <xmmintrin.h>
    /* flush-to-zero and denormals-are-zero: avoids the slow subnormal path */
    static unsigned int cmv_enter_ftz(void) {
        unsigned int old = _mm_getcsr();
        _mm_setcsr(old | 0x8040);
        return old;
    }
    static void cmv_leave_ftz(unsigned int old) { _mm_setcsr(old); }
    #else
    static unsigned int cmv_enter_ftz(void) { return 0; }
    static void cmv_leave_ftz(unsigned int old) { (void)old; }
    #endif
    """
    unsigned int cmv_enter_ftz() nogil
    void cmv_leave_ftz(unsigned int old) nogil

ctypedef double complex cplx

DEF WLO = -5
DEF WHI = 9
DEF WWIDTH = WHI - WLO + 1
DEF BLO = -2
DEF RING = 32          # scratch rows kept live; a step touches at most 17 consecutive rows
DEF MASK = RING - 1
DEF LEAD = 9           # rows loaded ahead of the current step
DEF LAG = WHI + 2      # rows kept behind it


cdef struct Ctx:
    Py_ssize_t n, nf, lo, hi
    Py_ssize_t loaded, flushed
    cplx sinv
    cplx shift
    cplx* wb
    cplx* band
    cplx* z
    cplx* w
    cplx* f
    cplx* g


cdef inline Py_ssize_t _upper(Py_ssize_t i, Py_ssize_t n, Py_ssize_t nf) noexcept nogil:
    if i < nf:
        return 2 * ((i + 2) // 2) + 1
    return n - 1


cdef inline Py_ssize_t _lower(Py_ssize_t i) noexcept nogil:
    cdef Py_ssize_t v = i - 1 if i % 2 == 0 else i - 2
    return v if v > 0 else 0


cdef inline cplx _conj(cplx x) noexcept nogil:
    return x.conjugate()


cdef inline cplx _divr(cplx x, double r) noexcept nogil:
    # componentwise, matching CPython's complex / float
    return x.real / r + 1j * (x.imag / r)


cdef inline double _abs(cplx x) noexcept nogil:
    return hypot(x.real, x.imag)


DEF TINY = 1e-280
DEF HUGE = 1e280
DEF RESCALE = 4.149515568880993e+180  # 2**600


cdef inline double _rescale(double r) noexcept nogil:
    # exact power-of-two factor that brings subnormal or huge magnitudes to the normal range
    if r < TINY:
        return RESCALE
    if r > HUGE:
        return 1.0 / RESCALE
    return 1.0


cdef inline cplx _scale(cplx x, double t) noexcept nogil:
    return x.real * t + 1j * (x.imag * t)


cdef inline void _reflector(cplx x, cplx y, cplx* gam, cplx* s) noexcept nogil:
    cdef double r = hypot(_abs(x), _abs(y))
    cdef double t
    if r == 0.0:
        gam[0] = 1.0
        s[0] = 0.0
    else:
        t = _rescale(r)
        if t != 1.0:
            x = _scale(x, t)
            y = _scale(y, t)
            r = hypot(_abs(x), _abs(y))
        gam[0] = _divr(_conj(x), r)
        s[0] = _divr(_conj(y), r)


cdef inline cplx _formula(Ctx* c, Py_ssize_t i, Py_ssize_t j) noexcept nogil:
    return -c.sinv * c.f[i] * _conj(c.g[j]) - c.z[i] * _conj(c.w[j])


cdef inline cplx _get(Ctx* c, Py_ssize_t i, Py_ssize_t j) noexcept nogil:
    cdef Py_ssize_t off = j - i
    if off < WLO:
        return 0.0
    if off > WHI:
        return _formula(c, i, j)
    return c.wb[(i & MASK) * WWIDTH + off - WLO]


cdef inline void _put(Ctx* c, Py_ssize_t i, Py_ssize_t j, cplx v) noexcept nogil:
    cdef Py_ssize_t off = j - i
    if WLO <= off <= WHI:
        c.wb[(i & MASK) * WWIDTH + off - WLO] = v


cdef void _load_row(Ctx* c, Py_ssize_t i) noexcept nogil:
    cdef Py_ssize_t lc = _lower(i), uc = _upper(i, c.n, c.nf), off, j
    cdef cplx* row = c.wb + (i & MASK) * WWIDTH
    for off in range(WLO, WHI + 1):
        j = i + off
        if j < c.lo or j >= c.hi:
            row[off - WLO] = 0.0
        elif lc <= j <= uc:
            row[off - WLO] = c.band[i * 6 + j - i - BLO]
        elif j > i:
            row[off - WLO] = _formula(c, i, j)
        else:
            row[off - WLO] = 0.0


cdef void _flush_row(Ctx* c, Py_ssize_t i, double* lower_gap, double* upper_gap, bint* finite) noexcept nogil:
    cdef Py_ssize_t lc = _lower(i), uc = _upper(i, c.n, c.nf), off, j
    cdef cplx* row = c.wb + (i & MASK) * WWIDTH
    cdef cplx v
    cdef double d
    for off in range(WLO, WHI + 1):
        j = i + off
        if j < c.lo or j >= c.hi:
            continue
        v = row[off - WLO]
        if lc <= j <= uc:
            c.band[i * 6 + j - i - BLO] = v
            if not (isfinite(v.real) and isfinite(v.imag)):
                finite[0] = False
        elif j < i:
            d = _abs(v)
            if d > lower_gap[0] or d != d:
                lower_gap[0] = d
        else:
            d = _abs(v - _formula(c, i, j))
            if d > upper_gap[0] or d != d:
                upper_gap[0] = d


cdef inline void _advance(Ctx* c, Py_ssize_t k, double* lg, double* ug, bint* fin) noexcept nogil:
    # rows below k - LAG are final; rows up to k + LEAD must be present
    while c.flushed < c.loaded and c.flushed < k - LAG:
        _flush_row(c, c.flushed, lg, ug, fin)
        c.flushed += 1
    while c.loaded < c.hi and c.loaded <= k + LEAD:
        _load_row(c, c.loaded)
        c.loaded += 1


cdef inline void _rot2(cplx* v, Py_ssize_t k, cplx gam, cplx s, cplx cg, cplx cs) noexcept nogil:
    cdef cplx a = v[k], b = v[k + 1]
    v[k] = gam * a + s * b
    v[k + 1] = cs * a - cg * b


cdef void _apply(Ctx* c, Py_ssize_t k, cplx gam, cplx s) noexcept nogil:
    cdef cplx cg = _conj(gam), cs = _conj(s), a, b
    cdef Py_ssize_t i, j
    cdef Py_ssize_t j0 = max(c.lo, k + WLO), j1 = min(c.hi, k + 2 + WHI)
    for j in range(j0, j1):
        a = _get(c, k, j)
        b = _get(c, k + 1, j)
        _put(c, k, j, gam * a + s * b)
        _put(c, k + 1, j, cs * a - cg * b)
    _rot2(c.z, k, gam, s, cg, cs)
    _rot2(c.f, k, gam, s, cg, cs)
    cdef Py_ssize_t i0 = max(c.lo, k - WHI), i1 = min(c.hi, k + 2 - WLO)
    for i in range(i0, i1):
        a = _get(c, i, k)
        b = _get(c, i, k + 1)
        _put(c, i, k, a * cg + b * cs)
        _put(c, i, k + 1, a * s - b * gam)
    _rot2(c.g, k, gam, s, cg, cs)
    _rot2(c.w, k, gam, s, cg, cs)


cdef inline void _rot(cplx gam, cplx s, cplx* a, cplx* b) noexcept nogil:
    cdef cplx x = a[0], y = b[0]
    a[0] = gam * x + s * y
    b[0] = _conj(s) * x - _conj(gam) * y


cdef void _explicit_col(Ctx* c, Py_ssize_t k, int rows, cplx* qrow, cplx* out) noexcept nogil:
    cdef int a, cc
    cdef Py_ssize_t col
    cdef cplx acc, v
    for a in range(rows):
        acc = 0.0
        for cc in range(3):
            col = k - 2 + cc
            if col < c.lo or qrow[cc] == 0:
                continue
            v = _get(c, k + a, col)
            if k + a == col:
                v = v - c.shift
            acc = acc + v * _conj(qrow[cc])
        out[a] = acc


def sweep(cplx[:, ::1] band, cplx[::1] z, cplx[::1] w, cplx[::1] f, cplx[::1] g,
          cplx sinv, Py_ssize_t lo, Py_ssize_t hi, cplx shift,
          cnp.intp_t[::1] rk, cplx[::1] rg, cplx[::1] rs):
    cdef Ctx c
    c.n = band.shape[0]
    c.nf = max(0, 2 * ((c.n + 1) // 2) - 4)
    c.lo = lo
    c.hi = hi
    c.loaded = lo
    c.flushed = lo
    c.sinv = sinv
    c.shift = shift
    cdef Py_ssize_t m = hi - lo
    if m < 3:
        raise ValueError("active window must have at least 3 rows")
    if rk.shape[0] < 3 * m // 2 + 2:
        raise ValueError("reflector buffers too small")
    if band.shape[1] != 6:
        raise ValueError("band must have 6 columns")
    cdef cplx ring[RING * WWIDTH]
    c.wb = ring
    c.band = &band[0, 0]
    c.z = &z[0]
    c.w = &w[0]
    c.f = &f[0]
    c.g = &g[0]
    cdef Py_ssize_t i, j, off, k, l, t, ntriples_end
    cdef Py_ssize_t count = 0
    cdef cplx gam, s, g1, s1, g2, s2, g3, s3, cs1, r_last, phase, cph, tmp
    cdef cplx qrow[3]
    cdef cplx x[3]
    cdef cplx blk[3][3]
    cdef int a, b
    cdef double ar, lower_gap = 0.0, upper_gap = 0.0
    cdef bint finite = True
    cdef unsigned int csr

    with nogil:
        csr = cmv_enter_ftz()
        _advance(&c, lo, &lower_gap, &upper_gap, &finite)

        # leading reflector from the shifted first column
        _reflector(_get(&c, lo, lo) - shift, _get(&c, lo + 1, lo), &gam, &s)
        _apply(&c, lo, gam, s)
        rk[count] = lo; rg[count] = gam; rs[count] = s; count += 1
        qrow[0] = 0.0
        qrow[1] = _conj(s)
        qrow[2] = -gam
        r_last = 0.0

        ntriples_end = m - 2 if m % 2 == 0 else m - 3
        l = 1
        while l < ntriples_end:
            k = lo + l
            _advance(&c, k, &lower_gap, &upper_gap, &finite)
            _explicit_col(&c, k, 3, qrow, x)
            for a in range(3):
                blk[a][0] = x[a]
                for b in range(1, 3):
                    blk[a][b] = _get(&c, k + a, k + b)
            blk[1][1] = blk[1][1] - shift
            blk[2][2] = blk[2][2] - shift
            _reflector(blk[1][0], blk[2][0], &g1, &s1)
            for b in range(3):
                _rot(g1, s1, &blk[1][b], &blk[2][b])
            _reflector(blk[0][0], blk[1][0], &g2, &s2)
            for b in range(3):
                _rot(g2, s2, &blk[0][b], &blk[1][b])
            _reflector(blk[1][1], blk[2][1], &g3, &s3)
            for b in range(1, 3):
                _rot(g3, s3, &blk[1][b], &blk[2][b])
            r_last = blk[2][2]
            _apply(&c, k + 1, g1, s1)
            rk[count] = k + 1; rg[count] = g1; rs[count] = s1; count += 1
            _apply(&c, k, g2, s2)
            rk[count] = k; rg[count] = g2; rs[count] = s2; count += 1
            _apply(&c, k + 1, g3, s3)
            rk[count] = k + 1; rg[count] = g3; rs[count] = s3; count += 1
            cs1 = _conj(s1)
            qrow[0] = cs1 * _conj(s2)
            qrow[1] = -cs1 * g2 * _conj(g3) - g1 * _conj(s3)
            qrow[2] = -cs1 * g2 * s3 + g1 * g3
            l += 2

        if m % 2 == 1:
            k = hi - 2
            _advance(&c, k, &lower_gap, &upper_gap, &finite)
            _explicit_col(&c, k, 2, qrow, x)
            _reflector(x[0], x[1], &gam, &s)
            tmp = _get(&c, k, k + 1)
            r_last = _get(&c, k + 1, k + 1) - shift
            _rot(gam, s, &tmp, &r_last)
            _apply(&c, k, gam, s)
            rk[count] = k; rg[count] = gam; rs[count] = s; count += 1

        # diagonal phase so that the last diagonal entry of R is real nonnegative
        ar = _abs(r_last)
        phase = 1.0
        if ar > 0.0:
            r_last = _scale(r_last, _rescale(ar))
            ar = _abs(r_last)
            phase = _divr(r_last, ar)
        if phase != 1.0:
            t = hi - 1
            cph = _conj(phase)
            for off in range(WLO, WHI + 1):
                j = t + off
                if lo <= j < hi:
                    ring[(t & MASK) * WWIDTH + off - WLO] = ring[(t & MASK) * WWIDTH + off - WLO] * cph
                i = t - off
                if lo <= i < hi:
                    ring[(i & MASK) * WWIDTH + off - WLO] = ring[(i & MASK) * WWIDTH + off - WLO] * phase
            z[t] = z[t] * cph
            w[t] = w[t] * cph
            f[t] = f[t] * cph
            g[t] = g[t] * cph

        while c.flushed < hi:
            _flush_row(&c, c.flushed, &lower_gap, &upper_gap, &finite)
            c.flushed += 1
        cmv_leave_ftz(csr)
    return count, complex(phase), lower_gap, upper_gap, bool(finite)
