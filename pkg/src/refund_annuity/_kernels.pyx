# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled discounted survival moments.

Mirror of ``_kernels_py.survival_moments``: same horizon search, same initial
panels, same refinement order. Only the arithmetic runs in C.
"""
from libc.math cimport exp, expm1, log, fabs, ceil, isfinite
from libc.stdlib cimport malloc, free

cdef enum:
    NPAN = 8

cdef double XGK[8]
cdef double WGK[8]
cdef double WG[4]

XGK[:] = [0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
          0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
          0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
          0.207784955007898467600689403773245, 0.0]
WGK[:] = [0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
          0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
          0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
          0.204432940075298892414161999234649, 0.209482141084727828012999174891714]
WG[:] = [0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
         0.381830050505118944950369775488975, 0.417959183673469387755102040816327]

cdef enum:
    OK = 0
    NOT_CONVERGED = 1
    NO_HORIZON = 2
    NOT_FINITE = 3

cdef double HORIZON_CAP = 1.0e6


cdef struct Env:
    int code
    double r
    double z       # Gompertz: exp((x - m) / b)
    double b
    double lam
    bint weighted
    double shift   # additive log-hazard term when hazard weighting is on


cdef inline double log_env(const Env* e, double t) nogil:
    # same operation order as the Python backend, for bit-identical sums
    if e.code == 0:
        if e.weighted:
            return -e.r * t - e.z * expm1(t / e.b) + e.shift + t / e.b
        return -e.r * t - e.z * expm1(t / e.b)
    if e.weighted:
        return -(e.r + e.lam) * t + e.shift
    return -(e.r + e.lam) * t


cdef double horizon(const Env* e, double lo, double log_floor) nogil:
    cdef double step = 1.0, prev = lo, t, a, b, mid
    cdef int i
    if log_env(e, lo) < log_floor:
        return lo
    while True:
        t = lo + step
        if log_env(e, t) < log_floor:
            break
        if step > HORIZON_CAP:
            return -1.0
        prev = t
        step *= 2.0
    a = prev
    b = t
    for i in range(60):
        mid = 0.5 * (a + b)
        if log_env(e, mid) < log_floor:
            b = mid
        else:
            a = mid
        if b - a <= 1e-9 * (fabs(b) if fabs(b) > 1.0 else 1.0):
            break
    return b


cdef void panel(const Env* e, double a, double b, double* out) nogil:
    # out: a, b, k0, k1, k2, err0, err1, err2
    cdef double center = 0.5 * (a + b)
    cdef double half = 0.5 * (b - a)
    cdef double w = exp(log_env(e, center))
    cdef double k0 = WGK[7] * w
    cdef double k1 = k0 * center
    cdef double k2 = k1 * center
    cdef double g0 = WG[3] * w
    cdef double g1 = g0 * center
    cdef double g2 = g1 * center
    cdef double dx, tl, tr, wl, wr, s0, s1, s2, wk, wg
    cdef int j
    for j in range(7):
        dx = half * XGK[j]
        tl = center - dx
        tr = center + dx
        wl = exp(log_env(e, tl))
        wr = exp(log_env(e, tr))
        s0 = wl + wr
        s1 = wl * tl + wr * tr
        s2 = wl * tl * tl + wr * tr * tr
        wk = WGK[j]
        k0 += wk * s0
        k1 += wk * s1
        k2 += wk * s2
        if j % 2 == 1:
            wg = WG[j // 2]
            g0 += wg * s0
            g1 += wg * s1
            g2 += wg * s2
    k0 *= half
    k1 *= half
    k2 *= half
    out[0] = a
    out[1] = b
    out[2] = k0
    out[3] = k1
    out[4] = k2
    out[5] = fabs(k0 - g0 * half)
    out[6] = fabs(k1 - g1 * half)
    out[7] = fabs(k2 - g2 * half)


def survival_moments(int code, double p1, double p2, double x, double r,
                     double lo, double hi, bint hazard_weight,
                     double rtol, double atol, double floor, int max_sub):
    """Moments ``int t**k exp(-r t) tpx [hazard(x+t)] dt`` for k = 0, 1, 2.

    Returns ``(m0, m1, m2, status, horizon)``; see ``_kernels_py``.
    """
    cdef Env e
    e.code = code
    e.r = r
    e.shift = 0.0
    e.weighted = hazard_weight
    if code == 0:
        e.b = p2
        e.z = exp((x - p1) / p2)
        e.lam = 0.0
        if hazard_weight:
            e.shift = (x - p1) / p2 - log(p2)
    else:
        e.lam = p1
        e.b = 1.0
        e.z = 0.0
        if hazard_weight:
            e.shift = log(p1)

    cdef double hor = horizon(&e, lo, log(floor))
    if hor < 0:
        return 0.0, 0.0, 0.0, NO_HORIZON, hor
    cdef double top = hi if hi < hor else hor
    if top <= lo:
        return 0.0, 0.0, 0.0, OK, hor

    cdef int n0 = <int>ceil((top - lo) / 8.0)
    if n0 > 64:
        n0 = 64
    if n0 > max_sub:
        n0 = max_sub
    if n0 < 1:
        n0 = 1
    cdef double* P = <double*>malloc(max_sub * NPAN * sizeof(double))
    if P == NULL:
        raise MemoryError()
    cdef int n = n0, i, worst, status
    cdef double width = (top - lo) / n0
    cdef double a, b, mid
    cdef double t0, t1, t2, e0, e1, e2, tol0, tol1, tol2, score, worst_score
    try:
        with nogil:
            for i in range(n0):
                a = lo + i * width
                b = top if i == n0 - 1 else lo + (i + 1) * width
                panel(&e, a, b, P + i * NPAN)
            while True:
                t0 = 0.0; t1 = 0.0; t2 = 0.0
                e0 = 0.0; e1 = 0.0; e2 = 0.0
                for i in range(n):
                    t0 += P[i * NPAN + 2]
                    t1 += P[i * NPAN + 3]
                    t2 += P[i * NPAN + 4]
                    e0 += P[i * NPAN + 5]
                    e1 += P[i * NPAN + 6]
                    e2 += P[i * NPAN + 7]
                if not (isfinite(t0) and isfinite(t1) and isfinite(t2)):
                    status = NOT_FINITE
                    break
                tol0 = max(atol, rtol * fabs(t0))
                tol1 = max(atol, rtol * fabs(t1))
                tol2 = max(atol, rtol * fabs(t2))
                if e0 <= tol0 and e1 <= tol1 and e2 <= tol2:
                    status = OK
                    break
                if n >= max_sub:
                    status = NOT_CONVERGED
                    break
                worst = 0
                worst_score = -1.0
                for i in range(n):
                    score = max(P[i * NPAN + 5] / tol0,
                                max(P[i * NPAN + 6] / tol1, P[i * NPAN + 7] / tol2))
                    if score > worst_score:
                        worst_score = score
                        worst = i
                a = P[worst * NPAN]
                b = P[worst * NPAN + 1]
                mid = 0.5 * (a + b)
                panel(&e, a, mid, P + worst * NPAN)
                panel(&e, mid, b, P + n * NPAN)
                n += 1
    finally:
        free(P)
    return t0, t1, t2, status, hor
