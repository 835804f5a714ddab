"""Pure-Python discounted survival moments.

Reference implementation of the kernel in ``_kernels.pyx``; both must stay
algorithmically identical (same panels, same refinement order) so that the
two backends agree to rounding.
"""
import math

from .quadrature import G7_WEIGHTS, GK_NODES, K15_WEIGHTS

OK = 0
NOT_CONVERGED = 1
NO_HORIZON = 2
NOT_FINITE = 3

_HORIZON_CAP = 1.0e6


def _log_envelope_fn(code, p1, p2, x, r, hazard_weight):
    if code == 0:
        m, b = p1, p2
        z = math.exp((x - m) / b)
        if hazard_weight:
            shift = (x - m) / b - math.log(b)
            return lambda t: -r * t - z * math.expm1(t / b) + shift + t / b
        return lambda t: -r * t - z * math.expm1(t / b)
    lam = p1
    if hazard_weight:
        log_lam = math.log(lam)
        return lambda t: -(r + lam) * t + log_lam
    return lambda t: -(r + lam) * t


def _horizon(log_env, lo, log_floor):
    if log_env(lo) < log_floor:
        return lo
    step = 1.0
    prev = lo
    while True:
        t = lo + step
        if log_env(t) < log_floor:
            break
        if step > _HORIZON_CAP:
            return -1.0
        prev = t
        step *= 2.0
    a, b = prev, t
    for _ in range(60):
        mid = 0.5 * (a + b)
        if log_env(mid) < log_floor:
            b = mid
        else:
            a = mid
        if b - a <= 1e-9 * max(1.0, abs(b)):
            break
    return b


def _panel(log_env, a, b):
    center = 0.5 * (a + b)
    half = 0.5 * (b - a)
    exp = math.exp
    w = exp(log_env(center))
    k0 = K15_WEIGHTS[7] * w
    k1 = k0 * center
    k2 = k1 * center
    g0 = G7_WEIGHTS[3] * w
    g1 = g0 * center
    g2 = g1 * center
    for j in range(7):
        dx = half * GK_NODES[j]
        tl = center - dx
        tr = center + dx
        wl = exp(log_env(tl))
        wr = exp(log_env(tr))
        s0 = wl + wr
        s1 = wl * tl + wr * tr
        s2 = wl * tl * tl + wr * tr * tr
        wk = K15_WEIGHTS[j]
        k0 += wk * s0
        k1 += wk * s1
        k2 += wk * s2
        if j % 2 == 1:
            wg = G7_WEIGHTS[j // 2]
            g0 += wg * s0
            g1 += wg * s1
            g2 += wg * s2
    k0 *= half
    k1 *= half
    k2 *= half
    return [a, b, k0, k1, k2,
            abs(k0 - g0 * half), abs(k1 - g1 * half), abs(k2 - g2 * half)]


def survival_moments(code, p1, p2, x, r, lo, hi, hazard_weight,
                     rtol, atol, floor, max_sub):
    """Moments ``int t**k exp(-r t) tpx [hazard(x+t)] dt`` for k = 0, 1, 2.

    Returns ``(m0, m1, m2, status, horizon)``. ``hi`` may be ``inf``; every
    range is clipped at the truncation horizon, the first ``t >= lo`` where
    the integrand envelope falls below ``floor``.
    """
    log_env = _log_envelope_fn(code, p1, p2, x, r, hazard_weight)
    horizon = _horizon(log_env, lo, math.log(floor))
    if horizon < 0:
        return 0.0, 0.0, 0.0, NO_HORIZON, horizon
    top = hi if hi < horizon else horizon
    if top <= lo:
        return 0.0, 0.0, 0.0, OK, horizon

    n0 = int(math.ceil((top - lo) / 8.0))
    n0 = max(1, min(n0, 64, max_sub))
    width = (top - lo) / n0
    panels = []
    for i in range(n0):
        a = lo + i * width
        b = top if i == n0 - 1 else lo + (i + 1) * width
        panels.append(_panel(log_env, a, b))

    while True:
        t0 = t1 = t2 = 0.0
        e0 = e1 = e2 = 0.0
        for p in panels:
            t0 += p[2]
            t1 += p[3]
            t2 += p[4]
            e0 += p[5]
            e1 += p[6]
            e2 += p[7]
        if not (math.isfinite(t0) and math.isfinite(t1) and math.isfinite(t2)):
            return t0, t1, t2, NOT_FINITE, horizon
        tol0 = max(atol, rtol * abs(t0))
        tol1 = max(atol, rtol * abs(t1))
        tol2 = max(atol, rtol * abs(t2))
        if e0 <= tol0 and e1 <= tol1 and e2 <= tol2:
            return t0, t1, t2, OK, horizon
        if len(panels) >= max_sub:
            return t0, t1, t2, NOT_CONVERGED, horizon
        worst = 0
        worst_score = -1.0
        for i, p in enumerate(panels):
            score = max(p[5] / tol0, p[6] / tol1, p[7] / tol2)
            if score > worst_score:
                worst_score = score
                worst = i
        a, b = panels[worst][0], panels[worst][1]
        mid = 0.5 * (a + b)
        panels[worst] = _panel(log_env, a, mid)
        panels.append(_panel(log_env, mid, b))
