"""Compiled stepping kernel.

Operation-for-operation twin of _kernels_py.py: same raw-draw order, same
expression trees, same libm calls, so trajectories match the fallback bit
for bit (the extension is built with -ffp-contract=off to keep it that way).
Keep the arithmetic in the two files in sync when editing.
"""

from libc.stdint cimport uint64_t
from libc.math cimport sqrt, log, cos, sin, pow, M_PI, INFINITY
from cpython.pycapsule cimport PyCapsule_GetPointer
from numpy.random cimport bitgen_t

import numpy as np

COMPILED = True

cdef double RAW2F = 1.0 / 9007199254740992.0  # 2**-53
cdef double TWO_PI = 2.0 * M_PI
cdef double MIN_COS = 1e-12


cdef struct BodyP:
    int kind
    int dim
    int mh
    double r
    double L
    double diameter
    double* center
    double* axes
    double* hs_n      # row-major mh x dim
    double* hs_b


cdef struct Scratch:
    double* g
    double* w
    double* y
    double* diff
    double* mnew
    double* pbuf
    double* dyk_y
    double* dyk_tmp
    double* dyk_incr  # row-major mh x dim


cdef inline double _u_open(uint64_t a):
    return <double>((a >> 11) + 1) * RAW2F


cdef inline double _u_half(uint64_t a):
    return <double>(a >> 11) * RAW2F


cdef void _draw_normals(bitgen_t* bg, long* consumed, double* g, int k):
    cdef int i = 0
    cdef uint64_t a, b
    cdef double radius, theta
    while i < k:
        a = bg.next_uint64(bg.state)
        b = bg.next_uint64(bg.state)
        consumed[0] += 2
        radius = sqrt(-2.0 * log(_u_open(a)))
        theta = TWO_PI * _u_half(b)
        g[i] = radius * cos(theta)
        i += 1
        if i < k:
            g[i] = radius * sin(theta)
            i += 1


cdef double _draw_direction(bitgen_t* bg, long* consumed, int law,
                            double* m, int dim, double* g, double* w):
    cdef int i
    cdef double d, tn2, ti, tnorm, u, s, c, nn, nrm, wi
    if law == 0:  # cosine
        while True:
            _draw_normals(bg, consumed, g, dim)
            d = 0.0
            for i in range(dim):
                d += g[i] * m[i]
            tn2 = 0.0
            for i in range(dim):
                ti = g[i] - d * m[i]
                w[i] = ti
                tn2 += ti * ti
            tnorm = sqrt(tn2)
            if tnorm < 1e-150:
                continue
            u = _u_open(bg.next_uint64(bg.state))
            consumed[0] += 1
            s = pow(u, 1.0 / (dim - 1))
            c = 1.0 - s * s
            if c < 0.0:
                c = 0.0
            c = sqrt(c)
            if c < MIN_COS:
                continue
            for i in range(dim):
                w[i] = s * (w[i] / tnorm) + c * m[i]
            return c
    else:  # uniform hemisphere
        while True:
            _draw_normals(bg, consumed, g, dim)
            nn = 0.0
            for i in range(dim):
                nn += g[i] * g[i]
            nrm = sqrt(nn)
            if nrm < 1e-150:
                continue
            c = 0.0
            for i in range(dim):
                wi = g[i] / nrm
                w[i] = wi
                c += wi * m[i]
            if c < 0.0:
                for i in range(dim):
                    w[i] = -w[i]
                c = -c
            if c < MIN_COS:
                continue
            return c


cdef double _dist_polytope(BodyP* B, Scratch* S, double* p):
    cdef int i, j, dim = B.dim, mh = B.mh
    cdef double maxviol, v, vj, viol, newy, d, moved, s
    cdef double* row
    cdef double* pinc
    maxviol = -INFINITY
    for i in range(mh):
        v = -B.hs_b[i]
        row = B.hs_n + i * dim
        for j in range(dim):
            v += row[j] * p[j]
        if v > maxviol:
            maxviol = v
    if maxviol <= 0.0:
        for j in range(dim):
            S.dyk_y[j] = p[j]
        return 0.0
    for j in range(dim):
        S.dyk_y[j] = p[j]
    for i in range(mh):
        for j in range(dim):
            S.dyk_incr[i * dim + j] = 0.0
    for _cycle in range(2000):
        moved = 0.0
        for i in range(mh):
            row = B.hs_n + i * dim
            pinc = S.dyk_incr + i * dim
            viol = -B.hs_b[i]
            for j in range(dim):
                vj = S.dyk_y[j] + pinc[j]
                S.dyk_tmp[j] = vj
                viol += row[j] * vj
            if viol > 0.0:
                for j in range(dim):
                    newy = S.dyk_tmp[j] - viol * row[j]
                    pinc[j] = S.dyk_tmp[j] - newy
                    d = newy - S.dyk_y[j]
                    if d < 0.0:
                        d = -d
                    if d > moved:
                        moved = d
                    S.dyk_y[j] = newy
            else:
                for j in range(dim):
                    pinc[j] = 0.0
                    d = S.dyk_tmp[j] - S.dyk_y[j]
                    if d < 0.0:
                        d = -d
                    if d > moved:
                        moved = d
                    S.dyk_y[j] = S.dyk_tmp[j]
        if moved < 1e-14:
            break
    s = 0.0
    for j in range(dim):
        d = p[j] - S.dyk_y[j]
        s += d * d
    return sqrt(s)


cdef double _level(BodyP* B, Scratch* S, double* p):
    cdef int i, dim = B.dim
    cdef double s, d, f, d0
    if B.kind == 0:
        s = 0.0
        for i in range(dim):
            d = p[i] - B.center[i]
            s += d * d
        return sqrt(s) - B.r
    if B.kind == 1:
        s = 0.0
        for i in range(dim):
            d = p[i] / B.axes[i]
            s += d * d
        return sqrt(s) - 1.0
    if B.kind == 2:
        f = p[0]
        if f > B.L:
            f = B.L
        elif f < -B.L:
            f = -B.L
        d0 = p[0] - f
        s = d0 * d0
        for i in range(1, dim):
            s += p[i] * p[i]
        return sqrt(s) - B.r
    return _dist_polytope(B, S, p) - B.r


cdef double _ray_exit(BodyP* B, Scratch* S, double* x, double* w) except -1.0:
    cdef int i, dim = B.dim
    cdef int hit
    cdef double b, q, xc, disc, A, Bq, C, wa, xa
    cdef double lo, hi, glo, ghi, mid, gm, cand
    if B.kind == 0:
        b = 0.0
        q = 0.0
        for i in range(dim):
            xc = x[i] - B.center[i]
            b += xc * w[i]
            q += xc * xc
        q -= B.r * B.r
        disc = b * b - q
        if disc < 0.0:
            disc = 0.0
        return -b + sqrt(disc)
    if B.kind == 1:
        A = 0.0
        Bq = 0.0
        C = 0.0
        for i in range(dim):
            wa = w[i] / B.axes[i]
            xa = x[i] / B.axes[i]
            A += wa * wa
            Bq += xa * wa
            C += xa * xa
        C -= 1.0
        disc = Bq * Bq - A * C
        if disc < 0.0:
            disc = 0.0
        return (-Bq + sqrt(disc)) / A
    lo = 1e-12 * B.diameter
    hi = B.diameter + B.r
    for i in range(dim):
        S.pbuf[i] = x[i] + hi * w[i]
    ghi = _level(B, S, S.pbuf)
    if ghi <= 0.0:
        raise RuntimeError("ray exit not bracketed; inconsistent body oracle")
    # grow the lower bracket past the region where the level rounds to ~0;
    # a grazing ray whose level turns positive without going negative exits
    # at the last machine-boundary point
    cand = -1.0
    hit = 0
    for _ in range(130):
        for i in range(dim):
            S.pbuf[i] = x[i] + lo * w[i]
        glo = _level(B, S, S.pbuf)
        if glo < 0.0:
            hit = 1
            break
        if glo <= 1e-12:
            cand = lo
        else:
            if cand >= 0.0:
                return cand
            raise RuntimeError("ray does not enter the interior; cannot bracket exit")
        lo = lo * 4.0
        if lo >= hi:
            if cand >= 0.0:
                return cand
            raise RuntimeError("ray does not enter the interior; cannot bracket exit")
    if hit == 0:
        raise RuntimeError("ray does not enter the interior; cannot bracket exit")
    mid = 0.5 * (lo + hi)
    gm = 0.0
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        for i in range(dim):
            S.pbuf[i] = x[i] + mid * w[i]
        gm = _level(B, S, S.pbuf)
        if gm < 0.0:
            if -gm < 1e-12:
                return mid
            lo = mid
        else:
            if gm < 1e-12:
                return mid
            hi = mid
    if gm < 0.0:
        gm = -gm
    if gm > 1e-9:
        raise RuntimeError("ray-exit bisection did not converge")
    return mid


cdef void _project(BodyP* B, Scratch* S, double* y, double* diff):
    cdef int i, dim = B.dim
    cdef double s, d, dn, q, f, d0
    if B.kind == 0:
        s = 0.0
        for i in range(dim):
            d = y[i] - B.center[i]
            diff[i] = d
            s += d * d
        dn = sqrt(s)
        for i in range(dim):
            y[i] = B.center[i] + B.r * (diff[i] / dn)
    elif B.kind == 1:
        s = 0.0
        for i in range(dim):
            d = y[i] / B.axes[i]
            s += d * d
        q = sqrt(s)
        for i in range(dim):
            y[i] = y[i] / q
    elif B.kind == 2:
        f = y[0]
        if f > B.L:
            f = B.L
        elif f < -B.L:
            f = -B.L
        d0 = y[0] - f
        s = d0 * d0
        for i in range(1, dim):
            s += y[i] * y[i]
        dn = sqrt(s)
        y[0] = f + B.r * (d0 / dn)
        for i in range(1, dim):
            y[i] = B.r * (y[i] / dn)
    else:
        dn = _dist_polytope(B, S, y)
        for i in range(dim):
            diff[i] = y[i] - S.dyk_y[i]
        for i in range(dim):
            y[i] = S.dyk_y[i] + B.r * (diff[i] / dn)


cdef void _normal(BodyP* B, Scratch* S, double* y, double* mout):
    cdef int i, dim = B.dim
    cdef double s, d, dn, v, f, d0
    if B.kind == 0:
        s = 0.0
        for i in range(dim):
            d = B.center[i] - y[i]
            mout[i] = d
            s += d * d
        dn = sqrt(s)
        for i in range(dim):
            mout[i] = mout[i] / dn
    elif B.kind == 1:
        s = 0.0
        for i in range(dim):
            v = -(y[i] / (B.axes[i] * B.axes[i]))
            mout[i] = v
            s += v * v
        dn = sqrt(s)
        for i in range(dim):
            mout[i] = mout[i] / dn
    elif B.kind == 2:
        f = y[0]
        if f > B.L:
            f = B.L
        elif f < -B.L:
            f = -B.L
        d0 = f - y[0]
        s = d0 * d0
        mout[0] = d0
        for i in range(1, dim):
            v = -y[i]
            mout[i] = v
            s += v * v
        dn = sqrt(s)
        for i in range(dim):
            mout[i] = mout[i] / dn
    else:
        _dist_polytope(B, S, y)
        s = 0.0
        for i in range(dim):
            v = S.dyk_y[i] - y[i]
            mout[i] = v
            s += v * v
        dn = sqrt(s)
        for i in range(dim):
            mout[i] = mout[i] / dn


cdef int _step(BodyP* B, Scratch* S, bitgen_t* bg, long* consumed, int law,
               double* x, double* m,
               double* chord, double* cos_out, double* cos_in) except -1:
    cdef int i, dim = B.dim
    cdef double t, c2, d, co, ci
    _draw_direction(bg, consumed, law, m, dim, S.g, S.w)
    t = _ray_exit(B, S, x, S.w)
    for i in range(dim):
        S.y[i] = x[i] + t * S.w[i]
    _project(B, S, S.y, S.diff)
    c2 = 0.0
    for i in range(dim):
        d = S.y[i] - x[i]
        S.diff[i] = d
        c2 += d * d
    chord[0] = sqrt(c2)
    co = 0.0
    for i in range(dim):
        co += m[i] * S.diff[i]
    cos_out[0] = co / chord[0]
    _normal(B, S, S.y, S.mnew)
    ci = 0.0
    for i in range(dim):
        ci += S.mnew[i] * (-S.diff[i])
    cos_in[0] = ci / chord[0]
    for i in range(dim):
        x[i] = S.y[i]
        m[i] = S.mnew[i]
    return 0


cdef bitgen_t* _bg_ptr(object bitgen):
    return <bitgen_t*> PyCapsule_GetPointer(bitgen.capsule, "BitGenerator")


cdef class _Workspace:
    cdef double[::1] g, w, y, diff, mnew, pbuf, dyk_y, dyk_tmp, dyk_incr
    cdef Scratch S

    def __init__(self, int dim, int mh):
        self.g = np.empty(dim)
        self.w = np.empty(dim)
        self.y = np.empty(dim)
        self.diff = np.empty(dim)
        self.mnew = np.empty(dim)
        self.pbuf = np.empty(dim)
        self.dyk_y = np.empty(dim)
        self.dyk_tmp = np.empty(dim)
        self.dyk_incr = np.empty(max(mh, 1) * dim)
        self.S.g = &self.g[0]
        self.S.w = &self.w[0]
        self.S.y = &self.y[0]
        self.S.diff = &self.diff[0]
        self.S.mnew = &self.mnew[0]
        self.S.pbuf = &self.pbuf[0]
        self.S.dyk_y = &self.dyk_y[0]
        self.S.dyk_tmp = &self.dyk_tmp[0]
        self.S.dyk_incr = &self.dyk_incr[0]


cdef int _fill_body(BodyP* B, int kind, int dim, double r, double L, double diameter,
                    double[::1] center, double[::1] axes,
                    double[:, ::1] hs_n, double[::1] hs_b) except -1:
    B.kind = kind
    B.dim = dim
    B.mh = hs_n.shape[0]
    B.r = r
    B.L = L
    B.diameter = diameter
    B.center = &center[0] if center.shape[0] > 0 else NULL
    B.axes = &axes[0] if axes.shape[0] > 0 else NULL
    B.hs_n = &hs_n[0, 0] if hs_n.shape[0] > 0 else NULL
    B.hs_b = &hs_b[0] if hs_b.shape[0] > 0 else NULL
    return 0


def run_chain(int kind, int dim, double r, double L, double diameter,
              double[::1] center, double[::1] axes,
              double[:, ::1] hs_n, double[::1] hs_b,
              double[::1] x_state, double[::1] m_state,
              long steps, long burn_in, long thin, int law, object bitgen,
              double[:, ::1] out_pos, double[::1] out_chord,
              double[::1] out_cos_out, double[::1] out_cos_in):
    """Compiled twin of _kernels_py.run_chain."""
    cdef BodyP B
    _fill_body(&B, kind, dim, r, L, diameter, center, axes, hs_n, hs_b)
    cdef _Workspace ws = _Workspace(dim, B.mh)
    cdef bitgen_t* bg = _bg_ptr(bitgen)
    cdef long consumed = 0
    cdef long rec = 0
    cdef long k
    cdef int i
    cdef double chord = 0.0, co = 0.0, ci = 0.0
    cdef double* x = &x_state[0]
    cdef double* m = &m_state[0]
    for k in range(1, steps + 1):
        _step(&B, &ws.S, bg, &consumed, law, x, m, &chord, &co, &ci)
        if k > burn_in and (k - burn_in - 1) % thin == 0:
            for i in range(dim):
                out_pos[rec, i] = x[i]
            out_chord[rec] = chord
            out_cos_out[rec] = co
            out_cos_in[rec] = ci
            rec += 1
    return consumed


def first_passage(int kind, int dim, double r, double L, double diameter,
                  double[::1] center, double[::1] axes,
                  double[:, ::1] hs_n, double[::1] hs_b,
                  double[::1] x_state, double[::1] m_state,
                  double level, long max_steps, int law, object bitgen):
    """Compiled twin of _kernels_py.first_passage."""
    cdef BodyP B
    _fill_body(&B, kind, dim, r, L, diameter, center, axes, hs_n, hs_b)
    cdef _Workspace ws = _Workspace(dim, B.mh)
    cdef bitgen_t* bg = _bg_ptr(bitgen)
    cdef long consumed = 0
    cdef long tau = -1
    cdef long k
    cdef double chord = 0.0, co = 0.0, ci = 0.0
    cdef double* x = &x_state[0]
    cdef double* m = &m_state[0]
    if x[0] >= level:
        tau = 0
    else:
        for k in range(1, max_steps + 1):
            _step(&B, &ws.S, bg, &consumed, law, x, m, &chord, &co, &ci)
            if x[0] >= level:
                tau = k
                break
    return tau, consumed
