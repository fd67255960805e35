"""Pure-Python stepping kernel (fallback for the compiled extension).

This module mirrors _kernels.pyx operation-for-operation: same raw-draw
order, same expression trees, same libm calls. On a given platform the two
kernels produce bit-identical trajectories, so either can back the chain.
Keep the arithmetic in the two files in sync when editing.
"""

from __future__ import annotations

import math

COMPILED = False

_RAW2F = 1.0 / 9007199254740992.0  # 2**-53
_TWO_PI = 2.0 * math.pi
_MIN_COS = 1e-12


class _RawReader:
    """Buffered reader of the Philox raw 64-bit sequence."""

    __slots__ = ("_bg", "_buf", "_i", "consumed")

    def __init__(self, bitgen):
        self._bg = bitgen
        self._buf = ()
        self._i = 0
        self.consumed = 0

    def next(self):
        if self._i >= len(self._buf):
            self._buf = self._bg.random_raw(4096).tolist()
            self._i = 0
        v = self._buf[self._i]
        self._i += 1
        self.consumed += 1
        return v


def _draw_normals(rr, g, k):
    i = 0
    while i < k:
        a = rr.next()
        b = rr.next()
        radius = math.sqrt(-2.0 * math.log(((a >> 11) + 1) * _RAW2F))
        theta = _TWO_PI * ((b >> 11) * _RAW2F)
        g[i] = radius * math.cos(theta)
        i += 1
        if i < k:
            g[i] = radius * math.sin(theta)
            i += 1


def _draw_direction(rr, law, m, dim, g, w):
    """Fill w with a unit direction; returns cos = w . m (resamples grazing draws)."""
    if law == 0:  # cosine
        while True:
            _draw_normals(rr, g, dim)
            d = 0.0
            for i in range(dim):
                d += g[i] * m[i]
            tn2 = 0.0
            for i in range(dim):
                ti = g[i] - d * m[i]
                w[i] = ti
                tn2 += ti * ti
            tnorm = math.sqrt(tn2)
            if tnorm < 1e-150:
                continue
            u = ((rr.next() >> 11) + 1) * _RAW2F
            s = math.pow(u, 1.0 / (dim - 1))
            c = 1.0 - s * s
            if c < 0.0:
                c = 0.0
            c = math.sqrt(c)
            if c < _MIN_COS:
                continue
            for i in range(dim):
                w[i] = s * (w[i] / tnorm) + c * m[i]
            return c
    else:  # uniform hemisphere
        while True:
            _draw_normals(rr, g, dim)
            nn = 0.0
            for i in range(dim):
                nn += g[i] * g[i]
            nrm = math.sqrt(nn)
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
            if c < _MIN_COS:
                continue
            return c


def _dist_polytope(hs_n, hs_b, mh, dim, p, y, incr, tmp):
    """Distance from p to the core polytope via Dykstra; projection left in y."""
    maxviol = -math.inf
    for i in range(mh):
        v = -hs_b[i]
        row = hs_n[i]
        for j in range(dim):
            v += row[j] * p[j]
        if v > maxviol:
            maxviol = v
    if maxviol <= 0.0:
        for j in range(dim):
            y[j] = p[j]
        return 0.0
    for j in range(dim):
        y[j] = p[j]
    for i in range(mh):
        for j in range(dim):
            incr[i][j] = 0.0
    for _cycle in range(2000):
        moved = 0.0
        for i in range(mh):
            row = hs_n[i]
            pinc = incr[i]
            viol = -hs_b[i]
            for j in range(dim):
                vj = y[j] + pinc[j]
                tmp[j] = vj
                viol += row[j] * vj
            if viol > 0.0:
                for j in range(dim):
                    newy = tmp[j] - viol * row[j]
                    pinc[j] = tmp[j] - newy
                    d = newy - y[j]
                    if d < 0.0:
                        d = -d
                    if d > moved:
                        moved = d
                    y[j] = newy
            else:
                for j in range(dim):
                    pinc[j] = 0.0
                    d = tmp[j] - y[j]
                    if d < 0.0:
                        d = -d
                    if d > moved:
                        moved = d
                    y[j] = tmp[j]
        if moved < 1e-14:
            break
    s = 0.0
    for j in range(dim):
        d = p[j] - y[j]
        s += d * d
    return math.sqrt(s)


def _level(kind, dim, r, L, center, axes, hs_n, hs_b, mh, dyk_y, dyk_incr, dyk_tmp, p):
    if kind == 0:
        s = 0.0
        for i in range(dim):
            d = p[i] - center[i]
            s += d * d
        return math.sqrt(s) - r
    if kind == 1:
        s = 0.0
        for i in range(dim):
            d = p[i] / axes[i]
            s += d * d
        return math.sqrt(s) - 1.0
    if kind == 2:
        f = p[0]
        if f > L:
            f = L
        elif f < -L:
            f = -L
        d0 = p[0] - f
        s = d0 * d0
        for i in range(1, dim):
            s += p[i] * p[i]
        return math.sqrt(s) - r
    return _dist_polytope(hs_n, hs_b, mh, dim, p, dyk_y, dyk_incr, dyk_tmp) - r


def _ray_exit(kind, dim, r, L, diameter, center, axes, hs_n, hs_b, mh,
              dyk_y, dyk_incr, dyk_tmp, x, w, pbuf):
    if kind == 0:
        b = 0.0
        q = 0.0
        for i in range(dim):
            xc = x[i] - center[i]
            b += xc * w[i]
            q += xc * xc
        q -= r * r
        disc = b * b - q
        if disc < 0.0:
            disc = 0.0
        return -b + math.sqrt(disc)
    if kind == 1:
        A = 0.0
        B = 0.0
        C = 0.0
        for i in range(dim):
            wa = w[i] / axes[i]
            xa = x[i] / axes[i]
            A += wa * wa
            B += xa * wa
            C += xa * xa
        C -= 1.0
        disc = B * B - A * C
        if disc < 0.0:
            disc = 0.0
        return (-B + math.sqrt(disc)) / A
    lo = 1e-12 * diameter
    hi = diameter + r
    for i in range(dim):
        pbuf[i] = x[i] + hi * w[i]
    ghi = _level(kind, dim, r, L, center, axes, hs_n, hs_b, mh, dyk_y, dyk_incr, dyk_tmp, pbuf)
    if ghi <= 0.0:
        raise RuntimeError("ray exit not bracketed; inconsistent body oracle")
    # grow the lower bracket past the region where the level rounds to ~0;
    # a grazing ray whose level turns positive without going negative exits
    # at the last machine-boundary point
    cand = -1.0
    for _ in range(130):
        for i in range(dim):
            pbuf[i] = x[i] + lo * w[i]
        glo = _level(kind, dim, r, L, center, axes, hs_n, hs_b, mh, dyk_y, dyk_incr, dyk_tmp, pbuf)
        if glo < 0.0:
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
    else:
        raise RuntimeError("ray does not enter the interior; cannot bracket exit")
    mid = 0.5 * (lo + hi)
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        for i in range(dim):
            pbuf[i] = x[i] + mid * w[i]
        gm = _level(kind, dim, r, L, center, axes, hs_n, hs_b, mh, dyk_y, dyk_incr, dyk_tmp, pbuf)
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


def _project(kind, dim, r, L, center, axes, hs_n, hs_b, mh, dyk_y, dyk_incr, dyk_tmp, y, diff):
    if kind == 0:
        s = 0.0
        for i in range(dim):
            d = y[i] - center[i]
            diff[i] = d
            s += d * d
        dn = math.sqrt(s)
        for i in range(dim):
            y[i] = center[i] + r * (diff[i] / dn)
    elif kind == 1:
        s = 0.0
        for i in range(dim):
            d = y[i] / axes[i]
            s += d * d
        q = math.sqrt(s)
        for i in range(dim):
            y[i] = y[i] / q
    elif kind == 2:
        f = y[0]
        if f > L:
            f = L
        elif f < -L:
            f = -L
        d0 = y[0] - f
        s = d0 * d0
        for i in range(1, dim):
            s += y[i] * y[i]
        dn = math.sqrt(s)
        y[0] = f + r * (d0 / dn)
        for i in range(1, dim):
            y[i] = r * (y[i] / dn)
    else:
        dn = _dist_polytope(hs_n, hs_b, mh, dim, y, dyk_y, dyk_incr, dyk_tmp)
        for i in range(dim):
            diff[i] = y[i] - dyk_y[i]
        for i in range(dim):
            y[i] = dyk_y[i] + r * (diff[i] / dn)


def _normal(kind, dim, r, L, center, axes, hs_n, hs_b, mh, dyk_y, dyk_incr, dyk_tmp, y, mout):
    if kind == 0:
        s = 0.0
        for i in range(dim):
            d = center[i] - y[i]
            mout[i] = d
            s += d * d
        dn = math.sqrt(s)
        for i in range(dim):
            mout[i] = mout[i] / dn
    elif kind == 1:
        s = 0.0
        for i in range(dim):
            v = -(y[i] / (axes[i] * axes[i]))
            mout[i] = v
            s += v * v
        dn = math.sqrt(s)
        for i in range(dim):
            mout[i] = mout[i] / dn
    elif kind == 2:
        f = y[0]
        if f > L:
            f = L
        elif f < -L:
            f = -L
        d0 = f - y[0]
        s = d0 * d0
        mout[0] = d0
        for i in range(1, dim):
            v = -y[i]
            mout[i] = v
            s += v * v
        dn = math.sqrt(s)
        for i in range(dim):
            mout[i] = mout[i] / dn
    else:
        _dist_polytope(hs_n, hs_b, mh, dim, y, dyk_y, dyk_incr, dyk_tmp)
        s = 0.0
        for i in range(dim):
            v = dyk_y[i] - y[i]
            mout[i] = v
            s += v * v
        dn = math.sqrt(s)
        for i in range(dim):
            mout[i] = mout[i] / dn


def _step(kind, dim, r, L, diameter, center, axes, hs_n, hs_b, mh,
          dyk_y, dyk_incr, dyk_tmp, rr, law, x, m, g, w, y, diff, mnew, pbuf):
    """One chain step in place; returns (chord, cos_out, cos_in)."""
    _draw_direction(rr, law, m, dim, g, w)
    t = _ray_exit(kind, dim, r, L, diameter, center, axes, hs_n, hs_b, mh,
                  dyk_y, dyk_incr, dyk_tmp, x, w, pbuf)
    for i in range(dim):
        y[i] = x[i] + t * w[i]
    _project(kind, dim, r, L, center, axes, hs_n, hs_b, mh, dyk_y, dyk_incr, dyk_tmp, y, diff)
    c2 = 0.0
    for i in range(dim):
        d = y[i] - x[i]
        diff[i] = d
        c2 += d * d
    chord = math.sqrt(c2)
    co = 0.0
    for i in range(dim):
        co += m[i] * diff[i]
    co = co / chord
    _normal(kind, dim, r, L, center, axes, hs_n, hs_b, mh, dyk_y, dyk_incr, dyk_tmp, y, mnew)
    ci = 0.0
    for i in range(dim):
        ci += mnew[i] * (-diff[i])
    ci = ci / chord
    for i in range(dim):
        x[i] = y[i]
        m[i] = mnew[i]
    return chord, co, ci


def _unpack(center, axes, hs_n, hs_b):
    return (
        center.tolist(),
        axes.tolist(),
        [row.tolist() for row in hs_n],
        hs_b.tolist(),
        hs_n.shape[0],
    )


def run_chain(kind, dim, r, L, diameter, center, axes, hs_n, hs_b,
              x_state, m_state, steps, burn_in, thin, law, bitgen,
              out_pos, out_chord, out_cos_out, out_cos_in):
    """Run `steps` chain steps, recording after burn-in at stride `thin`.

    x_state / m_state (numpy arrays) are mutated in place to the final state;
    returns the number of raw 64-bit draws consumed.
    """
    centerl, axesl, hsnl, hsbl, mh = _unpack(center, axes, hs_n, hs_b)
    x = x_state.tolist()
    m = m_state.tolist()
    g = [0.0] * dim
    w = [0.0] * dim
    y = [0.0] * dim
    diff = [0.0] * dim
    mnew = [0.0] * dim
    pbuf = [0.0] * dim
    dyk_y = [0.0] * dim
    dyk_tmp = [0.0] * dim
    dyk_incr = [[0.0] * dim for _ in range(mh)]
    rr = _RawReader(bitgen)
    rec = 0
    for k in range(1, steps + 1):
        chord, co, ci = _step(kind, dim, r, L, diameter, centerl, axesl, hsnl, hsbl, mh,
                              dyk_y, dyk_incr, dyk_tmp, rr, law, x, m, g, w, y, diff, mnew, pbuf)
        if k > burn_in and (k - burn_in - 1) % thin == 0:
            for i in range(dim):
                out_pos[rec, i] = x[i]
            out_chord[rec] = chord
            out_cos_out[rec] = co
            out_cos_in[rec] = ci
            rec += 1
    for i in range(dim):
        x_state[i] = x[i]
        m_state[i] = m[i]
    return rr.consumed


def first_passage(kind, dim, r, L, diameter, center, axes, hs_n, hs_b,
                  x_state, m_state, level, max_steps, law, bitgen):
    """Steps until the first coordinate reaches `level`; returns (tau, consumed).

    tau = -1 when the level was not reached within max_steps (censored).
    """
    centerl, axesl, hsnl, hsbl, mh = _unpack(center, axes, hs_n, hs_b)
    x = x_state.tolist()
    m = m_state.tolist()
    g = [0.0] * dim
    w = [0.0] * dim
    y = [0.0] * dim
    diff = [0.0] * dim
    mnew = [0.0] * dim
    pbuf = [0.0] * dim
    dyk_y = [0.0] * dim
    dyk_tmp = [0.0] * dim
    dyk_incr = [[0.0] * dim for _ in range(mh)]
    rr = _RawReader(bitgen)
    tau = -1
    if x[0] >= level:
        tau = 0
    else:
        for k in range(1, max_steps + 1):
            _step(kind, dim, r, L, diameter, centerl, axesl, hsnl, hsbl, mh,
                  dyk_y, dyk_incr, dyk_tmp, rr, law, x, m, g, w, y, diff, mnew, pbuf)
            if x[0] >= level:
                tau = k
                break
    for i in range(dim):
        x_state[i] = x[i]
        m_state[i] = m[i]
    return tau, rr.consumed
