"""Arclength discretization of planar boundary kernels.

Equal-arclength binning makes the uniform vector stationary for the binned
chain, so the row-stochastic matrix built here is symmetric (detailed
balance with equal bin measure). Eigenvalues, the spectral gap, and
sweep-cut conductance over contiguous arcs summarize mixing behavior.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .chain import cosine_kernel_constant
from .geometry import (
    Ball,
    Capsule,
    ConvexBody,
    Ellipsoid,
    InputError,
    RoundedPolytope,
)


class NumericError(RuntimeError):
    """Iterative solver failed to converge."""


# ---------------------------------------------------------------------------
# boundary parametrizations by arclength
# ---------------------------------------------------------------------------


class BoundaryCurve:
    """Closed planar boundary parametrized by arclength s in [0, perimeter)."""

    perimeter: float

    def points(self, s):
        raise NotImplementedError

    def normals(self, s):
        raise NotImplementedError

    def arclengths(self, P):
        """Arclength coordinate of boundary points P (used for binning)."""
        raise NotImplementedError


class CircleCurve(BoundaryCurve):
    def __init__(self, center, radius):
        self.center = np.asarray(center, dtype=float)
        self.radius = float(radius)
        self.perimeter = 2.0 * math.pi * self.radius

    def points(self, s):
        th = np.asarray(s, dtype=float) / self.radius
        return self.center + self.radius * np.stack([np.cos(th), np.sin(th)], axis=-1)

    def normals(self, s):
        th = np.asarray(s, dtype=float) / self.radius
        return -np.stack([np.cos(th), np.sin(th)], axis=-1)

    def arclengths(self, P):
        d = np.atleast_2d(P) - self.center
        th = np.mod(np.arctan2(d[:, 1], d[:, 0]), 2.0 * math.pi)
        return self.radius * th


class EllipseCurve(BoundaryCurve):
    """Arclength parametrization via composite Simpson + bisection inverse."""

    _PANELS = 8192

    def __init__(self, a1, a2):
        self.a1 = float(a1)
        self.a2 = float(a2)
        K = self._PANELS
        self._h = 2.0 * math.pi / K
        grid = np.linspace(0.0, 2.0 * math.pi, K + 1)
        mids = grid[:-1] + 0.5 * self._h
        v_nodes = self._speed(grid)
        v_mids = self._speed(mids)
        seg = (self._h / 6.0) * (v_nodes[:-1] + 4.0 * v_mids + v_nodes[1:])
        self._grid = grid
        self._cum = np.concatenate([[0.0], np.cumsum(seg)])
        self.perimeter = float(self._cum[-1])

    def _speed(self, th):
        return np.sqrt((self.a1 * np.sin(th)) ** 2 + (self.a2 * np.cos(th)) ** 2)

    def _seg_len(self, a, th):
        h = th - a
        return (h / 6.0) * (self._speed(a) + 4.0 * self._speed(a + 0.5 * h) + self._speed(th))

    def _theta_of_s(self, s):
        s = np.mod(np.asarray(s, dtype=float), self.perimeter)
        idx = np.clip(np.searchsorted(self._cum, s, side="right") - 1, 0, self._PANELS - 1)
        lo = self._grid[idx]
        hi = lo + self._h
        base = self._cum[idx]
        for _ in range(60):
            mid = 0.5 * (lo + hi)
            high = base + self._seg_len(self._grid[idx], mid) > s
            hi = np.where(high, mid, hi)
            lo = np.where(high, lo, mid)
        return 0.5 * (lo + hi)

    def points(self, s):
        th = self._theta_of_s(s)
        return np.stack([self.a1 * np.cos(th), self.a2 * np.sin(th)], axis=-1)

    def normals(self, s):
        return self._normals_at(self.points(s))

    def _normals_at(self, P):
        g = -np.atleast_2d(P) / np.array([self.a1**2, self.a2**2])
        return g / np.linalg.norm(g, axis=1, keepdims=True)

    def arclengths(self, P):
        P = np.atleast_2d(P)
        th = np.mod(np.arctan2(P[:, 1] / self.a2, P[:, 0] / self.a1), 2.0 * math.pi)
        idx = np.clip((th / self._h).astype(int), 0, self._PANELS - 1)
        return self._cum[idx] + self._seg_len(self._grid[idx], th)


class StadiumCurve(BoundaryCurve):
    """Capsule boundary in 2D: two semicircular caps joined by flats."""

    def __init__(self, half_length, radius):
        self.L = float(half_length)
        self.r = float(radius)
        self.perimeter = 2.0 * math.pi * self.r + 4.0 * self.L
        # piece starts: right cap, top flat, left cap, bottom flat
        pr = math.pi * self.r
        self._s1, self._s2, self._s3 = pr, pr + 2.0 * self.L, 2.0 * pr + 2.0 * self.L

    def _pieces(self, s):
        s = np.mod(np.asarray(s, dtype=float), self.perimeter)
        return s, [
            s < self._s1,
            (s >= self._s1) & (s < self._s2),
            (s >= self._s2) & (s < self._s3),
            s >= self._s3,
        ]

    def points(self, s):
        s, (right, top, left, bottom) = self._pieces(s)
        out = np.empty(s.shape + (2,))
        th = -0.5 * math.pi + s[right] / self.r
        out[right, 0] = self.L + self.r * np.cos(th)
        out[right, 1] = self.r * np.sin(th)
        out[top, 0] = self.L - (s[top] - self._s1)
        out[top, 1] = self.r
        th = 0.5 * math.pi + (s[left] - self._s2) / self.r
        out[left, 0] = -self.L + self.r * np.cos(th)
        out[left, 1] = self.r * np.sin(th)
        out[bottom, 0] = -self.L + (s[bottom] - self._s3)
        out[bottom, 1] = -self.r
        return out

    def normals(self, s):
        s, (right, top, left, bottom) = self._pieces(s)
        out = np.empty(s.shape + (2,))
        th = -0.5 * math.pi + s[right] / self.r
        out[right, 0] = -np.cos(th)
        out[right, 1] = -np.sin(th)
        out[top, 0] = 0.0
        out[top, 1] = -1.0
        th = 0.5 * math.pi + (s[left] - self._s2) / self.r
        out[left, 0] = -np.cos(th)
        out[left, 1] = -np.sin(th)
        out[bottom, 0] = 0.0
        out[bottom, 1] = 1.0
        return out

    def arclengths(self, P):
        P = np.atleast_2d(P)
        x, y = P[:, 0], P[:, 1]
        s = np.empty(P.shape[0])
        right = x >= self.L
        left = x <= -self.L
        mid_top = ~right & ~left & (y > 0)
        mid_bot = ~right & ~left & (y <= 0)
        th = np.arctan2(y[right], x[right] - self.L)
        s[right] = (th + 0.5 * math.pi) * self.r
        phi = np.mod(np.arctan2(y[left], x[left] + self.L), 2.0 * math.pi)
        s[left] = self._s2 + (phi - 0.5 * math.pi) * self.r
        s[mid_top] = self._s1 + (self.L - x[mid_top])
        s[mid_bot] = self._s3 + (x[mid_bot] + self.L)
        return np.mod(s, self.perimeter)


class RoundedPolygonCurve(BoundaryCurve):
    """Offset polygon: straight edge pieces joined by vertex arcs."""

    def __init__(self, body: RoundedPolytope):
        if body.dim != 2:
            raise InputError("rounded-polygon curve needs a 2D body")
        self.r = body.radius
        V = body.vertices()
        k = len(V)
        E = np.roll(V, -1, axis=0) - V
        lengths = np.linalg.norm(E, axis=1)
        dirs = E / lengths[:, None]
        outn = np.stack([dirs[:, 1], -dirs[:, 0]], axis=1)  # ccw polygon
        ang = np.arctan2(outn[:, 1], outn[:, 0])
        spans = np.mod(ang - np.roll(ang, 1), 2.0 * math.pi)
        self.V, self.dirs, self.outn = V, dirs, outn
        self.edge_len, self.arc_span = lengths, spans
        self.arc_start_angle = np.roll(ang, 1)
        pieces = []
        s = 0.0
        for i in range(k):
            pieces.append(("arc", i, s, self.r * spans[i]))
            s += self.r * spans[i]
            pieces.append(("edge", i, s, lengths[i]))
            s += lengths[i]
        self._pieces = pieces
        self.perimeter = s

    def _locate(self, s):
        s = np.mod(np.asarray(s, dtype=float), self.perimeter)
        out_p = np.empty(s.shape + (2,))
        out_n = np.empty(s.shape + (2,))
        for kind, i, start, length in self._pieces:
            sel = (s >= start) & (s < start + length)
            if not sel.any():
                continue
            loc = s[sel] - start
            if kind == "arc":
                a = self.arc_start_angle[i] + loc / self.r
                u = np.stack([np.cos(a), np.sin(a)], axis=1)
                out_p[sel] = self.V[i] + self.r * u
                out_n[sel] = -u
            else:
                p0 = self.V[i] + self.r * self.outn[i]
                out_p[sel] = p0 + loc[:, None] * self.dirs[i]
                out_n[sel] = -self.outn[i]
        return out_p, out_n

    def points(self, s):
        return self._locate(s)[0]

    def normals(self, s):
        return self._locate(s)[1]

    def arclengths(self, P):
        P = np.atleast_2d(P)
        k = len(self.V)
        # nearest core feature decides the piece
        best = np.full(P.shape[0], np.inf)
        s_out = np.zeros(P.shape[0])
        arc_starts = {i: start for kind, i, start, _len in self._pieces if kind == "arc"}
        edge_starts = {i: start for kind, i, start, _len in self._pieces if kind == "edge"}
        for i in range(k):
            rel = P - self.V[i]
            t = rel @ self.dirs[i]
            t_cl = np.clip(t, 0.0, self.edge_len[i])
            q = self.V[i] + t_cl[:, None] * self.dirs[i]
            d = np.linalg.norm(P - q, axis=1)
            upd = d < best
            on_edge = upd & (t > 0.0) & (t < self.edge_len[i])
            s_out[on_edge] = edge_starts[i] + t[on_edge]
            at_v0 = upd & (t <= 0.0)
            a = np.arctan2(rel[at_v0, 1], rel[at_v0, 0])
            phi = np.mod(a - self.arc_start_angle[i], 2.0 * math.pi)
            s_out[at_v0] = arc_starts[i] + self.r * np.clip(phi, 0.0, self.arc_span[i])
            at_v1 = upd & (t >= self.edge_len[i])
            j = (i + 1) % k
            rel1 = P[at_v1] - self.V[j]
            a = np.arctan2(rel1[:, 1], rel1[:, 0])
            phi = np.mod(a - self.arc_start_angle[j], 2.0 * math.pi)
            s_out[at_v1] = arc_starts[j] + self.r * np.clip(phi, 0.0, self.arc_span[j])
            best = np.where(upd, d, best)
        return np.mod(s_out, self.perimeter)


def boundary_curve(body: ConvexBody) -> BoundaryCurve:
    if body.dim != 2:
        raise InputError("boundary curves are defined for 2D bodies only")
    if isinstance(body, Ball):
        return CircleCurve(body.center, body.radius)
    if isinstance(body, Ellipsoid):
        return EllipseCurve(body.semi_axes[0], body.semi_axes[1])
    if isinstance(body, Capsule):
        return StadiumCurve(body.half_length, body.radius)
    if isinstance(body, RoundedPolytope):
        return RoundedPolygonCurve(body)
    raise InputError(f"no boundary curve for {type(body).__name__}")


# ---------------------------------------------------------------------------
# transition matrix on equal-arclength bins
# ---------------------------------------------------------------------------


@dataclass
class TransitionMatrix:
    body: ConvexBody
    curve: BoundaryCurve
    bins: int
    bin_length: float
    quad_points: int
    P: np.ndarray

    def bin_measure(self) -> np.ndarray:
        return np.full(self.bins, 1.0 / self.bins)


def _gauss01(q):
    x, w = np.polynomial.legendre.leggauss(q)
    return 0.5 * (x + 1.0), 0.5 * w


def _pair_density(pts_u, nrm_u, pts_v, nrm_v, const):
    """Kernel density between node sets; zero at coincident nodes."""
    diff = pts_v[None, :, :] - pts_u[:, None, :]
    dist = np.sqrt(np.einsum("abk,abk->ab", diff, diff))
    with np.errstate(invalid="ignore", divide="ignore"):
        co = np.einsum("abk,ak->ab", diff, nrm_u) / dist
        ci = -np.einsum("abk,bk->ab", diff, nrm_v) / dist
        dens = const * co * ci / dist
    dens[dist == 0.0] = 0.0
    return dens


def build_transition_matrix(body: ConvexBody, m: int, quad_points: int = 4) -> TransitionMatrix:
    """Bin-to-bin quadrature of the one-step kernel on equal-arclength bins.

    P_ij averages the normalized kernel over bin i and integrates it over
    bin j (Gauss nodes per bin; 16 nodes for near-diagonal pairs where the
    kernel varies fastest). P_ii is set by row complement, clipped at 0.
    """
    if body.dim != 2:
        raise InputError("transition matrix discretization needs a 2D body")
    if m < 8:
        raise InputError("need at least 8 bins")
    if quad_points < 1:
        raise InputError("quad_points must be >= 1")
    curve = boundary_curve(body)
    S = curve.perimeter
    h = S / m
    const = cosine_kernel_constant(2)
    q = quad_points
    x01, w01 = _gauss01(q)
    s_nodes = (np.arange(m)[:, None] + x01[None, :]).reshape(-1) * h
    pts = curve.points(s_nodes)
    nrm = curve.normals(s_nodes)
    ww = np.outer(w01, w01).reshape(-1)
    P = np.empty((m, m))
    block = max(1, int(2_000_000 // (m * q * q)))
    for b0 in range(0, m, block):
        b1 = min(b0 + block, m)
        rows = slice(b0 * q, b1 * q)
        dens = _pair_density(pts[rows], nrm[rows], pts, nrm, const)
        dens = dens.reshape(b1 - b0, q, m, q)
        P[b0:b1] = h * np.einsum("iajb,ab->ij", dens, np.outer(w01, w01))
    # near-diagonal refinement: 16 nodes where the kernel varies fastest
    q16 = 16
    x16, w16 = _gauss01(q16)
    s16 = (np.arange(m)[:, None] + x16[None, :]).reshape(-1) * h
    p16 = curve.points(s16).reshape(m, q16, 2)
    n16 = curve.normals(s16).reshape(m, q16, 2)
    for off in (-1, 1):
        j_idx = (np.arange(m) + off) % m
        diff = p16[j_idx][:, None, :, :] - p16[:, :, None, :]
        dist = np.sqrt(np.einsum("iabk,iabk->iab", diff, diff))
        with np.errstate(invalid="ignore", divide="ignore"):
            co = np.einsum("iabk,iak->iab", diff, n16) / dist
            ci = -np.einsum("iabk,ibk->iab", diff, n16[j_idx]) / dist
            dens = const * co * ci / dist
        dens[dist == 0.0] = 0.0
        vals = h * np.einsum("iab,a,b->i", dens, w16, w16)
        P[np.arange(m), j_idx] = vals
    np.fill_diagonal(P, 0.0)
    P = 0.5 * (P + P.T)  # quadrature symmetrization (detailed balance, equal bins)
    np.fill_diagonal(P, np.maximum(1.0 - P.sum(axis=1), 0.0))
    # quadrature overshoot near boundary kinks can leave row sums ~1e-9 high
    # after the diagonal clip; symmetric rescaling restores stochasticity
    # without breaking detailed balance (outer(d, d) is bitwise symmetric)
    for _ in range(50):
        rs = P.sum(axis=1)
        if np.abs(rs - 1.0).max() < 1e-13:
            break
        d = 1.0 / np.sqrt(rs)
        P *= np.outer(d, d)
    return TransitionMatrix(body, curve, m, h, quad_points, P)


def stationary_distribution(tm: TransitionMatrix, tol: float = 1e-12,
                            max_iter: int = 1_000_000) -> np.ndarray:
    """Left fixed point of P by power iteration (L1 residual below tol)."""
    P = tm.P
    v = np.full(tm.bins, 1.0 / tm.bins)
    for _ in range(max_iter):
        w = v @ P
        w /= w.sum()
        if np.abs(w - v).sum() < tol:
            return w
        v = w
    raise NumericError("power iteration did not converge")


@dataclass
class SpectralSummary:
    eigenvalues: np.ndarray        # sorted by modulus, descending
    spectral_gap: float            # 1 - |lambda_2|
    eigenvalue_gap: float          # 1 - (second largest eigenvalue), for Cheeger
    lambda_2: float                # signed eigenvalue of second largest modulus
    conductance: float             # minimum over contiguous-arc sweep cuts
    cheeger_lower: float
    cheeger_upper: float
    sweep_lengths: np.ndarray      # arc length (in bins) of each sweep family
    sweep_values: np.ndarray       # minimal conductance at that arc length

    def best_cut(self):
        i = int(np.argmin(self.sweep_values))
        return int(self.sweep_lengths[i]), float(self.sweep_values[i])


def sweep_conductance(tm: TransitionMatrix):
    """Conductance of every contiguous arc A with pi(A) <= 1/2.

    Returns (lengths, per-length minima, overall minimum). Uses 2D prefix
    sums over the doubled matrix, O(m^2) total.
    """
    m = tm.bins
    Q = tm.P / m  # pi_i P_ij with uniform pi
    Qd = np.tile(Q, (2, 2))
    pref = np.zeros((2 * m + 1, 2 * m + 1))
    pref[1:, 1:] = Qd.cumsum(axis=0).cumsum(axis=1)
    lens = np.arange(1, m // 2 + 1)
    best = np.empty(lens.shape[0])
    a = np.arange(m)
    for idx, ln in enumerate(lens):
        inside = (
            pref[a + ln, a + ln] - pref[a, a + ln] - pref[a + ln, a] + pref[a, a]
        )
        flux = ln / m - inside
        best[idx] = np.min(flux / (ln / m))
    return lens, best, float(best.min())


def spectral_summary(tm: TransitionMatrix) -> SpectralSummary:
    """Eigenvalues of the (symmetric) binned kernel plus sweep conductance."""
    P = tm.P
    asym = float(np.abs(P - P.T).max())
    if asym > 1e-9:
        raise NumericError(f"matrix is not reversible to tolerance (asym={asym:.2e})")
    try:
        lam = np.linalg.eigvalsh(0.5 * (P + P.T))
    except np.linalg.LinAlgError as e:
        raise NumericError("eigenvalue solver failed") from e
    order = np.argsort(-np.abs(lam), kind="stable")
    lam_mod = lam[order]
    lam_desc = np.sort(lam)[::-1]
    spectral_gap = 1.0 - abs(float(lam_mod[1]))
    eigenvalue_gap = 1.0 - float(lam_desc[1])
    lens, per_len, cond = sweep_conductance(tm)
    return SpectralSummary(
        eigenvalues=lam_mod,
        spectral_gap=spectral_gap,
        eigenvalue_gap=eigenvalue_gap,
        lambda_2=float(lam_mod[1]),
        conductance=cond,
        cheeger_lower=0.5 * eigenvalue_gap,
        cheeger_upper=math.sqrt(2.0 * eigenvalue_gap),
        sweep_lengths=lens,
        sweep_values=per_len,
    )
