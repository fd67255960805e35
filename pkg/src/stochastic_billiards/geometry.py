"""Convex bodies with curvature-bounded boundary: membership, normals, ray exits.

Each body exposes a level function g that is negative inside, zero on the
boundary, and convex along any line, so the exit point of an inward ray is
the unique positive root of t -> g(x + t*w). Ball and ellipsoid exits are
closed-form quadratics; capsule and rounded polytope use a bracketed
bisection on g. Scalar oracles are paired with `*_many` batch variants used
by the vectorized samplers.
"""

from __future__ import annotations

import json
import math

import numpy as np
from scipy.optimize import linprog

BOUNDARY_TOL = 1e-9        # |g| accepted as "on the boundary"
PROJECT_INPUT_TOL = 1e-5   # largest |g| project_to_boundary repairs
BISECT_TOL = 1e-12         # |g| target for ray-exit bisection
_BISECT_MAX_ITER = 200
_DYKSTRA_TOL = 1e-14
_DYKSTRA_MAX_CYCLES = 2000


class InputError(ValueError):
    """Malformed argument: wrong dimension, bad parameter, unknown variant."""


class DomainError(ValueError):
    """Point not in the operation's domain (e.g. not on the boundary)."""


class DirectionError(ValueError):
    """Ray direction does not point into the body."""


class GeometryError(RuntimeError):
    """Body oracle inconsistency (e.g. ray exit failed to bracket)."""


class BoundaryPoint:
    """A position on the boundary together with its inward unit normal."""

    __slots__ = ("position", "normal")

    def __init__(self, position, normal):
        self.position = np.asarray(position, dtype=float)
        self.normal = np.asarray(normal, dtype=float)

    @property
    def dim(self):
        return self.position.shape[0]

    def __repr__(self):
        return f"BoundaryPoint({self.position.tolist()}, normal={self.normal.tolist()})"


def _as_point(x, dim, name="x"):
    x = np.asarray(x, dtype=float)
    if x.shape != (dim,):
        raise InputError(f"{name} must have shape ({dim},), got {x.shape}")
    if not np.all(np.isfinite(x)):
        raise InputError(f"{name} must be finite")
    return x


def _as_points(X, dim):
    X = np.atleast_2d(np.asarray(X, dtype=float))
    if X.shape[1] != dim:
        raise InputError(f"points must have {dim} columns, got {X.shape[1]}")
    return X


class ConvexBody:
    """Base class; subclasses define the level function and closed-form oracles."""

    kind = "abstract"

    # -- scalar wrappers around the batch primitives ------------------------

    def level(self, x) -> float:
        return float(self.level_many(_as_point(x, self.dim)[None, :])[0])

    def contains(self, x, tol: float = BOUNDARY_TOL) -> bool:
        """Closed-set membership, with tolerance for boundary roundoff."""
        return bool(self.level(x) <= tol)

    def contains_many(self, X, tol: float = BOUNDARY_TOL):
        return self.level_many(_as_points(X, self.dim)) <= tol

    def inward_normal_at(self, x) -> np.ndarray:
        x = _as_point(x, self.dim)
        g = self.level(x)
        if abs(g) > BOUNDARY_TOL * 10:
            raise DomainError(f"point is not on the boundary (|g|={abs(g):.3e})")
        return self.normal_many(x[None, :])[0]

    def boundary_point(self, x) -> BoundaryPoint:
        return BoundaryPoint(_as_point(x, self.dim), self.inward_normal_at(x))

    def ray_exit(self, bp: BoundaryPoint, w):
        """Exit point y = x + t*w of the inward ray, as (BoundaryPoint, t)."""
        x = _as_point(bp.position, self.dim)
        w = _as_point(w, self.dim, "w")
        if abs(np.dot(w, w) - 1.0) > 1e-9:
            raise InputError("w must be a unit vector")
        if float(np.dot(w, bp.normal)) <= 0.0:
            raise DirectionError("direction must satisfy w . n_x > 0")
        Y, t = self.ray_exit_many(x[None, :], w[None, :])
        y = self.project_many(Y)[0]
        return BoundaryPoint(y, self.normal_many(y[None, :])[0]), float(t[0])

    def project_to_boundary(self, x) -> BoundaryPoint:
        x = _as_point(x, self.dim)
        if abs(self.level(x)) > PROJECT_INPUT_TOL:
            raise DomainError("point is too far from the boundary to project")
        y = self.project_many(x[None, :])[0]
        return BoundaryPoint(y, self.normal_many(y[None, :])[0])

    # -- generic bisection exit (capsule / rounded polytope) ----------------

    def _bisect_exit_many(self, X, W):
        N = X.shape[0]
        span = self.diameter + self._bisect_slack()
        lo = np.full(N, 1e-12 * self.diameter)
        hi = np.full(N, span)
        ghi = self.level_many(X + hi[:, None] * W)
        if np.any(ghi <= 0.0):
            raise GeometryError("ray exit not bracketed within the diameter")
        # Grow the lower bracket until the level goes negative. Grazing rays
        # can sit on the boundary to machine precision for a while; the last
        # such point is a valid (degenerate) exit if the level then turns
        # positive without ever dipping below zero.
        t_out = np.full(N, np.nan)
        cand = np.full(N, np.nan)
        glo = self.level_many(X + lo[:, None] * W)
        grow = glo >= 0.0
        for _ in range(130):
            if not grow.any():
                break
            near = grow & (glo <= BISECT_TOL)
            cand[near] = lo[near]
            over = grow & (glo > BISECT_TOL)
            if over.any():
                settled = over & ~np.isnan(cand)
                t_out[settled] = cand[settled]
                if (over & np.isnan(cand)).any():
                    raise GeometryError("ray does not enter the interior; cannot bracket exit")
                grow &= ~over
            lo[grow] *= 4.0
            capped = grow & (lo >= hi)
            if capped.any():
                settled = capped & ~np.isnan(cand)
                t_out[settled] = cand[settled]
                if (capped & np.isnan(cand)).any():
                    raise GeometryError("ray does not enter the interior; cannot bracket exit")
                grow &= ~capped
            if grow.any():
                glo[grow] = self.level_many(X[grow] + lo[grow, None] * W[grow])
                grow = grow & (glo >= 0.0)
        if grow.any():
            raise GeometryError("ray does not enter the interior; cannot bracket exit")
        t = np.where(np.isnan(t_out), 0.5 * (lo + hi), t_out)
        active = np.isnan(t_out)
        for _ in range(_BISECT_MAX_ITER):
            if not active.any():
                break
            t[active] = 0.5 * (lo[active] + hi[active])
            g = self.level_many(X[active] + t[active, None] * W[active])
            done = np.abs(g) < BISECT_TOL
            below = g < 0.0
            idx = np.flatnonzero(active)
            lo[idx[below & ~done]] = t[idx[below & ~done]]
            hi[idx[~below & ~done]] = t[idx[~below & ~done]]
            active[idx[done]] = False
        if active.any():
            g = self.level_many(X[active] + t[active, None] * W[active])
            if np.any(np.abs(g) > BOUNDARY_TOL):
                raise GeometryError("ray-exit bisection did not converge")
        return X + t[:, None] * W, t

    def _bisect_slack(self) -> float:
        return 0.0

    # -- interface the subclasses fill in -----------------------------------

    @property
    def dim(self) -> int:
        raise NotImplementedError

    @property
    def curvature_bound(self) -> float:
        raise NotImplementedError

    @property
    def diameter(self) -> float:
        raise NotImplementedError

    def level_many(self, X):
        raise NotImplementedError

    def normal_many(self, X):
        raise NotImplementedError

    def ray_exit_many(self, X, W):
        raise NotImplementedError

    def project_many(self, X):
        raise NotImplementedError

    def support_point(self, u) -> np.ndarray:
        """Boundary point maximizing u . x (used for deterministic chain starts)."""
        raise NotImplementedError

    def boundary_volume(self):
        """Surface volume of the boundary, or None if no closed form is wired up."""
        return None

    def kernel_args(self) -> dict:
        raise NotImplementedError

    def to_dict(self) -> dict:
        raise NotImplementedError


class Ball(ConvexBody):
    kind = "ball"

    def __init__(self, center, radius):
        self.center = np.asarray(center, dtype=float)
        self.radius = float(radius)
        if self.center.ndim != 1 or self.center.size < 1:
            raise InputError("center must be a 1-d point")
        if not (self.radius > 0.0 and math.isfinite(self.radius)):
            raise InputError("radius must be positive and finite")

    @property
    def dim(self):
        return self.center.shape[0]

    @property
    def curvature_bound(self):
        return 1.0 / self.radius

    @property
    def diameter(self):
        return 2.0 * self.radius

    def level_many(self, X):
        return np.linalg.norm(X - self.center, axis=1) - self.radius

    def normal_many(self, X):
        d = self.center - X
        return d / np.linalg.norm(d, axis=1, keepdims=True)

    def ray_exit_many(self, X, W):
        xc = X - self.center
        b = np.einsum("ij,ij->i", xc, W)
        q = np.einsum("ij,ij->i", xc, xc) - self.radius**2
        t = -b + np.sqrt(np.maximum(b * b - q, 0.0))
        return X + t[:, None] * W, t

    def project_many(self, X):
        d = X - self.center
        return self.center + self.radius * d / np.linalg.norm(d, axis=1, keepdims=True)

    def support_point(self, u):
        u = _as_point(u, self.dim, "u")
        return self.center + self.radius * u / np.linalg.norm(u)

    def boundary_volume(self):
        n = self.dim
        return 2.0 * math.pi ** (n / 2.0) / math.gamma(n / 2.0) * self.radius ** (n - 1)

    def kernel_args(self):
        return {
            "kind": 0,
            "r": self.radius,
            "L": 0.0,
            "center": self.center,
            "axes": np.empty(0),
            "hs_n": np.empty((0, self.dim)),
            "hs_b": np.empty(0),
        }

    def to_dict(self):
        return {"type": "ball", "dim": self.dim, "center": self.center.tolist(), "radius": self.radius}


class Ellipsoid(ConvexBody):
    """Axis-aligned ellipsoid centered at the origin, sum x_i^2/a_i^2 = 1."""

    kind = "ellipsoid"

    def __init__(self, semi_axes):
        self.semi_axes = np.asarray(semi_axes, dtype=float)
        if self.semi_axes.ndim != 1 or self.semi_axes.size < 1:
            raise InputError("semi_axes must be a 1-d sequence")
        if not np.all(self.semi_axes > 0.0) or not np.all(np.isfinite(self.semi_axes)):
            raise InputError("semi-axes must be positive and finite")

    @property
    def dim(self):
        return self.semi_axes.shape[0]

    @property
    def curvature_bound(self):
        # classical upper bound on the normal curvature: a_max / a_min^2
        return float(self.semi_axes.max() / self.semi_axes.min() ** 2)

    @property
    def diameter(self):
        return 2.0 * float(self.semi_axes.max())

    def level_many(self, X):
        return np.sqrt(np.einsum("ij,ij->i", X / self.semi_axes, X / self.semi_axes)) - 1.0

    def normal_many(self, X):
        g = -X / self.semi_axes**2
        return g / np.linalg.norm(g, axis=1, keepdims=True)

    def ray_exit_many(self, X, W):
        Xa = X / self.semi_axes
        Wa = W / self.semi_axes
        A = np.einsum("ij,ij->i", Wa, Wa)
        B = np.einsum("ij,ij->i", Xa, Wa)
        C = np.einsum("ij,ij->i", Xa, Xa) - 1.0
        t = (-B + np.sqrt(np.maximum(B * B - A * C, 0.0))) / A
        return X + t[:, None] * W, t

    def project_many(self, X):
        q = np.sqrt(np.einsum("ij,ij->i", X / self.semi_axes, X / self.semi_axes))
        return X / q[:, None]

    def support_point(self, u):
        u = _as_point(u, self.dim, "u")
        v = self.semi_axes**2 * u
        return v / math.sqrt(float(np.dot(u, v)))

    def boundary_volume(self):
        if self.dim == 2:
            from scipy.special import ellipe

            a = float(self.semi_axes.max())
            b = float(self.semi_axes.min())
            return 4.0 * a * float(ellipe(1.0 - (b / a) ** 2))
        return None

    def kernel_args(self):
        return {
            "kind": 1,
            "r": 0.0,
            "L": 0.0,
            "center": np.empty(0),
            "axes": self.semi_axes,
            "hs_n": np.empty((0, self.dim)),
            "hs_b": np.empty(0),
        }

    def to_dict(self):
        return {"type": "ellipsoid", "dim": self.dim, "semi_axes": self.semi_axes.tolist()}


class Capsule(ConvexBody):
    """Segment [-L, L] x {0}^(n-1) fattened by a ball of radius r (2D: stadium)."""

    kind = "capsule"

    def __init__(self, dim, half_length, radius):
        self._dim = int(dim)
        self.half_length = float(half_length)
        self.radius = float(radius)
        if self._dim < 2:
            raise InputError("capsule needs dim >= 2")
        if self.half_length < 0.0 or not math.isfinite(self.half_length):
            raise InputError("half_length must be >= 0 and finite")
        if not (self.radius > 0.0 and math.isfinite(self.radius)):
            raise InputError("radius must be positive and finite")

    @property
    def dim(self):
        return self._dim

    @property
    def curvature_bound(self):
        return 1.0 / self.radius

    @property
    def diameter(self):
        return 2.0 * self.half_length + 2.0 * self.radius

    def _core_points(self, X):
        P = np.zeros_like(X)
        P[:, 0] = np.clip(X[:, 0], -self.half_length, self.half_length)
        return P

    def level_many(self, X):
        d = X - self._core_points(X)
        return np.linalg.norm(d, axis=1) - self.radius

    def normal_many(self, X):
        d = self._core_points(X) - X
        return d / np.linalg.norm(d, axis=1, keepdims=True)

    def ray_exit_many(self, X, W):
        return self._bisect_exit_many(X, W)

    def _bisect_slack(self):
        return self.radius

    def project_many(self, X):
        P = self._core_points(X)
        d = X - P
        return P + self.radius * d / np.linalg.norm(d, axis=1, keepdims=True)

    def support_point(self, u):
        u = _as_point(u, self.dim, "u")
        p = np.zeros(self.dim)
        p[0] = math.copysign(self.half_length, u[0]) if u[0] != 0.0 else 0.0
        return p + self.radius * u / np.linalg.norm(u)

    def boundary_volume(self):
        n, r, L = self.dim, self.radius, self.half_length
        sphere = 2.0 * math.pi ** (n / 2.0) / math.gamma(n / 2.0) * r ** (n - 1)
        if n == 2:
            cyl = 4.0 * L
        else:
            ring = 2.0 * math.pi ** ((n - 1) / 2.0) / math.gamma((n - 1) / 2.0) * r ** (n - 2)
            cyl = 2.0 * L * ring
        return sphere + cyl

    def kernel_args(self):
        return {
            "kind": 2,
            "r": self.radius,
            "L": self.half_length,
            "center": np.empty(0),
            "axes": np.empty(0),
            "hs_n": np.empty((0, self.dim)),
            "hs_b": np.empty(0),
        }

    def to_dict(self):
        return {
            "type": "capsule",
            "dim": self.dim,
            "half_length": self.half_length,
            "radius": self.radius,
        }


class RoundedPolytope(ConvexBody):
    """Polytope {x : h_i . x <= b_i} fattened by a ball of radius r."""

    kind = "rounded_polytope"

    def __init__(self, halfspace_normals, halfspace_offsets, radius):
        self.hs_n = np.atleast_2d(np.asarray(halfspace_normals, dtype=float))
        self.hs_b = np.asarray(halfspace_offsets, dtype=float)
        self.radius = float(radius)
        if self.hs_n.shape[0] != self.hs_b.shape[0]:
            raise InputError("one offset per halfspace required")
        if self.hs_n.shape[0] < self.hs_n.shape[1] + 1:
            raise InputError("too few halfspaces to bound a polytope")
        norms = np.linalg.norm(self.hs_n, axis=1)
        if np.any(np.abs(norms - 1.0) > 1e-9):
            raise InputError("halfspace normals must be unit vectors")
        if not (self.radius > 0.0 and math.isfinite(self.radius)):
            raise InputError("radius must be positive and finite")
        self._diameter = self._compute_diameter()  # also checks bounded + nonempty

    @property
    def dim(self):
        return self.hs_n.shape[1]

    @property
    def curvature_bound(self):
        return 1.0 / self.radius

    @property
    def diameter(self):
        return self._diameter

    def vertices(self):
        """Vertices of the core polygon, counterclockwise (2D only)."""
        if self.dim != 2:
            raise InputError("vertex enumeration only implemented for dim 2")
        pts = []
        m = self.hs_n.shape[0]
        for i in range(m):
            for j in range(i + 1, m):
                A = np.array([self.hs_n[i], self.hs_n[j]])
                det = A[0, 0] * A[1, 1] - A[0, 1] * A[1, 0]
                if abs(det) < 1e-12:
                    continue
                v = np.linalg.solve(A, np.array([self.hs_b[i], self.hs_b[j]]))
                if np.all(self.hs_n @ v <= self.hs_b + 1e-9):
                    pts.append(v)
        if not pts:
            raise GeometryError("core polytope has no vertices (empty or unbounded)")
        pts = np.array(pts)
        keep = []
        for p in pts:
            if not any(np.linalg.norm(p - q) < 1e-9 for q in keep):
                keep.append(p)
        pts = np.array(keep)
        c = pts.mean(axis=0)
        order = np.argsort(np.arctan2(pts[:, 1] - c[1], pts[:, 0] - c[0]))
        return pts[order]

    def _compute_diameter(self):
        # per-axis extent LPs certify the core is nonempty and bounded
        ext = np.zeros(self.dim)
        for k in range(self.dim):
            c = np.zeros(self.dim)
            c[k] = 1.0
            hi = linprog(-c, A_ub=self.hs_n, b_ub=self.hs_b, bounds=[(None, None)] * self.dim)
            lo = linprog(c, A_ub=self.hs_n, b_ub=self.hs_b, bounds=[(None, None)] * self.dim)
            if not (hi.success and lo.success):
                raise InputError("core polytope must be nonempty and bounded")
            ext[k] = -hi.fun - lo.fun
        if self.dim == 2:
            V = self.vertices()
            d = 0.0
            for i in range(len(V)):
                for j in range(i + 1, len(V)):
                    d = max(d, float(np.linalg.norm(V[i] - V[j])))
            return d + 2.0 * self.radius
        # n >= 3: bounding-box diagonal, an upper bound (D only scales experiments)
        return float(np.linalg.norm(ext)) + 2.0 * self.radius

    def _project_core(self, X):
        """Dykstra projection of each row of X onto the core polytope."""
        X = np.atleast_2d(X)
        inside = np.all(X @ self.hs_n.T <= self.hs_b + 1e-15, axis=1)
        Y = X.copy()
        todo = np.flatnonzero(~inside)
        if todo.size == 0:
            return Y
        Z = X[todo].copy()
        incr = np.zeros((self.hs_n.shape[0],) + Z.shape)
        for _ in range(_DYKSTRA_MAX_CYCLES):
            moved = 0.0
            for i in range(self.hs_n.shape[0]):
                V = Z + incr[i]
                viol = V @ self.hs_n[i] - self.hs_b[i]
                Znew = V - np.maximum(viol, 0.0)[:, None] * self.hs_n[i]
                incr[i] = V - Znew
                moved = max(moved, float(np.abs(Znew - Z).max()))
                Z = Znew
            if moved < _DYKSTRA_TOL:
                break
        Y[todo] = Z
        return Y

    def level_many(self, X):
        X = _as_points(X, self.dim)
        P = self._project_core(X)
        return np.linalg.norm(X - P, axis=1) - self.radius

    def normal_many(self, X):
        X = np.atleast_2d(X)
        d = self._project_core(X) - X
        return d / np.linalg.norm(d, axis=1, keepdims=True)

    def ray_exit_many(self, X, W):
        return self._bisect_exit_many(X, W)

    def _bisect_slack(self):
        return self.radius

    def project_many(self, X):
        X = np.atleast_2d(X)
        P = self._project_core(X)
        d = X - P
        return P + self.radius * d / np.linalg.norm(d, axis=1, keepdims=True)

    def support_point(self, u):
        u = _as_point(u, self.dim, "u")
        u = u / np.linalg.norm(u)
        res = linprog(-u, A_ub=self.hs_n, b_ub=self.hs_b, bounds=[(None, None)] * self.dim)
        if not res.success:
            raise GeometryError("support LP failed on the core polytope")
        return res.x + self.radius * u

    def boundary_volume(self):
        if self.dim != 2:
            return None
        V = self.vertices()
        per = sum(float(np.linalg.norm(V[(i + 1) % len(V)] - V[i])) for i in range(len(V)))
        return per + 2.0 * math.pi * self.radius

    def kernel_args(self):
        return {
            "kind": 3,
            "r": self.radius,
            "L": 0.0,
            "center": np.empty(0),
            "axes": np.empty(0),
            "hs_n": np.ascontiguousarray(self.hs_n),
            "hs_b": np.ascontiguousarray(self.hs_b),
        }

    def to_dict(self):
        return {
            "type": "rounded_polytope",
            "dim": self.dim,
            "halfspace_normals": self.hs_n.tolist(),
            "halfspace_offsets": self.hs_b.tolist(),
            "radius": self.radius,
        }


def make_body(spec: dict) -> ConvexBody:
    """Build a body from its JSON-compatible spec dict."""
    if "type" not in spec:
        raise InputError("body spec needs a 'type' field")
    kind = spec["type"]
    try:
        if kind == "ball":
            body = Ball(spec["center"], spec["radius"])
        elif kind == "ellipsoid":
            body = Ellipsoid(spec["semi_axes"])
        elif kind == "capsule":
            body = Capsule(spec["dim"], spec["half_length"], spec["radius"])
        elif kind == "rounded_polytope":
            body = RoundedPolytope(
                spec["halfspace_normals"], spec["halfspace_offsets"], spec["radius"]
            )
        else:
            raise InputError(f"unknown body type {kind!r}")
    except KeyError as e:
        raise InputError(f"body spec missing field {e.args[0]!r}") from None
    if "dim" in spec and int(spec["dim"]) != body.dim:
        raise InputError(f"spec says dim={spec['dim']} but fields give dim={body.dim}")
    return body


def load_body(path) -> ConvexBody:
    with open(path, "r", encoding="utf-8") as fh:
        return make_body(json.load(fh))


def tangent_basis(bp: BoundaryPoint) -> np.ndarray:
    """(n-1) orthonormal vectors spanning the tangent plane at bp, rows of the result."""
    m = np.asarray(bp.normal, dtype=float)
    n = m.shape[0]
    if abs(np.dot(m, m) - 1.0) > 1e-9:
        raise InputError("normal must be a unit vector")
    A = np.concatenate([m[:, None], np.eye(n)], axis=1)
    q, _ = np.linalg.qr(A)
    return q[:, 1:n].T


def interior_point(body: ConvexBody) -> np.ndarray:
    """A point strictly inside the body (used to seed boundary walks in tests)."""
    if isinstance(body, Ball):
        return body.center.copy()
    if isinstance(body, (Ellipsoid, Capsule)):
        return np.zeros(body.dim)
    if isinstance(body, RoundedPolytope):
        # Chebyshev center of the core polytope
        n = body.dim
        c = np.zeros(n + 1)
        c[-1] = -1.0
        A = np.concatenate([body.hs_n, np.ones((body.hs_n.shape[0], 1))], axis=1)
        res = linprog(c, A_ub=A, b_ub=body.hs_b, bounds=[(None, None)] * n + [(0, None)])
        if not res.success:
            raise GeometryError("Chebyshev-center LP failed")
        return res.x[:n]
    raise InputError(f"no interior point rule for {type(body).__name__}")


def boundary_point_from_direction(body: ConvexBody, u) -> BoundaryPoint:
    """Boundary point hit by the ray from an interior point along direction u."""
    u = np.asarray(u, dtype=float)
    u = u / np.linalg.norm(u)
    x0 = interior_point(body)
    if isinstance(body, Ball):
        return body.boundary_point(body.center + body.radius * u)
    if isinstance(body, Ellipsoid):
        scale = math.sqrt(float(np.sum((u / body.semi_axes) ** 2)))
        return body.boundary_point(u / scale)
    # generic: bisection on the level function along the ray
    lo, hi = 0.0, body.diameter + 1.0
    for _ in range(_BISECT_MAX_ITER):
        mid = 0.5 * (lo + hi)
        g = body.level(x0 + mid * u)
        if abs(g) < BISECT_TOL:
            break
        if g < 0:
            lo = mid
        else:
            hi = mid
    x = body.project_many((x0 + mid * u)[None, :])[0]
    return body.boundary_point(x)


def default_start(body: ConvexBody) -> BoundaryPoint:
    """Deterministic chain start: the first-coordinate maximizer."""
    e1 = np.zeros(body.dim)
    e1[0] = 1.0
    x = body.support_point(e1)
    x = body.project_many(x[None, :])[0]
    return body.boundary_point(x)
