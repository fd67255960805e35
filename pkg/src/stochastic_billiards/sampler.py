"""Direction laws on the unit sphere at a boundary point, and their exact
finite-dimension normal-component distributions.

Randomness comes from counter-based Philox streams keyed by (seed, stream),
so replicas get independent, reproducible streams without coordination. All
samplers consume the raw 64-bit output sequence through two fixed transforms:

* uniform on (0,1]:   u = ((raw >> 11) + 1) * 2**-53
* uniform on [0,1):   u = (raw >> 11) * 2**-53
* standard normals are produced in Box-Muller pairs (two raws per pair,
  the spare value of an odd request is discarded, never cached).

A draw of k normals therefore consumes 2*ceil(k/2) raws; a cosine-law
direction in dimension n consumes 2*ceil(n/2) + 1 raws. Batch samplers lay
replicas out row-major over the same sequence, so replica i of a batch sees
exactly the raws a scalar sampler would see after skipping i blocks.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np
from scipy.special import betainc

from .geometry import BoundaryPoint, InputError

_RAW2F = 1.0 / 9007199254740992.0  # 2**-53
_TWO_PI = 2.0 * math.pi
_MIN_COS = 1e-12  # grazing directions below this are resampled


class DirectionLaw(enum.Enum):
    COSINE = "cosine"
    UNIFORM_HEMISPHERE = "uniform_hemisphere"
    COSINE_TWO_SIDED = "cosine_two_sided"
    UNIFORM_SPHERE = "uniform_sphere"

    @classmethod
    def coerce(cls, law):
        return law if isinstance(law, cls) else cls(str(law))


@dataclass(frozen=True)
class RngStream:
    """One reproducible Philox substream; (seed, stream) is the full key."""

    seed: int
    stream: int = 0

    def bit_generator(self, skip_raws: int = 0) -> np.random.Philox:
        key = np.array([self.seed & (2**64 - 1), self.stream & (2**64 - 1)], dtype=np.uint64)
        bg = np.random.Philox(key=key)
        if skip_raws:
            bg.advance(skip_raws // 4)  # Philox blocks hold 4 raw outputs
            if skip_raws % 4:
                bg.random_raw(skip_raws % 4)
        return bg

    def raw(self, n: int, skip_raws: int = 0) -> np.ndarray:
        return self.bit_generator(skip_raws).random_raw(n)

    def replica(self, i: int) -> "RngStream":
        return RngStream(self.seed, self.stream + i)


class RawCursor:
    """Stateful view over a stream's raw sequence (tracks draws consumed)."""

    __slots__ = ("stream", "offset")

    def __init__(self, stream: RngStream, offset: int = 0):
        self.stream = stream
        self.offset = offset

    def take(self, n: int) -> np.ndarray:
        raws = self.stream.raw(n, skip_raws=self.offset)
        self.offset += n
        return raws


def _u_open(raws):
    """Map raws to (0, 1]."""
    return ((raws >> np.uint64(11)) + np.uint64(1)) * _RAW2F


def _u_half(raws):
    """Map raws to [0, 1)."""
    return (raws >> np.uint64(11)) * _RAW2F


def _normal_columns(raws, k):
    """First k standard normals per row from Box-Muller pairs (row width 2*ceil(k/2))."""
    pairs = (k + 1) // 2
    a = _u_open(raws[:, 0 : 2 * pairs : 2])
    b = _u_half(raws[:, 1 : 2 * pairs : 2])
    rad = np.sqrt(-2.0 * np.log(a))
    theta = _TWO_PI * b
    out = np.empty((raws.shape[0], 2 * pairs))
    out[:, 0::2] = rad * np.cos(theta)
    out[:, 1::2] = rad * np.sin(theta)
    return out[:, :k]


def raws_per_normal_block(k: int) -> int:
    return 2 * ((k + 1) // 2)


def raws_per_direction(n: int, law) -> int:
    law = DirectionLaw.coerce(law)
    base = raws_per_normal_block(n)
    if law is DirectionLaw.COSINE:
        return base + 1
    if law is DirectionLaw.COSINE_TWO_SIDED:
        return base + 2
    return base


def sample_unit_ball(d: int, rng: RngStream, size=None):
    """Uniform draw(s) from the d-dimensional unit ball.

    Gaussian direction scaled by U^(1/d); consumes 2*ceil(d/2)+1 raws per draw.
    """
    if d < 1:
        raise InputError("dimension must be >= 1")
    n_draws = 1 if size is None else int(size)
    width = raws_per_normal_block(d) + 1
    raws = rng.raw(n_draws * width).reshape(n_draws, width)
    g = _normal_columns(raws, d)
    nrm = np.linalg.norm(g, axis=1, keepdims=True)
    nrm[nrm == 0.0] = 1.0
    u = _u_open(raws[:, -1])
    pts = g / nrm * (u ** (1.0 / d))[:, None]
    return pts[0] if size is None else pts


def _directions_from_raws(raws, normal, law):
    """Vectorized direction draws; returns (w, cos) with cos = w . normal."""
    n = normal.shape[0]
    N = raws.shape[0]
    if law is DirectionLaw.COSINE or law is DirectionLaw.COSINE_TWO_SIDED:
        g = _normal_columns(raws, n)
        t = g - (g @ normal)[:, None] * normal
        tnorm = np.linalg.norm(t, axis=1)
        u = _u_open(raws[:, raws_per_normal_block(n)])
        s = u ** (1.0 / (n - 1))
        c = np.sqrt(np.maximum(1.0 - s * s, 0.0))
        ok = tnorm > 1e-150
        w = np.empty((N, n))
        w[ok] = s[ok, None] * t[ok] / tnorm[ok, None] + c[ok, None] * normal
        w[~ok] = normal  # placeholder; caller resamples these rows
        cos = np.where(ok, c, 0.0)
        if law is DirectionLaw.COSINE_TWO_SIDED:
            flip = (raws[:, raws_per_normal_block(n) + 1] >> np.uint64(63)) == 1
            w[flip] -= 2.0 * c[flip, None] * normal
            cos = np.where(flip, -cos, cos)
        return w, cos
    if law is DirectionLaw.UNIFORM_HEMISPHERE or law is DirectionLaw.UNIFORM_SPHERE:
        g = _normal_columns(raws, n)
        nrm = np.linalg.norm(g, axis=1)
        ok = nrm > 1e-150
        w = np.where(ok[:, None], g / np.where(ok, nrm, 1.0)[:, None], normal)
        cos = np.where(ok, w @ normal, 0.0)
        if law is DirectionLaw.UNIFORM_HEMISPHERE:
            neg = cos < 0.0
            w[neg] = -w[neg]
            cos = np.abs(cos)
        return w, cos
    raise InputError(f"unknown direction law {law}")


def draw_directions(normal, law, cursor: RawCursor, size: int):
    """Batch direction draws through a cursor; returns (w, cos).

    Replica i reads raw block i of the cursor's sequence. One-sided laws
    resample sub-grazing draws (w . n_x < 1e-12), matching the chain's
    stepping rule; extra blocks for resamples are appended to the sequence.
    """
    law = DirectionLaw.coerce(law)
    normal = np.asarray(normal, dtype=float)
    n = normal.shape[0]
    if n < 2:
        raise InputError("direction sampling needs dim >= 2")
    width = raws_per_direction(n, law)
    raws = cursor.take(size * width).reshape(size, width)
    w, cos = _directions_from_raws(raws, normal, law)
    one_sided = law in (DirectionLaw.COSINE, DirectionLaw.UNIFORM_HEMISPHERE)
    bad = (cos < _MIN_COS) if one_sided else (np.abs(cos) < 1e-300)
    while bad.any():
        k = int(bad.sum())
        raws = cursor.take(k * width).reshape(k, width)
        w_new, cos_new = _directions_from_raws(raws, normal, law)
        w[bad], cos[bad] = w_new, cos_new
        bad2 = np.zeros_like(bad)
        bad2[bad] = (cos_new < _MIN_COS) if one_sided else (np.abs(cos_new) < 1e-300)
        bad = bad2
    return w, cos


def sample_direction(x: BoundaryPoint, law, rng: RngStream, size=None):
    """Draw unit direction(s) at x under the given law."""
    w, _ = draw_directions(x.normal, law, RawCursor(rng), 1 if size is None else int(size))
    return w[0] if size is None else w


def normal_component_cdf(t, n: int, law) -> np.ndarray | float:
    """CDF of t = w . n_x (its magnitude, for the two-sided laws) at dimension n.

    cosine law:   1 - (1 - t^2)^((n-1)/2)
    uniform law:  I_{t^2}(1/2, (n-1)/2)   (regularized incomplete beta)
    """
    law = DirectionLaw.coerce(law)
    if n < 2:
        raise InputError("dimension must be >= 2")
    t_arr = np.asarray(t, dtype=float)
    if np.any(t_arr < 0.0) or np.any(t_arr > 1.0):
        raise InputError("t must lie in [0, 1]")
    if law in (DirectionLaw.COSINE, DirectionLaw.COSINE_TWO_SIDED):
        out = 1.0 - (1.0 - t_arr**2) ** ((n - 1) / 2.0)
    else:
        out = betainc(0.5, (n - 1) / 2.0, t_arr**2)
        out = np.where(t_arr >= 1.0, 1.0, out)
    return float(out) if np.isscalar(t) else out
