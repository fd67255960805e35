"""Empirical diagnostics for the boundary chain: step-size quantiles, local
ball-volume radii, one-step overlap, mixing curves against the uniform
reference, and the capsule first-coordinate experiments with their
quadrature oracle.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import betainc, gammaln
from scipy.stats import binom

from .chain import ChainConfig, Trajectory, first_passage_time, run, sample_steps
from .geometry import (
    Ball,
    BoundaryPoint,
    Capsule,
    ConvexBody,
    InputError,
    default_start,
)
from .sampler import RngStream, sample_unit_ball
from .spectral2d import boundary_curve


# ---------------------------------------------------------------------------
# partitions of the boundary and binned total variation
# ---------------------------------------------------------------------------


class Partition:
    """Measurable binning of the boundary with computable reference masses."""

    bins: int

    def bin_of(self, positions) -> np.ndarray:
        raise NotImplementedError

    def reference_masses(self) -> np.ndarray:
        raise NotImplementedError

    def key(self):
        """Identity used to check two histograms share a partition."""
        return (type(self).__name__, self.bins)


class ArcPartition(Partition):
    """Equal-arclength arcs of a 2D boundary; uniform reference masses."""

    def __init__(self, body: ConvexBody, bins: int):
        if bins < 2:
            raise InputError("need at least 2 bins")
        self.body = body
        self.bins = int(bins)
        self.curve = boundary_curve(body)

    def bin_of(self, positions):
        s = self.curve.arclengths(np.atleast_2d(positions))
        idx = (s / self.curve.perimeter * self.bins).astype(int)
        return np.clip(idx, 0, self.bins - 1)

    def reference_masses(self):
        return np.full(self.bins, 1.0 / self.bins)

    def key(self):
        return ("arc", self.bins, self.curve.perimeter)


class CoordinatePartition(Partition):
    """Equal-width bins of the first coordinate (balls and capsules, n >= 2).

    Reference masses are closed-form slice integrals of the surface measure;
    `sign_splits` optionally refines each slab by the signs of coordinates
    x_2, .., x_{1+sign_splits} (factor 2^k by symmetry).
    """

    def __init__(self, body: ConvexBody, slabs: int, sign_splits: int = 0):
        if slabs < 2:
            raise InputError("need at least 2 slabs")
        if not isinstance(body, (Ball, Capsule)):
            raise InputError("closed-form slab masses need a ball or capsule")
        if sign_splits < 0 or sign_splits > body.dim - 1:
            raise InputError("sign_splits out of range")
        if isinstance(body, Ball) and np.any(body.center != 0.0):
            raise InputError("slab masses assume a centered body")
        self.body = body
        self.slabs = int(slabs)
        self.sign_splits = int(sign_splits)
        self.bins = self.slabs * (2**self.sign_splits)
        if isinstance(body, Ball):
            self.lo, self.hi = -body.radius, body.radius
        else:
            self.lo = -body.half_length - body.radius
            self.hi = body.half_length + body.radius
        edges = np.linspace(self.lo, self.hi, self.slabs + 1)
        cdf = self._coordinate_cdf(edges)
        self._slab_masses = np.diff(cdf)
        self._slab_masses /= self._slab_masses.sum()

    def _coordinate_cdf(self, x):
        """P(first coordinate <= x) under uniform surface measure."""
        n = self.body.dim
        x = np.asarray(x, dtype=float)
        if isinstance(self.body, Ball):
            t = np.clip(x / self.body.radius, -1.0, 1.0)
            return betainc((n - 1) / 2.0, (n - 1) / 2.0, (t + 1.0) / 2.0)
        L, r = self.body.half_length, self.body.radius
        sphere = 2.0 * math.pi ** (n / 2.0) / math.gamma(n / 2.0) * r ** (n - 1)
        cyl = self.body.boundary_volume() - sphere
        total = sphere + cyl
        # left cap: x1 = -L - r*t with t in [0, 1] distributed as a hemisphere slice
        t = np.clip((-L - x) / r, 0.0, 1.0)
        out = 0.5 * sphere * (1.0 - betainc(0.5, (n - 1) / 2.0, t**2))
        if L > 0.0:
            # cylindrical part: surface measure uniform in x1 on [-L, L]
            out = out + cyl * np.clip((x + L) / (2.0 * L), 0.0, 1.0)
        t = np.clip((x - L) / r, 0.0, 1.0)
        out = out + 0.5 * sphere * betainc(0.5, (n - 1) / 2.0, t**2)
        return out / total

    def bin_of(self, positions):
        P = np.atleast_2d(positions)
        width = (self.hi - self.lo) / self.slabs
        idx = np.clip(((P[:, 0] - self.lo) / width).astype(int), 0, self.slabs - 1)
        for k in range(self.sign_splits):
            idx = idx * 2 + (P[:, 1 + k] > 0.0)
        return idx

    def reference_masses(self):
        masses = self._slab_masses
        for _ in range(self.sign_splits):
            masses = 0.5 * np.repeat(masses, 2)
        return masses

    def key(self):
        return ("coord", self.bins, self.lo, self.hi, self.sign_splits)


@dataclass
class Histogram:
    partition: Partition
    masses: np.ndarray


def histogram(partition: Partition, positions) -> Histogram:
    idx = partition.bin_of(positions)
    counts = np.bincount(idx, minlength=partition.bins).astype(float)
    return Histogram(partition, counts / counts.sum())


def empirical_tv(hist_p, hist_q) -> float:
    """Half the L1 distance of binned masses; lower-bounds the true TV."""
    if isinstance(hist_p, Histogram) and isinstance(hist_q, Histogram):
        if hist_p.partition.key() != hist_q.partition.key():
            raise InputError("histograms use different partitions")
        p, q = hist_p.masses, hist_q.masses
    else:
        p = np.asarray(hist_p, dtype=float)
        q = np.asarray(hist_q, dtype=float)
    if p.shape != q.shape:
        raise InputError("histograms have different bin counts")
    if abs(p.sum() - 1.0) > 1e-9 or abs(q.sum() - 1.0) > 1e-9:
        raise InputError("histograms must be normalized")
    return 0.5 * float(np.abs(p - q).sum())


# ---------------------------------------------------------------------------
# step-size quantile F and ball-fraction radius s_gamma
# ---------------------------------------------------------------------------


@dataclass
class QuantileEstimate:
    value: float
    ci_lo: float
    ci_hi: float
    level: float
    samples: int


def estimate_F(body: ConvexBody, x: BoundaryPoint, samples: int,
               level: float = 1.0 / 128.0, rng: RngStream | None = None,
               confidence: float = 0.95) -> QuantileEstimate:
    """Empirical level-quantile of the one-step chord length from x.

    The confidence interval comes from binomial order statistics.
    """
    if samples < 10_000:
        raise InputError("need at least 1e4 samples for a stable tail quantile")
    if not 0.0 < level < 1.0:
        raise InputError("level must be in (0,1)")
    rng = rng if rng is not None else RngStream(0)
    chords = np.sort(sample_steps(body, x, samples, rng).chord)
    k = max(1, math.ceil(level * samples))
    alpha = 1.0 - confidence
    k_lo = int(binom.ppf(alpha / 2.0, samples, level))
    k_hi = int(binom.ppf(1.0 - alpha / 2.0, samples, level))
    k_lo = min(max(k_lo, 1), samples)
    k_hi = min(max(k_hi, 1), samples)
    return QuantileEstimate(
        value=float(chords[k - 1]),
        ci_lo=float(chords[k_lo - 1]),
        ci_hi=float(chords[k_hi - 1]),
        level=level,
        samples=samples,
    )


@dataclass
class BallFractionRadius:
    value: float
    fraction: float
    se: float
    gamma: float
    mc_points: int
    at_halfspace_limit: bool = False


def s_gamma(body: ConvexBody, x: BoundaryPoint, gamma: float,
            mc_points: int = 100_000, rng: RngStream | None = None) -> BallFractionRadius:
    """Largest t with vol((x + t*B) intersect K) / vol(t*B) >= gamma.

    The fraction is estimated with one fixed set of unit-ball points reused
    across radii (common random numbers), which makes the Monte Carlo
    fraction exactly nonincreasing in t, so the bisection is sound.
    """
    if not 0.0 < gamma:
        raise InputError("gamma must be positive")
    if mc_points < 10_000:
        raise InputError("need at least 1e4 Monte Carlo points")
    if gamma >= 0.5:
        # at a smooth boundary point the t -> 0 limit of the fraction is 1/2
        return BallFractionRadius(0.0, 0.5, 0.0, gamma, mc_points, True)
    rng = rng if rng is not None else RngStream(0)
    n = body.dim
    U = sample_unit_ball(n, rng, size=mc_points)
    x0 = np.asarray(x.position, dtype=float)

    def frac(t):
        return float(np.mean(body.contains_many(x0 + t * U)))

    se = math.sqrt(gamma * (1.0 - gamma) / mc_points)
    lo = 1e-6 * body.diameter
    hi = body.diameter + 1.0
    g_hi = frac(hi)
    for _ in range(10):
        if g_hi < gamma:
            break
        hi *= 2.0
        g_hi = frac(hi)
    for _ in range(80):
        mid = 0.5 * (lo + hi)
        if frac(mid) >= gamma:
            lo = mid
        else:
            hi = mid
        if hi - lo < 1e-9 * body.diameter:
            break
    return BallFractionRadius(lo, frac(lo), se, gamma, mc_points)


def overlap_tv(body: ConvexBody, u: BoundaryPoint, v: BoundaryPoint,
               samples: int, partition: Partition,
               rng: RngStream | None = None) -> float:
    """Binned TV distance between the one-step laws from u and from v."""
    rng = rng if rng is not None else RngStream(0)
    hu = histogram(partition, sample_steps(body, u, samples, rng.replica(0)).positions)
    hv = histogram(partition, sample_steps(body, v, samples, rng.replica(1)).positions)
    return empirical_tv(hu, hv)


# ---------------------------------------------------------------------------
# mixing curves (fresh-start replica ensembles)
# ---------------------------------------------------------------------------


@dataclass
class MixingCurve:
    checkpoints: np.ndarray
    tv: np.ndarray
    se: np.ndarray
    warm_start_bound: float
    replicas: int


def mixing_curve(config: ChainConfig, partition: Partition, replicas: int,
                 checkpoints) -> MixingCurve:
    """TV to the uniform reference at the given step counts.

    Each replica is a fresh chain from the configured start with its own
    stream (config.stream + r); the TV at checkpoint k compares the
    ensemble histogram of X_k with the partition's reference masses.
    """
    ks = np.array(sorted(set(int(k) for k in checkpoints)), dtype=np.int64)
    if np.any(ks < 0):
        raise InputError("checkpoints must be >= 0")
    if replicas < 2:
        raise InputError("need at least 2 replicas")
    kmax = int(ks.max())
    start = config.start if config.start is not None else default_start(config.body)
    pi = partition.reference_masses()
    counts = np.zeros((ks.shape[0], partition.bins))
    start_bin = int(partition.bin_of(start.position[None, :])[0])
    for r in range(replicas):
        if kmax > 0:
            cfg = ChainConfig(
                body=config.body, steps=kmax, burn_in=0, thin=1,
                seed=config.seed, stream=config.stream + r, start=start, law=config.law,
            )
            traj, _ = run(cfg)
            idx = partition.bin_of(traj.positions)
        for j, k in enumerate(ks):
            if k == 0:
                counts[j, start_bin] += 1.0
            else:
                counts[j, idx[k - 1]] += 1.0
    tv = 0.5 * np.abs(counts / replicas - pi).sum(axis=1)
    noise = 0.5 * np.sqrt(pi * (1.0 - pi) / replicas).sum()
    q0 = np.zeros(partition.bins)
    q0[start_bin] = 1.0
    return MixingCurve(
        checkpoints=ks,
        tv=tv,
        se=np.full(ks.shape[0], noise),
        warm_start_bound=float((q0 / pi).max()),
        replicas=replicas,
    )


# ---------------------------------------------------------------------------
# capsule first-coordinate experiments and the variance oracle
# ---------------------------------------------------------------------------


@dataclass
class CapsuleReport:
    n: int
    half_length: float
    replicas: int
    mean_z1: float
    mean_z1_se: float
    var_z1_hat: float
    var_z1_se: float
    taus: np.ndarray | None
    tau_level: float | None

    @property
    def tau_median(self):
        if self.taus is None or self.taus.size == 0:
            return None
        ok = self.taus[self.taus >= 0]
        return float(np.median(ok)) if ok.size else None


def capsule_start(n: int, half_length: float, radius: float = 1.0) -> tuple[Capsule, BoundaryPoint]:
    """Capsule with the deterministic x_1 = 0 start on its cylindrical part."""
    body = Capsule(n, half_length, radius)
    x = np.zeros(n)
    x[1] = radius
    m = np.zeros(n)
    m[1] = -1.0
    return body, BoundaryPoint(x, m)


def capsule_experiment(n: int, half_length: float, steps: int, replicas: int,
                       seed: int, tau_replicas: int | None = None,
                       tau_level: float | None = None) -> CapsuleReport:
    """Single-step first-coordinate increments on the unit-radius capsule,
    plus optional first-passage times to x_1 >= half_length / 2.

    Each passage replica runs its own stream; `steps` caps the passage run
    length (censored runs report tau = -1).
    """
    if n < 3:
        raise InputError("the capsule experiment needs dimension >= 3")
    body, start = capsule_start(n, half_length)
    batch = sample_steps(body, start, replicas, RngStream(seed, 0))
    z1 = batch.positions[:, 0]
    mean = float(z1.mean())
    var = float(z1.var(ddof=1))
    m4 = float(((z1 - mean) ** 4).mean())
    var_se = math.sqrt(max(m4 - var**2, 0.0) / replicas)
    mean_se = math.sqrt(var / replicas)
    if tau_replicas is None:
        tau_replicas = min(replicas, 2000)
    taus = None
    level = half_length / 2.0 if tau_level is None else float(tau_level)
    if tau_replicas > 0:
        taus = np.empty(tau_replicas, dtype=np.int64)
        for i in range(tau_replicas):
            taus[i] = first_passage_time(
                body, start, level, steps, RngStream(seed, 1 + i)
            )
    return CapsuleReport(
        n=n,
        half_length=half_length,
        replicas=replicas,
        mean_z1=mean,
        mean_z1_se=mean_se,
        var_z1_hat=var,
        var_z1_se=var_se,
        taus=taus,
        tau_level=level if tau_replicas > 0 else None,
    )


def var_z1_quadrature(n: int, points: int = 240) -> float:
    """Oracle for the one-step first-coordinate variance on the unit cylinder.

    Tensor Gauss-Legendre quadrature of
        E[(1 - |X|^2) * 4 X_1^2 / (1 - X_1^2)^2],  X uniform on B_{n-1},
    written in the smoothing variables x = sin(phi), r = rho cos(phi):
        c_n * Int 4 sin^2(phi) cos^{n-3}(phi) dphi * Int (1 - rho^2) rho^{n-3} drho
    with the joint density of (x, |X'|) giving
        c_n = (n-2) Gamma((n+1)/2) / (sqrt(pi) Gamma(n/2)).
    """
    if n < 3:
        raise InputError("the variance integral needs dimension >= 3")
    c_n = (n - 2) * math.exp(gammaln((n + 1) / 2.0) - gammaln(n / 2.0)) / math.sqrt(math.pi)
    xg, wg = np.polynomial.legendre.leggauss(points)
    phi = 0.5 * math.pi * xg
    wphi = 0.5 * math.pi * wg
    rho = 0.5 * (xg + 1.0)
    wrho = 0.5 * wg
    f_phi = 4.0 * np.sin(phi) ** 2 * np.cos(phi) ** (n - 3)
    f_rho = (1.0 - rho**2) * rho ** (n - 3)
    val = c_n * float(wphi @ f_phi) * float(wrho @ f_rho)
    if not math.isfinite(val) or val <= 0.0:
        raise RuntimeError("variance quadrature failed to converge")
    return val


# ---------------------------------------------------------------------------
# long-run boundary fractions
# ---------------------------------------------------------------------------


def boundary_fraction(traj: Trajectory, region, batches: int = 100):
    """Long-run fraction of recorded states in the region, with batch-means SE.

    `region` is a vectorized predicate over positions (N, n) -> bool (N,).
    """
    mask = np.asarray(region(traj.positions), dtype=float)
    n = mask.shape[0]
    if n == 0:
        raise InputError("empty trajectory")
    frac = float(mask.mean())
    nb = min(batches, n)
    size = n // nb
    if size >= 1 and nb >= 2:
        means = mask[: nb * size].reshape(nb, size).mean(axis=1)
        se = float(means.std(ddof=1) / math.sqrt(nb))
    else:
        se = float(mask.std(ddof=1) / math.sqrt(n))
    return frac, se
