"""The boundary chain itself: sequential runner (compiled or pure kernel),
vectorized batch one-step sampler, and the one-step transition density.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln

from ._core import kernels
from .geometry import BoundaryPoint, ConvexBody, InputError, default_start
from .sampler import DirectionLaw, RawCursor, RngStream, draw_directions

_LAW_CODE = {DirectionLaw.COSINE: 0, DirectionLaw.UNIFORM_HEMISPHERE: 1}


class SingularityError(ValueError):
    """Kernel density requested at coincident points."""


@dataclass
class ChainConfig:
    """Run description; `start=None` means the deterministic extreme-point rule."""

    body: ConvexBody
    steps: int
    burn_in: int = 0
    thin: int = 1
    seed: int = 0
    stream: int = 0
    start: BoundaryPoint | None = None
    law: DirectionLaw = DirectionLaw.COSINE

    def __post_init__(self):
        self.law = DirectionLaw.coerce(self.law)
        if self.steps < 0:
            raise InputError("steps must be >= 0")
        if self.burn_in < 0:
            raise InputError("burn_in must be >= 0")
        if self.thin < 1:
            raise InputError("thin must be >= 1")
        if self.law not in _LAW_CODE:
            raise InputError("chain stepping needs an inward law: cosine or uniform_hemisphere")

    def rng(self) -> RngStream:
        return RngStream(self.seed, self.stream)


@dataclass
class StepRecord:
    index: int
    position: np.ndarray
    chord_length: float
    cos_out: float
    cos_in: float


@dataclass
class Trajectory:
    """Thinned post-burn-in chain output (row r is step k[r])."""

    k: np.ndarray
    positions: np.ndarray
    chord: np.ndarray
    cos_out: np.ndarray
    cos_in: np.ndarray

    def __len__(self):
        return self.k.shape[0]


@dataclass
class ChainState:
    """Checkpoint: resuming from (position, raws_consumed) is bit-exact."""

    position: np.ndarray
    normal: np.ndarray
    stream: RngStream
    raws_consumed: int = 0


def _kernel_call(body: ConvexBody, fn_name, *args):
    ka = body.kernel_args()
    fn = getattr(kernels, fn_name)
    return fn(
        ka["kind"], body.dim, ka["r"], ka["L"], body.diameter,
        np.ascontiguousarray(ka["center"], dtype=float),
        np.ascontiguousarray(ka["axes"], dtype=float),
        np.ascontiguousarray(ka["hs_n"], dtype=float),
        np.ascontiguousarray(ka["hs_b"], dtype=float),
        *args,
    )


def run(config: ChainConfig, state: ChainState | None = None):
    """Run the chain; returns (Trajectory, ChainState).

    Pass the returned state back in to resume: the continuation is
    bit-identical to an uninterrupted run with the same seed.
    """
    body = config.body
    if state is None:
        start = config.start if config.start is not None else default_start(body)
        state = ChainState(
            position=np.array(start.position, dtype=float),
            normal=np.array(start.normal, dtype=float),
            stream=config.rng(),
        )
    ks = np.arange(config.burn_in + 1, config.steps + 1, config.thin, dtype=np.int64)
    n_rec = ks.shape[0]
    out_pos = np.empty((n_rec, body.dim))
    out_chord = np.empty(n_rec)
    out_cos_out = np.empty(n_rec)
    out_cos_in = np.empty(n_rec)
    x_state = np.array(state.position, dtype=float)
    m_state = np.array(state.normal, dtype=float)
    bitgen = state.stream.bit_generator(skip_raws=state.raws_consumed)
    consumed = _kernel_call(
        body, "run_chain", x_state, m_state,
        int(config.steps), int(config.burn_in), int(config.thin),
        _LAW_CODE[config.law], bitgen,
        out_pos, out_chord, out_cos_out, out_cos_in,
    )
    traj = Trajectory(ks, out_pos, out_chord, out_cos_out, out_cos_in)
    new_state = ChainState(x_state, m_state, state.stream, state.raws_consumed + int(consumed))
    return traj, new_state


def step(body: ConvexBody, x: BoundaryPoint, rng: RngStream,
         law: DirectionLaw = DirectionLaw.COSINE) -> StepRecord:
    """One chain step from x using the stream's first draws."""
    cfg = ChainConfig(body=body, steps=1, seed=rng.seed, stream=rng.stream, start=x, law=law)
    traj, _ = run(cfg)
    return StepRecord(1, traj.positions[0], float(traj.chord[0]),
                      float(traj.cos_out[0]), float(traj.cos_in[0]))


def first_passage_time(body: ConvexBody, start: BoundaryPoint, level: float,
                       max_steps: int, rng: RngStream,
                       law: DirectionLaw = DirectionLaw.COSINE) -> int:
    """Steps until the first coordinate reaches `level` (-1 if censored)."""
    x_state = np.array(start.position, dtype=float)
    m_state = np.array(start.normal, dtype=float)
    tau, _ = _kernel_call(
        body, "first_passage", x_state, m_state,
        float(level), int(max_steps), _LAW_CODE[DirectionLaw.coerce(law)],
        rng.bit_generator(),
    )
    return int(tau)


def sample_steps(body: ConvexBody, x: BoundaryPoint, n_samples: int, rng: RngStream,
                 law: DirectionLaw = DirectionLaw.COSINE, chunk_size: int | None = None):
    """n_samples independent one-step draws from x (vectorized batch).

    Returns a Trajectory whose row i is the step produced by raw block i of
    the stream; k is the row index. Chunking bounds peak memory for large
    batches in high dimension.
    """
    law = DirectionLaw.coerce(law)
    if law not in _LAW_CODE:
        raise InputError("one-step sampling needs an inward law")
    n = body.dim
    if chunk_size is None:
        chunk_size = max(1024, int(4_000_000 // max(n, 1)))
    pos = np.empty((n_samples, n))
    chord = np.empty(n_samples)
    cos_out = np.empty(n_samples)
    cos_in = np.empty(n_samples)
    cursor = RawCursor(rng)
    x_row = np.asarray(x.position, dtype=float)[None, :]
    m = np.asarray(x.normal, dtype=float)
    done = 0
    while done < n_samples:
        k = min(chunk_size, n_samples - done)
        W, _ = draw_directions(m, law, cursor, k)
        X = np.broadcast_to(x_row, (k, n))
        Y, _t = body.ray_exit_many(X, W)
        Y = body.project_many(Y)
        d = Y - x_row
        c = np.linalg.norm(d, axis=1)
        pos[done : done + k] = Y
        chord[done : done + k] = c
        cos_out[done : done + k] = (d @ m) / c
        ny = body.normal_many(Y)
        cos_in[done : done + k] = -np.einsum("ij,ij->i", ny, d) / c
        done += k
    return Trajectory(np.arange(n_samples, dtype=np.int64), pos, chord, cos_out, cos_in)


def cosine_kernel_constant(n: int) -> float:
    """Normalizer of the one-step density over surface measure: Gamma((n+1)/2) / pi^((n-1)/2)."""
    return math.exp(gammaln((n + 1) / 2.0) - 0.5 * (n - 1) * math.log(math.pi))


def kernel_density(body: ConvexBody, u: BoundaryPoint, v: BoundaryPoint,
                   normalized: bool = False) -> float:
    """One-step transition density cos(phi_uv) cos(phi_vu) / |u-v|^(n-1).

    With normalized=True the value is a probability density with respect to
    the surface (Lebesgue) measure on the boundary: the unnormalized kernel
    times Gamma((n+1)/2) / pi^((n-1)/2). Symmetric in (u, v) by construction.
    """
    n = body.dim
    du = v.position - u.position
    dist = float(np.linalg.norm(du))
    if dist == 0.0:
        raise SingularityError("kernel density is singular at coincident points")
    cos_uv = float(np.dot(u.normal, du)) / dist
    cos_vu = float(np.dot(v.normal, -du)) / dist
    dens = cos_uv * cos_vu / dist ** (n - 1)
    if normalized:
        dens *= cosine_kernel_constant(n)
    return dens


def write_trajectory_csv(path, traj: Trajectory, replica: int = 0):
    """CSV schema: replica,k,x_1,...,x_n,chord,cos_out,cos_in (17 significant digits)."""
    n = traj.positions.shape[1]
    header = "replica,k," + ",".join(f"x_{i+1}" for i in range(n)) + ",chord,cos_out,cos_in"
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(header + "\n")
        for r in range(len(traj)):
            cells = [str(replica), str(int(traj.k[r]))]
            cells += [format(traj.positions[r, i], ".17g") for i in range(n)]
            cells += [
                format(traj.chord[r], ".17g"),
                format(traj.cos_out[r], ".17g"),
                format(traj.cos_in[r], ".17g"),
            ]
            fh.write(",".join(cells) + "\n")
