"""Benchmark the sequential stepping kernel: compiled extension vs the
pure-Python fallback. Both produce bit-identical trajectories, so this is a
pure speed comparison.

Usage: python3 benchmarks/bench_step_kernel.py [steps]
"""

import sys
import time

import numpy as np

import stochastic_billiards as sb
from stochastic_billiards import _kernels_py

try:
    from stochastic_billiards import _kernels as _compiled
except ImportError:
    _compiled = None

BODIES = [
    ("circle", sb.Ball([0.0, 0.0], 1.0)),
    ("sphere S^2", sb.Ball([0.0, 0.0, 0.0], 1.0)),
    ("stadium L=4", sb.Capsule(2, 4.0, 1.0)),
    ("capsule n=8", sb.Capsule(8, 4.0, 1.0)),
    ("rounded square", sb.RoundedPolytope(
        [[1, 0], [0, 1], [-1, 0], [0, -1]], [1, 1, 1, 1], 0.5)),
]


def run_kernel(mod, body, steps):
    start = sb.default_start(body)
    ka = body.kernel_args()
    x = np.array(start.position, float)
    m = np.array(start.normal, float)
    pos = np.empty((steps, body.dim))
    ch = np.empty(steps)
    co = np.empty(steps)
    ci = np.empty(steps)
    bg = sb.RngStream(1, 0).bit_generator()
    t0 = time.perf_counter()
    mod.run_chain(ka["kind"], body.dim, ka["r"], ka["L"], body.diameter,
                  np.ascontiguousarray(ka["center"], float),
                  np.ascontiguousarray(ka["axes"], float),
                  np.ascontiguousarray(ka["hs_n"], float),
                  np.ascontiguousarray(ka["hs_b"], float),
                  x, m, steps, 0, 1, 0, bg, pos, ch, co, ci)
    return time.perf_counter() - t0


def main():
    steps = int(sys.argv[1]) if len(sys.argv) > 1 else 200_000
    print(f"sequential chain kernel, {steps} steps per body\n")
    print(f"{'body':16s} {'pure (steps/s)':>16s} {'compiled (steps/s)':>20s} {'speedup':>9s}")
    for name, body in BODIES:
        pure_steps = max(steps // 100, 2000)  # fallback is ~100x slower
        t_pure = run_kernel(_kernels_py, body, pure_steps)
        rate_pure = pure_steps / t_pure
        if _compiled is not None:
            t_comp = run_kernel(_compiled, body, steps)
            rate_comp = steps / t_comp
            print(f"{name:16s} {rate_pure:16.0f} {rate_comp:20.0f} {rate_comp/rate_pure:8.1f}x")
        else:
            print(f"{name:16s} {rate_pure:16.0f} {'(not built)':>20s} {'-':>9s}")


if __name__ == "__main__":
    main()
