"""Compiled extension vs pure-Python kernel: same draws, same bits."""

import os
import subprocess
import sys

import numpy as np
import pytest

import stochastic_billiards as sb
from stochastic_billiards import _kernels_py
from stochastic_billiards._core import COMPILED, kernels

compiled = pytest.importorskip("stochastic_billiards._kernels")


def _run(mod, body, steps, law, seed=(7, 3)):
    start = sb.default_start(body)
    ka = body.kernel_args()
    x = np.array(start.position, float)
    m = np.array(start.normal, float)
    pos = np.empty((steps, body.dim))
    ch = np.empty(steps)
    co = np.empty(steps)
    ci = np.empty(steps)
    bg = sb.RngStream(*seed).bit_generator()
    consumed = mod.run_chain(
        ka["kind"], body.dim, ka["r"], ka["L"], body.diameter,
        np.ascontiguousarray(ka["center"], float),
        np.ascontiguousarray(ka["axes"], float),
        np.ascontiguousarray(ka["hs_n"], float),
        np.ascontiguousarray(ka["hs_b"], float),
        x, m, steps, 0, 1, law, bg, pos, ch, co, ci,
    )
    return pos, ch, co, ci, consumed, x, m


BODIES = [
    sb.Ball([0.0, 0.0], 1.0),
    sb.Ball([0.5, -0.2, 0.1], 2.0),
    sb.Ellipsoid([2.0, 1.0]),
    sb.Ellipsoid([2.0, 1.0, 1.5]),
    sb.Capsule(2, 2.0, 1.0),
    sb.Capsule(8, 4.0, 1.0),
    sb.RoundedPolytope([[1, 0], [0, 1], [-1, 0], [0, -1]], [1, 1, 1, 1], 0.5),
]


@pytest.mark.parametrize("law", [0, 1], ids=["cosine", "hemisphere"])
@pytest.mark.parametrize("body", BODIES, ids=lambda b: f"{b.kind}{b.dim}")
def test_trajectories_bit_identical(body, law):
    steps = 2000 if body.kind in ("ball", "ellipsoid") else 600
    a = _run(compiled, body, steps, law)
    b = _run(_kernels_py, body, steps, law)
    for i in range(4):
        assert np.array_equal(a[i], b[i])
    assert a[4] == b[4]  # raw draws consumed
    assert np.array_equal(a[5], b[5])  # final position
    assert np.array_equal(a[6], b[6])  # final normal


def test_first_passage_bit_identical():
    body = sb.Capsule(6, 4.0, 1.0)
    ka = body.kernel_args()
    outs = []
    for mod in (compiled, _kernels_py):
        start = sb.capsule_start(6, 4.0)[1]
        x = np.array(start.position, float)
        m = np.array(start.normal, float)
        bg = sb.RngStream(99, 1).bit_generator()
        outs.append(
            mod.first_passage(
                ka["kind"], body.dim, ka["r"], ka["L"], body.diameter,
                np.ascontiguousarray(ka["center"], float),
                np.ascontiguousarray(ka["axes"], float),
                np.ascontiguousarray(ka["hs_n"], float),
                np.ascontiguousarray(ka["hs_b"], float),
                x, m, 2.0, 10_000, 0, bg,
            )
            + (x.copy(),)
        )
    assert outs[0][0] == outs[1][0] > 0
    assert outs[0][1] == outs[1][1]
    assert np.array_equal(outs[0][2], outs[1][2])


def test_compiled_kernel_consumes_exactly_reported_raws(circle):
    steps = 500
    a = _run(compiled, circle, steps, 0, seed=(5, 5))
    bg = sb.RngStream(5, 5).bit_generator()
    start = sb.default_start(circle)
    ka = circle.kernel_args()
    x = np.array(start.position, float)
    m = np.array(start.normal, float)
    pos = np.empty((steps, 2))
    ch = np.empty(steps)
    co = np.empty(steps)
    ci = np.empty(steps)
    compiled.run_chain(ka["kind"], 2, ka["r"], ka["L"], circle.diameter,
                       ka["center"], ka["axes"], ka["hs_n"], ka["hs_b"],
                       x, m, steps, 0, 1, 0, bg, pos, ch, co, ci)
    after = bg.random_raw(8)
    expect = sb.RngStream(5, 5).raw(8, skip_raws=a[4])
    assert np.array_equal(after, expect)


def test_env_var_forces_pure_fallback():
    code = (
        "import stochastic_billiards as sb; "
        "print(sb.COMPILED)"
    )
    env = dict(os.environ, STOCHASTIC_BILLIARDS_PURE="1")
    out = subprocess.run([sys.executable, "-c", code], env=env,
                         capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "False"


def test_selected_kernel_is_compiled_here():
    assert COMPILED
    assert kernels is compiled
