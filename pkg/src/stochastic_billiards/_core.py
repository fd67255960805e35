"""Stepping-kernel selection.

The compiled extension is preferred; the pure-Python twin is used when the
extension is missing or when STOCHASTIC_BILLIARDS_PURE is set (nonempty) in
the environment. Both expose the same functions and produce bit-identical
trajectories, so the choice only affects speed.
"""

import os

if os.environ.get("STOCHASTIC_BILLIARDS_PURE"):
    from . import _kernels_py as kernels
else:
    try:
        from . import _kernels as kernels  # noqa: F401
    except ImportError:
        from . import _kernels_py as kernels

COMPILED = bool(getattr(kernels, "COMPILED", False))
