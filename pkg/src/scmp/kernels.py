"""Kernel backend selection.

The hot geometry/integration routines exist twice: a compiled Cython
extension (scmp._kernels) and a pure-Python reference (scmp._kernels_py)
with the same API and arithmetic.  The compiled one is used when present;
set SCMP_KERNELS=python or SCMP_KERNELS=cython to force a backend (cython
raises if the extension is missing).  benchmarks/kernel_bench.py compares
the two.
"""

import os

_requested = os.environ.get("SCMP_KERNELS", "auto")

if _requested == "python":
    from . import _kernels_py as _impl

    BACKEND = "python"
elif _requested in ("auto", "cython"):
    try:
        from . import _kernels as _impl  # type: ignore[attr-defined]

        BACKEND = "cython"
    except ImportError:
        if _requested == "cython":
            raise
        from . import _kernels_py as _impl

        BACKEND = "python"
else:
    raise ValueError(f"unknown SCMP_KERNELS value: {_requested!r} (use auto|python|cython)")

normalize_angle = _impl.normalize_angle
rect_corners = _impl.rect_corners
rects_overlap = _impl.rects_overlap
rect_circle_overlap = _impl.rect_circle_overlap
poses_overlap = _impl.poses_overlap
pose_overlaps_any = _impl.pose_overlaps_any
pose_blocked = _impl.pose_blocked
integrate_steps = _impl.integrate_steps
motion_blocked = _impl.motion_blocked
rs_length = _impl.rs_length
