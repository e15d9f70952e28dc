"""Backend selection for the shortest-path kernels.

The compiled extension is used when it imports; otherwise the pure-Python
module is used. Set ``WSPAN_PURE_PYTHON=1`` to force the fallback.
"""

import os

if os.environ.get("WSPAN_PURE_PYTHON", "") not in ("", "0"):
    from wspan import _pykernels as _impl

    BACKEND = "python"
else:
    try:
        from wspan import _ckernels as _impl

        BACKEND = "cython"
    except ImportError:  # extension not built
        from wspan import _pykernels as _impl

        BACKEND = "python"

sssp = _impl.sssp
constrained_sssp = _impl.constrained_sssp
tree_missing_counts = _impl.tree_missing_counts
mark_tree_paths = _impl.mark_tree_paths
mark_prefix_suffix = _impl.mark_prefix_suffix

__all__ = [
    "BACKEND",
    "sssp",
    "constrained_sssp",
    "tree_missing_counts",
    "mark_tree_paths",
    "mark_prefix_suffix",
]
