"""Inference kernels.

The compiled extension ``_inference`` is used when it was built; otherwise the
pure-Python twin ``_inference_py`` is loaded. Set ``FUZZYSCHED_PURE_PYTHON=1``
to force the fallback.
"""

import os

if os.environ.get("FUZZYSCHED_PURE_PYTHON", "").strip() not in ("", "0"):
    from . import _inference_py as kernel
else:
    try:
        from . import _inference as kernel
    except ImportError:
        from . import _inference_py as kernel

BACKEND = kernel.BACKEND
Model = kernel.Model
clipped_centroid = kernel.clipped_centroid
degree = kernel.degree

__all__ = ["BACKEND", "Model", "clipped_centroid", "degree", "kernel"]
