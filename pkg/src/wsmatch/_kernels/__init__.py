"""Similarity kernels: compiled extension when available, pure Python otherwise.

Set WSMATCH_PURE=1 to force the pure-Python backend (used by tests and the
benchmark to compare both paths).
"""

import os

if os.environ.get("WSMATCH_PURE") == "1":
    from wsmatch._kernels._pure import (
        hausdorff_reduce,
        jaro_winkler,
        literal_hausdorff_reduce,
    )

    BACKEND = "pure"
else:
    try:
        from wsmatch._kernels._speedups import (
            hausdorff_reduce,
            jaro_winkler,
            literal_hausdorff_reduce,
        )

        BACKEND = "cython"
    except ImportError:
        from wsmatch._kernels._pure import (
            hausdorff_reduce,
            jaro_winkler,
            literal_hausdorff_reduce,
        )

        BACKEND = "pure"

__all__ = [
    "BACKEND",
    "hausdorff_reduce",
    "jaro_winkler",
    "literal_hausdorff_reduce",
]
