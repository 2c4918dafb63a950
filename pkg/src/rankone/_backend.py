"""Kernel backend selection.

The hot kernels (batched small-matrix decompositions) have two
implementations: numba @njit loops and pure-numpy gufunc code.  The numba
path is the default; set the environment variable ``RANKONE_NO_NUMBA=1``
to force the numpy fallback (also used automatically when numba is not
importable).  ``bench/kernel_bench.py`` compares the two.
"""

import os

_flag = os.environ.get("RANKONE_NO_NUMBA", "0").strip().lower()
_disabled = _flag in ("1", "true", "yes")

if not _disabled:
    try:
        import numba  # noqa: F401
        HAVE_NUMBA = True
    except ImportError:
        HAVE_NUMBA = False
else:
    HAVE_NUMBA = False

USE_NUMBA = HAVE_NUMBA and not _disabled


def backend_name():
    return "numba" if USE_NUMBA else "numpy"
