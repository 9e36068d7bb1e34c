"""Backend facade for the hot numeric kernels.

The default path is numba-compiled; set FRONTLAB_DISABLE_NUMBA=1 to force
the pure-numpy reference path (same semantics, used as the fallback when
numba is unavailable).  `benchmarks/bench_kernels.py` compares the two.
"""

import os

import numpy as np

_flag = os.environ.get("FRONTLAB_DISABLE_NUMBA", "")
if _flag not in ("", "0"):
    from . import _kernels_np as _impl

    USING_NUMBA = False
else:
    try:
        from . import _kernels_nb as _impl

        USING_NUMBA = True
    except ImportError:  # pragma: no cover - numba is a declared dependency
        from . import _kernels_np as _impl

        USING_NUMBA = False

polyval_ascending = _impl.polyval_ascending
conv_clamped = _impl.conv_clamped
thomas = _impl.thomas
step_scalar_local = _impl.step_scalar_local
step_scalar_nonlocal = _impl.step_scalar_nonlocal
step_lv = _impl.step_lv


def conv_fft(w, kappa, left_val, right_val):
    """FFT evaluation of the same clamped convolution.

    Optional fast path for very large grids; callers must require agreement
    with `conv_clamped` to 1e-10 before trusting it (the direct summation is
    the bit-reproducible default).
    """
    k_half = (len(kappa) - 1) // 2
    wext = np.concatenate(
        [np.full(k_half, left_val), w, np.full(k_half, right_val)]
    )
    n_full = len(wext) + len(kappa) - 1
    out = np.fft.irfft(np.fft.rfft(wext, n_full) * np.fft.rfft(kappa, n_full), n_full)
    return out[2 * k_half : 2 * k_half + len(w)]
