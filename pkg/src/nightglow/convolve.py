"""Exact frequency-domain 2D convolution for large glow kernels.

Convolution is true linear convolution with zero padding of floor(s/2)
on each side (a night scene's physical surround is darkness), cropped
back to the input dimensions. Transform sizes are rounded up to
5-smooth lengths so performance stays predictable even for kernels
wider than the image itself.
"""

from __future__ import annotations

import numpy as np

from .errors import SizeMismatchError
from .image import validate_kernel


def next_fast_len(n: int) -> int:
    """Smallest 5-smooth integer >= n."""
    if n <= 6:
        return max(1, n)
    best: int | None = None
    p5 = 1
    while p5 < 2 * n:
        p35 = p5
        while p35 < 2 * n:
            # round p35 * 2^k up to the first value >= n
            p = p35
            while p < n:
                p *= 2
            if p == n:
                return n
            if best is None or p < best:
                best = p
            p35 *= 3
        p5 *= 5
    assert best is not None
    return best


def fft_convolve(image: np.ndarray, kernel: np.ndarray) -> np.ndarray:
    """Convolve each channel of an image with one 2D kernel.

    Returns the centered 'same'-size result of the linear convolution:
    an impulse at pixel p reproduces the kernel centered at p. The
    kernel need not be normalized; linearity is preserved either way.
    """
    k = validate_kernel(kernel)
    arr = np.asarray(image, dtype=np.float64)
    squeeze = arr.ndim == 2
    if squeeze:
        arr = arr[:, :, None]
    h, w, nchan = arr.shape
    s = k.shape[0]
    half = s // 2
    if s > h + 2 * half or s > w + 2 * half:
        raise SizeMismatchError(
            f"kernel {s}x{s} exceeds zero-padded image {h + 2 * half}x{w + 2 * half}"
        )
    fh = next_fast_len(h + s - 1)
    fw = next_fast_len(w + s - 1)
    kf = np.fft.rfft2(k, s=(fh, fw))
    out = np.empty_like(arr)
    for c in range(nchan):
        cf = np.fft.rfft2(arr[:, :, c], s=(fh, fw))
        full = np.fft.irfft2(cf * kf, s=(fh, fw))
        out[:, :, c] = full[half : half + h, half : half + w]
    return out[:, :, 0] if squeeze else out
