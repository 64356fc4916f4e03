"""Translation estimation by normalized cross-power-spectrum correlation.

The displacement between two equal-size rasters is read from the inverse
FFT of the phase-only cross spectrum.  A Hann window suppresses wrap-around
from non-periodic content; axes that are genuinely periodic (the angular
axis of a log-polar warp) are left unwindowed.  The integer peak can be
refined per axis by a three-point parabolic fit.
"""

from __future__ import annotations

import numpy as np

from .raster import ImageGrid

__all__ = ["phase_correlate"]


def phase_correlate(
    a: ImageGrid,
    b: ImageGrid,
    *,
    window: bool = True,
    window_power: float = 1.0,
    circular_vertical: bool = False,
    subpixel: bool = True,
    band_limit: float | None = None,
) -> tuple[np.ndarray, float]:
    """Displacement of ``b``'s content relative to ``a``.

    Returns ``((dx, dy), confidence)`` such that ``b(p) ~ a(p - (dx, dy))``,
    with offsets unwrapped into ``(-n/2, n/2]``.  Multi-channel inputs
    average their phase spectra.  ``confidence`` is the correlation peak
    over the total response magnitude, clipped to ``[0, 1]``; two all-zero
    or mismatched-content images give confidence 0 at displacement (0, 0).

    ``circular_vertical`` marks the vertical axis as periodic, exempting it
    from the window (used when correlating scale+rotation warps).
    ``window_power`` raises the Hann taper, concentrating weight toward
    the center.  ``band_limit`` applies a Gaussian low-pass (sigma in
    cycles/pixel) to the normalized spectrum to locate the consensus
    displacement when the two images differ by more than a pure shift; the
    final peak is then the raw-surface argmax inside that neighborhood, so
    exact shifts stay exact.
    """
    if a.pixels.shape != b.pixels.shape:
        raise ValueError(
            f"images must have identical shape, got {a.pixels.shape} vs {b.pixels.shape}"
        )
    h, w = a.height, a.width
    win = _window2d(h, w, window, window_power, circular_vertical)

    spectrum = np.zeros((h, w), dtype=complex)
    for ch in range(a.channels):
        fa = np.fft.fft2(a.pixels[:, :, ch] * win)
        fb = np.fft.fft2(b.pixels[:, :, ch] * win)
        cross = np.conj(fa) * fb
        mag = np.abs(cross)
        floor = mag.max() * 1e-15
        if floor == 0.0:
            continue
        np.divide(cross, mag, out=cross, where=mag > floor)
        cross[mag <= floor] = 0.0
        spectrum += cross
    surface = np.fft.ifft2(spectrum).real / max(a.channels, 1)

    total = np.abs(surface).sum()
    if total == 0.0:
        return np.zeros(2), 0.0

    if band_limit is None:
        iy, ix = np.unravel_index(int(np.argmax(surface)), surface.shape)
    else:
        fy = np.fft.fftfreq(h)[:, None]
        fx = np.fft.fftfreq(w)[None, :]
        smooth = np.fft.ifft2(
            spectrum * np.exp(-(fx**2 + fy**2) / (2.0 * band_limit**2))
        ).real
        cy, cx = np.unravel_index(int(np.argmax(smooth)), smooth.shape)
        iy, ix = _guided_argmax(surface, cy, cx, _REFINE_RADIUS)

    peak = float(surface[iy, ix])
    confidence = float(np.clip(peak / total, 0.0, 1.0))

    dx = float(ix if ix <= w // 2 else ix - w)
    dy = float(iy if iy <= h // 2 else iy - h)
    if subpixel:
        dx += _parabolic_offset(surface[iy, (ix - 1) % w], peak, surface[iy, (ix + 1) % w])
        dy += _parabolic_offset(surface[(iy - 1) % h, ix], peak, surface[(iy + 1) % h, ix])
    return np.array([dx, dy]), confidence


# Neighborhood (pixels) searched around the band-limited consensus peak:
# wide enough to recover the exact peak of a clean shift, narrow enough that
# a strong stray vote cannot drag the estimate off the consensus.
_REFINE_RADIUS = 2


def _guided_argmax(surface: np.ndarray, cy: int, cx: int, radius: int) -> tuple[int, int]:
    h, w = surface.shape
    rows = (np.arange(cy - radius, cy + radius + 1)) % h
    cols = (np.arange(cx - radius, cx + radius + 1)) % w
    patch = surface[np.ix_(rows, cols)]
    py, px = np.unravel_index(int(np.argmax(patch)), patch.shape)
    return int(rows[py]), int(cols[px])


def _window2d(
    h: int, w: int, window: bool, power: float, circular_vertical: bool
) -> np.ndarray:
    if not window:
        return np.ones((h, w))
    wx = np.hanning(w) ** power
    wy = np.ones(h) if circular_vertical else np.hanning(h) ** power
    return np.outer(wy, wx)


def _parabolic_offset(left: float, center: float, right: float) -> float:
    denom = left - 2.0 * center + right
    if denom == 0.0:
        return 0.0
    off = 0.5 * (left - right) / denom
    # a refinement beyond one pixel means the fit is meaningless
    return off if abs(off) < 1.0 else 0.0
