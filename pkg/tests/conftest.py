import numpy as np

from sl3warp.raster import ImageGrid


def smooth_image(size=64, seed=0, channels=1, exponent=1.8):
    """Seeded power-law random field, normalized to span [0, 1].

    Built straight from numpy FFTs so tests do not depend on the package's
    own texture generator.
    """
    rng = np.random.default_rng(seed)
    freq = np.fft.fftfreq(size)
    fx, fy = np.meshgrid(freq, freq)
    radius = np.hypot(fx, fy)
    with np.errstate(divide="ignore"):
        amp = np.where(radius > 0, radius ** -exponent, 0.0)
    chans = []
    for _ in range(channels):
        spec = amp * np.exp(2j * np.pi * rng.random((size, size)))
        field = np.fft.ifft2(spec).real
        lo, hi = field.min(), field.max()
        chans.append((field - lo) / (hi - lo))
    return ImageGrid(np.stack(chans, axis=-1))
