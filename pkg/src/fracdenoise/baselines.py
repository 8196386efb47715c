"""Gaussian and median reference filters."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import ndimage

from ._validation import InvalidArgumentError, check_image, check_int, check_real

__all__ = ["FilterSpec", "gaussian_weights", "gaussian_filter", "median_filter"]


@dataclass(frozen=True)
class FilterSpec:
    kind: str = "gaussian"
    radius: int = 2
    sigma: float = 1.0

    def __post_init__(self):
        if self.kind not in ("gaussian", "median"):
            raise InvalidArgumentError(f"kind must be 'gaussian' or 'median', got {self.kind!r}")
        check_int(self.radius, "radius", low=1)
        check_real(self.sigma, "sigma", low=0, low_open=True)


def gaussian_weights(sigma: float, radius: int) -> np.ndarray:
    """Normalised 1D weights ``exp(-i^2 / (2 sigma^2))`` for ``i = -radius..radius``."""
    i = np.arange(-radius, radius + 1, dtype=np.float64)
    w = np.exp(-(i**2) / (2.0 * sigma**2))
    return w / w.sum()


def gaussian_filter(u, spec: FilterSpec) -> np.ndarray:
    """Separable Gaussian blur with mirror padding (edge sample duplicated)."""
    if spec.kind != "gaussian":
        raise InvalidArgumentError(f"gaussian_filter needs kind='gaussian', got {spec.kind!r}")
    u = check_image(u)
    w = gaussian_weights(spec.sigma, spec.radius)
    # scipy's "reflect" mode is the d c b a | a b c d convention
    out = ndimage.correlate1d(u, w, axis=1, mode="reflect")
    return ndimage.correlate1d(out, w, axis=0, mode="reflect")


def median_filter(u, spec: FilterSpec) -> np.ndarray:
    """Median over the ``(2r+1) x (2r+1)`` neighbourhood, mirror padded."""
    if spec.kind != "median":
        raise InvalidArgumentError(f"median_filter needs kind='median', got {spec.kind!r}")
    u = check_image(u)
    return ndimage.median_filter(u, size=2 * spec.radius + 1, mode="reflect")
