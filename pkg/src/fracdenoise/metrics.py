"""Image quality metrics and seeded additive Gaussian noise."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ._validation import InvalidArgumentError, check_image, check_int, check_real, check_same_shape

__all__ = [
    "QualityReport",
    "NoiseSpec",
    "mse",
    "psnr",
    "ssim",
    "quality_report",
    "gaussian_noise_field",
    "add_gaussian_noise",
]

PEAK = 255.0
K1 = 0.01
K2 = 0.03
SSIM_WINDOW = 8


@dataclass(frozen=True)
class QualityReport:
    mse: float
    psnr_db: float
    ssim: float


@dataclass(frozen=True)
class NoiseSpec:
    """Additive white Gaussian noise with standard deviation ``sigma``."""

    sigma: float
    seed: int = 0

    def __post_init__(self):
        check_real(self.sigma, "sigma", low=0)
        check_int(self.seed, "seed")


def _pair(u, u_star):
    u = check_image(u, name="u")
    u_star = check_image(u_star, name="u_star")
    check_same_shape(u, u_star, "images")
    return u, u_star


def mse(u, u_star) -> float:
    u, u_star = _pair(u, u_star)
    return float(np.mean((u - u_star) ** 2))


def psnr(u, u_star) -> float:
    """Peak signal-to-noise ratio for 8-bit data; ``inf`` when the images agree."""
    err = mse(u, u_star)
    if err == 0:
        return math.inf
    return 10 * math.log10(PEAK**2 / err)


def _ssim_terms(mu_u, mu_v, var_u, var_v, cov):
    c1 = (K1 * PEAK) ** 2
    c2 = (K2 * PEAK) ** 2
    return ((2 * mu_u * mu_v + c1) * (2 * cov + c2)) / (
        (mu_u**2 + mu_v**2 + c1) * (var_u + var_v + c2)
    )


def _window_means(a: np.ndarray, size: int) -> np.ndarray:
    # mean over every size x size window fully inside the image
    s = np.cumsum(np.cumsum(np.pad(a, ((1, 0), (1, 0))), axis=0), axis=1)
    total = s[size:, size:] - s[:-size, size:] - s[size:, :-size] + s[:-size, :-size]
    return total / (size * size)


def ssim(u, u_star, window: str = "global") -> float:
    """Structural similarity.

    ``window="global"`` uses whole-image means, variances and covariance.
    ``window="windowed"`` averages the index over all 8x8 sliding windows
    (uniform weights); images smaller than 8 pixels on a side fall back to
    the global form.
    """
    u, u_star = _pair(u, u_star)
    if window == "global" or min(u.shape) < SSIM_WINDOW:
        mu_u, mu_v = u.mean(), u_star.mean()
        du, dv = u - mu_u, u_star - mu_v
        value = _ssim_terms(mu_u, mu_v, np.mean(du * du), np.mean(dv * dv), np.mean(du * dv))
        return float(value)
    if window != "windowed":
        raise InvalidArgumentError(f"window must be 'global' or 'windowed', got {window!r}")
    # centre the data first so the window moments do not cancel catastrophically
    shift = 0.5 * (u.mean() + u_star.mean())
    a, b = u - shift, u_star - shift
    mu_a = _window_means(a, SSIM_WINDOW)
    mu_b = _window_means(b, SSIM_WINDOW)
    var_a = _window_means(a * a, SSIM_WINDOW) - mu_a**2
    var_b = _window_means(b * b, SSIM_WINDOW) - mu_b**2
    cov = _window_means(a * b, SSIM_WINDOW) - mu_a * mu_b
    smap = _ssim_terms(mu_a + shift, mu_b + shift, var_a, var_b, cov)
    return float(smap.mean())


def quality_report(u, u_star, window: str = "global") -> QualityReport:
    return QualityReport(mse(u, u_star), psnr(u, u_star), ssim(u, u_star, window))


def _splitmix64(x: np.ndarray) -> np.ndarray:
    """SplitMix64 finaliser applied elementwise to uint64 counters."""
    with np.errstate(over="ignore"):
        z = x + np.uint64(0x9E3779B97F4A7C15)
        z = (z ^ (z >> np.uint64(30))) * np.uint64(0xBF58476D1CE4E5B9)
        z = (z ^ (z >> np.uint64(27))) * np.uint64(0x94D049BB133111EB)
        return z ^ (z >> np.uint64(31))


def _uniform_open(bits: np.ndarray) -> np.ndarray:
    # top 53 bits -> (0, 1); the half-ulp offset keeps log() finite
    return ((bits >> np.uint64(11)).astype(np.float64) + 0.5) * 2.0**-53


def gaussian_noise_field(shape: tuple[int, int], seed: int) -> np.ndarray:
    """Standard normal field, deterministic per (seed, pixel index).

    Pixel ``i`` (row-major) draws two 64-bit words
    ``splitmix64(key + 2i)`` and ``splitmix64(key + 2i + 1)`` with
    ``key = splitmix64(seed)``, maps them to uniforms on (0, 1) and applies the
    Box-Muller cosine branch. Any pixel can be generated independently, so
    tiling or parallel generation gives identical values.
    """
    seed = check_int(seed, "seed")
    key = _splitmix64(np.array([seed & 0xFFFFFFFFFFFFFFFF], dtype=np.uint64))[0]
    n = int(np.prod(shape))
    with np.errstate(over="ignore"):
        counter = key + np.arange(n, dtype=np.uint64) * np.uint64(2)
        u1 = _uniform_open(_splitmix64(counter))
        u2 = _uniform_open(_splitmix64(counter + np.uint64(1)))
    z = np.sqrt(-2.0 * np.log(u1)) * np.cos(2.0 * np.pi * u2)
    return z.reshape(shape)


def add_gaussian_noise(u, spec: NoiseSpec) -> np.ndarray:
    """Return ``u + sigma * z``; no clamping is applied."""
    u = check_image(u)
    if spec.sigma == 0:
        return u.copy()
    return u + spec.sigma * gaussian_noise_field(u.shape, spec.seed)
