"""Image denoising by two-sided spatial-fractional anisotropic diffusion."""

from ._validation import InvalidArgumentError, KernelConsistencyError, NumericalFailureError
from .baselines import FilterSpec, gaussian_filter, median_filter
from .diffusion import EdgeStopping, SolverConfig, denoise, diffusion_step, pm_baseline_step, perona_malik
from .estimators import (
    FractionalDiffusionDenoiser,
    GaussianDenoiser,
    MedianDenoiser,
    PeronaMalikDenoiser,
)
from .field import VectorField, frac_divergence, frac_gradient, gradient_magnitude, pad_reflect
from .fracops import (
    GLKernel,
    TwoSidedKernel,
    amplitude_response,
    apply_frac_derivative_1d,
    build_two_sided_kernel,
    gl_coefficients,
    one_sided_g2,
    short_memory_bound,
)
from .metrics import NoiseSpec, QualityReport, add_gaussian_noise, mse, psnr, ssim
from .pgm import PGMParseError, read_pgm, write_pgm

__version__ = "0.1.0"

__all__ = [
    "InvalidArgumentError",
    "KernelConsistencyError",
    "NumericalFailureError",
    "PGMParseError",
    "GLKernel",
    "TwoSidedKernel",
    "VectorField",
    "EdgeStopping",
    "SolverConfig",
    "FilterSpec",
    "NoiseSpec",
    "QualityReport",
    "gl_coefficients",
    "build_two_sided_kernel",
    "one_sided_g2",
    "apply_frac_derivative_1d",
    "short_memory_bound",
    "amplitude_response",
    "pad_reflect",
    "frac_gradient",
    "frac_divergence",
    "gradient_magnitude",
    "diffusion_step",
    "denoise",
    "pm_baseline_step",
    "perona_malik",
    "gaussian_filter",
    "median_filter",
    "mse",
    "psnr",
    "ssim",
    "add_gaussian_noise",
    "read_pgm",
    "write_pgm",
    "FractionalDiffusionDenoiser",
    "PeronaMalikDenoiser",
    "GaussianDenoiser",
    "MedianDenoiser",
]
