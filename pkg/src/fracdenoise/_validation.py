"""Exception types and input validation helpers shared across the package."""

from __future__ import annotations

import numbers

import numpy as np


class InvalidArgumentError(ValueError):
    """An argument violates a documented precondition."""


class KernelConsistencyError(RuntimeError):
    """Closed-form kernel coefficients disagree with the brute-force G2 combination."""

    def __init__(self, index: int, closed_form: float, oracle: float):
        self.index = index
        self.closed_form = closed_form
        self.oracle = oracle
        super().__init__(
            f"coefficient C_{index} mismatch: closed form {closed_form!r} "
            f"vs G2 combination {oracle!r}"
        )


class NumericalFailureError(ArithmeticError):
    """A solver produced a non-finite value."""

    def __init__(self, step: int, pixel: tuple[int, int], stage: str):
        self.step = step
        self.pixel = pixel
        self.stage = stage
        super().__init__(
            f"non-finite value in {stage} at pixel (row={pixel[0]}, col={pixel[1]}) "
            f"during step {step}"
        )


def check_image(u, *, name: str = "u", copy: bool = False) -> np.ndarray:
    """Return ``u`` as a finite 2D float64 array (rows = y, columns = x)."""
    arr = np.array(u, dtype=np.float64, copy=copy) if copy else np.asarray(u, dtype=np.float64)
    if arr.ndim != 2:
        raise InvalidArgumentError(f"{name} must be 2D, got shape {arr.shape}")
    if arr.size == 0:
        raise InvalidArgumentError(f"{name} is empty")
    if not np.all(np.isfinite(arr)):
        raise InvalidArgumentError(f"{name} contains NaN or Inf")
    return arr


def check_same_shape(a: np.ndarray, b: np.ndarray, names: str = "inputs") -> None:
    if a.shape != b.shape:
        raise InvalidArgumentError(f"{names} differ in shape: {a.shape} vs {b.shape}")


def check_real(value, name: str, *, low=None, high=None, low_open=False, high_open=False) -> float:
    """Validate a real scalar against an optional (half-)open interval."""
    if isinstance(value, bool) or not isinstance(value, numbers.Real):
        raise InvalidArgumentError(f"{name} must be a real number, got {value!r}")
    value = float(value)
    if not np.isfinite(value):
        raise InvalidArgumentError(f"{name} must be finite, got {value!r}")
    below = low is not None and (value < low or (low_open and value == low))
    above = high is not None and (value > high or (high_open and value == high))
    if below or above:
        lo = "-inf" if low is None else f"{low:g}"
        hi = "inf" if high is None else f"{high:g}"
        interval = f"{'(' if low_open or low is None else '['}{lo}, {hi}{')' if high_open or high is None else ']'}"
        raise InvalidArgumentError(f"{name}={value:g} must lie in {interval}")
    return value


def check_int(value, name: str, *, low: int | None = None) -> int:
    if isinstance(value, bool) or not isinstance(value, numbers.Integral):
        raise InvalidArgumentError(f"{name} must be an integer, got {value!r}")
    value = int(value)
    if low is not None and value < low:
        raise InvalidArgumentError(f"{name} must be >= {low}, got {value}")
    return value
