"""Exceptions and small input-validation helpers shared across the package."""
import numbers

import numpy as np


class ConfigError(ValueError):
    """Invalid simulation, shape, evolution or experiment parameters."""


class DataError(ValueError):
    """Malformed input data (out-of-alphabet symbols, bad genome files, ...)."""


class EstimatorError(ValueError):
    """An information-theoretic quantity was queried on unusable counts."""


class EvaluationError(RuntimeError):
    """A candidate evaluation failed inside an evolutionary generation."""


def check_int(value, name, *, minimum=None, maximum=None):
    if isinstance(value, (bool, np.bool_)) or not isinstance(value, numbers.Integral):
        raise ConfigError(f"{name} must be an integer, got {value!r}")
    value = int(value)
    if minimum is not None and value < minimum:
        raise ConfigError(f"{name} must be >= {minimum}, got {value}")
    if maximum is not None and value > maximum:
        raise ConfigError(f"{name} must be <= {maximum}, got {value}")
    return value


def check_real(value, name, *, low=None, high=None, low_open=False, high_open=False):
    if isinstance(value, (bool, np.bool_)) or not isinstance(value, numbers.Real):
        raise ConfigError(f"{name} must be a real number, got {value!r}")
    value = float(value)
    if not np.isfinite(value):
        raise ConfigError(f"{name} must be finite, got {value}")
    if low is not None and (value <= low if low_open else value < low):
        raise ConfigError(f"{name} out of range: {value} (lower bound {low})")
    if high is not None and (value >= high if high_open else value > high):
        raise ConfigError(f"{name} out of range: {value} (upper bound {high})")
    return value


def check_grid_dim(m, *, allow_even=False):
    """Grid side length; odd unless ``allow_even`` so the seed has a unique center."""
    m = check_int(m, "m", minimum=3)
    if m % 2 == 0 and not allow_even:
        raise ConfigError(f"m must be odd to have a unique center cell, got {m} "
                          "(pass allow_even=True to use the lower-right central cell)")
    return m


def check_binary_grid(cells, name="grid"):
    arr = np.asarray(cells)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
        raise DataError(f"{name} must be a square 2-D array, got shape {arr.shape}")
    if arr.size and not np.isin(arr, (0, 1)).all():
        raise DataError(f"{name} must contain only 0/1 values")
    return arr.astype(np.uint8)


def check_weights(weights, n_weights):
    try:
        w = np.asarray(weights, dtype=np.float64)
    except (TypeError, ValueError) as exc:
        raise DataError(f"genome weights are not numeric: {exc}") from None
    if w.ndim != 1 or w.shape[0] != n_weights:
        raise DataError(f"genome must hold exactly {n_weights} weights, got shape {w.shape}")
    if not np.isfinite(w).all():
        raise DataError("genome weights must all be finite")
    return w
