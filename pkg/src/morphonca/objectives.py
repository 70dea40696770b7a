"""Objective functions over a development trace.

All stored objectives are minimized; empowerment is therefore returned
negated and callers re-negate for display.
"""
from dataclasses import dataclass

import numpy as np

from ._validation import ConfigError
from .infotheory import JointHistogram, mutual_information


@dataclass(frozen=True)
class LocalEmpowermentMap:
    values: np.ndarray

    @property
    def m(self):
        return self.values.shape[0]

    def to_csv(self, path):
        """Write ``m`` rows of comma-separated reals, row 0 = grid top."""
        with open(path, "w", encoding="ascii") as fh:
            for row in self.values:
                fh.write(",".join(repr(float(v)) for v in row) + "\n")
        return path

    @classmethod
    def from_csv(cls, path):
        return cls(np.loadtxt(path, delimiter=",", ndmin=2))


def loss(trace, target, n0, n1):
    """Mean squared alive-vs-target mismatch over states ``n0 + 1 .. n1``.

    Each state contributes the fraction of the ``m * m`` cells that disagree
    with the target; the window average divides by ``n1 - n0``.
    """
    n = trace.n_steps
    if not (0 <= n0 < n1 <= n):
        raise ConfigError(f"loss window must satisfy 0 <= n0 < n1 <= {n}, got ({n0}, {n1})")
    cells = target.cells if hasattr(target, "cells") else np.asarray(target)
    if cells.shape != (trace.m, trace.m):
        raise ConfigError(f"target grid {cells.shape} does not match trace grid {trace.m}")
    window = trace.alive[n0 + 1:n1 + 1]
    mismatches = np.count_nonzero(window != cells[None, :, :], axis=(1, 2))
    return float(mismatches.sum()) / ((n1 - n0) * cells.size)


def _half(trace):
    n = trace.n_steps
    if n % 2:
        raise ConfigError(f"empowerment needs an even number of steps, got {n}")
    return n // 2


def action_sensor_pairs(trace):
    """Same-cell pairs: action at step ``n`` with sensor at step ``n + N/2``, n < N/2."""
    half = _half(trace)
    return trace.actions[:half], trace.sensors[half:2 * half]


def empowerment_histogram(trace):
    a, s = action_sensor_pairs(trace)
    return JointHistogram.from_pairs(a, s, k=256)


def empowerment(trace):
    """Negated mutual information (bits) between early actions and late sensors."""
    return -mutual_information(empowerment_histogram(trace))


def empowerment_bits(trace):
    return -empowerment(trace)


def local_empowerment(trace):
    """Per-cell average of pointwise mutual information over the cell's own pairs."""
    a, s = action_sensor_pairs(trace)
    hist = JointHistogram.from_pairs(a, s, k=256)
    table = hist.pointwise_mi_table()
    # every queried pair was observed, so no -inf can appear
    return LocalEmpowermentMap(table[a, s].mean(axis=0))
