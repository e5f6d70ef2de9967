"""Two-period modulo forward model and exact bin-index bookkeeping."""

from __future__ import annotations

import numpy as np

from .core import BinIndexVector, MeasurementEnsemble, ModuloObservation, SparseSignal

__all__ = [
    "DynamicRangeViolation",
    "signum",
    "mod_two_period",
    "forward",
    "true_bin_indices",
]


class DynamicRangeViolation(ValueError):
    """A linear measurement fell outside [-R, R], so the two-period wrap
    does not describe the observation."""

    def __init__(self, indices, values, range_r, hint: str = ""):
        self.indices = np.asarray(indices, dtype=int)
        self.values = np.asarray(values, dtype=float)
        self.range_r = float(range_r)
        shown = ", ".join(
            f"{i}:{v:.4g}" for i, v in zip(self.indices[:8], self.values[:8])
        )
        more = "" if len(self.indices) <= 8 else f" (+{len(self.indices) - 8} more)"
        msg = (
            f"{len(self.indices)} measurement(s) exceed |t| <= {self.range_r}: "
            f"{shown}{more}"
        )
        if hint:
            msg += f". {hint}"
        super().__init__(msg)


def signum(t):
    """Sign function with the zero-maps-to-one convention."""
    t = np.asarray(t, dtype=np.float64)
    return np.where(t >= 0.0, 1.0, -1.0)


def mod_two_period(t, range_r: float):
    """Two-period wrap: t unchanged when nonnegative, t + R when negative.

    Scalars in, scalar out; arrays map elementwise.
    """
    if range_r <= 0:
        raise ValueError("range parameter must be positive")
    arr = np.asarray(t, dtype=np.float64)
    wrapped = np.where(arr >= 0.0, arr, arr + range_r)
    if arr.ndim == 0:
        return float(wrapped)
    return wrapped


def _bin_bits(z: np.ndarray) -> np.ndarray:
    # bin 1 exactly when the measurement is negative; zero lands in bin 0.
    return (z < 0.0).astype(np.uint8)


def forward(
    A: MeasurementEnsemble,
    x: SparseSignal,
    range_r: float,
    strict: bool = False,
) -> ModuloObservation:
    """Apply the two-period wrap to every linear measurement of x.

    With ``strict`` the linear measurements are checked against [-R, R]
    first and any excursion raises :class:`DynamicRangeViolation` listing
    the offending indices.
    """
    if range_r <= 0:
        raise ValueError("range parameter must be positive")
    if A.dimension != x.dimension:
        raise ValueError(
            f"matrix has {A.dimension} columns but signal has {x.dimension}"
        )
    z = A.entries @ x.values
    if strict:
        bad = np.flatnonzero(np.abs(z) > range_r)
        if bad.size:
            raise DynamicRangeViolation(bad, z[bad], range_r)
    y = np.where(z >= 0.0, z, z + range_r)
    return ModuloObservation(y, range_r)


def true_bin_indices(A: MeasurementEnsemble, x: SparseSignal) -> BinIndexVector:
    """Bin assignment implied by the signs of the linear measurements of x."""
    if A.dimension != x.dimension:
        raise ValueError(
            f"matrix has {A.dimension} columns but signal has {x.dimension}"
        )
    z = A.entries @ x.values
    return BinIndexVector(_bin_bits(z))
