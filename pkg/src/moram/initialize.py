"""Initialization stage: maximum-likelihood bin guesses, measurement
correction, and the hard-thresholded first-order estimate."""

from __future__ import annotations

import numpy as np

from .core import (
    BinIndexVector,
    MeasurementEnsemble,
    ModuloObservation,
    SparseSignal,
    hard_threshold,
)

__all__ = [
    "ml_bin_indices",
    "correct_measurements",
    "initial_estimate",
    "moram_initialize",
]


def ml_bin_indices(obs: ModuloObservation) -> BinIndexVector:
    """Most likely bin per observation: below the midpoint R/2 the wrap was
    almost surely absent, at or above it the wrap was almost surely applied.

    Only observations whose underlying measurement sits in the ambiguous
    band around +-R/2 can be misassigned.
    """
    bits = obs.y >= obs.range_r / 2.0
    return BinIndexVector(bits.astype(np.uint8))


def correct_measurements(obs: ModuloObservation, p: BinIndexVector) -> np.ndarray:
    """Undo the wrap under bin hypothesis p: returns y - R * p."""
    if obs.num_measurements != len(p):
        raise ValueError(
            f"observation has {obs.num_measurements} entries but bin vector "
            f"has {len(p)}"
        )
    return obs.y - obs.range_r * p.bits.astype(np.float64)


def initial_estimate(
    A: MeasurementEnsemble, y_c, s: int
) -> SparseSignal:
    """First-order estimate from corrected measurements: hard-threshold the
    back-projection (1/m) A^T y_c to s nonzeros."""
    y_c = np.asarray(y_c, dtype=np.float64)
    if y_c.ndim != 1 or y_c.size != A.num_measurements:
        raise ValueError(
            f"corrected measurements must be a vector of length "
            f"{A.num_measurements}"
        )
    back_projection = A.entries.T @ y_c / A.num_measurements
    return SparseSignal(hard_threshold(back_projection, s), s)


def moram_initialize(
    obs: ModuloObservation, A: MeasurementEnsemble, s: int
) -> SparseSignal:
    """Initialization pipeline: guess bins, correct the measurements, then
    form the thresholded first-order estimate."""
    p = ml_bin_indices(obs)
    y_c = correct_measurements(obs, p)
    return initial_estimate(A, y_c, s)
