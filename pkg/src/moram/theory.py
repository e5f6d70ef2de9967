"""Computable quantities behind the recovery guarantee: normalized Hamming
and angular distances, the sandwich inequality relating them, and the
sample-complexity budget for the sign-pattern embedding."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .core import MeasurementEnsemble, SparseSignal, random_sparse_signal
from .model import signum

__all__ = [
    "hamming_distance",
    "angular_distance",
    "required_measurements",
    "sandwich_check",
    "empirical_bese",
    "random_sparse_unit_pair",
    "BeseBudget",
]

_UNIT_NORM_TOL = 1e-9


def hamming_distance(a, b) -> float:
    """Fraction of positions where two sign or bit vectors disagree."""
    a = np.asarray(a)
    b = np.asarray(b)
    if a.ndim != 1 or a.shape != b.shape or a.size < 1:
        raise ValueError("inputs must be nonempty 1-D vectors of equal length")
    return float(np.count_nonzero(a != b)) / a.size


def _check_unit(v: np.ndarray, name: str) -> None:
    norm = np.linalg.norm(v)
    if abs(norm - 1.0) > _UNIT_NORM_TOL:
        raise ValueError(f"{name} must have unit norm (got {norm!r})")


def angular_distance(p, q) -> float:
    """Angle between two unit vectors, normalized to [0, 1]."""
    p = np.asarray(p, dtype=np.float64)
    q = np.asarray(q, dtype=np.float64)
    if p.shape != q.shape or p.ndim != 1:
        raise ValueError("inputs must be 1-D vectors of equal length")
    _check_unit(p, "p")
    _check_unit(q, "q")
    inner = float(np.clip(p @ q, -1.0, 1.0))
    return math.acos(inner) / math.pi


def required_measurements(s: int, n: int, epsilon: float, eta: float) -> int:
    """Measurement budget sufficient for the sign-pattern embedding of
    s-sparse vectors to hold with probability at least 1 - eta at
    distortion epsilon. Logarithms are natural.
    """
    if s < 1 or n < s:
        raise ValueError("need 1 <= s <= n")
    if epsilon <= 0:
        raise ValueError("epsilon must be positive")
    if not 0 < eta <= 1:
        raise ValueError("eta must lie in (0, 1]")
    bound = (2.0 / epsilon**2) * (
        s * math.log(n) + 2 * s * math.log(35.0 / epsilon) + math.log(2.0 / eta)
    )
    return max(1, math.ceil(bound))


def sandwich_check(p, q) -> tuple[float, float, float]:
    """Return (2*d_S, ||p - q||, pi*d_S) for unit vectors; the middle term
    is always bracketed by the other two."""
    d_s = angular_distance(p, q)
    gap = float(np.linalg.norm(np.asarray(p, dtype=np.float64) - np.asarray(q, dtype=np.float64)))
    return 2.0 * d_s, gap, math.pi * d_s


def empirical_bese(
    A: MeasurementEnsemble, x_star: SparseSignal, x0: SparseSignal
) -> float:
    """Observed Hamming distance between the measurement sign patterns of
    two unit-norm sparse vectors."""
    if x_star.dimension != A.dimension or x0.dimension != A.dimension:
        raise ValueError(f"signals must have length {A.dimension}")
    _check_unit(x_star.values, "x_star")
    _check_unit(x0.values, "x0")
    signs_star = signum(A.entries @ x_star.values)
    signs_0 = signum(A.entries @ x0.values)
    return hamming_distance(signs_star, signs_0)


def random_sparse_unit_pair(
    n: int, s: int, max_distance: float, seed: int
) -> tuple[SparseSignal, SparseSignal, float]:
    """Draw an s-sparse unit vector and a nearby unit vector obtained by an
    s-sparse perturbation, so the pair is jointly at most 2s-sparse and at
    Euclidean distance no more than ``max_distance``.

    Returns (anchor, perturbed, actual distance).
    """
    if max_distance <= 0:
        raise ValueError("max_distance must be positive")
    anchor = random_sparse_signal(n, s, seed)
    bump = random_sparse_signal(n, s, seed ^ 0x9E3779B97F4A7C15)
    # Step of half the target: renormalization moves the point by at most
    # the same amount again, so the final distance stays within budget.
    step = max_distance / 2.0
    raw = anchor.values + step * bump.values
    unit = raw / np.linalg.norm(raw)
    perturbed = SparseSignal(unit, min(n, 2 * s))
    distance = float(np.linalg.norm(unit - anchor.values))
    return anchor, perturbed, distance


@dataclass(frozen=True)
class BeseBudget:
    """Embedding budget: parameters plus the derived measurement count."""

    s: int
    n: int
    epsilon: float
    eta: float
    m_required: int = field(init=False)

    def __post_init__(self):
        object.__setattr__(
            self,
            "m_required",
            required_measurements(self.s, self.n, self.epsilon, self.eta),
        )
