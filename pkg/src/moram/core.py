"""Domain types, seeded random generation, and the dense kernels shared by
every stage of the modulo-recovery pipeline."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "SparseSignal",
    "MeasurementEnsemble",
    "ModuloObservation",
    "BinIndexVector",
    "CorrectionVector",
    "gaussian_matrix",
    "random_sparse_signal",
    "hard_threshold",
    "relative_error",
]

_UINT64_MASK = (1 << 64) - 1


def _rng(seed: int) -> np.random.Generator:
    # Philox is counter-based: the same key yields the same stream everywhere,
    # which keeps experiment matrices reproducible bit-for-bit.
    return np.random.Generator(np.random.Philox(key=int(seed) & _UINT64_MASK))


def _frozen_array(values, dtype=np.float64) -> np.ndarray:
    out = np.array(values, dtype=dtype)
    out.setflags(write=False)
    return out


@dataclass(frozen=True)
class SparseSignal:
    """Real vector with at most ``sparsity_budget`` nonzero entries.

    Houses both the unknown signal and every iterate produced while
    estimating it.
    """

    values: np.ndarray
    sparsity_budget: int

    def __post_init__(self):
        values = _frozen_array(self.values)
        if values.ndim != 1 or values.size < 1:
            raise ValueError("signal must be a nonempty 1-D vector")
        s = int(self.sparsity_budget)
        if not 1 <= s <= values.size:
            raise ValueError(
                f"sparsity budget {s} outside [1, {values.size}]"
            )
        nnz = int(np.count_nonzero(values))
        if nnz > s:
            raise ValueError(f"{nnz} nonzeros exceed the budget of {s}")
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "sparsity_budget", s)

    @property
    def dimension(self) -> int:
        return self.values.size

    def support(self) -> np.ndarray:
        return np.flatnonzero(self.values)


@dataclass(frozen=True)
class MeasurementEnsemble:
    """Dense m x n measurement matrix together with the seed that made it."""

    entries: np.ndarray
    seed: int = 0

    def __post_init__(self):
        entries = _frozen_array(self.entries)
        if entries.ndim != 2 or entries.shape[0] < 1 or entries.shape[1] < 1:
            raise ValueError("measurement matrix must be 2-D and nonempty")
        object.__setattr__(self, "entries", entries)
        object.__setattr__(self, "seed", int(self.seed))

    @property
    def shape(self) -> tuple[int, int]:
        return self.entries.shape

    @property
    def num_measurements(self) -> int:
        return self.entries.shape[0]

    @property
    def dimension(self) -> int:
        return self.entries.shape[1]


@dataclass(frozen=True)
class ModuloObservation:
    """Observed wrapped measurements together with the wrap period.

    Each entry must lie in [0, range_r]: the two-period transfer function
    cannot produce anything else.
    """

    y: np.ndarray
    range_r: float

    def __post_init__(self):
        y = _frozen_array(self.y)
        range_r = float(self.range_r)
        if y.ndim != 1 or y.size < 1:
            raise ValueError("observation must be a nonempty 1-D vector")
        if range_r <= 0:
            raise ValueError("range parameter must be positive")
        tol = 1e-9 * max(1.0, range_r)
        if y.min() < -tol or y.max() > range_r + tol:
            bad = np.flatnonzero((y < -tol) | (y > range_r + tol))
            raise ValueError(
                f"observation entries outside [0, {range_r}] at indices "
                f"{bad[:10].tolist()}"
            )
        object.__setattr__(self, "y", y)
        object.__setattr__(self, "range_r", range_r)

    @property
    def num_measurements(self) -> int:
        return self.y.size


@dataclass(frozen=True)
class BinIndexVector:
    """Binary vector marking which measurements had the period added."""

    bits: np.ndarray

    def __post_init__(self):
        raw = np.asarray(self.bits)
        if raw.ndim != 1 or raw.size < 1:
            raise ValueError("bin-index vector must be a nonempty 1-D vector")
        if not np.all((raw == 0) | (raw == 1)):
            raise ValueError("bin-index entries must be exactly 0 or 1")
        bits = _frozen_array(raw, dtype=np.uint8)
        object.__setattr__(self, "bits", bits)

    def __len__(self) -> int:
        return self.bits.size

    def flips_from(self, other: "BinIndexVector") -> int:
        """Count of positions where this vector disagrees with ``other``."""
        if len(self) != len(other):
            raise ValueError("bin-index vectors differ in length")
        return int(np.count_nonzero(self.bits != other.bits))


@dataclass(frozen=True)
class CorrectionVector:
    """Additive measurement correction; a true bin-error correction has
    nonzero entries that are integer multiples of the wrap period."""

    values: np.ndarray

    def __post_init__(self):
        values = _frozen_array(self.values)
        if values.ndim != 1:
            raise ValueError("correction must be a 1-D vector")
        object.__setattr__(self, "values", values)

    def num_nonzero(self, tol: float = 0.0) -> int:
        return int(np.count_nonzero(np.abs(self.values) > tol))


def gaussian_matrix(m: int, n: int, seed: int) -> MeasurementEnsemble:
    """Draw an m x n matrix of i.i.d. standard normal entries.

    Deterministic given the seed; repeated calls reproduce the matrix
    bit-for-bit.
    """
    if m < 1 or n < 1:
        raise ValueError("matrix dimensions must be at least 1")
    entries = _rng(seed).standard_normal((m, n))
    return MeasurementEnsemble(entries, seed=seed)


def random_sparse_signal(
    n: int, s: int, seed: int, normalize: bool = True
) -> SparseSignal:
    """Draw an s-sparse signal with a uniformly random support and i.i.d.
    standard normal nonzeros, optionally scaled to unit Euclidean norm."""
    if not 1 <= s <= n:
        raise ValueError(f"sparsity {s} outside [1, {n}]")
    rng = _rng(seed)
    support = rng.choice(n, size=s, replace=False)
    values = np.zeros(n)
    values[support] = rng.standard_normal(s)
    if normalize:
        norm = np.linalg.norm(values)
        if norm == 0.0:
            raise ArithmeticError("degenerate draw: zero-norm signal")
        values /= norm
    return SparseSignal(values, s)


def hard_threshold(v, s: int) -> np.ndarray:
    """Keep the s largest-magnitude entries of v and zero the rest.

    Magnitude ties at the cutoff keep the lowest index. With s at or above
    the length this is the identity; s = 0 returns the zero vector.
    """
    v = np.asarray(v, dtype=np.float64)
    if v.ndim != 1:
        raise ValueError("expected a 1-D vector")
    if s < 0:
        raise ValueError("s must be nonnegative")
    if s >= v.size:
        return v.copy()
    out = np.zeros_like(v)
    if s == 0:
        return out
    # Stable sort on negated magnitudes: ties resolve to the lowest index.
    order = np.argsort(-np.abs(v), kind="stable")
    keep = order[:s]
    out[keep] = v[keep]
    return out


def relative_error(x_hat, x_star) -> float:
    """Euclidean reconstruction error of x_hat relative to the norm of the
    reference x_star."""
    x_hat = np.asarray(x_hat, dtype=np.float64)
    x_star = np.asarray(x_star, dtype=np.float64)
    if x_hat.shape != x_star.shape:
        raise ValueError("vectors differ in shape")
    denom = np.linalg.norm(x_star)
    if denom == 0.0:
        raise ZeroDivisionError("reference signal has zero norm")
    return float(np.linalg.norm(x_star - x_hat) / denom)
