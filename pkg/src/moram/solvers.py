"""L1 and greedy sparse-recovery engines: equality-constrained basis pursuit
via ADMM splitting, the Justice Pursuit augmentation for sparsely corrupted
measurements, and a CoSaMP baseline."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .core import CorrectionVector, MeasurementEnsemble, SparseSignal, hard_threshold

__all__ = [
    "L1SolverConfig",
    "L1Solution",
    "JusticePursuitResult",
    "CosampResult",
    "RankDeficientError",
    "basis_pursuit",
    "justice_pursuit",
    "cosamp",
]


class RankDeficientError(RuntimeError):
    """The constraint matrix has linearly dependent rows, so the feasible
    set projection cannot be factorized."""


@dataclass(frozen=True)
class L1SolverConfig:
    penalty_rho: float = 1.0
    abs_tol: float = 1e-7
    rel_tol: float = 1e-7
    max_iters: int = 5000

    def __post_init__(self):
        if self.penalty_rho <= 0 or self.abs_tol <= 0 or self.rel_tol <= 0:
            raise ValueError("solver tolerances and penalty must be positive")
        if self.max_iters < 1:
            raise ValueError("max_iters must be at least 1")


@dataclass(frozen=True)
class L1Solution:
    """Outcome of one basis-pursuit solve. ``u`` is always feasible to
    factorization precision; ``converged`` is False when the iteration cap
    was reached first (best iterate returned regardless)."""

    u: np.ndarray
    iterations: int
    residual: float
    converged: bool


@dataclass(frozen=True)
class JusticePursuitResult:
    """Joint signal/corruption estimate from the augmented L1 solve."""

    x_hat: np.ndarray
    d_hat: CorrectionVector
    iterations: int
    residual: float
    converged: bool


@dataclass(frozen=True)
class CosampResult:
    x: SparseSignal
    iterations: int
    residual: float
    converged: bool


def _soft_threshold(v: np.ndarray, k: float) -> np.ndarray:
    return np.sign(v) * np.maximum(np.abs(v) - k, 0.0)


def basis_pursuit(
    phi,
    b,
    cfg: L1SolverConfig | None = None,
    warm=None,
    row_gram=None,
) -> L1Solution:
    """Minimize ||u||_1 subject to phi @ u = b.

    ADMM splitting with soft-threshold shrinkage. Equality feasibility is
    enforced every iteration by projecting onto the constraint set through
    one cached Cholesky factorization of the row Gram matrix phi @ phi.T
    (pass ``row_gram`` to reuse a precomputed one). phi must have full row
    rank; otherwise :class:`RankDeficientError` is raised.
    """
    phi = np.asarray(phi, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if phi.ndim != 2:
        raise ValueError("phi must be a 2-D matrix")
    k, q = phi.shape
    if b.shape != (k,):
        raise ValueError(f"b must have length {k}")
    if cfg is None:
        cfg = L1SolverConfig()

    gram = phi @ phi.T if row_gram is None else np.asarray(row_gram, dtype=np.float64)
    try:
        chol = scipy.linalg.cho_factor(gram)
    except np.linalg.LinAlgError as exc:
        raise RankDeficientError(
            f"row Gram factorization failed for shape {phi.shape}: {exc}"
        ) from exc

    def project(v):
        return v - phi.T @ scipy.linalg.cho_solve(chol, phi @ v - b)

    if warm is None:
        z = np.zeros(q)
    else:
        z = np.array(warm, dtype=np.float64)
        if z.shape != (q,):
            raise ValueError(f"warm start must have length {q}")
    w = np.zeros(q)
    u = np.zeros(q)
    shrink = 1.0 / cfg.penalty_rho
    sqrt_q = np.sqrt(q)
    converged = False
    iterations = 0

    for iterations in range(1, cfg.max_iters + 1):
        u = project(z - w)
        z_prev = z
        z = _soft_threshold(u + w, shrink)
        w = w + u - z

        r_norm = np.linalg.norm(u - z)
        s_norm = cfg.penalty_rho * np.linalg.norm(z - z_prev)
        eps_pri = sqrt_q * cfg.abs_tol + cfg.rel_tol * max(
            np.linalg.norm(u), np.linalg.norm(z)
        )
        eps_dual = sqrt_q * cfg.abs_tol + cfg.rel_tol * cfg.penalty_rho * np.linalg.norm(w)
        if r_norm <= eps_pri and s_norm <= eps_dual:
            converged = True
            break

    residual = float(np.linalg.norm(phi @ u - b))
    return L1Solution(u=u, iterations=iterations, residual=residual, converged=converged)


def justice_pursuit(
    A: MeasurementEnsemble,
    y_c,
    cfg: L1SolverConfig | None = None,
    warm_x: SparseSignal | None = None,
) -> JusticePursuitResult:
    """Robust basis pursuit on the augmented system [A/sqrt(m)  I].

    Jointly recovers the signal (first n coordinates) and an additive
    sparse measurement corruption (last m coordinates, reported in
    measurement units) from corrected measurements y_c. Both blocks are
    column-normalized: the measurement block is scaled by 1/sqrt(m) so its
    columns have unit norm like the identity's, which is what lets the L1
    objective separate signal from corruption. The warm start seeds the
    signal block with the current estimate and the corruption block with
    zero.
    """
    y_c = np.asarray(y_c, dtype=np.float64)
    m, n = A.shape
    if y_c.shape != (m,):
        raise ValueError(f"corrected measurements must have length {m}")

    root_m = np.sqrt(m)
    phi = np.zeros((m, n + m))
    phi[:, :n] = A.entries / root_m
    np.fill_diagonal(phi[:, n:], 1.0)
    b = y_c / root_m
    # Row Gram has the closed form A A^T / m + I; cheaper than phi @ phi.T.
    gram = A.entries @ A.entries.T / m + np.eye(m)

    warm = None
    if warm_x is not None:
        if warm_x.dimension != n:
            raise ValueError(f"warm start signal must have length {n}")
        warm = np.concatenate([warm_x.values, np.zeros(m)])

    sol = basis_pursuit(phi, b, cfg=cfg, warm=warm, row_gram=gram)
    # Constraint reads (A x + sqrt(m) d_block) = y_c: rescale the corruption
    # block back to measurement units.
    return JusticePursuitResult(
        x_hat=sol.u[:n],
        d_hat=CorrectionVector(root_m * sol.u[n:]),
        iterations=sol.iterations,
        residual=sol.residual,
        converged=sol.converged,
    )


def cosamp(
    A: MeasurementEnsemble,
    y,
    s: int,
    max_iters: int = 50,
    tol: float = 1e-10,
) -> CosampResult:
    """CoSaMP baseline: greedy support identification with least-squares
    refits. Identification merges the 2s largest correlations into the
    current support; the refit solves least squares on the merged support
    (QR-based) and is pruned back to s entries."""
    y = np.asarray(y, dtype=np.float64)
    m, n = A.shape
    if y.shape != (m,):
        raise ValueError(f"measurements must have length {m}")
    if not 1 <= s <= n:
        raise ValueError(f"sparsity {s} outside [1, {n}]")
    if max_iters < 1:
        raise ValueError("max_iters must be at least 1")

    x = np.zeros(n)
    residual_vec = y.copy()
    best_x = x
    best_res = float(np.linalg.norm(residual_vec))
    converged = best_res <= tol
    iterations = 0

    while not converged and iterations < max_iters:
        iterations += 1
        proxy = A.entries.T @ residual_vec
        order = np.argsort(-np.abs(proxy), kind="stable")
        candidates = order[: min(2 * s, n)]
        support = np.union1d(candidates, np.flatnonzero(x)).astype(int)

        coef, *_ = scipy.linalg.lstsq(
            A.entries[:, support], y, lapack_driver="gelsy"
        )
        merged = np.zeros(n)
        merged[support] = coef
        x = hard_threshold(merged, s)

        residual_vec = y - A.entries @ x
        res = float(np.linalg.norm(residual_vec))
        if res < best_res:
            best_res = res
            best_x = x
        if res <= tol:
            converged = True

    return CosampResult(
        x=SparseSignal(best_x, s),
        iterations=iterations,
        residual=best_res,
        converged=converged,
    )
