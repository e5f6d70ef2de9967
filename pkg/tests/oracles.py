"""Independent brute-force oracles the solver tests are checked against.

Everything here is deliberately naive: exhaustive enumeration and plain
least squares, no shared code paths with the solvers under test.
"""

import itertools

import numpy as np


def nearest_sparse(v, s):
    """Best s-sparse approximation by exhaustive support enumeration."""
    v = np.asarray(v, dtype=float)
    best, best_gap = np.zeros_like(v), np.linalg.norm(v)
    for support in itertools.combinations(range(v.size), s):
        cand = np.zeros_like(v)
        cand[list(support)] = v[list(support)]
        gap = np.linalg.norm(v - cand)
        if gap < best_gap - 1e-15:
            best, best_gap = cand, gap
    return best, best_gap


def l1_min_by_support_enumeration(phi, b, max_support=None):
    """Minimum l1 norm over basic feasible points of phi @ u = b.

    The optimum of the l1 program sits at a vertex, i.e. a solution
    supported on at most k linearly independent columns; enumerating all
    supports of size k covers every vertex.
    """
    phi = np.asarray(phi, dtype=float)
    b = np.asarray(b, dtype=float)
    k, q = phi.shape
    size = k if max_support is None else max_support
    best_u, best_l1 = None, np.inf
    for support in itertools.combinations(range(q), size):
        sub = phi[:, support]
        try:
            coef, residues, rank, _ = np.linalg.lstsq(sub, b, rcond=None)
        except np.linalg.LinAlgError:
            continue
        if np.linalg.norm(sub @ coef - b) > 1e-9 * max(1.0, np.linalg.norm(b)):
            continue
        l1 = np.abs(coef).sum()
        if l1 < best_l1 - 1e-12:
            best_l1 = l1
            best_u = np.zeros(q)
            best_u[list(support)] = coef
    return best_u, best_l1


def least_squares_on_support(A, y, support):
    """Reference recovery when the true support is known."""
    A = np.asarray(A, dtype=float)
    support = np.asarray(support, dtype=int)
    coef, *_ = np.linalg.lstsq(A[:, support], y, rcond=None)
    out = np.zeros(A.shape[1])
    out[support] = coef
    return out


def single_corruption_positions(A, y_c, support, magnitude, tol=1e-8):
    """All corruption positions consistent with one +-magnitude outlier on
    measurements of a signal with the given support."""
    A = np.asarray(A, dtype=float)
    hits = []
    for j in range(A.shape[0]):
        for sign in (1.0, -1.0):
            y_try = y_c.copy()
            y_try[j] -= sign * magnitude
            x_try = least_squares_on_support(A, y_try, support)
            if np.linalg.norm(A @ x_try - y_try) <= tol:
                hits.append((j, sign, x_try))
    return hits


def exhaustive_bin_pattern_solutions(A, obs, basis_pursuit, cfg, consistency_tol=1e-5):
    """All modulo-consistent basis-pursuit solutions over every bin pattern.

    Returns (pattern bits, solution, l1 norm) triples sorted by l1 norm.
    """
    m = A.shape[0]
    out = []
    for bits in itertools.product((0.0, 1.0), repeat=m):
        pattern = np.asarray(bits)
        y_c = obs.y - obs.range_r * pattern
        sol = basis_pursuit(A.entries, y_c, cfg=cfg)
        z = A.entries @ sol.u
        if np.max(np.abs(z)) > obs.range_r:
            continue
        wrapped = np.where(z >= 0.0, z, z + obs.range_r)
        if np.max(np.abs(wrapped - obs.y)) > consistency_tol:
            continue
        out.append((pattern, sol.u, float(np.abs(sol.u).sum())))
    out.sort(key=lambda item: item[2])
    return out
