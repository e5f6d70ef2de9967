"""Monte Carlo experiment orchestration: the synthetic recovery sweep, the
wavelet image pipeline, and their CSV outputs."""

from __future__ import annotations

import csv
import hashlib
import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from .altmin import DescentConfig, moram_descent
from .core import (
    MeasurementEnsemble,
    SparseSignal,
    gaussian_matrix,
    random_sparse_signal,
    relative_error,
)
from .initialize import moram_initialize
from .model import DynamicRangeViolation, forward
from .wavelet import haar2_inverse, psnr, read_pgm, sparsify, write_pgm

__all__ = [
    "SweepConfig",
    "ExperimentRecord",
    "SweepAggregate",
    "ImageRunResult",
    "derive_seed",
    "run_trial",
    "run_sweep",
    "run_image",
    "write_records_csv",
    "write_aggregates_csv",
    "RECORD_CSV_FIELDS",
    "EXACT_RECOVERY_TOL",
]

# A trial counts as exact recovery below this relative error.
EXACT_RECOVERY_TOL = 1e-6

# Memory guard: a dense m x n matrix at the default n is ~80 MB per 10k rows.
_MAX_MEASUREMENTS = 100_000

RECORD_CSV_FIELDS = (
    "n",
    "m",
    "s",
    "R",
    "trial",
    "seed",
    "rel_error",
    "exact",
    "altmin_iters",
    "bin_flips",
    "wall_ms",
    "error",
)


def derive_seed(base_seed: int, *parts) -> int:
    """Stable 64-bit sub-seed from a base seed and context labels, so every
    grid cell and trial gets an independent, individually re-runnable
    stream."""
    pieces = [str(int(base_seed))]
    for part in parts:
        pieces.append(repr(part) if isinstance(part, float) else str(part))
    digest = hashlib.sha256(":".join(pieces).encode("ascii")).digest()
    return int.from_bytes(digest[:8], "little")


@dataclass(frozen=True)
class SweepConfig:
    n: int = 1000
    s_list: tuple[int, ...] = (3, 6, 9, 12)
    m_list: tuple[int, ...] = tuple(range(100, 1001, 100))
    r_list: tuple[float, ...] = (4.0, 4.25, 4.5)
    trials: int = 10
    base_seed: int = 0
    descent: DescentConfig = field(default_factory=DescentConfig)
    output_path: str | Path | None = None
    strict_range: bool = True
    workers: int = 1

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("n must be at least 1")
        if self.trials < 1:
            raise ValueError("trials must be at least 1")
        if not self.s_list or not self.m_list or not self.r_list:
            raise ValueError("s, m, and R lists must be nonempty")
        if any(s < 1 or s > self.n for s in self.s_list):
            raise ValueError("every s must lie in [1, n]")
        if any(m < 1 or m > _MAX_MEASUREMENTS for m in self.m_list):
            raise ValueError(f"every m must lie in [1, {_MAX_MEASUREMENTS}]")
        if any(r <= 0 for r in self.r_list):
            raise ValueError("every R must be positive")
        if self.workers < 1:
            raise ValueError("workers must be at least 1")
        object.__setattr__(self, "s_list", tuple(int(s) for s in self.s_list))
        object.__setattr__(self, "m_list", tuple(int(m) for m in self.m_list))
        object.__setattr__(self, "r_list", tuple(float(r) for r in self.r_list))


@dataclass(frozen=True)
class ExperimentRecord:
    """One Monte Carlo trial. ``error`` is empty on success; failed trials
    keep NaN error metrics and never abort the sweep."""

    n: int
    m: int
    s: int
    r: float
    trial: int
    seed: int
    rel_error: float
    exact: bool
    altmin_iters: int
    bin_flips: int
    wall_ms: float
    error: str = ""


@dataclass(frozen=True)
class SweepAggregate:
    """Per-cell mean over the trials that completed."""

    n: int
    s: int
    m: int
    r: float
    trials_ok: int
    trials_failed: int
    mean_rel_error: float
    exact_fraction: float


def run_trial(
    n: int,
    m: int,
    s: int,
    r: float,
    seed: int,
    descent: DescentConfig | None = None,
    strict_range: bool = True,
) -> ExperimentRecord:
    """Draw a fresh instance, push it through the full recovery pipeline,
    and report the error metrics."""
    tic = time.perf_counter()
    try:
        A = gaussian_matrix(m, n, derive_seed(seed, "matrix"))
        x_star = random_sparse_signal(n, s, derive_seed(seed, "signal"))
        obs = forward(A, x_star, r, strict=strict_range)
        x0 = moram_initialize(obs, A, s)
        x_hat, trace = moram_descent(obs, A, s, descent, x0)
        rel = relative_error(x_hat.values, x_star.values)
        return ExperimentRecord(
            n=n,
            m=m,
            s=s,
            r=r,
            trial=-1,
            seed=seed,
            rel_error=rel,
            exact=rel < EXACT_RECOVERY_TOL,
            altmin_iters=len(trace.steps),
            bin_flips=trace.steps[-1].bin_flips if trace.steps else 0,
            wall_ms=(time.perf_counter() - tic) * 1e3,
        )
    except Exception as exc:  # recorded per-row; the sweep must not abort
        return ExperimentRecord(
            n=n,
            m=m,
            s=s,
            r=r,
            trial=-1,
            seed=seed,
            rel_error=float("nan"),
            exact=False,
            altmin_iters=0,
            bin_flips=0,
            wall_ms=(time.perf_counter() - tic) * 1e3,
            error=f"{type(exc).__name__}: {exc}",
        )


def run_sweep(cfg: SweepConfig) -> tuple[list[ExperimentRecord], list[SweepAggregate]]:
    """Run the full (s, m, R, trial) grid. Deterministic given the base
    seed; failed trials are kept as error rows. Writes the per-trial CSV
    when an output path is configured."""
    jobs = [
        (s, m, r, trial)
        for s in cfg.s_list
        for m in cfg.m_list
        for r in cfg.r_list
        for trial in range(cfg.trials)
    ]

    def execute(job):
        s, m, r, trial = job
        seed = derive_seed(cfg.base_seed, s, m, r, trial)
        record = run_trial(
            cfg.n, m, s, r, seed, descent=cfg.descent, strict_range=cfg.strict_range
        )
        return replace(record, trial=trial)

    if cfg.workers > 1:
        with ThreadPoolExecutor(max_workers=cfg.workers) as pool:
            records = list(pool.map(execute, jobs))
    else:
        records = [execute(job) for job in jobs]

    aggregates = aggregate_records(records)
    if cfg.output_path is not None:
        write_records_csv(cfg.output_path, records)
    return records, aggregates


def aggregate_records(records) -> list[SweepAggregate]:
    cells: dict[tuple[int, int, int, float], list[ExperimentRecord]] = {}
    for rec in records:
        cells.setdefault((rec.n, rec.s, rec.m, rec.r), []).append(rec)
    out = []
    for (n, s, m, r), rows in cells.items():
        ok = [row for row in rows if not row.error]
        mean = float(np.mean([row.rel_error for row in ok])) if ok else float("nan")
        exact = (
            float(np.mean([1.0 if row.exact else 0.0 for row in ok])) if ok else 0.0
        )
        out.append(
            SweepAggregate(
                n=n,
                s=s,
                m=m,
                r=r,
                trials_ok=len(ok),
                trials_failed=len(rows) - len(ok),
                mean_rel_error=mean,
                exact_fraction=exact,
            )
        )
    out.sort(key=lambda a: (a.n, a.s, a.m, a.r))
    return out


def write_records_csv(path, records) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(RECORD_CSV_FIELDS)
        for rec in records:
            writer.writerow(
                [
                    rec.n,
                    rec.m,
                    rec.s,
                    rec.r,
                    rec.trial,
                    rec.seed,
                    "" if math.isnan(rec.rel_error) else repr(rec.rel_error),
                    int(rec.exact),
                    rec.altmin_iters,
                    rec.bin_flips,
                    repr(rec.wall_ms),
                    rec.error,
                ]
            )
    return path


def write_aggregates_csv(path, aggregates) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(
            ["n", "s", "m", "R", "trials_ok", "trials_failed", "mean_rel_error", "exact_fraction"]
        )
        for agg in aggregates:
            writer.writerow(
                [
                    agg.n,
                    agg.s,
                    agg.m,
                    agg.r,
                    agg.trials_ok,
                    agg.trials_failed,
                    "" if math.isnan(agg.mean_rel_error) else repr(agg.mean_rel_error),
                    repr(agg.exact_fraction),
                ]
            )
    return path


IMAGE_CSV_FIELDS = (
    "image",
    "side",
    "n",
    "s",
    "m",
    "R",
    "seed",
    "rel_coeff_error",
    "psnr_vs_original",
    "psnr_vs_sparsified",
    "altmin_iters",
    "converged",
    "wall_ms",
)


@dataclass(frozen=True)
class ImageRunResult:
    image: str
    side: int
    n: int
    s: int
    m: int
    r: float
    seed: int
    rel_coeff_error: float
    psnr_vs_original: float
    psnr_vs_sparsified: float
    altmin_iters: int
    converged: bool
    wall_ms: float
    original: np.ndarray
    reference: np.ndarray
    recovered: np.ndarray
    residual: np.ndarray
    output_files: tuple[str, ...] = ()


def auto_range(z: np.ndarray) -> float:
    """Smallest round wrap period covering the linear measurements with a
    5 percent margin, never below the benchmark value 4."""
    peak = float(np.max(np.abs(z))) if z.size else 0.0
    return max(4.0, math.ceil(105.0 * peak) / 100.0)


def _metric_psnr(ref, test, peak255: bool) -> float:
    if peak255:
        a = np.rint(np.clip(ref, 0.0, 1.0) * 255.0)
        b = np.rint(np.clip(test, 0.0, 1.0) * 255.0)
        return psnr(a, b, 255.0)
    return psnr(ref, test, 1.0)


def run_image(
    image_path,
    s: int,
    m: int,
    r: float | str = "auto",
    seed: int = 0,
    descent: DescentConfig | None = None,
    out_dir: str | Path | None = None,
    peak255: bool = False,
    strict_range: bool = True,
) -> ImageRunResult:
    """Wavelet image experiment: sparsify the image, measure its unit-norm
    coefficient vector through the modulo model, recover, and invert the
    transform.

    Writes the recovered image, the absolute-residual image, the s-term
    reference, and a metrics CSV row when ``out_dir`` is given. Pass
    ``r="auto"`` to pick the wrap period from the measured data.
    """
    tic = time.perf_counter()
    image_path = Path(image_path)
    img = read_pgm(image_path)
    side = img.shape[0]
    n = side * side
    if s < 1:
        raise ValueError("s must be at least 1")
    if m < 1 or m > _MAX_MEASUREMENTS:
        raise ValueError(f"m must lie in [1, {_MAX_MEASUREMENTS}]")
    if s >= m:
        raise ValueError(
            f"sparsity budget s={s} must stay below the measurement count m={m}"
        )

    coeffs, reference = sparsify(img, s)
    flat = coeffs.ravel()
    scale = float(np.linalg.norm(flat))
    if scale == 0.0:
        raise ValueError("image has no energy after sparsification")
    x_star = SparseSignal(flat / scale, s)

    if isinstance(r, str) and r != "auto":
        raise ValueError(f"unknown range mode {r!r}")
    A = gaussian_matrix(m, n, derive_seed(seed, "image-matrix"))
    z = A.entries @ x_star.values
    r_value = auto_range(z) if isinstance(r, str) else float(r)
    try:
        obs = forward(A, x_star, r_value, strict=strict_range)
    except DynamicRangeViolation as exc:
        raise DynamicRangeViolation(
            exc.indices,
            exc.values,
            r_value,
            hint="Increase R or pass r='auto' to cover the coefficient scale",
        ) from exc

    x0 = moram_initialize(obs, A, s)
    x_hat, trace = moram_descent(obs, A, s, descent, x0)
    rel = relative_error(x_hat.values, x_star.values)

    recovered = haar2_inverse((x_hat.values * scale).reshape(side, side))
    recovered = np.clip(recovered, 0.0, 1.0)
    residual = np.clip(np.abs(img - recovered), 0.0, 1.0)

    result = ImageRunResult(
        image=image_path.name,
        side=side,
        n=n,
        s=s,
        m=m,
        r=r_value,
        seed=seed,
        rel_coeff_error=rel,
        psnr_vs_original=_metric_psnr(img, recovered, peak255),
        psnr_vs_sparsified=_metric_psnr(reference, recovered, peak255),
        altmin_iters=len(trace.steps),
        converged=trace.converged,
        wall_ms=(time.perf_counter() - tic) * 1e3,
        original=img,
        reference=reference,
        recovered=recovered,
        residual=residual,
    )
    if out_dir is not None:
        result = _write_image_outputs(result, Path(out_dir), image_path.stem)
    return result


def _write_image_outputs(
    result: ImageRunResult, out_dir: Path, stem: str
) -> ImageRunResult:
    out_dir.mkdir(parents=True, exist_ok=True)
    recovered_path = out_dir / f"{stem}_recovered.pgm"
    residual_path = out_dir / f"{stem}_residual.pgm"
    reference_path = out_dir / f"{stem}_reference.pgm"
    write_pgm(recovered_path, result.recovered)
    write_pgm(residual_path, result.residual)
    write_pgm(reference_path, result.reference)

    metrics_path = out_dir / "image_metrics.csv"
    new_file = not metrics_path.exists()
    with metrics_path.open("a", newline="") as handle:
        writer = csv.writer(handle)
        if new_file:
            writer.writerow(IMAGE_CSV_FIELDS)
        writer.writerow(
            [
                result.image,
                result.side,
                result.n,
                result.s,
                result.m,
                result.r,
                result.seed,
                repr(result.rel_coeff_error),
                repr(result.psnr_vs_original),
                repr(result.psnr_vs_sparsified),
                result.altmin_iters,
                int(result.converged),
                repr(result.wall_ms),
            ]
        )
    files = tuple(
        str(p) for p in (recovered_path, residual_path, reference_path, metrics_path)
    )
    return replace(result, output_files=files)
