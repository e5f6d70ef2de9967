"""Command-line experiment harness.

Subcommands: ``sweep`` (Monte Carlo recovery grid), ``image`` (wavelet image
pipeline), ``theory-check`` (distance and sample-complexity checks), and
``demo`` (one small end-to-end recovery). Exit codes: 0 success, 1 config
error, 2 runtime failure in all trials.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from .altmin import DescentConfig
from .core import _rng, gaussian_matrix
from .harness import (
    SweepConfig,
    derive_seed,
    run_image,
    run_sweep,
    write_aggregates_csv,
)
from .model import DynamicRangeViolation
from .theory import (
    empirical_bese,
    random_sparse_unit_pair,
    required_measurements,
    sandwich_check,
)

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_RUNTIME = 2


class ConfigError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # config problems exit 1, not argparse's 2
        self.print_usage(sys.stderr)
        sys.stderr.write(f"{self.prog}: error: {message}\n")
        raise SystemExit(EXIT_CONFIG)


def _int_list(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(tok) for tok in text.split(",") if tok.strip())
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated ints: {text!r}") from exc


def _float_list(text: str) -> tuple[float, ...]:
    try:
        return tuple(float(tok) for tok in text.split(",") if tok.strip())
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated floats: {text!r}") from exc


def _bool(text: str) -> bool:
    lowered = text.strip().lower()
    if lowered in {"1", "true", "yes", "on"}:
        return True
    if lowered in {"0", "false", "no", "off"}:
        return False
    raise ValueError(f"expected a boolean, got {text!r}")


def _range_mode(text: str):
    if text.strip().lower() == "auto":
        return "auto"
    try:
        return float(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected 'auto' or a number: {text!r}") from exc


_SWEEP_SPEC = {
    "n": (int, 1000),
    "s": (_int_list, (3, 6, 9, 12)),
    "m": (_int_list, tuple(range(100, 1001, 100))),
    "r": (_float_list, (4.0, 4.25, 4.5)),
    "trials": (int, 10),
    "seed": (int, 0),
    "iters": (int, 10),
    "tol": (float, 1e-6),
    "out": (str, "moram_sweep.csv"),
    "strict_range": (_bool, True),
    "workers": (int, 1),
    "plot": (_bool, True),
}

_IMAGE_SPEC = {
    "image": (str, None),
    "s": (int, 800),
    "m": (int, 6000),
    "r": (_range_mode, "auto"),
    "seed": (int, 0),
    "iters": (int, 10),
    "tol": (float, 1e-6),
    "out": (str, "moram_image"),
    "strict_range": (_bool, True),
    "peak255": (_bool, False),
    "plot": (_bool, True),
}

_THEORY_SPEC = {
    "seed": (int, 0),
    "dim": (int, 20),
    "pairs": (int, 1000),
    "out": (str, ""),
}

_DEMO_SPEC = {
    "n": (int, 120),
    "s": (int, 4),
    "m": (int, 90),
    "r": (float, 4.0),
    "seed": (int, 0),
    "iters": (int, 10),
    "tol": (float, 1e-6),
}


def _load_config_file(path: str) -> dict[str, str]:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}") from exc
    values: dict[str, str] = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        key, sep, value = stripped.partition("=")
        if not sep:
            raise ConfigError(f"{path}:{lineno}: expected key=value, got {line!r}")
        values[key.strip().replace("-", "_")] = value.strip()
    return values


def _merge_settings(spec: dict, args: argparse.Namespace) -> dict:
    """Built-in defaults, overridden by the config file, overridden by any
    flag actually given on the command line."""
    values = {key: default for key, (_, default) in spec.items()}
    config_path = getattr(args, "config", None)
    if config_path:
        for key, text in _load_config_file(config_path).items():
            if key not in spec:
                raise ConfigError(f"unknown config key {key!r}")
            converter = spec[key][0]
            try:
                values[key] = converter(text)
            except (ValueError, argparse.ArgumentTypeError) as exc:
                raise ConfigError(f"bad config value for {key}: {text!r} ({exc})") from exc
    for key in spec:
        if hasattr(args, key):
            values[key] = getattr(args, key)
    return values


def _add_common(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--config", help="flat key=value settings file; flags override it")


def _build_parser() -> _Parser:
    parser = _Parser(prog="moram", description=__doc__.splitlines()[0])
    subs = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    kw = {"default": argparse.SUPPRESS}

    sweep = subs.add_parser("sweep", help="Monte Carlo recovery sweep over (s, m, R)")
    _add_common(sweep)
    sweep.add_argument("--n", type=int, **kw, help="ambient dimension")
    sweep.add_argument("--s", type=_int_list, **kw, help="sparsity levels, comma-separated")
    sweep.add_argument("--m", type=_int_list, **kw, help="measurement counts, comma-separated")
    sweep.add_argument("--r", type=_float_list, **kw, help="wrap periods, comma-separated")
    sweep.add_argument("--trials", type=int, **kw, help="Monte Carlo trials per cell")
    sweep.add_argument("--seed", type=int, **kw, help="base seed")
    sweep.add_argument("--iters", type=int, **kw, help="max alternating iterations")
    sweep.add_argument("--tol", type=float, **kw, help="relative-residual exit tolerance")
    sweep.add_argument("--out", **kw, help="per-trial records CSV path")
    sweep.add_argument("--strict-range", action=argparse.BooleanOptionalAction, **kw)
    sweep.add_argument("--workers", type=int, **kw, help="trial worker threads")
    sweep.add_argument("--plot", action=argparse.BooleanOptionalAction, **kw)
    sweep.set_defaults(spec=_SWEEP_SPEC, handler=_cmd_sweep)

    image = subs.add_parser("image", help="wavelet-sparsified image recovery")
    _add_common(image)
    image.add_argument("image", nargs="?", **kw, help="input PGM (P5), square power-of-two")
    image.add_argument("--s", type=int, **kw, help="coefficients to keep")
    image.add_argument("--m", type=int, **kw, help="measurement count")
    image.add_argument("--r", type=_range_mode, **kw, help="wrap period or 'auto'")
    image.add_argument("--seed", type=int, **kw)
    image.add_argument("--iters", type=int, **kw)
    image.add_argument("--tol", type=float, **kw)
    image.add_argument("--out", **kw, help="output directory")
    image.add_argument("--strict-range", action=argparse.BooleanOptionalAction, **kw)
    image.add_argument("--peak255", action=argparse.BooleanOptionalAction, **kw)
    image.add_argument("--plot", action=argparse.BooleanOptionalAction, **kw)
    image.set_defaults(spec=_IMAGE_SPEC, handler=_cmd_image)

    theory = subs.add_parser("theory-check", help="distance and budget sanity checks")
    _add_common(theory)
    theory.add_argument("--seed", type=int, **kw)
    theory.add_argument("--dim", type=int, **kw)
    theory.add_argument("--pairs", type=int, **kw)
    theory.add_argument("--out", **kw, help="optional CSV of check results")
    theory.set_defaults(spec=_THEORY_SPEC, handler=_cmd_theory)

    demo = subs.add_parser("demo", help="one small end-to-end recovery, verbose")
    _add_common(demo)
    demo.add_argument("--n", type=int, **kw)
    demo.add_argument("--s", type=int, **kw)
    demo.add_argument("--m", type=int, **kw)
    demo.add_argument("--r", type=float, **kw)
    demo.add_argument("--seed", type=int, **kw)
    demo.add_argument("--iters", type=int, **kw)
    demo.add_argument("--tol", type=float, **kw)
    demo.set_defaults(spec=_DEMO_SPEC, handler=_cmd_demo)

    return parser


def _descent_config(settings: dict) -> DescentConfig:
    return DescentConfig(
        max_altmin_iters=settings["iters"], exact_tol=settings["tol"]
    )


def _cmd_sweep(settings: dict) -> int:
    out = Path(settings["out"])
    cfg = SweepConfig(
        n=settings["n"],
        s_list=settings["s"],
        m_list=settings["m"],
        r_list=settings["r"],
        trials=settings["trials"],
        base_seed=settings["seed"],
        descent=_descent_config(settings),
        output_path=out,
        strict_range=settings["strict_range"],
        workers=settings["workers"],
    )
    records, aggregates = run_sweep(cfg)
    means_path = out.with_name(out.stem + "_means.csv")
    write_aggregates_csv(means_path, aggregates)
    for agg in aggregates:
        print(
            f"s={agg.s} m={agg.m} R={agg.r:g}: mean_rel_error="
            f"{agg.mean_rel_error:.3e} exact={agg.exact_fraction:.0%} "
            f"ok={agg.trials_ok}/{agg.trials_ok + agg.trials_failed}"
        )
    print(f"records: {out}")
    print(f"means:   {means_path}")
    if settings["plot"]:
        from .plots import save_sweep_figure

        figure_path = save_sweep_figure(aggregates, out.with_suffix(".png"))
        print(f"figure:  {figure_path}")
    if all(rec.error for rec in records):
        print("every trial failed", file=sys.stderr)
        return EXIT_RUNTIME
    return EXIT_OK


def _cmd_image(settings: dict) -> int:
    if not settings["image"]:
        raise ConfigError("an input image path is required")
    out_dir = Path(settings["out"])
    result = run_image(
        settings["image"],
        s=settings["s"],
        m=settings["m"],
        r=settings["r"],
        seed=settings["seed"],
        descent=_descent_config(settings),
        out_dir=out_dir,
        peak255=settings["peak255"],
        strict_range=settings["strict_range"],
    )
    print(
        f"{result.image}: side={result.side} s={result.s} m={result.m} "
        f"R={result.r:g} rel_coeff_error={result.rel_coeff_error:.3e}"
    )
    print(
        f"PSNR vs original:   {result.psnr_vs_original:.2f} dB\n"
        f"PSNR vs sparsified: {result.psnr_vs_sparsified:.2f} dB"
    )
    for path in result.output_files:
        print(f"wrote: {path}")
    if settings["plot"]:
        from .plots import save_image_figure

        figure_path = save_image_figure(
            result, out_dir / f"{Path(result.image).stem}_panel.png"
        )
        print(f"wrote: {figure_path}")
    return EXIT_OK


def _cmd_theory(settings: dict) -> int:
    rng = _rng(settings["seed"])
    dim, pairs = settings["dim"], settings["pairs"]
    rows = []

    worst = 0.0
    violations = 0
    for _ in range(pairs):
        p = rng.standard_normal(dim)
        q = rng.standard_normal(dim)
        p /= np.linalg.norm(p)
        q /= np.linalg.norm(q)
        low, mid, high = sandwich_check(p, q)
        worst = max(worst, low - mid, mid - high)
        if low > mid + 1e-12 or mid > high + 1e-12:
            violations += 1
    ok = violations == 0
    rows.append(("sandwich_inequality", f"{pairs} pairs, dim {dim}", worst, ok))

    m_ref = required_measurements(3, 1000, 0.1, 0.1)
    monotone = required_measurements(3, 1000, 0.05, 0.1) > m_ref
    rows.append(("budget_monotone_in_epsilon", f"m(eps=0.1)={m_ref}", float(m_ref), monotone))

    s, n, delta, eps = 3, 100, 0.2, 0.1
    m = required_measurements(2 * s, n, eps, 0.1)
    A = gaussian_matrix(m, n, derive_seed(settings["seed"], "bese-matrix"))
    bound = delta / 2.0 + eps
    worst_dh = 0.0
    for idx in range(50):
        x_star, x0, _ = random_sparse_unit_pair(
            n, s, delta, derive_seed(settings["seed"], "bese-pair", idx)
        )
        worst_dh = max(worst_dh, empirical_bese(A, x_star, x0))
    bese_ok = worst_dh <= bound
    rows.append(
        ("embedding_bound", f"m={m}, worst d_H vs {bound:g}", worst_dh, bese_ok)
    )

    all_ok = True
    for name, detail, value, passed in rows:
        all_ok &= passed
        print(f"{'PASS' if passed else 'FAIL'} {name}: {detail} (value {value:.3e})")

    if settings["out"]:
        import csv

        out = Path(settings["out"])
        out.parent.mkdir(parents=True, exist_ok=True)
        with out.open("w", newline="") as handle:
            writer = csv.writer(handle)
            writer.writerow(["check", "detail", "value", "passed"])
            for name, detail, value, passed in rows:
                writer.writerow([name, detail, repr(value), int(passed)])
        print(f"wrote: {out}")
    return EXIT_OK if all_ok else EXIT_RUNTIME


def _cmd_demo(settings: dict) -> int:
    from .core import random_sparse_signal, relative_error
    from .altmin import moram_descent
    from .initialize import moram_initialize
    from .model import forward

    n, s, m, r = settings["n"], settings["s"], settings["m"], settings["r"]
    seed = settings["seed"]
    print(f"demo: n={n} s={s} m={m} R={r:g} seed={seed}")
    A = gaussian_matrix(m, n, derive_seed(seed, "matrix"))
    x_star = random_sparse_signal(n, s, derive_seed(seed, "signal"))
    obs = forward(A, x_star, r, strict=True)
    x0 = moram_initialize(obs, A, s)
    print(f"init rel_error: {relative_error(x0.values, x_star.values):.4f}")
    x_hat, trace = moram_descent(obs, A, s, _descent_config(settings), x0)
    for idx, step in enumerate(trace.steps):
        print(
            f"  iter {idx}: bin_flips={step.bin_flips:4d} "
            f"rel_residual={step.rel_residual:.3e} wall={step.wall_ms:.0f} ms"
        )
    final = relative_error(x_hat.values, x_star.values)
    print(f"final rel_error: {final:.3e} (converged={trace.converged})")
    return EXIT_OK


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        settings = _merge_settings(args.spec, args)
        return args.handler(settings)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except DynamicRangeViolation as exc:
        print(f"runtime error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    except ValueError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    raise SystemExit(main())
