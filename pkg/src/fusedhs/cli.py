"""Command-line interface: fit, simulate, loocv, and tune subcommands.

All commands write CSV outputs plus a run manifest (config echo, seed,
versions, wall time). Output CSVs are byte-reproducible from the seed; the
env var ``FUSEDHS_SEED`` overrides the built-in default seed, and an explicit
``--seed`` overrides both. A ``--config`` file holds ``key=value`` lines with
the same keys as the long flags; command-line flags win over file entries.

Exit codes: 0 success, 2 usage/configuration error, 3 data error,
4 numerical failure.
"""

from __future__ import annotations

import argparse
import os
import platform
import sys
import time
from dataclasses import asdict
from pathlib import Path

import numpy as np
import scipy

from . import __version__
from .data import load_csv, standardize
from .errors import ConfigError, DataError, NumericalSingularityError, ParameterError
from .inference import compute_waic, default_tuning_grid, loocv, select_tuning, summarize
from .models import MODELS, SamplerConfig, run_chain
from .rng import RngStream
from .simulation import MetricsReport, make_case, run_benchmark

__all__ = ["main", "cli_main", "parse_grid"]

FLOAT_FORMAT = "{:.17g}"

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_DATA = 3
EXIT_NUMERICAL = 4


def _fmt(value) -> str:
    if isinstance(value, (float, np.floating)):
        return FLOAT_FORMAT.format(float(value))
    return str(value)


def _atomic_write(path: Path, text: str) -> None:
    tmp = path.with_name(path.name + ".tmp")
    with open(tmp, "w", newline="") as fh:
        fh.write(text)
    os.replace(tmp, path)


def _write_csv(path: Path, header: list[str], rows: list[list]) -> None:
    lines = [",".join(header)]
    lines += [",".join(_fmt(cell) for cell in row) for row in rows]
    _atomic_write(path, "\n".join(lines) + "\n")


def _write_manifest(path: Path, entries: dict) -> None:
    lines = [f"{key}={_fmt(value)}" for key, value in entries.items()]
    _atomic_write(path, "\n".join(lines) + "\n")


def parse_grid(text: str) -> list[float]:
    """Parse ``a:b:Nlog`` (log-spaced), ``a:b:N`` (linear), or ``v1,v2,...``."""
    text = text.strip()
    try:
        if "," in text:
            return [float(tok) for tok in text.split(",") if tok.strip()]
        if ":" in text:
            parts = text.split(":")
            if len(parts) != 3:
                raise ValueError("expected start:stop:count")
            lo, hi = float(parts[0]), float(parts[1])
            count_tok = parts[2].strip().lower()
            log_spaced = count_tok.endswith("log")
            count = int(count_tok[:-3]) if log_spaced else int(count_tok)
            if count < 1:
                raise ValueError("count must be >= 1")
            if log_spaced:
                if lo <= 0 or hi <= 0:
                    raise ValueError("log spacing needs positive endpoints")
                return list(np.logspace(np.log10(lo), np.log10(hi), count))
            return list(np.linspace(lo, hi, count))
        return [float(text)]
    except ValueError as err:
        raise ConfigError(f"cannot parse grid {text!r}: {err}") from err


def _default_seed() -> int:
    env = os.environ.get("FUSEDHS_SEED")
    if env is not None:
        try:
            return int(env)
        except ValueError as err:
            raise ConfigError(f"FUSEDHS_SEED must be an integer, got {env!r}") from err
    return 0


def _add_sampler_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--iters", type=int, default=5000, help="total Gibbs sweeps")
    parser.add_argument("--burnin", type=int, default=2000, help="discarded initial sweeps")
    parser.add_argument("--thin", type=int, default=1, help="keep every thin-th draw")
    parser.add_argument("--seed", type=int, default=None, help="random seed (default: FUSEDHS_SEED or 0)")
    parser.add_argument("--nu0", type=float, default=1.0, help="error-variance prior shape*2")
    parser.add_argument("--eta0", type=float, default=1.0, help="error-variance prior scale*2")
    parser.add_argument("--r1", type=float, default=1.0, help="coefficient-shrinkage gamma shape")
    parser.add_argument("--delta1", type=float, default=10.0, help="coefficient-shrinkage gamma rate")
    parser.add_argument("--r2", type=float, default=1.0, help="fusion-shrinkage gamma shape (bfl)")
    parser.add_argument("--delta2", type=float, default=10.0, help="fusion-shrinkage gamma rate (bfl)")
    parser.add_argument("--tilde-tau2", type=float, default=None, help="fixed global fusion scale (bhh)")


def _add_output_flags(parser: argparse.ArgumentParser, default_tag: str | None = None) -> None:
    parser.add_argument("--outdir", type=Path, default=Path("."), help="output directory")
    parser.add_argument("--tag", type=str, default=default_tag, help="basename prefix for output files")
    parser.add_argument("--config", type=Path, default=None, help="key=value config file; flags override")


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fusedhs",
        description="Gibbs samplers for Bayesian sparse-and-fused linear regression",
    )
    parser.add_argument("--version", action="version", version=f"fusedhs {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    fit = sub.add_parser("fit", help="fit one model to a CSV and summarize the posterior")
    fit.add_argument("--input", type=Path, required=True, help="CSV with a column named 'y'")
    fit.add_argument("--model", choices=MODELS, required=True)
    fit.add_argument("--level", type=float, default=0.95, help="credible-interval level")
    fit.add_argument("--waic", action="store_true", help="also write the WAIC decomposition")
    fit.add_argument("--draws", action="store_true", help="also write retained draws as a wide CSV")
    _add_sampler_flags(fit)
    _add_output_flags(fit)

    sim = sub.add_parser("simulate", help="run the replication benchmark for one case")
    sim.add_argument("--case", type=int, required=True, choices=(1, 2, 3, 4))
    sim.add_argument("--sigma", type=float, default=0.5)
    sim.add_argument("--beta", type=int, default=1, choices=(1, 2), help="truth variant for cases 1/2")
    sim.add_argument("--n", type=int, default=50)
    sim.add_argument("--p", type=int, default=None, help="dimension for cases 3/4 (default 50)")
    sim.add_argument("--reps", type=int, default=20)
    sim.add_argument("--methods", type=str, default="bfl,bfh", help="comma-separated model names")
    _add_sampler_flags(sim)
    _add_output_flags(sim, default_tag=None)

    cv = sub.add_parser("loocv", help="leave-one-out cross-validation on a CSV")
    cv.add_argument("--input", type=Path, required=True)
    cv.add_argument("--model", choices=MODELS, required=True)
    cv.add_argument("--grid", type=str, default=None, help="tuning grid (bhh), e.g. 1e4:1e6:5log")
    _add_sampler_flags(cv)
    _add_output_flags(cv)

    tune = sub.add_parser("tune", help="select the bhh global fusion scale by WAIC")
    tune.add_argument("--input", type=Path, required=True)
    tune.add_argument("--model", choices=MODELS, default="bhh")
    tune.add_argument("--grid", type=str, default="1e4:1e6:5log")
    _add_sampler_flags(tune)
    _add_output_flags(tune)

    return parser


def _read_config_file(path: Path) -> list[str]:
    if not path.is_file():
        raise DataError(f"config file not found: {path}")
    extra: list[str] = []
    for raw in path.read_text().splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"config line must be key=value, got {raw!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        flag = "--" + key.replace("_", "-")
        if value.lower() in ("true", "false"):
            if value.lower() == "true":
                extra.append(flag)
        else:
            extra.extend([flag, value])
    return extra


def _merge_config(argv: list[str]) -> list[str]:
    # config-file entries are spliced in right after the subcommand so that
    # explicit command-line flags (parsed later) override them
    if "--config" not in argv:
        return argv
    idx = argv.index("--config")
    if idx + 1 >= len(argv):
        raise ConfigError("--config requires a file path")
    extra = _read_config_file(Path(argv[idx + 1]))
    return argv[:1] + extra + argv[1:]


def _sampler_config(args: argparse.Namespace) -> SamplerConfig:
    seed = args.seed if args.seed is not None else _default_seed()
    cfg = SamplerConfig(
        iterations=args.iters,
        burn_in=args.burnin,
        seed=seed,
        nu0=args.nu0,
        eta0=args.eta0,
        r1=args.r1,
        delta1=args.delta1,
        r2=args.r2,
        delta2=args.delta2,
        thinning=args.thin,
        tilde_tau2_fixed=args.tilde_tau2,
    )
    cfg.validate()
    return cfg


def _base_manifest(args: argparse.Namespace, cfg: SamplerConfig) -> dict:
    entries = {"command": args.command}
    if getattr(args, "model", None):
        entries["model"] = args.model
    if getattr(args, "input", None):
        entries["input"] = args.input
    for key, value in asdict(cfg).items():
        if value is not None:
            entries[key] = value
    entries["python_version"] = platform.python_version()
    entries["numpy_version"] = np.__version__
    entries["scipy_version"] = scipy.__version__
    entries["fusedhs_version"] = __version__
    return entries


def _cmd_fit(args: argparse.Namespace) -> int:
    cfg = _sampler_config(args)
    ds = load_csv(args.input)
    std = standardize(ds)
    start = time.perf_counter()
    draws = run_chain(args.model, std, cfg, rng=RngStream(cfg.seed))
    est = summarize(draws, level=args.level)

    tag = args.tag or args.model
    outdir = args.outdir
    outdir.mkdir(parents=True, exist_ok=True)
    outputs = []

    summary_path = outdir / f"{tag}_summary.csv"
    rows = [
        [name, est.point[j], est.median[j], est.ci_lower[j], est.ci_upper[j]]
        for j, name in enumerate(std.column_names)
    ]
    _write_csv(summary_path, ["coefficient", "point", "median", "ci_lower", "ci_upper"], rows)
    outputs.append(summary_path)

    manifest = _base_manifest(args, cfg)
    manifest["level"] = args.level
    if args.waic:
        score = compute_waic(draws, std)
        waic_path = outdir / f"{tag}_waic.csv"
        _write_csv(waic_path, ["waic", "lppd", "p_waic"], [[score.waic, score.lppd, score.p_waic]])
        outputs.append(waic_path)
    if args.draws:
        draws_path = outdir / f"{tag}_draws.csv"
        _write_csv(draws_path, draws.columns, [list(row) for row in draws.values])
        outputs.append(draws_path)

    manifest["wall_time_s"] = time.perf_counter() - start
    manifest["outputs"] = ";".join(str(path) for path in outputs)
    _write_manifest(outdir / f"{tag}_manifest.txt", manifest)

    print(f"fit: {args.model} on {ds.n} rows x {ds.p} predictors; wrote {summary_path}")
    return EXIT_OK


def _cmd_simulate(args: argparse.Namespace) -> int:
    cfg = _sampler_config(args)
    methods = [tok.strip() for tok in args.methods.split(",") if tok.strip()]
    if "bhh" in methods and cfg.tilde_tau2_fixed is None:
        raise ConfigError("simulating bhh requires --tilde-tau2")
    spec = make_case(args.case, args.sigma, args.n, beta_variant=args.beta, p=args.p, replications=args.reps)

    start = time.perf_counter()
    report = run_benchmark([spec], methods, cfg, rng=RngStream(cfg.seed))

    tag = args.tag or f"case{args.case}"
    outdir = args.outdir
    outdir.mkdir(parents=True, exist_ok=True)
    metrics_path = outdir / f"{tag}_metrics.csv"
    header = MetricsReport.CSV_HEADER.split(",")
    rows = [
        [
            r.case_id, r.sigma, r.n, r.p, r.method, r.replications, r.completed, r.failed,
            r.mse, r.mse_sd, r.mse_diff, r.mse_diff_sd, r.pse, r.pse_sd,
        ]
        for r in report.rows
    ]
    _write_csv(metrics_path, header, rows)

    manifest = _base_manifest(args, cfg)
    manifest.update(
        case=args.case, sigma=args.sigma, beta_variant=args.beta, n=args.n,
        p=spec.p, replications=args.reps, methods=",".join(methods),
    )
    manifest["wall_time_s"] = time.perf_counter() - start
    manifest["outputs"] = str(metrics_path)
    _write_manifest(outdir / f"{tag}_manifest.txt", manifest)

    for r in report.rows:
        print(
            f"simulate case {r.case_id} {r.method}: mse={r.mse:.4g} ({r.mse_sd:.4g}) "
            f"mse_diff={r.mse_diff:.4g} pse={r.pse:.4g} [{r.completed}/{r.replications} ok]"
        )
    print(f"wrote {metrics_path}")
    return EXIT_OK


def _cmd_loocv(args: argparse.Namespace) -> int:
    cfg = _sampler_config(args)
    ds = load_csv(args.input)
    grid = parse_grid(args.grid) if args.grid else None

    start = time.perf_counter()
    result = loocv(args.model, ds, grid, cfg, rng=RngStream(cfg.seed))

    tag = args.tag or f"{args.model}_loocv"
    outdir = args.outdir
    outdir.mkdir(parents=True, exist_ok=True)
    folds_path = outdir / f"{tag}_folds.csv"
    rows = [
        [i + 1, ds.y[i], result.predictions[i], result.fold_errors[i]]
        for i in range(ds.n)
    ]
    _write_csv(folds_path, ["fold", "y_true", "y_pred", "sq_error"], rows)
    summary_path = outdir / f"{tag}_summary.csv"
    _write_csv(summary_path, ["cv_mean", "cv_sd", "n_folds"], [[result.cv_mean, result.cv_sd, ds.n]])

    manifest = _base_manifest(args, cfg)
    if grid:
        manifest["grid"] = ",".join(FLOAT_FORMAT.format(v) for v in grid)
    manifest["wall_time_s"] = time.perf_counter() - start
    manifest["outputs"] = ";".join(str(path) for path in (folds_path, summary_path))
    _write_manifest(outdir / f"{tag}_manifest.txt", manifest)

    print(f"loocv: {ds.n} folds, cv_mean={result.cv_mean:.6g} (sd {result.cv_sd:.6g}); wrote {summary_path}")
    return EXIT_OK


def _cmd_tune(args: argparse.Namespace) -> int:
    cfg = _sampler_config(args)
    ds = load_csv(args.input)
    std = standardize(ds)
    grid = parse_grid(args.grid) if args.grid else list(default_tuning_grid())

    start = time.perf_counter()
    best, scored = select_tuning(grid, args.model, std, cfg, rng=RngStream(cfg.seed))

    tag = args.tag or f"{args.model}_tune"
    outdir = args.outdir
    outdir.mkdir(parents=True, exist_ok=True)
    tune_path = outdir / f"{tag}_waic.csv"
    rows = [[value, score.waic, score.lppd, score.p_waic] for value, score in scored]
    _write_csv(tune_path, ["tilde_tau2", "waic", "lppd", "p_waic"], rows)

    manifest = _base_manifest(args, cfg)
    manifest["grid"] = ",".join(FLOAT_FORMAT.format(v) for v in grid)
    manifest["selected_tilde_tau2"] = best
    manifest["wall_time_s"] = time.perf_counter() - start
    manifest["outputs"] = str(tune_path)
    _write_manifest(outdir / f"{tag}_manifest.txt", manifest)

    print(f"tune: selected tilde_tau2={best:.6g} from {len(grid)} candidates; wrote {tune_path}")
    return EXIT_OK


_COMMANDS = {
    "fit": _cmd_fit,
    "simulate": _cmd_simulate,
    "loocv": _cmd_loocv,
    "tune": _cmd_tune,
}


def cli_main(argv: list[str] | None = None) -> int:
    """Entry point; returns the process exit code instead of raising."""
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = _build_parser()
    try:
        argv = _merge_config(argv)
        args = parser.parse_args(argv)
    except SystemExit as err:  # argparse handles usage text itself
        return int(err.code or 0)
    except (ConfigError, ParameterError) as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_USAGE
    except DataError as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_DATA

    try:
        return _COMMANDS[args.command](args)
    except (ConfigError, ParameterError) as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_USAGE
    except DataError as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_DATA
    except NumericalSingularityError as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_NUMERICAL


def main() -> None:
    raise SystemExit(cli_main())


if __name__ == "__main__":
    main()
