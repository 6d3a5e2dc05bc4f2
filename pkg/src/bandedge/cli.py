"""Command-line experiment driver.

One subcommand per experiment family: ``walk`` (circulant walk counts),
``moments`` (non-backtracking trace moments), ``oracle`` (exhaustive
path counts), ``edge`` (spectral-edge ensembles), ``norm`` (norm
statistics), ``validate`` (matrix invariant checks).

Every run writes ``manifest.json`` before any result file, so a crashed
run still records what was attempted.  Numeric CSV fields use 17
significant digits (full float64 round trip); identical configuration
and seed produce byte-identical CSV bodies.

Exit codes: 0 success, 1 validation found violations, 2 configuration
or argument error, 3 resource budget exceeded, 4 numeric failure.
A flat ``key=value`` config file can seed any subcommand's options via
``--config``; explicit flags override file values.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import __version__
from .circulant import CirculantGraph, walk_asymptotics, walk_count_dp, walk_count_fourier_all
from .cheby import hutchinson_trace, nb_moment_traces
from .edge_stats import DENSE_EIGEN_BUDGET, EnsembleConfig, ensemble_run
from .errors import BudgetError, NumericError
from .path_oracle import KPathSpec, cumulant_T, diagram_census, joint_moment_paths
from .sampler import (
    BandParams,
    SeedSpec,
    dump_band_entries,
    load_band_entries,
    sample_band_matrix,
    validate,
)


def _fmt(x) -> str:
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return f"{float(x):.17g}"


def _default_threads() -> int:
    env = os.environ.get("BANDEDGE_THREADS", "")
    try:
        return max(1, int(env))
    except ValueError:
        return 1


def _add_common(p: argparse.ArgumentParser, beta: bool = True):
    p.add_argument("--config", type=str, default=None, help="flat key=value config file; flags override")
    p.add_argument("--n-sites", type=int, required=True, help="matrix size N")
    p.add_argument("--w", type=int, required=True, help="half-bandwidth W")
    if beta:
        p.add_argument("--beta", type=int, choices=(1, 2), default=1, help="1 signs, 2 phases")
    p.add_argument("--out", type=str, default=".", help="output directory")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="bandedge", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"bandedge {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("walk", help="circulant walk counts and asymptotics")
    _add_common(p, beta=False)
    p.add_argument("--lengths", type=str, required=True, help="comma-separated walk lengths")
    p.add_argument("--max-r", type=int, default=None, help="emit displacements 0..max_r (default all)")
    p.add_argument("--dp-budget", type=int, default=1_000_000, help="N*n ceiling for the exact count")

    p = sub.add_parser("moments", help="non-backtracking trace moments")
    _add_common(p)
    p.add_argument("--n-max", type=int, required=True)
    p.add_argument("--replicates", type=int, default=1)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--method", choices=("auto", "dense", "hutchinson"), default="auto")
    p.add_argument("--probes", type=int, default=32)
    p.add_argument("--dense-budget", type=int, default=4096)

    p = sub.add_parser("oracle", help="exhaustive path counts and diagram census")
    _add_common(p)
    p.add_argument("--lengths", type=str, required=True, help="comma-separated closed path lengths")
    p.add_argument("--budget", type=int, default=10, help="total length ceiling")
    p.add_argument("--check-exhaustive", action="store_true",
                   help="cross-check against the exhaustive sign-ensemble average (beta=1)")

    p = sub.add_parser("edge", help="spectral-edge Monte Carlo ensemble")
    _add_common(p)
    p.add_argument("--replicates", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--regime", choices=("rmt", "poisson", "auto"), default="auto")
    p.add_argument("--grid-start", type=float, default=-2.0)
    p.add_argument("--grid-stop", type=float, default=6.0)
    p.add_argument("--grid-count", type=int, default=81)
    p.add_argument("--threads", type=int, default=None, help="worker processes (env BANDEDGE_THREADS)")
    p.add_argument("--eigen-budget", type=int, default=DENSE_EIGEN_BUDGET)

    p = sub.add_parser("norm", help="norm statistics of an ensemble")
    _add_common(p)
    p.add_argument("--replicates", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--regime", choices=("rmt", "poisson", "auto"), default="auto")
    p.add_argument("--threads", type=int, default=None)
    p.add_argument("--eigen-budget", type=int, default=DENSE_EIGEN_BUDGET)

    p = sub.add_parser("validate", help="check matrix invariants")
    _add_common(p)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--replicate", type=int, default=0)
    p.add_argument("--input", type=str, default=None, help="band-entry CSV to load instead of sampling")
    p.add_argument("--dump", type=str, default=None, help="write the matrix's band entries to this CSV")
    return parser


def _inject_config(argv: list[str]) -> list[str]:
    """Expand --config FILE into leading flags so explicit flags win."""
    if "--config" not in argv:
        return argv
    idx = argv.index("--config")
    if idx + 1 >= len(argv):
        raise ConfigError("--config requires a file path")
    path = Path(argv[idx + 1])
    if not path.exists():
        raise ConfigError(f"config file not found: {path}")
    injected = []
    for lineno, line in enumerate(path.read_text().splitlines(), start=1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected key=value, got {line!r}")
        key, value = line.split("=", 1)
        key = key.strip().replace("_", "-")
        injected += [f"--{key}", value.strip()]
    rest = argv[:idx] + argv[idx + 2 :]
    # keep the subcommand first, then file values, then explicit flags
    return rest[:1] + injected + rest[1:]


class ConfigError(ValueError):
    pass


def _write_manifest(out: Path, command: str, args: argparse.Namespace, extra: dict | None = None):
    out.mkdir(parents=True, exist_ok=True)
    config = {k: v for k, v in sorted(vars(args).items()) if k not in ("command", "config")}
    manifest = {
        "command": command,
        "code_version": __version__,
        "numpy_version": np.__version__,
        "rng": SeedSpec.RNG_NAME,
        "config": config,
    }
    if extra:
        manifest.update(extra)
    with open(out / "manifest.json", "w") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _write_csv(path: Path, header: list[str], rows):
    with open(path, "w") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join("" if v is None else _fmt(v) if not isinstance(v, str) else v for v in row) + "\n")


def _parse_lengths(text: str) -> list[int]:
    try:
        lengths = [int(tok) for tok in text.split(",") if tok.strip()]
    except ValueError as exc:
        raise ConfigError(f"bad lengths {text!r}: {exc}") from exc
    if not lengths:
        raise ConfigError("lengths must contain at least one integer")
    return lengths


def _auto_regime(n_sites: int, w: int) -> str:
    return "rmt" if w >= n_sites ** (5.0 / 6.0) else "poisson"


def _cmd_walk(args) -> int:
    graph = CirculantGraph(args.n_sites, args.w)
    out = Path(args.out)
    _write_manifest(out, "walk", args)
    lengths = _parse_lengths(args.lengths)
    max_r = args.n_sites - 1 if args.max_r is None else min(args.max_r, args.n_sites - 1)
    rows = []
    for n in lengths:
        fourier = walk_count_fourier_all(graph, n)
        try:
            exact_counts = walk_count_dp(graph, n, budget=args.dp_budget)
            total = graph.degree**n
            exact = [float(Fraction(c, total)) for c in exact_counts]
        except BudgetError:
            exact = [None] * args.n_sites
        for r in range(max_r + 1):
            wa = walk_asymptotics(graph, n, r)
            rows.append((n, r, exact[r], fourier[r], wa.gaussian, wa.uniform, wa.upper_bound))
    _write_csv(out / "walk.csv",
               ["n", "R", "count_exact", "count_fourier", "gaussian", "uniform", "upper_bound"], rows)
    return 0


def _cmd_moments(args) -> int:
    params = BandParams(args.n_sites, args.w, args.beta)
    out = Path(args.out)
    _write_manifest(out, "moments", args)
    method = args.method
    if method == "auto":
        method = "dense" if args.n_sites <= args.dense_budget else "hutchinson"
    estimates = np.empty((args.replicates, args.n_max + 1))
    for r in range(args.replicates):
        seed = SeedSpec(args.seed, r)
        h = sample_band_matrix(params, seed)
        if method == "dense":
            estimates[r] = nb_moment_traces(h, args.n_max, budget=args.dense_budget)
        else:
            for n in range(args.n_max + 1):
                estimates[r, n] = hutchinson_trace(h, n, probes=args.probes, seed=seed).estimate
    mean = estimates.mean(axis=0)
    if args.replicates > 1:
        stderr = estimates.std(axis=0, ddof=1) / math.sqrt(args.replicates)
    else:
        stderr = np.zeros(args.n_max + 1)
    rows = [(n, mean[n], stderr[n], method, args.replicates) for n in range(args.n_max + 1)]
    _write_csv(out / "moments.csv",
               ["n", "trace_mean", "trace_std_error", "method", "replicates"], rows)
    return 0


def _cmd_oracle(args) -> int:
    params = BandParams(args.n_sites, args.w, args.beta)
    out = Path(args.out)
    _write_manifest(out, "oracle", args)
    lengths = tuple(_parse_lengths(args.lengths))
    spec = KPathSpec(lengths, beta=args.beta)
    joint = joint_moment_paths(params, spec, budget=args.budget)
    cumulant = cumulant_T(params, spec, budget=args.budget)
    census = diagram_census(params, spec, budget=args.budget)
    report = {
        "params": {"n_sites": args.n_sites, "half_bandwidth": args.w, "beta": args.beta},
        "lengths": sorted(lengths),
        "joint_moment": joint,
        "cumulant": cumulant,
        "diagram_census": [{"s": s, "count": census[s]} for s in sorted(census)],
    }
    if args.check_exhaustive:
        if args.beta != 1:
            raise ConfigError("--check-exhaustive requires beta=1")
        from .sampler import enumerate_sign_assignments

        total = 0
        count = 0
        for m in enumerate_sign_assignments(params):
            traces = nb_moment_traces(m, max(lengths))
            prod = 1.0
            for n in lengths:
                prod *= traces[n]
            total += prod
            count += 1
        mean = float(total) / count
        report["exhaustive_mean"] = int(mean) if mean == int(mean) else mean
        report["oracles_match"] = bool(mean == joint)
        if not report["oracles_match"]:
            with open(out / "oracle.json", "w") as fh:
                json.dump(report, fh, indent=2)
                fh.write("\n")
            raise NumericError(f"oracle mismatch: exhaustive {mean} vs paths {joint}")
    with open(out / "oracle.json", "w") as fh:
        json.dump(report, fh, indent=2)
        fh.write("\n")
    print(json.dumps(report))
    return 0


def _run_ensemble(args, write_curves: bool) -> int:
    params = BandParams(args.n_sites, args.w, args.beta)
    regime = args.regime if args.regime != "auto" else _auto_regime(args.n_sites, args.w)
    threads = args.threads if args.threads is not None else _default_threads()
    out = Path(args.out)
    _write_manifest(out, "edge" if write_curves else "norm", args, extra={"regime": regime})
    if write_curves:
        grid = np.linspace(args.grid_start, args.grid_stop, args.grid_count)
    else:
        grid = np.array([0.0, 1.0])
    config = EnsembleConfig(
        params=params,
        replicates=args.replicates,
        regime=regime,
        lambda_grid=grid,
        master_seed=args.seed,
        threads=threads,
        eigen_budget=args.eigen_budget,
    )
    summary = ensemble_run(config)
    rows = [
        (r, summary.alpha_max_samples[r], summary.alpha_min_samples[r],
         summary.scaled_max_samples[r], summary.scaled_min_samples[r], summary.norm_ratios[r])
        for r in range(summary.replicate_count)
    ]
    _write_csv(out / "extremes.csv",
               ["replicate", "alpha_max", "alpha_min", "scaled_right", "scaled_left", "norm_ratio"], rows)
    if write_curves:
        curve_rows = [
            (summary.lambda_grid[i], summary.mean_curve_R.values[i],
             summary.mean_curve_L.values[i], summary.curve_std_R[i])
            for i in range(len(summary.lambda_grid))
        ]
        _write_csv(out / "curves.csv", ["lambda", "sigma_R_mean", "sigma_L_mean", "sigma_R_std"], curve_rows)
    return 0


def _cmd_validate(args) -> int:
    params = BandParams(args.n_sites, args.w, args.beta)
    out = Path(args.out)
    _write_manifest(out, "validate", args)
    if args.input:
        h = load_band_entries(args.input, params)
        source = args.input
    else:
        h = sample_band_matrix(params, SeedSpec(args.seed, args.replicate))
        source = f"sampled(seed={args.seed}, replicate={args.replicate})"
    violations = validate(h) + validate(h.to_dense(), params)
    if args.dump:
        dump_band_entries(h, args.dump)
    report = {"source": source, "valid": not violations, "violations": violations}
    print(json.dumps(report))
    return 0 if not violations else 1


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        argv = _inject_config(argv)
        args = build_parser().parse_args(argv)
        if args.command == "walk":
            return _cmd_walk(args)
        if args.command == "moments":
            return _cmd_moments(args)
        if args.command == "oracle":
            return _cmd_oracle(args)
        if args.command == "edge":
            return _run_ensemble(args, write_curves=True)
        if args.command == "norm":
            return _run_ensemble(args, write_curves=False)
        if args.command == "validate":
            return _cmd_validate(args)
        raise ConfigError(f"unknown command {args.command!r}")
    except ConfigError as exc:
        print(json.dumps({"error": "config", "message": str(exc)}), file=sys.stderr)
        return 2
    except BudgetError as exc:
        print(json.dumps({"error": "budget", "message": str(exc)}), file=sys.stderr)
        return 3
    except (NumericError, np.linalg.LinAlgError, FloatingPointError) as exc:
        print(json.dumps({"error": "numeric", "message": str(exc)}), file=sys.stderr)
        return 4


if __name__ == "__main__":
    sys.exit(main())
