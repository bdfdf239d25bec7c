"""Command-line front end.

Subcommands: ``exact`` (ground-truth counting), ``approx`` (the O(n)
approximation loop), ``evaluate`` (per-k divergence tables), and
``simulate`` (config-driven experiments writing CSV/JSON files).

stdout carries only the report; messages go to stderr. Exit codes:
0 success, 1 input error, 2 infeasible instance, 3 internal error.
Counts are serialized as decimal strings so arbitrary precision
survives JSON consumers; the schemas are documented in docs/schemas/.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from .exact import InfeasibleError, RELATIONS
from .inputs import InputError, read_input
from .kde import DEFAULT_KDE_SAMPLES
from .pipeline import (
    ApproxConfig,
    PipelineError,
    approximate_perfect_sum,
    exact_perfect_sum,
)
from .simulation import (
    DEFAULT_REFERENCE_SAMPLES,
    SetSpec,
    divergence_experiment,
    error_experiment,
    generate_set,
)

__all__ = ["main"]

_CLI_METHODS = ("normal", "irwin-hall", "chi-square", "kde")


class _Parser(argparse.ArgumentParser):
    # argparse exits with 2 on usage errors; reserve 2 for infeasible sizes
    def error(self, message):
        self.print_usage(sys.stderr)
        raise SystemExit(self._fail(message))

    def _fail(self, message) -> int:
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        return 1


def _method_name(cli_name: str) -> str:
    return cli_name.replace("-", "_")


def _granularity(text: str):
    if text == "auto":
        return None
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"granularity must be 'auto' or a number, got {text!r}")
    if value < 0:
        raise argparse.ArgumentTypeError("granularity must be >= 0")
    return value


def _int_list(text: str) -> list[int]:
    try:
        return [int(tok) for tok in text.split(",") if tok.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")


def _default_threads() -> int:
    env = os.environ.get("PERFECTSUM_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            pass
    return os.cpu_count() or 1


def build_parser() -> _Parser:
    parser = _Parser(prog="perfectsum", description=__doc__.splitlines()[0])
    parser.add_argument(
        "--threads",
        type=int,
        default=_default_threads(),
        help="cap on worker parallelism (results do not depend on it); "
        "default from PERFECTSUM_THREADS or machine parallelism",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_exact = sub.add_parser("exact", help="exact subset counting (enumeration or DP)")
    p_exact.add_argument("input", help="value file: text, CSV, or JSON")
    p_exact.add_argument("--target", type=float, required=True)
    p_exact.add_argument("--relation", choices=RELATIONS, required=True)
    p_exact.add_argument("--tolerance", type=float, default=0.0,
                         help="|sum - target| <= tolerance for eq on real data")
    p_exact.add_argument("--engine", choices=("auto", "enumerate", "dp"), default="auto")
    p_exact.set_defaults(func=_cmd_exact)

    p_approx = sub.add_parser("approx", help="probabilistic approximation of the counts")
    p_approx.add_argument("input")
    p_approx.add_argument("--target", type=float, required=True)
    p_approx.add_argument("--relation", choices=RELATIONS, default="ge")
    p_approx.add_argument("--method", choices=_CLI_METHODS, default="normal")
    p_approx.add_argument("--granularity", type=_granularity, default=None,
                          help="'auto' (default) or the value spacing, e.g. 1 for integers")
    p_approx.add_argument("--low", type=float, help="irwin-hall lower bound")
    p_approx.add_argument("--high", type=float, help="irwin-hall upper bound")
    p_approx.add_argument("--df", type=float, help="chi-square degrees of freedom")
    p_approx.add_argument("--samples", type=int, default=DEFAULT_KDE_SAMPLES,
                          help="KDE sample count per stratum")
    p_approx.add_argument("--seed", type=int, default=0, help="KDE master seed")
    p_approx.add_argument("--exact-small-k", type=int, default=0,
                          help="exact enumeration for strata k <= this bound")
    p_approx.add_argument("--k-min", type=int, default=None)
    p_approx.add_argument("--k-max", type=int, default=None)
    p_approx.add_argument("--diagnostics", action="store_true",
                          help="attach Berry-Esseen terms per k")
    p_approx.set_defaults(func=_cmd_approx)

    p_eval = sub.add_parser("evaluate", help="JSD of approximations vs the reference, per k")
    p_eval.add_argument("input")
    p_eval.add_argument("--k", type=_int_list, required=True,
                        help="comma-separated subset sizes")
    p_eval.add_argument("--methods", default="normal",
                        help="comma-separated: normal,irwin-hall,chi-square,kde")
    p_eval.add_argument("--low", type=float)
    p_eval.add_argument("--high", type=float)
    p_eval.add_argument("--df", type=float)
    p_eval.add_argument("--samples", type=int, default=DEFAULT_KDE_SAMPLES)
    p_eval.add_argument("--seed", type=int, default=0)
    p_eval.add_argument("--granularity", type=_granularity, default=None)
    p_eval.add_argument("--bins", type=int, default=60)
    p_eval.add_argument("--ref-samples", type=int, default=DEFAULT_REFERENCE_SAMPLES)
    p_eval.add_argument("--format", choices=("json", "csv"), default="json")
    p_eval.set_defaults(func=_cmd_evaluate)

    p_sim = sub.add_parser("simulate", help="run a config-driven experiment")
    p_sim.add_argument("--config", required=True, help="JSON experiment config")
    p_sim.add_argument("--out", default=".", help="output directory")
    p_sim.set_defaults(func=_cmd_simulate)

    return parser


def _emit(doc: dict) -> None:
    json.dump(doc, sys.stdout, indent=2)
    sys.stdout.write("\n")


def _cmd_exact(args) -> int:
    values = read_input(args.input).values
    report = exact_perfect_sum(
        values, args.target, args.relation, args.tolerance, engine=args.engine
    )
    _emit(report.to_json_dict())
    return 0


def _approx_config(args) -> ApproxConfig:
    return ApproxConfig(
        method=_method_name(args.method),
        relation=args.relation,
        granularity=args.granularity,
        k_min=args.k_min,
        k_max=args.k_max,
        exact_small_k=args.exact_small_k,
        low=args.low,
        high=args.high,
        df=args.df,
        samples=args.samples,
        seed=args.seed,
        diagnostics=args.diagnostics,
    )


def _cmd_approx(args) -> int:
    values = read_input(args.input).values
    report = approximate_perfect_sum(values, args.target, _approx_config(args))
    _emit(report.to_json_dict())
    return 0


def _cmd_evaluate(args) -> int:
    values = read_input(args.input).values
    methods = []
    for name in (tok.strip() for tok in args.methods.split(",")):
        if not name:
            continue
        if name not in _CLI_METHODS:
            raise InputError(f"unknown method {name!r}; options: {', '.join(_CLI_METHODS)}")
        methods.append(
            {
                "method": _method_name(name),
                "low": args.low,
                "high": args.high,
                "df": args.df,
                "samples": args.samples,
                "seed": args.seed,
            }
        )
    result = divergence_experiment(
        values,
        args.k,
        methods,
        granularity=args.granularity,
        bins=args.bins,
        seed=args.seed,
        ref_samples=args.ref_samples,
    )
    if args.format == "csv":
        import csv as _csv

        writer = _csv.writer(sys.stdout)
        writer.writerow(("n", "k", "method", "metric", "value", "seed"))
        for row in result.rows:
            writer.writerow(
                ["" if row.get(key) is None else row.get(key)
                 for key in ("n", "k", "method", "metric", "value", "seed")]
            )
    else:
        _emit({"metadata": result.metadata, "rows": result.rows})
    return 0


def _load_sim_config(path) -> dict:
    try:
        text = Path(path).read_text()
    except OSError as err:
        raise InputError(f"cannot read config {path}: {err}") from err
    try:
        return json.loads(text)
    except json.JSONDecodeError as err:
        raise InputError(f"{path}: line {err.lineno}, column {err.colno}: {err.msg}") from err


def _set_spec(doc: dict) -> SetSpec:
    try:
        return SetSpec(**doc)
    except TypeError as err:
        raise InputError(f"bad set spec {doc}: {err}") from err


def _cmd_simulate(args) -> int:
    config = _load_sim_config(args.config)
    kind = config.get("experiment")
    name = config.get("name", kind or "experiment")
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)

    if kind == "error":
        approx = config.get("config", {})
        result = error_experiment(
            _set_spec({"n": 1, **config["family"]}),
            config["n_values"],
            ApproxConfig(**approx),
            config["seeds"],
        )
    elif kind == "divergence":
        values = generate_set(_set_spec(config["set"]))
        result = divergence_experiment(
            values,
            config["k_values"],
            config["methods"],
            granularity=config.get("granularity"),
            bins=config.get("bins", 60),
            seed=config.get("seed", 0),
            ref_samples=config.get("ref_samples", DEFAULT_REFERENCE_SAMPLES),
        )
    else:
        raise InputError(f"config 'experiment' must be 'error' or 'divergence', got {kind!r}")

    result.metadata["config_file"] = config
    csv_path = out / f"{name}.csv"
    json_path = out / f"{name}.json"
    result.to_csv(csv_path)
    result.to_json(json_path)
    _emit({"written": [str(csv_path), str(json_path)]})
    return 0


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except InputError as err:
        print(f"perfectsum: input error: {err}", file=sys.stderr)
        return 1
    except InfeasibleError as err:
        print(f"perfectsum: infeasible: {err}", file=sys.stderr)
        return 2
    except PipelineError as err:
        if isinstance(err.__cause__, InfeasibleError):
            print(f"perfectsum: infeasible: {err}", file=sys.stderr)
            return 2
        print(f"perfectsum: input error: {err}", file=sys.stderr)
        return 1
    except (ValueError, KeyError) as err:
        print(f"perfectsum: input error: {err}", file=sys.stderr)
        return 1
    except Exception as err:  # pragma: no cover - defensive
        print(f"perfectsum: internal error: {err}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    raise SystemExit(main())
