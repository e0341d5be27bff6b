"""Command-line front end for counting, estimating, and comparing."""

from __future__ import annotations

import argparse
import sys

from .exact import count_butterflies_bruteforce, count_butterflies_exact
from .harness import (
    RunSpec,
    compare,
    load_compare_config,
    parse_graph_source,
    run,
    summary_row,
)

ESTIMATORS = ("espar", "wps", "tls", "tlseg", "hlgp")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="butterfly",
        description="Exact and sampled butterfly counting on bipartite graphs.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    count = sub.add_parser("count", help="exact counting, no sampling")
    count.add_argument("counter", choices=("exact", "bruteforce"))
    count.add_argument("--graph", required=True, help="edge-list or cache file")

    est = sub.add_parser("estimate", help="run a sampling estimator")
    est.add_argument("estimator", choices=ESTIMATORS)
    src = est.add_mutually_exclusive_group(required=True)
    src.add_argument("--graph", help="edge-list or cache file")
    src.add_argument("--gen", help="generator spec: kab:a,b | er:n1,n2,p,seed | hub:h,t")
    est.add_argument("--reps", type=int, default=1)
    est.add_argument("--seed", type=int, default=0)
    est.add_argument("--p", type=float, default=0.2, help="espar retention probability")
    est.add_argument(
        "--espar-mode", choices=("unbiased", "quartered"), default="unbiased"
    )
    est.add_argument("--rounds", type=int, default=20_000, help="wps sampling rounds")
    est.add_argument("--s1-factor", type=float, default=0.5, help="tls first-level size factor")
    est.add_argument("--epsilon", type=float, default=0.5)
    est.add_argument("--c-heavy", type=float, default=None)
    est.add_argument("--scale-t", type=float, default=1.0)
    est.add_argument("--scale-s", type=float, default=1.0)
    est.add_argument("--scale-s1", type=float, default=1.0)
    est.add_argument("--scale-s2", type=float, default=1.0)
    est.add_argument("--scale-reps", type=float, default=1.0)
    est.add_argument("--b-bar", type=float, default=None, help="tlseg butterfly guess")
    est.add_argument("--w-bar", type=float, default=None, help="tlseg wedge guess")
    est.add_argument("--budget-queries", type=int, default=None)
    est.add_argument("--time-limit-ms", type=float, default=None)
    est.add_argument("--workers", type=int, default=1)
    est.add_argument("--truth-dir", default=None)
    est.add_argument("--out", default=None, help="prefix for .jsonl and .summary.csv")

    cmp_cmd = sub.add_parser("compare", help="run the specs in a JSON config")
    cmp_cmd.add_argument("--config", required=True)
    cmp_cmd.add_argument("--out", default=None, help="comparison CSV path")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "count":
            graph = parse_graph_source(args.graph)
            counter = (
                count_butterflies_exact
                if args.counter == "exact"
                else count_butterflies_bruteforce
            )
            print(counter(graph))
            return 0
        if args.command == "estimate":
            spec = RunSpec(
                algorithm=args.estimator,
                source=args.graph or args.gen,
                reps=args.reps,
                base_seed=args.seed,
                p=args.p,
                espar_mode=args.espar_mode,
                rounds=args.rounds,
                s1_factor=args.s1_factor,
                epsilon=args.epsilon,
                c_heavy=args.c_heavy,
                scale_t=args.scale_t,
                scale_s=args.scale_s,
                scale_s1=args.scale_s1,
                scale_s2=args.scale_s2,
                scale_reps=args.scale_reps,
                b_bar=args.b_bar,
                w_bar=args.w_bar,
                budget_queries=args.budget_queries,
                time_limit_ms=args.time_limit_ms,
                workers=args.workers,
                truth_dir=args.truth_dir,
                out_prefix=args.out,
            )
            summary = run(spec)
            row = summary_row(summary)
            for key in (
                "algorithm",
                "dataset",
                "reps",
                "truth",
                "mean_estimate",
                "mean_q_total",
                "err_q50",
            ):
                print(f"{key}: {row[key]}")
            if args.out:
                print(f"wrote {args.out}.jsonl and {args.out}.summary.csv")
            return 0
        # compare
        specs = load_compare_config(args.config)
        summaries = compare(specs, args.out)
        for s in summaries:
            row = summary_row(s)
            print(
                f"{row['algorithm']:<10} {row['dataset']:<24} "
                f"q_total={row['mean_q_total']:.1f} err_q50={row['err_q50']}"
            )
        if args.out:
            print(f"wrote {args.out}")
        return 0
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
