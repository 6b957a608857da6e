"""Command line entry point.

Example:

    cspsa-tomo --dim 2 --shots 1000 --iters 10 --states 4 --guesses 10 \\
        --reps 2 --seed 7 --out report.csv

Exit codes: 0 on success, 1 when the report cannot be written, 2 on
argument or configuration errors.
"""

from __future__ import annotations

import argparse
import sys
from typing import Optional, Sequence

from .cspsa import GainParams
from .errors import ConfigInvalid, IoFailure
from .harness import (
    MODE_CSPSA_MLE,
    MODE_CSPSA_ONLY,
    ExperimentConfig,
    config_summary,
    run_experiment,
    write_report,
)


def _dimension(text: str) -> int:
    value = int(text)
    if value < 2:
        raise argparse.ArgumentTypeError(f"dimension must be at least 2, got {value}")
    return value


def _positive_int(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {value}")
    return value


def _seed(text: str) -> int:
    value = int(text)
    if not 0 <= value < 2**64:
        raise argparse.ArgumentTypeError("seed must fit in an unsigned 64-bit integer")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cspsa-tomo",
        description=(
            "Simulate adaptive pure-state estimation and report infidelity "
            "statistics per iteration against the theoretical floors."
        ),
    )
    parser.add_argument("--dim", type=_dimension, default=2, help="Hilbert space dimension")
    parser.add_argument(
        "--shots", type=_positive_int, default=100, help="copies measured per measurement"
    )
    parser.add_argument("--iters", type=_positive_int, default=10, help="iterations per trial")
    parser.add_argument("--states", type=_positive_int, default=20, help="number of true states")
    parser.add_argument(
        "--guesses", type=_positive_int, default=50, help="initial guesses per state"
    )
    parser.add_argument("--reps", type=_positive_int, default=4, help="repetitions per pair")
    parser.add_argument("--seed", type=_seed, default=0, help="master seed")
    parser.add_argument(
        "--mode",
        choices=[MODE_CSPSA_MLE, MODE_CSPSA_ONLY],
        default=MODE_CSPSA_MLE,
        help="estimation mode",
    )
    parser.add_argument("--a-gain", type=float, default=None, help="override gain a")
    parser.add_argument("--big-a", type=float, default=None, help="override stability offset A")
    parser.add_argument("--s-exp", type=float, default=None, help="override exponent s")
    parser.add_argument("--b-gain", type=float, default=None, help="override gain b")
    parser.add_argument("--r-exp", type=float, default=None, help="override exponent r")
    parser.add_argument("--workers", type=_positive_int, default=1, help="parallel workers")
    parser.add_argument(
        "--per-state", action="store_true", help="append per-state rows to the report"
    )
    parser.add_argument("--out", required=True, help="output CSV path")
    return parser


def _resolve_gains(ns: argparse.Namespace) -> GainParams:
    base = GainParams.for_shots(ns.shots)
    return GainParams(
        a=base.a if ns.a_gain is None else ns.a_gain,
        A=base.A if ns.big_a is None else ns.big_a,
        s=base.s if ns.s_exp is None else ns.s_exp,
        b=base.b if ns.b_gain is None else ns.b_gain,
        r=base.r if ns.r_exp is None else ns.r_exp,
    )


def cli_main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        ns = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else 2
    try:
        gains = _resolve_gains(ns)
        config = ExperimentConfig(
            d=ns.dim,
            n_est=ns.shots,
            k_max=ns.iters,
            num_states=ns.states,
            num_guesses=ns.guesses,
            num_reps=ns.reps,
            gains=gains,
            mode=ns.mode,
            master_seed=ns.seed,
        )
    except (ConfigInvalid, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    print(config_summary(config), file=sys.stderr)
    report = run_experiment(config, workers=ns.workers)
    try:
        write_report(report, ns.out, per_state=ns.per_state)
    except IoFailure as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    print(f"wrote {ns.out}", file=sys.stderr)
    return 0


def main() -> None:
    sys.exit(cli_main())


if __name__ == "__main__":
    main()
