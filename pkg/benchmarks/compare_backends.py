"""Time the compiled kernels against the numpy fallback.

Runs three workloads on both backends and reports the best-of-repeats
wall time plus the speedup: the basis completion alone, the likelihood
refinement alone, and a full adaptive trial.

    python3 benchmarks/compare_backends.py --dim 4 --repeats 5
"""

import argparse
import time

import numpy as np

from cspsa_tomo import _backend, harness, measurement, mle, states


def _time_best(fn, repeats):
    best = float("inf")
    for _ in range(repeats):
        start = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - start)
    return best


def bench_basis(d, seed, calls=2000):
    rng = np.random.default_rng(seed)
    vectors = [states.haar_random_state(d, rng).amplitudes for _ in range(calls)]

    def run():
        for v in vectors:
            _backend.kernels.householder_basis(v)

    return run


def bench_refine(d, seed, records=20, solves=50):
    rng = np.random.default_rng(seed)
    data = mle.AccumulatedData()
    for _ in range(records):
        anchor = states.haar_random_state(d, rng)
        basis = measurement.complete_basis(anchor)
        counts = rng.multinomial(200, np.full(d, 1.0 / d))
        data.add(measurement.CountRecord(basis, counts, 200))
    starts = [states.haar_random_state(d, rng) for _ in range(solves)]

    def run():
        for start in starts:
            mle.refine(data, start)

    return run


def bench_trial(d, seed, n_est, k_max, trials=10):
    config = harness.ExperimentConfig(
        d=d,
        n_est=n_est,
        k_max=k_max,
        num_states=1,
        num_guesses=1,
        num_reps=1,
        master_seed=seed,
    )
    pairs = []
    for i in range(trials):
        truth = states.haar_random_state(d, harness.truth_rng(seed, i))
        guess = states.haar_random_state(d, harness.guess_rng(seed, i, 0))
        pairs.append((truth, guess, i))

    def run():
        for truth, guess, i in pairs:
            harness.run_trial(config, truth, guess, harness.trial_rng(seed, i, 0, 0))

    return run


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--dim", type=int, default=4, help="Hilbert space dimension")
    parser.add_argument("--shots", type=int, default=1000, help="copies per measurement")
    parser.add_argument("--iters", type=int, default=10, help="iterations per trial")
    parser.add_argument("--repeats", type=int, default=5, help="timing repeats, best kept")
    parser.add_argument("--seed", type=int, default=0, help="workload seed")
    args = parser.parse_args()

    try:
        _backend.set_backend("compiled")
    except ImportError:
        raise SystemExit("compiled extension not built; nothing to compare")

    workloads = [
        ("basis completion x2000", lambda: bench_basis(args.dim, args.seed)),
        ("likelihood refine x50", lambda: bench_refine(args.dim, args.seed)),
        (
            f"full trial x10 (k={args.iters}, shots={args.shots})",
            lambda: bench_trial(args.dim, args.seed, args.shots, args.iters),
        ),
    ]
    print(f"dim={args.dim} repeats={args.repeats} (best-of wall time)")
    header = f"{'workload':<36} {'python':>10} {'compiled':>10} {'speedup':>8}"
    print(header)
    print("-" * len(header))
    for label, build in workloads:
        times = {}
        for name in ("python", "compiled"):
            _backend.set_backend(name)
            # The workload is rebuilt per backend so state constructed
            # by one backend never feeds the other's timing.
            times[name] = _time_best(build(), args.repeats)
        ratio = times["python"] / times["compiled"]
        print(
            f"{label:<36} {times['python'] * 1e3:>8.2f}ms {times['compiled'] * 1e3:>8.2f}ms "
            f"{ratio:>7.2f}x"
        )


if __name__ == "__main__":
    main()
