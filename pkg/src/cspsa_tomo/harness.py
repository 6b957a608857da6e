"""Experiment orchestration: trials, replication, aggregation, reports.

One trial runs the adaptive estimation loop for a fixed (truth, guess)
pair.  An experiment replicates trials over ``num_states`` random true
states, ``num_guesses`` random starting guesses per state, and
``num_reps`` repetitions per pair, then aggregates infidelity
statistics per iteration.

Reproducibility contract: every random stream is derived from the
master seed through ``numpy.random.SeedSequence`` spawn keys, namespaced
as (0, state), (1, state, guess), and (2, state, guess, rep) for the
true states, the initial guesses, and the per-trial measurement noise.
Results are therefore bit-identical for a fixed seed no matter how the
trials are scheduled across workers.
"""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .bounds import SummaryStats, gill_massar_mixed, gill_massar_pure, summarize, total_ensemble
from .cspsa import (
    GainParams,
    gains_at,
    gradient_estimate,
    perturbed_guesses,
    sample_perturbation,
    update,
)
from .errors import ConfigInvalid, DegenerateIterate, IoFailure
from .measurement import (
    CountRecord,
    complete_basis,
    estimate_infidelity,
    outcome_probabilities,
    simulate_counts,
)
from .mle import AccumulatedData, MleConfig, refine
from .states import PureState, haar_random_state, infidelity, normalize

MODE_CSPSA_MLE = "cspsa-mle"
MODE_CSPSA_ONLY = "cspsa-only"
_MODES = (MODE_CSPSA_MLE, MODE_CSPSA_ONLY)

REPORT_COLUMNS = (
    "d",
    "n_est",
    "mode",
    "k",
    "n_total",
    "mean",
    "variance",
    "median",
    "q1",
    "q3",
    "gm_pure",
    "gm_mixed",
)

_SEED_LIMIT = 2**64


@dataclass(frozen=True)
class ExperimentConfig:
    """Full description of one experiment.

    ``gains=None`` resolves to the published schedule for ``n_est``
    through ``GainParams.for_shots``.
    """

    d: int
    n_est: int
    k_max: int
    num_states: int = 20
    num_guesses: int = 50
    num_reps: int = 4
    gains: Optional[GainParams] = None
    mode: str = MODE_CSPSA_MLE
    master_seed: int = 0
    output_path: Optional[str] = None
    mle: MleConfig = field(default_factory=MleConfig)

    def __post_init__(self):
        if self.d < 2:
            raise ConfigInvalid(f"d must be at least 2, got {self.d}")
        if self.n_est < 1:
            raise ConfigInvalid(f"n_est must be positive, got {self.n_est}")
        if self.k_max < 1:
            raise ConfigInvalid(f"k_max must be positive, got {self.k_max}")
        for name in ("num_states", "num_guesses", "num_reps"):
            if getattr(self, name) < 1:
                raise ConfigInvalid(f"{name} must be positive, got {getattr(self, name)}")
        if self.mode not in _MODES:
            raise ConfigInvalid(f"mode must be one of {_MODES}, got {self.mode!r}")
        if not 0 <= self.master_seed < _SEED_LIMIT:
            raise ConfigInvalid("master_seed must fit in an unsigned 64-bit integer")
        if self.gains is None:
            object.__setattr__(self, "gains", GainParams.for_shots(self.n_est))


@dataclass(frozen=True)
class TrialTrace:
    """Per-iteration exact infidelity of one trial, iterations 1..k_max."""

    state_id: int
    guess_id: int
    rep_id: int
    infidelities: np.ndarray
    degenerate_steps: int = 0


@dataclass(frozen=True)
class AggregateReport:
    """Statistics per iteration, pooled and per true state.

    ``pooled[k-1]`` summarizes every individual trial infidelity at
    iteration k across all states, guesses, and repetitions;
    ``per_state[s][k-1]`` restricts to state s.  The bound arrays hold
    the pure and mixed floors at the ensemble size consumed through
    each iteration.
    """

    config: ExperimentConfig
    pooled: tuple[SummaryStats, ...]
    per_state: tuple[tuple[SummaryStats, ...], ...]
    gm_pure: np.ndarray
    gm_mixed: np.ndarray


def truth_rng(master_seed: int, state_id: int) -> np.random.Generator:
    return np.random.Generator(
        np.random.PCG64(np.random.SeedSequence(master_seed, spawn_key=(0, state_id)))
    )


def guess_rng(master_seed: int, state_id: int, guess_id: int) -> np.random.Generator:
    return np.random.Generator(
        np.random.PCG64(
            np.random.SeedSequence(master_seed, spawn_key=(1, state_id, guess_id))
        )
    )


def trial_rng(
    master_seed: int, state_id: int, guess_id: int, rep_id: int
) -> np.random.Generator:
    return np.random.Generator(
        np.random.PCG64(
            np.random.SeedSequence(master_seed, spawn_key=(2, state_id, guess_id, rep_id))
        )
    )


def run_trial(
    config: ExperimentConfig,
    truth: PureState,
    initial_guess: PureState,
    rng: np.random.Generator,
    state_id: int = 0,
    guess_id: int = 0,
    rep_id: int = 0,
) -> TrialTrace:
    """Run the adaptive loop for one (truth, guess) pair.

    Per iteration, in stream order: one perturbation draw, then the
    counts for the + measurement, then the - measurement.  The recorded
    infidelity is the exact one between the truth and the iteration's
    estimate (the refined state when likelihood refinement is on, the
    normalized iterate otherwise).
    """
    if truth.dim != config.d or initial_guess.dim != config.d:
        raise ConfigInvalid("state dimensions do not match the configuration")
    z = initial_guess.amplitudes.copy()
    data = AccumulatedData() if config.mode == MODE_CSPSA_MLE else None
    infids = np.empty(config.k_max, dtype=np.float64)
    degenerate = 0
    for k in range(1, config.k_max + 1):
        a_k, c_k = gains_at(config.gains, k)
        delta = sample_perturbation(config.d, rng)
        z_plus, z_minus = perturbed_guesses(z, c_k, delta)
        psi_plus = normalize(z_plus)
        psi_minus = normalize(z_minus)
        basis_plus = complete_basis(psi_plus)
        basis_minus = complete_basis(psi_minus)
        counts_plus = simulate_counts(
            outcome_probabilities(basis_plus, truth), config.n_est, rng
        )
        counts_minus = simulate_counts(
            outcome_probabilities(basis_minus, truth), config.n_est, rng
        )
        record_plus = CountRecord(basis_plus, counts_plus, config.n_est)
        record_minus = CountRecord(basis_minus, counts_minus, config.n_est)
        grad = gradient_estimate(
            estimate_infidelity(record_plus),
            estimate_infidelity(record_minus),
            c_k,
            delta,
        )
        try:
            z_next = update(z, a_k, grad)
        except DegenerateIterate:
            # Reject the step and keep optimizing from the old iterate.
            z_next = z
            degenerate += 1
        if data is not None:
            data.add(record_plus)
            data.add(record_minus)
            estimate = refine(data, normalize(z_next), config.mle)
            z = estimate.amplitudes.copy()
        else:
            z = z_next
            estimate = normalize(z)
        infids[k - 1] = infidelity(estimate, truth)
    return TrialTrace(
        state_id=state_id,
        guess_id=guess_id,
        rep_id=rep_id,
        infidelities=infids,
        degenerate_steps=degenerate,
    )


def _run_pair(args) -> tuple[int, int, np.ndarray]:
    """Worker task: all repetitions for one (state, guess) pair."""
    config, truth_amps, guess_amps, state_id, guess_id = args
    truth = PureState(truth_amps)
    guess = PureState(guess_amps)
    out = np.empty((config.num_reps, config.k_max), dtype=np.float64)
    for rep in range(config.num_reps):
        rng = trial_rng(config.master_seed, state_id, guess_id, rep)
        trace = run_trial(config, truth, guess, rng, state_id, guess_id, rep)
        out[rep] = trace.infidelities
    return state_id, guess_id, out


def run_experiment(config: ExperimentConfig, workers: int = 1) -> AggregateReport:
    """Run every trial of the experiment and aggregate the statistics.

    ``workers`` only controls scheduling; results are placed by index,
    so the report is identical for any worker count.
    """
    if workers < 1:
        raise ConfigInvalid(f"workers must be positive, got {workers}")
    truths = [
        haar_random_state(config.d, truth_rng(config.master_seed, s))
        for s in range(config.num_states)
    ]
    tasks = []
    for s in range(config.num_states):
        for g in range(config.num_guesses):
            guess = haar_random_state(config.d, guess_rng(config.master_seed, s, g))
            tasks.append((config, truths[s].amplitudes, guess.amplitudes, s, g))
    samples = np.empty(
        (config.num_states, config.num_guesses, config.num_reps, config.k_max),
        dtype=np.float64,
    )
    if workers == 1:
        results = map(_run_pair, tasks)
        for s, g, block in results:
            samples[s, g] = block
    else:
        chunk = max(1, len(tasks) // (8 * workers))
        with ProcessPoolExecutor(max_workers=workers) as pool:
            for s, g, block in pool.map(_run_pair, tasks, chunksize=chunk):
                samples[s, g] = block
    pooled = tuple(
        summarize(samples[:, :, :, k].ravel()) for k in range(config.k_max)
    )
    per_state = tuple(
        tuple(summarize(samples[s, :, :, k].ravel()) for k in range(config.k_max))
        for s in range(config.num_states)
    )
    n_totals = np.array(
        [total_ensemble(config.n_est, k) for k in range(1, config.k_max + 1)]
    )
    gm_pure = np.array([gill_massar_pure(config.d, n) for n in n_totals])
    gm_mixed = np.array([gill_massar_mixed(config.d, n) for n in n_totals])
    report = AggregateReport(
        config=config,
        pooled=pooled,
        per_state=per_state,
        gm_pure=gm_pure,
        gm_mixed=gm_mixed,
    )
    if config.output_path is not None:
        write_report(report, config.output_path)
    return report


def _format_value(x: float) -> str:
    return format(float(x), ".17g")


def _stats_row(config: ExperimentConfig, k: int, stats: SummaryStats) -> list[str]:
    n_total = total_ensemble(config.n_est, k)
    return [
        str(config.d),
        str(config.n_est),
        config.mode,
        str(k),
        str(n_total),
        _format_value(stats.mean),
        _format_value(stats.variance),
        _format_value(stats.median),
        _format_value(stats.q1),
        _format_value(stats.q3),
        _format_value(gill_massar_pure(config.d, n_total)),
        _format_value(gill_massar_mixed(config.d, n_total)),
    ]


def write_report(report: AggregateReport, path, per_state: bool = False) -> None:
    """Write the aggregate report as CSV.

    Pooled rows come first, one per iteration.  With ``per_state`` a
    ``state_id`` column is appended (empty on pooled rows) and the
    per-state rows follow, grouped by state.  Values carry 17
    significant digits so that parsing the file recovers them exactly.
    """
    config = report.config
    header = list(REPORT_COLUMNS)
    if per_state:
        header.append("state_id")
    lines = [",".join(header)]
    for k_idx, stats in enumerate(report.pooled):
        row = _stats_row(config, k_idx + 1, stats)
        if per_state:
            row.append("")
        lines.append(",".join(row))
    if per_state:
        for s, stats_by_k in enumerate(report.per_state):
            for k_idx, stats in enumerate(stats_by_k):
                row = _stats_row(config, k_idx + 1, stats)
                row.append(str(s))
                lines.append(",".join(row))
    text = "\n".join(lines) + "\n"
    try:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    except OSError as exc:
        raise IoFailure(f"cannot write report to {path!r}: {exc}") from exc


def config_summary(config: ExperimentConfig) -> str:
    """One-line human-readable description, logged by the CLI."""
    g = config.gains
    return (
        f"d={config.d} n_est={config.n_est} k_max={config.k_max} "
        f"states={config.num_states} guesses={config.num_guesses} "
        f"reps={config.num_reps} mode={config.mode} seed={config.master_seed} "
        f"gains(a={g.a:g} A={g.A:g} s={g.s:g} b={g.b:g} r={g.r:g})"
    )
