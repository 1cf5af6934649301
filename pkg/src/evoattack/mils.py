"""Multistart iterated local search baseline.

Hill climbing over the full latent space: propose a neighbor with the same
per-gene Gaussian mutation rule as the EA, accept only strict fitness
improvements, and reinitialize from N(0,1)^d after ``stagnation_limit``
consecutive evaluations without improvement.  The run stops after exactly
``eval_budget`` evaluations (restart draws included), which keeps it
budget-comparable with an EA run of pop_size * (generations + 1)
evaluations.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .ea import ArchiveSink, EvaluateFn, Individual, RunResult, TracePoint, gaussian_mutate
from .errors import SearchAbort, UsageError
from .rng import Xoshiro256StarStar


@dataclass(frozen=True)
class MilsConfig:
    """Baseline parameters; mutation defaults mirror :class:`~evoattack.ea.EAConfig`."""

    latent_dim: int
    eval_budget: int
    mutation_prob: float = 0.1
    mutation_sigma: float = 1.0
    stagnation_limit: int = 1000
    trace_interval: int = 50
    seed: int = 0

    def __post_init__(self):
        if self.latent_dim < 1:
            raise UsageError("latent_dim must be >= 1")
        if self.eval_budget < 1:
            raise UsageError("eval_budget must be >= 1")
        if not 0.0 <= self.mutation_prob <= 1.0:
            raise UsageError("mutation_prob must lie in [0, 1]")
        if self.mutation_sigma <= 0.0:
            raise UsageError("mutation_sigma must be > 0")
        if self.stagnation_limit < 1:
            raise UsageError("stagnation_limit must be >= 1")
        if self.trace_interval < 1:
            raise UsageError("trace_interval must be >= 1")


def mils_search(
    cfg: MilsConfig,
    evaluate: EvaluateFn,
    archive_sink: ArchiveSink | None = None,
) -> RunResult:
    """Run the baseline for exactly ``cfg.eval_budget`` evaluations.

    The trace is sampled every ``trace_interval`` evaluations: each point
    carries the mean fitness over its evaluation block and the best-ever
    fitness at the block's end, making traces comparable with EA
    generations when the interval equals the EA population size.
    """
    rng = Xoshiro256StarStar(cfg.seed)

    current: Individual | None = None
    best: Individual | None = None
    since_improvement = 0
    trace: list[TracePoint] = []
    block_sum = 0.0
    block_count = 0

    for evaluation in range(cfg.eval_budget):
        restart = current is None or since_improvement >= cfg.stagnation_limit
        if restart:
            genome = np.array(rng.normals(cfg.latent_dim))
        else:
            genome = gaussian_mutate(current.genome, cfg, rng)

        fitness, probs = evaluate(genome)
        if not math.isfinite(fitness):
            raise SearchAbort(f"evaluation returned non-finite fitness {fitness} at step {evaluation}")
        candidate = Individual(genome=genome, fitness=float(fitness), probs=probs)

        block = evaluation // cfg.trace_interval
        if archive_sink is not None:
            archive_sink(block, evaluation, candidate)

        if restart or candidate.fitness > current.fitness:
            current = candidate
            since_improvement = 0
        else:
            since_improvement += 1
        if best is None or candidate.fitness > best.fitness:
            best = candidate

        block_sum += candidate.fitness
        block_count += 1
        if block_count == cfg.trace_interval or evaluation == cfg.eval_budget - 1:
            trace.append(
                TracePoint(
                    generation=block,
                    mean_fitness=block_sum / block_count,
                    best_fitness=best.fitness,
                )
            )
            block_sum = 0.0
            block_count = 0

    return RunResult(best=best, trace=trace, evaluations=cfg.eval_budget)
