"""Evolutionary search over generator latent vectors.

The algorithm is a classic real-coded EA: populations of latent vectors
initialized from N(0,1), tournament selection (three participants, one
winner by default), two-point crossover, per-gene Gaussian mutation, and
elitist mu+lambda replacement with lambda equal to the population size.
Latent coordinates are unbounded, so mutated genes are never clamped.

Every fitness evaluation can be streamed to an archive sink, which the
campaign layer uses to store each candidate ever evaluated.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Protocol, Sequence

import numpy as np

from .errors import SearchAbort, UsageError
from .rng import Xoshiro256StarStar

Genome = np.ndarray
EvaluateFn = Callable[[Genome], tuple[float, np.ndarray]]


class ArchiveSink(Protocol):
    """Receives every evaluated individual as (generation, index, individual)."""

    def __call__(self, generation: int, index: int, individual: "Individual") -> None: ...


@dataclass(frozen=True)
class EAConfig:
    """Search parameters; defaults follow the tuned digit-attack setup."""

    latent_dim: int
    pop_size: int = 50
    generations: int = 400
    crossover_prob: float = 0.75
    mutation_prob: float = 0.1
    mutation_sigma: float = 1.0
    tournament_size: int = 3
    tournament_winners: int = 1
    seed: int = 0
    offspring_size: int | None = None  # lambda; defaults to pop_size

    def __post_init__(self):
        if self.latent_dim < 1:
            raise UsageError("latent_dim must be >= 1")
        if self.pop_size < 2:
            raise UsageError("pop_size must be >= 2")
        if self.generations < 0:
            raise UsageError("generations must be >= 0")
        if not 0.0 <= self.crossover_prob <= 1.0:
            raise UsageError("crossover_prob must lie in [0, 1]")
        if not 0.0 <= self.mutation_prob <= 1.0:
            raise UsageError("mutation_prob must lie in [0, 1]")
        if self.mutation_sigma <= 0.0:
            raise UsageError("mutation_sigma must be > 0")
        if not 1 <= self.tournament_size <= self.pop_size:
            raise UsageError("tournament_size must lie in [1, pop_size]")
        if not 1 <= self.tournament_winners <= self.tournament_size:
            raise UsageError("tournament_winners must lie in [1, tournament_size]")
        if self.offspring_size is not None and self.offspring_size < 1:
            raise UsageError("offspring_size must be >= 1")

    @property
    def offspring_count(self) -> int:
        return self.pop_size if self.offspring_size is None else self.offspring_size


@dataclass
class Individual:
    genome: Genome
    fitness: float
    probs: np.ndarray


@dataclass(frozen=True)
class TracePoint:
    generation: int
    mean_fitness: float
    best_fitness: float


@dataclass
class RunResult:
    best: Individual
    trace: list[TracePoint] = field(default_factory=list)
    evaluations: int = 0


def init_population(cfg: EAConfig, rng: Xoshiro256StarStar) -> list[Genome]:
    """pop_size genomes with every gene drawn i.i.d. from N(0, 1)."""
    return [np.array(rng.normals(cfg.latent_dim)) for _ in range(cfg.pop_size)]


def _check_evaluated(population: Sequence[Individual]) -> None:
    for ind in population:
        if ind.fitness is None or not math.isfinite(ind.fitness):
            raise UsageError("population contains unevaluated or non-finite fitness values")


def _tournament_winner(
    population: Sequence[Individual], cfg: EAConfig, rng: Xoshiro256StarStar
) -> int:
    entrants = rng.sample_indices(len(population), cfg.tournament_size)
    return max(entrants, key=lambda i: (population[i].fitness, -i))


def tournament_select(
    population: Sequence[Individual], cfg: EAConfig, rng: Xoshiro256StarStar
) -> Genome:
    """Winner genome of one tournament.

    Samples ``tournament_size`` distinct individuals uniformly and returns
    the fittest; fitness ties break toward the lower population index.
    """
    _check_evaluated(population)
    return population[_tournament_winner(population, cfg, rng)].genome


def _select_parents(
    population: Sequence[Individual], cfg: EAConfig, rng: Xoshiro256StarStar
) -> tuple[Genome, Genome]:
    """Two parent genomes via tournaments yielding ``tournament_winners`` each."""
    if cfg.tournament_winners == 1:
        return (
            population[_tournament_winner(population, cfg, rng)].genome,
            population[_tournament_winner(population, cfg, rng)].genome,
        )
    parents: list[Genome] = []
    while len(parents) < 2:
        entrants = rng.sample_indices(len(population), cfg.tournament_size)
        ranked = sorted(entrants, key=lambda i: (-population[i].fitness, i))
        parents.extend(population[i].genome for i in ranked[: cfg.tournament_winners])
    return parents[0], parents[1]


def crossover_at(a: Genome, b: Genome, c1: int, c2: int) -> tuple[Genome, Genome]:
    """Children created by swapping the segment [c1, c2) between a and b."""
    child_a = a.copy()
    child_b = b.copy()
    child_a[c1:c2] = b[c1:c2]
    child_b[c1:c2] = a[c1:c2]
    return child_a, child_b


def two_point_crossover(
    a: Genome, b: Genome, rng: Xoshiro256StarStar
) -> tuple[Genome, Genome]:
    """Swap a random segment [c1, c2) between two equal-length genomes.

    Cut points satisfy 0 <= c1 < c2 <= d and are uniform over all such
    pairs; (0, d) therefore degenerates to a full swap.
    """
    if a.shape != b.shape or a.ndim != 1:
        raise UsageError(f"parents must be equal-length vectors, got {a.shape} and {b.shape}")
    d = a.shape[0]
    if d < 2:
        raise UsageError("crossover needs genomes of length >= 2")
    # Draw an unordered pair of distinct cut points from {0..d} uniformly.
    first = rng.below(d + 1)
    second = rng.below(d)
    if second >= first:
        second += 1
    c1, c2 = min(first, second), max(first, second)
    return crossover_at(a, b, c1, c2)


def gaussian_mutate(genome: Genome, cfg, rng: Xoshiro256StarStar) -> Genome:
    """Per-gene mutation: with probability ``mutation_prob`` add N(0, sigma^2)."""
    mutated = genome.copy()
    p = cfg.mutation_prob
    sigma = cfg.mutation_sigma
    for i in range(mutated.shape[0]):
        if rng.random() < p:
            mutated[i] += rng.normal(0.0, sigma)
    return mutated


def mu_plus_lambda_replace(
    parents: Sequence[Individual], offspring: Sequence[Individual], pop_size: int
) -> list[Individual]:
    """Top ``pop_size`` of parents + offspring by fitness.

    Ties at the cut prefer offspring (keeps exploring), then the lower
    index within each group.  Guarantees the best fitness never decreases.
    """
    if len(parents) != pop_size:
        raise UsageError(f"expected {pop_size} parents, got {len(parents)}")
    if not offspring:
        return list(parents)
    _check_evaluated(parents)
    _check_evaluated(offspring)
    pool = [(-ind.fitness, 0, i, ind) for i, ind in enumerate(offspring)]
    pool += [(-ind.fitness, 1, i, ind) for i, ind in enumerate(parents)]
    pool.sort(key=lambda entry: entry[:3])
    return [entry[3] for entry in pool[:pop_size]]


def _evaluate_genomes(
    genomes: Sequence[Genome],
    evaluate: EvaluateFn,
    generation: int,
    archive_sink: ArchiveSink | None,
) -> list[Individual]:
    evaluated = []
    for index, genome in enumerate(genomes):
        fitness, probs = evaluate(genome)
        if not math.isfinite(fitness):
            raise SearchAbort(
                f"evaluation returned non-finite fitness {fitness} "
                f"at generation {generation}, index {index}"
            )
        individual = Individual(genome=genome, fitness=float(fitness), probs=probs)
        if archive_sink is not None:
            archive_sink(generation, index, individual)
        evaluated.append(individual)
    return evaluated


def _trace_point(generation: int, population: Sequence[Individual]) -> TracePoint:
    fits = [ind.fitness for ind in population]
    return TracePoint(
        generation=generation,
        mean_fitness=sum(fits) / len(fits),
        best_fitness=max(fits),
    )


def evolve(
    cfg: EAConfig,
    evaluate: EvaluateFn,
    archive_sink: ArchiveSink | None = None,
) -> RunResult:
    """Run the full generational loop.

    Per generation, ``offspring_count`` children are built by tournament
    selection, crossover with probability ``crossover_prob`` (cloning
    otherwise), and mutation; children then compete with parents under
    mu+lambda replacement.  Total evaluations: pop_size + lambda * generations.
    """
    rng = Xoshiro256StarStar(cfg.seed)
    population = _evaluate_genomes(init_population(cfg, rng), evaluate, 0, archive_sink)
    trace = [_trace_point(0, population)]
    evaluations = cfg.pop_size

    for generation in range(1, cfg.generations + 1):
        lam = cfg.offspring_count
        children: list[Genome] = []
        while len(children) < lam:
            parent_a, parent_b = _select_parents(population, cfg, rng)
            if rng.random() < cfg.crossover_prob:
                child_a, child_b = two_point_crossover(parent_a, parent_b, rng)
            else:
                child_a, child_b = parent_a.copy(), parent_b.copy()
            children.append(gaussian_mutate(child_a, cfg, rng))
            if len(children) < lam:
                children.append(gaussian_mutate(child_b, cfg, rng))
        offspring = _evaluate_genomes(children, evaluate, generation, archive_sink)
        evaluations += lam
        population = mu_plus_lambda_replace(population, offspring, cfg.pop_size)
        trace.append(_trace_point(generation, population))

    best = max(population, key=lambda ind: ind.fitness)
    return RunResult(best=best, trace=trace, evaluations=evaluations)
