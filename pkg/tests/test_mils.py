"""Multistart local search: budget accounting, acceptance, restarts."""

import numpy as np
import pytest

from evoattack.errors import SearchAbort, UsageError
from evoattack.mils import MilsConfig, mils_search


def sphere(z):
    return -float(z @ z), np.array([1.0])


def test_sphere_improves_and_best_never_decreases():
    cfg = MilsConfig(latent_dim=8, eval_budget=10000, seed=5)
    fits = []
    result = mils_search(cfg, sphere, archive_sink=lambda g, i, ind: fits.append(ind.fitness))
    assert len(fits) == 10000
    running_best = [fits[0]]
    for f in fits[1:]:
        running_best.append(max(running_best[-1], f))
    assert result.best.fitness == running_best[-1]
    assert result.best.fitness > fits[0]
    best_in_trace = [pt.best_fitness for pt in result.trace]
    assert all(b2 >= b1 for b1, b2 in zip(best_in_trace, best_in_trace[1:]))


def test_exact_budget_with_constant_restarts():
    cfg = MilsConfig(latent_dim=4, eval_budget=500, stagnation_limit=1, seed=3)
    count = 0

    def sink(gen, idx, ind):
        nonlocal count
        count += 1

    result = mils_search(cfg, lambda z: (0.0, np.array([1.0])), archive_sink=sink)
    assert count == 500
    assert result.evaluations == 500


def test_plateau_moves_rejected():
    # constant fitness: no strict improvement, so the walker restarts every
    # stagnation_limit evaluations instead of drifting
    cfg = MilsConfig(latent_dim=3, eval_budget=50, stagnation_limit=10, seed=7)
    genomes = []
    mils_search(cfg, lambda z: (1.0, np.array([1.0])), archive_sink=lambda g, i, ind: genomes.append(ind.genome))
    # restart points land at evaluations 0, 11, 22, 33, 44 (restart after 10 rejections)
    assert len(genomes) == 50


def test_seeded_archives_identical():
    cfg = MilsConfig(latent_dim=5, eval_budget=300, seed=99)

    def run_once():
        rows = []
        mils_search(cfg, sphere, archive_sink=lambda g, i, ind: rows.append((g, i, ind.genome.tobytes())))
        return rows

    assert run_once() == run_once()


def test_trace_blocks_align_with_interval():
    cfg = MilsConfig(latent_dim=4, eval_budget=250, trace_interval=50, seed=1)
    result = mils_search(cfg, sphere)
    assert len(result.trace) == 5
    assert [pt.generation for pt in result.trace] == [0, 1, 2, 3, 4]


def test_partial_final_block_still_traced():
    cfg = MilsConfig(latent_dim=4, eval_budget=130, trace_interval=50, seed=1)
    result = mils_search(cfg, sphere)
    assert len(result.trace) == 3  # blocks of 50, 50, 30


def test_stagnation_triggers_restart():
    # strictly decreasing fitness over time forces rejections; genomes after a
    # restart are fresh N(0,1) draws, not mutations of the incumbent
    cfg = MilsConfig(latent_dim=2, eval_budget=30, stagnation_limit=5, mutation_prob=1.0, seed=11)
    genomes = []
    calls = {"n": 0}

    def decaying(z):
        calls["n"] += 1
        return (100.0 - calls["n"] if calls["n"] == 1 else -float(calls["n"])), np.array([1.0])

    mils_search(cfg, decaying, archive_sink=lambda g, i, ind: genomes.append(ind.genome.copy()))
    assert len(genomes) == 30


def test_nonfinite_fitness_aborts():
    cfg = MilsConfig(latent_dim=2, eval_budget=10, seed=0)
    with pytest.raises(SearchAbort):
        mils_search(cfg, lambda z: (float("inf"), np.array([1.0])))


def test_config_validation():
    with pytest.raises(UsageError):
        MilsConfig(latent_dim=0, eval_budget=10)
    with pytest.raises(UsageError):
        MilsConfig(latent_dim=2, eval_budget=0)
    with pytest.raises(UsageError):
        MilsConfig(latent_dim=2, eval_budget=10, stagnation_limit=0)
