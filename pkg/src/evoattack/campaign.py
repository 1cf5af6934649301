"""Multi-run attack campaigns, archives, tallies, and reports.

A campaign runs the configured search method (EA or MILS) ``runs_per_target``
times for every target label, evaluating each candidate latent vector as
fitness(classify(generate(z, target))).  Every evaluation is appended to a
per-run NDJSON archive segment, so attack counts can be (re)tallied after
the fact at any threshold.

Output directory layout::

    output_dir/
      manifest.json                                config echo, seeds, checksums
      runs/<method>_<fitness>_<target>_<run>.ndjson   one record per evaluation
      traces/<method>_<fitness>_<target>_<run>.csv    generation,mean_fit,best_fit
      tables/misclass.{csv,txt}                    attack tally at default thresholds
      tables/confusion.{csv,txt}                   confusion tally at default thresholds
      tables/trace.csv                             aggregated fitness traces

Archive records hold the latent vector plus the cached probability vector
rather than pixels; images are recomputable bit-exactly from the stored
generator, which keeps archives small.
"""

from __future__ import annotations

import hashlib
import itertools
import json
import math
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Callable, Iterator, Mapping, Sequence

import numpy as np

from .ea import EAConfig, Individual, RunResult, evolve
from .errors import ArchiveError, ModelConsistencyError, UsageError
from .fitness import FitnessKind, assess, f1, f2, is_attack_at, is_confusion_at
from .mils import MilsConfig, mils_search
from .nn import CLASSIFIER, CONDITIONAL_GENERATOR, Model, classify, generate, load_model
from .rng import derive_run_seed

METHOD_EA = "ea"
METHOD_MILS = "mils"
_SEED_TAGS = {METHOD_EA: 1, METHOD_MILS: 2}

DEFAULT_P_THRESHOLDS = (0.0, 0.5, 0.6, 0.7, 0.8, 0.9)
DEFAULT_DELTAS = (0.1, 0.2, 0.3, 0.4, 0.5)

ProgressFn = Callable[[str], None]


@dataclass(frozen=True)
class CampaignConfig:
    generator_path: Path
    classifier_path: Path
    latent_dim: int
    num_labels: int
    output_dir: Path
    target_labels: tuple[int, ...] | None = None  # None means every label
    runs_per_target: int = 30
    method: str = METHOD_EA
    fitness: FitnessKind = FitnessKind.F2
    ea: EAConfig | None = None
    mils: MilsConfig | None = None
    master_seed: int = 0

    def __post_init__(self):
        if self.method not in _SEED_TAGS:
            raise UsageError(f"method must be one of {sorted(_SEED_TAGS)}, got {self.method!r}")
        if self.runs_per_target < 1:
            raise UsageError("runs_per_target must be >= 1")
        if self.latent_dim < 1 or self.num_labels < 2:
            raise UsageError("need latent_dim >= 1 and num_labels >= 2")

    def resolved_targets(self) -> tuple[int, ...]:
        targets = tuple(range(self.num_labels)) if self.target_labels is None else self.target_labels
        for t in targets:
            if not 0 <= t < self.num_labels:
                raise UsageError(f"target label {t} out of range [0, {self.num_labels})")
        return targets

    def resolved_ea(self) -> EAConfig:
        ea = self.ea if self.ea is not None else EAConfig(latent_dim=self.latent_dim)
        if ea.latent_dim != self.latent_dim:
            raise UsageError(
                f"ea.latent_dim {ea.latent_dim} does not match campaign latent_dim {self.latent_dim}"
            )
        return ea

    def resolved_mils(self) -> MilsConfig:
        if self.mils is not None:
            if self.mils.latent_dim != self.latent_dim:
                raise UsageError(
                    f"mils.latent_dim {self.mils.latent_dim} does not match "
                    f"campaign latent_dim {self.latent_dim}"
                )
            return self.mils
        # Matched budget: same evaluation count and mutation rule as the EA,
        # trace blocks aligned with EA generations.
        ea = self.resolved_ea()
        return MilsConfig(
            latent_dim=self.latent_dim,
            eval_budget=ea.pop_size * (ea.generations + 1),
            mutation_prob=ea.mutation_prob,
            mutation_sigma=ea.mutation_sigma,
            trace_interval=ea.pop_size,
        )


@dataclass(frozen=True)
class AttackRecord:
    """One archived evaluation; NDJSON field names match these exactly."""

    run: int
    method: str
    fitness_fn: str
    target: int
    gen: int
    genome: list[float]
    probs: list[float]
    fit: float


@dataclass(frozen=True)
class RunSummary:
    method: str
    fitness_fn: str
    target: int
    run: int
    seed: int
    best_fitness: float
    evaluations: int


@dataclass
class Tally:
    """Attack counts grouped by (target, threshold, predicted class).

    For confusion tallies the predicted class always equals the target, so
    the grouping degenerates to (target, threshold).
    """

    mode: str  # "misclass" or "confusion"
    thresholds: tuple[float, ...]
    counts: dict[tuple[int, float, int], int] = field(default_factory=dict)
    records_seen: int = 0

    @classmethod
    def from_cells(
        cls, mode: str, thresholds: Sequence[float], cells: Mapping[tuple[int, float, int], int]
    ) -> "Tally":
        tally = cls(mode=mode, thresholds=tuple(thresholds))
        for key, count in cells.items():
            if count < 0:
                raise UsageError(f"negative count for cell {key}")
            tally.counts[key] = tally.counts.get(key, 0) + int(count)
        return tally

    def add(self, target: int, threshold: float, predicted: int, n: int = 1) -> None:
        key = (target, threshold, predicted)
        self.counts[key] = self.counts.get(key, 0) + n

    def cell(self, target: int, threshold: float, predicted: int) -> int:
        return self.counts.get((target, threshold, predicted), 0)

    def targets(self) -> list[int]:
        return sorted({key[0] for key in self.counts})

    def predicted_classes(self, target: int) -> list[int]:
        return sorted({key[2] for key in self.counts if key[0] == target})

    def total_for(self, target: int, threshold: float) -> int:
        return sum(
            count for (t, thr, _), count in self.counts.items() if t == target and thr == threshold
        )

    def grand_total(self, threshold: float) -> int:
        return sum(count for (_, thr, _), count in self.counts.items() if thr == threshold)

    def per_target_totals(self, threshold: float) -> dict[int, int]:
        return {target: self.total_for(target, threshold) for target in self.targets()}

    def _threshold_label(self) -> str:
        return "p" if self.mode == "misclass" else "delta"

    def to_csv(self) -> str:
        lines = [f"target,{self._threshold_label()},predicted,count"]
        for target in self.targets():
            for threshold in self.thresholds:
                for predicted in self.predicted_classes(target):
                    lines.append(f"{target},{threshold:g},{predicted},{self.cell(target, threshold, predicted)}")
                lines.append(f"{target},{threshold:g},total,{self.total_for(target, threshold)}")
        for threshold in self.thresholds:
            lines.append(f"all,{threshold:g},total,{self.grand_total(threshold)}")
        return "\n".join(lines) + "\n"

    def to_text(self) -> str:
        """Aligned table per target: threshold rows, predicted-class columns."""
        sign = ">" if self.mode == "misclass" else "<"
        title = "misclassification attacks" if self.mode == "misclass" else "confusion cases"
        blocks = []
        for target in self.targets():
            classes = self.predicted_classes(target)
            if self.mode == "confusion":
                classes = []
            header = [self._threshold_label()] + [str(c) for c in classes] + ["total"]
            rows = [header]
            for threshold in self.thresholds:
                row = [f"{sign}{threshold:g}"]
                row += [str(self.cell(target, threshold, c)) for c in classes]
                row.append(str(self.total_for(target, threshold)))
                rows.append(row)
            widths = [max(len(r[i]) for r in rows) for i in range(len(header))]
            lines = [f"target {target}  ({title})"]
            for r in rows:
                lines.append("  ".join(cell.rjust(widths[i]) for i, cell in enumerate(r)))
            blocks.append("\n".join(lines))
        grand = ["grand totals"]
        for threshold in self.thresholds:
            grand.append(f"  {sign}{threshold:g}: {self.grand_total(threshold)}")
        blocks.append("\n".join(grand))
        return "\n\n".join(blocks) + "\n"


def _validate_p_thresholds(thresholds: Sequence[float]) -> tuple[float, ...]:
    out = tuple(float(t) for t in thresholds)
    if not out:
        raise UsageError("need at least one threshold")
    for t in out:
        if not 0.0 <= t < 1.0:
            raise UsageError(f"attack threshold {t} out of range [0, 1)")
    return out


def _validate_deltas(deltas: Sequence[float]) -> tuple[float, ...]:
    out = tuple(float(d) for d in deltas)
    if not out:
        raise UsageError("need at least one threshold")
    for d in out:
        if not 0.0 < d <= 1.0:
            raise UsageError(f"confusion threshold {d} out of range (0, 1]")
    return out


def iter_archive_records(archive_dir: str | Path) -> Iterator[tuple[str, int, dict]]:
    """Yield (segment name, line number, record) for every archived evaluation."""
    runs_dir = Path(archive_dir) / "runs"
    if not runs_dir.is_dir():
        raise UsageError(f"{archive_dir} has no runs/ directory; not a campaign archive")
    for segment in sorted(runs_dir.glob("*.ndjson")):
        with open(segment, encoding="utf-8") as fh:
            for line_no, line in enumerate(fh, start=1):
                if not line.strip():
                    continue
                try:
                    record = json.loads(line)
                except json.JSONDecodeError as exc:
                    raise ArchiveError(f"invalid JSON ({exc.msg})", segment.name, line_no) from None
                yield segment.name, line_no, record


def _record_verdict(segment: str, line_no: int, record: dict):
    try:
        target = record["target"]
        probs = np.asarray(record["probs"], dtype=np.float64)
    except (KeyError, TypeError, ValueError) as exc:
        raise ArchiveError(f"malformed record ({exc})", segment, line_no) from None
    try:
        return assess(probs, target)
    except UsageError as exc:
        raise ArchiveError(str(exc), segment, line_no) from None


def tally_attacks(archive_dir: str | Path, p_thresholds: Sequence[float] = DEFAULT_P_THRESHOLDS) -> Tally:
    """Count misclassification attacks per (target, p, predicted class)."""
    thresholds = _validate_p_thresholds(p_thresholds)
    tally = Tally(mode="misclass", thresholds=thresholds)
    for segment, line_no, record in iter_archive_records(archive_dir):
        verdict = _record_verdict(segment, line_no, record)
        tally.records_seen += 1
        for p in thresholds:
            if is_attack_at(verdict, p):
                tally.add(verdict.target, p, verdict.predicted)
    return tally


def tally_confusion(archive_dir: str | Path, deltas: Sequence[float] = DEFAULT_DELTAS) -> Tally:
    """Count correctly classified, low-margin cases per (target, delta)."""
    thresholds = _validate_deltas(deltas)
    tally = Tally(mode="confusion", thresholds=thresholds)
    for segment, line_no, record in iter_archive_records(archive_dir):
        verdict = _record_verdict(segment, line_no, record)
        tally.records_seen += 1
        for delta in thresholds:
            if is_confusion_at(verdict, delta):
                tally.add(verdict.target, delta, verdict.target)
    return tally


@dataclass(frozen=True)
class CompareRow:
    target: int | str
    ea_count: int
    mils_count: int
    improvement_pct: float | None  # None when undefined (ea == 0 < mils)

    @property
    def flagged(self) -> bool:
        return self.improvement_pct is None


def _improvement(ea_count: int, mils_count: int) -> float | None:
    if ea_count > 0:
        return round(100.0 * (ea_count - mils_count) / ea_count, 2)
    return 0.0 if mils_count == 0 else None


def compare_methods(
    ea_totals: Mapping[int, int], mils_totals: Mapping[int, int]
) -> list[CompareRow]:
    """Per-target EA-vs-MILS rows plus a totals row.

    The improvement percentage is 100 * (ea - mils) / ea, rounded to two
    decimals; the totals row aggregates raw counts before the division.
    """
    if set(ea_totals) != set(mils_totals):
        raise UsageError(
            f"target sets differ: {sorted(ea_totals)} vs {sorted(mils_totals)}"
        )
    rows = []
    for target in sorted(ea_totals):
        ea_count, mils_count = int(ea_totals[target]), int(mils_totals[target])
        rows.append(CompareRow(target, ea_count, mils_count, _improvement(ea_count, mils_count)))
    ea_sum = sum(int(v) for v in ea_totals.values())
    mils_sum = sum(int(v) for v in mils_totals.values())
    rows.append(CompareRow("total", ea_sum, mils_sum, _improvement(ea_sum, mils_sum)))
    return rows


def compare_rows_to_csv(rows: Sequence[CompareRow]) -> str:
    lines = ["target,ea_count,mils_count,improvement_pct"]
    for row in rows:
        pct = "undefined" if row.improvement_pct is None else f"{row.improvement_pct:.2f}"
        lines.append(f"{row.target},{row.ea_count},{row.mils_count},{pct}")
    return "\n".join(lines) + "\n"


def _segment_stem(method: str, fitness: FitnessKind, target: int, run: int) -> str:
    return f"{method}_{fitness.value}_{target}_{run}"


def _sha256(path: Path) -> str:
    return hashlib.sha256(path.read_bytes()).hexdigest()


def _validate_models(cfg: CampaignConfig) -> tuple[Model, Model]:
    generator = load_model(cfg.generator_path)
    classifier = load_model(cfg.classifier_path)
    if generator.kind != CONDITIONAL_GENERATOR:
        raise ModelConsistencyError(f"{cfg.generator_path} is not a conditional generator")
    if classifier.kind != CLASSIFIER:
        raise ModelConsistencyError(f"{cfg.classifier_path} is not a classifier")
    if generator.latent_dim != cfg.latent_dim:
        raise ModelConsistencyError(
            f"generator latent_dim {generator.latent_dim} != configured {cfg.latent_dim}"
        )
    if generator.num_labels != cfg.num_labels or classifier.num_labels != cfg.num_labels:
        raise ModelConsistencyError(
            f"model label counts ({generator.num_labels}, {classifier.num_labels}) "
            f"!= configured {cfg.num_labels}"
        )
    if classifier.input_dim != generator.output_dim:
        raise ModelConsistencyError(
            f"classifier input_dim {classifier.input_dim} != generator output_dim {generator.output_dim}"
        )
    return generator, classifier


def _make_evaluator(generator: Model, classifier: Model, target: int, kind: FitnessKind):
    if kind is FitnessKind.F1:
        def evaluate(z):
            probs = classify(classifier, generate(generator, z, target))
            return f1(probs), probs
    else:
        def evaluate(z):
            probs = classify(classifier, generate(generator, z, target))
            return f2(probs, target), probs
    return evaluate


@dataclass
class CampaignResult:
    output_dir: Path
    runs: list[RunSummary]
    misclass: Tally
    confusion: Tally


def _write_trace_csv(path: Path, result: RunResult) -> None:
    lines = ["generation,mean_fit,best_fit"]
    lines += [f"{pt.generation},{pt.mean_fitness!r},{pt.best_fitness!r}" for pt in result.trace]
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")


def run_campaign(cfg: CampaignConfig, progress: ProgressFn | None = None) -> CampaignResult:
    """Execute every (target, run) cell of the campaign and write the archive.

    Fully deterministic: re-running with the same config and master seed
    reproduces every archive, trace, and table file byte for byte.
    """
    generator, classifier = _validate_models(cfg)
    targets = cfg.resolved_targets()
    ea_cfg = cfg.resolved_ea()
    mils_cfg = cfg.resolved_mils()

    out = Path(cfg.output_dir)
    (out / "runs").mkdir(parents=True, exist_ok=True)
    (out / "traces").mkdir(exist_ok=True)
    (out / "tables").mkdir(exist_ok=True)

    misclass = Tally(mode="misclass", thresholds=DEFAULT_P_THRESHOLDS)
    confusion = Tally(mode="confusion", thresholds=DEFAULT_DELTAS)
    summaries: list[RunSummary] = []
    seeds: dict[str, int] = {}
    manifest_path = out / "manifest.json"

    def manifest_payload(partial: bool) -> dict:
        return {
            "config": _config_echo(cfg, ea_cfg, mils_cfg, targets),
            "seeds": seeds,
            "model_checksums": {
                "generator": _sha256(Path(cfg.generator_path)),
                "classifier": _sha256(Path(cfg.classifier_path)),
            },
            "partial": partial,
        }

    try:
        for target in targets:
            for run in range(cfg.runs_per_target):
                seed = derive_run_seed(cfg.master_seed, target, run, _SEED_TAGS[cfg.method])
                stem = _segment_stem(cfg.method, cfg.fitness, target, run)
                seeds[stem] = seed
                if progress is not None:
                    progress(f"{stem} (seed {seed})")
                evaluate = _make_evaluator(generator, classifier, target, cfg.fitness)
                segment_path = out / "runs" / f"{stem}.ndjson"
                with open(segment_path, "w", encoding="utf-8") as segment:

                    def sink(gen: int, index: int, ind: Individual) -> None:
                        record = {
                            "run": run,
                            "method": cfg.method,
                            "fitness_fn": cfg.fitness.value,
                            "target": target,
                            "gen": gen,
                            "genome": ind.genome.tolist(),
                            "probs": ind.probs.tolist(),
                            "fit": ind.fitness,
                        }
                        segment.write(json.dumps(record, separators=(",", ":")))
                        segment.write("\n")
                        verdict = assess(ind.probs, target)
                        for p in misclass.thresholds:
                            if is_attack_at(verdict, p):
                                misclass.add(target, p, verdict.predicted)
                        for delta in confusion.thresholds:
                            if is_confusion_at(verdict, delta):
                                confusion.add(target, delta, target)
                        misclass.records_seen += 1
                        confusion.records_seen += 1

                    if cfg.method == METHOD_EA:
                        result = evolve(replace(ea_cfg, seed=seed), evaluate, sink)
                    else:
                        result = mils_search(replace(mils_cfg, seed=seed), evaluate, sink)
                _write_trace_csv(out / "traces" / f"{stem}.csv", result)
                summaries.append(
                    RunSummary(
                        method=cfg.method,
                        fitness_fn=cfg.fitness.value,
                        target=target,
                        run=run,
                        seed=seed,
                        best_fitness=result.best.fitness,
                        evaluations=result.evaluations,
                    )
                )
    except Exception:
        manifest_path.write_text(json.dumps(manifest_payload(True), indent=2) + "\n", encoding="utf-8")
        raise

    (out / "tables" / "misclass.csv").write_text(misclass.to_csv(), encoding="utf-8")
    (out / "tables" / "misclass.txt").write_text(misclass.to_text(), encoding="utf-8")
    (out / "tables" / "confusion.csv").write_text(confusion.to_csv(), encoding="utf-8")
    (out / "tables" / "confusion.txt").write_text(confusion.to_text(), encoding="utf-8")
    emit_trace(out)
    manifest_path.write_text(json.dumps(manifest_payload(False), indent=2) + "\n", encoding="utf-8")
    return CampaignResult(output_dir=out, runs=summaries, misclass=misclass, confusion=confusion)


def _config_echo(
    cfg: CampaignConfig, ea_cfg: EAConfig, mils_cfg: MilsConfig, targets: tuple[int, ...]
) -> dict:
    return {
        "generator_path": str(cfg.generator_path),
        "classifier_path": str(cfg.classifier_path),
        "latent_dim": cfg.latent_dim,
        "num_labels": cfg.num_labels,
        "output_dir": str(cfg.output_dir),
        "target_labels": list(targets),
        "runs_per_target": cfg.runs_per_target,
        "method": cfg.method,
        "fitness": cfg.fitness.value,
        "master_seed": cfg.master_seed,
        "ea": {
            "latent_dim": ea_cfg.latent_dim,
            "pop_size": ea_cfg.pop_size,
            "generations": ea_cfg.generations,
            "crossover_prob": ea_cfg.crossover_prob,
            "mutation_prob": ea_cfg.mutation_prob,
            "mutation_sigma": ea_cfg.mutation_sigma,
            "tournament_size": ea_cfg.tournament_size,
            "tournament_winners": ea_cfg.tournament_winners,
            "offspring_size": ea_cfg.offspring_size,
        },
        "mils": {
            "latent_dim": mils_cfg.latent_dim,
            "eval_budget": mils_cfg.eval_budget,
            "mutation_prob": mils_cfg.mutation_prob,
            "mutation_sigma": mils_cfg.mutation_sigma,
            "stagnation_limit": mils_cfg.stagnation_limit,
            "trace_interval": mils_cfg.trace_interval,
        },
    }


@dataclass
class TraceReport:
    csv_path: Path
    rows: int
    missing: list[str]


def emit_trace(archive_dir: str | Path) -> TraceReport:
    """Aggregate per-run traces into tables/trace.csv.

    Rows are (method, fitness_fn, target, generation) with mean_fit and
    best_fit averaged across the runs that reached that generation.  Runs
    listed in the manifest whose trace file is absent are reported as
    missing but do not fail the aggregation.
    """
    archive = Path(archive_dir)
    traces_dir = archive / "traces"
    if not traces_dir.is_dir():
        raise UsageError(f"{archive_dir} has no traces/ directory")

    expected: list[str] = []
    manifest_path = archive / "manifest.json"
    if manifest_path.is_file():
        manifest = json.loads(manifest_path.read_text(encoding="utf-8"))
        expected = sorted(manifest.get("seeds", {}))
    missing = [stem for stem in expected if not (traces_dir / f"{stem}.csv").is_file()]

    # (method, fitness, target) -> generation -> [per-run (mean, best)]
    grouped: dict[tuple[str, str, int], dict[int, list[tuple[float, float]]]] = {}
    for path in sorted(traces_dir.glob("*.csv")):
        method, fitness_fn, target, _run = _parse_stem(path.stem)
        series = grouped.setdefault((method, fitness_fn, target), {})
        with open(path, encoding="utf-8") as fh:
            header = fh.readline()
            if header.strip() != "generation,mean_fit,best_fit":
                raise ArchiveError("unexpected trace header", path.name, 1)
            for line_no, line in enumerate(fh, start=2):
                if not line.strip():
                    continue
                try:
                    gen_s, mean_s, best_s = line.strip().split(",")
                    series.setdefault(int(gen_s), []).append((float(mean_s), float(best_s)))
                except ValueError as exc:
                    raise ArchiveError(f"malformed trace row ({exc})", path.name, line_no) from None

    lines = ["method,fitness_fn,target,generation,mean_fit,best_fit,runs_aggregated"]
    for (method, fitness_fn, target) in sorted(grouped):
        series = grouped[(method, fitness_fn, target)]
        for generation in sorted(series):
            points = series[generation]
            mean_fit = sum(p[0] for p in points) / len(points)
            best_fit = sum(p[1] for p in points) / len(points)
            lines.append(
                f"{method},{fitness_fn},{target},{generation},{mean_fit!r},{best_fit!r},{len(points)}"
            )
    csv_path = archive / "tables" / "trace.csv"
    csv_path.parent.mkdir(exist_ok=True)
    csv_path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return TraceReport(csv_path=csv_path, rows=len(lines) - 1, missing=missing)


def _parse_stem(stem: str) -> tuple[str, str, int, int]:
    parts = stem.split("_")
    if len(parts) != 4:
        raise UsageError(f"unrecognized run file name {stem!r}")
    method, fitness_fn, target, run = parts
    return method, fitness_fn, int(target), int(run)


def enumerate_grid(grid: Mapping[str, Sequence]) -> list[dict]:
    """All parameter combinations of the grid, in deterministic order."""
    if not grid:
        raise UsageError("parameter grid is empty")
    keys = sorted(grid)
    for key in keys:
        if not grid[key]:
            raise UsageError(f"grid entry {key!r} has no candidate values")
    return [dict(zip(keys, combo)) for combo in itertools.product(*(grid[k] for k in keys))]


@dataclass(frozen=True)
class SweepRow:
    params: dict
    mean_best_fitness: float | None
    attack_count: int | None
    error: str | None = None


def run_sweep(
    base: CampaignConfig,
    grid: Mapping[str, Sequence],
    repetitions: int = 2,
    progress: ProgressFn | None = None,
) -> tuple[list[SweepRow], Path]:
    """Run every grid configuration at reduced budget and summarize.

    Grid keys are EAConfig field names.  Each configuration is executed as
    its own small campaign (``repetitions`` runs per target); the summary
    records the mean best fitness across runs and the misclassification
    attack count at p = 0.  A failing configuration is recorded and the
    sweep continues.
    """
    if repetitions < 1:
        raise UsageError("repetitions must be >= 1")
    combos = enumerate_grid(grid)
    ea_fields = set(EAConfig.__dataclass_fields__)
    for combo in combos:
        unknown = set(combo) - ea_fields
        if unknown:
            raise UsageError(f"unknown grid parameter(s): {sorted(unknown)}")

    out = Path(base.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    rows: list[SweepRow] = []
    for index, combo in enumerate(combos):
        if progress is not None:
            progress(f"config {index + 1}/{len(combos)}: {combo}")
        try:
            cfg = replace(
                base,
                method=METHOD_EA,
                runs_per_target=repetitions,
                ea=replace(base.resolved_ea(), **combo),
                output_dir=out / f"config_{index:03d}",
            )
            result = run_campaign(cfg)
            best_values = [summary.best_fitness for summary in result.runs]
            rows.append(
                SweepRow(
                    params=combo,
                    mean_best_fitness=sum(best_values) / len(best_values),
                    attack_count=result.misclass.grand_total(0.0),
                )
            )
        except Exception as exc:  # record the failure, keep sweeping
            rows.append(SweepRow(params=combo, mean_best_fitness=None, attack_count=None, error=str(exc)))

    keys = sorted(grid)
    lines = [",".join(keys) + ",mean_best_fitness,attack_count,error"]
    for row in rows:
        values = [f"{row.params[k]:g}" if isinstance(row.params[k], float) else str(row.params[k]) for k in keys]
        mean_s = "" if row.mean_best_fitness is None else repr(row.mean_best_fitness)
        count_s = "" if row.attack_count is None else str(row.attack_count)
        error_s = "" if row.error is None else row.error.replace(",", ";").replace("\n", " ")
        lines.append(",".join(values + [mean_s, count_s, error_s]))
    csv_path = out / "sweep_summary.csv"
    csv_path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return rows, csv_path
