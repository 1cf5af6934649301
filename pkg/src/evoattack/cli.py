"""Command-line interface.

Subcommands: verify-model, attack, mils, tally, compare, trace, sweep.
Human-readable progress goes to stderr; machine output (CSV, reports) goes
to stdout and files.  Exit codes: 0 success, 1 usage error, 2 data/model
error.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import replace
from pathlib import Path
from typing import Sequence

from . import campaign as _campaign
from .campaign import (
    METHOD_MILS,
    CampaignConfig,
    compare_methods,
    compare_rows_to_csv,
    emit_trace,
    run_campaign,
    run_sweep,
    tally_attacks,
    tally_confusion,
)
from .ea import EAConfig
from .errors import EvoAttackError, UsageError
from .fitness import FitnessKind
from .mils import MilsConfig
from .nn import load_model, verify_golden

_CAMPAIGN_KEYS = {
    "generator_path",
    "classifier_path",
    "latent_dim",
    "num_labels",
    "output_dir",
    "target_labels",
    "runs_per_target",
    "method",
    "fitness",
    "ea",
    "mils",
    "master_seed",
}
_EA_KEYS = set(EAConfig.__dataclass_fields__) - {"seed"}
_MILS_KEYS = set(MilsConfig.__dataclass_fields__) - {"seed"}
_PATH_KEYS = ("generator_path", "classifier_path", "output_dir")


def _progress(message: str) -> None:
    print(f"[evoattack] {message}", file=sys.stderr)


def _parse_override(text: str) -> tuple[list[str], object]:
    key, sep, value = text.partition("=")
    if not sep or not key:
        raise UsageError(f"override must look like key=value, got {text!r}")
    try:
        parsed = json.loads(value)
    except json.JSONDecodeError:
        parsed = value
    return key.split("."), parsed


def _apply_overrides(raw: dict, overrides: Sequence[str]) -> dict:
    for text in overrides:
        path, value = _parse_override(text)
        node = raw
        for part in path[:-1]:
            node = node.setdefault(part, {})
            if not isinstance(node, dict):
                raise UsageError(f"cannot override through non-object key {part!r}")
        node[path[-1]] = value
    return raw


def load_config(path: str | Path, overrides: Sequence[str] = ()) -> CampaignConfig:
    """Parse a campaign config JSON file.

    Unknown keys are rejected; file paths are resolved relative to the
    config file's directory.
    """
    path = Path(path)
    if not path.is_file():
        raise UsageError(f"config file not found: {path}")
    try:
        raw = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise UsageError(f"{path}: invalid JSON ({exc.msg}, line {exc.lineno})") from None
    if not isinstance(raw, dict):
        raise UsageError(f"{path}: config must be a JSON object")
    raw = _apply_overrides(raw, overrides)

    unknown = set(raw) - _CAMPAIGN_KEYS
    if unknown:
        raise UsageError(f"{path}: unknown config key(s): {sorted(unknown)}")
    for required in ("generator_path", "classifier_path", "latent_dim", "num_labels", "output_dir"):
        if required not in raw:
            raise UsageError(f"{path}: missing required key {required!r}")

    base = path.resolve().parent

    def resolve(p: str) -> Path:
        candidate = Path(p)
        return candidate if candidate.is_absolute() else base / candidate

    latent_dim = int(raw["latent_dim"])

    ea = None
    if "ea" in raw:
        ea_raw = dict(raw["ea"])
        unknown = set(ea_raw) - _EA_KEYS
        if unknown:
            raise UsageError(f"{path}: unknown ea key(s): {sorted(unknown)}")
        ea_raw.setdefault("latent_dim", latent_dim)
        ea = EAConfig(**ea_raw)

    mils = None
    if "mils" in raw:
        mils_raw = dict(raw["mils"])
        unknown = set(mils_raw) - _MILS_KEYS
        if unknown:
            raise UsageError(f"{path}: unknown mils key(s): {sorted(unknown)}")
        mils_raw.setdefault("latent_dim", latent_dim)
        if "eval_budget" not in mils_raw:
            ea_for_budget = ea if ea is not None else EAConfig(latent_dim=latent_dim)
            mils_raw["eval_budget"] = ea_for_budget.pop_size * (ea_for_budget.generations + 1)
        mils = MilsConfig(**mils_raw)

    try:
        fitness = FitnessKind(raw.get("fitness", "f2"))
    except ValueError:
        raise UsageError(f"{path}: fitness must be one of ['f1', 'f2']") from None

    targets = raw.get("target_labels")
    return CampaignConfig(
        generator_path=resolve(raw["generator_path"]),
        classifier_path=resolve(raw["classifier_path"]),
        latent_dim=latent_dim,
        num_labels=int(raw["num_labels"]),
        output_dir=resolve(raw["output_dir"]),
        target_labels=None if targets is None else tuple(int(t) for t in targets),
        runs_per_target=int(raw.get("runs_per_target", 30)),
        method=raw.get("method", "ea"),
        fitness=fitness,
        ea=ea,
        mils=mils,
        master_seed=int(raw.get("master_seed", 0)),
    )


def _cmd_verify_model(args: argparse.Namespace) -> int:
    model = load_model(args.model)
    report = verify_golden(model, args.golden, tolerance=args.tolerance)
    print(f"passed: {report.passed}")
    print(f"failed: {report.failed}")
    print(f"max_abs_err: {report.max_abs_err:.3g}")
    return 0 if report.failed == 0 else 2


def _cmd_attack(args: argparse.Namespace, force_mils: bool = False) -> int:
    cfg = load_config(args.config, args.override)
    if force_mils:
        cfg = replace(cfg, method=METHOD_MILS)
    result = run_campaign(cfg, progress=_progress)
    print(result.output_dir)
    return 0


def _parse_threshold_list(text: str) -> list[float]:
    try:
        return [float(part) for part in text.split(",") if part.strip() != ""]
    except ValueError:
        raise UsageError(f"thresholds must be a comma-separated list of numbers, got {text!r}") from None


def _cmd_tally(args: argparse.Namespace) -> int:
    if args.mode == "misclass":
        thresholds = _parse_threshold_list(args.thresholds) if args.thresholds else _campaign.DEFAULT_P_THRESHOLDS
        tally = tally_attacks(args.archive, thresholds)
    else:
        thresholds = _parse_threshold_list(args.thresholds) if args.thresholds else _campaign.DEFAULT_DELTAS
        tally = tally_confusion(args.archive, thresholds)
    csv_text = tally.to_csv()
    tables = Path(args.archive) / "tables"
    tables.mkdir(exist_ok=True)
    (tables / f"{args.mode}.csv").write_text(csv_text, encoding="utf-8")
    (tables / f"{args.mode}.txt").write_text(tally.to_text(), encoding="utf-8")
    _progress(f"wrote {tables / (args.mode + '.csv')} ({tally.records_seen} records)")
    sys.stdout.write(csv_text)
    return 0


def _cmd_compare(args: argparse.Namespace) -> int:
    ea_tally = tally_attacks(args.ea, [0.0])
    mils_tally = tally_attacks(args.mils, [0.0])
    targets = sorted(set(ea_tally.targets()) | set(mils_tally.targets()))
    rows = compare_methods(
        {t: ea_tally.total_for(t, 0.0) for t in targets},
        {t: mils_tally.total_for(t, 0.0) for t in targets},
    )
    sys.stdout.write(compare_rows_to_csv(rows))
    return 0


def _cmd_trace(args: argparse.Namespace) -> int:
    report = emit_trace(args.archive)
    for stem in report.missing:
        _progress(f"missing trace for run {stem}")
    sys.stdout.write(report.csv_path.read_text(encoding="utf-8"))
    return 0


def _cmd_sweep(args: argparse.Namespace) -> int:
    cfg = load_config(args.config, args.override)
    grid_path = Path(args.grid)
    if not grid_path.is_file():
        raise UsageError(f"grid file not found: {grid_path}")
    try:
        grid_raw = json.loads(grid_path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise UsageError(f"{grid_path}: invalid JSON ({exc.msg})") from None
    if not isinstance(grid_raw, dict):
        raise UsageError(f"{grid_path}: grid must be a JSON object of parameter -> candidate list")
    repetitions = int(grid_raw.pop("repetitions", 2))
    _rows, csv_path = run_sweep(cfg, grid_raw, repetitions=repetitions, progress=_progress)
    sys.stdout.write(csv_path.read_text(encoding="utf-8"))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="evoattack",
        description="Evolutionary latent-space attack engine for feedforward image classifiers.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("verify-model", help="check a model against recorded golden vectors")
    p.add_argument("--model", required=True, help="NNW1 weight file")
    p.add_argument("--golden", required=True, help="NDJSON golden-vector file")
    p.add_argument("--tolerance", type=float, default=1e-4)

    p = sub.add_parser("attack", help="run an attack campaign from a JSON config")
    p.add_argument("--config", required=True)
    p.add_argument("--override", action="append", default=[], metavar="KEY=VALUE")

    p = sub.add_parser("mils", help="run the campaign with the MILS baseline")
    p.add_argument("--config", required=True)
    p.add_argument("--override", action="append", default=[], metavar="KEY=VALUE")

    p = sub.add_parser("tally", help="tally attacks or confusion cases in an archive")
    p.add_argument("--archive", required=True)
    p.add_argument("--mode", required=True, choices=["misclass", "confusion"])
    p.add_argument("--thresholds", help="comma-separated threshold list")

    p = sub.add_parser("compare", help="compare EA and MILS archives")
    p.add_argument("--ea", required=True)
    p.add_argument("--mils", required=True)

    p = sub.add_parser("trace", help="aggregate per-run fitness traces")
    p.add_argument("--archive", required=True)

    p = sub.add_parser("sweep", help="run a parameter grid sweep")
    p.add_argument("--config", required=True)
    p.add_argument("--grid", required=True, help="JSON file of parameter -> candidate values")
    p.add_argument("--override", action="append", default=[], metavar="KEY=VALUE")
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits 2 on bad usage and 0 on --help
        return 0 if exc.code == 0 else 1

    handlers = {
        "verify-model": _cmd_verify_model,
        "attack": _cmd_attack,
        "mils": lambda a: _cmd_attack(a, force_mils=True),
        "tally": _cmd_tally,
        "compare": _cmd_compare,
        "trace": _cmd_trace,
        "sweep": _cmd_sweep,
    }
    try:
        return handlers[args.command](args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except EvoAttackError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
