"""CLI subcommands, exit codes, and stdout/stderr discipline."""

import json

import numpy as np
import pytest

from conftest import tiny_model_pair
from evoattack.cli import load_config, main
from evoattack.errors import UsageError
from evoattack.nn import forward, save_model


@pytest.fixture
def workspace(tmp_path):
    gen, clf = tiny_model_pair()
    gen_path = tmp_path / "generator.nnw1"
    clf_path = tmp_path / "classifier.nnw1"
    save_model(gen, gen_path)
    save_model(clf, clf_path)

    golden = tmp_path / "golden.ndjson"
    with open(golden, "w") as fh:
        for i in range(5):
            x = np.linspace(-1, 1, gen.input_dim) * (i + 1) * 0.2
            fh.write(json.dumps({"input": x.tolist(), "output": forward(gen, x).tolist()}) + "\n")

    config = {
        "generator_path": "generator.nnw1",
        "classifier_path": "classifier.nnw1",
        "latent_dim": 4,
        "num_labels": 3,
        "output_dir": "out",
        "target_labels": [0],
        "runs_per_target": 1,
        "master_seed": 5,
        "ea": {"pop_size": 8, "generations": 4},
    }
    config_path = tmp_path / "attack.json"
    config_path.write_text(json.dumps(config))
    return {"dir": tmp_path, "config": config_path, "golden": golden, "generator": gen_path}


def test_verify_model_ok(workspace, capsys):
    code = main(["verify-model", "--model", str(workspace["generator"]), "--golden", str(workspace["golden"])])
    out = capsys.readouterr().out
    assert code == 0
    assert "failed: 0" in out


def test_verify_model_failures_exit_2(workspace, tmp_path, capsys):
    bad = tmp_path / "bad_golden.ndjson"
    record = json.loads(workspace["golden"].read_text().splitlines()[0])
    record["output"][0] += 1.0
    bad.write_text(json.dumps(record) + "\n")
    code = main(["verify-model", "--model", str(workspace["generator"]), "--golden", str(bad)])
    assert code == 2
    assert "failed: 1" in capsys.readouterr().out


def test_attack_runs_and_prints_output_dir(workspace, capsys):
    code = main(["attack", "--config", str(workspace["config"])])
    captured = capsys.readouterr()
    assert code == 0
    out_dir = workspace["dir"] / "out"
    assert captured.out.strip() == str(out_dir)
    assert (out_dir / "runs" / "ea_f2_0_0.ndjson").is_file()
    assert (out_dir / "tables" / "misclass.csv").is_file()


def test_attack_missing_config_exits_1(tmp_path, capsys):
    code = main(["attack", "--config", str(tmp_path / "nope.json")])
    assert code == 1
    assert "error" in capsys.readouterr().err


def test_unknown_subcommand_exits_1(capsys):
    assert main(["defend"]) == 1


def test_unknown_flag_exits_1(workspace):
    assert main(["attack", "--config", str(workspace["config"]), "--frobnicate"]) == 1


def test_help_exits_0():
    assert main(["--help"]) == 0


def test_mils_subcommand_forces_method(workspace, capsys):
    code = main(
        [
            "mils",
            "--config",
            str(workspace["config"]),
            "--override",
            "output_dir=mils_out",
            "--override",
            "mils={}",
        ]
    )
    assert code == 0
    out_dir = workspace["dir"] / "mils_out"
    assert (out_dir / "runs" / "mils_f2_0_0.ndjson").is_file()


def test_tally_threshold_row_order(workspace, capsys):
    assert main(["attack", "--config", str(workspace["config"])]) == 0
    capsys.readouterr()
    archive = workspace["dir"] / "out"
    code = main(["tally", "--archive", str(archive), "--mode", "misclass"])
    captured = capsys.readouterr()
    assert code == 0
    lines = captured.out.splitlines()
    assert lines[0] == "target,p,predicted,count"
    totals = [line.split(",")[1] for line in lines[1:] if line.split(",")[2] == "total" and line.split(",")[0] == "0"]
    assert totals == ["0", "0.5", "0.6", "0.7", "0.8", "0.9"]
    assert (archive / "tables" / "misclass.csv").read_text() == captured.out


def test_tally_custom_thresholds(workspace, capsys):
    assert main(["attack", "--config", str(workspace["config"])]) == 0
    capsys.readouterr()
    archive = workspace["dir"] / "out"
    code = main(["tally", "--archive", str(archive), "--mode", "confusion", "--thresholds", "0.2,0.4"])
    captured = capsys.readouterr()
    assert code == 0
    assert captured.out.splitlines()[0] == "target,delta,predicted,count"
    assert "0.2" in captured.out and "0.4" in captured.out


def test_compare_subcommand(workspace, capsys):
    assert main(["attack", "--config", str(workspace["config"])]) == 0
    assert (
        main(
            [
                "mils",
                "--config",
                str(workspace["config"]),
                "--override",
                "output_dir=mils_out",
                "--override",
                "mils={}",
            ]
        )
        == 0
    )
    capsys.readouterr()
    code = main(
        ["compare", "--ea", str(workspace["dir"] / "out"), "--mils", str(workspace["dir"] / "mils_out")]
    )
    captured = capsys.readouterr()
    assert code == 0
    lines = captured.out.splitlines()
    assert lines[0] == "target,ea_count,mils_count,improvement_pct"
    assert lines[-1].startswith("total,")


def test_trace_subcommand(workspace, capsys):
    assert main(["attack", "--config", str(workspace["config"])]) == 0
    capsys.readouterr()
    code = main(["trace", "--archive", str(workspace["dir"] / "out")])
    captured = capsys.readouterr()
    assert code == 0
    assert captured.out.splitlines()[0] == "method,fitness_fn,target,generation,mean_fit,best_fit,runs_aggregated"


def test_sweep_subcommand(workspace, capsys):
    grid_path = workspace["dir"] / "grid.json"
    grid_path.write_text(json.dumps({"pop_size": [4, 6], "generations": [2], "repetitions": 1}))
    code = main(
        [
            "sweep",
            "--config",
            str(workspace["config"]),
            "--grid",
            str(grid_path),
            "--override",
            "output_dir=sweep_out",
        ]
    )
    captured = capsys.readouterr()
    assert code == 0
    lines = captured.out.splitlines()
    assert len(lines) == 3  # header + 2 configs
    assert (workspace["dir"] / "sweep_out" / "sweep_summary.csv").is_file()


def test_attack_idempotent_over_identical_inputs(workspace, capsys):
    assert main(["attack", "--config", str(workspace["config"])]) == 0
    first = (workspace["dir"] / "out" / "runs" / "ea_f2_0_0.ndjson").read_bytes()
    assert main(["attack", "--config", str(workspace["config"])]) == 0
    second = (workspace["dir"] / "out" / "runs" / "ea_f2_0_0.ndjson").read_bytes()
    assert first == second


def test_config_rejects_unknown_keys(workspace):
    raw = json.loads(workspace["config"].read_text())
    raw["tpyo"] = 1
    bad = workspace["dir"] / "bad.json"
    bad.write_text(json.dumps(raw))
    with pytest.raises(UsageError):
        load_config(bad)


def test_config_rejects_unknown_nested_keys(workspace):
    raw = json.loads(workspace["config"].read_text())
    raw["ea"]["polulation"] = 10
    bad = workspace["dir"] / "bad.json"
    bad.write_text(json.dumps(raw))
    with pytest.raises(UsageError):
        load_config(bad)


def test_config_paths_resolve_relative_to_file(workspace):
    cfg = load_config(workspace["config"])
    assert cfg.generator_path == workspace["dir"] / "generator.nnw1"
    assert cfg.output_dir == workspace["dir"] / "out"


def test_config_override_nested_key(workspace):
    cfg = load_config(workspace["config"], overrides=["ea.generations=9", "master_seed=99"])
    assert cfg.ea.generations == 9
    assert cfg.master_seed == 99


def test_bad_model_file_exits_2(workspace, tmp_path, capsys):
    bogus = tmp_path / "bogus.nnw1"
    bogus.write_bytes(b"nope")
    code = main(["verify-model", "--model", str(bogus), "--golden", str(workspace["golden"])])
    assert code == 2
