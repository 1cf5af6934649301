"""Shared fixtures: tiny hand-built models and synthetic archives."""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np
import pytest

from evoattack.nn import CLASSIFIER, CONDITIONAL_GENERATOR, LayerSpec, Model, save_model
from evoattack.rng import Xoshiro256StarStar

FIXTURES = Path(__file__).parent / "fixtures"


def dense(activation: str, weights, biases=None) -> LayerSpec:
    w = np.asarray(weights, dtype=np.float32)
    b = np.zeros(w.shape[0], dtype=np.float32) if biases is None else np.asarray(biases, dtype=np.float32)
    return LayerSpec(kind="dense", activation=activation, weights=w, biases=b)


def make_classifier(layers, num_labels: int) -> Model:
    return Model(
        kind=CLASSIFIER,
        latent_dim=0,
        num_labels=num_labels,
        input_dim=layers[0].in_dim,
        output_dim=layers[-1].out_dim,
        layers=tuple(layers),
    )


def make_generator(layers, latent_dim: int, num_labels: int) -> Model:
    return Model(
        kind=CONDITIONAL_GENERATOR,
        latent_dim=latent_dim,
        num_labels=num_labels,
        input_dim=layers[0].in_dim,
        output_dim=layers[-1].out_dim,
        layers=tuple(layers),
    )


def tiny_model_pair() -> tuple[Model, Model]:
    """A 4-latent, 3-label, 2x2-pixel generator/classifier pair.

    Conditioning label k lights up pixel k; the latent block perturbs the
    logits enough that sampled latents sometimes flip the prediction, so
    small campaigns find attacks quickly.
    """
    d, l, pixels = 4, 3, 4
    rng = Xoshiro256StarStar(2024)
    latent_block = np.array(rng.normals(pixels * d)).reshape(pixels, d) * 0.8
    label_block = np.full((pixels, l), -2.0)
    for k in range(l):
        label_block[k, k] = 4.0
    gen = make_generator(
        [dense("sigmoid", np.hstack([latent_block, label_block]))], latent_dim=d, num_labels=l
    )
    clf_w = np.full((l, pixels), -1.0)
    for k in range(l):
        clf_w[k, k] = 3.0
    clf = make_classifier([dense("softmax", clf_w)], num_labels=l)
    return gen, clf


@pytest.fixture(scope="session")
def tiny_models(tmp_path_factory) -> dict:
    gen, clf = tiny_model_pair()
    root = tmp_path_factory.mktemp("tiny_models")
    gen_path = root / "generator.nnw1"
    clf_path = root / "classifier.nnw1"
    save_model(gen, gen_path)
    save_model(clf, clf_path)
    return {
        "generator": gen,
        "classifier": clf,
        "generator_path": gen_path,
        "classifier_path": clf_path,
        "latent_dim": gen.latent_dim,
        "num_labels": gen.num_labels,
    }


def write_archive(root: Path, records: list[dict], segment: str = "ea_f2_0_0.ndjson") -> Path:
    """Materialize a synthetic campaign archive from raw record dicts."""
    runs = root / "runs"
    runs.mkdir(parents=True, exist_ok=True)
    with open(runs / segment, "w", encoding="utf-8") as fh:
        for record in records:
            fh.write(json.dumps(record, separators=(",", ":")) + "\n")
    return root


def record_for(probs, target, **extra) -> dict:
    base = {
        "run": 0,
        "method": "ea",
        "fitness_fn": "f2",
        "target": target,
        "gen": 0,
        "genome": [0.0, 0.0],
        "probs": list(map(float, probs)),
        "fit": 0.0,
    }
    base.update(extra)
    return base


def forge_fixture_paths() -> dict:
    """Paths of the pre-exported trainer fixtures checked into the repo."""
    return {
        "generator_path": FIXTURES / "generator.nnw1",
        "classifier_path": FIXTURES / "classifier.nnw1",
        "generator_golden": FIXTURES / "golden_generator.ndjson",
        "classifier_golden": FIXTURES / "golden_classifier.ndjson",
        "metadata": FIXTURES / "metadata.json",
    }


def require_forge_fixtures() -> dict:
    paths = forge_fixture_paths()
    if not paths["generator_path"].is_file():
        pytest.skip("trainer-exported model fixtures not present")
    return paths
