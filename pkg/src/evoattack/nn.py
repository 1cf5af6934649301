"""Loading and deterministic inference for NNW1 feedforward models.

The NNW1 weight format is a flat little-endian binary layout:

    bytes 0-3   magic ``NNW1`` (ASCII)
    u32         version (= 1)
    u8          model kind: 0 = classifier, 1 = conditional generator
    u32         input_dim
    u32         latent_dim (0 for classifiers)
    u32         num_labels
    u32         output_dim
    u32         layer_count
    per layer:  u8 kind (0 = dense), u8 activation (0 = linear, 1 = relu,
                2 = tanh, 3 = sigmoid, 4 = softmax), u32 in_dim, u32 out_dim,
                out_dim*in_dim f32 weights (row-major), out_dim f32 biases

Parameters are stored as 32-bit floats.  Inference accumulates each layer in
64-bit arithmetic and rounds the layer output back to 32 bits, which makes
forward passes bit-reproducible across platforms.
"""

from __future__ import annotations

import json
import math
import struct
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import (
    DimensionError,
    GoldenFormatError,
    ModelConsistencyError,
    ModelCorruptionError,
    ModelFormatError,
    UsageError,
)

MAGIC = b"NNW1"
VERSION = 1

CLASSIFIER = "classifier"
CONDITIONAL_GENERATOR = "conditional_generator"

_MODEL_KINDS = (CLASSIFIER, CONDITIONAL_GENERATOR)
_LAYER_KINDS = ("dense",)
_ACTIVATIONS = ("linear", "relu", "tanh", "sigmoid", "softmax")

_HEADER = struct.Struct("<IBIIIII")
_LAYER_HEADER = struct.Struct("<BBII")


@dataclass(frozen=True)
class LayerSpec:
    """One dense layer: activation(W @ x + b)."""

    kind: str
    activation: str
    weights: np.ndarray  # (out_dim, in_dim) float32
    biases: np.ndarray  # (out_dim,) float32

    @property
    def in_dim(self) -> int:
        return self.weights.shape[1]

    @property
    def out_dim(self) -> int:
        return self.weights.shape[0]


@dataclass(frozen=True)
class Model:
    """Immutable feedforward layer stack; safe to share across threads."""

    kind: str
    latent_dim: int
    num_labels: int
    input_dim: int
    output_dim: int
    layers: tuple[LayerSpec, ...]

    @property
    def image_side(self) -> int:
        return int(round(math.sqrt(self.output_dim)))


def _validate_model(model: Model, source: str) -> None:
    if model.kind not in _MODEL_KINDS:
        raise ModelFormatError(f"{source}: unknown model kind {model.kind!r}")
    if not model.layers:
        raise ModelConsistencyError(f"{source}: model has no layers")
    expected_in = model.input_dim
    for i, layer in enumerate(model.layers):
        if layer.kind not in _LAYER_KINDS:
            raise ModelFormatError(f"{source}: layer {i} has unknown kind {layer.kind!r}")
        if layer.activation not in _ACTIVATIONS:
            raise ModelFormatError(f"{source}: layer {i} has unknown activation {layer.activation!r}")
        if layer.in_dim != expected_in:
            raise ModelConsistencyError(
                f"{source}: layer {i} expects input of size {layer.in_dim}, "
                f"but the preceding layer produces {expected_in}"
            )
        if not (np.isfinite(layer.weights).all() and np.isfinite(layer.biases).all()):
            raise ModelCorruptionError(f"{source}: layer {i} contains non-finite parameters")
        expected_in = layer.out_dim
    if expected_in != model.output_dim:
        raise ModelConsistencyError(
            f"{source}: last layer produces {expected_in} values, header says {model.output_dim}"
        )
    last = model.layers[-1]
    if model.kind == CLASSIFIER:
        if last.activation != "softmax":
            raise ModelConsistencyError(f"{source}: classifier must end in softmax, got {last.activation}")
        if model.output_dim != model.num_labels:
            raise ModelConsistencyError(
                f"{source}: classifier output_dim {model.output_dim} != num_labels {model.num_labels}"
            )
        if model.latent_dim != 0:
            raise ModelConsistencyError(f"{source}: classifier latent_dim must be 0")
    else:
        if last.activation != "sigmoid":
            raise ModelConsistencyError(f"{source}: generator must end in sigmoid, got {last.activation}")
        if model.input_dim != model.latent_dim + model.num_labels:
            raise ModelConsistencyError(
                f"{source}: generator input_dim {model.input_dim} != "
                f"latent_dim {model.latent_dim} + num_labels {model.num_labels}"
            )
        side = math.isqrt(model.output_dim)
        if side * side != model.output_dim:
            raise ModelConsistencyError(
                f"{source}: generator output_dim {model.output_dim} is not a perfect square"
            )


def load_model(path: str | Path) -> Model:
    """Read an NNW1 weight file; loading the same file twice is bit-exact."""
    path = Path(path)
    data = path.read_bytes()
    source = str(path)
    if data[:4] != MAGIC:
        raise ModelFormatError(f"{source}: bad magic {data[:4]!r}, expected {MAGIC!r}")
    offset = 4
    try:
        version, kind_code, input_dim, latent_dim, num_labels, output_dim, layer_count = _HEADER.unpack_from(
            data, offset
        )
    except struct.error as exc:
        raise ModelFormatError(f"{source}: truncated header") from exc
    offset += _HEADER.size
    if version != VERSION:
        raise ModelFormatError(f"{source}: unsupported version {version}")
    if kind_code not in (0, 1):
        raise ModelFormatError(f"{source}: unknown model kind code {kind_code}")
    kind = _MODEL_KINDS[kind_code]

    layers = []
    for i in range(layer_count):
        try:
            layer_kind, activation_code, in_dim, out_dim = _LAYER_HEADER.unpack_from(data, offset)
        except struct.error as exc:
            raise ModelFormatError(f"{source}: truncated layer {i} header") from exc
        offset += _LAYER_HEADER.size
        if layer_kind != 0:
            raise ModelFormatError(f"{source}: layer {i} has unknown kind code {layer_kind}")
        if activation_code >= len(_ACTIVATIONS):
            raise ModelFormatError(f"{source}: layer {i} has unknown activation code {activation_code}")
        n_weights = out_dim * in_dim
        end = offset + 4 * (n_weights + out_dim)
        if end > len(data):
            raise ModelFormatError(f"{source}: truncated parameters in layer {i}")
        weights = np.frombuffer(data, dtype="<f4", count=n_weights, offset=offset).reshape(out_dim, in_dim)
        offset += 4 * n_weights
        biases = np.frombuffer(data, dtype="<f4", count=out_dim, offset=offset)
        offset += 4 * out_dim
        weights = weights.copy()
        biases = biases.copy()
        weights.setflags(write=False)
        biases.setflags(write=False)
        layers.append(
            LayerSpec(kind="dense", activation=_ACTIVATIONS[activation_code], weights=weights, biases=biases)
        )
    if offset != len(data):
        raise ModelFormatError(f"{source}: {len(data) - offset} trailing bytes after last layer")

    model = Model(
        kind=kind,
        latent_dim=latent_dim,
        num_labels=num_labels,
        input_dim=input_dim,
        output_dim=output_dim,
        layers=tuple(layers),
    )
    _validate_model(model, source)
    return model


def save_model(model: Model, path: str | Path) -> None:
    """Write a model in NNW1 format (exact inverse of :func:`load_model`)."""
    _validate_model(model, "save_model")
    parts = [MAGIC]
    parts.append(
        _HEADER.pack(
            VERSION,
            _MODEL_KINDS.index(model.kind),
            model.input_dim,
            model.latent_dim,
            model.num_labels,
            model.output_dim,
            len(model.layers),
        )
    )
    for layer in model.layers:
        parts.append(
            _LAYER_HEADER.pack(0, _ACTIVATIONS.index(layer.activation), layer.in_dim, layer.out_dim)
        )
        parts.append(np.ascontiguousarray(layer.weights, dtype="<f4").tobytes())
        parts.append(np.ascontiguousarray(layer.biases, dtype="<f4").tobytes())
    Path(path).write_bytes(b"".join(parts))


def _apply_activation(name: str, values: np.ndarray) -> np.ndarray:
    if name == "linear":
        return values
    if name == "relu":
        return np.maximum(values, 0.0)
    if name == "tanh":
        return np.tanh(values)
    if name == "sigmoid":
        return 1.0 / (1.0 + np.exp(-values))
    # softmax with max-subtraction for numerical stability
    shifted = values - values.max(axis=-1, keepdims=True)
    exps = np.exp(shifted)
    return exps / exps.sum(axis=-1, keepdims=True)


def forward(model: Model, values: np.ndarray) -> np.ndarray:
    """Run the layer stack on one input vector.

    Accumulates in float64 and rounds every layer output to float32; the
    returned float64 vector therefore holds exactly float32-representable
    values and is bit-reproducible for identical inputs.
    """
    x = np.asarray(values, dtype=np.float64)
    if x.ndim != 1 or x.shape[0] != model.input_dim:
        raise DimensionError(
            f"input has shape {x.shape}, model expects a vector of length {model.input_dim}"
        )
    if not np.isfinite(x).all():
        raise UsageError("input contains non-finite values")
    for layer in model.layers:
        x = layer.weights.astype(np.float64) @ x + layer.biases.astype(np.float64)
        x = _apply_activation(layer.activation, x)
        x = x.astype(np.float32).astype(np.float64)
    return x


def one_hot(label: int, num_labels: int) -> np.ndarray:
    if not 0 <= label < num_labels:
        raise UsageError(f"label {label} out of range [0, {num_labels})")
    vec = np.zeros(num_labels, dtype=np.float64)
    vec[label] = 1.0
    return vec


def generate(generator: Model, z: np.ndarray, label: int) -> np.ndarray:
    """Decode latent vector ``z`` conditioned on ``label`` into image pixels."""
    if generator.kind != CONDITIONAL_GENERATOR:
        raise UsageError(f"generate() needs a conditional generator, got a {generator.kind}")
    z = np.asarray(z, dtype=np.float64)
    if z.ndim != 1 or z.shape[0] != generator.latent_dim:
        raise DimensionError(f"latent vector has shape {z.shape}, expected ({generator.latent_dim},)")
    return forward(generator, np.concatenate([z, one_hot(label, generator.num_labels)]))


def classify(classifier: Model, pixels: np.ndarray) -> np.ndarray:
    """Class probabilities for an image; entries sum to 1 within 1e-5."""
    if classifier.kind != CLASSIFIER:
        raise UsageError(f"classify() needs a classifier, got a {classifier.kind}")
    return forward(classifier, pixels)


@dataclass(frozen=True)
class GoldenReport:
    passed: int
    failed: int
    max_abs_err: float


def verify_golden(model: Model, path: str | Path, tolerance: float = 1e-4) -> GoldenReport:
    """Check recorded input/output pairs against this implementation.

    The golden file is NDJSON with one ``{"input": [...], "output": [...]}``
    record per line.  A record passes when every output element agrees
    within ``tolerance``.
    """
    passed = failed = 0
    max_abs_err = 0.0
    with open(path, encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                record = json.loads(line)
                inp = record["input"]
                expected = record["output"]
            except (json.JSONDecodeError, KeyError, TypeError) as exc:
                raise GoldenFormatError(f"malformed golden record ({exc})", line_no) from None
            got = forward(model, np.asarray(inp, dtype=np.float64))
            expected = np.asarray(expected, dtype=np.float64)
            if expected.shape != got.shape:
                raise GoldenFormatError(
                    f"output length {expected.shape} does not match model output {got.shape}", line_no
                )
            err = float(np.max(np.abs(got - expected)))
            max_abs_err = max(max_abs_err, err)
            if err <= tolerance:
                passed += 1
            else:
                failed += 1
    return GoldenReport(passed=passed, failed=failed, max_abs_err=max_abs_err)
