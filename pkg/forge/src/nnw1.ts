/**
 * NNW1 weight-bundle export and quantized inference.
 *
 * Binary layout (all integers little-endian):
 *   bytes 0-3  magic "NNW1"
 *   u32 version=1, u8 kind (0=classifier, 1=conditional_generator),
 *   u32 input_dim, u32 latent_dim, u32 num_labels, u32 output_dim,
 *   u32 layer_count, then per layer:
 *   u8 kind (0=dense), u8 activation (0=linear,1=relu,2=tanh,3=sigmoid,4=softmax),
 *   u32 in_dim, u32 out_dim, out_dim*in_dim f32 weights row-major, out_dim f32 biases.
 *
 * `forwardQuantized` reproduces the consumer's arithmetic: float32 stored
 * parameters widened to float64, float64 accumulation, and every layer
 * output rounded back to float32 (Math.fround). Golden vectors recorded
 * from it therefore agree with the consumer well inside the 1e-4 gate.
 */

import * as fs from "fs";

import { Activation, Mlp } from "./mlp";
import { Rng } from "./rng";

export const MODEL_CLASSIFIER = 0;
export const MODEL_GENERATOR = 1;

const ACTIVATION_CODES: Record<Activation, number> = {
  linear: 0,
  relu: 1,
  tanh: 2,
  sigmoid: 3,
  softmax: 4,
};

export interface QuantizedLayer {
  activation: Activation;
  inDim: number;
  outDim: number;
  weights: Float32Array;
  biases: Float32Array;
}

export interface QuantizedModel {
  kind: number;
  inputDim: number;
  latentDim: number;
  numLabels: number;
  outputDim: number;
  layers: QuantizedLayer[];
}

export function quantize(net: Mlp, kind: number, latentDim: number, numLabels: number): QuantizedModel {
  const layers: QuantizedLayer[] = net.layers.map((layer) => ({
    activation: layer.activation,
    inDim: layer.inDim,
    outDim: layer.outDim,
    weights: Float32Array.from(layer.weights),
    biases: Float32Array.from(layer.biases),
  }));
  return {
    kind,
    inputDim: layers[0].inDim,
    latentDim,
    numLabels,
    outputDim: layers[layers.length - 1].outDim,
    layers,
  };
}

export function writeNnw1(model: QuantizedModel, path: string): void {
  let size = 4 + 4 + 1 + 4 * 5;
  for (const layer of model.layers) {
    size += 1 + 1 + 4 + 4 + 4 * (layer.weights.length + layer.biases.length);
  }
  const buffer = Buffer.alloc(size);
  let offset = 0;
  buffer.write("NNW1", offset, "ascii");
  offset += 4;
  offset = buffer.writeUInt32LE(1, offset);
  offset = buffer.writeUInt8(model.kind, offset);
  offset = buffer.writeUInt32LE(model.inputDim, offset);
  offset = buffer.writeUInt32LE(model.latentDim, offset);
  offset = buffer.writeUInt32LE(model.numLabels, offset);
  offset = buffer.writeUInt32LE(model.outputDim, offset);
  offset = buffer.writeUInt32LE(model.layers.length, offset);
  for (const layer of model.layers) {
    offset = buffer.writeUInt8(0, offset); // dense
    offset = buffer.writeUInt8(ACTIVATION_CODES[layer.activation], offset);
    offset = buffer.writeUInt32LE(layer.inDim, offset);
    offset = buffer.writeUInt32LE(layer.outDim, offset);
    for (let i = 0; i < layer.weights.length; i++) {
      offset = buffer.writeFloatLE(layer.weights[i], offset);
    }
    for (let i = 0; i < layer.biases.length; i++) {
      offset = buffer.writeFloatLE(layer.biases[i], offset);
    }
  }
  if (offset !== size) {
    throw new Error(`serialization size mismatch: wrote ${offset}, expected ${size}`);
  }
  fs.writeFileSync(path, buffer);
}

export function forwardQuantized(model: QuantizedModel, input: Float64Array): Float64Array {
  if (input.length !== model.inputDim) {
    throw new Error(`input length ${input.length} != model input_dim ${model.inputDim}`);
  }
  let current = input;
  for (const layer of model.layers) {
    const next = new Float64Array(layer.outDim);
    for (let o = 0; o < layer.outDim; o++) {
      let acc: number = layer.biases[o];
      const row = o * layer.inDim;
      for (let i = 0; i < layer.inDim; i++) {
        acc += layer.weights[row + i] * current[i];
      }
      next[o] = acc;
    }
    switch (layer.activation) {
      case "linear":
        break;
      case "relu":
        for (let i = 0; i < next.length; i++) if (next[i] < 0) next[i] = 0;
        break;
      case "tanh":
        for (let i = 0; i < next.length; i++) next[i] = Math.tanh(next[i]);
        break;
      case "sigmoid":
        for (let i = 0; i < next.length; i++) next[i] = 1 / (1 + Math.exp(-next[i]));
        break;
      case "softmax": {
        let max = -Infinity;
        for (const v of next) max = Math.max(max, v);
        let sum = 0;
        for (let i = 0; i < next.length; i++) {
          next[i] = Math.exp(next[i] - max);
          sum += next[i];
        }
        for (let i = 0; i < next.length; i++) next[i] /= sum;
        break;
      }
    }
    for (let i = 0; i < next.length; i++) next[i] = Math.fround(next[i]);
    current = next;
  }
  return current;
}

/** Random-but-plausible golden inputs for each model kind. */
export function goldenInput(model: QuantizedModel, rng: Rng): Float64Array {
  const input = new Float64Array(model.inputDim);
  if (model.kind === MODEL_GENERATOR) {
    for (let i = 0; i < model.latentDim; i++) input[i] = Math.fround(rng.gaussian());
    input[model.latentDim + rng.below(model.numLabels)] = 1;
  } else {
    for (let i = 0; i < input.length; i++) input[i] = Math.fround(rng.uniform());
  }
  return input;
}

export function emitGoldens(model: QuantizedModel, count: number, rng: Rng, path: string): void {
  const lines: string[] = [];
  for (let n = 0; n < count; n++) {
    const input = goldenInput(model, rng);
    const output = forwardQuantized(model, input);
    lines.push(JSON.stringify({ input: Array.from(input), output: Array.from(output) }));
  }
  fs.writeFileSync(path, lines.join("\n") + "\n");
}
