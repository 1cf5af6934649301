/**
 * Minimal trainable MLP: dense layers, backprop, minibatch Adam.
 *
 * Only what the two training jobs need — a softmax/cross-entropy head for
 * the classifier and a sigmoid/binary-cross-entropy head for the generator.
 * Both losses share the convenient property that the gradient at the final
 * pre-activation is simply (prediction - target).
 */

import { Rng } from "./rng";

export type Activation = "linear" | "relu" | "tanh" | "sigmoid" | "softmax";

export interface DenseLayer {
  inDim: number;
  outDim: number;
  activation: Activation;
  weights: Float64Array; // row-major (outDim x inDim)
  biases: Float64Array;
}

export interface Mlp {
  layers: DenseLayer[];
}

export function createMlp(dims: number[], activations: Activation[], rng: Rng): Mlp {
  if (dims.length < 2 || activations.length !== dims.length - 1) {
    throw new Error("need dims [d0..dn] and one activation per layer");
  }
  const layers: DenseLayer[] = [];
  for (let i = 0; i < activations.length; i++) {
    const inDim = dims[i];
    const outDim = dims[i + 1];
    // He initialization for relu, Xavier otherwise
    const scale = activations[i] === "relu" ? Math.sqrt(2 / inDim) : Math.sqrt(1 / inDim);
    const weights = new Float64Array(inDim * outDim);
    for (let j = 0; j < weights.length; j++) {
      weights[j] = rng.gaussian() * scale;
    }
    layers.push({
      inDim,
      outDim,
      activation: activations[i],
      weights,
      biases: new Float64Array(outDim),
    });
  }
  return { layers };
}

function applyActivation(activation: Activation, values: Float64Array): void {
  switch (activation) {
    case "linear":
      return;
    case "relu":
      for (let i = 0; i < values.length; i++) {
        if (values[i] < 0) values[i] = 0;
      }
      return;
    case "tanh":
      for (let i = 0; i < values.length; i++) {
        values[i] = Math.tanh(values[i]);
      }
      return;
    case "sigmoid":
      for (let i = 0; i < values.length; i++) {
        values[i] = 1 / (1 + Math.exp(-values[i]));
      }
      return;
    case "softmax": {
      let max = -Infinity;
      for (const v of values) max = Math.max(max, v);
      let sum = 0;
      for (let i = 0; i < values.length; i++) {
        values[i] = Math.exp(values[i] - max);
        sum += values[i];
      }
      for (let i = 0; i < values.length; i++) values[i] /= sum;
      return;
    }
  }
}

/** Forward pass keeping every layer output (needed for backprop). */
export function forwardAll(net: Mlp, input: Float64Array): Float64Array[] {
  const outputs: Float64Array[] = [];
  let current = input;
  for (const layer of net.layers) {
    const next = new Float64Array(layer.outDim);
    for (let o = 0; o < layer.outDim; o++) {
      let acc = layer.biases[o];
      const row = o * layer.inDim;
      for (let i = 0; i < layer.inDim; i++) {
        acc += layer.weights[row + i] * current[i];
      }
      next[o] = acc;
    }
    applyActivation(layer.activation, next);
    outputs.push(next);
    current = next;
  }
  return outputs;
}

export function predict(net: Mlp, input: Float64Array): Float64Array {
  const outputs = forwardAll(net, input);
  return outputs[outputs.length - 1];
}

interface LayerGrads {
  weights: Float64Array;
  biases: Float64Array;
}

interface AdamSlot {
  mW: Float64Array;
  vW: Float64Array;
  mB: Float64Array;
  vB: Float64Array;
}

export class AdamTrainer {
  private readonly grads: LayerGrads[];
  private readonly slots: AdamSlot[];
  private step = 0;
  private batchCount = 0;

  constructor(
    private readonly net: Mlp,
    private readonly learningRate = 1e-3,
    private readonly beta1 = 0.9,
    private readonly beta2 = 0.999,
    private readonly epsilon = 1e-8
  ) {
    this.grads = net.layers.map((layer) => ({
      weights: new Float64Array(layer.weights.length),
      biases: new Float64Array(layer.biases.length),
    }));
    this.slots = net.layers.map((layer) => ({
      mW: new Float64Array(layer.weights.length),
      vW: new Float64Array(layer.weights.length),
      mB: new Float64Array(layer.biases.length),
      vB: new Float64Array(layer.biases.length),
    }));
  }

  /**
   * Backpropagate one example, accumulating gradients for the current batch.
   *
   * `makeGrad` receives the network output and must return the loss gradient
   * at the final pre-activation, i.e. (prediction - target) for softmax+CE
   * and sigmoid+BCE heads.
   */
  accumulate(input: Float64Array, makeGrad: (output: Float64Array) => Float64Array): void {
    const layers = this.net.layers;
    const outputs = forwardAll(this.net, input);
    this.batchCount += 1;

    let delta = makeGrad(outputs[outputs.length - 1]);
    for (let l = layers.length - 1; l >= 0; l--) {
      const layer = layers[l];
      const layerInput = l === 0 ? input : outputs[l - 1];
      const grad = this.grads[l];

      // hidden layers: chain delta through the activation derivative
      if (l < layers.length - 1) {
        const activated = outputs[l];
        const scaled = new Float64Array(layer.outDim);
        for (let o = 0; o < layer.outDim; o++) {
          let derivative = 1;
          if (layer.activation === "relu") derivative = activated[o] > 0 ? 1 : 0;
          else if (layer.activation === "tanh") derivative = 1 - activated[o] * activated[o];
          else if (layer.activation === "sigmoid") derivative = activated[o] * (1 - activated[o]);
          scaled[o] = delta[o] * derivative;
        }
        delta = scaled;
      }

      const nextDelta = l > 0 ? new Float64Array(layer.inDim) : null;
      for (let o = 0; o < layer.outDim; o++) {
        const row = o * layer.inDim;
        const g = delta[o];
        grad.biases[o] += g;
        const weights = layer.weights;
        const gradWeights = grad.weights;
        for (let i = 0; i < layer.inDim; i++) {
          if (nextDelta) nextDelta[i] += weights[row + i] * g;
          gradWeights[row + i] += g * layerInput[i];
        }
      }
      if (nextDelta) delta = nextDelta;
    }
  }

  /** One Adam step using the mean gradient of the accumulated batch. */
  applyBatch(): void {
    if (this.batchCount === 0) return;
    this.step += 1;
    const scale = 1 / this.batchCount;
    const correction1 = 1 - Math.pow(this.beta1, this.step);
    const correction2 = 1 - Math.pow(this.beta2, this.step);
    for (let l = 0; l < this.net.layers.length; l++) {
      const layer = this.net.layers[l];
      const grad = this.grads[l];
      const slot = this.slots[l];
      this.adamSweep(layer.weights, grad.weights, slot.mW, slot.vW, scale, correction1, correction2);
      this.adamSweep(layer.biases, grad.biases, slot.mB, slot.vB, scale, correction1, correction2);
      grad.weights.fill(0);
      grad.biases.fill(0);
    }
    this.batchCount = 0;
  }

  private adamSweep(
    params: Float64Array,
    grads: Float64Array,
    m: Float64Array,
    v: Float64Array,
    scale: number,
    correction1: number,
    correction2: number
  ): void {
    const lr = this.learningRate;
    for (let i = 0; i < params.length; i++) {
      const g = grads[i] * scale;
      m[i] = this.beta1 * m[i] + (1 - this.beta1) * g;
      v[i] = this.beta2 * v[i] + (1 - this.beta2) * g * g;
      const mHat = m[i] / correction1;
      const vHat = v[i] / correction2;
      params[i] -= (lr * mHat) / (Math.sqrt(vHat) + this.epsilon);
    }
  }
}
