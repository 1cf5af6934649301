/**
 * Conditional generator training.
 *
 * The generator is a dense decoder G(z, one-hot label) -> pixels trained to
 * reconstruct dataset images from a fixed random projection of themselves:
 * z(x) = (P x - mu_class) / sigma_class, standardized per class so that
 * sampling z ~ N(0,1) at generation time lands on the code distribution the
 * decoder saw in training. Gaussian input noise during training smooths the
 * decoder between codes, which keeps samples plausible across the whole
 * latent space rather than only at training codes.
 */

import { Dataset, oneHot } from "./dataset";
import { AdamTrainer, Mlp, createMlp, predict } from "./mlp";
import { Rng } from "./rng";

export interface GeneratorOptions {
  latentDim: number;
  hidden: number;
  epochs: number;
  batchSize: number;
  learningRate: number;
  codeNoise: number;
}

export const GENERATOR_DEFAULTS: GeneratorOptions = {
  latentDim: 32,
  hidden: 96,
  epochs: 300,
  batchSize: 32,
  learningRate: 2e-3,
  codeNoise: 0.25,
};

export interface GeneratorResult {
  net: Mlp;
}

/** Per-class standardized random projection codes for every training image. */
export function projectCodes(data: Dataset, latentDim: number, rng: Rng): Float64Array[] {
  const pixels = data.images[0].length;
  const projection = new Float64Array(latentDim * pixels);
  const scale = 1 / Math.sqrt(pixels);
  for (let i = 0; i < projection.length; i++) {
    projection[i] = rng.gaussian() * scale;
  }

  const raw = data.images.map((image) => {
    const code = new Float64Array(latentDim);
    for (let d = 0; d < latentDim; d++) {
      let acc = 0;
      const row = d * pixels;
      for (let p = 0; p < pixels; p++) acc += projection[row + p] * image[p];
      code[d] = acc;
    }
    return code;
  });

  // standardize per class and per dimension
  const sums = new Map<number, Float64Array>();
  const squares = new Map<number, Float64Array>();
  const counts = new Map<number, number>();
  for (let i = 0; i < raw.length; i++) {
    const label = data.labels[i];
    if (!sums.has(label)) {
      sums.set(label, new Float64Array(latentDim));
      squares.set(label, new Float64Array(latentDim));
      counts.set(label, 0);
    }
    const sum = sums.get(label)!;
    const square = squares.get(label)!;
    counts.set(label, counts.get(label)! + 1);
    for (let d = 0; d < latentDim; d++) {
      sum[d] += raw[i][d];
      square[d] += raw[i][d] * raw[i][d];
    }
  }
  const means = new Map<number, Float64Array>();
  const stds = new Map<number, Float64Array>();
  for (const [label, sum] of sums) {
    const n = counts.get(label)!;
    const square = squares.get(label)!;
    const mean = new Float64Array(latentDim);
    const std = new Float64Array(latentDim);
    for (let d = 0; d < latentDim; d++) {
      mean[d] = sum[d] / n;
      const variance = Math.max(square[d] / n - mean[d] * mean[d], 1e-12);
      std[d] = Math.sqrt(variance);
    }
    means.set(label, mean);
    stds.set(label, std);
  }

  return raw.map((code, i) => {
    const label = data.labels[i];
    const mean = means.get(label)!;
    const std = stds.get(label)!;
    const standardized = new Float64Array(latentDim);
    for (let d = 0; d < latentDim; d++) {
      standardized[d] = (code[d] - mean[d]) / std[d];
    }
    return standardized;
  });
}

export function trainGenerator(
  train: Dataset,
  rng: Rng,
  options: GeneratorOptions = GENERATOR_DEFAULTS,
  log?: (message: string) => void
): GeneratorResult {
  const pixels = train.images[0].length;
  const codes = projectCodes(train, options.latentDim, rng);
  const net = createMlp(
    [options.latentDim + train.numLabels, options.hidden, pixels],
    ["tanh", "sigmoid"],
    rng
  );
  const trainer = new AdamTrainer(net, options.learningRate);

  const order = train.images.map((_, i) => i);
  const input = new Float64Array(options.latentDim + train.numLabels);
  for (let epoch = 0; epoch < options.epochs; epoch++) {
    rng.shuffle(order);
    let loss = 0;
    for (let b = 0; b < order.length; b += options.batchSize) {
      const batch = order.slice(b, b + options.batchSize);
      for (const index of batch) {
        const target = train.images[index];
        const code = codes[index];
        input.fill(0);
        for (let d = 0; d < options.latentDim; d++) {
          input[d] = code[d] + rng.gaussian() * options.codeNoise;
        }
        input[options.latentDim + train.labels[index]] = 1;
        trainer.accumulate(input.slice(), (output) => {
          const grad = new Float64Array(pixels);
          for (let p = 0; p < pixels; p++) {
            grad[p] = output[p] - target[p];
            loss += grad[p] * grad[p];
          }
          return grad;
        });
      }
      trainer.applyBatch();
    }
    if (log && (epoch + 1) % 20 === 0) {
      log(
        `generator epoch ${epoch + 1}/${options.epochs}: ` +
          `mse ${(loss / (order.length * pixels)).toFixed(5)}`
      );
    }
  }
  return { net };
}

/** Images decoded from standard-normal latents for the given label. */
export function sampleImages(
  net: Mlp,
  latentDim: number,
  numLabels: number,
  label: number,
  count: number,
  rng: Rng
): Float64Array[] {
  const images: Float64Array[] = [];
  for (let n = 0; n < count; n++) {
    const input = new Float64Array(latentDim + numLabels);
    for (let d = 0; d < latentDim; d++) input[d] = rng.gaussian();
    input[latentDim + label] = 1;
    images.push(predict(net, input));
  }
  return images;
}
