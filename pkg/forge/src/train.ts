/**
 * Train both desk-scale models and export the NNW1 bundle.
 *
 * Usage:
 *   node build/train.js --data data/digits_8x8.csv --out dist [--seed 1]
 *       [--latent 32] [--clf-epochs 40] [--gen-epochs 120] [--goldens 32]
 *
 * The export is gated: the classifier must reach 0.90 test accuracy and the
 * generator must reach 0.80 mean conditional probability (the classifier's
 * probability for the conditioning label, averaged over 1000 sampled
 * latents). If either gate fails the bundle is refused.
 *
 * Bundle contents: classifier.nnw1, generator.nnw1, golden_classifier.ndjson,
 * golden_generator.ndjson, metadata.json.
 */

import * as fs from "fs";
import * as path from "path";

import { CLASSIFIER_DEFAULTS, trainClassifier } from "./classifier";
import { loadDigitsCsv, splitDataset } from "./dataset";
import { GENERATOR_DEFAULTS, trainGenerator } from "./generator";
import {
  MODEL_CLASSIFIER,
  MODEL_GENERATOR,
  QuantizedModel,
  emitGoldens,
  forwardQuantized,
  quantize,
  writeNnw1,
} from "./nnw1";
import { createRng } from "./rng";

export const ACCURACY_GATE = 0.9;
export const FIDELITY_GATE = 0.8;

/** Mean classifier probability of the conditioning label over sampled latents. */
export function measureFidelity(
  generator: QuantizedModel,
  classifier: QuantizedModel,
  draws: number,
  seed: number
): number {
  const rng = createRng(seed);
  let total = 0;
  for (let n = 0; n < draws; n++) {
    const label = n % generator.numLabels;
    const input = new Float64Array(generator.inputDim);
    for (let d = 0; d < generator.latentDim; d++) input[d] = rng.gaussian();
    input[generator.latentDim + label] = 1;
    const image = forwardQuantized(generator, input);
    const probs = forwardQuantized(classifier, image);
    total += probs[label];
  }
  return total / draws;
}

export interface TrainArgs {
  data: string;
  out: string;
  seed: number;
  latent: number;
  clfEpochs: number;
  genEpochs: number;
  goldens: number;
  fidelityDraws: number;
}

export function parseArgs(argv: string[]): TrainArgs {
  const args: TrainArgs = {
    data: "data/digits_8x8.csv",
    out: "dist",
    seed: 1,
    latent: 32,
    clfEpochs: CLASSIFIER_DEFAULTS.epochs,
    genEpochs: GENERATOR_DEFAULTS.epochs,
    goldens: 32,
    fidelityDraws: 1000,
  };
  for (let i = 0; i < argv.length; i += 2) {
    const flag = argv[i];
    const value = argv[i + 1];
    if (value === undefined) throw new Error(`missing value for ${flag}`);
    switch (flag) {
      case "--data":
        args.data = value;
        break;
      case "--out":
        args.out = value;
        break;
      case "--seed":
        args.seed = Number(value);
        break;
      case "--latent":
        args.latent = Number(value);
        break;
      case "--clf-epochs":
        args.clfEpochs = Number(value);
        break;
      case "--gen-epochs":
        args.genEpochs = Number(value);
        break;
      case "--goldens":
        args.goldens = Number(value);
        break;
      case "--fidelity-draws":
        args.fidelityDraws = Number(value);
        break;
      default:
        throw new Error(`unknown flag ${flag}`);
    }
  }
  return args;
}

export function runTraining(args: TrainArgs, log: (m: string) => void): Record<string, unknown> {
  const data = loadDigitsCsv(args.data);
  log(`loaded ${data.images.length} samples, ${data.numLabels} classes, ${data.side}x${data.side} px`);
  const split = splitDataset(data, createRng(args.seed));

  const clfResult = trainClassifier(
    split,
    createRng(args.seed + 1),
    { ...CLASSIFIER_DEFAULTS, epochs: args.clfEpochs },
    log
  );
  log(`classifier test accuracy: ${clfResult.testAccuracy.toFixed(4)}`);
  if (clfResult.testAccuracy < ACCURACY_GATE) {
    throw new Error(
      `export refused: classifier accuracy ${clfResult.testAccuracy.toFixed(4)} below gate ${ACCURACY_GATE}`
    );
  }

  const genResult = trainGenerator(
    split.train,
    createRng(args.seed + 2),
    { ...GENERATOR_DEFAULTS, latentDim: args.latent, epochs: args.genEpochs },
    log
  );

  const classifier = quantize(clfResult.net, MODEL_CLASSIFIER, 0, data.numLabels);
  const generator = quantize(genResult.net, MODEL_GENERATOR, args.latent, data.numLabels);
  const fidelity = measureFidelity(generator, classifier, args.fidelityDraws, args.seed + 3);
  log(`generator fidelity (mean conditional probability): ${fidelity.toFixed(4)}`);
  if (fidelity < FIDELITY_GATE) {
    throw new Error(`export refused: generator fidelity ${fidelity.toFixed(4)} below gate ${FIDELITY_GATE}`);
  }

  const quantizedAccuracy = (() => {
    let correct = 0;
    for (let i = 0; i < split.test.images.length; i++) {
      const probs = forwardQuantized(classifier, split.test.images[i]);
      let argmax = 0;
      for (let c = 1; c < probs.length; c++) if (probs[c] > probs[argmax]) argmax = c;
      if (argmax === split.test.labels[i]) correct += 1;
    }
    return correct / split.test.images.length;
  })();

  fs.mkdirSync(args.out, { recursive: true });
  writeNnw1(classifier, path.join(args.out, "classifier.nnw1"));
  writeNnw1(generator, path.join(args.out, "generator.nnw1"));
  emitGoldens(classifier, args.goldens, createRng(args.seed + 4), path.join(args.out, "golden_classifier.ndjson"));
  emitGoldens(generator, args.goldens, createRng(args.seed + 5), path.join(args.out, "golden_generator.ndjson"));

  const metadata = {
    dataset: "digits_8x8 (UCI handwritten digits, 8x8 grayscale)",
    samples: data.images.length,
    latent_dim: args.latent,
    num_labels: data.numLabels,
    image_side: data.side,
    seed: args.seed,
    classifier_test_accuracy: clfResult.testAccuracy,
    classifier_test_accuracy_quantized: quantizedAccuracy,
    generator_fidelity: fidelity,
    fidelity_draws: args.fidelityDraws,
    golden_vectors: args.goldens,
    trainer: "evoattack-forge 0.1.0",
  };
  fs.writeFileSync(path.join(args.out, "metadata.json"), JSON.stringify(metadata, null, 2) + "\n");
  return metadata;
}

if (require.main === module) {
  const log = (message: string) => process.stderr.write(`[forge] ${message}\n`);
  try {
    const metadata = runTraining(parseArgs(process.argv.slice(2)), log);
    process.stdout.write(JSON.stringify(metadata, null, 2) + "\n");
  } catch (error) {
    process.stderr.write(`[forge] error: ${(error as Error).message}\n`);
    process.exit(1);
  }
}
