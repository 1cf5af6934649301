/**
 * Digit classifier training: dense relu MLP with a softmax head.
 */

import { Dataset, Split, oneHot, requireLabelDiversity } from "./dataset";
import { AdamTrainer, Mlp, createMlp, predict } from "./mlp";
import { Rng } from "./rng";

export interface ClassifierOptions {
  hidden: number;
  epochs: number;
  batchSize: number;
  learningRate: number;
}

export const CLASSIFIER_DEFAULTS: ClassifierOptions = {
  hidden: 48,
  epochs: 100,
  batchSize: 32,
  learningRate: 1e-3,
};

export interface ClassifierResult {
  net: Mlp;
  testAccuracy: number;
}

export function accuracy(net: Mlp, data: Dataset): number {
  let correct = 0;
  for (let i = 0; i < data.images.length; i++) {
    const probs = predict(net, data.images[i]);
    let argmax = 0;
    for (let c = 1; c < probs.length; c++) {
      if (probs[c] > probs[argmax]) argmax = c;
    }
    if (argmax === data.labels[i]) correct += 1;
  }
  return correct / data.images.length;
}

export function trainClassifier(
  split: Split,
  rng: Rng,
  options: ClassifierOptions = CLASSIFIER_DEFAULTS,
  log?: (message: string) => void
): ClassifierResult {
  requireLabelDiversity(split.train);
  const { train, test } = split;
  const pixels = train.images[0].length;
  const net = createMlp([pixels, options.hidden, train.numLabels], ["relu", "softmax"], rng);
  const trainer = new AdamTrainer(net, options.learningRate);

  const order = train.images.map((_, i) => i);
  for (let epoch = 0; epoch < options.epochs; epoch++) {
    rng.shuffle(order);
    for (let b = 0; b < order.length; b += options.batchSize) {
      const batch = order.slice(b, b + options.batchSize);
      for (const index of batch) {
        const input = train.images[index];
        const target = oneHot(train.labels[index], train.numLabels);
        trainer.accumulate(input, (probs) => {
          const grad = new Float64Array(probs.length);
          for (let c = 0; c < probs.length; c++) grad[c] = probs[c] - target[c];
          return grad;
        });
      }
      trainer.applyBatch();
    }
    if (log && (epoch + 1) % 10 === 0) {
      log(`classifier epoch ${epoch + 1}/${options.epochs}: test accuracy ${accuracy(net, test).toFixed(4)}`);
    }
  }
  return { net, testAccuracy: accuracy(net, test) };
}
