import { describe, expect, it } from "vitest";

import { AdamTrainer, createMlp, forwardAll, predict } from "../src/mlp";
import { createRng } from "../src/rng";

describe("forward pass", () => {
  it("softmax outputs are a probability vector", () => {
    const net = createMlp([4, 3], ["softmax"], createRng(1));
    const out = predict(net, new Float64Array([0.3, -0.1, 0.8, 0.0]));
    const sum = Array.from(out).reduce((a, b) => a + b, 0);
    expect(sum).toBeCloseTo(1, 9);
    for (const p of out) expect(p).toBeGreaterThan(0);
  });

  it("sigmoid outputs stay in (0, 1)", () => {
    const net = createMlp([5, 8, 6], ["tanh", "sigmoid"], createRng(2));
    const out = predict(net, new Float64Array([2, -2, 0.5, 1, -1]));
    for (const p of out) {
      expect(p).toBeGreaterThan(0);
      expect(p).toBeLessThan(1);
    }
  });

  it("keeps one output per layer", () => {
    const net = createMlp([3, 7, 2], ["relu", "softmax"], createRng(3));
    const outputs = forwardAll(net, new Float64Array([1, 2, 3]));
    expect(outputs.length).toBe(2);
    expect(outputs[0].length).toBe(7);
    expect(outputs[1].length).toBe(2);
  });
});

describe("backpropagation", () => {
  it("matches finite-difference gradients", () => {
    // sigmoid head with BCE loss: L = -sum(t*log(y) + (1-t)*log(1-y)),
    // whose final pre-activation gradient is (y - t)
    const rng = createRng(7);
    const net = createMlp([3, 4, 2], ["tanh", "sigmoid"], rng);
    const input = new Float64Array([0.4, -0.3, 0.9]);
    const target = new Float64Array([1, 0]);

    const loss = (): number => {
      const y = predict(net, input);
      let total = 0;
      for (let i = 0; i < y.length; i++) {
        total += -(target[i] * Math.log(y[i]) + (1 - target[i]) * Math.log(1 - y[i]));
      }
      return total;
    };

    const trainer = new AdamTrainer(net);
    trainer.accumulate(input, (output) => {
      const grad = new Float64Array(output.length);
      for (let i = 0; i < output.length; i++) grad[i] = output[i] - target[i];
      return grad;
    });
    const grads = (trainer as unknown as { grads: { weights: Float64Array }[] }).grads;

    const epsilon = 1e-6;
    for (const [layerIndex, weightIndex] of [
      [0, 0],
      [0, 5],
      [1, 3],
      [1, 7],
    ] as const) {
      const weights = net.layers[layerIndex].weights;
      const original = weights[weightIndex];
      weights[weightIndex] = original + epsilon;
      const plus = loss();
      weights[weightIndex] = original - epsilon;
      const minus = loss();
      weights[weightIndex] = original;
      const numeric = (plus - minus) / (2 * epsilon);
      expect(grads[layerIndex].weights[weightIndex]).toBeCloseTo(numeric, 5);
    }
  });

  it("drives the loss down on a toy problem", () => {
    const rng = createRng(11);
    const net = createMlp([2, 8, 2], ["tanh", "softmax"], rng);
    const trainer = new AdamTrainer(net, 5e-3);
    // XOR-ish labels
    const samples: Array<[Float64Array, number]> = [
      [new Float64Array([0, 0]), 0],
      [new Float64Array([1, 1]), 0],
      [new Float64Array([0, 1]), 1],
      [new Float64Array([1, 0]), 1],
    ];
    const crossEntropy = (): number => {
      let total = 0;
      for (const [x, label] of samples) total += -Math.log(predict(net, x)[label]);
      return total;
    };
    const before = crossEntropy();
    for (let epoch = 0; epoch < 400; epoch++) {
      for (const [x, label] of samples) {
        trainer.accumulate(x, (output) => {
          const grad = Float64Array.from(output);
          grad[label] -= 1;
          return grad;
        });
      }
      trainer.applyBatch();
    }
    const after = crossEntropy();
    expect(after).toBeLessThan(before / 5);
    for (const [x, label] of samples) {
      const probs = predict(net, x);
      expect(probs[label]).toBeGreaterThan(0.9);
    }
  });

  it("is deterministic for a fixed seed", () => {
    const trainOnce = (): Float64Array => {
      const rng = createRng(21);
      const net = createMlp([3, 5, 2], ["relu", "softmax"], rng);
      const trainer = new AdamTrainer(net);
      for (let step = 0; step < 50; step++) {
        const x = new Float64Array([rng.uniform(), rng.uniform(), rng.uniform()]);
        const label = rng.below(2);
        trainer.accumulate(x, (output) => {
          const grad = Float64Array.from(output);
          grad[label] -= 1;
          return grad;
        });
        trainer.applyBatch();
      }
      return net.layers[0].weights;
    };
    expect(Array.from(trainOnce())).toEqual(Array.from(trainOnce()));
  });
});
