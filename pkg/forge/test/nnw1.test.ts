import * as fs from "fs";
import * as os from "os";
import * as path from "path";
import { describe, expect, it } from "vitest";

import { createMlp } from "../src/mlp";
import {
  MODEL_CLASSIFIER,
  MODEL_GENERATOR,
  emitGoldens,
  forwardQuantized,
  quantize,
  writeNnw1,
} from "../src/nnw1";
import { createRng } from "../src/rng";

function tempDir(): string {
  return fs.mkdtempSync(path.join(os.tmpdir(), "forge-test-"));
}

describe("NNW1 serialization", () => {
  it("writes the documented header layout", () => {
    const net = createMlp([6, 4], ["softmax"], createRng(1));
    const model = quantize(net, MODEL_CLASSIFIER, 0, 4);
    const file = path.join(tempDir(), "clf.nnw1");
    writeNnw1(model, file);
    const bytes = fs.readFileSync(file);
    expect(bytes.subarray(0, 4).toString("ascii")).toBe("NNW1");
    expect(bytes.readUInt32LE(4)).toBe(1); // version
    expect(bytes.readUInt8(8)).toBe(0); // classifier
    expect(bytes.readUInt32LE(9)).toBe(6); // input_dim
    expect(bytes.readUInt32LE(13)).toBe(0); // latent_dim
    expect(bytes.readUInt32LE(17)).toBe(4); // num_labels
    expect(bytes.readUInt32LE(21)).toBe(4); // output_dim
    expect(bytes.readUInt32LE(25)).toBe(1); // layer_count
    expect(bytes.readUInt8(29)).toBe(0); // dense
    expect(bytes.readUInt8(30)).toBe(4); // softmax
    expect(bytes.readUInt32LE(31)).toBe(6);
    expect(bytes.readUInt32LE(35)).toBe(4);
    expect(bytes.length).toBe(39 + 4 * (6 * 4 + 4));
  });

  it("round-trips float32 parameters exactly", () => {
    const net = createMlp([3, 2], ["softmax"], createRng(2));
    const model = quantize(net, MODEL_CLASSIFIER, 0, 2);
    const file = path.join(tempDir(), "clf.nnw1");
    writeNnw1(model, file);
    const bytes = fs.readFileSync(file);
    const weightsOffset = 39;
    for (let i = 0; i < model.layers[0].weights.length; i++) {
      expect(bytes.readFloatLE(weightsOffset + 4 * i)).toBe(model.layers[0].weights[i]);
    }
  });

  it("writes byte-identical files for identical models", () => {
    const dir = tempDir();
    const net = createMlp([5, 3], ["softmax"], createRng(3));
    const model = quantize(net, MODEL_CLASSIFIER, 0, 3);
    writeNnw1(model, path.join(dir, "a.nnw1"));
    writeNnw1(model, path.join(dir, "b.nnw1"));
    expect(fs.readFileSync(path.join(dir, "a.nnw1")).equals(fs.readFileSync(path.join(dir, "b.nnw1")))).toBe(
      true
    );
  });
});

describe("quantized inference", () => {
  it("produces float32-representable layer outputs", () => {
    const net = createMlp([4, 6, 4], ["tanh", "sigmoid"], createRng(4));
    const model = quantize(net, MODEL_GENERATOR, 1, 3);
    const out = forwardQuantized(model, new Float64Array([0.5, -0.25, 1, 0]));
    for (const v of out) {
      expect(Math.fround(v)).toBe(v);
      expect(v).toBeGreaterThanOrEqual(0);
      expect(v).toBeLessThanOrEqual(1);
    }
  });

  it("softmax head sums to one", () => {
    const net = createMlp([4, 5], ["softmax"], createRng(5));
    const model = quantize(net, MODEL_CLASSIFIER, 0, 5);
    const out = forwardQuantized(model, new Float64Array([1, 2, 3, 4]));
    const sum = Array.from(out).reduce((a, b) => a + b, 0);
    expect(Math.abs(sum - 1)).toBeLessThan(1e-5);
  });

  it("rejects mis-sized input", () => {
    const net = createMlp([4, 2], ["softmax"], createRng(6));
    const model = quantize(net, MODEL_CLASSIFIER, 0, 2);
    expect(() => forwardQuantized(model, new Float64Array(3))).toThrow(/input length/);
  });
});

describe("golden vectors", () => {
  it("emits the requested number of NDJSON records", () => {
    const net = createMlp([7, 3], ["softmax"], createRng(7));
    const model = quantize(net, MODEL_CLASSIFIER, 0, 3);
    const file = path.join(tempDir(), "golden.ndjson");
    emitGoldens(model, 17, createRng(8), file);
    const lines = fs.readFileSync(file, "utf-8").trim().split("\n");
    expect(lines.length).toBe(17);
    const record = JSON.parse(lines[0]);
    expect(record.input.length).toBe(7);
    expect(record.output.length).toBe(3);
  });

  it("records inputs that are exactly float32 values", () => {
    const net = createMlp([10, 4, 9], ["tanh", "sigmoid"], createRng(9));
    const model = quantize(net, MODEL_GENERATOR, 5, 5);
    const file = path.join(tempDir(), "golden.ndjson");
    emitGoldens(model, 5, createRng(10), file);
    for (const line of fs.readFileSync(file, "utf-8").trim().split("\n")) {
      const { input, output } = JSON.parse(line);
      for (const v of input) expect(Math.fround(v)).toBe(v);
      // recomputing from the parsed JSON reproduces the recorded output bit for bit
      const again = forwardQuantized(model, Float64Array.from(input));
      expect(Array.from(again)).toEqual(output);
    }
  });

  it("generator goldens embed a one-hot label block", () => {
    const net = createMlp([8, 4, 4], ["tanh", "sigmoid"], createRng(11));
    const model = quantize(net, MODEL_GENERATOR, 5, 3);
    const file = path.join(tempDir(), "golden.ndjson");
    emitGoldens(model, 10, createRng(12), file);
    for (const line of fs.readFileSync(file, "utf-8").trim().split("\n")) {
      const { input } = JSON.parse(line);
      const labelBlock = input.slice(5);
      expect(labelBlock.filter((v: number) => v === 1).length).toBe(1);
      expect(labelBlock.filter((v: number) => v === 0).length).toBe(2);
    }
  });
});
