/**
 * Loading and splitting of the bundled 8x8 grayscale digit dataset
 * (label,p0..p63 CSV rows; pixel values 0..16, scaled here to [0, 1]).
 */

import * as fs from "fs";

import { Rng } from "./rng";

export interface Dataset {
  /** Flattened images, one Float64Array of length side*side per sample. */
  images: Float64Array[];
  labels: number[];
  numLabels: number;
  side: number;
}

export interface Split {
  train: Dataset;
  test: Dataset;
}

export function loadDigitsCsv(path: string): Dataset {
  const text = fs.readFileSync(path, "utf-8");
  const lines = text.split("\n").filter((line) => line.trim().length > 0);
  const body = lines[0].startsWith("label") ? lines.slice(1) : lines;
  const images: Float64Array[] = [];
  const labels: number[] = [];
  for (const line of body) {
    const cells = line.split(",").map(Number);
    if (cells.some((v) => Number.isNaN(v))) {
      throw new Error(`malformed dataset row: ${line.slice(0, 40)}`);
    }
    labels.push(cells[0]);
    const pixels = new Float64Array(cells.length - 1);
    for (let i = 1; i < cells.length; i++) {
      pixels[i - 1] = cells[i] / 16;
    }
    images.push(pixels);
  }
  const side = Math.round(Math.sqrt(images[0].length));
  if (side * side !== images[0].length) {
    throw new Error(`images are not square: ${images[0].length} pixels`);
  }
  const numLabels = new Set(labels).size;
  return { images, labels, numLabels, side };
}

export function requireLabelDiversity(data: Dataset, minimum = 2): void {
  const seen = new Set(data.labels);
  if (seen.size < minimum) {
    throw new Error(
      `dataset is degenerate: ${seen.size} distinct label(s), need at least ${minimum}`
    );
  }
}

/** Deterministic shuffled split; testFraction of samples go to the test set. */
export function splitDataset(data: Dataset, rng: Rng, testFraction = 0.2): Split {
  const order = rng.shuffle(data.images.map((_, i) => i));
  const testCount = Math.floor(data.images.length * testFraction);
  const pick = (indices: number[]): Dataset => ({
    images: indices.map((i) => data.images[i]),
    labels: indices.map((i) => data.labels[i]),
    numLabels: data.numLabels,
    side: data.side,
  });
  return {
    test: pick(order.slice(0, testCount)),
    train: pick(order.slice(testCount)),
  };
}

export function oneHot(label: number, numLabels: number): Float64Array {
  const vec = new Float64Array(numLabels);
  vec[label] = 1;
  return vec;
}
