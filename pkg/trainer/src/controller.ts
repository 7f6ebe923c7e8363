/** Steering controller: a small dense ReLU regressor from pixels to action. */

import { Adam, backwardBatch, buildMlp, forwardBatch, Mlp } from "./mlp.js";
import { Rng } from "./rng.js";

export interface ControllerConfig {
  hidden: [number, number];
  epochs: number;
  learningRate: number;
  batchSize: number;
  valFraction: number; // validation share of the 70/30 split
  inputNoise: number; // train-time pixel jitter; flattens F against reconstruction error
  seed: number;
}

export const defaultControllerConfig: ControllerConfig = {
  hidden: [32, 16],
  epochs: 30,
  learningRate: 1e-3,
  batchSize: 64,
  valFraction: 0.3,
  inputNoise: 0.08,
  seed: 23,
};

export interface ControllerMetrics {
  valMae: number;
  signAgreement: number; // fraction of validation labels whose sign matches
  trainMse: number;
}

export interface TrainedController {
  mlp: Mlp;
  metrics: ControllerMetrics;
  valIndices: number[];
}

export function trainController(
  images: Float64Array,
  actions: Float64Array,
  n: number,
  pixels: number,
  cfg: ControllerConfig = defaultControllerConfig,
): TrainedController {
  const rng = new Rng(cfg.seed);
  const mlp = buildMlp("controller", pixels, [
    [cfg.hidden[0], "relu"],
    [cfg.hidden[1], "relu"],
    [1, "linear"],
  ], rng);

  const order = rng.shuffled(n);
  const nVal = Math.floor(n * cfg.valFraction);
  const valIdx = order.slice(0, nVal);
  const trainIdx = order.slice(nVal);

  const opt = new Adam(cfg.learningRate);
  let lastMse = Infinity;
  for (let epoch = 0; epoch < cfg.epochs; epoch++) {
    const perm = rng.shuffled(trainIdx.length);
    let mse = 0;
    let batches = 0;
    for (let start = 0; start < trainIdx.length; start += cfg.batchSize) {
      const take = perm.slice(start, Math.min(start + cfg.batchSize, trainIdx.length));
      const bn = take.length;
      const X = new Float64Array(bn * pixels);
      const y = new Float64Array(bn);
      for (let s = 0; s < bn; s++) {
        const gi = trainIdx[take[s]];
        X.set(images.subarray(gi * pixels, (gi + 1) * pixels), s * pixels);
        y[s] = actions[gi];
      }
      if (cfg.inputNoise > 0) {
        for (let i = 0; i < X.length; i++) X[i] += rng.normal() * cfg.inputNoise;
      }
      const fwd = forwardBatch(mlp, X, bn);
      const dOut = new Float64Array(bn);
      let loss = 0;
      for (let s = 0; s < bn; s++) {
        const diff = fwd.out[s] - y[s];
        loss += diff * diff;
        dOut[s] = (2 * diff) / bn;
      }
      loss /= bn;
      if (!Number.isFinite(loss)) throw new Error(`controller training diverged at epoch ${epoch}`);
      const grads = backwardBatch(mlp, fwd.cache, dOut);
      opt.beginStep();
      opt.stepMlp(mlp, grads);
      mse += loss;
      batches++;
    }
    lastMse = mse / batches;
  }

  // validation metrics
  const Xv = new Float64Array(nVal * pixels);
  for (let s = 0; s < nVal; s++) Xv.set(images.subarray(valIdx[s] * pixels, (valIdx[s] + 1) * pixels), s * pixels);
  const pred = forwardBatch(mlp, Xv, nVal).out;
  let mae = 0;
  let agree = 0;
  for (let s = 0; s < nVal; s++) {
    const a = actions[valIdx[s]];
    mae += Math.abs(pred[s] - a);
    if (Math.sign(pred[s]) === Math.sign(a) || a === 0) agree++;
  }
  return {
    mlp,
    metrics: { valMae: mae / nVal, signAgreement: agree / nVal, trainMse: lastMse },
    valIndices: valIdx,
  };
}
