/** Autoencoder with a learnable Gaussian-mixture latent prior.
 *
 * The encoder emits a diagonal-Gaussian posterior per image; the mixture
 * (means, diagonal covariances, weights) lives in the prior and is learned
 * jointly.  Component responsibilities come from a softmax over per-component
 * log-likelihoods of the posterior mean.  Loss: pixel MSE plus
 * beta * sum_k r_k (KL(q || p_k) - log s_k).
 *
 * The decoder trains with a sigmoid output head, then switches to a hard
 * [0,1] clamp for the last epochs so that the exported network (clamp as two
 * relu layers) is the function that was actually trained.
 */

import { Activation, Adam, backwardBatch, buildMlp, forwardBatch, Mlp } from "./mlp.js";
import { Rng } from "./rng.js";

export interface GmVaeConfig {
  dZ: number;
  k: number;
  beta: number;
  epochs: number;
  learningRate: number;
  weightDecay: number;
  encoderHidden: number[];
  decoderHidden: number[];
  batchSize: number;
  clampFinetuneEpochs: number;
  seed: number;
}

export const defaultGmVaeConfig: GmVaeConfig = {
  dZ: 4,
  k: 4,
  beta: 0.01,
  epochs: 20,
  learningRate: 1e-5, // paper-faithful default; the toy pipeline overrides
  weightDecay: 1e-4,
  encoderHidden: [96],
  decoderHidden: [64, 128],
  batchSize: 64,
  clampFinetuneEpochs: 4,
  seed: 11,
};

export interface GmPrior {
  mu: Float64Array; // k x dZ
  logVar: Float64Array; // k x dZ
  logits: Float64Array; // k
}

export interface GmVae {
  encoder: Mlp; // pixels -> [mu, logvar] (2*dZ linear outputs)
  decoder: Mlp; // dZ -> pixels, final sigmoid or clamp01
  prior: GmPrior;
  config: GmVaeConfig;
}

export interface VaeTrainStats {
  epochLosses: number[]; // total loss per epoch
  reconLosses: number[];
  klLosses: number[];
}

export function mixtureWeights(prior: GmPrior): Float64Array {
  const k = prior.logits.length;
  let max = -Infinity;
  for (const v of prior.logits) max = Math.max(max, v);
  let sum = 0;
  const w = new Float64Array(k);
  for (let i = 0; i < k; i++) {
    w[i] = Math.exp(prior.logits[i] - max);
    sum += w[i];
  }
  for (let i = 0; i < k; i++) w[i] /= sum;
  return w;
}

/** softmax over k of [log s_k + log N(mu | mu_k, var_k)] */
function responsibilities(prior: GmPrior, dZ: number, mu: Float64Array, off: number): Float64Array {
  const k = prior.logits.length;
  const logw = new Float64Array(k);
  const s = mixtureWeights(prior);
  for (let j = 0; j < k; j++) {
    let ll = Math.log(s[j]);
    for (let d = 0; d < dZ; d++) {
      const lv = prior.logVar[j * dZ + d];
      const diff = mu[off + d] - prior.mu[j * dZ + d];
      ll += -0.5 * (lv + (diff * diff) / Math.exp(lv));
    }
    logw[j] = ll;
  }
  let max = -Infinity;
  for (const v of logw) max = Math.max(max, v);
  let sum = 0;
  const r = new Float64Array(k);
  for (let j = 0; j < k; j++) {
    r[j] = Math.exp(logw[j] - max);
    sum += r[j];
  }
  for (let j = 0; j < k; j++) r[j] /= sum;
  return r;
}

export function buildGmVae(pixels: number, config: GmVaeConfig): GmVae {
  const rng = new Rng(config.seed);
  const encSpec: Array<[number, Activation]> = config.encoderHidden.map((w): [number, Activation] => [w, "relu"]);
  encSpec.push([2 * config.dZ, "linear"]);
  const encoder = buildMlp("encoder", pixels, encSpec, rng);
  // start the posterior sharp (sigma ~ 0.14); unit variance drowns the
  // latent signal in sampling noise for the first epochs
  const head = encoder.layers[encoder.layers.length - 1];
  for (let d = 0; d < config.dZ; d++) head.b[config.dZ + d] = -4;
  const decSpec: Array<[number, Activation]> = config.decoderHidden.map((w): [number, Activation] => [w, "relu"]);
  decSpec.push([pixels, "sigmoid"]);
  const decoder = buildMlp("decoder", config.dZ, decSpec, rng);
  const prior: GmPrior = {
    mu: rng.normals(config.k * config.dZ, 0.5),
    logVar: new Float64Array(config.k * config.dZ), // unit variances
    logits: new Float64Array(config.k), // uniform weights
  };
  return { encoder, decoder, prior, config };
}

export function trainGmVae(vae: GmVae, images: Float64Array, n: number, pixels: number): VaeTrainStats {
  const cfg = vae.config;
  const rng = new Rng(cfg.seed + 1);
  const opt = new Adam(cfg.learningRate, cfg.weightDecay);
  const dZ = cfg.dZ;
  const k = cfg.k;
  const stats: VaeTrainStats = { epochLosses: [], reconLosses: [], klLosses: [] };

  for (let epoch = 0; epoch < cfg.epochs; epoch++) {
    if (epoch === cfg.epochs - cfg.clampFinetuneEpochs) {
      vae.decoder.layers[vae.decoder.layers.length - 1].activation = "clamp01";
    }
    // gentle late decay; the clamp fine-tune keeps enough step size to adapt
    const frac = epoch / cfg.epochs;
    opt.lr = cfg.learningRate * (frac < 0.8 ? 1 : 0.5);
    const order = rng.shuffled(n);
    let epochLoss = 0;
    let epochRecon = 0;
    let epochKl = 0;
    let batches = 0;
    for (let start = 0; start < n; start += cfg.batchSize) {
      const idx = order.slice(start, Math.min(start + cfg.batchSize, n));
      const bn = idx.length;
      const X = new Float64Array(bn * pixels);
      for (let s = 0; s < bn; s++) X.set(images.subarray(idx[s] * pixels, (idx[s] + 1) * pixels), s * pixels);

      const enc = forwardBatch(vae.encoder, X, bn);
      const stats2 = enc.out; // bn x 2dZ: [mu, logvar]
      const Z = new Float64Array(bn * dZ);
      const epsilons = new Float64Array(bn * dZ);
      // beta = 0 is the pure-autoencoder limit: no KL and no sampling noise.
      // The RNG is still consumed so that paired runs see identical batches.
      const pureAe = cfg.beta === 0;
      for (let s = 0; s < bn; s++) {
        for (let d = 0; d < dZ; d++) {
          const mu = stats2[s * 2 * dZ + d];
          const lv = stats2[s * 2 * dZ + dZ + d];
          const eps = pureAe ? rng.normal() * 0 : rng.normal();
          epsilons[s * dZ + d] = eps;
          Z[s * dZ + d] = mu + Math.exp(lv / 2) * eps;
        }
      }

      const dec = forwardBatch(vae.decoder, Z, bn);
      const xHat = dec.out;

      // reconstruction: sum over pixels, mean over batch
      let recon = 0;
      const dXHat = new Float64Array(bn * pixels);
      for (let i = 0; i < bn * pixels; i++) {
        const diff = xHat[i] - X[i];
        recon += diff * diff;
        dXHat[i] = (2 * diff) / bn;
      }
      recon /= bn;

      const decGrads = backwardBatch(vae.decoder, dec.cache, dXHat);

      // KL against the mixture, responsibilities detached
      let kl = 0;
      const dEnc = new Float64Array(bn * 2 * dZ);
      const dPriorMu = new Float64Array(k * dZ);
      const dPriorLv = new Float64Array(k * dZ);
      const dPriorLogits = new Float64Array(k);
      const s = mixtureWeights(vae.prior);
      if (!pureAe) {
        for (let si = 0; si < bn; si++) {
          const off = si * 2 * dZ;
          const r = responsibilities(vae.prior, dZ, stats2, off);
          for (let j = 0; j < k; j++) {
            if (r[j] < 1e-12) continue;
            let klj = -Math.log(s[j]);
            for (let d = 0; d < dZ; d++) {
              const mu = stats2[off + d];
              const lv = stats2[off + dZ + d];
              const v = Math.exp(lv);
              const pm = vae.prior.mu[j * dZ + d];
              const plv = vae.prior.logVar[j * dZ + d];
              const pv = Math.exp(plv);
              const diff = mu - pm;
              klj += 0.5 * ((v + diff * diff) / pv - 1 + plv - lv);
              const w = (cfg.beta * r[j]) / bn;
              dEnc[off + d] += (w * diff) / pv;
              dEnc[off + dZ + d] += w * 0.5 * (v / pv - 1);
              dPriorMu[j * dZ + d] += (w * -diff) / pv;
              dPriorLv[j * dZ + d] += w * 0.5 * (1 - (v + diff * diff) / pv);
            }
            kl += r[j] * klj;
          }
          for (let j = 0; j < k; j++) {
            dPriorLogits[j] += (cfg.beta / bn) * -(r[j] - s[j]);
          }
        }
        kl /= bn;
      }

      // route decoder input grads through the reparameterization
      for (let si = 0; si < bn; si++) {
        for (let d = 0; d < dZ; d++) {
          const dz = decGrads.dX[si * dZ + d];
          const lv = stats2[si * 2 * dZ + dZ + d];
          dEnc[si * 2 * dZ + d] += dz;
          dEnc[si * 2 * dZ + dZ + d] += dz * 0.5 * Math.exp(lv / 2) * epsilons[si * dZ + d];
        }
      }

      const encGrads = backwardBatch(vae.encoder, enc.cache, dEnc);

      const loss = recon + cfg.beta * kl;
      if (!Number.isFinite(loss)) {
        throw new Error(
          `training diverged at epoch ${epoch}: loss=${loss} recon=${recon} kl=${kl}`,
        );
      }
      opt.beginStep();
      opt.stepMlp(vae.decoder, decGrads);
      opt.stepMlp(vae.encoder, encGrads);
      opt.update("prior.mu", vae.prior.mu, dPriorMu, 0);
      opt.update("prior.logVar", vae.prior.logVar, dPriorLv, 0);
      opt.update("prior.logits", vae.prior.logits, dPriorLogits, 0);

      epochLoss += loss;
      epochRecon += recon;
      epochKl += kl;
      batches++;
    }
    stats.epochLosses.push(epochLoss / batches);
    stats.reconLosses.push(epochRecon / batches);
    stats.klLosses.push(epochKl / batches);
  }
  return stats;
}

/** Posterior means for every image (deterministic; no sampling). */
export function encodeMeans(vae: GmVae, images: Float64Array, n: number, pixels: number): Float64Array {
  const { out } = forwardBatch(vae.encoder, images, n);
  const dZ = vae.config.dZ;
  const Z = new Float64Array(n * dZ);
  for (let s = 0; s < n; s++) {
    for (let d = 0; d < dZ; d++) Z[s * dZ + d] = out[s * 2 * dZ + d];
  }
  return Z;
}

/** Full reconstruction x -> decoder(encoder mean). */
export function reconstruct(vae: GmVae, images: Float64Array, n: number, pixels: number): Float64Array {
  const Z = encodeMeans(vae, images, n, pixels);
  const { out } = forwardBatch(vae.decoder, Z, n);
  return out;
}

export function meanReconstructionError(vae: GmVae, images: Float64Array, n: number, pixels: number): number {
  const xHat = reconstruct(vae, images, n, pixels);
  let total = 0;
  for (let i = 0; i < n * pixels; i++) {
    const d = xHat[i] - images[i];
    total += d * d;
  }
  return total / n;
}
