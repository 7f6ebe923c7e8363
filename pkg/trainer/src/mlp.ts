/** Dense MLPs with hand-rolled backprop and Adam, enough for the toy models. */

import { Rng } from "./rng.js";

export type Activation = "relu" | "linear" | "sigmoid" | "clamp01";

export interface DenseLayer {
  inDim: number;
  outDim: number;
  w: Float64Array; // row-major outDim x inDim
  b: Float64Array;
  activation: Activation;
}

export interface Mlp {
  inputDim: number;
  layers: DenseLayer[];
  name: string;
}

export function denseLayer(inDim: number, outDim: number, activation: Activation, rng: Rng): DenseLayer {
  const w = new Float64Array(inDim * outDim);
  const std = Math.sqrt(2 / inDim); // He init, fine for relu and mild for linear
  for (let i = 0; i < w.length; i++) w[i] = rng.normal() * std;
  return { inDim, outDim, w, b: new Float64Array(outDim), activation };
}

export function buildMlp(name: string, inputDim: number, spec: Array<[number, Activation]>, rng: Rng): Mlp {
  const layers: DenseLayer[] = [];
  let prev = inputDim;
  for (const [width, act] of spec) {
    layers.push(denseLayer(prev, width, act, rng));
    prev = width;
  }
  return { inputDim, layers, name };
}

function applyActivation(act: Activation, pre: Float64Array): Float64Array {
  const out = new Float64Array(pre.length);
  switch (act) {
    case "relu":
      for (let i = 0; i < pre.length; i++) out[i] = pre[i] > 0 ? pre[i] : 0;
      break;
    case "linear":
      out.set(pre);
      break;
    case "sigmoid":
      for (let i = 0; i < pre.length; i++) out[i] = 1 / (1 + Math.exp(-pre[i]));
      break;
    case "clamp01":
      for (let i = 0; i < pre.length; i++) out[i] = pre[i] < 0 ? 0 : pre[i] > 1 ? 1 : pre[i];
      break;
  }
  return out;
}

function activationGrad(act: Activation, pre: Float64Array, post: Float64Array, dPost: Float64Array): Float64Array {
  const dPre = new Float64Array(pre.length);
  switch (act) {
    case "relu":
      for (let i = 0; i < pre.length; i++) dPre[i] = pre[i] > 0 ? dPost[i] : 0;
      break;
    case "linear":
      dPre.set(dPost);
      break;
    case "sigmoid":
      for (let i = 0; i < pre.length; i++) dPre[i] = dPost[i] * post[i] * (1 - post[i]);
      break;
    case "clamp01":
      for (let i = 0; i < pre.length; i++) dPre[i] = pre[i] > 0 && pre[i] < 1 ? dPost[i] : 0;
      break;
  }
  return dPre;
}

export interface BatchCache {
  inputs: Float64Array[]; // layer inputs, length L
  pres: Float64Array[]; // pre-activations, length L
  posts: Float64Array[]; // post-activations, length L
  n: number;
}

/** Forward a batch stored as n x d row-major. */
export function forwardBatch(mlp: Mlp, X: Float64Array, n: number): { out: Float64Array; cache: BatchCache } {
  let cur = X;
  let curDim = mlp.inputDim;
  const inputs: Float64Array[] = [];
  const pres: Float64Array[] = [];
  const posts: Float64Array[] = [];
  for (const layer of mlp.layers) {
    inputs.push(cur);
    const pre = new Float64Array(n * layer.outDim);
    for (let s = 0; s < n; s++) {
      const xo = s * curDim;
      const po = s * layer.outDim;
      for (let r = 0; r < layer.outDim; r++) {
        let acc = layer.b[r];
        const wo = r * layer.inDim;
        for (let c = 0; c < layer.inDim; c++) acc += layer.w[wo + c] * cur[xo + c];
        pre[po + r] = acc;
      }
    }
    const post = applyActivation(layer.activation, pre);
    pres.push(pre);
    posts.push(post);
    cur = post;
    curDim = layer.outDim;
  }
  return { out: cur, cache: { inputs, pres, posts, n } };
}

export interface Grads {
  dW: Float64Array[];
  dB: Float64Array[];
  dX: Float64Array;
}

/** Backprop dLoss/dOutput through the cached batch; accumulates fresh grads. */
export function backwardBatch(mlp: Mlp, cache: BatchCache, dOut: Float64Array): Grads {
  const L = mlp.layers.length;
  const dW = mlp.layers.map((l) => new Float64Array(l.w.length));
  const dB = mlp.layers.map((l) => new Float64Array(l.b.length));
  let dPost = dOut;
  for (let li = L - 1; li >= 0; li--) {
    const layer = mlp.layers[li];
    const dPre = activationGrad(layer.activation, cache.pres[li], cache.posts[li], dPost);
    const input = cache.inputs[li];
    const dIn = new Float64Array(cache.n * layer.inDim);
    for (let s = 0; s < cache.n; s++) {
      const po = s * layer.outDim;
      const xo = s * layer.inDim;
      for (let r = 0; r < layer.outDim; r++) {
        const g = dPre[po + r];
        if (g === 0) continue;
        dB[li][r] += g;
        const wo = r * layer.inDim;
        for (let c = 0; c < layer.inDim; c++) {
          dW[li][wo + c] += g * input[xo + c];
          dIn[xo + c] += g * layer.w[wo + c];
        }
      }
    }
    dPost = dIn;
  }
  return { dW, dB, dX: dPost };
}

/** Adam over a set of named parameter arrays. */
export class Adam {
  private m = new Map<string, Float64Array>();
  private v = new Map<string, Float64Array>();
  private t = 0;

  constructor(
    public lr: number,
    public weightDecay = 0,
    public beta1 = 0.9,
    public beta2 = 0.999,
    public eps = 1e-8,
  ) {}

  beginStep() {
    this.t += 1;
  }

  update(key: string, param: Float64Array, grad: Float64Array, decay = this.weightDecay) {
    let m = this.m.get(key);
    let v = this.v.get(key);
    if (!m) {
      m = new Float64Array(param.length);
      v = new Float64Array(param.length);
      this.m.set(key, m);
      this.v.set(key, v!);
    }
    const c1 = 1 - Math.pow(this.beta1, this.t);
    const c2 = 1 - Math.pow(this.beta2, this.t);
    for (let i = 0; i < param.length; i++) {
      const g = grad[i] + decay * param[i];
      m[i] = this.beta1 * m[i] + (1 - this.beta1) * g;
      v![i] = this.beta2 * v![i] + (1 - this.beta2) * g * g;
      param[i] -= (this.lr * (m[i] / c1)) / (Math.sqrt(v![i] / c2) + this.eps);
    }
  }

  stepMlp(mlp: Mlp, grads: Grads, scale = 1) {
    for (let li = 0; li < mlp.layers.length; li++) {
      const layer = mlp.layers[li];
      if (scale !== 1) {
        for (let i = 0; i < grads.dW[li].length; i++) grads.dW[li][i] *= scale;
        for (let i = 0; i < grads.dB[li].length; i++) grads.dB[li][i] *= scale;
      }
      this.update(`${mlp.name}.${li}.w`, layer.w, grads.dW[li]);
      this.update(`${mlp.name}.${li}.b`, layer.b, grads.dB[li], 0);
    }
  }
}

export function forwardOne(mlp: Mlp, x: Float64Array): Float64Array {
  const { out } = forwardBatch(mlp, x, 1);
  return out;
}
