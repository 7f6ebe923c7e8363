/** Controller-output fidelity of the autoencoder: how much does the control
 * action move when the controller sees the reconstruction instead of the
 * original image. */

import { forwardBatch, Mlp } from "./mlp.js";
import { encodeMeans, GmVae } from "./gmvae.js";

export interface FidelityReport {
  reconEpsilon: number; // mean ||F(V(x)) - F(x)||_2
  baseline: number; // mean ||F(x)||_2
  ratio: number; // reconEpsilon / baseline; NaN when the baseline is zero
  zeroBaseline: boolean;
}

export function measureEpsilon(
  vae: GmVae,
  controller: Mlp,
  images: Float64Array,
  n: number,
  pixels: number,
): FidelityReport {
  const Z = encodeMeans(vae, images, n, pixels);
  const xHat = forwardBatch(vae.decoder, Z, n).out;
  const fOrig = forwardBatch(controller, images, n).out;
  const fHat = forwardBatch(controller, xHat, n).out;
  const dOut = controller.layers[controller.layers.length - 1].outDim;
  let eps = 0;
  let base = 0;
  for (let s = 0; s < n; s++) {
    let d2 = 0;
    let b2 = 0;
    for (let o = 0; o < dOut; o++) {
      const diff = fHat[s * dOut + o] - fOrig[s * dOut + o];
      d2 += diff * diff;
      b2 += fOrig[s * dOut + o] * fOrig[s * dOut + o];
    }
    eps += Math.sqrt(d2);
    base += Math.sqrt(b2);
  }
  eps /= n;
  base /= n;
  const zero = base === 0;
  return { reconEpsilon: eps, baseline: base, ratio: zero ? NaN : eps / base, zeroBaseline: zero };
}
