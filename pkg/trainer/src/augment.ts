/** Image augmentations: brightness scaling and vertical motion blur.
 * Labels are untouched; only pixels change. */

import { Rng } from "./rng.js";

export type AugmentationKind = "brightness" | "vertical_motion_blur";
export type AugmentationLevel = "delta1" | "delta2" | "delta3";

export interface AugmentationSpec {
  kind: AugmentationKind;
  level: AugmentationLevel;
}

export const BRIGHTNESS_RANGES: Record<AugmentationLevel, [number, number]> = {
  delta1: [0.8, 1.2],
  delta2: [0.6, 1.4],
  delta3: [0.5, 1.5],
};

export const BLUR_KERNELS: Record<AugmentationLevel, [number, number]> = {
  delta1: [1, 2],
  delta2: [3, 4],
  delta3: [5, 6],
};

export function tagFor(spec: AugmentationSpec): string {
  return `${spec.kind}:${spec.level}`;
}

export function applyBrightness(img: Float64Array, factor: number): Float64Array {
  const out = new Float64Array(img.length);
  for (let p = 0; p < img.length; p++) {
    const v = img[p] * factor;
    out[p] = v < 0 ? 0 : v > 1 ? 1 : v;
  }
  return out;
}

export function applyVerticalBlur(img: Float64Array, h: number, w: number, k: number): Float64Array {
  if (k <= 1) return img.slice();
  const out = new Float64Array(img.length);
  const up = Math.floor((k - 1) / 2);
  const down = k - 1 - up;
  for (let c = 0; c < w; c++) {
    for (let r = 0; r < h; r++) {
      let acc = 0;
      for (let dr = -up; dr <= down; dr++) {
        let rr = r + dr;
        if (rr < 0) rr = 0; // edge replication
        if (rr >= h) rr = h - 1;
        acc += img[rr * w + c];
      }
      out[r * w + c] = acc / k;
    }
  }
  return out;
}

/** Per-image random factor / kernel size from the level's range. */
export function augment(
  images: Float64Array,
  n: number,
  h: number,
  w: number,
  spec: AugmentationSpec,
  seed: number,
): Float64Array {
  const pixels = h * w;
  const rng = new Rng(seed);
  const out = new Float64Array(images.length);
  for (let i = 0; i < n; i++) {
    const img = images.subarray(i * pixels, (i + 1) * pixels);
    if (spec.kind === "brightness") {
      const [lo, hi] = BRIGHTNESS_RANGES[spec.level];
      out.set(applyBrightness(img, rng.uniform(lo, hi)), i * pixels);
    } else if (spec.kind === "vertical_motion_blur") {
      const [klo, khi] = BLUR_KERNELS[spec.level];
      out.set(applyVerticalBlur(img, h, w, rng.int(klo, khi)), i * pixels);
    } else {
      throw new Error(`unknown augmentation kind ${(spec as AugmentationSpec).kind}`);
    }
  }
  return out;
}
